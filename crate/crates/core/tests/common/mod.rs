#![allow(dead_code)]

use fourier_lab::TrigPoly;
use num_complex::Complex64;
use proptest::prelude::*;

pub fn coeff() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

/// One-dimensional polynomial with up to `max_terms` terms in `[-r, r]`.
pub fn poly(r: i64, max_terms: usize) -> impl Strategy<Value = TrigPoly> {
    prop::collection::vec((-r..=r, coeff()), 1..=max_terms)
        .prop_map(|terms| TrigPoly::from_terms(1, terms).unwrap())
        .prop_filter("nonzero", |p| !p.is_zero())
}

/// Two-dimensional polynomial with frequencies in `[-r, r]^2`.
pub fn poly2(r: i64, max_terms: usize) -> impl Strategy<Value = TrigPoly> {
    prop::collection::vec(((-r..=r, -r..=r), coeff()), 1..=max_terms)
        .prop_map(|terms| {
            TrigPoly::from_terms(2, terms.into_iter().map(|((a, b), c)| (vec![a, b], c))).unwrap()
        })
        .prop_filter("nonzero", |p| !p.is_zero())
}

/// Plain `sqrt(Σ|c|²)`, independent of the library norms.
pub fn coeff_l2(p: &TrigPoly) -> f64 {
    p.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt()
}

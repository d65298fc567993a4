use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// Unnormalised in-place DFT of a row-major `m^dim` array along every axis.
///
/// `Inverse` computes `Σ_k x_k e^{+2πi jk/m}` (synthesis), `Forward` the
/// conjugate sum (analysis).
pub(crate) fn transform_axes(buf: &mut [Complex64], dim: usize, m: usize, dir: FftDirection) {
    debug_assert_eq!(buf.len(), m.pow(dim as u32));
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft(m, dir);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::default(); m];
    for axis in 0..dim {
        let stride = m.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            for row in buf.chunks_exact_mut(m) {
                fft.process_with_scratch(row, &mut scratch);
            }
            continue;
        }
        let block = stride * m;
        for outer in (0..buf.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (k, v) in line.iter_mut().enumerate() {
                    *v = buf[base + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    buf[base + k * stride] = *v;
                }
            }
        }
    }
}

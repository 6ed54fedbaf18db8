//! Action of a matrix exponential on a vector, `e^{G} v`, for sparse
//! generators given as closures. Scaling-and-squaring on the vector: the
//! exponent is split into `s` steps with `‖G‖/s ≤ 1/2` and each step is a
//! truncated Taylor series.

use ndarray::Array1;
use num_complex::Complex64;

const MAX_TERMS: usize = 60;

pub(crate) fn expmv<F>(generator: F, norm_bound: f64, v: &Array1<Complex64>) -> Array1<Complex64>
where
    F: Fn(&Array1<Complex64>) -> Array1<Complex64>,
{
    let steps = (2.0 * norm_bound).ceil().max(1.0) as usize;
    let inv = 1.0 / steps as f64;
    let mut out = v.clone();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut acc = out.clone();
        let base = acc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for k in 1..=MAX_TERMS {
            term = generator(&term).mapv(|z| z * (inv / k as f64));
            acc += &term;
            let size = term.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if size <= 1e-18 * base.max(1e-300) {
                break;
            }
        }
        out = acc;
    }
    out
}

/// `G v` for `G = α a† − α* a` truncated to `dim` levels.
pub(crate) fn displacement_generator(alpha: Complex64, v: &Array1<Complex64>) -> Array1<Complex64> {
    let dim = v.len();
    let mut out = Array1::zeros(dim);
    for n in 0..dim {
        // a†|n⟩ = √(n+1)|n+1⟩, a|n⟩ = √n|n−1⟩
        if n + 1 < dim {
            out[n + 1] += alpha * ((n + 1) as f64).sqrt() * v[n];
        }
        if n > 0 {
            out[n - 1] -= alpha.conj() * (n as f64).sqrt() * v[n];
        }
    }
    out
}

pub(crate) fn displacement_norm_bound(alpha: Complex64, dim: usize) -> f64 {
    2.0 * alpha.norm() * (dim as f64).sqrt()
}

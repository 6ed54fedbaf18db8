//! Brute-force verification in a truncated number basis.
//!
//! Everything here is computed from Fock amplitudes and ladder-matrix
//! actions, never from covariance matrices, so it can check the Gaussian
//! closed forms independently.

mod expect;
mod expm;
mod ladder;
mod state;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use thiserror::Error;

pub use expect::{
    centered, converge, converged_cutoff, expect, expect_unordered, ordered_square, witness_general,
    MAX_CONVERGENCE_CUTOFF, MAX_WITNESS_DEGREE,
};
pub use ladder::{apply_mode_letters, build_ladder, split_word, LadderMatrices};
pub use state::{
    amplifier_channel, coherent_amplitudes, displace, fock_state, loss_channel, mode_state,
    rotate_phase, squeezed_vacuum_amplitudes, thermal_background, thermal_density, FockKind,
    FockState, ModeState, MAX_JOINT_MIXED_CUTOFF, MAX_MODE_MIXED_CUTOFF, MAX_PURE_CUTOFF,
    TRUNCATION_BUDGET,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("cutoff must be at least 2, got {0}")]
    CutoffTooSmall(usize),
    #[error("cutoff {cutoff} exceeds the limit of {max} for this representation")]
    CutoffTooLarge { cutoff: usize, max: usize },
    #[error("truncation deficit {deficit:e} at cutoff {cutoff} exceeds the budget {budget:e}")]
    TruncationBudget { cutoff: usize, deficit: f64, budget: f64 },
    #[error("expression degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: usize, cap: usize },
    #[error("no convergence up to cutoff {max_cutoff}: {detail}")]
    NoConvergence { max_cutoff: usize, detail: String },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Two-mode generator action on amplitudes `[n_a, n_c]`.
fn two_mode_apply<F>(x: &Array1<Complex64>, dim: usize, f: F) -> Array1<Complex64>
where
    F: Fn(usize, usize, Complex64, &mut Array1<Complex64>),
{
    let mut out = Array1::zeros(dim * dim);
    for na in 0..dim {
        for nc in 0..dim {
            let amp = x[na * dim + nc];
            if amp.norm_sqr() != 0.0 {
                f(na, nc, amp, &mut out);
            }
        }
    }
    out
}

fn trace_out_second(v: &Array1<Complex64>, dim: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((dim, dim), |(m, mp)| {
        (0..dim).map(|k| v[m * dim + k] * v[mp * dim + k].conj()).sum()
    })
}

/// Loss by mixing the mode with a vacuum ancilla on a beam splitter of
/// transmissivity `η`, `U = exp(ϑ(a†c − a c†))` with `cos ϑ = √η`, then
/// tracing out the ancilla.
pub fn loss_by_beam_splitter(psi: &Array1<Complex64>, eta: f64) -> Array2<Complex64> {
    let dim = psi.len();
    let angle = eta.sqrt().acos();
    let mut v = Array1::zeros(dim * dim);
    for n in 0..dim {
        v[n * dim] = psi[n];
    }
    let gen = |x: &Array1<Complex64>| {
        two_mode_apply(x, dim, |na, nc, amp, out| {
            // a† c
            if nc > 0 && na + 1 < dim {
                out[(na + 1) * dim + nc - 1] += amp * (angle * ((na + 1) as f64 * nc as f64).sqrt());
            }
            // − a c†
            if na > 0 && nc + 1 < dim {
                out[(na - 1) * dim + nc + 1] -= amp * (angle * (na as f64 * (nc + 1) as f64).sqrt());
            }
        })
    };
    let out = expm::expmv(gen, 2.0 * angle * dim as f64, &v);
    trace_out_second(&out, dim)
}

/// Excess noise by two-mode squeezing with a vacuum ancilla,
/// `U = exp(r(a†c† − a c))` with `cosh r = √g`, then tracing out the ancilla.
pub fn gain_by_two_mode_squeezer(psi: &Array1<Complex64>, g: f64) -> Array2<Complex64> {
    let dim = psi.len();
    let r = g.sqrt().acosh();
    let mut v = Array1::zeros(dim * dim);
    for n in 0..dim {
        v[n * dim] = psi[n];
    }
    let gen = |x: &Array1<Complex64>| {
        two_mode_apply(x, dim, |na, nc, amp, out| {
            if na + 1 < dim && nc + 1 < dim {
                out[(na + 1) * dim + nc + 1] += amp * (r * ((na + 1) as f64 * (nc + 1) as f64).sqrt());
            }
            if na > 0 && nc > 0 {
                out[(na - 1) * dim + nc - 1] -= amp * (r * (na as f64 * nc as f64).sqrt());
            }
        })
    };
    let out = expm::expmv(gen, 2.0 * r * dim as f64, &v);
    trace_out_second(&out, dim)
}

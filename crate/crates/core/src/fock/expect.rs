use num_complex::Complex64;

use super::ladder::{apply_mode_letters, split_word};
use super::state::{fock_state, FockState, ModeState, Repr};
use super::FockError;
use crate::dsl::{adjoint_product, formal_normal_order, reorder, Letter, ModeSet, OperatorExpr, MAX_DEGREE};
use crate::gaussian::StateParams;

/// Cap on the degree of `f` in `⟨:f†f:⟩`.
pub const MAX_WITNESS_DEGREE: usize = 4;

/// Doubling schedule gives up past this cutoff.
pub const MAX_CONVERGENCE_CUTOFF: usize = 512;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn mode_expect(state: &ModeState, letters: &[Letter]) -> Complex64 {
    let dim = state.dim();
    let mut acc = ZERO;
    match state {
        ModeState::Pure(v) => {
            for n in 0..dim {
                if let Some((x, out)) = apply_mode_letters(letters, n, dim) {
                    acc += v[out].conj() * v[n] * x;
                }
            }
        }
        ModeState::Mixed(rho) => {
            // tr(ρW) = Σₙ ⟨n|ρ W|n⟩
            for n in 0..dim {
                if let Some((x, out)) = apply_mode_letters(letters, n, dim) {
                    acc += rho[[n, out]] * x;
                }
            }
        }
    }
    acc
}

fn word_expect(state: &FockState, word: &[Letter]) -> Complex64 {
    let c = state.cutoff;
    let (wa, wb) = split_word(word);
    match &state.repr {
        Repr::Product(a, b) => mode_expect(a, &wa) * mode_expect(b, &wb),
        Repr::Pure(amps) => {
            let mut acc = ZERO;
            for na in 0..c {
                let Some((xa, oa)) = apply_mode_letters(&wa, na, c) else {
                    continue;
                };
                for nb in 0..c {
                    if let Some((xb, ob)) = apply_mode_letters(&wb, nb, c) {
                        acc += amps[[oa, ob]].conj() * amps[[na, nb]] * (xa * xb);
                    }
                }
            }
            acc
        }
        Repr::Joint(rho) => {
            let mut acc = ZERO;
            for na in 0..c {
                let Some((xa, oa)) = apply_mode_letters(&wa, na, c) else {
                    continue;
                };
                for nb in 0..c {
                    if let Some((xb, ob)) = apply_mode_letters(&wb, nb, c) {
                        acc += rho[[na * c + nb, oa * c + ob]] * (xa * xb);
                    }
                }
            }
            acc
        }
    }
}

/// `⟨ψ|M|ψ⟩` or `tr(ρM)` with `M` the truncated matrix of `reorder(expr)`.
pub fn expect(expr: &OperatorExpr, state: &FockState) -> Result<Complex64, FockError> {
    let degree = expr.degree();
    if degree > MAX_DEGREE {
        return Err(FockError::DegreeCap {
            degree,
            cap: MAX_DEGREE,
        });
    }
    let ordered = reorder(expr);
    Ok(ordered.terms().map(|(w, &k)| k * word_expect(state, w)).sum())
}

/// Expectation of `expr` taken exactly as written, each word being the
/// product of truncated letter matrices.
pub fn expect_unordered(expr: &OperatorExpr, state: &FockState) -> Complex64 {
    expr.terms().map(|(w, &k)| k * word_expect(state, w)).sum()
}

/// `f − ⟨f⟩`.
pub fn centered(f: &OperatorExpr, state: &FockState) -> Result<OperatorExpr, FockError> {
    let mean = expect(f, state)?;
    Ok(f - &OperatorExpr::scalar(mean))
}

/// `⟨:f†f:⟩` with formal ordering on `modes`.
pub fn ordered_square(f: &OperatorExpr, modes: ModeSet, state: &FockState) -> Result<f64, FockError> {
    let degree = f.degree();
    if degree > MAX_WITNESS_DEGREE {
        return Err(FockError::DegreeCap {
            degree,
            cap: MAX_WITNESS_DEGREE,
        });
    }
    let ordered = reorder(&formal_normal_order(&adjoint_product(f), modes));
    Ok(expect(&ordered, state)?.re)
}

/// `⟨:_A f†f :_A⟩`, nonnegative on every state that is classical in mode A.
pub fn witness_general(f: &OperatorExpr, state: &FockState) -> Result<f64, FockError> {
    ordered_square(f, ModeSet::A, state)
}

/// Run `eval` on states built at cutoffs `2, 4, 8, …` until two successive
/// cutoffs agree within `tol` in every component, measured relative to
/// `max(1, |value|)`. Returns the smaller of
/// the two cutoffs and its values. Cutoffs that break the truncation budget
/// are skipped.
pub fn converge<F>(
    si: &StateParams,
    lo: &StateParams,
    tol: f64,
    max_cutoff: usize,
    eval: F,
) -> Result<(usize, Vec<f64>), FockError>
where
    F: Fn(&FockState) -> Result<Vec<f64>, FockError>,
{
    if tol.is_nan() || tol <= 0.0 {
        return Err(FockError::InvalidParams(format!("tolerance {tol} must be positive")));
    }
    let max_cutoff = max_cutoff.min(MAX_CONVERGENCE_CUTOFF);
    let mut prev: Option<(usize, Vec<f64>)> = None;
    let mut cutoff = 2;
    let mut last_err = None;
    while cutoff <= max_cutoff {
        match fock_state(si, lo, cutoff) {
            Ok(state) => {
                let values = eval(&state)?;
                if let Some((pc, pv)) = &prev {
                    let settled = pv
                        .iter()
                        .zip(&values)
                        .all(|(x, y)| (x - y).abs() < tol * y.abs().max(1.0));
                    if settled {
                        return Ok((*pc, pv.clone()));
                    }
                }
                prev = Some((cutoff, values));
            }
            Err(e @ (FockError::TruncationBudget { .. } | FockError::CutoffTooLarge { .. })) => {
                prev = None;
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
        cutoff *= 2;
    }
    Err(FockError::NoConvergence {
        max_cutoff,
        detail: last_err.map(|e| e.to_string()).unwrap_or_else(|| "values still changing".into()),
    })
}

/// Smallest cutoff at which `⟨expr⟩` has settled to within `tol`.
pub fn converged_cutoff(
    si: &StateParams,
    lo: &StateParams,
    expr: &OperatorExpr,
    tol: f64,
    max_cutoff: usize,
) -> Result<usize, FockError> {
    converge(si, lo, tol, max_cutoff, |s| {
        let z = expect(expr, s)?;
        Ok(vec![z.re, z.im])
    })
    .map(|(c, _)| c)
}

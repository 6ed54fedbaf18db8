//! Randomized cross-checks between the Gaussian engine, the operator
//! rewriter and the Fock-basis oracle.
//!
//! Every suite draws its cases sequentially from a seeded ChaCha stream and
//! then evaluates them in parallel, so reports are reproducible bit for bit.

use std::f64::consts::PI;

use ndarray::Array1;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{apply_gain_noise, apply_loss, GainParam, LossParam};
use crate::dsl::{formal_normal_order, reorder, Letter, ModeSet, OperatorExpr, Word};
use crate::fock::{
    build_ladder, centered, coherent_amplitudes, converge, expect, ordered_square, witness_general,
    FockError, FockState, ModeState,
};
use crate::gaussian::{make_state, mean_photon, StateParams};
use crate::witness::{ordered_variances, TwoModeProduct};

/// Relative agreement demanded between Gaussian and Fock numbers.
pub const AGREEMENT_TOL: f64 = 1e-6;
/// Allowed negativity of a witness on a classical signal.
pub const CLASSICALITY_TOL: f64 = 1e-8;
/// Allowed deviation from the closed-form channel laws.
pub const CHANNEL_LAW_TOL: f64 = 1e-12;
/// Allowed entrywise difference between an expression and its reordering.
pub const REORDER_TOL: f64 = 1e-10;

/// Relative change between successive cutoffs that counts as converged; one
/// decade below the agreement threshold.
const CONVERGENCE_TOL: f64 = 1e-7;
/// Cap on failure messages kept per suite.
const MAX_MESSAGES: usize = 10;

/// `|g − f| / max(1, |g|)`: relative for large values, absolute near zero.
pub fn relative_deviation(reference: f64, value: f64) -> f64 {
    (reference - value).abs() / reference.abs().max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ValidateConfig {
    pub trials: usize,
    pub seed: u64,
    pub cutoff_max: usize,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            trials: 200,
            seed: 42,
            cutoff_max: 128,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub trials: usize,
    pub passed: bool,
    pub max_deviation: f64,
    pub threshold: f64,
    pub failures: usize,
    pub messages: Vec<String>,
}

impl SuiteReport {
    fn collect(name: &'static str, threshold: f64, outcomes: Vec<Result<f64, String>>) -> Self {
        let trials = outcomes.len();
        let mut max_deviation = 0.0f64;
        let mut failures = 0;
        let mut messages = Vec::new();
        for (i, outcome) in outcomes.into_iter().enumerate() {
            let msg = match outcome {
                Ok(dev) => {
                    max_deviation = max_deviation.max(dev);
                    if dev <= threshold {
                        continue;
                    }
                    format!("trial {i}: deviation {dev:e} above {threshold:e}")
                }
                Err(e) => format!("trial {i}: {e}"),
            };
            failures += 1;
            if messages.len() < MAX_MESSAGES {
                messages.push(msg);
            }
        }
        SuiteReport {
            name,
            trials,
            passed: failures == 0,
            max_deviation,
            threshold,
            failures,
            messages,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub config: ValidateConfig,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform point in the disc of radius `r`.
pub fn random_amplitude<R: Rng>(rng: &mut R, r: f64) -> Complex64 {
    let radius = r * rng.random::<f64>().sqrt();
    Complex64::from_polar(radius, rng.random_range(0.0..2.0 * PI))
}

/// Displaced squeezed thermal parameters with `|α| ≤ max_alpha`,
/// `|ζ| ≤ max_zeta`, `n̄ ≤ max_nbar`.
pub fn random_params<R: Rng>(rng: &mut R, max_alpha: f64, max_zeta: f64, max_nbar: f64) -> StateParams {
    let zeta = if max_zeta > 0.0 {
        rng.random_range(-max_zeta..=max_zeta)
    } else {
        0.0
    };
    let nbar = if max_nbar > 0.0 {
        rng.random_range(0.0..=max_nbar)
    } else {
        0.0
    };
    StateParams {
        zeta,
        nbar,
        phi: rng.random_range(0.0..PI),
        alpha: random_amplitude(rng, max_alpha),
    }
}

/// Haar-random unit vector in `dim` dimensions.
pub fn haar_vector<R: Rng>(rng: &mut R, dim: usize) -> Array1<Complex64> {
    let v: Array1<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.mapv(|z| z / norm)
}

const LETTERS: [Letter; 4] = [Letter::A, Letter::Ad, Letter::B, Letter::Bd];

/// Sum of `1..=max_terms` random words of length `≤ max_degree` with
/// Gaussian complex coefficients.
pub fn random_expr<R: Rng>(rng: &mut R, max_degree: usize, max_terms: usize) -> OperatorExpr {
    let n_terms = rng.random_range(1..=max_terms);
    let mut expr = OperatorExpr::zero();
    for _ in 0..n_terms {
        let len = rng.random_range(0..=max_degree);
        let word: Word = (0..len).map(|_| LETTERS[rng.random_range(0..4)]).collect();
        let c = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        expr.add_term(c, &word);
    }
    expr
}

/// Gaussian prediction and Fock oracle for `(var_L, partial_no, full_no)`.
pub fn oracle_agreement(
    si: &StateParams,
    lo: &StateParams,
    theta: f64,
    cutoff_max: usize,
) -> Result<(usize, f64), FockError> {
    let gaussian = TwoModeProduct::from_params(si, lo).map_err(|e| FockError::InvalidParams(e.to_string()))?;
    let g = ordered_variances(&gaussian, theta);
    let l = OperatorExpr::homodyne(theta);
    let (cutoff, f) = converge(si, lo, CONVERGENCE_TOL, cutoff_max, |state| {
        let dl = centered(&l, state)?;
        let var = expect(&(&dl * &dl), state)?.re;
        let partial = witness_general(&dl, state)?;
        let full = ordered_square(&dl, ModeSet::AB, state)?;
        Ok(vec![var, partial, full])
    })?;
    let dev = [g.var_l, g.partial_no, g.full_no]
        .iter()
        .zip(&f)
        .map(|(&a, &b)| relative_deviation(a, b))
        .fold(0.0, f64::max);
    Ok((cutoff, dev))
}

pub fn gaussian_fock_agreement(config: &ValidateConfig) -> SuiteReport {
    let mut rng = rng_for(config.seed, 1);
    let cases: Vec<(StateParams, StateParams, f64)> = (0..config.trials)
        .map(|_| {
            let si = random_params(&mut rng, 2.0, 0.5, 1.0);
            let lo = random_params(&mut rng, 2.0, 0.5, 1.0);
            (si, lo, rng.random_range(0.0..2.0 * PI))
        })
        .collect();
    let outcomes = cases
        .par_iter()
        .map(|(si, lo, theta)| {
            oracle_agreement(si, lo, *theta, config.cutoff_max)
                .map(|(_, dev)| dev)
                .map_err(|e| e.to_string())
        })
        .collect();
    SuiteReport::collect("gaussian_fock_agreement", AGREEMENT_TOL, outcomes)
}

/// Levels kept for the signal's coherent amplitudes in the classicality suite.
const CLASSICALITY_CUTOFF: usize = 32;
/// Largest LO vector dimension drawn in the classicality suite.
const MAX_LO_DIM: usize = 8;

/// Coherent signal of amplitude `alpha` alongside an arbitrary LO vector.
pub fn coherent_with_vector(alpha: Complex64, lo: &Array1<Complex64>, cutoff: usize) -> Result<FockState, FockError> {
    let si = ModeState::Pure(coherent_amplitudes(alpha, cutoff));
    let lo = ModeState::Pure(lo.clone()).padded(cutoff);
    FockState::product(&si, &lo, cutoff)
}

/// Returns the negativity `max(0, −w)` of `w = ⟨:f†f:_A⟩`.
pub fn classicality(config: &ValidateConfig) -> SuiteReport {
    let mut rng = rng_for(config.seed, 2);
    let cases: Vec<(Complex64, Array1<Complex64>, OperatorExpr)> = (0..config.trials)
        .map(|_| {
            let alpha = random_amplitude(&mut rng, 1.5);
            let dim = rng.random_range(2..=MAX_LO_DIM);
            let lo = haar_vector(&mut rng, dim);
            (alpha, lo, random_expr(&mut rng, 2, 4))
        })
        .collect();
    let outcomes = cases
        .par_iter()
        .map(|(alpha, lo, f)| {
            let state = coherent_with_vector(*alpha, lo, CLASSICALITY_CUTOFF).map_err(|e| e.to_string())?;
            let w = witness_general(f, &state).map_err(|e| e.to_string())?;
            Ok((-w).max(0.0))
        })
        .collect();
    SuiteReport::collect("classicality", CLASSICALITY_TOL, outcomes)
}

/// Largest deviation from the loss and excess-noise laws for one draw.
pub fn channel_law_deviation(si: &StateParams, lo: &StateParams, theta: f64, eta: f64, g: f64) -> Result<f64, String> {
    let si = make_state(si).map_err(|e| e.to_string())?;
    let lo = make_state(lo).map_err(|e| e.to_string())?;
    let eta = LossParam::new(eta).map_err(|e| e.to_string())?;
    let g = GainParam::new(g).map_err(|e| e.to_string())?;
    let ideal = ordered_variances(&TwoModeProduct::new(si, lo), theta).partial_no;
    let lossy = ordered_variances(&TwoModeProduct::new(apply_loss(&si, eta), lo), theta).partial_no;
    let noisy = ordered_variances(&TwoModeProduct::new(apply_gain_noise(&si, g), lo), theta).partial_no;
    let gv = g.gain();
    let loss_dev = (lossy - eta.eta() * ideal).abs();
    let noise_dev = (noisy - gv * ideal - (gv - 1.0) * (2.0 * mean_photon(&lo) + 1.0)).abs();
    Ok(loss_dev.max(noise_dev))
}

pub fn channel_laws(config: &ValidateConfig) -> SuiteReport {
    let mut rng = rng_for(config.seed, 3);
    let cases: Vec<_> = (0..config.trials)
        .map(|_| {
            let si = random_params(&mut rng, 2.0, 0.5, 1.0);
            let lo = random_params(&mut rng, 2.0, 0.5, 1.0);
            let theta = rng.random_range(0.0..2.0 * PI);
            let eta = rng.random_range(0.0..=1.0);
            let g = rng.random_range(1.0..=3.0);
            (si, lo, theta, eta, g)
        })
        .collect();
    let outcomes = cases
        .par_iter()
        .map(|(si, lo, theta, eta, g)| channel_law_deviation(si, lo, *theta, *eta, *g))
        .collect();
    SuiteReport::collect("channel_laws", CHANNEL_LAW_TOL, outcomes)
}

/// Cutoff of the dense matrices compared in the reorder suite.
pub const REORDER_CUTOFF: usize = 9;

/// Largest entrywise difference between the truncated matrices of `expr`
/// and `reorder(expr)` over basis states `|n_a, n_b⟩` with both levels at
/// most `cutoff − 1 − degree`, where truncation cannot interfere.
pub fn reorder_matrix_deviation(expr: &OperatorExpr, cutoff: usize) -> Result<f64, FockError> {
    let degree = expr.degree();
    if degree + 1 > cutoff {
        return Err(FockError::CutoffTooSmall(cutoff));
    }
    let ladder = build_ladder(cutoff)?;
    let dense = |e: &OperatorExpr| {
        let d = cutoff * cutoff;
        let mut m = ndarray::Array2::<Complex64>::zeros((d, d));
        for (w, &k) in e.terms() {
            m = m + ladder.word_matrix(w).mapv(|x| x * k);
        }
        m
    };
    let before = dense(expr);
    let after = dense(&reorder(expr));
    let interior = cutoff - degree;
    let idx: Vec<usize> = (0..interior)
        .flat_map(|na| (0..interior).map(move |nb| na * cutoff + nb))
        .collect();
    let mut dev = 0.0f64;
    for &r in &idx {
        for &c in &idx {
            dev = dev.max((before[[r, c]] - after[[r, c]]).norm());
        }
    }
    Ok(dev)
}

/// `formal_normal_order(L, {A})` must return `L` unchanged.
pub fn homodyne_is_ordered(theta: f64) -> bool {
    let l = OperatorExpr::homodyne(theta);
    formal_normal_order(&l, ModeSet::A) == l
}

pub fn reorder_matrix(config: &ValidateConfig) -> SuiteReport {
    let mut rng = rng_for(config.seed, 4);
    let cases: Vec<(OperatorExpr, f64)> = (0..config.trials)
        .map(|_| (random_expr(&mut rng, 4, 5), rng.random_range(0.0..2.0 * PI)))
        .collect();
    let outcomes = cases
        .par_iter()
        .map(|(expr, theta)| {
            if !homodyne_is_ordered(*theta) {
                return Err(format!("formal ordering changed L at θ = {theta}"));
            }
            reorder_matrix_deviation(expr, REORDER_CUTOFF).map_err(|e| e.to_string())
        })
        .collect();
    SuiteReport::collect("reorder_matrix", REORDER_TOL, outcomes)
}

pub fn run_all(config: &ValidateConfig) -> ValidationReport {
    let suites = vec![
        gaussian_fock_agreement(config),
        classicality(config),
        channel_laws(config),
        reorder_matrix(config),
    ];
    ValidationReport {
        config: *config,
        passed: suites.iter().all(|s| s.passed),
        suites,
    }
}

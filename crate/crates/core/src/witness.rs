//! Balanced-homodyne witness evaluation on product Gaussian states.
//!
//! The observable is `L = e^{iθ} a†b + e^{−iθ} a b†`. In quadratures this is
//! `L = vᵀ R_θᵀ v′`, so rotating the LO by `θ` (see [`crate::gaussian::rotate`])
//! is the same as turning the phase knob. With this convention blocking the
//! signal gives `⟨(ΔL)²⟩ = ⟨b†b⟩`, and two equally squeezed modes cancel
//! completely at `θ = π/2`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::gaussian::{make_state, mean_photon, GaussianError, SingleModeGaussian, StateParams};
use crate::linalg::{Mat2, Vec2};

/// Default verdict tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// `var_L` at or below this magnitude is treated as exactly zero.
pub const ZERO_VARIANCE: f64 = 1e-15;

/// Ties in the LO search are decided within this many dB.
const TIE_DB: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WitnessError {
    #[error("LO mean photon number {0:e} is zero; shot-noise reference undefined")]
    ZeroShotNoise(f64),
    #[error("empty search grid")]
    EmptyGrid,
    #[error(transparent)]
    State(#[from] GaussianError),
}

/// Uncorrelated signal (mode A) and local oscillator (mode B).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoModeProduct {
    pub si: SingleModeGaussian,
    pub lo: SingleModeGaussian,
}

impl TwoModeProduct {
    pub fn new(si: SingleModeGaussian, lo: SingleModeGaussian) -> Self {
        TwoModeProduct { si, lo }
    }

    pub fn from_params(si: &StateParams, lo: &StateParams) -> Result<Self, GaussianError> {
        Ok(TwoModeProduct {
            si: make_state(si)?,
            lo: make_state(lo)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "nonclassical_SI")]
    NonclassicalSi,
    #[serde(rename = "classical_consistent")]
    ClassicalConsistent,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NonclassicalSi => f.write_str("nonclassical_SI"),
            Verdict::ClassicalConsistent => f.write_str("classical_consistent"),
        }
    }
}

/// Raw, partially and fully normally ordered variances of `L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderedVariances {
    pub var_l: f64,
    pub partial_no: f64,
    pub full_no: f64,
}

/// Noise parameter in dB that may be `−∞`. Serialized as the string `"-inf"`
/// in that case.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct NoiseDb(pub f64);

impl NoiseDb {
    pub fn is_neg_infinite(&self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// Value suitable for plotting: `−∞` and anything below `floor` become `floor`.
    pub fn clamped(&self, floor: f64) -> f64 {
        self.0.max(floor)
    }
}

impl fmt::Display for NoiseDb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_neg_infinite() {
            f.write_str("-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for NoiseDb {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_neg_infinite() {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for NoiseDb {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(NoiseDb(v)),
            Raw::Text(t) if t == "-inf" => Ok(NoiseDb(f64::NEG_INFINITY)),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("invalid noise value {t:?}"))),
        }
    }
}

/// Everything reported for one `(state, θ)` evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub theta: f64,
    #[serde(rename = "var_L")]
    pub var_l: f64,
    pub partial_no: f64,
    pub full_no: f64,
    pub shot_noise: f64,
    pub noise_db: NoiseDb,
    pub verdict: Verdict,
    /// Negativity of the fully ordered variance. Informational only; a
    /// nonclassical LO can produce it on its own.
    pub standard_negativity: bool,
}

impl WitnessReport {
    pub fn evaluate(state: &TwoModeProduct, theta: f64, tol: f64) -> Result<Self, WitnessError> {
        let v = ordered_variances(state, theta);
        let shot_noise = mean_photon(&state.lo);
        let noise_db = noise_from_parts(v.var_l, shot_noise)?;
        let mut report = WitnessReport {
            theta,
            var_l: v.var_l,
            partial_no: v.partial_no,
            full_no: v.full_no,
            shot_noise,
            noise_db,
            verdict: Verdict::ClassicalConsistent,
            standard_negativity: v.full_no < -tol,
        };
        report.verdict = classify(&report, tol);
        Ok(report)
    }
}

/// `⟨(ΔL)²⟩ = tr(C R_θᵀ C′ R_θ) − 1/2 + ξᵀ R_θᵀ C′ R_θ ξ + ξ′ᵀ R_θ C R_θᵀ ξ′`.
pub fn homodyne_variance(state: &TwoModeProduct, theta: f64) -> f64 {
    let r = Mat2::rotation(theta);
    let c = *state.si.cov();
    let lo_rot = state.lo.cov().congruence(&r);
    let si_rot = c.congruence(&r.transpose());
    let xi: Vec2 = state.si.disp();
    let xi_lo: Vec2 = state.lo.disp();
    (c * lo_rot).trace() - 0.5 + lo_rot.quad_form(xi) + si_rot.quad_form(xi_lo)
}

pub fn ordered_variances(state: &TwoModeProduct, theta: f64) -> OrderedVariances {
    let var_l = homodyne_variance(state, theta);
    let partial_no = var_l - mean_photon(&state.lo);
    let full_no = partial_no - mean_photon(&state.si);
    OrderedVariances {
        var_l,
        partial_no,
        full_no,
    }
}

fn noise_from_parts(var_l: f64, shot_noise: f64) -> Result<NoiseDb, WitnessError> {
    if shot_noise.is_nan() || shot_noise <= ZERO_VARIANCE {
        return Err(WitnessError::ZeroShotNoise(shot_noise));
    }
    if var_l.abs() <= ZERO_VARIANCE {
        return Ok(NoiseDb(f64::NEG_INFINITY));
    }
    Ok(NoiseDb(10.0 * (var_l / shot_noise).log10()))
}

/// `N = 10·log₁₀(⟨(ΔL)²⟩ / ⟨b†b⟩)`.
pub fn noise_parameter(state: &TwoModeProduct, theta: f64) -> Result<NoiseDb, WitnessError> {
    noise_from_parts(homodyne_variance(state, theta), mean_photon(&state.lo))
}

/// Noise parameter from measured quantities.
pub fn noise_from_measurement(var_l: f64, shot_noise: f64) -> Result<NoiseDb, WitnessError> {
    noise_from_parts(var_l, shot_noise)
}

/// Only the partially ordered variance decides the verdict.
pub fn classify(report: &WitnessReport, tol: f64) -> Verdict {
    verdict_for(report.partial_no, tol)
}

pub fn verdict_for(partial_no: f64, tol: f64) -> Verdict {
    if partial_no < -tol {
        Verdict::NonclassicalSi
    } else {
        Verdict::ClassicalConsistent
    }
}

/// One report per `(state, θ)` pair; states outer, angles inner.
pub fn sweep<I>(states: I, thetas: &[f64], tol: f64) -> Result<Vec<WitnessReport>, WitnessError>
where
    I: IntoIterator<Item = TwoModeProduct>,
{
    if thetas.is_empty() {
        return Err(WitnessError::EmptyGrid);
    }
    let mut out = Vec::new();
    for state in states {
        for &theta in thetas {
            out.push(WitnessReport::evaluate(&state, theta, tol)?);
        }
    }
    Ok(out)
}

/// A finite set of LO candidates crossed with phase settings.
#[derive(Clone, Debug, PartialEq)]
pub struct LoSearch {
    pub candidates: Vec<StateParams>,
    pub thetas: Vec<f64>,
}

impl LoSearch {
    /// Squeezed-vacuum LOs over `ζ′ × φ′`.
    pub fn squeezed(zetas: &[f64], phis: &[f64], thetas: &[f64]) -> Self {
        let candidates = zetas
            .iter()
            .flat_map(|&z| phis.iter().map(move |&p| StateParams::squeezed(z).with_phi(p)))
            .collect();
        LoSearch {
            candidates,
            thetas: thetas.to_vec(),
        }
    }

    /// Coherent LOs with the given complex amplitudes.
    pub fn coherent(amplitudes: &[num_complex::Complex64], thetas: &[f64]) -> Self {
        LoSearch {
            candidates: amplitudes.iter().map(|&a| StateParams::coherent(a)).collect(),
            thetas: thetas.to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoOptimum {
    pub lo: StateParams,
    pub theta: f64,
    pub noise_db: NoiseDb,
}

/// Exhaustive grid search for the LO and phase minimizing `N`. Candidates
/// without a shot-noise reference (vacuum LO) are skipped. Ties go to the
/// smallest `ζ′`, then the smallest `θ`.
pub fn optimize_lo(si: &SingleModeGaussian, search: &LoSearch) -> Result<LoOptimum, WitnessError> {
    if search.candidates.is_empty() || search.thetas.is_empty() {
        return Err(WitnessError::EmptyGrid);
    }
    let los = search
        .candidates
        .iter()
        .map(make_state)
        .collect::<Result<Vec<_>, _>>()?;
    let points: Vec<(usize, f64)> = (0..los.len())
        .flat_map(|i| search.thetas.iter().map(move |&t| (i, t)))
        .collect();
    let evaluated: Vec<Option<LoOptimum>> = points
        .par_iter()
        .map(|&(i, theta)| {
            let state = TwoModeProduct::new(*si, los[i]);
            noise_parameter(&state, theta).ok().map(|noise_db| LoOptimum {
                lo: search.candidates[i],
                theta,
                noise_db,
            })
        })
        .collect();

    let mut best: Option<LoOptimum> = None;
    for cand in evaluated.into_iter().flatten() {
        best = match best {
            None => Some(cand),
            Some(cur) if beats(&cand, &cur) => Some(cand),
            keep => keep,
        };
    }
    best.ok_or(WitnessError::EmptyGrid)
}

fn beats(cand: &LoOptimum, cur: &LoOptimum) -> bool {
    let (a, b) = (cand.noise_db.0, cur.noise_db.0);
    let tied = a == b || (a - b).abs() <= TIE_DB;
    if !tied {
        return a < b;
    }
    (cand.lo.zeta, cand.theta) < (cur.lo.zeta, cur.theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::db_to_zeta;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn z3() -> f64 {
        db_to_zeta(3.0)
    }

    fn state(si: StateParams, lo: StateParams) -> TwoModeProduct {
        TwoModeProduct::from_params(&si, &lo).unwrap()
    }

    fn coherent(re: f64) -> StateParams {
        StateParams::coherent(Complex64::new(re, 0.0))
    }

    #[test]
    fn blocked_signal_gives_lo_photon_number() {
        let lo = StateParams {
            zeta: 0.4,
            nbar: 0.3,
            phi: 0.2,
            alpha: Complex64::new(1.2, 0.5),
        };
        let s = state(StateParams::vacuum(), lo);
        for theta in [0.0, 0.7, 2.0] {
            assert!((homodyne_variance(&s, theta) - mean_photon(&s.lo)).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_squeezing_cancels_at_quarter_turn() {
        let s = state(StateParams::squeezed(z3()), StateParams::squeezed(z3()));
        assert!(homodyne_variance(&s, PI / 2.0).abs() < 1e-15);
        // likewise ζ′ = −ζ at θ = 0
        let s = state(StateParams::squeezed(z3()), StateParams::squeezed(-z3()));
        assert!(homodyne_variance(&s, 0.0).abs() < 1e-15);
    }

    #[test]
    fn coherent_signal_squeezed_lo() {
        let z = z3();
        let s = state(coherent(1.0), StateParams::squeezed(z));
        // sinh²ζ′ + e^{−2ζ′}
        let expected = z.sinh().powi(2) + (-2.0 * z).exp();
        assert!((homodyne_variance(&s, 0.0) - expected).abs() < 1e-14);
        assert!((expected - 0.625299).abs() < 1e-6);

        let v = ordered_variances(&s, 0.0);
        assert!((v.partial_no - 0.501187).abs() < 1e-6);
        assert!((v.full_no + 0.498813).abs() < 1e-6);
        let v = ordered_variances(&s, PI / 2.0);
        assert!((v.partial_no - 1.995262).abs() < 1e-6);
        assert!((v.full_no - 0.995262).abs() < 1e-6);
    }

    #[test]
    fn vacuum_pair_is_all_zero() {
        let s = state(StateParams::vacuum(), StateParams::vacuum());
        let v = ordered_variances(&s, 1.3);
        assert_eq!((v.var_l, v.partial_no, v.full_no), (0.0, 0.0, 0.0));
    }

    #[test]
    fn noise_parameter_examples() {
        let z = z3();
        let s = state(StateParams::vacuum(), coherent(2.0));
        assert!(noise_parameter(&s, 0.4).unwrap().0.abs() < 1e-12);

        let s = state(StateParams::squeezed(z), coherent(10f64.sqrt()));
        let n = noise_parameter(&s, 0.0).unwrap().0;
        let expected = 10.0 * ((z.sinh().powi(2) + 10.0 * (-2.0 * z).exp()) / 10.0).log10();
        assert!((n - expected).abs() < 1e-12);
        assert!((n + 2.894).abs() < 2e-3);

        let s = state(StateParams::squeezed(z), StateParams::squeezed(z));
        assert!(noise_parameter(&s, PI / 2.0).unwrap().is_neg_infinite());
    }

    #[test]
    fn vacuum_lo_has_no_shot_noise_reference() {
        let s = state(coherent(1.0), StateParams::vacuum());
        assert!(matches!(noise_parameter(&s, 0.0), Err(WitnessError::ZeroShotNoise(_))));
    }

    fn report_with(partial_no: f64, full_no: f64) -> WitnessReport {
        WitnessReport {
            theta: 0.0,
            var_l: 1.0,
            partial_no,
            full_no,
            shot_noise: 1.0,
            noise_db: NoiseDb(0.0),
            verdict: Verdict::ClassicalConsistent,
            standard_negativity: false,
        }
    }

    #[test]
    fn classification() {
        assert_eq!(classify(&report_with(-0.3, -0.5), 1e-9), Verdict::NonclassicalSi);
        assert_eq!(
            classify(&report_with(0.501187, -0.498813), 1e-9),
            Verdict::ClassicalConsistent
        );
        assert_eq!(classify(&report_with(0.0, 0.0), 1e-9), Verdict::ClassicalConsistent);
    }

    #[test]
    fn false_positive_exposed_in_report() {
        let s = state(coherent(1.0), StateParams::squeezed(z3()));
        let r = WitnessReport::evaluate(&s, 0.0, DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::ClassicalConsistent);
        assert!(r.standard_negativity);
        assert_eq!(r.partial_no, r.var_l - r.shot_noise);
    }

    #[test]
    fn report_json_uses_documented_names() {
        let s = state(StateParams::squeezed(z3()), StateParams::squeezed(z3()));
        let r = WitnessReport::evaluate(&s, PI / 2.0, DEFAULT_TOL).unwrap();
        let json = serde_json::to_value(r).unwrap();
        assert_eq!(json["noise_db"], "-inf");
        assert_eq!(json["verdict"], "nonclassical_SI");
        assert!(json.get("var_L").is_some());
        let back: WitnessReport = serde_json::from_value(json).unwrap();
        assert!(back.noise_db.is_neg_infinite());
    }

    #[test]
    fn sweep_orders_states_then_angles() {
        let s = state(coherent(1.0), StateParams::squeezed(z3()));
        let grid = [0.0, 1.0, 2.0];
        let reports = sweep([s, s], &grid, DEFAULT_TOL).unwrap();
        assert_eq!(reports.len(), 6);
        assert_eq!(reports[4].theta, 1.0);
        assert_eq!(sweep([s], &[0.5], DEFAULT_TOL).unwrap().len(), 1);
        assert_eq!(sweep([s], &[], DEFAULT_TOL), Err(WitnessError::EmptyGrid));
    }

    #[test]
    fn squeezed_lo_search_finds_matched_squeezing() {
        let si = make_state(&StateParams::squeezed(z3())).unwrap();
        let zetas = [0.1, 0.2, z3(), 0.5];
        let search = LoSearch::squeezed(&zetas, &[0.0, PI / 4.0], &[0.0, PI / 4.0, PI / 2.0]);
        let best = optimize_lo(&si, &search).unwrap();
        // a squeezing phase of π/4 on the LO pairs with θ = π/4, which wins the θ tie-break
        assert_eq!(best.lo.zeta, z3());
        assert_eq!(best.lo.phi, PI / 4.0);
        assert_eq!(best.theta, PI / 4.0);
        assert!(best.noise_db.is_neg_infinite());
    }

    #[test]
    fn vacuum_signal_ties_resolve_to_smallest() {
        let si = SingleModeGaussian::vacuum();
        let search = LoSearch::squeezed(&[0.3, 0.1, 0.2], &[0.0], &[1.0, 0.5]);
        let best = optimize_lo(&si, &search).unwrap();
        assert!(best.noise_db.0.abs() < 1e-12);
        assert_eq!((best.lo.zeta, best.theta), (0.1, 0.5));
    }

    #[test]
    fn coherent_lo_never_reaches_three_db() {
        let si = make_state(&StateParams::squeezed(z3())).unwrap();
        let amps: Vec<Complex64> = [0.1, 1.0, 10.0, 100.0]
            .iter()
            .map(|&a| Complex64::new(a, 0.0))
            .collect();
        let thetas: Vec<f64> = (0..36).map(|k| k as f64 * PI / 36.0).collect();
        let best = optimize_lo(&si, &LoSearch::coherent(&amps, &thetas)).unwrap();
        assert!(best.noise_db.0 > -3.0);
        assert!(best.noise_db.0 < -2.99);
    }
}

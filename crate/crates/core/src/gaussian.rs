//! Single-mode Gaussian states in the quadrature picture.
//!
//! Conventions: `ħ = 1`, `[x, p] = i`, so the vacuum covariance is `I/2`.
//! The ladder operator is `a = (x + i p)/√2`, and a rotation by `θ` maps
//! `⟨a⟩ ↦ e^{iθ}⟨a⟩`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{dot, Mat2, Vec2};

/// Tolerance used when validating constructor input.
pub const PHYSICALITY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussianError {
    #[error("thermal photon number must be nonnegative, got {0}")]
    NegativeThermal(f64),
    #[error("covariance matrix is not symmetric (off-diagonal mismatch {0:e})")]
    NotSymmetric(f64),
    #[error("covariance matrix violates the uncertainty relation (det = {det}, min eigenvalue = {min_eig})")]
    Unphysical { det: f64, min_eig: f64 },
    #[error("non-finite value in state data")]
    NonFinite,
}

/// Parameters of a displaced, rotated, squeezed state with an additive
/// thermal background.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateParams {
    pub zeta: f64,
    pub nbar: f64,
    pub phi: f64,
    pub alpha: Complex64,
}

impl StateParams {
    pub fn vacuum() -> Self {
        StateParams {
            zeta: 0.0,
            nbar: 0.0,
            phi: 0.0,
            alpha: Complex64::new(0.0, 0.0),
        }
    }

    pub fn coherent(alpha: Complex64) -> Self {
        StateParams {
            alpha,
            ..Self::vacuum()
        }
    }

    /// Squeezed vacuum; `zeta > 0` squeezes the x quadrature.
    pub fn squeezed(zeta: f64) -> Self {
        StateParams {
            zeta,
            ..Self::vacuum()
        }
    }

    pub fn thermal(nbar: f64) -> Self {
        StateParams {
            nbar,
            ..Self::vacuum()
        }
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_alpha(mut self, alpha: Complex64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_nbar(mut self, nbar: f64) -> Self {
        self.nbar = nbar;
        self
    }
}

/// Squeezing level in dB to squeezing parameter: `s_dB = −10·log₁₀(e^{−2ζ})`.
pub fn db_to_zeta(db: f64) -> f64 {
    db * std::f64::consts::LN_10 / 20.0
}

pub fn zeta_to_db(zeta: f64) -> f64 {
    20.0 * zeta / std::f64::consts::LN_10
}

/// First and second ladder-operator moments of a single mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldMoments {
    /// `⟨a⟩`
    pub mean_a: Complex64,
    /// `⟨a²⟩`
    pub a_sq: Complex64,
    /// `⟨a†a⟩`
    pub n_a: f64,
    /// `⟨a a†⟩`
    pub aa_dag: f64,
}

impl FieldMoments {
    /// `⟨Δa†Δa⟩`
    pub fn central_number(&self) -> f64 {
        self.n_a - self.mean_a.norm_sqr()
    }

    /// `⟨(Δa)²⟩`
    pub fn central_a_sq(&self) -> Complex64 {
        self.a_sq - self.mean_a * self.mean_a
    }

    /// Rebuild the quadrature covariance and displacement these moments describe.
    pub fn to_covariance(&self) -> (Mat2, Vec2) {
        let n = self.central_number();
        let m = self.central_a_sq();
        let cov = Mat2([[n + 0.5 + m.re, m.im], [m.im, n + 0.5 - m.re]]);
        let s2 = std::f64::consts::SQRT_2;
        (cov, [s2 * self.mean_a.re, s2 * self.mean_a.im])
    }
}

/// A single-mode Gaussian state: quadrature covariance plus displacement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleModeGaussian {
    cov: Mat2,
    disp: Vec2,
}

impl SingleModeGaussian {
    /// Validating constructor. Rejects asymmetric or unphysical covariances.
    pub fn new(cov: Mat2, disp: Vec2) -> Result<Self, GaussianError> {
        let finite = cov.0.iter().flatten().chain(disp.iter()).all(|v| v.is_finite());
        if !finite {
            return Err(GaussianError::NonFinite);
        }
        let asym = (cov.0[0][1] - cov.0[1][0]).abs();
        if asym != 0.0 {
            return Err(GaussianError::NotSymmetric(asym));
        }
        let state = SingleModeGaussian { cov, disp };
        if !state.is_physical(PHYSICALITY_TOL) {
            return Err(GaussianError::Unphysical {
                det: cov.det(),
                min_eig: cov.sym_eigenvalues().0,
            });
        }
        Ok(state)
    }

    pub fn vacuum() -> Self {
        SingleModeGaussian {
            cov: Mat2::scalar(0.5),
            disp: [0.0, 0.0],
        }
    }

    pub fn coherent(alpha: Complex64) -> Self {
        SingleModeGaussian {
            cov: Mat2::scalar(0.5),
            disp: alpha_to_disp(alpha),
        }
    }

    pub fn cov(&self) -> &Mat2 {
        &self.cov
    }

    pub fn disp(&self) -> Vec2 {
        self.disp
    }

    /// Complex coherent amplitude `⟨a⟩ = (ξ_x + iξ_p)/√2`.
    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.disp[0], self.disp[1]) / std::f64::consts::SQRT_2
    }

    /// Determinant-and-positivity test: `det C ≥ 1/4 − tol` and `C > 0`.
    pub fn is_physical(&self, tol: f64) -> bool {
        let (min_eig, _) = self.cov.sym_eigenvalues();
        self.cov.det() >= 0.25 - tol && min_eig > 0.0
    }

    pub(crate) fn from_parts_unchecked(cov: Mat2, disp: Vec2) -> Self {
        SingleModeGaussian { cov, disp }
    }
}

fn alpha_to_disp(alpha: Complex64) -> Vec2 {
    let s2 = std::f64::consts::SQRT_2;
    [s2 * alpha.re, s2 * alpha.im]
}

/// Build `C = R_φᵀ diag(e^{−2ζ}/2 + n̄, e^{2ζ}/2 + n̄) R_φ`, `ξ = √2 (Re α, Im α)`.
pub fn make_state(params: &StateParams) -> Result<SingleModeGaussian, GaussianError> {
    if params.nbar.is_nan() || params.nbar < 0.0 {
        return Err(GaussianError::NegativeThermal(params.nbar));
    }
    let values = [params.zeta, params.nbar, params.phi, params.alpha.re, params.alpha.im];
    if values.iter().any(|v| !v.is_finite()) {
        return Err(GaussianError::NonFinite);
    }
    let d = Mat2::diag(
        0.5 * (-2.0 * params.zeta).exp() + params.nbar,
        0.5 * (2.0 * params.zeta).exp() + params.nbar,
    );
    let mut cov = d.congruence(&Mat2::rotation(params.phi));
    symmetrize(&mut cov);
    Ok(SingleModeGaussian {
        cov,
        disp: alpha_to_disp(params.alpha),
    })
}

fn symmetrize(cov: &mut Mat2) {
    let off = 0.5 * (cov.0[0][1] + cov.0[1][0]);
    cov.0[0][1] = off;
    cov.0[1][0] = off;
}

/// Phase-space rotation: `C ↦ R_θᵀ C R_θ`, `ξ ↦ R_θᵀ ξ`.
pub fn rotate(state: &SingleModeGaussian, theta: f64) -> SingleModeGaussian {
    let r = Mat2::rotation(theta);
    let mut cov = state.cov.congruence(&r);
    symmetrize(&mut cov);
    SingleModeGaussian {
        cov,
        disp: r.transpose().apply(state.disp),
    }
}

/// `⟨a†a⟩ = (tr C − 1 + ξᵀξ)/2`.
pub fn mean_photon(state: &SingleModeGaussian) -> f64 {
    (state.cov.trace() - 1.0 + dot(state.disp, state.disp)) / 2.0
}

/// Ladder moments from `T (C − iΩ/2) T†`, with mean products added back.
pub fn field_moments(state: &SingleModeGaussian) -> FieldMoments {
    let c = &state.cov.0;
    let i = Complex64::i();
    let h = Complex64::new(0.5, 0.0);
    // C − (i/2)Ω with Ω = [[0, 1], [−1, 0]]
    let m = [
        [Complex64::new(c[0][0], 0.0), c[0][1] - h * i],
        [c[1][0] + h * i, Complex64::new(c[1][1], 0.0)],
    ];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let t = [[Complex64::new(s, 0.0), i * s], [Complex64::new(s, 0.0), -i * s]];
    let mut tm = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for col in 0..2 {
            tm[r][col] = t[r][0] * m[0][col] + t[r][1] * m[1][col];
        }
    }
    // (T M T†)[r][col] = Σ_k (TM)[r][k] conj(T[col][k])
    let entry = |r: usize, col: usize| tm[r][0] * t[col][0].conj() + tm[r][1] * t[col][1].conj();
    let central_number = entry(0, 0).re;
    let central_a_sq = entry(0, 1);
    let central_aa_dag = entry(1, 1).re;

    let mean_a = state.alpha();
    FieldMoments {
        mean_a,
        a_sq: central_a_sq + mean_a * mean_a,
        n_a: central_number + mean_a.norm_sqr(),
        aa_dag: central_aa_dag + mean_a.norm_sqr(),
    }
}

/// Eigen-decomposition `C = R_φᵀ diag(σ_x², σ_p²) R_φ` with `σ_x² ≤ σ_p²`
/// and `φ ∈ [0, π)`. A degenerate spectrum returns `φ = 0`.
pub fn diagonalize(cov: &Mat2) -> (f64, f64, f64) {
    let (lo, hi) = cov.sym_eigenvalues();
    let c = &cov.0;
    let off = 0.5 * (c[0][1] + c[1][0]);
    let gap = hi - lo;
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    if gap <= 4.0 * f64::EPSILON * scale {
        return (0.0, lo, hi);
    }
    // C00 − C11 = −gap·cos 2φ and 2·C01 = −gap·sin 2φ
    let mut two_phi = (-2.0 * off).atan2(-(c[0][0] - c[1][1]));
    if two_phi < 0.0 {
        two_phi += 2.0 * std::f64::consts::PI;
    }
    let mut phi = 0.5 * two_phi + 0.0;
    if phi >= std::f64::consts::PI {
        phi -= std::f64::consts::PI;
    }
    (phi, lo, hi)
}

/// Inverse of [`diagonalize`].
pub fn reconstruct(phi: f64, sigma_x2: f64, sigma_p2: f64) -> Mat2 {
    let mut cov = Mat2::diag(sigma_x2, sigma_p2).congruence(&Mat2::rotation(phi));
    symmetrize(&mut cov);
    cov
}

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use super::expm::{displacement_generator, displacement_norm_bound, expmv};
use super::FockError;
use crate::gaussian::StateParams;

/// Largest tolerated norm or trace deficit from truncation.
pub const TRUNCATION_BUDGET: f64 = 1e-8;
/// Largest cutoff for pure states.
pub const MAX_PURE_CUTOFF: usize = 512;
/// Largest cutoff for single-mode density matrices.
pub const MAX_MODE_MIXED_CUTOFF: usize = 128;
/// Largest cutoff for dense two-mode density operators.
pub const MAX_JOINT_MIXED_CUTOFF: usize = 64;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A single-mode state on a truncated number basis.
#[derive(Clone, Debug, PartialEq)]
pub enum ModeState {
    Pure(Array1<Complex64>),
    Mixed(Array2<Complex64>),
}

impl ModeState {
    pub fn dim(&self) -> usize {
        match self {
            ModeState::Pure(v) => v.len(),
            ModeState::Mixed(r) => r.nrows(),
        }
    }

    /// `‖ψ‖²` or `tr ρ`.
    pub fn trace(&self) -> f64 {
        match self {
            ModeState::Pure(v) => v.iter().map(|z| z.norm_sqr()).sum(),
            ModeState::Mixed(r) => r.diag().iter().map(|z| z.re).sum(),
        }
    }

    pub fn to_density(&self) -> Array2<Complex64> {
        match self {
            ModeState::Pure(v) => outer(v, v),
            ModeState::Mixed(r) => r.clone(),
        }
    }

    /// Keep the first `cutoff` levels.
    pub fn truncated(&self, cutoff: usize) -> ModeState {
        match self {
            ModeState::Pure(v) => ModeState::Pure(v.slice(ndarray::s![..cutoff]).to_owned()),
            ModeState::Mixed(r) => ModeState::Mixed(r.slice(ndarray::s![..cutoff, ..cutoff]).to_owned()),
        }
    }

    /// Zero-pad up to `dim` levels.
    pub fn padded(&self, dim: usize) -> ModeState {
        let n = self.dim().min(dim);
        match self {
            ModeState::Pure(v) => {
                let mut out = Array1::zeros(dim);
                out.slice_mut(ndarray::s![..n]).assign(&v.slice(ndarray::s![..n]));
                ModeState::Pure(out)
            }
            ModeState::Mixed(r) => {
                let mut out = Array2::zeros((dim, dim));
                out.slice_mut(ndarray::s![..n, ..n])
                    .assign(&r.slice(ndarray::s![..n, ..n]));
                ModeState::Mixed(out)
            }
        }
    }
}

pub(crate) fn outer(u: &Array1<Complex64>, v: &Array1<Complex64>) -> Array2<Complex64> {
    Array2::from_shape_fn((u.len(), v.len()), |(i, j)| u[i] * v[j].conj())
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// `e^{−|α|²/2} αⁿ/√n!` for `n < dim`.
pub fn coherent_amplitudes(alpha: Complex64, dim: usize) -> Array1<Complex64> {
    let mut out = Array1::zeros(dim);
    let mut amp = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        out[n] = amp;
        amp = amp * alpha / ((n + 1) as f64).sqrt();
    }
    out
}

/// Squeezed vacuum `S(ζ)|0⟩` with `S(ζ) = exp(ζ(a² − a†²)/2)`:
/// `(−tanh ζ)ᵐ √((2m)!)/(2ᵐ m!) / √cosh ζ` on level `2m`.
pub fn squeezed_vacuum_amplitudes(zeta: f64, dim: usize) -> Array1<Complex64> {
    let mut out = Array1::zeros(dim);
    let t = -zeta.tanh();
    let mut amp = 1.0 / zeta.cosh().sqrt();
    let mut m = 0usize;
    while 2 * m < dim {
        out[2 * m] = Complex64::new(amp, 0.0);
        let ratio = ((2 * m + 1) as f64 * (2 * m + 2) as f64).sqrt() / (2.0 * (m + 1) as f64);
        amp *= t * ratio;
        m += 1;
    }
    out
}

/// Diagonal weights `n̄ⁿ/(1+n̄)^{n+1}`.
pub fn thermal_density(nbar: f64, dim: usize) -> Array2<Complex64> {
    let mut out = Array2::zeros((dim, dim));
    let q = nbar / (1.0 + nbar);
    let mut w = 1.0 / (1.0 + nbar);
    for n in 0..dim {
        out[[n, n]] = Complex64::new(w, 0.0);
        w *= q;
    }
    out
}

/// `|ψ⟩ ↦ e^{iφ n̂}|ψ⟩`, which takes `⟨a⟩` to `e^{iφ}⟨a⟩`.
pub fn rotate_phase(v: &Array1<Complex64>, phi: f64) -> Array1<Complex64> {
    Array1::from_shape_fn(v.len(), |n| v[n] * Complex64::from_polar(1.0, phi * n as f64))
}

/// `D(α)|ψ⟩` via the exponential of the truncated generator `α a† − α* a`.
pub fn displace(v: &Array1<Complex64>, alpha: Complex64) -> Array1<Complex64> {
    if alpha == ZERO {
        return v.clone();
    }
    expmv(
        |x| displacement_generator(alpha, x),
        displacement_norm_bound(alpha, v.len()),
        v,
    )
}

/// Pure-loss channel with efficiency `η`:
/// Kraus `E_k|n⟩ = √C(n,k) η^{(n−k)/2} (1−η)^{k/2} |n−k⟩`.
pub fn loss_channel(rho: &Array2<Complex64>, eta: f64) -> Array2<Complex64> {
    let dim = rho.nrows();
    if eta == 1.0 {
        return rho.clone();
    }
    let mut out = Array2::zeros((dim, dim));
    if eta == 0.0 {
        out[[0, 0]] = rho.diag().iter().sum::<Complex64>();
        return out;
    }
    let lf = ln_factorials(dim);
    let ln_eta = eta.ln();
    let ln_loss = (1.0 - eta).ln();
    let ln_binom = |n: usize, k: usize| lf[n] - lf[k] - lf[n - k];
    for m in 0..dim {
        for mp in 0..dim {
            let mut acc = ZERO;
            let kmax = dim - m.max(mp);
            for k in 0..kmax {
                let log_w = 0.5 * (ln_binom(m + k, k) + ln_binom(mp + k, k))
                    + 0.5 * (m + mp) as f64 * ln_eta
                    + k as f64 * ln_loss;
                acc += rho[[m + k, mp + k]] * log_w.exp();
            }
            out[[m, mp]] = acc;
        }
    }
    out
}

/// Vacuum-bath amplifier with gain `g`:
/// Kraus `A_k|n⟩ = √C(n+k,k) g^{−(n+1)/2} (1−1/g)^{k/2} |n+k⟩`.
/// Weight pushed past the last level is lost.
pub fn amplifier_channel(rho: &Array2<Complex64>, g: f64) -> Array2<Complex64> {
    let dim = rho.nrows();
    if g == 1.0 {
        return rho.clone();
    }
    let lf = ln_factorials(dim);
    let ln_g = g.ln();
    let ln_noise = (1.0 - 1.0 / g).ln();
    let ln_binom = |n: usize, k: usize| lf[n] - lf[k] - lf[n - k];
    let mut out = Array2::zeros((dim, dim));
    for m in 0..dim {
        for mp in 0..dim {
            let mut acc = ZERO;
            for k in 0..=m.min(mp) {
                let (n, np) = (m - k, mp - k);
                let log_w = 0.5 * (ln_binom(m, k) + ln_binom(mp, k))
                    - 0.5 * (n + np + 2) as f64 * ln_g
                    + if k == 0 { 0.0 } else { k as f64 * ln_noise };
                acc += rho[[n, np]] * log_w.exp();
            }
            out[[m, mp]] = acc;
        }
    }
    out
}

/// Additive Gaussian background `C ↦ C + n̄·I`, realized as loss with
/// `η = 1/(1+n̄)` followed by amplification with `g = 1+n̄`.
pub fn thermal_background(rho: &Array2<Complex64>, nbar: f64) -> Array2<Complex64> {
    if nbar == 0.0 {
        return rho.clone();
    }
    amplifier_channel(&loss_channel(rho, 1.0 / (1.0 + nbar)), 1.0 + nbar)
}

fn working_dim(cutoff: usize) -> usize {
    2 * cutoff + 32
}

/// Build `D(α) e^{iφn̂} S(ζ)|0⟩` and, for `n̄ > 0`, add the thermal background.
/// Returns the state truncated to `cutoff` levels and its truncation deficit.
pub fn mode_state(params: &StateParams, cutoff: usize) -> Result<(ModeState, f64), FockError> {
    if cutoff < 2 {
        return Err(FockError::CutoffTooSmall(cutoff));
    }
    if params.nbar.is_nan() || params.nbar < 0.0 {
        return Err(FockError::InvalidParams(format!("nbar = {}", params.nbar)));
    }
    let mixed = params.nbar > 0.0;
    if mixed && cutoff > MAX_MODE_MIXED_CUTOFF {
        return Err(FockError::CutoffTooLarge {
            cutoff,
            max: MAX_MODE_MIXED_CUTOFF,
        });
    }
    if cutoff > MAX_PURE_CUTOFF {
        return Err(FockError::CutoffTooLarge {
            cutoff,
            max: MAX_PURE_CUTOFF,
        });
    }
    let dim = working_dim(cutoff);
    let pure = if params.zeta == 0.0 {
        coherent_amplitudes(params.alpha, dim)
    } else {
        let sq = rotate_phase(&squeezed_vacuum_amplitudes(params.zeta, dim), params.phi);
        displace(&sq, params.alpha)
    };
    let full = if mixed {
        ModeState::Mixed(thermal_background(&outer(&pure, &pure), params.nbar))
    } else {
        ModeState::Pure(pure)
    };
    let state = full.truncated(cutoff);
    let deficit = (1.0 - state.trace()).max(0.0);
    Ok((state, deficit))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FockKind {
    Pure,
    Mixed,
}

#[derive(Clone, Debug)]
pub(crate) enum Repr {
    /// Amplitudes indexed `[n_a, n_b]`.
    Pure(Array2<Complex64>),
    /// Product of single-mode states.
    Product(ModeState, ModeState),
    /// Dense density operator, basis index `n_a·cutoff + n_b`.
    Joint(Array2<Complex64>),
}

/// A truncated two-mode state with its truncation deficit.
#[derive(Clone, Debug)]
pub struct FockState {
    pub(crate) cutoff: usize,
    pub(crate) deficit: f64,
    pub(crate) repr: Repr,
}

impl FockState {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `1 − ‖ψ‖²` or `1 − tr ρ`.
    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    pub fn kind(&self) -> FockKind {
        match &self.repr {
            Repr::Pure(_) => FockKind::Pure,
            Repr::Product(ModeState::Pure(_), ModeState::Pure(_)) => FockKind::Pure,
            _ => FockKind::Mixed,
        }
    }

    pub fn trace(&self) -> f64 {
        match &self.repr {
            Repr::Pure(amps) => amps.iter().map(|z| z.norm_sqr()).sum(),
            Repr::Product(a, b) => a.trace() * b.trace(),
            Repr::Joint(rho) => rho.diag().iter().map(|z| z.re).sum(),
        }
    }

    /// Product of two single-mode states, zero-padded to a common cutoff.
    pub fn product(a: &ModeState, b: &ModeState, cutoff: usize) -> Result<Self, FockError> {
        check_cutoff(cutoff)?;
        let (a, b) = (a.padded(cutoff), b.padded(cutoff));
        let repr = match (&a, &b) {
            (ModeState::Pure(u), ModeState::Pure(v)) => {
                Repr::Pure(Array2::from_shape_fn((cutoff, cutoff), |(i, j)| u[i] * v[j]))
            }
            _ => {
                if cutoff > MAX_MODE_MIXED_CUTOFF {
                    return Err(FockError::CutoffTooLarge {
                        cutoff,
                        max: MAX_MODE_MIXED_CUTOFF,
                    });
                }
                Repr::Product(a.clone(), b.clone())
            }
        };
        let mut s = FockState {
            cutoff,
            deficit: 0.0,
            repr,
        };
        s.deficit = (1.0 - s.trace()).max(0.0);
        Ok(s)
    }

    /// Arbitrary joint pure state from amplitudes `[n_a, n_b]`.
    pub fn from_amplitudes(amps: Array2<Complex64>) -> Result<Self, FockError> {
        let (r, c) = amps.dim();
        if r != c {
            return Err(FockError::Shape(format!("amplitude tensor {r}×{c} is not square")));
        }
        check_cutoff(r)?;
        let mut s = FockState {
            cutoff: r,
            deficit: 0.0,
            repr: Repr::Pure(amps),
        };
        let tr = s.trace();
        if tr > 1.0 + 1e-12 {
            return Err(FockError::Shape(format!("norm {tr} exceeds one")));
        }
        s.deficit = (1.0 - tr).max(0.0);
        Ok(s)
    }

    /// Arbitrary joint density operator on `cutoff²` levels.
    pub fn from_density(rho: Array2<Complex64>, cutoff: usize) -> Result<Self, FockError> {
        check_cutoff(cutoff)?;
        if cutoff > MAX_JOINT_MIXED_CUTOFF {
            return Err(FockError::CutoffTooLarge {
                cutoff,
                max: MAX_JOINT_MIXED_CUTOFF,
            });
        }
        let d = cutoff * cutoff;
        if rho.dim() != (d, d) {
            return Err(FockError::Shape(format!(
                "density is {:?}, expected {d}×{d}",
                rho.dim()
            )));
        }
        let mut s = FockState {
            cutoff,
            deficit: 0.0,
            repr: Repr::Joint(rho),
        };
        s.deficit = (1.0 - s.trace()).max(0.0);
        Ok(s)
    }

    /// Finite convex combination `Σ pₖ ρₖ` as a dense joint density.
    pub fn mixture(parts: &[(f64, FockState)]) -> Result<Self, FockError> {
        let cutoff = parts
            .first()
            .map(|(_, s)| s.cutoff)
            .ok_or_else(|| FockError::Shape("empty mixture".into()))?;
        let d = cutoff * cutoff;
        let mut rho = Array2::zeros((d, d));
        for (p, s) in parts {
            if s.cutoff != cutoff || *p < 0.0 {
                return Err(FockError::Shape("mixture parts must share a cutoff and have p ≥ 0".into()));
            }
            rho = rho + s.joint_density().mapv(|z| z * *p);
        }
        Self::from_density(rho, cutoff)
    }

    /// Dense two-mode density operator.
    pub fn joint_density(&self) -> Array2<Complex64> {
        let c = self.cutoff;
        match &self.repr {
            Repr::Pure(amps) => {
                let flat = Array1::from_iter(amps.iter().copied());
                outer(&flat, &flat)
            }
            Repr::Product(a, b) => {
                let (ra, rb) = (a.to_density(), b.to_density());
                Array2::from_shape_fn((c * c, c * c), |(i, j)| {
                    ra[[i / c, j / c]] * rb[[i % c, j % c]]
                })
            }
            Repr::Joint(rho) => rho.clone(),
        }
    }
}

fn check_cutoff(cutoff: usize) -> Result<(), FockError> {
    if cutoff < 2 {
        return Err(FockError::CutoffTooSmall(cutoff));
    }
    if cutoff > MAX_PURE_CUTOFF {
        return Err(FockError::CutoffTooLarge {
            cutoff,
            max: MAX_PURE_CUTOFF,
        });
    }
    Ok(())
}

/// Product state of two parametrized modes. Fails when the combined
/// truncation deficit exceeds [`TRUNCATION_BUDGET`].
pub fn fock_state(si: &StateParams, lo: &StateParams, cutoff: usize) -> Result<FockState, FockError> {
    let (a, _) = mode_state(si, cutoff)?;
    let (b, _) = mode_state(lo, cutoff)?;
    let state = FockState::product(&a, &b, cutoff)?;
    if state.deficit >= TRUNCATION_BUDGET {
        return Err(FockError::TruncationBudget {
            cutoff,
            deficit: state.deficit,
            budget: TRUNCATION_BUDGET,
        });
    }
    Ok(state)
}

//! Loss and excess-noise channels on a single mode.
//!
//! Loss couples the mode to a vacuum bath, `a ↦ √η a + √(1−η) c`; excess noise
//! is a bath-coupled amplifier, `a ↦ √g a + √(g−1) c†`. At `η = 0` the output is
//! vacuum, so any scaling statement about the witness holds trivially there.

use thiserror::Error;

use crate::gaussian::{FieldMoments, SingleModeGaussian};
use crate::linalg::Mat2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("quantum efficiency must lie in [0, 1], got {0}")]
    EfficiencyOutOfRange(f64),
    #[error("amplifier gain must be at least 1, got {0}")]
    GainBelowOne(f64),
}

/// Quantum efficiency `η ∈ [0, 1]` of a loss channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossParam(f64);

impl LossParam {
    pub fn new(eta: f64) -> Result<Self, ChannelError> {
        if (0.0..=1.0).contains(&eta) {
            Ok(LossParam(eta))
        } else {
            Err(ChannelError::EfficiencyOutOfRange(eta))
        }
    }

    pub fn eta(&self) -> f64 {
        self.0
    }
}

/// Gain `g ≥ 1` of a bath-coupled amplifier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GainParam(f64);

impl GainParam {
    pub fn new(g: f64) -> Result<Self, ChannelError> {
        if g >= 1.0 && g.is_finite() {
            Ok(GainParam(g))
        } else {
            Err(ChannelError::GainBelowOne(g))
        }
    }

    pub fn gain(&self) -> f64 {
        self.0
    }
}

/// `C ↦ ηC + (1−η)I/2`, `ξ ↦ √η ξ`.
pub fn apply_loss(state: &SingleModeGaussian, eta: LossParam) -> SingleModeGaussian {
    let eta = eta.0;
    let cov = state.cov().scale(eta) + Mat2::scalar(0.5 * (1.0 - eta));
    let s = eta.sqrt();
    let d = state.disp();
    SingleModeGaussian::from_parts_unchecked(cov, [s * d[0], s * d[1]])
}

/// `C ↦ gC + (g−1)I/2`, `ξ ↦ √g ξ`.
pub fn apply_gain_noise(state: &SingleModeGaussian, g: GainParam) -> SingleModeGaussian {
    let g = g.0;
    let cov = state.cov().scale(g) + Mat2::scalar(0.5 * (g - 1.0));
    let s = g.sqrt();
    let d = state.disp();
    SingleModeGaussian::from_parts_unchecked(cov, [s * d[0], s * d[1]])
}

impl FieldMoments {
    /// Moment map of the loss channel.
    pub fn after_loss(&self, eta: LossParam) -> FieldMoments {
        let eta = eta.0;
        FieldMoments {
            mean_a: self.mean_a * eta.sqrt(),
            a_sq: self.a_sq * eta,
            n_a: eta * self.n_a,
            aa_dag: eta * self.aa_dag + 1.0 - eta,
        }
    }

    /// Moment map of the amplifier channel.
    pub fn after_gain_noise(&self, g: GainParam) -> FieldMoments {
        let g = g.0;
        FieldMoments {
            mean_a: self.mean_a * g.sqrt(),
            a_sq: self.a_sq * g,
            n_a: g * self.n_a + g - 1.0,
            aa_dag: g * self.aa_dag,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{db_to_zeta, field_moments, make_state, mean_photon, StateParams};
    use num_complex::Complex64;

    fn sample() -> SingleModeGaussian {
        make_state(&StateParams {
            zeta: 0.31,
            nbar: 0.2,
            phi: 0.9,
            alpha: Complex64::new(0.7, -0.4),
        })
        .unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(LossParam::new(0.0).is_ok());
        assert!(LossParam::new(1.0).is_ok());
        assert_eq!(LossParam::new(1.2), Err(ChannelError::EfficiencyOutOfRange(1.2)));
        assert!(LossParam::new(-0.01).is_err());
        assert!(LossParam::new(f64::NAN).is_err());
        assert!(GainParam::new(1.0).is_ok());
        assert_eq!(GainParam::new(0.5), Err(ChannelError::GainBelowOne(0.5)));
    }

    #[test]
    fn unit_channels_are_identity() {
        let s = sample();
        assert_eq!(apply_loss(&s, LossParam::new(1.0).unwrap()), s);
        assert_eq!(apply_gain_noise(&s, GainParam::new(1.0).unwrap()), s);
    }

    #[test]
    fn full_loss_gives_vacuum() {
        let out = apply_loss(&sample(), LossParam::new(0.0).unwrap());
        assert_eq!(out, SingleModeGaussian::vacuum());
    }

    #[test]
    fn half_loss_on_three_db_squeezing() {
        let s = make_state(&StateParams::squeezed(db_to_zeta(3.0))).unwrap();
        let out = apply_loss(&s, LossParam::new(0.5).unwrap());
        let c = out.cov().0;
        assert!((c[0][0] - (0.5 * 0.250594 + 0.25)).abs() < 1e-6);
        assert!((c[1][1] - (0.5 * 0.997631 + 0.25)).abs() < 1e-6);
    }

    #[test]
    fn gain_on_vacuum_and_coherent() {
        let g = GainParam::new(2.0).unwrap();
        let v = apply_gain_noise(&SingleModeGaussian::vacuum(), g);
        assert_eq!(*v.cov(), Mat2::scalar(1.5));
        assert_eq!(mean_photon(&v), 1.0);
        let c = apply_gain_noise(&SingleModeGaussian::coherent(Complex64::new(1.0, 0.0)), g);
        assert!((c.disp()[0] - 2.0).abs() < 1e-15);
        assert!((mean_photon(&c) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_and_moment_maps_agree() {
        let s = sample();
        let m = field_moments(&s);
        for eta in [0.0, 0.3, 0.77, 1.0] {
            let l = LossParam::new(eta).unwrap();
            let direct = field_moments(&apply_loss(&s, l));
            let mapped = m.after_loss(l);
            assert!((direct.mean_a - mapped.mean_a).norm() < 1e-14);
            assert!((direct.a_sq - mapped.a_sq).norm() < 1e-14);
            assert!((direct.n_a - mapped.n_a).abs() < 1e-14);
            assert!((direct.aa_dag - mapped.aa_dag).abs() < 1e-14);
        }
        for g in [1.0, 1.4, 3.0] {
            let gp = GainParam::new(g).unwrap();
            let direct = field_moments(&apply_gain_noise(&s, gp));
            let mapped = m.after_gain_noise(gp);
            assert!((direct.mean_a - mapped.mean_a).norm() < 1e-14);
            assert!((direct.a_sq - mapped.a_sq).norm() < 1e-14);
            assert!((direct.n_a - mapped.n_a).abs() < 1e-13);
            assert!((direct.aa_dag - mapped.aa_dag).abs() < 1e-13);
        }
    }

    #[test]
    fn loss_composes_multiplicatively() {
        let s = sample();
        let l = |e| LossParam::new(e).unwrap();
        let twice = apply_loss(&apply_loss(&s, l(0.6)), l(0.7));
        let once = apply_loss(&s, l(0.42));
        assert!(twice.cov().max_abs_diff(once.cov()) < 1e-15);
        assert!((twice.disp()[0] - once.disp()[0]).abs() < 1e-15);
    }
}

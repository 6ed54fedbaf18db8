use std::f64::consts::PI;

use lowit::channels::{apply_gain_noise, apply_loss, GainParam, LossParam};
use lowit::dsl::{parse, Letter, OperatorExpr};
use lowit::fock::{
    centered, converged_cutoff, displace, expect, fock_state, gain_by_two_mode_squeezer, loss_by_beam_splitter,
    rotate_phase, squeezed_vacuum_amplitudes, witness_general, FockError, FockKind, FockState, ModeState,
};
use lowit::gaussian::{db_to_zeta, field_moments, make_state, FieldMoments, StateParams};
use lowit::validate::{coherent_with_vector, haar_vector, oracle_agreement, random_params, rng_for};
use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;

const DIM: usize = 48;

fn pure_gaussian(zeta: f64, phi: f64, alpha: Complex64) -> ndarray::Array1<Complex64> {
    displace(&rotate_phase(&squeezed_vacuum_amplitudes(zeta, DIM), phi), alpha)
}

/// `⟨a⟩`, `⟨a²⟩`, `⟨a†a⟩` of a single-mode density, read out through the
/// oracle's own expectation routine.
fn moments_of(rho: Array2<Complex64>) -> (Complex64, Complex64, f64) {
    let vac = ModeState::Pure(ndarray::Array1::from_shape_fn(DIM, |n| {
        Complex64::new(if n == 0 { 1.0 } else { 0.0 }, 0.0)
    }));
    let s = FockState::product(&ModeState::Mixed(rho), &vac, DIM).unwrap();
    let a = OperatorExpr::letter(Letter::A);
    (
        expect(&a, &s).unwrap(),
        expect(&(&a * &a), &s).unwrap(),
        expect(&parse("ad a").unwrap(), &s).unwrap().re,
    )
}

fn assert_moments(got: (Complex64, Complex64, f64), want: &FieldMoments, tol: f64) {
    assert!((got.0 - want.mean_a).norm() < tol, "<a>: {} vs {}", got.0, want.mean_a);
    assert!((got.1 - want.a_sq).norm() < tol, "<a²>: {} vs {}", got.1, want.a_sq);
    assert!((got.2 - want.n_a).abs() < tol, "<a†a>: {} vs {}", got.2, want.n_a);
}

#[test]
fn beam_splitter_loss_reproduces_gaussian_moments() {
    for (zeta, phi, alpha, eta) in [
        (0.3, 0.4, Complex64::new(0.6, -0.2), 0.7),
        (-0.4, 1.9, Complex64::new(-0.3, 0.5), 0.25),
        (0.2, 0.0, Complex64::new(0.0, 0.0), 1.0),
    ] {
        let rho = loss_by_beam_splitter(&pure_gaussian(zeta, phi, alpha), eta);
        let params = StateParams::squeezed(zeta).with_phi(phi).with_alpha(alpha);
        let g = make_state(&params).unwrap();
        let want = field_moments(&apply_loss(&g, LossParam::new(eta).unwrap()));
        assert_moments(moments_of(rho), &want, 1e-8);
    }
}

#[test]
fn two_mode_squeezer_reproduces_gaussian_excess_noise() {
    let (zeta, phi, alpha, g) = (0.25, 0.8, Complex64::new(0.4, 0.1), 1.4);
    let rho = gain_by_two_mode_squeezer(&pure_gaussian(zeta, phi, alpha), g);
    let params = StateParams::squeezed(zeta).with_phi(phi).with_alpha(alpha);
    let s = make_state(&params).unwrap();
    let want = field_moments(&apply_gain_noise(&s, GainParam::new(g).unwrap()));
    // the amplifier spreads population upward, so the truncated tail costs a little more
    assert_moments(moments_of(rho), &want, 1e-7);
}

#[test]
fn state_examples() {
    let vac = fock_state(&StateParams::vacuum(), &StateParams::vacuum(), 2).unwrap();
    assert_eq!(vac.kind(), FockKind::Pure);
    assert_eq!(vac.trace(), 1.0);

    let z = db_to_zeta(3.0);
    let s = fock_state(&StateParams::vacuum(), &StateParams::squeezed(z), 64).unwrap();
    let nb = expect(&parse("bd b").unwrap(), &s).unwrap().re;
    assert!((nb - 0.124112).abs() < 1e-6);
    assert!((nb - z.sinh().powi(2)).abs() < 1e-8);

    let s = fock_state(&StateParams::coherent(Complex64::new(1.0, 0.0)), &StateParams::vacuum(), 40).unwrap();
    assert!((expect(&parse("ad a").unwrap(), &s).unwrap().re - 1.0).abs() < 1e-10);
}

#[test]
fn truncation_budget_is_enforced() {
    let err = fock_state(&StateParams::coherent(Complex64::new(5.0, 0.0)), &StateParams::vacuum(), 16).unwrap_err();
    assert!(matches!(err, FockError::TruncationBudget { cutoff: 16, .. }));
    assert!(matches!(
        fock_state(&StateParams::vacuum(), &StateParams::vacuum(), 1),
        Err(FockError::CutoffTooSmall(1))
    ));
}

#[test]
fn mixed_states_keep_trace_and_positivity() {
    let mut rng = rng_for(5, 0);
    for _ in 0..10 {
        let si = random_params(&mut rng, 1.0, 0.3, 0.5);
        let lo = random_params(&mut rng, 1.0, 0.3, 0.5);
        let s = fock_state(&si, &lo, 32).unwrap();
        let tr = s.trace();
        assert!(tr <= 1.0 + 1e-12 && tr >= 1.0 - s.deficit() - 1e-12, "trace {tr}, deficit {}", s.deficit());
        let rho = s.joint_density();
        let d = rho.nrows();
        for _ in 0..5 {
            let v = haar_vector(&mut rng, d);
            let q: Complex64 = (0..d)
                .flat_map(|i| (0..d).map(move |j| (i, j)))
                .map(|(i, j)| v[i].conj() * rho[[i, j]] * v[j])
                .sum();
            assert!(q.re >= -1e-10 && q.im.abs() < 1e-10);
        }
    }
}

#[test]
fn witness_examples() {
    let z = db_to_zeta(3.0);
    let bright = StateParams::coherent(Complex64::new(10f64.sqrt(), 0.0));
    let s = fock_state(&StateParams::squeezed(z), &bright, 64).unwrap();
    let f = centered(&OperatorExpr::homodyne(0.0), &s).unwrap();
    let w = witness_general(&f, &s).unwrap();
    assert!((w + 4.864).abs() < 1e-3, "{w}");

    let s = fock_state(&StateParams::coherent(Complex64::new(1.0, 0.0)), &StateParams::squeezed(z), 48).unwrap();
    let f = centered(&OperatorExpr::homodyne(0.0), &s).unwrap();
    assert!((witness_general(&f, &s).unwrap() - 0.501187).abs() < 1e-6);
}

#[test]
fn witness_detects_squeezing_against_random_los() {
    // a squeezed signal beaten with an arbitrary LO vector still trips the witness
    // for f = Δa² style probes
    let mut rng = rng_for(9, 0);
    let z = 0.5;
    let mut hits = 0;
    for _ in 0..20 {
        let lo = haar_vector(&mut rng, 5);
        let si = ModeState::Pure(rotate_phase(&squeezed_vacuum_amplitudes(z, 32), 0.0));
        let state = FockState::product(&si, &ModeState::Pure(lo).padded(32), 32).unwrap();
        let f = parse("a + ad").unwrap();
        let w = witness_general(&centered(&f, &state).unwrap(), &state).unwrap();
        if w < -1e-3 {
            hits += 1;
        }
    }
    assert_eq!(hits, 20);
}

#[test]
fn coherent_signal_witness_is_nonnegative_for_random_probes() {
    let mut rng = rng_for(11, 0);
    for _ in 0..30 {
        let alpha = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let lo = haar_vector(&mut rng, 6);
        let state = coherent_with_vector(alpha, &lo, 28).unwrap();
        let f = lowit::validate::random_expr(&mut rng, 2, 4);
        assert!(witness_general(&f, &state).unwrap() >= -1e-8);
    }
}

#[test]
fn convergence_examples() {
    let vac = StateParams::vacuum();
    let l = OperatorExpr::homodyne(0.4);
    let l2 = &l * &l;
    assert_eq!(converged_cutoff(&vac, &vac, &l2, 1e-9, 512).unwrap(), 2);
    let z = db_to_zeta(3.0);
    let c = converged_cutoff(
        &StateParams::coherent(Complex64::new(1.0, 0.0)),
        &StateParams::squeezed(z),
        &l2,
        1e-9,
        512,
    )
    .unwrap();
    assert!(c <= 64);
    let err = converged_cutoff(&StateParams::coherent(Complex64::new(5.0, 0.0)), &vac, &l2, 1e-9, 16).unwrap_err();
    assert!(matches!(err, FockError::NoConvergence { .. }));
}

#[test]
fn gaussian_and_fock_agree_on_a_few_draws() {
    let mut rng = rng_for(77, 3);
    for _ in 0..5 {
        let si = random_params(&mut rng, 1.5, 0.4, 0.6);
        let lo = random_params(&mut rng, 1.5, 0.4, 0.6);
        let theta = rng.random_range(0.0..2.0 * PI);
        let (cutoff, dev) = oracle_agreement(&si, &lo, theta, 128).unwrap();
        assert!(cutoff <= 128 && dev < 1e-6, "cutoff {cutoff}, dev {dev}");
    }
}

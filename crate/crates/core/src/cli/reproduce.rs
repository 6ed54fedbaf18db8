use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use super::svg::{self, Plot, Series};
use super::{to_json, write_file, CliError, RunConfig};
use crate::channels::{apply_gain_noise, apply_loss, GainParam, LossParam};
use crate::gaussian::{db_to_zeta, make_state, mean_photon, StateParams};
use crate::witness::{noise_parameter, ordered_variances, NoiseDb, TwoModeProduct};

const SQUEEZING_DB: f64 = 3.0;
const SWEEP_MIN_PHOTONS: f64 = 1e-2;
const SWEEP_MAX_PHOTONS: f64 = 1e4;
/// Bright coherent LO used in the robustness scan.
const ROBUSTNESS_LO_PHOTONS: f64 = 10.0;
const MAX_GAIN: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    Fluctuations,
    NoiseSweep,
    Robustness,
}

impl Figure {
    pub const ALL: [Figure; 3] = [Figure::Fluctuations, Figure::NoiseSweep, Figure::Robustness];

    pub fn id(self) -> &'static str {
        match self {
            Figure::Fluctuations => "fluctuations",
            Figure::NoiseSweep => "noise-sweep",
            Figure::Robustness => "robustness",
        }
    }

    pub fn default_points(self) -> usize {
        match self {
            Figure::Fluctuations => 361,
            Figure::NoiseSweep => 201,
            Figure::Robustness => 101,
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Figure::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| {
                CliError::Input(format!(
                    "unknown figure {s:?}; expected one of fluctuations, noise-sweep, robustness"
                ))
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Artifacts {
    pub figure: Figure,
    pub csv: String,
    pub json: String,
    pub svg: Option<String>,
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn state(si: &StateParams, lo: &StateParams) -> TwoModeProduct {
    TwoModeProduct::from_params(si, lo).expect("built-in scenarios are physical")
}

pub fn render(figure: Figure, config: &RunConfig) -> Result<Artifacts, CliError> {
    config.check()?;
    let points = config.points.unwrap_or(figure.default_points());
    let (csv, json, plot) = match figure {
        Figure::Fluctuations => fluctuations(points, config.tol),
        Figure::NoiseSweep => noise_sweep(points, config.clamp_floor),
        Figure::Robustness => robustness(points),
    };
    Ok(Artifacts {
        figure,
        csv,
        json,
        svg: config.svg.then(|| svg::render(&plot)),
    })
}

pub fn write_artifacts(dir: &Path, artifacts: &Artifacts) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    let id = artifacts.figure.id();
    let mut written = Vec::new();
    let mut put = |ext: &str, body: &str| -> Result<(), CliError> {
        let path = dir.join(format!("{id}.{ext}"));
        write_file(&path, body)?;
        written.push(path);
        Ok(())
    };
    put("csv", &artifacts.csv)?;
    put("json", &artifacts.json)?;
    if let Some(svg) = &artifacts.svg {
        put("svg", svg)?;
    }
    Ok(written)
}

#[derive(Serialize)]
struct FluctuationsSummary {
    figure: &'static str,
    points: usize,
    si: StateParams,
    lo: StateParams,
    min_partial_no: f64,
    min_full_no: f64,
    theta_at_min_full_no: f64,
    standard_criterion_flags_squeezing: bool,
    lo_agnostic_criterion_flags_squeezing: bool,
}

/// Classical signal, squeezed LO: only the fully ordered variance dips.
fn fluctuations(points: usize, tol: f64) -> (String, String, Plot) {
    let si = StateParams::coherent(Complex64::new(1.0, 0.0));
    let lo = StateParams::squeezed(db_to_zeta(SQUEEZING_DB));
    let s = state(&si, &lo);
    let rows: Vec<(f64, f64, f64)> = (0..points)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / points as f64;
            let v = ordered_variances(&s, theta);
            (theta, v.partial_no, v.full_no)
        })
        .collect();
    let min_partial = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let (theta_min, min_full) = rows
        .iter()
        .map(|r| (r.0, r.2))
        .fold((0.0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let csv = csv_text(
        &["theta_rad", "partial_no", "full_no"],
        &rows.iter().map(|r| vec![num(r.0), num(r.1), num(r.2)]).collect::<Vec<_>>(),
    );
    let json = to_json(&FluctuationsSummary {
        figure: "fluctuations",
        points,
        si,
        lo,
        min_partial_no: min_partial,
        min_full_no: min_full,
        theta_at_min_full_no: theta_min,
        standard_criterion_flags_squeezing: min_full < -tol,
        lo_agnostic_criterion_flags_squeezing: min_partial < -tol,
    });
    let plot = Plot {
        title: "Ordered variances, coherent signal with squeezed LO".into(),
        x_label: "theta [rad]".into(),
        y_label: "normally ordered variance".into(),
        log_x: false,
        series: vec![
            Series {
                label: "partial (signal only)".into(),
                points: rows.iter().map(|r| (r.0, r.1)).collect(),
            },
            Series {
                label: "full (both modes)".into(),
                points: rows.iter().map(|r| (r.0, r.2)).collect(),
            },
        ],
    };
    (csv, json, plot)
}

fn coherent_lo(photons: f64) -> StateParams {
    StateParams::coherent(Complex64::new(photons.sqrt(), 0.0))
}

fn squeezed_lo(photons: f64) -> StateParams {
    StateParams::squeezed(photons.sqrt().asinh())
}

/// `N` for a 3 dB squeezed signal with a coherent LO of `photons` mean
/// photons at the phase aligned with the squeezed quadrature.
pub fn noise_with_coherent_lo(photons: f64) -> NoiseDb {
    let si = StateParams::squeezed(db_to_zeta(SQUEEZING_DB));
    noise_parameter(&state(&si, &coherent_lo(photons)), 0.0).expect("LO is bright")
}

/// Same with a squeezed-vacuum LO, `θ = π/2`.
pub fn noise_with_squeezed_lo(photons: f64) -> NoiseDb {
    let si = StateParams::squeezed(db_to_zeta(SQUEEZING_DB));
    noise_parameter(&state(&si, &squeezed_lo(photons)), PI / 2.0).expect("LO is bright")
}

/// `points` log-spaced photon numbers plus the exact matched-squeezing point.
pub fn sweep_grid(points: usize) -> Vec<f64> {
    let (a, b) = (SWEEP_MIN_PHOTONS.log10(), SWEEP_MAX_PHOTONS.log10());
    let mut grid: Vec<f64> = (0..points)
        .map(|k| 10f64.powf(a + (b - a) * k as f64 / (points - 1) as f64))
        .collect();
    let matched = db_to_zeta(SQUEEZING_DB).sinh().powi(2);
    if !grid.contains(&matched) {
        grid.push(matched);
        grid.sort_by(f64::total_cmp);
    }
    grid
}

#[derive(Serialize)]
struct NoiseSweepSummary {
    figure: &'static str,
    points: usize,
    squeezing_db: f64,
    coherent_at_10_photons: NoiseDb,
    coherent_at_1e4_photons: NoiseDb,
    coherent_strictly_decreasing: bool,
    matched_lo_photons: f64,
    squeezed_minimum: NoiseDb,
    squeezed_minimum_at_photons: f64,
    clamp_floor_db: f64,
}

fn noise_sweep(points: usize, floor: f64) -> (String, String, Plot) {
    let grid = sweep_grid(points);
    let rows: Vec<(f64, NoiseDb, NoiseDb)> = grid
        .iter()
        .map(|&n| (n, noise_with_coherent_lo(n), noise_with_squeezed_lo(n)))
        .collect();
    let strictly_decreasing = rows.windows(2).all(|w| w[1].1 .0 < w[0].1 .0);
    let (min_at, min_sq) = rows
        .iter()
        .map(|r| (r.0, r.2))
        .fold((f64::NAN, NoiseDb(f64::INFINITY)), |acc, x| if x.1 .0 < acc.1 .0 { x } else { acc });
    let csv = csv_text(
        &["lo_photons", "noise_db_coherent", "noise_db_squeezed"],
        &rows
            .iter()
            .map(|r| vec![num(r.0), r.1.to_string(), r.2.to_string()])
            .collect::<Vec<_>>(),
    );
    let json = to_json(&NoiseSweepSummary {
        figure: "noise-sweep",
        points: grid.len(),
        squeezing_db: SQUEEZING_DB,
        coherent_at_10_photons: noise_with_coherent_lo(10.0),
        coherent_at_1e4_photons: noise_with_coherent_lo(1e4),
        coherent_strictly_decreasing: strictly_decreasing,
        matched_lo_photons: db_to_zeta(SQUEEZING_DB).sinh().powi(2),
        squeezed_minimum: min_sq,
        squeezed_minimum_at_photons: min_at,
        clamp_floor_db: floor,
    });
    let plot = Plot {
        title: "Noise parameter for a 3 dB squeezed signal".into(),
        x_label: "LO mean photon number".into(),
        y_label: "N [dB]".into(),
        log_x: true,
        series: vec![
            Series {
                label: "coherent LO".into(),
                points: rows.iter().map(|r| (r.0, r.1.clamped(floor))).collect(),
            },
            Series {
                label: "squeezed-vacuum LO".into(),
                points: rows.iter().map(|r| (r.0, r.2.clamped(floor))).collect(),
            },
        ],
    };
    (csv, json, plot)
}

#[derive(Serialize)]
struct RobustnessSummary {
    figure: &'static str,
    points_per_channel: usize,
    si: StateParams,
    lo: StateParams,
    theta: f64,
    ideal_partial_no: f64,
    max_law_deviation: f64,
    noise_threshold_gain: Option<f64>,
}

fn robustness(points: usize) -> (String, String, Plot) {
    let si_params = StateParams::squeezed(db_to_zeta(SQUEEZING_DB));
    let lo_params = coherent_lo(ROBUSTNESS_LO_PHOTONS);
    let si = make_state(&si_params).expect("physical");
    let lo = make_state(&lo_params).expect("physical");
    let theta = 0.0;
    let partial = |s| ordered_variances(&TwoModeProduct::new(s, lo), theta).partial_no;
    let ideal = partial(si);
    let nb = mean_photon(&lo);

    let mut rows: Vec<(&str, f64, f64, f64)> = Vec::with_capacity(2 * points);
    for k in 0..points {
        let eta = k as f64 / (points - 1) as f64;
        let p = partial(apply_loss(&si, LossParam::new(eta).expect("η in [0, 1]")));
        rows.push(("loss", eta, p, eta * ideal));
    }
    for k in 0..points {
        let g = 1.0 + (MAX_GAIN - 1.0) * k as f64 / (points - 1) as f64;
        let p = partial(apply_gain_noise(&si, GainParam::new(g).expect("g ≥ 1")));
        rows.push(("noise", g, p, g * ideal + (g - 1.0) * (2.0 * nb + 1.0)));
    }
    let max_dev = rows.iter().map(|r| (r.2 - r.3).abs()).fold(0.0, f64::max);
    let threshold = (ideal < 0.0).then(|| (2.0 * nb + 1.0) / (ideal + 2.0 * nb + 1.0));
    let csv = csv_text(
        &["channel", "param", "partial_no", "law_prediction"],
        &rows
            .iter()
            .map(|r| vec![r.0.to_string(), num(r.1), num(r.2), num(r.3)])
            .collect::<Vec<_>>(),
    );
    let json = to_json(&RobustnessSummary {
        figure: "robustness",
        points_per_channel: points,
        si: si_params,
        lo: lo_params,
        theta,
        ideal_partial_no: ideal,
        max_law_deviation: max_dev,
        noise_threshold_gain: threshold,
    });
    let series = |name: &str, label: &str| Series {
        label: label.into(),
        points: rows.iter().filter(|r| r.0 == name).map(|r| (r.1, r.2)).collect(),
    };
    let plot = Plot {
        title: "Signal-only ordered variance under loss and excess noise".into(),
        x_label: "efficiency eta / gain g".into(),
        y_label: "partially ordered variance".into(),
        log_x: false,
        series: vec![series("loss", "loss (vs eta)"), series("noise", "noise (vs g)")],
    };
    (csv, json, plot)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> RunConfig {
        RunConfig::default()
    }

    #[test]
    fn figure_ids_round_trip() {
        for f in Figure::ALL {
            assert_eq!(f.id().parse::<Figure>().unwrap(), f);
        }
        assert!(matches!("fig9".parse::<Figure>(), Err(CliError::Input(_))));
    }

    #[test]
    fn fluctuations_rows_and_extremes() {
        let a = render(Figure::Fluctuations, &cfg()).unwrap();
        let lines: Vec<&str> = a.csv.lines().collect();
        assert_eq!(lines[0], "theta_rad,partial_no,full_no");
        assert_eq!(lines.len(), 362);
        let v: serde_json::Value = serde_json::from_str(&a.json).unwrap();
        assert!((v["min_full_no"].as_f64().unwrap() + 0.498813).abs() < 1e-6);
        assert!(v["min_partial_no"].as_f64().unwrap() >= 0.0);
        assert_eq!(v["standard_criterion_flags_squeezing"], true);
        assert_eq!(v["lo_agnostic_criterion_flags_squeezing"], false);
    }

    #[test]
    fn noise_sweep_contains_neg_inf_and_clamps_plot() {
        let c = RunConfig { svg: true, ..cfg() };
        let a = render(Figure::NoiseSweep, &c).unwrap();
        assert!(a.csv.starts_with("lo_photons,noise_db_coherent,noise_db_squeezed\n"));
        assert!(a.csv.contains(",-inf\n"));
        assert_eq!(a.csv.lines().count(), 1 + 202);
        let v: serde_json::Value = serde_json::from_str(&a.json).unwrap();
        assert_eq!(v["squeezed_minimum"], "-inf");
        assert_eq!(v["coherent_strictly_decreasing"], true);
        assert!(a.svg.unwrap().contains("<polyline"));
    }

    #[test]
    fn coherent_lo_values() {
        assert!((noise_with_coherent_lo(10.0).0 + 2.894).abs() < 2e-3);
        assert!((noise_with_coherent_lo(1e4).0 + 3.0).abs() < 1e-3);
    }

    #[test]
    fn chosen_phases_are_optimal() {
        let si = StateParams::squeezed(db_to_zeta(SQUEEZING_DB));
        for n in [0.05, 1.0, 30.0] {
            let coh = state(&si, &coherent_lo(n));
            let sq = state(&si, &squeezed_lo(n));
            for k in 0..64 {
                let t = PI * k as f64 / 64.0;
                assert!(noise_parameter(&coh, t).unwrap().0 >= noise_with_coherent_lo(n).0 - 1e-12);
                assert!(noise_parameter(&sq, t).unwrap().0 >= noise_with_squeezed_lo(n).0 - 1e-12);
            }
        }
    }

    #[test]
    fn robustness_follows_laws() {
        let a = render(Figure::Robustness, &RunConfig { points: Some(11), ..cfg() }).unwrap();
        assert_eq!(a.csv.lines().count(), 1 + 22);
        assert!(a.csv.contains("\nloss,0,0,"));
        let v: serde_json::Value = serde_json::from_str(&a.json).unwrap();
        assert!(v["max_law_deviation"].as_f64().unwrap() < 1e-12);
        let g = v["noise_threshold_gain"].as_f64().unwrap();
        assert!(g > 1.0);
    }

    #[test]
    fn rejects_bad_points() {
        let c = RunConfig { points: Some(1), ..cfg() };
        assert!(render(Figure::Fluctuations, &c).is_err());
    }
}

use std::io::Read;

use serde::Serialize;

use super::CliError;
use crate::witness::{noise_from_measurement, verdict_for, NoiseDb, Verdict};

const REQUIRED: [&str; 3] = ["theta_rad", "var_L", "nb"];
const OPTIONAL: &str = "na";

/// One measured setting: the homodyne variance and the shot-noise
/// reference taken with the signal blocked.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentRecord {
    pub theta_rad: f64,
    pub var_l: f64,
    pub nb: f64,
    pub na: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Parsed {
    /// Records paired with their 1-based line numbers.
    pub records: Vec<(u64, MomentRecord)>,
    pub warnings: Vec<String>,
}

fn field(raw: &str, line: u64, column: &str) -> Result<f64, CliError> {
    let v: f64 = raw
        .parse()
        .map_err(|_| CliError::Input(format!("line {line}: column {column}: invalid number {raw:?}")))?;
    if !v.is_finite() {
        return Err(CliError::Input(format!("line {line}: column {column}: value must be finite")));
    }
    Ok(v)
}

/// Read `theta_rad,var_L,nb[,na]` rows. Column order is free; unknown
/// columns are skipped with a warning.
pub fn read_records<R: Read>(input: R) -> Result<Parsed, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| CliError::Input(format!("line 1: cannot read header: {e}")))?
        .clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let mut idx = [0usize; 3];
    for (slot, name) in idx.iter_mut().zip(REQUIRED) {
        *slot = find(name).ok_or_else(|| CliError::Input(format!("line 1: missing required column {name}")))?;
    }
    let na_idx = find(OPTIONAL);
    let warnings: Vec<String> = headers
        .iter()
        .filter(|h| !REQUIRED.contains(h) && *h != OPTIONAL)
        .map(|h| format!("ignoring extra column {h:?}"))
        .collect();

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            CliError::Input(format!("line {line}: malformed row: {e}"))
        })?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let get = |i: usize, name: &str| {
            row.get(i)
                .ok_or_else(|| CliError::Input(format!("line {line}: missing value for {name}")))
        };
        let theta_rad = field(get(idx[0], "theta_rad")?, line, "theta_rad")?;
        let var_l = field(get(idx[1], "var_L")?, line, "var_L")?;
        let nb = field(get(idx[2], "nb")?, line, "nb")?;
        let na = match na_idx.and_then(|i| row.get(i)).filter(|s| !s.is_empty()) {
            Some(raw) => Some(field(raw, line, "na")?),
            None => None,
        };
        if var_l < 0.0 {
            return Err(CliError::Input(format!("line {line}: var_L must be ≥ 0, got {var_l}")));
        }
        if nb <= 0.0 {
            return Err(CliError::Input(format!("line {line}: nb must be > 0, got {nb}")));
        }
        if let Some(na) = na.filter(|&v| v < 0.0) {
            return Err(CliError::Input(format!("line {line}: na must be ≥ 0, got {na}")));
        }
        records.push((line, MomentRecord { theta_rad, var_l, nb, na }));
    }
    Ok(Parsed { records, warnings })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowReport {
    pub line: u64,
    pub theta_rad: f64,
    #[serde(rename = "var_L")]
    pub var_l: f64,
    pub nb: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub na: Option<f64>,
    pub partial_no: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub full_no: Option<f64>,
    pub noise_db: NoiseDb,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub rows: usize,
    #[serde(rename = "nonclassical_SI")]
    pub nonclassical_si: usize,
    pub classical_consistent: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessOutput {
    pub tol: f64,
    pub rows: Vec<RowReport>,
    pub summary: Summary,
}

pub fn evaluate_records(records: &[(u64, MomentRecord)], tol: f64) -> Result<WitnessOutput, CliError> {
    if tol.is_nan() || tol < 0.0 {
        return Err(CliError::Input(format!("tolerance must be ≥ 0, got {tol}")));
    }
    let rows = records
        .iter()
        .map(|&(line, r)| {
            let partial_no = r.var_l - r.nb;
            let noise_db =
                noise_from_measurement(r.var_l, r.nb).map_err(|e| CliError::Input(format!("line {line}: {e}")))?;
            Ok(RowReport {
                line,
                theta_rad: r.theta_rad,
                var_l: r.var_l,
                nb: r.nb,
                na: r.na,
                partial_no,
                full_no: r.na.map(|na| partial_no - na),
                noise_db,
                verdict: verdict_for(partial_no, tol),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let nonclassical_si = rows.iter().filter(|r| r.verdict == Verdict::NonclassicalSi).count();
    Ok(WitnessOutput {
        tol,
        summary: Summary {
            rows: rows.len(),
            nonclassical_si,
            classical_consistent: rows.len() - nonclassical_si,
        },
        rows,
    })
}

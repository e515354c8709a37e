use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::wave::TrajectoryRecord;

use super::{HarnessError, RunConfig};

/// Default output directory when neither the command line nor the
/// configuration names one.
pub const OUT_DIR_ENV: &str = "SNLW_OUT_DIR";

/// `explicit`, then `output_dir` from the configuration, then
/// `$SNLW_OUT_DIR`, then `snlw-out`.
pub fn resolve_output_dir(explicit: Option<&Path>, cfg: Option<&RunConfig>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| cfg.and_then(|c| c.output_dir.clone()))
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("snlw-out"))
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| HarnessError::Study(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

/// Columns `t, E_u, E_v, h1_u, l2_ut, sup_u, sup_psi, X` where `X` is the
/// running Strichartz norm (empty below dimension 3).
pub fn write_trajectory_csv(path: &Path, r: &TrajectoryRecord<f64>) -> Result<(), HarnessError> {
    let io = |e| HarnessError::io(path, e);
    let file = fs::File::create(path).map_err(io)?;
    let mut w = BufWriter::new(file);
    let x = r.running_x();
    writeln!(w, "t,E_u,E_v,h1_u,l2_ut,sup_u,sup_psi,X").map_err(io)?;
    for k in 0..r.len() {
        let xk = x.get(k).map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.times[k], r.energy_u[k], r.energy_v[k], r.h1_u[k], r.l2_ut[k], r.sup_u[k], r.sup_psi[k], xk
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Plain-text digest of an output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    /// Files that went into the digest.
    pub sources: Vec<String>,
}

const SUMMARIES: [&str; 6] =
    ["summary.json", "truncation.json", "regularity.json", "lwp.json", "perturbation.json", "verdict.json"];

fn flatten(prefix: &str, v: &serde_json::Value, out: &mut BTreeMap<String, String>) {
    match v {
        serde_json::Value::Object(map) => {
            for (k, x) in map {
                if k == "config" {
                    continue;
                }
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        serde_json::Value::Array(xs) if xs.len() > 8 => {
            out.insert(prefix.to_string(), format!("[{} entries]", xs.len()));
        }
        other => {
            out.insert(prefix.to_string(), other.to_string());
        }
    }
}

/// Reads the summaries in `dir`, writes `report.txt` and, when a ledger is
/// present, `report.csv` with columns `t, mean_E, lo95, hi95`.
pub fn write_report(dir: &Path) -> Result<Report, HarnessError> {
    let mut text = String::new();
    let mut sources = Vec::new();
    for name in SUMMARIES {
        let path = dir.join(name);
        let Ok(raw) = fs::read_to_string(&path) else { continue };
        let value: serde_json::Value = serde_json::from_str(&raw).map_err(|e| HarnessError::Study(format!("{name}: {e}")))?;
        let mut flat = BTreeMap::new();
        flatten("", &value, &mut flat);
        let _ = writeln!(text, "[{name}]");
        for (k, v) in flat {
            let _ = writeln!(text, "{k} = {v}");
        }
        text.push('\n');
        sources.push(name.to_string());
    }
    let ledger = dir.join("ledger.csv");
    if let Ok(raw) = fs::read_to_string(&ledger) {
        let mut csv = String::from("t,mean_E,lo95,hi95\n");
        for line in raw.lines().skip(1) {
            let cols: Vec<f64> = line.split(',').filter_map(|c| c.parse().ok()).collect();
            if let [t, m, s, _] = cols[..] {
                let _ = writeln!(csv, "{t},{m},{},{}", m - 1.96 * s, m + 1.96 * s);
            }
        }
        let path = dir.join("report.csv");
        fs::write(&path, csv).map_err(|e| HarnessError::io(&path, e))?;
        sources.push("ledger.csv".into());
    }
    if sources.is_empty() {
        return Err(HarnessError::Study(format!("no results found in {}", dir.display())));
    }
    let path = dir.join("report.txt");
    fs::write(&path, &text).map_err(|e| HarnessError::io(&path, e))?;
    Ok(Report { text, sources })
}

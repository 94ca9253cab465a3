//! Text cache of Painlevé tables.
//!
//! ```text
//! ftgap-table v1 pii t_min=-12 t_max=8 n=4000 eps=1e-12
//! t,u,du,H,logF
//! -1.2000000000000000e1,...
//! ```
//!
//! A file whose first line differs from the expected header, or that fails to
//! parse, is treated as a miss and rewritten.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::painleve::{hm_solve, pv_sigma_solve, PainleveIITable, SigmaPVTable, PV_TAU0};

use super::config::RunConfig;
use super::num;

#[derive(Debug, Clone, PartialEq)]
pub struct CacheOutcome {
    pub path: PathBuf,
    pub hit: bool,
}

fn header(kind: &str, lo: f64, hi: f64, n: usize, eps: f64) -> String {
    format!("ftgap-table v1 {kind} t_min={lo} t_max={hi} n={n} eps={eps:e}")
}

fn file_name(kind: &str, lo: f64, hi: f64, n: usize) -> String {
    format!("{kind}_{lo}_{hi}_{n}.csv")
}

/// Reads the numeric rows after the two header lines if the first line matches.
fn read_rows(path: &Path, expected: &str, columns: &str) -> Option<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).ok()?;
    let mut lines = text.lines();
    if lines.next()? != expected || lines.next()? != columns {
        return None;
    }
    let width = columns.split(',').count();
    let rows: Option<Vec<Vec<f64>>> = lines
        .map(|l| {
            let row: Option<Vec<f64>> = l.split(',').map(|f| f.parse().ok()).collect();
            row.filter(|r| r.len() == width)
        })
        .collect();
    rows
}

/// Writes through a temporary file in the same directory and renames it.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().ok_or_else(|| Error::Cache(format!("{} has no parent", path.display())))?;
    fs::create_dir_all(dir).map_err(|e| Error::Cache(format!("cannot create {}: {e}", dir.display())))?;
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::Cache(format!("cannot write {}: {e}", path.display()))
    })
}

fn columns<const N: usize>(rows: &[Vec<f64>]) -> [Vec<f64>; N] {
    std::array::from_fn(|k| rows.iter().map(|r| r[k]).collect())
}

fn render(head: &str, cols: &str, rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = format!("{head}\n{cols}\n");
    for row in rows {
        let fields: Vec<String> = row.into_iter().map(num).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

const PII_COLUMNS: &str = "t,u,du,H,logF";
const PV_COLUMNS: &str = "tau,v,dv";

/// The Hastings–McLeod table of the configured window, from cache when possible.
pub fn load_or_build_pii(cfg: &RunConfig) -> Result<(PainleveIITable, CacheOutcome)> {
    let (lo, hi, n) = cfg.pii_window;
    let head = header("pii", lo, hi, n, cfg.eps);
    let path = cfg.cache_dir.join(file_name("pii", lo, hi, n));
    if let Some(rows) = read_rows(&path, &head, PII_COLUMNS) {
        let [t, u, du, _, _] = columns::<5>(&rows);
        if let Ok(table) = PainleveIITable::from_columns(t, u, du, 0) {
            return Ok((table, CacheOutcome { path, hit: true }));
        }
    }
    let table = hm_solve(lo, hi, n)?;
    let rows = (0..table.len()).map(|i| vec![table.t[i], table.u[i], table.du[i], table.h[i], table.log_f[i]]);
    write_atomic(&path, &render(&head, PII_COLUMNS, rows))?;
    Ok((table, CacheOutcome { path, hit: false }))
}

/// The sigma-PV table of the configured window, from cache when possible.
pub fn load_or_build_pv(cfg: &RunConfig) -> Result<(SigmaPVTable, CacheOutcome)> {
    let (tau_max, n) = cfg.pv_window;
    let head = header("pv", PV_TAU0, tau_max, n, cfg.eps);
    let path = cfg.cache_dir.join(file_name("pv", PV_TAU0, tau_max, n));
    if let Some(rows) = read_rows(&path, &head, PV_COLUMNS) {
        let [tau, v, dv] = columns::<3>(&rows);
        if let Ok(table) = SigmaPVTable::from_columns(tau, v, dv) {
            return Ok((table, CacheOutcome { path, hit: true }));
        }
    }
    let table = pv_sigma_solve(tau_max, n)?;
    let rows = (0..table.len()).map(|i| vec![table.tau[i], table.v[i], table.dv[i]]);
    write_atomic(&path, &render(&head, PV_COLUMNS, rows))?;
    Ok((table, CacheOutcome { path, hit: false }))
}

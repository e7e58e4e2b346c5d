//! Data behind the three figures: limiting densities, long-time standard
//! deviations over `p`, and the pseudoquantum time over `p`.

use std::path::Path;

use dqwalk_core::analytic::{limit_variance, longterm_variance, pseudoquantum_time};

use crate::config::Format;
use crate::error::{CliError, Result};
use crate::output::Table;

pub const FIG1_P: [f64; 5] = [1.0, 0.8, 0.1, 0.05, 0.01];
pub const FIG2_T: [usize; 4] = [200, 300, 400, 500];

/// `x = -10, -9.95, ..., 10`, built from integers so every run agrees.
pub fn fig1_grid() -> impl Iterator<Item = f64> {
    (0..=400).map(|i| (i as f64 - 200.0) / 20.0)
}

/// `p = 0.01, 0.02, ..., 1`.
pub fn p_grid() -> impl Iterator<Item = f64> {
    (1..=100).map(|j| j as f64 / 100.0)
}

/// `(p, x, density)` of `N(0, v(p))`.
pub fn fig1() -> Result<Table> {
    let mut table = Table::new(vec!["p", "x", "density"]);
    for p in FIG1_P {
        let v = limit_variance(p)?;
        let norm = 1.0 / (2.0 * std::f64::consts::PI * v).sqrt();
        for x in fig1_grid() {
            table.push(vec![p.into(), x.into(), (norm * (-x * x / (2.0 * v)).exp()).into()]);
        }
    }
    Ok(table)
}

/// `(t, p, std_dev)`; `p = 0` has no long-time formula and is left out.
pub fn fig2() -> Result<Table> {
    let mut table = Table::new(vec!["t", "p", "std_dev"]);
    for t in FIG2_T {
        for p in p_grid() {
            table.push(vec![t.into(), p.into(), longterm_variance(p, t as f64)?.sqrt().into()]);
        }
    }
    Ok(table)
}

/// `(p, t0)`.
pub fn fig3() -> Result<Table> {
    let mut table = Table::new(vec!["p", "t0"]);
    for p in p_grid() {
        table.push(vec![p.into(), pseudoquantum_time(p)?.into()]);
    }
    Ok(table)
}

pub fn all() -> Result<[(&'static str, Table); 3]> {
    Ok([("fig1", fig1()?), ("fig2", fig2()?), ("fig3", fig3()?)])
}

/// Writes `fig1`, `fig2` and `fig3` into `dir`, creating it if needed.
pub fn write_all(dir: &Path, format: Format) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    for (name, table) in all()? {
        let path = dir.join(format!("{name}.{ext}"));
        table.emit(format, Some(&path))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

//! Persistent limit-law tables.
//!
//! A cache is a `key=value` header followed, optionally, by the sorted sups
//! one per line after a `[sups]` marker. Floats are written in Rust's
//! shortest round-trip form, so reading a cache back is bit-exact and writing
//! the same law twice gives identical bytes.

use std::path::Path;

use ucpd_core::limitsim::{LimitLaw, QUANTILE_LEVELS};
use ucpd_core::uprocess::LimitProcess;

use crate::error::{CliError, CliResult};

pub const CACHE_FORMAT_VERSION: u32 = 1;
const SUPS_MARKER: &str = "[sups]";

pub fn render(law: &LimitLaw, include_sups: bool) -> String {
    let include_sups = include_sups && law.has_samples();
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        out.push_str(k);
        out.push('=');
        out.push_str(&v);
        out.push('\n');
    };
    line("format_version", CACHE_FORMAT_VERSION.to_string());
    line("process", law.process.id().to_string());
    line("weight", law.weight.clone());
    line("grid_size", law.grid_size.to_string());
    line("reps", law.reps.to_string());
    line("master_seed", law.master_seed.to_string());
    line("low_reps_warning", law.low_reps_warning().to_string());
    for (p, q) in &law.quantiles {
        line(&format!("quantile_{p}"), q.to_string());
    }
    line("sups_included", include_sups.to_string());
    if include_sups {
        out.push_str(SUPS_MARKER);
        out.push('\n');
        for s in &law.sorted_sups {
            out.push_str(&s.to_string());
            out.push('\n');
        }
    }
    out
}

fn field<'a>(header: &'a [(String, String)], key: &str) -> CliResult<&'a str> {
    header
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| CliError::Cache(format!("missing `{key}`")))
}

fn number<T: std::str::FromStr>(header: &[(String, String)], key: &str) -> CliResult<T> {
    field(header, key)?
        .parse()
        .map_err(|_| CliError::Cache(format!("`{key}` is not a valid number")))
}

pub fn parse(text: &str) -> CliResult<LimitLaw> {
    let mut header = Vec::new();
    let mut lines = text.lines().enumerate();
    let mut has_marker = false;
    for (i, l) in lines.by_ref() {
        if l == SUPS_MARKER {
            has_marker = true;
            break;
        }
        if l.is_empty() {
            continue;
        }
        let (k, v) = l
            .split_once('=')
            .ok_or_else(|| CliError::Cache(format!("line {}: expected key=value", i + 1)))?;
        header.push((k.to_string(), v.to_string()));
    }
    let version: u32 = number(&header, "format_version")?;
    if version != CACHE_FORMAT_VERSION {
        return Err(CliError::Cache(format!(
            "unsupported format_version {version}"
        )));
    }
    let process = LimitProcess::from_id(field(&header, "process")?)?;
    let weight = field(&header, "weight")?.to_string();
    let grid_size: usize = number(&header, "grid_size")?;
    let reps: usize = number(&header, "reps")?;
    let master_seed: u64 = number(&header, "master_seed")?;
    let quantiles = QUANTILE_LEVELS
        .iter()
        .map(|&p| number::<f64>(&header, &format!("quantile_{p}")).map(|q| (p, q)))
        .collect::<CliResult<Vec<_>>>()?;
    let sups_included: bool = field(&header, "sups_included")?
        .parse()
        .map_err(|_| CliError::Cache("`sups_included` must be true or false".into()))?;
    if sups_included != has_marker {
        return Err(CliError::Cache(
            "`sups_included` disagrees with the data block".into(),
        ));
    }
    if !sups_included {
        ucpd_core::limitsim::check_law_header(grid_size, reps)?;
        return Ok(LimitLaw {
            process,
            weight,
            grid_size,
            reps,
            master_seed,
            sorted_sups: Vec::new(),
            quantiles,
        });
    }
    let sups = lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            l.parse::<f64>()
                .map_err(|_| CliError::Cache(format!("line {}: `{l}` is not a number", i + 1)))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    if sups.len() != reps {
        return Err(CliError::Cache(format!(
            "header says {reps} reps but {} sups follow",
            sups.len()
        )));
    }
    let law = LimitLaw::from_sorted(process, weight, grid_size, master_seed, sups)?;
    let stored_match = law
        .quantiles
        .iter()
        .zip(&quantiles)
        .all(|((_, a), (_, b))| a.to_bits() == b.to_bits());
    if !stored_match {
        return Err(CliError::Cache(
            "quantile table does not match the stored sups".into(),
        ));
    }
    Ok(law)
}

pub fn write(path: &Path, law: &LimitLaw, include_sups: bool) -> CliResult<()> {
    std::fs::write(path, render(law, include_sups)).map_err(|e| CliError::io(path, e))
}

pub fn read(path: &Path) -> CliResult<LimitLaw> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text)
}

//! Batch front end: load a scenario, run a study, write CSV and JSON.

mod output;
mod validate;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use crate::comm_rates::{suppression_warning, RatePoint};
use crate::config::{dbm_to_watts, parse_config, RadarSuppression, SystemConfig, DEFAULT_SCENARIO};
use crate::error::{JrcError, Result};
use crate::scenarios::{
    attach_mc, cpi_sweep, eval_point, k_rad_limit, sweep_region, SchemeSpec, SweepAxis, SweepSpec,
};

pub use output::{cpi_table, emit_csv, emit_json, region_table, Metadata, Table};
pub use validate::{run_validation, CheckResult};

/// Environment variable that redirects relative output paths.
pub const OUT_DIR_ENV: &str = "FDJRC_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "fdjrc",
    version,
    about = "Rate regions and CRBs for a full-duplex JRC node"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Scenario file, or `defaults` for the built-in baseline.
    #[arg(long, global = true, default_value = "defaults")]
    pub config: PathBuf,
    /// Output CSV path; a JSON sidecar is written next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Monte Carlo trials per point for the mc_* columns (0 disables them).
    #[arg(long, global = true, default_value_t = 0)]
    pub trials: usize,
    /// Omit the timestamp so repeated runs are byte-identical.
    #[arg(long, global = true)]
    pub reproducible: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Evaluate one operating point per scheme.
    Point {
        #[arg(long, value_delimiter = ',', default_value = "alt-sic")]
        scheme: Vec<String>,
    },
    /// Sweep one axis and trace a rate-region boundary per scheme.
    Region {
        #[arg(long, value_delimiter = ',', default_value = "alt-sic")]
        scheme: Vec<String>,
        /// `name:start:stop:count[unit]`, e.g. `p_ul:0:20:21dBm`.
        #[arg(long)]
        sweep: String,
    },
    /// Estimation information against CPI length.
    Cpi {
        #[arg(long, default_value = "t_c:10:200:20ms")]
        sweep: String,
    },
    /// Closed-form versus numeric oracle checks.
    Validate,
}

/// Everything a study needs, resolved from the command line.
#[derive(Debug, Clone)]
pub struct StudyRequest {
    pub command: Command,
    pub config_path: PathBuf,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub trials: usize,
    pub reproducible: bool,
}

impl From<Cli> for StudyRequest {
    fn from(cli: Cli) -> Self {
        Self {
            command: cli.command,
            config_path: cli.common.config,
            out: cli.common.out,
            seed: cli.common.seed,
            trials: cli.common.trials,
            reproducible: cli.common.reproducible,
        }
    }
}

/// A parsed `name:start:stop:count[unit]` sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSweep {
    pub spec: SweepSpec,
    pub text: String,
}

/// Parse `name:start:stop:count[unit]`; units are dBm, mW or W for powers and
/// ms or s for the CPI. Without a unit powers are in W and times in s.
pub fn parse_sweep(text: &str) -> Result<ParsedSweep> {
    let bad = |why: &str| JrcError::Validation(format!("bad sweep `{text}`: {why}"));
    let parts: Vec<&str> = text.split(':').collect();
    let [name, start, stop, count] = parts[..] else {
        return Err(bad("expected name:start:stop:count[unit]"));
    };
    let axis: SweepAxis = name.parse()?;
    let split = count.find(|c: char| !c.is_ascii_digit()).unwrap_or(count.len());
    let (n, unit) = count.split_at(split);
    let n: usize = n.parse().map_err(|_| bad("count is not a positive integer"))?;
    if n == 0 {
        return Err(bad("count is zero"));
    }
    let start: f64 = start.parse().map_err(|_| bad("start is not a number"))?;
    let stop: f64 = stop.parse().map_err(|_| bad("stop is not a number"))?;
    let convert: fn(f64) -> f64 = match (axis.is_power(), unit) {
        (true, "dBm") => dbm_to_watts,
        (true, "mW") => |x| x * 1e-3,
        (true, "W") | (true, "") => |x| x,
        (false, "ms") => |x| x * 1e-3,
        (false, "s") | (false, "") => |x| x,
        _ => return Err(bad("unit does not fit the axis")),
    };
    let grid = (0..n)
        .map(|k| {
            let v = if n == 1 {
                start
            } else {
                start + (stop - start) * k as f64 / (n - 1) as f64
            };
            convert(v)
        })
        .collect();
    Ok(ParsedSweep {
        spec: SweepSpec::new(axis, grid),
        text: text.to_string(),
    })
}

fn load(path: &Path) -> Result<(SystemConfig, String)> {
    let text = if path.as_os_str() == "defaults" {
        DEFAULT_SCENARIO.to_string()
    } else {
        std::fs::read_to_string(path).map_err(|source| JrcError::Io {
            path: path.display().to_string(),
            source,
        })?
    };
    let cfg = parse_config(&text)?;
    Ok((cfg, hex::encode(Sha256::digest(text.as_bytes()))))
}

fn schemes(list: &[String]) -> Result<Vec<SchemeSpec>> {
    list.iter().map(|s| s.trim().parse()).collect()
}

fn output_path(req: &StudyRequest, default_name: &str) -> PathBuf {
    let p = req.out.clone().unwrap_or_else(|| PathBuf::from(default_name));
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if p.is_relative() => Path::new(&dir).join(p),
        _ => p,
    }
}

/// What a successful study produced.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutcome {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub rows: usize,
    /// False when the validation suite found a failure.
    pub passed: bool,
}

fn write_table(
    req: &StudyRequest,
    table: &Table,
    meta: &Metadata,
    default_name: &str,
) -> Result<StudyOutcome> {
    let csv = output_path(req, default_name);
    let json = csv.with_extension("json");
    if let Some(dir) = csv.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| JrcError::Io {
            path: dir.display().to_string(),
            source,
        })?;
    }
    emit_csv(table, meta, &csv)?;
    emit_json(table, meta, &json)?;
    Ok(StudyOutcome {
        csv: Some(csv),
        json: Some(json),
        rows: table.rows.len(),
        passed: true,
    })
}

fn mc_points(
    cfg: &SystemConfig,
    scheme: SchemeSpec,
    points: &mut [RatePoint],
    axis: Option<&SweepSpec>,
    req: &StudyRequest,
) -> Result<()> {
    if req.trials == 0 {
        return Ok(());
    }
    for (k, p) in points.iter_mut().enumerate() {
        let c = match axis {
            Some(s) => s.axis.apply(cfg, s.grid[k])?,
            None => cfg.clone(),
        };
        attach_mc(&c, scheme, p, req.trials, req.seed);
    }
    Ok(())
}

/// Execute a study and write its outputs. Nothing is written unless the
/// whole study succeeded.
pub fn run(req: &StudyRequest) -> Result<StudyOutcome> {
    let (cfg, hash) = load(&req.config_path)?;
    let mut meta = Metadata {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: String::new(),
        config: req.config_path.display().to_string(),
        config_sha256: hash,
        seed: req.seed,
        trials: req.trials,
        k_rad_policy: cfg.k_rad.label(),
        schemes: String::new(),
        sweep: String::new(),
        timestamp: (!req.reproducible).then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        }),
    };
    match &req.command {
        Command::Point { scheme } => {
            let schemes = schemes(scheme)?;
            meta.command = "point".into();
            meta.schemes = scheme.join(",");
            let mut points = Vec::new();
            for s in &schemes {
                let mut p = eval_point(&cfg, *s)?;
                if let (SchemeSpec::AltSic, RadarSuppression::Fixed(k)) = (s, cfg.k_rad) {
                    let star = k_rad_limit(&cfg)?;
                    p.k_rad_star = Some(star);
                    if let Some(w) = suppression_warning(k, star) {
                        eprintln!("warning: {w}");
                    }
                }
                mc_points(&cfg, *s, std::slice::from_mut(&mut p), None, req)?;
                points.push(p);
            }
            write_table(
                req,
                &region_table(&points, None, req.trials > 0),
                &meta,
                "point.csv",
            )
        }
        Command::Region { scheme, sweep } => {
            let schemes = schemes(scheme)?;
            let parsed = parse_sweep(sweep)?;
            if !parsed.spec.axis.is_power() {
                return Err(JrcError::Validation(
                    "region sweeps run over p_ul, p_dl or p_rad; use `cpi` for t_c".into(),
                ));
            }
            meta.command = "region".into();
            meta.schemes = scheme.join(",");
            meta.sweep = parsed.text.clone();
            let mut points = Vec::new();
            for s in &schemes {
                let mut curve = sweep_region(&cfg, *s, &parsed.spec)?;
                mc_points(&cfg, *s, &mut curve.points, Some(&parsed.spec), req)?;
                points.extend(curve.points);
            }
            let table = region_table(&points, Some(parsed.spec.axis), req.trials > 0);
            write_table(req, &table, &meta, "region.csv")
        }
        Command::Cpi { sweep } => {
            let parsed = parse_sweep(sweep)?;
            if parsed.spec.axis != SweepAxis::Tc {
                return Err(JrcError::Validation("cpi sweeps run over t_c".into()));
            }
            meta.command = "cpi".into();
            meta.schemes = SchemeSpec::AltSic.to_string();
            meta.sweep = parsed.text.clone();
            let curve = cpi_sweep(&cfg, &parsed.spec.grid)?;
            write_table(req, &cpi_table(&curve), &meta, "cpi.csv")
        }
        Command::Validate => {
            let trials = if req.trials == 0 { 2000 } else { req.trials };
            let results = run_validation(&cfg, trials, req.seed);
            println!("{:<44} {:>14} {:>12}  result", "check", "value", "limit");
            for r in &results {
                println!(
                    "{:<44} {:>14.6e} {:>12.3e}  {}",
                    r.name,
                    r.value,
                    r.limit,
                    if r.passed { "PASS" } else { "FAIL" }
                );
            }
            let passed = results.iter().all(|r| r.passed);
            Ok(StudyOutcome {
                csv: None,
                json: None,
                rows: results.len(),
                passed,
            })
        }
    }
}

/// Binary entry point.
pub fn main_entry() -> ExitCode {
    let req = StudyRequest::from(Cli::parse());
    match run(&req) {
        Ok(outcome) if outcome.passed => {
            if let Some(csv) = outcome.csv {
                eprintln!("wrote {} rows to {}", outcome.rows, csv.display());
            }
            ExitCode::SUCCESS
        }
        Ok(_) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_syntax() {
        let s = parse_sweep("p_ul:0:20:21dBm").unwrap();
        assert_eq!(s.spec.axis, SweepAxis::PUl);
        assert_eq!(s.spec.grid.len(), 21);
        assert!((s.spec.grid[0] - 1e-3).abs() < 1e-18);
        assert!((s.spec.grid[20] - 0.1).abs() < 1e-15);

        let s = parse_sweep("t_c:10:200:20ms").unwrap();
        assert!((s.spec.grid[0] - 0.01).abs() < 1e-15 && (s.spec.grid[19] - 0.2).abs() < 1e-15);

        let s = parse_sweep("p_rad:0.5:0.5:1").unwrap();
        assert_eq!(s.spec.grid, vec![0.5]);

        for bad in ["p_ul:0:20", "q:0:1:2", "p_ul:0:1:0", "t_c:1:2:3dBm", "p_ul:a:1:2"] {
            assert!(parse_sweep(bad).is_err(), "{bad}");
        }
    }
}

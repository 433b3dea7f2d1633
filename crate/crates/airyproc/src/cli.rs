//! `airyproc` subcommands.
//!
//! Exit codes: 0 on success, 2 on usage or parse errors (including bad
//! barrier files and unordered times), 3 on numeric failure or when a
//! determinant's error estimate exceeds `--tolerance`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use airyproc_core::airy1::{self, FddQuery};
use airyproc_core::{airy2, DetResult, GridParams};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::acceptance::{self, loglog_slope, SuiteConfig};
use crate::barrier_file::read_barrier;
use crate::output::{Cell, Format, Table};
use crate::{during, Error};

#[derive(Debug, Parser)]
#[command(name = "airyproc", version, about = "Airy process statistics by Fredholm determinants")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunConfig {
    /// Nominal quadrature size (nodes per panel = m / 10).
    #[arg(long, global = true, env = "AIRYPROC_GRID_M", default_value_t = 120)]
    pub grid_m: usize,
    /// Upper cutoff distance beyond the largest level.
    #[arg(long, global = true, default_value_t = 10.0)]
    pub cutoff_pad: f64,
    /// Largest acceptable determinant error estimate.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub output_format: Format,
    /// Seed for Monte Carlo checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn params(&self) -> Result<GridParams, Error> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Usage("--tolerance must be positive".into()));
        }
        let p = GridParams {
            m: self.grid_m,
            pad: self.cutoff_pad,
            estimate_error: true,
        };
        p.validate().map_err(|e| Error::Usage(e.to_string()))?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Process {
    Airy1,
    Airy2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Formula {
    Path,
    Extended,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One-point CDF.
    #[command(allow_negative_numbers = true)]
    Marginal {
        #[arg(long, value_enum, default_value_t = Process::Airy1)]
        process: Process,
        #[arg(short = 'x', long = "x", value_delimiter = ',', required = true, allow_hyphen_values = true)]
        x: Vec<f64>,
    },
    /// Joint CDF at several times.
    #[command(allow_negative_numbers = true)]
    Fdd {
        #[arg(long, value_enum, default_value_t = Process::Airy1)]
        process: Process,
        #[arg(long, value_enum, default_value_t = Formula::Path)]
        formula: Formula,
        /// Evaluate both formulas and report their gap.
        #[arg(long)]
        both: bool,
        /// Add this to every time.
        #[arg(long, default_value_t = 0.0)]
        shift: f64,
        #[arg(short = 't', long = "t", value_delimiter = ',', required = true, allow_hyphen_values = true)]
        times: Vec<f64>,
        #[arg(short = 'x', long = "x", value_delimiter = ',', required = true, allow_hyphen_values = true)]
        levels: Vec<f64>,
    },
    /// Probability of staying below a piecewise-linear barrier.
    Hitting {
        /// JSON file `{"breakpoints": [[t, h], ...]}`.
        barrier_file: PathBuf,
        /// Also evaluate discrete chains n = 4, 8, ... up to this power of two.
        chain_n: Option<usize>,
    },
    /// Local Brownian diagnostics of the conditioned process.
    #[command(allow_negative_numbers = true)]
    Local {
        #[arg(short = 'x', long = "x")]
        x: f64,
        #[arg(short = 't', long = "t", value_delimiter = ',', required = true, allow_hyphen_values = true)]
        t: Vec<f64>,
        #[arg(short = 'y', long = "y", value_delimiter = ',', required = true, allow_hyphen_values = true)]
        y: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        eps: Vec<f64>,
    },
    /// Increment moments E[(A1(t) - A1(0))^order].
    Moments {
        #[arg(short = 't', long = "t", value_delimiter = ',', required = true, allow_hyphen_values = true)]
        t: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        orders: Vec<u32>,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Criteria to run (default: all).
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u32>,
        /// Monte Carlo sample size for the eigenvalue and bridge oracles.
        #[arg(long)]
        samples: Option<usize>,
    },
}

/// Parse, run, print. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, err) {
        Ok(report) => {
            let _ = out.write_all(report.text.as_bytes());
            match report.failure {
                None => 0,
                Some(e) => {
                    let _ = writeln!(err, "error: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Rendered output plus a failure detected after the rows were produced
/// (tolerance violations, failed acceptance criteria).
pub struct Report {
    pub text: String,
    pub failure: Option<Error>,
}

#[derive(Serialize)]
struct Echo<'a> {
    command: &'static str,
    #[serde(flatten)]
    config: &'a RunConfig,
}

pub fn execute(cli: &Cli, log: &mut dyn Write) -> Result<Report, Error> {
    let cfg = &cli.config;
    let params = cfg.params()?;
    let (name, table, worst) = match &cli.command {
        Command::Marginal { process, x } => ("marginal", marginal(*process, x, &params)?, None),
        Command::Fdd {
            process,
            formula,
            both,
            shift,
            times,
            levels,
        } => {
            let q = FddQuery::new(times.iter().map(|t| t + shift).collect(), levels.clone())
                .map_err(|e| Error::Usage(e.to_string()))?;
            ("fdd", fdd(*process, *formula, *both, &q, &params)?, None)
        }
        Command::Hitting { barrier_file, chain_n } => {
            let b = read_barrier(barrier_file)?;
            ("hitting", hitting(&b, *chain_n, &params)?, None)
        }
        Command::Local { x, t, y, eps } => ("local", local(*x, t, y, eps, &params)?, None),
        Command::Moments { t, orders } => {
            let table = moments(t, orders, &params)?;
            if cfg.output_format == Format::Csv {
                for (k, v) in &table.summary {
                    let _ = writeln!(log, "# {k} = {v:.6}");
                }
            }
            ("moments", table, None)
        }
        Command::Selftest { criteria, samples } => {
            let mut suite = SuiteConfig {
                params,
                seed: cfg.seed.unwrap_or(acceptance::DEFAULT_SEED),
                ..SuiteConfig::default()
            };
            if let Some(n) = samples {
                suite.tw_samples = *n;
                suite.bridge_samples = *n;
            }
            let (table, failed) = selftest(criteria, &suite, log)?;
            let failure = (!failed.is_empty()).then(|| {
                Error::Acceptance(format!(
                    "criteria {} failed",
                    failed.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
                ))
            });
            ("selftest", table, failure)
        }
    };
    let failure = worst.or_else(|| tolerance_violation(name, &table, cfg.tolerance));
    let text = match cfg.output_format {
        Format::Csv => table.to_csv()?,
        Format::Json => {
            let mut s = table.to_json(&Echo { command: name, config: cfg })?;
            s.push('\n');
            s
        }
    };
    Ok(Report { text, failure })
}

/// Rows of determinant-valued commands whose `error_est` exceeds the
/// tolerance.
fn tolerance_violation(name: &'static str, t: &Table, tol: f64) -> Option<Error> {
    if !matches!(name, "marginal" | "fdd" | "hitting") {
        return None;
    }
    let col = t.columns.iter().position(|c| *c == "error_est")?;
    let worst = t
        .rows
        .iter()
        .filter_map(|r| match r[col] {
            Cell::Num(v) => Some(v),
            _ => None,
        })
        .fold(0.0, f64::max);
    (worst > tol).then(|| Error::Tolerance(format!("{name}: error estimate {worst:.3e} exceeds tolerance {tol:.3e}")))
}

fn marginal(process: Process, xs: &[f64], p: &GridParams) -> Result<Table, Error> {
    let mut t = Table::new(&["x", "cdf", "error_est"]);
    for &x in xs {
        let r = match process {
            Process::Airy1 => during("marginal_cdf", airy1::marginal_cdf(x, p))?,
            Process::Airy2 => during("marginal_cdf_gue", airy2::marginal_cdf_gue(x, p))?,
        };
        t.push(vec![x.into(), r.value.into(), r.error_est.into()]);
    }
    Ok(t)
}

fn fdd_one(process: Process, formula: Formula, q: &FddQuery, p: &GridParams) -> Result<DetResult, Error> {
    match (process, formula) {
        (Process::Airy1, Formula::Path) => during("fdd_path_integral", airy1::fdd_path_integral(q, p)),
        (Process::Airy1, Formula::Extended) => during("fdd_extended", airy1::fdd_extended(q, p)),
        (Process::Airy2, Formula::Path) => during("fdd_grouped_airy2", airy2::fdd_grouped_airy2(q, p)),
        (Process::Airy2, Formula::Extended) => during("fdd_extended_airy2", airy2::fdd_extended_airy2(q, p)),
    }
}

fn formula_name(f: Formula) -> &'static str {
    match f {
        Formula::Path => "path",
        Formula::Extended => "extended",
    }
}

fn fdd(process: Process, formula: Formula, both: bool, q: &FddQuery, p: &GridParams) -> Result<Table, Error> {
    if !both {
        let r = fdd_one(process, formula, q, p)?;
        let mut t = Table::new(&["formula", "value", "error_est"]);
        t.push(vec![formula_name(formula).into(), r.value.into(), r.error_est.into()]);
        return Ok(t);
    }
    let a = fdd_one(process, Formula::Path, q, p)?;
    let b = fdd_one(process, Formula::Extended, q, p)?;
    let gap = (a.value - b.value).abs();
    let mut t = Table::new(&["formula", "value", "error_est", "gap"]);
    t.push(vec!["path".into(), a.value.into(), a.error_est.into(), gap.into()]);
    t.push(vec!["extended".into(), b.value.into(), b.error_est.into(), gap.into()]);
    Ok(t)
}

fn hitting(b: &airy1::Barrier, chain_n: Option<usize>, p: &GridParams) -> Result<Table, Error> {
    let cont = during("hitting_continuum", airy1::hitting_continuum(b, p))?;
    let mut t = Table::new(&["method", "n", "value", "error_est", "gap"]);
    t.push(vec!["continuum".into(), "".into(), cont.value.into(), cont.error_est.into(), 0.0.into()]);
    if let Some(nmax) = chain_n {
        if nmax < 4 || !nmax.is_power_of_two() {
            return Err(Error::Usage("chain_n must be a power of two >= 4".into()));
        }
        let mut n = 4;
        while n <= nmax {
            let r = during("hitting_discrete_chain", airy1::hitting_discrete_chain(b, n, p))?;
            t.push(vec![
                "chain".into(),
                n.into(),
                r.value.into(),
                r.error_est.into(),
                (r.value - cont.value).abs().into(),
            ]);
            n *= 2;
        }
    }
    Ok(t)
}

fn local(x: f64, ts: &[f64], ys: &[f64], eps: &[f64], p: &GridParams) -> Result<Table, Error> {
    let mut t = Table::new(&[
        "epsilon",
        "t",
        "y",
        "g_val",
        "h_val",
        "gaussian_gap",
        "fitted_variance",
        "error_est",
    ]);
    let coarse = p.without_error();
    for &tt in ts {
        for &y in ys {
            for &e in eps {
                let d = during("local_scaling_diagnostics", airy1::local_scaling_diagnostics(x, tt, y, e, &coarse))?;
                let err = if p.estimate_error {
                    let f = during(
                        "local_scaling_diagnostics",
                        airy1::local_scaling_diagnostics(x, tt, y, e, &coarse.doubled()),
                    )?;
                    (d.g_val - f.g_val)
                        .abs()
                        .max((d.h_val - f.h_val).abs())
                        .max((d.gaussian_gap - f.gaussian_gap).abs())
                } else {
                    0.0
                };
                t.push(vec![
                    e.into(),
                    tt.into(),
                    y.into(),
                    d.g_val.into(),
                    d.h_val.into(),
                    d.gaussian_gap.into(),
                    d.fitted_variance.into(),
                    err.into(),
                ]);
            }
        }
    }
    Ok(t)
}

fn moments(ts: &[f64], orders: &[u32], p: &GridParams) -> Result<Table, Error> {
    if let Some(o) = orders.iter().find(|o| **o != 2 && **o != 4) {
        return Err(Error::Usage(format!("unsupported moment order {o} (use 2 or 4)")));
    }
    if let Some(t) = ts.iter().find(|t| !(**t > 0.0 && **t <= 2.0)) {
        return Err(Error::Usage(format!("moment lag {t} outside (0, 2]")));
    }
    let mut t = Table::new(&["t", "order", "moment", "ratio_m4_m2sq", "error_est"]);
    let mut second = Vec::new();
    for &lag in ts {
        let m = during("increment_moment", airy1::increment_moments(lag, p))?;
        second.push(m.second);
        for &o in orders {
            let v = m.order(o).map_err(|e| Error::Usage(e.to_string()))?;
            t.push(vec![
                lag.into(),
                o.into(),
                v.into(),
                (m.fourth / (m.second * m.second)).into(),
                m.error_est.into(),
            ]);
        }
    }
    if ts.len() >= 2 && orders.contains(&2) {
        t.summary.push(("slope_order2", loglog_slope(ts, &second)));
    }
    Ok(t)
}

fn selftest(criteria: &[u32], suite: &SuiteConfig, log: &mut dyn Write) -> Result<(Table, Vec<u32>), Error> {
    let ids: Vec<u32> = if criteria.is_empty() {
        acceptance::ALL.to_vec()
    } else {
        criteria.to_vec()
    };
    let mut t = Table::new(&["criterion", "name", "passed", "detail", "seconds"]);
    let mut failed = Vec::new();
    for id in ids {
        let o = acceptance::run(id, suite)?;
        let _ = writeln!(log, "{o}");
        if !o.passed {
            failed.push(id);
        }
        t.push(vec![
            id.into(),
            o.name.into(),
            if o.passed { "true" } else { "false" }.into(),
            o.detail.as_str().into(),
            o.elapsed.as_secs_f64().into(),
        ]);
    }
    Ok((t, failed))
}

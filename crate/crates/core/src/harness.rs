//! Configuration-driven experiments writing CSV tables.
//!
//! A config is a UTF-8 text with one `key = value` pair per line; `#` starts a
//! comment. Recognised keys:
//!
//! | key         | value                                            | default          |
//! |-------------|--------------------------------------------------|------------------|
//! | `problem`   | `1`, `2` or `3`                                  | required         |
//! | `k1`..`k3`  | reals overriding the problem's constants         | per problem      |
//! | `N`         | partition count                                  | required*        |
//! | `dt`        | time step                                        | required         |
//! | `tfinal`    | final time, a multiple of `dt`                   | required         |
//! | `p`         | tension, or `search`                             | `1`              |
//! | `p_lo`/`p_hi` | search bounds                                  | `1e-8` / `10`    |
//! | `snapshots` | comma-separated times, multiples of `dt`         | none             |
//! | `n_list`    | comma-separated partition counts (convergence)   | `50,100,150,200,250` |
//! | `mode`      | `errors`, `maxima`, `convergence` or `profile`   | `errors`         |
//! | `out`       | output directory                                 | see CLI          |
//!
//! \* not needed in `convergence` mode.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::{convergence_order, linf_error, search_p, state_maxima};
use crate::basis::{nodal_weights, SplineParams};
use crate::error::BurgersError;
use crate::problems::{problem1_with, problem2, problem3, ProblemSpec, TravelingWaveParams};
use crate::stepper::{run, steps_for};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemId {
    One,
    Two,
    Three,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tension {
    Fixed(f64),
    Search { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Errors,
    Maxima,
    Convergence,
    Profile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemId,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub n: usize,
    pub dt: f64,
    pub t_final: f64,
    pub tension: Tension,
    pub snapshots: Vec<f64>,
    pub n_list: Vec<usize>,
    pub mode: Mode,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: `{}`: {}", self.field, self.message),
            None => write!(f, "`{}`: {}", self.field, self.message),
        }
    }
}

fn cfg_err<T>(
    line: Option<usize>,
    field: &str,
    message: impl Into<String>,
) -> Result<T, ConfigError> {
    Err(ConfigError {
        line,
        field: field.to_string(),
        message: message.into(),
    })
}

const KEYS: &[&str] = &[
    "problem",
    "k1",
    "k2",
    "k3",
    "N",
    "dt",
    "tfinal",
    "p",
    "p_lo",
    "p_hi",
    "snapshots",
    "n_list",
    "mode",
    "out",
];

struct Entry<'a> {
    line: usize,
    value: &'a str,
}

fn parse_real(e: &Entry, key: &str) -> Result<f64, ConfigError> {
    match e.value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => cfg_err(
            Some(e.line),
            key,
            format!("expected a finite number, got `{}`", e.value),
        ),
    }
}

fn parse_positive(e: &Entry, key: &str) -> Result<f64, ConfigError> {
    let v = parse_real(e, key)?;
    if v <= 0.0 {
        return cfg_err(Some(e.line), key, format!("must be positive, got {v}"));
    }
    Ok(v)
}

fn parse_count(e: &Entry, key: &str, v: &str) -> Result<usize, ConfigError> {
    match v.trim().parse::<usize>() {
        Ok(n) if n >= 3 => Ok(n),
        Ok(n) => cfg_err(
            Some(e.line),
            key,
            format!("partition count {n} must be at least 3"),
        ),
        Err(_) => cfg_err(
            Some(e.line),
            key,
            format!("expected an integer, got `{}`", v.trim()),
        ),
    }
}

fn parse_list<T>(
    e: &Entry,
    key: &str,
    item: impl Fn(&str) -> Result<T, ConfigError>,
) -> Result<Vec<T>, ConfigError> {
    let items: Vec<&str> = e
        .value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return cfg_err(Some(e.line), key, "empty list");
    }
    items.into_iter().map(item).collect()
}

/// Parses and validates a config text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut entries: Vec<(&str, Entry)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return cfg_err(Some(line), content, "expected `key = value`");
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return cfg_err(Some(line), key, "unknown key");
        }
        if value.is_empty() {
            return cfg_err(Some(line), key, "missing value");
        }
        if let Some((_, prev)) = entries.iter().find(|(k, _)| *k == key) {
            return cfg_err(
                Some(line),
                key,
                format!("duplicate key (first set on line {})", prev.line),
            );
        }
        entries.push((key, Entry { line, value }));
    }
    let get = |key: &str| entries.iter().find(|(k, _)| *k == key).map(|(_, e)| e);

    let problem = match get("problem") {
        None => return cfg_err(None, "problem", "required"),
        Some(e) => match e.value {
            "1" => ProblemId::One,
            "2" => ProblemId::Two,
            "3" => ProblemId::Three,
            other => {
                return cfg_err(
                    Some(e.line),
                    "problem",
                    format!("expected 1, 2 or 3, got `{other}`"),
                )
            }
        },
    };
    let (mut k1, mut k2, mut k3) = match problem {
        ProblemId::One => (-2.0, 1.0, 1.0),
        ProblemId::Two => (2.0, 1.0, 0.3),
        ProblemId::Three => (2.0, 10.0, 10.0),
    };
    if let Some(e) = get("k1") {
        k1 = parse_real(e, "k1")?;
        if problem == ProblemId::Two && k1 != 2.0 {
            return cfg_err(Some(e.line), "k1", "problem 2 is defined for k1 = 2 only");
        }
    }
    if let Some(e) = get("k2") {
        k2 = parse_real(e, "k2")?;
    }
    if let Some(e) = get("k3") {
        k3 = parse_real(e, "k3")?;
    }
    if problem == ProblemId::Two {
        if let Err(err) = TravelingWaveParams::new(k2, k3) {
            let line = get("k2").or(get("k3")).map(|e| e.line);
            return cfg_err(line, "k2", err.to_string());
        }
    }

    let mode = match get("mode") {
        None => Mode::Errors,
        Some(e) => match e.value {
            "errors" => Mode::Errors,
            "maxima" => Mode::Maxima,
            "convergence" => Mode::Convergence,
            "profile" => Mode::Profile,
            other => {
                return cfg_err(
                    Some(e.line),
                    "mode",
                    format!("expected errors, maxima, convergence or profile, got `{other}`"),
                )
            }
        },
    };
    if problem == ProblemId::Three && matches!(mode, Mode::Errors | Mode::Convergence) {
        return cfg_err(
            get("mode").map(|e| e.line),
            "mode",
            "problem 3 has no exact solution",
        );
    }

    let dt = match get("dt") {
        None => return cfg_err(None, "dt", "required"),
        Some(e) => parse_positive(e, "dt")?,
    };
    let t_final = match get("tfinal") {
        None => return cfg_err(None, "tfinal", "required"),
        Some(e) => {
            let t = parse_real(e, "tfinal")?;
            if t < 0.0 || steps_for(t, dt).is_err() {
                return cfg_err(
                    Some(e.line),
                    "tfinal",
                    format!("{t} is not a non-negative multiple of dt={dt}"),
                );
            }
            t
        }
    };
    let n = match get("N") {
        Some(e) => parse_count(e, "N", e.value)?,
        None if mode == Mode::Convergence => 0,
        None => return cfg_err(None, "N", "required"),
    };
    let n_list = match get("n_list") {
        Some(e) => {
            let mut list = parse_list(e, "n_list", |v| parse_count(e, "n_list", v))?;
            list.sort_unstable();
            list.dedup();
            if list.len() < 2 {
                return cfg_err(
                    Some(e.line),
                    "n_list",
                    "need at least two distinct partition counts",
                );
            }
            list
        }
        None => vec![50, 100, 150, 200, 250],
    };

    let p_lo = get("p_lo").map(|e| parse_positive(e, "p_lo")).transpose()?;
    let p_hi = get("p_hi").map(|e| parse_positive(e, "p_hi")).transpose()?;
    let tension = match get("p") {
        Some(e) if e.value == "search" => {
            let (lo, hi) = (p_lo.unwrap_or(1e-8), p_hi.unwrap_or(10.0));
            if lo >= hi {
                return cfg_err(
                    get("p_hi").map(|e| e.line),
                    "p_hi",
                    format!("p_hi={hi} must exceed p_lo={lo}"),
                );
            }
            if mode != Mode::Errors {
                return cfg_err(
                    Some(e.line),
                    "p",
                    "tension search is only available in errors mode",
                );
            }
            Tension::Search { lo, hi }
        }
        Some(e) => Tension::Fixed(parse_positive(e, "p")?),
        None => Tension::Fixed(1.0),
    };
    if !matches!(tension, Tension::Search { .. }) {
        for key in ["p_lo", "p_hi"] {
            if let Some(e) = get(key) {
                return cfg_err(Some(e.line), key, "only meaningful with `p = search`");
            }
        }
    }

    let snapshots = match get("snapshots") {
        Some(e) => parse_list(e, "snapshots", |v| {
            let t = match v.parse::<f64>() {
                Ok(t) if t.is_finite() && t >= 0.0 => t,
                _ => return cfg_err(Some(e.line), "snapshots", format!("bad time `{v}`")),
            };
            if steps_for(t, dt).is_err() {
                return cfg_err(
                    Some(e.line),
                    "snapshots",
                    format!("{t} is not a multiple of dt={dt}"),
                );
            }
            if t > t_final * (1.0 + 1e-12) {
                return cfg_err(
                    Some(e.line),
                    "snapshots",
                    format!("{t} lies beyond tfinal={t_final}"),
                );
            }
            Ok(t)
        })?,
        None => Vec::new(),
    };

    Ok(ExperimentConfig {
        problem,
        k1,
        k2,
        k3,
        n,
        dt,
        t_final,
        tension,
        snapshots,
        n_list,
        mode,
        out: get("out").map(|e| PathBuf::from(e.value)),
    })
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("solver failure: {0}")]
    Solver(#[from] BurgersError),
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
}

impl HarnessError {
    /// 1 for invalid input, 2 for anything that fails while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            HarnessError::Solver(_) | HarnessError::Io(_) => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentOutcome {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

/// 12 significant digits in scientific notation.
pub fn fmt_sci(v: f64) -> String {
    format!("{v:.11e}")
}

fn write_csv(
    dir: &Path,
    name: &str,
    header: &str,
    rows: &[String],
    out: &mut ExperimentOutcome,
) -> io::Result<()> {
    let path = dir.join(name);
    let mut text = String::with_capacity(64 * (rows.len() + 1));
    text.push_str(header);
    text.push('\n');
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    fs::write(&path, text)?;
    out.files.push(path);
    Ok(())
}

impl ExperimentConfig {
    pub fn build_problem(&self) -> Result<ProblemSpec, BurgersError> {
        Ok(match self.problem {
            ProblemId::One => problem1_with(self.k1, self.k2, self.k3),
            ProblemId::Two => problem2(self.k2, self.k3)?,
            ProblemId::Three => problem3(self.k1, self.k2, self.k3),
        })
    }

    /// Snapshot times plus `t_final`, sorted and without duplicates.
    fn report_times(&self) -> Vec<f64> {
        let mut ts = self.snapshots.clone();
        ts.push(self.t_final);
        ts.sort_by(f64::total_cmp);
        let mut seen = HashSet::new();
        ts.retain(|t| seen.insert(steps_for(*t, self.dt).unwrap_or(usize::MAX)));
        ts
    }
}

/// Largest residual of the Problem 2 closed form on a coarse space-time grid.
fn traveling_wave_residual(cfg: &ExperimentConfig) -> Option<f64> {
    let w = TravelingWaveParams::new(cfg.k2, cfg.k3).ok()?;
    let mut worst: f64 = 0.0;
    for i in 0..=20 {
        for j in 0..=10 {
            let (ru, rv) = w.residual(i as f64 / 20.0, cfg.t_final * j as f64 / 10.0);
            worst = worst.max(ru.abs()).max(rv.abs());
        }
    }
    Some(worst)
}

/// Runs the configured experiment, writing its CSV files into `out_dir`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<ExperimentOutcome, HarnessError> {
    let problem = cfg.build_problem()?;
    fs::create_dir_all(out_dir)?;
    let mut out = ExperimentOutcome::default();
    if cfg.problem == ProblemId::Two {
        if let Some(r) = traveling_wave_residual(cfg) {
            if r > 1e-10 {
                out.warnings.push(format!(
                    "problem 2 closed form is not an exact solution for k2={}, k3={} (max PDE residual {r:.3e}); errors are measured against it",
                    cfg.k2, cfg.k3
                ));
            }
        }
    }

    match cfg.mode {
        Mode::Errors => {
            let p = match cfg.tension {
                Tension::Fixed(p) => p,
                Tension::Search { lo, hi } => {
                    let res = search_p(&problem, cfg.n, cfg.dt, cfg.t_final, lo, hi)?;
                    let mut evals = res.evaluations.clone();
                    evals.sort_by(|a, b| a.0.total_cmp(&b.0));
                    let rows: Vec<String> = evals
                        .iter()
                        .map(|(p, v)| format!("{},{}", fmt_sci(*p), fmt_sci(*v)))
                        .collect();
                    write_csv(out_dir, "search.csv", "p,linf", &rows, &mut out)?;
                    for (p, why) in &res.skipped {
                        out.warnings.push(format!("skipped p={p:e}: {why}"));
                    }
                    res.best_p
                }
            };
            let params = SplineParams::new(problem.a, problem.b, cfg.n, p)?;
            let times = cfg.report_times();
            let res = run(&problem, &params, cfg.dt, cfg.t_final, &times)?;
            let rows = res
                .snapshots
                .iter()
                .map(|st| {
                    let e = linf_error(st, &problem, &params, cfg.dt)?;
                    Ok(format!(
                        "{},{},{},{},{},{}",
                        e.n,
                        fmt_sci(e.dt),
                        fmt_sci(e.p),
                        fmt_sci(e.t),
                        fmt_sci(e.linf_u),
                        fmt_sci(e.linf_v)
                    ))
                })
                .collect::<Result<Vec<_>, BurgersError>>()?;
            write_csv(
                out_dir,
                "errors.csv",
                "N,dt,p,t,linf_u,linf_v",
                &rows,
                &mut out,
            )?;
        }
        Mode::Maxima => {
            let p = fixed_tension(cfg);
            let params = SplineParams::new(problem.a, problem.b, cfg.n, p)?;
            let times = cfg.report_times();
            let res = run(&problem, &params, cfg.dt, cfg.t_final, &times)?;
            let rows: Vec<String> = res
                .snapshots
                .iter()
                .map(|st| {
                    let m = state_maxima(st, &params);
                    format!(
                        "{},{},{},{},{}",
                        fmt_sci(m.t),
                        fmt_sci(m.max_u),
                        fmt_sci(m.x_u),
                        fmt_sci(m.max_v),
                        fmt_sci(m.x_v)
                    )
                })
                .collect();
            write_csv(
                out_dir,
                "maxima.csv",
                "t,max_u,x_u,max_v,x_v",
                &rows,
                &mut out,
            )?;
        }
        Mode::Convergence => {
            let p = fixed_tension(cfg);
            let errors = cfg
                .n_list
                .par_iter()
                .map(|&n| {
                    let params = SplineParams::new(problem.a, problem.b, n, p)?;
                    let res = run(&problem, &params, cfg.dt, cfg.t_final, &[])?;
                    Ok(linf_error(&res.final_state, &problem, &params, cfg.dt)?.linf())
                })
                .collect::<Result<Vec<f64>, BurgersError>>()?;
            let mut rows = Vec::with_capacity(errors.len());
            for (k, (&n, &e)) in cfg.n_list.iter().zip(&errors).enumerate() {
                let order = if k == 0 {
                    String::new()
                } else {
                    fmt_sci(convergence_order(errors[k - 1], e, cfg.n_list[k - 1], n)?)
                };
                rows.push(format!("{n},{},{order}", fmt_sci(e)));
            }
            write_csv(out_dir, "convergence.csv", "N,linf,order", &rows, &mut out)?;
        }
        Mode::Profile => {
            let p = fixed_tension(cfg);
            let params = SplineParams::new(problem.a, problem.b, cfg.n, p)?;
            let w = nodal_weights(&params);
            let times = cfg.report_times();
            let res = run(&problem, &params, cfg.dt, cfg.t_final, &times)?;
            for st in &res.snapshots {
                let rows: Vec<String> = params
                    .knots()
                    .iter()
                    .zip(st.nodal_u(&w))
                    .zip(st.nodal_v(&w))
                    .map(|((x, u), v)| format!("{},{},{}", fmt_sci(*x), fmt_sci(u), fmt_sci(v)))
                    .collect();
                write_csv(
                    out_dir,
                    &format!("profile_t{}.csv", st.t),
                    "x,u,v",
                    &rows,
                    &mut out,
                )?;
            }
        }
    }
    Ok(out)
}

fn fixed_tension(cfg: &ExperimentConfig) -> f64 {
    match cfg.tension {
        Tension::Fixed(p) => p,
        // parse_config only allows search in errors mode
        Tension::Search { .. } => 1.0,
    }
}

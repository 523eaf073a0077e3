//! Command-line front end: `screen`, `solve`, `path`, `compress`, `gen-data`
//! and `interval-demo`.
//!
//! Every flag can also come from a `key=value` file passed with `--config`;
//! flags on the command line win. Keys may use `-` or `_`.
//!
//! Exit codes: 0 success, 2 configuration or module error, 3 failed safety
//! audit, 4 solver did not converge.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::audit::audit_safety;
use crate::compression::{compression_curve, CompressionConfig, Method};
use crate::data::Dataset;
use crate::erm::ErmProblem;
use crate::error::{invalid, Error, Result};
use crate::io::{load_dataset, save_dataset, write_atomic, Format};
use crate::kernels::{audit_kernel, screen_kernel, GramProblem, Kernel};
use crate::losses::{LossKind, Penalty, PenaltyKind, SafeLoss, Task};
use crate::region::{build_region, init_ball, InitStrategy, Region};
use crate::report::{fmt_f64, json_f64, path_csv, screening_csv, screening_summary, summary};
use crate::screening::{ellipsoid_from_ball, safe_initial_ball, screen, screen_with_gap_ball, GapRadiusRule, ScreeningReport};
use crate::solver::{log_grid, regularization_path, solve, PathOptions, SolveResult, SolverOptions};
use crate::synthetic::{gen_interval_demo, gen_synthetic_classification, gen_synthetic_regression, Synthetic};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_UNSAFE: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "samplescreen", version, about = "Safe screening of data points in regularized ERM")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Build a region around an early iterate, screen, audit and report.
    Screen(RunArgs),
    /// Solve on the full data.
    Solve(RunArgs),
    /// Warm-started regularization path, with or without screening.
    Path(RunArgs),
    /// Compression curves: delete by ranking, refit, score on a held-out split.
    Compress(RunArgs),
    /// Write a synthetic dataset.
    GenData(RunArgs),
    /// Interval regression on a two-feature toy problem.
    IntervalDemo(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Screen(_) => "screen",
            Command::Solve(_) => "solve",
            Command::Path(_) => "path",
            Command::Compress(_) => "compress",
            Command::GenData(_) => "gen-data",
            Command::IntervalDemo(_) => "interval-demo",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Screen(a)
            | Command::Solve(a)
            | Command::Path(a)
            | Command::Compress(a)
            | Command::GenData(a)
            | Command::IntervalDemo(a) => a,
        }
    }
}

/// Flags shared by all subcommands. Unset flags take per-command defaults.
#[derive(Args, Debug, Clone, Default)]
pub struct RunArgs {
    /// File of `key=value` lines supplying any flag
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// regression | classification (default: the loss's task)
    #[arg(long)]
    pub task: Option<String>,
    /// sqdist | safelog | hinge | sqhinge | huber | square | logistic
    #[arg(long)]
    pub loss: Option<String>,
    /// l1 | l2
    #[arg(long)]
    pub penalty: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// Ellipsoid steps
    #[arg(long)]
    pub k: Option<usize>,
    /// auto | explicit | gap | level_set
    #[arg(long)]
    pub init: Option<String>,
    /// Initial radius for `--init explicit`
    #[arg(long)]
    pub radius: Option<f64>,
    /// ellipsoid | gap_ball
    #[arg(long)]
    pub region: Option<String>,
    /// sqrt | linear (gap-ball radius)
    #[arg(long)]
    pub gap_rule: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_epochs: Option<f64>,
    /// Epoch budget of the warm start that centers the region
    #[arg(long)]
    pub early_epochs: Option<f64>,
    /// Dataset file; synthetic data is generated when absent
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// libsvm | csv (default: from the extension)
    #[arg(long)]
    pub format: Option<String>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub sparsity: Option<usize>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Class separation of synthetic classification data
    #[arg(long)]
    pub separation: Option<f64>,
    #[arg(long)]
    pub lambda_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub per_decade: Option<usize>,
    #[arg(long, action = ArgAction::Set)]
    pub screening: Option<bool>,
    /// Comma-separated deletion fractions
    #[arg(long)]
    pub fractions: Option<String>,
    /// Number of train/test splits
    #[arg(long)]
    pub seeds: Option<usize>,
    /// linear | rbf | polynomial
    #[arg(long)]
    pub kernel: Option<String>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub degree: Option<u32>,
    #[arg(long)]
    pub coef: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    /// Gap ball when strongly convex, penalty level set otherwise.
    Auto,
    Explicit,
    Gap,
    LevelSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Ellipsoid,
    GapBall,
}

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub task: Task,
    pub loss: LossKind,
    pub penalty: PenaltyKind,
    pub lambda: f64,
    pub mu: f64,
    pub k: usize,
    /// Whether `k` was set explicitly (compression otherwise picks its own).
    pub k_explicit: bool,
    pub init: InitMode,
    pub radius: Option<f64>,
    pub region: RegionKind,
    pub gap_rule: GapRadiusRule,
    pub tol: f64,
    pub max_epochs: f64,
    pub early_epochs: f64,
    pub data: Option<PathBuf>,
    pub format: Option<Format>,
    pub out: PathBuf,
    pub seed: u64,
    pub n: usize,
    pub p: usize,
    pub sparsity: usize,
    pub sigma: f64,
    pub separation: f64,
    pub lambda_max: f64,
    pub points: usize,
    pub per_decade: usize,
    pub screening: bool,
    pub fractions: Vec<f64>,
    pub seeds: usize,
    pub kernel: Option<Kernel>,
}

impl RunConfig {
    /// Applies the defaults of `command` to unset flags and validates.
    pub fn resolve(command: &Command) -> Result<RunConfig> {
        let a = command.args();
        let demo = matches!(command, Command::IntervalDemo(_));

        let loss_given = a.loss.as_deref().map(LossKind::from_id).transpose()?;
        let task = match a.task.as_deref() {
            Some("regression") => Task::Regression,
            Some("classification") => Task::Classification,
            Some(other) => return Err(Error::UnknownId(other.to_string())),
            None => loss_given.map_or(Task::Regression, LossKind::task),
        };
        let loss = loss_given.unwrap_or(match task {
            Task::Regression => LossKind::SquareDistance,
            Task::Classification => LossKind::SquaredHinge,
        });
        if loss.task() != task {
            return Err(invalid("loss", format!("`{}` is not a {} loss", loss.id(), task.as_str())));
        }
        if demo && task != Task::Regression {
            return Err(invalid("task", "interval-demo is a regression problem"));
        }
        let penalty = a.penalty.as_deref().map_or(Ok(PenaltyKind::HalfSquaredL2), PenaltyKind::from_id)?;

        let sigma = a.sigma.unwrap_or(if demo { 0.1 } else { 0.01 });
        let mu = a.mu.unwrap_or(if demo { 3.0 * sigma } else { 0.1 });
        let k = a.k.unwrap_or(20);
        if k == 0 {
            return Err(invalid("k", "need at least one ellipsoid step"));
        }
        let init = match a.init.as_deref() {
            None | Some("auto") => InitMode::Auto,
            Some("explicit") => InitMode::Explicit,
            Some("gap") => InitMode::Gap,
            Some("level_set") | Some("level-set") => InitMode::LevelSet,
            Some(other) => return Err(Error::UnknownId(other.to_string())),
        };
        if init == InitMode::Explicit && a.radius.is_none() {
            return Err(invalid("radius", "`--init explicit` needs `--radius`"));
        }
        let region = match a.region.as_deref() {
            None | Some("ellipsoid") => RegionKind::Ellipsoid,
            Some("gap_ball") | Some("gap-ball") => RegionKind::GapBall,
            Some(other) => return Err(Error::UnknownId(other.to_string())),
        };
        let gap_rule = match a.gap_rule.as_deref() {
            None | Some("sqrt") => GapRadiusRule::Sqrt,
            Some("linear") => GapRadiusRule::Linear,
            Some(other) => return Err(Error::UnknownId(other.to_string())),
        };
        let format = a.format.as_deref().map(str::parse).transpose()?;
        let p = a.p.unwrap_or(if demo { 2 } else { 10 });
        if demo && p != 2 {
            return Err(invalid("p", "interval-demo has two features"));
        }
        let kernel = match a.kernel.as_deref() {
            None => None,
            Some("linear") => Some(Kernel::Linear),
            Some("rbf") => Some(Kernel::Rbf { gamma: a.gamma.unwrap_or(1.0) }),
            Some("polynomial") => Some(Kernel::Polynomial {
                degree: a.degree.unwrap_or(2),
                coef: a.coef.unwrap_or(1.0),
            }),
            Some(other) => return Err(Error::UnknownId(other.to_string())),
        };
        if let Some(kern) = kernel {
            kern.validate()?;
            if penalty != PenaltyKind::HalfSquaredL2 {
                return Err(invalid("penalty", "kernel problems use the RKHS norm (l2)"));
            }
        }

        let cfg = RunConfig {
            task,
            loss,
            penalty,
            lambda: a.lambda.unwrap_or(if demo { 0.003 } else { 0.01 }),
            mu,
            k,
            k_explicit: a.k.is_some(),
            init,
            radius: a.radius,
            region,
            gap_rule,
            tol: a.tol.unwrap_or(1e-8),
            max_epochs: a.max_epochs.unwrap_or(10_000.0),
            early_epochs: a.early_epochs.unwrap_or(if demo { 20.0 } else { 2.0 }),
            data: a.data.clone(),
            format,
            out: a.out.clone().unwrap_or_else(|| PathBuf::from("out")),
            seed: a.seed.unwrap_or(0),
            n: a.n.unwrap_or(if demo { 20 } else { 100 }),
            p,
            sparsity: a.sparsity.unwrap_or(p.min(5)),
            sigma,
            separation: a.separation.unwrap_or(2.0),
            lambda_max: a.lambda_max.unwrap_or(1.0),
            points: a.points.unwrap_or(20),
            per_decade: a.per_decade.unwrap_or(10),
            screening: a.screening.unwrap_or(true),
            fractions: match &a.fractions {
                Some(list) => parse_list(list)?,
                None => (0..=9).map(|i| i as f64 / 10.0).collect(),
            },
            seeds: a.seeds.unwrap_or(5),
            kernel,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        // surfaces μ and λ errors before any data is touched
        self.safe_loss()?;
        self.penalty()?;
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be positive, got {v}")))
            }
        };
        positive("tol", self.tol)?;
        positive("max_epochs", self.max_epochs)?;
        positive("early_epochs", self.early_epochs)?;
        positive("lambda_max", self.lambda_max)?;
        if let Some(r) = self.radius {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(invalid("radius", "must be finite and nonnegative"));
            }
        }
        if self.n == 0 || self.p == 0 {
            return Err(invalid("n", "synthetic sizes must be positive"));
        }
        if self.points == 0 || self.per_decade == 0 {
            return Err(invalid("points", "path grid needs points and per_decade >= 1"));
        }
        Ok(())
    }

    pub fn safe_loss(&self) -> Result<SafeLoss> {
        SafeLoss::new(self.loss, self.mu)
    }

    pub fn penalty(&self) -> Result<Penalty> {
        Penalty::new(self.penalty, self.lambda)
    }

    pub fn solver(&self) -> SolverOptions {
        SolverOptions::new(self.tol, self.max_epochs)
    }

    fn early(&self) -> SolverOptions {
        SolverOptions::new(self.tol, self.early_epochs)
    }

    /// Reads `--data`, or generates synthetic data from the seed.
    pub fn dataset(&self) -> Result<Synthetic> {
        if let Some(path) = &self.data {
            let format = self.format.unwrap_or_else(|| Format::from_path(path));
            return Ok(Synthetic {
                data: load_dataset(path, format, self.task)?,
                truth: Vec::new(),
            });
        }
        match self.task {
            Task::Regression => gen_synthetic_regression(self.n, self.p, self.sparsity, self.sigma, self.seed),
            Task::Classification => gen_synthetic_classification(self.n, self.p, self.separation, self.seed),
        }
    }

    pub fn problem(&self, ds: Dataset) -> Result<ErmProblem> {
        ErmProblem::new(ds, self.safe_loss()?, self.penalty()?)
    }
}

fn parse_list(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| invalid("fractions", format!("bad number `{t}`")))
        })
        .collect()
}

/// Outcome of a subcommand: the summary written to `summary.json` and the
/// exit code.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub summary: Value,
    pub code: i32,
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Diagnostics go to stderr; the summary is printed to stdout.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(out) => {
            // a closed pipe is not an error of the run
            let text = serde_json::to_string_pretty(&out.summary).expect("json value");
            let _ = writeln!(std::io::stdout(), "{text}");
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

/// Replaces `--config FILE` by the flags it lists, placed before the
/// command-line flags so that the latter take precedence.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.to_string_lossy().starts_with("--config=")) else {
        return Ok(args);
    };
    let flag = args[pos].to_string_lossy().into_owned();
    let (path, consumed) = match flag.strip_prefix("--config=") {
        Some(p) => (PathBuf::from(p), 1),
        None => match args.get(pos + 1) {
            Some(p) => (PathBuf::from(p), 2),
            None => return Err(invalid("config", "missing file name")),
        },
    };
    let from_file = config_flags(&fs::read_to_string(&path)?)?;
    // program and subcommand stay in front
    let split = 2.min(args.len());
    let mut out: Vec<OsString> = args[..split].to_vec();
    out.extend(from_file.into_iter().map(OsString::from));
    for (i, a) in args.iter().enumerate().skip(split) {
        if i < pos || i >= pos + consumed {
            out.push(a.clone());
        }
    }
    Ok(out)
}

/// `key = value` lines to `--key value` flags. Blank lines and `#` comments
/// are skipped.
pub fn config_flags(text: &str) -> Result<Vec<String>> {
    let mut flags = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: k + 1,
            reason: format!("expected key=value, got `{line}`"),
        })?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(Error::Parse {
                line: k + 1,
                reason: format!("invalid key `{key}`"),
            });
        }
        flags.push(format!("--{key}"));
        flags.push(value.trim().to_string());
    }
    Ok(flags)
}

/// Runs a parsed command and writes its artifacts under `out`.
pub fn execute(command: &Command) -> Result<Outcome> {
    let cfg = RunConfig::resolve(command)?;
    let out = match command {
        Command::Screen(_) => {
            let data = cfg.dataset()?.data;
            match cfg.kernel {
                Some(kernel) => run_kernel_screen(&cfg, &data, kernel)?,
                None => run_screen(&cfg, data, "screen")?,
            }
        }
        Command::IntervalDemo(_) => {
            let data = gen_interval_demo(cfg.n, cfg.sigma, cfg.seed)?.data;
            save_dataset(&data, &cfg.out.join("data.csv"), Format::Csv)?;
            run_screen(&cfg, data, "interval-demo")?
        }
        Command::Solve(_) => run_solve(&cfg)?,
        Command::Path(_) => run_path(&cfg)?,
        Command::Compress(_) => run_compress(&cfg)?,
        Command::GenData(_) => run_gen_data(&cfg)?,
    };
    write_json(&cfg.out.join("summary.json"), &out.summary)?;
    Ok(out)
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn config_json(cfg: &RunConfig) -> Result<Value> {
    Ok(serde_json::to_value(cfg)?)
}

fn solve_json(r: &SolveResult) -> Value {
    json!({
        "primal": json_f64(r.primal),
        "gap": json_f64(r.gap),
        "iterations": r.iterations,
        "epochs": json_f64(r.epochs),
        "converged": r.converged,
    })
}

fn vector_csv(x: &[f64]) -> String {
    let mut out = String::from("index,value\n");
    for (i, v) in x.iter().enumerate() {
        out.push_str(&format!("{i},{}\n", fmt_f64(*v)));
    }
    out
}

fn linear_region(cfg: &RunConfig, prob: &ErmProblem, x0: &[f64]) -> Result<Region> {
    if cfg.region == RegionKind::GapBall {
        return Ok(screen_with_gap_ball(prob, x0, cfg.gap_rule)?.1);
    }
    let ball = match cfg.init {
        InitMode::Auto => safe_initial_ball(prob, x0)?,
        InitMode::Explicit => init_ball(
            x0,
            InitStrategy::ExplicitRadius {
                radius: cfg.radius.expect("checked in resolve"),
            },
        )?,
        InitMode::Gap => init_ball(
            x0,
            InitStrategy::Gap {
                gap: prob.duality_gap(x0)?,
                kappa: prob.kappa(),
            },
        )?,
        InitMode::LevelSet => init_ball(
            x0,
            InitStrategy::PenaltyLevelSet {
                objective: prob.primal(x0)?,
                penalty: *prob.penalty(),
            },
        )?,
    };
    ellipsoid_from_ball(prob, &ball, cfg.k)
}

fn finish_screen(
    cfg: &RunConfig,
    command: &str,
    report: &ScreeningReport,
    region: &Region,
    reference: &SolveResult,
) -> Result<Outcome> {
    write_atomic(&cfg.out.join("screening.csv"), screening_csv(report).as_bytes())?;
    write_atomic(&cfg.out.join("region.json"), region.to_json()?.as_bytes())?;
    let audit_ok = report.audit.as_ref().is_some_and(|a| a.passed());
    let code = if !reference.converged {
        EXIT_NOT_CONVERGED
    } else if !audit_ok {
        EXIT_UNSAFE
    } else {
        EXIT_OK
    };
    let body = json!({
        "config": config_json(cfg)?,
        "screening": screening_summary(report),
        "reference": solve_json(reference),
        "exit_code": code,
    });
    Ok(Outcome {
        summary: summary(command, body),
        code,
    })
}

fn run_screen(cfg: &RunConfig, data: Dataset, command: &str) -> Result<Outcome> {
    let prob = cfg.problem(data)?;
    let x0 = solve(&prob, &vec![0.0; prob.p()], &cfg.early())?.x;
    let region = linear_region(cfg, &prob, &x0)?;
    let mut report = screen(&prob, &region)?;
    let reference = solve(&prob, &x0, &cfg.solver())?;
    report.audit = Some(audit_safety(&prob, &report.screened, &reference.x, &region, &cfg.solver())?);
    finish_screen(cfg, command, &report, &region, &reference)
}

/// Kernel problems are not strongly convex in the coefficients, so the
/// initial ball must be given explicitly.
fn run_kernel_screen(cfg: &RunConfig, data: &Dataset, kernel: Kernel) -> Result<Outcome> {
    let radius = match (cfg.init, cfg.radius) {
        (InitMode::Explicit, Some(r)) => r,
        _ => return Err(invalid("init", "kernel screening needs `--init explicit --radius R`")),
    };
    if cfg.region != RegionKind::Ellipsoid {
        return Err(invalid("region", "kernel screening uses the ellipsoid region"));
    }
    let prob = GramProblem::from_dataset(data, kernel, cfg.safe_loss()?, cfg.lambda)?;
    let zero = vec![0.0; prob.n()];
    let x0 = solve(&prob, &zero, &cfg.early())?.x;
    let region = build_region(&prob, &x0, radius, cfg.k)?.region;
    let mut report = screen_kernel(&prob, &region)?;
    let reference = solve(&prob, &x0, &cfg.solver())?;
    report.audit = Some(audit_kernel(&prob, &report.screened, &reference.x, &region, &cfg.solver())?);
    finish_screen(cfg, "screen", &report, &region, &reference)
}

fn run_solve(cfg: &RunConfig) -> Result<Outcome> {
    let data = cfg.dataset()?.data;
    let result = match cfg.kernel {
        Some(kernel) => {
            let prob = GramProblem::from_dataset(&data, kernel, cfg.safe_loss()?, cfg.lambda)?;
            solve(&prob, &vec![0.0; prob.n()], &cfg.solver())?
        }
        None => {
            let prob = cfg.problem(data)?;
            solve(&prob, &vec![0.0; prob.p()], &cfg.solver())?
        }
    };
    write_atomic(&cfg.out.join("solution.csv"), vector_csv(&result.x).as_bytes())?;
    let code = if result.converged { EXIT_OK } else { EXIT_NOT_CONVERGED };
    let body = json!({
        "config": config_json(cfg)?,
        "solution": solve_json(&result),
        "exit_code": code,
    });
    Ok(Outcome {
        summary: summary("solve", body),
        code,
    })
}

fn run_path(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.kernel.is_some() {
        return Err(invalid("kernel", "path runs on linear models only"));
    }
    let prob = cfg.problem(cfg.dataset()?.data)?;
    let grid = log_grid(cfg.lambda_max, cfg.points, cfg.per_decade);
    let opts = PathOptions {
        screening: cfg.screening,
        steps: cfg.k,
        solver: cfg.solver(),
    };
    let path = regularization_path(&prob, &grid, &opts)?;
    write_atomic(&cfg.out.join("path.csv"), path_csv(&path).as_bytes())?;
    let errors: Vec<Value> = path
        .points
        .iter()
        .filter_map(|p| p.error.as_ref().map(|e| json!({"lambda": p.lambda, "error": e})))
        .collect();
    let code = if !errors.is_empty() {
        for e in &errors {
            eprintln!("error at lambda {}: {}", e["lambda"], e["error"]);
        }
        EXIT_CONFIG
    } else if path.points.iter().any(|p| !p.result.converged) {
        EXIT_NOT_CONVERGED
    } else {
        EXIT_OK
    };
    let body = json!({
        "config": config_json(cfg)?,
        "total_epochs": json_f64(path.total_epochs()),
        "points": path.points.len(),
        "errors": errors,
        "exit_code": code,
    });
    Ok(Outcome {
        summary: summary("path", body),
        code,
    })
}

fn run_compress(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.kernel.is_some() {
        return Err(invalid("kernel", "compress runs on linear models only"));
    }
    let prob = cfg.problem(cfg.dataset()?.data)?;
    let ccfg = CompressionConfig {
        fractions: cfg.fractions.clone(),
        methods: Method::ALL.to_vec(),
        seeds: (0..cfg.seeds as u64).map(|s| cfg.seed.wrapping_add(s)).collect(),
        steps: cfg.k_explicit.then_some(cfg.k),
        early_epochs: cfg.early_epochs,
        solver: cfg.solver(),
        ..CompressionConfig::default()
    };
    let curve = compression_curve(&prob, &ccfg)?;
    write_atomic(&cfg.out.join("compression.csv"), curve.to_csv().as_bytes())?;
    for w in &curve.warnings {
        eprintln!("warning: {w}");
    }
    let body = json!({
        "config": config_json(cfg)?,
        "compression": serde_json::to_value(&ccfg)?,
        "metric": curve.metric,
        "warnings": curve.warnings,
        "exit_code": EXIT_OK,
    });
    Ok(Outcome {
        summary: summary("compress", body),
        code: EXIT_OK,
    })
}

fn run_gen_data(cfg: &RunConfig) -> Result<Outcome> {
    let synth = cfg.dataset()?;
    let format = cfg.format.unwrap_or(Format::Libsvm);
    let file = match format {
        Format::Libsvm => "data.libsvm",
        Format::Csv => "data.csv",
    };
    save_dataset(&synth.data, &cfg.out.join(file), format)?;
    write_atomic(&cfg.out.join("truth.csv"), vector_csv(&synth.truth).as_bytes())?;
    let body = json!({
        "config": config_json(cfg)?,
        "file": file,
        "n": synth.data.n(),
        "p": synth.data.p(),
        "exit_code": EXIT_OK,
    });
    Ok(Outcome {
        summary: summary("gen-data", body),
        code: EXIT_OK,
    })
}

//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when `verify` exceeds its tolerance, 2 for
//! usage errors, unreadable files and shape mismatches.

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::construct::{bounds, compile_theorem2, fixed_output_hidden_units, trainable_output_hidden_units, ScalingConfig};
use crate::error::{Error, Result};
use crate::eval::{full_kernel, Evaluator};
use crate::fit::{fit, FitConfig};
use crate::harness::{
    alpha_sweep, pairing_probe, reports_to_csv, sample_kernel, summarize, tightness_csv, tightness_table, verify,
    ProbeConfig, RunTag, SweepConfig, Construction,
};
use crate::io::{kernel_to_json, load_kernel, load_params, params_to_json, save_json, write_text};
use crate::model::DEFAULT_ETA;

#[derive(Debug, Parser)]
#[command(name = "skn", version, about = "Compile, evaluate and fit binary stochastic feedforward networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a random target kernel with flat-Dirichlet rows.
    Sample(SampleArgs),
    /// Compile weights that approximate a target kernel.
    Compile(CompileArgs),
    /// Evaluate the exact kernel of a network.
    Eval(EvalArgs),
    /// Compare a network with a target; exits 1 above the tolerance.
    Verify(VerifyArgs),
    /// Recompile and verify a target at several sharpness values.
    Sweep(SweepArgs),
    /// Fit a network to a target by exact gradient descent.
    Fit(FitArgs),
    /// Print hidden-unit bounds for a shape.
    Bounds(BoundsArgs),
    /// Measure the pairing residual of the trainable-output compile.
    Probe(ProbeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaArg {
    Auto,
    Fixed(f64),
}

impl FromStr for AlphaArg {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(AlphaArg::Auto);
        }
        match s.parse::<f64>() {
            Ok(a) if a.is_finite() && a > 0.0 => Ok(AlphaArg::Fixed(a)),
            _ => Err(format!("expected a positive number or `auto`, got `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvaluatorArg {
    Naive,
    Blockwise,
}

impl From<EvaluatorArg> for Evaluator {
    fn from(e: EvaluatorArg) -> Self {
        match e {
            EvaluatorArg::Naive => Evaluator::Naive,
            EvaluatorArg::Blockwise => Evaluator::Blockwise,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Tv,
    Kl,
}

fn parse_construction(s: &str) -> std::result::Result<Construction, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, env = "SKN_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Probability floor; 0 leaves rows unclamped.
    #[arg(long, default_value_t = DEFAULT_ETA)]
    pub eta: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long, value_parser = parse_construction, default_value = "1")]
    pub theorem: Construction,
    /// Sharpness, or `auto` to derive it from `--eps-target`.
    #[arg(long, default_value = "40")]
    pub alpha: AlphaArg,
    #[arg(long, default_value_t = DEFAULT_ETA)]
    pub eta: f64,
    /// Leakage budget used by `--alpha auto`.
    #[arg(long, default_value_t = 1e-9)]
    pub eps_target: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write the residual report of `--theorem 2`.
    #[arg(long)]
    pub residual: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long, value_enum, default_value_t = EvaluatorArg::Naive)]
    pub evaluator: EvaluatorArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long, value_enum, default_value_t = EvaluatorArg::Naive)]
    pub evaluator: EvaluatorArg,
    /// Distance compared with `--tol`.
    #[arg(long, value_enum, default_value_t = Metric::Tv)]
    pub metric: Metric,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Recorded in the report only.
    #[arg(long, env = "SKN_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Recorded in the report only.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Per-input CSV report.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "5,10,20,40")]
    pub alphas: Vec<f64>,
    #[arg(long, value_parser = parse_construction, default_value = "1")]
    pub theorem: Construction,
    #[arg(long, default_value_t = DEFAULT_ETA)]
    pub eta: f64,
    #[arg(long, value_enum, default_value_t = EvaluatorArg::Naive)]
    pub evaluator: EvaluatorArg,
    #[arg(long, env = "SKN_SEED", default_value_t = 0)]
    pub seed: u64,
    /// One CSV row per sharpness value.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-input CSV report.
    #[arg(long)]
    pub detail: Option<PathBuf>,
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long)]
    pub m: usize,
    #[arg(long, env = "SKN_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    #[arg(long, default_value_t = 5000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 0.5)]
    pub step: f64,
    #[arg(long, default_value_t = 0.5)]
    pub init_scale: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Objective per iteration, one value per line.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, required_unless_present = "table")]
    pub k: Option<usize>,
    #[arg(long, required_unless_present = "table")]
    pub n: Option<usize>,
    /// Print the table for every k, n ≤ 4 as CSV instead.
    #[arg(long)]
    pub table: bool,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, env = "SKN_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub trials: u64,
    #[arg(long, default_value_t = 40.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_ETA)]
    pub eta: f64,
    /// Descent iterations per compiled network; 0 skips refinement.
    #[arg(long, default_value_t = 50)]
    pub refine_iterations: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn emit(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_text(p, text),
        None => Ok(writeln!(out, "{}", text.trim_end())?),
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Sample(a) => {
            let kernel = sample_kernel(a.k, a.n, a.seed, a.eta)?;
            emit(out, a.out.as_ref(), &kernel_to_json(&kernel)?)?;
        }
        Command::Compile(a) => cmd_compile(a, out)?,
        Command::Eval(a) => {
            let net = load_params(&a.params)?;
            let kernel = full_kernel(&net, a.evaluator.into())?;
            emit(out, a.out.as_ref(), &kernel_to_json(&kernel)?)?;
        }
        Command::Verify(a) => return cmd_verify(a, out),
        Command::Sweep(a) => cmd_sweep(a, out)?,
        Command::Fit(a) => cmd_fit(a, out)?,
        Command::Bounds(a) => cmd_bounds(a, out)?,
        Command::Probe(a) => {
            let cfg = ProbeConfig {
                scaling: ScalingConfig { alpha: a.alpha, eta: a.eta, ..ScalingConfig::default() },
                refine: (a.refine_iterations > 0).then(|| FitConfig {
                    iterations: a.refine_iterations,
                    restarts: 1,
                    ..FitConfig::default()
                }),
            };
            let report = pairing_probe(a.k, a.n, a.seed, a.trials, &cfg)?;
            emit(out, a.out.as_ref(), &serde_json::to_string_pretty(&report)?)?;
        }
    }
    Ok(0)
}

fn cmd_compile(a: CompileArgs, out: &mut dyn Write) -> Result<()> {
    let target = load_kernel(&a.target)?;
    let (k, n) = (target.k(), target.n());
    let m = match a.theorem {
        Construction::Fixed => fixed_output_hidden_units(k, n),
        Construction::Trainable if n >= 2 => trainable_output_hidden_units(k, n),
        Construction::Trainable => return Err(Error::InvalidShape("the trainable-output compile needs n >= 2".into())),
    } as usize;
    let alpha = match a.alpha {
        AlphaArg::Fixed(alpha) => alpha,
        AlphaArg::Auto => ScalingConfig::auto_alpha(a.eta, m, n, a.eps_target),
    };
    let cfg = ScalingConfig { alpha, eta: a.eta, ..ScalingConfig::default() };
    let net = match a.theorem {
        Construction::Fixed => a.theorem.compile(&target, &cfg)?,
        Construction::Trainable => {
            let (net, residual) = compile_theorem2(&target, &cfg)?;
            match &a.residual {
                Some(path) => save_json(path, &residual)?,
                None => writeln!(out, "residual = {}", serde_json::to_string(&residual)?)?,
            }
            net
        }
    };
    writeln!(out, "m = {}", net.m())?;
    writeln!(out, "alpha = {alpha}")?;
    if k >= 1 {
        writeln!(out, "bounds = {}", serde_json::to_string(&bounds(k, n)?)?)?;
    }
    emit(out, a.out.as_ref(), &params_to_json(&net)?)
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let net = load_params(&a.params)?;
    let target = load_kernel(&a.target)?;
    let report = verify(&target, &net, a.evaluator.into(), RunTag { seed: a.seed, alpha: a.alpha })?;
    if let Some(path) = &a.out {
        write_text(path, &reports_to_csv(std::slice::from_ref(&report)))?;
    }
    if let Some(path) = &a.summary {
        save_json(path, &summarize(std::slice::from_ref(&report)))?;
    }
    let value = match a.metric {
        Metric::Tv => report.max_tv,
        Metric::Kl => report.max_kl(),
    };
    writeln!(out, "max_tv = {:.16e}", report.max_tv)?;
    writeln!(out, "max_kl = {:.16e}", report.max_kl())?;
    let pass = value <= a.tol;
    writeln!(out, "{} (tol = {:e})", if pass { "PASS" } else { "FAIL" }, a.tol)?;
    Ok(if pass { 0 } else { 1 })
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> Result<()> {
    let target = load_kernel(&a.target)?;
    let cfg = SweepConfig {
        theorem: a.theorem,
        scaling: ScalingConfig { eta: a.eta, ..ScalingConfig::default() },
        evaluator: a.evaluator.into(),
        seed: a.seed,
    };
    let reports = alpha_sweep(&target, &a.alphas, &cfg)?;
    let mut table = String::from("seed,k,n,m,alpha,max_tv,mean_tv,max_kl\n");
    for r in &reports {
        table.push_str(&format!(
            "{},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.seed,
            r.k,
            r.n,
            r.m,
            r.alpha,
            r.max_tv,
            r.mean_tv(),
            r.max_kl()
        ));
    }
    if let Some(path) = &a.detail {
        write_text(path, &reports_to_csv(&reports))?;
    }
    if let Some(path) = &a.summary {
        save_json(path, &summarize(&reports))?;
    }
    emit(out, a.out.as_ref(), &table)
}

fn cmd_fit(a: FitArgs, out: &mut dyn Write) -> Result<()> {
    let target = load_kernel(&a.target)?;
    let cfg = FitConfig {
        initial_step: a.step,
        iterations: a.iterations,
        restarts: a.restarts,
        init_scale: a.init_scale,
        seed: a.seed,
        ..FitConfig::default()
    };
    let result = fit(&target, a.m, &cfg)?;
    if let Some(path) = &a.trace {
        let text: String = result.trace.iter().map(|v| format!("{v:.16e}\n")).collect();
        write_text(path, &text)?;
    }
    let realized = full_kernel(&result.params, Evaluator::Naive)?;
    writeln!(out, "objective = {:.16e}", result.objective)?;
    writeln!(out, "max_tv = {:.16e}", realized.max_row_tv(&target)?)?;
    writeln!(out, "restart = {}", result.restart)?;
    emit(out, a.out.as_ref(), &params_to_json(&result.params)?)
}

fn cmd_bounds(a: BoundsArgs, out: &mut dyn Write) -> Result<()> {
    if a.table {
        write!(out, "{}", tightness_csv(&tightness_table()))?;
        return Ok(());
    }
    let (k, n) = (a.k.unwrap_or(0), a.n.unwrap_or(0));
    let b = bounds(k, n)?;
    writeln!(out, "lower_fixed = {}", b.lower_fixed)?;
    writeln!(out, "upper_fixed = {}", b.upper_fixed)?;
    writeln!(out, "lower_free = {}", b.lower_free)?;
    match b.upper_free {
        Some(u) => writeln!(out, "upper_free = {u}")?,
        None => writeln!(out, "upper_free = undefined")?,
    }
    Ok(())
}

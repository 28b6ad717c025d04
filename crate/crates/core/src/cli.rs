//! The `teleport-sim` command line: `run`, `sweep` and `verify`.
//!
//! Exit codes are a stable contract: 0 success, 1 a verification check
//! failed, 2 usage or configuration error.

use crate::analysis::{
    analytic_success, conclusive_within_subspace, expected_outcome_probs, monte_carlo, sweep_alpha, InputSpec, SweepRow,
    TrialSummary,
};
use crate::protocols::{ChannelSpec, InputQubit, OutcomeLabel, Protocol};
use crate::verify::{run_checks, Check, VerifyConfig, MONTE_CARLO_SIGMAS};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_ALPHA_SQ: f64 = 0.8;
pub const QUICK_TRIALS: u64 = 10_000;
pub const DEFAULT_GRID_STEPS: usize = 6;

/// Explicit inputs may be off unit norm by this much and get renormalized.
pub const INPUT_RENORM_TOL: f64 = 1e-6;

/// Header of the sweep CSV.
pub const SWEEP_COLUMNS: [&str; 7] = [
    "alpha_sq",
    "beta_sq",
    "analytic_success",
    "empirical_success",
    "std_err",
    "conclusive_within_subspace",
    "mean_success_fidelity",
];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] crate::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Run,
    Sweep,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
enum ProtocolArg {
    QubitAssisted,
    Bbcjpw,
    MorHorodecki,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::QubitAssisted => Protocol::QubitAssisted,
            ProtocolArg::Bbcjpw => Protocol::Bbcjpw,
            ProtocolArg::MorHorodecki => Protocol::MorHorodecki,
        }
    }
}

/// Fully resolved configuration of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub protocol: Protocol,
    pub alpha_sq: f64,
    pub input: InputSpec,
    pub trials: u64,
    pub seed: u64,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub grid: Option<Vec<f64>>,
    pub quick: bool,
    pub timestamps: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Run,
            protocol: Protocol::QubitAssisted,
            alpha_sq: DEFAULT_ALPHA_SQ,
            input: InputSpec::Haar,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            output_format: OutputFormat::Text,
            output_path: None,
            grid: None,
            quick: false,
            timestamps: false,
        }
    }
}

impl RunConfig {
    pub fn channel(&self) -> Result<ChannelSpec, CliError> {
        Ok(ChannelSpec::from_alpha_sq(self.alpha_sq)?)
    }

    fn validate(&self) -> Result<(), CliError> {
        self.channel()?;
        if self.trials == 0 {
            return Err(crate::Error::NoTrials.into());
        }
        if let Some(grid) = &self.grid {
            if grid.is_empty() {
                return Err(CliError::Usage("grid is empty".into()));
            }
            for &x in grid {
                ChannelSpec::from_alpha_sq(x)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(name = "teleport-sim", version, about = "Simulate and verify qubit-assisted conclusive teleportation")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Run one protocol many times and compare with closed forms.
    Run(CommonArgs),
    /// Sweep α² and tabulate success probabilities.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated α² values.
        #[arg(long, value_delimiter = ',', conflicts_with = "grid_steps")]
        grid: Option<Vec<f64>>,
        /// Evenly spaced α² values from 0.5 to 1.
        #[arg(long)]
        grid_steps: Option<usize>,
    },
    /// Run the full acceptance check list.
    Verify(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    #[arg(long, value_enum, default_value = "qubit-assisted")]
    protocol: ProtocolArg,
    #[arg(long, default_value_t = DEFAULT_ALPHA_SQ, allow_negative_numbers = true)]
    alpha_sq: f64,
    /// Input qubit as re_a,im_a,re_b,im_b.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "haar")]
    input: Option<Vec<f64>>,
    /// Draw a Haar-random input per trial (the default).
    #[arg(long)]
    haar: bool,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use 10⁴ trials; statistical gates widen accordingly.
    #[arg(long)]
    quick: bool,
    /// Add a generation timestamp to text reports.
    #[arg(long)]
    timestamps: bool,
}

/// Parse `re_a, im_a, re_b, im_b`, renormalizing small drift.
/// Returns the input and whether it was renormalized.
pub fn parse_input(parts: &[f64]) -> Result<(InputQubit, bool), CliError> {
    let [ra, ia, rb, ib] = parts else {
        return Err(CliError::Usage("--input takes exactly four numbers".into()));
    };
    let (a, b) = (Complex64::new(*ra, *ia), Complex64::new(*rb, *ib));
    let norm_sq = a.norm_sqr() + b.norm_sqr();
    if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > INPUT_RENORM_TOL {
        return Err(crate::Error::InvalidInput(format!("|a|^2 + |b|^2 = {norm_sq}, must be 1 within {INPUT_RENORM_TOL:e}")).into());
    }
    let n = norm_sq.sqrt();
    let renormalized = (norm_sq - 1.0).abs() > crate::statevec::EXACT_TOL;
    Ok((InputQubit::new(a / n, b / n)?, renormalized))
}

fn grid_from_steps(steps: usize) -> Result<Vec<f64>, CliError> {
    match steps {
        0 => Err(CliError::Usage("--grid-steps must be at least 1".into())),
        1 => Ok(vec![0.5]),
        n => Ok((0..n).map(|i| if i + 1 == n { 1.0 } else { 0.5 + 0.5 * i as f64 / (n - 1) as f64 }).collect()),
    }
}

/// Parse a command line into a validated [`RunConfig`]. Warnings (such as
/// a renormalized input) are returned alongside.
fn resolve(cli: Cli) -> Result<(RunConfig, Vec<String>), CliError> {
    let (command, common, grid) = match cli.command {
        Sub::Run(common) => (Command::Run, common, None),
        Sub::Sweep { common, grid, grid_steps } => {
            let grid = match (grid, grid_steps) {
                (Some(g), _) => g,
                (None, Some(steps)) => grid_from_steps(steps)?,
                (None, None) => grid_from_steps(DEFAULT_GRID_STEPS)?,
            };
            (Command::Sweep, common, Some(grid))
        }
        Sub::Verify(common) => (Command::Verify, common, None),
    };
    let mut warnings = Vec::new();
    let input = match common.input {
        Some(parts) => {
            let (q, renormalized) = parse_input(&parts)?;
            if renormalized {
                warnings.push(format!("warning: input renormalized to a = {}, b = {}", q.a, q.b));
            }
            InputSpec::Explicit(q)
        }
        None => InputSpec::Haar,
    };
    let config = RunConfig {
        command,
        protocol: common.protocol.into(),
        alpha_sq: common.alpha_sq,
        input,
        trials: match (common.quick, command) {
            (true, Command::Verify) => VerifyConfig { seed: common.seed, quick: true }.success_trials(),
            (true, _) => QUICK_TRIALS,
            (false, Command::Verify) => VerifyConfig { seed: common.seed, quick: false }.success_trials(),
            (false, _) => common.trials,
        },
        seed: common.seed,
        output_format: common.format,
        output_path: common.out,
        grid,
        quick: common.quick,
        timestamps: common.timestamps,
    };
    config.validate()?;
    Ok((config, warnings))
}

/// Closed-form side of a run report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSection {
    pub success: f64,
    pub conclusive_within_subspace: f64,
    pub per_outcome: BTreeMap<OutcomeLabel, f64>,
}

/// Everything a command produces. JSON output is exactly this structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub analytic: Option<AnalyticSection>,
    pub empirical: Option<TrialSummary>,
    pub sweep: Option<Vec<SweepRow>>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        match self.config.command {
            Command::Verify if !self.all_passed() => EXIT_CHECK_FAILED,
            _ => EXIT_OK,
        }
    }
}

fn run_checks_for(summary: &TrialSummary, analytic_p: f64) -> Vec<Check> {
    let sigma = (analytic_p * (1.0 - analytic_p) / summary.n_trials as f64).max(0.0).sqrt();
    let deviation = (summary.success_rate - analytic_p).abs();
    let fidelity_gap = summary.min_success_fidelity.map_or(0.0, |f| 1.0 - f);
    vec![
        Check {
            id: 1,
            name: "empirical success within 4σ of analytic".into(),
            passed: deviation <= MONTE_CARLO_SIGMAS * sigma + 1e-12,
            measured: deviation,
            threshold: MONTE_CARLO_SIGMAS * sigma,
            detail: String::new(),
        },
        Check {
            id: 2,
            name: "every successful trial has fidelity 1".into(),
            passed: fidelity_gap <= crate::verify::FIDELITY,
            measured: fidelity_gap,
            threshold: crate::verify::FIDELITY,
            detail: String::new(),
        },
    ]
}

pub fn cmd_run(config: &RunConfig) -> Result<Report, CliError> {
    config.validate()?;
    let channel = config.channel()?;
    let summary = monte_carlo(config.protocol, &channel, config.input, config.trials, config.seed)?;
    let analytic = AnalyticSection {
        success: analytic_success(config.protocol, &channel),
        conclusive_within_subspace: conclusive_within_subspace(&channel),
        per_outcome: expected_outcome_probs(config.protocol, &channel, config.input),
    };
    let checks = run_checks_for(&summary, analytic.success);
    Ok(Report { config: config.clone(), analytic: Some(analytic), empirical: Some(summary), sweep: None, checks })
}

pub fn cmd_sweep(config: &RunConfig) -> Result<Report, CliError> {
    config.validate()?;
    let grid = config.grid.clone().unwrap_or(grid_from_steps(DEFAULT_GRID_STEPS)?);
    let rows = sweep_alpha(&grid, config.protocol, config.input, config.trials, config.seed)?;
    let worst = rows
        .iter()
        .map(|r| if r.std_err > 0.0 { (r.empirical_success - r.analytic_success).abs() / r.std_err } else { 0.0 })
        .fold(0.0, f64::max);
    let checks = vec![Check {
        id: 1,
        name: "every row's empirical success within 4σ of analytic".into(),
        passed: rows.iter().all(|r| r.within_sigmas(MONTE_CARLO_SIGMAS)),
        measured: worst,
        threshold: MONTE_CARLO_SIGMAS,
        detail: "|z| of the worst row".into(),
    }];
    let mut config = config.clone();
    config.grid = Some(grid);
    Ok(Report { config, analytic: None, empirical: None, sweep: Some(rows), checks })
}

pub fn cmd_verify(config: &RunConfig) -> Result<Report, CliError> {
    let checks = run_checks(&VerifyConfig { seed: config.seed, quick: config.quick });
    Ok(Report { config: config.clone(), analytic: None, empirical: None, sweep: None, checks })
}

/// 17 significant digits, '.' decimal point, no grouping.
pub fn format_sig17(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-5..17).contains(&magnitude) {
        return format!("{x:.16e}");
    }
    format!("{:.*}", (16 - magnitude) as usize, x)
}

fn input_description(input: &InputSpec) -> String {
    match input {
        InputSpec::Haar => "haar".into(),
        InputSpec::Explicit(q) => format!("a = {}, b = {}", q.a, q.b),
    }
}

fn render_text(report: &Report, timestamp: Option<u64>) -> String {
    let c = &report.config;
    let mut s = String::new();
    let cmd = match c.command {
        Command::Run => "run",
        Command::Sweep => "sweep",
        Command::Verify => "verify",
    };
    let _ = writeln!(s, "teleport-sim {cmd}");
    if let Some(t) = timestamp {
        let _ = writeln!(s, "generated_at_unix  {t}");
    }
    let _ = writeln!(s, "protocol           {}", c.protocol);
    if c.command != Command::Verify {
        let _ = writeln!(s, "alpha_sq           {}", c.alpha_sq);
        let _ = writeln!(s, "input              {}", input_description(&c.input));
    }
    let _ = writeln!(s, "trials             {}", c.trials);
    let _ = writeln!(s, "seed               {}", c.seed);
    if c.command == Command::Verify {
        let _ = writeln!(s, "quick              {}", c.quick);
    }
    let _ = writeln!(s);

    if let (Some(a), Some(e)) = (&report.analytic, &report.empirical) {
        let _ = writeln!(s, "{:<22} {:>12} {:>12} {:>12}", "", "analytic", "empirical", "std_err");
        let _ = writeln!(s, "{:<22} {:>12.6} {:>12.6} {:>12.2e}", "success", a.success, e.success_rate, e.success_std_err);
        let labels: std::collections::BTreeSet<_> = a.per_outcome.keys().chain(e.empirical_frequencies.keys()).collect();
        for label in labels {
            let _ = writeln!(
                s,
                "{:<22} {:>12.6} {:>12.6} {:>12.2e}",
                label.as_str(),
                a.per_outcome.get(label).copied().unwrap_or(0.0),
                e.empirical_frequencies.get(label).copied().unwrap_or(0.0),
                e.standard_errors.get(label).copied().unwrap_or(0.0),
            );
        }
        if c.protocol == Protocol::QubitAssisted {
            let _ = writeln!(s, "{:<22} {:>12.6}", "conclusive|subspace", a.conclusive_within_subspace);
        }
        let fid = e.mean_success_fidelity.map_or("n/a".to_string(), |f| format!("{f:.15}"));
        let _ = writeln!(s, "mean success fidelity  {fid}");
        let _ = writeln!(s);
    }
    if let Some(rows) = &report.sweep {
        let _ = writeln!(s, "{:>8} {:>8} {:>10} {:>10} {:>10} {:>12} {:>12}", "alpha_sq", "beta_sq", "analytic", "empirical", "std_err", "conclusive", "fidelity");
        for r in rows {
            let fid = r.mean_success_fidelity.map_or("n/a".to_string(), |f| format!("{f:.9}"));
            let _ = writeln!(
                s,
                "{:>8.4} {:>8.4} {:>10.6} {:>10.6} {:>10.2e} {:>12.6} {:>12}",
                r.alpha_sq, r.beta_sq, r.analytic_success, r.empirical_success, r.std_err, r.conclusive_within_subspace, fid
            );
        }
        let _ = writeln!(s);
    }
    for check in &report.checks {
        let _ = writeln!(s, "{check}");
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(s, "{} of {} checks passed", report.checks.len() - failed, report.checks.len());
    s
}

fn render_csv(report: &Report) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    if let Some(rows) = &report.sweep {
        w.write_record(SWEEP_COLUMNS).map_err(io)?;
        for r in rows {
            w.write_record([
                format_sig17(r.alpha_sq),
                format_sig17(r.beta_sq),
                format_sig17(r.analytic_success),
                format_sig17(r.empirical_success),
                format_sig17(r.std_err),
                format_sig17(r.conclusive_within_subspace),
                r.mean_success_fidelity.map(format_sig17).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
    } else if let (Some(a), Some(e)) = (&report.analytic, &report.empirical) {
        w.write_record(["outcome", "analytic", "empirical", "count", "std_err"]).map_err(io)?;
        w.write_record([
            "success".to_string(),
            format_sig17(a.success),
            format_sig17(e.success_rate),
            e.successes.to_string(),
            format_sig17(e.success_std_err),
        ])
        .map_err(io)?;
        let labels: std::collections::BTreeSet<_> = a.per_outcome.keys().chain(e.empirical_frequencies.keys()).collect();
        for label in labels {
            w.write_record([
                label.as_str().to_string(),
                format_sig17(a.per_outcome.get(label).copied().unwrap_or(0.0)),
                format_sig17(e.empirical_frequencies.get(label).copied().unwrap_or(0.0)),
                e.counts.get(label).copied().unwrap_or(0).to_string(),
                format_sig17(e.standard_errors.get(label).copied().unwrap_or(0.0)),
            ])
            .map_err(io)?;
        }
    } else {
        w.write_record(["id", "name", "passed", "measured", "threshold"]).map_err(io)?;
        for c in &report.checks {
            w.write_record([
                c.id.to_string(),
                c.name.clone(),
                c.passed.to_string(),
                format_sig17(c.measured),
                format_sig17(c.threshold),
            ])
            .map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Render a report in the configured format.
pub fn render(report: &Report) -> Result<String, CliError> {
    match report.config.output_format {
        OutputFormat::Text => {
            let ts = report.config.timestamps.then(|| {
                std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs())
            });
            Ok(render_text(report, ts))
        }
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| CliError::Io(e.into()))?;
            s.push('\n');
            Ok(s)
        }
        OutputFormat::Csv => render_csv(report),
    }
}

pub fn execute(config: &RunConfig) -> Result<Report, CliError> {
    match config.command {
        Command::Run => cmd_run(config),
        Command::Sweep => cmd_sweep(config),
        Command::Verify => cmd_verify(config),
    }
}

/// Entry point shared by the binary and the tests. Returns the exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK { write!(stdout, "{rendered}") } else { write!(stderr, "{rendered}") };
            return code;
        }
    };
    let outcome = resolve(cli).and_then(|(config, warnings)| {
        for w in warnings {
            let _ = writeln!(stderr, "{w}");
        }
        let report = execute(&config)?;
        let text = render(&report)?;
        match &config.output_path {
            Some(path) => std::fs::write(path, &text)?,
            None => stdout.write_all(text.as_bytes())?,
        }
        Ok(report.exit_code())
    });
    match outcome {
        Ok(code) => {
            if code == EXIT_CHECK_FAILED {
                let _ = writeln!(stderr, "verification failed");
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

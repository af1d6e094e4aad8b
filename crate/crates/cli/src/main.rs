//! `icbargain`: competitive and bargaining operating points for the two-user
//! interference channel, plus the grid sweeps around them.
//!
//! Single-point results print as JSON, grids as CSV. Exit codes: 0 success,
//! 1 validation failure (bad parameter values, unreadable files), 2 usage
//! errors (unknown or conflicting flags, missing parameters).

use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use icbargain::sweep::region_csv;
use icbargain::{
    competitive_rates, db_to_linear, fdm_feasible, reference_bounds, region_boundary, run_sweep,
    solve_nbs, sweep_csv, AxisSpec, ChannelDescriptor, DiscreteGame, GameDescriptor, RatePair,
    StandardChannel, SweepSpec,
};

const USAGE_EXIT: u8 = 2;
const VALIDATION_EXIT: u8 = 1;

#[derive(Parser)]
#[command(
    name = "icbargain",
    version,
    about = "Competitive and Nash-bargaining rate points for the 2x2 Gaussian interference channel under FDM"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the bargaining problem for one channel and print JSON
    Solve(SolveArgs),
    /// Sample the FDM rate-region boundary as CSV
    Region(RegionArgs),
    /// Sweep both SNRs over a dB grid at fixed couplings (CSV)
    SweepSnr(SweepSnrArgs),
    /// Sweep both couplings over [0, 1] at fixed SNRs (CSV)
    SweepInterference(SweepInterferenceArgs),
    /// Iterative water-filling equilibrium for a K-band game JSON
    Iwf(IwfArgs),
    /// Classical reference bounds for a channel (JSON)
    Bounds(BoundsArgs),
}

/// Channel selection shared by the single-channel subcommands: either the
/// four scalar flags (SNRs in dB or linear) or a JSON descriptor file.
#[derive(Args)]
struct ChannelArgs {
    /// SNR of link 1 in dB
    #[arg(
        long,
        value_name = "DB",
        allow_hyphen_values = true,
        conflicts_with = "snr1"
    )]
    snr1_db: Option<f64>,
    /// SNR of link 1 as a linear ratio
    #[arg(long, value_name = "RATIO", allow_negative_numbers = true)]
    snr1: Option<f64>,
    /// SNR of link 2 in dB
    #[arg(
        long,
        value_name = "DB",
        allow_hyphen_values = true,
        conflicts_with = "snr2"
    )]
    snr2_db: Option<f64>,
    /// SNR of link 2 as a linear ratio
    #[arg(long, value_name = "RATIO", allow_negative_numbers = true)]
    snr2: Option<f64>,
    /// Coupling of link 2's signal into receiver 1
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Coupling of link 1's signal into receiver 2
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// JSON channel descriptor file instead of the flags above
    #[arg(
        long,
        value_name = "FILE",
        conflicts_with_all = ["snr1_db", "snr1", "snr2_db", "snr2", "alpha", "beta"]
    )]
    channel: Option<PathBuf>,
    /// Bandwidth convention for reported rates
    #[arg(long, default_value_t = icbargain::DEFAULT_W)]
    w: f64,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when omitted
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum JsonFormat {
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum CsvFormat {
    Csv,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// Convergence tolerance on the band split
    #[arg(long, default_value_t = icbargain::DEFAULT_NBS_TOL)]
    tol: f64,
    /// Output format
    #[arg(long, value_enum, default_value_t = JsonFormat::Json)]
    format: JsonFormat,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct RegionArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// Number of boundary samples
    #[arg(short = 'n', long, default_value_t = 256)]
    samples: usize,
    /// Output format
    #[arg(long, value_enum, default_value_t = CsvFormat::Csv)]
    format: CsvFormat,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SweepSnrArgs {
    /// Coupling of link 2's signal into receiver 1
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    /// Coupling of link 1's signal into receiver 2
    #[arg(long, allow_negative_numbers = true)]
    beta: f64,
    /// Lower edge of both SNR axes, dB
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    min_db: f64,
    /// Upper edge of both SNR axes, dB
    #[arg(long, default_value_t = 40.0, allow_hyphen_values = true)]
    max_db: f64,
    /// Axis step, dB
    #[arg(long, default_value_t = 0.25)]
    step_db: f64,
    /// Bandwidth convention for reported rates
    #[arg(long, default_value_t = icbargain::DEFAULT_W)]
    w: f64,
    /// Worker threads (0 = one per core)
    #[arg(long, env = "ICBARGAIN_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Output format
    #[arg(long, value_enum, default_value_t = CsvFormat::Csv)]
    format: CsvFormat,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SweepInterferenceArgs {
    /// SNR of link 1 in dB
    #[arg(
        long,
        value_name = "DB",
        allow_hyphen_values = true,
        conflicts_with = "snr1"
    )]
    snr1_db: Option<f64>,
    /// SNR of link 1 as a linear ratio
    #[arg(long, value_name = "RATIO", allow_negative_numbers = true)]
    snr1: Option<f64>,
    /// SNR of link 2 in dB
    #[arg(
        long,
        value_name = "DB",
        allow_hyphen_values = true,
        conflicts_with = "snr2"
    )]
    snr2_db: Option<f64>,
    /// SNR of link 2 as a linear ratio
    #[arg(long, value_name = "RATIO", allow_negative_numbers = true)]
    snr2: Option<f64>,
    /// Lower edge of both coupling axes
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    min: f64,
    /// Upper edge of both coupling axes
    #[arg(long, default_value_t = 1.0)]
    max: f64,
    /// Axis step
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// Bandwidth convention for reported rates
    #[arg(long, default_value_t = icbargain::DEFAULT_W)]
    w: f64,
    /// Worker threads (0 = one per core)
    #[arg(long, env = "ICBARGAIN_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Output format
    #[arg(long, value_enum, default_value_t = CsvFormat::Csv)]
    format: CsvFormat,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct IwfArgs {
    /// Game descriptor JSON file
    #[arg(long, value_name = "FILE")]
    game: PathBuf,
    /// Convergence tolerance on per-band power changes
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Round limit
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    /// Output format
    #[arg(long, value_enum, default_value_t = JsonFormat::Json)]
    format: JsonFormat,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// Output format
    #[arg(long, value_enum, default_value_t = JsonFormat::Json)]
    format: JsonFormat,
    #[command(flatten)]
    out: OutputArgs,
}

/// Failure carrying its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Display) -> Self {
        Failure {
            code: USAGE_EXIT,
            message: message.to_string(),
        }
    }

    fn invalid(message: impl Display) -> Self {
        Failure {
            code: VALIDATION_EXIT,
            message: message.to_string(),
        }
    }
}

impl From<icbargain::Error> for Failure {
    fn from(e: icbargain::Error) -> Self {
        Failure::invalid(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::invalid(e)
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Solve(args) => solve(args),
        Command::Region(args) => region(args),
        Command::SweepSnr(args) => sweep_snr(args),
        Command::SweepInterference(args) => sweep_interference(args),
        Command::Iwf(args) => iwf(args),
        Command::Bounds(args) => bounds(args),
    }
}

impl ChannelArgs {
    fn resolve(&self) -> CliResult<StandardChannel> {
        if let Some(path) = &self.channel {
            let text = std::fs::read_to_string(path)?;
            let descriptor: ChannelDescriptor = serde_json::from_str(&text)
                .map_err(|e| Failure::invalid(format!("bad channel descriptor: {e}")))?;
            return Ok(descriptor.to_standard(self.w)?);
        }
        let snr1 = resolve_snr("snr1", self.snr1_db, self.snr1)?;
        let snr2 = resolve_snr("snr2", self.snr2_db, self.snr2)?;
        let alpha = self
            .alpha
            .ok_or_else(|| Failure::usage("missing --alpha (or use --channel)"))?;
        let beta = self
            .beta
            .ok_or_else(|| Failure::usage("missing --beta (or use --channel)"))?;
        Ok(StandardChannel::new(snr1, snr2, alpha, beta, self.w)?)
    }
}

fn resolve_snr(name: &str, db: Option<f64>, linear: Option<f64>) -> CliResult<f64> {
    match (db, linear) {
        (Some(db), None) => Ok(db_to_linear(db)),
        (None, Some(linear)) => Ok(linear),
        (None, None) => Err(Failure::usage(format!(
            "missing --{name}-db or --{name} (or use --channel)"
        ))),
        // unreachable under clap's conflict rules
        (Some(_), Some(_)) => Err(Failure::usage(format!(
            "--{name}-db conflicts with --{name}"
        ))),
    }
}

fn emit(out: &OutputArgs, content: &str) -> CliResult<()> {
    match &out.output {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .map_err(|e| Failure::invalid(format!("cannot write {}: {e}", path.display())))?;
            file.write_all(content.as_bytes())?;
            if !content.ends_with('\n') {
                file.write_all(b"\n")?;
            }
        }
        None => {
            if content.ends_with('\n') {
                print!("{content}");
            } else {
                println!("{content}");
            }
        }
    }
    Ok(())
}

/// JSON schema of `solve`.
#[derive(Serialize)]
struct SolveReport {
    competitive: RatePair,
    feasible: bool,
    rho1_min: f64,
    rho2_min: f64,
    rho_star: Option<f64>,
    nbs: RatePair,
    gains: GainsReport,
    nash_product: f64,
}

#[derive(Serialize)]
struct GainsReport {
    g1: f64,
    g2: f64,
}

fn solve(args: SolveArgs) -> CliResult<()> {
    let sc = args.channel.resolve()?;
    let report = fdm_feasible(&sc);
    let outcome = solve_nbs(&sc, args.tol)?;
    let (g1, g2) = outcome.gains();
    let json = serde_json::to_string_pretty(&SolveReport {
        competitive: outcome.competitive(),
        feasible: outcome.is_agreement(),
        rho1_min: report.rho1_min,
        rho2_min: report.rho2_min,
        rho_star: outcome.rho_star(),
        nbs: outcome.rates(),
        gains: GainsReport { g1, g2 },
        nash_product: outcome.nash_product(),
    })
    .expect("report serialization cannot fail");
    emit(&args.out, &json)
}

fn region(args: RegionArgs) -> CliResult<()> {
    let sc = args.channel.resolve()?;
    let boundary = region_boundary(&sc, args.samples)?;
    let rc = competitive_rates(&sc);
    let outcome = solve_nbs(&sc, icbargain::DEFAULT_NBS_TOL)?;
    emit(&args.out, &region_csv(&boundary, &rc, &outcome))
}

fn sweep_snr(args: SweepSnrArgs) -> CliResult<()> {
    let spec = SweepSpec::SnrGrid {
        alpha: args.alpha,
        beta: args.beta,
        snr1_db: AxisSpec::new(args.min_db, args.max_db, args.step_db),
        snr2_db: AxisSpec::new(args.min_db, args.max_db, args.step_db),
        w: args.w,
    };
    let records = run_sweep(&spec, args.jobs)?;
    emit(&args.out, &sweep_csv(&records))
}

fn sweep_interference(args: SweepInterferenceArgs) -> CliResult<()> {
    let snr1_db = resolve_fixed_snr_db("snr1", args.snr1_db, args.snr1)?;
    let snr2_db = resolve_fixed_snr_db("snr2", args.snr2_db, args.snr2)?;
    let spec = SweepSpec::InterferenceGrid {
        snr1_db,
        snr2_db,
        alpha: AxisSpec::new(args.min, args.max, args.step),
        beta: AxisSpec::new(args.min, args.max, args.step),
        w: args.w,
    };
    let records = run_sweep(&spec, args.jobs)?;
    emit(&args.out, &sweep_csv(&records))
}

fn resolve_fixed_snr_db(name: &str, db: Option<f64>, linear: Option<f64>) -> CliResult<f64> {
    match (db, linear) {
        (Some(db), None) => Ok(db),
        (None, Some(linear)) => Ok(icbargain::linear_to_db(linear)?),
        _ => Err(Failure::usage(format!(
            "exactly one of --{name}-db / --{name} is required"
        ))),
    }
}

fn iwf(args: IwfArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.game)
        .map_err(|e| Failure::invalid(format!("cannot read {}: {e}", args.game.display())))?;
    let descriptor: GameDescriptor = serde_json::from_str(&text)
        .map_err(|e| Failure::invalid(format!("bad game descriptor: {e}")))?;
    let game = DiscreteGame::try_from(descriptor)?;
    let result = game.iterate_waterfilling(args.tol, args.max_iters)?;
    let json =
        serde_json::to_string_pretty(&result).expect("equilibrium serialization cannot fail");
    emit(&args.out, &json)
}

fn bounds(args: BoundsArgs) -> CliResult<()> {
    let sc = args.channel.resolve()?;
    let json = serde_json::to_string_pretty(&reference_bounds(&sc))
        .expect("bounds serialization cannot fail");
    emit(&args.out, &json)
}

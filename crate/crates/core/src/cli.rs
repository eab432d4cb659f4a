//! Batch command-line surface. Every flag can also come from an environment
//! variable `SPECSIM_<FLAG>`; an explicit flag wins.
//!
//! Exit codes: 0 success, 1 bound violated, 2 parse error, 3 precondition,
//! 4 alphabet mismatch, 5 example constraint.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::channel::{simulate_channel, Channel, CoinCoupling};
use crate::error::{Error, Result};
use crate::io;
use crate::oracle::{brute_force_optimal_map, grid_measure, mc_empirical_distance, OracleConfig, OracleReport};
use crate::product::{example_suite, ExampleParams};
use crate::source::{pushforward, simulate_source, variational_distance};
use crate::spectrum::{build_spectrum, deficiency_measure, dump_rows, shifted_gap, Measure, Pmf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_BOUND_VIOLATED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_ALPHABET: i32 = 4;
pub const EXIT_EXAMPLE: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "specsim", version, about = "Source and channel simulation from arbitrary coins")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "SPECSIM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true, env = "SPECSIM_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, env = "SPECSIM_FORMAT", value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sufficient,
    Necessary,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump the spectrum step function of a pmf.
    Spectrum(SpectrumArgs),
    /// Build the interval-alignment map and check its distance bound.
    Simulate(SimulateArgs),
    /// Sweep deficiency measures or shifted gaps.
    Check(CheckArgs),
    /// Build one map per input symbol and report the channel quantities.
    Channel(ChannelArgs),
    /// Run one of the worked examples from a JSON parameter file.
    Example(ExampleArgs),
    /// Brute-force and Monte-Carlo cross-checks.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, env = "SPECSIM_PMF")]
    pub pmf: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, env = "SPECSIM_COIN")]
    pub coin: PathBuf,
    #[arg(long, env = "SPECSIM_TARGET")]
    pub target: PathBuf,
    #[arg(long, env = "SPECSIM_EPS")]
    pub eps: f64,
    #[arg(long, env = "SPECSIM_GAMMA")]
    pub gamma: f64,
    /// Where to write the map as `from_label,to_label` rows.
    #[arg(long, env = "SPECSIM_OUT_MAP")]
    pub out_map: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckArgs {
    #[arg(long, env = "SPECSIM_COIN")]
    pub coin: PathBuf,
    #[arg(long, env = "SPECSIM_TARGET")]
    pub target: PathBuf,
    #[arg(long, env = "SPECSIM_MODE", value_enum)]
    pub mode: Mode,
    /// Comma-separated thresholds.
    #[arg(long, env = "SPECSIM_GAMMA", value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub gamma: Vec<f64>,
    /// Comma-separated shifts, paired with `--gamma` in necessary mode.
    #[arg(long, env = "SPECSIM_EPS", value_delimiter = ',')]
    pub eps: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChannelArgs {
    #[arg(long, env = "SPECSIM_INPUT")]
    pub input: PathBuf,
    #[arg(long, env = "SPECSIM_CHANNEL")]
    pub channel: PathBuf,
    #[arg(long, env = "SPECSIM_COUPLING")]
    pub coupling: PathBuf,
    #[arg(long, env = "SPECSIM_EPS")]
    pub eps: f64,
    #[arg(long, env = "SPECSIM_GAMMA")]
    pub gamma: f64,
    /// Where to write the maps as `x_label,z_label,y_label` rows.
    #[arg(long, env = "SPECSIM_OUT_MAP")]
    pub out_map: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExampleArgs {
    #[arg(long, env = "SPECSIM_PARAMS")]
    pub params: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Midpoint-grid estimate of a sub-level measure.
    Grid(GridArgs),
    /// Exhaustive search for the best deterministic map.
    Brute(BruteArgs),
    /// Sampled distance of the interval-alignment map.
    Mc(McArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    #[arg(long, env = "SPECSIM_COIN")]
    pub coin: PathBuf,
    #[arg(long, env = "SPECSIM_TARGET")]
    pub target: PathBuf,
    /// Threshold on the gap (use a negative value for shifted sub-levels).
    #[arg(long, env = "SPECSIM_GAMMA", allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, env = "SPECSIM_SHIFT", default_value_t = 0.0)]
    pub shift: f64,
    #[arg(long, env = "SPECSIM_GRID", default_value_t = 1_000_000)]
    pub grid: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BruteArgs {
    #[arg(long, env = "SPECSIM_COIN")]
    pub coin: PathBuf,
    #[arg(long, env = "SPECSIM_TARGET")]
    pub target: PathBuf,
    #[arg(long, env = "SPECSIM_CAP", default_value_t = 1_000_000)]
    pub cap: u64,
    #[arg(long, env = "SPECSIM_OUT_MAP")]
    pub out_map: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct McArgs {
    #[arg(long, env = "SPECSIM_COIN")]
    pub coin: PathBuf,
    #[arg(long, env = "SPECSIM_TARGET")]
    pub target: PathBuf,
    #[arg(long, env = "SPECSIM_EPS")]
    pub eps: f64,
    #[arg(long, env = "SPECSIM_GAMMA")]
    pub gamma: f64,
    #[arg(long, env = "SPECSIM_SAMPLES", default_value_t = 1_000_000)]
    pub samples: u64,
}

/// Provenance embedded in every JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: serde_json::Value,
    /// SHA-256 of each input file, keyed by the path as given.
    pub inputs: BTreeMap<String, String>,
    pub version: String,
    pub seed: u64,
    pub started_unix_ms: u128,
    pub elapsed_ms: f64,
}

impl RunManifest {
    fn new<P: Serialize>(command: &str, params: &P, inputs: &[&Path], seed: u64, clock: &Clock) -> Result<Self> {
        let mut digests = BTreeMap::new();
        for path in inputs {
            digests.insert(path.display().to_string(), sha256_hex(&fs::read(path)?));
        }
        Ok(Self {
            command: command.to_string(),
            params: serde_json::to_value(params)?,
            inputs: digests,
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            started_unix_ms: clock.unix_ms,
            elapsed_ms: clock.start.elapsed().as_secs_f64() * 1e3,
        })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

struct Clock {
    start: Instant,
    unix_ms: u128,
}

impl Clock {
    fn now() -> Self {
        Self {
            start: Instant::now(),
            unix_ms: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_millis()),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    #[serde(flatten)]
    report: &'a T,
    manifest: RunManifest,
}

/// Maps an error to its exit status.
pub fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::Parse { .. } | Error::InvalidPmf(_) | Error::Json(_) | Error::Io(_) => EXIT_PARSE,
        Error::AlphabetMismatch(_) | Error::UnknownSymbol(_) => EXIT_ALPHABET,
        Error::ExampleConstraint(_) => EXIT_EXAMPLE,
        _ => EXIT_PRECONDITION,
    }
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn emit<T: Serialize>(common: &Common, report: &T, manifest: RunManifest) -> Result<()> {
    let mut w = sink(&common.out)?;
    io::write_json(&mut w, &Envelope { report, manifest })?;
    w.flush()?;
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let c = &cli.common;
    let clock = Clock::now();
    match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(c, a, &clock),
        Command::Simulate(a) => cmd_simulate(c, a, &clock),
        Command::Check(a) => cmd_check(c, a, &clock),
        Command::Channel(a) => cmd_channel(c, a, &clock),
        Command::Example(a) => cmd_example(c, a, &clock),
        Command::Oracle(OracleCommand::Grid(a)) => cmd_oracle_grid(c, a, &clock),
        Command::Oracle(OracleCommand::Brute(a)) => cmd_oracle_brute(c, a, &clock),
        Command::Oracle(OracleCommand::Mc(a)) => cmd_oracle_mc(c, a, &clock),
    }
}

fn cmd_spectrum(c: &Common, a: &SpectrumArgs, clock: &Clock) -> Result<i32> {
    let s = build_spectrum(&io::read_pmf(&a.pmf)?)?;
    match c.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = sink(&c.out)?;
            io::write_spectrum_csv(&mut w, &s)?;
            w.flush()?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Rows {
                rows: Vec<(f64, f64, f64)>,
            }
            let m = RunManifest::new("spectrum", a, &[&a.pmf], c.seed, clock)?;
            emit(c, &Rows { rows: dump_rows(&s) }, m)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_simulate(c: &Common, a: &SimulateArgs, clock: &Clock) -> Result<i32> {
    let coin = io::read_pmf(&a.coin)?;
    let target = io::read_pmf(&a.target)?;
    let (map, report) = simulate_source(&coin, &target, a.eps, a.gamma)?;
    if let Some(p) = &a.out_map {
        io::write_map_csv(File::create(p)?, &map)?;
    }
    let m = RunManifest::new("simulate", a, &[&a.coin, &a.target], c.seed, clock)?;
    emit(c, &report, m)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_BOUND_VIOLATED })
}

#[derive(Debug, Clone, Serialize)]
struct SufficientRow {
    gamma: f64,
    measure: Measure,
}

#[derive(Debug, Clone, Serialize)]
struct NecessaryRow {
    eps: f64,
    gamma: f64,
    inf: f64,
    sublevel_measure: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
enum Sweep {
    Sufficient(Vec<SufficientRow>),
    Necessary(Vec<NecessaryRow>),
}

fn cmd_check(c: &Common, a: &CheckArgs, clock: &Clock) -> Result<i32> {
    let sx = build_spectrum(&io::read_pmf(&a.coin)?)?;
    let sy = build_spectrum(&io::read_pmf(&a.target)?)?;
    if !(sx.is_full() && sy.is_full()) && a.mode == Mode::Necessary {
        return Err(Error::Precondition("check needs fully listed pmfs".into()));
    }
    let sweep = match a.mode {
        Mode::Sufficient => Sweep::Sufficient(
            a.gamma
                .iter()
                .map(|&g| Ok(SufficientRow { gamma: g, measure: deficiency_measure(&sx, &sy, g)? }))
                .collect::<Result<_>>()?,
        ),
        Mode::Necessary => {
            if a.eps.len() != a.gamma.len() {
                return Err(Error::Precondition(format!(
                    "necessary mode pairs --eps with --gamma: {} shifts, {} thresholds",
                    a.eps.len(),
                    a.gamma.len()
                )));
            }
            Sweep::Necessary(
                a.eps
                    .iter()
                    .zip(&a.gamma)
                    .map(|(&e, &g)| {
                        if !(g > 0.0) {
                            return Err(Error::Precondition(format!("gamma {g} must be positive")));
                        }
                        let gap = shifted_gap(&sx, &sy, e)?;
                        Ok(NecessaryRow {
                            eps: e,
                            gamma: g,
                            inf: gap.inf(),
                            sublevel_measure: gap.measure_below(-g),
                        })
                    })
                    .collect::<Result<_>>()?,
            )
        }
    };
    match c.format.unwrap_or(Format::Json) {
        Format::Json => {
            #[derive(Serialize)]
            struct CheckReport {
                mode: Mode,
                sweep: Sweep,
            }
            let m = RunManifest::new("check", a, &[&a.coin, &a.target], c.seed, clock)?;
            emit(c, &CheckReport { mode: a.mode, sweep }, m)?;
        }
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(sink(&c.out)?);
            match sweep {
                Sweep::Sufficient(rows) => {
                    wtr.write_record(["gamma", "measure_lower", "measure_upper"])?;
                    for r in rows {
                        wtr.write_record([r.gamma, r.measure.lower(), r.measure.upper()].map(|v| v.to_string()))?;
                    }
                }
                Sweep::Necessary(rows) => {
                    wtr.write_record(["eps", "gamma", "inf", "sublevel_measure"])?;
                    for r in rows {
                        wtr.write_record([r.eps, r.gamma, r.inf, r.sublevel_measure].map(|v| v.to_string()))?;
                    }
                }
            }
            wtr.flush()?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_channel(c: &Common, a: &ChannelArgs, clock: &Clock) -> Result<i32> {
    let input = io::read_pmf(&a.input)?;
    let chan = Channel::new(io::parse_conditional(&fs::read_to_string(&a.channel)?, "y")?)?;
    let coupling = CoinCoupling::new(io::parse_conditional(&fs::read_to_string(&a.coupling)?, "z")?)?;
    let (cm, report) = simulate_channel(&input, &chan, &coupling, a.eps, a.gamma)?;
    if let Some(p) = &a.out_map {
        io::write_channel_map_csv(File::create(p)?, &cm)?;
    }
    let m = RunManifest::new("channel", a, &[&a.input, &a.channel, &a.coupling], c.seed, clock)?;
    emit(c, &report, m)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_BOUND_VIOLATED })
}

fn cmd_example(c: &Common, a: &ExampleArgs, clock: &Clock) -> Result<i32> {
    let text = fs::read_to_string(&a.params)?;
    let params: ExampleParams =
        serde_json::from_str(&text).map_err(|e| Error::Parse { line: Some(e.line() as u64), msg: e.to_string() })?;
    let report = example_suite(&params)?;
    let m = RunManifest::new("example", &params, &[&a.params], c.seed, clock)?;
    emit(c, &report, m)?;
    Ok(EXIT_OK)
}

fn oracle_config(c: &Common, grid: u64, samples: u64, cap: u64) -> OracleConfig {
    OracleConfig {
        grid_size: grid,
        mc_samples: samples,
        rng_seed: c.seed,
        max_enum_maps: cap,
    }
}

fn cmd_oracle_grid(c: &Common, a: &GridArgs, clock: &Clock) -> Result<i32> {
    let config = oracle_config(c, a.grid, 1, 0);
    config.validate()?;
    let sx = build_spectrum(&io::read_pmf(&a.coin)?)?;
    let sy = build_spectrum(&io::read_pmf(&a.target)?)?;
    let value = grid_measure(&sx, &sy, a.gamma, a.shift, a.grid)?;
    let exact = if a.shift == 0.0 {
        deficiency_measure(&sx, &sy, a.gamma)?.exact()
    } else {
        Some(shifted_gap(&sx, &sy, a.shift)?.measure_below(a.gamma))
    };
    let report = OracleReport::new("grid_measure", value, exact, config);
    emit(c, &report, RunManifest::new("oracle grid", a, &[&a.coin, &a.target], c.seed, clock)?)?;
    Ok(EXIT_OK)
}

fn cmd_oracle_brute(c: &Common, a: &BruteArgs, clock: &Clock) -> Result<i32> {
    let coin = io::read_pmf(&a.coin)?;
    let target = io::read_pmf(&a.target)?;
    let (map, d) = brute_force_optimal_map(&coin, &target, a.cap)?;
    if let Some(p) = &a.out_map {
        io::write_map_csv(File::create(p)?, &map)?;
    }
    let report = OracleReport::new("brute_force_optimal_map", d, None, oracle_config(c, 10, 1, a.cap));
    emit(c, &report, RunManifest::new("oracle brute", a, &[&a.coin, &a.target], c.seed, clock)?)?;
    Ok(EXIT_OK)
}

fn cmd_oracle_mc(c: &Common, a: &McArgs, clock: &Clock) -> Result<i32> {
    let config = oracle_config(c, 10, a.samples, 0);
    config.validate()?;
    let coin: Pmf = io::read_pmf(&a.coin)?;
    let target = io::read_pmf(&a.target)?;
    let (map, _) = simulate_source(&coin, &target, a.eps, a.gamma)?;
    let exact = variational_distance(&target, &pushforward(&map, &coin)?)?;
    let value = mc_empirical_distance(&coin, &map, &target, a.samples, c.seed)?;
    let report = OracleReport::new("mc_empirical_distance", value, Some(exact), config);
    emit(c, &report, RunManifest::new("oracle mc", a, &[&a.coin, &a.target], c.seed, clock)?)?;
    Ok(EXIT_OK)
}

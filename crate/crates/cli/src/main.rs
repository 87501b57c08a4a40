use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use streamlab_core::campaign::{self, CampaignConfig, JobStatus, StreamJob};
use streamlab_core::report::{self, aggregate};
use streamlab_core::{kat, Battery, BatteryProfile, GeneratorId, HalfPolicy, SeedIndex, Thresholds};

#[derive(Parser)]
#[command(name = "streamlab", version, about = "Multi-stream PRNG quality campaigns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a campaign: one battery report per (seed, half).
    Run(RunArgs),
    /// Write raw 32-bit words (little-endian) to standard output.
    Gen(GenArgs),
    /// Check generators against their reference vectors.
    Kat {
        #[arg(long)]
        generator: Option<GeneratorId>,
    },
    /// Run one battery and print its report.
    Battery(BatteryArgs),
    /// Aggregate a directory of reports.
    Report(ReportArgs),
    /// Print a battery profile.
    Profile { name: String },
    /// Chance of at least one tail event among independent statistics.
    Multitest {
        #[arg(long, default_value_t = 160)]
        statistics: u64,
        #[arg(long, default_value_t = 0.002)]
        tail: f64,
    },
    /// State bits beyond what a TestU01 battery needs.
    Headroom {
        #[arg(long)]
        bits: u32,
        #[arg(long, default_value = "bigcrush")]
        battery: String,
    },
}

#[derive(Args)]
struct RunArgs {
    /// key=value file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    generator: Option<GeneratorId>,
    /// Half-open range `A..B`.
    #[arg(long)]
    seeds: Option<String>,
    /// Comma-separated: low, high, alternating or native32.
    #[arg(long)]
    halves: Option<String>,
    /// smoke, desk, deep or a profile file.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    suspicious: Option<f64>,
    #[arg(long)]
    decisive: Option<f64>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    generator: GeneratorId,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    half: Option<HalfPolicy>,
    /// Words to write; unbounded when omitted.
    #[arg(long)]
    count: Option<u64>,
}

#[derive(Args)]
struct BatteryArgs {
    #[arg(long)]
    generator: GeneratorId,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    half: Option<HalfPolicy>,
    #[arg(long, default_value = "desk")]
    profile: String,
    #[arg(long, default_value_t = Thresholds::DEFAULT_SUSPICIOUS)]
    suspicious: f64,
    #[arg(long, default_value_t = Thresholds::DEFAULT_DECISIVE)]
    decisive: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long = "in")]
    dir: PathBuf,
    #[arg(long, default_value_t = Thresholds::DEFAULT_SUSPICIOUS)]
    suspicious: f64,
    #[arg(long, default_value_t = Thresholds::DEFAULT_DECISIVE)]
    decisive: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Combine reports from different profiles.
    #[arg(long)]
    allow_mixed: bool,
}

fn default_half(g: GeneratorId) -> HalfPolicy {
    if g.is_64bit() {
        HalfPolicy::Low
    } else {
        HalfPolicy::Native32
    }
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let mut config = match &args.config {
        Some(path) => CampaignConfig::from_file(path)?,
        None => {
            let g = args.generator.context("--generator is required without --config")?;
            let out = args.out.clone().context("--out is required without --config")?;
            CampaignConfig::new(g, out)
        }
    };
    if let Some(g) = args.generator {
        config.set("generator", g.name())?;
    }
    let flags = [
        ("seeds", args.seeds),
        ("halves", args.halves),
        ("profile", args.profile),
        ("out", args.out.map(|p| p.to_string_lossy().into_owned())),
        ("workers", args.workers.map(|w| w.to_string())),
        ("suspicious", args.suspicious.map(|v| v.to_string())),
        ("decisive", args.decisive.map(|v| v.to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            config.set(key, &v)?;
        }
    }
    let outcome = campaign::execute(&config)?;
    eprintln!(
        "{} written, {} already complete, {} failed ({})",
        outcome.written(),
        outcome.skipped(),
        outcome.failed(),
        config.out_dir.display()
    );
    for job in &outcome.jobs {
        if let JobStatus::Failed(e) = &job.status {
            eprintln!("  {}: {e}", job.file.display());
        }
    }
    Ok(if outcome.failed() == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn gen(args: GenArgs) -> Result<ExitCode> {
    let half = args.half.unwrap_or_else(|| default_half(args.generator));
    let stdout = io::stdout();
    let mut out = io::BufWriter::with_capacity(1 << 16, stdout.lock());
    campaign::emit_raw_stream(args.generator, SeedIndex(args.seed), half, args.count, &mut out)?;
    Ok(ExitCode::SUCCESS)
}

fn kat_check(generator: Option<GeneratorId>) -> Result<ExitCode> {
    let sets: Vec<kat::KatSet> = match generator {
        None => kat::load_all(),
        Some(g) => {
            let names: &[&str] = match g {
                GeneratorId::Mt19937 => &["mt19937", "mt19937_res53"],
                GeneratorId::Pcg32Srandom => &["pcg32"],
                _ => &[],
            };
            let names: Vec<&str> = if names.is_empty() { vec![g.name()] } else { names.to_vec() };
            names
                .into_iter()
                .map(|n| kat::load(n).with_context(|| format!("no reference vectors for {g}")))
                .collect::<Result<_>>()?
        }
    };
    let mut all_ok = true;
    for set in &sets {
        for check in kat::verify(set)? {
            let status = if check.passed() { "ok" } else { "MISMATCH" };
            all_ok &= check.passed();
            match check.first_mismatch {
                Some(i) => println!("{status:<8} {:<14} {:<24} first difference at output {i}", check.set, check.label),
                None => println!("{status:<8} {:<14} {:<24} {} outputs", check.set, check.label, check.compared),
            }
        }
    }
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn battery(args: BatteryArgs) -> Result<ExitCode> {
    let half = args.half.unwrap_or_else(|| default_half(args.generator));
    let thresholds = Thresholds::new(args.suspicious, args.decisive)?;
    let mut profile = BatteryProfile::resolve(&args.profile)?;
    let label = std::path::Path::new(&args.profile)
        .file_stem()
        .map_or_else(|| args.profile.clone(), |s| s.to_string_lossy().into_owned());
    profile.name = label.clone();
    let battery = Battery::new(profile)?;
    let job = StreamJob { generator: args.generator, seed: SeedIndex(args.seed), half, profile: label };
    let report = campaign::run_job(&job, &battery, &thresholds)?;
    io::stdout().write_all(report.render().as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn report_cmd(args: ReportArgs) -> Result<ExitCode> {
    let thresholds = Thresholds::new(args.suspicious, args.decisive)?;
    let summary = aggregate(&args.dir, thresholds, args.allow_mixed)?;
    let text = match args.format {
        Format::Text => report::render_text(&summary),
        Format::Csv => report::histogram_csv(&report::failure_histogram(&summary)),
        Format::Json => summary.to_json() + "\n",
    };
    io::stdout().write_all(text.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Gen(a) => gen(a),
        Command::Kat { generator } => kat_check(generator),
        Command::Battery(a) => battery(a),
        Command::Report(a) => report_cmd(a),
        Command::Profile { name } => BatteryProfile::resolve(&name).map_err(Into::into).map(|p| {
            print!("{p}");
            println!("# {} words per stream", p.words());
            ExitCode::SUCCESS
        }),
        Command::Multitest { statistics, tail } => report::multiple_testing_probability(statistics, tail)
            .map_err(Into::into)
            .map(|p| {
                println!("{p:.5} ({})", report::percent(p, 1));
                ExitCode::SUCCESS
            }),
        Command::Headroom { bits, battery } => report::headroom(bits, &battery).map_err(Into::into).map(|h| {
            println!("{h}");
            ExitCode::SUCCESS
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("streamlab: {e:#}");
            if e.downcast_ref::<streamlab_core::Error>().is_some_and(|e| matches!(e, streamlab_core::Error::Config(_))) {
                return ExitCode::from(2);
            }
            ExitCode::FAILURE
        }
    }
}

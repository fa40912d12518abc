use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cpjam::analysis::FractionKind;
use cpjam::harness::{
    emit_results, fraction_study, parse_snr_range, rank_study, sweep, write_fraction_csv,
    write_rank_csv, write_scenario_json, RankCase, Scenario, SubspaceMode,
};
use cpjam::jammer::JammerMode;
use cpjam::ofdm::OfdmConfig;

#[derive(Parser)]
#[command(name = "cpjam", version, about = "MIMO-OFDM jamming and nulling simulator")]
struct Cli {
    /// Worker threads (defaults to one per core).
    #[arg(long, global = true, env = "CPJAM_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// BER-vs-SNR sweep; writes ber.csv and scenario.json.
    Simulate(SimulateArgs),
    /// Noise-free interference rank per receiver/jammer layout; writes ranks.csv.
    AnalyzeRank(RankArgs),
    /// Ordered singular-value fractions of the interference; writes fractions.csv.
    Fractions(FractionArgs),
}

/// Overrides applied on top of a scenario file.
#[derive(Args)]
struct ScenarioArgs {
    /// JSON scenario file; unspecified fields take default values.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Jammer mode: none, compliant or violating.
    #[arg(long, value_parser = parse_mode)]
    jammer: Option<JammerMode>,
    /// Interference dimensions removed per subcarrier.
    #[arg(long)]
    null_dims: Option<usize>,
    /// SNR grid as START:STOP:STEP in dB.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    /// Coherence blocks per SNR point.
    #[arg(long)]
    blocks: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Interference subspace source: genie or estimated.
    #[arg(long, value_parser = parse_subspace)]
    subspace: Option<SubspaceMode>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RankArgs {
    /// Receive antenna counts.
    #[arg(long, value_delimiter = ',', default_values_t = [8usize])]
    antennas: Vec<usize>,
    /// Jammer channel taps per antenna.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 4, 8])]
    taps: Vec<usize>,
    /// Jammer antennas, each with the same tap count.
    #[arg(long, default_value_t = 1)]
    jammer_antennas: usize,
    /// Jammer mode: compliant or violating.
    #[arg(long, value_parser = parse_mode, default_value = "violating")]
    jammer: JammerMode,
    #[arg(long, default_value_t = 500)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FractionArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// SNR of the added noise in dB; noise-free when omitted.
    #[arg(long = "at-snr", allow_hyphen_values = true)]
    at_snr: Option<f64>,
    /// Report energy shares (squared singular values).
    #[arg(long)]
    energy: bool,
    #[arg(long)]
    out: PathBuf,
}

fn parse_mode(s: &str) -> Result<JammerMode, String> {
    s.parse().map_err(|e: cpjam::Error| e.to_string())
}

fn parse_subspace(s: &str) -> Result<SubspaceMode, String> {
    s.parse().map_err(|e: cpjam::Error| e.to_string())
}

impl ScenarioArgs {
    fn resolve(&self) -> Result<Scenario> {
        let mut sc = match &self.scenario {
            Some(path) => Scenario::from_json_file(path)?,
            None => Scenario::default(),
        };
        if let Some(mode) = self.jammer {
            sc = sc.with_jammer_mode(mode);
        }
        if let Some(d) = self.null_dims {
            sc.null_dims = d;
        }
        if let Some(snr) = &self.snr {
            sc.snr_grid_db = parse_snr_range(snr)?;
        }
        if let Some(b) = self.blocks {
            sc.blocks = b;
        }
        if let Some(s) = self.seed {
            sc.seed = s;
        }
        if let Some(m) = self.subspace {
            sc.subspace_mode = m;
        }
        Ok(sc.resolved()?)
    }
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let sc = args.scenario.resolve()?;
    let start = Instant::now();
    let res = sweep(&sc)?;
    let files = emit_results(&sc, std::slice::from_ref(&res), None, &args.out)?;
    for p in &res.points {
        eprintln!("snr {:>6.2} dB  ber {:.3e}  ({} / {})", p.snr_db, p.ber(), p.bit_errors, p.bits);
    }
    eprintln!("{} blocks per point in {:.1?}", sc.blocks, start.elapsed());
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn analyze_rank(args: &RankArgs) -> Result<()> {
    if args.jammer_antennas == 0 {
        bail!("--jammer-antennas must be positive");
    }
    let cases: Vec<RankCase> = args
        .antennas
        .iter()
        .flat_map(|&b| {
            args.taps.iter().map(move |&l| RankCase {
                b_antennas: b,
                mode: args.jammer,
                taps_per_antenna: vec![l; args.jammer_antennas],
            })
        })
        .collect();
    let rows = rank_study(&cases, &OfdmConfig::default(), args.draws, args.seed)?;
    for r in &rows {
        eprintln!(
            "B={} L={:?}: expected {}, conforming {:.4}, range {}..={}",
            r.case.b_antennas,
            r.case.taps_per_antenna,
            r.expected_rank,
            r.conforming_fraction(),
            r.min_rank,
            r.max_rank
        );
    }
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let path = args.out.join("ranks.csv");
    write_rank_csv(&rows, &path)?;
    println!("{}", path.display());
    Ok(())
}

fn fractions(args: &FractionArgs) -> Result<()> {
    let sc = args.scenario.resolve()?;
    let kind = if args.energy { FractionKind::Energy } else { FractionKind::Singular };
    let stats = fraction_study(&sc, args.at_snr, kind)?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let path = args.out.join("fractions.csv");
    write_fraction_csv(&stats, &path)?;
    write_scenario_json(&sc, &args.out.join("scenario.json"))?;
    for (i, (m, s)) in stats.mean.iter().zip(&stats.std).enumerate() {
        eprintln!("dim {i}: {m:.4e} +- {s:.2e}");
    }
    println!("{}", path.display());
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("thread count must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::AnalyzeRank(a) => analyze_rank(a),
        Command::Fractions(a) => fractions(a),
    }
}

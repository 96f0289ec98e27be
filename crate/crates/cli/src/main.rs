use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use ldpc_prune::num_rational::Ratio;
use ldpc_prune::pexit::{self, ThresholdQuery};
use ldpc_prune::search::{self, SearchConfig};
use ldpc_prune::sim::{self, SimPlan};
use ldpc_prune::{standard, BaseMatrix, PruningPattern};

#[derive(Parser, Debug)]
#[command(
    name = "ldpc-prune",
    version,
    about = "Shortening/puncturing pattern optimization for QC-LDPC codes"
)]
struct Cli {
    /// Worker threads (falls back to LDPC_PRUNE_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print dimensions, rate and column-degree profile.
    Show {
        /// Base matrix file, or `std:<name>` for a bundled one.
        #[arg(long = "in")]
        input: String,
    },
    /// Expand to a binary parity-check matrix in alist format.
    Lift {
        #[arg(long = "in")]
        input: String,
        /// Rescale shifts to this lifting factor first.
        #[arg(long)]
        z: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// PEXIT threshold of a (pruned) base matrix.
    Threshold {
        #[arg(long = "in")]
        input: String,
        #[arg(long, default_value = "")]
        shorten: String,
        #[arg(long, default_value = "")]
        puncture: String,
        /// Pattern JSON; overrides --shorten/--puncture.
        #[arg(long)]
        pattern: Option<PathBuf>,
        /// Rate used for the Eb/N0 conversion, e.g. 1/2.
        #[arg(long)]
        rate_override: Option<String>,
    },
    /// Beam search for a joint shortening/puncturing pattern.
    Optimize {
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        stages: usize,
        #[arg(long, default_value_t = search::DEFAULT_BEAM)]
        beam: usize,
        #[arg(long)]
        out: PathBuf,
        /// Stage log CSV; defaults to `<out>.stages.csv`.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Monte Carlo BER/FER over BPSK/AWGN.
    Simulate {
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        z: Option<usize>,
        #[arg(long)]
        pattern: Option<PathBuf>,
        /// Number of leading shortened columns of the pattern to use.
        #[arg(long)]
        alpha: Option<usize>,
        /// Number of leading punctured columns of the pattern to use.
        #[arg(long)]
        beta: Option<usize>,
        /// Shortened bits (default alpha * Z).
        #[arg(long)]
        ns: Option<usize>,
        /// Punctured bits (default beta * Z).
        #[arg(long)]
        np: Option<usize>,
        /// start:step:stop in dB, or a single value.
        #[arg(long)]
        snr: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = sim::DEFAULT_MIN_FRAME_ERRORS)]
        min_fe: u64,
        #[arg(long, default_value_t = sim::DEFAULT_MAX_FRAMES)]
        max_frames: u64,
        #[arg(long, default_value_t = ldpc_prune::codec::DEFAULT_MAX_ITERATIONS)]
        max_iter: usize,
        #[arg(long)]
        noiseless: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_matrix(input: &str) -> Result<BaseMatrix> {
    if let Some(name) = input.strip_prefix("std:") {
        return standard::by_name(name)
            .with_context(|| format!("no bundled matrix named {name:?}"));
    }
    let text = fs::read_to_string(input).with_context(|| format!("reading {input}"))?;
    text.parse().with_context(|| format!("parsing {input}"))
}

fn load_pattern(path: &Path) -> Result<PruningPattern> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    PruningPattern::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn parse_ratio(text: &str) -> Result<Ratio<usize>> {
    let (n, d) = text
        .split_once('/')
        .context("rate must look like num/den")?;
    let (n, d): (usize, usize) = (n.trim().parse()?, d.trim().parse()?);
    if d == 0 {
        bail!("rate denominator is zero");
    }
    Ok(Ratio::new(n, d))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn init_threads(flag: Option<usize>) -> Result<()> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("LDPC_PRUNE_THREADS") {
            Ok(v) => Some(v.trim().parse().context("LDPC_PRUNE_THREADS")?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            bail!("thread count must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    init_threads(cli.threads)?;
    match cli.cmd {
        Cmd::Show { input } => {
            let bm = load_matrix(&input)?;
            println!(
                "n={} m={} k={} Z={} rate={}",
                bm.cols(),
                bm.rows(),
                bm.info_cols(),
                bm.lift_factor(),
                bm.rate()
            );
            let profile: Vec<String> = bm
                .degree_profile()
                .iter()
                .map(|(d, c)| format!("{d}:{c}"))
                .collect();
            println!("column degrees (degree:count) {}", profile.join(" "));
            println!("edges={}", bm.edge_count());
        }
        Cmd::Lift { input, z, out } => {
            let mut bm = load_matrix(&input)?;
            if let Some(z) = z {
                bm = bm.with_lift(z)?;
            }
            write(&out, &bm.lift().to_alist())?;
        }
        Cmd::Threshold {
            input,
            shorten,
            puncture,
            pattern,
            rate_override,
        } => {
            let bm = load_matrix(&input)?;
            let pattern = match pattern {
                Some(p) => load_pattern(&p)?,
                None => PruningPattern::new(
                    PruningPattern::parse_list(&shorten)?,
                    PruningPattern::parse_list(&puncture)?,
                ),
            };
            let mut q = ThresholdQuery::for_pattern(&bm, &pattern)?;
            if let Some(r) = rate_override {
                q = q.with_rate(parse_ratio(&r)?);
            }
            let th = pexit::threshold(&q)?;
            let db = if th.db.is_finite() {
                json!(th.db)
            } else {
                json!("inf")
            };
            println!(
                "{}",
                json!({
                    "threshold_db": db,
                    "iterations_at_threshold": th.iterations,
                    "rate": q.rate.to_string(),
                    "pattern": pattern,
                })
            );
        }
        Cmd::Optimize {
            input,
            stages,
            beam,
            out,
            log,
        } => {
            let bm = load_matrix(&input)?;
            let outcome = search::run_search(&bm, &SearchConfig::new(stages, beam))?;
            let (best, db) = outcome
                .recommended()
                .context("search returned no pattern")?;
            best.validate(&bm)?;
            write(&out, &best.to_json())?;
            let log = log.unwrap_or_else(|| {
                let mut p = out.clone().into_os_string();
                p.push(".stages.csv");
                p.into()
            });
            write(&log, &outcome.stage_log_csv())?;
            println!("{}", json!({ "pattern": best, "threshold_db": db }));
        }
        Cmd::Simulate {
            input,
            z,
            pattern,
            alpha,
            beta,
            ns,
            np,
            snr,
            seed,
            min_fe,
            max_frames,
            max_iter,
            noiseless,
            out,
        } => {
            let mut bm = load_matrix(&input)?;
            if let Some(z) = z {
                bm = bm.with_lift(z)?;
            }
            let full = match pattern {
                Some(p) => load_pattern(&p)?,
                None => PruningPattern::default(),
            };
            let pattern =
                full.sub_pattern(alpha.unwrap_or(full.alpha()), beta.unwrap_or(full.beta()))?;
            let mut plan = SimPlan::whole_columns(bm, pattern, sim::parse_sweep(&snr)?);
            if let Some(ns) = ns {
                plan.shortened_bits = ns;
            }
            if let Some(np) = np {
                plan.punctured_bits = np;
            }
            plan.seed = seed;
            plan.min_frame_errors = min_fe;
            plan.max_frames = max_frames;
            plan.max_iterations = max_iter;
            plan.noiseless = noiseless;
            let csv = sim::to_csv(&sim::run_sim(&plan)?);
            match out {
                Some(path) => write(&path, &csv)?,
                None => print!("{csv}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!(
                "{}",
                json!({ "error": "usage", "message": first.trim_start_matches("error: ") })
            );
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                json!({ "error": "failed", "message": format!("{e:#}") })
            );
            ExitCode::FAILURE
        }
    }
}

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hecke_core::treefam::LEVEL_CAP;
use hecke_core::witness::{SearchConfig, Tolerances};
use hecke_core::TreeShape;

use crate::cache::{write_atomic, PairKind, TableCache};
use crate::commands::{self, Report, SpherOp};
use crate::format::{certificate_from_json, certificate_to_json, element_from_json};

pub const MAX_BUDGET: u64 = 10_000_000;
pub const MAX_K: usize = 1 << 16;
pub const MAX_N: usize = 62;

#[derive(Parser, Debug)]
#[command(name = "hecke", version, about = "Hecke algebras of tree-automorphism pairs and commutator-moment certificates")]
pub struct Cli {
    /// Cache directory for double-coset tables (default: $HECKE_CACHE_DIR, then the user cache dir).
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Build every table from scratch and store nothing.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Write the primary output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Root degree for ball pairs (defaults to d).
    #[arg(long)]
    pub k: Option<usize>,
    /// Depths l of (S_{d^l}, Q_l), a single value or a range `a..b`.
    #[arg(long, default_value = "1..3")]
    pub l: String,
    /// Levels n of (S_{|V_n|}, P_n); replaces --l when given.
    #[arg(long)]
    pub n: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Orders, index, double-coset count and verdict for each pair.
    Census(PairArgs),
    /// Commutativity verdicts with a non-commuting basis pair where one exists.
    Gelfand(PairArgs),
    /// Search for a witness certificate on (S_{d^l}, Q_l).
    Witness {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 3)]
        l: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        budget: u64,
        #[arg(long = "k-max", default_value_t = 1024)]
        k_max: usize,
    },
    /// Check a certificate; exits with status 1 if it is rejected.
    Verify { certificate: PathBuf },
    /// Moment decay table and Haar-convergence report from a certificate.
    Decay {
        certificate: PathBuf,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long = "n-max", default_value_t = 20)]
        n_max: usize,
        #[arg(long = "k-max")]
        k_max: Option<usize>,
    },
    /// Embedding and commutation checks on the wreath scenarios.
    EmbedCheck {
        /// Scenario names; all catalogued scenarios when omitted.
        #[arg(long)]
        scenario: Vec<String>,
    },
    /// Almost-automorphism operations on JSON elements.
    Spher {
        #[command(subcommand)]
        op: SpherCommand,
    },
}

#[derive(Subcommand, Debug)]
pub enum SpherCommand {
    /// g∘h (h acts first), in canonical form.
    Compose { g: PathBuf, h: PathBuf },
    Inverse { g: PathBuf },
    Canonical { g: PathBuf },
    /// Canonical P_n double-coset representative of the level-n permutation.
    Key {
        g: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Smallest n with g in O^(n).
    Level {
        g: PathBuf,
        #[arg(long = "n-max", default_value_t = 6)]
        n_max: usize,
    },
}

fn cap(what: &str, value: usize, max: usize) -> Result<()> {
    if value > max {
        bail!("{what} = {value} exceeds the cap of {max}");
    }
    Ok(())
}

pub fn parse_range(text: &str) -> Result<Vec<usize>> {
    let parse = |s: &str| s.trim().parse::<usize>().with_context(|| format!("bad number {s:?}"));
    match text.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
            if a > b {
                bail!("empty range {text}");
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![parse(text)?]),
    }
}

fn shape(d: usize, k: Option<usize>) -> Result<TreeShape> {
    Ok(TreeShape::new(d, k.unwrap_or(d))?)
}

pub fn pairs(args: &PairArgs) -> Result<Vec<PairKind>> {
    match &args.n {
        Some(n) => {
            let shape = shape(args.d, args.k)?;
            parse_range(n)?
                .into_iter()
                .map(|n| {
                    if n == 0 {
                        bail!("levels start at n = 1");
                    }
                    cap("|V_n|", shape.level_size(n).min(usize::MAX as u64) as usize, LEVEL_CAP)?;
                    Ok(PairKind::Ball { shape, n })
                })
                .collect()
        }
        None => {
            TreeShape::regular(args.d)?;
            parse_range(&args.l)?
                .into_iter()
                .map(|l| {
                    if l == 0 {
                        bail!("depths start at l = 1");
                    }
                    cap("d^l", TreeShape::regular(args.d)?.level_size(l).min(usize::MAX as u64) as usize, LEVEL_CAP)?;
                    Ok(PairKind::Depth { d: args.d, l })
                })
                .collect()
        }
    }
}

fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Dispatches one command; the returned report's `ok` decides the exit code.
pub fn run(cli: &Cli) -> Result<Report> {
    let cache = if cli.no_cache { TableCache::disabled() } else { TableCache::resolve(cli.cache.clone()) };
    match &cli.command {
        Command::Census(args) => commands::census(&cache, &pairs(args)?),
        Command::Gelfand(args) => commands::gelfand(&cache, &pairs(args)?),
        Command::Witness {
            d,
            l,
            seed,
            budget,
            k_max,
        } => {
            cap("d^l", TreeShape::regular(*d)?.level_size(*l) as usize, LEVEL_CAP)?;
            cap("budget", *budget as usize, MAX_BUDGET as usize)?;
            cap("k-max", *k_max, MAX_K)?;
            let config = SearchConfig {
                seed: *seed,
                budget: *budget,
                k_max: *k_max,
                tolerances: Tolerances::default(),
                ..SearchConfig::default()
            };
            let (cert, report) = commands::witness(&cache, *d, *l, &config)?;
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("certificate.json"));
            write_atomic(&out, certificate_to_json(&cert)?.as_bytes())?;
            let mut report = report;
            report.summary.push(format!("certificate written to {}", out.display()));
            Ok(report)
        }
        Command::Verify { certificate } => {
            let cert = certificate_from_json(&read(certificate)?)?;
            commands::verify(&cache, &cert)
        }
        Command::Decay {
            certificate,
            d,
            k,
            n_max,
            k_max,
        } => {
            cap("n-max", *n_max, MAX_N)?;
            let cert = certificate_from_json(&read(certificate)?)?;
            commands::decay(&cert, shape(*d, *k)?, *n_max, k_max.unwrap_or(cert.k_max()))
        }
        Command::EmbedCheck { scenario } => commands::embed_check(scenario),
        Command::Spher { op } => {
            let load = |p: &PathBuf| -> Result<_> { element_from_json(&read(p)?) };
            let op = match op {
                SpherCommand::Compose { g, h } => SpherOp::Compose(load(g)?, load(h)?),
                SpherCommand::Inverse { g } => SpherOp::Inverse(load(g)?),
                SpherCommand::Canonical { g } => SpherOp::Canonical(load(g)?),
                SpherCommand::Key { g, n } => {
                    cap("n", *n, 6)?;
                    SpherOp::Key(load(g)?, *n)
                }
                SpherCommand::Level { g, n_max } => {
                    cap("n-max", *n_max, MAX_N)?;
                    SpherOp::Level(load(g)?, *n_max)
                }
            };
            commands::spher(&op)
        }
    }
}

/// Parses arguments, runs, prints, and returns the process exit code:
/// 0 on success, 1 on a failed check, 2 on errors.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let start = Instant::now();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 2;
        }
    };
    let witness = matches!(cli.command, Command::Witness { .. });
    let mut stdout = std::io::stdout().lock();
    let primary = report.jsonl();
    let written = match (&cli.out, witness) {
        (Some(path), false) => write_atomic(path, primary.as_bytes()),
        _ => stdout.write_all(primary.as_bytes()).map_err(Into::into),
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return 2;
    }
    for line in &report.summary {
        let _ = writeln!(stdout, "# {line}");
    }
    eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
    if report.ok {
        0
    } else {
        1
    }
}

//! Command-line interface: dimension reports, game solving, learner runs,
//! exact mistake bounds, class generation, and the verification suite.
//!
//! Exit codes: 0 on success, 1 when a verification criterion fails, 2 on
//! invalid input or runtime errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use olearn::concepts::{ConceptClass, GeneratorSpec};
use olearn::dims::{self, DimensionReport};
use olearn::games::{self, GameMatrix, SolveMode};
use olearn::harness::{self, verify, AdversarySpec, ExperimentConfig, LearnerKind};
use olearn::{rat, Rat};

#[derive(Parser)]
#[command(
    name = "olearn",
    version,
    about = "Online learning of finite concept classes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every randomized component.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file for traces or generated artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format (only CSV is supported).
    #[arg(long, global = true, default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Print the dimension report of a class as one CSV row.
    Dims {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        hypotheses: Option<PathBuf>,
    },
    /// Solve a game or compute its triangular dimension.
    Game {
        #[command(subcommand)]
        what: GameCommand,
    },
    /// Run an online learner against an adversary.
    Run(RunArgs),
    /// Exact optimal mistake bound for a (class, hypotheses) pair.
    MbExact {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        hypotheses: PathBuf,
    },
    /// Equivalence-query complexity for a (class, hypotheses) pair.
    Eq {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        hypotheses: PathBuf,
    },
    /// Generate a class file.
    Gen {
        #[command(subcommand)]
        spec: GenCommand,
    },
    /// Run the verification suite.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Full)]
        level: LevelArg,
    },
}

#[derive(Subcommand)]
enum GameCommand {
    /// Value and optimal strategies.
    Value {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// Largest triangular submatrix.
    Tridim {
        #[arg(long)]
        matrix: PathBuf,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    Singletons { n: usize },
    Thresholds { n: usize },
    Powerset { d: usize },
    Random { n: usize, m: usize },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    learner: LearnerArg,
    #[arg(long)]
    class: PathBuf,
    #[arg(long)]
    hypotheses: Option<PathBuf>,
    /// Margin parameter for the vote learner, as a decimal in (0, 1/2).
    #[arg(long)]
    eps: Option<String>,
    #[arg(long, value_enum, default_value_t = AdversaryArg::Worst)]
    adversary: AdversaryArg,
    /// Stream file for replayed runs (`x y` per line). Implies the replay
    /// adversary.
    #[arg(long)]
    stream: Option<PathBuf>,
    #[arg(long, alias = "T", default_value_t = 20)]
    t: usize,
    /// Results ledger to append a summary row to.
    #[arg(long, default_value = "results.csv")]
    ledger: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum LearnerArg {
    Soa,
    Helly,
    Vote,
    Maj,
    Agnostic,
}

#[derive(Clone, Copy, ValueEnum)]
enum AdversaryArg {
    Worst,
    Random,
    Replay,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Iter,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

/// Parse a decimal like `0.25` into an exact rational.
fn parse_decimal_rat(s: &str) -> anyhow::Result<Rat> {
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        let int: i64 = if int.is_empty() { 0 } else { int.parse()? };
        if frac.is_empty() || frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
            anyhow::bail!("malformed decimal {s:?}");
        }
        let den = 10i64.pow(frac.len() as u32);
        let num: i64 = frac.parse()?;
        Ok(rat(int * den + num, den))
    } else {
        Ok(rat(s.parse::<i64>()?, 1))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.format != "csv" {
        eprintln!("error: unsupported format {:?} (only csv)", cli.format);
        return ExitCode::from(2);
    }
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Dims { class, hypotheses } => {
            let c = ConceptClass::from_file(&class)?;
            let h = hypotheses
                .map(|p| ConceptClass::from_file(&p))
                .transpose()?;
            let report = DimensionReport::compute(&c, h.as_ref())?;
            println!("{}", DimensionReport::csv_header());
            println!("{}", report.csv_row());
            Ok(ExitCode::SUCCESS)
        }
        Command::Game { what } => {
            match what {
                GameCommand::Value { matrix, mode, tol } => {
                    let m = GameMatrix::from_file(&matrix)?;
                    let mode = match mode {
                        ModeArg::Exact => SolveMode::Exact,
                        ModeArg::Iter => SolveMode::Iterative { tol },
                    };
                    let sol = games::game_value(&m, mode)?;
                    println!("value,duality_gap,row_support,col_support");
                    println!(
                        "{},{},{},{}",
                        sol.value,
                        sol.duality_gap,
                        sol.row_strategy.support.len(),
                        sol.col_strategy.support.len()
                    );
                }
                GameCommand::Tridim { matrix } => {
                    let m = GameMatrix::from_file(&matrix)?;
                    println!("triangular_dim");
                    println!("{}", games::triangular_dim(&m));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Run(args) => {
            let class = ConceptClass::from_file(&args.class)?;
            let hyp = args
                .hypotheses
                .as_ref()
                .map(|p| ConceptClass::from_file(p))
                .transpose()?;
            let learner = match args.learner {
                LearnerArg::Soa => LearnerKind::Soa,
                LearnerArg::Helly => LearnerKind::Helly,
                LearnerArg::Maj => LearnerKind::Maj,
                LearnerArg::Agnostic => LearnerKind::Agnostic,
                LearnerArg::Vote => {
                    let eps = args
                        .eps
                        .as_deref()
                        .ok_or_else(|| anyhow::anyhow!("--eps is required for the vote learner"))?;
                    LearnerKind::Vote {
                        eps: parse_decimal_rat(eps)?,
                    }
                }
            };
            // An explicit stream file always means replay.
            let adversary = match (&args.stream, args.adversary) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(path)?;
                    AdversarySpec::Replay(harness::parse_stream(&text)?)
                }
                (None, AdversaryArg::Worst) => AdversarySpec::Worst,
                (None, AdversaryArg::Random) => AdversarySpec::Random,
                (None, AdversaryArg::Replay) => {
                    anyhow::bail!("--stream is required for replay")
                }
            };
            let cfg = ExperimentConfig {
                class_name: args.class.display().to_string(),
                class,
                hyp,
                learner,
                adversary,
                t: args.t,
                seed: cli.seed,
                out: cli.out.clone(),
                ledger: Some(args.ledger.clone()),
            };
            let record = harness::run_experiment(&cfg)?;
            println!("config_hash,learner,measured,bound,pass,summary");
            println!(
                "{:016x},{},{},{},{},{}",
                record.config_hash,
                record.learner,
                record.measured,
                record.bound,
                record.pass,
                record.summary.replace(',', ";")
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::MbExact { class, hypotheses } => {
            let c = ConceptClass::from_file(&class)?;
            let h = ConceptClass::from_file(&hypotheses)?;
            let r = dims::mb_exact(&c, &h)?;
            println!("mb,optimal_first_hypothesis");
            println!(
                "{},{}",
                r.value,
                r.optimal_first_hypothesis
                    .map(|h| format!("{h:?}"))
                    .unwrap_or_default()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Eq { class, hypotheses } => {
            let c = ConceptClass::from_file(&class)?;
            let h = ConceptClass::from_file(&hypotheses)?;
            println!("eq_query_complexity");
            println!("{}", dims::eq_query_complexity(&c, &h)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen { spec } => {
            let spec = match spec {
                GenCommand::Singletons { n } => GeneratorSpec::Singletons(n),
                GenCommand::Thresholds { n } => GeneratorSpec::Thresholds(n),
                GenCommand::Powerset { d } => GeneratorSpec::Powerset(d),
                GenCommand::Random { n, m } => GeneratorSpec::Random {
                    n,
                    m,
                    seed: cli.seed,
                },
            };
            let class = spec.build()?;
            match &cli.out {
                Some(path) => class.write_file(path)?,
                None => print!("{}", class.to_file_string()),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { level } => {
            let level = match level {
                LevelArg::Quick => verify::Level::Quick,
                LevelArg::Full => verify::Level::Full,
            };
            let results = verify::run_all(level, verify::Corruption::None);
            let mut all_pass = true;
            for r in &results {
                println!("{}", r.line());
                all_pass &= r.passed;
            }
            Ok(if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use autostruct::fsa::Count;
use autostruct::pipeline::{self, RunConfig};
use autostruct::query;
use autostruct::Result;

#[derive(Parser)]
#[command(
    name = "autostruct",
    version,
    about = "Shortlex automatic structures for finitely presented groups"
)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunFlags {
    /// Output directory for artifacts.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Cap on live rewriting rules.
    #[arg(long)]
    max_eqns: Option<usize>,
    /// Completion passes with an unchanged difference count before stopping.
    #[arg(long)]
    wd_window: Option<usize>,
    /// Cap on states of any constructed automaton.
    #[arg(long)]
    max_states: Option<usize>,
    /// Temporary directory (default: $AUTOSTRUCT_TMP, else the output directory).
    #[arg(long)]
    tmp: Option<PathBuf>,
    /// Cap on acceptor/multiplier/check rounds.
    #[arg(long)]
    max_iterations: Option<usize>,
}

impl RunFlags {
    fn config(&self) -> RunConfig {
        let mut cfg = RunConfig {
            out_dir: self.out.clone(),
            ..RunConfig::default()
        };
        if let Some(n) = self.max_eqns {
            cfg.kb.max_equations = n;
        }
        if let Some(k) = self.wd_window {
            cfg.kb.stabilization_window = k;
        }
        if let Some(n) = self.max_states {
            cfg.fsa.max_states = n;
        }
        if let Some(n) = self.max_iterations {
            cfg.max_iterations = n;
        }
        cfg.fsa.tmp_dir = self.tmp.clone();
        cfg
    }
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: completion, structure, axiom check, minimal rules.
    Auto {
        /// `fib N` or a presentation file.
        #[arg(required = true, num_args = 1..=2)]
        input: Vec<String>,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Knuth-Bendix completion only.
    Kb {
        #[arg(required = true, num_args = 1..=2)]
        input: Vec<String>,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Build the difference machine and word acceptor from stored differences.
    Wa { prefix: PathBuf },
    /// Build the multiplier from the stored acceptor and differences.
    Mult { prefix: PathBuf },
    /// Partial correctness check; on failure extends the stored differences.
    Check { prefix: PathBuf },
    /// Axiom check of the stored structure.
    Axioms { prefix: PathBuf },
    /// Continue an interrupted run.
    Resume { dir: PathBuf },
    /// Print the normal form of a word.
    Reduce { aut: PathBuf, word: String },
    /// Decide whether two words are equal in the group.
    Wp { aut: PathBuf, u: String, v: String },
    /// Order of the element a word represents.
    Order {
        aut: PathBuf,
        word: String,
        /// Powers to try when no certificate is found.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Group order.
    Size { aut: PathBuf },
    /// Number of normal forms of each length.
    Growth {
        aut: PathBuf,
        #[arg(long)]
        maxlen: usize,
        #[arg(long)]
        csv: bool,
    },
}

fn stage_config(prefix: &std::path::Path) -> RunConfig {
    RunConfig {
        out_dir: prefix.parent().map(PathBuf::from).unwrap_or_default(),
        ..RunConfig::default()
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Auto { input, flags } => {
            let p = pipeline::parse_input(&input)?;
            let out = pipeline::run_pipeline(&p, &flags.config())?;
            if let Some(s) = &out.structure {
                println!(
                    "W={} M={} wdiffs={}",
                    s.acceptor.num_states(),
                    s.multiplier.fsa.num_states(),
                    s.diffs().len()
                );
            }
            println!("verified={}", out.verified);
        }
        Command::Kb { input, flags } => {
            let p = pipeline::parse_input(&input)?;
            let halt = pipeline::stage_kb(&p, &flags.config())?;
            println!("halt={halt}");
        }
        Command::Wa { prefix } => {
            let n = pipeline::stage_wa(&prefix, &stage_config(&prefix))?;
            println!("W={n}");
        }
        Command::Mult { prefix } => {
            let (raw, n) = pipeline::stage_mult(&prefix, &stage_config(&prefix))?;
            println!("M_raw={raw} M={n}");
        }
        Command::Check { prefix } => {
            let failed = pipeline::stage_check(&prefix, &stage_config(&prefix))?;
            if failed > 0 {
                println!("check=fail letters={failed}");
                return Ok(ExitCode::from(4));
            }
            println!("check=ok");
        }
        Command::Axioms { prefix } => {
            let ok = pipeline::stage_axioms(&prefix, &stage_config(&prefix))?;
            println!("axioms={}", if ok { "pass" } else { "fail" });
            if !ok {
                return Ok(ExitCode::from(4));
            }
        }
        Command::Resume { dir } => {
            let cfg = RunConfig {
                out_dir: dir.clone(),
                ..RunConfig::default()
            };
            let out = pipeline::resume(&dir, &cfg)?;
            println!("verified={}", out.verified);
        }
        Command::Reduce { aut, word } => {
            let s = pipeline::load_structure(&aut)?;
            let a = &s.presentation.alphabet;
            let w = a.parse_word(&word)?;
            println!("{}", a.format_word(&query::reduce_word(&s, &w)?));
        }
        Command::Wp { aut, u, v } => {
            let s = pipeline::load_structure(&aut)?;
            let a = &s.presentation.alphabet;
            println!("{}", query::word_problem(&s, &a.parse_word(&u)?, &a.parse_word(&v)?)?);
        }
        Command::Order { aut, word, budget } => {
            let s = pipeline::load_structure(&aut)?;
            let w = s.presentation.alphabet.parse_word(&word)?;
            let r = query::element_order(&s, &w, budget)?;
            println!("{}", r.order);
            if let Some(c) = r.certificate {
                println!("{c}");
            }
        }
        Command::Size { aut } => {
            let s = pipeline::load_structure(&aut)?;
            if !s.is_verified() {
                return Err(autostruct::Error::NotVerified);
            }
            match query::group_order(&s) {
                Count::Finite(n) => println!("{n}"),
                Count::Infinite => println!("infinite"),
            }
        }
        Command::Growth { aut, maxlen, csv } => {
            let s = pipeline::load_structure(&aut)?;
            if !s.is_verified() {
                return Err(autostruct::Error::NotVerified);
            }
            let counts = query::growth_series(&s, maxlen);
            if csv {
                print!("{}", query::growth_csv(&counts));
            } else {
                for (len, c) in counts.iter().enumerate() {
                    println!("{len} {c}");
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

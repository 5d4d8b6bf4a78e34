//! `wadgekit` — decide Wadge reducibility between ω-regular k-partitions
//! given as Muller k-acceptors, plus the supporting plumbing: cycle
//! analysis, invariant construction, poset comparison, unfolding, run
//! evaluation, fixture generation and a scaling benchmark.
//!
//! Exit codes: 0 = relation holds / success, 1 = relation fails (a
//! well-formed negative answer), 2 = input or usage error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use wadgekit_core::automaton::{parse_automaton, Automaton, UltimatelyPeriodicWord};
use wadgekit_core::cycles::{all_cycles, cycle_count_bound, Cycle};
use wadgekit_core::harness::{
    gen_acceptor, gen_automaton, gen_forest, gen_poset, scaling_run, timing_csv, Family, GenConfig,
};
use wadgekit_core::poset::{
    parse_poset, poset_to_sexpr, preceq, unfold_with_limit, DEFAULT_UNFOLD_LIMIT,
};
use wadgekit_core::wadge::{build_invariant, classify, decide_wadge_leq, MullerKAcceptor};

const UNFOLD_LIMIT_ENV: &str = "WADGEKIT_UNFOLD_LIMIT";

#[derive(Parser)]
#[command(
    name = "wadgekit",
    version,
    about = "Wadge reducibility of omega-regular k-partitions via Muller k-acceptors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide L(A) <=_W L(B) for two acceptor files.
    Decide {
        file_a: PathBuf,
        file_b: PathBuf,
        /// Print only the forward relation LE / NOT-LE (the default).
        #[arg(long, conflicts_with = "both")]
        relation: bool,
        /// Print the full classification: LT, GT, EQ or INCOMPARABLE.
        #[arg(long)]
        both: bool,
        /// Require subset tables to list all 2^n subsets.
        #[arg(long)]
        strict_subsets: bool,
    },
    /// Print the iterated-poset invariant of an acceptor in the poset
    /// grammar.
    Invariant {
        file: PathBuf,
        #[arg(long)]
        strict_subsets: bool,
    },
    /// List the cycle set of an automaton, or print its size or the
    /// counting bound.
    Cycles {
        file: PathBuf,
        /// Output encoding for cycles.
        #[arg(long, value_enum, default_value_t = CycleFormat::List)]
        format: CycleFormat,
        /// Print |C_M| instead of listing.
        #[arg(long)]
        count: bool,
        /// Print the bound max(2^d, C^n + n) instead of listing.
        #[arg(long)]
        bound: bool,
        #[arg(long)]
        strict_subsets: bool,
    },
    /// Compare two poset files in the unfolding preorder.
    ComparePosets { file_p: PathBuf, file_r: PathBuf },
    /// Unfold a poset file into its forest of cover paths.
    Unfold {
        file: PathBuf,
        /// Node limit (also settable via WADGEKIT_UNFOLD_LIMIT).
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Run an automaton on an ultimately periodic word and print the
    /// infinity set (and its label, when the file is an acceptor).
    Eval {
        file: PathBuf,
        /// Finite prefix; may be empty.
        #[arg(long, default_value = "")]
        prefix: String,
        /// Nonempty period.
        #[arg(long)]
        period: String,
        #[arg(long)]
        strict_subsets: bool,
    },
    /// Generate a reproducible random fixture and print it in its file
    /// format.
    Gen(GenArgs),
    /// Time the poset comparison on growing families and print a CSV
    /// table.
    Bench {
        /// Comma-separated families: chain, antichain, random.
        #[arg(long, value_delimiter = ',', default_values_t = vec![
            "chain".to_string(), "antichain".to_string(), "random".to_string()
        ])]
        families: Vec<String>,
        /// Comma-separated poset sizes.
        #[arg(long, value_delimiter = ',', default_values_t = vec![500usize, 1000])]
        sizes: Vec<usize>,
        /// Repetitions per size; the median is reported.
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CycleFormat {
    /// One line per cycle with its sorted state ids.
    List,
    /// One bitstring per cycle, bit i = state i.
    Subsets,
}

#[derive(Args)]
struct GenArgs {
    /// What to generate.
    #[arg(value_enum)]
    kind: GenKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// State-count range for automata, as `lo:hi` or a single number.
    #[arg(long, default_value = "1:6")]
    states: String,
    /// Node-count range for posets and forests.
    #[arg(long, default_value = "1:7")]
    nodes: String,
    #[arg(long, default_value_t = 2)]
    alphabet_size: usize,
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Label nesting depth (0, 1 or 2).
    #[arg(long, default_value_t = 1)]
    depth: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Automaton,
    Acceptor,
    Poset,
    Forest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &PathBuf) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_acceptor(path: &PathBuf, strict: bool) -> anyhow::Result<MullerKAcceptor> {
    let text = read(path)?;
    let (acceptor, warnings) = MullerKAcceptor::from_file(&text, strict)
        .with_context(|| format!("parsing acceptor {}", path.display()))?;
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(acceptor)
}

fn relation_code(holds: bool) -> ExitCode {
    if holds {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Decide {
            file_a,
            file_b,
            both,
            strict_subsets,
            ..
        } => {
            let a = read_acceptor(&file_a, strict_subsets)?;
            let b = read_acceptor(&file_b, strict_subsets)?;
            if both {
                let rel = classify(&a, &b);
                println!("{rel}");
                Ok(relation_code(rel.forward_holds()))
            } else {
                let holds = decide_wadge_leq(&a, &b);
                println!("{}", if holds { "LE" } else { "NOT-LE" });
                Ok(relation_code(holds))
            }
        }
        Command::Invariant {
            file,
            strict_subsets,
        } => {
            let acceptor = read_acceptor(&file, strict_subsets)?;
            print!("{}", poset_to_sexpr(build_invariant(&acceptor).poset()));
            Ok(ExitCode::SUCCESS)
        }
        Command::Cycles {
            file,
            format,
            count,
            bound,
            strict_subsets,
        } => {
            let text = read(&file)?;
            // Parse as an acceptor when a labeling section is present so
            // the listing can carry labels.
            let parsed =
                parse_automaton(&text).with_context(|| format!("parsing {}", file.display()))?;
            let (automaton, labeling) = if parsed.acceptor.is_some() {
                let (acceptor, warnings) = MullerKAcceptor::from_file(&text, strict_subsets)
                    .with_context(|| format!("parsing acceptor {}", file.display()))?;
                for w in warnings {
                    eprintln!("warning: {}: {w}", file.display());
                }
                let labeling = acceptor.labeling().clone();
                (acceptor.automaton().clone(), Some(labeling))
            } else {
                (parsed.automaton, None)
            };
            let cycles = all_cycles(&automaton);
            if count {
                println!("{}", cycles.len());
            }
            if bound {
                println!(
                    "{}",
                    cycle_count_bound(automaton.state_count(), automaton.alphabet().len())
                );
            }
            if !count && !bound {
                let n = automaton.state_count();
                for cycle in &cycles {
                    let body = match format {
                        CycleFormat::List => cycle.to_string(),
                        CycleFormat::Subsets => cycle.to_bitstring(n),
                    };
                    match (&labeling, format) {
                        (Some(map), CycleFormat::List) => {
                            println!("cycle: {body} -> {}", map[cycle])
                        }
                        (Some(map), CycleFormat::Subsets) => {
                            println!("subset: {body} -> {}", map[cycle])
                        }
                        (None, _) => println!("{body}"),
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ComparePosets { file_p, file_r } => {
            let p = parse_poset(&read(&file_p)?)
                .with_context(|| format!("parsing {}", file_p.display()))?;
            let r = parse_poset(&read(&file_r)?)
                .with_context(|| format!("parsing {}", file_r.display()))?;
            let holds = preceq(&p, &r);
            println!("{}", if holds { "LE" } else { "NOT-LE" });
            Ok(relation_code(holds))
        }
        Command::Unfold { file, limit } => {
            let p = parse_poset(&read(&file)?)
                .with_context(|| format!("parsing {}", file.display()))?;
            let limit = match limit {
                Some(l) => l,
                None => match std::env::var(UNFOLD_LIMIT_ENV) {
                    Ok(v) => v
                        .parse()
                        .with_context(|| format!("parsing {UNFOLD_LIMIT_ENV}={v}"))?,
                    Err(_) => DEFAULT_UNFOLD_LIMIT,
                },
            };
            let forest = unfold_with_limit(&p, limit)?;
            print!("{}", poset_to_sexpr(forest.as_poset()));
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval {
            file,
            prefix,
            period,
            strict_subsets,
        } => {
            let text = read(&file)?;
            let parsed =
                parse_automaton(&text).with_context(|| format!("parsing {}", file.display()))?;
            let has_labeling = parsed.acceptor.is_some();
            let automaton: Automaton = parsed.automaton;
            let prefix_letters = automaton.alphabet().parse_word(&prefix)?;
            let period_letters = automaton.alphabet().parse_word(&period)?;
            let word = UltimatelyPeriodicWord::new(prefix_letters, period_letters)?;
            let infinity = automaton.run_eval(&word)?;
            let ids: Vec<String> = infinity.iter().map(|s| s.to_string()).collect();
            let set = format!("{{{}}}", ids.join(","));
            if has_labeling {
                let (acceptor, warnings) = MullerKAcceptor::from_file(&text, strict_subsets)
                    .with_context(|| format!("parsing acceptor {}", file.display()))?;
                for w in warnings {
                    eprintln!("warning: {}: {w}", file.display());
                }
                let label = acceptor
                    .label_of(&Cycle::new(infinity))
                    .expect("infinity sets are cycles");
                println!("{set} -> {label}");
            } else {
                println!("{set}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen(args) => {
            anyhow::ensure!(
                (1..=26).contains(&args.alphabet_size),
                "--alphabet-size must be between 1 and 26"
            );
            anyhow::ensure!(args.k >= 1, "--k must be at least 1");
            anyhow::ensure!(args.depth <= 2, "--depth must be 0, 1 or 2");
            let cfg = GenConfig {
                seed: args.seed,
                states: parse_range(&args.states)?,
                nodes: parse_range(&args.nodes)?,
                alphabet_size: args.alphabet_size,
                k: args.k,
                depth: args.depth,
            };
            match args.kind {
                GenKind::Automaton => print!("{}", gen_automaton(&cfg).to_file_string()),
                GenKind::Acceptor => print!("{}", gen_acceptor(&cfg).to_file_string()),
                GenKind::Poset => print!("{}", poset_to_sexpr(&gen_poset(&cfg))),
                GenKind::Forest => print!("{}", poset_to_sexpr(gen_forest(&cfg).as_poset())),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench {
            families,
            sizes,
            reps,
            seed,
        } => {
            anyhow::ensure!(!sizes.is_empty(), "need at least one size");
            anyhow::ensure!(sizes.iter().all(|&s| s >= 1), "sizes must be at least 1");
            anyhow::ensure!(reps >= 1, "need at least one repetition");
            let mut rows = Vec::new();
            for name in families {
                let family: Family = name.parse().map_err(anyhow::Error::msg)?;
                rows.extend(scaling_run(family, &sizes, reps, seed));
            }
            print!("{}", timing_csv(&rows));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_range(text: &str) -> anyhow::Result<(usize, usize)> {
    let (lo, hi) = match text.split_once(':') {
        Some((lo, hi)) => (lo.trim().parse()?, hi.trim().parse()?),
        None => {
            let n = text.trim().parse()?;
            (n, n)
        }
    };
    anyhow::ensure!(lo >= 1 && lo <= hi, "invalid range {text:?}");
    Ok((lo, hi))
}

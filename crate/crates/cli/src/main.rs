//! `condan run` executes property suites and writes reports; `condan describe`
//! pretty-prints a serialized conditional object.
//!
//! Exit codes: 0 when every suite passes, 1 when a check fails, 2 on a
//! configuration, input or usage error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use condan::analysis::{AtomClosedSet, CondSequence, ConvexPiece};
use condan::io::{parse_document, Document, Object};
use condan::linear::{AtomBody, PNorm};
use condan_harness::{expand_suites, render_markdown, replay_case, run_suite, SuiteConfig, SuiteReport};

#[derive(Parser)]
#[command(name = "condan", version, about = "Conditional analysis suites and object inspection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Comma-separated suite names, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 2)]
    atoms: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 40)]
    trunc: usize,
    #[arg(long, default_value_t = 1000)]
    cases: usize,
    /// Upper bound on per-atom dimensions.
    #[arg(long, default_value_t = 5)]
    dim_cap: usize,
    /// Where to write the report.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run suites and print a summary table.
    Run(RunArgs),
    /// Re-run one case of a suite, as named by a witness.
    Replay {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        section: String,
        #[arg(long)]
        case: usize,
    },
    /// Pretty-print a serialized conditional object.
    Describe {
        #[arg(long)]
        input: PathBuf,
        /// Norms reported for vectors.
        #[arg(long, value_delimiter = ',', default_value = "l1,l2,linf")]
        norms: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match cli.command {
        Command::Run(args) => cmd_run(&args, None),
        Command::Replay { run, section, case } => cmd_run(&run, Some((&section, case))),
        Command::Describe { input, norms } => cmd_describe(&input, &norms),
    }
}

/// `CONDAN_THREADS` caps the worker pool; 0 or unset means one per core.
fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("CONDAN_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("CONDAN_THREADS must be a non-negative integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn cmd_run(args: &RunArgs, replay: Option<(&str, usize)>) -> ExitCode {
    let names = match expand_suites(&args.suite) {
        Ok(n) => n,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut reports = Vec::with_capacity(names.len());
    for name in names {
        let config = SuiteConfig {
            suite: name.into(),
            atoms: args.atoms,
            seed: args.seed,
            tol: args.tol,
            trunc: args.trunc,
            cases: args.cases,
            dim_cap: args.dim_cap,
        };
        let r = match replay {
            Some((section, index)) => replay_case(&config, section, index),
            None => run_suite(&config),
        };
        match r {
            Ok(r) => reports.push(r),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    print!("{}", summary_table(&reports));
    if let Some(path) = &args.report {
        let text = match args.format {
            Format::Json => serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n",
            Format::Markdown => render_markdown(&reports),
        };
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if reports.iter().all(SuiteReport::ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn summary_table(reports: &[SuiteReport]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<20} {:>7} {:>7} {:>7} {:>13} {:>11} {:>10}", "suite", "cases", "passed", "failed", "max_violation", "tolerance", "ms");
    for r in reports {
        let _ = writeln!(
            s,
            "{:<20} {:>7} {:>7} {:>7} {:>13.3e} {:>11.1e} {:>10}",
            r.suite, r.cases, r.passed, r.failed, r.max_violation, r.tolerance, r.runtime_ms
        );
    }
    let failed: usize = reports.iter().map(|r| r.failed).sum();
    let _ = writeln!(s, "{}", if failed == 0 { "PASS".to_string() } else { format!("FAIL ({failed} failing cases)") });
    s
}

fn cmd_describe(input: &PathBuf, norms: &[String]) -> ExitCode {
    let mut kinds = Vec::new();
    for n in norms {
        match PNorm::parse(n) {
            Some(p) => kinds.push(p),
            None => {
                eprintln!("error: unknown norm `{n}` (expected l1, l2 or linf)");
                return ExitCode::from(2);
            }
        }
    }
    let text = match std::fs::read_to_string(input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", input.display());
            return ExitCode::from(2);
        }
    };
    match parse_document(&text) {
        Ok(doc) => {
            print!("{}", describe(&doc, &kinds));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}: {e}", input.display());
            ExitCode::from(2)
        }
    }
}

fn fmt_vec(v: &[f64]) -> String {
    format!("[{}]", v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(", "))
}

fn body_table(s: &mut String, indent: &str, b: &AtomBody) {
    let _ = writeln!(s, "{indent}dim {}, {} directions, {}", b.dim(), b.facets().len(), if b.is_bounded() { "bounded" } else { "unbounded" });
    for f in b.facets() {
        let _ = writeln!(s, "{indent}  {:<40} {}", fmt_vec(&f.u), f.c);
    }
}

fn piece(s: &mut String, p: &ConvexPiece) {
    match p {
        ConvexPiece::IntervalProduct(b) => {
            let f: Vec<String> = b.iter().map(|(lo, hi)| format!("[{lo}, {hi}]")).collect();
            let _ = writeln!(s, "    interval product {}", f.join(" × "));
        }
        ConvexPiece::HBody { center, body } => {
            let _ = writeln!(s, "    body centered at {}", fmt_vec(center));
            body_table(s, "      ", body);
        }
    }
}

fn describe(doc: &Document, norms: &[PNorm]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "kind: {}", doc.object.kind());
    let _ = writeln!(s, "atoms: {}", doc.algebra.atom_count());
    match &doc.object {
        Object::Condition(c) => {
            let _ = writeln!(s, "condition: {c}");
        }
        Object::Partition(p) => {
            let _ = writeln!(s, "owner: {}", p.owner());
            for (i, b) in p.blocks().iter().enumerate() {
                let _ = writeln!(s, "block {}: {b}", i + 1);
            }
        }
        Object::Real(r) => {
            let _ = writeln!(s, "condition: {}", r.on());
            let _ = writeln!(s, "support: {}", condan::conditional::support(r, &0.0));
            for (t, v) in r.iter() {
                let _ = writeln!(s, "atom {t}: {v}");
            }
        }
        Object::Nat(n) => {
            let _ = writeln!(s, "condition: {}", n.on());
            for (t, v) in n.value().iter() {
                let _ = writeln!(s, "atom {t}: {v}");
            }
        }
        Object::Vector(x) => {
            let _ = writeln!(s, "condition: {}", x.on());
            let nonzero = x.iter().filter(|(_, v)| v.iter().any(|a| *a != 0.0)).map(|(t, _)| t);
            let _ = writeln!(s, "support: {}", doc.algebra.condition(nonzero).expect("atoms of the document"));
            for (t, v) in x.iter() {
                let ns: Vec<String> = norms.iter().map(|p| format!("{} {}", p.name(), p.eval(v))).collect();
                let _ = writeln!(s, "atom {t}: {}  ({})", fmt_vec(v), ns.join(", "));
            }
        }
        Object::RealSet(set) => {
            let _ = writeln!(s, "condition: {}", set.on());
            for (t, vs) in set.per_atom() {
                let _ = writeln!(s, "atom {t}: {{{}}}", vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "));
            }
        }
        Object::VectorSet(set) => {
            let _ = writeln!(s, "condition: {}", set.on());
            for (t, vs) in set.per_atom() {
                let _ = writeln!(s, "atom {t}: {{{}}}", vs.iter().map(|v| fmt_vec(v)).collect::<Vec<_>>().join(", "));
            }
        }
        Object::Body(b) => {
            let _ = writeln!(s, "condition: {}", b.on());
            for (t, a) in b.iter() {
                let _ = writeln!(s, "atom {t}: direction / offset");
                body_table(&mut s, "  ", a);
            }
        }
        Object::Map(m) => {
            let _ = writeln!(s, "condition: {}", m.on());
            for (t, a) in m.iter() {
                let _ = writeln!(s, "atom {t}: {}×{}", a.nrows(), a.ncols());
                for row in a.row_iter() {
                    let _ = writeln!(s, "  {}", fmt_vec(&row.iter().copied().collect::<Vec<_>>()));
                }
            }
        }
        Object::Norm(n) => {
            let _ = writeln!(s, "condition: {}", n.on());
            for (t, a) in n.iter() {
                let _ = writeln!(s, "atom {t}: {}", a.name());
            }
        }
        Object::ClosedSet(c) => {
            let _ = writeln!(s, "condition: {}", c.on());
            for (t, set) in c.iter() {
                let n = set.pieces().len();
                let form = match set {
                    AtomClosedSet::Convex(_) => "convex".to_string(),
                    AtomClosedSet::FiniteUnion(_) => format!("union of {n} pieces"),
                };
                let _ = writeln!(s, "atom {t}: {form}");
                for p in set.pieces() {
                    piece(&mut s, p);
                }
            }
        }
        Object::Sequence(seq) => match seq {
            CondSequence::Table(terms) => {
                let _ = writeln!(s, "table of {} terms", terms.len());
                for (k, x) in terms.iter().enumerate() {
                    let cells: Vec<String> = x.iter().map(|(t, v)| format!("atom {t}: {}", fmt_vec(v))).collect();
                    let _ = writeln!(s, "x_{}: {}", k + 1, cells.join("; "));
                }
            }
            CondSequence::Formula(f) => {
                let _ = writeln!(s, "formula on {}", f.on());
                for (t, coords) in f.iter() {
                    let _ = writeln!(s, "atom {t}:");
                    for (i, c) in coords.iter().enumerate() {
                        let sign = if c.alternating { "·(-1)^k" } else { "" };
                        let _ = writeln!(s, "  [{i}] {} + {}{sign}·k^{}·{}^k", c.offset, c.scale, c.power, c.ratio);
                    }
                }
            }
        },
    }
    s
}

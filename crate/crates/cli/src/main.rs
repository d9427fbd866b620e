use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::mpsc;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hashswap::bounds::{self, BoundSequence, GuaranteeRule, MinimizeOptions, NkSolver};
use hashswap::construction::{certify_no_transversal, drisko};
use hashswap::oracle::{self, OracleConfig, Witness};
use hashswap::search::{verify_order, Algorithm, SearchOptions, SearchReport};
use hashswap::{parse_grid, PartialLatinArray};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const HEARTBEAT: Duration = Duration::from_secs(30);

#[derive(Parser)]
#[command(name = "hashswap", version, about = "Near transversals in Latin arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a grid file holds a partial Latin array.
    Verify {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run the #-swap search from the seed of the given order.
    Near {
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum, default_value_t = Alg::Advanced)]
        alg: Alg,
        /// Disable marker resolution and corner marking.
        #[arg(long)]
        swap_only: bool,
        /// Close branches that cannot complete to a Latin square.
        #[arg(long)]
        square_prune: bool,
        /// Write each inconclusive array to this directory.
        #[arg(long, value_name = "DIR")]
        failures: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Worker threads.
        #[arg(long, value_name = "T", default_value_t = 1)]
        parallel: usize,
        /// Include wall time in the JSON report (otherwise it goes to stderr).
        #[arg(long)]
        timing: bool,
    },
    /// Exact brute-force answers for a small array.
    Oracle {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: OracleMode,
        /// Largest order searched.
        #[arg(long, env = "HASHSWAP_ORACLE_CAP", default_value_t = oracle::DEFAULT_ORDER_CAP)]
        cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Print the column-Latin array without transversals.
    Drisko {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        /// Check the no-transversal certificate.
        #[arg(long)]
        certify: bool,
        #[arg(long)]
        json: bool,
    },
    /// Minimal n_k sequences and guaranteed lengths.
    Bounds {
        #[command(subcommand)]
        command: BoundsCommand,
    },
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Least admissible n_k for k = 2..=K.
    Solve {
        #[arg(long)]
        max_k: usize,
        #[arg(long, default_value_t = 11)]
        n2: u64,
        #[arg(long)]
        json: bool,
    },
    /// Check a comma-separated sequence n_2,n_3,...
    Check {
        sequence: String,
        #[arg(long)]
        json: bool,
    },
    /// Guaranteed partial transversal length for an order.
    Lookup {
        #[arg(long)]
        order: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Alg {
    Naive,
    Advanced,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleMode {
    MaxWeight,
    MaxPartial,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify { file, json } => cmd_verify(&file, json),
        Command::Near {
            order,
            alg,
            swap_only,
            square_prune,
            failures,
            json,
            parallel,
            timing,
        } => {
            let options = SearchOptions {
                swap_only,
                square_prune,
                threads: parallel.max(1),
                capture_failures: true,
                instrumented: false,
            };
            let algorithm = match alg {
                Alg::Naive => Algorithm::Naive,
                Alg::Advanced => Algorithm::Advanced,
            };
            cmd_near(order, algorithm, &options, failures.as_deref(), json, timing)
        }
        Command::Oracle { file, mode, cap, json } => cmd_oracle(&file, mode, cap, json),
        Command::Drisko {
            rows,
            cols,
            certify,
            json,
        } => cmd_drisko(rows, cols, certify, json),
        Command::Bounds { command } => match command {
            BoundsCommand::Solve { max_k, n2, json } => cmd_bounds_solve(max_k, n2, json),
            BoundsCommand::Check { sequence, json } => cmd_bounds_check(&sequence, json),
            BoundsCommand::Lookup { order, json } => cmd_bounds_lookup(order, json),
        },
    }
}

fn print_json(v: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn read(file: &Path) -> Result<String> {
    fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))
}

fn cmd_verify(file: &Path, as_json: bool) -> Result<ExitCode> {
    let text = read(file)?;
    let a = parse_grid(&text).with_context(|| format!("cannot parse {}", file.display()))?;
    let report = a.check_latin();
    if as_json {
        print_json(&json!({
            "file": file.display().to_string(),
            "rows": a.rows(),
            "cols": a.cols(),
            "valid": report.is_latin(),
            "row_violations": report.row_violations,
            "col_violations": report.col_violations,
        }))?;
    } else if report.is_latin() {
        println!(
            "valid: {}x{} array, {} symbols, {} markers",
            a.rows(),
            a.cols(),
            a.concrete_count(),
            a.marker_count()
        );
    } else {
        println!("invalid: {} repeated cells", report.violations().len());
        for &(r, c) in &report.row_violations {
            println!("  ({r}, {c}): symbol {} repeated in row {r}", a.get(r, c));
        }
        for &(r, c) in &report.col_violations {
            println!("  ({r}, {c}): symbol {} repeated in column {c}", a.get(r, c));
        }
    }
    Ok(if report.is_latin() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Runs `f` while printing a progress line to stderr every so often.
fn with_heartbeat<T>(label: &str, f: impl FnOnce() -> T) -> T {
    let (tx, rx) = mpsc::channel::<()>();
    let start = Instant::now();
    std::thread::scope(|s| {
        s.spawn(move || {
            while let Err(mpsc::RecvTimeoutError::Timeout) = rx.recv_timeout(HEARTBEAT) {
                eprintln!("{label}: still running after {}s", start.elapsed().as_secs());
            }
        });
        let out = f();
        drop(tx);
        out
    })
}

fn cmd_near(
    order: usize,
    algorithm: Algorithm,
    options: &SearchOptions,
    failures_dir: Option<&Path>,
    as_json: bool,
    timing: bool,
) -> Result<ExitCode> {
    let start = Instant::now();
    let report = with_heartbeat(&format!("order {order} {algorithm} search"), || {
        verify_order(order, algorithm, options)
    })?;
    let wall = start.elapsed().as_secs_f64();
    if let Some(dir) = failures_dir {
        write_failures(dir, &report)?;
    }
    let verdict = if report.verdict.proved { "proved" } else { "inconclusive" };
    if as_json {
        let mut v = json!({
            "command": "near",
            "version": VERSION,
            "inputs": {
                "order": order,
                "algorithm": algorithm,
                "options": report.options,
            },
            "verdict": verdict,
            "stats": report.stats,
            "failure_count": report.failure_count(),
            "assumes_order_below": report.assumes_order_below,
        });
        if timing {
            v["wall_time"] = json!(wall);
        }
        print_json(&v)?;
    } else {
        let s = &report.stats;
        println!("order {order}, {algorithm} search: {verdict}");
        println!("  true leaves     {}", s.true_leaves);
        println!("  false leaves    {}", s.false_leaves);
        println!("  escalations     {:?}", s.cycle_backs_at);
        println!("  pruned          {}", s.pruned);
        println!("  nodes           {}", s.nodes);
        println!("  max depth       {}", s.max_depth);
        println!("  failures        {}", report.failure_count());
        if let Some(m) = report.assumes_order_below {
            println!("  assumes every Latin array of order {m} has a near transversal");
        }
    }
    if !(as_json && timing) {
        eprintln!("wall time: {wall:.3}s");
    }
    Ok(if report.verdict.proved {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn write_failures(dir: &Path, report: &SearchReport) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let count = report.failure_count();
    let width = count.to_string().len().max(4);
    for (i, f) in report.verdict.failures.iter().enumerate() {
        let cols: Vec<String> = f.diagonal.columns().iter().map(|c| c.to_string()).collect();
        let body = format!(
            "# inconclusive array {i} of {count}, order {}\n# diagonal columns: {}\n{}",
            report.order,
            cols.join(" "),
            f.array.to_grid_string()
        );
        let path = dir.join(format!("failure-{i:0width$}.txt"));
        fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn cmd_oracle(file: &Path, mode: OracleMode, cap: usize, as_json: bool) -> Result<ExitCode> {
    let text = read(file)?;
    let a: PartialLatinArray = parse_grid(&text).with_context(|| format!("cannot parse {}", file.display()))?;
    let cfg = OracleConfig { order_cap: cap };
    let (name, result) = match mode {
        OracleMode::MaxWeight => ("max-weight", oracle::max_diagonal_weight(&a, &cfg)?),
        OracleMode::MaxPartial => ("max-partial", oracle::max_partial_transversal_length(&a, &cfg)?),
    };
    if as_json {
        print_json(&json!({
            "mode": name,
            "value": result.value,
            "witness": result.witness,
            "nodes_explored": result.nodes_explored,
        }))?;
    } else {
        println!("{name}: {}", result.value);
        match &result.witness {
            Witness::Diagonal(d) => {
                let cols: Vec<String> = d.columns().iter().map(|c| c.to_string()).collect();
                println!("diagonal columns: {}", cols.join(" "));
            }
            Witness::Transversal(t) => {
                let cells: Vec<String> =
                    t.entries().iter().map(|e| format!("({},{})={}", e.row, e.col, e.symbol)).collect();
                println!("cells: {}", cells.join(" "));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_drisko(m: usize, n: usize, certify: bool, as_json: bool) -> Result<ExitCode> {
    let a = drisko(m, n)?;
    let cert = if certify {
        Some(certify_no_transversal(&a)?)
    } else {
        None
    };
    if as_json {
        let rows: Vec<Vec<String>> =
            (0..m).map(|i| a.row(i).iter().map(|c| c.to_string()).collect()).collect();
        let mut v = json!({ "m": m, "n": n, "rows": rows });
        if let Some(c) = &cert {
            v["certificate"] = json!(c.summary());
        }
        print_json(&v)?;
    } else {
        print!("{}", a.to_grid_string());
        if let Some(c) = &cert {
            println!(
                "certificate: valid, second-block count in {}..={}, never a multiple of {}: {}",
                c.bound_count_range.0, c.bound_count_range.1, c.m, c.conclusion
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bounds_solve(max_k: usize, n2: u64, as_json: bool) -> Result<ExitCode> {
    if max_k < 2 {
        bail!("--max-k must be at least 2");
    }
    let solver = NkSolver::new(&MinimizeOptions {
        n2,
        ..Default::default()
    })?;
    let mut levels = Vec::new();
    if !as_json {
        println!("{:>3}  {:>6}  sequence", "k", "n_k");
    }
    for r in solver.take(max_k - 1) {
        if as_json {
            levels.push(json!({ "k": r.k, "n_k": r.n_k, "witness": r.witness }));
        } else {
            println!("{:>3}  {:>6}  {}", r.k, r.n_k, r.witness);
        }
    }
    if as_json {
        print_json(&Value::Array(levels))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bounds_check(sequence: &str, as_json: bool) -> Result<ExitCode> {
    let s: BoundSequence = sequence.parse()?;
    if s.is_empty() {
        bail!("empty sequence");
    }
    let outcome = bounds::check_sequence(&s);
    if as_json {
        print_json(&json!({
            "sequence": s,
            "valid": outcome.is_ok(),
            "violation": outcome.err(),
        }))?;
    } else {
        match outcome {
            Ok(()) => println!("valid: {s}"),
            Err(v) => println!("invalid: {s}: {v}"),
        }
    }
    Ok(if outcome.is_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_bounds_lookup(order: u64, as_json: bool) -> Result<ExitCode> {
    if order == 0 {
        bail!("--order must be positive");
    }
    let g = bounds::guarantee_length(order);
    let (rule, k) = match g.rule {
        GuaranteeRule::SmallOrder => ("small_order", None),
        GuaranteeRule::Table { k } => ("table", Some(k)),
        GuaranteeRule::SquareRoot => ("square_root", None),
    };
    if as_json {
        let mut v = json!({ "n": g.n, "length": g.length, "rule": rule });
        if let Some(k) = k {
            v["k"] = json!(k);
        }
        print_json(&v)?;
    } else {
        let why = match g.rule {
            GuaranteeRule::SmallOrder => "orders up to 11 have a near transversal".to_string(),
            GuaranteeRule::Table { k } => format!("n_{k} = {} exceeds the order", bounds::MIN_NK_TABLE[k - 2]),
            GuaranteeRule::SquareRoot => "ceil(n - sqrt(n))".to_string(),
        };
        println!("order {}: partial transversal of length at least {} ({why})", g.n, g.length);
    }
    Ok(ExitCode::SUCCESS)
}

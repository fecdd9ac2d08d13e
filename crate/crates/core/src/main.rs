use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pdo_lab::grid::{ExponentTriple, GridSpec};
use pdo_lab::lp_decomp::build_family;
use pdo_lab::operators::{compute_kernel, fit_kernel_decay, KernelIndex};
use pdo_lab::suite::{load_config, parse_symbol, run_suite, RunOptions};
use pdo_lab::symbols::{estimate_seminorms, random_table_symbol, ProbeSet};
use pdo_lab::verify::{bilinear_threshold, verify_lemma61, BoundReport};

#[derive(Parser)]
#[command(name = "pdo-lab", version, about = "Numerical checks for multilinear pseudodifferential operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment of a suite file and write reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Replaces every base seed in the suite.
        #[arg(long)]
        seed: Option<u64>,
        /// Caps grid sizes (points per axis).
        #[arg(long = "grid")]
        grid: Option<usize>,
        #[arg(long, default_value = "reports")]
        out: PathBuf,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the bilinear order threshold at an exponent triple.
    Threshold {
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, value_parser = parse_ext)]
        p: f64,
        #[arg(long, value_parser = parse_ext)]
        q: f64,
        #[arg(long, value_parser = parse_ext)]
        r: f64,
        /// Also print the weaker threshold and the sub-triangle.
        #[arg(long)]
        verbose: bool,
    },
    /// Fit the kernel decay of a symbol, e.g. `--symbol osc:m=-1,rho=0.5 --orders 2`.
    KernelDecay {
        #[arg(long)]
        symbol: String,
        /// One decay order per block, comma separated.
        #[arg(long, value_delimiter = ',')]
        orders: Vec<f64>,
        #[arg(long = "grid", default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 16.0)]
        half_period: f64,
        /// `summed`, `total` or a dyadic index.
        #[arg(long, default_value = "summed")]
        kernel: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate symbol seminorm constants.
    Seminorms {
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value_t = 1)]
        blocks: usize,
        #[arg(long, default_value_t = 2)]
        alpha: usize,
        #[arg(long, default_value_t = 0)]
        beta: usize,
        #[arg(long, default_value_t = 64.0)]
        radius: f64,
    },
    /// Check the L2 bound of S and its sharpness on random tabulated symbols.
    Lemma61 {
        #[arg(long = "grid", default_value_t = 32)]
        grid: usize,
        #[arg(long, default_value_t = 4.0)]
        half_period: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        symbols: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_ext(s: &str) -> Result<f64, String> {
    match s.trim() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        t => t.parse().map_err(|_| format!("not an exponent: {s}")),
    }
}

fn print_report(r: &BoundReport) {
    println!("{}: {:?}", r.experiment, r.verdict);
    for l in &r.levels {
        println!("  {:<24} G={:<5} sup={:.6e} ({} trials)", l.group, l.level, l.sup, l.trials);
    }
    for n in &r.notes {
        println!("  note: {n}");
    }
    println!("  criterion: {}", r.criterion);
}

fn code(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode, (u8, String)> {
    let invalid = |e: pdo_lab::Error| (2u8, e.to_string());
    match cli.command {
        Command::Run { config, seed, grid, out, jobs } => {
            let cfg = load_config(&config).map_err(invalid)?;
            let opts = RunOptions { seed, max_grid: grid, jobs };
            let outcome = run_suite(&cfg, &opts, Some(&out)).map_err(|e| (1, e.to_string()))?;
            print!("{}", outcome.summary_table());
            Ok(ExitCode::from(outcome.exit_code() as u8))
        }
        Command::Threshold { rho, n, p, q, r, verbose } => {
            let t = ExponentTriple::new(p, q, r).map_err(invalid)?;
            let th = bilinear_threshold(rho, n, &t);
            println!("{}", th.stronger);
            if verbose {
                println!("weaker {}", th.weaker);
                println!("region {:?}", th.region);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::KernelDecay { symbol, orders, grid, half_period, kernel, out } => {
            if orders.is_empty() {
                return Err((2, "at least one decay order is required".into()));
            }
            let spec = parse_symbol(&symbol, orders.len()).map_err(invalid)?;
            let a = spec.build().map_err(invalid)?;
            let g = GridSpec::new(a.arity().n, a.arity().blocks, half_period, grid).map_err(invalid)?;
            let which = match kernel.as_str() {
                "summed" => KernelIndex::Summed,
                "total" => KernelIndex::Total,
                k => KernelIndex::Piece(k.parse().map_err(|_| (2, format!("unknown kernel {k:?}")))?),
            };
            let fam = build_family(&g).map_err(invalid)?;
            let k = compute_kernel(&a, &fam, which, &g).map_err(invalid)?;
            let report = fit_kernel_decay(&k, &orders).map_err(invalid)?;
            print_report(&report);
            if let Some(dir) = out {
                report.write_to(&dir).map_err(|e| (1, e.to_string()))?;
            }
            Ok(code(report.passed()))
        }
        Command::Seminorms { symbol, blocks, alpha, beta, radius } => {
            let a = parse_symbol(&symbol, blocks).and_then(|s| s.build()).map_err(invalid)?;
            let est = estimate_seminorms(&a, alpha, beta, &ProbeSet::standard(a.arity(), radius)).map_err(invalid)?;
            println!("{}", serde_json::to_string_pretty(&est).map_err(|e| (1, e.to_string()))?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Lemma61 { grid, half_period, seed, symbols, trials, out } => {
            let g = GridSpec::new(1, 2, half_period, grid).map_err(invalid)?;
            let mut ok = true;
            for s in seed..seed + symbols {
                let a = random_table_symbol(&g, s, false, None).map_err(invalid)?;
                let report = verify_lemma61(&a, &g, trials, s).map_err(invalid)?;
                print_report(&report);
                if let Some(dir) = &out {
                    report.write_as(dir, &format!("s_operator_{s}")).map_err(|e| (1, e.to_string()))?;
                }
                ok &= report.passed();
            }
            Ok(code(ok))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(c) => c,
        Err((c, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(c)
        }
    }
}

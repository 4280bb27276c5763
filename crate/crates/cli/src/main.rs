//! `shiftsieve`: batch experiment runner for shifted convolution sums of
//! Hecke eigenvalues. Every subcommand writes a CSV (or JSON) data file
//! plus a self-describing JSON summary into the output directory.
//!
//! Exit codes: 0 ok, 2 configuration error, 3 range/capacity error,
//! 4 consistency error.

mod commands;
mod config;
mod report;

use clap::{Parser, Subcommand};
use config::ConfigFile;
use report::OutFormat;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "shiftsieve", version, about)]
struct Cli {
    /// Line-based `key = value` configuration file; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV/JSON reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Rayon worker threads. Outputs are byte-identical for any value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Data file format (the summary is always JSON).
    #[arg(long, global = true)]
    format: Option<OutFormat>,

    /// Eigenvalue source: the built-in discriminant form or a file.
    #[arg(long, global = true)]
    source: Option<String>,

    /// Eigenvalue table path (required with --source file).
    #[arg(long, global = true)]
    table: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an eigenvalue table and dump its head.
    Eigen {
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        dump_limit: Option<u64>,
    },
    /// Shifted sums: totals, partitions, and the decay table.
    Sums {
        #[arg(long, allow_hyphen_values = true)]
        ell: Option<String>,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        z: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        cutoff_exp: Option<f64>,
    },
    /// Sieve weights, the exhaustive residual audit, and the coupled
    /// bound factors.
    Sieve {
        #[arg(long)]
        z: Option<f64>,
        #[arg(long)]
        level: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        ell: Option<i64>,
        #[arg(long)]
        exclude: Option<u64>,
        #[arg(long)]
        audit_max: Option<u64>,
    },
    /// Symmetric-power products, the main-term factor, and the
    /// polynomial majorant scans.
    Euler {
        #[arg(long)]
        z: Option<f64>,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        ab_scan: bool,
    },
    /// Progression sums, character reconstruction, and smoothed dyadic
    /// sums.
    Dirichlet {
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        x: Option<f64>,
    },
    /// K-Bessel audit: Mellin identity, asymptotics, normalized grids,
    /// and the archimedean kernel.
    Bessel {},
    /// Full pipeline reproductions.
    Experiment {
        #[command(subcommand)]
        which: Experiment,
    },
}

#[derive(Subcommand)]
enum Experiment {
    /// Decay of S_l(x)/x with the sieve main-term assembly.
    Theorem1 {
        #[arg(long, allow_hyphen_values = true)]
        ell: Option<String>,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        z: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        cutoff_exp: Option<f64>,
        #[arg(long)]
        level_exp: Option<f64>,
    },
}

fn main() {
    std::process::exit(real_main());
}

#[derive(serde::Serialize)]
struct ErrorReport<'a> {
    kind: &'a str,
    exit: i32,
    message: String,
}

fn fail(kind: &str, exit: i32, message: String) -> i32 {
    let report = ErrorReport {
        kind,
        exit,
        message,
    };
    eprintln!(
        "{}",
        serde_json::json!({ "error": report })
    );
    exit
}

fn core_error_exit(e: shiftsieve_core::Error) -> i32 {
    use shiftsieve_core::Error::*;
    match e {
        Capacity(_) | Range(_) => fail("range", 3, e.to_string()),
        Consistency(_) | Singularity(_) => fail("consistency", 4, e.to_string()),
        _ => fail("config", 2, e.to_string()),
    }
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version print normally; real parse errors exit 2
            if e.use_stderr() {
                let _ = e.print();
                return 2;
            }
            let _ = e.print();
            return 0;
        }
    };

    let cfg = match &cli.config {
        Some(path) => match ConfigFile::load(path) {
            Ok(c) => c,
            Err(msg) => return fail("config", 2, msg),
        },
        None => ConfigFile::empty(),
    };

    macro_rules! resolve {
        ($flag:expr, $key:literal, $default:expr) => {
            match cfg.resolve($flag, $key, $default) {
                Ok(v) => v,
                Err(msg) => return fail("config", 2, msg),
            }
        };
    }

    let out_dir = resolve!(cli.out.clone(), "out", PathBuf::from("out"));
    let threads = resolve!(cli.threads, "threads", 1usize);
    let format = resolve!(cli.format, "format", OutFormat::Csv);
    let source = resolve!(cli.source.clone(), "source", "delta".to_string());
    let table_path = match cfg.resolve_opt(cli.table.clone(), "table") {
        Ok(v) => v,
        Err(msg) => return fail("config", 2, msg),
    };
    if source != "delta" && source != "file" {
        return fail("config", 2, format!("source must be delta or file, got `{source}`"));
    }
    if source == "file" && table_path.is_none() {
        return fail("config", 2, "--table is required with --source file".into());
    }

    if let Err(e) = std::fs::create_dir_all(&out_dir) {
        return fail("config", 2, format!("cannot create output dir: {e}"));
    }
    if rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build_global()
        .is_err()
    {
        // pool already installed (e.g. under a test harness); proceed
    }

    let mut inputs: BTreeMap<String, String> = BTreeMap::new();
    inputs.insert("source".into(), source.clone());
    if let Some(p) = &table_path {
        inputs.insert("table".into(), p.display().to_string());
    }

    let env = commands::Env {
        out_dir,
        format,
        source,
        table_path,
        inputs,
    };

    let result = match cli.cmd {
        Command::Eigen { n, dump_limit } => {
            let n = resolve!(n, "n", 10_000u64);
            let dump = resolve!(dump_limit, "dump_limit", 1000u64);
            commands::eigen(env, n, dump)
        }
        Command::Sums {
            ell,
            x,
            z,
            c,
            cutoff_exp,
        } => {
            let ell = resolve!(ell, "ell", "1".to_string());
            let x = resolve!(x, "x", "1000,10000,100000".to_string());
            let z = match cfg.resolve_opt(z, "z") {
                Ok(v) => v,
                Err(msg) => return fail("config", 2, msg),
            };
            let c = resolve!(c, "c", 1.0f64);
            let cutoff = resolve!(cutoff_exp, "cutoff_exp", 1.0 / 16.0);
            commands::sums(env, &ell, &x, z, c, cutoff)
        }
        Command::Sieve {
            z,
            level,
            ell,
            exclude,
            audit_max,
        } => {
            let z = resolve!(z, "z", 13.0f64);
            let level = resolve!(level, "level", 1.0e6_f64);
            let ell = resolve!(ell, "ell", 1i64);
            let exclude = resolve!(exclude, "exclude", 1u64);
            let audit_max = resolve!(audit_max, "audit_max", 100_000u64);
            commands::sieve(env, z, level, ell, exclude, audit_max)
        }
        Command::Euler { z, x, c, ab_scan } => {
            let z = resolve!(z, "z", 10_000.0f64);
            let x = resolve!(x, "x", 1.0e6_f64);
            let c = resolve!(c, "c", 1.0f64);
            let scan = ab_scan || cfg.get("ab_scan").map(|v| v == "true") == Some(true);
            commands::euler(env, z, x, c, scan)
        }
        Command::Dirichlet { q, x } => {
            let q = resolve!(q, "q", "3,5,7,11".to_string());
            let x = resolve!(x, "x", 1.0e6_f64);
            commands::dirichlet(env, &q, x)
        }
        Command::Bessel {} => commands::bessel(env),
        Command::Experiment { which } => match which {
            Experiment::Theorem1 {
                ell,
                x,
                z,
                c,
                cutoff_exp,
                level_exp,
            } => {
                let ell = resolve!(ell, "ell", "1,2,3".to_string());
                let x = resolve!(x, "x", "1000,10000,100000,1000000,10000000".to_string());
                let z = match cfg.resolve_opt(z, "z") {
                    Ok(v) => v,
                    Err(msg) => return fail("config", 2, msg),
                };
                let c = resolve!(c, "c", 1.0f64);
                let cutoff = resolve!(cutoff_exp, "cutoff_exp", 1.0 / 16.0);
                let level = resolve!(level_exp, "level_exp", 1.0 / 64.0);
                commands::experiment_theorem1(env, &ell, &x, z, c, cutoff, level)
            }
        },
    };

    match result {
        Ok(()) => 0,
        Err(commands::CliError::Config(msg)) => fail("config", 2, msg),
        Err(commands::CliError::Core(e)) => core_error_exit(e),
        Err(commands::CliError::Io(e)) => fail("config", 2, format!("io: {e}")),
    }
}

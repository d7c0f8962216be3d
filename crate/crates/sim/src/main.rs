use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use lp_sim::{record, registry, run_path, EXIT_SCHEMA};

#[derive(Parser)]
#[command(name = "lp-sim", version, about = "Runs the lattice multi-time verification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more experiment configs; the exit code is the worst one.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
    /// List the experiments with the criterion each one settles.
    List,
    /// Merge the series of a record into a long-format plot.csv.
    Plot { record: PathBuf },
    /// Print the default config of an experiment.
    Template { id: String },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    lp_sim::init_thread_pool();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { configs } => {
            let results: Vec<_> = configs.par_iter().map(|c| (c, run_path(c))).collect();
            for (path, (code, rec)) in &results {
                match rec {
                    Some(r) => {
                        let status = if r.passed { "PASS" } else { "FAIL" };
                        println!("{status} {} ({})", r.experiment, path.display());
                        for s in r.scalars.iter().filter(|s| !s.passed) {
                            println!("  failed {} = {:e} ({:?})", s.name, s.value, s.bound);
                        }
                        if let Some(e) = &r.error {
                            println!("  error: {e}");
                        }
                    }
                    None => println!("ERROR {} (exit {code})", path.display()),
                }
            }
            results.iter().map(|(_, (c, _))| *c).max().unwrap_or(0)
        }
        Command::List => {
            print!("{}", registry::table());
            0
        }
        Command::Plot { record } => match record::emit_plot_data(&record) {
            Ok(p) => {
                println!("{}", p.display());
                0
            }
            Err(e) => {
                eprintln!("plot: {e}");
                EXIT_SCHEMA
            }
        },
        Command::Template { id } => match registry::find(&id) {
            Some(exp) => {
                print!("{}", (exp.defaults)().to_toml());
                0
            }
            None => {
                eprintln!("unknown experiment id `{id}`");
                EXIT_SCHEMA
            }
        },
    };
    ExitCode::from(code as u8)
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fns_lab::{apply_overrides, exit, output_dir, parse_config, ExperimentConfig, ExperimentKind, Overrides};

#[derive(Parser)]
#[command(name = "fns-lab", version, about = "Numerical experiments for the fractional Navier–Stokes equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a configuration file.
    Run {
        config: PathBuf,
        /// Output directory; must be absent or empty.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Seed for random field families.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (defaults to the number of cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a configuration file and report every problem in it.
    Validate { config: PathBuf },
    /// List the experiment kinds.
    ListExperiments,
}

fn load(path: &Path) -> Result<ExperimentConfig, i32> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(exit::USAGE);
        }
    };
    parse_config(&text).map_err(|errs| {
        eprintln!("{}: {} error(s)", path.display(), errs.0.len());
        for e in &errs.0 {
            eprintln!("  {e}");
        }
        exit::USAGE
    })
}

fn dispatch(cli: Cli) -> i32 {
    match cli.command {
        Command::ListExperiments => {
            for kind in ExperimentKind::ALL {
                println!("{:<20} {}", kind.name(), kind.describe());
            }
            exit::SUCCESS
        }
        Command::Validate { config } => match load(&config) {
            Ok(cfg) => {
                println!("{}: valid {} experiment", config.display(), cfg.kind);
                for line in cfg.echo() {
                    println!("  {line}");
                }
                exit::SUCCESS
            }
            Err(code) => code,
        },
        Command::Run {
            config,
            output,
            seed,
            threads,
        } => {
            let mut cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            apply_overrides(&mut cfg, &Overrides { output, seed });
            if let Some(n) = threads {
                if n == 0 {
                    eprintln!("error: --threads must be at least 1");
                    return exit::USAGE;
                }
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("error: cannot configure the thread pool: {e}");
                    return exit::USAGE;
                }
            }
            match fns_lab::run(&cfg) {
                Ok((manifest, dir)) => {
                    print!("{}", manifest.summary());
                    println!("artifacts in {}", dir.display());
                    manifest.exit_code
                }
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", output_dir(&cfg).display());
                    exit::USAGE
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { 0 });
        }
    };
    ExitCode::from(dispatch(cli) as u8)
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bhk::emit::emit_grid;
use bhk::report::{timing_path, write_timing, RunConfig};
use bhk::suites::{run_suite, Suite};

#[derive(Parser)]
#[command(name = "bhk", about = "Laplace-Bessel harmonic analysis verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write a JSON report.
    Run {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        config: PathBuf,
        /// Report path; defaults to the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; overrides the THREADS environment variable.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Write a registered test function as a grid CSV.
    Emit {
        #[arg(long)]
        function: String,
        /// Also write its Fourier-Bessel transform to `<stem>.transform.csv`.
        #[arg(long)]
        transform: bool,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn init_threads(flag: Option<usize>) -> Result<(), String> {
    let env = std::env::var("THREADS").ok();
    let n = match (flag, env) {
        (Some(n), _) => n,
        (None, Some(s)) => s.trim().parse().map_err(|_| format!("THREADS={s:?} is not a count"))?,
        (None, None) => return Ok(()),
    };
    if n == 0 {
        return Err("thread count must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { suite, config, out, threads } => {
            if let Err(e) = init_threads(threads) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            let (suite, config) = match (suite.parse::<Suite>(), RunConfig::load(&config)) {
                (Ok(s), Ok(c)) => (s, c),
                (Err(e), _) | (_, Err(e)) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let out = out.unwrap_or_else(|| PathBuf::from(&config.output));
            let (report, timings) = match run_suite(&config, suite) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Err(e) = report.write(&out).and_then(|_| write_timing(&timing_path(&out), &timings)) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            for row in report.rows.iter().filter(|r| !r.pass) {
                eprintln!("FAIL {} {}", row.check, row.inputs);
            }
            let s = report.summary;
            println!("{}: {} rows, {} passed, {} failed -> {}", report.suite, s.total, s.passed, s.failed, out.display());
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Emit { function, transform, config, out } => {
            let written = RunConfig::load(&config).and_then(|c| emit_grid(&c, &function, &out, transform));
            match written {
                Ok(paths) => {
                    for p in paths {
                        println!("{}", p.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}

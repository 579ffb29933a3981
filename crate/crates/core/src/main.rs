use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pairlaser::harness::{reproduce_figure, run_scenario, validate_config, FigureId, Format};

const EXIT_VALIDATION: u8 = 1;
const EXIT_POINT_FAILURES: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "pairlaser", version, about = "Atom-photon pair laser simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory.
    #[arg(long, global = true, env = "PAIRLASER_OUT")]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "PAIRLASER_THREADS")]
    threads: Option<usize>,

    /// Seed for stochastic methods.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a TOML scenario.
    Run { config: PathBuf },
    /// Regenerate the data behind a figure.
    Figure {
        #[arg(value_parser = ["fig2", "fig3", "fig4a", "fig4b", "fig5a", "fig5b"])]
        id: String,
    },
    /// Check a TOML scenario without running it.
    Validate { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn read(path: &PathBuf) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_VALIDATION)
    })
}

fn report_invalid(errs: &[String]) -> ExitCode {
    for e in errs {
        eprintln!("error: {e}");
    }
    ExitCode::from(EXIT_VALIDATION)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    }
    match run(cli) {
        Ok(code) | Err(code) => code,
    }
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    let internal = |e: pairlaser::Error| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_INTERNAL)
    };
    let started = std::time::Instant::now();
    let (files, failures) = match &cli.command {
        Command::Validate { config } => {
            let text = read(config)?;
            return match validate_config(&text) {
                Ok(cfg) => {
                    println!("{}: ok ({})", config.display(), cfg.method.name());
                    Ok(ExitCode::SUCCESS)
                }
                Err(errs) => Err(report_invalid(&errs)),
            };
        }
        Command::Run { config } => {
            let text = read(config)?;
            let mut cfg = validate_config(&text).map_err(|errs| report_invalid(&errs))?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let table = run_scenario(&cfg).map_err(internal)?;
            let dir = cli.out.clone().or(cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
            let format = cli.format.map(Format::from).or(cfg.output.format).unwrap_or_default();
            (table.write(&dir, format).map_err(internal)?, table.failures())
        }
        Command::Figure { id } => {
            let id: FigureId = id.parse().map_err(internal)?;
            let mut fig = reproduce_figure(id, cli.seed.unwrap_or(0)).map_err(internal)?;
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            let format = cli.format.map(Format::from).unwrap_or_default();
            let files = fig.write(&dir, format).map_err(internal)?;
            (files, fig.manifest.failures)
        }
    };
    for f in &files {
        println!("wrote {}", f.display());
    }
    eprintln!("elapsed {:.3} s", started.elapsed().as_secs_f64());
    if failures > 0 {
        eprintln!("{failures} scan point(s) failed; see the error column");
        return Ok(ExitCode::from(EXIT_POINT_FAILURES));
    }
    Ok(ExitCode::SUCCESS)
}

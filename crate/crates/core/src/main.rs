use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use affinor::catalog::{get_fixture, list_fixtures};
use affinor::report::{exit_code, render, Format};
use affinor::sampling::{DEFAULT_POINTS, DEFAULT_SEED};
use affinor::specfile::{export_spec, load_spec};
use affinor::suite::{run_suite, unknown_filters, SuiteOptions};

const INPUT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "affinor", version, about = "Numerical checks for (g, F, mu)-manifolds and semi-invariant submanifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// List built-in fixtures.
    List,
    /// Write a built-in fixture as a spec file.
    Export { fixture: String, path: PathBuf },
    /// Run the check suite on a spec file.
    Verify {
        spec: PathBuf,
        /// Spec file holding the [submanifold] section.
        #[arg(long)]
        sub: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Threshold for the compatibility and parallelism checks.
        #[arg(long)]
        tol: Option<f64>,
        /// Comma-separated check ids; a trailing `*` matches a prefix.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("AFFINOR_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("AFFINOR_THREADS must be a non-negative integer, got `{raw}`"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::List => {
            for (name, description) in list_fixtures() {
                println!("{name:<22}{description}");
            }
            Ok(0)
        }
        Command::Export { fixture, path } => {
            let f = get_fixture(&fixture).ok_or_else(|| format!("unknown fixture `{fixture}`"))?;
            std::fs::write(&path, export_spec(&f.ambient, f.sub.as_ref()))
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            Ok(0)
        }
        Command::Verify {
            spec,
            sub,
            points,
            seed,
            tol,
            checks,
            format,
            output,
        } => {
            if points == 0 {
                return Err("--points must be positive".into());
            }
            let (ambient, sub) = load_spec(&spec, sub.as_deref()).map_err(|e| e.to_string())?;
            let options = SuiteOptions {
                points,
                seed,
                tol,
                checks: checks.into_iter().map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect(),
            };
            let unknown = unknown_filters(&options.checks);
            if !unknown.is_empty() {
                return Err(format!("--checks selects nothing for: {}", unknown.join(", ")));
            }
            let reports = run_suite(&ambient, sub.as_ref(), &options);
            let fixture = sub.as_ref().map_or(ambient.name.as_str(), |s| s.name.as_str());
            let format = match format {
                FormatArg::Text => Format::Text,
                FormatArg::Json => Format::Json,
            };
            let text = render(&reports, format, Some(fixture), Some(&options.report_options()));
            match output {
                Some(path) => {
                    std::fs::write(&path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?
                }
                None => print!("{text}"),
            }
            Ok(exit_code(&reports) as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(INPUT_ERROR);
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}

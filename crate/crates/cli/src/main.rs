use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zwm_cli::{
    compare_golden, convergence_report, preset, run_scenario, CliError, OutputFormat, ResultTable, ScenarioSpec,
};

#[derive(Parser)]
#[command(name = "zwm", version, about = "Induced-coherence interferometer scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its table.
    Run {
        spec: PathBuf,
        /// Output directory when the spec names no output path.
        #[arg(long, env = zwm_cli::OUT_DIR_ENV, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run a named preset; one table per curve.
    Preset {
        name: String,
        /// Output directory.
        #[arg(long, env = zwm_cli::OUT_DIR_ENV, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Re-run a scenario at doubled cutoffs and every Dyson order.
    Converge { spec: PathBuf },
    /// Compare a CSV table against a golden CSV.
    Diff { table: PathBuf, golden: PathBuf },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

fn write_table(table: &ResultTable, path: &Path, format: OutputFormat) -> Result<(), CliError> {
    table.write(path, format)?;
    println!("{}", path.display());
    Ok(())
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { spec, out_dir } => {
            let spec = ScenarioSpec::from_path(&spec)?;
            let table = run_scenario(&spec)?;
            let path = spec
                .output
                .clone()
                .unwrap_or_else(|| out_dir.join(format!("{}.{}", spec.name, spec.format.extension())));
            write_table(&table, &path, spec.format)
        }
        Command::Preset { name, out, format } => {
            let format = OutputFormat::from(format);
            for spec in preset(&name)? {
                let table = run_scenario(&spec)?;
                write_table(
                    &table,
                    &out.join(format!("{}.{}", spec.name, format.extension())),
                    format,
                )?;
            }
            Ok(())
        }
        Command::Converge { spec } => {
            let spec = ScenarioSpec::from_path(&spec)?;
            print!("{}", convergence_report(&spec)?.to_csv());
            Ok(())
        }
        Command::Diff { table, golden } => {
            let (table, _) = ResultTable::read_csv(&table)?;
            let diff = compare_golden(&table, &golden)?;
            if diff.passed() {
                println!("ok");
                Ok(())
            } else {
                Err(CliError::GoldenMismatch(diff.to_string()))
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mo_resources::config::{Format, RunConfig};
use mo_resources::sweep::{
    comparison_table, region_table, run_compare, run_evolve, run_region, Cell, Table,
};
use mo_resources::verify::run_verify;

#[derive(Parser)]
#[command(version, about = "Entanglement and steering between distant cavities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time evolution of the resources over a parameter sweep.
    Evolve(RunArgs),
    /// Stationary steering-region map over two swept parameters.
    Region(RunArgs),
    /// Full platform dynamics against the effective closed forms.
    Compare(RunArgs),
    /// Run the built-in verification suite.
    Verify(CommonArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CommonArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    threads: Option<usize>,
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

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Evolve(a) | Command::Region(a) | Command::Compare(a) => &a.common,
        Command::Verify(c) => c,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.threads {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    match pool.install(|| run(&cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: &Command) -> mo_resources::Result<ExitCode> {
    let (cfg, common) = match command {
        Command::Verify(common) => {
            let report = run_verify();
            if common.out.is_some() || common.format.is_some() {
                let mut table = Table::new(
                    ["check", "passed", "worst", "tolerance", "detail"]
                        .map(String::from)
                        .to_vec(),
                );
                for c in &report.checks {
                    table.rows.push(vec![
                        Cell::from(c.name),
                        Cell::from(c.passed),
                        Cell::from(c.worst),
                        Cell::from(c.tolerance),
                        Cell::from(c.detail.as_str()),
                    ]);
                }
                let format = common.format.map(Format::from).unwrap_or_default();
                table.write_to(common.out.as_deref(), format)?;
                eprint!("{report}");
            } else {
                print!("{report}");
            }
            return Ok(if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            });
        }
        Command::Evolve(a) | Command::Region(a) | Command::Compare(a) => {
            (RunConfig::from_path(&a.config)?, &a.common)
        }
    };
    let table = match command {
        Command::Evolve(_) => run_evolve(&cfg)?,
        Command::Region(_) => region_table(&cfg, &run_region(&cfg)?),
        Command::Compare(_) => comparison_table(&cfg, &run_compare(&cfg)?),
        Command::Verify(_) => unreachable!(),
    };
    let path = common.out.clone().or_else(|| cfg.outputs.path.clone());
    let format = common
        .format
        .map(Format::from)
        .unwrap_or(cfg.outputs.format);
    table.write_to(path.as_deref(), format)?;
    Ok(ExitCode::SUCCESS)
}

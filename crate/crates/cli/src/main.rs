use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use casq_cli::emit::{self, Format, Row};
use casq_cli::error::{CliError, EXIT_NON_CONVERGENT};
use casq_cli::sweep::{run_many, sweep, SweepSpec, SweepValues};
use casq_cli::{parse_scenario, Report};
use casq_core::species::{self, AtomSpecies};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "casq", version, about = "Motion-induced QED phases and emission rates for atoms")]
struct Cli {
    /// Species database JSON; falls back to $CASQ_SPECIES_DB, then the bundled table.
    #[arg(long, global = true, value_name = "FILE")]
    species_db: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenario files.
    Run {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run a scenario over a range or list of values of one parameter.
    #[command(allow_negative_numbers = true)]
    Sweep {
        file: PathBuf,
        /// Dotted path into the scenario, e.g. `paths.0.h_m`.
        #[arg(long)]
        param: String,
        #[arg(long, requires_all = ["to", "points"], conflicts_with = "values")]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Logarithmic spacing between --from and --to.
        #[arg(long)]
        log: bool,
        /// Explicit comma-separated values instead of a range.
        #[arg(long, value_delimiter = ',', required_unless_present = "from")]
        values: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Inspect the species database.
    Species {
        #[command(subcommand)]
        action: SpeciesAction,
    },
    /// Run the built-in acceptance checks.
    Selftest,
}

#[derive(clap::Args)]
struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// csv, json or svg-plotdata.
    #[arg(long, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum SpeciesAction {
    List,
    Show { name: String },
}

fn load_db(path: Option<&Path>) -> Result<Vec<AtomSpecies>, CliError> {
    Ok(match path {
        Some(p) => species::load_species_db(p)?,
        None => species::default_species_db()?,
    })
}

fn write_output(output: &OutputArgs, text: &str) -> Result<(), CliError> {
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path.display(), e)),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

/// Exit code of the whole command: first failure wins, non-convergence
/// of otherwise successful results gives 3.
fn run_files(files: &[PathBuf], output: &OutputArgs, jobs: usize, db: &[AtomSpecies]) -> Result<u8, CliError> {
    let mut code = 0;
    let mut scenarios = Vec::new();
    for file in files {
        match parse_scenario(file, db) {
            Ok(s) => scenarios.push(s),
            Err(e) => {
                eprintln!("error: {e}");
                if code == 0 {
                    code = e.exit_code();
                }
            }
        }
    }
    let mut reports: Vec<Report> = Vec::new();
    for (result, scenario) in run_many(&scenarios, jobs)?.into_iter().zip(&scenarios) {
        match result {
            Ok(r) => reports.push(r),
            Err(e) => {
                eprintln!("error: {} ({}): {e}", scenario.kind().as_str(), scenario.species.name());
                if code == 0 {
                    code = e.exit_code();
                }
            }
        }
    }
    for r in &reports {
        for w in &r.warnings {
            eprintln!("warning: {} ({}): {w}", r.kind, r.species);
        }
    }
    let unconverged = reports.iter().filter(|r| !r.converged).count();
    if unconverged > 0 {
        eprintln!("error: {}", CliError::NonConvergent { failed: unconverged });
        if code == 0 {
            code = EXIT_NON_CONVERGENT;
        }
    }
    if !reports.is_empty() {
        let rows: Vec<Row> = reports.iter().map(Row::from_report).collect();
        write_output(output, &emit::render(&rows, output.format))?;
    }
    Ok(code)
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    let db = || load_db(cli.species_db.as_deref());
    match &cli.command {
        Command::Run { files, output, jobs } => run_files(files, output, *jobs, &db()?),
        Command::Sweep {
            file,
            param,
            from,
            to,
            points,
            log,
            values,
            jobs,
            output,
        } => {
            let db = db()?;
            let scenario = parse_scenario(file, &db)?;
            let values = match (values, from, to, points) {
                (Some(v), ..) => SweepValues::List(v.clone()),
                (None, Some(from), Some(to), Some(points)) => SweepValues::Range {
                    from: *from,
                    to: *to,
                    points: *points,
                    log: *log,
                },
                _ => return Err(CliError::Sweep("give --from/--to/--points or --values".into())),
            };
            let spec = SweepSpec {
                param: param.clone(),
                values,
            };
            let rows = sweep(&scenario, &spec, *jobs, &db)?;
            let mut code = 0;
            for row in &rows {
                match &row.outcome {
                    Err(e) => eprintln!("error: {param} = {}: {e}", emit::fmt_f64(row.param_value)),
                    Ok(r) if !r.converged => {
                        eprintln!("error: {param} = {}: not converged", emit::fmt_f64(row.param_value))
                    }
                    Ok(_) => {}
                }
                if code == 0 {
                    code = row.exit_code;
                }
            }
            let kind = scenario.kind().as_str();
            let out: Vec<Row> = rows
                .iter()
                .map(|r| Row::from_sweep(kind, scenario.species.name(), param, r))
                .collect();
            write_output(output, &emit::render(&out, output.format))?;
            Ok(code)
        }
        Command::Species { action } => {
            let db = db()?;
            match action {
                SpeciesAction::List => {
                    for s in &db {
                        println!("{}\t{} transition(s)\talpha0 = {} F m^2", s.name(), s.transitions().len(), emit::fmt_f64(s.alpha_static()));
                    }
                }
                SpeciesAction::Show { name } => {
                    let s = species::find_species(&db, name)?;
                    print!("{}", emit::to_json_pretty(s));
                }
            }
            Ok(0)
        }
        Command::Selftest => {
            let outcomes = casq_core::selftest::run_all();
            for o in &outcomes {
                println!("{}", o.line());
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            if failed > 0 {
                return Err(CliError::SelftestFailed { failed });
            }
            Ok(0)
        }
    }
}

fn main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    let start = Instant::now();
    let code = match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            let code = e.exit_code();
            eprintln!("error: {:#}", anyhow::Error::new(e));
            code
        }
    };
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    Ok(ExitCode::from(code))
}

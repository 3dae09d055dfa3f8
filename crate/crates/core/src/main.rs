use clap::{Args, Parser, Subcommand, ValueEnum};
use rfharvest::commands::{cmd_charging, cmd_energy, cmd_fit, cmd_outage, cmd_rfid, Format, Table};
use rfharvest::config::ScenarioConfig;
use rfharvest::validation::{self, Fault, ValidationContext};
use rfharvest::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Statistics of sensitivity-limited, saturating RF energy harvesters under
/// Nakagami block fading.
#[derive(Parser)]
#[command(name = "rfharvest", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario configuration (JSON); built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the table here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Override the Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    PerturbedGamma,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the efficiency polynomial and report residuals.
    Fit(Common),
    /// Outage probability over sensitivity, distance and transmit power.
    Outage(Common),
    /// Expected harvested energy per block for every harvester model.
    Energy(Common),
    /// Expected number of blocks to charge the storage capacitor.
    Charging(Common),
    /// Backscatter round-trip success probability over tag consumption.
    Rfid(Common),
    /// Run the acceptance suite and print a JSON report.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Comma-separated criterion numbers (default: all).
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u32>,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

fn load(common: &Common) -> rfharvest::Result<ScenarioConfig> {
    let mut cfg = match &common.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.numerics.seed = s;
    }
    Ok(cfg)
}

fn emit(common: &Common, text: &str) -> rfharvest::Result<()> {
    match &common.output {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn format_of(common: &Common) -> Format {
    match common.format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
    }
}

fn table(common: &Common, f: fn(&ScenarioConfig) -> rfharvest::Result<Table>) -> rfharvest::Result<()> {
    let cfg = load(common)?;
    emit(common, &f(&cfg)?.render(format_of(common)))
}

fn run(cli: Cli) -> rfharvest::Result<bool> {
    match cli.command {
        Command::Fit(c) => table(&c, cmd_fit)?,
        Command::Outage(c) => table(&c, cmd_outage)?,
        Command::Energy(c) => table(&c, cmd_energy)?,
        Command::Rfid(c) => table(&c, cmd_rfid)?,
        Command::Charging(c) => {
            let cfg = load(&c)?;
            let (t, dump) = cmd_charging(&cfg)?;
            if let (Some(path), Some(text)) = (&cfg.charging.density_dump, dump) {
                std::fs::write(path, text)?;
            }
            emit(&c, &t.render(format_of(&c)))?;
        }
        Command::Validate { common, criteria, inject_fault } => {
            let mut ctx = ValidationContext { fault: inject_fault.map(|_| Fault::PerturbedGamma), ..Default::default() };
            if let Some(s) = common.seed {
                ctx.seed = s;
            }
            let report = if criteria.is_empty() { validation::run_all(&ctx) } else { validation::run(&criteria, &ctx) };
            for c in &report.criteria {
                eprintln!("criterion {} {}: {}", c.id, c.name, if c.passed { "PASS" } else { "FAIL" });
            }
            emit(&common, &report.to_json())?;
            return Ok(report.all_passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                e if e.is_numerical() => ExitCode::from(3),
                Error::Io(_) | Error::Json(_) | Error::Config(_) | Error::Csv { .. } => ExitCode::from(2),
                _ => ExitCode::from(2),
            }
        }
    }
}

//! Command-line scenario runner: presets, TOML config, tabular output.

pub mod config;
pub mod error;
pub mod output;
pub mod scenario;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use config::{ScenarioConfig, ScenarioKind};
use error::CliError;
use output::{Format, RunOutput};

#[derive(Debug, Parser)]
#[command(
    name = "optoforce",
    version,
    about = "Optical force detection with a levitated nanoparticle"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario's full pipeline.
    Simulate(RunArgs),
    /// Calibrated PSD of one driven run.
    Psd(RunArgs),
    /// Band power against weak-beam power.
    Sweep(RunArgs),
    /// Force floors, power sensitivities and the empirical chain.
    Sensitivity(RunArgs),
    /// Print the summary of an existing output directory.
    Report {
        /// Directory written by an earlier run.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub scenario: Option<ScenarioKind>,
    /// TOML file, merged over the scenario preset.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; defaults to `output_dir` in the config or `out/<scenario>`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl RunArgs {
    pub fn resolve(&self) -> Result<ScenarioConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => config::load(path, self.scenario)?,
            None => config::resolve("", "<preset>", Some(self.scenario.unwrap_or_default()))?,
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        scenario::check(&cfg)?;
        Ok(cfg)
    }

    fn out_dir(&self, cfg: &ScenarioConfig) -> PathBuf {
        self.out
            .clone()
            .or_else(|| cfg.output_dir.clone())
            .unwrap_or_else(|| Path::new("out").join(cfg.scenario.name()))
    }
}

/// Run one verb on a resolved config.
pub fn execute(verb: &str, cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    scenario::check(cfg)?;
    match verb {
        "simulate" => scenario::run_scenario(cfg),
        "psd" => scenario::run_driven(cfg, "psd", None),
        "sweep" => scenario::run_sweep(cfg, "sweep"),
        "sensitivity" => scenario::run_sensitivity(cfg),
        other => Err(CliError::Config(format!("unknown verb `{other}`"))),
    }
}

fn run_verb(verb: &str, args: &RunArgs) -> Result<(), CliError> {
    let cfg = args.resolve()?;
    let out = execute(verb, &cfg)?;
    let dir = args.out_dir(&cfg);
    let manifest = output::manifest(&cfg, verb, scenario::description(cfg.scenario));
    for path in output::write_run(&dir, &out, args.format, &manifest)? {
        println!("wrote {}", path.display());
    }
    print_summary(&out.summary.table().render(Format::Csv)?);
    Ok(())
}

fn print_summary(text: &str) {
    for line in text.lines().skip(1) {
        println!("  {}", line.replace(',', "  "));
    }
}

fn report(dir: &Path) -> Result<(), CliError> {
    let csv = dir.join("summary.csv");
    let json = dir.join("summary.json");
    if csv.exists() {
        print_summary(&std::fs::read_to_string(csv)?);
    } else if json.exists() {
        print!("{}", std::fs::read_to_string(json)?);
    } else {
        return Err(CliError::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("no summary in {}", dir.display()),
        )));
    }
    let manifest = dir.join("manifest.toml");
    if manifest.exists() {
        println!("manifest: {}", manifest.display());
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate(a) => run_verb("simulate", a),
        Command::Psd(a) => run_verb("psd", a),
        Command::Sweep(a) => run_verb("sweep", a),
        Command::Sensitivity(a) => run_verb("sensitivity", a),
        Command::Report { out } => report(out),
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use taugeo::config::{Preset, RunConfig, ScalarMode};
use taugeo::demo::run_demo;
use taugeo::suites::run_verify;
use taugeo::{CliResult, Format, Report};

#[derive(Parser)]
#[command(
    name = "taugeo",
    version,
    about = "Exact checks for connections built from twisted derivations",
    after_help = "Relative config paths that do not exist are looked up in $TAUGEO_CONFIG_DIR."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a worked example and verify it.
    Demo {
        preset: Preset,
        /// Exponent of x (qplane) or matrix size (matrix).
        #[arg(long)]
        n: Option<u32>,
        /// Exponent of y (qplane).
        #[arg(long)]
        m: Option<u32>,
        /// Config supplying preset parameters such as an action table.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        run: RunFlags,
        #[command(flatten)]
        out: OutputFlags,
    },
    /// Run every registered check for the preset of a config file.
    Verify {
        /// Config path; relative paths not found are looked up in the config directory.
        config: PathBuf,
        #[command(flatten)]
        run: RunFlags,
        #[command(flatten)]
        out: OutputFlags,
    },
    /// Re-emit a JSON report in another format.
    Report {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Overrides applied on top of the config.
#[derive(Args)]
struct RunFlags {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum)]
    scalar: Option<ScalarMode>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Solve for the sphere action table when none is configured.
    #[arg(long)]
    solve: bool,
    /// Perturb constructed Christoffel symbols so that their checks fail.
    #[arg(long)]
    inject_corrupt_gamma: bool,
}

#[derive(Args)]
struct OutputFlags {
    /// Report format; text on stdout, JSON when writing a file.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl RunFlags {
    fn apply(&self, config: &mut RunConfig) -> CliResult<()> {
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(samples) = self.samples {
            config.samples = samples;
        }
        if let Some(scalar) = self.scalar {
            config.scalar = scalar;
        }
        if let Some(tolerance) = self.tolerance {
            config.tolerance = tolerance;
        }
        config.sphere.solve |= self.solve;
        config.inject_corrupt_gamma |= self.inject_corrupt_gamma;
        config.validate(Path::new("<command line>"))
    }
}

/// Write to the requested file, or print to stdout.
fn emit(report: &Report, out: &OutputFlags, config_output: Option<&Path>) -> CliResult<()> {
    match out.output.as_deref().or(config_output) {
        Some(path) => {
            report.write(path, out.format.unwrap_or(Format::Json))?;
            let s = &report.summary;
            println!("report written to {}: {} passed, {} failed, {} skipped", path.display(), s.passed, s.failed, s.skipped);
        }
        None => print!("{}", report.render(out.format.unwrap_or(Format::Text))),
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Demo { preset, n, m, config, run, out } => {
            let mut cfg = match config {
                Some(path) => RunConfig::load(&path)?,
                None => RunConfig::new(preset),
            };
            cfg.preset = preset;
            match preset {
                Preset::Matrix => {
                    if let Some(n) = n {
                        cfg.matrix.size = n as usize;
                    }
                }
                _ => {
                    cfg.qplane.n = n.unwrap_or(cfg.qplane.n);
                    cfg.qplane.m = m.unwrap_or(cfg.qplane.m);
                }
            }
            run.apply(&mut cfg)?;
            let demo = run_demo(&cfg, run.solve)?;
            print!("{}", demo.text);
            println!();
            if out.output.is_some() || out.format.is_some() {
                emit(&demo.report, &out, None)?;
            } else {
                for check in &demo.report.checks {
                    println!("{} {}: {}", taugeo::report::status_label(check.status), check.name, check.witness.as_deref().unwrap_or(&check.detail));
                }
            }
            Ok(demo.report.exit_code())
        }
        Command::Verify { config, run, out } => {
            let mut cfg = RunConfig::load(&config)?;
            run.apply(&mut cfg)?;
            let report = run_verify(&cfg)?;
            emit(&report, &out, cfg.output.as_deref())?;
            Ok(report.exit_code())
        }
        Command::Report { input, format, output } => {
            let report = Report::load(&input)?;
            match output {
                Some(path) => report.write(&path, format)?,
                None => print!("{}", report.render(format)),
            }
            Ok(report.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

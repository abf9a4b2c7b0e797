use std::path::PathBuf;

use clap::Parser;
use rzero::report::{run, Command, Format, RunConfig};
use rzero::special::PrecisionMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Precision {
    Std,
    Comp,
}

/// Evaluate, count and locate zeros of Riemann's auxiliary function R(s).
#[derive(Debug, Parser)]
#[command(name = "rzero", version)]
struct Cli {
    #[arg(long, value_enum)]
    command: Command,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    t_min: f64,
    #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
    t_max: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    t_step: f64,
    /// left edge of the counting and search box
    #[arg(long, default_value_t = rzero::counting::DEFAULT_BOX_LEFT, allow_negative_numbers = true)]
    box_left: f64,
    #[arg(long, value_enum, default_value = "std")]
    precision: Precision,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// fail on unresolved zero clusters
    #[arg(long)]
    strict: bool,
    /// point for eval, e.g. 2+30i; repeatable
    #[arg(long = "point", allow_hyphen_values = true)]
    points: Vec<String>,
    /// evaluate an n x n grid around each point
    #[arg(long, default_value_t = 1)]
    grid: usize,
    #[arg(long, default_value_t = 0.1)]
    grid_step: f64,
    /// override the numeric tolerance of the validate suites
    #[arg(long)]
    tolerance: Option<f64>,
    /// random samples per validate suite
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// smallest box side in zero isolation
    #[arg(long, default_value_t = rzero::locator::DEFAULT_MIN_SIZE)]
    min_size: f64,
}

fn main() {
    let cli = Cli::parse();
    let cfg = RunConfig {
        command: cli.command,
        t_min: cli.t_min,
        t_max: cli.t_max,
        t_step: cli.t_step,
        box_left: cli.box_left,
        precision: match cli.precision {
            Precision::Std => PrecisionMode::Standard,
            Precision::Comp => PrecisionMode::Compensated,
        },
        format: cli.format,
        out: cli.out,
        seed: cli.seed,
        strict: cli.strict,
        points: cli.points,
        grid: cli.grid,
        grid_step: cli.grid_step,
        tolerance: cli.tolerance,
        samples: cli.samples,
        min_size: cli.min_size,
    };
    let code = run(
        &cfg,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}

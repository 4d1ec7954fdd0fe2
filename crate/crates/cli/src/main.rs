use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use polyfold::verify::Window;
use polyfold_cli::{run, Command, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    /// Build the staged map of a polygon
    Build,
    /// Run every oracle on a staged map
    Verify,
    /// Build the map onto the interior of a polygon
    Interior,
    /// Sample image points as CSV, with an SVG next to the output
    Plot,
    /// Expand a staged map into explicit polynomials
    Expand,
}

/// Polynomial maps of the plane onto unbounded convex polygons.
///
/// Exit status: 0 pass, 1 failed oracle, 2 bad input or usage.
#[derive(Debug, Parser)]
#[command(name = "polyfold", version)]
struct Args {
    command: Cmd,
    /// Polygon JSON (build, interior) or staged map JSON (verify, plot, expand)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    /// Target polygon for verify and plot
    #[arg(long)]
    polygon: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exact containment samples per check
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Forward samples for coverage (default: 10 x samples)
    #[arg(long)]
    coverage_samples: Option<usize>,
    /// Coverage window as x0,x1,y0,y1
    #[arg(long, allow_hyphen_values = true)]
    window: Option<Window>,
    /// Coverage grid is m x m
    #[arg(long, default_value_t = 200)]
    grid: usize,
    /// Coverage threshold (default 0.98, or 0.99 for single-stage maps)
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long, default_value_t = polyfold::pipeline::DEFAULT_DEGREE_CAP)]
    degree_cap: u64,
    /// Use the sign printed in the vertex step (regression mode)
    #[arg(long)]
    paper_step4_sign: bool,
    /// Read the whole configuration from a RunConfig JSON file instead
    #[arg(long, conflicts_with_all = ["input", "output", "polygon"])]
    config: Option<PathBuf>,
}

fn config(args: Args) -> Result<RunConfig, String> {
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        return serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()));
    }
    let command = match args.command {
        Cmd::Build => Command::Build,
        Cmd::Verify => Command::Verify,
        Cmd::Interior => Command::Interior,
        Cmd::Plot => Command::Plot,
        Cmd::Expand => Command::Expand,
    };
    let input = args.input.ok_or("--input is required")?;
    Ok(RunConfig {
        polygon: args.polygon,
        output: args.output,
        seed: args.seed,
        samples: args.samples,
        coverage_samples: args.coverage_samples,
        window: args.window,
        grid: args.grid,
        threshold: args.threshold,
        degree_cap: args.degree_cap,
        paper_step4_sign: args.paper_step4_sign,
        ..RunConfig::new(command, input)
    })
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(2);
        }
    };
    let cfg = match config(args) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("{}", serde_json::json!({ "error": { "code": "usage", "message": msg } }));
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(outcome) => {
            if let Some(out) = &outcome.stdout {
                print!("{out}");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(2)
        }
    }
}

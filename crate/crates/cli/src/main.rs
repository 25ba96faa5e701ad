//! `wpb` — runs the identity suites with structured reporting, computes
//! individual pairings, and emits z-plane magnitude grids as CSV or PNG.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wpb::pairing::{conv_poly_delta, pair_phi_psi};
use wpb::verify::{run_suite, Suite, Tolerances, VerificationReport};
use wpb::{ExactScalar, GridSpec, QuadratureSpec, Scalar, StateKind, TestFunction};

#[derive(Parser)]
#[command(
    name = "wpb",
    version,
    about = "Weak pseudo-bosonic ladder framework: verification suites, pairings and coherent-state grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named verification suite and print a pass/fail table
    Verify(VerifyArgs),
    /// Print the extended pairing of the two family members with indices N and M
    Pair {
        /// Polynomial-side index n
        n: u32,
        /// Delta-side index m
        m: u32,
    },
    /// Evaluate a coherent-functional magnitude on a z-plane grid and write CSV
    Grid(GridArgs),
    /// Render the three magnitude surfaces for one width as heat-map images
    Figure(FigureArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Algebra,
    Pairing,
    Bicoherent,
    Identities,
    Displacement,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Algebra => Suite::Algebra,
            SuiteArg::Pairing => Suite::Pairing,
            SuiteArg::Bicoherent => Suite::Bicoherent,
            SuiteArg::Identities => Suite::Identities,
            SuiteArg::Displacement => Suite::Displacement,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite to run
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    /// Write the structured report as JSON
    #[arg(long)]
    json: Option<PathBuf>,
    /// Tolerance overrides, repeatable: --tol check_id=1e-8
    #[arg(long = "tol", value_name = "KEY=VALUE")]
    tol: Vec<String>,
    /// Plain-text tolerance file with `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,
    /// List the tolerance keys with their effective values and exit
    #[arg(long)]
    list_tolerances: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StateArg {
    Phi,
    Psi,
    Cs,
}

impl From<StateArg> for StateKind {
    fn from(s: StateArg) -> StateKind {
        match s {
            StateArg::Phi => StateKind::Phi,
            StateArg::Psi => StateKind::Psi,
            StateArg::Cs => StateKind::Cs,
        }
    }
}

#[derive(Args, Clone)]
struct WindowArgs {
    #[arg(long, default_value_t = -3.0)]
    re_min: f64,
    #[arg(long, default_value_t = 3.0)]
    re_max: f64,
    #[arg(long, default_value_t = -3.0)]
    im_min: f64,
    #[arg(long, default_value_t = 3.0)]
    im_max: f64,
    #[arg(long, default_value_t = 121)]
    n_re: usize,
    #[arg(long, default_value_t = 121)]
    n_im: usize,
}

impl WindowArgs {
    fn grid(&self) -> wpb::Result<GridSpec> {
        GridSpec::new(
            self.re_min, self.re_max, self.im_min, self.im_max, self.n_re, self.n_im,
        )
    }
}

#[derive(Args)]
struct GridArgs {
    /// Which magnitude surface to evaluate
    #[arg(long, value_enum)]
    state: StateArg,
    /// Gaussian width of the probe function
    #[arg(long)]
    sigma: f64,
    #[command(flatten)]
    window: WindowArgs,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FigureArgs {
    /// Gaussian width of the probe function
    #[arg(long)]
    sigma: f64,
    #[command(flatten)]
    window: WindowArgs,
    /// Prefix for the three output files (<prefix>_phi/psi/cs)
    #[arg(long)]
    out_prefix: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Pair { n, m } => cmd_pair(n, m),
        Command::Grid(args) => cmd_grid(args),
        Command::Figure(args) => cmd_figure(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn parse_tolerances(args: &VerifyArgs) -> Result<Tolerances, Box<dyn std::error::Error>> {
    let mut tols = Tolerances::default();
    if let Some(path) = &args.config {
        tols.apply_config(&fs::read_to_string(path)?)?;
    }
    for kv in &args.tol {
        let Some((key, value)) = kv.split_once('=') else {
            return Err(format!("--tol expects KEY=VALUE, got '{kv}'").into());
        };
        tols.set(key.trim(), value.trim().parse()?)?;
    }
    Ok(tols)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let tols = parse_tolerances(&args)?;
    if args.list_tolerances {
        for (key, value) in tols.effective() {
            println!("{key} = {value:e}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let report = run_suite(args.suite.into(), &tols);
    print_report(&report);
    if let Some(path) = &args.json {
        fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(if report.overall {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn print_report(report: &VerificationReport) {
    println!("suite: {}", report.suite);
    println!(
        "{:<32} {:>12} {:>10} {:>9} {:>7}",
        "check", "measured", "tolerance", "time", "status"
    );
    for c in &report.checks {
        println!(
            "{:<32} {:>12.3e} {:>10.1e} {:>8.2}s {:>7}",
            c.name,
            c.measured_error,
            c.tolerance,
            c.runtime_s,
            if c.passed { "PASS" } else { "FAIL" }
        );
        if let Some(detail) = &c.detail {
            println!("    ^ {detail}");
        }
    }
    println!("overall: {}", if report.overall { "PASS" } else { "FAIL" });
}

fn cmd_pair(n: u32, m: u32) -> Result<ExitCode, Box<dyn std::error::Error>> {
    // both quantities are rational, so print them from the exact backend
    let pairing = pair_phi_psi::<ExactScalar>(n, m)?.value;
    let raw = conv_poly_delta::<ExactScalar>(n, m, &ExactScalar::zero())?;
    println!("<phi_{n}, psi_{m}> = {}", format_exact(&pairing));
    println!(
        "raw convolution (x^{n} against delta^({m})) at 0 = {}",
        format_exact(&raw)
    );
    Ok(ExitCode::SUCCESS)
}

fn format_exact(v: &ExactScalar) -> String {
    match v.to_gauss_rational() {
        Some(q) if q.is_real() => format!("{}", q.re),
        Some(q) => format!("{}+{}i", q.re, q.im),
        None => format!("{v:?}"),
    }
}

fn cmd_grid(args: GridArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let grid = args.window.grid()?;
    let f = TestFunction::gaussian(args.sigma)?;
    let quad = QuadratureSpec::default();
    let csv = wpb::grid::grid_csv(args.state.into(), &f, &grid, &quad)?;
    fs::write(&args.out, csv)?;
    println!("wrote {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_figure(args: FigureArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let grid = args.window.grid()?;
    let f = TestFunction::gaussian(args.sigma)?;
    let quad = QuadratureSpec::default();
    for state in [StateKind::Phi, StateKind::Psi, StateKind::Cs] {
        let values = wpb::grid::grid_eval(state, &f, &grid, &quad)?;
        emit_panel(&args.out_prefix, state, &grid, &f, &quad, &values)?;
    }
    Ok(ExitCode::SUCCESS)
}

#[cfg(feature = "render")]
fn emit_panel(
    prefix: &str,
    state: StateKind,
    grid: &GridSpec,
    _f: &TestFunction,
    _quad: &QuadratureSpec,
    values: &[Vec<f64>],
) -> Result<(), Box<dyn std::error::Error>> {
    let path = format!("{prefix}_{}.png", state.name());
    // each panel normalized to its own maximum: the surfaces are compared
    // by shape, not absolute scale
    let max = values
        .iter()
        .flatten()
        .fold(f64::MIN_POSITIVE, |a, &v| a.max(v));
    let mut img = image::RgbImage::new(grid.n_re as u32, grid.n_im as u32);
    for (j, row) in values.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            // image rows run top-down; put im_max at the top
            let y = (grid.n_im - 1 - j) as u32;
            img.put_pixel(i as u32, y, image::Rgb(colormap(v / max)));
        }
    }
    img.save(&path)?;
    println!("wrote {path}");
    Ok(())
}

#[cfg(not(feature = "render"))]
fn emit_panel(
    prefix: &str,
    state: StateKind,
    grid: &GridSpec,
    f: &TestFunction,
    quad: &QuadratureSpec,
    _values: &[Vec<f64>],
) -> Result<(), Box<dyn std::error::Error>> {
    // no raster backend compiled in: fall back to CSV and keep going
    let path = format!("{prefix}_{}.csv", state.name());
    let csv = wpb::grid::grid_csv(state, f, grid, quad)?;
    fs::write(&path, csv)?;
    eprintln!("warning: built without the 'render' feature; wrote {path} instead of a PNG");
    Ok(())
}

/// Dark-blue → cyan → yellow gradient on [0, 1].
#[cfg(feature = "render")]
fn colormap(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    let stops: [(f64, [f64; 3]); 4] = [
        (0.0, [13.0, 8.0, 135.0]),
        (0.4, [30.0, 110.0, 200.0]),
        (0.75, [80.0, 200.0, 190.0]),
        (1.0, [245.0, 235.0, 80.0]),
    ];
    for w in stops.windows(2) {
        let (t0, c0) = w[0];
        let (t1, c1) = w[1];
        if t <= t1 {
            let s = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
            return [
                (c0[0] + s * (c1[0] - c0[0])) as u8,
                (c0[1] + s * (c1[1] - c0[1])) as u8,
                (c0[2] + s * (c1[2] - c0[2])) as u8,
            ];
        }
    }
    [245, 235, 80]
}

//! Command-line front end. A thin shell: every reported number is produced
//! by the library; this file only parses flags, shuttles strings and maps
//! outcomes to exit codes.
//!
//! Exit codes: 0 ok, 2 out-of-bounds point/box, 3 unreachable point,
//! 64 usage error, 65 box budget exhausted, 66 output I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use pkm_workspace::certify::{classify, DextrousSpec, Verdict};
use pkm_workspace::kinematics::{KinematicsError, MachineModel, Pose};
use pkm_workspace::report::{paving_csv, paving_svg, sweep_csv, CubeReport, SweepRow};
use pkm_workspace::search::{
    find_largest_cube, pave_dextrous_workspace, CubeSearchConfig, PaveConfig,
};
use pkm_workspace::{Interval, IntervalBox, DEFAULT_EXCLUSION_BUDGET};

const EXIT_OK: u8 = 0;
const EXIT_OUT_OF_BOUNDS: u8 = 2;
const EXIT_UNREACHABLE: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_BUDGET: u8 = 65;
const EXIT_IO: u8 = 66;

#[derive(Parser)]
#[command(
    name = "pkm-workspace",
    version,
    about = "Dextrous-workspace certification for translational parallel kinematic machines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transmission factors and singularity margins at a pose
    Eigen(EigenArgs),
    /// Classify a Cartesian box against the dextrous bounds
    CertifyBox(CertifyBoxArgs),
    /// Find the largest certified cube (square for uranesx)
    FindCube(FindCubeArgs),
    /// UraneSX lambda sweep, one CSV row per lambda
    Sweep(SweepArgs),
    /// Pave the workspace: box-list CSV plus an SVG slice
    Pave(PaveArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MachineChoice {
    Orthoglide,
    Uranesx,
}

/// Geometry values accept exact rationals ("7/13") or decimals ("0.5385").
fn parse_len(s: &str) -> Result<f64, String> {
    let v = if let Some((num, den)) = s.split_once('/') {
        let n: f64 = num.trim().parse().map_err(|_| format!("bad rational: {s}"))?;
        let d: f64 = den.trim().parse().map_err(|_| format!("bad rational: {s}"))?;
        if d == 0.0 {
            return Err(format!("zero denominator: {s}"));
        }
        n / d
    } else {
        s.trim().parse().map_err(|_| format!("bad number: {s}"))?
    };
    if !v.is_finite() {
        return Err(format!("non-finite value: {s}"));
    }
    Ok(v)
}

#[derive(Args)]
struct MachineArgs {
    #[arg(long, value_enum)]
    machine: MachineChoice,
    /// Leg length
    #[arg(long = "L", value_parser = parse_len, default_value = "1")]
    leg_length: f64,
    /// UraneSX base radius (default 7/13)
    #[arg(long = "R", value_parser = parse_len)]
    base_radius: Option<f64>,
    /// UraneSX platform radius (default 3/26)
    #[arg(long = "r", value_parser = parse_len)]
    platform_radius: Option<f64>,
    /// UraneSX base-radius increase R' = R + lambda
    #[arg(long, value_parser = parse_len, default_value = "0")]
    lambda: f64,
    /// IK branch sign per leg, e.g. "---" or "+++"
    #[arg(long, default_value = "---")]
    branch_signs: String,
}

impl MachineArgs {
    fn build(&self) -> Result<MachineModel, CliError> {
        let signs = parse_signs(&self.branch_signs)?;
        let model = match self.machine {
            MachineChoice::Orthoglide => MachineModel::orthoglide(self.leg_length),
            MachineChoice::Uranesx => MachineModel::uranesx(
                self.leg_length,
                self.base_radius.unwrap_or(7.0 / 13.0),
                self.platform_radius.unwrap_or(3.0 / 26.0),
                self.lambda,
            ),
        };
        model
            .and_then(|m| m.with_branch_signs(signs))
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

fn parse_signs(s: &str) -> Result<[i8; 3], CliError> {
    let chars: Vec<i8> = s
        .chars()
        .map(|c| match c {
            '+' => Ok(1),
            '-' => Ok(-1),
            other => Err(CliError::Usage(format!("bad branch sign: {other}"))),
        })
        .collect::<Result<_, _>>()?;
    chars
        .try_into()
        .map_err(|_| CliError::Usage(format!("need exactly 3 branch signs, got {s:?}")))
}

#[derive(Args)]
struct SpecArgs {
    /// Upper transmission-factor bound
    #[arg(long, default_value_t = 2.0)]
    psi_max: f64,
    /// Lower bound; defaults to 1/psi_max
    #[arg(long)]
    psi_min: Option<f64>,
}

impl SpecArgs {
    fn build(&self) -> Result<DextrousSpec, CliError> {
        let spec = match self.psi_min {
            Some(min) => DextrousSpec::new(min, self.psi_max),
            None => DextrousSpec::from_psi_max(self.psi_max),
        };
        spec.map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Args)]
struct RunArgs {
    /// Accuracy threshold for the cube search
    #[arg(long, value_parser = parse_len, default_value = "0.001")]
    alpha: f64,
    /// Zero-exclusion bisection depth per threshold check
    #[arg(long, default_value_t = DEFAULT_EXCLUSION_BUDGET)]
    budget: u32,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Safety cap on processed boxes
    #[arg(long, default_value_t = 10_000_000)]
    max_boxes: u64,
    /// Omit wall-time fields for byte-identical reruns
    #[arg(long)]
    deterministic: bool,
    /// Output path (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct EigenArgs {
    #[command(flatten)]
    machine: MachineArgs,
    #[command(flatten)]
    spec: SpecArgs,
    /// Pose coordinates: x y [z]
    #[arg(required = true, num_args = 2..=3, allow_negative_numbers = true)]
    coords: Vec<f64>,
}

#[derive(Args)]
struct CertifyBoxArgs {
    #[command(flatten)]
    machine: MachineArgs,
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = DEFAULT_EXCLUSION_BUDGET)]
    budget: u32,
    /// Box bounds: x_lo x_hi y_lo y_hi [z_lo z_hi]
    #[arg(required = true, num_args = 4..=6, allow_negative_numbers = true)]
    bounds: Vec<f64>,
}

#[derive(Args)]
struct FindCubeArgs {
    #[command(flatten)]
    machine: MachineArgs,
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Machine is fixed to uranesx; geometry stays overridable
    #[arg(long = "L", value_parser = parse_len, default_value = "1")]
    leg_length: f64,
    #[arg(long = "R", value_parser = parse_len, default_value = "7/13")]
    base_radius: f64,
    #[arg(long = "r", value_parser = parse_len, default_value = "3/26")]
    platform_radius: f64,
    /// Lambda values, one sweep row each
    #[arg(value_parser = parse_len, num_args = 0.., allow_negative_numbers = true)]
    lambdas: Vec<f64>,
}

#[derive(Args)]
struct PaveArgs {
    #[command(flatten)]
    machine: MachineArgs,
    #[command(flatten)]
    spec: SpecArgs,
    /// Boundary boxes are refined below this width
    #[arg(long, value_parser = parse_len, default_value = "0.05")]
    resolution: f64,
    #[arg(long, default_value_t = DEFAULT_EXCLUSION_BUDGET)]
    budget: u32,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 10_000_000)]
    max_boxes: u64,
    /// Box-list CSV path (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    /// SVG slice path (default: output path with .svg extension)
    #[arg(long)]
    svg: Option<PathBuf>,
    /// z level of the SVG slice for 3D pavings
    #[arg(long, value_parser = parse_len, default_value = "0", allow_hyphen_values = true)]
    slice_z: f64,
}

enum CliError {
    Usage(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn write_out(path: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, content).map_err(CliError::Io),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_eigen(args: &EigenArgs) -> Result<u8, CliError> {
    let machine = args.machine.build()?;
    let spec = args.spec.build()?;
    let p = Pose::new(
        args.coords[0],
        args.coords[1],
        args.coords.get(2).copied().unwrap_or(0.0),
    );
    match machine.transmission_factors(p) {
        Ok(tf) => {
            let (det_a, det_b) = machine
                .singularity_margins(p)
                .expect("reachable pose has margins");
            println!("psi: {} {} {}", tf.psi[0], tf.psi[1], tf.psi[2]);
            println!("det(A): {det_a}");
            println!("det(B): {det_b}");
            println!("reachable: true");
            let dextrous =
                tf.psi[0] >= spec.psi_min() && tf.psi[2] <= spec.psi_max();
            println!("dextrous: {dextrous}");
            Ok(if dextrous { EXIT_OK } else { EXIT_OUT_OF_BOUNDS })
        }
        Err(KinematicsError::OutsideReachableDomain) => {
            println!("reachable: false");
            Ok(EXIT_UNREACHABLE)
        }
        Err(KinematicsError::SingularConfiguration { det_a }) => {
            println!("det(A): {det_a}");
            println!("reachable: true");
            println!("dextrous: false (parallel singularity)");
            Ok(EXIT_OUT_OF_BOUNDS)
        }
        Err(e) => Err(CliError::Usage(e.to_string())),
    }
}

fn cmd_certify_box(args: &CertifyBoxArgs) -> Result<u8, CliError> {
    let machine = args.machine.build()?;
    let spec = args.spec.build()?;
    let dim = machine.search_dim();
    if args.bounds.len() != 2 * dim {
        return Err(CliError::Usage(format!(
            "{} needs {} bounds (lo hi per axis), got {}",
            machine.kind().name(),
            2 * dim,
            args.bounds.len()
        )));
    }
    for pair in args.bounds.chunks(2) {
        if pair[0] > pair[1] {
            return Err(CliError::Usage(format!(
                "bad axis bounds: {} > {}",
                pair[0], pair[1]
            )));
        }
    }
    let b = IntervalBox::from_fn(dim, |j| {
        Interval::new(args.bounds[2 * j], args.bounds[2 * j + 1])
    });
    let verdict = classify(&machine, &b, &spec, args.budget);
    println!("verdict: {} ({:+})", verdict_name(verdict.code), verdict.code.code());
    if let Some(sig) = verdict.sigma_mid {
        println!("sigma_mid: {} {} {}", sig[0], sig[1], sig[2]);
    }
    Ok(match verdict.code {
        Verdict::Outside => EXIT_OUT_OF_BOUNDS,
        Verdict::Inside | Verdict::Undetermined => EXIT_OK,
    })
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Inside => "inside",
        Verdict::Outside => "outside",
        Verdict::Undetermined => "undetermined",
    }
}

fn search_config(
    machine: &MachineModel,
    spec: DextrousSpec,
    run: &RunArgs,
) -> Result<CubeSearchConfig, CliError> {
    if !(run.alpha > 0.0) {
        return Err(CliError::Usage(format!("alpha must be positive: {}", run.alpha)));
    }
    Ok(CubeSearchConfig {
        alpha: run.alpha,
        spec,
        initial_domain: machine.default_domain(),
        max_boxes: run.max_boxes,
        budget: run.budget,
        workers: run.workers.max(1),
        ..CubeSearchConfig::new(machine, spec)
    })
}

fn cmd_find_cube(args: &FindCubeArgs) -> Result<u8, CliError> {
    let machine = args.machine.build()?;
    let spec = args.spec.build()?;
    let cfg = search_config(&machine, spec, &args.run)?;
    let result = find_largest_cube(&machine, &cfg);
    let report = CubeReport::new(
        &machine,
        spec.psi_min(),
        spec.psi_max(),
        &result,
        args.run.deterministic,
    );
    let rendered = match args.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    write_out(&args.run.output, &rendered)?;
    Ok(if result.incomplete { EXIT_BUDGET } else { EXIT_OK })
}

fn cmd_sweep(args: &SweepArgs) -> Result<u8, CliError> {
    let spec = args.spec.build()?;
    let mut rows = Vec::new();
    let mut any_incomplete = false;
    for &lambda in &args.lambdas {
        let machine = MachineModel::uranesx(
            args.leg_length,
            args.base_radius,
            args.platform_radius,
            lambda,
        );
        let result = match machine {
            Ok(machine) => {
                let cfg = search_config(&machine, spec, &args.run)?;
                let r = find_largest_cube(&machine, &cfg);
                any_incomplete |= r.incomplete;
                Some(r)
            }
            Err(_) => None,
        };
        rows.push(SweepRow { lambda, result });
    }
    write_out(&args.run.output, &sweep_csv(&rows))?;
    Ok(if any_incomplete { EXIT_BUDGET } else { EXIT_OK })
}

fn cmd_pave(args: &PaveArgs) -> Result<u8, CliError> {
    let machine = args.machine.build()?;
    let spec = args.spec.build()?;
    if !(args.resolution > 0.0) {
        return Err(CliError::Usage(format!(
            "resolution must be positive: {}",
            args.resolution
        )));
    }
    let cfg = PaveConfig {
        budget: args.budget,
        max_boxes: args.max_boxes,
        workers: args.workers.max(1),
        ..PaveConfig::new(spec, args.resolution)
    };
    let paving = pave_dextrous_workspace(&machine, &cfg, None);
    write_out(&args.output, &paving_csv(&paving))?;
    let svg_path = args.svg.clone().or_else(|| {
        args.output
            .as_ref()
            .map(|p: &PathBuf| Path::new(p).with_extension("svg"))
    });
    if let Some(svg_path) = svg_path {
        fs::write(&svg_path, paving_svg(&paving, args.slice_z)).map_err(CliError::Io)?;
    }
    Ok(if paving.complete { EXIT_OK } else { EXIT_BUDGET })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Eigen(args) => cmd_eigen(args),
        Command::CertifyBox(args) => cmd_certify_box(args),
        Command::FindCube(args) => cmd_find_cube(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Pave(args) => cmd_pave(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Io(err)) => {
            eprintln!("output error: {err}");
            ExitCode::from(EXIT_IO)
        }
    }
}

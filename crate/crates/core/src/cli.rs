//! Command-line front end.
//!
//! Exit codes: 0 on success or PASS, 1 on runtime errors and verification
//! failures, 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::elements::ElementKind;
use crate::error::Error;
use crate::fidelity::{self, ComparisonParams, SurfaceMethod, Sweep};
use crate::gates::{self, BsParams, FanoutSpec, GateKind, LogicalEncoding};
use crate::netlist::Netlist;
use crate::state::PhotonicState;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const VERIFY_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "hybrid-optics",
    version,
    about = "Linear-optics gate simulator and fidelity sweeps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GateArg {
    Cnot,
    Cswap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Closed,
    Quadrature,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a gate, extract its logical matrix and compare with the target.
    Verify {
        #[arg(long, value_enum)]
        gate: GateArg,
        /// Target dimension for cswap.
        #[arg(long, default_value_t = 2)]
        d: i64,
    },
    /// Run a netlist on a state file.
    Simulate {
        #[arg(long)]
        netlist: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average fidelity over an (r, theta) grid as CSV.
    Surface {
        #[arg(long, default_value_t = fidelity::R_RANGE.0, allow_negative_numbers = true)]
        r_min: f64,
        #[arg(long, default_value_t = fidelity::R_RANGE.1, allow_negative_numbers = true)]
        r_max: f64,
        #[arg(long, default_value_t = fidelity::THETA_RANGE.0, allow_negative_numbers = true)]
        theta_min: f64,
        #[arg(long, default_value_t = fidelity::THETA_RANGE.1, allow_negative_numbers = true)]
        theta_max: f64,
        #[arg(long, default_value_t = 51)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
        method: MethodArg,
        /// Quadrature points per axis.
        #[arg(long, default_value_t = fidelity::DEFAULT_POINTS_PER_AXIS)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Basis fidelity against both comparison baselines along one parameter.
    Curves {
        /// `theta=<value>` or `r=<value>`.
        #[arg(long)]
        fixed: String,
        #[arg(long, default_value_t = 0.02, allow_negative_numbers = true)]
        epsilon: f64,
        #[arg(long, default_value_t = std::f64::consts::PI / 36.0, allow_negative_numbers = true)]
        delta_phi: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Element count and optical depth of a gate netlist.
    Depth {
        #[arg(long, value_enum)]
        gate: GateArg,
        #[arg(long, default_value_t = 2)]
        d: i64,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return e.exit_code();
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_FAIL
        }
    }
}

fn gate_kind(gate: GateArg, d: i64) -> Result<GateKind, Failure> {
    match gate {
        GateArg::Cnot => Ok(GateKind::Cnot),
        GateArg::Cswap => {
            let d = usize::try_from(d)
                .map_err(|_| Failure::Usage(format!("d = {d} must be at least 2")))?;
            GateKind::Cswap { d }.validate().map_err(usage)
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Verify { gate, d } => verify(gate_kind(gate, d)?, stdout),
        Command::Simulate {
            netlist,
            state,
            out,
        } => simulate(&netlist, &state, out.as_deref(), stdout),
        Command::Surface {
            r_min,
            r_max,
            theta_min,
            theta_max,
            steps,
            method,
            points,
            out,
        } => {
            let method = match method {
                MethodArg::Closed => SurfaceMethod::ClosedForm,
                MethodArg::Quadrature => SurfaceMethod::Quadrature {
                    points_per_axis: points,
                },
            };
            let rows =
                fidelity::fidelity_surface((r_min, r_max), (theta_min, theta_max), steps, method)
                    .map_err(usage)?;
            emit(&fidelity::surface_csv(&rows), out.as_deref(), stdout)
        }
        Command::Curves {
            fixed,
            epsilon,
            delta_phi,
            points,
            out,
        } => {
            let sweep = parse_fixed(&fixed)?;
            let cmp = ComparisonParams::new(epsilon, delta_phi).map_err(usage)?;
            let rows = fidelity::fidelity_curves(sweep, sweep.default_range(), points, cmp)
                .map_err(usage)?;
            emit(&fidelity::curves_csv(&rows), out.as_deref(), stdout)
        }
        Command::Depth { gate, d } => depth(gate_kind(gate, d)?, stdout),
    }
}

fn parse_fixed(text: &str) -> Result<Sweep, Failure> {
    let bad = || {
        Failure::Usage(format!(
            "--fixed expects `theta=<value>` or `r=<value>`, got `{text}`"
        ))
    };
    let (key, value) = text.split_once('=').ok_or_else(bad)?;
    let value: f64 = value.trim().parse().map_err(|_| bad())?;
    if !value.is_finite() {
        return Err(bad());
    }
    match key.trim() {
        "theta" => Ok(Sweep::FixedTheta(value)),
        "r" => Ok(Sweep::FixedR(value)),
        _ => Err(bad()),
    }
}

fn build(kind: GateKind) -> Result<(Netlist, Netlist, LogicalEncoding), Failure> {
    let b = match kind {
        GateKind::Cnot => gates::build_cnot(
            BsParams::from_angle(std::f64::consts::FRAC_PI_4),
            num_complex::Complex64::new(1.0, 0.0),
            num_complex::Complex64::new(0.0, 0.0),
        )?,
        GateKind::Cswap { d } => gates::build_cswap(
            &FanoutSpec::uniform(d)?,
            num_complex::Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            num_complex::Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        )?,
    };
    Ok((b.prep, b.gate, b.encoding))
}

fn verify(kind: GateKind, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let (_, gate, encoding) = build(kind)?;
    let extraction = gates::extract_logical_unitary(&gate, &encoding)?;
    let target = gates::target_matrix(kind)?;
    let dev = extraction.matrix.max_deviation(&target);
    let pass = dev < VERIFY_TOL;
    writeln!(stdout, "gate {kind} dim {}", target.dim())?;
    writeln!(stdout, "max |Δ| = {dev:e}")?;
    writeln!(stdout, "{}", if pass { "PASS" } else { "FAIL" })?;
    Ok(if pass { EXIT_OK } else { EXIT_FAIL })
}

fn simulate(
    netlist: &Path,
    state: &Path,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<i32, Failure> {
    let read = |p: &Path| {
        std::fs::read_to_string(p).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display())))
    };
    let netlist: Netlist = read(netlist)?
        .parse()
        .map_err(|e: Error| Failure::Runtime(format!("{}: {e}", netlist.display())))?;
    let input: PhotonicState = read(state)?
        .parse()
        .map_err(|e: Error| Failure::Runtime(format!("{}: {e}", state.display())))?;
    let output = netlist.execute(&input)?;
    emit(&output.to_string(), out, stdout)
}

fn depth(kind: GateKind, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let (prep, gate, _) = build(kind)?;
    let report = gate.depth();
    let noun = if report.element_count == 1 {
        "element"
    } else {
        "elements"
    };
    writeln!(
        stdout,
        "{} {noun}, depth {}",
        report.element_count, report.optical_depth
    )?;
    for kind in [
        ElementKind::BeamSplitter,
        ElementKind::IdealPbs,
        ElementKind::ImperfectPbs,
    ] {
        let n = report.count_of(kind);
        if n > 0 {
            writeln!(stdout, "{kind} {n}")?;
        }
    }
    writeln!(
        stdout,
        "prep bs {}",
        prep.depth().count_of(ElementKind::BeamSplitter)
    )?;
    if let GateKind::Cswap { d } = kind {
        writeln!(stdout, "d {d} depth {}", report.optical_depth)?;
    }
    Ok(EXIT_OK)
}

/// Writes to `out` through a temporary file and an atomic rename, or to
/// stdout when no path is given.
fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<i32, Failure> {
    match out {
        None => stdout.write_all(text.as_bytes())?,
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(text.as_bytes())?;
            tmp.flush()?;
            tmp.persist(path)
                .map_err(|e| Failure::Runtime(e.to_string()))?;
        }
    }
    Ok(EXIT_OK)
}

//! Fidelity of the two-PBS controlled-SWAP when both PBSs are imperfect.
//!
//! Three routes are provided and cross-checked in tests:
//! simulation of individual inputs ([`basis_fidelity`], [`real_output_state`]),
//! a uniform-grid average over the cos/sin input family
//! ([`average_fidelity_quadrature`]), and closed forms
//! ([`average_fidelity_closed_form`], [`basis_fidelity_closed_form`]).
//! The comparison baselines of an earlier 14-element design are evaluated
//! from their published closed forms only.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::elements::{ImperfectPbs, OpticalElement};
use crate::error::{Error, Result};
use crate::gates::{self, BsParams, FanoutSpec, LogicalEncoding, LogicalLabel};
use crate::netlist::Netlist;
use crate::state::PhotonicState;

pub const DEFAULT_POINTS_PER_AXIS: usize = 16;
pub const MIN_POINTS_PER_AXIS: usize = 8;

/// Default plotting window: `r ∈ [0, 1e-3]`, `θ ∈ [0, 5e-3]` rad.
pub const R_RANGE: (f64, f64) = (0.0, 1e-3);
pub const THETA_RANGE: (f64, f64) = (0.0, 5e-3);

/// Extinction ratio and mount deviation shared by both PBSs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImperfectionParams {
    pub r: f64,
    pub theta: f64,
}

impl ImperfectionParams {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::Parameter(format!(
                "extinction ratio r = {r} outside [0, 1]"
            )));
        }
        if !theta.is_finite() {
            return Err(Error::Parameter("mount deviation must be finite".into()));
        }
        Ok(ImperfectionParams { r, theta })
    }

    pub fn ideal() -> Self {
        ImperfectionParams { r: 0.0, theta: 0.0 }
    }

    /// `(cosθ − √r sinθ, sinθ + √r cosθ)`.
    pub fn coefficients(&self) -> (f64, f64) {
        let sr = self.r.sqrt();
        let (sin, cos) = self.theta.sin_cos();
        (cos - sr * sin, sin + sr * cos)
    }
}

/// BS splitting error `epsilon` and phase-shifter error `delta_phi` of the
/// comparison design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonParams {
    pub epsilon: f64,
    pub delta_phi: f64,
}

impl ComparisonParams {
    pub fn new(epsilon: f64, delta_phi: f64) -> Result<Self> {
        if !epsilon.is_finite() || !delta_phi.is_finite() {
            return Err(Error::Parameter(
                "comparison parameters must be finite".into(),
            ));
        }
        Ok(ComparisonParams { epsilon, delta_phi })
    }
}

impl Default for ComparisonParams {
    fn default() -> Self {
        ComparisonParams {
            epsilon: 0.02,
            delta_phi: PI / 36.0,
        }
    }
}

/// Amplitudes of the pair source `(α, β)` and the two preparation splitters
/// `(γ, δ)`, `(μ, ν)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub mu: f64,
    pub nu: f64,
}

impl InputParams {
    /// `α = cos x, β = sin x, γ = cos y, δ = sin y, μ = cos z, ν = sin z`.
    pub fn from_angles(x: f64, y: f64, z: f64) -> Self {
        let (beta, alpha) = x.sin_cos();
        let (delta, gamma) = y.sin_cos();
        let (nu, mu) = z.sin_cos();
        InputParams {
            alpha,
            beta,
            gamma,
            delta,
            mu,
            nu,
        }
    }

    /// Parameters that prepare the single basis state `|c i j⟩` (d = 2).
    pub fn basis(label: &LogicalLabel) -> Result<Self> {
        LogicalEncoding::cswap(2)?.index_of(label)?;
        let (c, i, j) = (label.control, label.targets[0], label.targets[1]);
        let bit = |b: bool| if b { 1.0 } else { 0.0 };
        Ok(InputParams {
            alpha: bit(c == 1),
            beta: bit(c == 0),
            gamma: bit(i == 0),
            delta: bit(i == 1),
            mu: bit(j == 0),
            nu: bit(j == 1),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FidelityMethod {
    ClosedForm,
    Quadrature,
    StateOverlap,
}

impl FidelityMethod {
    pub fn name(self) -> &'static str {
        match self {
            FidelityMethod::ClosedForm => "closed-form",
            FidelityMethod::Quadrature => "quadrature",
            FidelityMethod::StateOverlap => "state-overlap",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityReport {
    pub value: f64,
    pub method: FidelityMethod,
    pub params: ImperfectionParams,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageFidelitySpec {
    pub params: ImperfectionParams,
    pub points_per_axis: usize,
}

impl AverageFidelitySpec {
    pub fn new(params: ImperfectionParams, points_per_axis: usize) -> Result<Self> {
        if points_per_axis < MIN_POINTS_PER_AXIS {
            return Err(Error::Parameter(format!(
                "quadrature needs at least {MIN_POINTS_PER_AXIS} points per axis, got {points_per_axis}"
            )));
        }
        Ok(AverageFidelitySpec {
            params,
            points_per_axis,
        })
    }
}

fn prep_netlist(p: &InputParams) -> Result<Netlist> {
    let fanout = FanoutSpec::new(
        2,
        vec![BsParams::new(p.gamma, p.delta)?],
        vec![BsParams::new(p.mu, p.nu)?],
    )?;
    Ok(gates::build_cswap(
        &fanout,
        Complex64::new(p.alpha, 0.0),
        Complex64::new(p.beta, 0.0),
    )?
    .prep)
}

/// The eight-term input of the two-qubit-target controlled-SWAP, produced by
/// simulating the pair source and both preparation splitters.
pub fn input_state(p: &InputParams) -> Result<PhotonicState> {
    prep_netlist(p)?.prepare()
}

/// The `d = 2` gate with every PBS replaced by an imperfect one.
pub fn imperfect_gate(imp: ImperfectionParams) -> Result<Netlist> {
    let ideal = gates::cswap_gate(2)?;
    let mut out = Netlist::new(ideal.modes().iter().cloned())?;
    for e in ideal.elements() {
        let (a, b) = e.modes();
        out.push(OpticalElement::from(ImperfectPbs::new(
            a.clone(),
            b.clone(),
            imp.r,
            imp.theta,
        )?))?;
    }
    Ok(out)
}

pub fn ideal_output_state(p: &InputParams) -> Result<PhotonicState> {
    gates::cswap_gate(2)?.execute(&input_state(p)?)
}

/// The gate output when both PBSs carry the given imperfection; preparation
/// is taken as perfect.
pub fn real_output_state(p: &InputParams, imp: ImperfectionParams) -> Result<PhotonicState> {
    imperfect_gate(imp)?.execute(&input_state(p)?)
}

/// `|⟨real|ideal⟩|²`.
pub fn state_fidelity(real: &PhotonicState, ideal: &PhotonicState) -> Result<f64> {
    Ok(real.inner_product(ideal)?.norm_sqr())
}

/// Fidelity for one logical basis input of the `d = 2` gate, by simulation.
pub fn basis_fidelity(label: &LogicalLabel, imp: ImperfectionParams) -> Result<f64> {
    let enc = LogicalEncoding::cswap(2)?;
    let input = enc.encode(label)?;
    let real = imperfect_gate(imp)?.execute(&input)?;
    let ideal = gates::cswap_gate(2)?.execute(&input)?;
    state_fidelity(&real, &ideal)
}

/// `|(cosθ − √r sinθ)² / (1+r)|²`.
pub fn basis_fidelity_closed_form(imp: ImperfectionParams) -> f64 {
    let (c, _) = imp.coefficients();
    let amp = c * c / (1.0 + imp.r.abs());
    amp * amp
}

/// `(cosθ − √r sinθ)⁴/(1+r)² + (3/16)(sinθ + √r cosθ)⁴/(1+r)²`.
pub fn average_fidelity_closed_form(imp: ImperfectionParams) -> f64 {
    let (c, s) = imp.coefficients();
    let n2 = (1.0 + imp.r.abs()).powi(2);
    c.powi(4) / n2 + 3.0 / 16.0 * s.powi(4) / n2
}

/// Mean of `|⟨ψ_real|ψ_out⟩|²` over a uniform `N³` grid on `[0, 2π)³`.
///
/// The integrand is a trigonometric polynomial of degree at most 4 in each
/// angle, so the rule is exact once `N > 4`.
pub fn average_fidelity_quadrature(spec: &AverageFidelitySpec) -> Result<f64> {
    let n = spec.points_per_axis;
    if n < MIN_POINTS_PER_AXIS {
        return Err(Error::Parameter(format!(
            "need at least {MIN_POINTS_PER_AXIS} points per axis"
        )));
    }
    let ideal_gate = gates::cswap_gate(2)?.mode_map();
    let real_gate = imperfect_gate(spec.params)?.mode_map();
    let angle = |k: usize| TAU * k as f64 / n as f64;

    let slabs: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|ix| -> Result<f64> {
            let mut sum = 0.0;
            for iy in 0..n {
                for iz in 0..n {
                    let input =
                        input_state(&InputParams::from_angles(angle(ix), angle(iy), angle(iz)))?;
                    let real = input.apply_mode_map(&real_gate)?;
                    let ideal = input.apply_mode_map(&ideal_gate)?;
                    sum += state_fidelity(&real, &ideal)?;
                }
            }
            Ok(sum)
        })
        .collect::<Result<_>>()?;
    Ok(slabs.iter().sum::<f64>() / (n * n * n) as f64)
}

/// Baseline `ℱ₀₀₀`: the basis fidelity times `|1/(1+r)|²`.
pub fn comparison_fidelity_000(imp: ImperfectionParams) -> f64 {
    basis_fidelity_closed_form(imp) * (1.0 / (1.0 + imp.r)).powi(2)
}

/// Baseline `ℱ₁₀₀ = ℱ₀₀₀ · |(i(1+ε)(1 − e^{i(π−Δφ)}) / (2+2ε+ε²))⁴|²`.
pub fn comparison_fidelity_100(imp: ImperfectionParams, cmp: ComparisonParams) -> f64 {
    let eps = cmp.epsilon;
    let i = Complex64::new(0.0, 1.0);
    let phase = Complex64::from_polar(1.0, PI - cmp.delta_phi);
    let factor = i * (1.0 + eps) * (1.0 - phase) / (2.0 + 2.0 * eps + eps * eps);
    comparison_fidelity_000(imp) * factor.powi(4).norm_sqr()
}

/// `steps` evenly spaced values from `lo` to `hi`; a single step gives `lo`.
pub fn grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|k| {
                if k == steps - 1 {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (steps - 1) as f64
                }
            })
            .collect(),
    }
}

fn check_range(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Error::Parameter(format!(
            "{name} range [{lo}, {hi}] is not a finite increasing interval"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceMethod {
    ClosedForm,
    Quadrature { points_per_axis: usize },
}

/// Average fidelity on an `steps × steps` grid, row-major in `r` then `θ`.
///
/// Grid points are evaluated in parallel and collected in index order, so the
/// output does not depend on the worker count.
pub fn fidelity_surface(
    r_range: (f64, f64),
    theta_range: (f64, f64),
    steps: usize,
    method: SurfaceMethod,
) -> Result<Vec<FidelityReport>> {
    check_range("r", r_range)?;
    check_range("theta", theta_range)?;
    if steps == 0 {
        return Err(Error::Parameter("steps must be at least 1".into()));
    }
    if r_range.0 < 0.0 || r_range.1 > 1.0 {
        return Err(Error::Parameter("r range must lie within [0, 1]".into()));
    }
    if let SurfaceMethod::Quadrature { points_per_axis } = method {
        if points_per_axis < MIN_POINTS_PER_AXIS {
            return Err(Error::Parameter(format!(
                "quadrature needs at least {MIN_POINTS_PER_AXIS} points per axis"
            )));
        }
    }
    let rs = grid(r_range.0, r_range.1, steps);
    let thetas = grid(theta_range.0, theta_range.1, steps);
    let points: Vec<ImperfectionParams> = rs
        .iter()
        .flat_map(|&r| {
            thetas
                .iter()
                .map(move |&theta| ImperfectionParams { r, theta })
        })
        .collect();
    points
        .par_iter()
        .map(|&params| {
            let (value, method) = match method {
                SurfaceMethod::ClosedForm => (
                    average_fidelity_closed_form(params),
                    FidelityMethod::ClosedForm,
                ),
                SurfaceMethod::Quadrature { points_per_axis } => (
                    average_fidelity_quadrature(&AverageFidelitySpec::new(
                        params,
                        points_per_axis,
                    )?)?,
                    FidelityMethod::Quadrature,
                ),
            };
            Ok(FidelityReport {
                value,
                method,
                params,
            })
        })
        .collect()
}

/// Which parameter a curve holds fixed; the other one is swept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sweep {
    FixedTheta(f64),
    FixedR(f64),
}

impl Sweep {
    /// The default range of the swept parameter.
    pub fn default_range(self) -> (f64, f64) {
        match self {
            Sweep::FixedTheta(_) => R_RANGE,
            Sweep::FixedR(_) => THETA_RANGE,
        }
    }

    fn params(self, x: f64) -> ImperfectionParams {
        match self {
            Sweep::FixedTheta(theta) => ImperfectionParams { r: x, theta },
            Sweep::FixedR(r) => ImperfectionParams { r, theta: x },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub x: f64,
    pub ours: f64,
    pub cmp000: f64,
    pub cmp100: f64,
}

/// Basis fidelity of the two-PBS gate next to both comparison baselines,
/// along one parameter.
pub fn fidelity_curves(
    sweep: Sweep,
    range: (f64, f64),
    points: usize,
    cmp: ComparisonParams,
) -> Result<Vec<CurveRow>> {
    check_range("sweep", range)?;
    if points == 0 {
        return Err(Error::Parameter("points must be at least 1".into()));
    }
    let xs = grid(range.0, range.1, points);
    // validates the fixed parameter and every swept one
    for &x in [range.0, range.1].iter() {
        let p = sweep.params(x);
        ImperfectionParams::new(p.r, p.theta)?;
    }
    Ok(xs
        .into_iter()
        .map(|x| {
            let p = sweep.params(x);
            CurveRow {
                x,
                ours: basis_fidelity_closed_form(p),
                cmp000: comparison_fidelity_000(p),
                cmp100: comparison_fidelity_100(p, cmp),
            }
        })
        .collect())
}

/// Seventeen significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn surface_csv(rows: &[FidelityReport]) -> String {
    let mut out = String::from("r,theta,F\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            format_float(row.params.r),
            format_float(row.params.theta),
            format_float(row.value)
        ));
    }
    out
}

pub fn curves_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from("x,F_ours,F_cmp000,F_cmp100\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            format_float(row.x),
            format_float(row.ours),
            format_float(row.cmp000),
            format_float(row.cmp100)
        ));
    }
    out
}

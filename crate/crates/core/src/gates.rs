//! Circuit builders for the single-PBS CNOT and the `d`-PBS controlled-SWAP,
//! their target matrices, and the logical encoding used to read a circuit
//! back as a unitary.
//!
//! Encoding: the control bit lives in polarization (`V ≡ 0`, `H ≡ 1`; for
//! the photon pair `VV ≡ 0`, `HH ≡ 1`), each target dit in the spatial path
//! of one photon. For the controlled-SWAP the first photon travels in paths
//! `a_0..a_{d-1}` and the second in `b_0..b_{d-1}`; PBS `i` joins `a_i`
//! with `b_i`. For `d = 2` and `d = 3` the paths carry single letters
//! instead: `a b | c d` and `a b c | d e f`.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;

use crate::elements::{BeamSplitter, IdealPbs, OpticalElement, PhotonSource, Source, SpdcSource};
use crate::error::{Error, Result};
use crate::netlist::Netlist;
use crate::state::{Label, Mode, Monomial, PhotonicState, Polarization};

/// Tolerance for amplitude leaking out of the encoded subspace.
pub const LEAKAGE_TOL: f64 = 1e-12;
/// Largest target dimension accepted by the builders.
pub const MAX_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Cnot,
    Cswap { d: usize },
}

impl GateKind {
    pub fn validate(self) -> Result<Self> {
        match self {
            GateKind::Cswap { d } if !(2..=MAX_DIM).contains(&d) => Err(Error::Unsupported(
                format!("controlled-SWAP needs 2 <= d <= {MAX_DIM}, got d = {d}"),
            )),
            k => Ok(k),
        }
    }

    pub fn dim(self) -> usize {
        match self {
            GateKind::Cnot => 4,
            GateKind::Cswap { d } => 2 * d * d,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::Cnot => f.write_str("CNOT"),
            GateKind::Cswap { d } => write!(f, "CSWAP(2,{d},{d})"),
        }
    }
}

/// A computational basis label: control bit followed by target dits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogicalLabel {
    pub control: u8,
    pub targets: Vec<usize>,
}

impl LogicalLabel {
    pub fn cnot(control: u8, target: usize) -> Self {
        LogicalLabel {
            control,
            targets: vec![target],
        }
    }

    pub fn cswap(control: u8, i: usize, j: usize) -> Self {
        LogicalLabel {
            control,
            targets: vec![i, j],
        }
    }
}

impl fmt::Display for LogicalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.targets.iter().any(|&t| t > 9);
        write!(f, "|{}", self.control)?;
        for t in &self.targets {
            if wide {
                write!(f, ",{t}")?;
            } else {
                write!(f, "{t}")?;
            }
        }
        f.write_str("⟩")
    }
}

/// Path names for the two target registers of a `d`-level controlled-SWAP.
pub fn target_labels(d: usize) -> (Vec<Label>, Vec<Label>) {
    let named = |s: &[&str]| s.iter().map(|&x| Label::from(x)).collect::<Vec<_>>();
    match d {
        2 => (named(&["a", "b"]), named(&["c", "d"])),
        3 => (named(&["a", "b", "c"]), named(&["d", "e", "f"])),
        _ => (
            (0..d).map(|i| Label::from(format!("a{i}"))).collect(),
            (0..d).map(|i| Label::from(format!("b{i}"))).collect(),
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodingKind {
    CnotSinglePhoton,
    CswapTwoPhoton { d: usize },
}

/// Bijection between logical basis labels and physical monomials.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalEncoding {
    kind: EncodingKind,
    targets: Vec<Vec<Label>>,
}

/// Logical amplitudes read off a physical state.
#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    /// One amplitude per basis label, in [`LogicalEncoding::basis`] order.
    pub amplitudes: Vec<Complex64>,
    /// Squared norm outside the encoded subspace.
    pub residual: f64,
}

impl LogicalEncoding {
    pub fn new(kind: EncodingKind, targets: Vec<Vec<Label>>) -> Result<Self> {
        let (registers, d) = match kind {
            EncodingKind::CnotSinglePhoton => (1, 2),
            EncodingKind::CswapTwoPhoton { d } => (2, d),
        };
        if targets.len() != registers || targets.iter().any(|t| t.len() != d) {
            return Err(Error::Parameter(format!(
                "encoding needs {registers} target register(s) of {d} paths"
            )));
        }
        let mut seen: Vec<&Label> = Vec::new();
        for label in targets.iter().flatten() {
            if seen.contains(&label) {
                return Err(Error::Parameter(format!(
                    "path `{label}` used twice in encoding"
                )));
            }
            seen.push(label);
        }
        Ok(LogicalEncoding { kind, targets })
    }

    pub fn cnot() -> Self {
        LogicalEncoding {
            kind: EncodingKind::CnotSinglePhoton,
            targets: vec![vec![Label::from("a"), Label::from("b")]],
        }
    }

    pub fn cswap(d: usize) -> Result<Self> {
        GateKind::Cswap { d }.validate()?;
        let (a, b) = target_labels(d);
        Self::new(EncodingKind::CswapTwoPhoton { d }, vec![a, b])
    }

    pub fn kind(&self) -> EncodingKind {
        self.kind
    }

    pub fn gate_kind(&self) -> GateKind {
        match self.kind {
            EncodingKind::CnotSinglePhoton => GateKind::Cnot,
            EncodingKind::CswapTwoPhoton { d } => GateKind::Cswap { d },
        }
    }

    pub fn photons(&self) -> u8 {
        self.targets.len() as u8
    }

    pub fn target_dim(&self) -> usize {
        self.targets[0].len()
    }

    pub fn dim(&self) -> usize {
        2 * self.target_dim().pow(self.targets.len() as u32)
    }

    pub fn target_modes(&self) -> &[Vec<Label>] {
        &self.targets
    }

    pub fn modes(&self) -> Vec<Label> {
        self.targets.iter().flatten().cloned().collect()
    }

    /// Basis labels, control-major then targets lexicographic.
    pub fn basis(&self) -> Vec<LogicalLabel> {
        let d = self.target_dim();
        let mut out = Vec::with_capacity(self.dim());
        for control in 0..2u8 {
            match self.kind {
                EncodingKind::CnotSinglePhoton => {
                    out.extend((0..d).map(|t| LogicalLabel::cnot(control, t)));
                }
                EncodingKind::CswapTwoPhoton { .. } => {
                    for i in 0..d {
                        out.extend((0..d).map(|j| LogicalLabel::cswap(control, i, j)));
                    }
                }
            }
        }
        out
    }

    pub fn index_of(&self, label: &LogicalLabel) -> Result<usize> {
        self.check(label)?;
        let d = self.target_dim();
        Ok(label
            .targets
            .iter()
            .fold(label.control as usize, |acc, &t| acc * d + t))
    }

    fn check(&self, label: &LogicalLabel) -> Result<()> {
        let d = self.target_dim();
        if label.control > 1
            || label.targets.len() != self.targets.len()
            || label.targets.iter().any(|&t| t >= d)
        {
            return Err(Error::Parameter(format!(
                "logical label {label} out of range for this encoding"
            )));
        }
        Ok(())
    }

    pub fn monomial(&self, label: &LogicalLabel) -> Result<Monomial> {
        self.check(label)?;
        let pol = if label.control == 1 {
            Polarization::H
        } else {
            Polarization::V
        };
        Ok(Monomial::new(
            self.targets
                .iter()
                .zip(&label.targets)
                .map(|(paths, &t)| Mode::new(paths[t].clone(), pol)),
        ))
    }

    /// The basis state for `label` as a single unit-amplitude monomial.
    pub fn encode(&self, label: &LogicalLabel) -> Result<PhotonicState> {
        let mono = self.monomial(label)?;
        PhotonicState::new(self.photons(), self.modes())?
            .with_term(Complex64::new(1.0, 0.0), mono.modes().iter().cloned())
    }

    /// Encodes a full logical amplitude vector (basis order).
    pub fn encode_amplitudes(&self, amplitudes: &[Complex64]) -> Result<PhotonicState> {
        if amplitudes.len() != self.dim() {
            return Err(Error::Parameter(format!(
                "expected {} amplitudes, got {}",
                self.dim(),
                amplitudes.len()
            )));
        }
        let mut s = PhotonicState::new(self.photons(), self.modes())?;
        for (label, amp) in self.basis().iter().zip(amplitudes) {
            s = s.with_term(*amp, self.monomial(label)?.modes().iter().cloned())?;
        }
        Ok(s)
    }

    pub fn decode(&self, state: &PhotonicState) -> Result<Decoded> {
        if state.photons() != self.photons() {
            return Err(Error::PhotonMismatch {
                expected: self.photons(),
                found: state.photons(),
            });
        }
        let basis = self.basis();
        let mut index: HashMap<Monomial, usize> = HashMap::with_capacity(basis.len());
        for (k, label) in basis.iter().enumerate() {
            index.insert(self.monomial(label)?, k);
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.len()];
        let mut residual = 0.0;
        for (mono, amp) in state.terms() {
            match index.get(mono) {
                Some(&k) => amplitudes[k] = amp,
                None => residual += amp.norm_sqr() * mono.bosonic_weight(),
            }
        }
        Ok(Decoded {
            amplitudes,
            residual,
        })
    }
}

/// Dense complex matrix in the logical basis, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl GateMatrix {
    pub fn zeros(dim: usize) -> Self {
        GateMatrix {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.dim).map(|r| self.get(r, col)).collect()
    }

    pub fn max_deviation(&self, other: &GateMatrix) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(
            v.len(),
            self.dim,
            "vector length must match matrix dimension"
        );
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.get(r, c) * v[c]).sum())
            .collect()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let n = self.dim;
        (0..n).all(|i| {
            (0..n).all(|j| {
                let dot: Complex64 = (0..n).map(|k| self.get(k, i).conj() * self.get(k, j)).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                (dot - expect).norm() <= tol
            })
        })
    }

    /// Every entry exactly 0 or 1, with a single 1 per row and column.
    pub fn is_permutation(&self) -> bool {
        let n = self.dim;
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        if self.entries.iter().any(|&e| e != one && e != zero) {
            return false;
        }
        (0..n).all(|i| {
            (0..n).filter(|&j| self.get(i, j) == one).count() == 1
                && (0..n).filter(|&j| self.get(j, i) == one).count() == 1
        })
    }
}

/// The ideal gate as a 0/1 permutation matrix in the logical basis.
pub fn target_matrix(kind: GateKind) -> Result<GateMatrix> {
    let kind = kind.validate()?;
    let mut m = GateMatrix::zeros(kind.dim());
    let one = Complex64::new(1.0, 0.0);
    match kind {
        GateKind::Cnot => {
            for c in 0..2 {
                for t in 0..2 {
                    let out = if c == 1 { 1 - t } else { t };
                    m.set(2 * c + out, 2 * c + t, one);
                }
            }
        }
        GateKind::Cswap { d } => {
            let idx = |c: usize, i: usize, j: usize| (c * d + i) * d + j;
            for i in 0..d {
                for j in 0..d {
                    m.set(idx(0, i, j), idx(0, i, j), one);
                    m.set(idx(1, j, i), idx(1, i, j), one);
                }
            }
        }
    }
    Ok(m)
}

/// Real splitting amplitudes `(x, y)` of one fan-out beam splitter,
/// `x² + y² = 1`.
///
/// On the first photon's side `x` stays on the incoming path and `y` goes
/// to the newly opened one. The second photon's tree is the mirror image,
/// so there `x` goes to the new path and `y` stays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsParams {
    pub x: f64,
    pub y: f64,
}

impl BsParams {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let norm = x * x + y * y;
        if !norm.is_finite() || (norm - 1.0).abs() > crate::elements::BS_NORM_TOL {
            return Err(Error::Parameter(format!(
                "splitter amplitudes ({x}, {y}) not normalized"
            )));
        }
        Ok(BsParams { x, y })
    }

    pub fn from_angle(angle: f64) -> Self {
        let (y, x) = angle.sin_cos();
        BsParams { x, y }
    }
}

/// One splitting step of the fan-out tree: the path carrying leaf index
/// `stay` is split, opening the path for leaf `new`. The leaf counts give
/// the subtree sizes on either side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Split {
    pub stay: usize,
    pub new: usize,
    pub stay_leaves: usize,
    pub new_leaves: usize,
}

enum Node {
    Leaf,
    Split(Box<Node>, Box<Node>),
}

impl Node {
    fn full(depth: u32) -> Node {
        if depth == 0 {
            Node::Leaf
        } else {
            Node::Split(
                Box::new(Node::full(depth - 1)),
                Box::new(Node::full(depth - 1)),
            )
        }
    }

    fn split_first_leaves(&mut self, remaining: &mut usize) {
        match self {
            Node::Leaf => {
                if *remaining > 0 {
                    *remaining -= 1;
                    *self = Node::Split(Box::new(Node::Leaf), Box::new(Node::Leaf));
                }
            }
            Node::Split(stay, new) => {
                stay.split_first_leaves(remaining);
                new.split_first_leaves(remaining);
            }
        }
    }

    fn leaves(&self) -> usize {
        match self {
            Node::Leaf => 1,
            Node::Split(a, b) => a.leaves() + b.leaves(),
        }
    }
}

/// Decomposes `d = 2ⁿ + q` with `n ≥ 1`, `0 ≤ q < 2ⁿ`.
pub fn dimension_split(d: usize) -> Result<(u32, usize)> {
    if d < 2 {
        return Err(Error::Unsupported(format!("fan-out needs d >= 2, got {d}")));
    }
    let n = usize::BITS - 1 - d.leading_zeros();
    Ok((n, d - (1 << n)))
}

/// The `d − 1` splitting steps of the fan-out tree, in the order the beam
/// splitters are placed.
///
/// A full binary tree of depth `n` is built first, then the first `q` leaves
/// are split once more. Leaves are numbered depth-first with the staying
/// branch before the new one; steps are listed breadth-first.
pub fn fanout_plan(d: usize) -> Result<Vec<Split>> {
    let (n, q) = dimension_split(d)?;
    let mut root = Node::full(n);
    let mut remaining = q;
    root.split_first_leaves(&mut remaining);

    let mut plan = Vec::with_capacity(d - 1);
    let mut queue = std::collections::VecDeque::from([(&root, 0usize)]);
    while let Some((node, offset)) = queue.pop_front() {
        if let Node::Split(stay, new) = node {
            let stay_leaves = stay.leaves();
            plan.push(Split {
                stay: offset,
                new: offset + stay_leaves,
                stay_leaves,
                new_leaves: new.leaves(),
            });
            queue.push_back((stay, offset));
            queue.push_back((new, offset + stay_leaves));
        }
    }
    Ok(plan)
}

/// Beam-splitter settings for the two fan-out trees of a controlled-SWAP
/// state preparation.
#[derive(Debug, Clone, PartialEq)]
pub struct FanoutSpec {
    d: usize,
    n: u32,
    q: usize,
    a_side: Vec<BsParams>,
    b_side: Vec<BsParams>,
}

impl FanoutSpec {
    pub fn new(d: usize, a_side: Vec<BsParams>, b_side: Vec<BsParams>) -> Result<Self> {
        let (n, q) = dimension_split(d)?;
        for side in [&a_side, &b_side] {
            if side.len() != d - 1 {
                return Err(Error::Parameter(format!(
                    "fan-out for d = {d} needs {} splitters per side, got {}",
                    d - 1,
                    side.len()
                )));
            }
            for p in side.iter() {
                BsParams::new(p.x, p.y)?;
            }
        }
        Ok(FanoutSpec {
            d,
            n,
            q,
            a_side,
            b_side,
        })
    }

    /// Settings giving amplitude `1/√d` on every path of each photon.
    pub fn uniform(d: usize) -> Result<Self> {
        let plan = fanout_plan(d)?;
        let ratio =
            |part: usize, s: &Split| (part as f64 / (s.stay_leaves + s.new_leaves) as f64).sqrt();
        let a_side = plan
            .iter()
            .map(|s| BsParams {
                x: ratio(s.stay_leaves, s),
                y: ratio(s.new_leaves, s),
            })
            .collect();
        let b_side = plan
            .iter()
            .map(|s| BsParams {
                x: ratio(s.new_leaves, s),
                y: ratio(s.stay_leaves, s),
            })
            .collect();
        Self::new(d, a_side, b_side)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn a_side(&self) -> &[BsParams] {
        &self.a_side
    }

    pub fn b_side(&self) -> &[BsParams] {
        &self.b_side
    }
}

/// A state-preparation netlist, the gate netlist, and the encoding linking
/// the gate's paths to logical labels.
#[derive(Debug, Clone)]
pub struct CircuitBuild {
    pub prep: Netlist,
    pub gate: Netlist,
    pub encoding: LogicalEncoding,
}

/// Single photon `(h a_H + v a_V)` through one beam splitter `(a, b)` for
/// preparation; the gate is one PBS on `(a, b)`.
pub fn build_cnot(splitter: BsParams, h: Complex64, v: Complex64) -> Result<CircuitBuild> {
    let encoding = LogicalEncoding::cnot();
    let modes = encoding.modes();
    let prep = Netlist::new(modes.clone())?
        .with_source(Source::Photon(PhotonSource::new("a", h, v)?))?
        .with_element(BeamSplitter::new("a", "b", splitter.x, splitter.y)?)?;
    let gate = Netlist::new(modes)?.with_element(IdealPbs::new("a", "b")?)?;
    Ok(CircuitBuild {
        prep,
        gate,
        encoding,
    })
}

/// The gate alone: `d` PBSs, PBS `i` on `(a_i, b_i)`.
pub fn cswap_gate(d: usize) -> Result<Netlist> {
    let encoding = LogicalEncoding::cswap(d)?;
    let (a, b) = target_labels(d);
    let mut gate = Netlist::new(encoding.modes())?;
    for (ai, bi) in a.iter().zip(&b) {
        gate.push(IdealPbs::new(ai.clone(), bi.clone())?)?;
    }
    Ok(gate)
}

/// Pair source in `(a_0, b_{d-1})` followed by the two mirrored fan-out
/// trees, then the `d`-PBS gate.
pub fn build_cswap(fanout: &FanoutSpec, alpha: Complex64, beta: Complex64) -> Result<CircuitBuild> {
    let d = fanout.d();
    let encoding = LogicalEncoding::cswap(d)?;
    let (a, b) = target_labels(d);
    let mirror = |i: usize| d - 1 - i;

    let mut prep = Netlist::new(encoding.modes())?.with_source(Source::Spdc(SpdcSource::new(
        a[0].clone(),
        b[mirror(0)].clone(),
        alpha,
        beta,
    )?))?;
    let plan = fanout_plan(d)?;
    for ((step, pa), pb) in plan.iter().zip(fanout.a_side()).zip(fanout.b_side()) {
        prep.push(BeamSplitter::new(
            a[step.stay].clone(),
            a[step.new].clone(),
            pa.x,
            pa.y,
        )?)?;
        prep.push(BeamSplitter::new(
            b[mirror(step.stay)].clone(),
            b[mirror(step.new)].clone(),
            pb.y,
            pb.x,
        )?)?;
    }
    let gate = cswap_gate(d)?;
    Ok(CircuitBuild {
        prep,
        gate,
        encoding,
    })
}

/// Result of reading a gate netlist back as a logical matrix.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub matrix: GateMatrix,
    /// Largest per-column squared norm found outside the encoded subspace.
    pub max_residual: f64,
}

/// Runs every encoded basis state through `gate` and assembles the columns.
pub fn extract_logical_unitary(gate: &Netlist, encoding: &LogicalEncoding) -> Result<Extraction> {
    if gate
        .elements()
        .iter()
        .any(|e| matches!(e, OpticalElement::ImperfectPbs(_)))
    {
        return Err(Error::Contract(
            "logical extraction requires ideal elements".into(),
        ));
    }
    let basis = encoding.basis();
    let mut matrix = GateMatrix::zeros(basis.len());
    let mut max_residual: f64 = 0.0;
    let map = gate.mode_map();
    for (col, label) in basis.iter().enumerate() {
        let input = encoding.encode(label)?;
        if col == 0 {
            gate.execute(&input)?;
        }
        let out = input.apply_mode_map(&map)?;
        let decoded = encoding.decode(&out)?;
        if decoded.residual > LEAKAGE_TOL {
            return Err(Error::LeavesEncodedSubspace {
                label: label.to_string(),
                residual: decoded.residual,
            });
        }
        max_residual = max_residual.max(decoded.residual);
        for (row, amp) in decoded.amplitudes.into_iter().enumerate() {
            matrix.set(row, col, amp);
        }
    }
    Ok(Extraction {
        matrix,
        max_residual,
    })
}

/// Prepared physical state and its logical amplitude table.
#[derive(Debug, Clone)]
pub struct PreparedState {
    pub state: PhotonicState,
    /// `(label, amplitude)` in basis order.
    pub table: Vec<(LogicalLabel, Complex64)>,
    pub residual: f64,
}

impl PreparedState {
    pub fn amplitude(&self, label: &LogicalLabel) -> Option<Complex64> {
        self.table.iter().find(|(l, _)| l == label).map(|(_, a)| *a)
    }

    pub fn amplitudes(&self) -> Vec<Complex64> {
        self.table.iter().map(|(_, a)| *a).collect()
    }
}

pub fn prep_logical_state(prep: &Netlist, encoding: &LogicalEncoding) -> Result<PreparedState> {
    let state = prep.prepare()?;
    let decoded = encoding.decode(&state)?;
    if decoded.residual > LEAKAGE_TOL {
        return Err(Error::LeavesEncodedSubspace {
            label: "prepared state".into(),
            residual: decoded.residual,
        });
    }
    let table = encoding
        .basis()
        .into_iter()
        .zip(decoded.amplitudes)
        .collect();
    Ok(PreparedState {
        state,
        table,
        residual: decoded.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn cnot_target() {
        let m = target_matrix(GateKind::Cnot).unwrap();
        let expect = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]];
        for (r, row) in expect.iter().enumerate() {
            for (col, &v) in row.iter().enumerate() {
                assert_eq!(m.get(r, col), c(v as f64));
            }
        }
    }

    #[test]
    fn fredkin_target_swaps_rows_six_and_seven() {
        let m = target_matrix(GateKind::Cswap { d: 2 }).unwrap();
        for r in 0..8 {
            for col in 0..8 {
                let expect = match (r, col) {
                    (5, 6) | (6, 5) => 1.0,
                    (5, 5) | (6, 6) => 0.0,
                    _ if r == col => 1.0,
                    _ => 0.0,
                };
                assert_eq!(m.get(r, col), c(expect), "({r}, {col})");
            }
        }
    }

    #[test]
    fn qutrit_target_maps_110_to_101() {
        let enc = LogicalEncoding::cswap(3).unwrap();
        let m = target_matrix(GateKind::Cswap { d: 3 }).unwrap();
        let col = enc.index_of(&LogicalLabel::cswap(1, 1, 0)).unwrap();
        let row = enc.index_of(&LogicalLabel::cswap(1, 0, 1)).unwrap();
        assert_eq!(m.get(row, col), c(1.0));
        assert!(m.is_permutation());
    }

    #[test]
    fn unsupported_dimension() {
        assert!(matches!(
            target_matrix(GateKind::Cswap { d: 1 }),
            Err(Error::Unsupported(_))
        ));
        assert!(LogicalEncoding::cswap(0).is_err());
    }

    #[test]
    fn encodings() {
        let enc = LogicalEncoding::cswap(2).unwrap();
        let s = enc.encode(&LogicalLabel::cswap(0, 0, 0)).unwrap();
        assert_eq!(s.amplitude_of([Mode::v("a"), Mode::v("c")]), c(1.0));
        let s = enc.encode(&LogicalLabel::cswap(1, 1, 1)).unwrap();
        assert_eq!(s.amplitude_of([Mode::h("b"), Mode::h("d")]), c(1.0));

        let enc3 = LogicalEncoding::cswap(3).unwrap();
        let s = enc3.encode(&LogicalLabel::cswap(1, 2, 0)).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.amplitude_of([Mode::h("c"), Mode::h("d")]), c(1.0));

        assert!(enc.encode(&LogicalLabel::cswap(1, 2, 0)).is_err());
        assert!(enc.encode(&LogicalLabel::cswap(2, 0, 0)).is_err());
        assert!(enc.encode(&LogicalLabel::cnot(0, 0)).is_err());
    }

    #[test]
    fn encoding_rejects_shared_paths() {
        let kind = EncodingKind::CswapTwoPhoton { d: 2 };
        let shared = vec![
            vec![Label::from("a"), Label::from("b")],
            vec![Label::from("b"), Label::from("c")],
        ];
        assert!(LogicalEncoding::new(kind, shared).is_err());
    }

    #[test]
    fn basis_order_is_control_major() {
        let enc = LogicalEncoding::cswap(2).unwrap();
        let names: Vec<String> = enc.basis().iter().map(|l| l.to_string()).collect();
        assert_eq!(
            names,
            [
                "|000⟩", "|001⟩", "|010⟩", "|011⟩", "|100⟩", "|101⟩", "|110⟩", "|111⟩"
            ]
        );
        for (k, l) in enc.basis().iter().enumerate() {
            assert_eq!(enc.index_of(l).unwrap(), k);
        }
        assert_eq!(LogicalLabel::cswap(1, 10, 3).to_string(), "|1,10,3⟩");
    }

    #[test]
    fn dimension_decomposition() {
        assert_eq!(dimension_split(2).unwrap(), (1, 0));
        assert_eq!(dimension_split(3).unwrap(), (1, 1));
        assert_eq!(dimension_split(5).unwrap(), (2, 1));
        assert_eq!(dimension_split(8).unwrap(), (3, 0));
        assert_eq!(dimension_split(15).unwrap(), (3, 7));
        assert!(dimension_split(1).is_err());
    }

    #[test]
    fn fanout_plan_shapes() {
        let plan = fanout_plan(3).unwrap();
        let pairs: Vec<_> = plan.iter().map(|s| (s.stay, s.new)).collect();
        assert_eq!(pairs, [(0, 2), (0, 1)]);

        let plan = fanout_plan(4).unwrap();
        let pairs: Vec<_> = plan.iter().map(|s| (s.stay, s.new)).collect();
        assert_eq!(pairs, [(0, 2), (0, 1), (2, 3)]);

        for d in 2..=33 {
            let plan = fanout_plan(d).unwrap();
            assert_eq!(plan.len(), d - 1);
            // every leaf except 0 is opened exactly once, always from an
            // already-open path
            let mut open = vec![false; d];
            open[0] = true;
            for s in &plan {
                assert!(open[s.stay] && !open[s.new], "d = {d}");
                open[s.new] = true;
            }
            assert!(open.iter().all(|&o| o));
        }
    }

    #[test]
    fn qutrit_prep_layout() {
        let build = build_cswap(&FanoutSpec::uniform(3).unwrap(), c(1.0), c(0.0)).unwrap();
        let src = build.prep.source().unwrap();
        assert_eq!(
            src.labels().iter().map(|l| &***l).collect::<Vec<_>>(),
            ["a", "f"]
        );
        let pairs: Vec<(String, String)> = build
            .prep
            .elements()
            .iter()
            .map(|e| (e.modes().0.to_string(), e.modes().1.to_string()))
            .collect();
        let expect = [("a", "c"), ("f", "d"), ("a", "b"), ("f", "e")];
        assert_eq!(pairs.len(), 4);
        for ((x, y), (ex, ey)) in pairs.iter().zip(expect) {
            assert_eq!((x.as_str(), y.as_str()), (ex, ey));
        }
    }

    #[test]
    fn uniform_fanout_gives_flat_amplitudes() {
        for d in [2, 3, 5, 7, 8, 12] {
            let build = build_cswap(&FanoutSpec::uniform(d).unwrap(), c(1.0), c(0.0)).unwrap();
            let prepared = prep_logical_state(&build.prep, &build.encoding).unwrap();
            let expect = 1.0 / d as f64;
            for (label, amp) in &prepared.table {
                let want = if label.control == 1 { expect } else { 0.0 };
                assert!((amp - c(want)).norm() < 1e-12, "d = {d} {label}");
            }
        }
    }

    #[test]
    fn cnot_extraction() {
        let build = build_cnot(BsParams::new(0.6, 0.8).unwrap(), c(1.0), c(0.0)).unwrap();
        let ex = extract_logical_unitary(&build.gate, &build.encoding).unwrap();
        assert_eq!(ex.matrix, target_matrix(GateKind::Cnot).unwrap());
        assert_eq!(ex.max_residual, 0.0);
    }

    #[test]
    fn leakage_is_detected() {
        let enc = LogicalEncoding::cswap(2).unwrap();
        // a PBS inside photon one's register only permutes encoded states
        let inside = Netlist::new(enc.modes())
            .unwrap()
            .with_element(IdealPbs::new("a", "b").unwrap())
            .unwrap();
        assert!(extract_logical_unitary(&inside, &enc).is_ok());
        // a splitter across registers can put both photons in one register
        let miswired = Netlist::new(enc.modes())
            .unwrap()
            .with_element(BeamSplitter::new("a", "c", 0.6, 0.8).unwrap())
            .unwrap();
        assert!(matches!(
            extract_logical_unitary(&miswired, &enc),
            Err(Error::LeavesEncodedSubspace { .. })
        ));
    }

    #[test]
    fn extraction_rejects_imperfect_elements() {
        let enc = LogicalEncoding::cswap(2).unwrap();
        let gate = Netlist::new(enc.modes())
            .unwrap()
            .with_element(crate::elements::ImperfectPbs::new("a", "c", 0.0, 0.0).unwrap())
            .unwrap();
        assert!(matches!(
            extract_logical_unitary(&gate, &enc),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn all_pass_prep() {
        let (alpha, beta) = (0.6, 0.8);
        let all_pass = vec![BsParams { x: 1.0, y: 0.0 }; 2];
        let spec = FanoutSpec::new(3, all_pass.clone(), all_pass).unwrap();
        let build = build_cswap(&spec, c(alpha), c(beta)).unwrap();
        let p = prep_logical_state(&build.prep, &build.encoding).unwrap();
        let nonzero: Vec<_> = p.table.iter().filter(|(_, a)| a.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 2);
        assert_eq!(p.amplitude(&LogicalLabel::cswap(1, 0, 0)), Some(c(alpha)));
        assert_eq!(p.amplitude(&LogicalLabel::cswap(0, 0, 0)), Some(c(beta)));
    }
}

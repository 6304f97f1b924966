//! Photonic states of one or two photons, expanded over products of
//! creation operators acting on the vacuum.
//!
//! A state is stored as a map from [`Monomial`] (a canonically sorted
//! multiset of [`Mode`]s) to its complex coefficient. Because creation
//! operators commute, sorting the modes gives every physical term a unique
//! key. The coefficient is the prefactor of the operator product, so a
//! doubly-occupied mode `a†a†|vac⟩` carries an extra factor 2 in the norm.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::text::{self, Token};

/// Amplitudes whose magnitude falls below this after merging are dropped.
pub const MERGE_DROP: f64 = 1e-15;

/// Spatial path label.
pub type Label = Arc<str>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::H, Polarization::V];
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::H => "H",
            Polarization::V => "V",
        })
    }
}

/// A single bosonic mode: spatial path plus polarization.
///
/// Ordering is spatial label first, then `H < V`, which is the canonical
/// order of modes inside a [`Monomial`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    spatial: Label,
    polarization: Polarization,
}

impl Mode {
    pub fn new(spatial: impl Into<Label>, polarization: Polarization) -> Self {
        Mode {
            spatial: spatial.into(),
            polarization,
        }
    }

    pub fn h(spatial: impl Into<Label>) -> Self {
        Self::new(spatial, Polarization::H)
    }

    pub fn v(spatial: impl Into<Label>) -> Self {
        Self::new(spatial, Polarization::V)
    }

    pub fn spatial(&self) -> &Label {
        &self.spatial
    }

    pub fn polarization(&self) -> Polarization {
        self.polarization
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.spatial, self.polarization)
    }
}

/// Product of creation operators, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(SmallVec<[Mode; 2]>);

impl Monomial {
    pub fn new(modes: impl IntoIterator<Item = Mode>) -> Self {
        let mut modes: SmallVec<[Mode; 2]> = modes.into_iter().collect();
        modes.sort();
        Monomial(modes)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.0
    }

    pub fn photons(&self) -> usize {
        self.0.len()
    }

    /// `⟨vac| m m† |vac⟩` for a normalized operator product: the product of
    /// factorials of the mode multiplicities.
    pub fn bosonic_weight(&self) -> f64 {
        let mut weight = 1.0;
        let mut run = 1.0;
        for pair in self.0.windows(2) {
            if pair[0] == pair[1] {
                run += 1.0;
                weight *= run;
            } else {
                run = 1.0;
            }
        }
        weight
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// A linear single-mode substitution table: each listed mode is replaced by
/// a complex combination of output modes. Unlisted modes map to themselves.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModeMap {
    images: BTreeMap<Mode, Vec<(Mode, Complex64)>>,
}

impl ModeMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, from: Mode, image: Vec<(Mode, Complex64)>) {
        self.images.insert(from, image);
    }

    pub fn with(mut self, from: Mode, image: Vec<(Mode, Complex64)>) -> Self {
        self.insert(from, image);
        self
    }

    pub fn image(&self, mode: &Mode) -> Option<&[(Mode, Complex64)]> {
        self.images.get(mode).map(Vec::as_slice)
    }

    /// The substitution `self` followed by `next`.
    pub fn then(&self, next: &ModeMap) -> ModeMap {
        let mut images = BTreeMap::new();
        let sources: BTreeSet<&Mode> = self.images.keys().chain(next.images.keys()).collect();
        for from in sources {
            let first: &[(Mode, Complex64)] = match self.image(from) {
                Some(image) => image,
                None => {
                    images.insert(from.clone(), next.images[from].clone());
                    continue;
                }
            };
            let mut acc: BTreeMap<Mode, Complex64> = BTreeMap::new();
            for (mid, c1) in first {
                match next.image(mid) {
                    Some(image) => {
                        for (to, c2) in image {
                            *acc.entry(to.clone()).or_default() += c1 * c2;
                        }
                    }
                    None => *acc.entry(mid.clone()).or_default() += c1,
                }
            }
            images.insert(from.clone(), acc.into_iter().collect());
        }
        ModeMap { images }
    }

    /// Every mode appearing as a source or in an image.
    pub fn support(&self) -> BTreeSet<Mode> {
        let mut modes = BTreeSet::new();
        for (from, image) in &self.images {
            modes.insert(from.clone());
            modes.extend(image.iter().map(|(m, _)| m.clone()));
        }
        modes
    }

    /// Dense matrix over `basis`; column `j` is the image of `basis[j]`.
    pub fn matrix(&self, basis: &[Mode]) -> Vec<Vec<Complex64>> {
        let n = basis.len();
        let mut mat = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for (j, from) in basis.iter().enumerate() {
            match self.image(from) {
                Some(image) => {
                    for (to, c) in image {
                        if let Some(i) = basis.iter().position(|b| b == to) {
                            mat[i][j] += c;
                        }
                    }
                }
                None => mat[j][j] = Complex64::new(1.0, 0.0),
            }
        }
        mat
    }

    /// Checks `M† M = I` over the support of the map.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let basis: Vec<Mode> = self.support().into_iter().collect();
        let mat = self.matrix(&basis);
        let n = basis.len();
        for i in 0..n {
            for j in 0..n {
                let mut dot = Complex64::new(0.0, 0.0);
                for row in &mat {
                    dot += row[i].conj() * row[j];
                }
                let expected = if i == j { 1.0 } else { 0.0 };
                if (dot - expected).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonicState {
    photons: u8,
    modes: BTreeSet<Label>,
    amplitudes: BTreeMap<Monomial, Complex64>,
}

impl PhotonicState {
    /// An empty (zero) state over the given spatial labels.
    pub fn new<I, S>(photons: u8, labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<Label>,
    {
        if !(1..=2).contains(&photons) {
            return Err(Error::Parameter(format!(
                "photon number must be 1 or 2, got {photons}"
            )));
        }
        let mut modes = BTreeSet::new();
        for label in labels {
            let label: Label = label.into();
            if !text::is_valid_label(&label) {
                return Err(Error::Parameter(format!("invalid mode label `{label}`")));
            }
            modes.insert(label);
        }
        Ok(PhotonicState {
            photons,
            modes,
            amplitudes: BTreeMap::new(),
        })
    }

    /// Adds `amp` times the given operator product, merging with any
    /// existing term.
    pub fn with_term(
        mut self,
        amp: Complex64,
        modes: impl IntoIterator<Item = Mode>,
    ) -> Result<Self> {
        let mono = Monomial::new(modes);
        if mono.photons() != self.photons as usize {
            return Err(Error::PhotonMismatch {
                expected: self.photons,
                found: mono.photons() as u8,
            });
        }
        for m in mono.modes() {
            self.check_declared(m.spatial())?;
        }
        let entry = self
            .amplitudes
            .entry(mono.clone())
            .or_insert(Complex64::new(0.0, 0.0));
        *entry += amp;
        if entry.norm() < MERGE_DROP {
            self.amplitudes.remove(&mono);
        }
        Ok(self)
    }

    /// Widens the declared mode set.
    pub fn with_declared_modes<I, S>(mut self, labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<Label>,
    {
        for label in labels {
            let label: Label = label.into();
            if !text::is_valid_label(&label) {
                return Err(Error::Parameter(format!("invalid mode label `{label}`")));
            }
            self.modes.insert(label);
        }
        Ok(self)
    }

    pub fn photons(&self) -> u8 {
        self.photons
    }

    pub fn declared_modes(&self) -> &BTreeSet<Label> {
        &self.modes
    }

    pub fn is_declared(&self, label: &str) -> bool {
        self.modes.contains(label)
    }

    pub(crate) fn check_declared(&self, label: &str) -> Result<()> {
        if self.is_declared(label) {
            Ok(())
        } else {
            Err(Error::UndeclaredMode(label.to_string()))
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Complex64)> {
        self.amplitudes.iter().map(|(m, a)| (m, *a))
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitude(&self, mono: &Monomial) -> Complex64 {
        self.amplitudes
            .get(mono)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Coefficient of the operator product over `modes`, in any order.
    pub fn amplitude_of(&self, modes: impl IntoIterator<Item = Mode>) -> Complex64 {
        self.amplitude(&Monomial::new(modes))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|(m, a)| a.norm_sqr() * m.bosonic_weight())
            .sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner_product(&self, other: &PhotonicState) -> Result<Complex64> {
        if self.photons != other.photons {
            return Err(Error::PhotonMismatch {
                expected: self.photons,
                found: other.photons,
            });
        }
        let (small, large, flip) = if self.len() <= other.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (mono, a) in &small.amplitudes {
            if let Some(b) = large.amplitudes.get(mono) {
                let (bra, ket) = if flip { (*b, *a) } else { (*a, *b) };
                acc += bra.conj() * ket * mono.bosonic_weight();
            }
        }
        Ok(acc)
    }

    /// Substitutes every creation operator by its image under `map` and
    /// re-expands.
    pub fn apply_mode_map(&self, map: &ModeMap) -> Result<PhotonicState> {
        for image in map.images.values() {
            for (to, _) in image {
                self.check_declared(to.spatial())?;
            }
        }
        let mut out: BTreeMap<Monomial, Complex64> = BTreeMap::new();
        for (mono, amp) in &self.amplitudes {
            let identity: SmallVec<[[(Mode, Complex64); 1]; 2]> = mono
                .modes()
                .iter()
                .map(|m| [(m.clone(), Complex64::new(1.0, 0.0))])
                .collect();
            let images: SmallVec<[&[(Mode, Complex64)]; 2]> = mono
                .modes()
                .iter()
                .zip(identity.iter())
                .map(|(m, id)| map.image(m).unwrap_or(id.as_slice()))
                .collect();
            expand(&images, *amp, &mut SmallVec::new(), &mut out);
        }
        out.retain(|_, a| a.norm() >= MERGE_DROP);
        Ok(PhotonicState {
            photons: self.photons,
            modes: self.modes.clone(),
            amplitudes: out,
        })
    }

    pub fn scaled(&self, factor: Complex64) -> PhotonicState {
        let mut out = self.clone();
        for a in out.amplitudes.values_mut() {
            *a *= factor;
        }
        out.amplitudes.retain(|_, a| a.norm() >= MERGE_DROP);
        out
    }

    /// `a·self + b·other`, over the union of declared modes.
    pub fn combine(
        &self,
        a: Complex64,
        other: &PhotonicState,
        b: Complex64,
    ) -> Result<PhotonicState> {
        if self.photons != other.photons {
            return Err(Error::PhotonMismatch {
                expected: self.photons,
                found: other.photons,
            });
        }
        let mut amplitudes: BTreeMap<Monomial, Complex64> = BTreeMap::new();
        for (m, x) in &self.amplitudes {
            *amplitudes.entry(m.clone()).or_default() += a * x;
        }
        for (m, y) in &other.amplitudes {
            *amplitudes.entry(m.clone()).or_default() += b * y;
        }
        amplitudes.retain(|_, v| v.norm() >= MERGE_DROP);
        Ok(PhotonicState {
            photons: self.photons,
            modes: self.modes.union(&other.modes).cloned().collect(),
            amplitudes,
        })
    }

    /// Largest entrywise amplitude difference over the union of terms.
    pub fn max_abs_diff(&self, other: &PhotonicState) -> f64 {
        let keys: BTreeSet<&Monomial> = self
            .amplitudes
            .keys()
            .chain(other.amplitudes.keys())
            .collect();
        keys.into_iter()
            .map(|k| (self.amplitude(k) - other.amplitude(k)).norm())
            .fold(0.0, f64::max)
    }
}

fn expand(
    images: &[&[(Mode, Complex64)]],
    coeff: Complex64,
    prefix: &mut SmallVec<[Mode; 2]>,
    out: &mut BTreeMap<Monomial, Complex64>,
) {
    match images.split_first() {
        None => {
            let mono = Monomial::new(prefix.iter().cloned());
            *out.entry(mono).or_default() += coeff;
        }
        Some((first, rest)) => {
            for (mode, c) in first.iter() {
                prefix.push(mode.clone());
                expand(rest, coeff * c, prefix, out);
                prefix.pop();
            }
        }
    }
}

impl fmt::Display for PhotonicState {
    /// Writes the line-oriented state file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "photons {}", self.photons)?;
        f.write_str("modes")?;
        for label in &self.modes {
            write!(f, " {label}")?;
        }
        writeln!(f)?;
        for (mono, amp) in &self.amplitudes {
            writeln!(f, "amp {:?} {:?} {mono}", amp.re, amp.im)?;
        }
        Ok(())
    }
}

impl FromStr for PhotonicState {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let mut photons: Option<u8> = None;
        let mut state: Option<PhotonicState> = None;
        for (idx, line) in input.lines().enumerate() {
            let lineno = idx + 1;
            let tokens = text::tokenize(line);
            let Some((head, args)) = tokens.split_first() else {
                continue;
            };
            match head.text {
                "photons" => {
                    if photons.is_some() {
                        return Err(Error::parse(
                            lineno,
                            head.column,
                            "duplicate `photons` directive",
                        ));
                    }
                    let [tok] = args else {
                        return Err(Error::parse(
                            lineno,
                            head.column,
                            "`photons` takes exactly one argument",
                        ));
                    };
                    photons = match tok.text {
                        "1" => Some(1),
                        "2" => Some(2),
                        _ => {
                            return Err(Error::parse(
                                lineno,
                                tok.column,
                                "photon number must be 1 or 2",
                            ));
                        }
                    };
                }
                "modes" => {
                    let Some(n) = photons else {
                        return Err(Error::parse(
                            lineno,
                            head.column,
                            "`modes` before `photons`",
                        ));
                    };
                    if state.is_some() {
                        return Err(Error::parse(
                            lineno,
                            head.column,
                            "duplicate `modes` directive",
                        ));
                    }
                    let mut labels = Vec::with_capacity(args.len());
                    for tok in args {
                        labels.push(text::parse_label(lineno, *tok)?.to_string());
                    }
                    state = Some(PhotonicState::new(n, labels)?);
                }
                "amp" => {
                    let Some(s) = state.take() else {
                        return Err(Error::parse(lineno, head.column, "`amp` before `modes`"));
                    };
                    if args.len() < 3 {
                        return Err(Error::parse(
                            lineno,
                            text::end_column(line),
                            "`amp` needs <re> <im> and modes",
                        ));
                    }
                    let re = text::parse_f64(lineno, args[0])?;
                    let im = text::parse_f64(lineno, args[1])?;
                    let mut modes = Vec::new();
                    for tok in &args[2..] {
                        let mode = parse_mode(lineno, *tok)?;
                        if !s.is_declared(mode.spatial()) {
                            return Err(Error::parse(
                                lineno,
                                tok.column,
                                format!("undeclared mode `{}`", mode.spatial()),
                            ));
                        }
                        modes.push(mode);
                    }
                    if modes.len() != s.photons() as usize {
                        return Err(Error::parse(
                            lineno,
                            args[2].column,
                            format!(
                                "term has {} operators, expected {}",
                                modes.len(),
                                s.photons()
                            ),
                        ));
                    }
                    state = Some(s.with_term(Complex64::new(re, im), modes)?);
                }
                other => {
                    return Err(Error::parse(
                        lineno,
                        head.column,
                        format!("unknown directive `{other}`"),
                    ));
                }
            }
        }
        state.ok_or_else(|| {
            Error::parse(
                input.lines().count().max(1),
                1,
                "missing `photons`/`modes` header",
            )
        })
    }
}

fn parse_mode(line: usize, tok: Token<'_>) -> Result<Mode> {
    let Some((spatial, pol)) = tok.text.split_once(':') else {
        return Err(Error::parse(
            line,
            tok.column,
            format!("expected <label>:<H|V>, got `{}`", tok.text),
        ));
    };
    if !text::is_valid_label(spatial) {
        return Err(Error::parse(
            line,
            tok.column,
            format!("invalid mode label `{spatial}`"),
        ));
    }
    let polarization = match pol {
        "H" => Polarization::H,
        "V" => Polarization::V,
        _ => {
            return Err(Error::parse(
                line,
                tok.column + spatial.chars().count() + 1,
                format!("polarization must be H or V, got `{pol}`"),
            ))
        }
    };
    Ok(Mode::new(spatial, polarization))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn single(label: &str, pol: Polarization) -> PhotonicState {
        PhotonicState::new(1, ["a", "b"])
            .unwrap()
            .with_term(c(1.0), [Mode::new(label, pol)])
            .unwrap()
    }

    #[test]
    fn normalized_self_overlap_is_one() {
        let s = PhotonicState::new(1, ["a"])
            .unwrap()
            .with_term(Complex64::new(0.6, 0.0), [Mode::h("a")])
            .unwrap()
            .with_term(Complex64::new(0.0, 0.8), [Mode::v("a")])
            .unwrap();
        let ip = s.inner_product(&s).unwrap();
        assert!((ip - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn orthogonal_polarizations() {
        let h = single("a", Polarization::H);
        let v = single("a", Polarization::V);
        assert_eq!(h.inner_product(&v).unwrap(), c(0.0));
    }

    #[test]
    fn photon_mismatch_is_an_error() {
        let one = single("a", Polarization::H);
        let two = PhotonicState::new(2, ["a", "b"])
            .unwrap()
            .with_term(c(1.0), [Mode::h("a"), Mode::h("b")])
            .unwrap();
        assert!(matches!(
            one.inner_product(&two),
            Err(Error::PhotonMismatch { .. })
        ));
    }

    #[test]
    fn doubly_occupied_mode_has_weight_two() {
        let s = PhotonicState::new(2, ["a"])
            .unwrap()
            .with_term(c(FRAC_1_SQRT_2), [Mode::h("a"), Mode::h("a")])
            .unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        assert!((s.inner_product(&s).unwrap().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_map_keeps_state() {
        let s = single("a", Polarization::H);
        assert_eq!(s.apply_mode_map(&ModeMap::new()).unwrap(), s);
    }

    #[test]
    fn balanced_splitting_map() {
        // 2x2 oracle: [[1/√2, -1/√2], [1/√2, 1/√2]] applied to (1, 0).
        let oracle = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
        let map = ModeMap::new().with(
            Mode::h("a"),
            vec![
                (Mode::h("a"), c(FRAC_1_SQRT_2)),
                (Mode::h("b"), c(FRAC_1_SQRT_2)),
            ],
        );
        let out = single("a", Polarization::H).apply_mode_map(&map).unwrap();
        assert_eq!(out.len(), 2);
        assert!((out.amplitude_of([Mode::h("a")]) - c(oracle[0])).norm() < 1e-15);
        assert!((out.amplitude_of([Mode::h("b")]) - c(oracle[1])).norm() < 1e-15);
    }

    #[test]
    fn swapping_commuting_operators_keeps_monomial() {
        let s = PhotonicState::new(2, ["a", "b"])
            .unwrap()
            .with_term(c(1.0), [Mode::h("a"), Mode::h("b")])
            .unwrap();
        let swap = ModeMap::new()
            .with(Mode::h("a"), vec![(Mode::h("b"), c(1.0))])
            .with(Mode::h("b"), vec![(Mode::h("a"), c(1.0))]);
        assert_eq!(s.apply_mode_map(&swap).unwrap(), s);
    }

    #[test]
    fn map_into_undeclared_label_fails() {
        let map = ModeMap::new().with(Mode::h("a"), vec![(Mode::h("z"), c(1.0))]);
        let err = single("a", Polarization::H)
            .apply_mode_map(&map)
            .unwrap_err();
        assert_eq!(err, Error::UndeclaredMode("z".into()));
    }

    #[test]
    fn merge_drops_cancelled_terms() {
        // Hadamard-like map applied twice interferes b away completely.
        let map = ModeMap::new()
            .with(
                Mode::h("a"),
                vec![
                    (Mode::h("a"), c(FRAC_1_SQRT_2)),
                    (Mode::h("b"), c(FRAC_1_SQRT_2)),
                ],
            )
            .with(
                Mode::h("b"),
                vec![
                    (Mode::h("a"), c(FRAC_1_SQRT_2)),
                    (Mode::h("b"), c(-FRAC_1_SQRT_2)),
                ],
            );
        let s = single("a", Polarization::H);
        let twice = s
            .apply_mode_map(&map)
            .unwrap()
            .apply_mode_map(&map)
            .unwrap();
        assert_eq!(twice.len(), 1);
        assert!(twice.max_abs_diff(&s) < 1e-15);
    }

    #[test]
    fn composed_maps_match_sequential_application() {
        let h = FRAC_1_SQRT_2;
        let split = ModeMap::new()
            .with(
                Mode::h("a"),
                vec![(Mode::h("a"), c(h)), (Mode::h("b"), c(h))],
            )
            .with(
                Mode::h("b"),
                vec![(Mode::h("a"), c(-h)), (Mode::h("b"), c(h))],
            );
        let swap = ModeMap::new()
            .with(Mode::h("a"), vec![(Mode::h("b"), c(1.0))])
            .with(Mode::h("b"), vec![(Mode::h("a"), c(1.0))]);
        let s = PhotonicState::new(2, ["a", "b"])
            .unwrap()
            .with_term(c(0.6), [Mode::h("a"), Mode::v("b")])
            .unwrap()
            .with_term(c(0.8), [Mode::h("a"), Mode::h("b")])
            .unwrap();
        let stepwise = s
            .apply_mode_map(&split)
            .unwrap()
            .apply_mode_map(&swap)
            .unwrap();
        let composed = s.apply_mode_map(&split.then(&swap)).unwrap();
        assert!(stepwise.max_abs_diff(&composed) < 1e-15);
        assert!(swap.then(&swap).is_unitary(0.0));
    }

    #[test]
    fn unitarity_check() {
        let good = ModeMap::new()
            .with(Mode::h("a"), vec![(Mode::h("b"), c(1.0))])
            .with(Mode::h("b"), vec![(Mode::h("a"), c(1.0))]);
        assert!(good.is_unitary(1e-12));
        let bad = ModeMap::new().with(Mode::h("a"), vec![(Mode::h("b"), c(1.0))]);
        // a and b both land on b
        assert!(!bad.is_unitary(1e-12));
    }

    #[test]
    fn file_format_round_trip() {
        let s = PhotonicState::new(2, ["a", "b", "c", "d"])
            .unwrap()
            .with_term(Complex64::new(0.6, -0.1), [Mode::h("c"), Mode::h("a")])
            .unwrap()
            .with_term(Complex64::new(1e-7, 0.3), [Mode::v("b"), Mode::v("d")])
            .unwrap();
        let text = s.to_string();
        assert!(text.starts_with("photons 2\nmodes a b c d\n"));
        assert!(text.contains("amp 0.6 -0.1 a:H c:H\n"));
        let back: PhotonicState = text.parse().unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = "photons 1\nmodes a\nbogus 1\n"
            .parse::<PhotonicState>()
            .unwrap_err();
        assert_eq!(err, Error::parse(3, 1, "unknown directive `bogus`"));

        let err = "photons 1\nmodes a\namp 1 0 b:H\n"
            .parse::<PhotonicState>()
            .unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                line: 3,
                column: 9,
                ..
            }
        ));

        let err = "photons 1\nmodes a\namp 1 x a:H\n"
            .parse::<PhotonicState>()
            .unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                line: 3,
                column: 7,
                ..
            }
        ));

        let err = "photons 2\nmodes a\namp 1 0 a:H\n"
            .parse::<PhotonicState>()
            .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));

        let err = "photons 1\nmodes a\namp 1 0 a:X\n"
            .parse::<PhotonicState>()
            .unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                line: 3,
                column: 11,
                ..
            }
        ));

        let err = "photons 3\n".parse::<PhotonicState>().unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                line: 1,
                column: 9,
                ..
            }
        ));
    }
}

//! Optical elements expressed as mode substitutions, plus the photon sources
//! that seed a circuit.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{Label, Mode, ModeMap, PhotonicState, Polarization};
use crate::text;

/// Tolerance on `γ² + δ² = 1` for beam splitters.
pub const BS_NORM_TOL: f64 = 1e-12;
/// Tolerance on `|α|² + |β|² = 1` for sources.
pub const SOURCE_NORM_TOL: f64 = 1e-9;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn check_pair(a: &str, b: &str) -> Result<()> {
    for label in [a, b] {
        if !text::is_valid_label(label) {
            return Err(Error::Parameter(format!("invalid mode label `{label}`")));
        }
    }
    if a == b {
        return Err(Error::Parameter(format!(
            "element needs two distinct modes, got `{a}` twice"
        )));
    }
    Ok(())
}

fn check_declared(s: &PhotonicState, a: &str, b: &str) -> Result<()> {
    s.check_declared(a)?;
    s.check_declared(b)
}

/// Polarization-independent beam splitter with real amplitudes.
///
/// Light entering `a` leaves as `γ a + δ b`; the partner port `b` maps to
/// `−δ a + γ b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSplitter {
    a: Label,
    b: Label,
    gamma: f64,
    delta: f64,
}

impl BeamSplitter {
    pub fn new(a: impl Into<Label>, b: impl Into<Label>, gamma: f64, delta: f64) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        check_pair(&a, &b)?;
        if !gamma.is_finite() || !delta.is_finite() {
            return Err(Error::Parameter(
                "beam splitter amplitudes must be finite".into(),
            ));
        }
        let norm = gamma * gamma + delta * delta;
        if (norm - 1.0).abs() > BS_NORM_TOL {
            return Err(Error::Parameter(format!(
                "beam splitter amplitudes not normalized: {gamma}² + {delta}² = {norm}"
            )));
        }
        Ok(BeamSplitter { a, b, gamma, delta })
    }

    pub fn modes(&self) -> (&Label, &Label) {
        (&self.a, &self.b)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn mode_map(&self) -> ModeMap {
        let mut map = ModeMap::new();
        for pol in Polarization::BOTH {
            let (a, b) = (
                Mode::new(self.a.clone(), pol),
                Mode::new(self.b.clone(), pol),
            );
            map.insert(
                a.clone(),
                vec![(a.clone(), re(self.gamma)), (b.clone(), re(self.delta))],
            );
            map.insert(b.clone(), vec![(a, re(-self.delta)), (b, re(self.gamma))]);
        }
        map
    }

    pub fn apply(&self, s: &PhotonicState) -> Result<PhotonicState> {
        check_declared(s, &self.a, &self.b)?;
        s.apply_mode_map(&self.mode_map())
    }
}

/// Ideal polarizing beam splitter: H crosses between the two paths, V stays.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealPbs {
    a: Label,
    b: Label,
}

impl IdealPbs {
    pub fn new(a: impl Into<Label>, b: impl Into<Label>) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        check_pair(&a, &b)?;
        Ok(IdealPbs { a, b })
    }

    pub fn modes(&self) -> (&Label, &Label) {
        (&self.a, &self.b)
    }

    pub fn mode_map(&self) -> ModeMap {
        ModeMap::new()
            .with(
                Mode::h(self.a.clone()),
                vec![(Mode::h(self.b.clone()), re(1.0))],
            )
            .with(
                Mode::h(self.b.clone()),
                vec![(Mode::h(self.a.clone()), re(1.0))],
            )
    }

    pub fn apply(&self, s: &PhotonicState) -> Result<PhotonicState> {
        check_declared(s, &self.a, &self.b)?;
        s.apply_mode_map(&self.mode_map())
    }
}

/// PBS with finite extinction ratio `r` and mount deviation `theta`.
///
/// With `c = cosθ − √r sinθ`, `s = sinθ + √r cosθ` and `N = √(1+r)`:
///
/// ```text
/// χ_H → (c η_H − s η_V)/N     η_H → (c χ_H − s χ_V)/N
/// χ_V → (s χ_H + c χ_V)/N     η_V → (s η_H + c η_V)/N
/// ```
///
/// where `(χ, η)` is the element's mode pair. Only real `r` is supported.
#[derive(Debug, Clone, PartialEq)]
pub struct ImperfectPbs {
    a: Label,
    b: Label,
    r: f64,
    theta: f64,
}

impl ImperfectPbs {
    pub fn new(a: impl Into<Label>, b: impl Into<Label>, r: f64, theta: f64) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        check_pair(&a, &b)?;
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::Parameter(format!(
                "extinction ratio r = {r} outside [0, 1]"
            )));
        }
        if !theta.is_finite() {
            return Err(Error::Parameter("mount deviation must be finite".into()));
        }
        Ok(ImperfectPbs { a, b, r, theta })
    }

    pub fn modes(&self) -> (&Label, &Label) {
        (&self.a, &self.b)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The pair `(cosθ − √r sinθ, sinθ + √r cosθ)`.
    pub fn coefficients(&self) -> (f64, f64) {
        let sr = self.r.sqrt();
        let (sin, cos) = self.theta.sin_cos();
        (cos - sr * sin, sin + sr * cos)
    }

    pub fn mode_map(&self) -> ModeMap {
        let (c, s) = self.coefficients();
        let n = (1.0 + self.r.abs()).sqrt();
        let (c, s) = (re(c / n), re(s / n));
        let (chi, eta) = (&self.a, &self.b);
        ModeMap::new()
            .with(
                Mode::h(chi.clone()),
                vec![(Mode::h(eta.clone()), c), (Mode::v(eta.clone()), -s)],
            )
            .with(
                Mode::h(eta.clone()),
                vec![(Mode::h(chi.clone()), c), (Mode::v(chi.clone()), -s)],
            )
            .with(
                Mode::v(chi.clone()),
                vec![(Mode::h(chi.clone()), s), (Mode::v(chi.clone()), c)],
            )
            .with(
                Mode::v(eta.clone()),
                vec![(Mode::h(eta.clone()), s), (Mode::v(eta.clone()), c)],
            )
    }

    pub fn apply(&self, s: &PhotonicState) -> Result<PhotonicState> {
        check_declared(s, &self.a, &self.b)?;
        s.apply_mode_map(&self.mode_map())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKind {
    BeamSplitter,
    IdealPbs,
    ImperfectPbs,
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElementKind::BeamSplitter => "bs",
            ElementKind::IdealPbs => "pbs",
            ElementKind::ImperfectPbs => "ipbs",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OpticalElement {
    BeamSplitter(BeamSplitter),
    IdealPbs(IdealPbs),
    ImperfectPbs(ImperfectPbs),
}

impl OpticalElement {
    pub fn kind(&self) -> ElementKind {
        match self {
            OpticalElement::BeamSplitter(_) => ElementKind::BeamSplitter,
            OpticalElement::IdealPbs(_) => ElementKind::IdealPbs,
            OpticalElement::ImperfectPbs(_) => ElementKind::ImperfectPbs,
        }
    }

    pub fn modes(&self) -> (&Label, &Label) {
        match self {
            OpticalElement::BeamSplitter(e) => e.modes(),
            OpticalElement::IdealPbs(e) => e.modes(),
            OpticalElement::ImperfectPbs(e) => e.modes(),
        }
    }

    pub fn mode_map(&self) -> ModeMap {
        match self {
            OpticalElement::BeamSplitter(e) => e.mode_map(),
            OpticalElement::IdealPbs(e) => e.mode_map(),
            OpticalElement::ImperfectPbs(e) => e.mode_map(),
        }
    }

    pub fn apply(&self, s: &PhotonicState) -> Result<PhotonicState> {
        match self {
            OpticalElement::BeamSplitter(e) => e.apply(s),
            OpticalElement::IdealPbs(e) => e.apply(s),
            OpticalElement::ImperfectPbs(e) => e.apply(s),
        }
    }
}

impl From<BeamSplitter> for OpticalElement {
    fn from(e: BeamSplitter) -> Self {
        OpticalElement::BeamSplitter(e)
    }
}

impl From<IdealPbs> for OpticalElement {
    fn from(e: IdealPbs) -> Self {
        OpticalElement::IdealPbs(e)
    }
}

impl From<ImperfectPbs> for OpticalElement {
    fn from(e: ImperfectPbs) -> Self {
        OpticalElement::ImperfectPbs(e)
    }
}

fn check_normalized(alpha: Complex64, beta: Complex64) -> Result<()> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if !norm.is_finite() || (norm - 1.0).abs() > SOURCE_NORM_TOL {
        return Err(Error::Parameter(format!(
            "source amplitudes not normalized: |α|² + |β|² = {norm}"
        )));
    }
    Ok(())
}

/// Ideal polarization-entangled pair `(α a_H b_H + β a_V b_V)|vac⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdcSource {
    a: Label,
    b: Label,
    alpha: Complex64,
    beta: Complex64,
}

impl SpdcSource {
    pub fn new(
        a: impl Into<Label>,
        b: impl Into<Label>,
        alpha: Complex64,
        beta: Complex64,
    ) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        check_pair(&a, &b)?;
        check_normalized(alpha, beta)?;
        Ok(SpdcSource { a, b, alpha, beta })
    }

    pub fn modes(&self) -> (&Label, &Label) {
        (&self.a, &self.b)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn prepare(&self) -> Result<PhotonicState> {
        PhotonicState::new(2, [self.a.clone(), self.b.clone()])?
            .with_term(
                self.alpha,
                [Mode::h(self.a.clone()), Mode::h(self.b.clone())],
            )?
            .with_term(
                self.beta,
                [Mode::v(self.a.clone()), Mode::v(self.b.clone())],
            )
    }
}

/// Single photon `(h a_H + v a_V)|vac⟩` injected into one path.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonSource {
    spatial: Label,
    h: Complex64,
    v: Complex64,
}

impl PhotonSource {
    pub fn new(spatial: impl Into<Label>, h: Complex64, v: Complex64) -> Result<Self> {
        let spatial = spatial.into();
        if !text::is_valid_label(&spatial) {
            return Err(Error::Parameter(format!("invalid mode label `{spatial}`")));
        }
        check_normalized(h, v)?;
        Ok(PhotonSource { spatial, h, v })
    }

    pub fn spatial(&self) -> &Label {
        &self.spatial
    }

    pub fn h(&self) -> Complex64 {
        self.h
    }

    pub fn v(&self) -> Complex64 {
        self.v
    }

    pub fn prepare(&self) -> Result<PhotonicState> {
        PhotonicState::new(1, [self.spatial.clone()])?
            .with_term(self.h, [Mode::h(self.spatial.clone())])?
            .with_term(self.v, [Mode::v(self.spatial.clone())])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Spdc(SpdcSource),
    Photon(PhotonSource),
}

impl Source {
    pub fn photons(&self) -> u8 {
        match self {
            Source::Spdc(_) => 2,
            Source::Photon(_) => 1,
        }
    }

    pub fn labels(&self) -> Vec<&Label> {
        match self {
            Source::Spdc(s) => vec![s.modes().0, s.modes().1],
            Source::Photon(p) => vec![p.spatial()],
        }
    }

    pub fn prepare(&self) -> Result<PhotonicState> {
        match self {
            Source::Spdc(s) => s.prepare(),
            Source::Photon(p) => p.prepare(),
        }
    }
}

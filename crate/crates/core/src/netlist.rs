//! Line-oriented circuit description, its executor and structural metrics.
//!
//! ```text
//! # comments run to end of line
//! modes a b c d
//! spdc a d 0.6 0 0.8 0        # alphaRe alphaIm betaRe betaIm
//! photon a 0.6 0 0.8 0        # single photon: hRe hIm vRe vIm
//! bs a b 0.6 0.8              # gamma delta
//! pbs a c
//! ipbs b d 0.001 0.005        # r theta
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::elements::{
    BeamSplitter, ElementKind, IdealPbs, ImperfectPbs, OpticalElement, PhotonSource, Source,
    SpdcSource,
};
use crate::error::{Error, Result};
use crate::state::{Label, ModeMap, PhotonicState};
use crate::text::{self, Token};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Netlist {
    modes: Vec<Label>,
    source: Option<Source>,
    elements: Vec<OpticalElement>,
}

/// Element counts and optical depth of a netlist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthReport {
    pub element_count: usize,
    /// Largest number of elements touching any single spatial path.
    pub optical_depth: usize,
    pub per_kind: BTreeMap<ElementKind, usize>,
}

impl DepthReport {
    pub fn count_of(&self, kind: ElementKind) -> usize {
        self.per_kind.get(&kind).copied().unwrap_or(0)
    }
}

impl Netlist {
    pub fn new<I, S>(modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<Label>,
    {
        let mut declared: Vec<Label> = Vec::new();
        for m in modes {
            let m: Label = m.into();
            if !text::is_valid_label(&m) {
                return Err(Error::Parameter(format!("invalid mode label `{m}`")));
            }
            if declared.contains(&m) {
                return Err(Error::Parameter(format!("mode `{m}` declared twice")));
            }
            declared.push(m);
        }
        Ok(Netlist {
            modes: declared,
            ..Default::default()
        })
    }

    pub fn modes(&self) -> &[Label] {
        &self.modes
    }

    pub fn source(&self) -> Option<&Source> {
        self.source.as_ref()
    }

    pub fn elements(&self) -> &[OpticalElement] {
        &self.elements
    }

    pub fn is_declared(&self, label: &str) -> bool {
        self.modes.iter().any(|m| &**m == label)
    }

    fn check_declared(&self, label: &str) -> Result<()> {
        if self.is_declared(label) {
            Ok(())
        } else {
            Err(Error::UndeclaredMode(label.to_string()))
        }
    }

    pub fn push(&mut self, element: impl Into<OpticalElement>) -> Result<()> {
        let element = element.into();
        let (a, b) = element.modes();
        self.check_declared(a)?;
        self.check_declared(b)?;
        self.elements.push(element);
        Ok(())
    }

    pub fn with_element(mut self, element: impl Into<OpticalElement>) -> Result<Self> {
        self.push(element)?;
        Ok(self)
    }

    pub fn set_source(&mut self, source: Source) -> Result<()> {
        if self.source.is_some() {
            return Err(Error::Contract("netlist already has a source".into()));
        }
        for label in source.labels() {
            self.check_declared(label)?;
        }
        self.source = Some(source);
        Ok(())
    }

    pub fn with_source(mut self, source: Source) -> Result<Self> {
        self.set_source(source)?;
        Ok(self)
    }

    /// Runs the elements in order on `input`, as one composed substitution. The source, if any, is not
    /// used; see [`Netlist::prepare`].
    pub fn execute(&self, input: &PhotonicState) -> Result<PhotonicState> {
        if let Some(src) = &self.source {
            if src.photons() != input.photons() {
                return Err(Error::PhotonMismatch {
                    expected: src.photons(),
                    found: input.photons(),
                });
            }
        }
        let missing: Vec<&str> = self
            .modes
            .iter()
            .filter(|m| !input.is_declared(m))
            .map(|m| &**m)
            .collect();
        if !missing.is_empty() {
            return Err(Error::Contract(format!(
                "input state does not declare netlist modes: {}",
                missing.join(" ")
            )));
        }
        if self.elements.is_empty() {
            return Ok(input.clone());
        }
        input.apply_mode_map(&self.mode_map())
    }

    /// The composition of every element's substitution, first element first.
    pub fn mode_map(&self) -> ModeMap {
        self.elements
            .iter()
            .fold(ModeMap::new(), |acc, element| acc.then(&element.mode_map()))
    }

    /// Emits the source state over all declared modes and runs the elements.
    pub fn prepare(&self) -> Result<PhotonicState> {
        let source = self
            .source
            .as_ref()
            .ok_or_else(|| Error::Contract("netlist has no source".into()))?;
        let initial = source
            .prepare()?
            .with_declared_modes(self.modes.iter().cloned())?;
        self.execute(&initial)
    }

    pub fn depth(&self) -> DepthReport {
        let mut per_path: BTreeMap<&str, usize> = BTreeMap::new();
        let mut per_kind = BTreeMap::new();
        for element in &self.elements {
            let (a, b) = element.modes();
            *per_path.entry(a).or_default() += 1;
            *per_path.entry(b).or_default() += 1;
            *per_kind.entry(element.kind()).or_default() += 1;
        }
        DepthReport {
            element_count: self.elements.len(),
            optical_depth: per_path.values().copied().max().unwrap_or(0),
            per_kind,
        }
    }
}

impl fmt::Display for Netlist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("modes")?;
        for m in &self.modes {
            write!(f, " {m}")?;
        }
        writeln!(f)?;
        match &self.source {
            Some(Source::Spdc(s)) => {
                let (a, b) = s.modes();
                let (al, be) = (s.alpha(), s.beta());
                writeln!(
                    f,
                    "spdc {a} {b} {:?} {:?} {:?} {:?}",
                    al.re, al.im, be.re, be.im
                )?;
            }
            Some(Source::Photon(p)) => {
                let (h, v) = (p.h(), p.v());
                writeln!(
                    f,
                    "photon {} {:?} {:?} {:?} {:?}",
                    p.spatial(),
                    h.re,
                    h.im,
                    v.re,
                    v.im
                )?;
            }
            None => {}
        }
        for element in &self.elements {
            let (a, b) = element.modes();
            match element {
                OpticalElement::BeamSplitter(bs) => {
                    writeln!(f, "bs {a} {b} {:?} {:?}", bs.gamma(), bs.delta())?
                }
                OpticalElement::IdealPbs(_) => writeln!(f, "pbs {a} {b}")?,
                OpticalElement::ImperfectPbs(p) => {
                    writeln!(f, "ipbs {a} {b} {:?} {:?}", p.r(), p.theta())?
                }
            }
        }
        Ok(())
    }
}

fn expect_args<'a>(
    line: &str,
    lineno: usize,
    head: Token<'_>,
    args: &'a [Token<'a>],
    n: usize,
) -> Result<&'a [Token<'a>]> {
    if args.len() < n {
        return Err(Error::parse(
            lineno,
            text::end_column(line),
            format!("`{}` expects {n} arguments, got {}", head.text, args.len()),
        ));
    }
    if args.len() > n {
        return Err(Error::parse(
            lineno,
            args[n].column,
            format!("`{}` expects {n} arguments, got {}", head.text, args.len()),
        ));
    }
    Ok(args)
}

fn declared_label<'a>(netlist: &Netlist, lineno: usize, tok: Token<'a>) -> Result<&'a str> {
    let label = text::parse_label(lineno, tok)?;
    if !netlist.is_declared(label) {
        return Err(Error::parse(
            lineno,
            tok.column,
            format!("undeclared mode `{label}`"),
        ));
    }
    Ok(label)
}

/// Re-tags an element/source construction error with a source position.
fn at(lineno: usize, column: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parameter(msg) | Error::Contract(msg) => Error::parse(lineno, column, msg),
        other => other,
    }
}

impl FromStr for Netlist {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let mut netlist: Option<Netlist> = None;
        for (idx, line) in input.lines().enumerate() {
            let lineno = idx + 1;
            let tokens = text::tokenize(line);
            let Some((head, args)) = tokens.split_first() else {
                continue;
            };
            if head.text == "modes" {
                if netlist.is_some() {
                    return Err(Error::parse(
                        lineno,
                        head.column,
                        "duplicate or late `modes` directive",
                    ));
                }
                let mut labels: Vec<&str> = Vec::new();
                for tok in args {
                    let label = text::parse_label(lineno, *tok)?;
                    if labels.contains(&label) {
                        return Err(Error::parse(
                            lineno,
                            tok.column,
                            format!("mode `{label}` declared twice"),
                        ));
                    }
                    labels.push(label);
                }
                netlist = Some(Netlist::new(labels)?);
                continue;
            }
            let n = netlist.get_or_insert_with(Netlist::default);
            match head.text {
                "bs" => {
                    let args = expect_args(line, lineno, *head, args, 4)?;
                    let a = declared_label(n, lineno, args[0])?;
                    let b = declared_label(n, lineno, args[1])?;
                    let gamma = text::parse_f64(lineno, args[2])?;
                    let delta = text::parse_f64(lineno, args[3])?;
                    let bs = BeamSplitter::new(a, b, gamma, delta)
                        .map_err(at(lineno, args[2].column))?;
                    n.push(bs)?;
                }
                "pbs" => {
                    let args = expect_args(line, lineno, *head, args, 2)?;
                    let a = declared_label(n, lineno, args[0])?;
                    let b = declared_label(n, lineno, args[1])?;
                    n.push(IdealPbs::new(a, b).map_err(at(lineno, args[1].column))?)?;
                }
                "ipbs" => {
                    let args = expect_args(line, lineno, *head, args, 4)?;
                    let a = declared_label(n, lineno, args[0])?;
                    let b = declared_label(n, lineno, args[1])?;
                    let r = text::parse_f64(lineno, args[2])?;
                    let theta = text::parse_f64(lineno, args[3])?;
                    let p =
                        ImperfectPbs::new(a, b, r, theta).map_err(at(lineno, args[2].column))?;
                    n.push(p)?;
                }
                "spdc" => {
                    let args = expect_args(line, lineno, *head, args, 6)?;
                    let a = declared_label(n, lineno, args[0])?;
                    let b = declared_label(n, lineno, args[1])?;
                    let mut v = [0.0; 4];
                    for (slot, tok) in v.iter_mut().zip(&args[2..]) {
                        *slot = text::parse_f64(lineno, *tok)?;
                    }
                    let src = SpdcSource::new(
                        a,
                        b,
                        Complex64::new(v[0], v[1]),
                        Complex64::new(v[2], v[3]),
                    )
                    .map_err(at(lineno, args[2].column))?;
                    n.set_source(Source::Spdc(src))
                        .map_err(at(lineno, head.column))?;
                }
                "photon" => {
                    let args = expect_args(line, lineno, *head, args, 5)?;
                    let a = declared_label(n, lineno, args[0])?;
                    let mut v = [0.0; 4];
                    for (slot, tok) in v.iter_mut().zip(&args[1..]) {
                        *slot = text::parse_f64(lineno, *tok)?;
                    }
                    let src = PhotonSource::new(
                        a,
                        Complex64::new(v[0], v[1]),
                        Complex64::new(v[2], v[3]),
                    )
                    .map_err(at(lineno, args[1].column))?;
                    n.set_source(Source::Photon(src))
                        .map_err(at(lineno, head.column))?;
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
        Ok(netlist.unwrap_or_default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Mode;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn single_pbs() {
        let n: Netlist = "modes a b\npbs a b\n".parse().unwrap();
        assert_eq!(n.modes().len(), 2);
        assert_eq!(n.elements().len(), 1);
        assert_eq!(n.elements()[0].kind(), ElementKind::IdealPbs);
    }

    #[test]
    fn two_pbs_controlled_swap() {
        let n: Netlist = "modes a b c d\npbs a c\npbs b d\n".parse().unwrap();
        assert_eq!(n.elements().len(), 2);
        assert!(n
            .elements()
            .iter()
            .all(|e| e.kind() == ElementKind::IdealPbs));
        let report = n.depth();
        assert_eq!((report.element_count, report.optical_depth), (2, 1));
    }

    #[test]
    fn unnormalized_beam_splitter_is_a_parse_error() {
        let err = "modes a b\nbs a b 0.6 0.9".parse::<Netlist>().unwrap_err();
        assert!(
            matches!(
                err,
                Error::Parse {
                    line: 2,
                    column: 8,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn parse_errors() {
        let cases = [
            ("modes a b\nmirror a b\n", 2, 1),
            ("modes a b\npbs a z\n", 2, 7),
            ("modes a b\nbs a b 0.6 x\n", 2, 12),
            ("modes a b\npbs a\n", 2, 6),
            ("modes a b\npbs a b c\n", 2, 9),
            ("modes a 1b\n", 1, 9),
            ("modes a a\n", 1, 9),
            ("modes a b\nipbs a b 2 0\n", 2, 10),
            ("modes a b\nspdc a b 1 0 0 0\nspdc a b 1 0 0 0\n", 3, 1),
            ("modes a b\nspdc a b 1 0 1 0\n", 2, 10),
        ];
        for (src, line, column) in cases {
            match src.parse::<Netlist>() {
                Err(Error::Parse {
                    line: l, column: c, ..
                }) => {
                    assert_eq!((l, c), (line, column), "{src:?}");
                }
                other => panic!("{src:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let n: Netlist = "# header\n\nmodes a b # paths\n  pbs a b # gate\n"
            .parse()
            .unwrap();
        assert_eq!(n.elements().len(), 1);
    }

    #[test]
    fn serialization_round_trip() {
        let text = "modes a b c d\nspdc a d 0.6 0.0 0.0 0.8\nbs a b 0.28 0.96\nbs d c 0.6 0.8\npbs a c\nipbs b d 0.001 0.005\n";
        let n: Netlist = text.parse().unwrap();
        assert_eq!(n.to_string(), text);
        assert_eq!(n.to_string().parse::<Netlist>().unwrap(), n);
    }

    #[test]
    fn cnot_circuit_execution() {
        let (alpha, beta, gamma, delta) = (0.6, 0.8, 0.28, 0.96);
        let n: Netlist = format!("modes a b\nbs a b {gamma} {delta}\npbs a b\n")
            .parse()
            .unwrap();
        let input = PhotonicState::new(1, ["a", "b"])
            .unwrap()
            .with_term(c(alpha), [Mode::h("a")])
            .unwrap()
            .with_term(c(beta), [Mode::v("a")])
            .unwrap();
        let out = n.execute(&input).unwrap();
        let expect = [
            (Mode::h("b"), alpha * gamma),
            (Mode::h("a"), alpha * delta),
            (Mode::v("a"), beta * gamma),
            (Mode::v("b"), beta * delta),
        ];
        for (m, a) in expect {
            assert!((out.amplitude_of([m]) - c(a)).norm() < 1e-15);
        }
        assert!((out.norm_sqr() - input.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn empty_netlist_is_identity() {
        let n: Netlist = "modes a b\n".parse().unwrap();
        let s = PhotonicState::new(1, ["a", "b"])
            .unwrap()
            .with_term(c(1.0), [Mode::v("b")])
            .unwrap();
        assert_eq!(n.execute(&s).unwrap(), s);
    }

    #[test]
    fn execute_requires_declared_modes() {
        let n: Netlist = "modes a b c\npbs a c\n".parse().unwrap();
        let s = PhotonicState::new(1, ["a", "b"])
            .unwrap()
            .with_term(c(1.0), [Mode::h("a")])
            .unwrap();
        assert!(matches!(n.execute(&s), Err(Error::Contract(_))));
    }

    #[test]
    fn prepare_from_source() {
        let n: Netlist = "modes a b\nphoton a 0.6 0 0.8 0\nbs a b 0 1\n"
            .parse()
            .unwrap();
        let s = n.prepare().unwrap();
        assert!((s.amplitude_of([Mode::h("b")]) - c(0.6)).norm() < 1e-15);
        assert!((s.amplitude_of([Mode::v("b")]) - c(0.8)).norm() < 1e-15);

        let wrong = PhotonicState::new(2, ["a", "b"]).unwrap();
        assert!(matches!(
            n.execute(&wrong),
            Err(Error::PhotonMismatch { .. })
        ));
        let no_source: Netlist = "modes a b\n".parse().unwrap();
        assert!(no_source.prepare().is_err());
    }

    #[test]
    fn depth_counts_per_path() {
        let n: Netlist = "modes a b c\nbs a b 1 0\npbs b c\nipbs a c 0 0\npbs a b\n"
            .parse()
            .unwrap();
        let report = n.depth();
        assert_eq!(report.element_count, 4);
        assert_eq!(report.optical_depth, 3);
        assert_eq!(report.count_of(ElementKind::IdealPbs), 2);
        assert_eq!(report.count_of(ElementKind::BeamSplitter), 1);
        assert_eq!(report.count_of(ElementKind::ImperfectPbs), 1);
        assert_eq!(Netlist::default().depth().optical_depth, 0);
    }
}

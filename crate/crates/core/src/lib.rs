//! Creation-operator simulation of few-photon linear-optics circuits built
//! from beam splitters and polarizing beam splitters, with logical gate
//! extraction for hybrid-encoded CNOT and qudit-controlled-SWAP gates and
//! fidelity analysis under imperfect PBSs.

pub mod cli;
pub mod elements;
pub mod error;
pub mod fidelity;
pub mod gates;
pub mod netlist;
pub mod state;
mod text;

pub use elements::{
    BeamSplitter, ElementKind, IdealPbs, ImperfectPbs, OpticalElement, PhotonSource, Source,
    SpdcSource,
};
pub use error::{Error, Result};
pub use gates::{GateKind, GateMatrix, LogicalEncoding, LogicalLabel};
pub use netlist::Netlist;
pub use state::{Mode, Monomial, PhotonicState, Polarization};

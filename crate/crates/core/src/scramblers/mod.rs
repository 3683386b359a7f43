//! Scrambling dynamics (Haar, brickwork circuit, disordered XX chain) and the
//! one-axis-twisting probe family.

mod brickwork;
mod haar;
pub mod krylov;
mod oat;
mod xx;

pub use brickwork::{brickwork_apply, Brickwork, BRICKWORK_ROTATION};
pub use haar::{sample_haar, sample_haar_with, MAX_HAAR_QUBITS};
pub use krylov::{expm_krylov, KrylovOptions, KrylovStats};
pub use oat::oat_state;
pub use xx::{
    evolve, evolve_exact, evolve_krylov, xx_fields, xx_hamiltonian_apply, xx_hamiltonian_dense, DisorderFields,
    EvolveOptions, XxEvolution,
};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::Unitary;

/// A fixed unitary acting in place on raw amplitude vectors (normalized or not).
pub trait Scramble {
    fn scramble(&self, amps: &mut [C64]) -> Result<()>;
}

/// No scrambling.
#[derive(Clone, Copy, Debug, Default)]
pub struct Identity;

impl Scramble for Identity {
    fn scramble(&self, _amps: &mut [C64]) -> Result<()> {
        Ok(())
    }
}

impl Scramble for Unitary {
    fn scramble(&self, amps: &mut [C64]) -> Result<()> {
        if amps.len() != self.dim() {
            return Err(Error::domain(format!(
                "unitary of dimension {} applied to {} amplitudes",
                self.dim(),
                amps.len()
            )));
        }
        let out = self.apply_raw(amps);
        amps.copy_from_slice(&out);
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScramblerKind {
    Haar,
    Brickwork,
    XxChain,
    None,
}

/// Serializable description of a scrambler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScramblerSpec {
    pub kind: ScramblerKind,
    #[serde(default)]
    pub depth_l: usize,
    #[serde(default)]
    pub time_t: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub n_qubits: usize,
}

impl ScramblerSpec {
    pub fn none(n_qubits: usize) -> Self {
        Self { kind: ScramblerKind::None, depth_l: 0, time_t: 0.0, seed: 0, n_qubits }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.time_t >= 0.0 && self.time_t.is_finite()) {
            return Err(Error::config("scrambler.time_t", format!("must be finite and ≥ 0, got {}", self.time_t)));
        }
        if self.kind == ScramblerKind::Haar && self.n_qubits > MAX_HAAR_QUBITS {
            return Err(Error::config(
                "scrambler.n_qubits",
                format!(
                    "dense Haar sampling is capped at {MAX_HAAR_QUBITS} qubits (got {}); use the brickwork scrambler as a Haar proxy",
                    self.n_qubits
                ),
            ));
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Scrambler> {
        self.build_with(&EvolveOptions::default())
    }

    pub fn build_with(&self, opts: &EvolveOptions) -> Result<Scrambler> {
        self.validate()?;
        Ok(match self.kind {
            ScramblerKind::None => Scrambler::None,
            ScramblerKind::Haar => Scrambler::Haar(sample_haar(1 << self.n_qubits, self.seed)?),
            ScramblerKind::Brickwork => Scrambler::Brickwork(Brickwork { layers: self.depth_l }),
            ScramblerKind::XxChain => {
                let fields = xx_fields(self.n_qubits, self.seed)?;
                Scrambler::XxChain(Box::new(XxEvolution::new(fields, self.time_t, *opts)?))
            }
        })
    }
}

/// A built scrambler, ready to apply.
#[derive(Clone, Debug)]
pub enum Scrambler {
    None,
    Haar(Unitary),
    Brickwork(Brickwork),
    XxChain(Box<XxEvolution>),
}

impl Scramble for Scrambler {
    fn scramble(&self, amps: &mut [C64]) -> Result<()> {
        match self {
            Scrambler::None => Ok(()),
            Scrambler::Haar(u) => u.scramble(amps),
            Scrambler::Brickwork(b) => b.scramble(amps),
            Scrambler::XxChain(x) => x.scramble(amps),
        }
    }
}

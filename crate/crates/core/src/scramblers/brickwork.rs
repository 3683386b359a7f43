use num_complex::Complex64 as C64;

use super::Scramble;
use crate::error::Result;
use crate::statevec::{apply_cx_raw, apply_one_qubit_raw, Gate1, PureState};

/// Rotation angle of the per-layer `R_y` gates.
pub const BRICKWORK_ROTATION: f64 = std::f64::consts::FRAC_PI_4;

/// `L` layers of: CX on odd bonds, CX on even bonds, then `R_y(π/4)` on every qubit.
///
/// Bonds are counted from 1 along an open chain: odd bonds are sites
/// (1,2), (3,4), …, even bonds (2,3), (4,5), …; the first site of a bond
/// is the control.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Brickwork {
    pub layers: usize,
}

impl Scramble for Brickwork {
    fn scramble(&self, amps: &mut [C64]) -> Result<()> {
        let n = amps.len().trailing_zeros() as usize;
        let ry = Gate1::ry(BRICKWORK_ROTATION);
        for _ in 0..self.layers {
            // 0-based control index of odd bonds is even, of even bonds odd.
            for first in [0usize, 1] {
                for control in (first..n.saturating_sub(1)).step_by(2) {
                    apply_cx_raw(amps, control, control + 1);
                }
            }
            for q in 0..n {
                apply_one_qubit_raw(amps, &ry, q);
            }
        }
        Ok(())
    }
}

pub fn brickwork_apply(state: &PureState, layers: usize) -> PureState {
    let mut amps = state.amplitudes().to_vec();
    Brickwork { layers }.scramble(&mut amps).expect("brickwork is infallible");
    PureState::from_raw(state.n_qubits(), amps)
}

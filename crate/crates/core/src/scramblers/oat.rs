use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qfi::Generator;
use crate::statevec::PureState;

/// One-axis-twisted state `e^{-iτ·2Ĵ_z²}|+⟩^{⊗N}`, `Ĵ_z = ½Σσᶻ`.
///
/// Twisting time is normalized so that `τ = π/4` lands on the x-oriented GHZ
/// state for even `N`; `τ ∈ [0, π/4]` covers squeezed, over-squeezed and cat
/// states.
pub fn oat_state(n: usize, tau: f64) -> Result<PureState> {
    if n < 2 {
        return Err(Error::domain(format!("one-axis twisting needs at least 2 qubits, got {n}")));
    }
    let plus = PureState::plus_state(n)?;
    let amps = plus
        .into_amplitudes()
        .into_iter()
        .enumerate()
        .map(|(b, a)| {
            let m = Generator::z_eigenvalue(n, b);
            a * C64::from_polar(1.0, -2.0 * tau * m * m)
        })
        .collect();
    Ok(PureState::from_raw(n, amps))
}

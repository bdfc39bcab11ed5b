use super::{chsh, BellResult, BellTest, DisplacementSettings};
use crate::error::Result;
use crate::gaussian::GaussianSumState;

pub fn bell_dp(state: &GaussianSumState, j: f64) -> Result<BellResult> {
    bell_dp_with(state, &DisplacementSettings::parity(j)?)
}

/// Displaced-parity CHSH. The settings for mode `a` are `alpha[0]` and
/// `alpha[1]`, the ones for `b` are `beta[0]` and `beta[1]`.
pub fn bell_dp_with(state: &GaussianSumState, s: &DisplacementSettings) -> Result<BellResult> {
    let value = chsh(|i, j| Ok::<f64, crate::Error>(state.displaced_parity(s.alpha[i], s.beta[j])))?;
    Ok(BellResult { test: BellTest::Dp, value })
}

//! Hybrid receive chain: analog combining, zero-forcing digital stage, SINR.

use nalgebra::{DMatrix, DVector};

use crate::channel::{ChannelRealization, C64};
use crate::codebook::Codebooks;
use crate::selection::BeamAssignment;

/// Singular values below `max_sv / MAX_CONDITION` are treated as zero.
const MAX_CONDITION: f64 = 1e12;

/// Analog (`N_BS × K`, one codebook beam per RF chain) and digital (`K × K`)
/// combining matrices.
#[derive(Clone, Debug)]
pub struct HybridCombiner {
    pub analog: DMatrix<C64>,
    pub digital: DMatrix<C64>,
}

impl HybridCombiner {
    /// Analog stage from the BS beams of `assignment`, digital stage ZF on the
    /// resulting effective channel.
    pub fn zero_forcing(channels: &[ChannelRealization], assignment: &BeamAssignment, cbs: &Codebooks) -> Self {
        let analog = analog_combiner(assignment, cbs);
        let h_eff = effective_channel(channels, assignment, cbs);
        HybridCombiner { analog, digital: zf_combiner(&h_eff) }
    }

    /// `W_D W_RFᴴ`, `K × N_BS`.
    pub fn total(&self) -> DMatrix<C64> {
        &self.digital * self.analog.adjoint()
    }
}

/// Per-UE SINR and rate.
#[derive(Clone, Debug, PartialEq)]
pub struct RateRecord {
    pub sinr: Vec<f64>,
    pub rates: Vec<f64>,
    pub sum_rate: f64,
}

impl RateRecord {
    pub fn from_sinr(sinr: Vec<f64>) -> Self {
        let rates: Vec<f64> = sinr.iter().map(|&g| (1.0 + g).log2()).collect();
        let sum_rate = rates.iter().sum();
        RateRecord { sinr, rates, sum_rate }
    }

    pub fn mean_rate(&self) -> f64 {
        self.sum_rate / self.rates.len() as f64
    }
}

/// `W_RF`: column `u` is BS beam `q_u`.
pub fn analog_combiner(assignment: &BeamAssignment, cbs: &Codebooks) -> DMatrix<C64> {
    let cols: Vec<DVector<C64>> = assignment.pairs().iter().map(|bp| cbs.bs.beams[bp.bs].to_column()).collect();
    DMatrix::from_columns(&cols)
}

/// `H̃`, `K × K`: column `u` is `W_RFᴴ H^u v_{p_u}`.
pub fn effective_channel(channels: &[ChannelRealization], assignment: &BeamAssignment, cbs: &Codebooks) -> DMatrix<C64> {
    assert_eq!(channels.len(), assignment.len(), "one channel per UE");
    let w_rf_h = analog_combiner(assignment, cbs).adjoint();
    let cols: Vec<DVector<C64>> = channels
        .iter()
        .zip(assignment.pairs())
        .map(|(ch, bp)| &w_rf_h * (&ch.matrix * cbs.ue.beams[bp.ue].to_column()))
        .collect();
    DMatrix::from_columns(&cols)
}

/// Least-squares pseudo-inverse `(H̃ᴴH̃)⁻¹H̃ᴴ` via SVD.
///
/// Rank-deficient inputs get the truncated pseudo-inverse; the interference
/// that ZF then fails to remove shows up in the SINR.
pub fn zf_combiner(h_eff: &DMatrix<C64>) -> DMatrix<C64> {
    let svd = h_eff.clone().svd(true, true);
    let max_sv = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if max_sv == 0.0 {
        return DMatrix::zeros(h_eff.ncols(), h_eff.nrows());
    }
    svd.pseudo_inverse(max_sv / MAX_CONDITION).expect("SVD was computed with both factors")
}

/// Per-UE SINR with ZF combining.
///
/// The filtered noise of UE `u` has power `σ_n² ‖w_D^u W_RFᴴ‖²`, since ZF rows
/// are not unit-norm.
pub fn evaluate_sinr(
    channels: &[ChannelRealization],
    assignment: &BeamAssignment,
    cbs: &Codebooks,
    noise_power: f64,
) -> RateRecord {
    let comb = HybridCombiner::zero_forcing(channels, assignment, cbs);
    let h_eff = effective_channel(channels, assignment, cbs);
    let combined = &comb.digital * &h_eff;
    let total = comb.total();
    let k = assignment.len();
    let sinr = (0..k)
        .map(|u| {
            let signal = combined[(u, u)].norm_sqr();
            let interference: f64 = (0..k).filter(|&w| w != u).map(|w| combined[(u, w)].norm_sqr()).sum();
            let noise = noise_power * total.row(u).norm_squared();
            let denom = interference + noise;
            if denom == 0.0 {
                if signal > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            } else {
                signal / denom
            }
        })
        .collect();
    RateRecord::from_sinr(sinr)
}

/// `x̂ = Σ_u W_D W_RFᴴ H^u v^u s^u + W_D W_RFᴴ n`.
pub fn reconstruct_signal(
    channels: &[ChannelRealization],
    assignment: &BeamAssignment,
    symbols: &[C64],
    noise: &DVector<C64>,
    cbs: &Codebooks,
) -> DVector<C64> {
    let comb = HybridCombiner::zero_forcing(channels, assignment, cbs);
    reconstruct_with(&comb, channels, assignment, symbols, noise, cbs)
}

/// [`reconstruct_signal`] with a precomputed combiner.
pub fn reconstruct_with(
    comb: &HybridCombiner,
    channels: &[ChannelRealization],
    assignment: &BeamAssignment,
    symbols: &[C64],
    noise: &DVector<C64>,
    cbs: &Codebooks,
) -> DVector<C64> {
    assert_eq!(symbols.len(), channels.len());
    let n_bs = cbs.bs.antennas;
    let mut rx = noise.clone();
    assert_eq!(rx.len(), n_bs);
    for ((ch, bp), &s) in channels.iter().zip(assignment.pairs()).zip(symbols) {
        rx += &ch.matrix * (cbs.ue.beams[bp.ue].to_column() * s);
    }
    comb.total() * rx
}

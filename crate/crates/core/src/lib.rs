//! Location-aided coordinated analog beam selection for uplink multi-user
//! millimeter-wave systems.
//!
//! The crate simulates `K` multi-antenna UEs that share a few reflectors and
//! transmit to one hybrid analog/digital base station. Each UE picks an analog
//! beam pair (BS beam `q`, UE beam `p`) from finite steering-vector codebooks
//! using only noisy position information, with one of four strategies:
//!
//! - [`StrategyKind::Uncoordinated`]: own-gain argmax, interference ignored.
//! - [`StrategyKind::Naive`]: interference-aware, own estimates taken as exact and global.
//! - [`StrategyKind::Statistical`]: interference-aware, prior statistics only.
//! - [`StrategyKind::Robust`]: interference-aware, posterior-averaged over position errors.
//!
//! Information is hierarchical: UE `u` (0-based, UE 0 is the most informed)
//! can read the beliefs of UEs `u+1..K` and replay their decisions exactly.
//!
//! Module map:
//!
//! - [`scenario`]: geometry, path angles, noisy beliefs, prior/posterior samplers
//! - [`channel`]: ULA steering vectors and geometric channel draws
//! - [`codebook`]: cosine-uniform analog codebooks
//! - [`beamgain`]: closed-form and Monte-Carlo average beam-gain matrices
//! - [`selection`]: the four beam-selection strategies
//! - [`linkeval`]: effective channel, ZF combining, SINR, signal reconstruction
//! - [`sim`]: experiment configuration, trial runner, CSV output
//!
//! Runnable walkthroughs live in the crate's `examples/` directory, e.g.
//! `cargo run --release --example beam_selection`.

pub mod beamgain;
pub mod channel;
pub mod codebook;
mod error;
pub mod linkeval;
pub mod scenario;
pub mod seed;
pub mod selection;
pub mod sim;

pub use beamgain::{gain_matrix_analytic, gain_matrix_empirical, l_function, BeamTable, GainMatrix};
pub use channel::{draw_channel, steering_vector, ChannelRealization, SteeringVector, C64};
pub use codebook::{build_codebook, ArraySide, Codebook, Codebooks};
pub use error::{Error, Result};
pub use linkeval::{evaluate_sinr, effective_channel, reconstruct_signal, zf_combiner, HybridCombiner, RateRecord};
pub use scenario::{
    angles_from_positions, build_beliefs, sample_posterior, sample_position_error, sample_prior,
    sample_scenario, BeliefSet, ErrorModel, PathAngles, Point2, PositionMatrix, Rect, ScenarioConfig,
};
pub use selection::{
    greedy_sum_rate_eval, predict_chain, select, select_all, select_coordinated, select_uncoordinated,
    single_user_rate, BeamAssignment, BeamPair, SelectionContext, SelectionSetup, StrategyKind,
};

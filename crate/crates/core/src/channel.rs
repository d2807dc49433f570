//! ULA steering vectors and narrowband geometric channel draws.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::scenario::{angles_from_positions, PathAngles, PositionMatrix};
use crate::Result;

pub type C64 = Complex<f64>;

/// Unit-norm ULA response with constant-magnitude entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SteeringVector(Vec<C64>);

impl SteeringVector {
    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `selfᴴ · other`.
    pub fn inner(&self, other: &SteeringVector) -> C64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn to_column(&self) -> nalgebra::DVector<C64> {
        nalgebra::DVector::from_column_slice(&self.0)
    }
}

/// Entry `k` is `exp(-iπ k cos(angle)) / √n` (half-wavelength spacing).
pub fn steering_vector(angle: f64, n: usize) -> SteeringVector {
    assert!(n >= 1, "array needs at least one antenna");
    let scale = 1.0 / (n as f64).sqrt();
    let c = angle.cos();
    SteeringVector((0..n).map(|k| C64::from_polar(scale, -PI * k as f64 * c)).collect())
}

/// One small-scale fading draw of the channel of a single UE.
#[derive(Clone, Debug)]
pub struct ChannelRealization {
    /// `N_BS × N_UE`.
    pub matrix: DMatrix<C64>,
    pub path_gains: Vec<C64>,
    pub angles: PathAngles,
}

impl ChannelRealization {
    pub fn n_bs(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_ue(&self) -> usize {
        self.matrix.ncols()
    }

    /// Rebuilds the matrix from the stored gains and angles.
    pub fn rebuild(&self) -> DMatrix<C64> {
        channel_matrix(&self.angles, &self.path_gains, self.n_bs(), self.n_ue())
    }
}

/// `√(N_BS N_UE) Σ_ℓ α_ℓ a_BS(ϑ_ℓ) a_UE(φ_ℓ)ᴴ`.
pub fn channel_matrix(angles: &PathAngles, gains: &[C64], n_bs: usize, n_ue: usize) -> DMatrix<C64> {
    assert_eq!(angles.len(), gains.len());
    let scale = ((n_bs * n_ue) as f64).sqrt();
    let mut h = DMatrix::<C64>::zeros(n_bs, n_ue);
    for (l, &alpha) in gains.iter().enumerate() {
        if alpha == C64::new(0.0, 0.0) {
            continue;
        }
        let a_bs = steering_vector(angles.aoas[l], n_bs);
        let a_ue = steering_vector(angles.aods[l], n_ue);
        for (j, b) in a_ue.as_slice().iter().enumerate() {
            let col = alpha * b.conj() * scale;
            for (i, a) in a_bs.as_slice().iter().enumerate() {
                h[(i, j)] += a * col;
            }
        }
    }
    h
}

/// Circularly-symmetric complex Gaussian with the given variance.
pub fn complex_gaussian<R: Rng + ?Sized>(variance: f64, rng: &mut R) -> C64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(s * re, s * im)
}

/// Draws path gains `α_ℓ ~ CN(0, σ_ℓ²)` and assembles the channel matrix.
pub fn draw_channel<R: Rng + ?Sized>(
    p: &PositionMatrix,
    profile: &[f64],
    n_bs: usize,
    n_ue: usize,
    rng: &mut R,
) -> Result<ChannelRealization> {
    let angles = angles_from_positions(p)?;
    assert_eq!(profile.len(), angles.len(), "power profile length must equal the path count");
    let path_gains: Vec<C64> = profile.iter().map(|&v| complex_gaussian(v, rng)).collect();
    let matrix = channel_matrix(&angles, &path_gains, n_bs, n_ue);
    Ok(ChannelRealization { matrix, path_gains, angles })
}

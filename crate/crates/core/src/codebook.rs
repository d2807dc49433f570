//! Finite analog beam codebooks built from steering vectors on a grid.

use crate::channel::{steering_vector, SteeringVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArraySide {
    Ue,
    Bs,
}

/// Grid angles and their steering vectors for one array side.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebook {
    pub side: ArraySide,
    pub antennas: usize,
    pub grid_angles: Vec<f64>,
    pub beams: Vec<SteeringVector>,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.beams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beams.is_empty()
    }

    pub fn grid_cosines(&self) -> Vec<f64> {
        self.grid_angles.iter().map(|a| a.cos()).collect()
    }

    /// Index of the beam whose grid cosine is nearest to `cos(angle)`.
    pub fn nearest(&self, angle: f64) -> usize {
        let c = angle.cos();
        self.grid_angles
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1.cos() - c).abs().total_cmp(&(b.1.cos() - c).abs()))
            .map(|(i, _)| i)
            .expect("codebook is never empty")
    }
}

/// Grid angles `arccos(1 - (2p - 1)/m)` for `p = 1..m`: midpoints of a uniform
/// partition of the cosine domain `[-1, 1]`, which equalizes the worst-case
/// gain loss between adjacent beams.
pub fn build_codebook(m: usize, n: usize, side: ArraySide) -> Codebook {
    assert!(m >= 1 && n >= 1, "codebook needs at least one beam and one antenna");
    let grid_angles: Vec<f64> =
        (1..=m).map(|p| (1.0 - (2 * p - 1) as f64 / m as f64).acos()).collect();
    let beams = grid_angles.iter().map(|&a| steering_vector(a, n)).collect();
    Codebook { side, antennas: n, grid_angles, beams }
}

/// The UE-side codebook shared by all UEs, plus the BS-side codebook.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebooks {
    pub ue: Codebook,
    pub bs: Codebook,
}

impl Codebooks {
    pub fn new(m_ue: usize, n_ue: usize, m_bs: usize, n_bs: usize) -> Self {
        Codebooks { ue: build_codebook(m_ue, n_ue, ArraySide::Ue), bs: build_codebook(m_bs, n_bs, ArraySide::Bs) }
    }

    pub fn for_scenario(cfg: &crate::ScenarioConfig) -> Self {
        Self::new(cfg.m_ue, cfg.n_ue, cfg.m_bs, cfg.n_bs)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn two_beam_grid() {
        let cb = build_codebook(2, 4, ArraySide::Bs);
        assert!((cb.grid_angles[0] - PI / 3.0).abs() < 1e-12);
        assert!((cb.grid_angles[1] - 2.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_cosine_spacing() {
        let cb = build_codebook(64, 64, ArraySide::Ue);
        let c = cb.grid_cosines();
        for w in c.windows(2) {
            assert!((w[0] - w[1] - 2.0 / 64.0).abs() < 1e-12);
        }
        for w in cb.grid_angles.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(cb.grid_angles.iter().all(|&a| a > 0.0 && a < PI));
    }

    #[test]
    fn beams_match_steering_vectors() {
        let cb = build_codebook(8, 5, ArraySide::Ue);
        assert_eq!(cb.len(), 8);
        for (a, b) in cb.grid_angles.iter().zip(&cb.beams) {
            assert_eq!(*b, steering_vector(*a, 5));
            for z in b.as_slice() {
                assert!((z.norm() - 1.0 / 5f64.sqrt()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn nearest_beam() {
        let cb = build_codebook(16, 16, ArraySide::Bs);
        for (i, &a) in cb.grid_angles.iter().enumerate() {
            assert_eq!(cb.nearest(a), i);
            // cos(2π - a) = cos(a): back-lobe ambiguity of a ULA
            assert_eq!(cb.nearest(2.0 * PI - a), i);
        }
    }
}

//! Average beam-gain matrices.
//!
//! `G[q][p]` is the received power for BS beam `q` and UE beam `p`, averaged
//! over the small-scale path gains. Because the path gains are independent and
//! zero-mean, the cross terms vanish and each path contributes
//! `σ_ℓ² |L_BS|² |L_UE|²`, where `L` is the array factor of a ULA evaluated at
//! the cosine mismatch between the path and the beam. The Monte-Carlo route
//! ([`gain_matrix_empirical`]) averages `|w_qᴴ H v_p|²` over channel draws and
//! serves as an independent check of the closed form.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use rand::Rng;

use crate::channel::{draw_channel, C64};
use crate::codebook::Codebook;
use crate::scenario::{angles_from_positions, PathAngles, PositionMatrix};
use crate::Result;

/// Dense `M_BS × M_UE` table of reals indexed by (BS beam, UE beam).
#[derive(Clone, Debug, PartialEq)]
pub struct BeamTable {
    m_bs: usize,
    m_ue: usize,
    values: Vec<f64>,
}

/// Average beam-gain matrix, linear power units.
pub type GainMatrix = BeamTable;

impl BeamTable {
    pub fn zeros(m_bs: usize, m_ue: usize) -> Self {
        BeamTable { m_bs, m_ue, values: vec![0.0; m_bs * m_ue] }
    }

    pub fn from_fn(m_bs: usize, m_ue: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(m_bs * m_ue);
        for q in 0..m_bs {
            for p in 0..m_ue {
                values.push(f(q, p));
            }
        }
        BeamTable { m_bs, m_ue, values }
    }

    pub fn m_bs(&self) -> usize {
        self.m_bs
    }

    pub fn m_ue(&self) -> usize {
        self.m_ue
    }

    #[inline]
    pub fn get(&self, q: usize, p: usize) -> f64 {
        debug_assert!(q < self.m_bs && p < self.m_ue);
        self.values[q * self.m_ue + p]
    }

    #[inline]
    pub fn set(&mut self, q: usize, p: usize, v: f64) {
        self.values[q * self.m_ue + p] = v;
    }

    pub fn row(&self, q: usize) -> &[f64] {
        &self.values[q * self.m_ue..(q + 1) * self.m_ue]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Position of the maximum; ties go to the smallest `q`, then smallest `p`.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        (best / self.m_ue, best % self.m_ue)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        BeamTable { m_bs: self.m_bs, m_ue: self.m_ue, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&mut self, k: f64) {
        self.values.iter_mut().for_each(|v| *v *= k);
    }

    /// `self += other`, elementwise.
    pub fn accumulate(&mut self, other: &BeamTable) {
        assert_eq!((self.m_bs, self.m_ue), (other.m_bs, other.m_ue));
        self.values.iter_mut().zip(&other.values).for_each(|(a, b)| *a += b);
    }
}

const SINGULARITY_THRESHOLD: f64 = 1e-9;

/// ULA array factor at cosine mismatch `delta`:
/// `e^{iπΔ/2} / e^{iπnΔ/2} · sin(πnΔ/2) / sin(πΔ/2) / √n`.
///
/// Where `sin(πΔ/2)` vanishes (Δ = 0 or ±2) the ratio is replaced by its
/// limit, so `|L|² = n` there.
pub fn l_function(delta: f64, n: usize) -> C64 {
    let nf = n as f64;
    let x = FRAC_PI_2 * delta;
    let s = x.sin();
    let ratio = if s.abs() < SINGULARITY_THRESHOLD {
        let x0 = (x / PI).round() * PI;
        nf * (nf * x0).cos() / x0.cos()
    } else {
        (nf * x).sin() / s
    };
    C64::from_polar(ratio / nf.sqrt(), -(nf - 1.0) * x)
}

/// Closed-form gain matrix from already-derived path angles.
pub fn gain_matrix_from_angles(
    angles: &PathAngles,
    profile: &[f64],
    cb_ue: &Codebook,
    cb_bs: &Codebook,
) -> GainMatrix {
    assert_eq!(profile.len(), angles.len(), "power profile length must equal the path count");
    let bs_cos = cb_bs.grid_cosines();
    let ue_cos = cb_ue.grid_cosines();
    let mut g = BeamTable::zeros(cb_bs.len(), cb_ue.len());
    let mut l_ue = vec![0.0; ue_cos.len()];
    for (l, &power) in profile.iter().enumerate() {
        if power == 0.0 {
            continue;
        }
        let c_aoa = angles.aoas[l].cos();
        let c_aod = angles.aods[l].cos();
        for (p, &c) in ue_cos.iter().enumerate() {
            l_ue[p] = l_function(c - c_aod, cb_ue.antennas).norm_sqr();
        }
        for (q, &c) in bs_cos.iter().enumerate() {
            let l_bs = power * l_function(c_aoa - c, cb_bs.antennas).norm_sqr();
            let row = q * g.m_ue;
            for (p, &lu) in l_ue.iter().enumerate() {
                g.values[row + p] += l_bs * lu;
            }
        }
    }
    g
}

/// Closed-form average beam-gain matrix of one UE.
pub fn gain_matrix_analytic(
    p: &PositionMatrix,
    profile: &[f64],
    cb_ue: &Codebook,
    cb_bs: &Codebook,
) -> Result<GainMatrix> {
    let angles = angles_from_positions(p)?;
    Ok(gain_matrix_from_angles(&angles, profile, cb_ue, cb_bs))
}

fn beam_matrix(cb: &Codebook) -> DMatrix<C64> {
    DMatrix::from_fn(cb.antennas, cb.len(), |i, j| cb.beams[j].as_slice()[i])
}

/// Sample mean of `|w_qᴴ H v_p|²` over `samples` independent channel draws.
pub fn gain_matrix_empirical<R: Rng + ?Sized>(
    p: &PositionMatrix,
    profile: &[f64],
    cb_ue: &Codebook,
    cb_bs: &Codebook,
    samples: usize,
    rng: &mut R,
) -> Result<GainMatrix> {
    assert!(samples >= 1);
    let w_h = beam_matrix(cb_bs).adjoint();
    let v = beam_matrix(cb_ue);
    let mut g = BeamTable::zeros(cb_bs.len(), cb_ue.len());
    for _ in 0..samples {
        let h = draw_channel(p, profile, cb_bs.antennas, cb_ue.antennas, rng)?.matrix;
        let y = &w_h * (h * &v);
        for q in 0..g.m_bs {
            for pp in 0..g.m_ue {
                g.values[q * g.m_ue + pp] += y[(q, pp)].norm_sqr();
            }
        }
    }
    g.scale(1.0 / samples as f64);
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::{build_codebook, ArraySide, Codebooks};
    use crate::scenario::{sample_scenario, Point2, ScenarioConfig};
    use crate::seed::rng_from;

    fn geometric_sum(delta: f64, n: usize) -> C64 {
        // w_qᴴ a(ϑ) scaled by √n, written as the raw sum
        (0..n).map(|k| C64::from_polar(1.0, -PI * k as f64 * delta)).sum::<C64>() / (n as f64).sqrt()
    }

    #[test]
    fn main_lobe_limit() {
        assert_eq!(l_function(0.0, 16).norm_sqr(), 16.0);
        assert!((l_function(1e-12, 16).norm_sqr() - 16.0).abs() < 1e-9);
        for n in [1, 2, 3, 8, 9] {
            assert!((l_function(2.0, n).norm_sqr() - n as f64).abs() < 1e-9);
            assert!((l_function(-2.0, n).norm_sqr() - n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn first_null() {
        assert!(l_function(2.0 / 16.0, 16).norm() < 1e-12);
    }

    #[test]
    fn matches_geometric_sum() {
        assert!((l_function(0.05, 16).norm() - geometric_sum(0.05, 16).norm()).abs() < 1e-10);
        for &d in &[-1.99, -1.0, -0.3, 0.05, 0.7, 1.5, 2.0 - 1e-7] {
            for n in [1, 4, 5, 16, 64] {
                let a = l_function(d, n);
                let b = geometric_sum(d, n);
                assert!((a - b).norm() < 1e-9, "d={d} n={n}: {a} vs {b}");
            }
        }
    }

    /// UE placed so that its LoS AoA is exactly BS grid angle `q`.
    fn on_grid_position(cbs: &Codebooks, q: usize) -> PositionMatrix {
        let a = cbs.bs.grid_angles[q];
        PositionMatrix { bs: Point2::ORIGIN, reflectors: vec![], ue: Point2::new(80.0 * a.cos(), 80.0 * a.sin()) }
    }

    #[test]
    fn on_grid_single_path_reaches_full_gain() {
        let cbs = Codebooks::new(16, 16, 16, 16);
        for q in [0, 5, 11] {
            let pos = on_grid_position(&cbs, q);
            let g = gain_matrix_analytic(&pos, &[1.0], &cbs.ue, &cbs.bs).unwrap();
            // UE departs at AoA + π, whose cosine is mirrored onto grid 15 - q
            let p = 15 - q;
            assert!((g.get(q, p) - 256.0).abs() < 1e-9, "{}", g.get(q, p));
            assert_eq!(g.argmax(), (q, p));
            assert!(g.max() <= 256.0 + 1e-9);
        }
    }

    #[test]
    fn zero_power_path_contributes_nothing() {
        let cbs = Codebooks::new(12, 10, 14, 8);
        let cfg = ScenarioConfig::desk();
        let p = sample_scenario(&cfg, &mut rng_from(30))[0].clone();
        let los_only = PositionMatrix { reflectors: vec![], ..p.clone() };
        let a = gain_matrix_analytic(&p, &[1.0, 0.0, 0.0], &cbs.ue, &cbs.bs).unwrap();
        let b = gain_matrix_analytic(&los_only, &[1.0], &cbs.ue, &cbs.bs).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mirror_symmetry() {
        let cbs = Codebooks::new(16, 16, 16, 16);
        let cfg = ScenarioConfig::desk();
        let mut rng = rng_from(31);
        for _ in 0..20 {
            let p = sample_scenario(&cfg, &mut rng)[0].clone();
            let flip = |x: Point2| Point2::new(x.x, -x.y);
            let m = PositionMatrix { bs: flip(p.bs), reflectors: p.reflectors.iter().map(|&r| flip(r)).collect(), ue: flip(p.ue) };
            let a = gain_matrix_analytic(&p, &cfg.path_power_profile, &cbs.ue, &cbs.bs).unwrap();
            let b = gain_matrix_analytic(&m, &cfg.path_power_profile, &cbs.ue, &cbs.bs).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
            }
        }
    }

    #[test]
    fn cell_edge_loss_is_equal_for_all_beams() {
        let n = 16;
        let cb = build_codebook(16, n, ArraySide::Ue);
        let half = 1.0 / 16.0;
        let losses: Vec<f64> = cb
            .grid_cosines()
            .iter()
            .map(|&c| {
                let path = (c + half).clamp(-1.0, 1.0).acos();
                let direct = geometric_sum(c - path.cos(), n).norm_sqr();
                let closed = l_function(c - path.cos(), n).norm_sqr();
                assert!((direct - closed).abs() < 1e-9);
                closed
            })
            .collect();
        for l in &losses {
            assert!((l - losses[0]).abs() < 1e-9);
            assert!(*l < n as f64);
        }
        // exactly on grid: full gain
        for (p, &a) in cb.grid_angles.iter().enumerate() {
            assert!((l_function(cb.grid_cosines()[p] - a.cos(), n).norm_sqr() - n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn single_sample_is_rank_one_scaled() {
        let cbs = Codebooks::new(8, 8, 8, 8);
        let cfg = ScenarioConfig::desk();
        let p = PositionMatrix { reflectors: vec![], ..sample_scenario(&cfg, &mut rng_from(32))[0].clone() };
        let sigma2 = 1.0;
        let mut rng = rng_from(33);
        let alpha = draw_channel(&p, &[sigma2], 8, 8, &mut rng.clone()).unwrap().path_gains[0];
        let emp = gain_matrix_empirical(&p, &[sigma2], &cbs.ue, &cbs.bs, 1, &mut rng).unwrap();
        let ana = gain_matrix_analytic(&p, &[sigma2], &cbs.ue, &cbs.bs).unwrap();
        let k = alpha.norm_sqr() / sigma2;
        for (e, a) in emp.values().iter().zip(ana.values()) {
            assert!((e - k * a).abs() < 1e-9 * (1.0 + e.abs()));
            assert!(*e >= 0.0);
        }
    }

    #[test]
    fn empirical_converges_to_closed_form() {
        let cbs = Codebooks::new(16, 16, 16, 16);
        let cfg = ScenarioConfig::desk();
        let mut rng = rng_from(34);
        let p = sample_scenario(&cfg, &mut rng)[0].clone();
        let ana = gain_matrix_analytic(&p, &cfg.path_power_profile, &cbs.ue, &cbs.bs).unwrap();
        let emp = gain_matrix_empirical(&p, &cfg.path_power_profile, &cbs.ue, &cbs.bs, 20_000, &mut rng).unwrap();
        let floor = 0.01 * ana.max();
        for (e, a) in emp.values().iter().zip(ana.values()) {
            if *a > floor {
                assert!((e - a).abs() / a <= 0.03, "{e} vs {a}");
            }
        }
    }

    #[test]
    fn argmax_ties_prefer_smallest_index() {
        let t = BeamTable::from_fn(3, 3, |q, p| if (q, p) == (0, 0) { 0.0 } else { 1.0 });
        assert_eq!(t.argmax(), (0, 1));
        let t = BeamTable::from_fn(3, 3, |_, _| 2.0);
        assert_eq!(t.argmax(), (0, 0));
    }
}

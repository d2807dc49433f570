//! Ground-truth geometry, path angles and noisy hierarchical position beliefs.
//!
//! A [`PositionMatrix`] holds the BS, the `L-1` reflectors and one UE. Node
//! indices follow that column order: `0` is the BS, `1..L` the reflectors and
//! `L` the UE. Reflectors are global objects: every UE of one scenario sees
//! the same reflector coordinates.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::{Error, Result};

/// Two-dimensional point or offset, in meters.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (other - self).norm()
    }

    /// Direction of `to - self`, counter-clockwise from +x, wrapped to `[0, 2π)`.
    pub fn bearing_to(self, to: Point2) -> f64 {
        let d = to - self;
        wrap_angle(d.y.atan2(d.x))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Axis-aligned rectangle, meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn clamp(&self, p: Point2) -> Point2 {
        Point2::new(p.x.clamp(self.x_min, self.x_max), p.y.clamp(self.y_min, self.y_max))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point2 {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        Point2::new(
            self.x_min + u * (self.x_max - self.x_min),
            self.y_min + v * (self.y_max - self.y_min),
        )
    }
}

/// Geometry, propagation and array parameters of one scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub num_ues: usize,
    pub num_paths: usize,
    pub cluster_center: Point2,
    pub cluster_radius: f64,
    pub bs_position: Point2,
    pub reflector_region: Rect,
    /// Per-path average powers, LoS first. Must sum to one.
    pub path_power_profile: Vec<f64>,
    pub noise_power: f64,
    pub n_ue: usize,
    pub n_bs: usize,
    pub m_ue: usize,
    pub m_bs: usize,
}

/// LoS path carries most of the power, reflected paths share the rest equally.
pub const STRONG_LOS_PROFILE: [f64; 3] = [0.6, 0.2, 0.2];
/// LoS fully blocked, one reflected path stronger than the other.
pub const BLOCKAGE_PROFILE: [f64; 3] = [0.0, 0.6, 0.4];

impl ScenarioConfig {
    /// Full-scale setup: 64 antennas and 64 beams at both ends, UE cluster
    /// 100 m broadside of the BS, 30 dB aligned single-UE SNR.
    pub fn paper() -> Self {
        Self::with_arrays(64, 64)
    }

    /// Reduced setup with 16 antennas and 16 beams at both ends.
    pub fn desk() -> Self {
        Self::with_arrays(16, 16)
    }

    fn with_arrays(n: usize, m: usize) -> Self {
        ScenarioConfig {
            num_ues: 2,
            num_paths: 3,
            cluster_center: Point2::new(0.0, 100.0),
            cluster_radius: 7.0,
            bs_position: Point2::ORIGIN,
            reflector_region: Rect { x_min: -60.0, x_max: 60.0, y_min: 10.0, y_max: 90.0 },
            path_power_profile: STRONG_LOS_PROFILE.to_vec(),
            noise_power: aligned_snr_noise(n, n, 30.0),
            n_ue: n,
            n_bs: n,
            m_ue: m,
            m_bs: m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.num_ues == 0 {
            return bad("num_ues must be positive".into());
        }
        if self.num_paths == 0 {
            return bad("num_paths must be at least 1".into());
        }
        if self.path_power_profile.len() != self.num_paths {
            return bad(format!(
                "path_power_profile has {} entries, num_paths is {}",
                self.path_power_profile.len(),
                self.num_paths
            ));
        }
        if self.path_power_profile.iter().any(|&s| !(s >= 0.0 && s.is_finite())) {
            return bad("path powers must be finite and nonnegative".into());
        }
        let total: f64 = self.path_power_profile.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return bad(format!("path powers sum to {total}, expected 1"));
        }
        if !(self.cluster_radius >= 0.0 && self.cluster_radius.is_finite()) {
            return bad("cluster_radius must be finite and nonnegative".into());
        }
        if !(self.noise_power > 0.0 && self.noise_power.is_finite()) {
            return bad("noise_power must be positive".into());
        }
        if self.n_ue == 0 || self.n_bs == 0 || self.m_ue == 0 || self.m_bs == 0 {
            return bad("antenna counts and codebook sizes must be positive".into());
        }
        if !self.cluster_center.is_finite() || !self.bs_position.is_finite() {
            return bad("positions must be finite".into());
        }
        let r = &self.reflector_region;
        if self.num_paths > 1 && !(r.x_min < r.x_max && r.y_min < r.y_max) {
            return bad("reflector_region must have positive area when num_paths > 1".into());
        }
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        self.num_paths + 1
    }
}

/// Noise power giving `snr_db` for one perfectly aligned single-path link.
pub fn aligned_snr_noise(n_bs: usize, n_ue: usize, snr_db: f64) -> f64 {
    (n_bs * n_ue) as f64 / 10f64.powf(snr_db / 10.0)
}

/// Positions of the BS, the reflectors and one UE.
#[derive(Clone, Debug, PartialEq)]
pub struct PositionMatrix {
    pub bs: Point2,
    pub reflectors: Vec<Point2>,
    pub ue: Point2,
}

impl PositionMatrix {
    pub fn num_paths(&self) -> usize {
        self.reflectors.len() + 1
    }

    pub fn num_nodes(&self) -> usize {
        self.reflectors.len() + 2
    }

    pub fn ue_node(&self) -> usize {
        self.reflectors.len() + 1
    }

    /// Column `n` in BS, reflectors.., UE order.
    pub fn node(&self, n: usize) -> Point2 {
        match n {
            0 => self.bs,
            n if n <= self.reflectors.len() => self.reflectors[n - 1],
            n if n == self.reflectors.len() + 1 => self.ue,
            _ => panic!("node index {n} out of range"),
        }
    }

    pub fn node_mut(&mut self, n: usize) -> &mut Point2 {
        let r = self.reflectors.len();
        match n {
            0 => &mut self.bs,
            n if n <= r => &mut self.reflectors[n - 1],
            n if n == r + 1 => &mut self.ue,
            _ => panic!("node index {n} out of range"),
        }
    }

    pub fn columns(&self) -> Vec<Point2> {
        (0..self.num_nodes()).map(|n| self.node(n)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.columns().iter().all(|p| p.is_finite())
    }
}

/// Per-path departure angles at the UE and arrival angles at the BS, radians
/// in `[0, 2π)`. Path 0 is the LoS path.
#[derive(Clone, Debug, PartialEq)]
pub struct PathAngles {
    pub aods: Vec<f64>,
    pub aoas: Vec<f64>,
}

impl PathAngles {
    pub fn len(&self) -> usize {
        self.aods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aods.is_empty()
    }
}

const MIN_NODE_SEPARATION: f64 = 1e-9;

/// Derives AoD/AoA pairs from positions. Both arrays lie along the +x axis.
pub fn angles_from_positions(p: &PositionMatrix) -> Result<PathAngles> {
    if p.ue.distance(p.bs) <= MIN_NODE_SEPARATION {
        return Err(Error::DegenerateGeometry("UE coincides with the BS".into()));
    }
    let mut aods = Vec::with_capacity(p.num_paths());
    let mut aoas = Vec::with_capacity(p.num_paths());
    aods.push(p.ue.bearing_to(p.bs));
    aoas.push(p.bs.bearing_to(p.ue));
    for (i, &r) in p.reflectors.iter().enumerate() {
        if r.distance(p.bs) <= MIN_NODE_SEPARATION || r.distance(p.ue) <= MIN_NODE_SEPARATION {
            return Err(Error::DegenerateGeometry(format!(
                "reflector {} at ({}, {}) coincides with the BS or the UE",
                i + 1,
                r.x,
                r.y
            )));
        }
        aods.push(p.ue.bearing_to(r));
        aoas.push(p.bs.bearing_to(r));
    }
    Ok(PathAngles { aods, aoas })
}

/// Uniform offset on the closed disk of the given radius.
///
/// Always consumes two uniforms, so streams stay aligned across radii.
pub fn sample_position_error<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Point2 {
    let u: f64 = rng.random();
    let theta: f64 = rng.random::<f64>() * TAU;
    if radius == 0.0 {
        return Point2::ORIGIN;
    }
    let rho = radius * u.sqrt();
    Point2::new(rho * theta.cos(), rho * theta.sin())
}

/// Draws `K` position matrices: UEs i.i.d. uniform in the cluster disk,
/// reflectors drawn once uniformly in the reflector region and shared.
pub fn sample_scenario<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Vec<PositionMatrix> {
    let reflectors: Vec<Point2> =
        (1..cfg.num_paths).map(|_| cfg.reflector_region.sample(rng)).collect();
    (0..cfg.num_ues)
        .map(|_| PositionMatrix {
            bs: cfg.bs_position,
            reflectors: reflectors.clone(),
            ue: cfg.cluster_center + sample_position_error(cfg.cluster_radius, rng),
        })
        .collect()
}

/// A fresh draw from the prior `P | r_cl`; same generative model as
/// [`sample_scenario`].
pub fn sample_prior<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Vec<PositionMatrix> {
    sample_scenario(cfg, rng)
}

/// Maximum position-error radii indexed by (observer, subject, node).
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorModel {
    num_ues: usize,
    num_nodes: usize,
    radii: Vec<f64>,
}

impl ErrorModel {
    pub fn zero(num_ues: usize, num_paths: usize) -> Self {
        ErrorModel { num_ues, num_nodes: num_paths + 1, radii: vec![0.0; num_ues * num_ues * (num_paths + 1)] }
    }

    /// Observer `u` sees every non-BS node of every UE with radius
    /// `per_observer[u]`; the BS node gets `bs_radius`.
    pub fn per_observer(num_paths: usize, per_observer: &[f64], bs_radius: f64) -> Self {
        let k = per_observer.len();
        let mut em = Self::zero(k, num_paths);
        for (u, &r) in per_observer.iter().enumerate() {
            for w in 0..k {
                em.set(u, w, 0, bs_radius);
                for n in 1..em.num_nodes {
                    em.set(u, w, n, r);
                }
            }
        }
        em
    }

    pub fn num_ues(&self) -> usize {
        self.num_ues
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    fn index(&self, observer: usize, subject: usize, node: usize) -> usize {
        assert!(observer < self.num_ues && subject < self.num_ues && node < self.num_nodes);
        (observer * self.num_ues + subject) * self.num_nodes + node
    }

    pub fn radius(&self, observer: usize, subject: usize, node: usize) -> f64 {
        self.radii[self.index(observer, subject, node)]
    }

    pub fn set(&mut self, observer: usize, subject: usize, node: usize, radius: f64) {
        assert!(radius >= 0.0, "error radius must be nonnegative");
        let i = self.index(observer, subject, node);
        self.radii[i] = radius;
    }
}

/// Everything UE `observer` believes about the positions of all UEs.
#[derive(Clone, Debug, PartialEq)]
pub struct BeliefSet {
    pub observer: usize,
    /// `estimates[w]` is the observer's estimate of UE `w`'s position matrix.
    pub estimates: Vec<PositionMatrix>,
    /// `radii[w][n]`: known maximum error of `estimates[w]` at node `n`.
    pub radii: Vec<Vec<f64>>,
}

impl BeliefSet {
    pub fn radius(&self, subject: usize, node: usize) -> f64 {
        self.radii[subject][node]
    }

    pub fn num_ues(&self) -> usize {
        self.estimates.len()
    }
}

/// Perturbs every node of every subject independently for every observer.
///
/// Returns one belief set per observer, in observer order.
pub fn build_beliefs<R: Rng + ?Sized>(
    truth: &[PositionMatrix],
    em: &ErrorModel,
    rng: &mut R,
) -> Vec<BeliefSet> {
    let k = truth.len();
    assert_eq!(em.num_ues(), k, "error model built for a different UE count");
    (0..k)
        .map(|u| {
            let mut estimates = Vec::with_capacity(k);
            let mut radii = Vec::with_capacity(k);
            for (w, p) in truth.iter().enumerate() {
                assert_eq!(p.num_nodes(), em.num_nodes(), "error model built for a different path count");
                let mut est = p.clone();
                let mut r_w = Vec::with_capacity(p.num_nodes());
                for n in 0..p.num_nodes() {
                    let r = em.radius(u, w, n);
                    *est.node_mut(n) = p.node(n) + sample_position_error(r, rng);
                    r_w.push(r);
                }
                estimates.push(est);
                radii.push(r_w);
            }
            BeliefSet { observer: u, estimates, radii }
        })
        .collect()
}

const POSTERIOR_MAX_ATTEMPTS: usize = 1000;

fn project_to_disk(p: Point2, center: Point2, radius: f64) -> Point2 {
    let d = p - center;
    let n = d.norm();
    if n <= radius {
        p
    } else {
        center + d * (radius / n)
    }
}

/// Bounded prior support of one node, used as a rejection proposal.
#[derive(Clone, Copy, Debug)]
enum Support {
    Disk(Point2, f64),
    Box(Rect),
}

impl Support {
    fn area(&self) -> f64 {
        match *self {
            Support::Disk(_, r) => PI * r * r,
            Support::Box(r) => (r.x_max - r.x_min) * (r.y_max - r.y_min),
        }
    }

    fn contains(&self, p: Point2) -> bool {
        match *self {
            Support::Disk(c, r) => p.distance(c) <= r,
            Support::Box(r) => r.contains(p),
        }
    }

    fn nearest(&self, p: Point2) -> Point2 {
        match *self {
            Support::Disk(c, r) => project_to_disk(p, c, r),
            Support::Box(r) => r.clamp(p),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point2 {
        match *self {
            Support::Disk(c, r) => c + sample_position_error(r, rng),
            Support::Box(r) => r.sample(rng),
        }
    }
}

/// Uniform draw on `disks[0] ∩ .. ∩ disks[k] ∩ prior`, by rejection from
/// whichever of the disks and the prior has the smallest area. Falls back to
/// the point of the prior nearest to the smallest disk's center.
fn sample_intersection<R: Rng + ?Sized>(disks: &[(Point2, f64)], prior: Support, rng: &mut R) -> Point2 {
    let &(center, radius) = disks
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one observation per node");
    if radius == 0.0 {
        return center;
    }
    let from_prior = prior.area() < PI * radius * radius;
    for _ in 0..POSTERIOR_MAX_ATTEMPTS {
        let cand = if from_prior { prior.sample(rng) } else { center + sample_position_error(radius, rng) };
        let in_all = disks.iter().all(|&(c, r)| cand.distance(c) <= r);
        if in_all && prior.contains(cand) {
            return cand;
        }
    }
    prior.nearest(center)
}

/// Draws `K` candidate true position matrices from `P | beliefs, r_cl`.
///
/// Errors are uniform on disks, so the likelihood of a node position is flat
/// on the intersection of the disks around every estimate of that node, and
/// the posterior is uniform on that intersection clipped to the prior support.
/// Reflectors and the BS are shared by all UEs, so the estimates of those
/// nodes across all subjects are combined; each UE node has one estimate.
///
/// The BS prior is the configured point: a BS node with nonzero error radius
/// resolves to `cfg.bs_position`, a zero-radius estimate is kept verbatim.
pub fn sample_posterior<R: Rng + ?Sized>(
    belief: &BeliefSet,
    cfg: &ScenarioConfig,
    rng: &mut R,
) -> Vec<PositionMatrix> {
    let k = belief.num_ues();
    let num_reflectors = belief.estimates.first().map_or(0, |p| p.reflectors.len());

    let shared_disks = |n: usize| -> Vec<(Point2, f64)> {
        (0..k).map(|w| (belief.estimates[w].node(n), belief.radius(w, n))).collect()
    };

    let bs_disks = shared_disks(0);
    let bs = match bs_disks.iter().find(|d| d.1 == 0.0) {
        Some(&(c, _)) => c,
        None => cfg.bs_position,
    };

    let region = cfg.reflector_region;
    let reflectors: Vec<Point2> = (1..=num_reflectors)
        .map(|n| sample_intersection(&shared_disks(n), Support::Box(region), rng))
        .collect();

    let center = cfg.cluster_center;
    let r_cl = cfg.cluster_radius;
    (0..k)
        .map(|w| {
            let est = &belief.estimates[w];
            let ue_node = est.ue_node();
            let disk = [(est.ue, belief.radius(w, ue_node))];
            let ue = sample_intersection(&disk, Support::Disk(center, r_cl), rng);
            PositionMatrix { bs, reflectors: reflectors.clone(), ue }
        })
        .collect()
}

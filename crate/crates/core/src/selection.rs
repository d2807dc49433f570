//! Decentralized analog beam selection.
//!
//! UEs are indexed `0..K` by information rank: UE 0 is the most informed and
//! can read every other UE's beliefs, UE `K-1` only its own. A UE `u`
//! therefore knows exactly what UEs `u+1..K` will pick (it replays their
//! selection with their inputs and their random streams) but has to guess the
//! picks of UEs `0..u`.
//!
//! Coordinated strategies score a candidate pair `(q, p)` of UE `u` with the
//! interference-aware proxy
//!
//! ```text
//! G^u[q, p] / (Σ_{w≠u} G^w[q, p_w] + σ_n²)
//! ```
//!
//! where the `p_w` of more informed UEs are first guessed greedily (most
//! informed first), and average `log2(1 + proxy)` over Monte-Carlo draws of
//! the position matrices.

use std::fmt;
use std::str::FromStr;

use crate::beamgain::{gain_matrix_analytic, BeamTable, GainMatrix};
use crate::codebook::Codebooks;
use crate::scenario::{sample_posterior, sample_prior, BeliefSet, PositionMatrix, ScenarioConfig};
use crate::seed::{derive_seed, rng_from, SimRng};
use crate::{Error, Result};

/// Selected beams of one UE: BS codebook index `bs` (q) and UE codebook index `ue` (p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BeamPair {
    pub bs: usize,
    pub ue: usize,
}

impl BeamPair {
    pub const fn new(bs: usize, ue: usize) -> Self {
        BeamPair { bs, ue }
    }
}

impl From<(usize, usize)> for BeamPair {
    fn from((bs, ue): (usize, usize)) -> Self {
        BeamPair { bs, ue }
    }
}

/// One beam pair per UE, in UE order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeamAssignment(pub Vec<BeamPair>);

impl BeamAssignment {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[BeamPair] {
        &self.0
    }

    pub fn validate(&self, codebooks: &Codebooks) -> Result<()> {
        for (u, bp) in self.0.iter().enumerate() {
            if bp.bs >= codebooks.bs.len() || bp.ue >= codebooks.ue.len() {
                return Err(Error::InvalidConfig(format!("UE {u}: beam pair {bp:?} outside the codebooks")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    Uncoordinated,
    Naive,
    Statistical,
    Robust,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] =
        [StrategyKind::Uncoordinated, StrategyKind::Naive, StrategyKind::Statistical, StrategyKind::Robust];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Uncoordinated => "uncoordinated",
            StrategyKind::Naive => "naive",
            StrategyKind::Statistical => "statistical",
            StrategyKind::Robust => "robust",
        }
    }

    pub fn is_coordinated(self) -> bool {
        self != StrategyKind::Uncoordinated
    }

    fn seed_tag(self) -> u64 {
        match self {
            StrategyKind::Uncoordinated => 0,
            StrategyKind::Naive => 1,
            StrategyKind::Statistical => 2,
            StrategyKind::Robust => 3,
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown strategy '{s}'")))
    }
}

/// Parameters shared by every UE's selection within one trial.
#[derive(Clone, Copy, Debug)]
pub struct SelectionSetup<'a> {
    pub config: &'a ScenarioConfig,
    pub codebooks: &'a Codebooks,
    /// Monte-Carlo iterations of the statistical and robust strategies.
    pub mc_iterations: usize,
    /// Per-trial selection seed; each UE derives its own stream from it.
    pub seed: u64,
}

/// What UE `ue` can see: its own beliefs and those of the less informed UEs.
#[derive(Clone, Copy, Debug)]
pub struct SelectionContext<'a> {
    ue: usize,
    /// Belief sets of observers `ue..K`, own first.
    beliefs: &'a [BeliefSet],
    pub setup: SelectionSetup<'a>,
}

impl<'a> SelectionContext<'a> {
    /// Context of UE `ue` given the belief sets of *all* UEs; only the slice
    /// `ue..K` is retained.
    pub fn new(ue: usize, all_beliefs: &'a [BeliefSet], setup: SelectionSetup<'a>) -> Result<Self> {
        if ue >= all_beliefs.len() {
            return Err(Error::InvalidConfig(format!("UE {ue} out of range for {} UEs", all_beliefs.len())));
        }
        let k = all_beliefs.len();
        for (i, b) in all_beliefs.iter().enumerate() {
            if b.observer != i || b.num_ues() != k {
                return Err(Error::InvalidConfig(format!("belief set {i} is inconsistent with {k} UEs")));
            }
        }
        if setup.mc_iterations == 0 {
            return Err(Error::InvalidConfig("monte_carlo_iterations must be positive".into()));
        }
        Ok(SelectionContext { ue, beliefs: &all_beliefs[ue..], setup })
    }

    pub fn ue(&self) -> usize {
        self.ue
    }

    pub fn num_ues(&self) -> usize {
        self.ue + self.beliefs.len()
    }

    pub fn own_belief(&self) -> &'a BeliefSet {
        &self.beliefs[0]
    }

    /// Beliefs of observer `w`, readable only for `w ≥ ue`.
    pub fn belief_of(&self, w: usize) -> Option<&'a BeliefSet> {
        w.checked_sub(self.ue).and_then(|i| self.beliefs.get(i))
    }

    /// The view of a less informed UE `w > ue`.
    pub fn for_ue(&self, w: usize) -> SelectionContext<'a> {
        assert!(w >= self.ue && w < self.num_ues(), "UE {w} is not visible from UE {}", self.ue);
        SelectionContext { ue: w, beliefs: &self.beliefs[w - self.ue..], setup: self.setup }
    }

    fn mc_rng(&self, strategy: StrategyKind) -> SimRng {
        rng_from(derive_seed(self.setup.seed, &[self.ue as u64, strategy.seed_tag()]))
    }

    fn gain_matrices(&self, positions: &[PositionMatrix]) -> Result<Vec<GainMatrix>> {
        let cfg = self.setup.config;
        let cbs = self.setup.codebooks;
        positions
            .iter()
            .map(|p| gain_matrix_analytic(p, &cfg.path_power_profile, &cbs.ue, &cbs.bs))
            .collect()
    }
}

/// `log2(1 + G[q, p] / σ_n²)`.
pub fn single_user_rate(g: &GainMatrix, q: usize, p: usize, noise_power: f64) -> f64 {
    (1.0 + g.get(q, p) / noise_power).log2()
}

/// Own-gain argmax on the UE's estimate of its own position matrix.
pub fn select_uncoordinated(ctx: &SelectionContext<'_>) -> Result<BeamPair> {
    let own = &ctx.own_belief().estimates[ctx.ue];
    let g = ctx.gain_matrices(std::slice::from_ref(own))?.pop().expect("one matrix");
    Ok(g.argmax().into())
}

/// Greedy approximation of the multi-user sum-rate, seen from UE `u`.
///
/// `known` holds the decisions of UEs `u+1..K` in UE order. The decisions of
/// UEs `0..u` are guessed one at a time, most informed first: UE `w` is given
/// the pair maximizing its own proxy SINR jointly with the still-free UE beams
/// of UEs `w+1..=u`, and only its own pair is kept. Returns UE `u`'s proxy
/// SINR for every candidate `(q, p)`.
///
/// The joint maximization is exact: the objective of UE `w` depends on a free
/// UE `v` only through `G^v[q_w, p_v]` in the denominator, so for each
/// `q_w` the free beams independently minimize their own row of `G^v`.
pub fn greedy_sum_rate_eval(gains: &[GainMatrix], known: &[BeamPair], u: usize, noise_power: f64) -> BeamTable {
    let k = gains.len();
    assert!(u < k, "UE {u} out of range");
    assert_eq!(known.len(), k - u - 1, "need the decisions of every UE after {u}");
    let (m_bs, m_ue) = (gains[0].m_bs(), gains[0].m_ue());

    let mut fixed: Vec<Option<BeamPair>> = vec![None; k];
    for (i, &bp) in known.iter().enumerate() {
        fixed[u + 1 + i] = Some(bp);
    }

    // row_min[v][q] = min_p G^v[q, p]
    let row_min: Vec<Vec<f64>> = gains[..=u]
        .iter()
        .map(|g| (0..m_bs).map(|q| g.row(q).iter().copied().fold(f64::INFINITY, f64::min)).collect())
        .collect();

    for w in 0..u {
        let mut best: Option<(f64, BeamPair)> = None;
        for q in 0..m_bs {
            let row = gains[w].row(q);
            let mut p_best = 0;
            for (p, &g) in row.iter().enumerate() {
                if g > row[p_best] {
                    p_best = p;
                }
            }
            let mut denom = noise_power;
            for v in (0..k).filter(|&v| v != w) {
                denom += match fixed[v] {
                    Some(bp) => gains[v].get(q, bp.ue),
                    None => row_min[v][q],
                };
            }
            let ratio = row[p_best] / denom;
            if best.is_none_or(|(b, _)| ratio > b) {
                best = Some((ratio, BeamPair::new(q, p_best)));
            }
        }
        fixed[w] = best.map(|(_, bp)| bp);
    }

    let interferers: Vec<(usize, usize)> =
        (0..k).filter(|&w| w != u).map(|w| (w, fixed[w].expect("all other UEs fixed").ue)).collect();
    let mut table = BeamTable::zeros(m_bs, m_ue);
    for q in 0..m_bs {
        let interference: f64 = interferers.iter().map(|&(w, p_w)| gains[w].get(q, p_w)).sum();
        let denom = interference + noise_power;
        for p in 0..m_ue {
            table.set(q, p, gains[u].get(q, p) / denom);
        }
    }
    table
}

/// Replays, for `w = K-1` down to `ue+1`, the selection UE `w` performs with
/// its own beliefs and random stream. Returns the decisions of UEs `ue+1..K`
/// in UE order.
pub fn predict_chain(ctx: &SelectionContext<'_>, strategy: StrategyKind) -> Result<Vec<BeamPair>> {
    let k = ctx.num_ues();
    let mut chain: Vec<BeamPair> = Vec::with_capacity(k - ctx.ue - 1);
    for w in (ctx.ue + 1..k).rev() {
        let decision = select_with_known(&ctx.for_ue(w), strategy, &chain)?;
        chain.insert(0, decision);
    }
    Ok(chain)
}

/// Coordinated selection of UE `ctx.ue()` given the (replayed) decisions of
/// UEs `ue+1..K`.
///
/// - naive: one evaluation on the UE's own estimates, taken as exact
/// - statistical: `mc_iterations` draws from the prior
/// - robust: `mc_iterations` draws from the posterior given the UE's beliefs
///
/// Per-iteration rates `log2(1 + proxy)` are averaged and the best pair wins
/// (ties to the smallest `q`, then `p`). Guesses for UEs `0..ue` are dropped.
pub fn select_coordinated(
    ctx: &SelectionContext<'_>,
    strategy: StrategyKind,
    known: &[BeamPair],
) -> Result<BeamPair> {
    assert!(strategy.is_coordinated(), "{strategy} is not a coordinated strategy");
    let setup = ctx.setup;
    let own = ctx.own_belief();
    let noise = setup.config.noise_power;
    let iterations = if strategy == StrategyKind::Naive { 1 } else { setup.mc_iterations };
    let mut rng = ctx.mc_rng(strategy);
    let mut avg_rate = BeamTable::zeros(setup.codebooks.bs.len(), setup.codebooks.ue.len());
    for _ in 0..iterations {
        let drawn;
        let positions: &[PositionMatrix] = match strategy {
            StrategyKind::Naive => &own.estimates,
            StrategyKind::Statistical => {
                drawn = sample_prior(setup.config, &mut rng);
                &drawn
            }
            StrategyKind::Robust => {
                drawn = sample_posterior(own, setup.config, &mut rng);
                &drawn
            }
            StrategyKind::Uncoordinated => unreachable!(),
        };
        let gains = ctx.gain_matrices(positions)?;
        let proxy = greedy_sum_rate_eval(&gains, known, ctx.ue, noise);
        avg_rate.accumulate(&proxy.map(|s| (1.0 + s).log2()));
    }
    avg_rate.scale(1.0 / iterations as f64);
    Ok(avg_rate.argmax().into())
}

fn select_with_known(ctx: &SelectionContext<'_>, strategy: StrategyKind, known: &[BeamPair]) -> Result<BeamPair> {
    match strategy {
        StrategyKind::Uncoordinated => select_uncoordinated(ctx),
        _ => select_coordinated(ctx, strategy, known),
    }
}

/// Full decision of UE `ctx.ue()`: replay the chain, then select.
pub fn select(ctx: &SelectionContext<'_>, strategy: StrategyKind) -> Result<BeamPair> {
    if strategy == StrategyKind::Uncoordinated {
        return select_uncoordinated(ctx);
    }
    let chain = predict_chain(ctx, strategy)?;
    select_coordinated(ctx, strategy, &chain)
}

/// Decisions of all UEs, computed in hierarchy order `K-1..0`. Each UE's chain
/// is the list of decisions already made, which is exactly what
/// [`predict_chain`] would replay.
pub fn select_all(
    all_beliefs: &[BeliefSet],
    setup: SelectionSetup<'_>,
    strategy: StrategyKind,
) -> Result<BeamAssignment> {
    let k = all_beliefs.len();
    let mut decisions: Vec<BeamPair> = Vec::with_capacity(k);
    for u in (0..k).rev() {
        let ctx = SelectionContext::new(u, all_beliefs, setup)?;
        let d = select_with_known(&ctx, strategy, &decisions)?;
        decisions.insert(0, d);
    }
    Ok(BeamAssignment(decisions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{build_beliefs, sample_scenario, ErrorModel, Point2};
    use crate::seed::rng_from;

    fn table(m_bs: usize, m_ue: usize, entries: &[((usize, usize), f64)], floor: f64) -> BeamTable {
        let mut t = BeamTable::from_fn(m_bs, m_ue, |_, _| floor);
        for &((q, p), v) in entries {
            t.set(q, p, v);
        }
        t
    }

    /// Literal joint search over every free index of Algorithm-style greedy
    /// evaluation, including the BS indices of the free UEs.
    fn brute_force_eval(gains: &[GainMatrix], known: &[BeamPair], u: usize, noise: f64) -> BeamTable {
        let k = gains.len();
        let (m_bs, m_ue) = (gains[0].m_bs(), gains[0].m_ue());
        let mut fixed: Vec<Option<BeamPair>> = vec![None; k];
        for (i, &bp) in known.iter().enumerate() {
            fixed[u + 1 + i] = Some(bp);
        }
        for w in 0..u {
            let free: Vec<usize> = (w..=u).collect();
            let n_free = free.len();
            let total = (m_bs * m_ue).pow(n_free as u32);
            let mut best = (f64::NEG_INFINITY, BeamPair::new(0, 0));
            for idx in 0..total {
                // decode (q_v, p_v) for each free v, first free most significant
                let mut rem = idx;
                let mut choice = vec![BeamPair::new(0, 0); n_free];
                for slot in (0..n_free).rev() {
                    let c = rem % (m_bs * m_ue);
                    rem /= m_bs * m_ue;
                    choice[slot] = BeamPair::new(c / m_ue, c % m_ue);
                }
                let pick = |v: usize| fixed[v].unwrap_or_else(|| choice[v - w]);
                let q = choice[0].bs;
                let denom: f64 = noise + (0..k).filter(|&v| v != w).map(|v| gains[v].get(q, pick(v).ue)).sum::<f64>();
                let val = gains[w].get(q, choice[0].ue) / denom;
                if val > best.0 {
                    best = (val, choice[0]);
                }
            }
            fixed[w] = Some(best.1);
        }
        BeamTable::from_fn(m_bs, m_ue, |q, p| {
            let i: f64 = (0..k).filter(|&w| w != u).map(|w| gains[w].get(q, fixed[w].unwrap().ue)).sum();
            gains[u].get(q, p) / (i + noise)
        })
    }

    fn random_gains(k: usize, m: usize, seed: u64) -> Vec<GainMatrix> {
        use rand::Rng;
        let mut rng = rng_from(seed);
        (0..k).map(|_| BeamTable::from_fn(m, m, |_, _| rng.random::<f64>().powi(4) * 50.0)).collect()
    }

    #[test]
    fn single_user_rate_values() {
        let g = table(2, 2, &[((0, 1), 2.0), ((1, 0), 6.0)], 0.0);
        assert_eq!(single_user_rate(&g, 0, 0, 2.0), 0.0);
        assert_eq!(single_user_rate(&g, 0, 1, 2.0), 1.0);
        assert_eq!(single_user_rate(&g, 1, 0, 2.0), 2.0);
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in StrategyKind::ALL {
            assert_eq!(s.name().parse::<StrategyKind>().unwrap(), s);
        }
        assert!("bogus".parse::<StrategyKind>().is_err());
        assert_eq!(" Robust".parse::<StrategyKind>().unwrap(), StrategyKind::Robust);
    }

    #[test]
    fn single_ue_table_is_snr() {
        let g = random_gains(1, 6, 40);
        let t = greedy_sum_rate_eval(&g, &[], 0, 0.5);
        for (a, b) in t.values().iter().zip(g[0].values()) {
            assert_eq!(*a, b / 0.5);
        }
    }

    #[test]
    fn disjoint_dominant_beams() {
        let g0 = table(8, 8, &[((1, 2), 100.0)], 1e-3);
        let g1 = table(8, 8, &[((6, 5), 80.0)], 1e-3);
        let gains = vec![g0, g1];
        let t = greedy_sum_rate_eval(&gains, &[], 1, 1.0);
        assert_eq!(t.argmax(), (6, 5));
        // interference at the chosen row is the floor only
        assert!((t.get(6, 5) - 80.0 / (1.0 + 1e-3)).abs() < 1e-9);
        assert_eq!(t, brute_force_eval(&gains, &[], 1, 1.0));
    }

    #[test]
    fn avoids_the_predicted_bs_beam() {
        // both UEs' strongest path lands on BS beam 3; UE 1 has a weaker
        // second path on BS beam 6
        let g0 = table(8, 8, &[((3, 2), 100.0)], 0.0);
        let g1 = table(8, 8, &[((3, 5), 100.0), ((6, 1), 40.0)], 0.0);
        let gains = vec![g0.clone(), g1.clone()];
        let t = greedy_sum_rate_eval(&gains, &[], 1, 1.0);
        let oracle = brute_force_eval(&gains, &[], 1, 1.0);
        assert_eq!(t, oracle);
        assert_eq!(t.argmax(), (6, 1));
        // the uncoordinated pick would be (3, 5)
        assert_eq!(g1.argmax(), (3, 5));
        // from UE 0's side, with UE 1's decision known
        let t0 = greedy_sum_rate_eval(&gains, &[BeamPair::new(6, 1)], 0, 1.0);
        assert_eq!(t0.argmax(), (3, 2));
    }

    #[test]
    fn greedy_matches_brute_force() {
        for seed in 0..6 {
            let gains = random_gains(3, 4, 100 + seed);
            for u in 0..3 {
                let known: Vec<BeamPair> = (u + 1..3).map(|w| BeamPair::new(w % 4, (w * 3) % 4)).collect();
                let t = greedy_sum_rate_eval(&gains, &known, u, 0.7);
                let o = brute_force_eval(&gains, &known, u, 0.7);
                assert_eq!(t, o, "seed {seed} u {u}");
            }
        }
    }

    #[test]
    fn scaling_gains_and_noise_keeps_selection() {
        for seed in 0..10 {
            let gains = random_gains(3, 6, 200 + seed);
            let base = greedy_sum_rate_eval(&gains, &[], 2, 0.3);
            for k in [0.25, 8.0, 1024.0] {
                let scaled: Vec<GainMatrix> = gains.iter().map(|g| g.map(|v| v * k)).collect();
                let t = greedy_sum_rate_eval(&scaled, &[], 2, 0.3 * k);
                assert_eq!(t.argmax(), base.argmax());
                for (a, b) in t.values().iter().zip(base.values()) {
                    assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300));
                }
            }
            let k = 3.7;
            let scaled: Vec<GainMatrix> = gains.iter().map(|g| g.map(|v| v * k)).collect();
            let t = greedy_sum_rate_eval(&scaled, &[], 2, 0.3 * k);
            for (a, b) in t.values().iter().zip(base.values()) {
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300));
            }
        }
    }

    struct Fixture {
        cfg: ScenarioConfig,
        cbs: Codebooks,
        beliefs: Vec<BeliefSet>,
    }

    fn fixture(k: usize, n: usize, radii: &[f64], r_cl: f64, seed: u64) -> Fixture {
        let mut cfg = ScenarioConfig::desk();
        cfg.num_ues = k;
        cfg.n_bs = n;
        cfg.n_ue = n;
        cfg.m_bs = n;
        cfg.m_ue = n;
        cfg.cluster_radius = r_cl;
        let cbs = Codebooks::for_scenario(&cfg);
        let mut rng = rng_from(seed);
        let truth = sample_scenario(&cfg, &mut rng);
        let em = ErrorModel::per_observer(cfg.num_paths, radii, 0.0);
        let beliefs = build_beliefs(&truth, &em, &mut rng);
        Fixture { cfg, cbs, beliefs }
    }

    impl Fixture {
        fn setup(&self, seed: u64) -> SelectionSetup<'_> {
            SelectionSetup { config: &self.cfg, codebooks: &self.cbs, mc_iterations: 8, seed }
        }

        fn ctx(&self, u: usize, seed: u64) -> SelectionContext<'_> {
            SelectionContext::new(u, &self.beliefs, self.setup(seed)).unwrap()
        }
    }

    #[test]
    fn hierarchy_hides_more_informed_beliefs() {
        let f = fixture(3, 8, &[0.0, 1.0, 2.0], 7.0, 50);
        let ctx = f.ctx(1, 0);
        assert!(ctx.belief_of(0).is_none());
        assert_eq!(ctx.belief_of(1).unwrap().observer, 1);
        assert_eq!(ctx.belief_of(2).unwrap().observer, 2);
        assert!(ctx.belief_of(3).is_none());
        assert_eq!(ctx.for_ue(2).own_belief().observer, 2);
    }

    #[test]
    fn uncoordinated_on_grid() {
        let cfg = ScenarioConfig { num_ues: 1, num_paths: 1, path_power_profile: vec![1.0], ..ScenarioConfig::desk() };
        let cbs = Codebooks::for_scenario(&cfg);
        let a = cbs.bs.grid_angles[4];
        let truth = vec![PositionMatrix { bs: Point2::ORIGIN, reflectors: vec![], ue: Point2::new(90.0 * a.cos(), 90.0 * a.sin()) }];
        let beliefs = build_beliefs(&truth, &ErrorModel::zero(1, 1), &mut rng_from(0));
        let setup = SelectionSetup { config: &cfg, codebooks: &cbs, mc_iterations: 4, seed: 0 };
        let ctx = SelectionContext::new(0, &beliefs, setup).unwrap();
        assert_eq!(select_uncoordinated(&ctx).unwrap(), BeamPair::new(4, 11));
    }

    #[test]
    fn uncoordinated_off_grid_picks_nearest_cosines() {
        let cfg = ScenarioConfig {
            num_ues: 1,
            num_paths: 1,
            path_power_profile: vec![1.0],
            ..ScenarioConfig::paper()
        };
        let cbs = Codebooks::for_scenario(&cfg);
        let mut rng = rng_from(51);
        for _ in 0..50 {
            let truth = sample_scenario(&cfg, &mut rng);
            let beliefs = build_beliefs(&truth, &ErrorModel::zero(1, 1), &mut rng);
            let setup = SelectionSetup { config: &cfg, codebooks: &cbs, mc_iterations: 1, seed: 0 };
            let got = select_uncoordinated(&SelectionContext::new(0, &beliefs, setup).unwrap()).unwrap();
            // exhaustive search for the pair with nearest grid cosines
            let aoa = truth[0].bs.bearing_to(truth[0].ue).cos();
            let aod = truth[0].ue.bearing_to(truth[0].bs).cos();
            let (bc, uc) = (cbs.bs.grid_cosines(), cbs.ue.grid_cosines());
            let mut best = (f64::INFINITY, BeamPair::new(0, 0));
            for q in 0..64 {
                for p in 0..64 {
                    let d = (bc[q] - aoa).abs() + (uc[p] - aod).abs();
                    if d < best.0 {
                        best = (d, BeamPair::new(q, p));
                    }
                }
            }
            assert_eq!(got, best.1);
        }
    }

    #[test]
    fn uncoordinated_tie_prefers_smallest_pair() {
        // mirror-image reflectors with equal power and a blocked LoS
        let cfg = ScenarioConfig { num_ues: 1, path_power_profile: vec![0.0, 0.5, 0.5], ..ScenarioConfig::desk() };
        let cbs = Codebooks::for_scenario(&cfg);
        let truth = vec![PositionMatrix {
            bs: Point2::ORIGIN,
            reflectors: vec![Point2::new(40.0, 50.0), Point2::new(-40.0, 50.0)],
            ue: Point2::new(0.0, 100.0),
        }];
        let beliefs = build_beliefs(&truth, &ErrorModel::zero(1, 3), &mut rng_from(0));
        let setup = SelectionSetup { config: &cfg, codebooks: &cbs, mc_iterations: 1, seed: 0 };
        let got = select_uncoordinated(&SelectionContext::new(0, &beliefs, setup).unwrap()).unwrap();
        let g = gain_matrix_analytic(&truth[0], &cfg.path_power_profile, &cbs.ue, &cbs.bs).unwrap();
        let mirror = BeamPair::new(15 - got.bs, 15 - got.ue);
        assert!((g.get(got.bs, got.ue) - g.get(mirror.bs, mirror.ue)).abs() < 1e-9 * g.max());
        assert!(got.bs <= mirror.bs, "{got:?} vs {mirror:?}");
    }

    #[test]
    fn last_ue_has_empty_chain() {
        let f = fixture(3, 8, &[0.0, 2.0, 4.0], 7.0, 52);
        for s in StrategyKind::ALL {
            assert!(predict_chain(&f.ctx(2, 9), s).unwrap().is_empty());
        }
    }

    #[test]
    fn chain_replays_actual_decisions() {
        for seed in 0..5 {
            let f = fixture(3, 8, &[1.0, 3.0, 6.0], 5.0, 60 + seed);
            for s in StrategyKind::ALL {
                let all = select_all(&f.beliefs, f.setup(seed), s).unwrap();
                for u in 0..3 {
                    let ctx = f.ctx(u, seed);
                    let chain = predict_chain(&ctx, s).unwrap();
                    assert_eq!(chain, all.pairs()[u + 1..].to_vec());
                    assert_eq!(predict_chain(&ctx, s).unwrap(), chain);
                    assert_eq!(select(&ctx, s).unwrap(), all.pairs()[u]);
                }
                // UE 1's own decision, computed in isolation
                let alone = select(&f.ctx(1, seed), s).unwrap();
                assert_eq!(predict_chain(&f.ctx(0, seed), s).unwrap()[0], alone);
            }
        }
    }

    #[test]
    fn robust_collapses_to_naive_without_errors() {
        for seed in 0..10 {
            let f = fixture(2, 8, &[0.0, 0.0], 3.0, 70 + seed);
            let naive = select_all(&f.beliefs, f.setup(seed), StrategyKind::Naive).unwrap();
            let robust = select_all(&f.beliefs, f.setup(seed), StrategyKind::Robust).unwrap();
            assert_eq!(naive, robust);
        }
    }

    #[test]
    fn single_ue_coordination_reduces_to_own_argmax() {
        for seed in 0..20 {
            let f = fixture(1, 16, &[0.0], 7.0, 80 + seed);
            let unc = select_all(&f.beliefs, f.setup(seed), StrategyKind::Uncoordinated).unwrap();
            for s in [StrategyKind::Naive, StrategyKind::Robust] {
                assert_eq!(select_all(&f.beliefs, f.setup(seed), s).unwrap(), unc, "{s}");
            }
        }
    }

    #[test]
    fn naive_matches_exhaustive_oracle() {
        // most informed UE with UE 1's decision known: exhaustive argmax of
        // log2(1 + G0[q,p] / (G1[q, p1] + σ²)) over all pairs
        for seed in 0..20 {
            let f = fixture(2, 8, &[0.0, 0.0], 2.0, 90 + seed);
            let ctx = f.ctx(0, seed);
            let d1 = select(&f.ctx(1, seed), StrategyKind::Naive).unwrap();
            let got = select(&ctx, StrategyKind::Naive).unwrap();
            let prof = &f.cfg.path_power_profile;
            let g0 = gain_matrix_analytic(&f.beliefs[0].estimates[0], prof, &f.cbs.ue, &f.cbs.bs).unwrap();
            let g1 = gain_matrix_analytic(&f.beliefs[0].estimates[1], prof, &f.cbs.ue, &f.cbs.bs).unwrap();
            let noise = f.cfg.noise_power;
            let score = |q: usize, p: usize| (1.0 + g0.get(q, p) / (g1.get(q, d1.ue) + noise)).log2();
            let mut best = (f64::NEG_INFINITY, BeamPair::new(0, 0));
            for q in 0..8 {
                for p in 0..8 {
                    if score(q, p) > best.0 {
                        best = (score(q, p), BeamPair::new(q, p));
                    }
                }
            }
            assert_eq!(got, best.1);
            let unc = select_uncoordinated(&ctx).unwrap();
            if got != unc {
                assert!(score(got.bs, got.ue) > score(unc.bs, unc.ue));
            }
        }
    }

    #[test]
    fn selection_is_deterministic() {
        let f = fixture(2, 8, &[1.0, 4.0], 7.0, 99);
        for s in StrategyKind::ALL {
            let a = select_all(&f.beliefs, f.setup(5), s).unwrap();
            let b = select_all(&f.beliefs, f.setup(5), s).unwrap();
            assert_eq!(a, b);
            a.validate(&f.cbs).unwrap();
        }
    }

    #[test]
    fn rejects_inconsistent_contexts() {
        let f = fixture(2, 8, &[0.0, 0.0], 7.0, 1);
        assert!(SelectionContext::new(2, &f.beliefs, f.setup(0)).is_err());
        let mut setup = f.setup(0);
        setup.mc_iterations = 0;
        assert!(SelectionContext::new(0, &f.beliefs, setup).is_err());
        let swapped = vec![f.beliefs[1].clone(), f.beliefs[0].clone()];
        assert!(SelectionContext::new(0, &swapped, f.setup(0)).is_err());
    }
}

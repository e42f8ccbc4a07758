//! Equivalence-class discretization and exact forward mean-field evolution.
//!
//! The agent continuum `[0,1]` is partitioned into `M` equal-measure classes,
//! each solved at a representative index. Policies and mean fields are stored
//! per class and per time step. The forward evolution is synchronous: within
//! a time step every class reads the same snapshot of the population, so the
//! result does not depend on class processing order or worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::env::{GameModel, NeighborhoodMeanField};
use crate::graphon::Graphon;

/// Placement of the `M` class representatives in `[0,1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridScheme {
    /// Interval midpoints `(m − 1/2)/M`, `m = 1..M`; the default.
    Midpoint,
    /// Evenly spaced including both ends, `(m − 1)/(M − 1)`, `m = 1..M`.
    Endpoint,
}

/// A partition of `[0,1]` into `M` equal-measure classes with one
/// representative index per class.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassGrid {
    representatives: Vec<f64>,
}

impl ClassGrid {
    /// Midpoint grid with `m` classes.
    pub fn uniform(m: usize) -> Self {
        Self::with_scheme(m, GridScheme::Midpoint)
    }

    /// Grid with `m` classes under the given placement scheme.
    ///
    /// A single class is represented by `0.5` under either scheme.
    pub fn with_scheme(m: usize, scheme: GridScheme) -> Self {
        assert!(m >= 1, "need at least one class");
        let representatives = match scheme {
            _ if m == 1 => vec![0.5],
            GridScheme::Midpoint => (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect(),
            GridScheme::Endpoint => (0..m).map(|i| i as f64 / (m - 1) as f64).collect(),
        };
        Self { representatives }
    }

    /// Builds a grid from explicit representatives (strictly increasing,
    /// inside `[0,1]`).
    pub fn from_representatives(representatives: Vec<f64>) -> Self {
        assert!(!representatives.is_empty());
        assert!(
            representatives.windows(2).all(|w| w[0] < w[1])
                && representatives.iter().all(|a| (0.0..=1.0).contains(a)),
            "representatives must be strictly increasing inside [0,1]"
        );
        Self { representatives }
    }

    pub fn num_classes(&self) -> usize {
        self.representatives.len()
    }

    pub fn representatives(&self) -> &[f64] {
        &self.representatives
    }

    /// Quadrature weight of each class.
    pub fn class_measure(&self) -> f64 {
        1.0 / self.num_classes() as f64
    }

    /// Index of the class whose representative is nearest to `alpha`;
    /// ties break toward the lower class index.
    pub fn nearest_class(&self, alpha: f64) -> usize {
        let reps = &self.representatives;
        let idx = reps.partition_point(|&r| r < alpha);
        if idx == 0 {
            return 0;
        }
        if idx == reps.len() {
            return reps.len() - 1;
        }
        let d_lo = alpha - reps[idx - 1];
        let d_hi = reps[idx] - alpha;
        if d_lo <= d_hi {
            idx - 1
        } else {
            idx
        }
    }
}

/// Per-class, per-time, per-state action distributions.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyEnsemble {
    grid: ClassGrid,
    num_states: usize,
    num_actions: usize,
    horizon: usize,
    probs: Vec<f64>, // [class][t][state][action]
}

impl PolicyEnsemble {
    /// Uniformly random policy for every class, time and state.
    pub fn uniform(grid: ClassGrid, num_states: usize, num_actions: usize, horizon: usize) -> Self {
        let p = 1.0 / num_actions as f64;
        let probs = vec![p; grid.num_classes() * horizon * num_states * num_actions];
        Self {
            grid,
            num_states,
            num_actions,
            horizon,
            probs,
        }
    }

    /// Builds a policy from a function returning the action distribution at
    /// `(class, t, state)`.
    pub fn from_fn(
        grid: ClassGrid,
        num_states: usize,
        num_actions: usize,
        horizon: usize,
        mut f: impl FnMut(usize, usize, usize) -> Vec<f64>,
    ) -> Self {
        let m = grid.num_classes();
        let mut probs = Vec::with_capacity(m * horizon * num_states * num_actions);
        for class in 0..m {
            for t in 0..horizon {
                for x in 0..num_states {
                    let row = f(class, t, x);
                    assert_eq!(row.len(), num_actions);
                    debug_assert!(
                        (row.iter().sum::<f64>() - 1.0).abs() <= 1e-12
                            && row.iter().all(|&p| p >= 0.0),
                        "action distribution must be a probability vector"
                    );
                    probs.extend_from_slice(&row);
                }
            }
        }
        Self {
            grid,
            num_states,
            num_actions,
            horizon,
            probs,
        }
    }

    /// Deterministic policy selecting `f(class, t, state)`.
    pub fn deterministic(
        grid: ClassGrid,
        num_states: usize,
        num_actions: usize,
        horizon: usize,
        mut f: impl FnMut(usize, usize, usize) -> usize,
    ) -> Self {
        Self::from_fn(grid, num_states, num_actions, horizon, |m, t, x| {
            let mut row = vec![0.0; num_actions];
            row[f(m, t, x)] = 1.0;
            row
        })
    }

    pub fn grid(&self) -> &ClassGrid {
        &self.grid
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Action distribution at `(class, t, state)`.
    pub fn action_row(&self, class: usize, t: usize, x: usize) -> &[f64] {
        let base = ((class * self.horizon + t) * self.num_states + x) * self.num_actions;
        &self.probs[base..base + self.num_actions]
    }

    pub(crate) fn from_raw(
        grid: ClassGrid,
        num_states: usize,
        num_actions: usize,
        horizon: usize,
        probs: Vec<f64>,
    ) -> Self {
        assert_eq!(
            probs.len(),
            grid.num_classes() * horizon * num_states * num_actions
        );
        Self {
            grid,
            num_states,
            num_actions,
            horizon,
            probs,
        }
    }
}

/// Per-class, per-time state marginals.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanFieldEnsemble {
    grid: ClassGrid,
    num_states: usize,
    horizon: usize,
    marginals: Vec<f64>, // [class][t][state]
}

impl MeanFieldEnsemble {
    /// Builds an ensemble from a function returning the state marginal at
    /// `(class, t)`.
    pub fn from_fn(
        grid: ClassGrid,
        num_states: usize,
        horizon: usize,
        mut f: impl FnMut(usize, usize) -> Vec<f64>,
    ) -> Self {
        let m = grid.num_classes();
        let mut marginals = Vec::with_capacity(m * horizon * num_states);
        for class in 0..m {
            for t in 0..horizon {
                let row = f(class, t);
                assert_eq!(row.len(), num_states);
                marginals.extend_from_slice(&row);
            }
        }
        Self {
            grid,
            num_states,
            horizon,
            marginals,
        }
    }

    pub fn grid(&self) -> &ClassGrid {
        &self.grid
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// Number of stored time slices (`T`; marginals exist for `t = 0..T`).
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// State marginal of `class` at time `t`.
    pub fn marginal(&self, class: usize, t: usize) -> &[f64] {
        let base = (class * self.horizon + t) * self.num_states;
        &self.marginals[base..base + self.num_states]
    }

    fn marginal_mut(&mut self, class: usize, t: usize) -> &mut [f64] {
        let base = (class * self.horizon + t) * self.num_states;
        &mut self.marginals[base..base + self.num_states]
    }

    /// Supremum distance `max |a − b|` over all `(class, t, state)` entries.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.marginals.len(), other.marginals.len());
        self.marginals
            .iter()
            .zip(&other.marginals)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Evaluates the discretized neighborhood mean field
/// `(1/M) Σ_m W(α, α_m) · μ_m(t)` felt by an agent at index `alpha`.
pub fn neighborhood_mf(
    g: &Graphon,
    mf: &MeanFieldEnsemble,
    alpha: f64,
    t: usize,
) -> NeighborhoodMeanField {
    let weights: Vec<f64> = mf
        .grid
        .representatives()
        .iter()
        .map(|&rep| g.eval(alpha, rep))
        .collect();
    let mut out = NeighborhoodMeanField::zero(mf.num_states);
    accumulate_neighborhood(&weights, mf, t, out.masses_mut());
    out
}

/// Shared kernel for the neighborhood aggregate; every consumer sums classes
/// in index order so identical inputs give bit-identical outputs.
pub(crate) fn accumulate_neighborhood(
    weights: &[f64],
    mf: &MeanFieldEnsemble,
    t: usize,
    out: &mut [f64],
) {
    out.fill(0.0);
    for (n, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (o, &mass) in out.iter_mut().zip(mf.marginal(n, t)) {
            *o += w * mass;
        }
    }
    let inv_m = mf.grid.class_measure();
    for o in out.iter_mut() {
        *o *= inv_m;
    }
}

/// Same aggregate computed from a flat `[class][state]` snapshot instead of
/// a full ensemble; used inside the forward evolution.
fn accumulate_neighborhood_snapshot(
    weights: &[f64],
    snapshot: &[f64],
    num_states: usize,
    inv_m: f64,
    out: &mut [f64],
) {
    out.fill(0.0);
    for (n, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let row = &snapshot[n * num_states..(n + 1) * num_states];
        for (o, &mass) in out.iter_mut().zip(row) {
            *o += w * mass;
        }
    }
    for o in out.iter_mut() {
        *o *= inv_m;
    }
}

pub(crate) fn class_weight_matrix(g: &Graphon, grid: &ClassGrid) -> Vec<f64> {
    let reps = grid.representatives();
    let m = reps.len();
    let mut w = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            w[i * m + j] = g.eval(reps[i], reps[j]);
        }
    }
    w
}

/// One class's synchronous step: `μ'(x') = Σ_x μ(x) Σ_u π(u|x) P(x'|x,u,G)`.
fn advance_class(
    model: &dyn GameModel,
    pol: &PolicyEnsemble,
    class: usize,
    t: usize,
    cur: &[f64],
    g: &NeighborhoodMeanField,
    next: &mut [f64],
    trans: &mut [f64],
) {
    next.fill(0.0);
    for (x, &mass) in cur.iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        for (u, &p_u) in pol.action_row(class, t, x).iter().enumerate() {
            if p_u == 0.0 {
                continue;
            }
            model.transition(x, u, g, trans);
            let w = mass * p_u;
            for (n, &p) in next.iter_mut().zip(trans.iter()) {
                *n += w * p;
            }
        }
    }
}

fn forward_step(
    model: &dyn GameModel,
    pol: &PolicyEnsemble,
    weights: &[f64],
    snapshot: &[f64],
    t: usize,
    next: &mut [f64],
    parallel: ForwardExec,
) {
    let num_states = model.num_states();
    let m_count = pol.grid.num_classes();
    let inv_m = pol.grid.class_measure();

    let class_body = |class: usize, next_row: &mut [f64]| {
        let mut g = NeighborhoodMeanField::zero(num_states);
        accumulate_neighborhood_snapshot(
            &weights[class * m_count..(class + 1) * m_count],
            snapshot,
            num_states,
            inv_m,
            g.masses_mut(),
        );
        let mut trans = vec![0.0; num_states];
        let cur = &snapshot[class * num_states..(class + 1) * num_states];
        advance_class(model, pol, class, t, cur, &g, next_row, &mut trans);
    };

    match parallel {
        ForwardExec::Sequential => {
            for (class, next_row) in next.chunks_mut(num_states).enumerate() {
                class_body(class, next_row);
            }
        }
        #[cfg(feature = "parallel")]
        ForwardExec::Parallel => {
            next.par_chunks_mut(num_states)
                .enumerate()
                .for_each(|(class, next_row)| class_body(class, next_row));
        }
    }
}

#[derive(Clone, Copy)]
enum ForwardExec {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

fn forward_simulate_impl(
    model: &dyn GameModel,
    g: &Graphon,
    pol: &PolicyEnsemble,
    exec: ForwardExec,
) -> MeanFieldEnsemble {
    let horizon = model.horizon();
    assert_eq!(pol.horizon, horizon, "policy horizon mismatch");
    assert_eq!(pol.num_states, model.num_states());
    assert_eq!(pol.num_actions, model.num_actions());
    let num_states = model.num_states();
    let m_count = pol.grid.num_classes();
    let weights = class_weight_matrix(g, &pol.grid);

    let mu0 = model.initial_distribution().to_vec();
    let mut mf = MeanFieldEnsemble {
        grid: pol.grid.clone(),
        num_states,
        horizon,
        marginals: vec![0.0; m_count * horizon * num_states],
    };
    for class in 0..m_count {
        mf.marginal_mut(class, 0).copy_from_slice(&mu0);
    }

    let mut snapshot = vec![0.0; m_count * num_states];
    let mut next = vec![0.0; m_count * num_states];
    for t in 0..horizon.saturating_sub(1) {
        for class in 0..m_count {
            snapshot[class * num_states..(class + 1) * num_states]
                .copy_from_slice(mf.marginal(class, t));
        }
        forward_step(model, pol, &weights, &snapshot, t, &mut next, exec);
        for class in 0..m_count {
            mf.marginal_mut(class, t + 1)
                .copy_from_slice(&next[class * num_states..(class + 1) * num_states]);
        }
    }
    mf
}

/// Exact forward evolution of the mean-field ensemble induced by `pol`.
///
/// All classes advance synchronously from the time-`t` snapshot; no sampling
/// and no renormalization are involved, so probability conservation is a
/// checkable invariant rather than an enforced one. Parallelizes over
/// classes within a time step when the `parallel` feature is enabled.
pub fn forward_simulate(model: &dyn GameModel, g: &Graphon, pol: &PolicyEnsemble) -> MeanFieldEnsemble {
    #[cfg(feature = "parallel")]
    {
        forward_simulate_impl(model, g, pol, ForwardExec::Parallel)
    }
    #[cfg(not(feature = "parallel"))]
    {
        forward_simulate_impl(model, g, pol, ForwardExec::Sequential)
    }
}

/// Always-sequential forward evolution; same result as [`forward_simulate`].
pub fn forward_simulate_seq(
    model: &dyn GameModel,
    g: &Graphon,
    pol: &PolicyEnsemble,
) -> MeanFieldEnsemble {
    forward_simulate_impl(model, g, pol, ForwardExec::Sequential)
}

/// Assignment of finite agents to equivalence classes: agent `i` plays the
/// policy of the class whose representative is nearest to its graphon index.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedPolicy {
    classes: Vec<usize>,
}

impl LiftedPolicy {
    pub fn num_agents(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, agent: usize) -> usize {
        self.classes[agent]
    }

    /// Action distribution agent `agent` plays at `(t, x)`.
    pub fn action_row<'a>(&self, pol: &'a PolicyEnsemble, agent: usize, t: usize, x: usize) -> &'a [f64] {
        pol.action_row(self.classes[agent], t, x)
    }
}

/// Lifts a policy ensemble onto finite agents with the given graphon
/// indices (nearest-representative assignment, ties toward the lower class).
pub fn lift_policy_gamma_n(pol: &PolicyEnsemble, alphas: &[f64]) -> LiftedPolicy {
    LiftedPolicy {
        classes: alphas.iter().map(|&a| pol.grid.nearest_class(a)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{investment_graphon_model, sis_graphon_model, GameModel, SIS_I, SIS_U, INVEST_O};
    use crate::graphon::Graphon;
    use proptest::prelude::*;

    #[test]
    fn uniform_grid_midpoints() {
        assert_eq!(ClassGrid::uniform(1).representatives(), &[0.5]);
        assert_eq!(ClassGrid::uniform(2).representatives(), &[0.25, 0.75]);
        assert_eq!(
            ClassGrid::uniform(4).representatives(),
            &[0.125, 0.375, 0.625, 0.875]
        );
    }

    #[test]
    fn endpoint_grid_covers_both_ends() {
        let g = ClassGrid::with_scheme(101, GridScheme::Endpoint);
        assert_eq!(g.representatives()[0], 0.0);
        assert_eq!(g.representatives()[100], 1.0);
        assert!((g.representatives()[37] - 0.37).abs() < 1e-15);
    }

    #[test]
    fn nearest_class_breaks_ties_low() {
        let grid = ClassGrid::uniform(2);
        assert_eq!(grid.nearest_class(0.1), 0);
        assert_eq!(grid.nearest_class(0.5), 0);
        assert_eq!(grid.nearest_class(0.51), 1);
        let grid = ClassGrid::uniform(100);
        assert_eq!(grid.nearest_class(0.999), 99);
        assert_eq!(grid.nearest_class(0.0), 0);
        assert_eq!(grid.nearest_class(1.0), 99);
    }

    fn constant_mf(grid: ClassGrid, row: Vec<f64>, horizon: usize) -> MeanFieldEnsemble {
        MeanFieldEnsemble::from_fn(grid, row.len(), horizon, |_, _| row.clone())
    }

    #[test]
    fn neighborhood_mf_er_half() {
        let g = Graphon::erdos_renyi(0.5).unwrap();
        let mf = constant_mf(ClassGrid::uniform(7), vec![0.5, 0.5], 3);
        for alpha in [0.0, 0.3, 1.0] {
            let nb = neighborhood_mf(&g, &mf, alpha, 1);
            assert!((nb.mass(0) - 0.25).abs() < 1e-15);
            assert!((nb.mass(1) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn neighborhood_mf_zero_cases() {
        let mf = constant_mf(ClassGrid::uniform(5), vec![0.5, 0.5], 2);
        let er0 = Graphon::erdos_renyi(0.0).unwrap();
        assert_eq!(neighborhood_mf(&er0, &mf, 0.4, 0).total_mass(), 0.0);
        // W_unif(1, y) = 0 for every y
        let unif = Graphon::uniform_attachment();
        assert_eq!(neighborhood_mf(&unif, &mf, 1.0, 0).total_mass(), 0.0);
    }

    #[test]
    fn forward_simulate_sis_stationary_at_half() {
        let model = sis_graphon_model();
        let g = Graphon::erdos_renyi(0.5).unwrap();
        let pol = PolicyEnsemble::deterministic(ClassGrid::uniform(4), 2, 2, 50, |_, _, _| SIS_U);
        let mf = forward_simulate(&model, &g, &pol);
        for class in 0..4 {
            for t in 0..50 {
                assert!(
                    (mf.marginal(class, t)[SIS_I] - 0.5).abs() < 1e-12,
                    "class {class} t {t}: {}",
                    mf.marginal(class, t)[SIS_I]
                );
            }
        }
    }

    #[test]
    fn forward_simulate_sis_recovery_chain() {
        // no edges, no infections: μ_t(I) = 0.5 · 0.8^t
        let model = sis_graphon_model();
        let g = Graphon::erdos_renyi(0.0).unwrap();
        let pol = PolicyEnsemble::uniform(ClassGrid::uniform(3), 2, 2, 50);
        let mf = forward_simulate(&model, &g, &pol);
        let mut expect = 0.5;
        for t in 0..50 {
            assert!((mf.marginal(1, t)[SIS_I] - expect).abs() < 1e-12, "t {t}");
            expect *= 0.8;
        }
    }

    #[test]
    fn forward_simulate_investment_opt_out_stays_at_zero() {
        let model = investment_graphon_model();
        let g = Graphon::uniform_attachment();
        let pol = PolicyEnsemble::deterministic(ClassGrid::uniform(3), 10, 2, 50, |_, _, _| INVEST_O);
        let mf = forward_simulate(&model, &g, &pol);
        for class in 0..3 {
            for t in 0..50 {
                assert_eq!(mf.marginal(class, t)[0], 1.0);
                assert!(mf.marginal(class, t)[1..].iter().all(|&p| p == 0.0));
            }
        }
    }

    #[test]
    fn er_marginals_identical_across_classes() {
        let model = sis_graphon_model();
        let g = Graphon::erdos_renyi(0.37).unwrap();
        let pol = PolicyEnsemble::from_fn(ClassGrid::uniform(9), 2, 2, 50, |_, t, x| {
            // class-independent but time/state dependent
            let p = 0.2 + 0.5 * ((t + x) % 2) as f64;
            vec![p, 1.0 - p]
        });
        let mf = forward_simulate(&model, &g, &pol);
        for class in 1..9 {
            for t in 0..50 {
                assert_eq!(mf.marginal(class, t), mf.marginal(0, t), "class {class} t {t}");
            }
        }
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let model = investment_graphon_model();
        let g = Graphon::ranked_attachment();
        let pol = PolicyEnsemble::from_fn(ClassGrid::uniform(11), 10, 2, 50, |m, t, x| {
            let p = 1.0 / (2.0 + ((m + t + x) % 3) as f64);
            vec![p, 1.0 - p]
        });
        let seq = forward_simulate_seq(&model, &g, &pol);
        let any = forward_simulate(&model, &g, &pol);
        assert_eq!(seq, any);
    }

    /// Reference forward step that visits classes (and neighborhood terms)
    /// in an arbitrary order; used to check that the synchronous update does
    /// not depend on processing order beyond float associativity.
    fn forward_reference_permuted(
        model: &dyn GameModel,
        g: &Graphon,
        pol: &PolicyEnsemble,
        perm: &[usize],
    ) -> Vec<Vec<f64>> {
        let m_count = pol.grid().num_classes();
        let num_states = model.num_states();
        let horizon = model.horizon();
        let reps = pol.grid().representatives();
        let mut cur: Vec<Vec<f64>> = vec![model.initial_distribution().to_vec(); m_count];
        let mut all = vec![cur.clone()];
        let mut trans = vec![0.0; num_states];
        for t in 0..horizon - 1 {
            let mut next = vec![vec![0.0; num_states]; m_count];
            for &class in perm {
                // neighborhood aggregate, summed in permuted class order
                let mut masses = vec![0.0; num_states];
                for &n in perm {
                    let w = g.eval(reps[class], reps[n]);
                    for x in 0..num_states {
                        masses[x] += w * cur[n][x];
                    }
                }
                for e in &mut masses {
                    *e /= m_count as f64;
                }
                let gmf = NeighborhoodMeanField::new(masses);
                for x in 0..num_states {
                    for (u, &p_u) in pol.action_row(class, t, x).iter().enumerate() {
                        model.transition(x, u, &gmf, &mut trans);
                        for x2 in 0..num_states {
                            next[class][x2] += cur[class][x] * p_u * trans[x2];
                        }
                    }
                }
            }
            cur = next;
            all.push(cur.clone());
        }
        // flatten to [t][class][x]
        all.into_iter().flatten().collect()
    }

    #[test]
    fn class_processing_order_does_not_matter() {
        let model = sis_graphon_model();
        let g = Graphon::uniform_attachment();
        let m_count = 6;
        let pol = PolicyEnsemble::from_fn(ClassGrid::uniform(m_count), 2, 2, 50, |m, t, x| {
            let p = 0.3 + 0.05 * m as f64 + 0.1 * ((t + x) % 2) as f64;
            vec![p, 1.0 - p]
        });
        let mf = forward_simulate(&model, &g, &pol);
        let perm: Vec<usize> = vec![3, 0, 5, 1, 4, 2];
        let reference = forward_reference_permuted(&model, &g, &pol, &perm);
        for t in 0..50 {
            for class in 0..m_count {
                let got = mf.marginal(class, t);
                let want = &reference[t * m_count + class];
                for x in 0..2 {
                    assert!(
                        (got[x] - want[x]).abs() <= 1e-12,
                        "class {class} t {t} x {x}: {} vs {}",
                        got[x],
                        want[x]
                    );
                }
            }
        }
    }

    #[test]
    fn lift_policy_examples() {
        let pol = PolicyEnsemble::uniform(ClassGrid::uniform(2), 2, 2, 3);
        let lifted = lift_policy_gamma_n(&pol, &[0.1, 0.5, 0.9]);
        assert_eq!(lifted.class_of(0), 0);
        assert_eq!(lifted.class_of(1), 0);
        assert_eq!(lifted.class_of(2), 1);
        let pol = PolicyEnsemble::uniform(ClassGrid::uniform(100), 2, 2, 3);
        let lifted = lift_policy_gamma_n(&pol, &[0.999]);
        assert_eq!(lifted.class_of(0), 99);
    }

    #[test]
    fn neighborhood_mass_bounded_by_max_weight() {
        let g = Graphon::uniform_attachment();
        let mf = constant_mf(ClassGrid::uniform(8), vec![0.25, 0.75], 2);
        for alpha in [0.0, 0.33, 0.8, 1.0] {
            let max_w = mf
                .grid()
                .representatives()
                .iter()
                .map(|&r| g.eval(alpha, r))
                .fold(0.0, f64::max);
            let nb = neighborhood_mf(&g, &mf, alpha, 0);
            assert!(nb.total_mass() <= max_w + 1e-12);
            assert!(nb.total_mass() <= 1.0 + 1e-12);
        }
    }

    proptest! {
        #[test]
        fn forward_simulate_conserves_probability(
            seed in any::<u64>(),
            m_count in 1usize..8,
            er_p in 0.0..=1.0f64,
        ) {
            use rand::Rng as _;
            let mut rng = crate::rng::rng_from_seed(seed);
            let model = sis_graphon_model();
            let g = Graphon::ErdosRenyi(er_p);
            let pol = PolicyEnsemble::from_fn(ClassGrid::uniform(m_count), 2, 2, 50, |_, _, _| {
                let p: f64 = rng.gen();
                vec![p, 1.0 - p]
            });
            let mf = forward_simulate(&model, &g, &pol);
            for class in 0..m_count {
                for t in 0..50 {
                    let total: f64 = mf.marginal(class, t).iter().sum();
                    prop_assert!((total - 1.0).abs() <= 1e-10);
                    prop_assert!(mf.marginal(class, t).iter().all(|&p| p >= 0.0));
                }
            }
        }
    }
}

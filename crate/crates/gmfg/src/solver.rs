//! Best response computation and the outer fixed-point iteration.
//!
//! For a fixed mean-field ensemble, each equivalence class faces an ordinary
//! finite-horizon MDP: `backwards_induction` solves it exactly,
//! `boltzmann_policy` turns action values into a softmax (or argmax) policy,
//! and `policy_evaluation` scores an arbitrary policy against the same mean
//! field. `fixed_point_solve` alternates best response and forward evolution
//! until the mean field stops moving; `exploitability` measures how far a
//! candidate pair is from an equilibrium.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::env::{GameModel, NeighborhoodMeanField};
use crate::graphon::Graphon;
use crate::meanfield::{
    accumulate_neighborhood, class_weight_matrix, forward_simulate, ClassGrid, MeanFieldEnsemble,
    PolicyEnsemble,
};

/// Per-class action-value tables `Q(t, x, u)` with a zero terminal slice at
/// `t = T`.
#[derive(Clone, Debug, PartialEq)]
pub struct QEnsemble {
    grid: ClassGrid,
    num_states: usize,
    num_actions: usize,
    horizon: usize,
    values: Vec<f64>, // [class][t][state][action], t = 0..=T
}

impl QEnsemble {
    fn zeroed(grid: ClassGrid, num_states: usize, num_actions: usize, horizon: usize) -> Self {
        let len = grid.num_classes() * (horizon + 1) * num_states * num_actions;
        Self {
            grid,
            num_states,
            num_actions,
            horizon,
            values: vec![0.0; len],
        }
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

    /// Action values at `(class, t, x)`; valid for `t = 0..=T`.
    pub fn action_values(&self, class: usize, t: usize, x: usize) -> &[f64] {
        let base = ((class * (self.horizon + 1) + t) * self.num_states + x) * self.num_actions;
        &self.values[base..base + self.num_actions]
    }

    pub fn value(&self, class: usize, t: usize, x: usize, u: usize) -> f64 {
        self.action_values(class, t, x)[u]
    }

    fn class_stride(&self) -> usize {
        (self.horizon + 1) * self.num_states * self.num_actions
    }

    /// Identical tables across all classes (bitwise).
    pub fn classes_identical(&self) -> bool {
        let stride = self.class_stride();
        self.values.chunks(stride).all(|c| c == &self.values[..stride])
    }
}

fn max_value(row: &[f64]) -> f64 {
    row.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// How one class's backup aggregates the next time slice.
enum Backup<'a> {
    Optimal,
    Policy(&'a PolicyEnsemble),
}

fn dp_class(
    model: &dyn GameModel,
    weights_row: &[f64],
    mf: &MeanFieldEnsemble,
    backup: &Backup,
    class: usize,
    slab: &mut [f64],
) {
    let horizon = model.horizon();
    let num_states = model.num_states();
    let num_actions = model.num_actions();
    let mut g = NeighborhoodMeanField::zero(num_states);
    let mut trans = vec![0.0; num_states];
    let mut vnext = vec![0.0; num_states];
    let idx = |t: usize, x: usize, u: usize| (t * num_states + x) * num_actions + u;

    for t in (0..horizon).rev() {
        accumulate_neighborhood(weights_row, mf, t, g.masses_mut());
        for x in 0..num_states {
            let next_row = &slab[idx(t + 1, x, 0)..idx(t + 1, x, 0) + num_actions];
            vnext[x] = match backup {
                Backup::Optimal => max_value(next_row),
                Backup::Policy(pol) => {
                    if t + 1 == horizon {
                        0.0
                    } else {
                        pol.action_row(class, t + 1, x)
                            .iter()
                            .zip(next_row)
                            .map(|(&p, &q)| p * q)
                            .sum()
                    }
                }
            };
        }
        for x in 0..num_states {
            for u in 0..num_actions {
                model.transition(x, u, &g, &mut trans);
                let mut q = model.reward(x, u, &g);
                for (p, v) in trans.iter().zip(&vnext) {
                    q += p * v;
                }
                slab[idx(t, x, u)] = q;
            }
        }
    }
}

fn dp_ensemble(
    model: &dyn GameModel,
    g: &Graphon,
    mf: &MeanFieldEnsemble,
    backup: Backup,
    sequential: bool,
) -> QEnsemble {
    assert_eq!(mf.horizon(), model.horizon(), "mean field horizon mismatch");
    assert_eq!(mf.num_states(), model.num_states());
    if let Backup::Policy(pol) = &backup {
        assert_eq!(pol.grid(), mf.grid(), "policy and mean field grids differ");
        assert_eq!(pol.horizon(), model.horizon());
    }
    let grid = mf.grid().clone();
    let m_count = grid.num_classes();
    let weights = class_weight_matrix(g, &grid);
    let mut q = QEnsemble::zeroed(grid, model.num_states(), model.num_actions(), model.horizon());
    let stride = q.class_stride();

    let body = |class: usize, slab: &mut [f64]| {
        dp_class(
            model,
            &weights[class * m_count..(class + 1) * m_count],
            mf,
            &backup,
            class,
            slab,
        );
    };

    #[cfg(feature = "parallel")]
    if !sequential {
        q.values
            .par_chunks_mut(stride)
            .enumerate()
            .for_each(|(class, slab)| body(class, slab));
        return q;
    }
    let _ = sequential;
    for (class, slab) in q.values.chunks_mut(stride).enumerate() {
        body(class, slab);
    }
    q
}

/// Exact dynamic programming for every class against a fixed mean field:
/// `Q(t,x,u) = r(x,u,G_t) + Σ_x' P(x'|x,u,G_t) max_u' Q(t+1,x',u')` with
/// `Q(T,·,·) = 0`.
pub fn backwards_induction(model: &dyn GameModel, g: &Graphon, mf: &MeanFieldEnsemble) -> QEnsemble {
    dp_ensemble(model, g, mf, Backup::Optimal, false)
}

/// Always-sequential variant of [`backwards_induction`].
pub fn backwards_induction_seq(
    model: &dyn GameModel,
    g: &Graphon,
    mf: &MeanFieldEnsemble,
) -> QEnsemble {
    dp_ensemble(model, g, mf, Backup::Optimal, true)
}

/// Evaluates a fixed policy against a fixed mean field:
/// `Q(t,x,u) = r(x,u,G_t) + Σ_x' P(x'|x,u,G_t) Σ_u' π_{t+1}(u'|x') Q(t+1,x',u')`.
pub fn policy_evaluation(
    model: &dyn GameModel,
    g: &Graphon,
    mf: &MeanFieldEnsemble,
    pol: &PolicyEnsemble,
) -> QEnsemble {
    dp_ensemble(model, g, mf, Backup::Policy(pol), false)
}

/// Always-sequential variant of [`policy_evaluation`].
pub fn policy_evaluation_seq(
    model: &dyn GameModel,
    g: &Graphon,
    mf: &MeanFieldEnsemble,
    pol: &PolicyEnsemble,
) -> QEnsemble {
    dp_ensemble(model, g, mf, Backup::Policy(pol), true)
}

/// Softmax policy `π(u|x) ∝ exp(Q(t,x,u)/η)` with max-subtraction for
/// stability; `η = 0` gives the argmax policy with ties broken toward the
/// lowest action index.
pub fn boltzmann_policy(q: &QEnsemble, eta: f64) -> PolicyEnsemble {
    assert!(eta >= 0.0, "temperature must be nonnegative");
    let m_count = q.grid.num_classes();
    let (horizon, num_states, num_actions) = (q.horizon, q.num_states, q.num_actions);
    let mut probs = Vec::with_capacity(m_count * horizon * num_states * num_actions);
    let mut row_buf = vec![0.0; num_actions];
    for class in 0..m_count {
        for t in 0..horizon {
            for x in 0..num_states {
                let row = q.action_values(class, t, x);
                if eta == 0.0 {
                    let best = row
                        .iter()
                        .enumerate()
                        .fold((0usize, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
                            if v > bv {
                                (i, v)
                            } else {
                                (bi, bv)
                            }
                        })
                        .0;
                    row_buf.fill(0.0);
                    row_buf[best] = 1.0;
                } else {
                    let top = max_value(row);
                    let mut denom = 0.0;
                    for (b, &v) in row_buf.iter_mut().zip(row) {
                        *b = ((v - top) / eta).exp();
                        denom += *b;
                    }
                    for b in row_buf.iter_mut() {
                        *b /= denom;
                    }
                }
                probs.extend_from_slice(&row_buf);
            }
        }
    }
    PolicyEnsemble::from_raw(q.grid.clone(), num_states, num_actions, horizon, probs)
}

/// Average exploitability of a candidate pair `(pol, mf)`:
/// the per-class gap between the best-response value and the value of
/// `pol`, both under `mf`, averaged over classes and the initial
/// distribution. Callers wanting the equilibrium reading must pass the mean
/// field generated by `pol` (`mf = forward_simulate(model, g, pol)`).
pub fn exploitability(
    model: &dyn GameModel,
    g: &Graphon,
    pol: &PolicyEnsemble,
    mf: &MeanFieldEnsemble,
) -> f64 {
    let qstar = backwards_induction(model, g, mf);
    let qpol = policy_evaluation(model, g, mf, pol);
    let mu0 = model.initial_distribution();
    let m_count = mf.grid().num_classes();
    let mut total = 0.0;
    for class in 0..m_count {
        for (x, &mass) in mu0.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let best = max_value(qstar.action_values(class, 0, x));
            let achieved: f64 = pol
                .action_row(class, 0, x)
                .iter()
                .zip(qpol.action_values(class, 0, x))
                .map(|(&p, &q)| p * q)
                .sum();
            total += mass * (best - achieved);
        }
    }
    total / m_count as f64
}

/// Knobs for [`fixed_point_solve`] beyond the convergence parameters.
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Record the exploitability of `(π^k, μ^k)` at every iteration.
    pub record_exploitability: bool,
    /// Stop as soon as the residual drops below `tol`. Disabled by the
    /// temperature sweep, which needs a fixed iteration count.
    pub stop_early: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            record_exploitability: false,
            stop_early: true,
        }
    }
}

/// Outcome of the fixed-point iteration.
#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub converged: bool,
    /// Sup-distance between consecutive mean-field iterates, one entry per
    /// iteration.
    pub residual_history: Vec<f64>,
    pub exploitability_history: Option<Vec<f64>>,
    #[serde(skip)]
    pub final_policy: PolicyEnsemble,
    #[serde(skip)]
    pub final_mean_field: MeanFieldEnsemble,
}

/// Fixed-point iteration: starting from the mean field induced by the
/// uniformly random policy, alternate Boltzmann best response and exact
/// forward evolution until the mean field moves less than `tol` in
/// sup-distance or `max_iters` iterations have run. Non-convergence is
/// reported through the `converged` flag, not an error.
pub fn fixed_point_solve(
    model: &dyn GameModel,
    g: &Graphon,
    grid: &ClassGrid,
    eta: f64,
    max_iters: usize,
    tol: f64,
    opts: SolveOptions,
) -> SolveReport {
    assert!(max_iters >= 1, "need at least one iteration");
    assert!(tol > 0.0, "tolerance must be positive");
    let (num_states, num_actions, horizon) =
        (model.num_states(), model.num_actions(), model.horizon());

    let mut pol = PolicyEnsemble::uniform(grid.clone(), num_states, num_actions, horizon);
    let mut mu_prev = forward_simulate(model, g, &pol);
    let mut residual_history = Vec::new();
    let mut exploitability_history = opts.record_exploitability.then(Vec::new);
    let mut converged = false;

    for _ in 0..max_iters {
        let q = backwards_induction(model, g, &mu_prev);
        pol = boltzmann_policy(&q, eta);
        let mu = forward_simulate(model, g, &pol);
        let residual = mu.sup_distance(&mu_prev);
        residual_history.push(residual);
        if let Some(history) = exploitability_history.as_mut() {
            history.push(exploitability(model, g, &pol, &mu));
        }
        mu_prev = mu;
        converged = residual < tol;
        if converged && opts.stop_early {
            break;
        }
    }

    SolveReport {
        iterations: residual_history.len(),
        converged,
        residual_history,
        exploitability_history,
        final_policy: pol,
        final_mean_field: mu_prev,
    }
}

/// One row of a temperature sweep: exploitability statistics over the last
/// 10 iterations at a given temperature.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepRow {
    pub eta: f64,
    pub mean_expl: f64,
    pub min_expl: f64,
    pub max_expl: f64,
}

/// Runs the fixed-point iteration for `iters` iterations (no early stop) at
/// each temperature and aggregates the exploitability over the last 10
/// iterations. Output rows preserve the input temperature order.
pub fn temperature_sweep(
    model: &dyn GameModel,
    g: &Graphon,
    grid: &ClassGrid,
    etas: &[f64],
    iters: usize,
    tol: f64,
) -> Vec<SweepRow> {
    assert!(iters >= 10, "sweep aggregates the last 10 iterations");
    etas.iter()
        .map(|&eta| {
            let report = fixed_point_solve(
                model,
                g,
                grid,
                eta,
                iters,
                tol,
                SolveOptions {
                    record_exploitability: true,
                    stop_early: false,
                },
            );
            let history = report
                .exploitability_history
                .as_ref()
                .expect("exploitability recorded");
            let tail = &history[history.len() - 10..];
            SweepRow {
                eta,
                mean_expl: tail.iter().sum::<f64>() / tail.len() as f64,
                min_expl: tail.iter().copied().fold(f64::INFINITY, f64::min),
                max_expl: tail.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect()
}

//! Game model interface and the two benchmark games.
//!
//! A game is a finite-horizon controlled Markov chain whose transition kernel
//! and reward are coupled to the population through a neighborhood mean
//! field: the graphon-weighted, generally sub-probability aggregate of
//! neighbor state distributions. States and actions are encoded as `usize`
//! indices; the encodings used by the benchmark games are documented on
//! their constructors and fixed so that CSV outputs are unambiguous.

/// A sub-probability measure over states: entrywise in `[0,1]` with total
/// mass at most `1` (up to float slack).
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborhoodMeanField {
    masses: Vec<f64>,
}

impl NeighborhoodMeanField {
    pub fn new(masses: Vec<f64>) -> Self {
        debug_assert!(
            masses.iter().all(|&m| (-1e-12..=1.0 + 1e-9).contains(&m)),
            "mass entry outside [0,1]: {masses:?}"
        );
        debug_assert!(
            masses.iter().sum::<f64>() <= 1.0 + 1e-9,
            "total mass above 1: {masses:?}"
        );
        Self { masses }
    }

    /// The zero measure over `num_states` states.
    pub fn zero(num_states: usize) -> Self {
        Self {
            masses: vec![0.0; num_states],
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Mass on state `x`.
    pub fn mass(&self, x: usize) -> f64 {
        self.masses[x]
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub(crate) fn masses_mut(&mut self) -> &mut [f64] {
        &mut self.masses
    }
}

/// A finite-horizon game with mean-field-coupled dynamics.
///
/// `transition` and `reward` must be pure functions; implementations are
/// immutable and safe to share across threads. `transition` writes a
/// probability vector over next states into `out` (length `num_states`).
pub trait GameModel: Send + Sync {
    fn name(&self) -> &str;
    fn num_states(&self) -> usize;
    fn num_actions(&self) -> usize;
    /// Horizon `T`; decisions are made at times `0..T`.
    fn horizon(&self) -> usize;
    fn initial_distribution(&self) -> &[f64];
    fn transition(&self, x: usize, u: usize, g: &NeighborhoodMeanField, out: &mut [f64]);
    fn reward(&self, x: usize, u: usize, g: &NeighborhoodMeanField) -> f64;
}

/// Looks up a benchmark game by registry name (`"sis"` or `"investment"`).
pub fn model_by_name(name: &str) -> Option<Box<dyn GameModel>> {
    match name {
        "sis" => Some(Box::new(sis_graphon_model())),
        "investment" => Some(Box::new(investment_graphon_model())),
        _ => None,
    }
}

/// SIS epidemic game.
///
/// States: susceptible `S = 0`, infected `I = 1`. Actions: usual behavior
/// `U = 0`, precautions `D = 1`. Horizon 50, half the population initially
/// infected. Infected agents recover with probability 0.2; susceptible
/// agents taking no precautions get infected with probability
/// `0.8 · G(I)`; precautions block infection at a per-step cost of 0.5,
/// while being infected costs 2 per step.
#[derive(Clone, Debug)]
pub struct SisGraphon {
    mu0: [f64; 2],
}

pub const SIS_S: usize = 0;
pub const SIS_I: usize = 1;
pub const SIS_U: usize = 0;
pub const SIS_D: usize = 1;

pub fn sis_graphon_model() -> SisGraphon {
    SisGraphon { mu0: [0.5, 0.5] }
}

impl GameModel for SisGraphon {
    fn name(&self) -> &str {
        "sis"
    }

    fn num_states(&self) -> usize {
        2
    }

    fn num_actions(&self) -> usize {
        2
    }

    fn horizon(&self) -> usize {
        50
    }

    fn initial_distribution(&self) -> &[f64] {
        &self.mu0
    }

    fn transition(&self, x: usize, u: usize, g: &NeighborhoodMeanField, out: &mut [f64]) {
        match (x, u) {
            (SIS_I, _) => {
                out[SIS_S] = 0.2;
                out[SIS_I] = 0.8;
            }
            (SIS_S, SIS_U) => {
                let infect = 0.8 * g.mass(SIS_I);
                out[SIS_S] = 1.0 - infect;
                out[SIS_I] = infect;
            }
            (SIS_S, SIS_D) => {
                out[SIS_S] = 1.0;
                out[SIS_I] = 0.0;
            }
            _ => unreachable!("invalid state/action ({x}, {u})"),
        }
    }

    fn reward(&self, x: usize, u: usize, _g: &NeighborhoodMeanField) -> f64 {
        let infected = if x == SIS_I { -2.0 } else { 0.0 };
        let precaution = if u == SIS_D { -0.5 } else { 0.0 };
        infected + precaution
    }
}

/// Investment game.
///
/// States: product quality `0..=9`. Actions: invest `I = 0`, opt out
/// `O = 1`. Horizon 50, all firms start at quality 0. Investing costs 2 and
/// raises quality by one with probability `(9 − x)/10`; quality 9 is
/// absorbing. Per-step revenue is `0.3·x` discounted by total neighborhood
/// quality `1 + Σ x'·G(x')`.
#[derive(Clone, Debug)]
pub struct InvestmentGraphon {
    mu0: [f64; 10],
}

pub const INVEST_I: usize = 0;
pub const INVEST_O: usize = 1;

pub fn investment_graphon_model() -> InvestmentGraphon {
    let mut mu0 = [0.0; 10];
    mu0[0] = 1.0;
    InvestmentGraphon { mu0 }
}

impl GameModel for InvestmentGraphon {
    fn name(&self) -> &str {
        "investment"
    }

    fn num_states(&self) -> usize {
        10
    }

    fn num_actions(&self) -> usize {
        2
    }

    fn horizon(&self) -> usize {
        50
    }

    fn initial_distribution(&self) -> &[f64] {
        &self.mu0
    }

    fn transition(&self, x: usize, u: usize, _g: &NeighborhoodMeanField, out: &mut [f64]) {
        out.fill(0.0);
        if u == INVEST_I && x <= 8 {
            out[x + 1] = (9 - x) as f64 / 10.0;
            out[x] = (1 + x) as f64 / 10.0;
        } else {
            out[x] = 1.0;
        }
    }

    fn reward(&self, x: usize, u: usize, g: &NeighborhoodMeanField) -> f64 {
        let neighborhood_quality: f64 = g
            .masses()
            .iter()
            .enumerate()
            .map(|(q, &m)| q as f64 * m)
            .sum();
        let revenue = 0.3 * x as f64 / (1.0 + neighborhood_quality);
        let cost = if u == INVEST_I { -2.0 } else { 0.0 };
        revenue + cost
    }
}

/// A game defined by closures; the extension point for custom problems.
pub struct CustomModel<Tr, Re>
where
    Tr: Fn(usize, usize, &NeighborhoodMeanField, &mut [f64]) + Send + Sync,
    Re: Fn(usize, usize, &NeighborhoodMeanField) -> f64 + Send + Sync,
{
    pub name: String,
    pub num_states: usize,
    pub num_actions: usize,
    pub horizon: usize,
    pub initial_distribution: Vec<f64>,
    pub transition: Tr,
    pub reward: Re,
}

impl<Tr, Re> GameModel for CustomModel<Tr, Re>
where
    Tr: Fn(usize, usize, &NeighborhoodMeanField, &mut [f64]) + Send + Sync,
    Re: Fn(usize, usize, &NeighborhoodMeanField) -> f64 + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn num_states(&self) -> usize {
        self.num_states
    }

    fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn initial_distribution(&self) -> &[f64] {
        &self.initial_distribution
    }

    fn transition(&self, x: usize, u: usize, g: &NeighborhoodMeanField, out: &mut [f64]) {
        (self.transition)(x, u, g, out)
    }

    fn reward(&self, x: usize, u: usize, g: &NeighborhoodMeanField) -> f64 {
        (self.reward)(x, u, g)
    }
}

/// Total neighborhood quality `Σ x'·G(x')` as used by the investment game.
pub fn total_quality(g: &NeighborhoodMeanField) -> f64 {
    g.masses()
        .iter()
        .enumerate()
        .map(|(q, &m)| q as f64 * m)
        .sum()
}

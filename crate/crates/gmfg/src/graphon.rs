//! Graphons and W-random graph sampling.
//!
//! A graphon is a symmetric measurable kernel `W: [0,1]² → [0,1]` acting as
//! the limit object of dense graph sequences. This module provides the three
//! analytic kernels used by the benchmark games (uniform attachment, ranked
//! attachment, Erdős–Rényi), step graphons built from finite adjacency
//! matrices, and Bernoulli sampling of finite graphs from any kernel.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::rng;
use crate::{Error, Result};

/// A piecewise-constant graphon on a uniform `n × n` grid.
///
/// Cell `i` covers the half-open interval `((i-1)/n, i/n]`, with `x = 0`
/// assigned to the first cell.
#[derive(Clone, Debug, PartialEq)]
pub struct StepGraphon {
    n: usize,
    adjacency: Vec<bool>,
}

impl StepGraphon {
    /// Builds a step graphon from a flat row-major `n × n` adjacency matrix.
    ///
    /// The matrix must be symmetric with a zero diagonal.
    pub fn new(n: usize, adjacency: Vec<bool>) -> Result<Self> {
        if n == 0 || adjacency.len() != n * n {
            return Err(Error::InvalidGraph(format!(
                "adjacency length {} does not match n = {n}",
                adjacency.len()
            )));
        }
        for i in 0..n {
            if adjacency[i * n + i] {
                return Err(Error::InvalidGraph(format!("self-loop at node {i}")));
            }
            for j in (i + 1)..n {
                if adjacency[i * n + j] != adjacency[j * n + i] {
                    return Err(Error::InvalidGraph(format!(
                        "adjacency not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { n, adjacency })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Maps a point of `[0,1]` to its 0-based grid cell.
    fn cell(&self, x: f64) -> usize {
        if x <= 0.0 {
            return 0;
        }
        let c = (self.n as f64 * x).ceil() as usize;
        c.clamp(1, self.n) - 1
    }

    fn eval(&self, x: f64, y: f64) -> f64 {
        let (i, j) = (self.cell(x), self.cell(y));
        if self.adjacency[i * self.n + j] {
            1.0
        } else {
            0.0
        }
    }
}

/// A symmetric kernel `W: [0,1]² → [0,1]`.
#[derive(Clone, Debug, PartialEq)]
pub enum Graphon {
    /// `W(x, y) = 1 − max(x, y)`.
    UniformAttachment,
    /// `W(x, y) = 1 − x·y`.
    RankedAttachment,
    /// `W(x, y) = p`.
    ErdosRenyi(f64),
    /// Piecewise-constant kernel from a finite adjacency matrix.
    Step(StepGraphon),
}

impl Graphon {
    pub fn uniform_attachment() -> Self {
        Graphon::UniformAttachment
    }

    pub fn ranked_attachment() -> Self {
        Graphon::RankedAttachment
    }

    /// Constant kernel with edge probability `p ∈ [0,1]`.
    pub fn erdos_renyi(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(Graphon::ErdosRenyi(p))
    }

    /// Evaluates the kernel at `(x, y) ∈ [0,1]²`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y));
        match self {
            Graphon::UniformAttachment => 1.0 - x.max(y),
            Graphon::RankedAttachment => 1.0 - x * y,
            Graphon::ErdosRenyi(p) => *p,
            Graphon::Step(s) => s.eval(x, y),
        }
    }

    /// Samples a W-random graph on `n` nodes.
    ///
    /// Node indices `α_i` are drawn i.i.d. uniformly on `[0,1]`; each
    /// unordered pair `i < j` receives an edge with probability
    /// `W(α_i, α_j)` and the matrix is mirrored. No self-loops. The result
    /// is a pure function of `(self, n, seed)`.
    pub fn sample_w_random_graph(&self, n: usize, seed: u64) -> SampledGraph {
        assert!(n >= 1, "need at least one node");
        let mut rng = rng::rng_from_seed(seed);
        let alphas: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let mut adjacency = vec![false; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let u: f64 = rng.gen();
                if u < self.eval(alphas[i], alphas[j]) {
                    adjacency[i * n + j] = true;
                    adjacency[j * n + i] = true;
                }
            }
        }
        SampledGraph {
            n,
            seed,
            alphas,
            adjacency,
        }
    }
}

/// A finite graph sampled from a graphon, together with the node indices
/// `α_i` used to generate it (kept for policy lifting).
#[derive(Clone, Debug, PartialEq)]
pub struct SampledGraph {
    n: usize,
    seed: u64,
    alphas: Vec<f64>,
    adjacency: Vec<bool>,
}

impl SampledGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.n + j]
    }

    /// Row of the adjacency matrix for node `i`.
    pub fn neighbors_row(&self, i: usize) -> &[bool] {
        &self.adjacency[i * self.n..(i + 1) * self.n]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors_row(i).iter().filter(|&&e| e).count()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().filter(|&&e| e).count() / 2
    }
}

/// Wire format: `{n, seed, alphas, edges}` with 0-based `i < j` pairs.
#[derive(Serialize, Deserialize)]
struct SampledGraphWire {
    n: usize,
    seed: u64,
    alphas: Vec<f64>,
    edges: Vec<(usize, usize)>,
}

impl Serialize for SampledGraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut edges = Vec::with_capacity(self.num_edges());
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.has_edge(i, j) {
                    edges.push((i, j));
                }
            }
        }
        SampledGraphWire {
            n: self.n,
            seed: self.seed,
            alphas: self.alphas.clone(),
            edges,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SampledGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = SampledGraphWire::deserialize(deserializer)?;
        if wire.alphas.len() != wire.n {
            return Err(D::Error::custom(format!(
                "expected {} alphas, got {}",
                wire.n,
                wire.alphas.len()
            )));
        }
        if wire.alphas.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(D::Error::custom("alpha outside [0,1]"));
        }
        let mut adjacency = vec![false; wire.n * wire.n];
        for &(i, j) in &wire.edges {
            if i >= j || j >= wire.n {
                return Err(D::Error::custom(format!("bad edge ({i}, {j})")));
            }
            adjacency[i * wire.n + j] = true;
            adjacency[j * wire.n + i] = true;
        }
        Ok(SampledGraph {
            n: wire.n,
            seed: wire.seed,
            alphas: wire.alphas,
            adjacency,
        })
    }
}

/// The step graphon of a finite graph: `eval` reproduces the adjacency
/// matrix on grid cells.
pub fn step_graphon_from_graph(graph: &SampledGraph) -> Graphon {
    Graphon::Step(StepGraphon {
        n: graph.n,
        adjacency: graph.adjacency.clone(),
    })
}

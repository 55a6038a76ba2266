use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clustering::Clustering;
use crate::error::{invalid, Result};
use crate::graph::PartialGraph;

/// How disagreements are planted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseMode {
    /// Every pair state flips independently with probability `tau`, then
    /// each pair is observed independently with probability `p0`.
    BernoulliFlips,
    /// Exactly `b` flipped pairs per node, placed by a random simple
    /// `b`-regular pairing. Requires `p0 = 1`.
    FixedPerNode(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub sizes: Vec<usize>,
    pub tau: f64,
    pub p0: f64,
    pub seed: u64,
    pub mode: NoiseMode,
}

impl GeneratorParams {
    pub fn new(sizes: Vec<usize>, tau: f64, p0: f64, seed: u64) -> Self {
        Self { sizes, tau, p0, seed, mode: NoiseMode::BernoulliFlips }
    }

    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return Err(invalid("cluster sizes must be a non-empty list of positive integers"));
        }
        if !(0.0..1.0).contains(&self.tau) {
            return Err(invalid(format!("tau = {} outside [0, 1)", self.tau)));
        }
        if !(self.p0 > 0.0 && self.p0 <= 1.0) {
            return Err(invalid(format!("p0 = {} outside (0, 1]", self.p0)));
        }
        if let NoiseMode::FixedPerNode(b) = self.mode {
            let n = self.n();
            if self.p0 != 1.0 {
                return Err(invalid("fixed per-node noise requires p0 = 1"));
            }
            if b >= n {
                return Err(invalid(format!("b = {b} needs at least {} nodes", b + 1)));
            }
            if (n * b) % 2 == 1 {
                return Err(invalid(format!("n * b = {} is odd, no {b}-regular pairing exists", n * b)));
            }
        }
        Ok(())
    }
}

/// A generated graph together with the planted clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: PartialGraph,
    pub truth: Clustering,
}

pub fn generate_instance(p: &GeneratorParams) -> Result<Instance> {
    p.validate()?;
    let truth = Clustering::from_sizes(&p.sizes)?;
    let n = truth.n();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let graph = match p.mode {
        NoiseMode::BernoulliFlips => {
            let mut triples = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    let flip = rng.random_bool(p.tau);
                    if rng.random_bool(p.p0) {
                        triples.push((i, j, truth.same_cluster(i, j) != flip));
                    }
                }
            }
            PartialGraph::new(n, triples)?
        }
        NoiseMode::FixedPerNode(b) => {
            let mut flipped = vec![false; n * n];
            for (i, j) in random_regular(n, b, &mut rng) {
                flipped[i * n + j] = true;
                flipped[j * n + i] = true;
            }
            let edges = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .filter(|&(i, j)| truth.same_cluster(i, j) != flipped[i * n + j])
                .collect::<Vec<_>>();
            PartialGraph::fully_observed(n, edges)?
        }
    };
    Ok(Instance { graph, truth })
}

/// Edge list of a random simple `b`-regular graph on `n` nodes. Stubs are
/// paired one at a time among admissible partners; a dead end restarts.
fn random_regular(n: usize, b: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    if b == 0 {
        return Vec::new();
    }
    'restart: loop {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, b)).collect();
        stubs.shuffle(rng);
        let mut adj = vec![false; n * n];
        let mut edges = Vec::with_capacity(n * b / 2);
        while let Some(u) = stubs.pop() {
            let ok = |v: usize| v != u && !adj[u * n + v];
            let mut pick = None;
            for _ in 0..32 {
                let k = rng.random_range(0..stubs.len());
                if ok(stubs[k]) {
                    pick = Some(k);
                    break;
                }
            }
            if pick.is_none() {
                let admissible: Vec<usize> = (0..stubs.len()).filter(|&k| ok(stubs[k])).collect();
                if admissible.is_empty() {
                    continue 'restart;
                }
                pick = Some(admissible[rng.random_range(0..admissible.len())]);
            }
            let v = stubs.swap_remove(pick.expect("chosen above"));
            adj[u * n + v] = true;
            adj[v * n + u] = true;
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        return edges;
    }
}

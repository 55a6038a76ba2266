use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::graph::PartialGraph;

/// Largest graph the exhaustive search accepts (Bell(12) ~ 4.2 million).
pub const ORACLE_MAX_N: usize = 12;

struct Search<'a> {
    g: &'a PartialGraph,
    labels: Vec<usize>,
    best: Option<(Vec<usize>, usize)>,
}

impl Search<'_> {
    // cost added by placing node v into `label`, against nodes 0..v
    fn added_cost(&self, v: usize, label: usize) -> usize {
        (0..v)
            .filter(|&u| match self.g.get(u, v) {
                Some(edge) => (self.labels[u] == label) != edge,
                None => false,
            })
            .count()
    }

    fn visit(&mut self, v: usize, blocks: usize, cost: usize) {
        if self.best.as_ref().is_some_and(|(_, b)| cost >= *b) {
            return;
        }
        let n = self.g.n();
        if v == n {
            self.best = Some((self.labels.clone(), cost));
            return;
        }
        for label in 0..=blocks {
            let c = cost + self.added_cost(v, label);
            self.labels[v] = label;
            self.visit(v + 1, blocks.max(label + 1), c);
        }
    }
}

/// Exact observed-disagreement minimizer by enumerating restricted growth
/// strings, pruning branches that cannot beat the incumbent. Ties go to
/// the first minimizer in enumeration order.
pub fn brute_force_min(g: &PartialGraph) -> Result<(Clustering, usize)> {
    let n = g.n();
    if n > ORACLE_MAX_N {
        return Err(Error::TooLarge { n, limit: ORACLE_MAX_N });
    }
    let mut s = Search { g, labels: vec![0; n], best: None };
    s.visit(1, 1, 0);
    let (labels, cost) = s.best.expect("at least one partition");
    Ok((Clustering::from_labels(&labels)?, cost))
}

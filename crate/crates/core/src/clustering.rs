//! Node partitions and the clustering file format (`<node> <cluster_id>`).

use std::collections::HashMap;

use crate::error::{Error, Result};

/// A partition of `0..n` into non-empty clusters. Cluster ids are
/// normalized to `0..p` in order of first node appearance, so two
/// clusterings are equal as partitions iff they compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clustering {
    labels: Vec<usize>,
    sizes: Vec<usize>,
}

impl Clustering {
    /// Normalizes arbitrary labels. Fails on empty input.
    pub fn from_labels<L: Copy + Eq + std::hash::Hash>(labels: &[L]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidParameter("clustering needs at least one node".into()));
        }
        let mut remap: HashMap<L, usize> = HashMap::new();
        let mut sizes = Vec::new();
        let labels = labels
            .iter()
            .map(|l| {
                let next = remap.len();
                let id = *remap.entry(*l).or_insert(next);
                if id == sizes.len() {
                    sizes.push(0);
                }
                sizes[id] += 1;
                id
            })
            .collect();
        Ok(Self { labels, sizes })
    }

    /// Consecutive blocks of the given sizes: the first `sizes[0]` nodes form
    /// cluster 0 and so on.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::InvalidParameter("cluster sizes must be positive".into()));
        }
        let labels: Vec<usize> = sizes.iter().enumerate().flat_map(|(c, &s)| std::iter::repeat_n(c, s)).collect();
        Self::from_labels(&labels)
    }

    pub fn single(n: usize) -> Result<Self> {
        Self::from_labels(&vec![0usize; n])
    }

    pub fn singletons(n: usize) -> Result<Self> {
        Self::from_labels(&(0..n).collect::<Vec<_>>())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    #[inline]
    pub fn same_cluster(&self, i: usize, j: usize) -> bool {
        self.labels[i] == self.labels[j]
    }

    pub fn num_clusters(&self) -> usize {
        self.sizes.len()
    }

    /// Size of each cluster, indexed by normalized cluster id.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Cluster sizes in non-increasing order (`K_1 >= ... >= K_p`).
    pub fn sorted_sizes(&self) -> Vec<usize> {
        let mut s = self.sizes.clone();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }

    pub fn k_min(&self) -> usize {
        *self.sizes.iter().min().expect("non-empty")
    }

    pub fn k_max(&self) -> usize {
        *self.sizes.iter().max().expect("non-empty")
    }

    /// Members of each cluster in ascending node order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.sizes.len()];
        for (i, &c) in self.labels.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    /// Parses `<node> <cluster_id>` lines. Every node in `0..n` must appear
    /// exactly once, where `n` is the number of lines. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(usize, usize, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = t.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(Error::Parse { line, msg: "expected `<node> <cluster_id>`".into() });
            }
            let node: usize = toks[0]
                .parse()
                .map_err(|_| Error::Parse { line, msg: "node is not an integer".into() })?;
            entries.push((line, node, toks[1].to_string()));
        }
        let n = entries.len();
        if n == 0 {
            return Err(Error::Parse { line: 1, msg: "empty clustering".into() });
        }
        let mut labels: Vec<Option<String>> = vec![None; n];
        for (line, node, id) in entries {
            if node >= n {
                return Err(Error::IndexOutOfRange { line, index: node, n });
            }
            if labels[node].replace(id).is_some() {
                return Err(Error::Parse { line, msg: format!("node {node} listed twice") });
            }
        }
        let labels: Vec<String> = labels.into_iter().map(|l| l.expect("all nodes present")).collect();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        Self::from_labels(&refs)
    }

    pub fn to_text(&self) -> String {
        self.labels.iter().enumerate().map(|(i, c)| format!("{i} {c}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_by_first_appearance() {
        let a = Clustering::from_labels(&[7, 7, 3, 9, 3]).unwrap();
        assert_eq!(a.labels(), &[0, 0, 1, 2, 1]);
        assert_eq!(a.sizes(), &[2, 2, 1]);
        assert_eq!(a.k_min(), 1);
        assert_eq!(a.sorted_sizes(), vec![2, 2, 1]);
        let b = Clustering::from_labels(&["x", "x", "y", "z", "y"]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parse_any_order_and_reject_incomplete() {
        let c = Clustering::parse("# header\n2 b\n0 a\n1 a\n").unwrap();
        assert_eq!(c.labels(), &[0, 0, 1]);
        assert!(Clustering::parse("0 a\n2 b\n").is_err());
        assert!(Clustering::parse("0 a\n0 b\n").is_err());
        assert!(Clustering::parse("0 a b\n").is_err());
    }

    #[test]
    fn text_roundtrip() {
        let c = Clustering::from_sizes(&[3, 1, 2]).unwrap();
        assert_eq!(Clustering::parse(&c.to_text()).unwrap(), c);
    }
}

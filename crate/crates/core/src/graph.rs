//! Partially observed unweighted graphs and their text format.
//!
//! ```text
//! n 4
//! # optional: every unlisted pair is an observed non-edge
//! fully_observed
//! e 0 1 1
//! e 2 3 0
//! ```

use std::io::{Read, Write};

use crate::error::{Error, Result};

/// One observed node pair, stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObservedPair {
    pub i: usize,
    pub j: usize,
    /// `true` for an observed edge, `false` for an observed non-edge.
    pub edge: bool,
}

const UNOBSERVED: i8 = -1;

/// `n` nodes plus the observed pair states. Pairs absent from the
/// observation set are unknown. The diagonal is never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialGraph {
    n: usize,
    pairs: Vec<ObservedPair>,
    // dense lookup: -1 unobserved, 0 non-edge, 1 edge
    state: Vec<i8>,
}

impl PartialGraph {
    /// Builds a graph from `(i, j, edge)` triples. Pairs may be given in
    /// either orientation; self-pairs, duplicates and out-of-range indices
    /// are rejected (the reported line is the 1-based position in `pairs`).
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (usize, usize, bool)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("graph needs at least one node".into()));
        }
        let mut g = Self { n, pairs: Vec::new(), state: vec![UNOBSERVED; n * n] };
        for (k, (a, b, edge)) in pairs.into_iter().enumerate() {
            g.insert(k + 1, a, b, edge)?;
        }
        g.pairs.sort_unstable();
        Ok(g)
    }

    /// Every pair observed; `edges` lists the present edges.
    pub fn fully_observed(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj = vec![false; n * n];
        for (k, (a, b)) in edges.into_iter().enumerate() {
            for idx in [a, b] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { line: k + 1, index: idx, n });
                }
            }
            if a == b {
                return Err(Error::SelfPair { line: k + 1, i: a });
            }
            if std::mem::replace(&mut adj[a * n + b], true) {
                return Err(Error::DuplicatePair { line: k + 1, i: a.min(b), j: a.max(b) });
            }
            adj[b * n + a] = true;
        }
        let all = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j)));
        Self::new(n, all.map(|(i, j)| (i, j, adj[i * n + j])).collect::<Vec<_>>())
    }

    fn insert(&mut self, line: usize, a: usize, b: usize, edge: bool) -> Result<()> {
        let n = self.n;
        for idx in [a, b] {
            if idx >= n {
                return Err(Error::IndexOutOfRange { line, index: idx, n });
            }
        }
        if a == b {
            return Err(Error::SelfPair { line, i: a });
        }
        let (i, j) = (a.min(b), a.max(b));
        if self.state[i * n + j] != UNOBSERVED {
            return Err(Error::DuplicatePair { line, i, j });
        }
        let s = edge as i8;
        self.state[i * n + j] = s;
        self.state[j * n + i] = s;
        self.pairs.push(ObservedPair { i, j, edge });
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Observed pairs sorted by `(i, j)`.
    pub fn observed(&self) -> &[ObservedPair] {
        &self.pairs
    }

    pub fn num_observed(&self) -> usize {
        self.pairs.len()
    }

    /// `Some(edge)` when `(i, j)` is observed, `None` otherwise (including
    /// the diagonal).
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<bool> {
        match self.state[i * self.n + j] {
            UNOBSERVED => None,
            s => Some(s == 1),
        }
    }

    #[inline]
    pub fn is_observed(&self, i: usize, j: usize) -> bool {
        self.state[i * self.n + j] != UNOBSERVED
    }

    pub fn num_pairs(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// Fraction of the `n(n-1)/2` off-diagonal pairs that are observed.
    pub fn observation_rate(&self) -> f64 {
        if self.n < 2 {
            return 1.0;
        }
        self.pairs.len() as f64 / self.num_pairs() as f64
    }

    pub fn is_fully_observed(&self) -> bool {
        self.pairs.len() == self.num_pairs()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut fully = false;
        let mut triples: Vec<(usize, usize, usize, bool)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = trimmed.split_whitespace().collect();
            let bad = |msg: &str| Error::Parse { line, msg: msg.to_string() };
            match (n, toks[0]) {
                (None, "n") => {
                    if toks.len() != 2 {
                        return Err(bad("expected `n <N>`"));
                    }
                    let v: usize = toks[1].parse().map_err(|_| bad("node count is not an integer"))?;
                    if v == 0 {
                        return Err(bad("node count must be at least 1"));
                    }
                    n = Some(v);
                }
                (None, _) => return Err(bad("first line must be `n <N>`")),
                (Some(_), "n") => return Err(bad("repeated `n` line")),
                (Some(_), "fully_observed") => {
                    if toks.len() != 1 || fully {
                        return Err(bad("malformed or repeated `fully_observed`"));
                    }
                    fully = true;
                }
                (Some(_), "e") => {
                    if toks.len() != 4 {
                        return Err(bad("expected `e <i> <j> <bit>`"));
                    }
                    let i: usize = toks[1].parse().map_err(|_| bad("node index is not an integer"))?;
                    let j: usize = toks[2].parse().map_err(|_| bad("node index is not an integer"))?;
                    let edge = match toks[3] {
                        "0" => false,
                        "1" => true,
                        _ => return Err(bad("bit must be 0 or 1")),
                    };
                    triples.push((line, i, j, edge));
                }
                (Some(_), _) => return Err(bad("unknown directive")),
            }
        }
        let n = n.ok_or(Error::Parse { line: 1, msg: "missing `n <N>` line".into() })?;
        let mut g = Self { n, pairs: Vec::new(), state: vec![UNOBSERVED; n * n] };
        for &(line, i, j, edge) in &triples {
            if i < n && j < n && i != j && i > j {
                return Err(Error::Parse { line, msg: format!("pair ({i}, {j}) must satisfy i < j") });
            }
            g.insert(line, i, j, edge)?;
        }
        if fully {
            for i in 0..n {
                for j in (i + 1)..n {
                    if !g.is_observed(i, j) {
                        g.insert(0, i, j, false)?;
                    }
                }
            }
        }
        g.pairs.sort_unstable();
        Ok(g)
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut text = String::new();
        r.read_to_string(&mut text)?;
        Self::parse(&text)
    }

    /// Canonical text form. Fully observed graphs are written with the
    /// `fully_observed` directive and their edges only.
    pub fn to_text(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        let fully = self.is_fully_observed();
        if fully {
            out.push_str("fully_observed\n");
        }
        for p in &self.pairs {
            if !fully || p.edge {
                out.push_str(&format!("e {} {} {}\n", p.i, p.j, p.edge as u8));
            }
        }
        out
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(self.to_text().as_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_partial_graph() {
        let g = PartialGraph::parse("n 3\ne 0 1 1\ne 1 2 0").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.get(0, 1), Some(true));
        assert_eq!(g.get(1, 0), Some(true));
        assert_eq!(g.get(1, 2), Some(false));
        assert_eq!(g.get(0, 2), None);
        assert_eq!(g.num_observed(), 2);
    }

    #[test]
    fn fully_observed_directive_fills_non_edges() {
        let g = PartialGraph::parse("n 2\nfully_observed\ne 0 1 1").unwrap();
        assert!(g.is_fully_observed());
        assert_eq!(g.get(0, 1), Some(true));

        let g = PartialGraph::parse("n 3\nfully_observed\ne 0 1 1").unwrap();
        assert_eq!(g.get(0, 2), Some(false));
        assert_eq!(g.get(1, 2), Some(false));
    }

    #[test]
    fn rejects_self_pair_with_line() {
        let err = PartialGraph::parse("n 2\ne 0 0 1").unwrap_err();
        assert!(matches!(err, Error::SelfPair { line: 2, i: 0 }), "{err}");
    }

    #[test]
    fn rejects_duplicates_and_range() {
        let err = PartialGraph::parse("n 3\ne 0 1 1\n# c\ne 0 1 0").unwrap_err();
        assert!(matches!(err, Error::DuplicatePair { line: 4, i: 0, j: 1 }), "{err}");
        let err = PartialGraph::parse("n 3\ne 0 3 1").unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { line: 2, index: 3, n: 3 }), "{err}");
    }

    #[test]
    fn rejects_malformed_lines() {
        for text in ["e 0 1 1", "n x", "n 3\ne 0 1", "n 3\ne 0 1 2", "n 3\nfoo", "n 3\ne 2 1 1", "n 0", ""] {
            assert!(PartialGraph::parse(text).is_err(), "{text:?} should fail");
        }
        let err = PartialGraph::parse("n 3\n\ne 0 1 7").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn text_roundtrip() {
        let g = PartialGraph::new(4, [(0, 1, true), (3, 2, false), (1, 3, true)]).unwrap();
        assert_eq!(PartialGraph::parse(&g.to_text()).unwrap(), g);
        let f = PartialGraph::fully_observed(4, [(0, 1), (2, 3)]).unwrap();
        let text = f.to_text();
        assert!(text.contains("fully_observed"));
        assert_eq!(PartialGraph::parse(&text).unwrap(), f);
    }
}

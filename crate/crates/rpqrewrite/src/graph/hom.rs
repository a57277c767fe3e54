//! Backtracking homomorphism search with arc-consistency propagation.

use super::{BitSet, GraphDb, Indexed, Label, NodeId};
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::ops::ControlFlow;

/// Precomputed adjacency bitsets of a fixed target structure.
#[derive(Clone, Debug)]
pub(crate) struct Target {
    pub names: Vec<NodeId>,
    pub pos: HashMap<NodeId, usize>,
    pub label_pos: HashMap<Label, usize>,
    pub succ: Vec<Vec<BitSet>>,
    pub pred: Vec<Vec<BitSet>>,
    pub loops: Vec<BitSet>,
}

impl Target {
    pub fn new(g: &GraphDb) -> Self {
        Self::from_indexed(&Indexed::new(g))
    }

    pub fn from_indexed(ix: &Indexed) -> Self {
        let n = ix.n();
        let nl = ix.labels.len();
        let mut succ = vec![vec![BitSet::new(n); n]; nl];
        let mut pred = vec![vec![BitSet::new(n); n]; nl];
        let mut loops = vec![BitSet::new(n); nl];
        for &(s, l, d) in &ix.edges {
            succ[l][s].insert(d);
            pred[l][d].insert(s);
            if s == d {
                loops[l].insert(s);
            }
        }
        Target { names: ix.names.clone(), pos: ix.pos.clone(), label_pos: ix.label_pos.clone(), succ, pred, loops }
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn node(&self, n: &NodeId) -> Result<usize> {
        self.pos.get(n).copied().ok_or_else(|| Error::UnknownNode(n.as_str().to_string()))
    }

    pub fn has_edge(&self, s: usize, l: usize, d: usize) -> bool {
        self.succ[l][s].contains(d)
    }
}

/// Search budget exhausted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Exhausted;

pub(crate) struct Problem<'a> {
    n: usize,
    /// For each variable: (other variable, target label, forward?) where
    /// forward means the source edge goes from this variable to the other.
    arcs: Vec<Vec<(usize, usize, bool)>>,
    loops: Vec<Vec<usize>>,
    impossible: bool,
    target: &'a Target,
    pub limit: Option<u64>,
    pub visited: u64,
}

impl<'a> Problem<'a> {
    pub fn new(src: &Indexed, target: &'a Target) -> Self {
        let lmap: Vec<Option<usize>> = src.labels.iter().map(|l| target.label_pos.get(l).copied()).collect();
        Self::from_edges(src.n(), src.edges.iter().map(|&(s, l, d)| (s, lmap[l], d)), target)
    }

    /// Edges are (src var, target label or None if the label is absent in
    /// the target, dst var).
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, Option<usize>, usize)>,
        target: &'a Target,
    ) -> Self {
        let mut arcs = vec![Vec::new(); n];
        let mut loops = vec![Vec::new(); n];
        let mut impossible = false;
        for (s, l, d) in edges {
            let Some(l) = l else {
                impossible = true;
                continue;
            };
            if s == d {
                loops[s].push(l);
            } else {
                arcs[s].push((d, l, true));
                arcs[d].push((s, l, false));
            }
        }
        Problem { n, arcs, loops, impossible, target, limit: None, visited: 0 }
    }

    /// Restricts initial domains by self-loops and propagates.
    fn prepare(&self, domains: &mut [BitSet]) -> bool {
        if self.impossible {
            return false;
        }
        for x in 0..self.n {
            for &l in &self.loops[x] {
                domains[x].intersect_with(&self.target.loops[l]);
            }
            if domains[x].is_empty() {
                return false;
            }
        }
        let queue: Vec<usize> = (0..self.n).rev().collect();
        self.propagate(domains, queue)
    }

    fn propagate(&self, domains: &mut [BitSet], mut queue: Vec<usize>) -> bool {
        let tn = self.target.n();
        let mut queued = vec![false; self.n];
        for &q in &queue {
            queued[q] = true;
        }
        while let Some(x) = queue.pop() {
            queued[x] = false;
            for &(y, l, fwd) in &self.arcs[x] {
                let mut support = BitSet::new(tn);
                let table = if fwd { &self.target.succ[l] } else { &self.target.pred[l] };
                for t in domains[x].iter() {
                    support.union_with(&table[t]);
                }
                if domains[y].intersect_with(&support) {
                    if domains[y].is_empty() {
                        return false;
                    }
                    if !queued[y] {
                        queued[y] = true;
                        queue.push(y);
                    }
                }
            }
        }
        true
    }

    pub fn first(&mut self, domains: Vec<BitSet>) -> Option<Vec<usize>> {
        let mut out = None;
        let _ = self.for_each(domains, &mut |a| {
            out = Some(a.to_vec());
            ControlFlow::Break(())
        });
        out
    }

    /// Calls `f` on every homomorphism within `domains`, in lexicographic
    /// order of the dynamic variable/value choice. Stops early on `Break`.
    pub fn for_each(
        &mut self,
        mut domains: Vec<BitSet>,
        f: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> std::result::Result<ControlFlow<()>, Exhausted> {
        assert_eq!(domains.len(), self.n);
        if !self.prepare(&mut domains) {
            return Ok(ControlFlow::Continue(()));
        }
        let mut assigned = vec![false; self.n];
        self.search(&mut domains, &mut assigned, f)
    }

    fn search(
        &mut self,
        domains: &mut Vec<BitSet>,
        assigned: &mut Vec<bool>,
        f: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> std::result::Result<ControlFlow<()>, Exhausted> {
        self.visited += 1;
        if let Some(limit) = self.limit {
            if self.visited > limit {
                return Err(Exhausted);
            }
        }
        let mut best: Option<(usize, usize)> = None;
        for x in 0..self.n {
            if !assigned[x] {
                let c = domains[x].count();
                if best.is_none_or(|(_, bc)| c < bc) {
                    best = Some((x, c));
                }
            }
        }
        let Some((x, _)) = best else {
            let a: Vec<usize> = domains.iter().map(|d| d.first().expect("nonempty domain")).collect();
            return Ok(f(&a));
        };
        let values: Vec<usize> = domains[x].iter().collect();
        assigned[x] = true;
        for t in values {
            let mut next = domains.clone();
            next[x] = BitSet::from_iter(self.target.n(), [t]);
            if self.propagate(&mut next, vec![x]) {
                if let ControlFlow::Break(()) = self.search(&mut next, assigned, f)? {
                    assigned[x] = false;
                    return Ok(ControlFlow::Break(()));
                }
            }
        }
        assigned[x] = false;
        Ok(ControlFlow::Continue(()))
    }
}

//! Searching for databases with a prescribed view image.
//!
//! Candidate databases consist of the instance's nodes plus fresh nodes, and
//! are assembled from segments: single edges between instance nodes, and
//! paths through private fresh nodes between two instance nodes. Any
//! preimage can be normalised into this shape, so exhausting the segments up
//! to a size bound is a complete search within that bound.
//!
//! The search includes or excludes segments in a fixed order. Adding edges
//! only adds view tuples and query answers, so a partial database that
//! already has a forbidden tuple is abandoned, and so is one whose consistent
//! completions cannot produce every required tuple.

use crate::automata::{build_view_product, Automaton, Dfa, ProductDfa};
use crate::error::{Error, Result};
use crate::graph::{GraphDb, Label, NodeId};
use crate::rpq::{apply_view, rpq_eval, QuerySpec, ViewInstance, ViewSpec};
use std::collections::{BTreeSet, HashMap, HashSet};

#[derive(Clone, Debug)]
pub(crate) struct Segment {
    /// Edges over global node ids (instance nodes first, then fresh).
    pub edges: Vec<(usize, usize, usize)>,
    pub fresh: Vec<usize>,
}

pub(crate) struct Engine<'a> {
    pub n_base: usize,
    pub views: &'a ProductDfa,
    pub segments: Vec<Segment>,
    /// Tuples (view, x, y) that must appear.
    pub required: HashSet<(usize, usize, usize)>,
    /// When set, no other tuple may appear.
    pub exact: bool,
    /// Query pair that must not be answered.
    pub forbid: Option<(&'a Dfa, usize, usize)>,
    pub fresh_budget: usize,
    pub limit: u64,
    pub visited: u64,
}

type Tuples = HashSet<(usize, usize, usize)>;
type Adj = HashMap<usize, Vec<(usize, usize)>>;

fn adjacency(edges: &[(usize, usize, usize)]) -> Adj {
    let mut adj: Adj = HashMap::new();
    for &(s, l, d) in edges {
        adj.entry(s).or_default().push((l, d));
    }
    adj
}

impl Engine<'_> {
    fn active(&self, chosen: &[usize], extra: Option<usize>) -> (Vec<(usize, usize, usize)>, Vec<usize>) {
        let mut edges = Vec::new();
        let mut nodes: Vec<usize> = (0..self.n_base).collect();
        for &c in chosen.iter().chain(extra.iter()) {
            edges.extend_from_slice(&self.segments[c].edges);
            nodes.extend_from_slice(&self.segments[c].fresh);
        }
        (edges, nodes)
    }

    /// Product states `(node, state)` reachable from `(x, initial)`.
    fn reach(&self, adj: &Adj, x: usize, init: usize, step: impl Fn(usize, usize) -> usize) -> HashSet<(usize, usize)> {
        let mut seen = HashSet::from([(x, init)]);
        let mut stack = vec![(x, init)];
        while let Some((v, p)) = stack.pop() {
            for &(l, w) in adj.get(&v).into_iter().flatten() {
                let st = (w, step(p, l));
                if seen.insert(st) {
                    stack.push(st);
                }
            }
        }
        seen
    }

    fn tuples_from(&self, adj: &Adj, sources: impl IntoIterator<Item = usize>) -> Tuples {
        let nv = self.views.view_finals.len();
        let mut out = HashSet::new();
        for x in sources {
            for (v, p) in self.reach(adj, x, 0, |p, l| self.views.step(p, l)) {
                for i in 0..nv {
                    if self.views.is_final_for(i, p) {
                        out.insert((i, x, v));
                    }
                }
            }
        }
        out
    }

    fn consistent(&self, edges: &[(usize, usize, usize)], nodes: &[usize]) -> bool {
        let adj = adjacency(edges);
        if let Some((dfa, u, v)) = self.forbid {
            let r = self.reach(&adj, u, dfa.initial(), |q, l| dfa.step(q, l));
            if r.iter().any(|&(x, q)| x == v && dfa.is_final(q)) {
                return false;
            }
        }
        !self.exact || self.tuples_from(&adj, nodes.iter().copied()).is_subset(&self.required)
    }

    /// Required tuples present on the given edges.
    fn covered(&self, edges: &[(usize, usize, usize)], sources: &[usize]) -> Tuples {
        let t = self.tuples_from(&adjacency(edges), sources.iter().copied());
        t.intersection(&self.required).copied().collect()
    }

    fn fresh_used(&self, chosen: &[usize]) -> usize {
        chosen.iter().map(|&c| self.segments[c].fresh.len()).sum()
    }

    /// Drops segments, in order, while the required tuples stay covered and
    /// the remaining database stays consistent.
    pub fn reduce(&self, mut chosen: Vec<usize>) -> Vec<usize> {
        let sources = self.sources();
        let mut i = 0;
        while i < chosen.len() {
            let mut trial = chosen.clone();
            trial.remove(i);
            let (e, n) = self.active(&trial, None);
            if self.consistent(&e, &n) && self.covered(&e, &sources).len() == self.required.len() {
                chosen = trial;
            } else {
                i += 1;
            }
        }
        chosen
    }

    fn sources(&self) -> Vec<usize> {
        let s: BTreeSet<usize> = self.required.iter().map(|t| t.1).collect();
        s.into_iter().collect()
    }

    /// Depth-first search driven by an uncovered required tuple. In
    /// any completion some walk witnesses it; the first edge of that walk
    /// outside the chosen segments starts a segment. Branching over those
    /// segments, excluding earlier branches, is complete.
    pub fn run(&mut self) -> Result<Option<Vec<usize>>> {
        let (edges, nodes) = self.active(&[], None);
        if !self.consistent(&edges, &nodes) {
            return Ok(None);
        }
        let mut order: Vec<(usize, usize, usize)> = self.required.iter().copied().collect();
        order.sort_unstable();
        let sources = self.sources();
        let open: Vec<usize> = (0..self.segments.len()).collect();
        let mut chosen = Vec::new();
        self.dfs(&order, &sources, &mut chosen, open)
    }

    fn dfs(
        &mut self,
        order: &[(usize, usize, usize)],
        sources: &[usize],
        chosen: &mut Vec<usize>,
        open: Vec<usize>,
    ) -> Result<Option<Vec<usize>>> {
        self.visited += 1;
        if self.visited > self.limit {
            return Err(Error::BudgetExceeded(format!("preimage search visited more than {} states", self.limit)));
        }
        let (edges, _) = self.active(chosen, None);
        let cur = self.covered(&edges, sources);
        if order.iter().all(|t| cur.contains(t)) {
            return Ok(Some(chosen.clone()));
        }
        let used = self.fresh_used(chosen);
        // Forward check: drop segments that cannot be added any more.
        let mut live = Vec::with_capacity(open.len());
        for &c in &open {
            if used + self.segments[c].fresh.len() > self.fresh_budget {
                continue;
            }
            let (e2, n2) = self.active(chosen, Some(c));
            if self.consistent(&e2, &n2) {
                live.push(c);
            }
        }
        // Coverage: everything still addable must reach the required tuples.
        let mut all = chosen.clone();
        all.extend_from_slice(&live);
        let (ea, _) = self.active(&all, None);
        if self.covered(&ea, sources).len() < self.required.len() {
            return Ok(None);
        }
        // Branch on the uncovered tuple with the fewest candidate segments.
        let mut cands: Option<Vec<usize>> = None;
        for &t in order.iter().filter(|t| !cur.contains(t)) {
            let c = self.first_new_segments(t, &edges, &ea, &live);
            if cands.as_ref().is_none_or(|best| c.len() < best.len()) {
                let done = c.len() <= 1;
                cands = Some(c);
                if done {
                    break;
                }
            }
        }
        let cands = cands.expect("some tuple is uncovered");
        let mut rest = live;
        for c in cands {
            rest.retain(|&x| x != c);
            chosen.push(c);
            if let Some(found) = self.dfs(order, sources, chosen, rest.clone())? {
                return Ok(Some(found));
            }
            chosen.pop();
        }
        Ok(None)
    }

    /// Live segments that can be the first non-chosen step of a walk from
    /// `x` to `y` labelled in view `i`, with the walk completed over the
    /// chosen edges plus all live segments.
    fn first_new_segments(
        &self,
        (i, x, y): (usize, usize, usize),
        chosen: &[(usize, usize, usize)],
        all: &[(usize, usize, usize)],
        live: &[usize],
    ) -> Vec<usize> {
        let step = |p: usize, l: usize| self.views.step(p, l);
        let fwd = self.reach(&adjacency(chosen), x, 0, step);
        let mut rev: Adj = HashMap::new();
        for &(s, l, d) in all {
            rev.entry(d).or_default().push((l, s));
        }
        let ns = self.views.num_states();
        let mut back: HashSet<(usize, usize)> =
            (0..ns).filter(|&p| self.views.is_final_for(i, p)).map(|p| (y, p)).collect();
        let mut stack: Vec<(usize, usize)> = back.iter().copied().collect();
        while let Some((v, p2)) = stack.pop() {
            for &(l, s) in rev.get(&v).into_iter().flatten() {
                for p in 0..ns {
                    if step(p, l) == p2 && back.insert((s, p)) {
                        stack.push((s, p));
                    }
                }
            }
        }
        live.iter()
            .copied()
            .filter(|&c| {
                let seg = &self.segments[c].edges;
                let start = seg[0].0;
                fwd.iter().any(|&(v, p)| {
                    v == start && {
                        let end = seg.iter().fold(p, |q, &(_, l, _)| step(q, l));
                        back.contains(&(seg[seg.len() - 1].2, end))
                    }
                })
            })
            .collect()
    }
}

/// Words over `k` labels of exactly length `len`, in lexicographic order.
fn words_of_len(k: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out.into_iter().flat_map(|w| (0..k).map(move |c| {
            let mut w2 = w.clone();
            w2.push(c);
            w2
        })).collect();
    }
    out
}

/// Segments over `n_base` instance nodes: every single edge, then fresh
/// paths of length `2..=max_path_len` using at most `fresh_budget` fresh
/// nodes. When `free_nodes` is positive, that many extra fresh nodes may
/// carry arbitrary edges instead (each such edge is its own segment).
pub(crate) fn segments(n_base: usize, k: usize, fresh_budget: usize, max_path_len: usize, cap: usize) -> Result<Vec<Segment>> {
    let mut out = Vec::new();
    for x in 0..n_base {
        for c in 0..k {
            for y in 0..n_base {
                out.push(Segment { edges: vec![(x, c, y)], fresh: Vec::new() });
            }
        }
    }
    let mut next = n_base;
    for len in 2..=max_path_len.min(fresh_budget + 1) {
        for x in 0..n_base {
            for y in 0..n_base {
                for w in words_of_len(k, len) {
                    let fresh: Vec<usize> = (next..next + len - 1).collect();
                    next += len - 1;
                    let mut path = vec![x];
                    path.extend_from_slice(&fresh);
                    path.push(y);
                    let edges = w.iter().enumerate().map(|(i, &c)| (path[i], c, path[i + 1])).collect();
                    out.push(Segment { edges, fresh });
                    if out.len() > cap {
                        return Err(Error::BudgetExceeded(format!("more than {cap} candidate segments")));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Segments for databases on exactly `n_base + extra` nodes with arbitrary
/// edges: the extra nodes are always present.
pub(crate) fn all_edge_segments(n_total: usize, k: usize) -> Vec<Segment> {
    let mut out = Vec::new();
    for x in 0..n_total {
        for c in 0..k {
            for y in 0..n_total {
                out.push(Segment { edges: vec![(x, c, y)], fresh: Vec::new() });
            }
        }
    }
    out
}

pub(crate) fn fresh_names(taken: &BTreeSet<NodeId>, count: usize) -> Vec<NodeId> {
    let mut prefix = String::from("f");
    while taken.iter().any(|n| n.as_str().starts_with(&prefix)) {
        prefix.push('_');
    }
    (1..=count).map(|i| NodeId::new(format!("{prefix}{i}"))).collect()
}

/// Turns chosen segments into a database over `sigma`.
pub(crate) fn assemble(
    base: &[NodeId],
    sigma: &[Label],
    segs: &[Segment],
    chosen: &[usize],
    always: &[usize],
) -> GraphDb {
    let taken: BTreeSet<NodeId> = base.iter().cloned().collect();
    let mut fresh_ids: Vec<usize> = chosen.iter().flat_map(|&c| segs[c].fresh.iter().copied()).chain(always.iter().copied()).collect();
    fresh_ids.sort_unstable();
    fresh_ids.dedup();
    let names = fresh_names(&taken, fresh_ids.len());
    let name_of: HashMap<usize, NodeId> = fresh_ids.iter().copied().zip(names).collect();
    let node = |i: usize| if i < base.len() { base[i].clone() } else { name_of[&i].clone() };
    let mut g = GraphDb::new(sigma.iter().cloned());
    for n in base {
        g.add_node(n.clone());
    }
    for &i in always {
        g.add_node(node(i));
    }
    for &c in chosen {
        for &(s, l, d) in &segs[c].edges {
            g.add_edge(node(s), sigma[l].clone(), node(d)).expect("label from sigma");
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PreimageResult {
    Found(GraphDb),
    NotFoundWithinBound { max_nodes: usize },
}

#[derive(Clone, Debug)]
pub struct PreimageOptions {
    /// Longest fresh path segment; defaults to one more than the number of
    /// available fresh nodes.
    pub max_path_len: Option<usize>,
    pub search_limit: u64,
    pub segment_cap: usize,
}

impl Default for PreimageOptions {
    fn default() -> Self {
        PreimageOptions { max_path_len: None, search_limit: 2_000_000, segment_cap: 200_000 }
    }
}

pub(crate) fn instance_tuples(
    s: &ViewInstance,
    v: &ViewSpec,
    base: &[NodeId],
) -> Result<HashSet<(usize, usize, usize)>> {
    let pos: HashMap<&NodeId, usize> = base.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let vpos: HashMap<&Label, usize> = v.names().iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut req = HashSet::new();
    for e in s.edges() {
        let vi = *vpos.get(&e.label).ok_or_else(|| Error::AlphabetMismatch(format!("`{}` is not a view name", e.label)))?;
        req.insert((vi, pos[&e.src], pos[&e.dst]));
    }
    Ok(req)
}

/// Searches for a database on at most `max_nodes` nodes whose view image is
/// exactly `s`. The first preimage in the search order is returned.
pub fn find_preimage(s: &ViewInstance, v: &ViewSpec, max_nodes: usize) -> Result<PreimageResult> {
    find_preimage_with(s, v, max_nodes, &PreimageOptions::default())
}

pub fn find_preimage_with(s: &ViewInstance, v: &ViewSpec, max_nodes: usize, opts: &PreimageOptions) -> Result<PreimageResult> {
    let base: Vec<NodeId> = s.nodes().iter().cloned().collect();
    if base.len() > max_nodes {
        return Ok(PreimageResult::NotFoundWithinBound { max_nodes });
    }
    let sigma: Vec<Label> = v.sigma().iter().cloned().collect();
    let product = build_view_product(v.dfas())?;
    let fresh_budget = max_nodes - base.len();
    let max_len = opts.max_path_len.unwrap_or(fresh_budget + 1);
    let segs = segments(base.len(), sigma.len(), fresh_budget, max_len, opts.segment_cap)?;
    let required = instance_tuples(s, v, &base)?;
    let mut eng = Engine {
        n_base: base.len(),
        views: &product,
        segments: segs,
        required,
        exact: true,
        forbid: None,
        fresh_budget,
        limit: opts.search_limit,
        visited: 0,
    };
    match eng.run()? {
        None => Ok(PreimageResult::NotFoundWithinBound { max_nodes }),
        Some(chosen) => {
            let chosen = eng.reduce(chosen);
            let d = assemble(&base, &sigma, &eng.segments, &chosen, &[]);
            // Exactness is re-checked on the assembled database; the tuple set
            // of the instance must coincide with the image on every node.
            let img = apply_view(&d, v, false)?;
            if img.edges() != s.edges() || !img.nodes().is_subset(s.nodes()) {
                return Err(Error::CertificateFailure("assembled preimage has a different view image".into()));
            }
            Ok(PreimageResult::Found(d))
        }
    }
}

/// Answers the query on a view instance through a preimage: if some
/// database `D` with `V(D) = s` exists within the bound, returns `Q(D)`
/// restricted to the nodes of `s`.
pub fn rewrite_via_preimage(s: &ViewInstance, q: &QuerySpec, v: &ViewSpec, max_nodes: usize) -> Result<BTreeSet<(NodeId, NodeId)>> {
    match find_preimage(s, v, max_nodes)? {
        PreimageResult::Found(d) => Ok(rpq_eval(&d, q)?
            .into_iter()
            .filter(|(x, y)| s.contains_node(x) && s.contains_node(y))
            .collect()),
        PreimageResult::NotFoundWithinBound { .. } => Err(Error::NotAViewImage),
    }
}

/// The three-colourability encoding: colour-pair labels, a view accepting
/// every single label and a view detecting two consecutive edges whose
/// colours disagree at the shared node.
pub fn three_col_views() -> ViewSpec {
    let colours = ["r", "g", "b"];
    let mut labels = Vec::new();
    for a in colours {
        for b in colours {
            if a != b {
                labels.push(format!("{a}{b}"));
            }
        }
    }
    let v1 = labels.join(" | ");
    let mut v2 = Vec::new();
    for l1 in &labels {
        for l2 in &labels {
            if l1[1..] != l2[..1] {
                v2.push(format!("{l1} {l2}"));
            }
        }
    }
    let sigma: Vec<&str> = labels.iter().map(String::as_str).collect();
    ViewSpec::parse(&sigma, &[("V1", &v1), ("V2", &v2.join(" | "))]).expect("well-formed views")
}

/// Encodes an undirected graph (edges in either direction, any labels) as
/// a view instance: `V1` holds both orientations of every edge, `V2` is
/// empty. The graph must be connected.
pub fn gen_3col(g: &GraphDb) -> Result<(ViewSpec, ViewInstance)> {
    let nodes: Vec<&NodeId> = g.nodes().iter().collect();
    if !nodes.is_empty() {
        let mut adj: HashMap<&NodeId, Vec<&NodeId>> = HashMap::new();
        for e in g.edges() {
            adj.entry(&e.src).or_default().push(&e.dst);
            adj.entry(&e.dst).or_default().push(&e.src);
        }
        let mut seen = HashSet::from([nodes[0]]);
        let mut stack = vec![nodes[0]];
        while let Some(x) = stack.pop() {
            for &y in adj.get(x).into_iter().flatten() {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        if seen.len() != nodes.len() {
            return Err(Error::NotConnected);
        }
    }
    let v = three_col_views();
    let mut s = GraphDb::new(v.names().iter().cloned());
    for n in g.nodes() {
        s.add_node(n.clone());
    }
    for e in g.edges() {
        if e.src == e.dst {
            // A loop can never be properly coloured; keep it so no preimage exists.
            s.add_edge(e.src.clone(), "V1", e.dst.clone())?;
            continue;
        }
        s.add_edge(e.src.clone(), "V1", e.dst.clone())?;
        s.add_edge(e.dst.clone(), "V1", e.src.clone())?;
    }
    Ok((v, s))
}

/// Decides 3-colourability of a connected graph through the preimage search.
pub fn three_colorable_via_preimage(g: &GraphDb) -> Result<bool> {
    let (v, s) = gen_3col(g)?;
    Ok(matches!(find_preimage(&s, &v, g.num_nodes())?, PreimageResult::Found(_)))
}

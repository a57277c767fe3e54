//! Edge-labelled graph databases.
//!
//! A [`GraphDb`] is a finite set of nodes together with a set of labelled
//! edges over a declared alphabet. The same type serves for databases over
//! the base alphabet and for view instances over the view alphabet, where
//! each view name is just another label.
//!
//! Node ids are opaque strings; internally the search routines work on dense
//! indices assigned in sorted-name order, so "node id order" below always
//! means lexicographic order of the names.

mod bitset;
pub(crate) mod hom;
pub mod io;

pub use bitset::BitSet;

use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

macro_rules! string_newtype {
    ($name:ident) => {
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                $name(s.into())
            }
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }
    };
}

string_newtype!(Label);
string_newtype!(NodeId);

/// A word over some alphabet.
pub type Word = Vec<Label>;

/// Total or partial map between node sets.
pub type NodeMap = BTreeMap<NodeId, NodeId>;

/// Builds a word from whitespace-separated labels (`"a b a"`), or from
/// single-character labels when there is no whitespace (`"aba"`).
pub fn word(s: &str) -> Word {
    let s = s.trim();
    if s.is_empty() || s == "eps" {
        return Vec::new();
    }
    if s.contains(char::is_whitespace) {
        s.split_whitespace().map(Label::from).collect()
    } else {
        s.chars().map(|c| Label::new(c.to_string())).collect()
    }
}

/// Renders a word: labels are concatenated when all are single characters,
/// space-separated otherwise; the empty word prints as `eps`.
pub fn format_word(w: &[Label]) -> String {
    if w.is_empty() {
        return "eps".to_string();
    }
    let sep = if w.iter().all(|l| l.as_str().chars().count() == 1) { "" } else { " " };
    w.iter().map(Label::as_str).collect::<Vec<_>>().join(sep)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: NodeId,
    pub label: Label,
    pub dst: NodeId,
}

impl Edge {
    pub fn new(src: impl Into<NodeId>, label: impl Into<Label>, dst: impl Into<NodeId>) -> Self {
        Edge { src: src.into(), label: label.into(), dst: dst.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GraphDb {
    alphabet: BTreeSet<Label>,
    nodes: BTreeSet<NodeId>,
    edges: BTreeSet<Edge>,
}

impl GraphDb {
    pub fn new<L: Into<Label>>(alphabet: impl IntoIterator<Item = L>) -> Self {
        GraphDb {
            alphabet: alphabet.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    /// Builds a graph from `(src, label, dst)` triples; the alphabet is the
    /// set of labels used.
    pub fn from_edges<A, B, C>(edges: impl IntoIterator<Item = (A, B, C)>) -> Self
    where
        A: Into<NodeId>,
        B: Into<Label>,
        C: Into<NodeId>,
    {
        let mut g = GraphDb::default();
        for (s, l, d) in edges {
            let l: Label = l.into();
            g.alphabet.insert(l.clone());
            g.add_edge(s, l, d).expect("label was just declared");
        }
        g
    }

    pub fn alphabet(&self) -> &BTreeSet<Label> {
        &self.alphabet
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn extend_alphabet<L: Into<Label>>(&mut self, labels: impl IntoIterator<Item = L>) {
        self.alphabet.extend(labels.into_iter().map(Into::into));
    }

    pub fn add_node(&mut self, n: impl Into<NodeId>) -> bool {
        self.nodes.insert(n.into())
    }

    /// Adds an edge, declaring its endpoints as nodes if needed.
    pub fn add_edge(
        &mut self,
        src: impl Into<NodeId>,
        label: impl Into<Label>,
        dst: impl Into<NodeId>,
    ) -> Result<bool> {
        let e = Edge { src: src.into(), label: label.into(), dst: dst.into() };
        if !self.alphabet.contains(&e.label) {
            return Err(Error::UnknownLabel(e.label.0));
        }
        self.nodes.insert(e.src.clone());
        self.nodes.insert(e.dst.clone());
        Ok(self.edges.insert(e))
    }

    pub fn contains_node(&self, n: &NodeId) -> bool {
        self.nodes.contains(n)
    }

    pub fn contains_edge(&self, src: &str, label: &str, dst: &str) -> bool {
        self.edges.contains(&Edge::new(src, label, dst))
    }

    pub fn remove_edge(&mut self, e: &Edge) -> bool {
        self.edges.remove(e)
    }

    /// True if every edge of `self` is an edge of `other` (node sets and
    /// alphabets are ignored).
    pub fn edges_subset_of(&self, other: &GraphDb) -> bool {
        self.edges.is_subset(&other.edges)
    }

    /// Disjoint-union-free merge: adds all nodes, labels and edges of `other`.
    pub fn merge(&mut self, other: &GraphDb) {
        self.alphabet.extend(other.alphabet.iter().cloned());
        self.nodes.extend(other.nodes.iter().cloned());
        self.edges.extend(other.edges.iter().cloned());
    }

    /// Returns a copy with every node renamed through `f`.
    pub fn rename_nodes(&self, mut f: impl FnMut(&NodeId) -> NodeId) -> GraphDb {
        let map: BTreeMap<&NodeId, NodeId> = self.nodes.iter().map(|n| (n, f(n))).collect();
        GraphDb {
            alphabet: self.alphabet.clone(),
            nodes: map.values().cloned().collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge { src: map[&e.src].clone(), label: e.label.clone(), dst: map[&e.dst].clone() })
                .collect(),
        }
    }

    pub(crate) fn index(&self) -> Indexed {
        Indexed::new(self)
    }
}

/// Dense-index view of a graph: nodes in sorted order, labels in sorted order.
#[derive(Clone, Debug)]
pub(crate) struct Indexed {
    pub names: Vec<NodeId>,
    pub pos: HashMap<NodeId, usize>,
    pub labels: Vec<Label>,
    pub label_pos: HashMap<Label, usize>,
    /// `out[l][x]`: successors of `x` along label `l`, ascending.
    pub out: Vec<Vec<Vec<usize>>>,
    /// (src, label, dst) triples, ascending.
    pub edges: Vec<(usize, usize, usize)>,
}

impl Indexed {
    pub fn new(g: &GraphDb) -> Self {
        let names: Vec<NodeId> = g.nodes.iter().cloned().collect();
        let pos: HashMap<NodeId, usize> = names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        let labels: Vec<Label> = g.alphabet.iter().cloned().collect();
        let label_pos: HashMap<Label, usize> =
            labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        let mut out = vec![vec![Vec::new(); names.len()]; labels.len()];
        let mut edges = Vec::with_capacity(g.edges.len());
        for e in &g.edges {
            let (s, l, d) = (pos[&e.src], label_pos[&e.label], pos[&e.dst]);
            out[l][s].push(d);
            edges.push((s, l, d));
        }
        edges.sort_unstable();
        for row in out.iter_mut().flatten() {
            row.sort_unstable();
        }
        Indexed { names, pos, labels, label_pos, out, edges }
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }
}

/// A path in a graph: `nodes.len() == labels.len() + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub labels: Vec<Label>,
}

impl Path {
    pub fn word(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// The substructure induced by `nodes`.
pub fn induced(db: &GraphDb, nodes: &BTreeSet<NodeId>) -> Result<GraphDb> {
    if let Some(n) = nodes.iter().find(|n| !db.nodes.contains(*n)) {
        return Err(Error::UnknownNode(n.0.clone()));
    }
    Ok(GraphDb {
        alphabet: db.alphabet.clone(),
        nodes: nodes.clone(),
        edges: db
            .edges
            .iter()
            .filter(|e| nodes.contains(&e.src) && nodes.contains(&e.dst))
            .cloned()
            .collect(),
    })
}

/// Checks that `map` is a total homomorphism from `src` to `dst`.
pub fn is_hom(map: &NodeMap, src: &GraphDb, dst: &GraphDb) -> Result<bool> {
    for n in &src.nodes {
        match map.get(n) {
            None => return Err(Error::PartialMap(n.0.clone())),
            Some(t) if !dst.nodes.contains(t) => return Err(Error::UnknownNode(t.0.clone())),
            Some(_) => {}
        }
    }
    Ok(src.edges.iter().all(|e| {
        dst.edges.contains(&Edge { src: map[&e.src].clone(), label: e.label.clone(), dst: map[&e.dst].clone() })
    }))
}

/// Finds a homomorphism `src -> dst` extending `pin` and respecting the
/// optional per-node candidate sets `allowed`.
///
/// The search is complete: `None` means no homomorphism exists. Variables
/// are chosen smallest-domain-first with ties broken by node id, values are
/// tried in node id order, and domains are kept arc consistent after every
/// assignment. The returned map is re-checked with [`is_hom`].
pub fn find_hom(
    src: &GraphDb,
    dst: &GraphDb,
    pin: &NodeMap,
    allowed: &BTreeMap<NodeId, BTreeSet<NodeId>>,
) -> Result<Option<NodeMap>> {
    let si = src.index();
    let target = hom::Target::new(dst);
    let mut domains = vec![BitSet::full(target.n()); si.n()];
    for (x, ts) in allowed {
        let xi = *si.pos.get(x).ok_or_else(|| Error::UnknownNode(x.0.clone()))?;
        let mut d = BitSet::new(target.n());
        for t in ts {
            d.insert(target.node(t)?);
        }
        domains[xi].intersect_with(&d);
    }
    for (x, t) in pin {
        let xi = *si.pos.get(x).ok_or_else(|| Error::UnknownNode(x.0.clone()))?;
        let ti = target.node(t)?;
        let keep = domains[xi].contains(ti);
        domains[xi] = BitSet::new(target.n());
        if keep {
            domains[xi].insert(ti);
        }
    }
    let found = hom::Problem::new(&si, &target).first(domains);
    let Some(assign) = found else { return Ok(None) };
    let map: NodeMap =
        assign.iter().enumerate().map(|(x, &t)| (si.names[x].clone(), target.names[t].clone())).collect();
    debug_assert!(is_hom(&map, src, dst)?);
    if !is_hom(&map, src, dst)? {
        return Err(Error::CertificateFailure("hom search returned a non-homomorphism".into()));
    }
    Ok(Some(map))
}

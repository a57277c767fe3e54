//! Regular path query evaluation and view application.

use crate::automata::{build_view_product, parse_regex, to_min_dfa, Automaton, Dfa, ProductDfa, RegexAst};
use crate::error::{Error, Result};
use crate::graph::{GraphDb, Indexed, Label, NodeId};
use std::collections::{BTreeMap, BTreeSet};

/// A set of regular views over a base alphabet. The view names form the
/// alphabet of view instances, in declaration order.
#[derive(Clone, Debug)]
pub struct ViewSpec {
    sigma: BTreeSet<Label>,
    names: Vec<Label>,
    /// Source expression of each view; absent for views given directly as
    /// automata.
    defs: Vec<Option<RegexAst>>,
    dfas: Vec<Dfa>,
}

impl ViewSpec {
    pub fn new(sigma: BTreeSet<Label>, defs: Vec<(Label, RegexAst)>) -> Result<Self> {
        check_names(defs.iter().map(|(n, _)| n))?;
        let dfas = defs.iter().map(|(_, a)| to_min_dfa(a, &sigma)).collect::<Result<Vec<_>>>()?;
        let (names, defs): (Vec<Label>, Vec<RegexAst>) = defs.into_iter().unzip();
        Ok(ViewSpec { sigma, names, defs: defs.into_iter().map(Some).collect(), dfas })
    }

    /// Views given by automata over `sigma`; each is minimized.
    pub fn from_dfas(sigma: BTreeSet<Label>, views: Vec<(Label, Dfa)>) -> Result<Self> {
        check_names(views.iter().map(|(n, _)| n))?;
        let letters: Vec<Label> = sigma.iter().cloned().collect();
        if let Some((n, _)) = views.iter().find(|(_, d)| d.alphabet() != letters.as_slice()) {
            return Err(Error::AlphabetMismatch(format!("automaton of view `{n}` is not over the base alphabet")));
        }
        let (names, dfas): (Vec<Label>, Vec<Dfa>) = views.into_iter().map(|(n, d)| (n, d.minimize())).unzip();
        Ok(ViewSpec { sigma, defs: vec![None; names.len()], names, dfas })
    }

    /// Convenience constructor from regex source text.
    pub fn parse(sigma: &[&str], defs: &[(&str, &str)]) -> Result<Self> {
        let sigma: BTreeSet<Label> = sigma.iter().map(|s| Label::from(*s)).collect();
        let defs = defs
            .iter()
            .map(|(n, re)| Ok((Label::from(*n), parse_regex(re, &sigma)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sigma, defs)
    }

    pub fn sigma(&self) -> &BTreeSet<Label> {
        &self.sigma
    }

    pub fn names(&self) -> &[Label] {
        &self.names
    }

    pub fn defs(&self) -> &[Option<RegexAst>] {
        &self.defs
    }

    pub fn dfas(&self) -> &[Dfa] {
        &self.dfas
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn tau(&self) -> BTreeSet<Label> {
        self.names.iter().cloned().collect()
    }

    pub fn product(&self) -> ProductDfa {
        build_view_product(&self.dfas).expect("view set is nonempty and shares one alphabet")
    }

    /// Number of reachable states of the view product.
    pub fn n_of_v(&self) -> usize {
        self.product().n_of_v()
    }
}

fn check_names<'a>(names: impl Iterator<Item = &'a Label>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(Error::Invalid(format!("view `{n}` defined twice")));
        }
    }
    if seen.is_empty() {
        return Err(Error::EmptyViewSet);
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct QuerySpec {
    sigma: BTreeSet<Label>,
    ast: RegexAst,
    dfa: Dfa,
}

impl QuerySpec {
    pub fn new(sigma: BTreeSet<Label>, ast: RegexAst) -> Result<Self> {
        let dfa = to_min_dfa(&ast, &sigma)?;
        Ok(QuerySpec { sigma, ast, dfa })
    }

    pub fn parse(sigma: &[&str], re: &str) -> Result<Self> {
        let sigma: BTreeSet<Label> = sigma.iter().map(|s| Label::from(*s)).collect();
        let ast = parse_regex(re, &sigma)?;
        Self::new(sigma, ast)
    }

    pub fn sigma(&self) -> &BTreeSet<Label> {
        &self.sigma
    }

    pub fn ast(&self) -> &RegexAst {
        &self.ast
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }
}

/// A database over the view alphabet.
pub type ViewInstance = GraphDb;

fn check_alphabet(db: &GraphDb, sigma: &BTreeSet<Label>) -> Result<()> {
    match db.edges().iter().find(|e| !sigma.contains(&e.label)) {
        Some(e) => Err(Error::AlphabetMismatch(format!("label `{}` is not in the query alphabet", e.label))),
        None => Ok(()),
    }
}

/// Pairs `(x, y)` of node indices joined by a path whose label is accepted
/// by `dfa`, via reachability in the product of the graph with the DFA.
pub(crate) fn eval_indexed(ix: &Indexed, dfa: &Dfa) -> Vec<(usize, usize)> {
    let lmap: Vec<Option<usize>> = ix.labels.iter().map(|l| dfa.label_index(l)).collect();
    let ns = dfa.num_states();
    let dead = dfa.dead_states();
    let mut out = Vec::new();
    let mut seen = vec![false; ix.n() * ns];
    for x in 0..ix.n() {
        seen.iter_mut().for_each(|s| *s = false);
        let start = dfa.initial();
        if dead.contains(&start) {
            continue;
        }
        seen[x * ns + start] = true;
        let mut stack = vec![(x, start)];
        let mut hits = BTreeSet::new();
        while let Some((v, q)) = stack.pop() {
            if dfa.is_final(q) {
                hits.insert(v);
            }
            for (l, succ) in ix.out.iter().enumerate() {
                let Some(c) = lmap[l] else { continue };
                let q2 = dfa.step(q, c);
                if dead.contains(&q2) {
                    continue;
                }
                for &w in &succ[v] {
                    if !seen[w * ns + q2] {
                        seen[w * ns + q2] = true;
                        stack.push((w, q2));
                    }
                }
            }
        }
        out.extend(hits.into_iter().map(|y| (x, y)));
    }
    out
}

/// Evaluates a regular path query; the result is sorted.
pub fn rpq_eval(db: &GraphDb, q: &QuerySpec) -> Result<BTreeSet<(NodeId, NodeId)>> {
    check_alphabet(db, &q.sigma)?;
    let ix = db.index();
    Ok(eval_indexed(&ix, &q.dfa).into_iter().map(|(x, y)| (ix.names[x].clone(), ix.names[y].clone())).collect())
}

/// Materializes every view on `db`. The node set of the result is the set
/// of nodes occurring in some view tuple, or all nodes of `db` when
/// `keep_all_nodes` is set.
pub fn apply_view(db: &GraphDb, v: &ViewSpec, keep_all_nodes: bool) -> Result<ViewInstance> {
    check_alphabet(db, &v.sigma)?;
    let ix = db.index();
    let mut out = GraphDb::new(v.names.iter().cloned());
    if keep_all_nodes {
        for n in db.nodes() {
            out.add_node(n.clone());
        }
    }
    for (name, dfa) in v.names.iter().zip(&v.dfas) {
        for (x, y) in eval_indexed(&ix, dfa) {
            out.add_edge(ix.names[x].clone(), name.clone(), ix.names[y].clone())?;
        }
    }
    Ok(out)
}

/// Name of position `i` on a path database.
pub fn path_node(i: usize) -> NodeId {
    NodeId::new(format!("p{i}"))
}

/// The path database `p0 -w1-> p1 ... -wn-> pn`.
pub fn path_of_word(w: &[Label]) -> GraphDb {
    let mut g = GraphDb::new(w.iter().cloned());
    g.add_node(path_node(0));
    for (i, l) in w.iter().enumerate() {
        g.add_edge(path_node(i), l.clone(), path_node(i + 1)).expect("label declared");
    }
    g
}

/// Partition of path positions `0..=k`; classes are sorted and listed in
/// order of their least element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimPartition {
    pub k: usize,
    pub classes: Vec<Vec<usize>>,
}

impl SimPartition {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn same_class(&self, i: usize, j: usize) -> bool {
        self.classes.iter().any(|c| c.contains(&i) && c.contains(&j))
    }
}

/// Positions `i, j <= k` of the path for `w` are equivalent when, for every
/// view and every `r >= k`, the view holds on `(i, r)` exactly when it holds
/// on `(j, r)`. Computed by direct membership tests on every factor.
pub fn sim_classes(w: &[Label], v: &ViewSpec, k: usize) -> Result<SimPartition> {
    if k > w.len() {
        return Err(Error::IndexOutOfRange { index: k, len: w.len() });
    }
    let mut groups: BTreeMap<Vec<Vec<bool>>, Vec<usize>> = BTreeMap::new();
    for i in 0..=k {
        let sig: Vec<Vec<bool>> =
            v.dfas.iter().map(|d| (k..=w.len()).map(|r| d.accepts(&w[i..r])).collect()).collect();
        groups.entry(sig).or_default().push(i);
    }
    let mut classes: Vec<Vec<usize>> = groups.into_values().collect();
    classes.sort();
    Ok(SimPartition { k, classes })
}

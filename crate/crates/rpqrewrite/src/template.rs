//! The constraint template of a query under a view set.
//!
//! Nodes of the template are sets of states of the query's minimal DFA.
//! There is an edge `V(d1, d2)` when some word `w` of `V` maps every state
//! of `d1` into `d2`. Sources are the sets containing the initial state and
//! targets are the sets avoiding all accepting states. A pair `(u, v)` of a
//! view instance is a certain answer exactly when the instance has no
//! homomorphism into the template sending `u` to a source and `v` to a
//! target.

use crate::automata::{Automaton, Dfa};
use crate::error::{Error, Result};
use crate::graph::hom::{Problem, Target};
use crate::graph::io::serialize_graph;
use crate::graph::{format_word, BitSet, Edge, GraphDb, Indexed, Label, NodeId, NodeMap, Word};
use crate::rpq::{apply_view, rpq_eval, QuerySpec, ViewInstance, ViewSpec};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

/// Largest query automaton for which the full subset template is built.
pub const MAX_QUERY_STATES: usize = 16;

#[derive(Clone, Debug)]
pub struct Template {
    pub graph: GraphDb,
    pub sources: BTreeSet<NodeId>,
    pub targets: BTreeSet<NodeId>,
    /// Shortest nonempty witness word of every edge (length first, then
    /// lexicographic).
    pub witnesses: BTreeMap<Edge, Word>,
    pub q_dfa: Dfa,
    subsets: BTreeMap<NodeId, BTreeSet<usize>>,
    pinned: PinnedTarget,
}

/// A target structure with distinguished source and target nodes, in the
/// indexed form used by the homomorphism and game solvers.
#[derive(Clone, Debug)]
pub struct PinnedTarget {
    pub(crate) target: Target,
    pub(crate) src: BitSet,
    pub(crate) tgt: BitSet,
    /// Labels whose loops in an instance impose nothing (views accepting
    /// the empty word); such loops are dropped before solving.
    vacuous: BTreeSet<Label>,
}

impl PinnedTarget {
    pub fn new(graph: &GraphDb, sources: &BTreeSet<NodeId>, targets: &BTreeSet<NodeId>) -> Result<Self> {
        let target = Target::new(graph);
        let bits = |ns: &BTreeSet<NodeId>| -> Result<BitSet> {
            let mut b = BitSet::new(target.n());
            for n in ns {
                b.insert(target.node(n)?);
            }
            Ok(b)
        };
        let (src, tgt) = (bits(sources)?, bits(targets)?);
        Ok(PinnedTarget { target, src, tgt, vacuous: BTreeSet::new() })
    }

    /// Marks labels whose instance loops are ignored.
    pub fn with_vacuous_loops(mut self, labels: impl IntoIterator<Item = Label>) -> Self {
        self.vacuous = labels.into_iter().collect();
        self
    }

    pub fn vacuous_loops(&self) -> &BTreeSet<Label> {
        &self.vacuous
    }

    /// The instance without its vacuous loops.
    pub fn normalize(&self, s: &GraphDb) -> GraphDb {
        let mut out = s.clone();
        if !self.vacuous.is_empty() {
            for e in s.edges() {
                if e.src == e.dst && self.vacuous.contains(&e.label) {
                    out.remove_edge(e);
                }
            }
        }
        out
    }

    pub fn num_nodes(&self) -> usize {
        self.target.n()
    }

    pub fn node_name(&self, i: usize) -> &NodeId {
        &self.target.names[i]
    }

    pub fn sources(&self) -> BTreeSet<NodeId> {
        self.src.iter().map(|i| self.target.names[i].clone()).collect()
    }

    pub fn targets(&self) -> BTreeSet<NodeId> {
        self.tgt.iter().map(|i| self.target.names[i].clone()).collect()
    }
}

/// Reads a template dump (graph lines plus `source`, `target`,
/// `vacuous_loops` and `witness` lines). Witnesses are checked for shape
/// only.
pub fn parse_template_dump(text: &str) -> Result<PinnedTarget> {
    let mut sources = BTreeSet::new();
    let mut targets = BTreeSet::new();
    let mut vacuous = BTreeSet::new();
    let graph = crate::graph::io::parse_with(text, |ln, toks| match toks[0] {
        "source" | "target" => {
            if toks.len() != 2 {
                return Err(Error::parse(ln, format!("expected `{} <node>`", toks[0])));
            }
            let set = if toks[0] == "source" { &mut sources } else { &mut targets };
            set.insert(NodeId::from(toks[1]));
            Ok(true)
        }
        "vacuous_loops" => {
            vacuous.extend(toks[1..].iter().map(|l| Label::from(*l)));
            Ok(true)
        }
        "witness" => {
            if toks.len() < 6 || toks[4] != "=" {
                return Err(Error::parse(ln, "expected `witness <d1> <label> <d2> = <word>`"));
            }
            Ok(true)
        }
        _ => Ok(false),
    })?;
    if let Some(l) = vacuous.iter().find(|l| !graph.alphabet().contains(*l)) {
        return Err(Error::UnknownLabel(l.to_string()));
    }
    Ok(PinnedTarget::new(&graph, &sources, &targets)?.with_vacuous_loops(vacuous))
}

/// Canonical node name of a state set: `d` followed by `_i` per state.
pub fn subset_name(states: &BTreeSet<usize>) -> NodeId {
    let mut s = String::from("d");
    for q in states {
        s.push_str(&format!("_{q}"));
    }
    NodeId::new(s)
}

fn mask_set(mask: u32, n: usize) -> BTreeSet<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

/// Shortest nonempty words of `dfa_v` leading from `d1` to each reachable
/// set, minimal in (length, lexicographic) order.
fn images(lift: &[Vec<u32>], dfa_v: &Dfa, d1: u32) -> BTreeMap<u32, Word> {
    // BFS over (set, view state, started); the start node has read nothing.
    let k = dfa_v.alphabet().len();
    let start = (d1, dfa_v.initial(), false);
    let mut parent: HashMap<(u32, usize, bool), Option<((u32, usize, bool), usize)>> = HashMap::from([(start, None)]);
    let mut order = VecDeque::from([start]);
    let mut found: BTreeMap<u32, Word> = BTreeMap::new();
    let dead = dfa_v.dead_states();
    while let Some(node) = order.pop_front() {
        let (m, q, started) = node;
        if started && dfa_v.is_final(q) && !found.contains_key(&m) {
            let mut w = Vec::new();
            let mut cur = node;
            while let Some(Some((prev, c))) = parent.get(&cur) {
                w.push(dfa_v.alphabet()[*c].clone());
                cur = *prev;
            }
            w.reverse();
            found.insert(m, w);
        }
        for c in 0..k {
            let q2 = dfa_v.step(q, c);
            if dead.contains(&q2) {
                continue;
            }
            let next = (lift[c][m as usize], q2, true);
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                e.insert(Some((node, c)));
                order.push_back(next);
            }
        }
    }
    found
}

fn better(a: &Word, b: &Word) -> bool {
    (a.len(), a) < (b.len(), b)
}

/// Builds the full subset template.
pub fn build_template(q: &QuerySpec, v: &ViewSpec) -> Result<Template> {
    if q.sigma() != v.sigma() {
        return Err(Error::AlphabetMismatch("query and views use different base alphabets".into()));
    }
    let dfa = q.dfa().clone();
    let n = dfa.num_states();
    if n > MAX_QUERY_STATES {
        return Err(Error::TemplateTooLarge(format!(
            "query automaton has {n} states; the subset template is limited to {MAX_QUERY_STATES}"
        )));
    }
    let full = 1u32 << n;
    let k = dfa.alphabet().len();
    let lift: Vec<Vec<u32>> = (0..k)
        .map(|c| {
            (0..full)
                .map(|m| (0..n).filter(|i| m >> i & 1 == 1).fold(0u32, |acc, s| acc | 1 << dfa.step(s, c)))
                .collect()
        })
        .collect();
    let names: Vec<NodeId> = (0..full).map(|m| subset_name(&mask_set(m, n))).collect();
    let mut graph = GraphDb::new(v.names().iter().cloned());
    for nm in &names {
        graph.add_node(nm.clone());
    }
    let mut witnesses = BTreeMap::new();
    let mut vacuous = BTreeSet::new();
    // Edges come from nonempty words only: a view tuple between distinct
    // nodes needs a nonempty path, and a loop of a view accepting the empty
    // word holds in every database, so such loops are dropped from
    // instances instead.
    for (name, dfa_v) in v.names().iter().zip(v.dfas()) {
        if dfa_v.is_final(dfa_v.initial()) {
            vacuous.insert(name.clone());
        }
        let rows: Vec<(u32, Vec<(u32, Word)>)> = (0..full)
            .into_par_iter()
            .map(|d1| {
                let imgs = images(&lift, dfa_v, d1);
                let mut row = Vec::new();
                for d2 in 0..full {
                    let best = imgs.iter().filter(|(m, _)| **m & !d2 == 0).map(|(_, w)| w).fold(None::<&Word>, |acc, w| match acc {
                        Some(a) if !better(w, a) => Some(a),
                        _ => Some(w),
                    });
                    if let Some(w) = best {
                        row.push((d2, w.clone()));
                    }
                }
                (d1, row)
            })
            .collect();
        for (d1, row) in rows {
            for (d2, w) in row {
                let e = Edge { src: names[d1 as usize].clone(), label: name.clone(), dst: names[d2 as usize].clone() };
                graph.add_edge(e.src.clone(), e.label.clone(), e.dst.clone())?;
                witnesses.insert(e, w);
            }
        }
    }
    let init = dfa.initial();
    let finals_mask = dfa.finals().iter().fold(0u32, |a, &s| a | 1 << s);
    let sources = (0..full).filter(|m| m >> init & 1 == 1).map(|m| names[m as usize].clone()).collect();
    let targets = (0..full).filter(|m| m & finals_mask == 0).map(|m| names[m as usize].clone()).collect();
    let subsets = (0..full).map(|m| (names[m as usize].clone(), mask_set(m, n))).collect();
    Ok(Template::assemble(graph, sources, targets, witnesses, vacuous, dfa, subsets))
}

impl Template {
    fn assemble(
        graph: GraphDb,
        sources: BTreeSet<NodeId>,
        targets: BTreeSet<NodeId>,
        witnesses: BTreeMap<Edge, Word>,
        vacuous: BTreeSet<Label>,
        q_dfa: Dfa,
        subsets: BTreeMap<NodeId, BTreeSet<usize>>,
    ) -> Self {
        let pinned = PinnedTarget::new(&graph, &sources, &targets)
            .expect("sources and targets are template nodes")
            .with_vacuous_loops(vacuous);
        Template { graph, sources, targets, witnesses, q_dfa, subsets, pinned }
    }

    pub fn num_nodes(&self) -> usize {
        self.graph.num_nodes()
    }

    /// The query states a node stands for.
    pub fn subset(&self, node: &NodeId) -> Option<&BTreeSet<usize>> {
        self.subsets.get(node)
    }

    pub fn pinned(&self) -> &PinnedTarget {
        &self.pinned
    }

    pub(crate) fn hom_target(&self) -> &Target {
        &self.pinned.target
    }

    pub(crate) fn source_bits(&self) -> BitSet {
        self.pinned.src.clone()
    }

    pub(crate) fn target_bits(&self) -> BitSet {
        self.pinned.tgt.clone()
    }

    /// Restriction to a node subset (keeps witnesses of surviving edges).
    fn restrict(&self, keep: &BTreeSet<NodeId>) -> Template {
        let graph = crate::graph::induced(&self.graph, keep).expect("nodes come from the template");
        let witnesses = self.witnesses.iter().filter(|(e, _)| graph.edges().contains(e)).map(|(e, w)| (e.clone(), w.clone())).collect();
        Template::assemble(
            graph,
            self.sources.intersection(keep).cloned().collect(),
            self.targets.intersection(keep).cloned().collect(),
            witnesses,
            self.pinned.vacuous.clone(),
            self.q_dfa.clone(),
            self.subsets.iter().filter(|(n, _)| keep.contains(*n)).map(|(n, s)| (n.clone(), s.clone())).collect(),
        )
    }

    /// Graph format plus `source`, `target`, `vacuous_loops` and `witness`
    /// lines.
    pub fn dump(&self) -> String {
        let mut out = serialize_graph(&self.graph);
        if !self.pinned.vacuous.is_empty() {
            let ls: Vec<&str> = self.pinned.vacuous.iter().map(Label::as_str).collect();
            out.push_str(&format!("vacuous_loops {}\n", ls.join(" ")));
        }
        for s in &self.sources {
            out.push_str(&format!("source {s}\n"));
        }
        for t in &self.targets {
            out.push_str(&format!("target {t}\n"));
        }
        for (e, w) in &self.witnesses {
            out.push_str(&format!("witness {} {} {} = {}\n", e.src, e.label, e.dst, format_word(w)));
        }
        out
    }
}

/// Shrinks the template by retractions that keep sources inside sources and
/// targets inside targets, so certain answers are unchanged.
///
/// First a node is repeatedly folded onto another node that dominates it
/// (every edge of the folded node is also present at the other). Then, for
/// templates of at most `endo_limit` nodes, a general endomorphism avoiding
/// one node is searched for; its image replaces the template.
pub fn template_core(t: &Template) -> Template {
    template_core_with(t, 128, 20_000)
}

pub fn template_core_with(t: &Template, endo_limit: usize, search_budget: u64) -> Template {
    let mut cur = t.clone();
    loop {
        let before = cur.num_nodes();
        cur = fold_dominated(&cur);
        if cur.num_nodes() <= endo_limit {
            if let Some(smaller) = shrink_by_endomorphism(&cur, search_budget) {
                cur = smaller;
            }
        }
        if cur.num_nodes() == before {
            return cur;
        }
    }
}

fn fold_dominated(t: &Template) -> Template {
    let ix = Indexed::new(&t.graph);
    let n = ix.n();
    let nl = ix.labels.len();
    let is_src: Vec<bool> = ix.names.iter().map(|x| t.sources.contains(x)).collect();
    let is_tgt: Vec<bool> = ix.names.iter().map(|x| t.targets.contains(x)).collect();
    let edges: std::collections::HashSet<(usize, usize, usize)> = ix.edges.iter().copied().collect();
    let mut inc: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n];
    for &(s, l, d) in &ix.edges {
        inc[s].push((s, l, d));
        if d != s {
            inc[d].push((s, l, d));
        }
    }
    let mut alive = vec![true; n];
    let _ = nl;
    // Fold higher-indexed nodes first so that small names survive.
    for x in (0..n).rev() {
        for y in 0..n {
            if y == x || !alive[y] {
                continue;
            }
            if (is_src[x] && !is_src[y]) || (is_tgt[x] && !is_tgt[y]) {
                continue;
            }
            let f = |z: usize| if z == x { y } else { z };
            let ok = inc[x].iter().all(|&(s, l, d)| {
                if (s != x && !alive[s]) || (d != x && !alive[d]) {
                    return true;
                }
                edges.contains(&(f(s), l, f(d)))
            });
            if ok {
                alive[x] = false;
                break;
            }
        }
    }
    let keep: BTreeSet<NodeId> = (0..n).filter(|&i| alive[i]).map(|i| ix.names[i].clone()).collect();
    t.restrict(&keep)
}

fn shrink_by_endomorphism(t: &Template, budget: u64) -> Option<Template> {
    let ix = Indexed::new(&t.graph);
    let target = t.hom_target();
    let n = ix.n();
    let src = t.source_bits();
    let tgt = t.target_bits();
    for avoid in (0..n).rev() {
        let mut domains = Vec::with_capacity(n);
        for x in 0..n {
            let mut d = BitSet::full(n);
            d.remove(avoid);
            if src.contains(x) {
                d.intersect_with(&src);
            }
            if tgt.contains(x) {
                d.intersect_with(&tgt);
            }
            domains.push(d);
        }
        let mut p = Problem::new(&ix, target);
        p.limit = Some(budget);
        let mut found = None;
        let res = p.for_each(domains, &mut |a| {
            found = Some(a.to_vec());
            std::ops::ControlFlow::Break(())
        });
        if res.is_err() {
            continue;
        }
        if let Some(a) = found {
            let keep: BTreeSet<NodeId> = a.iter().map(|&i| ix.names[i].clone()).collect();
            return Some(t.restrict(&keep));
        }
    }
    None
}

/// Result of a certain-answer test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertVerdict {
    pub certain: bool,
    /// A homomorphism to the template sending `u` to a source and `v` to a
    /// target; present exactly when the pair is not certain.
    pub witness_hom: Option<NodeMap>,
}

struct CertSearch<'a> {
    ix: Indexed,
    t: &'a PinnedTarget,
    src: BitSet,
    tgt: BitSet,
}

impl<'a> CertSearch<'a> {
    fn new(s: &ViewInstance, t: &'a PinnedTarget) -> Result<Self> {
        if let Some(e) = s.edges().iter().find(|e| !t.target.label_pos.contains_key(&e.label)) {
            return Err(Error::AlphabetMismatch(format!("instance label `{}` is not a view name", e.label)));
        }
        Ok(CertSearch { ix: t.normalize(s).index(), t, src: t.src.clone(), tgt: t.tgt.clone() })
    }

    fn node(&self, n: &NodeId) -> Result<usize> {
        self.ix.pos.get(n).copied().ok_or_else(|| Error::UnknownNode(n.to_string()))
    }

    fn hom(&self, pins: &[(usize, &BitSet)]) -> Option<Vec<usize>> {
        let tn = self.t.target.n();
        let mut domains = vec![BitSet::full(tn); self.ix.n()];
        for &(x, d) in pins {
            domains[x].intersect_with(d);
        }
        Problem::new(&self.ix, &self.t.target).first(domains)
    }

    fn to_map(&self, a: &[usize]) -> NodeMap {
        a.iter().enumerate().map(|(x, &t)| (self.ix.names[x].clone(), self.t.target.names[t].clone())).collect()
    }
}

/// Decides whether `(u, v)` is a certain answer on `s`.
pub fn cert(s: &ViewInstance, u: &NodeId, v: &NodeId, t: &Template) -> Result<CertVerdict> {
    cert_pinned(s, u, v, t.pinned())
}

/// [`cert`] against an arbitrary pinned target.
pub fn cert_pinned(s: &ViewInstance, u: &NodeId, v: &NodeId, t: &PinnedTarget) -> Result<CertVerdict> {
    let cs = CertSearch::new(s, t)?;
    let (ui, vi) = (cs.node(u)?, cs.node(v)?);
    match cs.hom(&[(ui, &cs.src), (vi, &cs.tgt)]) {
        Some(a) => Ok(CertVerdict { certain: false, witness_hom: Some(cs.to_map(&a)) }),
        None => Ok(CertVerdict { certain: true, witness_hom: None }),
    }
}

/// All certain pairs over the nodes of `s`.
pub fn cert_all(s: &ViewInstance, t: &Template) -> Result<BTreeSet<(NodeId, NodeId)>> {
    cert_all_pinned(s, t.pinned())
}

pub fn cert_all_pinned(s: &ViewInstance, t: &PinnedTarget) -> Result<BTreeSet<(NodeId, NodeId)>> {
    let cs = CertSearch::new(s, t)?;
    let n = cs.ix.n();
    let mut refuted = vec![vec![false; n]; n];
    let mut out = BTreeSet::new();
    for u in 0..n {
        for v in 0..n {
            if refuted[u][v] {
                continue;
            }
            match cs.hom(&[(u, &cs.src), (v, &cs.tgt)]) {
                Some(a) => {
                    // One homomorphism refutes every pair it sends to (source, target).
                    for x in 0..n {
                        if cs.src.contains(a[x]) {
                            for y in 0..n {
                                if cs.tgt.contains(a[y]) {
                                    refuted[x][y] = true;
                                }
                            }
                        }
                    }
                }
                None => {
                    out.insert((cs.ix.names[u].clone(), cs.ix.names[v].clone()));
                }
            }
        }
    }
    Ok(out)
}

fn fresh_namer(taken: &BTreeSet<NodeId>) -> impl FnMut() -> NodeId + '_ {
    let mut prefix = String::from("m");
    while taken.iter().any(|n| n.as_str().starts_with(&prefix)) {
        prefix.push('_');
    }
    let mut k = 0usize;
    move || {
        k += 1;
        NodeId::new(format!("{prefix}{k}"))
    }
}

/// Builds a database witnessing that `(u, v)` is not certain: the nodes of
/// `s`, plus for every view tuple a fresh path labelled by the witness word
/// of its image edge under `hom`. The result is checked to contain `s` in
/// its view image and to miss `(u, v)` in the query answer.
pub fn materialize_counterexample(
    s: &ViewInstance,
    u: &NodeId,
    v: &NodeId,
    t: &Template,
    hom: &NodeMap,
    q: &QuerySpec,
    views: &ViewSpec,
) -> Result<GraphDb> {
    let s = &t.pinned.normalize(s);
    if !crate::graph::is_hom(hom, s, &t.graph)? {
        return Err(Error::CertificateFailure("map is not a homomorphism into the template".into()));
    }
    let mut d = GraphDb::new(views.sigma().iter().cloned());
    for n in s.nodes() {
        d.add_node(n.clone());
    }
    let taken = s.nodes().clone();
    let mut fresh = fresh_namer(&taken);
    for e in s.edges() {
        let img = Edge { src: hom[&e.src].clone(), label: e.label.clone(), dst: hom[&e.dst].clone() };
        let w = t.witnesses.get(&img).ok_or_else(|| Error::CertificateFailure(format!("template edge {img:?} has no witness")))?;
        let mut prev = e.src.clone();
        for (i, l) in w.iter().enumerate() {
            let next = if i + 1 == w.len() { e.dst.clone() } else { fresh() };
            d.add_edge(prev, l.clone(), next.clone())?;
            prev = next;
        }
    }
    let image = apply_view(&d, views, true)?;
    if !s.edges_subset_of(&image) {
        return Err(Error::CertificateFailure("instance is not contained in the view image".into()));
    }
    if rpq_eval(&d, q)?.contains(&(u.clone(), v.clone())) {
        return Err(Error::CertificateFailure("pair is answered by the constructed database".into()));
    }
    Ok(d)
}

/// Labels of the template edges in a fixed order (for reports).
pub fn template_labels(t: &Template) -> Vec<Label> {
    t.graph.alphabet().iter().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::word;
    use crate::rpq::path_of_word;

    fn ex1() -> (QuerySpec, ViewSpec) {
        (
            QuerySpec::parse(&["a"], "a a a a a").unwrap(),
            ViewSpec::parse(&["a"], &[("V1", "a a a"), ("V2", "a a a a")]).unwrap(),
        )
    }

    #[test]
    fn dump_roundtrip() {
        let (q, v) = ex1();
        let t = build_template(&q, &v).unwrap();
        let p = parse_template_dump(&t.dump()).unwrap();
        assert_eq!(p.num_nodes(), t.num_nodes());
        assert_eq!(p.sources(), t.sources);
        assert_eq!(p.targets(), t.targets);
        assert!(matches!(parse_template_dump("source\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn ex1_template_shape() {
        let (q, v) = ex1();
        let t = build_template(&q, &v).unwrap();
        assert_eq!(t.num_nodes(), 128);
        assert_eq!(t.sources.len(), 64);
        assert_eq!(t.targets.len(), 64);
        // The empty set maps into everything.
        let empty = subset_name(&BTreeSet::new());
        assert!(t.graph.contains_edge(empty.as_str(), "V1", "d_5"));
    }

    #[test]
    fn ex1_path_endpoints_not_certain() {
        let (q, v) = ex1();
        let t = build_template(&q, &v).unwrap();
        let s = apply_view(&path_of_word(&word("aaaaa")), &v, false).unwrap();
        let (u, w) = (NodeId::from("p0"), NodeId::from("p5"));
        let verdict = cert(&s, &u, &w, &t).unwrap();
        assert!(!verdict.certain);
        let d = materialize_counterexample(&s, &u, &w, &t, verdict.witness_hom.as_ref().unwrap(), &q, &v).unwrap();
        assert!(d.num_nodes() > 6);
        assert!(cert(&s, &NodeId::from("zz"), &w, &t).is_err());
    }

    #[test]
    fn core_preserves_certain_answers() {
        let (q, v) = ex1();
        let t = build_template(&q, &v).unwrap();
        let c = template_core(&t);
        assert!(c.num_nodes() < t.num_nodes());
        for w in ["aaa", "aaaa", "aaaaa", "aaaaaaa"] {
            let s = apply_view(&path_of_word(&word(w)), &v, false).unwrap();
            assert_eq!(cert_all(&s, &t).unwrap(), cert_all(&s, &c).unwrap(), "{w}");
        }
    }
}

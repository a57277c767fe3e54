//! Brute-force reference implementations and the worked example fixtures.
//!
//! Nothing here reuses the evaluation machinery it is compared against:
//! queries are answered by walking paths and matching words against the
//! syntax tree, homomorphisms by scanning every map, and the example
//! rewritings by evaluating their formulas directly over the view instance.

use crate::automata::{build_view_product, Automaton};
use crate::cfpq::Cfg;
use crate::error::{Error, Result};
use crate::graph::{is_hom, Edge, GraphDb, Label, NodeId, NodeMap};
use crate::preimage::{all_edge_segments, assemble, instance_tuples, Engine};
use crate::rpq::{apply_view, rpq_eval, QuerySpec, ViewInstance, ViewSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FixtureId {
    Ex1,
    Ex2,
    Ex3,
    ThreeCol,
}

impl fmt::Display for FixtureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FixtureId::Ex1 => "Ex1",
            FixtureId::Ex2 => "Ex2",
            FixtureId::Ex3 => "Ex3",
            FixtureId::ThreeCol => "ThreeCol",
        };
        f.write_str(s)
    }
}

impl FromStr for FixtureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ex1" => Ok(FixtureId::Ex1),
            "ex2" => Ok(FixtureId::Ex2),
            "ex3" => Ok(FixtureId::Ex3),
            "threecol" | "3col" => Ok(FixtureId::ThreeCol),
            _ => Err(Error::Invalid(format!("unknown fixture `{s}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub id: FixtureId,
    pub query: QuerySpec,
    pub views: ViewSpec,
    /// Source text of the query and views, in declaration order.
    pub query_text: String,
    pub view_texts: Vec<(String, String)>,
    pub notes: &'static str,
}

impl Fixture {
    /// The fixture as a spec file.
    pub fn spec_text(&self) -> String {
        let sigma: Vec<&str> = self.views.sigma().iter().map(Label::as_str).collect();
        let mut out = format!("alphabet {}\n", sigma.join(" "));
        for (n, re) in &self.view_texts {
            out.push_str(&format!("view {n} = {re}\n"));
        }
        out.push_str(&format!("query Q = {}\n", self.query_text));
        out
    }
}

pub fn fixture(id: FixtureId) -> Fixture {
    let (sigma, q, views, notes): (Vec<&str>, &str, Vec<(&str, &str)>, &'static str) = match id {
        FixtureId::Ex1 => (
            vec!["a"],
            "a a a a a",
            vec![("V1", "a a a"), ("V2", "a a a a")],
            "determined, with a first-order rewriting, but not monotonically determined",
        ),
        FixtureId::Ex2 => (
            vec!["a", "b", "c"],
            "a b* a | a c* a",
            vec![("V1", "a b*"), ("V2", "a c*"), ("V3", "b* a | c* a")],
            "monotonically determined; rewriting is a conjunctive query but no regular path query",
        ),
        FixtureId::Ex3 => (
            vec!["a"],
            "a (a a a a a a)* | a a (a a a a a a)*",
            vec![("V1", "a | a a"), ("V2", "a a | a a a")],
            "monotonically determined; rewriting uses the transitive closure of a conjunctive query",
        ),
        FixtureId::ThreeCol => {
            let v = crate::preimage::three_col_views();
            let sigma: Vec<Label> = v.sigma().iter().cloned().collect();
            let v1 = crate::automata::enumerate_dfa_words(&v.dfas()[0], 1);
            let v2 = crate::automata::enumerate_dfa_words(&v.dfas()[1], 2);
            let fmt = |ws: Vec<crate::graph::Word>| {
                ws.iter().map(|w| w.iter().map(Label::as_str).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join(" | ")
            };
            let (t1, t2) = (fmt(v1), fmt(v2));
            let query_text = t2.clone();
            let sig: Vec<&str> = sigma.iter().map(Label::as_str).collect();
            return Fixture {
                id,
                query: QuerySpec::parse(&sig, &query_text).expect("fixture query"),
                views: v,
                query_text,
                view_texts: vec![("V1".into(), t1), ("V2".into(), t2)],
                notes: "colouring gadget; the query detects two consecutive edges with clashing colours",
            };
        }
    };
    Fixture {
        id,
        query: QuerySpec::parse(&sigma, q).expect("fixture query"),
        views: ViewSpec::parse(&sigma, &views).expect("fixture views"),
        query_text: q.to_string(),
        view_texts: views.iter().map(|(n, r)| (n.to_string(), r.to_string())).collect(),
        notes,
    }
}

/// The six-node path `x0 -a-> ... -a-> x5`.
pub fn figure1_d() -> GraphDb {
    GraphDb::from_edges((0..5).map(|i| (format!("x{i}"), "a", format!("x{}", i + 1))))
}

/// The database with the same views plus more, but no `a^5` path from `x0`
/// to `x5`.
pub fn figure1_d_prime() -> GraphDb {
    GraphDb::from_edges([
        ("x0", "a", "b1"),
        ("b1", "a", "b2"),
        ("b2", "a", "x3"),
        ("x3", "a", "x4"),
        ("x1", "a", "x2"),
        ("x2", "a", "c"),
        ("c", "a", "x4"),
        ("x2", "a", "d"),
        ("d", "a", "e"),
        ("e", "a", "x5"),
    ])
}

/// The path `x -a-> z -b-> w1 -b-> w2 -b-> w3 -b-> w4 -a-> y` over `{a, b, c}`.
pub fn figure2_d() -> GraphDb {
    let mut g = GraphDb::new(["a", "b", "c"]);
    for (s, l, d) in [("x", "a", "z"), ("z", "b", "w1"), ("w1", "b", "w2"), ("w2", "b", "w3"), ("w3", "b", "w4"), ("w4", "a", "y")] {
        g.add_edge(s, l, d).expect("declared label");
    }
    g
}

/// Two branches `a b b b` and `a c c` from `x` to `z`, then `b a` to `y`.
pub fn figure2_d_prime() -> GraphDb {
    let mut g = GraphDb::new(["a", "b", "c"]);
    for (s, l, d) in [
        ("x", "a", "t1"),
        ("t1", "b", "t2"),
        ("t2", "b", "t3"),
        ("t3", "b", "z"),
        ("x", "a", "u1"),
        ("u1", "c", "u2"),
        ("u2", "c", "z"),
        ("z", "b", "m"),
        ("m", "a", "y"),
    ] {
        g.add_edge(s, l, d).expect("declared label");
    }
    g
}

/// Iterator over every labelled digraph on nodes `v1..vn`.
pub struct DbEnumerator {
    alphabet: Vec<Label>,
    nodes: Vec<NodeId>,
    slots: Vec<(usize, usize, usize)>,
    next: u64,
    end: u64,
}

impl Iterator for DbEnumerator {
    type Item = GraphDb;

    fn next(&mut self) -> Option<GraphDb> {
        if self.next >= self.end {
            return None;
        }
        let mask = self.next;
        self.next += 1;
        let mut g = GraphDb::new(self.alphabet.iter().cloned());
        for n in &self.nodes {
            g.add_node(n.clone());
        }
        for (i, &(x, l, y)) in self.slots.iter().enumerate() {
            if mask >> i & 1 == 1 {
                g.add_edge(self.nodes[x].clone(), self.alphabet[l].clone(), self.nodes[y].clone()).expect("declared label");
            }
        }
        Some(g)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

/// Largest number of graphs [`enumerate_dbs`] will produce.
pub const ENUMERATION_LIMIT: u64 = 1 << 24;

/// All labelled digraphs on `v1..vn`, ordered by the bitmask of their edge
/// set (edges sorted by source, label, target).
pub fn enumerate_dbs(alphabet: &[Label], n: usize) -> Result<DbEnumerator> {
    let m = n * n * alphabet.len();
    if m >= 63 || 1u64 << m > ENUMERATION_LIMIT {
        return Err(Error::BudgetExceeded(format!("2^{m} graphs exceed the enumeration limit")));
    }
    let mut slots = Vec::with_capacity(m);
    for x in 0..n {
        for l in 0..alphabet.len() {
            for y in 0..n {
                slots.push((x, l, y));
            }
        }
    }
    Ok(DbEnumerator {
        alphabet: alphabet.to_vec(),
        nodes: (1..=n).map(|i| NodeId::new(format!("v{i}"))).collect(),
        slots,
        next: 0,
        end: 1u64 << m,
    })
}

/// Query answers by enumerating labelled walks shorter than
/// `|nodes| * |query states|` and matching each walk's word against the
/// regular expression. `limit` caps the number of distinct (start, end,
/// word) triples explored.
pub fn brute_rpq_eval(db: &GraphDb, q: &QuerySpec, limit: usize) -> Result<BTreeSet<(NodeId, NodeId)>> {
    let bound = db.num_nodes() * q.dfa().num_states();
    let mut out_edges: HashMap<&NodeId, Vec<&Edge>> = HashMap::new();
    for e in db.edges() {
        out_edges.entry(&e.src).or_default().push(e);
    }
    let mut answers = BTreeSet::new();
    let mut explored = 0usize;
    for x in db.nodes() {
        let mut layer: HashSet<(&NodeId, Vec<Label>)> = HashSet::from([(x, Vec::new())]);
        for len in 0..bound {
            let mut next = HashSet::new();
            for (y, w) in &layer {
                explored += 1;
                if explored > limit {
                    return Err(Error::BudgetExceeded(format!("more than {limit} walks")));
                }
                if q.ast().matches(w) {
                    answers.insert((x.clone(), (*y).clone()));
                }
                if len + 1 < bound {
                    for e in out_edges.get(y).into_iter().flatten() {
                        let mut w2 = w.clone();
                        w2.push(e.label.clone());
                        next.insert((&e.dst, w2));
                    }
                }
            }
            layer = next;
        }
    }
    Ok(answers)
}

/// First homomorphism in the order that treats the map as a number with
/// the least source node most significant and target nodes as digits.
pub fn brute_hom(
    src: &GraphDb,
    dst: &GraphDb,
    pin: &NodeMap,
    allowed: &BTreeMap<NodeId, BTreeSet<NodeId>>,
    limit: u64,
) -> Result<Option<NodeMap>> {
    let xs: Vec<&NodeId> = src.nodes().iter().collect();
    let ts: Vec<&NodeId> = dst.nodes().iter().collect();
    for n in pin.keys().chain(allowed.keys()) {
        if !src.contains_node(n) {
            return Err(Error::UnknownNode(n.to_string()));
        }
    }
    if xs.is_empty() {
        return Ok(Some(NodeMap::new()));
    }
    if ts.is_empty() {
        return Ok(None);
    }
    let total = (ts.len() as f64).powi(xs.len() as i32);
    if total > limit as f64 {
        return Err(Error::BudgetExceeded(format!("{} candidate maps", total)));
    }
    let mut digits = vec![0usize; xs.len()];
    loop {
        let map: NodeMap = xs.iter().zip(&digits).map(|(x, &d)| ((*x).clone(), ts[d].clone())).collect();
        let ok_pin = pin.iter().all(|(x, t)| &map[x] == t);
        let ok_allowed = allowed.iter().all(|(x, set)| set.contains(&map[x]));
        if ok_pin && ok_allowed && is_hom(&map, src, dst)? {
            return Ok(Some(map));
        }
        let mut i = xs.len();
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < ts.len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteCert {
    /// A database containing the instance in its view image that does not
    /// answer the pair.
    Counterexample(GraphDb),
    NoneFound { max_nodes: usize },
}

/// Searches for a database on at most `max_nodes` nodes that contains `s`
/// in its view image but does not answer `(u, v)`.
///
/// Every such database contains the image of a union of witness walks, one
/// per view tuple, under a map fixing the instance nodes. The search picks,
/// for each tuple not yet witnessed, a word of the view (at most one longer
/// than the number of fresh nodes allowed), and places the interior nodes
/// of its walk on existing or new nodes. For `max_nodes <= 4` every edge
/// set over the full node budget is searched as well.
pub fn brute_cert_bounded(
    s: &ViewInstance,
    u: &NodeId,
    v: &NodeId,
    q: &QuerySpec,
    views: &ViewSpec,
    max_nodes: usize,
    limit: u64,
) -> Result<BruteCert> {
    brute_cert_bounded_with(s, u, v, q, views, max_nodes, None, limit)
}

/// [`brute_cert_bounded`] with an explicit cap on witness word length.
#[allow(clippy::too_many_arguments)]
pub fn brute_cert_bounded_with(
    s: &ViewInstance,
    u: &NodeId,
    v: &NodeId,
    q: &QuerySpec,
    views: &ViewSpec,
    max_nodes: usize,
    max_word_len: Option<usize>,
    limit: u64,
) -> Result<BruteCert> {
    let base: Vec<NodeId> = s.nodes().iter().cloned().collect();
    let pos = |n: &NodeId| base.iter().position(|b| b == n).ok_or_else(|| Error::UnknownNode(n.to_string()));
    let (ui, vi) = (pos(u)?, pos(v)?);
    if base.len() > max_nodes {
        return Err(Error::Invalid(format!("bound {max_nodes} is below the instance size {}", base.len())));
    }
    if q.sigma() != views.sigma() {
        return Err(Error::AlphabetMismatch("query and views use different alphabets".into()));
    }
    let sigma: Vec<Label> = views.sigma().iter().cloned().collect();
    let required = instance_tuples(s, views, &base)?;
    let verify = |d: GraphDb| -> Result<BruteCert> {
        if !s.edges_subset_of(&apply_view(&d, views, true)?) || rpq_eval(&d, q)?.contains(&(u.clone(), v.clone())) {
            return Err(Error::CertificateFailure("assembled counterexample does not verify".into()));
        }
        Ok(BruteCert::Counterexample(d))
    };

    let max_word_len = max_word_len.unwrap_or((max_nodes - base.len() + 1).max(1));
    let mut order: Vec<(usize, usize, usize)> = required.iter().copied().collect();
    order.sort_unstable();
    let words: Vec<Vec<Vec<usize>>> = views
        .dfas()
        .iter()
        .map(|d| {
            crate::automata::enumerate_dfa_words(d, max_word_len)
                .into_iter()
                .filter(|w| !w.is_empty())
                .map(|w| w.iter().map(|l| sigma.iter().position(|x| x == l).expect("view label")).collect())
                .collect()
        })
        .collect();
    let mut search = WalkSearch {
        views: Langs::Regular(views),
        q,
        u: ui,
        v: vi,
        order,
        words,
        max_nodes,
        limit,
        visited: 0,
        n: base.len(),
        edges: Vec::new(),
        seen: HashSet::new(),
    };
    if search.dfs(0)? {
        let names = crate::preimage::fresh_names(s.nodes(), search.n - base.len());
        let node = |i: usize| if i < base.len() { base[i].clone() } else { names[i - base.len()].clone() };
        let mut d = GraphDb::new(sigma.iter().cloned());
        for i in 0..search.n {
            d.add_node(node(i));
        }
        for &(a, l, b) in &search.edges {
            d.add_edge(node(a), sigma[l].clone(), node(b))?;
        }
        return verify(d);
    }

    if max_nodes <= 4 {
        let product = build_view_product(views.dfas())?;
        let mut eng = Engine {
            n_base: base.len(),
            views: &product,
            segments: all_edge_segments(max_nodes, sigma.len()),
            required,
            exact: false,
            forbid: Some((q.dfa(), ui, vi)),
            fresh_budget: 0,
            limit,
            visited: 0,
        };
        if let Some(chosen) = eng.run()? {
            let chosen = eng.reduce(chosen);
            let always: Vec<usize> = (base.len()..max_nodes).collect();
            return verify(assemble(&base, &sigma, &eng.segments, &chosen, &always));
        }
    }
    Ok(BruteCert::NoneFound { max_nodes })
}

/// View languages for the walk search.
#[derive(Clone, Copy)]
enum Langs<'a> {
    Regular(&'a ViewSpec),
    /// Grammar views; membership is tested by CYK on the words of walks of
    /// at most `max_walk` edges, so it can miss long witnesses but never
    /// reports a false one.
    Context { grammars: &'a [(Label, Cfg)], sigma: &'a [Label], max_walk: usize },
}

struct WalkSearch<'a> {
    views: Langs<'a>,
    q: &'a QuerySpec,
    u: usize,
    v: usize,
    order: Vec<(usize, usize, usize)>,
    words: Vec<Vec<Vec<usize>>>,
    max_nodes: usize,
    limit: u64,
    visited: u64,
    n: usize,
    edges: Vec<(usize, usize, usize)>,
    seen: HashSet<(usize, usize, Vec<(usize, usize, usize)>)>,
}

impl WalkSearch<'_> {
    fn walks(&self, x: usize, dfa: &crate::automata::Dfa) -> HashSet<(usize, usize)> {
        let mut seen = HashSet::from([(x, dfa.initial())]);
        let mut stack = vec![(x, dfa.initial())];
        while let Some((a, p)) = stack.pop() {
            for &(s, l, d) in &self.edges {
                if s == a {
                    let st = (d, dfa.step(p, l));
                    if seen.insert(st) {
                        stack.push(st);
                    }
                }
            }
        }
        seen
    }

    fn holds(&self, dfa: &crate::automata::Dfa, x: usize, y: usize) -> bool {
        self.walks(x, dfa).iter().any(|&(b, p)| b == y && dfa.is_final(p))
    }

    fn view_holds(&self, i: usize, x: usize, y: usize) -> bool {
        match self.views {
            Langs::Regular(v) => self.holds(&v.dfas()[i], x, y),
            Langs::Context { grammars, sigma, max_walk } => {
                let g = &grammars[i].1;
                let mut stack: Vec<(usize, Vec<Label>)> = vec![(x, Vec::new())];
                while let Some((a, w)) = stack.pop() {
                    if a == y && g.accepts(&w) {
                        return true;
                    }
                    if w.len() < max_walk {
                        for &(s, l, d) in &self.edges {
                            if s == a {
                                let mut w2 = w.clone();
                                w2.push(sigma[l].clone());
                                stack.push((d, w2));
                            }
                        }
                    }
                }
                false
            }
        }
    }

    fn fresh_walk_is_safe(&self, w: &[usize], x: usize, y: usize) -> bool {
        let mut probe = WalkSearch { edges: self.edges.clone(), n: self.n, words: Vec::new(), order: Vec::new(), seen: HashSet::new(), ..*self };
        let mut prev = x;
        for (j, &l) in w.iter().enumerate() {
            let t = if j + 1 == w.len() { y } else { probe.n += 1; probe.n - 1 };
            probe.edges.push((prev, l, t));
            prev = t;
        }
        !probe.holds(self.q.dfa(), self.u, self.v)
    }

    fn tick(&mut self) -> Result<()> {
        self.visited += 1;
        if self.visited > self.limit {
            return Err(Error::BudgetExceeded(format!("certain-answer search visited more than {} states", self.limit)));
        }
        Ok(())
    }

    fn dfs(&mut self, mut k: usize) -> Result<bool> {
        self.tick()?;
        while k < self.order.len() {
            let (i, x, y) = self.order[k];
            if !self.view_holds(i, x, y) {
                break;
            }
            k += 1;
        }
        let Some(&(i, x, y)) = self.order.get(k) else { return Ok(true) };
        let mut key = self.edges.clone();
        key.sort_unstable();
        if !self.seen.insert((k, self.n, key)) {
            return Ok(false);
        }
        // A tuple whose every witness word, laid out on fresh nodes, already
        // answers the pair cannot be witnessed in any extension.
        for &(i2, x2, y2) in &self.order[k..] {
            if !self.words[i2].iter().any(|w| self.fresh_walk_is_safe(w, x2, y2)) {
                return Ok(false);
            }
        }
        for w in self.words[i].clone() {
            if self.place(&w, 0, x, y, k)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Adds the edge for `w[j]` leaving `prev`, choosing its endpoint.
    fn place(&mut self, w: &[usize], j: usize, prev: usize, y: usize, k: usize) -> Result<bool> {
        self.tick()?;
        let last = j + 1 == w.len();
        let choices: Vec<usize> = if last {
            vec![y]
        } else {
            (0..self.n).chain((self.n < self.max_nodes).then_some(self.n)).collect()
        };
        for t in choices {
            let fresh = t == self.n;
            if fresh {
                self.n += 1;
            }
            let e = (prev, w[j], t);
            let added = !self.edges.contains(&e);
            if added {
                self.edges.push(e);
            }
            if !self.holds(self.q.dfa(), self.u, self.v) {
                let done = if last { self.dfs(k + 1)? } else { self.place(w, j + 1, t, y, k)? };
                if done {
                    return Ok(true);
                }
            }
            if added {
                self.edges.pop();
            }
            if fresh {
                self.n -= 1;
            }
        }
        Ok(false)
    }
}

/// [`brute_cert_bounded`] for grammar views. Witness words are the words of
/// each grammar of length at most one more than the fresh-node budget, and a
/// view tuple counts as present when some walk of at most `2 * max_nodes`
/// edges spells a word of the grammar; so a counterexample is always
/// genuine, while `NoneFound` covers only these bounded shapes.
pub fn brute_cert_cfg_bounded(
    s: &ViewInstance,
    u: &NodeId,
    v: &NodeId,
    q: &QuerySpec,
    views: &[(Label, Cfg)],
    max_nodes: usize,
    limit: u64,
) -> Result<BruteCert> {
    let base: Vec<NodeId> = s.nodes().iter().cloned().collect();
    let pos = |n: &NodeId| base.iter().position(|b| b == n).ok_or_else(|| Error::UnknownNode(n.to_string()));
    let (ui, vi) = (pos(u)?, pos(v)?);
    if base.len() > max_nodes {
        return Err(Error::Invalid(format!("bound {max_nodes} is below the instance size {}", base.len())));
    }
    let sigma: Vec<Label> = q.sigma().iter().cloned().collect();
    let mut order = Vec::new();
    for e in s.edges() {
        let i = views.iter().position(|(n, _)| *n == e.label).ok_or_else(|| Error::AlphabetMismatch(format!("`{}` is not a view name", e.label)))?;
        order.push((i, pos(&e.src)?, pos(&e.dst)?));
    }
    order.sort_unstable();
    let max_word_len = (max_nodes - base.len() + 1).max(1);
    let words = views
        .iter()
        .map(|(_, g)| {
            g.words_up_to(max_word_len)
                .into_iter()
                .filter(|w| !w.is_empty())
                .map(|w| w.iter().map(|l| sigma.iter().position(|x| x == l).ok_or_else(|| Error::AlphabetMismatch(l.to_string()))).collect())
                .collect::<Result<Vec<Vec<usize>>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut search = WalkSearch {
        views: Langs::Context { grammars: views, sigma: &sigma, max_walk: 2 * max_nodes },
        q,
        u: ui,
        v: vi,
        order: order.clone(),
        words,
        max_nodes,
        limit,
        visited: 0,
        n: base.len(),
        edges: Vec::new(),
        seen: HashSet::new(),
    };
    if !search.dfs(0)? {
        return Ok(BruteCert::NoneFound { max_nodes });
    }
    if order.iter().any(|&(i, x, y)| !search.view_holds(i, x, y)) || search.holds(q.dfa(), ui, vi) {
        return Err(Error::CertificateFailure("assembled counterexample does not verify".into()));
    }
    let names = crate::preimage::fresh_names(s.nodes(), search.n - base.len());
    let node = |i: usize| if i < base.len() { base[i].clone() } else { names[i - base.len()].clone() };
    let mut d = GraphDb::new(sigma.iter().cloned());
    for i in 0..search.n {
        d.add_node(node(i));
    }
    for &(a, l, b) in &search.edges {
        d.add_edge(node(a), sigma[l].clone(), node(b))?;
    }
    if rpq_eval(&d, q)?.contains(&(u.clone(), v.clone())) {
        return Err(Error::CertificateFailure("assembled counterexample answers the pair".into()));
    }
    Ok(BruteCert::Counterexample(d))
}

/// Seeded random database on nodes `v1..vn`; every possible labelled edge
/// is present independently with probability `edge_prob`.
pub fn random_db(alphabet: &[Label], n: usize, edge_prob: f64, seed: u64) -> GraphDb {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = edge_prob.clamp(0.0, 1.0);
    let nodes: Vec<NodeId> = (1..=n).map(|i| NodeId::new(format!("v{i}"))).collect();
    let mut g = GraphDb::new(alphabet.iter().cloned());
    for x in &nodes {
        g.add_node(x.clone());
    }
    for x in &nodes {
        for l in alphabet {
            for y in &nodes {
                if rng.gen_bool(p) {
                    g.add_edge(x.clone(), l.clone(), y.clone()).expect("declared label");
                }
            }
        }
    }
    g
}

struct Rels<'a> {
    nodes: Vec<&'a NodeId>,
    rel: HashMap<&'a str, HashSet<(&'a NodeId, &'a NodeId)>>,
}

impl<'a> Rels<'a> {
    fn new(s: &'a ViewInstance) -> Self {
        let mut rel: HashMap<&str, HashSet<(&NodeId, &NodeId)>> = HashMap::new();
        for e in s.edges() {
            rel.entry(e.label.as_str()).or_default().insert((&e.src, &e.dst));
        }
        Rels { nodes: s.nodes().iter().collect(), rel }
    }

    fn holds(&self, r: &str, x: &NodeId, y: &NodeId) -> bool {
        self.rel.get(r).is_some_and(|s| s.contains(&(x, y)))
    }
}

/// Evaluates the example's known rewriting formula on `s`, with every
/// quantifier ranging over the nodes of `s`.
pub fn reference_rewriting(id: FixtureId, s: &ViewInstance) -> Result<BTreeSet<(NodeId, NodeId)>> {
    let r = Rels::new(s);
    let n = &r.nodes;
    let mut out = BTreeSet::new();
    match id {
        FixtureId::Ex1 => {
            for &x in n {
                for &y in n {
                    let ok = n.iter().any(|&u| {
                        r.holds("V2", x, u) && n.iter().all(|&w| !r.holds("V1", w, u) || r.holds("V2", w, y))
                    });
                    if ok {
                        out.insert((x.clone(), y.clone()));
                    }
                }
            }
        }
        FixtureId::Ex2 => {
            for &x in n {
                for &y in n {
                    if n.iter().any(|&z| r.holds("V1", x, z) && r.holds("V2", x, z) && r.holds("V3", z, y)) {
                        out.insert((x.clone(), y.clone()));
                    }
                }
            }
        }
        FixtureId::Ex3 => {
            let both = |a: &NodeId, b: &NodeId| r.holds("V1", a, b) && r.holds("V2", a, b);
            // T(x, y): three consecutive steps related by both views.
            let mut t: HashMap<&NodeId, Vec<&NodeId>> = HashMap::new();
            for &x in n {
                for &z1 in n.iter().filter(|&&z1| both(x, z1)) {
                    for &z2 in n.iter().filter(|&&z2| both(z1, z2)) {
                        for &y in n.iter().filter(|&&y| both(z2, y)) {
                            t.entry(x).or_default().push(y);
                        }
                    }
                }
            }
            for &x in n {
                for &z in n.iter().filter(|&&z| r.holds("V1", x, z)) {
                    let mut seen = HashSet::from([z]);
                    let mut stack = vec![z];
                    while let Some(a) = stack.pop() {
                        out.insert((x.clone(), a.clone()));
                        for &b in t.get(a).into_iter().flatten() {
                            if seen.insert(b) {
                                stack.push(b);
                            }
                        }
                    }
                }
            }
        }
        FixtureId::ThreeCol => return Err(Error::FixtureMismatch(id.to_string())),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::word;
    use crate::rpq::path_of_word;

    fn pairs(ps: &[(&str, &str)]) -> BTreeSet<(NodeId, NodeId)> {
        ps.iter().map(|&(a, b)| (NodeId::from(a), NodeId::from(b))).collect()
    }

    #[test]
    fn enumeration_counts() {
        let a = [Label::from("a")];
        assert_eq!(enumerate_dbs(&a, 0).unwrap().count(), 1);
        assert_eq!(enumerate_dbs(&a, 1).unwrap().count(), 2);
        assert_eq!(enumerate_dbs(&a, 2).unwrap().count(), 16);
        assert!(matches!(enumerate_dbs(&a, 5), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn figure_databases() {
        let f = fixture(FixtureId::Ex1);
        assert_eq!(brute_rpq_eval(&figure1_d(), &f.query, 1_000_000).unwrap(), pairs(&[("x0", "x5")]));
        assert!(!brute_rpq_eval(&figure1_d_prime(), &f.query, 1_000_000).unwrap().contains(&("x0".into(), "x5".into())));
        assert_eq!(figure1_d_prime().num_nodes(), 11);
        let f2 = fixture(FixtureId::Ex2);
        assert_eq!(rpq_eval(&figure2_d(), &f2.query).unwrap(), pairs(&[("x", "y")]));
        assert!(rpq_eval(&figure2_d_prime(), &f2.query).unwrap().contains(&("x".into(), "y".into())));
    }

    #[test]
    fn brute_rpq_matches_product_on_two_nodes() {
        let f = fixture(FixtureId::Ex1);
        let q = QuerySpec::parse(&["a"], "a a | a a a").unwrap();
        for g in enumerate_dbs(&[Label::from("a")], 2).unwrap() {
            assert_eq!(brute_rpq_eval(&g, &q, 1_000_000).unwrap(), rpq_eval(&g, &q).unwrap());
            assert_eq!(brute_rpq_eval(&g, &f.query, 1_000_000).unwrap(), rpq_eval(&g, &f.query).unwrap());
        }
        assert!(brute_rpq_eval(&GraphDb::new(["a"]), &q, 10).unwrap().is_empty());
    }

    #[test]
    fn reference_rewritings_on_examples() {
        let v1 = apply_view(&figure1_d(), &fixture(FixtureId::Ex1).views, false).unwrap();
        assert_eq!(reference_rewriting(FixtureId::Ex1, &v1).unwrap(), pairs(&[("x0", "x5")]));
        let v2 = apply_view(&figure2_d(), &fixture(FixtureId::Ex2).views, false).unwrap();
        assert_eq!(reference_rewriting(FixtureId::Ex2, &v2).unwrap(), pairs(&[("x", "y")]));
        let v3 = apply_view(&path_of_word(&word("aaaaaaa")), &fixture(FixtureId::Ex3).views, false).unwrap();
        let r3 = reference_rewriting(FixtureId::Ex3, &v3).unwrap();
        assert!(r3.contains(&("p0".into(), "p7".into())));
        assert_eq!(r3, rpq_eval(&path_of_word(&word("aaaaaaa")), &fixture(FixtureId::Ex3).query).unwrap());
        assert!(matches!(reference_rewriting(FixtureId::ThreeCol, &v1), Err(Error::FixtureMismatch(_))));
    }

    #[test]
    fn random_db_extremes() {
        let ab = [Label::from("a"), Label::from("b")];
        let g = random_db(&ab, 3, 0.0, 7);
        assert_eq!((g.num_nodes(), g.num_edges()), (3, 0));
        assert_eq!(random_db(&ab, 3, 1.0, 7).num_edges(), 18);
        assert_eq!(random_db(&ab, 4, 0.3, 11), random_db(&ab, 4, 0.3, 11));
    }

    #[test]
    fn brute_hom_examples() {
        let k3 = GraphDb::from_edges([("1", "e", "2"), ("2", "e", "3"), ("3", "e", "1"), ("2", "e", "1"), ("3", "e", "2"), ("1", "e", "3")]);
        let edge = GraphDb::from_edges([("x", "e", "y")]);
        let h = brute_hom(&edge, &k3, &NodeMap::new(), &BTreeMap::new(), 1000).unwrap().unwrap();
        assert_eq!(h, BTreeMap::from([("x".into(), "1".into()), ("y".into(), "2".into())]));
        let lp = GraphDb::from_edges([("x", "e", "x")]);
        assert_eq!(brute_hom(&lp, &k3, &NodeMap::new(), &BTreeMap::new(), 1000).unwrap(), None);
    }

    #[test]
    fn brute_cert_on_figure1() {
        let f = fixture(FixtureId::Ex1);
        let s = apply_view(&figure1_d(), &f.views, false).unwrap();
        let r = brute_cert_bounded(&s, &"x0".into(), &"x5".into(), &f.query, &f.views, 10, 1_000_000).unwrap();
        let BruteCert::Counterexample(d) = r else { panic!("{r:?}") };
        assert!(d.num_nodes() <= 10);
    }

    #[test]
    fn brute_cert_finds_nothing_for_aba() {
        let f = fixture(FixtureId::Ex2);
        let s = apply_view(&path_of_word(&word("aba")), &f.views, false).unwrap();
        let r = brute_cert_bounded(&s, &"p0".into(), &"p3".into(), &f.query, &f.views, 5, 2_000_000).unwrap();
        assert_eq!(r, BruteCert::NoneFound { max_nodes: 5 });
    }
}

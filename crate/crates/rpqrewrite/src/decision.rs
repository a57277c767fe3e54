//! Determinacy and monotone determinacy: bounded refutation over database
//! families, the word test on path databases, and a full decision procedure
//! for monotone determinacy by emptiness of `L(Q)` intersected with the
//! words whose path view maps into the template.

use crate::automata::{enumerate_dfa_words, Automaton, ProductDfa};
use crate::error::{Error, Result};
use crate::graph::{format_word, io::serialize_graph, BitSet, GraphDb, Label, NodeId, Word};
use crate::rpq::{apply_view, path_node, path_of_word, rpq_eval, QuerySpec, ViewSpec};
use crate::template::{cert, materialize_counterexample, Template};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Refuted,
    NoCounterexampleUpTo(usize),
    Holds,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    /// A word of `L(Q)` whose endpoints are not certain on the view of its
    /// path, with a database showing it.
    Word { word: Word, counterexample: GraphDb },
    /// Two databases violating the checked implication.
    Pair { d: GraphDb, d_prime: GraphDb },
    Note(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub evidence: Option<Evidence>,
    /// Which databases or words were searched.
    pub family: String,
}

impl Verdict {
    pub fn is_refuted(&self) -> bool {
        self.status == Status::Refuted
    }

    pub fn evidence_word(&self) -> Option<&Word> {
        match &self.evidence {
            Some(Evidence::Word { word, .. }) => Some(word),
            _ => None,
        }
    }
}

/// Line-oriented report: `status`, evidence lines, `checked_bound`,
/// `family`.
impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.status {
            Status::Refuted => writeln!(f, "status Refuted")?,
            Status::NoCounterexampleUpTo(b) => writeln!(f, "status NoCounterexampleUpTo({b})")?,
            Status::Holds => writeln!(f, "status Holds")?,
        }
        match &self.evidence {
            Some(Evidence::Word { word, counterexample }) => {
                writeln!(f, "evidence_word {}", format_word(word))?;
                writeln!(f, "counterexample {{")?;
                write!(f, "{}", serialize_graph(counterexample))?;
                writeln!(f, "}}")?;
            }
            Some(Evidence::Pair { d, d_prime }) => {
                writeln!(f, "evidence_pair")?;
                writeln!(f, "D {{")?;
                write!(f, "{}", serialize_graph(d))?;
                writeln!(f, "}}")?;
                writeln!(f, "D' {{")?;
                write!(f, "{}", serialize_graph(d_prime))?;
                writeln!(f, "}}")?;
            }
            Some(Evidence::Note(n)) => writeln!(f, "note {n}")?,
            None => {}
        }
        if let Status::NoCounterexampleUpTo(b) = self.status {
            writeln!(f, "checked_bound {b}")?;
        }
        writeln!(f, "family {}", self.family)
    }
}

/// Settings for the database-family searches.
#[derive(Clone, Debug)]
pub struct FamilyOptions {
    /// Largest number of databases examined.
    pub budget: u64,
    /// Random graphs added when the exhaustive family is over budget.
    pub random_samples: usize,
    pub edge_prob: f64,
    pub seed: u64,
    /// Databases always included (for instance a known pair).
    pub extra: Vec<GraphDb>,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions { budget: 1 << 22, random_samples: 2000, edge_prob: 0.3, seed: 0, extra: Vec::new() }
    }
}

/// An indexable, regenerable sequence of databases.
enum Family {
    /// Every graph on `v1..vn` for `n` in `1..=max_nodes`; `offsets[n-1]`
    /// is the index of the first graph with `n` nodes.
    Exhaustive { sigma: Vec<Label>, offsets: Vec<u64>, total: u64 },
    /// Every simple path with a word of length at most `max_len`, then
    /// seeded random graphs.
    Structured { sigma: Vec<Label>, words: Vec<Word>, random: usize, max_nodes: usize, p: f64, seed: u64 },
}

impl Family {
    fn new(sigma: &BTreeSet<Label>, max_nodes: usize, opts: &FamilyOptions) -> Result<Family> {
        let sigma: Vec<Label> = sigma.iter().cloned().collect();
        let mut offsets = Vec::new();
        let mut total: u64 = 0;
        let mut fits = true;
        for n in 1..=max_nodes {
            let m = n * n * sigma.len();
            offsets.push(total);
            if m >= 62 || total.saturating_add(1 << m) > opts.budget {
                fits = false;
                break;
            }
            total += 1 << m;
        }
        if fits {
            return Ok(Family::Exhaustive { sigma, offsets, total });
        }
        let max_len = 2 * max_nodes;
        let count: u64 = (0..=max_len as u32).map(|l| (sigma.len() as u64).saturating_pow(l)).fold(0, u64::saturating_add);
        if count.saturating_add(opts.random_samples as u64) > opts.budget {
            return Err(Error::BudgetExceeded(format!(
                "neither all graphs on {max_nodes} nodes nor all paths of length {max_len} fit in {} databases",
                opts.budget
            )));
        }
        let mut words: Vec<Word> = vec![Vec::new()];
        let mut layer: Vec<Word> = vec![Vec::new()];
        for _ in 0..max_len {
            layer = layer
                .iter()
                .flat_map(|w| sigma.iter().map(move |l| w.iter().cloned().chain([l.clone()]).collect::<Word>()))
                .collect();
            words.extend(layer.iter().cloned());
        }
        Ok(Family::Structured { sigma, words, random: opts.random_samples, max_nodes, p: opts.edge_prob, seed: opts.seed })
    }

    fn len(&self) -> u64 {
        match self {
            Family::Exhaustive { total, .. } => *total,
            Family::Structured { words, random, .. } => (words.len() + random) as u64,
        }
    }

    fn describe(&self) -> String {
        match self {
            Family::Exhaustive { sigma, offsets, total } => {
                format!("all {total} graphs over {} labels with 1..={} nodes", sigma.len(), offsets.len())
            }
            Family::Structured { words, random, max_nodes, seed, .. } => format!(
                "{} simple paths of length <= {} and {random} random graphs with <= {max_nodes} nodes (seed {seed})",
                words.len(),
                2 * max_nodes
            ),
        }
    }

    fn get(&self, i: u64) -> GraphDb {
        match self {
            Family::Exhaustive { sigma, offsets, .. } => {
                let n = offsets.iter().rposition(|&o| o <= i).expect("index in range") + 1;
                let mask = i - offsets[n - 1];
                let mut g = GraphDb::new(sigma.iter().cloned());
                let node = |x: usize| NodeId::new(format!("v{}", x + 1));
                for x in 0..n {
                    g.add_node(node(x));
                }
                let mut bit = 0;
                for x in 0..n {
                    for l in sigma {
                        for y in 0..n {
                            if mask >> bit & 1 == 1 {
                                g.add_edge(node(x), l.clone(), node(y)).expect("declared label");
                            }
                            bit += 1;
                        }
                    }
                }
                g
            }
            Family::Structured { sigma, words, max_nodes, p, seed, .. } => {
                let i = i as usize;
                if let Some(w) = words.get(i) {
                    let mut g = path_of_word(w);
                    g.extend_alphabet(sigma.iter().cloned());
                    return g;
                }
                let r = (i - words.len()) as u64;
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r));
                let n = rng.gen_range(1..=*max_nodes);
                let mut g = GraphDb::new(sigma.iter().cloned());
                let node = |x: usize| NodeId::new(format!("v{}", x + 1));
                for x in 0..n {
                    g.add_node(node(x));
                }
                for x in 0..n {
                    for l in sigma {
                        for y in 0..n {
                            if rng.gen_bool(*p) {
                                g.add_edge(node(x), l.clone(), node(y)).expect("declared label");
                            }
                        }
                    }
                }
                g
            }
        }
    }
}

/// Source of databases: the family followed by the extra ones.
struct Corpus<'a> {
    family: Family,
    extra: &'a [GraphDb],
}

impl Corpus<'_> {
    fn len(&self) -> u64 {
        self.family.len() + self.extra.len() as u64
    }

    fn get(&self, i: u64) -> GraphDb {
        let f = self.family.len();
        if i < f {
            self.family.get(i)
        } else {
            self.extra[(i - f) as usize].clone()
        }
    }

    fn describe(&self) -> String {
        let mut s = self.family.describe();
        if !self.extra.is_empty() {
            s.push_str(&format!(" plus {} given databases", self.extra.len()));
        }
        s
    }
}

type Tuple = (usize, usize, usize);

/// View image and query answer of one database, over interned node names.
struct Profile {
    view: Vec<Tuple>,
    answer: Vec<(usize, usize)>,
}

struct Interner {
    ids: HashMap<NodeId, usize>,
}

impl Interner {
    fn id(&mut self, n: &NodeId) -> usize {
        let k = self.ids.len();
        *self.ids.entry(n.clone()).or_insert(k)
    }
}

fn profiles(corpus: &Corpus<'_>, q: &QuerySpec, v: &ViewSpec) -> Result<Vec<Profile>> {
    let raw: Vec<Result<(BTreeSet<(usize, NodeId, NodeId)>, BTreeSet<(NodeId, NodeId)>)>> = (0..corpus.len())
        .into_par_iter()
        .map(|i| {
            let d = corpus.get(i);
            let s = apply_view(&d, v, false)?;
            let names = v.names();
            let view = s
                .edges()
                .iter()
                .map(|e| (names.iter().position(|n| *n == e.label).expect("view name"), e.src.clone(), e.dst.clone()))
                .collect();
            Ok((view, rpq_eval(&d, q)?))
        })
        .collect();
    let mut intern = Interner { ids: HashMap::new() };
    let mut out = Vec::with_capacity(raw.len());
    for r in raw {
        let (view, answer) = r?;
        out.push(Profile {
            view: view.iter().map(|(l, x, y)| (*l, intern.id(x), intern.id(y))).collect(),
            answer: answer.iter().map(|(x, y)| (intern.id(x), intern.id(y))).collect(),
        });
    }
    Ok(out)
}

fn check_sigma(q: &QuerySpec, v: &ViewSpec) -> Result<()> {
    if q.sigma() != v.sigma() {
        return Err(Error::AlphabetMismatch("query and views use different base alphabets".into()));
    }
    Ok(())
}

/// Searches for two databases with equal view images and different query
/// answers, over all graphs with at most `max_nodes` nodes (or the
/// structured family when that is over budget).
pub fn check_determinacy_bounded(q: &QuerySpec, v: &ViewSpec, max_nodes: usize) -> Result<Verdict> {
    check_determinacy_bounded_with(q, v, max_nodes, &FamilyOptions::default())
}

pub fn check_determinacy_bounded_with(q: &QuerySpec, v: &ViewSpec, max_nodes: usize, opts: &FamilyOptions) -> Result<Verdict> {
    check_sigma(q, v)?;
    if max_nodes == 0 {
        return Err(Error::Invalid("max_nodes must be at least 1".into()));
    }
    let corpus = Corpus { family: Family::new(v.sigma(), max_nodes, opts)?, extra: &opts.extra };
    let ps = profiles(&corpus, q, v)?;
    let mut first: HashMap<&[Tuple], usize> = HashMap::new();
    for (i, p) in ps.iter().enumerate() {
        match first.get(p.view.as_slice()) {
            Some(&j) if ps[j].answer != p.answer => {
                return Ok(Verdict {
                    status: Status::Refuted,
                    evidence: Some(Evidence::Pair { d: corpus.get(j as u64), d_prime: corpus.get(i as u64) }),
                    family: corpus.describe(),
                });
            }
            Some(_) => {}
            None => {
                first.insert(&p.view, i);
            }
        }
    }
    Ok(Verdict { status: Status::NoCounterexampleUpTo(max_nodes), evidence: None, family: corpus.describe() })
}

/// Searches for `D`, `D'` with `V(D) ⊆ V(D')` and `Q(D) ⊄ Q(D')` in the
/// same families as [`check_determinacy_bounded`].
pub fn check_monotone_pairs_bounded(q: &QuerySpec, v: &ViewSpec, max_nodes: usize) -> Result<Verdict> {
    check_monotone_pairs_bounded_with(q, v, max_nodes, &FamilyOptions::default())
}

pub fn check_monotone_pairs_bounded_with(q: &QuerySpec, v: &ViewSpec, max_nodes: usize, opts: &FamilyOptions) -> Result<Verdict> {
    check_sigma(q, v)?;
    if max_nodes == 0 {
        return Err(Error::Invalid("max_nodes must be at least 1".into()));
    }
    let corpus = Corpus { family: Family::new(v.sigma(), max_nodes, opts)?, extra: &opts.extra };
    let ps = profiles(&corpus, q, v)?;
    let nodes = ps.iter().flat_map(|p| p.view.iter().flat_map(|&(_, x, y)| [x, y]).chain(p.answer.iter().flat_map(|&(x, y)| [x, y]))).max().map_or(0, |m| m + 1);
    let nv = v.len();
    let tuple_bits = |p: &Profile| BitSet::from_iter(nv * nodes * nodes, p.view.iter().map(|&(l, x, y)| (l * nodes + x) * nodes + y));
    let pair_bits = |a: &[(usize, usize)]| BitSet::from_iter(nodes * nodes, a.iter().map(|&(x, y)| x * nodes + y));
    // Group databases by view image; a violation exists between groups
    // g1 ⊆ g2 exactly when the union of answers in g1 escapes the
    // intersection of answers in g2.
    let mut groups: Vec<(BitSet, BitSet, BitSet, Vec<usize>)> = Vec::new();
    let mut index: HashMap<&[Tuple], usize> = HashMap::new();
    for (i, p) in ps.iter().enumerate() {
        let a = pair_bits(&p.answer);
        match index.get(p.view.as_slice()) {
            Some(&g) => {
                let e = &mut groups[g];
                e.1.union_with(&a);
                e.2.intersect_with(&a);
                e.3.push(i);
            }
            None => {
                index.insert(&p.view, groups.len());
                groups.push((tuple_bits(p), a.clone(), a, vec![i]));
            }
        }
    }
    let hit = (0..groups.len()).into_par_iter().find_first(|&g1| {
        groups.iter().any(|g2| groups[g1].0.is_subset(&g2.0) && !groups[g1].1.is_subset(&g2.2))
    });
    let Some(g1) = hit else {
        return Ok(Verdict { status: Status::NoCounterexampleUpTo(max_nodes), evidence: None, family: corpus.describe() });
    };
    let g2 = groups.iter().position(|g2| groups[g1].0.is_subset(&g2.0) && !groups[g1].1.is_subset(&g2.2)).expect("found above");
    let pair = groups[g1].1.iter().find(|&p| !groups[g2].2.contains(p)).expect("violating pair");
    let has = |i: usize| pair_bits(&ps[i].answer).contains(pair);
    let i = *groups[g1].3.iter().find(|&&i| has(i)).expect("member answering the pair");
    let j = *groups[g2].3.iter().find(|&&j| !has(j)).expect("member missing the pair");
    let (d, d_prime) = (corpus.get(i as u64), corpus.get(j as u64));
    verify_monotone_pair(&d, &d_prime, q, v)?;
    Ok(Verdict { status: Status::Refuted, evidence: Some(Evidence::Pair { d, d_prime }), family: corpus.describe() })
}

/// Re-checks a monotonicity violation from scratch.
pub fn verify_monotone_pair(d: &GraphDb, d_prime: &GraphDb, q: &QuerySpec, v: &ViewSpec) -> Result<()> {
    let (s, s2) = (apply_view(d, v, false)?, apply_view(d_prime, v, false)?);
    if !s.edges_subset_of(&s2) {
        return Err(Error::CertificateFailure("view of D is not contained in view of D'".into()));
    }
    if rpq_eval(d, q)?.is_subset(&rpq_eval(d_prime, q)?) {
        return Err(Error::CertificateFailure("answers of D are contained in answers of D'".into()));
    }
    Ok(())
}

/// The certain-answer test for one word: the endpoints of the path for `w`
/// are certain on its view, or a database showing otherwise.
fn word_counterexample(w: &[Label], q: &QuerySpec, v: &ViewSpec, t: &Template) -> Result<Option<GraphDb>> {
    let s = apply_view(&path_of_word(w), v, true)?;
    let (u, z) = (path_node(0), path_node(w.len()));
    let verdict = cert(&s, &u, &z, t)?;
    match verdict.witness_hom {
        None => Ok(None),
        Some(h) => Ok(Some(materialize_counterexample(&s, &u, &z, t, &h, q, v)?)),
    }
}

/// Tests every word of `L(Q)` up to `max_len`, shortest first, for certain
/// endpoints on the view of its path. A failing word refutes monotone
/// determinacy.
pub fn check_monotone_words(q: &QuerySpec, v: &ViewSpec, t: &Template, max_len: usize) -> Result<Verdict> {
    check_sigma(q, v)?;
    let words = enumerate_dfa_words(q.dfa(), max_len);
    let results: Vec<Result<Option<GraphDb>>> = words.par_iter().map(|w| word_counterexample(w, q, v, t)).collect();
    for (w, r) in words.iter().zip(results) {
        if let Some(d) = r? {
            return Ok(Verdict {
                status: Status::Refuted,
                evidence: Some(Evidence::Word { word: w.clone(), counterexample: d }),
                family: format!("words of L(Q) up to length {max_len}"),
            });
        }
    }
    Ok(Verdict {
        status: Status::NoCounterexampleUpTo(max_len),
        evidence: None,
        family: format!("{} words of L(Q) up to length {max_len}", words.len()),
    })
}

/// State of the bad-words automaton: for each earlier position, its chosen
/// template node paired with the view-product state reached since; and the
/// node chosen for the current position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BadWordsState {
    /// Bit `t * n_of_v + s` for each pair (template node, product state).
    pub pairset: BitSet,
    pub last_choice: usize,
}

/// Default cap on stored automaton states for [`decide_monotone_full`].
pub const FULL_DECISION_BUDGET: usize = 2_000_000;

struct BadWords<'a> {
    product: &'a ProductDfa,
    /// `allowed[t * n_of_v + s]`: template nodes `t'` with an edge `t -> t'`
    /// for every view accepting in `s`.
    allowed: Vec<BitSet>,
    /// Product states from which some view can still accept.
    live: Vec<bool>,
    nt: usize,
}

impl<'a> BadWords<'a> {
    fn new(t: &Template, v: &ViewSpec, product: &'a ProductDfa) -> Self {
        let tg = t.hom_target();
        let nt = tg.n();
        let np = product.n_of_v();
        let nviews = product.view_finals.len();
        let label_pos: Vec<Option<usize>> = v.names().iter().map(|l| tg.label_pos.get(l).copied()).collect();
        let mut allowed = Vec::with_capacity(nt * np);
        for ti in 0..nt {
            for s in 0..np {
                let mut b = BitSet::full(nt);
                for (i, label_pos) in label_pos.iter().enumerate() {
                    if product.is_final_for(i, s) {
                        match label_pos {
                            Some(l) => {
                                b.intersect_with(&tg.succ[*l][ti]);
                            }
                            None => b = BitSet::new(nt),
                        }
                    }
                }
                allowed.push(b);
            }
        }
        // Backward reachability to states where some view accepts.
        let mut live: Vec<bool> = (0..np).map(|s| (0..nviews).any(|i| product.is_final_for(i, s))).collect();
        loop {
            let mut changed = false;
            for s in 0..np {
                if !live[s] && (0..product.alphabet().len()).any(|c| live[product.step(s, c)]) {
                    live[s] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        BadWords { product, allowed, live, nt }
    }

    fn np(&self) -> usize {
        self.product.n_of_v()
    }

    /// Choices for the node at a new position, given the advanced pairset.
    fn choices(&self, pairset: &BitSet) -> BitSet {
        // A position against itself only meets views accepting the empty
        // word, whose loops constrain nothing.
        let mut b = BitSet::full(self.nt);
        for p in pairset.iter() {
            b.intersect_with(&self.allowed[p]);
        }
        b
    }

    fn add_position(&self, pairset: &BitSet, tj: usize) -> BitSet {
        let mut p = pairset.clone();
        let init = self.product.initial();
        if self.live[init] {
            p.insert(tj * self.np() + init);
        }
        p
    }

    fn advance(&self, pairset: &BitSet, c: usize) -> BitSet {
        let np = self.np();
        let mut out = BitSet::new(self.nt * np);
        for p in pairset.iter() {
            let (t, s) = (p / np, p % np);
            let s2 = self.product.step(s, c);
            if self.live[s2] {
                out.insert(t * np + s2);
            }
        }
        out
    }
}

/// Decides monotone determinacy: holds exactly when no word of `L(Q)` has a
/// path view admitting a homomorphism to the template that sends the first
/// position to a source and the last to a target. The automaton for such
/// words is explored lazily in product with the query automaton, breadth
/// first, so a refuting word is a shortest one.
pub fn decide_monotone_full(q: &QuerySpec, v: &ViewSpec, t: &Template, budget: usize) -> Result<Verdict> {
    check_sigma(q, v)?;
    if *t.graph.alphabet() != v.tau() {
        return Err(Error::AlphabetMismatch("template labels differ from the view names".into()));
    }
    let product = v.product();
    let bw = BadWords::new(t, v, &product);
    let dfa = q.dfa();
    let qdead = dfa.dead_states();
    let src = t.source_bits();
    let tgt = t.target_bits();
    type Key = (usize, BadWordsState);
    let mut parent: HashMap<Key, Option<(Key, usize)>> = HashMap::new();
    // Subsumption: per (query state, last choice), the pairsets seen so far.
    let mut seen: HashMap<(usize, usize), Vec<BitSet>> = HashMap::new();
    let mut queue: VecDeque<Key> = VecDeque::new();
    let mut push = |key: Key, from: Option<(Key, usize)>, parent: &mut HashMap<Key, Option<(Key, usize)>>, queue: &mut VecDeque<Key>| -> Result<()> {
        let bucket = seen.entry((key.0, key.1.last_choice)).or_default();
        if bucket.iter().any(|p| p.is_subset(&key.1.pairset)) {
            return Ok(());
        }
        bucket.retain(|p| !key.1.pairset.is_subset(p));
        bucket.push(key.1.pairset.clone());
        parent.insert(key.clone(), from);
        queue.push_back(key);
        if parent.len() > budget {
            return Err(Error::BudgetExceeded(format!("more than {budget} automaton states")));
        }
        Ok(())
    };
    let q0 = dfa.initial();
    if qdead.contains(&q0) {
        return Ok(Verdict { status: Status::Holds, evidence: Some(Evidence::Note("L(Q) is empty".into())), family: "all words".into() });
    }
    let empty = BitSet::new(bw.nt * bw.np());
    for t0 in bw.choices(&empty).iter() {
        if src.contains(t0) {
            let st = BadWordsState { pairset: bw.add_position(&empty, t0), last_choice: t0 };
            push((q0, st), None, &mut parent, &mut queue)?;
        }
    }
    let k = dfa.alphabet().len();
    while let Some(key) = queue.pop_front() {
        let (qs, st) = &key;
        if dfa.is_final(*qs) && tgt.contains(st.last_choice) {
            let mut word = Vec::new();
            let mut cur = key.clone();
            while let Some(Some((prev, c))) = parent.get(&cur) {
                word.push(dfa.alphabet()[*c].clone());
                cur = prev.clone();
            }
            word.reverse();
            let counterexample = word_counterexample(&word, q, v, t)?.ok_or_else(|| {
                Error::CertificateFailure(format!("word {} is accepted but its endpoints are certain", format_word(&word)))
            })?;
            return Ok(Verdict {
                status: Status::Refuted,
                evidence: Some(Evidence::Word { word, counterexample }),
                family: "all words".into(),
            });
        }
        for c in 0..k {
            let q2 = dfa.step(*qs, c);
            if qdead.contains(&q2) {
                continue;
            }
            let adv = bw.advance(&st.pairset, c);
            for tj in bw.choices(&adv).iter() {
                let next = BadWordsState { pairset: bw.add_position(&adv, tj), last_choice: tj };
                push((q2, next), Some((key.clone(), c)), &mut parent, &mut queue)?;
            }
        }
    }
    Ok(Verdict {
        status: Status::Holds,
        evidence: Some(Evidence::Note(format!("explored {} automaton states; no bad word in L(Q)", parent.len()))),
        family: "all words".into(),
    })
}

/// Reachable automaton states without subsumption pruning, for checking
/// that pruning does not change emptiness. Returns whether an accepting
/// state is reachable, or `None` past `budget` states.
pub fn bad_words_reachable_unpruned(q: &QuerySpec, v: &ViewSpec, t: &Template, budget: usize) -> Result<Option<bool>> {
    check_sigma(q, v)?;
    let product = v.product();
    let bw = BadWords::new(t, v, &product);
    let dfa = q.dfa();
    let (src, tgt) = (t.source_bits(), t.target_bits());
    let empty = BitSet::new(bw.nt * bw.np());
    let mut seen: HashSet<(usize, BadWordsState)> = HashSet::new();
    let mut stack = Vec::new();
    for t0 in bw.choices(&empty).iter().filter(|&t0| src.contains(t0)) {
        let k = (dfa.initial(), BadWordsState { pairset: bw.add_position(&empty, t0), last_choice: t0 });
        if seen.insert(k.clone()) {
            stack.push(k);
        }
    }
    while let Some((qs, st)) = stack.pop() {
        if seen.len() > budget {
            return Ok(None);
        }
        if dfa.is_final(qs) && tgt.contains(st.last_choice) {
            return Ok(Some(true));
        }
        for c in 0..dfa.alphabet().len() {
            let adv = bw.advance(&st.pairset, c);
            for tj in bw.choices(&adv).iter() {
                let k = (dfa.step(qs, c), BadWordsState { pairset: bw.add_position(&adv, tj), last_choice: tj });
                if seen.insert(k.clone()) {
                    stack.push(k);
                }
            }
        }
    }
    Ok(Some(false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::word;
    use crate::oracle::{figure1_d, figure1_d_prime, fixture, FixtureId};
    use crate::template::{build_template, template_core};

    fn ex1_prime() -> (QuerySpec, ViewSpec) {
        (QuerySpec::parse(&["a"], "a a").unwrap(), ViewSpec::parse(&["a"], &[("V1", "a a a"), ("V2", "a a a a")]).unwrap())
    }

    #[test]
    fn determinacy_refuted_for_a2() {
        let (q, v) = ex1_prime();
        let r = check_determinacy_bounded(&q, &v, 3).unwrap();
        assert!(r.is_refuted());
        let Some(Evidence::Pair { d, d_prime }) = &r.evidence else { panic!("pair evidence") };
        assert_eq!(d.num_nodes(), 1);
        assert_eq!(d.num_edges(), 0);
        assert_eq!(d_prime.num_edges(), 2);
        assert_eq!(apply_view(d_prime, &v, false).unwrap().num_edges(), 0);
        assert_eq!(rpq_eval(d_prime, &q).unwrap().len(), 1);
    }

    #[test]
    fn determinacy_not_refuted_for_ex1_small() {
        let f = fixture(FixtureId::Ex1);
        let r = check_determinacy_bounded(&f.query, &f.views, 3).unwrap();
        assert_eq!(r.status, Status::NoCounterexampleUpTo(3));
    }

    #[test]
    fn identity_views_never_refute() {
        let q = QuerySpec::parse(&["a", "b"], "a b* a").unwrap();
        let v = ViewSpec::parse(&["a", "b"], &[("A", "a"), ("B", "b")]).unwrap();
        assert!(!check_determinacy_bounded(&q, &v, 2).unwrap().is_refuted());
        assert!(!check_monotone_pairs_bounded(&q, &v, 2).unwrap().is_refuted());
    }

    #[test]
    fn monotone_pairs_with_figure1() {
        let f = fixture(FixtureId::Ex1);
        let opts = FamilyOptions { extra: vec![figure1_d(), figure1_d_prime()], ..FamilyOptions::default() };
        let r = check_monotone_pairs_bounded_with(&f.query, &f.views, 2, &opts).unwrap();
        assert!(r.is_refuted());
        let Some(Evidence::Pair { d, d_prime }) = &r.evidence else { panic!() };
        verify_monotone_pair(d, d_prime, &f.query, &f.views).unwrap();
    }

    #[test]
    fn structured_family_when_over_budget() {
        let f = fixture(FixtureId::Ex2);
        let opts = FamilyOptions { budget: 50_000, random_samples: 200, ..FamilyOptions::default() };
        let r = check_monotone_pairs_bounded_with(&f.query, &f.views, 3, &opts).unwrap();
        assert_eq!(r.status, Status::NoCounterexampleUpTo(3));
        assert!(r.family.contains("simple paths"));
        let tight = FamilyOptions { budget: 10, ..FamilyOptions::default() };
        assert!(matches!(check_determinacy_bounded_with(&f.query, &f.views, 3, &tight), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn words_ex1_refuted_at_a5() {
        let f = fixture(FixtureId::Ex1);
        let t = build_template(&f.query, &f.views).unwrap();
        let r = check_monotone_words(&f.query, &f.views, &t, 8).unwrap();
        assert_eq!(r.evidence_word(), Some(&word("aaaaa")));
        let full = decide_monotone_full(&f.query, &f.views, &template_core(&t), FULL_DECISION_BUDGET).unwrap();
        assert_eq!(full.evidence_word(), Some(&word("aaaaa")));
    }

    #[test]
    fn ex2_holds() {
        let f = fixture(FixtureId::Ex2);
        let t = template_core(&build_template(&f.query, &f.views).unwrap());
        assert_eq!(check_monotone_words(&f.query, &f.views, &t, 6).unwrap().status, Status::NoCounterexampleUpTo(6));
        assert_eq!(decide_monotone_full(&f.query, &f.views, &t, FULL_DECISION_BUDGET).unwrap().status, Status::Holds);
    }

    #[test]
    fn empty_query_holds() {
        let q = QuerySpec::new(BTreeSet::from([Label::from("a")]), crate::automata::RegexAst::Alt(Vec::new())).unwrap();
        assert!(enumerate_dfa_words(q.dfa(), 4).is_empty());
        let v = ViewSpec::parse(&["a"], &[("V", "a")]).unwrap();
        let t = build_template(&q, &v).unwrap();
        assert_eq!(decide_monotone_full(&q, &v, &t, 1000).unwrap().status, Status::Holds);
    }

    #[test]
    fn pruning_agrees_with_unpruned_reachability() {
        let cases: [(&[&str], &str, &[(&str, &str)]); 5] = [
            (&["a"], "a a", &[("V", "a")]),
            (&["a"], "a a", &[("V", "a a a")]),
            (&["a"], "a a a a a", &[("V1", "a a a"), ("V2", "a a a a")]),
            (&["a", "b"], "a b* a", &[("V1", "a b*"), ("V2", "b* a")]),
            (&["a", "b"], "a b", &[("V1", "a"), ("V2", "a b")]),
        ];
        for (sigma, qt, vt) in cases {
            let q = QuerySpec::parse(sigma, qt).unwrap();
            let v = ViewSpec::parse(sigma, vt).unwrap();
            let t = template_core(&build_template(&q, &v).unwrap());
            let pruned = decide_monotone_full(&q, &v, &t, FULL_DECISION_BUDGET).unwrap().is_refuted();
            assert_eq!(bad_words_reachable_unpruned(&q, &v, &t, 500_000).unwrap(), Some(pruned), "{qt}");
        }
    }

    #[test]
    fn verdict_text() {
        let f = fixture(FixtureId::Ex1);
        let t = build_template(&f.query, &f.views).unwrap();
        let text = check_monotone_words(&f.query, &f.views, &t, 8).unwrap().to_string();
        assert!(text.starts_with("status Refuted\nevidence_word aaaaa\n"));
    }
}

//! Datalog programs: text format, bottom-up evaluation, and emission of the
//! program equivalent to the pebble game for one carried pebble.
//!
//! Text format, one item per line:
//!
//! ```text
//! # comment
//! @goal goal
//! goal(X,Y) :- V1(X,Z), p(Z,Y).
//! ```
//!
//! Every argument is a variable. Predicates that never occur in a head are
//! extensional and read from the instance by label; `adom` is the built-in
//! unary relation holding every node of the instance.

use crate::error::{Error, Result};
use crate::graph::{io::is_ident, GraphDb, NodeId};
use crate::pebble::GameConfig;
use crate::template::PinnedTarget;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

/// Name of the built-in active-domain predicate.
pub const ADOM: &str = "adom";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, args: &[&str]) -> Self {
        Atom { pred: pred.into(), args: args.iter().map(|a| a.to_string()).collect() }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.pred, self.args.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Atom>,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.body.iter().map(Atom::to_string).collect();
        write!(f, "{} :- {}.", self.head, body.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatalogProgram {
    pub rules: Vec<Rule>,
    pub goal: String,
}

impl DatalogProgram {
    /// Checks the program and builds it.
    pub fn new(rules: Vec<Rule>, goal: impl Into<String>) -> Result<Self> {
        let p = DatalogProgram { rules, goal: goal.into() };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        let mut arity: HashMap<&str, usize> = HashMap::from([(ADOM, 1)]);
        for r in &self.rules {
            for a in std::iter::once(&r.head).chain(&r.body) {
                let n = *arity.entry(&a.pred).or_insert(a.args.len());
                if n != a.args.len() {
                    return Err(Error::Invalid(format!("predicate `{}` used with arities {n} and {}", a.pred, a.args.len())));
                }
            }
            if r.head.pred == ADOM {
                return Err(Error::Invalid(format!("`{ADOM}` is built in and cannot be defined")));
            }
            let bound: HashSet<&String> = r.body.iter().flat_map(|a| &a.args).collect();
            if let Some(v) = r.head.args.iter().find(|v| !bound.contains(v)) {
                return Err(Error::UnboundHeadVariable(v.clone()));
            }
        }
        match arity.get(self.goal.as_str()) {
            Some(2) => Ok(()),
            Some(n) => Err(Error::Invalid(format!("goal `{}` has arity {n}, expected 2", self.goal))),
            None => Err(Error::Invalid(format!("goal `{}` does not occur in the program", self.goal))),
        }
    }

    /// Predicates defined by some rule.
    pub fn idb(&self) -> BTreeMap<String, usize> {
        self.rules.iter().map(|r| (r.head.pred.clone(), r.head.args.len())).collect()
    }

    /// Predicates read from the instance (including `adom` when used).
    pub fn edb(&self) -> BTreeSet<String> {
        let idb = self.idb();
        self.rules.iter().flat_map(|r| &r.body).map(|a| a.pred.clone()).filter(|p| !idb.contains_key(p)).collect()
    }

    pub fn max_idb_arity(&self) -> usize {
        self.idb().values().copied().max().unwrap_or(0)
    }

    pub fn max_rule_vars(&self) -> usize {
        self.rules
            .iter()
            .map(|r| std::iter::once(&r.head).chain(&r.body).flat_map(|a| &a.args).collect::<HashSet<_>>().len())
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for DatalogProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "@goal {}", self.goal)?;
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

fn parse_atom(text: &str, line: usize) -> Result<(Atom, &str)> {
    let text = text.trim_start();
    let open = text.find('(').ok_or_else(|| Error::parse(line, format!("expected `(` in `{text}`")))?;
    let close = text.find(')').ok_or_else(|| Error::parse(line, format!("expected `)` in `{text}`")))?;
    if close < open {
        return Err(Error::parse(line, "unbalanced parentheses"));
    }
    let pred = text[..open].trim();
    if !is_ident(pred) {
        return Err(Error::parse(line, format!("bad predicate name `{pred}`")));
    }
    let inner = text[open + 1..close].trim();
    let args: Vec<String> = if inner.is_empty() { Vec::new() } else { inner.split(',').map(|a| a.trim().to_string()).collect() };
    if let Some(a) = args.iter().find(|a| !is_ident(a)) {
        return Err(Error::parse(line, format!("bad variable `{a}`")));
    }
    Ok((Atom { pred: pred.to_string(), args }, &text[close + 1..]))
}

/// Parses the text format.
pub fn parse_datalog(text: &str) -> Result<DatalogProgram> {
    let mut goal = None;
    let mut rules = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("@goal") {
            let g = rest.trim();
            if !is_ident(g) {
                return Err(Error::parse(line_no, format!("bad goal predicate `{g}`")));
            }
            goal = Some(g.to_string());
            continue;
        }
        let line = line.strip_suffix('.').ok_or_else(|| Error::parse(line_no, "rule must end with `.`"))?;
        let (head, rest) = parse_atom(line, line_no)?;
        let rest = rest.trim_start().strip_prefix(":-").ok_or_else(|| Error::parse(line_no, "expected `:-`"))?;
        let mut body = Vec::new();
        let mut rest = rest;
        loop {
            let (a, r) = parse_atom(rest, line_no)?;
            body.push(a);
            let r = r.trim_start();
            if r.is_empty() {
                break;
            }
            rest = r.strip_prefix(',').ok_or_else(|| Error::parse(line_no, format!("unexpected `{r}`")))?;
        }
        rules.push(Rule { head, body });
    }
    let goal = goal.ok_or_else(|| Error::parse(0, "missing `@goal` directive"))?;
    DatalogProgram::new(rules, goal)
}

pub fn serialize_datalog(p: &DatalogProgram) -> String {
    p.to_string()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    Naive,
    #[default]
    SemiNaive,
}

type Tuple = Vec<u32>;
type Relations = HashMap<String, HashSet<Tuple>>;

struct CompiledRule {
    head: (String, Vec<usize>),
    body: Vec<(String, Vec<usize>)>,
    nvars: usize,
}

fn compile(r: &Rule) -> CompiledRule {
    let mut vars: HashMap<String, usize> = HashMap::new();
    let mut idx = |v: &String| {
        let n = vars.len();
        *vars.entry(v.clone()).or_insert(n)
    };
    let body: Vec<(String, Vec<usize>)> = r.body.iter().map(|a| (a.pred.clone(), a.args.iter().map(&mut idx).collect())).collect();
    let head = (r.head.pred.clone(), r.head.args.iter().map(&mut idx).collect());
    CompiledRule { head, body, nvars: vars.len() }
}

/// All head tuples of `rule`; body atom `delta_at` (if any) reads `delta`.
fn fire(rule: &CompiledRule, full: &Relations, delta_at: Option<(usize, &HashSet<Tuple>)>, out: &mut HashSet<Tuple>) {
    let empty = HashSet::new();
    let rel = |i: usize| -> &HashSet<Tuple> {
        match delta_at {
            Some((j, d)) if j == i => d,
            _ => full.get(&rule.body[i].0).unwrap_or(&empty),
        }
    };
    // Delta atom first, then the others in order.
    let mut order: Vec<usize> = (0..rule.body.len()).collect();
    if let Some((j, _)) = delta_at {
        order.retain(|&i| i != j);
        order.insert(0, j);
    }
    let mut binding: Vec<Option<u32>> = vec![None; rule.nvars];
    join(rule, &order, 0, &rel, &mut binding, out);
}

fn join<'a>(
    rule: &CompiledRule,
    order: &[usize],
    depth: usize,
    rel: &dyn Fn(usize) -> &'a HashSet<Tuple>,
    binding: &mut Vec<Option<u32>>,
    out: &mut HashSet<Tuple>,
) {
    if depth == order.len() {
        out.insert(rule.head.1.iter().map(|&v| binding[v].expect("head variables are bound")).collect());
        return;
    }
    let i = order[depth];
    let args = &rule.body[i].1;
    let r = rel(i);
    if args.iter().all(|&v| binding[v].is_some()) {
        let t: Tuple = args.iter().map(|&v| binding[v].unwrap()).collect();
        if r.contains(&t) {
            join(rule, order, depth + 1, rel, binding, out);
        }
        return;
    }
    for t in r {
        let mut set = Vec::new();
        let mut ok = true;
        for (&v, &x) in args.iter().zip(t) {
            match binding[v] {
                Some(b) if b != x => {
                    ok = false;
                    break;
                }
                Some(_) => {}
                None => {
                    binding[v] = Some(x);
                    set.push(v);
                }
            }
        }
        if ok {
            join(rule, order, depth + 1, rel, binding, out);
        }
        for v in set {
            binding[v] = None;
        }
    }
}

/// Least fixpoint of the program on the instance, by naive iteration.
pub fn datalog_naive_eval(p: &DatalogProgram, s: &GraphDb) -> Result<BTreeSet<(NodeId, NodeId)>> {
    datalog_eval_with(p, s, Strategy::Naive)
}

/// Least fixpoint with a chosen iteration strategy; both give the same
/// result.
pub fn datalog_eval_with(p: &DatalogProgram, s: &GraphDb, strategy: Strategy) -> Result<BTreeSet<(NodeId, NodeId)>> {
    p.check()?;
    let names: Vec<&NodeId> = s.nodes().iter().collect();
    let pos: HashMap<&NodeId, u32> = names.iter().enumerate().map(|(i, n)| (*n, i as u32)).collect();
    let mut full: Relations = HashMap::new();
    full.insert(ADOM.to_string(), (0..names.len() as u32).map(|i| vec![i]).collect());
    for e in s.edges() {
        full.entry(e.label.to_string()).or_default().insert(vec![pos[&e.src], pos[&e.dst]]);
    }
    let idb = p.idb();
    for name in idb.keys() {
        if name != ADOM && full.get(name).is_some_and(|r| !r.is_empty()) {
            return Err(Error::Invalid(format!("predicate `{name}` is both a view name and defined by rules")));
        }
        full.insert(name.clone(), HashSet::new());
    }
    let rules: Vec<CompiledRule> = p.rules.iter().map(compile).collect();
    match strategy {
        Strategy::Naive => loop {
            let mut changed = false;
            let mut derived: Vec<(String, HashSet<Tuple>)> = Vec::new();
            for r in &rules {
                let mut out = HashSet::new();
                fire(r, &full, None, &mut out);
                derived.push((r.head.0.clone(), out));
            }
            for (pred, ts) in derived {
                let rel = full.get_mut(&pred).expect("idb relation");
                for t in ts {
                    changed |= rel.insert(t);
                }
            }
            if !changed {
                break;
            }
        },
        Strategy::SemiNaive => {
            let mut delta: Relations = HashMap::new();
            for r in &rules {
                let mut out = HashSet::new();
                fire(r, &full, None, &mut out);
                delta.entry(r.head.0.clone()).or_default().extend(out);
            }
            loop {
                let mut fresh: Relations = HashMap::new();
                for (pred, ts) in &delta {
                    let rel = full.get_mut(pred).expect("idb relation");
                    for t in ts {
                        if rel.insert(t.clone()) {
                            fresh.entry(pred.clone()).or_default().insert(t.clone());
                        }
                    }
                }
                if fresh.is_empty() {
                    break;
                }
                let mut next: Relations = HashMap::new();
                for r in &rules {
                    for (i, (pred, _)) in r.body.iter().enumerate() {
                        if let Some(d) = fresh.get(pred) {
                            let mut out = HashSet::new();
                            fire(r, &full, Some((i, d)), &mut out);
                            next.entry(r.head.0.clone()).or_default().extend(out);
                        }
                    }
                }
                delta = next;
            }
        }
    }
    Ok(full
        .get(&p.goal)
        .into_iter()
        .flatten()
        .map(|t| (names[t[0] as usize].clone(), names[t[1] as usize].clone()))
        .collect())
}

/// Largest number of rules [`emit_datalog`] produces.
pub const EMISSION_RULE_BUDGET: usize = 200_000;

/// Predicate stating that an element's image avoids template node `t`.
fn out_pred(t: &PinnedTarget, i: usize) -> String {
    format!("out_{}", t.node_name(i))
}

/// Emits the program computing the pairs on which Player 1 wins the game
/// with `cfg` against `t`. Supported for one carried pebble and two placed
/// ones.
///
/// For each template node `t` the predicate `out_t(Z,X,Y)` records that, in
/// the game for the pair `(X,Y)`, no surviving position maps `Z` to `t`;
/// equivalently the images of `Z` lie in the template minus `t`. The rules
/// are the deletions of one round: pinning, loops, and loss of support
/// across every pattern of atoms between two elements. The goal holds once
/// some element has lost every image.
pub fn emit_datalog<T: AsRef<PinnedTarget>>(t: &T, cfg: GameConfig) -> Result<DatalogProgram> {
    let t = t.as_ref();
    if !t.vacuous_loops().is_empty() {
        // Dropping loops needs an inequality the program cannot express.
        return Err(Error::Invalid("emission does not support views accepting the empty word".into()));
    }
    if (cfg.l, cfg.k) != (1, 2) {
        return Err(Error::EmissionTooLarge(format!(
            "emission is implemented for (l, k) = (1, 2); requested ({}, {})",
            cfg.l, cfg.k
        )));
    }
    let tg = &t.target;
    let n = tg.n();
    let mut labels: Vec<(&crate::graph::Label, usize)> = tg.label_pos.iter().map(|(l, &i)| (l, i)).collect();
    labels.sort();
    let patterns = 1usize << (2 * labels.len());
    let estimate = patterns.saturating_mul(n).saturating_add(4 * n + 1);
    if labels.len() > 16 || estimate > EMISSION_RULE_BUDGET {
        return Err(Error::EmissionTooLarge(format!("about {estimate} rules")));
    }
    let ad = |v: &str| Atom::new(ADOM, &[v]);
    let out = |i: usize, z: &str| Atom::new(out_pred(t, i), &[z, "X", "Y"]);
    let mut rules = Vec::new();
    for i in 0..n {
        if !t.src.contains(i) {
            rules.push(Rule { head: out(i, "X"), body: vec![ad("X"), ad("Y")] });
        }
        if !t.tgt.contains(i) {
            rules.push(Rule { head: out(i, "Y"), body: vec![ad("X"), ad("Y")] });
        }
        for &(l, li) in &labels {
            if !tg.loops[li].contains(i) {
                rules.push(Rule {
                    head: out(i, "Z"),
                    body: vec![Atom::new(l.as_str(), &["Z", "Z"]), ad("X"), ad("Y")],
                });
            }
        }
    }
    // Patterns of atoms between Z1 and Z2: bit 2j is label j forward, bit
    // 2j+1 is label j backward.
    for mask in 1..patterns {
        let mut atoms = Vec::new();
        for (j, &(l, _)) in labels.iter().enumerate() {
            if mask >> (2 * j) & 1 == 1 {
                atoms.push(Atom::new(l.as_str(), &["Z1", "Z2"]));
            }
            if mask >> (2 * j + 1) & 1 == 1 {
                atoms.push(Atom::new(l.as_str(), &["Z2", "Z1"]));
            }
        }
        for t1 in 0..n {
            let mut body = atoms.clone();
            let mut supported = false;
            for t2 in 0..n {
                let ok = labels.iter().enumerate().all(|(j, &(_, li))| {
                    (mask >> (2 * j) & 1 == 0 || tg.has_edge(t1, li, t2)) && (mask >> (2 * j + 1) & 1 == 0 || tg.has_edge(t2, li, t1))
                });
                if ok {
                    supported = true;
                    body.push(out(t2, "Z2"));
                }
            }
            if !supported {
                body.push(ad("X"));
                body.push(ad("Y"));
            }
            rules.push(Rule { head: out(t1, "Z1"), body });
        }
    }
    rules.push(Rule { head: Atom::new("goal", &["X", "Y"]), body: (0..n).map(|i| out(i, "Z")).collect() });
    if n == 0 {
        // No images at all: every element of a nonempty instance is stuck.
        let last = rules.last_mut().expect("goal rule");
        last.body = vec![ad("Z"), ad("X"), ad("Y")];
    }
    DatalogProgram::new(rules, "goal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pebble::{pebble_solve_with, GameOptions};
    use crate::oracle::random_db;
    use crate::graph::Label;

    #[test]
    fn parse_print_roundtrip() {
        let text = "# closure\n@goal tc\ntc(X,Y) :- E(X,Y).\ntc(X,Y) :- E(X,Z), tc(Z,Y).\n";
        let p = parse_datalog(text).unwrap();
        assert_eq!(p.rules.len(), 2);
        assert_eq!(parse_datalog(&serialize_datalog(&p)).unwrap(), p);
        assert_eq!(p.edb(), BTreeSet::from(["E".to_string()]));
    }

    #[test]
    fn unbound_head_variable() {
        let e = parse_datalog("@goal g\ng(X,Y) :- V1(X,Z).\n").unwrap_err();
        assert_eq!(e, Error::UnboundHeadVariable("Y".into()));
    }

    #[test]
    fn copy_and_closure() {
        let s = GraphDb::from_edges([("x", "V1", "y")]);
        let p = parse_datalog("@goal goal\ngoal(X,Y) :- V1(X,Y).\n").unwrap();
        assert_eq!(datalog_naive_eval(&p, &s).unwrap(), BTreeSet::from([("x".into(), "y".into())]));
        let chain = GraphDb::from_edges([("1", "E", "2"), ("2", "E", "3")]);
        let tc = parse_datalog("@goal tc\ntc(X,Y) :- E(X,Y).\ntc(X,Y) :- E(X,Z), tc(Z,Y).\n").unwrap();
        let want: BTreeSet<(NodeId, NodeId)> = [("1", "2"), ("2", "3"), ("1", "3")].iter().map(|&(a, b)| (a.into(), b.into())).collect();
        assert_eq!(datalog_naive_eval(&tc, &chain).unwrap(), want);
        assert_eq!(datalog_eval_with(&tc, &chain, Strategy::SemiNaive).unwrap(), want);
    }

    #[test]
    fn all_loops_template_never_fires() {
        let g = GraphDb::from_edges([("t", "V1", "t"), ("t", "V2", "t")]);
        let set = BTreeSet::from([NodeId::from("t")]);
        let pt = PinnedTarget::new(&g, &set, &set).unwrap();
        let p = emit_datalog(&pt, GameConfig::new(1, 2).unwrap()).unwrap();
        assert!(p.max_idb_arity() <= 3);
        assert!(p.max_rule_vars() <= 4);
        let ls = [Label::from("V1"), Label::from("V2")];
        for seed in 0..10 {
            assert!(datalog_naive_eval(&p, &random_db(&ls, 4, 0.4, seed)).unwrap().is_empty());
        }
    }

    #[test]
    fn emission_agrees_with_game_on_small_template() {
        // A directed 3-cycle with a source and a target node.
        let g = GraphDb::from_edges([("a", "E", "b"), ("b", "E", "c"), ("c", "E", "a"), ("a", "F", "a")]);
        let pt = PinnedTarget::new(&g, &BTreeSet::from(["a".into()]), &BTreeSet::from(["b".into(), "c".into()])).unwrap();
        let cfg = GameConfig::new(1, 2).unwrap();
        let p = emit_datalog(&pt, cfg).unwrap();
        let opts = GameOptions { hom_shortcut: false, ..GameOptions::default() };
        let ls = [Label::from("E"), Label::from("F")];
        for seed in 0..40 {
            let s = random_db(&ls, 1 + (seed % 4) as usize, 0.35, seed);
            let got = datalog_eval_with(&p, &s, Strategy::SemiNaive).unwrap();
            assert_eq!(got, datalog_naive_eval(&p, &s).unwrap());
            for u in s.nodes() {
                for v in s.nodes() {
                    let r = pebble_solve_with(&s, Some(u), Some(v), &pt, cfg, &opts).unwrap();
                    assert_eq!(r.player1_wins(), got.contains(&(u.clone(), v.clone())), "seed {seed} pair {u} {v}");
                }
            }
        }
    }

    #[test]
    fn larger_games_are_not_emitted() {
        let g = GraphDb::from_edges([("t", "V1", "t")]);
        let set = BTreeSet::from([NodeId::from("t")]);
        let pt = PinnedTarget::new(&g, &set, &set).unwrap();
        assert!(matches!(emit_datalog(&pt, GameConfig::new(2, 3).unwrap()), Err(Error::EmissionTooLarge(_))));
    }
}

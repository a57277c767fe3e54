//! The `rpqrewrite` command line.
//!
//! Every command reads its inputs completely and validates them before any
//! search starts. Exit codes: 0 success, 1 negative verdict, 2 usage or
//! parse error, 3 budget exceeded. All listings are sorted.

use crate::cfpq::cert_cfpq;
use crate::datalog::{datalog_eval_with, emit_datalog, parse_datalog, serialize_datalog, Strategy};
use crate::decision::{
    check_determinacy_bounded_with, check_monotone_pairs_bounded_with, check_monotone_words, decide_monotone_full,
    FamilyOptions, Verdict, FULL_DECISION_BUDGET,
};
use crate::error::{Error, Result};
use crate::graph::io::{parse_graph, serialize_graph};
use crate::graph::{GraphDb, NodeId};
use crate::oracle::{fixture, FixtureId};
use crate::pebble::{rewrite_eval, GameConfig};
use crate::preimage::{find_preimage, gen_3col, rewrite_via_preimage, PreimageResult};
use crate::rpq::{apply_view, rpq_eval, ViewInstance, ViewSpec};
use crate::specfile::{parse_spec, SpecFile};
use crate::template::{build_template, cert, materialize_counterexample, parse_template_dump, template_core, PinnedTarget, Template};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Parser, Debug)]
#[command(name = "rpqrewrite", version, about = "Regular path queries under views")]
struct Cli {
    /// Caps the number of worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct SpecArg {
    /// Spec file (alphabet, views, query). Implied under `fixture`.
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct InputArgs {
    /// Database over the base alphabet; the views are applied to it.
    #[arg(long, conflicts_with = "instance")]
    db: Option<PathBuf>,
    /// View instance over the view names.
    #[arg(long)]
    instance: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct TemplateArgs {
    /// Use this template dump instead of building one from the spec.
    #[arg(long)]
    template: Option<PathBuf>,
    /// Skip the core computation.
    #[arg(long)]
    full_template: bool,
}

#[derive(Clone, Copy, Debug)]
enum LArg {
    Auto,
    Fixed(usize),
}

impl FromStr for LArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(LArg::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(LArg::Fixed(n)),
            _ => Err(format!("expected a positive integer or `auto`, got `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Naive,
    SemiNaive,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Answers the query on a database.
    Eval {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        db: PathBuf,
    },
    /// Prints the view image of a database.
    ApplyView {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        db: PathBuf,
        /// Keep database nodes that occur in no view tuple.
        #[arg(long)]
        keep_all_nodes: bool,
    },
    /// Prints the certain-answer template.
    Template {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        core: bool,
    },
    /// Certain answers on a view instance.
    Cert {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        input: InputArgs,
        /// Test a single pair and print a counterexample when it is not certain.
        #[arg(long, num_args = 2, value_names = ["U", "V"])]
        pair: Option<Vec<String>>,
        #[arg(long)]
        core: bool,
        #[arg(long)]
        template: Option<PathBuf>,
    },
    /// Pairs on which Player 1 wins the (l, l+1) pebble game.
    RewriteEval {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        l: LArg,
        #[command(flatten)]
        tmpl: TemplateArgs,
    },
    /// Prints the Datalog program of the (l, k) game.
    EmitDatalog {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        l: usize,
        /// Defaults to l + 1.
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        tmpl: TemplateArgs,
    },
    /// Evaluates a Datalog program on a view instance.
    DatalogEval {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        program: PathBuf,
        #[arg(long, value_enum, default_value = "semi-naive")]
        strategy: StrategyArg,
    },
    /// Searches for a violation of monotone determinacy.
    DecideMondet {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        max_len: usize,
        /// Run the complete decision procedure instead of the bounded word search.
        #[arg(long)]
        full: bool,
        #[arg(long, requires = "full")]
        budget: Option<usize>,
    },
    /// Bounded search over databases for a determinacy violation.
    CheckDet {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        max_nodes: usize,
        /// Look for V(D) ⊆ V(D') with Q(D) ⊄ Q(D') instead.
        #[arg(long)]
        monotone: bool,
        /// Largest number of databases examined.
        #[arg(long)]
        budget: Option<u64>,
        /// Random databases used when the exhaustive family is over budget.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Searches for a database whose view image is the instance.
    Preimage {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        max_nodes: usize,
    },
    /// Answers the query on a view instance through a preimage.
    RewritePreimage {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 8)]
        max_nodes: usize,
    },
    /// Encodes an undirected graph as a 3-colourability view instance.
    #[command(name = "gen-3col")]
    Gen3Col {
        /// Lines `node u` and `edge u v` (an optional middle label is ignored).
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        spec_out: Option<PathBuf>,
        #[arg(long)]
        instance_out: Option<PathBuf>,
    },
    /// Prints the regularized automaton of every view.
    RegularizeCfg {
        #[command(flatten)]
        spec: SpecArg,
    },
    /// Runs a command against a built-in example (`Ex1`, `Ex2`, `Ex3`,
    /// `ThreeCol`); `fixture <id> spec` prints its spec file.
    Fixture {
        id: String,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        rest: Vec<String>,
    },
}

/// Runs the command line on the process arguments and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let mut ctx = Ctx { out: Vec::new(), err: Vec::new(), fixture_spec: None };
    let code = ctx.dispatch(args);
    let _ = out.write_all(&ctx.out).and_then(|_| out.flush());
    let _ = err.write_all(&ctx.err).and_then(|_| err.flush());
    code
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded(_) | Error::ResourceLimit(_) | Error::EmissionTooLarge(_) | Error::TemplateTooLarge(_) => 3,
        Error::NotAViewImage => 1,
        _ => 2,
    }
}

/// Output is buffered so commands can run inside a thread pool.
struct Ctx {
    out: Vec<u8>,
    err: Vec<u8>,
    fixture_spec: Option<String>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn pairs_text(pairs: &BTreeSet<(NodeId, NodeId)>) -> String {
    pairs.iter().map(|(x, y)| format!("{x} {y}\n")).collect()
}

fn verdict_code(v: &Verdict) -> i32 {
    i32::from(v.is_refuted())
}

/// Undirected graph for `gen-3col`.
fn parse_undirected(text: &str) -> Result<GraphDb> {
    let mut g = GraphDb::new(["e"]);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = line.split_whitespace().collect();
        let ident = |t: &str| -> Result<NodeId> {
            if crate::graph::io::is_ident(t) {
                Ok(NodeId::from(t))
            } else {
                Err(Error::Parse { line: i + 1, msg: format!("invalid identifier `{t}`") })
            }
        };
        match toks.as_slice() {
            [] => {}
            ["node", u] => {
                g.add_node(ident(u)?);
            }
            ["edge", u, v] | ["edge", u, _, v] => {
                g.add_edge(ident(u)?, "e", ident(v)?)?;
            }
            _ => return Err(Error::Parse { line: i + 1, msg: "expected `node <u>` or `edge <u> <v>`".into() }),
        }
    }
    Ok(g)
}

impl Ctx {
    fn dispatch(&mut self, args: Vec<OsString>) -> i32 {
        let cli = match Cli::try_parse_from(&args) {
            Ok(c) => c,
            Err(e) => {
                use clap::error::ErrorKind;
                let code = match e.kind() {
                    ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                    _ => 2,
                };
                let text = e.render().to_string();
                let _ = if code == 0 { write!(self.out, "{text}") } else { write!(self.err, "{text}") };
                return code;
            }
        };
        let threads = cli.threads;
        let result = match threads {
            Some(0) => Err(Error::Invalid("--threads must be positive".into())),
            Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(|| self.command(cli.cmd)),
                Err(e) => Err(Error::Invalid(e.to_string())),
            },
            None => self.command(cli.cmd),
        };
        match result {
            Ok(code) => code,
            Err(e) => {
                let _ = writeln!(self.err, "error: {e}");
                exit_code(&e)
            }
        }
    }

    fn emit(&mut self, text: &str) -> Result<()> {
        self.out.write_all(text.as_bytes())?;
        Ok(())
    }

    fn warn(&mut self, text: &str) {
        let _ = writeln!(self.err, "warning: {text}");
    }

    fn spec(&self, arg: &SpecArg) -> Result<SpecFile> {
        match (&arg.spec, &self.fixture_spec) {
            (Some(p), _) => parse_spec(&read(p)?),
            (None, Some(text)) => parse_spec(text),
            (None, None) => Err(Error::Invalid("--spec is required".into())),
        }
    }

    /// The view instance named by `--instance`, or the view image of `--db`.
    fn instance(&self, input: &InputArgs, spec: Option<&SpecFile>) -> Result<ViewInstance> {
        match (&input.db, &input.instance) {
            (Some(db), _) => {
                let spec = spec.ok_or_else(|| Error::Invalid("--db needs a spec to apply the views".into()))?;
                let db = parse_graph(&read(db)?)?;
                apply_view(&db, &spec.regular_views()?, false)
            }
            (None, Some(i)) => parse_graph(&read(i)?),
            (None, None) => Err(Error::Invalid("one of --db or --instance is required".into())),
        }
    }

    fn template(spec: &SpecFile, core: bool) -> Result<(ViewSpec, Template)> {
        let views = spec.effective_views()?;
        let t = build_template(spec.query()?, &views)?;
        Ok((views, if core { template_core(&t) } else { t }))
    }

    /// The pinned target of `--template`, or the (cored) template of the spec.
    fn pinned(&self, spec_arg: &SpecArg, tmpl: &TemplateArgs) -> Result<(PinnedTarget, Option<(ViewSpec, Template)>)> {
        match &tmpl.template {
            Some(p) => Ok((parse_template_dump(&read(p)?)?, None)),
            None => {
                let (v, t) = Self::template(&self.spec(spec_arg)?, !tmpl.full_template)?;
                Ok((t.pinned().clone(), Some((v, t))))
            }
        }
    }

    fn command(&mut self, cmd: Cmd) -> Result<i32> {
        match cmd {
            Cmd::Eval { spec, db } => {
                let spec = self.spec(&spec)?;
                let db = parse_graph(&read(&db)?)?;
                let ans = rpq_eval(&db, spec.query()?)?;
                self.emit(&pairs_text(&ans))?;
                Ok(0)
            }
            Cmd::ApplyView { spec, db, keep_all_nodes } => {
                let spec = self.spec(&spec)?;
                let db = parse_graph(&read(&db)?)?;
                let img = apply_view(&db, &spec.regular_views()?, keep_all_nodes)?;
                self.emit(&serialize_graph(&img))?;
                Ok(0)
            }
            Cmd::Template { spec, core } => {
                let (_, t) = Self::template(&self.spec(&spec)?, core)?;
                self.emit(&t.dump())?;
                Ok(0)
            }
            Cmd::Cert { spec, input, pair, core, template } => self.cert(spec, input, pair, core, template),
            Cmd::RewriteEval { spec, input, l, tmpl } => {
                let spec_file = match (&spec.spec, &self.fixture_spec, &input.db, l) {
                    (None, None, None, LArg::Fixed(_)) => None,
                    _ => Some(self.spec(&spec)?),
                };
                let s = self.instance(&input, spec_file.as_ref())?;
                let (pt, built) = self.pinned(&spec, &tmpl)?;
                let l = match l {
                    LArg::Fixed(l) => l,
                    LArg::Auto => {
                        let views = match built {
                            Some((v, _)) => v,
                            None => spec_file.as_ref().expect("loaded for auto").effective_views()?,
                        };
                        // Same as `default_l`, which also covers dumped templates this way.
                        let l = pt.num_nodes() * views.n_of_v();
                        if l + 1 >= s.num_nodes() {
                            self.warn(&format!(
                                "l = {l} with {} instance nodes: the game reduces to the homomorphism test",
                                s.num_nodes()
                            ));
                        }
                        l
                    }
                };
                let ans = rewrite_eval(&s, &pt, l)?;
                self.emit(&pairs_text(&ans))?;
                Ok(0)
            }
            Cmd::EmitDatalog { spec, l, k, tmpl } => {
                let cfg = GameConfig::new(l, k.unwrap_or(l + 1))?;
                let (pt, _) = self.pinned(&spec, &tmpl)?;
                let p = emit_datalog(&pt, cfg)?;
                self.emit(&serialize_datalog(&p))?;
                Ok(0)
            }
            Cmd::DatalogEval { spec, input, program, strategy } => {
                let p = parse_datalog(&read(&program)?)?;
                let spec = if input.db.is_some() { Some(self.spec(&spec)?) } else { None };
                let s = self.instance(&input, spec.as_ref())?;
                let strategy = match strategy {
                    StrategyArg::Naive => Strategy::Naive,
                    StrategyArg::SemiNaive => Strategy::SemiNaive,
                };
                let ans = datalog_eval_with(&p, &s, strategy)?;
                self.emit(&pairs_text(&ans))?;
                Ok(0)
            }
            Cmd::DecideMondet { spec, max_len, full, budget } => {
                let spec = self.spec(&spec)?;
                let (q, v) = (spec.query()?, spec.regular_views()?);
                let t = template_core(&build_template(q, &v)?);
                let verdict = if full {
                    decide_monotone_full(q, &v, &t, budget.unwrap_or(FULL_DECISION_BUDGET))?
                } else {
                    check_monotone_words(q, &v, &t, max_len)?
                };
                self.emit(&verdict.to_string())?;
                Ok(verdict_code(&verdict))
            }
            Cmd::CheckDet { spec, max_nodes, monotone, budget, samples, seed } => {
                let spec = self.spec(&spec)?;
                let (q, v) = (spec.query()?, spec.regular_views()?);
                let mut opts = FamilyOptions { seed, ..FamilyOptions::default() };
                if let Some(b) = budget {
                    opts.budget = b;
                }
                if let Some(n) = samples {
                    opts.random_samples = n;
                }
                let verdict = if monotone {
                    check_monotone_pairs_bounded_with(q, &v, max_nodes, &opts)?
                } else {
                    check_determinacy_bounded_with(q, &v, max_nodes, &opts)?
                };
                self.emit(&verdict.to_string())?;
                Ok(verdict_code(&verdict))
            }
            Cmd::Preimage { spec, input, max_nodes } => {
                let spec = self.spec(&spec)?;
                let s = self.instance(&input, Some(&spec))?;
                match find_preimage(&s, &spec.regular_views()?, max_nodes)? {
                    PreimageResult::Found(d) => {
                        self.emit(&format!("status Found\npreimage {{\n{}}}\n", serialize_graph(&d)))?;
                        Ok(0)
                    }
                    PreimageResult::NotFoundWithinBound { max_nodes } => {
                        self.emit(&format!("status NotFoundWithinBound({max_nodes})\n"))?;
                        Ok(1)
                    }
                }
            }
            Cmd::RewritePreimage { spec, input, max_nodes } => {
                let spec = self.spec(&spec)?;
                let s = self.instance(&input, Some(&spec))?;
                let ans = rewrite_via_preimage(&s, spec.query()?, &spec.regular_views()?, max_nodes)?;
                self.emit(&pairs_text(&ans))?;
                Ok(0)
            }
            Cmd::Gen3Col { graph, spec_out, instance_out } => {
                let g = parse_undirected(&read(&graph)?)?;
                let (_, s) = gen_3col(&g)?;
                let spec_text = fixture(FixtureId::ThreeCol).spec_text();
                let inst_text = serialize_graph(&s);
                match &spec_out {
                    Some(p) => write_file(p, &spec_text)?,
                    None => self.emit(&format!("# spec\n{spec_text}"))?,
                }
                match &instance_out {
                    Some(p) => write_file(p, &inst_text)?,
                    None => self.emit(&format!("# instance\n{inst_text}"))?,
                }
                Ok(0)
            }
            Cmd::RegularizeCfg { spec } => {
                let spec = self.spec(&spec)?;
                let views = spec.effective_views()?;
                let mut text = String::new();
                for (n, d) in views.names().iter().zip(views.dfas()) {
                    text.push_str(&format!("automaton {n} {{\n{}}}\n", d.dump()));
                }
                self.emit(&text)?;
                Ok(0)
            }
            Cmd::Fixture { id, rest } => {
                let f = fixture(id.parse::<FixtureId>()?);
                if rest.is_empty() {
                    return Err(Error::Invalid("fixture needs a command (or `spec`)".into()));
                }
                if rest.len() == 1 && rest[0] == "spec" {
                    self.emit(&f.spec_text())?;
                    return Ok(0);
                }
                if rest[0] == "fixture" {
                    return Err(Error::Invalid("fixtures do not nest".into()));
                }
                self.fixture_spec = Some(f.spec_text());
                let mut argv = vec![OsString::from("rpqrewrite")];
                argv.extend(rest.into_iter().map(OsString::from));
                // Usage errors inside the fixture are reported by the nested parse.
                Ok(self.dispatch(argv))
            }
        }
    }

    fn cert(
        &mut self,
        spec_arg: SpecArg,
        input: InputArgs,
        pair: Option<Vec<String>>,
        core: bool,
        template: Option<PathBuf>,
    ) -> Result<i32> {
        let spec = self.spec(&spec_arg)?;
        let s = self.instance(&input, Some(&spec))?;
        let (u, v) = match &pair {
            Some(p) => {
                let (u, v) = (NodeId::from(p[0].as_str()), NodeId::from(p[1].as_str()));
                for n in [&u, &v] {
                    if !s.contains_node(n) {
                        return Err(Error::UnknownNode(n.to_string()));
                    }
                }
                (u, v)
            }
            None => {
                let ans = match &template {
                    Some(p) => crate::template::cert_all_pinned(&s, &parse_template_dump(&read(p)?)?)?,
                    None if spec.grammars().len() == spec.views.len() => cert_cfpq(&s, spec.query()?, &spec.grammars())?,
                    None => crate::template::cert_all(&s, &Self::template(&spec, core)?.1)?,
                };
                self.emit(&pairs_text(&ans))?;
                return Ok(0);
            }
        };
        if let Some(p) = &template {
            let verdict = crate::template::cert_pinned(&s, &u, &v, &parse_template_dump(&read(p)?)?)?;
            let text = if verdict.certain { format!("certain {u} {v}\n") } else { format!("not_certain {u} {v}\n") };
            self.emit(&text)?;
            return Ok(i32::from(!verdict.certain));
        }
        let (views, t) = Self::template(&spec, core)?;
        let verdict = cert(&s, &u, &v, &t)?;
        let Some(hom) = verdict.witness_hom else {
            self.emit(&format!("certain {u} {v}\n"))?;
            return Ok(0);
        };
        let mut text = format!("not_certain {u} {v}\n");
        for (x, y) in &hom {
            text.push_str(&format!("map {x} {y}\n"));
        }
        if spec.has_context_free_views() {
            text.push_str("note no counterexample database for context-free views\n");
        } else {
            let d = materialize_counterexample(&s, &u, &v, &t, &hom, spec.query()?, &views)?;
            text.push_str(&format!("counterexample {{\n{}}}\n", serialize_graph(&d)));
        }
        self.emit(&text)?;
        Ok(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["rpqrewrite"];
        argv.extend_from_slice(args);
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_str(&["eval"]).0, 2);
        assert_eq!(run_str(&["nonsense"]).0, 2);
        assert_eq!(run_str(&["rewrite-eval", "--l", "zero", "--instance", "x"]).0, 2);
        assert_eq!(run_str(&["fixture", "Ex9", "spec"]).0, 2);
        assert_eq!(run_str(&["--help"]).0, 0);
    }

    #[test]
    fn fixture_spec_roundtrips() {
        let (code, out, _) = run_str(&["fixture", "Ex2", "spec"]);
        assert_eq!(code, 0);
        let s = parse_spec(&out).unwrap();
        assert_eq!(s.regular_views().unwrap().len(), 3);
    }

    #[test]
    fn fixture_mondet_ex1() {
        let (code, out, _) = run_str(&["fixture", "Ex1", "decide-mondet", "--max-len", "8"]);
        assert_eq!(code, 1);
        assert!(out.starts_with("status Refuted\nevidence_word aaaaa\n"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::BudgetExceeded("x".into())), 3);
        assert_eq!(exit_code(&Error::NotAViewImage), 1);
        assert_eq!(exit_code(&Error::UnknownLabel("x".into())), 2);
    }

    #[test]
    fn undirected_reader() {
        let g = parse_undirected("# triangle\nnode d\nedge a b\nedge b x c\n").unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (4, 2));
        assert!(parse_undirected("edge a\n").is_err());
    }
}

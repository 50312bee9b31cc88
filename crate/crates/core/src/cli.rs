//! Command-line surface. Every command builds an ordered [`Report`]; the
//! human and `--json` renderings are two views of the same entries, and
//! the exit code depends only on the verdict.

use crate::closure::{self, EmpId};
use crate::error::{Error, Result};
use crate::formula::{Formula, Name};
use crate::generation::{self, Bounds, FormulaGen, GenConfig};
use crate::instantiations::{awareness, justification, knowing_what};
use crate::model::{EventModel, OModel, Signature};
use crate::properties::{self, AgentFocus, PropertyId, Witness};
use crate::reduction::{self, TranslateOptions};
use crate::semantics::{self, Registry};
use crate::syntax::print_formula;
use crate::update;
use crate::workspace::Workspace;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::{Serialize, SerializeMap, Serializer};
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "omodel",
    version,
    about = "O-models, event updates, property checks and reduction"
)]
struct Cli {
    /// Workspace document.
    #[arg(short, long, global = true, env = "OMODEL_WORKSPACE")]
    workspace: Option<PathBuf>,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a formula at one world or at every world of a model.
    Eval {
        #[arg(long)]
        model: String,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        world: Option<String>,
    },
    /// Check a group property of a model.
    CheckProp {
        #[arg(long)]
        model: String,
        #[command(flatten)]
        prop: PropArgs,
        /// Also evaluate the characterising schemas and compare.
        #[arg(long)]
        schema: bool,
    },
    /// Check the event-model condition for a property.
    CheckEmp {
        #[arg(long)]
        event: String,
        #[command(flatten)]
        prop: PropArgs,
    },
    /// Product update of a model with an event model.
    Update {
        #[arg(long)]
        model: String,
        #[arg(long)]
        event: String,
        /// Store the product in the workspace under this name.
        #[arg(long)]
        save_as: Option<String>,
    },
    /// Translate a dynamic formula into the static language.
    Translate {
        #[arg(long)]
        formula: String,
        /// Show every rewriting step.
        #[arg(long)]
        trace: bool,
        /// Simplify the translation afterwards.
        #[arg(long)]
        simplify: bool,
        /// Abort when the translation exceeds this many nodes.
        #[arg(long)]
        size_cap: Option<usize>,
    },
    /// Check the closure hypotheses and conclusion for one pair.
    Closure {
        #[arg(long)]
        model: String,
        #[arg(long)]
        event: String,
        #[command(flatten)]
        prop: PropArgs,
    },
    /// Random search for a pair whose product violates a property.
    Search {
        #[command(flatten)]
        prop: PropArgs,
        #[command(flatten)]
        sig: SigArgs,
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        /// Do not repair sampled events to the event-model condition.
        #[arg(long)]
        no_emp: bool,
    },
    /// Generate random models, event models or formulas.
    Gen {
        #[command(flatten)]
        sig: SigArgs,
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long, default_value_t = 1)]
        models: usize,
        #[arg(long, default_value_t = 0)]
        events: usize,
        #[arg(long, default_value_t = 0)]
        formulas: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Write the generated workspace here instead of printing it.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exhaustively enumerate small models.
    Enumerate {
        #[command(flatten)]
        sig: SigArgs,
        #[arg(long, default_value_t = 2)]
        max_worlds: usize,
        #[arg(long)]
        reflexive: bool,
        #[arg(long, default_value_t = generation::DEFAULT_CEILING)]
        ceiling: u128,
        /// Check validity of this static formula over the enumeration.
        #[arg(long)]
        formula: Option<String>,
    },
    /// Validate a model as an instance of one of the encoded logics.
    ValidateInst {
        #[arg(long)]
        model: String,
        #[arg(long, value_enum)]
        kind: InstKind,
        /// Agent for the deontic checks (all agents when omitted).
        #[arg(long)]
        agent: Option<String>,
        /// Term universe for the justification sum condition, comma separated.
        #[arg(long)]
        terms: Option<String>,
    },
    /// Run quick built-in consistency checks.
    Selftest {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: u64,
    },
}

#[derive(Args, Debug)]
struct PropArgs {
    /// Property name, e.g. pres-all or anti-inv-some.
    #[arg(long)]
    prop: String,
    /// `indv`, `gen`, or `i:{j,k};i2:{...}`.
    #[arg(long, default_value = "gen")]
    focus: String,
}

#[derive(Args, Debug)]
struct SigArgs {
    /// Comma-separated agents (defaults to the workspace signature).
    #[arg(long)]
    agents: Option<String>,
    #[arg(long)]
    universe: Option<String>,
    #[arg(long)]
    atoms: Option<String>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    max_worlds: usize,
    #[arg(long, default_value_t = 3)]
    max_events: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum InstKind {
    Awareness,
    Justification,
    Kv,
    Deontic,
}

/// Ordered key/value report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, Value)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.entries.push((key.to_string(), value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// `key: value` lines; lists become indented `- item` lines.
    pub fn render_human(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            match v {
                Value::Array(items) => {
                    out.push_str(&format!("{k}:\n"));
                    for item in items {
                        out.push_str(&format!("  - {}\n", scalar(item)));
                    }
                }
                other => out.push_str(&format!("{k}: {}\n", scalar(other))),
            }
        }
        out
    }

    pub fn render_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("reports serialize");
        out.push('\n');
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        other => other.to_string(),
    }
}

impl Serialize for Report {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.entries.len()))?;
        for (k, v) in &self.entries {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// Runs the command line `argv` (including the program name) against the
/// process's stdout and stderr.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    dispatch_to(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`dispatch`] with explicit output streams.
pub fn dispatch_to<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let json = cli.json;
    match run(cli) {
        Ok((report, holds)) => {
            let text = if json {
                report.render_json()
            } else {
                report.render_human()
            };
            let _ = out.write_all(text.as_bytes());
            if holds {
                EXIT_OK
            } else {
                EXIT_FAILS
            }
        }
        Err(e) => {
            if json {
                let _ = writeln!(out, "{}", json!({ "error": e.to_string() }));
            }
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Evaluates `formula` on a workspace model, at one world or everywhere.
pub fn eval_report(ws: &Workspace, model: &str, formula: &str, world: Option<&str>) -> Result<(Report, bool)> {
    cmd_eval(ws, model, formula, world)
}

/// Checks a group property under a focus given as text.
pub fn property_report(ws: &Workspace, model: &str, prop: &str, focus: &str) -> Result<(Report, bool)> {
    let args = PropArgs {
        prop: prop.to_string(),
        focus: focus.to_string(),
    };
    cmd_check_prop(ws, model, &args, true)
}

/// Product update; with `save_as` the product is added to the workspace.
pub fn update_report(ws: &mut Workspace, model: &str, event: &str, save_as: Option<&str>) -> Result<(Report, bool)> {
    cmd_update(ws, model, event, save_as)
}

/// Translation of a dynamic formula to a static one, with its trace.
pub fn translate_report(ws: &Workspace, formula: &str) -> Result<(Report, bool)> {
    cmd_translate(Some(ws), formula, true, true, None)
}

fn load(path: &Option<PathBuf>) -> Result<Workspace> {
    let path = path
        .as_ref()
        .ok_or_else(|| Error::Format("no workspace given (use --workspace or OMODEL_WORKSPACE)".into()))?;
    Workspace::load(path)
}

fn run(cli: Cli) -> Result<(Report, bool)> {
    let ws_path = cli.workspace;
    match cli.command {
        Command::Eval { model, formula, world } => cmd_eval(&load(&ws_path)?, &model, &formula, world.as_deref()),
        Command::CheckProp { model, prop, schema } => {
            let ws = load(&ws_path)?;
            cmd_check_prop(&ws, &model, &prop, schema)
        }
        Command::CheckEmp { event, prop } => cmd_check_emp(&load(&ws_path)?, &event, &prop),
        Command::Update { model, event, save_as } => {
            let mut ws = load(&ws_path)?;
            let result = cmd_update(&mut ws, &model, &event, save_as.as_deref())?;
            if save_as.is_some() && result.1 {
                ws.save(ws_path.as_deref().expect("loaded above"))?;
            }
            Ok(result)
        }
        Command::Translate {
            formula,
            trace,
            simplify,
            size_cap,
        } => {
            // Static formulas translate without a workspace.
            let ws = match &ws_path {
                Some(_) => Some(load(&ws_path)?),
                None => None,
            };
            cmd_translate(ws.as_ref(), &formula, trace, simplify, size_cap)
        }
        Command::Closure { model, event, prop } => cmd_closure(&load(&ws_path)?, &model, &event, &prop),
        Command::Search {
            prop,
            sig,
            sample,
            budget,
            no_emp,
        } => {
            let sig = signature(&sig, &ws_path)?;
            cmd_search(sig, &prop, &sample, budget, !no_emp)
        }
        Command::Gen {
            sig,
            sample,
            models,
            events,
            formulas,
            depth,
            output,
        } => {
            let sig = signature(&sig, &ws_path)?;
            cmd_gen(sig, &sample, models, events, formulas, depth, output.as_deref())
        }
        Command::Enumerate {
            sig,
            max_worlds,
            reflexive,
            ceiling,
            formula,
        } => {
            let sig = signature(&sig, &ws_path)?;
            cmd_enumerate(sig, max_worlds, reflexive, ceiling, formula.as_deref())
        }
        Command::ValidateInst {
            model,
            kind,
            agent,
            terms,
        } => cmd_validate_inst(&load(&ws_path)?, &model, kind, agent.as_deref(), terms.as_deref()),
        Command::Selftest { seed, samples } => cmd_selftest(seed, samples),
    }
}

fn split_list(text: &str) -> Vec<&str> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

/// Signature from explicit lists, falling back to the workspace for
/// missing lists.
fn signature(args: &SigArgs, ws_path: &Option<PathBuf>) -> Result<Arc<Signature>> {
    let ws = match (ws_path, &args.agents, &args.universe, &args.atoms) {
        (Some(_), a, u, p) if a.is_none() || u.is_none() || p.is_none() => Some(load(ws_path)?),
        _ => None,
    };
    let pick = |given: &Option<String>, key: &str, from_ws: fn(&Signature) -> &[Name]| -> Result<Vec<String>> {
        match (given, &ws) {
            (Some(text), _) => Ok(split_list(text).into_iter().map(String::from).collect()),
            (None, Some(ws)) => Ok(from_ws(ws.signature()).iter().map(|n| n.to_string()).collect()),
            (None, None) => Err(Error::Format(format!("--{key} is required without a workspace"))),
        }
    };
    let agents = pick(&args.agents, "agents", Signature::agents)?;
    let universe = pick(&args.universe, "universe", Signature::universe)?;
    let atoms = match (&args.atoms, &ws) {
        (None, None) => Vec::new(),
        _ => pick(&args.atoms, "atoms", Signature::atoms)?,
    };
    Signature::new(
        agents.iter().map(String::as_str),
        universe.iter().map(String::as_str),
        atoms.iter().map(String::as_str),
    )
    .map(Arc::new)
    .map_err(|violations| Error::Validation {
        name: "signature".into(),
        violations,
    })
}

fn parse_prop(args: &PropArgs, sig: &Signature) -> Result<(PropertyId, AgentFocus)> {
    let p: PropertyId = args.prop.parse()?;
    let f = AgentFocus::parse(sig, &args.focus)?;
    f.check_agents(sig.n_agents())?;
    Ok((p, f))
}

fn world_witness(m: &OModel, w: &Witness) -> String {
    let sig = m.signature();
    format!(
        "agent {} on {} -> {}, object {}",
        sig.agents()[w.agent],
        m.world_name(w.from),
        m.world_name(w.to),
        sig.universe()[w.object]
    )
}

fn event_witness(e: &EventModel, w: &Witness) -> String {
    let sig = e.signature();
    format!(
        "agent {} on {} -> {}, object {}",
        sig.agents()[w.agent],
        e.event_name(w.from),
        e.event_name(w.to),
        sig.universe()[w.object]
    )
}

fn opt(s: Option<String>) -> Value {
    s.map_or(Value::Null, Value::String)
}

fn lines(text: &str) -> Value {
    Value::Array(text.lines().map(|l| Value::String(l.to_string())).collect())
}

fn cmd_eval(ws: &Workspace, model: &str, formula: &str, world: Option<&str>) -> Result<(Report, bool)> {
    let m = ws.model(model)?;
    let f = ws.parse_formula(formula)?;
    let mut r = Report::new();
    r.push("model", model).push("formula", print_formula(&f));
    match world {
        Some(name) => {
            let holds = semantics::eval_at(m, name, &f, ws.registry())?;
            r.push("world", name).push("holds", holds);
            Ok((r, holds))
        }
        None => {
            let ext = semantics::extension(m, &f, ws.registry())?;
            let names: Vec<Value> = ext.iter().map(|w| Value::String(m.world_name(w).to_string())).collect();
            let valid = ext.len() == m.n_worlds();
            r.push("true_at", Value::Array(names)).push("valid", valid);
            Ok((r, valid))
        }
    }
}

fn cmd_check_prop(ws: &Workspace, model: &str, args: &PropArgs, schema: bool) -> Result<(Report, bool)> {
    let m = ws.model(model)?;
    let (p, f) = parse_prop(args, ws.signature())?;
    let report = properties::check_group_property(m, p, &f)?;
    let mut r = Report::new();
    r.push("model", model)
        .push("property", p.name())
        .push("focus", f.to_text(ws.signature()))
        .push("holds", report.holds)
        .push("witness", opt(report.witness.map(|w| world_witness(m, &w))));
    if schema {
        let via = properties::check_via_schema(m, p, &f)?;
        r.push("schema_holds", via).push("agree", via == report.holds);
    }
    Ok((r, report.holds))
}

fn cmd_check_emp(ws: &Workspace, event: &str, args: &PropArgs) -> Result<(Report, bool)> {
    let e = ws.event(event)?;
    let (p, f) = parse_prop(args, ws.signature())?;
    let report = closure::check_emp(e, EmpId(p), &f)?;
    let mut r = Report::new();
    r.push("event", event)
        .push("condition", EmpId(p).to_string())
        .push("focus", f.to_text(ws.signature()))
        .push("holds", report.holds)
        .push("witness", opt(report.witness.map(|w| event_witness(e, &w))));
    Ok((r, report.holds))
}

fn cmd_update(ws: &mut Workspace, model: &str, event: &str, save_as: Option<&str>) -> Result<(Report, bool)> {
    let m = ws.model(model)?;
    let e = ws.event(event)?;
    let mut r = Report::new();
    r.push("model", model).push("event", event);
    match update::product_update(m, e) {
        Ok(prod) => {
            r.push("defined", true).push("product", lines(&prod.model.dump()));
            if let Some(name) = save_as {
                ws.insert_model(name, prod.model)?;
                r.push("saved_as", name);
            }
            Ok((r, true))
        }
        Err(Error::Undefined) => {
            r.push("defined", false);
            Ok((r, false))
        }
        Err(other) => Err(other),
    }
}

fn cmd_translate(
    ws: Option<&Workspace>,
    formula: &str,
    trace: bool,
    simplify: bool,
    size_cap: Option<usize>,
) -> Result<(Report, bool)> {
    let empty = Registry::new();
    let (f, reg) = match ws {
        Some(ws) => (ws.parse_formula(formula)?, ws.registry()),
        None => (crate::syntax::parse_formula(formula)?, &empty),
    };
    let mut opts = TranslateOptions {
        trace,
        ..TranslateOptions::default()
    };
    if let Some(cap) = size_cap {
        opts.size_cap = cap;
    }
    let t = reduction::translate_with(&f, reg, opts)?;
    let mut r = Report::new();
    r.push("formula", print_formula(&f))
        .push("translation", print_formula(&t.formula));
    if simplify {
        r.push("simplified", print_formula(&reduction::simplify(&t.formula)));
    }
    if trace {
        let steps = t
            .trace
            .iter()
            .map(|s| {
                Value::String(format!(
                    "{}{} [{}] => {}",
                    "  ".repeat(s.level),
                    s.input,
                    s.clause,
                    s.output
                ))
            })
            .collect();
        r.push("trace", Value::Array(steps));
    }
    Ok((r, true))
}

fn cmd_closure(ws: &Workspace, model: &str, event: &str, args: &PropArgs) -> Result<(Report, bool)> {
    let m = ws.model(model)?;
    let e = ws.event(event)?;
    let (p, f) = parse_prop(args, ws.signature())?;
    let c = closure::closure_report(m, e, p, &f)?;
    let product_witness = match (&c.product_witness, update::product_update(m, e)) {
        (Some(w), Ok(prod)) => Some(world_witness(&prod.model, w)),
        _ => None,
    };
    let violated = c.hypotheses_hold() && !c.product_ok;
    let mut r = Report::new();
    r.push("model", model)
        .push("event", event)
        .push("property", p.name())
        .push("focus", f.to_text(ws.signature()))
        .push("model_ok", c.model_ok)
        .push("model_witness", opt(c.model_witness.map(|w| world_witness(m, &w))))
        .push("event_ok", c.event_ok)
        .push("event_witness", opt(c.event_witness.map(|w| event_witness(e, &w))))
        .push("product_defined", c.product_defined)
        .push("product_ok", c.product_ok)
        .push("product_witness", opt(product_witness))
        .push("hypotheses_hold", c.hypotheses_hold())
        .push("theorem_violated", violated);
    Ok((r, !violated))
}

fn gen_config(sig: Arc<Signature>, args: &SampleArgs) -> GenConfig {
    let mut cfg = GenConfig::new(sig, args.seed);
    cfg.max_worlds = args.max_worlds.max(1);
    cfg.max_events = args.max_events.max(1);
    cfg
}

fn cmd_search(
    sig: Arc<Signature>,
    args: &PropArgs,
    sample: &SampleArgs,
    budget: u64,
    emp: bool,
) -> Result<(Report, bool)> {
    let (p, f) = parse_prop(args, &sig)?;
    let cfg = gen_config(sig.clone(), sample);
    let found = closure::search_counterexample(&cfg, p, &f, emp, budget)?;
    let mut r = Report::new();
    r.push("property", p.name())
        .push("focus", f.to_text(&sig))
        .push("seed", sample.seed)
        .push("budget", budget)
        .push("enforce_emp", emp)
        .push("found", found.is_some());
    if let Some(cx) = &found {
        let prod = update::product_update(&cx.model, &cx.event)?;
        r.push("sample", cx.sample)
            .push("model", lines(&cx.model.dump()))
            .push("event", lines(&cx.event.dump()))
            .push("witness", world_witness(&prod.model, &cx.witness));
    }
    Ok((r, found.is_none()))
}

fn cmd_gen(
    sig: Arc<Signature>,
    sample: &SampleArgs,
    models: usize,
    events: usize,
    formulas: usize,
    depth: usize,
    output: Option<&Path>,
) -> Result<(Report, bool)> {
    let cfg = gen_config(sig.clone(), sample);
    let mut rng = ChaCha8Rng::seed_from_u64(sample.seed);
    let mut ws = Workspace::new(sig.clone());
    for k in 0..models {
        ws.insert_model(format!("m{k}"), generation::sample_model(&mut rng, &cfg))?;
    }
    for k in 0..events {
        ws.insert_event(format!("E{k}"), generation::sample_event(&mut rng, &cfg))?;
    }
    let gen = FormulaGen::new(&sig, Some(ws.registry()), depth, 1);
    let fs: Vec<Value> = (0..formulas)
        .map(|_| Value::String(print_formula(&gen.sample(&mut rng))))
        .collect();
    let mut r = Report::new();
    r.push("seed", sample.seed);
    match output {
        Some(path) => {
            ws.save(path)?;
            r.push("written", path.display().to_string());
        }
        None => {
            let doc = serde_json::to_value(ws.to_doc()).expect("workspace documents serialize");
            r.push("workspace", doc);
        }
    }
    if formulas > 0 {
        r.push("formulas", Value::Array(fs));
    }
    Ok((r, true))
}

fn cmd_enumerate(
    sig: Arc<Signature>,
    max_worlds: usize,
    reflexive: bool,
    ceiling: u128,
    formula: Option<&str>,
) -> Result<(Report, bool)> {
    let b = Bounds {
        sig: sig.clone(),
        max_worlds,
        reflexive,
    };
    let mut r = Report::new();
    r.push("expected", b.count().to_string());
    let Some(text) = formula else {
        let n = generation::for_each_model(&b, ceiling, |_| {})?;
        r.push("models", n);
        return Ok((r, true));
    };
    let f = crate::syntax::parse_formula(text)?;
    sig.check_formula(&f).map_err(|v| Error::Format(v.to_string()))?;
    if !f.is_static() {
        return Err(Error::Format("enumerate checks static formulas only".into()));
    }
    let compiled = semantics::CompiledStatic::new(&sig, std::slice::from_ref(&f))?;
    let mut counterexample = None;
    let mut failures = 0u64;
    let n = generation::for_each_model(&b, ceiling, |m| {
        if let Some((_, w)) = compiled.first_failure(m) {
            failures += 1;
            if counterexample.is_none() {
                counterexample = Some((m.dump(), m.world_name(w).to_string()));
            }
        }
    })?;
    r.push("models", n)
        .push("formula", print_formula(&f))
        .push("failures", failures)
        .push("valid", failures == 0);
    if let Some((dump, world)) = counterexample {
        r.push("first_counterexample", lines(&dump)).push("fails_at", world);
    }
    Ok((r, failures == 0))
}

fn cmd_validate_inst(
    ws: &Workspace,
    model: &str,
    kind: InstKind,
    agent: Option<&str>,
    terms: Option<&str>,
) -> Result<(Report, bool)> {
    let m = ws.model(model)?;
    let sig = ws.signature();
    let mut r = Report::new();
    r.push("model", model);
    let debug_list = |vs: Vec<String>| Value::Array(vs.into_iter().map(Value::String).collect());
    let ok = match kind {
        InstKind::Awareness => {
            r.push("kind", "awareness");
            let res = awareness::check_atomic_signature(sig);
            r.push(
                "violations",
                debug_list(res.as_ref().err().map(|e| e.to_string()).into_iter().collect()),
            );
            res.is_ok()
        }
        InstKind::Justification => {
            r.push("kind", "justification");
            let term_set: BTreeSet<justification::JustTerm> = match terms {
                Some(text) => split_list(text)
                    .into_iter()
                    .map(|t| justification::JustTerm::parse(t).map_err(Error::Format))
                    .collect::<Result<_>>()?,
                None => justification::occurring_terms(m),
            };
            r.push("terms", debug_list(term_set.iter().map(|t| t.to_string()).collect()));
            let res = justification::validate_justification(m, &term_set);
            let vs = res.as_ref().err().cloned().unwrap_or_default();
            r.push("violations", debug_list(vs.iter().map(|v| format!("{v:?}")).collect()));
            res.is_ok()
        }
        InstKind::Kv => {
            r.push("kind", "kv");
            let res = knowing_what::validate_kv(m);
            let vs = res.as_ref().err().cloned().unwrap_or_default();
            r.push("violations", debug_list(vs.iter().map(|v| format!("{v:?}")).collect()));
            res.is_ok()
        }
        InstKind::Deontic => {
            r.push("kind", "deontic");
            let agents: Vec<usize> = match agent {
                Some(a) => vec![sig.agent(a).ok_or_else(|| Error::UnknownName {
                    kind: "agent",
                    name: a.to_string(),
                })?],
                None => (0..sig.n_agents()).collect(),
            };
            let mut ok = true;
            for i in agents {
                let d = properties::deontic_checks(m, i);
                let dead: Vec<Value> = properties::ideal_dead_ends(m, i)
                    .iter()
                    .map(|w| Value::String(m.world_name(w).to_string()))
                    .collect();
                r.push(
                    &format!("agent {}", sig.agents()[i]),
                    json!({
                        "strong_serial": d.strong_serial,
                        "improvement": d.improvement,
                        "transitive": d.transitive,
                        "preservation": d.preservation,
                        "implied_strong_serial": d.implied_strong_serial,
                        "ideal_dead_ends": dead,
                    }),
                );
                ok &= d.strong_serial;
            }
            ok
        }
    };
    r.push("valid", ok);
    Ok((r, ok))
}

/// Fast randomized self-checks of the main invariants.
fn cmd_selftest(seed: u64, samples: u64) -> Result<(Report, bool)> {
    let mut r = Report::new();
    let mut all = true;
    let mut record = |r: &mut Report, name: &str, ok: bool| {
        all &= ok;
        r.push(name, if ok { "PASS" } else { "FAIL" });
    };

    let (base, reg) = crate::catalog::worked_model_and_registry();
    let sig = base.signature().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = GenConfig::new(sig.clone(), seed);
    let gen = FormulaGen::new(&sig, Some(&reg), 4, 2);

    let mut round_trip = true;
    let mut reduction_ok = true;
    for _ in 0..samples {
        let f: Formula = gen.sample(&mut rng);
        round_trip &= crate::syntax::parse_formula(&print_formula(&f)).ok() == Some(f.clone());
        let m = generation::sample_model(&mut rng, &cfg);
        reduction_ok &= reduction::check_reduction_equivalence(&m, &f, &reg)?.is_none();
    }
    record(&mut r, "print_parse_round_trip", round_trip);
    record(&mut r, "reduction_equivalence", reduction_ok);

    let mut schema_ok = true;
    let mut repair_ok = true;
    let foci = [AgentFocus::indv(sig.n_agents()), AgentFocus::gen(sig.n_agents())];
    for _ in 0..samples.min(50) {
        let m = generation::sample_model(&mut rng, &cfg);
        let e = generation::sample_event(&mut rng, &cfg);
        for p in PropertyId::ALL {
            for f in &foci {
                schema_ok &=
                    properties::check_group_property(&m, p, f)?.holds == properties::check_via_schema(&m, p, f)?;
                let fixed = generation::repair_to_property(&m, p, f)?;
                let fixed_e = generation::repair_event_to_emp(&e, EmpId(p), f)?;
                repair_ok &= properties::check_group_property(&fixed, p, f)?.holds
                    && closure::check_emp(&fixed_e, EmpId(p), f)?.holds;
            }
        }
    }
    record(&mut r, "property_schema_agreement", schema_ok);
    record(&mut r, "repair_soundness", repair_ok);

    let mut closure_ok = true;
    for p in PropertyId::ALL {
        for f in &foci {
            closure_ok &= closure::search_counterexample(&cfg, p, f, true, samples.min(100))?.is_none();
        }
    }
    record(&mut r, "closure_search", closure_ok);
    r.push("ok", all);
    Ok((r, all))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn human_and_json_render_the_same_entries() {
        let mut r = Report::new();
        r.push("holds", false)
            .push("witness", Value::Null)
            .push("items", json!(["a", "b"]));
        assert_eq!(r.render_human(), "holds: false\nwitness: none\nitems:\n  - a\n  - b\n");
        let v: Value = serde_json::from_str(&r.render_json()).unwrap();
        assert_eq!(v, json!({"holds": false, "witness": null, "items": ["a", "b"]}));
        assert!(r.render_json().find("holds").unwrap() < r.render_json().find("witness").unwrap());
    }

    #[test]
    fn usage_errors_exit_2() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(
            dispatch_to(["omodel", "no-such-command"], &mut out, &mut err),
            EXIT_USAGE
        );
        assert_eq!(dispatch_to(["omodel", "eval"], &mut out, &mut err), EXIT_USAGE);
    }

    #[test]
    fn static_translation_needs_no_workspace() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = dispatch_to(["omodel", "translate", "--formula", "[1]p"], &mut out, &mut err);
        assert_eq!(code, EXIT_OK, "{}", String::from_utf8_lossy(&err));
        assert!(String::from_utf8(out).unwrap().contains("translation: [1]p"));
    }
}

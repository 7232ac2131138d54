//! Command dispatch and JSON reports. Object maps are `BTreeMap`s, so keys
//! come out sorted and the output is byte-stable.

use serde_json::{json, Map, Value};

use ltsheaf::fincat::search::find_iso_under;
use ltsheaf::fincat::{FinCategory, NatTrans, Presheaf};
use ltsheaf::logic::{evaluate, LogicError, Subpresheaf};
use ltsheaf::powerobj::{PowerError, DEFAULT_CAP};
use ltsheaf::site::{check_lt_coverage, enumerate_coverages, grothendieck_check, Coverage};
use ltsheaf::sheafify::{double_plus_oracle, sheaf_check, sheafify_with_cap, SheafError};
use ltsheaf::smallmaps::{
    check_axioms, check_p1, check_s2_bounded, check_sheaf_small_maps, AllMaps, AxiomReport, DeclaredMaps, MapFamily,
    Presheaves, Sheaves, SmallMapsError, Universe,
};

use crate::ast::{Command, CommandKind};
use crate::diag::Diagnostic;
use crate::elaborate::{FamilySpec, Site, UniverseSpec};
use crate::eval::FormulaBuilder;
use crate::printer::print_command;

/// Default bound on the number of candidate coverages enumerated.
pub const ENUMERATION_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    /// Overrides every size guard when set.
    pub cap: Option<usize>,
}

impl Options {
    fn power_cap(&self) -> usize {
        self.cap.unwrap_or(DEFAULT_CAP)
    }

    fn enumeration_cap(&self) -> usize {
        self.cap.unwrap_or(ENUMERATION_CAP)
    }
}

#[derive(Clone, Debug)]
pub enum RunError {
    /// Bad input: exit code 2.
    Input(Diagnostic),
    /// The library gave up, e.g. on a size guard. Reported in the output.
    Library { kind: &'static str, message: String },
}

fn logic_kind(e: &LogicError) -> &'static str {
    match e {
        LogicError::CapExceeded { .. } => "cap-exceeded",
        _ => "error",
    }
}

fn power_kind(e: &PowerError) -> &'static str {
    match e {
        PowerError::CapExceeded { .. } => "cap-exceeded",
        PowerError::Logic(l) => logic_kind(l),
        _ => "error",
    }
}

fn sheaf_kind(e: &SheafError) -> &'static str {
    match e {
        SheafError::Power(p) => power_kind(p),
        SheafError::Logic(l) => logic_kind(l),
        _ => "error",
    }
}

impl From<LogicError> for RunError {
    fn from(e: LogicError) -> Self {
        RunError::Library { kind: logic_kind(&e), message: e.to_string() }
    }
}

impl From<PowerError> for RunError {
    fn from(e: PowerError) -> Self {
        RunError::Library { kind: power_kind(&e), message: e.to_string() }
    }
}

impl From<SheafError> for RunError {
    fn from(e: SheafError) -> Self {
        RunError::Library { kind: sheaf_kind(&e), message: e.to_string() }
    }
}

impl From<SmallMapsError> for RunError {
    fn from(e: SmallMapsError) -> Self {
        let kind = match &e {
            SmallMapsError::Power(p) => power_kind(p),
            SmallMapsError::Sheaf(s) => sheaf_kind(s),
            SmallMapsError::Logic(l) => logic_kind(l),
            _ => "error",
        };
        RunError::Library { kind, message: e.to_string() }
    }
}

/// The outcome of one command.
#[derive(Clone, Debug, PartialEq)]
pub struct CommandReport {
    pub command: String,
    pub passed: bool,
    pub report: Value,
}

impl CommandReport {
    pub fn to_json(&self) -> Value {
        json!({ "command": self.command, "passed": self.passed, "report": self.report })
    }
}

/// Runs one command. Library failures become a report with an `error`
/// entry; only input errors are returned as `Err`.
pub fn run(site: &Site, cmd: &Command, opts: &Options) -> Result<CommandReport, Diagnostic> {
    site.check_command(cmd)?;
    let command = print_command(cmd);
    match dispatch(site, cmd, opts) {
        Ok((report, passed)) => Ok(CommandReport { command, passed, report }),
        Err(RunError::Input(d)) => Err(d),
        Err(RunError::Library { kind, message }) => {
            Ok(CommandReport { command, passed: false, report: json!({ "error": { "kind": kind, "message": message } }) })
        }
    }
}

/// Runs every `run` line of the spec.
pub fn run_all(site: &Site, opts: &Options) -> Result<Value, Diagnostic> {
    let reports = site.commands.iter().map(|c| run(site, c, opts)).collect::<Result<Vec<_>, _>>()?;
    Ok(summarize(&reports))
}

pub fn summarize(reports: &[CommandReport]) -> Value {
    json!({
        "passed": reports.iter().all(|r| r.passed),
        "commands": reports.iter().map(CommandReport::to_json).collect::<Vec<_>>(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// One line per command.
pub fn render_human(v: &Value) -> String {
    let mut out = String::new();
    for c in v["commands"].as_array().into_iter().flatten() {
        let mark = if c["passed"].as_bool() == Some(true) { "ok  " } else { "FAIL" };
        out.push_str(&format!("{mark} {}\n", c["command"].as_str().unwrap_or("?")));
        if let Some(e) = c["report"].get("error") {
            out.push_str(&format!("     {}: {}\n", e["kind"].as_str().unwrap_or(""), e["message"].as_str().unwrap_or("")));
        }
        for r in c["report"]["axioms"].as_array().into_iter().flatten().chain(c["report"]["lemmas"].as_array().into_iter().flatten()) {
            out.push_str(&format!("     {:<28} {}\n", r["axiom"].as_str().unwrap_or(""), r["status"].as_str().unwrap_or("")));
        }
    }
    out
}

fn dispatch(site: &Site, cmd: &Command, opts: &Options) -> Result<(Value, bool), RunError> {
    match &cmd.kind {
        CommandKind::CheckCoverage => Ok(check_coverage(site.ctx.coverage())),
        CommandKind::EnumerateCoverages => enumerate(site, opts),
        CommandKind::Sheafify(x) => sheafify(site, &site.presheaves[&x.text], opts),
        CommandKind::IsSheaf(x) => {
            let c = sheaf_check(&site.ctx, &site.presheaves[&x.text]);
            let passed = c.sheaf;
            Ok((serde_json::to_value(c).expect("serializable"), passed))
        }
        CommandKind::Closure(_, s) => {
            let sub = &site.subobjects[&s.text].sub;
            let c = site.ctx.close(sub);
            let report = json!({
                "subobject": stages_json(&site.cat, sub),
                "closure": stages_json(&site.cat, &c),
                "closed": &c == sub,
                "dense": c.is_top(),
            });
            Ok((report, true))
        }
        CommandKind::VerifyAxioms => verify_axioms(site, opts),
        CommandKind::VerifySheafAxioms => verify_sheaf_axioms(site, opts),
        CommandKind::Eval(f) => {
            let phi = FormulaBuilder::new(site, opts.power_cap()).build(f)?;
            let truth = evaluate(&site.cat, &[], &phi).map_err(|e| match e {
                LogicError::IllSorted(_) | LogicError::Unbound(_) => RunError::Input(Diagnostic::new(f.span, e.to_string())),
                e => e.into(),
            })?;
            let holds: Vec<&str> = site.cat.objects().filter(|&a| truth.count(a) == 1).map(|a| site.cat.object_name(a)).collect();
            let valid = truth.is_top();
            Ok((json!({ "valid": valid, "holds_at": holds }), valid))
        }
    }
}

fn sieve_names(cat: &FinCategory, cov: &Coverage) -> Value {
    let mut m = Map::new();
    for a in cat.objects() {
        let sieves: Vec<Vec<String>> = cov.covering_sieves(a).map(|s| s.names(cat)).collect();
        m.insert(cat.object_name(a).to_string(), json!(sieves));
    }
    Value::Object(m)
}

fn check_coverage(cov: &Coverage) -> (Value, bool) {
    let g = grothendieck_check(cov);
    let lt = check_lt_coverage(cov);
    let valid = g.is_valid() && lt.is_valid();
    let mut violations = g.violations;
    for v in lt.violations {
        if !violations.contains(&v) {
            violations.push(v);
        }
    }
    (json!({ "valid": valid, "violations": violations }), valid)
}

fn enumerate(site: &Site, opts: &Options) -> Result<(Value, bool), RunError> {
    let e = enumerate_coverages(site.ctx.omega(), opts.enumeration_cap())?;
    let lt: Vec<Value> = e.lawvere_tierney.iter().map(|j| sieve_names(&site.cat, j)).collect();
    let gr: Vec<Value> = e.grothendieck.iter().map(|j| sieve_names(&site.cat, j)).collect();
    let agree = lt == gr;
    let report = json!({
        "candidates": e.candidates,
        "count": lt.len(),
        "agree": agree,
        "coverages": lt,
    });
    Ok((report, agree))
}

/// Carriers and non-identity action tables, keyed by name.
pub fn presheaf_json(x: &Presheaf) -> Value {
    let cat = x.cat();
    let sizes: Map<String, Value> = cat.objects().map(|a| (cat.object_name(a).to_string(), json!(x.size(a)))).collect();
    let action: Map<String, Value> = (0..cat.num_morphisms())
        .filter(|&m| !cat.is_identity(m))
        .map(|m| (cat.morphism(m).name.clone(), json!(x.action_table(m))))
        .collect();
    json!({ "sizes": sizes, "action": action })
}

fn components_json(f: &NatTrans) -> Value {
    let cat = f.cat();
    Value::Object(cat.objects().map(|a| (cat.object_name(a).to_string(), json!(f.components()[a]))).collect())
}

fn stages_json(cat: &FinCategory, s: &Subpresheaf) -> Value {
    Value::Object(cat.objects().map(|a| (cat.object_name(a).to_string(), json!(s.elements(a).collect::<Vec<_>>()))).collect())
}

fn sheafify(site: &Site, x: &Presheaf, opts: &Options) -> Result<(Value, bool), RunError> {
    let sh = sheafify_with_cap(&site.ctx, x, opts.power_cap())?;
    let (_, oracle_unit) = double_plus_oracle(&site.ctx, x);
    let oracle_agree = find_iso_under(&sh.unit, &oracle_unit).is_some();
    let is_sheaf = sheaf_check(&site.ctx, &sh.sheaf).sheaf;
    let report = json!({
        "sheaf": presheaf_json(&sh.sheaf),
        "unit": components_json(&sh.unit),
        "oracle_agree": oracle_agree,
        "is_sheaf": is_sheaf,
    });
    Ok((report, oracle_agree && is_sheaf))
}

fn universe(site: &Site) -> Result<Universe, RunError> {
    Ok(match &site.universe {
        UniverseSpec::Auto(n) => Universe::auto(&site.cat, *n)?,
        UniverseSpec::List { objects, maps } => {
            let objs = objects.iter().map(|n| site.presheaves[n].clone()).collect();
            let maps = maps.as_ref().map(|ms| ms.iter().map(|n| site.maps[n].map.clone()).collect());
            Universe::new(&site.cat, objs, maps)?
        }
    })
}

fn universe_json(u: &Universe) -> Value {
    json!({ "objects": u.objects.len(), "maps": u.maps.len(), "closure": u.closure })
}

fn reports_json(rs: &[AxiomReport]) -> Value {
    serde_json::to_value(rs).expect("serializable")
}

fn verify_axioms(site: &Site, opts: &Options) -> Result<(Value, bool), RunError> {
    let u = universe(site)?;
    let family: Box<dyn MapFamily> = match &site.family {
        FamilySpec::All => Box::new(AllMaps),
        FamilySpec::Declared(names) => Box::new(DeclaredMaps {
            name: "declared".into(),
            maps: names.iter().map(|n| site.maps[n].map.clone()).collect(),
        }),
    };
    let amb = Presheaves::new(&site.cat);
    let mut axioms = check_axioms(&u, family.as_ref(), &amb)?;
    axioms.push(check_p1(&u, family.as_ref(), &amb, opts.power_cap())?);
    let passed = axioms.iter().all(AxiomReport::passed);
    axioms.push(check_s2_bounded(&u, family.as_ref(), &amb)?);
    let report = json!({
        "family": family.name(),
        "universe": universe_json(&u),
        "axioms": reports_json(&axioms),
    });
    Ok((report, passed))
}

/// The sheaf universe is the sheaves among the presheaf universe; the
/// family is always the locally small maps.
fn verify_sheaf_axioms(site: &Site, opts: &Options) -> Result<(Value, bool), RunError> {
    let cap = opts.power_cap();
    let presheaves = universe(site)?;
    let sheaves = match &site.universe {
        UniverseSpec::Auto(n) => Universe::sheaves(&site.ctx, *n, cap)?,
        UniverseSpec::List { .. } => {
            let objs = presheaves.objects.iter().filter(|x| sheaf_check(&site.ctx, x).sheaf).cloned().collect();
            Universe::build(&site.cat, objs, None, &Sheaves::new(&site.ctx, cap))?
        }
    };
    let r = check_sheaf_small_maps(&site.ctx, &sheaves, &presheaves, cap)?;
    let report = json!({
        "coverage": site.coverage_name,
        "family": "locally-small",
        "universe": universe_json(&sheaves),
        "presheaf_universe": universe_json(&presheaves),
        "axioms": reports_json(&r.axioms),
        "lemmas": reports_json(&r.lemmas),
    });
    Ok((report, r.passed()))
}

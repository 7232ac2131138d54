//! Turns a parsed spec into validated library values.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use ltsheaf::closure::{builtin_context, ClosureContext};
use ltsheaf::fincat::{product, validate_category, yoneda, FinCategory, LawViolation, Mor, Morphism, NatTrans, Obj, Presheaf};
use ltsheaf::logic::Subpresheaf;
use ltsheaf::site::{build_omega, Coverage, Sieve, SiteError};

use crate::ast::*;
use crate::diag::{Diagnostic, Span};

/// A declared subobject with the names of its parent's factors.
#[derive(Clone, Debug)]
pub struct NamedSubobject {
    pub factors: Vec<String>,
    pub sub: Subpresheaf,
}

/// A declared map with the names of its endpoints.
#[derive(Clone, Debug)]
pub struct NamedMap {
    pub source: String,
    pub target: String,
    pub map: NatTrans,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    All,
    Declared(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UniverseSpec {
    Auto(usize),
    List { objects: Vec<String>, maps: Option<Vec<String>> },
}

/// An elaborated spec.
pub struct Site {
    pub cat: FinCategory,
    /// `trivial`, `dense`, `all` or `declared`.
    pub coverage_name: String,
    pub ctx: ClosureContext,
    pub presheaves: BTreeMap<String, Presheaf>,
    pub subobjects: BTreeMap<String, NamedSubobject>,
    pub maps: BTreeMap<String, NamedMap>,
    pub family: FamilySpec,
    pub universe: UniverseSpec,
    pub commands: Vec<Command>,
}

impl std::fmt::Debug for Site {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Site")
            .field("cat", &self.cat)
            .field("coverage", &self.coverage_name)
            .field("presheaves", &self.presheaves.keys().collect::<Vec<_>>())
            .field("commands", &self.commands.len())
            .finish()
    }
}

/// The universe used when none is declared.
pub const DEFAULT_UNIVERSE: usize = 2;

fn diag(span: Span, msg: impl Into<String>) -> Diagnostic {
    Diagnostic::new(span, msg)
}

pub fn elaborate(spec: &SiteSpec) -> Result<Site, Diagnostic> {
    let mut cats = spec.items.iter().filter_map(|i| match i {
        Item::Category(c) => Some(c),
        _ => None,
    });
    let decl = cats.next().ok_or_else(|| diag(Span::new(1, 1), "no category declared"))?;
    if let Some(second) = cats.next() {
        return Err(diag(category_span(second), "a second category is declared"));
    }
    let cat = build_category(decl)?;

    let mut coverage = None;
    let (mut family, mut universe) = (None, None);
    let mut site = Site {
        ctx: builtin_context(&cat, "trivial").expect("builtin coverage"),
        coverage_name: "trivial".into(),
        cat: cat.clone(),
        presheaves: BTreeMap::new(),
        subobjects: BTreeMap::new(),
        maps: BTreeMap::new(),
        family: FamilySpec::All,
        universe: UniverseSpec::Auto(DEFAULT_UNIVERSE),
        commands: Vec::new(),
    };
    for item in &spec.items {
        match item {
            Item::Coverage(c) => {
                if coverage.replace(c).is_some() {
                    return Err(diag(coverage_span(c), "a second coverage is declared"));
                }
            }
            Item::Family(f) => {
                if family.replace(f).is_some() {
                    return Err(diag(family_span(f), "a second family is declared"));
                }
            }
            Item::Universe(u) => {
                if universe.replace(u).is_some() {
                    return Err(diag(universe_span(u), "a second universe is declared"));
                }
            }
            _ => {}
        }
    }
    if let Some(c) = coverage {
        let (name, ctx) = build_coverage(&cat, c)?;
        site.coverage_name = name;
        site.ctx = ctx;
    }
    for item in &spec.items {
        if let Item::Presheaf(p) = item {
            if site.presheaves.contains_key(&p.name.text) {
                return Err(diag(p.name.span, format!("presheaf `{}` is declared twice", p.name.text)));
            }
            let x = build_presheaf(&cat, p)?;
            site.presheaves.insert(p.name.text.clone(), x);
        }
    }
    for item in &spec.items {
        match item {
            Item::Subobject(d) => {
                if site.subobjects.contains_key(&d.name.text) {
                    return Err(diag(d.name.span, format!("subobject `{}` is declared twice", d.name.text)));
                }
                let s = build_subobject(&site, d)?;
                site.subobjects.insert(d.name.text.clone(), s);
            }
            Item::Map(m) => {
                if site.maps.contains_key(&m.name.text) {
                    return Err(diag(m.name.span, format!("map `{}` is declared twice", m.name.text)));
                }
                let f = build_map(&site, m)?;
                site.maps.insert(m.name.text.clone(), f);
            }
            _ => {}
        }
    }
    if let Some(f) = family {
        site.family = match f {
            FamilyDecl::All(_) => FamilySpec::All,
            FamilyDecl::List(ns) => {
                for n in ns {
                    site.lookup_map(n)?;
                }
                FamilySpec::Declared(ns.iter().map(|n| n.text.clone()).collect())
            }
        };
    }
    if let Some(u) = universe {
        site.universe = match u {
            UniverseDecl::Auto(_, n) => UniverseSpec::Auto(*n),
            UniverseDecl::List { objects, maps } => {
                let listed: BTreeSet<&str> = objects.iter().map(|n| n.text.as_str()).collect();
                for n in objects {
                    site.lookup_presheaf(n)?;
                }
                for n in maps.iter().flatten() {
                    let m = site.lookup_map(n)?;
                    for end in [&m.source, &m.target] {
                        if !listed.contains(end.as_str()) {
                            return Err(diag(n.span, format!("map `{}` touches `{end}`, which is not in the universe", n.text)));
                        }
                    }
                }
                UniverseSpec::List {
                    objects: objects.iter().map(|n| n.text.clone()).collect(),
                    maps: maps.as_ref().map(|ms| ms.iter().map(|n| n.text.clone()).collect()),
                }
            }
        };
    }
    for item in &spec.items {
        if let Item::Run(c) = item {
            site.check_command(c)?;
            site.commands.push(c.clone());
        }
    }
    Ok(site)
}

impl Site {
    pub fn lookup_presheaf(&self, n: &Name) -> Result<&Presheaf, Diagnostic> {
        self.presheaves.get(&n.text).ok_or_else(|| diag(n.span, format!("unknown presheaf `{}`", n.text)))
    }

    pub fn lookup_map(&self, n: &Name) -> Result<&NamedMap, Diagnostic> {
        self.maps.get(&n.text).ok_or_else(|| diag(n.span, format!("unknown map `{}`", n.text)))
    }

    pub fn lookup_subobject(&self, n: &Name) -> Result<&NamedSubobject, Diagnostic> {
        self.subobjects.get(&n.text).ok_or_else(|| diag(n.span, format!("unknown subobject `{}`", n.text)))
    }

    /// Resolves the names a command mentions. Formulas are checked when
    /// they are evaluated.
    pub fn check_command(&self, c: &Command) -> Result<(), Diagnostic> {
        match &c.kind {
            CommandKind::Sheafify(x) | CommandKind::IsSheaf(x) => self.lookup_presheaf(x).map(|_| ()),
            CommandKind::Closure(x, s) => {
                self.lookup_presheaf(x)?;
                let sub = self.lookup_subobject(s)?;
                if sub.factors != [x.text.clone()] {
                    return Err(diag(s.span, format!("subobject `{}` is not a subobject of `{}`", s.text, x.text)));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

fn category_span(c: &CategoryDecl) -> Span {
    match c {
        CategoryDecl::Explicit { span, .. } | CategoryDecl::Poset { span, .. } | CategoryDecl::Monoid { span, .. } => *span,
    }
}

fn coverage_span(c: &CoverageDecl) -> Span {
    match c {
        CoverageDecl::Named(n) => n.span,
        CoverageDecl::Sieves { span, .. } => *span,
    }
}

fn family_span(f: &FamilyDecl) -> Span {
    match f {
        FamilyDecl::All(span) => *span,
        FamilyDecl::List(ns) => ns.first().map(|n| n.span).unwrap_or_default(),
    }
}

fn universe_span(u: &UniverseDecl) -> Span {
    match u {
        UniverseDecl::Auto(span, _) => *span,
        UniverseDecl::List { objects, .. } => objects.first().map(|n| n.span).unwrap_or_default(),
    }
}

fn object_index(objects: &[String], n: &Name) -> Result<Obj, Diagnostic> {
    objects.iter().position(|o| *o == n.text).ok_or_else(|| diag(n.span, format!("unknown object `{}`", n.text)))
}

/// Identity composites for every morphism, in the order `from_parts` wants.
fn identity_entries(morphisms: &[Morphism], identities: &[Mor]) -> Vec<(Mor, Mor, Mor)> {
    let mut out = Vec::new();
    for (i, m) in morphisms.iter().enumerate() {
        out.push((identities[m.cod], i, i));
        out.push((i, identities[m.dom], i));
    }
    out
}

fn finish_category(
    span: Span,
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    table: Vec<(Mor, Mor, Mor)>,
) -> Result<FinCategory, Diagnostic> {
    let identities: Vec<Mor> = (0..objects.len()).collect();
    let mut full = identity_entries(&morphisms, &identities);
    full.extend(table);
    let cat = FinCategory::from_parts(objects, morphisms, identities, &full).map_err(|e| diag(span, e.to_string()))?;
    let report = validate_category(&cat);
    if let Some(v) = report.violations.first() {
        let msg = match v {
            LawViolation::LeftIdentity { morphism } | LawViolation::RightIdentity { morphism } => {
                format!("identity law fails for `{morphism}`")
            }
            LawViolation::Associativity { h, g, f } => format!("composition is not associative at `{h} . {g} . {f}`"),
        };
        return Err(diag(span, msg));
    }
    Ok(cat)
}

fn unique_names(names: &[Name], what: &str) -> Result<Vec<String>, Diagnostic> {
    let mut out: Vec<String> = Vec::new();
    for n in names {
        if out.contains(&n.text) {
            return Err(diag(n.span, format!("{what} `{}` is declared twice", n.text)));
        }
        out.push(n.text.clone());
    }
    Ok(out)
}

/// Resolves `g . f = h` against the morphism list, checking composability.
fn compose_entry(morphisms: &[Morphism], c: &ComposeDecl, alias: impl Fn(&str) -> Option<Mor>) -> Result<(Mor, Mor, Mor), Diagnostic> {
    let find = |n: &Name| {
        morphisms
            .iter()
            .position(|m| m.name == n.text)
            .or_else(|| alias(&n.text))
            .ok_or_else(|| diag(n.span, format!("unknown arrow `{}`", n.text)))
    };
    let (g, f, h) = (find(&c.g)?, find(&c.f)?, find(&c.h)?);
    if morphisms[f].cod != morphisms[g].dom {
        return Err(diag(c.g.span, format!("`{} . {}` is not composable", c.g.text, c.f.text)));
    }
    if morphisms[h].dom != morphisms[f].dom || morphisms[h].cod != morphisms[g].cod {
        return Err(diag(c.h.span, format!("`{}` cannot be the composite `{} . {}`", c.h.text, c.g.text, c.f.text)));
    }
    Ok((g, f, h))
}

pub fn build_category(decl: &CategoryDecl) -> Result<FinCategory, Diagnostic> {
    match decl {
        CategoryDecl::Explicit { span, objects, arrows, compose } => {
            let objects = unique_names(objects, "object")?;
            let mut morphisms: Vec<Morphism> =
                objects.iter().enumerate().map(|(a, o)| Morphism { name: format!("id_{o}"), dom: a, cod: a }).collect();
            for ar in arrows {
                if morphisms.iter().any(|m| m.name == ar.name.text) {
                    return Err(diag(ar.name.span, format!("arrow `{}` is declared twice", ar.name.text)));
                }
                let dom = object_index(&objects, &ar.dom)?;
                let cod = object_index(&objects, &ar.cod)?;
                morphisms.push(Morphism { name: ar.name.text.clone(), dom, cod });
            }
            let table = compose.iter().map(|c| compose_entry(&morphisms, c, |_| None)).collect::<Result<_, _>>()?;
            finish_category(*span, objects, morphisms, table)
        }
        CategoryDecl::Monoid { span, elements, compose } => {
            let elements = unique_names(elements, "element")?;
            let mut morphisms = vec![Morphism { name: "id_*".into(), dom: 0, cod: 0 }];
            for e in elements {
                if e == "id" || e == "id_*" {
                    return Err(diag(*span, "the identity element is implicit"));
                }
                morphisms.push(Morphism { name: e, dom: 0, cod: 0 });
            }
            let table = compose
                .iter()
                .map(|c| compose_entry(&morphisms, c, |n| (n == "id").then_some(0)))
                .collect::<Result<_, _>>()?;
            finish_category(*span, vec!["*".into()], morphisms, table)
        }
        CategoryDecl::Poset { span, entries } => build_poset(*span, entries),
    }
}

fn build_poset(span: Span, entries: &[PosetEntry]) -> Result<FinCategory, Diagnostic> {
    let mut objects: Vec<String> = Vec::new();
    let mut intern = |n: &Name| match objects.iter().position(|o| *o == n.text) {
        Some(i) => i,
        None => {
            objects.push(n.text.clone());
            objects.len() - 1
        }
    };
    let mut gens = Vec::new();
    for e in entries {
        match e {
            PosetEntry::Object(n) => {
                intern(n);
            }
            PosetEntry::Le { name, lo, hi } => {
                let (a, b) = (intern(lo), intern(hi));
                gens.push((name.clone(), a, b, lo.span));
            }
        }
    }
    let n = objects.len();
    let mut le = vec![vec![false; n]; n];
    for (a, row) in le.iter_mut().enumerate() {
        row[a] = true;
    }
    for &(_, a, b, _) in &gens {
        le[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if le[i][k] && le[k][j] {
                    le[i][j] = true;
                }
            }
        }
    }
    for &(_, a, b, sp) in &gens {
        if a != b && le[b][a] {
            return Err(diag(sp, format!("`{} <= {}` makes the order cyclic", objects[a], objects[b])));
        }
    }
    let mut morphisms: Vec<Morphism> =
        objects.iter().enumerate().map(|(a, o)| Morphism { name: format!("id_{o}"), dom: a, cod: a }).collect();
    let mut index = vec![vec![None; n]; n];
    for (a, row) in index.iter_mut().enumerate() {
        row[a] = Some(a);
    }
    for a in 0..n {
        for b in 0..n {
            if a == b || !le[a][b] {
                continue;
            }
            let mut names = gens.iter().filter(|g| g.1 == a && g.2 == b).filter_map(|g| g.0.as_ref());
            let name = match names.next() {
                Some(first) => {
                    if let Some(other) = names.find(|o| o.text != first.text) {
                        return Err(diag(other.span, format!("`{}` and `{}` name the same relation", first.text, other.text)));
                    }
                    first.text.clone()
                }
                None => format!("le_{}_{}", objects[a], objects[b]),
            };
            if morphisms.iter().any(|m| m.name == name) {
                return Err(diag(span, format!("arrow name `{name}` is used twice")));
            }
            index[a][b] = Some(morphisms.len());
            morphisms.push(Morphism { name, dom: a, cod: b });
        }
    }
    let mut table = Vec::new();
    for (f, mf) in morphisms.iter().enumerate() {
        for (g, mg) in morphisms.iter().enumerate() {
            if mf.cod == mg.dom {
                table.push((g, f, index[mf.dom][mg.cod].expect("order is transitive")));
            }
        }
    }
    finish_category(span, objects, morphisms, table)
}

fn morphism_index(cat: &FinCategory, n: &Name) -> Result<Mor, Diagnostic> {
    cat.morphism_index(&n.text).ok_or_else(|| diag(n.span, format!("unknown arrow `{}`", n.text)))
}

fn cat_object(cat: &FinCategory, n: &Name) -> Result<Obj, Diagnostic> {
    cat.object_index(&n.text).ok_or_else(|| diag(n.span, format!("unknown object `{}`", n.text)))
}

fn build_coverage(cat: &FinCategory, c: &CoverageDecl) -> Result<(String, ClosureContext), Diagnostic> {
    match c {
        CoverageDecl::Named(n) => match builtin_context(cat, &n.text) {
            Some(ctx) => Ok((n.text.clone(), ctx)),
            None => Err(Diagnostic::expecting(n.span, format!("unknown coverage `{}`", n.text), &["trivial", "dense", "all", "`{`"])),
        },
        CoverageDecl::Sieves { entries, .. } => {
            let omega = Arc::new(build_omega(cat));
            let mut sieves = Vec::new();
            for (obj, lits) in entries {
                let a = cat_object(cat, obj)?;
                for lit in lits {
                    let members = lit.members.iter().map(|m| morphism_index(cat, m)).collect::<Result<Vec<_>, _>>()?;
                    let s = Sieve::new(cat, a, &members).map_err(|e| match e {
                        SiteError::NotClosed { object, member, with } => diag(
                            lit.span,
                            format!("sieve on `{object}` is not closed under precomposition: it has `{member}` but not `{member} . {with}`"),
                        ),
                        e => diag(lit.span, e.to_string()),
                    })?;
                    sieves.push(s);
                }
            }
            Ok(("declared".into(), ClosureContext::new(Coverage::from_sieves(&omega, &sieves))))
        }
    }
}

fn build_presheaf(cat: &FinCategory, p: &PresheafDecl) -> Result<Presheaf, Diagnostic> {
    let entries = match &p.body {
        PresheafBody::Terminal => return Ok(Presheaf::terminal(cat)),
        PresheafBody::Initial => return Ok(Presheaf::initial(cat)),
        PresheafBody::Constant(n) => return Ok(Presheaf::constant(cat, *n)),
        PresheafBody::Yoneda(a) => {
            let a = cat_object(cat, a)?;
            return yoneda(cat, a).map_err(|e| diag(p.name.span, e.to_string()));
        }
        PresheafBody::Tables(es) => es,
    };
    let mut sizes: Vec<Option<usize>> = vec![None; cat.num_objects()];
    let mut tables: Vec<Option<Vec<usize>>> = vec![None; cat.num_morphisms()];
    for e in entries {
        match e {
            PresheafEntry::Size(n, k) => {
                let a = cat_object(cat, n)?;
                if sizes[a].replace(*k).is_some() {
                    return Err(diag(n.span, format!("carrier of `{}` given twice", n.text)));
                }
            }
            PresheafEntry::Action(n, t) => {
                let m = morphism_index(cat, n)?;
                if tables[m].replace(t.clone()).is_some() {
                    return Err(diag(n.span, format!("action of `{}` given twice", n.text)));
                }
            }
        }
    }
    let sizes: Vec<usize> = sizes
        .into_iter()
        .enumerate()
        .map(|(a, s)| s.ok_or_else(|| diag(p.name.span, format!("no carrier given for object `{}`", cat.object_name(a)))))
        .collect::<Result<_, _>>()?;
    let action = tables
        .into_iter()
        .enumerate()
        .map(|(m, t)| match t {
            Some(t) => Ok(t),
            None if cat.is_identity(m) => Ok((0..sizes[cat.cod(m)]).collect()),
            None if sizes[cat.cod(m)] == 0 => Ok(Vec::new()),
            None => Err(diag(p.name.span, format!("no action given for arrow `{}`", cat.morphism(m).name))),
        })
        .collect::<Result<_, _>>()?;
    Presheaf::new(cat, sizes, action).map_err(|e| diag(p.name.span, e.to_string()))
}

fn build_subobject(site: &Site, d: &SubobjectDecl) -> Result<NamedSubobject, Diagnostic> {
    let cat = &site.cat;
    let factors = d.parent.iter().map(|n| site.lookup_presheaf(n).cloned()).collect::<Result<Vec<_>, _>>()?;
    let prod = product(cat, &factors);
    let parent = if factors.len() == 1 { factors[0].clone() } else { prod.presheaf.clone() };
    let mut stages = vec![Vec::new(); cat.num_objects()];
    let mut seen = BTreeSet::new();
    for (obj, elems) in &d.stages {
        let a = cat_object(cat, obj)?;
        if !seen.insert(a) {
            return Err(diag(obj.span, format!("stage `{}` given twice", obj.text)));
        }
        for e in elems {
            let idx = match e {
                Element::Index(i) => *i,
                Element::Tuple(t) => {
                    if t.len() != factors.len() {
                        return Err(diag(obj.span, format!("tuple of length {} in a product of {} factors", t.len(), factors.len())));
                    }
                    if let Some(k) = (0..t.len()).find(|&k| t[k] >= factors[k].size(a)) {
                        return Err(diag(obj.span, format!("coordinate {} out of range at `{}`", t[k], obj.text)));
                    }
                    if factors.len() == 1 {
                        t[0]
                    } else {
                        prod.encode(a, t)
                    }
                }
            };
            if idx >= parent.size(a) {
                return Err(diag(obj.span, format!("element {idx} out of range at `{}`", obj.text)));
            }
            stages[a].push(idx);
        }
    }
    let sub = Subpresheaf::new(&parent, &stages).map_err(|e| diag(d.name.span, e.to_string()))?;
    Ok(NamedSubobject { factors: d.parent.iter().map(|n| n.text.clone()).collect(), sub })
}

fn build_map(site: &Site, m: &MapDecl) -> Result<NamedMap, Diagnostic> {
    let cat = &site.cat;
    let x = site.lookup_presheaf(&m.source)?;
    let y = site.lookup_presheaf(&m.target)?;
    let mut comps: Vec<Option<Vec<usize>>> = vec![None; cat.num_objects()];
    for (obj, t) in &m.components {
        let a = cat_object(cat, obj)?;
        if comps[a].replace(t.clone()).is_some() {
            return Err(diag(obj.span, format!("component at `{}` given twice", obj.text)));
        }
    }
    let comps = comps
        .into_iter()
        .enumerate()
        .map(|(a, c)| match c {
            Some(c) => Ok(c),
            None if x.size(a) == 0 => Ok(Vec::new()),
            None => Err(diag(m.name.span, format!("no component given at `{}`", cat.object_name(a)))),
        })
        .collect::<Result<_, _>>()?;
    let map = NatTrans::new(x, y, comps).map_err(|e| diag(m.name.span, e.to_string()))?;
    Ok(NamedMap { source: m.source.text.clone(), target: m.target.text.clone(), map })
}

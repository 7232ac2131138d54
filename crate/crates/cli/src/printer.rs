//! Canonical pretty-printing. The output reparses to an equal tree.

use std::fmt::Write;

use crate::ast::*;

fn join<T>(items: &[T], sep: &str, f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(sep)
}

fn names(ns: &[Name]) -> String {
    join(ns, ", ", |n| n.text.clone())
}

fn numbers(v: &[usize]) -> String {
    format!("[{}]", join(v, ", ", |n| n.to_string()))
}

fn composes(cs: &[ComposeDecl]) -> String {
    join(cs, ", ", |c| format!("{} . {} = {}", c.g.text, c.f.text, c.h.text))
}

pub fn print_spec(spec: &SiteSpec) -> String {
    let mut out = String::new();
    for item in &spec.items {
        out.push_str(&print_item(item));
        out.push('\n');
    }
    out
}

pub fn print_item(item: &Item) -> String {
    let mut s = String::new();
    match item {
        Item::Category(CategoryDecl::Explicit { objects, arrows, compose, .. }) => {
            s.push_str("category {\n");
            if !objects.is_empty() {
                let _ = writeln!(s, "  objects {}", names(objects));
            }
            if !arrows.is_empty() {
                let _ = writeln!(s, "  arrow {}", join(arrows, ", ", |a| format!("{}: {} -> {}", a.name.text, a.dom.text, a.cod.text)));
            }
            if !compose.is_empty() {
                let _ = writeln!(s, "  compose {}", composes(compose));
            }
            s.push('}');
        }
        Item::Category(CategoryDecl::Poset { entries, .. }) => {
            let body = join(entries, ", ", |e| match e {
                PosetEntry::Object(n) => n.text.clone(),
                PosetEntry::Le { name: Some(n), lo, hi } => format!("{}: {} <= {}", n.text, lo.text, hi.text),
                PosetEntry::Le { name: None, lo, hi } => format!("{} <= {}", lo.text, hi.text),
            });
            let _ = write!(s, "poset {{ {body} }}");
        }
        Item::Category(CategoryDecl::Monoid { elements, compose, .. }) => {
            s.push_str("monoid {\n");
            if !elements.is_empty() {
                let _ = writeln!(s, "  elements {}", names(elements));
            }
            if !compose.is_empty() {
                let _ = writeln!(s, "  compose {}", composes(compose));
            }
            s.push('}');
        }
        Item::Coverage(CoverageDecl::Named(n)) => {
            let _ = write!(s, "coverage {}", n.text);
        }
        Item::Coverage(CoverageDecl::Sieves { entries, .. }) => {
            s.push_str("coverage {\n");
            for (obj, sieves) in entries {
                let _ = writeln!(s, "  {}: {}", obj.text, join(sieves, ", ", |sv| format!("{{{}}}", names(&sv.members))));
            }
            s.push('}');
        }
        Item::Presheaf(p) => {
            let _ = write!(s, "presheaf {} ", p.name.text);
            match &p.body {
                PresheafBody::Tables(es) => {
                    let body = join(es, ", ", |e| match e {
                        PresheafEntry::Size(n, k) => format!("{}: {k}", n.text),
                        PresheafEntry::Action(n, t) => format!("{}: {}", n.text, numbers(t)),
                    });
                    let _ = write!(s, "{{ {body} }}");
                }
                PresheafBody::Terminal => s.push_str("= terminal"),
                PresheafBody::Initial => s.push_str("= initial"),
                PresheafBody::Constant(n) => {
                    let _ = write!(s, "= constant({n})");
                }
                PresheafBody::Yoneda(a) => {
                    let _ = write!(s, "= yoneda({})", a.text);
                }
            }
        }
        Item::Subobject(d) => {
            let body = join(&d.stages, ", ", |(obj, els)| {
                let els = join(els, ", ", |e| match e {
                    Element::Index(i) => i.to_string(),
                    Element::Tuple(t) => format!("({})", join(t, ", ", |n| n.to_string())),
                });
                format!("{}: [{els}]", obj.text)
            });
            let parent = join(&d.parent, " * ", |n| n.text.clone());
            let _ = write!(s, "subobject {} of {parent} {{ {body} }}", d.name.text);
        }
        Item::Map(m) => {
            let body = join(&m.components, ", ", |(obj, t)| format!("{}: {}", obj.text, numbers(t)));
            let _ = write!(s, "map {}: {} -> {} {{ {body} }}", m.name.text, m.source.text, m.target.text);
        }
        Item::Family(FamilyDecl::All(_)) => s.push_str("family all"),
        Item::Family(FamilyDecl::List(ns)) => {
            let _ = write!(s, "family [{}]", names(ns));
        }
        Item::Universe(UniverseDecl::Auto(_, n)) => {
            let _ = write!(s, "universe auto({n})");
        }
        Item::Universe(UniverseDecl::List { objects, maps }) => {
            let _ = write!(s, "universe [{}]", names(objects));
            if let Some(ms) = maps {
                let _ = write!(s, " maps [{}]", names(ms));
            }
        }
        Item::Run(c) => {
            let _ = write!(s, "run {}", print_command(c));
        }
    }
    s
}

pub fn print_command(c: &Command) -> String {
    let name = c.kind.name();
    match &c.kind {
        CommandKind::Sheafify(x) | CommandKind::IsSheaf(x) => format!("{name} {}", x.text),
        CommandKind::Closure(x, y) => format!("{name} {} {}", x.text, y.text),
        CommandKind::Eval(f) => format!("{name} {}", print_formula(f)),
        _ => name.to_string(),
    }
}

pub fn print_formula(f: &Formula) -> String {
    match &f.kind {
        FormulaKind::True => "true".into(),
        FormulaKind::False => "false".into(),
        FormulaKind::And(args) | FormulaKind::Or(args) => {
            let head = if matches!(f.kind, FormulaKind::And(_)) { "and" } else { "or" };
            let mut s = format!("({head}");
            for a in args {
                s.push(' ');
                s.push_str(&print_formula(a));
            }
            s.push(')');
            s
        }
        FormulaKind::Implies(a, b) => format!("(implies {} {})", print_formula(a), print_formula(b)),
        FormulaKind::Iff(a, b) => format!("(iff {} {})", print_formula(a), print_formula(b)),
        FormulaKind::Not(a) => format!("(not {})", print_formula(a)),
        FormulaKind::Forall(v, sort, body) => format!("(forall ({} {}) {})", v.text, print_sort(sort), print_formula(body)),
        FormulaKind::Exists(v, sort, body) => format!("(exists ({} {}) {})", v.text, print_sort(sort), print_formula(body)),
        FormulaKind::Eq(a, b) => format!("(= {} {})", print_term(a), print_term(b)),
        FormulaKind::In(s, args) => {
            let mut out = format!("(in {}", s.text);
            for t in args {
                out.push(' ');
                out.push_str(&print_term(t));
            }
            out.push(')');
            out
        }
        FormulaKind::Mem(a, b) => format!("(mem {} {})", print_term(a), print_term(b)),
    }
}

pub fn print_term(t: &Term) -> String {
    match t {
        Term::Var(v) => v.text.clone(),
        Term::App(f, t) => format!("({} {})", f.text, print_term(t)),
    }
}

pub fn print_sort(s: &Sort) -> String {
    match s {
        Sort::Named(n) => n.text.clone(),
        Sort::One => "1".into(),
        Sort::Omega => "Omega".into(),
        Sort::Power(n) => format!("(P {})", n.text),
        Sort::PowerJ(n) => format!("(PJ {})", n.text),
    }
}

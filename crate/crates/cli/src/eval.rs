//! Elaboration of `eval` formulas into the library's formula type.

use std::collections::HashMap;

use ltsheaf::fincat::Presheaf;
use ltsheaf::logic::{self, Binder, Subpresheaf};
use ltsheaf::powerobj::{pj_object, power_object};

use crate::ast::{Formula, FormulaKind, Sort, Term};
use crate::diag::{Diagnostic, Span};
use crate::elaborate::Site;
use crate::run::RunError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum SortKey {
    Named(String),
    One,
    Omega,
    Power(String),
    PowerJ(String),
}

/// Builds library formulas, computing power objects on demand.
pub struct FormulaBuilder<'a> {
    site: &'a Site,
    cap: usize,
    sorts: HashMap<SortKey, (Presheaf, Option<Subpresheaf>)>,
}

fn input(span: Span, msg: impl Into<String>) -> RunError {
    RunError::Input(Diagnostic::new(span, msg))
}

impl<'a> FormulaBuilder<'a> {
    pub fn new(site: &'a Site, cap: usize) -> Self {
        FormulaBuilder { site, cap, sorts: HashMap::new() }
    }

    /// The presheaf of a sort and, for power sorts, its membership relation.
    fn sort(&mut self, key: &SortKey, span: Span) -> Result<(Presheaf, Option<Subpresheaf>), RunError> {
        if let Some(s) = self.sorts.get(key) {
            return Ok(s.clone());
        }
        let site = self.site;
        let base = |n: &str| site.presheaves.get(n).cloned().ok_or_else(|| input(span, format!("unknown presheaf `{n}`")));
        let value = match key {
            SortKey::Named(n) => (base(n)?, None),
            SortKey::One => (Presheaf::terminal(&site.cat), None),
            SortKey::Omega => (site.ctx.omega().presheaf.clone(), None),
            SortKey::Power(n) => {
                let p = power_object(&base(n)?, self.cap)?;
                (p.presheaf, Some(p.membership))
            }
            SortKey::PowerJ(n) => {
                let p = pj_object(&site.ctx, &base(n)?, self.cap)?;
                (p.presheaf, Some(p.membership))
            }
        };
        self.sorts.insert(key.clone(), value.clone());
        Ok(value)
    }

    pub fn build(&mut self, f: &Formula) -> Result<logic::Formula, RunError> {
        self.formula(f, &mut Vec::new())
    }

    fn formula(&mut self, f: &Formula, env: &mut Vec<(String, SortKey)>) -> Result<logic::Formula, RunError> {
        use logic::Formula as L;
        Ok(match &f.kind {
            FormulaKind::True => L::True,
            FormulaKind::False => L::False,
            FormulaKind::And(args) => {
                let mut out = L::True;
                for (i, a) in args.iter().enumerate() {
                    let a = self.formula(a, env)?;
                    out = if i == 0 { a } else { out.and(a) };
                }
                out
            }
            FormulaKind::Or(args) => {
                let mut out = L::False;
                for (i, a) in args.iter().enumerate() {
                    let a = self.formula(a, env)?;
                    out = if i == 0 { a } else { out.or(a) };
                }
                out
            }
            FormulaKind::Implies(a, b) => self.formula(a, env)?.implies(self.formula(b, env)?),
            FormulaKind::Iff(a, b) => self.formula(a, env)?.iff(self.formula(b, env)?),
            FormulaKind::Not(a) => self.formula(a, env)?.not(),
            FormulaKind::Forall(v, sort, body) | FormulaKind::Exists(v, sort, body) => {
                let key = match sort {
                    Sort::Named(n) => SortKey::Named(n.text.clone()),
                    Sort::One => SortKey::One,
                    Sort::Omega => SortKey::Omega,
                    Sort::Power(n) => SortKey::Power(n.text.clone()),
                    Sort::PowerJ(n) => SortKey::PowerJ(n.text.clone()),
                };
                let (presheaf, _) = self.sort(&key, v.span)?;
                let binder = if v.text == "_" { Binder::anonymous(&presheaf) } else { Binder::new(&v.text, &presheaf) };
                env.push((v.text.clone(), key));
                let body = self.formula(body, env);
                env.pop();
                let body = body?;
                if matches!(f.kind, FormulaKind::Forall(..)) {
                    L::forall(binder, body)
                } else {
                    L::exists(binder, body)
                }
            }
            FormulaKind::Eq(a, b) => L::Eq(self.term(a, env)?, self.term(b, env)?),
            FormulaKind::In(s, args) => {
                let sub = self.site.lookup_subobject(s).map_err(RunError::Input)?;
                if sub.factors.len() != args.len() {
                    return Err(input(
                        s.span,
                        format!("`{}` relates {} terms, {} given", s.text, sub.factors.len(), args.len()),
                    ));
                }
                let sub = sub.sub.clone();
                let terms = args.iter().map(|t| self.term(t, env)).collect::<Result<Vec<_>, _>>()?;
                L::Atom(sub, terms)
            }
            FormulaKind::Mem(x, s) => {
                let key = self.sort_of(s, env)?;
                let (_, membership) = self.sort(&key, f.span)?;
                let rel = membership.ok_or_else(|| input(f.span, "`mem` needs a set of sort (P X) or (PJ X)"))?;
                L::member(&rel, self.term(x, env)?, self.term(s, env)?)
            }
        })
    }

    fn term(&mut self, t: &Term, env: &[(String, SortKey)]) -> Result<logic::Term, RunError> {
        match t {
            Term::Var(v) => {
                if v.text == "_" || !env.iter().any(|(n, _)| *n == v.text) {
                    return Err(input(v.span, format!("unbound variable `{}`", v.text)));
                }
                Ok(logic::Term::var(&v.text))
            }
            Term::App(f, inner) => {
                let m = self.site.lookup_map(f).map_err(RunError::Input)?.map.clone();
                Ok(logic::Term::app(&m, self.term(inner, env)?))
            }
        }
    }

    fn sort_of(&self, t: &Term, env: &[(String, SortKey)]) -> Result<SortKey, RunError> {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(n, _)| *n == v.text)
                .map(|(_, k)| k.clone())
                .ok_or_else(|| input(v.span, format!("unbound variable `{}`", v.text))),
            Term::App(f, _) => {
                let m = self.site.lookup_map(f).map_err(RunError::Input)?;
                Ok(SortKey::Named(m.target.clone()))
            }
        }
    }
}

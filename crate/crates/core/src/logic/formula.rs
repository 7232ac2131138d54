//! Formulas of the internal language and their evaluation.
//!
//! A formula in context `x₁: X₁, …, xₙ: Xₙ` denotes a subpresheaf of
//! `X₁ × ⋯ × Xₙ`. Connectives are the lattice operations of that subobject
//! lattice and quantifiers are `∃` and `∀` along the projection that
//! forgets the bound variable.

use crate::fincat::{product, FinCategory, NatTrans, Presheaf, Product};

use super::{exists_along, forall_along, pullback_sub, LogicError, Subpresheaf};

#[derive(Clone, Debug)]
pub enum Term {
    Var(String),
    /// `f(t)`.
    App(NatTrans, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn app(f: &NatTrans, t: Term) -> Term {
        Term::App(f.clone(), Box::new(t))
    }
}

/// A bound variable with its sort. The name `_` binds nothing visible.
#[derive(Clone, Debug)]
pub struct Binder {
    pub name: String,
    pub sort: Presheaf,
}

impl Binder {
    pub fn new(name: &str, sort: &Presheaf) -> Binder {
        Binder { name: name.to_string(), sort: sort.clone() }
    }

    pub fn anonymous(sort: &Presheaf) -> Binder {
        Binder::new("_", sort)
    }
}

#[derive(Clone, Debug)]
pub enum Formula {
    True,
    False,
    /// `S(t₁, …, tₙ)` for `S` a subpresheaf of the product of the sorts.
    Atom(Subpresheaf, Vec<Term>),
    Eq(Term, Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Forall(Binder, Box<Formula>),
    Exists(Binder, Box<Formula>),
}

impl Formula {
    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn iff(self, other: Formula) -> Formula {
        self.clone().implies(other.clone()).and(other.implies(self))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn forall(b: Binder, body: Formula) -> Formula {
        Formula::Forall(b, Box::new(body))
    }

    pub fn exists(b: Binder, body: Formula) -> Formula {
        Formula::Exists(b, Box::new(body))
    }

    /// `elem ∈ set` against a membership relation `rel ⊆ P × X`.
    pub fn member(rel: &Subpresheaf, elem: Term, set: Term) -> Formula {
        Formula::Atom(rel.clone(), vec![set, elem])
    }

    /// `(∀x ∈ set) body`, i.e. `(∀x)(x ∈ set ⇒ body)`.
    pub fn forall_in(b: Binder, set: Term, rel: &Subpresheaf, body: Formula) -> Formula {
        let x = Term::Var(b.name.clone());
        Formula::forall(b, Formula::member(rel, x, set).implies(body))
    }

    /// `(∃x ∈ set) body`, i.e. `(∃x)(x ∈ set ∧ body)`.
    pub fn exists_in(b: Binder, set: Term, rel: &Subpresheaf, body: Formula) -> Formula {
        let x = Term::Var(b.name.clone());
        Formula::exists(b, Formula::member(rel, x, set).and(body))
    }
}

struct Ctx {
    names: Vec<String>,
    prod: Product,
}

impl Ctx {
    fn new(cat: &FinCategory, vars: Vec<(String, Presheaf)>) -> Ctx {
        let (names, sorts): (Vec<_>, Vec<_>) = vars.into_iter().unzip();
        Ctx { names, prod: product(cat, &sorts) }
    }

    fn extend(&self, b: &Binder) -> Ctx {
        let mut vars: Vec<(String, Presheaf)> =
            self.names.iter().cloned().zip(self.prod.factors.iter().cloned()).collect();
        vars.push((b.name.clone(), b.sort.clone()));
        Ctx::new(self.prod.presheaf.cat(), vars)
    }

    /// The projection forgetting the last variable of `ext`.
    fn forget_last(&self, ext: &Ctx) -> NatTrans {
        let n = self.names.len();
        if n == 0 {
            return NatTrans::to_terminal(&ext.prod.presheaf);
        }
        self.prod.tuple(&ext.prod.projections[..n]).expect("context projections")
    }

    fn term(&self, t: &Term) -> Result<NatTrans, LogicError> {
        match t {
            Term::Var(name) => {
                if name == "_" {
                    return Err(LogicError::Unbound("_".into()));
                }
                let i = self
                    .names
                    .iter()
                    .rposition(|n| n == name)
                    .ok_or_else(|| LogicError::Unbound(name.clone()))?;
                Ok(self.prod.projections[i].clone())
            }
            Term::App(f, inner) => {
                let m = self.term(inner)?;
                f.after(&m).map_err(|_| LogicError::IllSorted("map applied to a term of the wrong sort".into()))
            }
        }
    }

    fn eval(&self, phi: &Formula) -> Result<Subpresheaf, LogicError> {
        let g = &self.prod.presheaf;
        Ok(match phi {
            Formula::True => Subpresheaf::top(g),
            Formula::False => Subpresheaf::bottom(g),
            Formula::Atom(s, args) => {
                let maps = args.iter().map(|t| self.term(t)).collect::<Result<Vec<_>, _>>()?;
                let into = match maps.len() {
                    0 => NatTrans::to_terminal(g),
                    1 => maps[0].clone(),
                    _ => {
                        let sorts: Vec<Presheaf> = maps.iter().map(|m| m.target().clone()).collect();
                        product(g.cat(), &sorts).tuple(&maps).expect("terms share the context")
                    }
                };
                if into.target() != s.parent() {
                    return Err(LogicError::IllSorted(format!("atom of arity {} applied to wrongly sorted terms", args.len())));
                }
                pullback_sub(&into, s)?
            }
            Formula::Eq(l, r) => {
                let (l, r) = (self.term(l)?, self.term(r)?);
                if l.target() != r.target() {
                    return Err(LogicError::IllSorted("equality between terms of different sorts".into()));
                }
                Subpresheaf::from_predicate(g, |a, x| l.apply(a, x) == r.apply(a, x))
            }
            Formula::And(p, q) => self.eval(p)?.meet(&self.eval(q)?)?,
            Formula::Or(p, q) => self.eval(p)?.join(&self.eval(q)?)?,
            Formula::Implies(p, q) => self.eval(p)?.implies(&self.eval(q)?)?,
            Formula::Not(p) => self.eval(p)?.negate(),
            Formula::Forall(b, body) | Formula::Exists(b, body) => {
                if b.sort.cat() != g.cat() {
                    return Err(LogicError::IllSorted(format!("sort of {} lives on another category", b.name)));
                }
                let ext = self.extend(b);
                let inner = ext.eval(body)?;
                let pi = self.forget_last(&ext);
                match phi {
                    Formula::Forall(..) => forall_along(&pi, &inner)?,
                    _ => exists_along(&pi, &inner)?,
                }
            }
        })
    }
}

/// Evaluates `phi` in the context `vars`, giving a subpresheaf of the
/// product of the context sorts (the terminal presheaf when empty).
pub fn evaluate(cat: &FinCategory, vars: &[(&str, Presheaf)], phi: &Formula) -> Result<Subpresheaf, LogicError> {
    let ctx = Ctx::new(cat, vars.iter().map(|(n, s)| (n.to_string(), s.clone())).collect());
    ctx.eval(phi)
}

/// Whether a closed formula evaluates to the top subobject of `1`.
pub fn is_valid(cat: &FinCategory, phi: &Formula) -> Result<bool, LogicError> {
    Ok(evaluate(cat, &[], phi)?.is_top())
}

//! Sieves, the presheaf `Ω` of sieves, and coverages.
//!
//! A coverage is stored as a set of sieves per object. The Lawvere-Tierney
//! conditions are checked by evaluating the two defining sentences in the
//! internal language; the Grothendieck conditions (M), (L), (T) are checked
//! directly. On a presheaf site the two checks accept the same coverages.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::fincat::{yoneda, FinCategory, Mor, NatTrans, Obj, Presheaf};
use crate::logic::{for_each_subobject, is_valid, evaluate, Binder, Formula, LogicError, Subpresheaf, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SiteError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("sieve on {object} is not closed under precomposition: {member} ∘ {with} is missing")]
    NotClosed { object: String, member: String, with: String },
    #[error("morphism {morphism} does not have codomain {object}")]
    CodomainMismatch { morphism: String, object: String },
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// A set of morphisms into `base`, closed under precomposition.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sieve {
    base: Obj,
    members: FixedBitSet,
}

impl fmt::Debug for Sieve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sieve({}, {:?})", self.base, self.members.ones().collect::<Vec<_>>())
    }
}

impl Sieve {
    pub fn new(cat: &FinCategory, base: Obj, members: &[Mor]) -> Result<Sieve, SiteError> {
        let mut bits = FixedBitSet::with_capacity(cat.num_morphisms());
        for &m in members {
            if m >= cat.num_morphisms() {
                return Err(SiteError::Malformed(format!("morphism index {m} out of range")));
            }
            if cat.cod(m) != base {
                return Err(SiteError::CodomainMismatch {
                    morphism: cat.morphism(m).name.clone(),
                    object: cat.object_name(base).to_string(),
                });
            }
            bits.insert(m);
        }
        for phi in bits.ones() {
            for &psi in cat.arrows_into(cat.dom(phi)) {
                if !bits.contains(cat.compose(phi, psi)) {
                    return Err(SiteError::NotClosed {
                        object: cat.object_name(base).to_string(),
                        member: cat.morphism(phi).name.clone(),
                        with: cat.morphism(psi).name.clone(),
                    });
                }
            }
        }
        Ok(Sieve { base, members: bits })
    }

    /// The maximal sieve `M_a` of all morphisms into `a`.
    pub fn maximal(cat: &FinCategory, a: Obj) -> Sieve {
        let mut bits = FixedBitSet::with_capacity(cat.num_morphisms());
        cat.arrows_into(a).iter().for_each(|&m| bits.insert(m));
        Sieve { base: a, members: bits }
    }

    pub fn empty(cat: &FinCategory, a: Obj) -> Sieve {
        Sieve { base: a, members: FixedBitSet::with_capacity(cat.num_morphisms()) }
    }

    pub fn base(&self) -> Obj {
        self.base
    }

    pub fn contains(&self, phi: Mor) -> bool {
        self.members.contains(phi)
    }

    pub fn members(&self) -> impl Iterator<Item = Mor> + '_ {
        self.members.ones()
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    /// `P · φ = {ψ | φ ∘ ψ ∈ P}` for `φ: b → a`, a sieve on `b`.
    pub fn restrict(&self, cat: &FinCategory, phi: Mor) -> Result<Sieve, SiteError> {
        if cat.cod(phi) != self.base {
            return Err(SiteError::CodomainMismatch {
                morphism: cat.morphism(phi).name.clone(),
                object: cat.object_name(self.base).to_string(),
            });
        }
        let b = cat.dom(phi);
        let mut bits = FixedBitSet::with_capacity(cat.num_morphisms());
        for &psi in cat.arrows_into(b) {
            if self.members.contains(cat.compose(phi, psi)) {
                bits.insert(psi);
            }
        }
        Ok(Sieve { base: b, members: bits })
    }

    /// Member names, in morphism index order.
    pub fn names(&self, cat: &FinCategory) -> Vec<String> {
        self.members.ones().map(|m| cat.morphism(m).name.clone()).collect()
    }

    /// The sieve as a subobject of `y(base)`.
    pub fn to_subobject(&self, cat: &FinCategory) -> Subpresheaf {
        let ya = yoneda(cat, self.base).expect("base in range");
        Subpresheaf::from_predicate(&ya, |b, i| self.members.contains(cat.hom(b, self.base)[i]))
    }

    /// Reads a subobject of `y(a)` as a sieve.
    pub fn from_subobject(cat: &FinCategory, a: Obj, s: &Subpresheaf) -> Sieve {
        let mut bits = FixedBitSet::with_capacity(cat.num_morphisms());
        for b in cat.objects() {
            for i in s.elements(b) {
                bits.insert(cat.hom(b, a)[i]);
            }
        }
        Sieve { base: a, members: bits }
    }
}

/// `restrict_sieve(p, φ) = p · φ`.
pub fn restrict_sieve(cat: &FinCategory, p: &Sieve, phi: Mor) -> Result<Sieve, SiteError> {
    p.restrict(cat, phi)
}

/// The presheaf of sieves. `Ω(a)` lists every sieve on `a`, ordered by
/// size and then by member indices, so the empty sieve comes first and the
/// maximal sieve last.
#[derive(Clone, Debug)]
pub struct Omega {
    pub presheaf: Presheaf,
    sieves: Vec<Vec<Sieve>>,
    lookup: HashMap<Sieve, usize>,
}

impl Omega {
    pub fn sieves(&self, a: Obj) -> &[Sieve] {
        &self.sieves[a]
    }

    pub fn sieve(&self, a: Obj, idx: usize) -> &Sieve {
        &self.sieves[a][idx]
    }

    pub fn index_of(&self, s: &Sieve) -> Option<usize> {
        self.lookup.get(s).copied()
    }

    pub fn cat(&self) -> &FinCategory {
        self.presheaf.cat()
    }

    /// The element `M_a` of `Ω(a)`.
    pub fn maximal_index(&self, a: Obj) -> usize {
        self.sieves[a].len() - 1
    }

    /// `⊤: 1 → Ω`, picking maximal sieves.
    pub fn top_map(&self) -> NatTrans {
        let one = Presheaf::terminal(self.cat());
        let components = self.cat().objects().map(|a| vec![self.maximal_index(a)]).collect();
        NatTrans::new(&one, &self.presheaf, components).expect("maximal sieves are stable")
    }

    /// The membership relation `∋ ⊆ Ω × 1`: `(S, ∗)` at `a` iff `id_a ∈ S`.
    pub fn truth(&self) -> Subpresheaf {
        let cat = self.cat();
        let one = Presheaf::terminal(cat);
        let prod = crate::fincat::binary_product(&self.presheaf, &one);
        Subpresheaf::from_predicate(&prod.presheaf, |a, idx| self.sieves[a][prod.decode(a, idx)[0]].contains(cat.identity(a)))
    }
}

/// Enumerates all sieves on every object and the restriction action.
pub fn build_omega(cat: &FinCategory) -> Omega {
    let sieves: Vec<Vec<Sieve>> = cat
        .objects()
        .map(|a| {
            let ya = yoneda(cat, a).expect("object in range");
            let mut out = Vec::new();
            for_each_subobject(&ya, |s| {
                out.push(Sieve::from_subobject(cat, a, &s));
                true
            });
            out.sort_by_key(|p| (p.len(), p.members().collect::<Vec<_>>()));
            out
        })
        .collect();
    let sizes = sieves.iter().map(Vec::len).collect();
    let action = (0..cat.num_morphisms())
        .map(|phi| {
            let (b, a) = (cat.dom(phi), cat.cod(phi));
            sieves[a]
                .iter()
                .map(|p| {
                    let r = p.restrict(cat, phi).expect("codomain matches");
                    sieves[b].iter().position(|s| *s == r).expect("restriction is a sieve")
                })
                .collect()
        })
        .collect();
    let presheaf = Presheaf::new(cat, sizes, action).expect("restriction is functorial");
    let lookup = sieves.iter().flat_map(|v| v.iter().enumerate().map(|(i, s)| (s.clone(), i))).collect();
    Omega { presheaf, sieves, lookup }
}

/// A family of covering sieves per object. Stored as a selection of
/// elements of `Ω`; it is a subpresheaf of `Ω` exactly when (L) holds.
#[derive(Clone)]
pub struct Coverage {
    omega: Arc<Omega>,
    covering: Vec<FixedBitSet>,
}

impl PartialEq for Coverage {
    fn eq(&self, other: &Self) -> bool {
        self.covering == other.covering && self.omega.presheaf == other.omega.presheaf
    }
}

impl Eq for Coverage {}

impl fmt::Debug for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sets: Vec<Vec<_>> = self.covering.iter().map(|b| b.ones().collect()).collect();
        f.debug_struct("Coverage").field("covering", &sets).finish()
    }
}

impl Coverage {
    /// Coverage from explicit sieve lists. Every object not mentioned gets
    /// no covering sieves.
    pub fn from_sieves(omega: &Arc<Omega>, sieves: &[Sieve]) -> Coverage {
        let mut covering = empty_selection(omega);
        for s in sieves {
            let i = omega.index_of(s).expect("sieve of this category");
            covering[s.base].insert(i);
        }
        Coverage { omega: omega.clone(), covering }
    }

    pub fn from_selection(omega: &Arc<Omega>, covering: Vec<FixedBitSet>) -> Coverage {
        Coverage { omega: omega.clone(), covering }
    }

    /// Only maximal sieves cover.
    pub fn trivial(omega: &Arc<Omega>) -> Coverage {
        let mut covering = empty_selection(omega);
        for a in omega.cat().objects() {
            covering[a].insert(omega.maximal_index(a));
        }
        Coverage { omega: omega.clone(), covering }
    }

    /// Every sieve covers, the empty one included.
    pub fn all(omega: &Arc<Omega>) -> Coverage {
        let mut covering = empty_selection(omega);
        for a in omega.cat().objects() {
            covering[a].insert_range(..);
        }
        Coverage { omega: omega.clone(), covering }
    }

    pub fn omega(&self) -> &Arc<Omega> {
        &self.omega
    }

    pub fn cat(&self) -> &FinCategory {
        self.omega.cat()
    }

    pub fn covers(&self, s: &Sieve) -> bool {
        self.omega.index_of(s).is_some_and(|i| self.covering[s.base].contains(i))
    }

    pub fn covers_index(&self, a: Obj, idx: usize) -> bool {
        self.covering[a].contains(idx)
    }

    /// `J(a)`, in the order of `Ω(a)`.
    pub fn covering_sieves(&self, a: Obj) -> impl Iterator<Item = &Sieve> + '_ {
        self.covering[a].ones().map(move |i| &self.omega.sieves[a][i])
    }

    pub fn selection(&self) -> &[FixedBitSet] {
        &self.covering
    }

    /// `J` as a subobject of `Ω`, if (L) holds.
    pub fn as_subobject(&self) -> Result<Subpresheaf, LogicError> {
        Subpresheaf::from_bits(&self.omega.presheaf, self.covering.clone())
    }

    /// Pointwise intersection.
    pub fn meet(&self, other: &Coverage) -> Coverage {
        let covering = self
            .covering
            .iter()
            .zip(&other.covering)
            .map(|(a, b)| {
                let mut c = a.clone();
                c.intersect_with(b);
                c
            })
            .collect();
        Coverage { omega: self.omega.clone(), covering }
    }
}

fn empty_selection(omega: &Omega) -> Vec<FixedBitSet> {
    omega.cat().objects().map(|a| FixedBitSet::with_capacity(omega.sieves(a).len())).collect()
}

/// `J(a) = {S | ¬¬S = M_a}`, negation taken in `Sub(y(a))`.
pub fn double_negation_coverage(omega: &Arc<Omega>) -> Coverage {
    let cat = omega.cat();
    let covering = cat
        .objects()
        .map(|a| {
            let mut bits = FixedBitSet::with_capacity(omega.sieves(a).len());
            for (i, s) in omega.sieves(a).iter().enumerate() {
                if s.to_subobject(cat).negate().negate().is_top() {
                    bits.insert(i);
                }
            }
            bits
        })
        .collect();
    Coverage { omega: omega.clone(), covering }
}

/// A failed coverage condition. Sieves are given by member names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "condition")]
pub enum CoverageViolation {
    /// The maximal sieve on `object` does not cover.
    #[serde(rename = "M")]
    Maximality { object: String },
    /// `sieve` covers `object` but its restriction along `morphism` does not.
    #[serde(rename = "L")]
    Locality { object: String, sieve: Vec<String>, morphism: String, restricted: Vec<String> },
    /// `q` is locally covering along the covering sieve `p` but does not cover.
    #[serde(rename = "T")]
    Transitivity { object: String, p: Vec<String>, q: Vec<String> },
    /// The sentence `J(⊤)` fails at `object`.
    #[serde(rename = "C1")]
    TopCovers { object: String },
    /// The body of the second sentence fails at `object` for `(p, q)`.
    #[serde(rename = "C2")]
    Idempotence { object: String, p: Vec<String>, q: Vec<String> },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub violations: Vec<CoverageViolation>,
}

impl CoverageReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn locality_violations(j: &Coverage) -> Vec<CoverageViolation> {
    let cat = j.cat();
    let omega = j.omega();
    let mut out = Vec::new();
    for a in cat.objects() {
        for i in j.covering[a].ones() {
            for &phi in cat.arrows_into(a) {
                let r = omega.presheaf.act(phi, i);
                if !j.covering[cat.dom(phi)].contains(r) {
                    out.push(CoverageViolation::Locality {
                        object: cat.object_name(a).to_string(),
                        sieve: omega.sieve(a, i).names(cat),
                        morphism: cat.morphism(phi).name.clone(),
                        restricted: omega.sieve(cat.dom(phi), r).names(cat),
                    });
                }
            }
        }
    }
    out
}

/// Checks (M), (L) and (T) directly.
pub fn grothendieck_check(j: &Coverage) -> CoverageReport {
    let cat = j.cat();
    let omega = j.omega();
    let mut violations = Vec::new();
    for a in cat.objects() {
        if !j.covering[a].contains(omega.maximal_index(a)) {
            violations.push(CoverageViolation::Maximality { object: cat.object_name(a).to_string() });
        }
    }
    violations.extend(locality_violations(j));
    for a in cat.objects() {
        for p in j.covering[a].ones() {
            for q in 0..omega.sieves(a).len() {
                if j.covering[a].contains(q) {
                    continue;
                }
                let locally = omega
                    .sieve(a, p)
                    .members()
                    .all(|phi| j.covering[cat.dom(phi)].contains(omega.presheaf.act(phi, q)));
                if locally {
                    violations.push(CoverageViolation::Transitivity {
                        object: cat.object_name(a).to_string(),
                        p: omega.sieve(a, p).names(cat),
                        q: omega.sieve(a, q).names(cat),
                    });
                }
            }
        }
    }
    CoverageReport { violations }
}

/// The two defining sentences of a Lawvere-Tierney coverage
/// `(∀z: 1) J(⊤ z)` and
/// `(∀p q: Ω)[((∃z: 1) z ∈ p ⇒ J(q)) ⇒ (J(p) ⇒ J(q))]`, with `J` as an atom.
pub fn lt_sentences(omega: &Omega, j: &Subpresheaf) -> (Formula, Formula) {
    let one = Presheaf::terminal(omega.cat());
    let o = &omega.presheaf;
    let c1 = Formula::forall(Binder::new("z", &one), Formula::Atom(j.clone(), vec![Term::app(&omega.top_map(), Term::var("z"))]));
    let holds = |v: &str| {
        Formula::exists(Binder::new("z", &one), Formula::member(&omega.truth(), Term::var("z"), Term::var(v)))
    };
    let jv = |v: &str| Formula::Atom(j.clone(), vec![Term::var(v)]);
    let body = holds("p").implies(jv("q")).implies(jv("p").implies(jv("q")));
    let c2 = Formula::forall(Binder::new("p", o), Formula::forall(Binder::new("q", o), body));
    (c1, c2)
}

/// Checks (L), then (C1) and (C2) through the internal-language evaluator.
/// When (L) fails `J` is not a subobject of `Ω` and only the locality
/// violations are reported.
pub fn check_lt_coverage(j: &Coverage) -> CoverageReport {
    let violations = locality_violations(j);
    if !violations.is_empty() {
        return CoverageReport { violations };
    }
    let cat = j.cat();
    let omega = j.omega();
    let jsub = j.as_subobject().expect("locality holds");
    let (c1, c2) = lt_sentences(omega, &jsub);
    let mut violations = Vec::new();
    let v1 = evaluate(cat, &[], &c1).expect("well-sorted");
    for a in cat.objects() {
        if !v1.contains(a, 0) {
            violations.push(CoverageViolation::TopCovers { object: cat.object_name(a).to_string() });
        }
    }
    if !is_valid(cat, &c2).expect("well-sorted") {
        // read the failing pairs off the body in context (p, q)
        let Formula::Forall(_, inner) = &c2 else { unreachable!() };
        let Formula::Forall(_, body) = inner.as_ref() else { unreachable!() };
        let vars = [("p", omega.presheaf.clone()), ("q", omega.presheaf.clone())];
        let sub = evaluate(cat, &vars, body).expect("well-sorted");
        let n = |a: Obj| omega.sieves(a).len();
        for a in cat.objects() {
            for idx in 0..n(a) * n(a) {
                if !sub.contains(a, idx) {
                    violations.push(CoverageViolation::Idempotence {
                        object: cat.object_name(a).to_string(),
                        p: omega.sieve(a, idx / n(a)).names(cat),
                        q: omega.sieve(a, idx % n(a)).names(cat),
                    });
                }
            }
        }
    }
    CoverageReport { violations }
}

#[derive(Clone, Debug)]
pub struct CoverageEnumeration {
    /// Subpresheaves of `Ω` visited.
    pub candidates: usize,
    /// Candidates passing (C1)(C2), in enumeration order.
    pub lawvere_tierney: Vec<Coverage>,
    /// Candidates passing (M)(L)(T), in enumeration order.
    pub grothendieck: Vec<Coverage>,
}

/// Runs both checks over every subpresheaf of `Ω`, failing if there are
/// more than `cap` of them.
pub fn enumerate_coverages(omega: &Arc<Omega>, cap: usize) -> Result<CoverageEnumeration, LogicError> {
    let mut out = CoverageEnumeration { candidates: 0, lawvere_tierney: Vec::new(), grothendieck: Vec::new() };
    let mut overflow = false;
    for_each_subobject(&omega.presheaf, |s| {
        if out.candidates >= cap {
            overflow = true;
            return false;
        }
        out.candidates += 1;
        let j = Coverage::from_selection(omega, s.stages().to_vec());
        if check_lt_coverage(&j).is_valid() {
            out.lawvere_tierney.push(j.clone());
        }
        if grothendieck_check(&j).is_valid() {
            out.grothendieck.push(j);
        }
        true
    });
    if overflow {
        return Err(LogicError::CapExceeded { cap });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::enumerate::{idempotent_monoid, sierpinski, terminal_category};

    fn sier() -> (FinCategory, Arc<Omega>) {
        let c = sierpinski();
        let o = Arc::new(build_omega(&c));
        (c, o)
    }

    #[test]
    fn omega_sizes() {
        let (_, o) = sier();
        assert_eq!(o.presheaf.sizes(), &[2, 3]);
        let t = build_omega(&terminal_category());
        assert_eq!(t.presheaf.sizes(), &[2]);
        let m = build_omega(&idempotent_monoid());
        assert_eq!(m.presheaf.sizes(), &[3]);
    }

    #[test]
    fn restriction_examples() {
        let (c, _) = sier();
        let u = c.morphism_index("u").unwrap();
        let just_u = Sieve::new(&c, 1, &[u]).unwrap();
        assert_eq!(just_u.restrict(&c, u).unwrap(), Sieve::maximal(&c, 0));
        assert_eq!(Sieve::empty(&c, 1).restrict(&c, u).unwrap(), Sieve::empty(&c, 0));
        assert_eq!(Sieve::maximal(&c, 1).restrict(&c, u).unwrap(), Sieve::maximal(&c, 0));
        assert!(matches!(just_u.restrict(&c, c.identity(0)), Err(SiteError::CodomainMismatch { .. })));
    }

    #[test]
    fn unclosed_sieve_is_rejected() {
        let c = idempotent_monoid();
        // {id} alone is not closed: id ∘ e = e is missing
        assert!(matches!(Sieve::new(&c, 0, &[0]), Err(SiteError::NotClosed { .. })));
    }

    #[test]
    fn builtin_coverages() {
        let (c, o) = sier();
        for j in [Coverage::trivial(&o), Coverage::all(&o), double_negation_coverage(&o)] {
            assert!(check_lt_coverage(&j).is_valid());
            assert!(grothendieck_check(&j).is_valid());
        }
        let u = c.morphism_index("u").unwrap();
        let dense = double_negation_coverage(&o);
        assert!(dense.covers(&Sieve::new(&c, 1, &[u]).unwrap()));
        assert!(!dense.covers(&Sieve::empty(&c, 1)));
        let t = terminal_category();
        let ot = Arc::new(build_omega(&t));
        let dt = double_negation_coverage(&ot);
        assert_eq!(dt.covering_sieves(0).count(), 1);
    }

    #[test]
    fn missing_maximal_sieve() {
        let (c, o) = sier();
        let u = c.morphism_index("u").unwrap();
        let j = Coverage::from_sieves(&o, &[Sieve::new(&c, 1, &[u]).unwrap(), Sieve::maximal(&c, 0)]);
        let rep = grothendieck_check(&j);
        assert!(rep.violations.contains(&CoverageViolation::Maximality { object: "1".into() }));
        let lt = check_lt_coverage(&j);
        assert!(lt.violations.contains(&CoverageViolation::TopCovers { object: "1".into() }));
    }

    #[test]
    fn correspondence_on_fixtures() {
        for c in [terminal_category(), sierpinski(), idempotent_monoid()] {
            let o = Arc::new(build_omega(&c));
            let e = enumerate_coverages(&o, 4096).unwrap();
            assert_eq!(e.lawvere_tierney, e.grothendieck);
            assert!(!e.lawvere_tierney.is_empty());
        }
    }

    #[test]
    fn valid_coverages_closed_under_meet() {
        let c = sierpinski();
        let o = Arc::new(build_omega(&c));
        let e = enumerate_coverages(&o, 4096).unwrap();
        for j in &e.grothendieck {
            for k in &e.grothendieck {
                assert!(grothendieck_check(&j.meet(k)).is_valid());
            }
        }
    }
}

//! Power objects, classifying maps, and the quotient `P_J(X)` of a power
//! object by equality of closures.
//!
//! `P(X)(a)` is the set of subpresheaves of `y(a) × X`; an element of
//! `y(a)(b)` is a morphism `ψ: b → a`, so a relation at stage `a` is a set
//! of pairs `(ψ, x)` closed under restriction. `P_J(X)(a)` keeps only the
//! closed relations, which serve as canonical representatives of the
//! classes of the quotient.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::closure::ClosureContext;
use crate::fincat::{binary_product, yoneda, FinCatError, FinCategory, NatTrans, Obj, Presheaf, Product};
use crate::logic::{for_each_subobject, is_valid, pullback_sub, Binder, Formula, LogicError, Subpresheaf, Term};

/// Default bound on `|y(a) × X|` at each stage.
pub const DEFAULT_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PowerError {
    #[error("power object too large at stage {stage}: y({stage}) × X has {size} elements, cap is {cap}")]
    CapExceeded { stage: String, size: usize, cap: usize },
    #[error("admitted relations are not stable under restriction along {morphism}")]
    FamilyNotStable { morphism: String },
    #[error("family over stage {stage}, element {element} is not admitted by the power object")]
    NotAdmitted { stage: String, element: usize },
    #[error("subobject is not closed: element {element} of stage {stage} lies in its closure")]
    NotClosed { stage: String, element: usize },
    #[error("presheaves live on different categories or have the wrong shape")]
    Mismatch,
    #[error(transparent)]
    FinCat(#[from] FinCatError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// The power object of `X`, possibly restricted to admitted relations.
#[derive(Clone, Debug)]
pub struct PowerObject {
    pub base: Presheaf,
    pub presheaf: Presheaf,
    /// `∋ ⊆ P(X) × X`.
    pub membership: Subpresheaf,
    /// `y(a) × X` for each stage.
    stages: Vec<Product>,
    relations: Vec<Vec<Subpresheaf>>,
    lookup: Vec<HashMap<Vec<FixedBitSet>, usize>>,
}

fn check_cap(x: &Presheaf, cap: usize) -> Result<Vec<Product>, PowerError> {
    let cat = x.cat();
    cat.objects()
        .map(|a| {
            let size: usize = cat.objects().map(|c| cat.hom(c, a).len() * x.size(c)).sum();
            if size > cap {
                return Err(PowerError::CapExceeded { stage: cat.object_name(a).to_string(), size, cap });
            }
            Ok(binary_product(&yoneda(cat, a)?, x))
        })
        .collect()
}

/// The full power object of `x`.
pub fn power_object(x: &Presheaf, cap: usize) -> Result<PowerObject, PowerError> {
    power_object_filtered(x, cap, &|_, _| true)
}

/// The power object whose carrier at `a` holds only the relations `R` with
/// `admit(a, R)`. Admitted relations must be stable under restriction.
pub fn power_object_filtered(
    x: &Presheaf,
    cap: usize,
    admit: &dyn Fn(Obj, &Subpresheaf) -> bool,
) -> Result<PowerObject, PowerError> {
    let cat = x.cat();
    let stages = check_cap(x, cap)?;
    let relations: Vec<Vec<Subpresheaf>> = cat
        .objects()
        .map(|a| {
            let mut out = Vec::new();
            for_each_subobject(&stages[a].presheaf, |r| {
                if admit(a, &r) {
                    out.push(r);
                }
                true
            });
            out
        })
        .collect();
    build(x, stages, relations)
}

fn build(x: &Presheaf, stages: Vec<Product>, relations: Vec<Vec<Subpresheaf>>) -> Result<PowerObject, PowerError> {
    let cat = x.cat();
    let lookup: Vec<HashMap<Vec<FixedBitSet>, usize>> = relations
        .iter()
        .map(|rs| rs.iter().enumerate().map(|(i, r)| (r.stages().to_vec(), i)).collect())
        .collect();
    let mut action = Vec::with_capacity(cat.num_morphisms());
    for phi in 0..cat.num_morphisms() {
        let (b, a) = (cat.dom(phi), cat.cod(phi));
        let mut table = Vec::with_capacity(relations[a].len());
        for r in &relations[a] {
            let s = restrict_relation(cat, &stages, r, phi);
            match lookup[b].get(s.stages()) {
                Some(&i) => table.push(i),
                None => return Err(PowerError::FamilyNotStable { morphism: cat.morphism(phi).name.clone() }),
            }
        }
        action.push(table);
    }
    let sizes = relations.iter().map(Vec::len).collect();
    let presheaf = Presheaf::new(cat, sizes, action)?;
    let prod = binary_product(&presheaf, x);
    let membership = Subpresheaf::from_predicate(&prod.presheaf, |a, idx| {
        let co = prod.decode(a, idx);
        relations[a][co[0]].contains(a, stages[a].encode(a, &[id_index(cat, a), co[1]]))
    });
    Ok(PowerObject { base: x.clone(), presheaf, membership, stages, relations, lookup })
}

/// Position of `id_a` in `hom(a, a)`.
fn id_index(cat: &FinCategory, a: Obj) -> usize {
    cat.hom(a, a).iter().position(|&m| m == cat.identity(a)).expect("identity in hom(a, a)")
}

/// `R · φ = {(ψ, x) | (φ ∘ ψ, x) ∈ R}` for `φ: b → a`.
fn restrict_relation(cat: &FinCategory, stages: &[Product], r: &Subpresheaf, phi: usize) -> Subpresheaf {
    let (b, a) = (cat.dom(phi), cat.cod(phi));
    let pb = &stages[b];
    Subpresheaf::from_predicate(&pb.presheaf, |c, idx| {
        let co = pb.decode(c, idx);
        let psi = cat.hom(c, b)[co[0]];
        let comp = cat.compose(phi, psi);
        let j = cat.hom(c, a).iter().position(|&m| m == comp).expect("composite in hom(c, a)");
        r.contains(c, stages[a].encode(c, &[j, co[1]]))
    })
}

impl PowerObject {
    pub fn cat(&self) -> &FinCategory {
        self.base.cat()
    }

    /// The relation named by element `idx` of `P(X)(a)`, a subobject of `y(a) × X`.
    pub fn relation(&self, a: Obj, idx: usize) -> &Subpresheaf {
        &self.relations[a][idx]
    }

    pub fn relations(&self, a: Obj) -> &[Subpresheaf] {
        &self.relations[a]
    }

    pub fn index_of(&self, a: Obj, r: &Subpresheaf) -> Option<usize> {
        self.lookup[a].get(r.stages()).copied()
    }

    /// `y(a) × X`.
    pub fn stage_product(&self, a: Obj) -> &Product {
        &self.stages[a]
    }

    /// The relation at stage `c` classifying the fiber of `s ⊆ A × X` over
    /// `el ∈ A(c)`: `{(ψ: b → c, x) | (A(ψ)(el), x) ∈ s(b)}`.
    pub fn fiber_relation(&self, s: &Subpresheaf, ax: &Product, c: Obj, el: usize) -> Subpresheaf {
        let cat = self.cat();
        let a_obj = &ax.factors[0];
        let st = &self.stages[c];
        Subpresheaf::from_predicate(&st.presheaf, |b, idx| {
            let co = st.decode(b, idx);
            let psi = cat.hom(b, c)[co[0]];
            s.contains(b, ax.encode(b, &[a_obj.act(psi, el), co[1]]))
        })
    }

    /// `χ_S: A → P(X)` for `S ⊆ A × X`.
    pub fn classify(&self, a_obj: &Presheaf, s: &Subpresheaf) -> Result<NatTrans, PowerError> {
        let ax = family_product(a_obj, &self.base, s)?;
        let cat = self.cat();
        let mut components = Vec::new();
        for c in cat.objects() {
            let mut comp = Vec::with_capacity(a_obj.size(c));
            for el in 0..a_obj.size(c) {
                let r = self.fiber_relation(s, &ax, c, el);
                let i = self.index_of(c, &r).ok_or_else(|| PowerError::NotAdmitted {
                    stage: cat.object_name(c).to_string(),
                    element: el,
                })?;
                comp.push(i);
            }
            components.push(comp);
        }
        Ok(NatTrans::new(a_obj, &self.presheaf, components)?)
    }

    /// `(g × id)^*(∋)` for `g: A → P(X)`: the family classified by `g`.
    pub fn family_of(&self, g: &NatTrans) -> Result<Subpresheaf, PowerError> {
        if g.target() != &self.presheaf {
            return Err(PowerError::Mismatch);
        }
        let pull = crate::fincat::product_map(g, &NatTrans::identity(&self.base));
        Ok(pullback_sub(&pull, &self.membership)?)
    }

    /// Inverse image `f^*: P(Y) → P(X)` along `f: X → Y`, where `self` is `P(X)`
    /// and `py` is `P(Y)`.
    pub fn inverse_image(&self, py: &PowerObject, f: &NatTrans) -> Result<NatTrans, PowerError> {
        if f.source() != &self.base || f.target() != &py.base {
            return Err(PowerError::Mismatch);
        }
        let cat = self.cat();
        let components = cat
            .objects()
            .map(|a| {
                let along = crate::fincat::product_map(&NatTrans::identity(&yoneda(cat, a)?), f);
                py.relations[a]
                    .iter()
                    .map(|t| {
                        let s = pullback_sub(&along, t)?;
                        self.index_of(a, &s).ok_or(PowerError::NotAdmitted { stage: cat.object_name(a).into(), element: 0 })
                    })
                    .collect::<Result<Vec<_>, PowerError>>()
            })
            .collect::<Result<Vec<_>, PowerError>>()?;
        Ok(NatTrans::new(&py.presheaf, &self.presheaf, components)?)
    }

    /// Direct image `f_!: P(X) → P(Y)` along `f: X → Y`.
    pub fn direct_image(&self, py: &PowerObject, f: &NatTrans) -> Result<NatTrans, PowerError> {
        if f.source() != &self.base || f.target() != &py.base {
            return Err(PowerError::Mismatch);
        }
        let cat = self.cat();
        let components = cat
            .objects()
            .map(|a| {
                let along = crate::fincat::product_map(&NatTrans::identity(&yoneda(cat, a)?), f);
                self.relations[a]
                    .iter()
                    .map(|s| {
                        let t = crate::logic::exists_along(&along, s)?;
                        py.index_of(a, &t).ok_or(PowerError::NotAdmitted { stage: cat.object_name(a).into(), element: 0 })
                    })
                    .collect::<Result<Vec<_>, PowerError>>()
            })
            .collect::<Result<Vec<_>, PowerError>>()?;
        Ok(NatTrans::new(&self.presheaf, &py.presheaf, components)?)
    }
}

/// `A × X`, checking that `s` is a family over `A` of subobjects of `X`.
pub(crate) fn family_product(a: &Presheaf, x: &Presheaf, s: &Subpresheaf) -> Result<Product, PowerError> {
    let ax = binary_product(a, x);
    if s.parent() != &ax.presheaf {
        return Err(PowerError::Mismatch);
    }
    Ok(ax)
}

/// `P_J(X)`: the closed relations, with the quotient `R ↦ C(R)` out of
/// `P(X)` and the inclusion of the representatives back into it.
#[derive(Clone, Debug)]
pub struct PJObject {
    pub power: PowerObject,
    pub presheaf: Presheaf,
    /// Closed elements of `P(X)` as a subobject.
    pub closed: Subpresheaf,
    pub inclusion: NatTrans,
    pub quotient: NatTrans,
    /// `∋_J ⊆ P_J(X) × X`.
    pub membership: Subpresheaf,
    /// `positions[a][i]`: index in `P_J(X)(a)` of closed relation `i` of `P(X)(a)`.
    positions: Vec<Vec<Option<usize>>>,
}

pub fn pj_object(ctx: &ClosureContext, x: &Presheaf, cap: usize) -> Result<PJObject, PowerError> {
    pj_from_power(ctx, power_object(x, cap)?)
}

pub fn pj_from_power(ctx: &ClosureContext, power: PowerObject) -> Result<PJObject, PowerError> {
    let cat = power.cat().clone();
    let closed = Subpresheaf::from_predicate(&power.presheaf, |a, i| ctx.is_closed(power.relation(a, i)));
    let (presheaf, inclusion) = closed.to_presheaf();
    let positions: Vec<Vec<Option<usize>>> = cat
        .objects()
        .map(|a| {
            let mut pos = vec![None; power.presheaf.size(a)];
            for (k, i) in closed.elements(a).enumerate() {
                pos[i] = Some(k);
            }
            pos
        })
        .collect();
    let components = cat
        .objects()
        .map(|a| {
            power
                .relations(a)
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let c = ctx.close(r);
                    power
                        .index_of(a, &c)
                        .and_then(|j| positions[a][j])
                        .ok_or(PowerError::NotAdmitted { stage: cat.object_name(a).to_string(), element: i })
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let quotient = NatTrans::new(&power.presheaf, &presheaf, components)?;
    let along = crate::fincat::product_map(&inclusion, &NatTrans::identity(&power.base));
    let membership = pullback_sub(&along, &power.membership)?;
    Ok(PJObject { power, presheaf, closed, inclusion, quotient, membership, positions })
}

impl PJObject {
    pub fn base(&self) -> &Presheaf {
        &self.power.base
    }

    /// The closed relation named by element `idx` of `P_J(X)(a)`.
    pub fn relation(&self, a: Obj, idx: usize) -> &Subpresheaf {
        self.power.relation(a, self.inclusion.apply(a, idx))
    }

    /// Index in `P_J(X)(a)` of a closed relation.
    pub fn index_of(&self, a: Obj, r: &Subpresheaf) -> Option<usize> {
        self.positions[a][self.power.index_of(a, r)?]
    }

    /// `φ_S: A → P_J(X)` for a closed family `S ⊆ A × X`.
    pub fn classify_closed(&self, ctx: &ClosureContext, a_obj: &Presheaf, s: &Subpresheaf) -> Result<NatTrans, PowerError> {
        family_product(a_obj, self.base(), s)?;
        let cs = ctx.close(s);
        if let Some(&(a, el)) = s.complement_elements().iter().find(|&&(a, el)| cs.contains(a, el)) {
            return Err(PowerError::NotClosed { stage: self.presheaf.cat().object_name(a).to_string(), element: el });
        }
        let chi = self.power.classify(a_obj, s)?;
        let components = chi
            .components()
            .iter()
            .enumerate()
            .map(|(a, comp)| comp.iter().map(|&i| self.positions[a][i].expect("fibers of a closed family are closed")).collect())
            .collect();
        Ok(NatTrans::new(a_obj, &self.presheaf, components)?)
    }

    /// `(g × id)^*(∋_J)` for `g: A → P_J(X)`.
    pub fn family_of(&self, g: &NatTrans) -> Result<Subpresheaf, PowerError> {
        if g.target() != &self.presheaf {
            return Err(PowerError::Mismatch);
        }
        let pull = crate::fincat::product_map(g, &NatTrans::identity(self.base()));
        Ok(pullback_sub(&pull, &self.membership)?)
    }
}

fn fiber_sentence(f: &NatTrans, px: &PowerObject, inbar: &Subpresheaf, closed_small: bool) -> Formula {
    let (x, a) = (f.source(), f.target());
    let fx_is_a = || Formula::Eq(Term::app(f, Term::var("x")), Term::var("a"));
    let inbar_s = Formula::member(inbar, Term::var("x"), Term::var("s"));
    let body = if closed_small {
        fx_is_a().iff(inbar_s)
    } else {
        let in_s = Formula::member(&px.membership, Term::var("x"), Term::var("s"));
        in_s.implies(fx_is_a()).and(fx_is_a().implies(inbar_s))
    };
    Formula::forall(
        Binder::new("a", a),
        Formula::exists(Binder::new("s", &px.presheaf), Formula::forall(Binder::new("x", x), body)),
    )
}

/// `(∀a: A)(∃s: P X) s ≈ f⁻¹(a)` where `s ≈ f⁻¹(a)` is
/// `(∀x: X)[(x ∈ s ⇒ f x = a) ∧ (f x = a ⇒ x ∈̄ s)]`.
pub fn locally_small_sentence(ctx: &ClosureContext, f: &NatTrans, px: &PowerObject) -> Formula {
    fiber_sentence(f, px, &ctx.close(&px.membership), false)
}

/// Whether `f` is locally small, decided by evaluating
/// [`locally_small_sentence`] against the supplied power object of `dom f`.
pub fn is_locally_small_in(ctx: &ClosureContext, f: &NatTrans, px: &PowerObject) -> Result<bool, PowerError> {
    if px.base != *f.source() {
        return Err(PowerError::Mismatch);
    }
    Ok(is_valid(f.cat(), &locally_small_sentence(ctx, f, px))?)
}

pub fn is_locally_small(ctx: &ClosureContext, f: &NatTrans, cap: usize) -> Result<bool, PowerError> {
    is_locally_small_in(ctx, f, &power_object(f.source(), cap)?)
}

/// Whether every fiber of `f` is the closure of a small subobject:
/// `(∀a: A)(∃s: P X)(∀x: X)(f x = a ⇔ x ∈̄ s)`.
pub fn is_closed_small_in(ctx: &ClosureContext, f: &NatTrans, px: &PowerObject) -> Result<bool, PowerError> {
    if px.base != *f.source() {
        return Err(PowerError::Mismatch);
    }
    Ok(is_valid(f.cat(), &fiber_sentence(f, px, &ctx.close(&px.membership), true))?)
}

pub fn is_closed_small(ctx: &ClosureContext, f: &NatTrans, cap: usize) -> Result<bool, PowerError> {
    is_closed_small_in(ctx, f, &power_object(f.source(), cap)?)
}

/// A witness for the diagrammatic form of local smallness of `f: X → A`:
/// an epi `h: B ↠ A` and a family `T ⊆ B × X` inside `B ×_A X` and dense
/// there, with `T → B` admitted.
#[derive(Clone, Debug)]
pub struct LocalSmallnessWitness {
    pub h: NatTrans,
    pub family: Subpresheaf,
}

/// Searches `B` among `candidates` and `h` among the epis `B → A`, taking
/// for `T` dense subobjects of `B ×_A X` (inside `B × X`) admitted by
/// `admit`. Larger `T` are tried first.
pub fn find_local_smallness_witness(
    ctx: &ClosureContext,
    f: &NatTrans,
    candidates: &[Presheaf],
    admit: &dyn Fn(&NatTrans) -> bool,
) -> Option<LocalSmallnessWitness> {
    let (x, a) = (f.source(), f.target());
    for b in candidates {
        for h in crate::fincat::homs(b, a) {
            if !h.is_epi() {
                continue;
            }
            let bx = binary_product(b, x);
            let fiber = Subpresheaf::from_predicate(&bx.presheaf, |c, idx| {
                let co = bx.decode(c, idx);
                h.apply(c, co[0]) == f.apply(c, co[1])
            });
            let (fp, incl) = fiber.to_presheaf();
            let mut subs = Vec::new();
            for_each_subobject(&fp, |t| {
                subs.push(t);
                true
            });
            subs.sort_by_key(|t| std::cmp::Reverse(t.stages().iter().map(|s| s.count_ones(..)).sum::<usize>()));
            for t in subs {
                if !ctx.is_dense_mono(&t) {
                    continue;
                }
                let family = crate::logic::exists_along(&incl, &t).expect("same parent");
                let (_, ti) = family.to_presheaf();
                let to_b = bx.projections[0].after(&ti).expect("composable");
                if admit(&to_b) {
                    return Some(LocalSmallnessWitness { h, family });
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::builtin_context;
    use crate::fincat::enumerate::{sierpinski, sierpinski_collapse, terminal_category};
    use crate::fincat::{are_isomorphic, find_iso, homs};
    use crate::logic::all_subobjects;
    use crate::site::build_omega;

    #[test]
    fn initial_has_singleton_power() {
        let c = sierpinski();
        let p = power_object(&Presheaf::initial(&c), DEFAULT_CAP).unwrap();
        assert_eq!(p.presheaf.sizes(), &[1, 1]);
    }

    #[test]
    fn power_of_two_point_set() {
        let c = terminal_category();
        let p = power_object(&Presheaf::constant(&c, 2), DEFAULT_CAP).unwrap();
        assert_eq!(p.presheaf.sizes(), &[4]);
    }

    #[test]
    fn omega_is_power_of_one() {
        let c = sierpinski();
        let p = power_object(&Presheaf::terminal(&c), DEFAULT_CAP).unwrap();
        assert!(find_iso(&p.presheaf, &build_omega(&c).presheaf).is_some());
    }

    #[test]
    fn cap_is_enforced() {
        let c = sierpinski();
        let big = Presheaf::constant(&c, 9);
        match power_object(&big, DEFAULT_CAP) {
            Err(PowerError::CapExceeded { stage, size, .. }) => {
                assert_eq!(stage, "1");
                assert_eq!(size, 18);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn classification_round_trips() {
        let x = sierpinski_collapse();
        let a = sierpinski_collapse();
        let p = power_object(&x, DEFAULT_CAP).unwrap();
        let ax = binary_product(&a, &x);
        let subs = all_subobjects(&ax.presheaf, 1 << 16).unwrap();
        for s in &subs {
            let chi = p.classify(&a, s).unwrap();
            assert_eq!(&p.family_of(&chi).unwrap(), s);
        }
        // bijection: as many maps A → P(X) as families
        assert_eq!(homs(&a, &p.presheaf).len(), subs.len());
    }

    #[test]
    fn pj_extremes() {
        let c = sierpinski();
        let x = sierpinski_collapse();
        let triv = builtin_context(&c, "trivial").unwrap();
        let pj = pj_object(&triv, &x, DEFAULT_CAP).unwrap();
        assert!(are_isomorphic(&pj.presheaf, &pj.power.presheaf));
        let all = builtin_context(&c, "all").unwrap();
        let pj = pj_object(&all, &x, DEFAULT_CAP).unwrap();
        assert_eq!(pj.presheaf.sizes(), &[1, 1]);
    }

    #[test]
    fn pj_of_one_is_closed_sieves() {
        let c = sierpinski();
        let ctx = builtin_context(&c, "dense").unwrap();
        let pj = pj_object(&ctx, &Presheaf::terminal(&c), DEFAULT_CAP).unwrap();
        let omega = build_omega(&c);
        for a in c.objects() {
            let closed = omega.sieves(a).iter().filter(|s| ctx.is_closed(&s.to_subobject(&c))).count();
            assert_eq!(pj.presheaf.size(a), closed);
        }
    }

    #[test]
    fn everything_locally_small_with_all_maps() {
        let c = sierpinski();
        let ctx = builtin_context(&c, "dense").unwrap();
        let x = sierpinski_collapse();
        for f in homs(&x, &x) {
            assert!(is_locally_small(&ctx, &f, DEFAULT_CAP).unwrap());
        }
        let f = NatTrans::to_terminal(&x);
        assert!(is_locally_small(&ctx, &f, DEFAULT_CAP).unwrap());
        let w = find_local_smallness_witness(&ctx, &f, &[Presheaf::terminal(&c)], &|_| true);
        assert!(w.is_some());
    }
}

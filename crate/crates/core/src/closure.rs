//! The closure operator induced by a coverage, dense maps, and local
//! quasi-pullbacks.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::fincat::{binary_product, image_factorization, pullback, FinCatError, FinCategory, NatTrans, Obj, Presheaf};
use crate::logic::{LogicError, Subpresheaf};
use crate::site::{build_omega, Coverage, Omega, Sieve};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosureError {
    #[error("mono is not dense: element {element} of stage {stage} is outside the closure")]
    NotDense { stage: String, element: usize },
    #[error("map is not a monomorphism")]
    NotMono,
    #[error("square does not commute")]
    NotCommuting,
    #[error(transparent)]
    FinCat(#[from] FinCatError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// A coverage together with a memo table for closures.
pub struct ClosureContext {
    coverage: Coverage,
    memo: Mutex<HashMap<(Presheaf, Vec<FixedBitSet>), Subpresheaf>>,
}

impl ClosureContext {
    pub fn new(coverage: Coverage) -> ClosureContext {
        ClosureContext { coverage, memo: Mutex::new(HashMap::new()) }
    }

    pub fn coverage(&self) -> &Coverage {
        &self.coverage
    }

    pub fn omega(&self) -> &Arc<Omega> {
        self.coverage.omega()
    }

    pub fn cat(&self) -> &FinCategory {
        self.coverage.cat()
    }

    /// `{φ: b → a | X(φ)(x) ∈ s(b)}`, the sieve of restrictions of `x ∈ X(a)`
    /// landing in `s`.
    pub fn sieve_into(&self, s: &Subpresheaf, a: Obj, x: usize) -> Sieve {
        let cat = self.cat();
        let parent = s.parent();
        let members: Vec<_> =
            cat.arrows_into(a).iter().copied().filter(|&phi| s.contains(cat.dom(phi), parent.act(phi, x))).collect();
        Sieve::new(cat, a, &members).expect("restrictions into a subobject form a sieve")
    }

    /// `C(s)(a) = {x | sieve_into(s, a, x) ∈ J(a)}`.
    pub fn close(&self, s: &Subpresheaf) -> Subpresheaf {
        let key = (s.parent().clone(), s.stages().to_vec());
        if let Some(hit) = self.memo.lock().expect("memo lock").get(&key) {
            return hit.clone();
        }
        let out = Subpresheaf::from_predicate(s.parent(), |a, x| self.coverage.covers(&self.sieve_into(s, a, x)));
        self.memo.lock().expect("memo lock").insert(key, out.clone());
        out
    }

    /// Closure without consulting or filling the memo table.
    pub fn close_uncached(&self, s: &Subpresheaf) -> Subpresheaf {
        Subpresheaf::from_predicate(s.parent(), |a, x| self.coverage.covers(&self.sieve_into(s, a, x)))
    }

    pub fn is_closed(&self, s: &Subpresheaf) -> bool {
        self.close(s) == *s
    }

    pub fn is_dense_mono(&self, s: &Subpresheaf) -> bool {
        self.close(s).is_top()
    }

    /// A map is dense when its image is a dense subobject.
    pub fn is_dense_map(&self, f: &NatTrans) -> bool {
        self.is_dense_mono(&image_factorization(f).image)
    }
}

/// Builds a closure context for a coverage on `cat` given by name:
/// `trivial`, `dense` or `all`.
pub fn builtin_context(cat: &FinCategory, name: &str) -> Option<ClosureContext> {
    let omega = Arc::new(build_omega(cat));
    let j = match name {
        "trivial" => Coverage::trivial(&omega),
        "dense" => crate::site::double_negation_coverage(&omega),
        "all" => Coverage::all(&omega),
        _ => return None,
    };
    Some(ClosureContext::new(j))
}

/// A factorization `B ↣ B′ ↠ A` of a dense mono with small dense first leg.
#[derive(Clone, Debug)]
pub struct SmallDenseFactorization {
    /// `B′ = {(p, a) ∈ J × A | ∀φ ∈ p. A(φ)(a) ∈ B}` inside `Ω × A`.
    pub within: Subpresheaf,
    pub presheaf: Presheaf,
    /// `b ↦ (M, m(b))`.
    pub section: NatTrans,
    /// `(p, a) ↦ a`.
    pub projection: NatTrans,
}

/// Factors a dense mono `m: B ↣ A`.
pub fn small_dense_factorization(ctx: &ClosureContext, m: &NatTrans) -> Result<SmallDenseFactorization, ClosureError> {
    if !m.is_mono() {
        return Err(ClosureError::NotMono);
    }
    let img = image_factorization(m).image;
    if let Some((a, x)) = ctx.close(&img).complement_elements().first().copied() {
        return Err(ClosureError::NotDense { stage: ctx.cat().object_name(a).to_string(), element: x });
    }
    let cat = ctx.cat();
    let omega = ctx.omega();
    let a_obj = m.target();
    let prod = binary_product(&omega.presheaf, a_obj);
    let within = Subpresheaf::from_predicate(&prod.presheaf, |c, idx| {
        let co = prod.decode(c, idx);
        ctx.coverage().covers_index(c, co[0])
            && omega.sieve(c, co[0]).members().all(|phi| img.contains(cat.dom(phi), a_obj.act(phi, co[1])))
    });
    let (presheaf, incl) = within.to_presheaf();
    let projection = prod.projections[1].after(&incl)?;
    // elements of B′ keep the order of Ω × A
    let components = cat
        .objects()
        .map(|c| {
            (0..m.source().size(c))
                .map(|b| {
                    let idx = prod.encode(c, &[omega.maximal_index(c), m.apply(c, b)]);
                    within.elements(c).position(|e| e == idx).expect("⊤-section lies in B′")
                })
                .collect()
        })
        .collect();
    let section = NatTrans::new(m.source(), &presheaf, components)?;
    Ok(SmallDenseFactorization { within, presheaf, section, projection })
}

/// A commuting square
///
/// ```text
/// Y --top--> X
/// |          |
/// left     right
/// v          v
/// B --bot--> A
/// ```
#[derive(Clone, Debug)]
pub struct Square {
    pub top: NatTrans,
    pub left: NatTrans,
    pub right: NatTrans,
    pub bottom: NatTrans,
}

impl Square {
    pub fn commutes(&self) -> bool {
        match (self.right.after(&self.top), self.bottom.after(&self.left)) {
            (Ok(p), Ok(q)) => p == q,
            _ => false,
        }
    }

    /// The canonical map `Y → B ×_A X`.
    pub fn comparison(&self) -> Result<NatTrans, ClosureError> {
        if !self.commutes() {
            return Err(ClosureError::NotCommuting);
        }
        let pb = pullback(&self.bottom, &self.right)?;
        Ok(pb.mediate(&self.left, &self.top)?)
    }

    /// Pointwise quasi-pullback: the comparison map is an epimorphism.
    pub fn is_quasi_pullback(&self) -> Result<bool, ClosureError> {
        Ok(self.comparison()?.is_epi())
    }
}

/// Whether the comparison map of a commuting square is dense.
pub fn is_local_quasi_pullback(ctx: &ClosureContext, sq: &Square) -> Result<bool, ClosureError> {
    Ok(ctx.is_dense_map(&sq.comparison()?))
}

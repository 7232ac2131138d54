use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Mutex;

use super::{MapFamily, SmallMapsError};
use crate::closure::{is_local_quasi_pullback, ClosureContext, Square};
use crate::fincat::{binary_product, coproduct, image_factorization, yoneda, Coproduct, FinCategory, NatTrans, Presheaf};
use crate::logic::Subpresheaf;
use crate::powerobj::{pj_object, power_object_filtered};
use crate::sheafify::{sheafify_with_cap, Sheafification};

/// A finite coproduct in an ambient category.
#[derive(Clone, Debug)]
pub struct Sum {
    pub presheaf: Presheaf,
    pub injections: Vec<NatTrans>,
    raw: Coproduct,
    unit: Option<Sheafification>,
}

/// A power object together with its membership relation `∋ ⊆ P × X`.
#[derive(Clone, Debug)]
pub struct PowerStructure {
    pub presheaf: Presheaf,
    pub membership: Subpresheaf,
}

/// The category the axioms are read in: what counts as an epi, a
/// quasi-pullback, a coproduct, an image and a subobject there.
pub trait Ambient {
    fn name(&self) -> &'static str;
    fn cat(&self) -> &FinCategory;
    fn is_epi(&self, f: &NatTrans) -> bool;
    fn is_quasi_pullback(&self, sq: &Square) -> Result<bool, SmallMapsError>;
    /// Whether quasi-pullbacks are pointwise, so that fiber counting can
    /// rule squares out before any map search.
    fn pointwise(&self) -> bool;
    fn initial(&self) -> Result<Presheaf, SmallMapsError>;
    fn sum(&self, summands: &[Presheaf]) -> Result<Sum, SmallMapsError>;
    fn copair(&self, sum: &Sum, legs: &[NatTrans]) -> Result<NatTrans, SmallMapsError>;
    fn image(&self, f: &NatTrans) -> Presheaf;
    fn admits_subobject(&self, s: &Subpresheaf) -> bool;
    /// A power object classifying the admitted families whose projection
    /// lies in `family`.
    fn power(&self, x: &Presheaf, family: &dyn MapFamily, cap: usize) -> Result<PowerStructure, SmallMapsError>;
}

/// `f + g: X + Y → A + B` in the ambient.
pub fn coproduct_map_in(amb: &dyn Ambient, f: &NatTrans, g: &NatTrans) -> Result<NatTrans, SmallMapsError> {
    let src = amb.sum(&[f.source().clone(), g.source().clone()])?;
    let tgt = amb.sum(&[f.target().clone(), g.target().clone()])?;
    let legs = [tgt.injections[0].after(f)?, tgt.injections[1].after(g)?];
    amb.copair(&src, &legs)
}

/// Presheaves with pointwise epis and quasi-pullbacks.
pub struct Presheaves {
    cat: FinCategory,
}

impl Presheaves {
    pub fn new(cat: &FinCategory) -> Self {
        Presheaves { cat: cat.clone() }
    }
}

impl Ambient for Presheaves {
    fn name(&self) -> &'static str {
        "presheaves"
    }

    fn cat(&self) -> &FinCategory {
        &self.cat
    }

    fn is_epi(&self, f: &NatTrans) -> bool {
        f.is_epi()
    }

    fn is_quasi_pullback(&self, sq: &Square) -> Result<bool, SmallMapsError> {
        Ok(sq.is_quasi_pullback()?)
    }

    fn pointwise(&self) -> bool {
        true
    }

    fn initial(&self) -> Result<Presheaf, SmallMapsError> {
        Ok(Presheaf::initial(&self.cat))
    }

    fn sum(&self, summands: &[Presheaf]) -> Result<Sum, SmallMapsError> {
        let raw = coproduct(&self.cat, summands);
        Ok(Sum { presheaf: raw.presheaf.clone(), injections: raw.injections.clone(), raw, unit: None })
    }

    fn copair(&self, sum: &Sum, legs: &[NatTrans]) -> Result<NatTrans, SmallMapsError> {
        Ok(sum.raw.copair(legs)?)
    }

    fn image(&self, f: &NatTrans) -> Presheaf {
        image_factorization(f).presheaf
    }

    fn admits_subobject(&self, _: &Subpresheaf) -> bool {
        true
    }

    fn power(&self, x: &Presheaf, family: &dyn MapFamily, cap: usize) -> Result<PowerStructure, SmallMapsError> {
        let projections: Vec<NatTrans> = self
            .cat
            .objects()
            .map(|a| Ok(binary_product(&yoneda(&self.cat, a)?, x).projections[0].clone()))
            .collect::<Result<_, SmallMapsError>>()?;
        let failure = RefCell::new(None);
        let admit = |a: usize, r: &Subpresheaf| {
            let (_, incl) = r.to_presheaf();
            let leg = projections[a].after(&incl).expect("relation sits in y(a) × X");
            match family.contains(&leg) {
                Ok(b) => b,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    false
                }
            }
        };
        let p = power_object_filtered(x, cap, &admit)?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(PowerStructure { presheaf: p.presheaf, membership: p.membership })
    }
}

/// Sheaves for a coverage: epis are dense maps, quasi-pullbacks are local,
/// colimits and images are sheafified or closed.
pub struct Sheaves<'a> {
    ctx: &'a ClosureContext,
    cap: usize,
    sums: Mutex<HashMap<Vec<Presheaf>, Sum>>,
}

impl<'a> Sheaves<'a> {
    pub fn new(ctx: &'a ClosureContext, cap: usize) -> Self {
        Sheaves { ctx, cap, sums: Mutex::new(HashMap::new()) }
    }

    pub fn context(&self) -> &ClosureContext {
        self.ctx
    }

    pub fn sheafify(&self, x: &Presheaf) -> Result<Sheafification, SmallMapsError> {
        Ok(sheafify_with_cap(self.ctx, x, self.cap)?)
    }
}

impl Ambient for Sheaves<'_> {
    fn name(&self) -> &'static str {
        "sheaves"
    }

    fn cat(&self) -> &FinCategory {
        self.ctx.cat()
    }

    fn is_epi(&self, f: &NatTrans) -> bool {
        self.ctx.is_dense_map(f)
    }

    fn is_quasi_pullback(&self, sq: &Square) -> Result<bool, SmallMapsError> {
        Ok(is_local_quasi_pullback(self.ctx, sq)?)
    }

    fn pointwise(&self) -> bool {
        false
    }

    fn initial(&self) -> Result<Presheaf, SmallMapsError> {
        Ok(self.sheafify(&Presheaf::initial(self.ctx.cat()))?.sheaf)
    }

    fn sum(&self, summands: &[Presheaf]) -> Result<Sum, SmallMapsError> {
        if let Some(s) = self.sums.lock().expect("sum cache").get(summands) {
            return Ok(s.clone());
        }
        let raw = coproduct(self.ctx.cat(), summands);
        let sh = self.sheafify(&raw.presheaf)?;
        let injections = raw.injections.iter().map(|i| sh.unit.after(i)).collect::<Result<_, _>>()?;
        let s = Sum { presheaf: sh.sheaf.clone(), injections, raw, unit: Some(sh) };
        self.sums.lock().expect("sum cache").insert(summands.to_vec(), s.clone());
        Ok(s)
    }

    fn copair(&self, sum: &Sum, legs: &[NatTrans]) -> Result<NatTrans, SmallMapsError> {
        let raw = sum.raw.copair(legs)?;
        match &sum.unit {
            Some(sh) => Ok(sh.factor(self.ctx, &raw)?),
            None => Ok(raw),
        }
    }

    fn image(&self, f: &NatTrans) -> Presheaf {
        let im = image_factorization(f).image;
        self.ctx.close(&im).to_presheaf().0
    }

    fn admits_subobject(&self, s: &Subpresheaf) -> bool {
        self.ctx.is_closed(s)
    }

    /// `P_J(X)` with `∋_J`. It classifies every closed family, and over
    /// presheaves with all maps small every such family is locally small,
    /// so `family` is not consulted.
    fn power(&self, x: &Presheaf, _: &dyn MapFamily, cap: usize) -> Result<PowerStructure, SmallMapsError> {
        let pj = pj_object(self.ctx, x, cap)?;
        Ok(PowerStructure { presheaf: pj.presheaf, membership: pj.membership })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::builtin_context;
    use crate::fincat::enumerate::sierpinski;

    #[test]
    fn sheaf_sum_of_points_is_two_points_on_the_dense_site() {
        let c = sierpinski();
        let ctx = builtin_context(&c, "dense").unwrap();
        let sh = Sheaves::new(&ctx, 16);
        let one = Presheaf::terminal(&c);
        let s = sh.sum(&[one.clone(), one.clone()]).unwrap();
        assert_eq!(s.presheaf.sizes(), &[2, 2]);
        let codiag = sh.copair(&s, &[NatTrans::identity(&one), NatTrans::identity(&one)]).unwrap();
        assert!(codiag.is_epi());
    }

    #[test]
    fn everything_collapses_under_the_maximal_coverage() {
        let c = sierpinski();
        let ctx = builtin_context(&c, "all").unwrap();
        let sh = Sheaves::new(&ctx, 16);
        assert_eq!(sh.initial().unwrap().sizes(), &[1, 1]);
    }
}

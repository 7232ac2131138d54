use super::predicates::{amalgamate, MatchingFamily};
use super::SheafError;
use crate::closure::ClosureContext;
use crate::fincat::{diagonal, image_factorization, NatTrans, Presheaf};
use crate::logic::{pullback_sub, Subpresheaf};
use crate::powerobj::{pj_object, PJObject, DEFAULT_CAP};

/// The associated sheaf of `X` built inside `P_J(X)`.
#[derive(Clone, Debug)]
pub struct Sheafification {
    pub input: Presheaf,
    pub pj: PJObject,
    /// `σ: X → P_J(X)`, `x ↦ [{x}]`.
    pub sigma: NatTrans,
    /// `X′`, the image of `σ`.
    pub image: Subpresheaf,
    /// `a(X) = C(X′)` as a subobject of `P_J(X)`.
    pub closed_image: Subpresheaf,
    /// `a(X)` reified.
    pub sheaf: Presheaf,
    /// `a(X) ↣ P_J(X)`.
    pub inclusion: NatTrans,
    /// `η: X → a(X)`.
    pub unit: NatTrans,
}

pub fn sheafify(ctx: &ClosureContext, x: &Presheaf) -> Result<Sheafification, SheafError> {
    sheafify_with_cap(ctx, x, DEFAULT_CAP)
}

pub fn sheafify_with_cap(ctx: &ClosureContext, x: &Presheaf, cap: usize) -> Result<Sheafification, SheafError> {
    let pj = pj_object(ctx, x, cap)?;
    let singleton = pj.power.classify(x, &diagonal(x))?;
    let sigma = pj.quotient.after(&singleton)?;
    let image = image_factorization(&sigma).image;
    let closed_image = ctx.close(&image);
    let (sheaf, inclusion) = closed_image.to_presheaf();
    let cat = x.cat();
    let components = cat
        .objects()
        .map(|a| {
            (0..x.size(a))
                .map(|el| closed_image.elements(a).position(|p| p == sigma.apply(a, el)).expect("σ lands in X′"))
                .collect()
        })
        .collect();
    let unit = NatTrans::new(x, &sheaf, components)?;
    Ok(Sheafification { input: x.clone(), pj, sigma, image, closed_image, sheaf, inclusion, unit })
}

impl Sheafification {
    /// The unique `f̄: a(X) → Y` with `f̄ ∘ η = f`, for `Y` a sheaf. An
    /// element `P ∈ a(X)(a)` is glued from `f` over the covering sieve of
    /// those `φ` with `P·φ ∈ X′`.
    pub fn factor(&self, ctx: &ClosureContext, f: &NatTrans) -> Result<NatTrans, SheafError> {
        if f.source() != &self.input {
            return Err(SheafError::Mismatch("map does not start at the sheafified presheaf".into()));
        }
        let y = f.target();
        let cat = ctx.cat();
        let x = &self.input;
        let image = self.image.clone();
        let sub = pullback_sub(&self.inclusion, &image)?;
        // a chosen preimage under η for each element of X′, as seen inside a(X)
        let pre: Vec<Vec<Option<usize>>> = cat
            .objects()
            .map(|a| {
                let mut v = vec![None; self.sheaf.size(a)];
                for el in (0..x.size(a)).rev() {
                    v[self.unit.apply(a, el)] = Some(el);
                }
                v
            })
            .collect();
        let components = cat
            .objects()
            .map(|a| {
                (0..self.sheaf.size(a))
                    .map(|p| {
                        let sieve = ctx.sieve_into(&sub, a, p);
                        let values = sieve
                            .members()
                            .map(|phi| {
                                let b = cat.dom(phi);
                                let el = pre[b][self.sheaf.act(phi, p)].expect("restriction lies in X′");
                                (phi, f.apply(b, el))
                            })
                            .collect();
                        match amalgamate(y, &MatchingFamily { sieve, values }).as_slice() {
                            [v] => Ok(*v),
                            _ => Err(SheafError::NotSheaf("target".into())),
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let fbar = NatTrans::new(&self.sheaf, y, components)?;
        if fbar.after(&self.unit)? != *f {
            return Err(SheafError::NotSheaf("target".into()));
        }
        Ok(fbar)
    }
}

/// `a(f): a(X) → a(Y)`, the factorization of `η_Y ∘ f` through `η_X`.
pub fn apply_functor(
    ctx: &ClosureContext,
    ax: &Sheafification,
    ay: &Sheafification,
    f: &NatTrans,
) -> Result<NatTrans, SheafError> {
    ax.factor(ctx, &ay.unit.after(f)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::builtin_context;
    use crate::fincat::enumerate::{sierpinski, sierpinski_collapse};
    use crate::fincat::{are_isomorphic, kernel_pair};
    use crate::sheafify::is_sheaf;

    #[test]
    fn collapse_fixture_sheafifies_to_terminal() {
        let c = sierpinski();
        let ctx = builtin_context(&c, "dense").unwrap();
        let s = sheafify(&ctx, &sierpinski_collapse()).unwrap();
        assert_eq!(s.sheaf.sizes(), &[1, 1]);
        assert!(is_sheaf(&ctx, &s.sheaf));
        assert_eq!(kernel_pair(&s.unit), ctx.close(&diagonal(&s.input)));
    }

    #[test]
    fn trivial_coverage_gives_back_the_input() {
        let c = sierpinski();
        let ctx = builtin_context(&c, "trivial").unwrap();
        let x = sierpinski_collapse();
        let s = sheafify(&ctx, &x).unwrap();
        assert!(s.unit.is_iso());
        assert!(are_isomorphic(&s.sheaf, &x));
    }
}

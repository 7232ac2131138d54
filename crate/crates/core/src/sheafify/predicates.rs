use std::ops::ControlFlow;

use serde::Serialize;

use super::SheafError;
use crate::closure::ClosureContext;
use crate::fincat::search::{for_each_hom, HomQuery};
use crate::fincat::{image_factorization, Mor, NatTrans, Presheaf};
use crate::site::Sieve;

/// A matching family on a sieve: one element `x_φ ∈ X(dom φ)` per member
/// `φ`, listed in member order, with `X(ψ)(x_φ) = x_{φψ}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatchingFamily {
    pub sieve: Sieve,
    pub values: Vec<(Mor, usize)>,
}

impl MatchingFamily {
    pub fn value(&self, phi: Mor) -> Option<usize> {
        self.values.iter().find(|(m, _)| *m == phi).map(|&(_, v)| v)
    }
}

/// All matching families for `x` on `sieve`, found as natural
/// transformations out of the sieve viewed as a subpresheaf of `y(a)`.
pub fn matching_families(x: &Presheaf, sieve: &Sieve) -> Vec<MatchingFamily> {
    let cat = x.cat();
    let a = sieve.base();
    let (sp, incl) = sieve.to_subobject(cat).to_presheaf();
    let mut out = Vec::new();
    for_each_hom(&sp, x, &HomQuery::default(), |comp| {
        let mut values: Vec<(Mor, usize)> = cat
            .objects()
            .flat_map(|b| (0..sp.size(b)).map(move |k| (b, k)))
            .map(|(b, k)| (cat.hom(b, a)[incl.apply(b, k)], comp[b][k]))
            .collect();
        values.sort_unstable();
        out.push(MatchingFamily { sieve: sieve.clone(), values });
        ControlFlow::Continue(())
    });
    out
}

/// The restrictions of `el ∈ X(a)` along the members of `sieve`.
pub(crate) fn family_of_element(x: &Presheaf, sieve: &Sieve, el: usize) -> Vec<(Mor, usize)> {
    sieve.members().map(|phi| (phi, x.act(phi, el))).collect()
}

/// Elements of `X(a)` whose restrictions along the family's sieve are the
/// given values.
pub fn amalgamate(x: &Presheaf, family: &MatchingFamily) -> Vec<usize> {
    let a = family.sieve.base();
    (0..x.size(a)).filter(|&el| family.values.iter().all(|&(phi, v)| x.act(phi, el) == v)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "failure")]
pub enum SheafFailure {
    /// Two elements restrict to the same family on a covering sieve.
    #[serde(rename = "not-separated")]
    NotSeparated { object: String, sieve: Vec<String>, elements: (usize, usize) },
    /// A matching family on a covering sieve has no amalgamation.
    #[serde(rename = "no-amalgamation")]
    NoAmalgamation { object: String, sieve: Vec<String>, family: Vec<(String, usize)> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SheafCheck {
    pub separated: bool,
    pub sheaf: bool,
    pub failures: Vec<SheafFailure>,
}

/// Checks every covering sieve: restricting elements must be injective
/// (separated) and hit every matching family (sheaf).
pub fn sheaf_check(ctx: &ClosureContext, x: &Presheaf) -> SheafCheck {
    let cat = ctx.cat();
    let mut failures = Vec::new();
    let (mut separated, mut sheaf) = (true, true);
    for a in cat.objects() {
        for s in ctx.coverage().covering_sieves(a) {
            let mut seen: Vec<(Vec<(Mor, usize)>, usize)> = Vec::new();
            for el in 0..x.size(a) {
                let fam = family_of_element(x, s, el);
                if let Some(&(_, other)) = seen.iter().find(|(f, _)| *f == fam) {
                    separated = false;
                    sheaf = false;
                    failures.push(SheafFailure::NotSeparated {
                        object: cat.object_name(a).to_string(),
                        sieve: s.names(cat),
                        elements: (other, el),
                    });
                } else {
                    seen.push((fam, el));
                }
            }
            for fam in matching_families(x, s) {
                if !seen.iter().any(|(f, _)| *f == fam.values) {
                    sheaf = false;
                    failures.push(SheafFailure::NoAmalgamation {
                        object: cat.object_name(a).to_string(),
                        sieve: s.names(cat),
                        family: fam.values.iter().map(|&(m, v)| (cat.morphism(m).name.clone(), v)).collect(),
                    });
                }
            }
        }
    }
    SheafCheck { separated, sheaf, failures }
}

pub fn is_separated(ctx: &ClosureContext, x: &Presheaf) -> bool {
    sheaf_check(ctx, x).separated
}

pub fn is_sheaf(ctx: &ClosureContext, x: &Presheaf) -> bool {
    sheaf_check(ctx, x).sheaf
}

/// The unique `u: A → X` with `u ∘ m = v`, for `m: B ↣ A` a dense mono and
/// `X` a sheaf. Each `u(a)` amalgamates `v` over the sieve of restrictions
/// of `a` that land in `B`.
pub fn extend_along_dense(ctx: &ClosureContext, m: &NatTrans, v: &NatTrans) -> Result<NatTrans, SheafError> {
    let x = v.target();
    if m.source() != v.source() {
        return Err(SheafError::Mismatch("the mono and the map have different sources".into()));
    }
    if !is_sheaf(ctx, x) {
        return Err(SheafError::NotSheaf("target".into()));
    }
    let img = image_factorization(m).image;
    if !m.is_mono() || !ctx.is_dense_mono(&img) {
        return Err(SheafError::NotDenseMono);
    }
    let cat = ctx.cat();
    let a_obj = m.target();
    // preimages under m, stage by stage
    let back: Vec<Vec<Option<usize>>> = cat
        .objects()
        .map(|c| {
            let mut inv = vec![None; a_obj.size(c)];
            for b in 0..m.source().size(c) {
                inv[m.apply(c, b)] = Some(b);
            }
            inv
        })
        .collect();
    let components = cat
        .objects()
        .map(|c| {
            (0..a_obj.size(c))
                .map(|el| {
                    let sieve = ctx.sieve_into(&img, c, el);
                    let values = sieve
                        .members()
                        .map(|phi| {
                            let b = back[cat.dom(phi)][a_obj.act(phi, el)].expect("restriction lands in the image");
                            (phi, v.apply(cat.dom(phi), b))
                        })
                        .collect();
                    let found = amalgamate(x, &MatchingFamily { sieve, values });
                    match found.as_slice() {
                        [u] => Ok(*u),
                        _ => Err(SheafError::NotSheaf("target".into())),
                    }
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(NatTrans::new(a_obj, x, components)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::builtin_context;
    use crate::fincat::enumerate::{presheaves_up_to, sierpinski, sierpinski_collapse};
    use crate::fincat::{homs, yoneda};

    #[test]
    fn everything_is_a_trivial_sheaf() {
        let c = sierpinski();
        let ctx = builtin_context(&c, "trivial").unwrap();
        for x in presheaves_up_to(&c, 2) {
            assert!(is_sheaf(&ctx, &x));
        }
    }

    #[test]
    fn collapse_fixture_is_not_separated() {
        let c = sierpinski();
        let ctx = builtin_context(&c, "dense").unwrap();
        let check = sheaf_check(&ctx, &sierpinski_collapse());
        assert!(!check.separated);
        assert!(!check.sheaf);
        assert!(matches!(check.failures[0], SheafFailure::NotSeparated { .. }));
    }

    #[test]
    fn bijective_action_is_a_sheaf() {
        let c = sierpinski();
        let ctx = builtin_context(&c, "dense").unwrap();
        let x = Presheaf::new(&c, vec![2, 2], vec![vec![0, 1], vec![0, 1], vec![1, 0]]).unwrap();
        assert!(is_sheaf(&ctx, &x));
        // X(1) empty over a nonempty X(0): the {u}-family has no amalgamation
        let y = Presheaf::new(&c, vec![1, 0], vec![vec![0], vec![], vec![]]).unwrap();
        let check = sheaf_check(&ctx, &y);
        assert!(check.separated && !check.sheaf);
    }

    #[test]
    fn extension_along_u_sieve_is_unique() {
        let c = sierpinski();
        let ctx = builtin_context(&c, "dense").unwrap();
        let u = c.morphism_index("u").unwrap();
        let (b, m) = Sieve::new(&c, 1, &[u]).unwrap().to_subobject(&c).to_presheaf();
        let y1 = yoneda(&c, 1).unwrap();
        let x = Presheaf::new(&c, vec![2, 2], vec![vec![0, 1], vec![0, 1], vec![1, 0]]).unwrap();
        for v in homs(&b, &x) {
            let ext = extend_along_dense(&ctx, &m, &v).unwrap();
            assert_eq!(ext.after(&m).unwrap(), v);
            let count = homs(&y1, &x).into_iter().filter(|w| w.after(&m).unwrap() == v).count();
            assert_eq!(count, 1);
        }
    }
}

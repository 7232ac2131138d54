//! Exponentials `Y^X` of sheaves, both as the presheaf exponential and as
//! the quotient of `Σ_{b: B} Y^{S_b}` by agreement on overlaps, where
//! `S ⊆ B × X` is a dense family over an inhabited `B`.

use std::collections::HashMap;

use super::predicates::{extend_along_dense, is_sheaf};
use super::SheafError;
use crate::closure::ClosureContext;
use crate::fincat::{binary_product, homs, product_map, yoneda, FinCategory, NatTrans, Obj, Presheaf, Product};
use crate::logic::Subpresheaf;

/// `Y^X(c) = Nat(y(c) × X, Y)`; the second component lists those maps.
pub fn presheaf_exponential(x: &Presheaf, y: &Presheaf) -> (Presheaf, Vec<Vec<NatTrans>>) {
    let cat = x.cat();
    let stages: Vec<Product> = cat.objects().map(|c| binary_product(&yoneda(cat, c).expect("object"), x)).collect();
    let elems: Vec<Vec<NatTrans>> = stages.iter().map(|p| homs(&p.presheaf, y)).collect();
    let lookup: Vec<HashMap<Vec<Vec<usize>>, usize>> = elems
        .iter()
        .map(|l| l.iter().enumerate().map(|(i, g)| (g.components().to_vec(), i)).collect())
        .collect();
    let action = (0..cat.num_morphisms())
        .map(|phi| {
            let (d, c) = (cat.dom(phi), cat.cod(phi));
            let yphi = yoneda_map(cat, phi);
            let along = product_map(&yphi, &NatTrans::identity(x));
            elems[c].iter().map(|g| lookup[d][g.after(&along).expect("composable").components()]).collect()
        })
        .collect();
    let sizes = elems.iter().map(Vec::len).collect();
    (Presheaf::new(cat, sizes, action).expect("exponential is functorial"), elems)
}

/// `y(φ): y(d) → y(c)` for `φ: d → c`, postcomposition with `φ`.
pub(crate) fn yoneda_map(cat: &FinCategory, phi: usize) -> NatTrans {
    let (d, c) = (cat.dom(phi), cat.cod(phi));
    let (yd, yc) = (yoneda(cat, d).expect("object"), yoneda(cat, c).expect("object"));
    let components = cat
        .objects()
        .map(|e| {
            cat.hom(e, d)
                .iter()
                .map(|&psi| cat.hom(e, c).iter().position(|&m| m == cat.compose(phi, psi)).expect("composite"))
                .collect()
        })
        .collect();
    NatTrans::new(&yd, &yc, components).expect("postcomposition is natural")
}

/// Data exhibiting `X` as locally small over `1`: an inhabited `B` and a
/// family `S ⊆ B × X` dense in `B × X`.
#[derive(Clone, Debug)]
pub struct ExponentialWitness {
    pub b: Presheaf,
    pub family: Subpresheaf,
}

impl ExponentialWitness {
    /// `B = 1`, `S = 1 × X`.
    pub fn trivial(x: &Presheaf) -> ExponentialWitness {
        let one = Presheaf::terminal(x.cat());
        let p = binary_product(&one, x);
        ExponentialWitness { b: one, family: Subpresheaf::top(&p.presheaf) }
    }
}

#[derive(Clone, Debug)]
pub struct SheafExponential {
    pub presheaf: Presheaf,
    /// Representatives `(b, f)` per element, `f` as partial values on `y(c) × X`.
    pub representatives: Vec<Vec<(usize, Vec<Vec<Option<usize>>>)>>,
    /// The canonical map into the presheaf exponential, extending each `f`
    /// from `S_b` to all of `y(c) × X`.
    pub comparison: NatTrans,
    pub oracle: Presheaf,
}

/// `S_b ⊆ y(c) × X`: pairs `(ψ, x)` with `(B(ψ)(b), x) ∈ S`.
fn fiber(cat: &FinCategory, w: &ExponentialWitness, bx: &Product, st: &Product, c: Obj, b: usize) -> Subpresheaf {
    Subpresheaf::from_predicate(&st.presheaf, |e, idx| {
        let co = st.decode(e, idx);
        let psi = cat.hom(e, c)[co[0]];
        w.family.contains(e, bx.encode(e, &[w.b.act(psi, b), co[1]]))
    })
}

pub fn sheaf_exponential(
    ctx: &ClosureContext,
    x: &Presheaf,
    y: &Presheaf,
    w: &ExponentialWitness,
) -> Result<SheafExponential, SheafError> {
    let cat = ctx.cat();
    if cat.objects().any(|c| w.b.size(c) == 0) {
        return Err(SheafError::BadWitness("B → 1 is not an epimorphism".into()));
    }
    let bx = binary_product(&w.b, x);
    if w.family.parent() != &bx.presheaf {
        return Err(SheafError::BadWitness("family is not a subobject of B × X".into()));
    }
    if !ctx.is_dense_mono(&w.family) {
        return Err(SheafError::BadWitness("family is not dense in B × X".into()));
    }
    if !is_sheaf(ctx, x) {
        return Err(SheafError::NotSheaf("X".into()));
    }
    if !is_sheaf(ctx, y) {
        return Err(SheafError::NotSheaf("Y".into()));
    }
    let stages: Vec<Product> = cat.objects().map(|c| binary_product(&yoneda(cat, c).expect("object"), x)).collect();
    type Elem = (usize, Vec<Vec<Option<usize>>>);
    let mut elems: Vec<Vec<Elem>> = Vec::new();
    let mut fibers: Vec<Vec<(Subpresheaf, NatTrans)>> = Vec::new();
    let mut raw: Vec<Vec<(usize, NatTrans)>> = Vec::new();
    for c in cat.objects() {
        let st = &stages[c];
        let mut list = Vec::new();
        let mut fl = Vec::new();
        let mut rl = Vec::new();
        for b in 0..w.b.size(c) {
            let sb = fiber(cat, w, &bx, st, c, b);
            let (sp, incl) = sb.to_presheaf();
            for f in homs(&sp, y) {
                let mut vals: Vec<Vec<Option<usize>>> = cat.objects().map(|e| vec![None; st.presheaf.size(e)]).collect();
                for e in cat.objects() {
                    for k in 0..sp.size(e) {
                        vals[e][incl.apply(e, k)] = Some(f.apply(e, k));
                    }
                }
                list.push((b, vals));
                rl.push((fl.len(), f));
            }
            fl.push((sb, incl));
        }
        elems.push(list);
        fibers.push(fl);
        raw.push(rl);
    }
    // (b, f) ~ (b′, f′) iff f and f′ agree wherever both are defined
    let agree = |p: &Elem, q: &Elem| {
        p.1.iter().zip(&q.1).all(|(u, v)| u.iter().zip(v).all(|(s, t)| s.is_none() || t.is_none() || s == t))
    };
    let mut class_of: Vec<Vec<usize>> = Vec::new();
    let mut reps: Vec<Vec<Elem>> = Vec::new();
    let mut rep_index: Vec<Vec<usize>> = Vec::new();
    for list in &elems {
        let mut classes = vec![usize::MAX; list.len()];
        let mut r: Vec<Elem> = Vec::new();
        let mut ri = Vec::new();
        for i in 0..list.len() {
            if classes[i] != usize::MAX {
                continue;
            }
            let k = r.len();
            r.push(list[i].clone());
            ri.push(i);
            for j in i..list.len() {
                if classes[j] == usize::MAX && agree(&list[i], &list[j]) {
                    classes[j] = k;
                }
            }
        }
        class_of.push(classes);
        reps.push(r);
        rep_index.push(ri);
    }
    let lookup: Vec<HashMap<&Elem, usize>> =
        elems.iter().map(|l| l.iter().enumerate().map(|(i, e)| (e, i)).collect()).collect();
    let mut action = Vec::with_capacity(cat.num_morphisms());
    for phi in 0..cat.num_morphisms() {
        let (d, c) = (cat.dom(phi), cat.cod(phi));
        let yphi = yoneda_map(cat, phi);
        let along = product_map(&yphi, &NatTrans::identity(x));
        let mut table = Vec::new();
        for (b, vals) in &reps[c] {
            let nb = w.b.act(phi, *b);
            let nv: Vec<Vec<Option<usize>>> = cat
                .objects()
                .map(|e| (0..stages[d].presheaf.size(e)).map(|idx| vals[e][along.apply(e, idx)]).collect())
                .collect();
            let key = (nb, nv);
            let i = lookup[d].get(&key).ok_or_else(|| SheafError::BadWitness("restricted family not found".into()))?;
            table.push(class_of[d][*i]);
        }
        action.push(table);
    }
    let sizes = reps.iter().map(Vec::len).collect();
    let presheaf = Presheaf::new(cat, sizes, action)?;
    let (oracle, oracle_elems) = presheaf_exponential(x, y);
    let oracle_lookup: Vec<HashMap<Vec<Vec<usize>>, usize>> = oracle_elems
        .iter()
        .map(|l| l.iter().enumerate().map(|(i, g)| (g.components().to_vec(), i)).collect())
        .collect();
    let components = cat
        .objects()
        .map(|c| {
            rep_index[c]
                .iter()
                .map(|&i| {
                    let (fi, f) = &raw[c][i];
                    let (_, incl) = &fibers[c][*fi];
                    let ext = extend_along_dense(ctx, incl, f)?;
                    Ok(oracle_lookup[c][ext.components()])
                })
                .collect::<Result<Vec<_>, SheafError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let comparison = NatTrans::new(&presheaf, &oracle, components)?;
    Ok(SheafExponential { presheaf, representatives: reps, comparison, oracle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::builtin_context;
    use crate::fincat::are_isomorphic;
    use crate::fincat::enumerate::sierpinski;

    #[test]
    fn exponential_of_sheaves_on_the_dense_site() {
        let c = sierpinski();
        let ctx = builtin_context(&c, "dense").unwrap();
        let x = Presheaf::new(&c, vec![2, 2], vec![vec![0, 1], vec![0, 1], vec![1, 0]]).unwrap();
        let one = Presheaf::terminal(&c);
        let e = sheaf_exponential(&ctx, &x, &x, &ExponentialWitness::trivial(&x)).unwrap();
        assert!(e.comparison.is_iso());
        let e1 = sheaf_exponential(&ctx, &one, &x, &ExponentialWitness::trivial(&one)).unwrap();
        assert!(are_isomorphic(&e1.presheaf, &x));
        let e2 = sheaf_exponential(&ctx, &x, &one, &ExponentialWitness::trivial(&x)).unwrap();
        assert!(are_isomorphic(&e2.presheaf, &one));
    }
}

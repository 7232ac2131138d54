//! The plus construction: matching families on covering sieves, identified
//! when they agree on a covering sieve. Applied twice it gives the
//! associated sheaf by an independent route.

use std::collections::HashMap;

use super::predicates::matching_families;
use crate::closure::ClosureContext;
use crate::fincat::{FinCategory, Mor, NatTrans, Obj, Presheaf};
use crate::site::Sieve;

/// `X⁺` together with the canonical map `X → X⁺`.
#[derive(Clone, Debug)]
pub struct PlusConstruction {
    pub presheaf: Presheaf,
    pub unit: NatTrans,
    /// The representative `(sieve, family)` of each element, family values
    /// indexed by position in `into(a)`.
    reps: Vec<Vec<(Sieve, Vec<Option<usize>>)>>,
}

impl PlusConstruction {
    pub fn representative(&self, a: Obj, idx: usize) -> &(Sieve, Vec<Option<usize>>) {
        &self.reps[a][idx]
    }
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut j = i;
    while parent[j] != r {
        let next = parent[j];
        parent[j] = r;
        j = next;
    }
    r
}

fn union(parent: &mut [usize], i: usize, j: usize) {
    let (ri, rj) = (find(parent, i), find(parent, j));
    if ri != rj {
        // keep the least index as root
        let (lo, hi) = if ri < rj { (ri, rj) } else { (rj, ri) };
        parent[hi] = lo;
    }
}

fn position(cat: &FinCategory, a: Obj, phi: Mor) -> usize {
    cat.arrows_into(a).iter().position(|&m| m == phi).expect("morphism into a")
}

/// One application of the plus construction. Requires a valid coverage:
/// agreement on a covering sieve is then an equivalence relation.
pub fn plus_construction(ctx: &ClosureContext, x: &Presheaf) -> PlusConstruction {
    let cat = ctx.cat();
    let mut elems: Vec<Vec<(Sieve, Vec<Option<usize>>)>> = Vec::new();
    for a in cat.objects() {
        let mut list = Vec::new();
        for s in ctx.coverage().covering_sieves(a) {
            for fam in matching_families(x, s) {
                let mut vals = vec![None; cat.arrows_into(a).len()];
                for &(phi, v) in &fam.values {
                    vals[position(cat, a, phi)] = Some(v);
                }
                list.push((s.clone(), vals));
            }
        }
        elems.push(list);
    }
    // classes: families agreeing on a covering sieve
    let mut class_of: Vec<Vec<usize>> = Vec::new();
    let mut reps: Vec<Vec<(Sieve, Vec<Option<usize>>)>> = Vec::new();
    for a in cat.objects() {
        let list = &elems[a];
        let mut parent: Vec<usize> = (0..list.len()).collect();
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                let agree: Vec<Mor> = cat
                    .arrows_into(a)
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| list[i].1[k].is_some() && list[i].1[k] == list[j].1[k])
                    .map(|(_, &m)| m)
                    .collect();
                let e = Sieve::new(cat, a, &agree).expect("agreement set of matching families is a sieve");
                if ctx.coverage().covers(&e) {
                    union(&mut parent, i, j);
                }
            }
        }
        let mut numbering = HashMap::new();
        let mut classes = Vec::with_capacity(list.len());
        let mut r = Vec::new();
        for i in 0..list.len() {
            let root = find(&mut parent, i);
            let next = numbering.len();
            let k = *numbering.entry(root).or_insert(next);
            if k == r.len() {
                r.push(list[i].clone());
            }
            classes.push(k);
        }
        class_of.push(classes);
        reps.push(r);
    }
    let lookup: Vec<HashMap<(Sieve, Vec<Option<usize>>), usize>> =
        elems.iter().map(|l| l.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect()).collect();
    let action = (0..cat.num_morphisms())
        .map(|phi| {
            let (b, a) = (cat.dom(phi), cat.cod(phi));
            reps[a]
                .iter()
                .map(|(s, vals)| {
                    let t = s.restrict(cat, phi).expect("codomain matches");
                    let mut nv = vec![None; cat.arrows_into(b).len()];
                    for (k, &psi) in cat.arrows_into(b).iter().enumerate() {
                        if t.contains(psi) {
                            nv[k] = vals[position(cat, a, cat.compose(phi, psi))];
                        }
                    }
                    class_of[b][lookup[b][&(t, nv)]]
                })
                .collect()
        })
        .collect();
    let sizes = reps.iter().map(Vec::len).collect();
    let presheaf = Presheaf::new(cat, sizes, action).expect("plus construction is functorial for a valid coverage");
    let components = cat
        .objects()
        .map(|a| {
            let m = Sieve::maximal(cat, a);
            (0..x.size(a))
                .map(|el| {
                    let vals = cat.arrows_into(a).iter().map(|&phi| Some(x.act(phi, el))).collect();
                    class_of[a][lookup[a][&(m.clone(), vals)]]
                })
                .collect()
        })
        .collect();
    let unit = NatTrans::new(x, &presheaf, components).expect("unit is natural");
    PlusConstruction { presheaf, unit, reps }
}

/// `X⁺⁺` and the composite unit `X → X⁺ → X⁺⁺`.
pub fn double_plus_oracle(ctx: &ClosureContext, x: &Presheaf) -> (Presheaf, NatTrans) {
    let p1 = plus_construction(ctx, x);
    let p2 = plus_construction(ctx, &p1.presheaf);
    let unit = p2.unit.after(&p1.unit).expect("composable");
    (p2.presheaf, unit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::builtin_context;
    use crate::fincat::are_isomorphic;
    use crate::fincat::enumerate::{sierpinski, sierpinski_collapse};
    use crate::sheafify::is_sheaf;

    #[test]
    fn collapse_fixture_plus() {
        let c = sierpinski();
        let ctx = builtin_context(&c, "dense").unwrap();
        let p = plus_construction(&ctx, &sierpinski_collapse());
        // X⁺(1) is the families on {u} and on M₁, glued: one class, the value at 0
        assert_eq!(p.presheaf.sizes(), &[1, 1]);
        let (pp, _) = double_plus_oracle(&ctx, &sierpinski_collapse());
        assert!(is_sheaf(&ctx, &pp));
        assert!(are_isomorphic(&pp, &Presheaf::terminal(&c)));
    }

    #[test]
    fn trivial_coverage_plus_is_identity() {
        let c = sierpinski();
        let ctx = builtin_context(&c, "trivial").unwrap();
        let x = sierpinski_collapse();
        let p = plus_construction(&ctx, &x);
        assert!(p.unit.is_iso());
    }
}

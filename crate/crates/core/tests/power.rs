//! Power objects and `P_J`, against subobject enumeration.

mod common;

use common::{contexts, fixtures, map, sub_from_mask};
use ltsheaf::fincat::{are_isomorphic, binary_product, kernel_pair, quotient_by_equivalence, yoneda, Presheaf};
use ltsheaf::logic::{all_subobjects, exists_along, pullback_sub, Subpresheaf};
use ltsheaf::powerobj::{pj_object, power_object, DEFAULT_CAP};
use proptest::prelude::*;

/// Position of the identity of `a` among the elements of `y(a)(a)`.
fn id_position(x: &Presheaf, a: usize) -> usize {
    let cat = x.cat();
    cat.hom(a, a).iter().position(|&m| m == cat.identity(a)).unwrap()
}

#[test]
fn stages_count_subobjects_and_closed_subobjects() {
    for x in fixtures(2) {
        let cat = x.cat();
        let p = power_object(x, DEFAULT_CAP).unwrap();
        for ctx in contexts(x) {
            let pj = pj_object(&ctx, x, DEFAULT_CAP).unwrap();
            for a in cat.objects() {
                let stage = binary_product(&yoneda(cat, a).unwrap(), x).presheaf;
                let subs = all_subobjects(&stage, 1 << 16).unwrap();
                assert_eq!(p.presheaf.size(a), subs.len());
                assert_eq!(pj.presheaf.size(a), subs.iter().filter(|s| ctx.is_closed(s)).count());
            }
        }
    }
}

#[test]
fn pj_is_the_quotient_by_equal_closure() {
    for x in fixtures(2) {
        let cat = x.cat();
        for ctx in contexts(x) {
            let pj = pj_object(&ctx, x, DEFAULT_CAP).unwrap();
            let p = &pj.power;
            let pp = binary_product(&p.presheaf, &p.presheaf);
            let stages: Vec<Vec<usize>> = cat
                .objects()
                .map(|a| {
                    (0..pp.presheaf.size(a))
                        .filter(|&k| {
                            let c = pp.decode(a, k);
                            ctx.close(p.relation(a, c[0])) == ctx.close(p.relation(a, c[1]))
                        })
                        .collect()
                })
                .collect();
            let r = Subpresheaf::new(&pp.presheaf, &stages).unwrap();
            let (q, _) = quotient_by_equivalence(&p.presheaf, &r).unwrap();
            assert!(are_isomorphic(&q, &pj.presheaf));
            assert_eq!(kernel_pair(&pj.quotient), r);
            assert_eq!(pj.quotient.after(&pj.inclusion).unwrap().components(), ltsheaf::fincat::NatTrans::identity(&pj.presheaf).components());
        }
    }
}

#[test]
fn closed_membership_matches_closed_relations() {
    for x in fixtures(2) {
        let cat = x.cat();
        let p = power_object(x, DEFAULT_CAP).unwrap();
        let px = binary_product(&p.presheaf, x);
        for ctx in contexts(x) {
            let bar = ctx.close(&p.membership);
            for a in cat.objects() {
                let st = p.stage_product(a);
                for s in 0..p.presheaf.size(a) {
                    let closed = ctx.close(p.relation(a, s));
                    for el in 0..x.size(a) {
                        let want = closed.contains(a, st.encode(a, &[id_position(x, a), el]));
                        assert_eq!(bar.contains(a, px.encode(a, &[s, el])), want);
                    }
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn classifying_maps_round_trip(a in common::presheaf(2), x in common::presheaf(2), m in any::<u64>()) {
        prop_assume!(a.cat() == x.cat());
        let ax = binary_product(&a, &x);
        let s = sub_from_mask(&ax.presheaf, m);
        let p = power_object(&x, DEFAULT_CAP).unwrap();
        let chi = p.classify(&a, &s).unwrap();
        prop_assert_eq!(p.family_of(&chi).unwrap(), s);
    }

    #[test]
    fn direct_image_is_left_adjoint_to_inverse_image(f in map()) {
        let (x, y) = (f.source(), f.target());
        let px = power_object(x, DEFAULT_CAP).unwrap();
        let py = power_object(y, DEFAULT_CAP).unwrap();
        let direct = px.direct_image(&py, &f).unwrap();
        let inverse = px.inverse_image(&py, &f).unwrap();
        let cat = f.cat();
        for a in cat.objects() {
            for s in 0..px.presheaf.size(a) {
                for t in 0..py.presheaf.size(a) {
                    let lhs = py.relation(a, direct.apply(a, s)).le(py.relation(a, t));
                    let rhs = px.relation(a, s).le(px.relation(a, inverse.apply(a, t)));
                    prop_assert_eq!(lhs, rhs);
                }
            }
        }
        // on classified families the maps act by pullback and image
        let one = Presheaf::terminal(cat);
        let top = Subpresheaf::top(&binary_product(&one, x).presheaf);
        let chi = px.classify(&one, &top).unwrap();
        let along = ltsheaf::fincat::product_map(&ltsheaf::fincat::NatTrans::identity(&one), &f);
        prop_assert_eq!(py.family_of(&direct.after(&chi).unwrap()).unwrap(), exists_along(&along, &top).unwrap());
        let ty = Subpresheaf::top(&binary_product(&one, y).presheaf);
        let chi_y = py.classify(&one, &ty).unwrap();
        prop_assert_eq!(px.family_of(&inverse.after(&chi_y).unwrap()).unwrap(), pullback_sub(&along, &ty).unwrap());
    }
}

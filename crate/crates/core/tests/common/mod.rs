#![allow(dead_code)]

use std::sync::OnceLock;

use ltsheaf::closure::{builtin_context, ClosureContext};
use ltsheaf::fincat::enumerate::{fixture_categories, presheaves_up_to};
use ltsheaf::fincat::{homs, NatTrans, Obj, Presheaf};
use ltsheaf::logic::Subpresheaf;
use proptest::prelude::*;

/// Presheaves with at most `max` elements per stage on every fixture
/// category, up to iso.
pub fn fixtures(max: usize) -> &'static [Presheaf] {
    static SMALL: OnceLock<Vec<Presheaf>> = OnceLock::new();
    static MEDIUM: OnceLock<Vec<Presheaf>> = OnceLock::new();
    let cell = match max {
        2 => &SMALL,
        3 => &MEDIUM,
        _ => panic!("fixture size {max}"),
    };
    cell.get_or_init(|| fixture_categories().into_iter().flat_map(|(_, c)| presheaves_up_to(&c, max)).collect())
}

/// Maps between fixtures with at most two elements per stage.
pub fn fixture_maps() -> &'static [NatTrans] {
    static MAPS: OnceLock<Vec<NatTrans>> = OnceLock::new();
    MAPS.get_or_init(|| {
        let xs = fixtures(2);
        let mut out = Vec::new();
        for x in xs {
            for y in xs.iter().filter(|y| y.cat() == x.cat()) {
                out.extend(homs(x, y));
            }
        }
        out
    })
}

pub fn contexts(x: &Presheaf) -> Vec<ClosureContext> {
    ["trivial", "dense", "all"].iter().map(|n| builtin_context(x.cat(), n).unwrap()).collect()
}

/// The subobject generated by the elements whose flat index is set in `mask`.
pub fn sub_from_mask(x: &Presheaf, mask: u64) -> Subpresheaf {
    let mut gens: Vec<(Obj, usize)> = Vec::new();
    let mut k = 0;
    for a in x.cat().objects() {
        for el in 0..x.size(a) {
            if mask >> (k % 64) & 1 == 1 {
                gens.push((a, el));
            }
            k += 1;
        }
    }
    Subpresheaf::generated_by(x, &gens)
}

pub fn presheaf(max: usize) -> impl Strategy<Value = Presheaf> {
    prop::sample::select(fixtures(max).to_vec())
}

/// A presheaf with `n` subobjects of it.
pub fn with_subs(max: usize, n: usize) -> impl Strategy<Value = (Presheaf, Vec<Subpresheaf>)> {
    (presheaf(max), prop::collection::vec(any::<u64>(), n))
        .prop_map(|(x, masks)| {
            let subs = masks.into_iter().map(|m| sub_from_mask(&x, m)).collect();
            (x, subs)
        })
}

pub fn map() -> impl Strategy<Value = NatTrans> {
    prop::sample::select(fixture_maps().to_vec())
}

/// `f: X → A ← Y: g`.
pub fn cospan() -> impl Strategy<Value = (NatTrans, NatTrans)> {
    map().prop_flat_map(|f| {
        let gs: Vec<NatTrans> = fixture_maps().iter().filter(|g| g.target() == f.target()).cloned().collect();
        (Just(f), prop::sample::select(gs))
    })
}

/// Parallel maps `f, g: X → Y`.
pub fn parallel() -> impl Strategy<Value = (NatTrans, NatTrans)> {
    map().prop_flat_map(|f| {
        let gs: Vec<NatTrans> =
            fixture_maps().iter().filter(|g| g.source() == f.source() && g.target() == f.target()).cloned().collect();
        (Just(f), prop::sample::select(gs))
    })
}

//! Standard fixture categories and exhaustive presheaf enumeration.

use super::{search, FinCategory, Morphism, Presheaf};

/// One object, one morphism.
pub fn terminal_category() -> FinCategory {
    FinCategory::with_implicit_identities(vec!["*".into()], Vec::new(), &[]).expect("terminal category")
}

/// The poset `0 ≤ 1`: objects `0`, `1` and a single arrow `u: 0 → 1`.
pub fn sierpinski() -> FinCategory {
    let u = Morphism { name: "u".into(), dom: 0, cod: 1 };
    FinCategory::with_implicit_identities(vec!["0".into(), "1".into()], vec![u], &[]).expect("sierpinski")
}

/// The monoid `{id, e}` with `e ∘ e = e`, as a one-object category.
pub fn idempotent_monoid() -> FinCategory {
    let e = Morphism { name: "e".into(), dom: 0, cod: 0 };
    FinCategory::with_implicit_identities(vec!["*".into()], vec![e], &[(0, 0, 0)]).expect("idempotent monoid")
}

/// The three fixture categories, with their names.
pub fn fixture_categories() -> Vec<(&'static str, FinCategory)> {
    vec![("terminal", terminal_category()), ("sierpinski", sierpinski()), ("idempotent", idempotent_monoid())]
}

/// On the Sierpinski category: `X(1) = {a, b}` both restricting to the
/// single element of `X(0)`.
pub fn sierpinski_collapse() -> Presheaf {
    let c = sierpinski();
    Presheaf::new(&c, vec![1, 2], vec![vec![0], vec![0, 1], vec![0, 0]]).expect("collapse fixture")
}

/// Every presheaf on `cat` with at most `max` elements per stage, one per
/// isomorphism class. The order is deterministic: by carrier sizes, then by
/// action tables in lexicographic order of first appearance.
pub fn presheaves_up_to(cat: &FinCategory, max: usize) -> Vec<Presheaf> {
    let mut out: Vec<Presheaf> = Vec::new();
    let n = cat.num_objects();
    let mut sizes = vec![0usize; n];
    loop {
        let mut found = Vec::new();
        for_each_presheaf(cat, &sizes, |x| {
            if !found.iter().any(|y| search::are_isomorphic(&x, y)) {
                found.push(x);
            }
        });
        out.extend(found);
        // next size vector in lexicographic order
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if sizes[i] < max {
                sizes[i] += 1;
                for s in &mut sizes[i + 1..] {
                    *s = 0;
                }
                break;
            }
        }
    }
}

/// Visits every presheaf with the given carrier sizes (not up to iso).
pub fn for_each_presheaf(cat: &FinCategory, sizes: &[usize], mut visit: impl FnMut(Presheaf)) {
    let free: Vec<usize> = (0..cat.num_morphisms()).filter(|&m| !cat.is_identity(m)).collect();
    let mut action: Vec<Vec<usize>> = (0..cat.num_morphisms())
        .map(|m| if cat.is_identity(m) { (0..sizes[cat.cod(m)]).collect() } else { vec![0; sizes[cat.cod(m)]] })
        .collect();
    // odometer over all tables of non-identity morphisms
    let slots: Vec<(usize, usize, usize)> = free
        .iter()
        .flat_map(|&m| (0..sizes[cat.cod(m)]).map(move |x| (m, x, sizes[cat.dom(m)])))
        .collect();
    if slots.iter().any(|&(_, _, range)| range == 0) {
        return;
    }
    loop {
        if let Ok(x) = Presheaf::new(cat, sizes.to_vec(), action.clone()) {
            visit(x);
        }
        let mut k = slots.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            let (m, x, range) = slots[k];
            if action[m][x] + 1 < range {
                action[m][x] += 1;
                for &(m2, x2, _) in &slots[k + 1..] {
                    action[m2][x2] = 0;
                }
                break;
            }
        }
    }
}

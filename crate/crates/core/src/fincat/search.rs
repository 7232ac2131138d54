//! Backtracking search for natural transformations.
//!
//! Assigning `f_a(x) = y` forces `f_b(X(φ)x) = Y(φ)y` for every `φ: b → a`;
//! the search propagates these forced values eagerly and backtracks on the
//! first conflict, so every naturality square is checked exactly when both
//! of its ends become known.

use std::ops::ControlFlow;

use super::{NatTrans, Obj, Presheaf};

/// Options narrowing a hom-set search.
#[derive(Default)]
pub struct HomQuery<'a> {
    /// Only pointwise injective maps (with equal sizes: isomorphisms).
    pub injective: bool,
    /// Values fixed in advance, as `(stage, source element, target element)`.
    pub fixed: Vec<(Obj, usize, usize)>,
    /// Extra per-element admissibility test.
    pub allowed: Option<&'a dyn Fn(Obj, usize, usize) -> bool>,
}

struct Search<'a> {
    x: &'a Presheaf,
    y: &'a Presheaf,
    assign: Vec<Vec<usize>>,
    used: Vec<Vec<u32>>,
    trail: Vec<(Obj, usize)>,
    query: &'a HomQuery<'a>,
    order: Vec<(Obj, usize)>,
}

const UNSET: usize = usize::MAX;

impl<'a> Search<'a> {
    fn set(&mut self, a: Obj, x: usize, y: usize) -> bool {
        let mut stack = vec![(a, x, y)];
        let cat = self.x.cat();
        while let Some((a, x, y)) = stack.pop() {
            let cur = self.assign[a][x];
            if cur != UNSET {
                if cur != y {
                    return false;
                }
                continue;
            }
            if let Some(allowed) = self.query.allowed {
                if !allowed(a, x, y) {
                    return false;
                }
            }
            if self.query.injective {
                if self.used[a][y] > 0 {
                    return false;
                }
                self.used[a][y] += 1;
            }
            self.assign[a][x] = y;
            self.trail.push((a, x));
            for &phi in cat.arrows_into(a) {
                let b = cat.dom(phi);
                stack.push((b, self.x.act(phi, x), self.y.act(phi, y)));
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (a, x) = self.trail.pop().expect("trail entry");
            if self.query.injective {
                self.used[a][self.assign[a][x]] -= 1;
            }
            self.assign[a][x] = UNSET;
        }
    }

    fn run(&mut self, pos: usize, visit: &mut dyn FnMut(&[Vec<usize>]) -> ControlFlow<()>) -> ControlFlow<()> {
        let mut pos = pos;
        while pos < self.order.len() && self.assign[self.order[pos].0][self.order[pos].1] != UNSET {
            pos += 1;
        }
        if pos == self.order.len() {
            return visit(&self.assign);
        }
        let (a, x) = self.order[pos];
        for y in 0..self.y.size(a) {
            let mark = self.trail.len();
            if self.set(a, x, y) {
                self.run(pos + 1, visit)?;
            }
            self.undo(mark);
        }
        ControlFlow::Continue(())
    }
}

/// Visits the components of every natural transformation `x → y` matching
/// the query, in a deterministic order. Stops early when `visit` breaks.
pub fn for_each_hom(
    x: &Presheaf,
    y: &Presheaf,
    query: &HomQuery<'_>,
    mut visit: impl FnMut(&[Vec<usize>]) -> ControlFlow<()>,
) {
    let cat = x.cat();
    if query.injective && cat.objects().any(|a| x.size(a) > y.size(a)) {
        return;
    }
    // objects with many incoming morphisms determine the most, so go first
    let mut objs: Vec<Obj> = cat.objects().collect();
    objs.sort_by_key(|&a| (std::cmp::Reverse(cat.arrows_into(a).len()), a));
    let order = objs.iter().flat_map(|&a| (0..x.size(a)).map(move |e| (a, e))).collect();
    let mut s = Search {
        x,
        y,
        assign: cat.objects().map(|a| vec![UNSET; x.size(a)]).collect(),
        used: cat.objects().map(|a| vec![0; y.size(a)]).collect(),
        trail: Vec::new(),
        query,
        order,
    };
    for &(a, el, v) in &query.fixed {
        if el >= x.size(a) || v >= y.size(a) || !s.set(a, el, v) {
            return;
        }
    }
    let _ = s.run(0, &mut visit);
}

/// All natural transformations `x → y`.
pub fn homs(x: &Presheaf, y: &Presheaf) -> Vec<NatTrans> {
    let mut out = Vec::new();
    for_each_hom(x, y, &HomQuery::default(), |c| {
        out.push(NatTrans::from_components(x, y, c.to_vec()));
        ControlFlow::Continue(())
    });
    out
}

/// Number of natural transformations `x → y` matching `query`, stopping
/// once `limit` is reached.
pub fn count_homs(x: &Presheaf, y: &Presheaf, query: &HomQuery<'_>, limit: usize) -> usize {
    let mut n = 0;
    for_each_hom(x, y, query, |_| {
        n += 1;
        if n >= limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    n
}

/// The first map matching `query`, if any.
pub fn find_hom(x: &Presheaf, y: &Presheaf, query: &HomQuery<'_>) -> Option<NatTrans> {
    let mut found = None;
    for_each_hom(x, y, query, |c| {
        found = Some(NatTrans::from_components(x, y, c.to_vec()));
        ControlFlow::Break(())
    });
    found
}

/// An isomorphism `x ≅ y`, if one exists.
pub fn find_iso(x: &Presheaf, y: &Presheaf) -> Option<NatTrans> {
    if x.sizes() != y.sizes() {
        return None;
    }
    find_hom(x, y, &HomQuery { injective: true, ..Default::default() })
}

pub fn are_isomorphic(x: &Presheaf, y: &Presheaf) -> bool {
    find_iso(x, y).is_some()
}

/// An isomorphism `θ: x ≅ y` with `θ ∘ u = v`, for maps `u: z → x` and
/// `v: z → y` out of a common source.
pub fn find_iso_under(u: &NatTrans, v: &NatTrans) -> Option<NatTrans> {
    let (x, y) = (u.target(), v.target());
    if x.sizes() != y.sizes() || u.source() != v.source() {
        return None;
    }
    let z = u.source();
    let fixed = z
        .cat()
        .objects()
        .flat_map(|a| (0..z.size(a)).map(move |e| (a, u.apply(a, e), v.apply(a, e))))
        .collect();
    find_hom(x, y, &HomQuery { injective: true, fixed, allowed: None })
}

/// An isomorphism of arrows: isos `α: dom f ≅ dom g`, `β: cod f ≅ cod g`
/// with `g α = β f`.
pub fn find_arrow_iso(f: &NatTrans, g: &NatTrans) -> Option<(NatTrans, NatTrans)> {
    if f.source().sizes() != g.source().sizes() || f.target().sizes() != g.target().sizes() {
        return None;
    }
    let mut result = None;
    for_each_hom(f.target(), g.target(), &HomQuery { injective: true, ..Default::default() }, |beta| {
        let allowed = |a: Obj, x: usize, y: usize| g.apply(a, y) == beta[a][f.apply(a, x)];
        let q = HomQuery { injective: true, fixed: Vec::new(), allowed: Some(&allowed) };
        if let Some(alpha) = find_hom(f.source(), g.source(), &q) {
            result = Some((alpha, NatTrans::from_components(f.target(), g.target(), beta.to_vec())));
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    result
}

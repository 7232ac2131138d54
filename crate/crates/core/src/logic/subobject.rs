use std::fmt;
use std::hash::{Hash, Hasher};

use fixedbitset::FixedBitSet;

use super::LogicError;
use crate::fincat::{NatTrans, Obj, Presheaf};

/// A subpresheaf `S ↣ X`: a subset of each `X(a)`, stable under restriction.
///
/// Stored as one bit-vector per object, indexed by element number, so equal
/// subobjects are equal as values and hash alike.
#[derive(Clone)]
pub struct Subpresheaf {
    parent: Presheaf,
    sel: Vec<FixedBitSet>,
}

impl PartialEq for Subpresheaf {
    fn eq(&self, other: &Self) -> bool {
        self.sel == other.sel && self.parent == other.parent
    }
}

impl Eq for Subpresheaf {}

impl Hash for Subpresheaf {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.parent.hash(state);
        self.sel.hash(state);
    }
}

impl fmt::Debug for Subpresheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.sel.iter().map(|s| s.ones().collect::<Vec<_>>())).finish()
    }
}

impl Subpresheaf {
    /// Builds a subobject from per-stage element lists, checking stability.
    pub fn new(parent: &Presheaf, stages: &[Vec<usize>]) -> Result<Self, LogicError> {
        if stages.len() != parent.cat().num_objects() {
            return Err(LogicError::Malformed("wrong number of stages".into()));
        }
        let mut sel = Vec::with_capacity(stages.len());
        for (a, elems) in stages.iter().enumerate() {
            let mut bits = FixedBitSet::with_capacity(parent.size(a));
            for &x in elems {
                if x >= parent.size(a) {
                    return Err(LogicError::Malformed(format!("element {x} out of range at stage {a}")));
                }
                bits.insert(x);
            }
            sel.push(bits);
        }
        Self::from_bits(parent, sel)
    }

    /// Builds a subobject from bit-vectors, checking stability.
    pub fn from_bits(parent: &Presheaf, sel: Vec<FixedBitSet>) -> Result<Self, LogicError> {
        let s = Subpresheaf { parent: parent.clone(), sel };
        if let Some((phi, x)) = s.stability_violation() {
            let c = parent.cat();
            return Err(LogicError::NotStable {
                morphism: c.morphism(phi).name.clone(),
                stage: c.object_name(c.cod(phi)).to_string(),
                element: x,
            });
        }
        Ok(s)
    }

    pub(crate) fn from_bits_unchecked(parent: &Presheaf, sel: Vec<FixedBitSet>) -> Self {
        let s = Subpresheaf { parent: parent.clone(), sel };
        debug_assert!(s.stability_violation().is_none(), "selection is not restriction-stable");
        s
    }

    /// Builds the selection `{x | pred(a, x)}`, which the caller guarantees
    /// is restriction-stable.
    pub(crate) fn from_predicate(parent: &Presheaf, mut pred: impl FnMut(Obj, usize) -> bool) -> Self {
        let sel = parent
            .cat()
            .objects()
            .map(|a| {
                let mut bits = FixedBitSet::with_capacity(parent.size(a));
                for x in 0..parent.size(a) {
                    if pred(a, x) {
                        bits.insert(x);
                    }
                }
                bits
            })
            .collect();
        Self::from_bits_unchecked(parent, sel)
    }

    fn stability_violation(&self) -> Option<(usize, usize)> {
        let c = self.parent.cat();
        for phi in 0..c.num_morphisms() {
            let (b, a) = (c.dom(phi), c.cod(phi));
            for x in self.sel[a].ones() {
                if !self.sel[b].contains(self.parent.act(phi, x)) {
                    return Some((phi, x));
                }
            }
        }
        None
    }

    pub fn top(parent: &Presheaf) -> Self {
        Self::from_predicate(parent, |_, _| true)
    }

    pub fn bottom(parent: &Presheaf) -> Self {
        Self::from_predicate(parent, |_, _| false)
    }

    /// The least subobject containing the given elements.
    pub fn generated_by(parent: &Presheaf, elems: &[(Obj, usize)]) -> Self {
        let c = parent.cat();
        let mut sel: Vec<FixedBitSet> = c.objects().map(|a| FixedBitSet::with_capacity(parent.size(a))).collect();
        for &(a, x) in elems {
            for &phi in c.arrows_into(a) {
                sel[c.dom(phi)].insert(parent.act(phi, x));
            }
        }
        Self::from_bits_unchecked(parent, sel)
    }

    pub fn parent(&self) -> &Presheaf {
        &self.parent
    }

    pub fn contains(&self, a: Obj, x: usize) -> bool {
        self.sel[a].contains(x)
    }

    pub fn stage(&self, a: Obj) -> &FixedBitSet {
        &self.sel[a]
    }

    pub fn stages(&self) -> &[FixedBitSet] {
        &self.sel
    }

    pub fn elements(&self, a: Obj) -> impl Iterator<Item = usize> + '_ {
        self.sel[a].ones()
    }

    pub fn count(&self, a: Obj) -> usize {
        self.sel[a].count_ones(..)
    }

    pub fn is_top(&self) -> bool {
        self.sel.iter().enumerate().all(|(a, s)| s.count_ones(..) == self.parent.size(a))
    }

    pub fn is_bottom(&self) -> bool {
        self.sel.iter().all(|s| s.is_clear())
    }

    /// Pointwise inclusion `self ≤ other`.
    pub fn le(&self, other: &Subpresheaf) -> bool {
        self.parent == other.parent && self.sel.iter().zip(&other.sel).all(|(s, t)| s.is_subset(t))
    }

    fn same_parent(&self, other: &Subpresheaf) -> Result<(), LogicError> {
        if self.parent == other.parent {
            Ok(())
        } else {
            Err(LogicError::ParentMismatch)
        }
    }

    pub fn meet(&self, other: &Subpresheaf) -> Result<Subpresheaf, LogicError> {
        self.same_parent(other)?;
        let sel = self.sel.iter().zip(&other.sel).map(|(s, t)| s & t).collect();
        Ok(Self::from_bits_unchecked(&self.parent, sel))
    }

    pub fn join(&self, other: &Subpresheaf) -> Result<Subpresheaf, LogicError> {
        self.same_parent(other)?;
        let sel = self.sel.iter().zip(&other.sel).map(|(s, t)| s | t).collect();
        Ok(Self::from_bits_unchecked(&self.parent, sel))
    }

    /// Heyting implication: `x ∈ (s ⇒ t)(a)` iff every restriction of `x`
    /// lying in `s` also lies in `t`.
    pub fn implies(&self, other: &Subpresheaf) -> Result<Subpresheaf, LogicError> {
        self.same_parent(other)?;
        let x = &self.parent;
        let c = x.cat();
        Ok(Self::from_predicate(x, |a, el| {
            c.arrows_into(a).iter().all(|&phi| {
                let b = c.dom(phi);
                let y = x.act(phi, el);
                !self.sel[b].contains(y) || other.sel[b].contains(y)
            })
        }))
    }

    /// Pseudo-complement `s ⇒ ⊥`.
    pub fn negate(&self) -> Subpresheaf {
        self.implies(&Subpresheaf::bottom(&self.parent)).expect("same parent")
    }

    /// Reifies the subobject as a presheaf in its own right, together with
    /// its inclusion. Elements keep the parent's relative order.
    pub fn to_presheaf(&self) -> (Presheaf, NatTrans) {
        let x = &self.parent;
        let c = x.cat();
        let lists: Vec<Vec<usize>> = self.sel.iter().map(|s| s.ones().collect()).collect();
        let mut position: Vec<Vec<usize>> = c.objects().map(|a| vec![usize::MAX; x.size(a)]).collect();
        for (a, list) in lists.iter().enumerate() {
            for (i, &el) in list.iter().enumerate() {
                position[a][el] = i;
            }
        }
        let sizes = lists.iter().map(Vec::len).collect();
        let action = (0..c.num_morphisms())
            .map(|phi| {
                let b = c.dom(phi);
                lists[c.cod(phi)].iter().map(|&el| position[b][x.act(phi, el)]).collect()
            })
            .collect();
        let sub = Presheaf::from_tables(c, sizes, action);
        let incl = NatTrans::from_components(&sub, x, lists);
        (sub, incl)
    }

    /// Stages flattened into one bit-vector, stage by stage.
    pub fn flat_bits(&self) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(self.parent.total_size());
        let mut off = 0;
        for (a, s) in self.sel.iter().enumerate() {
            for x in s.ones() {
                bits.insert(off + x);
            }
            off += self.parent.size(a);
        }
        bits
    }

    /// All `(stage, element)` pairs in the parent not in `self`.
    pub fn complement_elements(&self) -> Vec<(Obj, usize)> {
        self.parent
            .cat()
            .objects()
            .flat_map(|a| (0..self.parent.size(a)).filter(move |&x| !self.sel[a].contains(x)).map(move |x| (a, x)))
            .collect()
    }
}

/// `f*(t)`: the pointwise preimage of `t ≤ Y` along `f: X → Y`.
pub fn pullback_sub(f: &NatTrans, t: &Subpresheaf) -> Result<Subpresheaf, LogicError> {
    if f.target() != t.parent() {
        return Err(LogicError::ParentMismatch);
    }
    Ok(Subpresheaf::from_predicate(f.source(), |a, x| t.contains(a, f.apply(a, x))))
}

/// `∃_f(s)`: the pointwise image of `s ≤ X` along `f: X → Y`.
pub fn exists_along(f: &NatTrans, s: &Subpresheaf) -> Result<Subpresheaf, LogicError> {
    if f.source() != s.parent() {
        return Err(LogicError::ParentMismatch);
    }
    let y = f.target();
    let sel = y
        .cat()
        .objects()
        .map(|a| {
            let mut bits = FixedBitSet::with_capacity(y.size(a));
            for x in s.elements(a) {
                bits.insert(f.apply(a, x));
            }
            bits
        })
        .collect();
    Ok(Subpresheaf::from_bits_unchecked(y, sel))
}

/// `∀_f(s)`: `y ∈ ∀_f(s)(a)` iff for every `φ: b → a`, every `x ∈ X(b)`
/// with `f(x) = Y(φ)(y)` lies in `s`.
pub fn forall_along(f: &NatTrans, s: &Subpresheaf) -> Result<Subpresheaf, LogicError> {
    if f.source() != s.parent() {
        return Err(LogicError::ParentMismatch);
    }
    let (x, y) = (f.source(), f.target());
    let c = x.cat();
    // bad[b][y'] iff some x over y' at stage b lies outside s
    let bad: Vec<FixedBitSet> = c
        .objects()
        .map(|b| {
            let mut bits = FixedBitSet::with_capacity(y.size(b));
            for el in 0..x.size(b) {
                if !s.contains(b, el) {
                    bits.insert(f.apply(b, el));
                }
            }
            bits
        })
        .collect();
    Ok(Subpresheaf::from_predicate(y, |a, el| {
        c.arrows_into(a).iter().all(|&phi| !bad[c.dom(phi)].contains(y.act(phi, el)))
    }))
}

/// Enumerates every subpresheaf of `x`, failing once more than `cap` have
/// been produced. Order is deterministic.
pub fn all_subobjects(x: &Presheaf, cap: usize) -> Result<Vec<Subpresheaf>, LogicError> {
    let mut out = Vec::new();
    let mut overflow = false;
    for_each_subobject(x, |s| {
        if out.len() >= cap {
            overflow = true;
            return false;
        }
        out.push(s);
        true
    });
    if overflow {
        Err(LogicError::CapExceeded { cap })
    } else {
        Ok(out)
    }
}

/// Visits each subpresheaf of `x` once. Subpresheaves are the down-sets of
/// the restriction preorder on elements; the search decides elements in a
/// fixed order, and including an element forces its restrictions in while
/// excluding one forces out everything restricting to it.
pub fn for_each_subobject(x: &Presheaf, mut visit: impl FnMut(Subpresheaf) -> bool) {
    let c = x.cat();
    let elems: Vec<(Obj, usize)> = c.objects().flat_map(|a| (0..x.size(a)).map(move |e| (a, e))).collect();
    let offsets: Vec<usize> = c.objects().map(|a| x.offset(a)).collect();
    let n = elems.len();
    // down[i]: flat indices of restrictions of element i; up[i]: flat indices restricting to i.
    let mut down = vec![Vec::new(); n];
    let mut up = vec![Vec::new(); n];
    for (i, &(a, e)) in elems.iter().enumerate() {
        for &phi in c.arrows_into(a) {
            let b = c.dom(phi);
            let j = offsets[b] + x.act(phi, e);
            if j != i {
                down[i].push(j);
                up[j].push(i);
            }
        }
    }
    for v in down.iter_mut().chain(up.iter_mut()) {
        v.sort_unstable();
        v.dedup();
    }
    let mut state = vec![0u8; n]; // 0 undecided, 1 in, 2 out
    let mut trail = Vec::new();

    fn force(idx: usize, val: u8, state: &mut [u8], trail: &mut Vec<usize>, down: &[Vec<usize>], up: &[Vec<usize>]) -> bool {
        let mut stack = vec![idx];
        while let Some(i) = stack.pop() {
            if state[i] == val {
                continue;
            }
            if state[i] != 0 {
                return false;
            }
            state[i] = val;
            trail.push(i);
            let next = if val == 1 { &down[i] } else { &up[i] };
            stack.extend(next.iter().copied());
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn go(
        pos: usize,
        state: &mut Vec<u8>,
        trail: &mut Vec<usize>,
        down: &[Vec<usize>],
        up: &[Vec<usize>],
        x: &Presheaf,
        elems: &[(Obj, usize)],
        visit: &mut dyn FnMut(Subpresheaf) -> bool,
    ) -> bool {
        let mut pos = pos;
        while pos < state.len() && state[pos] != 0 {
            pos += 1;
        }
        if pos == state.len() {
            let sel = x
                .cat()
                .objects()
                .map(|a| {
                    let mut bits = FixedBitSet::with_capacity(x.size(a));
                    for (i, &(b, e)) in elems.iter().enumerate() {
                        if b == a && state[i] == 1 {
                            bits.insert(e);
                        }
                    }
                    bits
                })
                .collect();
            return visit(Subpresheaf::from_bits_unchecked(x, sel));
        }
        for val in [2u8, 1u8] {
            let mark = trail.len();
            let ok = force(pos, val, state, trail, down, up);
            if ok && !go(pos + 1, state, trail, down, up, x, elems, visit) {
                return false;
            }
            while trail.len() > mark {
                let i = trail.pop().expect("trail entry");
                state[i] = 0;
            }
        }
        true
    }

    go(0, &mut state, &mut trail, &down, &up, x, &elems, &mut visit);
}

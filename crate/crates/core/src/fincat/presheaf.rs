use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::{FinCatError, FinCategory, Mor, Obj};

struct PresheafData {
    cat: FinCategory,
    sizes: Vec<usize>,
    /// `action[φ][x]` for `φ: b → a` and `x ∈ X(a)` is `X(φ)(x) ∈ X(b)`.
    action: Vec<Vec<usize>>,
    fingerprint: u64,
}

/// A presheaf of finite sets on a [`FinCategory`].
///
/// Elements of `X(a)` are the indices `0..X(a)`. For `φ: b → a` the action
/// goes `X(a) → X(b)`; every module in the crate uses this convention.
///
/// Equality is on the nose: same category, same carrier sizes, same tables.
/// Cloning shares the underlying tables.
#[derive(Clone)]
pub struct Presheaf(Arc<PresheafData>);

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.fingerprint == other.0.fingerprint
                && self.0.sizes == other.0.sizes
                && self.0.action == other.0.action
                && self.0.cat == other.0.cat)
    }
}

impl Eq for Presheaf {}

impl Hash for Presheaf {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.fingerprint);
    }
}

impl fmt::Debug for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Presheaf").field("sizes", &self.0.sizes).field("action", &self.0.action).finish()
    }
}

impl Presheaf {
    /// Builds a presheaf, checking table shapes and functoriality.
    pub fn new(cat: &FinCategory, sizes: Vec<usize>, action: Vec<Vec<usize>>) -> Result<Self, FinCatError> {
        if sizes.len() != cat.num_objects() {
            return Err(FinCatError::Malformed(format!(
                "presheaf has {} carriers for {} objects",
                sizes.len(),
                cat.num_objects()
            )));
        }
        if action.len() != cat.num_morphisms() {
            return Err(FinCatError::Malformed(format!(
                "presheaf has {} action tables for {} morphisms",
                action.len(),
                cat.num_morphisms()
            )));
        }
        for (phi, table) in action.iter().enumerate() {
            let (b, a) = (cat.dom(phi), cat.cod(phi));
            if table.len() != sizes[a] || table.iter().any(|&y| y >= sizes[b]) {
                return Err(FinCatError::Malformed(format!(
                    "action table of {} does not map X({}) into X({})",
                    cat.morphism(phi).name,
                    cat.object_name(a),
                    cat.object_name(b)
                )));
            }
        }
        let x = Self::from_tables(cat, sizes, action);
        x.check_functorial()?;
        Ok(x)
    }

    /// Builds a presheaf from tables that are known to be well-formed.
    pub(crate) fn from_tables(cat: &FinCategory, sizes: Vec<usize>, action: Vec<Vec<usize>>) -> Self {
        let mut h = DefaultHasher::new();
        sizes.hash(&mut h);
        action.hash(&mut h);
        let fingerprint = h.finish();
        Presheaf(Arc::new(PresheafData { cat: cat.clone(), sizes, action, fingerprint }))
    }

    fn check_functorial(&self) -> Result<(), FinCatError> {
        let c = self.cat();
        for a in c.objects() {
            let id = c.identity(a);
            if self.0.action[id].iter().enumerate().any(|(x, &y)| x != y) {
                return Err(FinCatError::NotFunctorial(format!(
                    "X({}) is not the identity",
                    c.morphism(id).name
                )));
            }
        }
        for phi in 0..c.num_morphisms() {
            for &psi in c.arrows_into(c.dom(phi)) {
                let comp = c.compose(phi, psi);
                for x in 0..self.size(c.cod(phi)) {
                    if self.act(comp, x) != self.act(psi, self.act(phi, x)) {
                        return Err(FinCatError::NotFunctorial(format!(
                            "X({} ∘ {}) ≠ X({}) ∘ X({}) at element {}",
                            c.morphism(phi).name,
                            c.morphism(psi).name,
                            c.morphism(psi).name,
                            c.morphism(phi).name,
                            x
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn cat(&self) -> &FinCategory {
        &self.0.cat
    }

    pub fn size(&self, a: Obj) -> usize {
        self.0.sizes[a]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0.sizes
    }

    pub fn total_size(&self) -> usize {
        self.0.sizes.iter().sum()
    }

    /// `X(φ)(x)`.
    #[inline]
    pub fn act(&self, phi: Mor, x: usize) -> usize {
        self.0.action[phi][x]
    }

    pub fn action_table(&self, phi: Mor) -> &[usize] {
        &self.0.action[phi]
    }

    pub fn action_tables(&self) -> &[Vec<usize>] {
        &self.0.action
    }

    /// Offset of stage `a` when all elements are laid out stage by stage.
    pub fn offset(&self, a: Obj) -> usize {
        self.0.sizes[..a].iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total_size() == 0
    }

    /// The terminal presheaf: one element everywhere.
    pub fn terminal(cat: &FinCategory) -> Self {
        Self::constant(cat, 1)
    }

    /// The initial presheaf: empty everywhere.
    pub fn initial(cat: &FinCategory) -> Self {
        Self::constant(cat, 0)
    }

    /// The constant presheaf on an `n`-element set, every action the identity.
    pub fn constant(cat: &FinCategory, n: usize) -> Self {
        let sizes = vec![n; cat.num_objects()];
        let action = (0..cat.num_morphisms()).map(|_| (0..n).collect()).collect();
        Self::from_tables(cat, sizes, action)
    }
}

/// The representable presheaf `y(a)`: `y(a)(b) = hom(b, a)`, acting by
/// precomposition. Elements of `y(a)(b)` are numbered in the order of
/// [`FinCategory::hom`].
pub fn yoneda(cat: &FinCategory, a: Obj) -> Result<Presheaf, FinCatError> {
    if a >= cat.num_objects() {
        return Err(FinCatError::Malformed(format!("object index {a} out of range")));
    }
    let sizes: Vec<usize> = cat.objects().map(|b| cat.hom(b, a).len()).collect();
    let action = (0..cat.num_morphisms())
        .map(|phi| {
            let (c, b) = (cat.dom(phi), cat.cod(phi));
            cat.hom(b, a)
                .iter()
                .map(|&psi| {
                    let comp = cat.compose(psi, phi);
                    cat.hom(c, a).iter().position(|&m| m == comp).expect("composite lies in hom(c, a)")
                })
                .collect()
        })
        .collect();
    Ok(Presheaf::from_tables(cat, sizes, action))
}

/// A natural transformation between presheaves on the same category.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NatTrans {
    source: Presheaf,
    target: Presheaf,
    components: Vec<Vec<usize>>,
}

impl fmt::Debug for NatTrans {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NatTrans").field("components", &self.components).finish()
    }
}

impl NatTrans {
    /// Builds a map, checking shapes and naturality.
    pub fn new(source: &Presheaf, target: &Presheaf, components: Vec<Vec<usize>>) -> Result<Self, FinCatError> {
        if source.cat() != target.cat() {
            return Err(FinCatError::Malformed("source and target live on different categories".into()));
        }
        let c = source.cat();
        if components.len() != c.num_objects() {
            return Err(FinCatError::Malformed("wrong number of components".into()));
        }
        for a in c.objects() {
            if components[a].len() != source.size(a) || components[a].iter().any(|&y| y >= target.size(a)) {
                return Err(FinCatError::Malformed(format!(
                    "component at {} does not map X({0}) into Y({0})",
                    c.object_name(a)
                )));
            }
        }
        let f = NatTrans { source: source.clone(), target: target.clone(), components };
        for phi in 0..c.num_morphisms() {
            let (b, a) = (c.dom(phi), c.cod(phi));
            for x in 0..source.size(a) {
                if target.act(phi, f.components[a][x]) != f.components[b][source.act(phi, x)] {
                    return Err(FinCatError::NotNatural(format!(
                        "square for {} fails at element {} of stage {}",
                        c.morphism(phi).name,
                        x,
                        c.object_name(a)
                    )));
                }
            }
        }
        Ok(f)
    }

    pub(crate) fn from_components(source: &Presheaf, target: &Presheaf, components: Vec<Vec<usize>>) -> Self {
        debug_assert!(NatTrans::new(source, target, components.clone()).is_ok());
        NatTrans { source: source.clone(), target: target.clone(), components }
    }

    pub fn identity(x: &Presheaf) -> Self {
        let components = x.sizes().iter().map(|&n| (0..n).collect()).collect();
        NatTrans { source: x.clone(), target: x.clone(), components }
    }

    /// The unique map into the terminal presheaf.
    pub fn to_terminal(x: &Presheaf) -> Self {
        let one = Presheaf::terminal(x.cat());
        let components = x.sizes().iter().map(|&n| vec![0; n]).collect();
        NatTrans { source: x.clone(), target: one, components }
    }

    /// The unique map out of the initial presheaf.
    pub fn from_initial(x: &Presheaf) -> Self {
        let zero = Presheaf::initial(x.cat());
        let components = x.sizes().iter().map(|_| Vec::new()).collect();
        NatTrans { source: zero, target: x.clone(), components }
    }

    pub fn source(&self) -> &Presheaf {
        &self.source
    }

    pub fn target(&self) -> &Presheaf {
        &self.target
    }

    pub fn cat(&self) -> &FinCategory {
        self.source.cat()
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    #[inline]
    pub fn apply(&self, a: Obj, x: usize) -> usize {
        self.components[a][x]
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &NatTrans) -> Result<NatTrans, FinCatError> {
        if first.target != self.source {
            return Err(FinCatError::Malformed("maps are not composable".into()));
        }
        let components = first
            .components
            .iter()
            .enumerate()
            .map(|(a, comp)| comp.iter().map(|&x| self.components[a][x]).collect())
            .collect();
        Ok(NatTrans { source: first.source.clone(), target: self.target.clone(), components })
    }

    pub fn is_mono(&self) -> bool {
        self.components.iter().enumerate().all(|(a, comp)| {
            let mut seen = vec![false; self.target.size(a)];
            comp.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
        })
    }

    pub fn is_epi(&self) -> bool {
        self.components.iter().enumerate().all(|(a, comp)| {
            let mut seen = vec![false; self.target.size(a)];
            comp.iter().for_each(|&y| seen[y] = true);
            seen.into_iter().all(|s| s)
        })
    }

    pub fn is_iso(&self) -> bool {
        self.source.sizes() == self.target.sizes() && self.is_mono()
    }

    /// The inverse of an isomorphism.
    pub fn inverse(&self) -> Option<NatTrans> {
        if !self.is_iso() {
            return None;
        }
        let components = self
            .components
            .iter()
            .map(|comp| {
                let mut inv = vec![0; comp.len()];
                for (x, &y) in comp.iter().enumerate() {
                    inv[y] = x;
                }
                inv
            })
            .collect();
        Some(NatTrans { source: self.target.clone(), target: self.source.clone(), components })
    }
}

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::FinCatError;

/// Index of an object in a [`FinCategory`].
pub type Obj = usize;
/// Index of a morphism in a [`FinCategory`].
pub type Mor = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Morphism {
    pub name: String,
    pub dom: Obj,
    pub cod: Obj,
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct CategoryData {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<Mor>,
    /// `compose[g * m + f] = Some(g ∘ f)` whenever `cod f = dom g`.
    compose: Vec<Option<Mor>>,
    /// `hom[b][a]`: morphisms `b → a`, in index order.
    hom: Vec<Vec<Vec<Mor>>>,
    /// Morphisms grouped by codomain.
    into: Vec<Vec<Mor>>,
}

/// A finite category given by its composition table.
///
/// Cloning is cheap; the table is shared.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinCategory(Arc<CategoryData>);

impl fmt::Debug for FinCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinCategory")
            .field("objects", &self.0.objects)
            .field("morphisms", &self.0.morphisms.len())
            .finish()
    }
}

impl FinCategory {
    /// Builds a category from raw tables. `table` lists triples `(g, f, g∘f)`.
    ///
    /// Indices are range-checked and every composable pair must have an
    /// entry; the category laws themselves are *not* checked here, see
    /// [`validate_category`].
    pub fn from_parts(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<Mor>,
        table: &[(Mor, Mor, Mor)],
    ) -> Result<Self, FinCatError> {
        let n = objects.len();
        let m = morphisms.len();
        for (i, mor) in morphisms.iter().enumerate() {
            if mor.dom >= n || mor.cod >= n {
                return Err(FinCatError::Malformed(format!(
                    "morphism {} ({}) has an object index out of range",
                    i, mor.name
                )));
            }
        }
        if identities.len() != n {
            return Err(FinCatError::Malformed(format!(
                "expected {} identities, got {}",
                n,
                identities.len()
            )));
        }
        for (a, &id) in identities.iter().enumerate() {
            if id >= m {
                return Err(FinCatError::Malformed(format!("identity of object {a} out of range")));
            }
            if morphisms[id].dom != a || morphisms[id].cod != a {
                return Err(FinCatError::Malformed(format!(
                    "identity {} of object {} is not an endomorphism of it",
                    morphisms[id].name, objects[a]
                )));
            }
        }
        let mut compose = vec![None; m * m];
        for &(g, f, h) in table {
            if g >= m || f >= m || h >= m {
                return Err(FinCatError::Malformed(format!(
                    "composition entry ({g}, {f}) -> {h} out of range"
                )));
            }
            if morphisms[f].cod != morphisms[g].dom {
                return Err(FinCatError::Malformed(format!(
                    "composition entry {} ∘ {} is not composable",
                    morphisms[g].name, morphisms[f].name
                )));
            }
            if morphisms[h].dom != morphisms[f].dom || morphisms[h].cod != morphisms[g].cod {
                return Err(FinCatError::Malformed(format!(
                    "composite {} ∘ {} = {} has the wrong domain or codomain",
                    morphisms[g].name, morphisms[f].name, morphisms[h].name
                )));
            }
            match compose[g * m + f] {
                Some(prev) if prev != h => {
                    return Err(FinCatError::Malformed(format!(
                        "composite {} ∘ {} given twice with different values",
                        morphisms[g].name, morphisms[f].name
                    )))
                }
                _ => compose[g * m + f] = Some(h),
            }
        }
        for g in 0..m {
            for f in 0..m {
                if morphisms[f].cod == morphisms[g].dom && compose[g * m + f].is_none() {
                    return Err(FinCatError::Malformed(format!(
                        "missing composite {} ∘ {}",
                        morphisms[g].name, morphisms[f].name
                    )));
                }
            }
        }
        let mut hom = vec![vec![Vec::new(); n]; n];
        let mut into = vec![Vec::new(); n];
        for (i, mor) in morphisms.iter().enumerate() {
            hom[mor.dom][mor.cod].push(i);
            into[mor.cod].push(i);
        }
        Ok(FinCategory(Arc::new(CategoryData { objects, morphisms, identities, compose, hom, into })))
    }

    /// Builds a category where identities are implicit: `identities[a]` is
    /// added for every object and every composite with an identity is
    /// filled in, so `table` only needs the non-identity composites.
    pub fn with_implicit_identities(
        objects: Vec<String>,
        arrows: Vec<Morphism>,
        table: &[(Mor, Mor, Mor)],
    ) -> Result<Self, FinCatError> {
        let n = objects.len();
        let mut morphisms: Vec<Morphism> = objects
            .iter()
            .enumerate()
            .map(|(a, name)| Morphism { name: format!("id_{name}"), dom: a, cod: a })
            .collect();
        morphisms.extend(arrows);
        let identities: Vec<Mor> = (0..n).collect();
        let shift: Vec<(Mor, Mor, Mor)> = table.iter().map(|&(g, f, h)| (g + n, f + n, h + n)).collect();
        let mut full = shift;
        for (i, mor) in morphisms.iter().enumerate() {
            if mor.dom >= n || mor.cod >= n {
                return Err(FinCatError::Malformed(format!(
                    "morphism {} has an object index out of range",
                    mor.name
                )));
            }
            full.push((identities[mor.cod], i, i));
            if i >= n {
                full.push((i, identities[mor.dom], i));
            }
        }
        Self::from_parts(objects, morphisms, identities, &full)
    }

    pub fn num_objects(&self) -> usize {
        self.0.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.0.morphisms.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = Obj> {
        0..self.0.objects.len()
    }

    pub fn object_name(&self, a: Obj) -> &str {
        &self.0.objects[a]
    }

    pub fn object_names(&self) -> &[String] {
        &self.0.objects
    }

    pub fn morphism(&self, f: Mor) -> &Morphism {
        &self.0.morphisms[f]
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.0.morphisms
    }

    pub fn dom(&self, f: Mor) -> Obj {
        self.0.morphisms[f].dom
    }

    pub fn cod(&self, f: Mor) -> Obj {
        self.0.morphisms[f].cod
    }

    pub fn identity(&self, a: Obj) -> Mor {
        self.0.identities[a]
    }

    pub fn is_identity(&self, f: Mor) -> bool {
        self.0.identities[self.cod(f)] == f
    }

    /// `g ∘ f`. Panics if the pair is not composable.
    pub fn compose(&self, g: Mor, f: Mor) -> Mor {
        let m = self.num_morphisms();
        self.0.compose[g * m + f].unwrap_or_else(|| {
            panic!("{} ∘ {} is not composable", self.0.morphisms[g].name, self.0.morphisms[f].name)
        })
    }

    pub fn try_compose(&self, g: Mor, f: Mor) -> Option<Mor> {
        self.0.compose[g * self.num_morphisms() + f]
    }

    /// Morphisms `b → a`.
    pub fn hom(&self, b: Obj, a: Obj) -> &[Mor] {
        &self.0.hom[b][a]
    }

    /// All morphisms with codomain `a`.
    pub fn arrows_into(&self, a: Obj) -> &[Mor] {
        &self.0.into[a]
    }

    pub fn object_index(&self, name: &str) -> Option<Obj> {
        self.0.objects.iter().position(|o| o == name)
    }

    pub fn morphism_index(&self, name: &str) -> Option<Mor> {
        self.0.morphisms.iter().position(|m| m.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum LawViolation {
    LeftIdentity { morphism: String },
    RightIdentity { morphism: String },
    Associativity { h: String, g: String, f: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<LawViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the identity and associativity laws by exhaustion.
pub fn validate_category(c: &FinCategory) -> ValidationReport {
    let mut violations = Vec::new();
    let name = |f: Mor| c.morphism(f).name.clone();
    for f in 0..c.num_morphisms() {
        if c.compose(c.identity(c.cod(f)), f) != f {
            violations.push(LawViolation::LeftIdentity { morphism: name(f) });
        }
        if c.compose(f, c.identity(c.dom(f))) != f {
            violations.push(LawViolation::RightIdentity { morphism: name(f) });
        }
    }
    for f in 0..c.num_morphisms() {
        for g in (0..c.num_morphisms()).filter(|&g| c.dom(g) == c.cod(f)) {
            for h in (0..c.num_morphisms()).filter(|&h| c.dom(h) == c.cod(g)) {
                if c.compose(h, c.compose(g, f)) != c.compose(c.compose(h, g), f) {
                    violations.push(LawViolation::Associativity { h: name(h), g: name(g), f: name(f) });
                }
            }
        }
    }
    ValidationReport { violations }
}

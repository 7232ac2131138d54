use std::collections::HashMap;

use serde::Serialize;

use super::{Ambient, Presheaves, Sheaves, SmallMapsError};
use crate::closure::ClosureContext;
use crate::fincat::enumerate::presheaves_up_to;
use crate::fincat::{are_isomorphic, homs, pullback, FinCategory, NatTrans, Presheaf};
use crate::sheafify::is_sheaf;

/// A map of the universe, with the indices of its endpoints.
#[derive(Clone, Debug)]
pub struct UniverseMap {
    pub source: usize,
    pub target: usize,
    pub map: NatTrans,
}

/// What the build-time closure check found: every construction result with
/// carriers within `bound` must be isomorphic to a universe object.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClosureCheck {
    pub bound: usize,
    pub constructions: usize,
    pub outside_bound: usize,
    pub missing: Vec<String>,
}

impl ClosureCheck {
    pub fn closed(&self) -> bool {
        self.missing.is_empty()
    }
}

/// The finite arena the axiom quantifiers range over.
#[derive(Clone, Debug)]
pub struct Universe {
    cat: FinCategory,
    pub objects: Vec<Presheaf>,
    pub maps: Vec<UniverseMap>,
    by_pair: HashMap<(usize, usize), Vec<usize>>,
    pub closure: ClosureCheck,
}

impl Universe {
    /// A universe over `objects`, with all maps among them unless `maps` is
    /// given. Declared maps must run between listed objects.
    pub fn new(cat: &FinCategory, objects: Vec<Presheaf>, maps: Option<Vec<NatTrans>>) -> Result<Self, SmallMapsError> {
        Self::build(cat, objects, maps, &Presheaves::new(cat))
    }

    /// Every presheaf with at most `n` elements per stage, up to iso, with
    /// all maps among them.
    pub fn auto(cat: &FinCategory, n: usize) -> Result<Self, SmallMapsError> {
        Self::new(cat, presheaves_up_to(cat, n), None)
    }

    /// The sheaves of `auto(n)`, with all maps among them. Closure is
    /// checked for the sheaf constructions.
    pub fn sheaves(ctx: &ClosureContext, n: usize, cap: usize) -> Result<Self, SmallMapsError> {
        let objects = presheaves_up_to(ctx.cat(), n).into_iter().filter(|x| is_sheaf(ctx, x)).collect();
        Self::build(ctx.cat(), objects, None, &Sheaves::new(ctx, cap))
    }

    /// A universe whose closure is checked for the constructions of `amb`.
    pub fn build(
        cat: &FinCategory,
        objects: Vec<Presheaf>,
        maps: Option<Vec<NatTrans>>,
        amb: &dyn Ambient,
    ) -> Result<Self, SmallMapsError> {
        if objects.iter().any(|x| x.cat() != cat) {
            return Err(SmallMapsError::Malformed("object on a different category".into()));
        }
        let mut out = Vec::new();
        match maps {
            None => {
                for (i, x) in objects.iter().enumerate() {
                    for (j, y) in objects.iter().enumerate() {
                        out.extend(homs(x, y).into_iter().map(|map| UniverseMap { source: i, target: j, map }));
                    }
                }
            }
            Some(ms) => {
                for (k, map) in ms.into_iter().enumerate() {
                    let source = objects.iter().position(|x| x == map.source());
                    let target = objects.iter().position(|x| x == map.target());
                    match (source, target) {
                        (Some(source), Some(target)) => out.push(UniverseMap { source, target, map }),
                        _ => return Err(SmallMapsError::Malformed(format!("map {k} does not run between universe objects"))),
                    }
                }
            }
        }
        let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (k, m) in out.iter().enumerate() {
            by_pair.entry((m.source, m.target)).or_default().push(k);
        }
        let mut u = Universe { cat: cat.clone(), objects, maps: out, by_pair, closure: ClosureCheck::default() };
        u.closure = u.check_closure(amb)?;
        Ok(u)
    }

    pub fn cat(&self) -> &FinCategory {
        &self.cat
    }

    /// Indices of the universe maps `i → j`.
    pub fn maps_between(&self, i: usize, j: usize) -> &[usize] {
        self.by_pair.get(&(i, j)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Indices of the universe maps into object `j`.
    pub fn maps_into(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.objects.len()).flat_map(move |i| self.maps_between(i, j).iter().copied())
    }

    /// Indices of the universe maps out of object `i`.
    pub fn maps_out_of(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.objects.len()).flat_map(move |j| self.maps_between(i, j).iter().copied())
    }

    /// The index of a universe object isomorphic to `x`.
    pub fn find_object(&self, x: &Presheaf) -> Option<usize> {
        self.objects.iter().position(|y| y.sizes() == x.sizes() && are_isomorphic(x, y))
    }

    fn check_closure(&self, amb: &dyn Ambient) -> Result<ClosureCheck, SmallMapsError> {
        let bound = self.objects.iter().flat_map(|x| x.sizes().iter().copied()).max().unwrap_or(0);
        let mut check = ClosureCheck { bound, ..Default::default() };
        let mut visit = |what: String, x: &Presheaf| {
            check.constructions += 1;
            if x.sizes().iter().any(|&s| s > bound) {
                check.outside_bound += 1;
            } else if self.find_object(x).is_none() {
                check.missing.push(what);
            }
        };
        visit("terminal".into(), &Presheaf::terminal(&self.cat));
        visit("initial".into(), &amb.initial()?);
        for (k, m) in self.maps.iter().enumerate() {
            visit(format!("image of map {k}"), &amb.image(&m.map));
        }
        for j in 0..self.objects.len() {
            let into: Vec<usize> = self.maps_into(j).collect();
            for (n, &f) in into.iter().enumerate() {
                for &g in &into[n..] {
                    let pb = pullback(&self.maps[f].map, &self.maps[g].map)?;
                    visit(format!("pullback of maps {f} and {g}"), &pb.presheaf);
                }
            }
        }
        for i in 0..self.objects.len() {
            for j in i..self.objects.len() {
                let s = amb.sum(&[self.objects[i].clone(), self.objects[j].clone()])?;
                visit(format!("sum of objects {i} and {j}"), &s.presheaf);
            }
        }
        Ok(check)
    }
}

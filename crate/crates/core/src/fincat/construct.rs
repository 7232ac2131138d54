//! Pointwise limits, colimits, quotients and images of presheaves.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use super::{FinCatError, FinCategory, NatTrans, Obj, Presheaf};
use crate::logic::Subpresheaf;

/// A finite product with its projections. Elements of the product at each
/// stage are tuples numbered lexicographically (mixed radix, first factor
/// most significant).
#[derive(Clone, Debug)]
pub struct Product {
    pub presheaf: Presheaf,
    pub factors: Vec<Presheaf>,
    pub projections: Vec<NatTrans>,
}

impl Product {
    pub fn encode(&self, a: Obj, coords: &[usize]) -> usize {
        coords.iter().zip(&self.factors).fold(0, |acc, (&c, f)| acc * f.size(a) + c)
    }

    pub fn decode(&self, a: Obj, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (i, f) in self.factors.iter().enumerate().rev() {
            let n = f.size(a);
            out[i] = idx % n;
            idx /= n;
        }
        out
    }

    /// The pairing `⟨f₁, …, fₙ⟩: Z → Π` of maps out of a common source.
    pub fn tuple(&self, maps: &[NatTrans]) -> Result<NatTrans, FinCatError> {
        if maps.len() != self.factors.len() {
            return Err(FinCatError::Malformed("tuple arity does not match the product".into()));
        }
        let src = match maps.first() {
            Some(m) => m.source().clone(),
            None => return Err(FinCatError::Malformed("empty tuple needs an explicit source".into())),
        };
        for (m, f) in maps.iter().zip(&self.factors) {
            if m.source() != &src || m.target() != f {
                return Err(FinCatError::Malformed("tuple components do not match the product".into()));
            }
        }
        let components = src
            .cat()
            .objects()
            .map(|a| {
                (0..src.size(a))
                    .map(|z| {
                        let coords: Vec<usize> = maps.iter().map(|m| m.apply(a, z)).collect();
                        self.encode(a, &coords)
                    })
                    .collect()
            })
            .collect();
        Ok(NatTrans::from_components(&src, &self.presheaf, components))
    }
}

/// The product of a list of presheaves. The empty product is terminal.
pub fn product(cat: &FinCategory, factors: &[Presheaf]) -> Product {
    let sizes: Vec<usize> = cat.objects().map(|a| factors.iter().map(|f| f.size(a)).product()).collect();
    let mut p = Product { presheaf: Presheaf::terminal(cat), factors: factors.to_vec(), projections: Vec::new() };
    let action = (0..cat.num_morphisms())
        .map(|phi| {
            let (b, a) = (cat.dom(phi), cat.cod(phi));
            (0..sizes[a])
                .map(|idx| {
                    let coords: Vec<usize> =
                        p.decode(a, idx).iter().zip(factors).map(|(&c, f)| f.act(phi, c)).collect();
                    p.encode(b, &coords)
                })
                .collect()
        })
        .collect();
    p.presheaf = Presheaf::from_tables(cat, sizes.clone(), action);
    p.projections = (0..factors.len())
        .map(|i| {
            let components =
                cat.objects().map(|a| (0..sizes[a]).map(|idx| p.decode(a, idx)[i]).collect()).collect();
            NatTrans::from_components(&p.presheaf, &factors[i], components)
        })
        .collect();
    p
}

pub fn binary_product(x: &Presheaf, y: &Presheaf) -> Product {
    product(x.cat(), &[x.clone(), y.clone()])
}

/// `f × g: X × Y → A × B`.
pub fn product_map(f: &NatTrans, g: &NatTrans) -> NatTrans {
    let src = binary_product(f.source(), g.source());
    let tgt = binary_product(f.target(), g.target());
    let cat = f.cat();
    let components = cat
        .objects()
        .map(|a| {
            (0..src.presheaf.size(a))
                .map(|idx| {
                    let c = src.decode(a, idx);
                    tgt.encode(a, &[f.apply(a, c[0]), g.apply(a, c[1])])
                })
                .collect()
        })
        .collect();
    NatTrans::from_components(&src.presheaf, &tgt.presheaf, components)
}

/// A pullback `P = X ×_A Y` with its legs. `P` is reified from the
/// subobject `{(x, y) | f x = g y}` of `X × Y`, so its elements are
/// ordered lexicographically.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub presheaf: Presheaf,
    pub left: NatTrans,
    pub right: NatTrans,
    pub within: Subpresheaf,
    pub product: Product,
}

/// Pullback of the cospan `f: X → A ← Y: g`.
pub fn pullback(f: &NatTrans, g: &NatTrans) -> Result<Pullback, FinCatError> {
    if f.target() != g.target() {
        return Err(FinCatError::Malformed("pullback legs have different codomains".into()));
    }
    let prod = binary_product(f.source(), g.source());
    let within = Subpresheaf::from_predicate(&prod.presheaf, |a, idx| {
        let c = prod.decode(a, idx);
        f.apply(a, c[0]) == g.apply(a, c[1])
    });
    let (presheaf, incl) = within.to_presheaf();
    let left = prod.projections[0].after(&incl)?;
    let right = prod.projections[1].after(&incl)?;
    Ok(Pullback { presheaf, left, right, within, product: prod })
}

impl Pullback {
    /// The canonical map `Z → P` induced by `l: Z → X`, `r: Z → Y` with
    /// `f l = g r`.
    pub fn mediate(&self, l: &NatTrans, r: &NatTrans) -> Result<NatTrans, FinCatError> {
        let z = l.source();
        if r.source() != z {
            return Err(FinCatError::Malformed("cone legs have different sources".into()));
        }
        let cat = z.cat();
        let mut components = Vec::new();
        for a in cat.objects() {
            let index: HashMap<usize, usize> = self.within.elements(a).enumerate().map(|(i, e)| (e, i)).collect();
            let mut comp = Vec::with_capacity(z.size(a));
            for el in 0..z.size(a) {
                let code = self.product.encode(a, &[l.apply(a, el), r.apply(a, el)]);
                match index.get(&code) {
                    Some(&i) => comp.push(i),
                    None => return Err(FinCatError::NotCommuting("cone does not commute over the cospan".into())),
                }
            }
            components.push(comp);
        }
        Ok(NatTrans::from_components(z, &self.presheaf, components))
    }
}

/// The equalizer of `f, g: X → Y`, as a subobject of `X` with its inclusion.
pub fn equalizer(f: &NatTrans, g: &NatTrans) -> Result<(Subpresheaf, Presheaf, NatTrans), FinCatError> {
    if f.source() != g.source() || f.target() != g.target() {
        return Err(FinCatError::Malformed("equalizer needs parallel maps".into()));
    }
    let sub = Subpresheaf::from_predicate(f.source(), |a, x| f.apply(a, x) == g.apply(a, x));
    let (e, incl) = sub.to_presheaf();
    Ok((sub, e, incl))
}

/// A finite coproduct. Elements are laid out summand by summand.
#[derive(Clone, Debug)]
pub struct Coproduct {
    pub presheaf: Presheaf,
    pub summands: Vec<Presheaf>,
    pub injections: Vec<NatTrans>,
}

impl Coproduct {
    pub fn offset(&self, a: Obj, summand: usize) -> usize {
        self.summands[..summand].iter().map(|s| s.size(a)).sum()
    }

    /// The copairing `[f₁, …, fₙ]: Σ → Z`.
    pub fn copair(&self, maps: &[NatTrans]) -> Result<NatTrans, FinCatError> {
        let tgt = match maps.first() {
            Some(m) => m.target().clone(),
            None => return Err(FinCatError::Malformed("empty copairing needs an explicit target".into())),
        };
        if maps.len() != self.summands.len()
            || maps.iter().zip(&self.summands).any(|(m, s)| m.source() != s || m.target() != &tgt)
        {
            return Err(FinCatError::Malformed("copairing components do not match the coproduct".into()));
        }
        let components = tgt
            .cat()
            .objects()
            .map(|a| maps.iter().flat_map(|m| m.components()[a].iter().copied()).collect())
            .collect();
        Ok(NatTrans::from_components(&self.presheaf, &tgt, components))
    }
}

pub fn coproduct(cat: &FinCategory, summands: &[Presheaf]) -> Coproduct {
    let sizes: Vec<usize> = cat.objects().map(|a| summands.iter().map(|s| s.size(a)).sum()).collect();
    let offs = |a: Obj, i: usize| -> usize { summands[..i].iter().map(|s| s.size(a)).sum() };
    let action = (0..cat.num_morphisms())
        .map(|phi| {
            let (b, a) = (cat.dom(phi), cat.cod(phi));
            summands
                .iter()
                .enumerate()
                .flat_map(|(i, s)| (0..s.size(a)).map(move |x| (i, s.act(phi, x))))
                .map(|(i, y)| offs(b, i) + y)
                .collect()
        })
        .collect();
    let presheaf = Presheaf::from_tables(cat, sizes, action);
    let injections = summands
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let components = cat.objects().map(|a| (0..s.size(a)).map(|x| offs(a, i) + x).collect()).collect();
            NatTrans::from_components(s, &presheaf, components)
        })
        .collect();
    Coproduct { presheaf, summands: summands.to_vec(), injections }
}

/// `f + g: X + Y → A + B`.
pub fn coproduct_map(f: &NatTrans, g: &NatTrans) -> NatTrans {
    let cat = f.cat();
    let src = coproduct(cat, &[f.source().clone(), g.source().clone()]);
    let tgt = coproduct(cat, &[f.target().clone(), g.target().clone()]);
    let fa = tgt.injections[0].after(f).expect("composable");
    let gb = tgt.injections[1].after(g).expect("composable");
    src.copair(&[fa, gb]).expect("well-typed copairing")
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, i: usize, j: usize) {
        let (ri, rj) = (self.find(i), self.find(j));
        // keep the smaller index as root so classes are named by their least member
        if ri < rj {
            self.0[rj] = ri;
        } else if rj < ri {
            self.0[ri] = rj;
        }
    }
}

/// Quotients `y` by the pointwise partitions given as class labels, where
/// the caller guarantees the partition is compatible with restriction.
/// Classes are numbered by their least member.
fn quotient_by_labels(y: &Presheaf, mut roots: Vec<Vec<usize>>) -> (Presheaf, NatTrans) {
    let cat = y.cat();
    let mut class_index: Vec<Vec<usize>> = Vec::new();
    let mut reps: Vec<Vec<usize>> = Vec::new();
    for a in cat.objects() {
        let mut idx = vec![usize::MAX; y.size(a)];
        let mut r = Vec::new();
        for x in 0..y.size(a) {
            let root = roots[a][x];
            if idx[root] == usize::MAX {
                idx[root] = r.len();
                r.push(x);
            }
        }
        class_index.push(idx);
        reps.push(r);
    }
    let proj: Vec<Vec<usize>> =
        cat.objects().map(|a| (0..y.size(a)).map(|x| class_index[a][roots[a][x]]).collect()).collect();
    roots.clear();
    let sizes = reps.iter().map(Vec::len).collect();
    let action = (0..cat.num_morphisms())
        .map(|phi| {
            let (b, a) = (cat.dom(phi), cat.cod(phi));
            reps[a].iter().map(|&x| proj[b][y.act(phi, x)]).collect()
        })
        .collect();
    let q = Presheaf::from_tables(cat, sizes, action);
    let qmap = NatTrans::from_components(y, &q, proj);
    (q, qmap)
}

/// The coequalizer of `f, g: X → Y`: the pointwise quotient of `Y` by the
/// equivalence relation generated by `f x ~ g x`.
pub fn coequalizer(f: &NatTrans, g: &NatTrans) -> Result<(Presheaf, NatTrans), FinCatError> {
    if f.source() != g.source() || f.target() != g.target() {
        return Err(FinCatError::Malformed("coequalizer needs parallel maps".into()));
    }
    let y = f.target();
    let cat = y.cat();
    let roots = cat
        .objects()
        .map(|a| {
            let mut uf = UnionFind::new(y.size(a));
            for x in 0..f.source().size(a) {
                uf.union(f.apply(a, x), g.apply(a, x));
            }
            (0..y.size(a)).map(|i| uf.find(i)).collect()
        })
        .collect();
    Ok(quotient_by_labels(y, roots))
}

/// The quotient of `x` by an equivalence relation `r ≤ x × x`, with its
/// projection. The relation must be given on [`binary_product`]`(x, x)`.
pub fn quotient_by_equivalence(x: &Presheaf, r: &Subpresheaf) -> Result<(Presheaf, NatTrans), FinCatError> {
    let prod = binary_product(x, x);
    if r.parent() != &prod.presheaf {
        return Err(FinCatError::Malformed("relation is not a subobject of X × X".into()));
    }
    let cat = x.cat();
    let name = |a: Obj| cat.object_name(a).to_string();
    let mut roots = Vec::new();
    for a in cat.objects() {
        let n = x.size(a);
        let rel = |i: usize, j: usize| r.contains(a, prod.encode(a, &[i, j]));
        for i in 0..n {
            if !rel(i, i) {
                return Err(FinCatError::NotEquivalence { stage: name(a), pair: (i, i), law: "reflexivity" });
            }
            for j in 0..n {
                if rel(i, j) && !rel(j, i) {
                    return Err(FinCatError::NotEquivalence { stage: name(a), pair: (i, j), law: "symmetry" });
                }
                if rel(i, j) {
                    for k in 0..n {
                        if rel(j, k) && !rel(i, k) {
                            return Err(FinCatError::NotEquivalence {
                                stage: name(a),
                                pair: (i, k),
                                law: "transitivity",
                            });
                        }
                    }
                }
            }
        }
        roots.push((0..n).map(|i| (0..n).find(|&j| rel(i, j)).expect("reflexive")).collect());
    }
    Ok(quotient_by_labels(x, roots))
}

/// Epi-mono factorization of `f: X → Y`. Returns the image as a subobject
/// of `Y`, the reified image presheaf, the epimorphism onto it and the
/// inclusion.
#[derive(Clone, Debug)]
pub struct ImageFactorization {
    pub image: Subpresheaf,
    pub presheaf: Presheaf,
    pub epi: NatTrans,
    pub mono: NatTrans,
}

pub fn image_factorization(f: &NatTrans) -> ImageFactorization {
    let y = f.target();
    let cat = y.cat();
    let sel: Vec<FixedBitSet> = cat
        .objects()
        .map(|a| {
            let mut bits = FixedBitSet::with_capacity(y.size(a));
            for &v in &f.components()[a] {
                bits.insert(v);
            }
            bits
        })
        .collect();
    let image = Subpresheaf::from_bits_unchecked(y, sel);
    let (presheaf, mono) = image.to_presheaf();
    let components = cat
        .objects()
        .map(|a| {
            let pos: HashMap<usize, usize> = image.elements(a).enumerate().map(|(i, e)| (e, i)).collect();
            f.components()[a].iter().map(|v| pos[v]).collect()
        })
        .collect();
    let epi = NatTrans::from_components(f.source(), &presheaf, components);
    ImageFactorization { image, presheaf, epi, mono }
}

/// The kernel pair `{(x, x') | f x = f x'}` as a subobject of `X × X`.
pub fn kernel_pair(f: &NatTrans) -> Subpresheaf {
    let prod = binary_product(f.source(), f.source());
    Subpresheaf::from_predicate(&prod.presheaf, |a, idx| {
        let c = prod.decode(a, idx);
        f.apply(a, c[0]) == f.apply(a, c[1])
    })
}

/// The diagonal `Δ_X ≤ X × X`.
pub fn diagonal(x: &Presheaf) -> Subpresheaf {
    kernel_pair(&NatTrans::identity(x))
}

/// The graph `{(f x, x)} ≤ A × X` of `f: X → A`.
pub fn graph(f: &NatTrans) -> Subpresheaf {
    let prod = binary_product(f.target(), f.source());
    Subpresheaf::from_predicate(&prod.presheaf, |a, idx| {
        let c = prod.decode(a, idx);
        f.apply(a, c[1]) == c[0]
    })
}

use super::{FinCatError, FinCategory, NatTrans, Obj, Presheaf};

#[derive(Clone, Debug)]
pub struct DiagramArrow {
    pub source: usize,
    pub target: usize,
    pub map: NatTrans,
}

/// A finite diagram of presheaves: a graph of vertices and arrows, plus
/// optional commutation equations between paths. A path is a list of arrow
/// indices, applied first to last.
#[derive(Clone, Debug)]
pub struct PresheafDiagram {
    pub cat: FinCategory,
    pub vertices: Vec<Presheaf>,
    pub arrows: Vec<DiagramArrow>,
    pub equations: Vec<(Vec<usize>, Vec<usize>)>,
}

impl PresheafDiagram {
    pub fn new(cat: &FinCategory) -> Self {
        PresheafDiagram { cat: cat.clone(), vertices: Vec::new(), arrows: Vec::new(), equations: Vec::new() }
    }

    pub fn vertex(&mut self, x: Presheaf) -> usize {
        self.vertices.push(x);
        self.vertices.len() - 1
    }

    pub fn arrow(&mut self, source: usize, target: usize, map: NatTrans) -> usize {
        self.arrows.push(DiagramArrow { source, target, map });
        self.arrows.len() - 1
    }

    fn path_map(&self, path: &[usize]) -> Result<NatTrans, FinCatError> {
        let mut it = path.iter();
        let first = it.next().ok_or_else(|| FinCatError::Malformed("empty path".into()))?;
        let mut acc = self.arrows[*first].map.clone();
        for &e in it {
            acc = self.arrows[e].map.after(&acc)?;
        }
        Ok(acc)
    }

    /// Checks that every arrow is typed by its endpoints and that every
    /// declared equation holds elementwise.
    pub fn check(&self) -> Result<(), FinCatError> {
        for (i, e) in self.arrows.iter().enumerate() {
            if e.source >= self.vertices.len()
                || e.target >= self.vertices.len()
                || e.map.source() != &self.vertices[e.source]
                || e.map.target() != &self.vertices[e.target]
            {
                return Err(FinCatError::Malformed(format!("arrow {i} is not typed by its endpoints")));
            }
        }
        for (k, (p, q)) in self.equations.iter().enumerate() {
            let (f, g) = (self.path_map(p)?, self.path_map(q)?);
            if f != g {
                return Err(FinCatError::NotCommuting(format!("equation {k} fails")));
            }
        }
        Ok(())
    }
}

/// A limit cone: the apex and one projection per vertex. Elements of the
/// apex are compatible tuples, ordered lexicographically.
#[derive(Clone, Debug)]
pub struct Limit {
    pub apex: Presheaf,
    pub projections: Vec<NatTrans>,
    tuples: Vec<Vec<Vec<usize>>>,
}

impl Limit {
    /// The unique map from another cone's apex into the limit.
    pub fn mediate(&self, legs: &[NatTrans]) -> Result<NatTrans, FinCatError> {
        let z = legs.first().map(|l| l.source().clone()).ok_or_else(|| {
            FinCatError::Malformed("a cone over the empty diagram needs an explicit apex".into())
        })?;
        let components = z
            .cat()
            .objects()
            .map(|a| {
                (0..z.size(a))
                    .map(|el| {
                        let t: Vec<usize> = legs.iter().map(|l| l.apply(a, el)).collect();
                        self.tuples[a]
                            .binary_search(&t)
                            .map_err(|_| FinCatError::NotCommuting("cone is not compatible with the diagram".into()))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(NatTrans::from_components(&z, &self.apex, components))
    }
}

/// Pointwise limit: at each stage, the tuples `(x_v)` with
/// `D(e)(x_source) = x_target` for every arrow `e`.
pub fn limit(d: &PresheafDiagram) -> Result<Limit, FinCatError> {
    d.check()?;
    let cat = &d.cat;
    let nv = d.vertices.len();
    let mut tuples: Vec<Vec<Vec<usize>>> = Vec::new();
    for a in cat.objects() {
        let mut out = Vec::new();
        let mut cur = vec![0usize; nv];
        fn rec(d: &PresheafDiagram, a: Obj, v: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if v == d.vertices.len() {
                out.push(cur.clone());
                return;
            }
            for x in 0..d.vertices[v].size(a) {
                cur[v] = x;
                let ok = d.arrows.iter().all(|e| {
                    let last = e.source.max(e.target);
                    last != v || e.map.apply(a, cur[e.source]) == cur[e.target]
                });
                if ok {
                    rec(d, a, v + 1, cur, out);
                }
            }
        }
        rec(d, a, 0, &mut cur, &mut out);
        tuples.push(out);
    }
    let sizes = tuples.iter().map(Vec::len).collect();
    let action = (0..cat.num_morphisms())
        .map(|phi| {
            let (b, a) = (cat.dom(phi), cat.cod(phi));
            tuples[a]
                .iter()
                .map(|t| {
                    let r: Vec<usize> = t.iter().zip(&d.vertices).map(|(&x, v)| v.act(phi, x)).collect();
                    tuples[b].binary_search(&r).expect("limits are restriction-stable")
                })
                .collect()
        })
        .collect();
    let apex = Presheaf::from_tables(cat, sizes, action);
    let projections = (0..nv)
        .map(|v| {
            let components = cat.objects().map(|a| tuples[a].iter().map(|t| t[v]).collect()).collect();
            NatTrans::from_components(&apex, &d.vertices[v], components)
        })
        .collect();
    Ok(Limit { apex, projections, tuples })
}

/// A colimit cocone: the apex and one injection per vertex.
#[derive(Clone, Debug)]
pub struct Colimit {
    pub apex: Presheaf,
    pub injections: Vec<NatTrans>,
}

impl Colimit {
    /// The unique map from the colimit into another cocone's apex.
    pub fn mediate(&self, legs: &[NatTrans]) -> Result<NatTrans, FinCatError> {
        let z = legs.first().map(|l| l.target().clone()).ok_or_else(|| {
            FinCatError::Malformed("a cocone under the empty diagram needs an explicit apex".into())
        })?;
        let cat = z.cat();
        let mut components = Vec::new();
        for a in cat.objects() {
            let mut comp = vec![usize::MAX; self.apex.size(a)];
            for (inj, leg) in self.injections.iter().zip(legs) {
                for x in 0..inj.source().size(a) {
                    let c = inj.apply(a, x);
                    let v = leg.apply(a, x);
                    if comp[c] != usize::MAX && comp[c] != v {
                        return Err(FinCatError::NotCommuting("cocone is not compatible with the diagram".into()));
                    }
                    comp[c] = v;
                }
            }
            components.push(comp);
        }
        Ok(NatTrans::from_components(&self.apex, &z, components))
    }
}

/// Pointwise colimit: the disjoint union of the vertices modulo the
/// equivalence generated by `x ~ D(e)(x)`. Classes are numbered by their
/// least member in the disjoint union.
pub fn colimit(d: &PresheafDiagram) -> Result<Colimit, FinCatError> {
    d.check()?;
    let cat = &d.cat;
    let sum = super::coproduct(cat, &d.vertices);
    // realize the generated relation as a coequalizer of two maps out of
    // the coproduct of the arrow sources
    let srcs: Vec<Presheaf> = d.arrows.iter().map(|e| d.vertices[e.source].clone()).collect();
    let dom = super::coproduct(cat, &srcs);
    let (apex, q) = if d.arrows.is_empty() {
        (sum.presheaf.clone(), NatTrans::identity(&sum.presheaf))
    } else {
        let left: Vec<NatTrans> = d.arrows.iter().map(|e| sum.injections[e.source].clone()).collect();
        let right: Vec<NatTrans> =
            d.arrows.iter().map(|e| sum.injections[e.target].after(&e.map).expect("typed arrow")).collect();
        let l = dom.copair(&left)?;
        let r = dom.copair(&right)?;
        super::coequalizer(&l, &r)?
    };
    let injections = sum.injections.iter().map(|i| q.after(i).expect("composable")).collect();
    Ok(Colimit { apex, injections })
}

use std::ops::ControlFlow;

use serde_json::json;

use super::{Ambient, AxiomReport, MapFamily, SmallMapsError, Status, Universe};
use crate::closure::Square;
use crate::fincat::search::{for_each_hom, HomQuery};
use crate::fincat::{pullback, NatTrans};

/// Searches the universe for a map `u: E → U` in the family that weakly
/// represents every universe map in the family: each `f: X → A` must sit in
/// `X ← Y → E` over `A ↞ B → U` with the left square a quasi-pullback and
/// the right one a pullback and `h: B ↠ A` an epi of the universe.
///
/// A candidate must also represent `[u, u]: E + E → U` whenever that map is
/// in the family, since on a finite universe a large enough `u` could
/// otherwise cover every listed map by accident.
///
/// `none-in-universe` is not a refutation: larger universes may hold a
/// witness.
pub fn check_s2_bounded(u: &Universe, s: &dyn MapFamily, amb: &dyn Ambient) -> Result<AxiomReport, SmallMapsError> {
    let mut members = Vec::new();
    for k in 0..u.maps.len() {
        if s.contains(&u.maps[k].map)? {
            members.push(k);
        }
    }
    let mut instances = 0;
    for &c in &members {
        if let Some(probed) = weakly_represents(u, s, amb, &u.maps[c].map, u.maps[c].target, &members, &mut instances)? {
            return Ok(AxiomReport {
                axiom: "S2".into(),
                status: Status::FoundWitness,
                witness: Some(json!({ "map": c, "doubling_probe": probed })),
                counterexample: None,
                elapsed: instances,
                note: None,
            });
        }
    }
    Ok(AxiomReport {
        axiom: "S2".into(),
        status: Status::NoneInUniverse,
        witness: None,
        counterexample: None,
        elapsed: instances,
        note: Some(format!(
            "no weakly representing map among {} candidate(s); a bounded search, not a refutation{}",
            members.len(),
            if s.name() == "all" { "; expected for the family of all maps, which is not weakly representable" } else { "" }
        )),
    })
}

/// Whether `cand: E → U`, with `U` universe object `target_u`, represents
/// the universe maps `members` and, when it is in the family, its doubling.
/// `Some(probed)` on success.
pub(crate) fn weakly_represents(
    u: &Universe,
    s: &dyn MapFamily,
    amb: &dyn Ambient,
    cand: &NatTrans,
    target_u: usize,
    members: &[usize],
    instances: &mut usize,
) -> Result<Option<bool>, SmallMapsError> {
    let e = cand.source().clone();
    let sum = amb.sum(&[e.clone(), e])?;
    let probe = amb.copair(&sum, &[cand.clone(), cand.clone()])?;
    let probed = s.contains(&probe)?;
    if probed && !represents(u, amb, cand, target_u, &probe, instances)? {
        return Ok(None);
    }
    for &f in members {
        if !represents(u, amb, cand, target_u, &u.maps[f].map, instances)? {
            return Ok(None);
        }
    }
    Ok(Some(probed))
}

/// Whether `f: X → A` is weakly represented by `cand: E → U`, where `U` is
/// universe object `target_u`.
fn represents(
    u: &Universe,
    amb: &dyn Ambient,
    cand: &NatTrans,
    target_u: usize,
    f: &NatTrans,
    instances: &mut usize,
) -> Result<bool, SmallMapsError> {
    let a = f.target();
    for b in 0..u.objects.len() {
        let hs: Vec<usize> = (0..u.objects.len())
            .filter(|&j| &u.objects[j] == a)
            .flat_map(|j| u.maps_between(b, j).iter().copied())
            .filter(|&h| amb.is_epi(&u.maps[h].map))
            .collect();
        for h in hs {
            let hm = &u.maps[h].map;
            for &k in u.maps_between(b, target_u) {
                *instances += 1;
                let pb = pullback(&u.maps[k].map, cand)?;
                let (y, g) = (&pb.presheaf, &pb.left);
                if amb.pointwise() && !fibers_large_enough(g, hm, f) {
                    continue;
                }
                let allowed = |c: usize, el: usize, x: usize| f.apply(c, x) == hm.apply(c, g.apply(c, el));
                let q = HomQuery { injective: false, fixed: Vec::new(), allowed: Some(&allowed) };
                let mut found = Ok(false);
                for_each_hom(y, f.source(), &q, |comp| {
                    let m = NatTrans::new(y, f.source(), comp.to_vec()).expect("search yields natural maps");
                    let sq = Square { top: m, left: g.clone(), right: f.clone(), bottom: hm.clone() };
                    match amb.is_quasi_pullback(&sq) {
                        Ok(true) => {
                            found = Ok(true);
                            ControlFlow::Break(())
                        }
                        Ok(false) => ControlFlow::Continue(()),
                        Err(e) => {
                            found = Err(e);
                            ControlFlow::Break(())
                        }
                    }
                });
                if found? {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// A pointwise quasi-pullback over `h` needs every fiber of `g` over `b` to
/// surject onto the fiber of `f` over `h b`.
fn fibers_large_enough(g: &NatTrans, h: &NatTrans, f: &NatTrans) -> bool {
    let cat = g.cat();
    cat.objects().all(|c| {
        let mut gcount = vec![0usize; g.target().size(c)];
        for &b in &g.components()[c] {
            gcount[b] += 1;
        }
        let mut fcount = vec![0usize; f.target().size(c)];
        for &a in &f.components()[c] {
            fcount[a] += 1;
        }
        (0..h.source().size(c)).all(|b| gcount[b] >= fcount[h.apply(c, b)])
    })
}

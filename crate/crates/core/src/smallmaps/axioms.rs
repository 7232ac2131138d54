use serde::Serialize;
use serde_json::{json, Value};

use super::{coproduct_map_in, AxiomReport, Ambient, MapFamily, SmallMapsError, Tally, Universe};
use crate::closure::Square;
use crate::fincat::{pullback, NatTrans, Presheaf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Axiom {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
}

impl Axiom {
    pub const ALL: [Axiom; 7] = [Axiom::A1, Axiom::A2, Axiom::A3, Axiom::A4, Axiom::A5, Axiom::A6, Axiom::A7];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::A1 => "A1",
            Axiom::A2 => "A2",
            Axiom::A3 => "A3",
            Axiom::A4 => "A4",
            Axiom::A5 => "A5",
            Axiom::A6 => "A6",
            Axiom::A7 => "A7",
        }
    }
}

struct Run<'a> {
    u: &'a Universe,
    s: &'a dyn MapFamily,
    amb: &'a dyn Ambient,
    member: Vec<Result<bool, SmallMapsError>>,
}

impl Run<'_> {
    fn map(&self, k: usize) -> &NatTrans {
        &self.u.maps[k].map
    }

    /// Whether universe map `k` is in the family; an undecidable premise is
    /// recorded and treated as false.
    fn premise(&self, t: &mut Tally, k: usize) -> bool {
        Self::decided(t, &self.member[k])
    }

    fn decided(t: &mut Tally, r: &Result<bool, SmallMapsError>) -> bool {
        match r {
            Ok(b) => *b,
            Err(e) => {
                t.record(Err(e.clone()), || Value::Null);
                false
            }
        }
    }

    fn epis_into(&self, j: usize) -> Vec<usize> {
        self.u.maps_into(j).filter(|&k| self.amb.is_epi(self.map(k))).collect()
    }

    fn a1(&self) -> Result<AxiomReport, SmallMapsError> {
        let mut t = Tally::new("A1");
        for (i, x) in self.u.objects.iter().enumerate() {
            if !t.record(self.s.contains(&NatTrans::identity(x)), || json!({ "identity_of": i })) {
                return Ok(t.finish());
            }
        }
        for (k, m) in self.u.maps.iter().enumerate() {
            if m.map.is_iso() && !t.record(self.member[k].clone(), || json!({ "isomorphism": k })) {
                return Ok(t.finish());
            }
        }
        for f in 0..self.u.maps.len() {
            if !self.premise(&mut t, f) {
                continue;
            }
            for g in self.u.maps_out_of(self.u.maps[f].target) {
                if !self.premise(&mut t, g) {
                    continue;
                }
                let gf = self.map(g).after(self.map(f))?;
                if !t.record(self.s.contains(&gf), || json!({ "composite": { "first": f, "then": g } })) {
                    return Ok(t.finish());
                }
            }
        }
        Ok(t.finish())
    }

    fn a2(&self) -> Result<AxiomReport, SmallMapsError> {
        let mut t = Tally::new("A2");
        for j in 0..self.u.objects.len() {
            for f in self.u.maps_into(j) {
                if !self.premise(&mut t, f) {
                    continue;
                }
                for h in self.u.maps_into(j) {
                    let pb = pullback(self.map(h), self.map(f))?;
                    let sizes = pb.presheaf.sizes().to_vec();
                    if !t.record(self.s.contains(&pb.left), || json!({ "map": f, "along": h, "pullback_sizes": sizes })) {
                        return Ok(t.finish());
                    }
                }
            }
        }
        Ok(t.finish())
    }

    fn a3(&self) -> Result<AxiomReport, SmallMapsError> {
        let mut t = Tally::new("A3");
        for j in 0..self.u.objects.len() {
            let epis = self.epis_into(j);
            for f in self.u.maps_into(j) {
                for &h in &epis {
                    let pb = pullback(self.map(h), self.map(f))?;
                    if !Run::decided(&mut t, &self.s.contains(&pb.left)) {
                        continue;
                    }
                    if !t.record(self.member[f].clone(), || json!({ "map": f, "cover": h })) {
                        return Ok(t.finish());
                    }
                }
            }
        }
        Ok(t.finish())
    }

    fn a4(&self) -> Result<AxiomReport, SmallMapsError> {
        let mut t = Tally::new("A4");
        let cat = self.amb.cat();
        let one = Presheaf::terminal(cat);
        if !t.record(self.s.contains(&NatTrans::to_terminal(&self.amb.initial()?)), || json!({ "map": "0 -> 1" })) {
            return Ok(t.finish());
        }
        let two = self.amb.sum(&[one.clone(), one.clone()])?;
        let codiag = self.amb.copair(&two, &[NatTrans::identity(&one), NatTrans::identity(&one)])?;
        t.record(self.s.contains(&codiag), || json!({ "map": "1 + 1 -> 1" }));
        Ok(t.finish())
    }

    fn a5(&self) -> Result<AxiomReport, SmallMapsError> {
        let mut t = Tally::new("A5");
        for f in 0..self.u.maps.len() {
            if !self.premise(&mut t, f) {
                continue;
            }
            for g in 0..self.u.maps.len() {
                if !self.premise(&mut t, g) {
                    continue;
                }
                let fg = coproduct_map_in(self.amb, self.map(f), self.map(g))?;
                if !t.record(self.s.contains(&fg), || json!({ "left": f, "right": g })) {
                    return Ok(t.finish());
                }
            }
        }
        Ok(t.finish())
    }

    fn a6(&self) -> Result<AxiomReport, SmallMapsError> {
        let mut t = Tally::new("A6");
        for h in 0..self.u.maps.len() {
            if !self.amb.is_epi(self.map(h)) {
                continue;
            }
            for g in self.u.maps_out_of(self.u.maps[h].target) {
                let gh = self.map(g).after(self.map(h))?;
                if !Run::decided(&mut t, &self.s.contains(&gh)) {
                    continue;
                }
                if !t.record(self.member[g].clone(), || json!({ "epi": h, "map": g })) {
                    return Ok(t.finish());
                }
            }
        }
        Ok(t.finish())
    }

    fn a7(&self) -> Result<AxiomReport, SmallMapsError> {
        let mut t = Tally::new("A7");
        for f in 0..self.u.maps.len() {
            if !self.premise(&mut t, f) {
                continue;
            }
            for p in self.epis_into(self.u.maps[f].source) {
                let found = self.collection_witness(f, p);
                t.record_search(found, || json!({ "map": f, "cover": p }));
            }
        }
        let mut r = t.finish();
        if r.status == super::Status::Verified {
            r.note = Some("every instance has a witness inside the universe".into());
        }
        Ok(r)
    }

    /// For `f: X → A` small and an epi `p: P ↠ X`, looks for an epi
    /// `h: B ↠ A` in the universe such that the projection `g` of
    /// `Y = B ×_A P` is small and `Y → P → X` over `h` is a quasi-pullback.
    fn collection_witness(&self, f: usize, p: usize) -> Result<Option<Value>, SmallMapsError> {
        collection_witness(self.u, self.s, self.amb, self.map(f), self.u.maps[f].target, self.map(p))
    }
}

pub(crate) fn collection_witness(
    u: &Universe,
    s: &dyn MapFamily,
    amb: &dyn Ambient,
    f: &NatTrans,
    a: usize,
    p: &NatTrans,
) -> Result<Option<Value>, SmallMapsError> {
    let fp = f.after(p)?;
    // the codomain itself first: `h = id` settles most instances
    let order = std::iter::once(a).chain((0..u.objects.len()).filter(|&b| b != a));
    for b in order {
        for &h in u.maps_between(b, a) {
            let hm = &u.maps[h].map;
            if !amb.is_epi(hm) {
                continue;
            }
            let pb = pullback(hm, &fp)?;
            if !s.contains(&pb.left)? {
                continue;
            }
            let sq = Square { top: p.after(&pb.right)?, left: pb.left.clone(), right: f.clone(), bottom: hm.clone() };
            if amb.is_quasi_pullback(&sq)? {
                return Ok(Some(json!({ "object": b, "cover": h })));
            }
        }
    }
    Ok(None)
}

/// Checks one axiom by exhaustion over the universe.
pub fn check_axiom(u: &Universe, s: &dyn MapFamily, amb: &dyn Ambient, axiom: Axiom) -> Result<AxiomReport, SmallMapsError> {
    let run = Run { u, s, amb, member: u.maps.iter().map(|m| s.contains(&m.map)).collect() };
    run.check(axiom)
}

/// Checks (A1)–(A7), in order.
pub fn check_axioms(u: &Universe, s: &dyn MapFamily, amb: &dyn Ambient) -> Result<Vec<AxiomReport>, SmallMapsError> {
    let run = Run { u, s, amb, member: u.maps.iter().map(|m| s.contains(&m.map)).collect() };
    Axiom::ALL.iter().map(|&a| run.check(a)).collect()
}

impl Run<'_> {
    fn check(&self, axiom: Axiom) -> Result<AxiomReport, SmallMapsError> {
        match axiom {
            Axiom::A1 => self.a1(),
            Axiom::A2 => self.a2(),
            Axiom::A3 => self.a3(),
            Axiom::A4 => self.a4(),
            Axiom::A5 => self.a5(),
            Axiom::A6 => self.a6(),
            Axiom::A7 => self.a7(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::enumerate::{sierpinski, terminal_category};
    use crate::smallmaps::{AllMaps, DeclaredMaps, Presheaves, Status};

    #[test]
    fn all_maps_pass_on_a_set_universe() {
        let c = terminal_category();
        let u = Universe::auto(&c, 2).unwrap();
        let reports = check_axioms(&u, &AllMaps, &Presheaves::new(&c)).unwrap();
        for r in &reports {
            assert_eq!(r.status, Status::Verified, "{r:?}");
        }
    }

    #[test]
    fn missing_identity_is_named() {
        let c = sierpinski();
        let u = Universe::auto(&c, 1).unwrap();
        let maps = u.maps.iter().filter(|m| m.source != 1 || m.target != 1).map(|m| m.map.clone()).collect();
        let fam = DeclaredMaps { name: "gappy".into(), maps };
        let r = check_axiom(&u, &fam, &Presheaves::new(&c), Axiom::A1).unwrap();
        assert_eq!(r.status, Status::Counterexample);
        assert_eq!(r.counterexample, Some(json!({ "identity_of": 1 })));
    }

    #[test]
    fn a_lone_projection_is_not_pullback_stable() {
        let c = terminal_category();
        let u = Universe::auto(&c, 2).unwrap();
        let mut maps: Vec<NatTrans> = u.objects.iter().map(NatTrans::identity).collect();
        maps.push(NatTrans::to_terminal(&u.objects[2]));
        let fam = DeclaredMaps { name: "projection".into(), maps };
        let amb = Presheaves::new(&c);
        assert_eq!(check_axiom(&u, &fam, &amb, Axiom::A1).unwrap().status, Status::Verified);
        let r = check_axiom(&u, &fam, &amb, Axiom::A2).unwrap();
        assert_eq!(r.status, Status::Counterexample);
        let cx = r.counterexample.unwrap();
        let (f, h) = (cx["map"].as_u64().unwrap() as usize, cx["along"].as_u64().unwrap() as usize);
        let pb = pullback(&u.maps[h].map, &u.maps[f].map).unwrap();
        assert!(!fam.contains(&pb.left).unwrap());
    }
}

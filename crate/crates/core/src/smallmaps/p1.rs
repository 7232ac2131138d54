use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde_json::json;

use super::{Ambient, AxiomReport, MapFamily, PowerStructure, SmallMapsError, Status, Tally, Universe};
use crate::fincat::{binary_product, homs, product_map, NatTrans, Presheaf};
use crate::logic::{for_each_subobject, pullback_sub, Subpresheaf};
use crate::powerobj::PowerError;

/// Checks that the ambient power object of every universe object `X`
/// classifies the admitted families over every universe object `A`:
/// maps `A → P(X)` and admitted `S ⊆ A × X` correspond one to one.
pub fn check_p1(u: &Universe, s: &dyn MapFamily, amb: &dyn Ambient, cap: usize) -> Result<AxiomReport, SmallMapsError> {
    check_p1_with(u, s, amb, &|x| amb.power(x, s, cap))
}

/// [`check_p1`] against a caller-supplied power object.
pub fn check_p1_with(
    u: &Universe,
    s: &dyn MapFamily,
    amb: &dyn Ambient,
    power: &dyn Fn(&Presheaf) -> Result<PowerStructure, SmallMapsError>,
) -> Result<AxiomReport, SmallMapsError> {
    let mut t = Tally::new("P1");
    let mut skipped = Vec::new();
    for (i, x) in u.objects.iter().enumerate() {
        let p = match power(x) {
            Ok(p) => p,
            Err(SmallMapsError::Power(PowerError::CapExceeded { .. })) => {
                skipped.push(i);
                continue;
            }
            Err(SmallMapsError::Power(PowerError::FamilyNotStable { morphism })) => {
                t.record(Ok(false), || json!({ "object": i, "unstable_along": morphism }));
                break;
            }
            Err(e) => return Err(e),
        };
        let (_, mem_incl) = p.membership.to_presheaf();
        let px = binary_product(&p.presheaf, x);
        let mem_leg = px.projections[0].after(&mem_incl)?;
        if !t.record(s.contains(&mem_leg), || json!({ "object": i, "membership_not_in_family": true })) {
            break;
        }
        for (j, a) in u.objects.iter().enumerate() {
            if !classifies(&mut t, s, amb, &p, x, a, i, j)? {
                break;
            }
        }
        if t.done() {
            break;
        }
    }
    let mut r = t.finish();
    if !skipped.is_empty() && r.status == Status::Verified {
        r.status = Status::UnknownWithinBounds;
        r.note = Some(format!("objects {skipped:?} skipped: power object over the cap"));
    }
    Ok(r)
}

#[allow(clippy::too_many_arguments)]
fn classifies(
    t: &mut Tally,
    s: &dyn MapFamily,
    amb: &dyn Ambient,
    p: &PowerStructure,
    x: &Presheaf,
    a: &Presheaf,
    i: usize,
    j: usize,
) -> Result<bool, SmallMapsError> {
    let ax = binary_product(a, x);
    let mut admitted: HashMap<Vec<FixedBitSet>, usize> = HashMap::new();
    let mut order = Vec::new();
    let mut failure = None;
    for_each_subobject(&ax.presheaf, |sub: Subpresheaf| {
        if !amb.admits_subobject(&sub) {
            return true;
        }
        let (_, incl) = sub.to_presheaf();
        let leg = ax.projections[0].after(&incl).expect("family sits in A × X");
        match s.contains(&leg) {
            Ok(true) => {
                order.push(sub.stages().to_vec());
                admitted.insert(sub.stages().to_vec(), 0);
            }
            Ok(false) => {}
            Err(e) => failure = Some(e),
        }
        failure.is_none()
    });
    if let Some(e) = failure {
        t.record(Err(e), || json!(null));
        return Ok(true);
    }
    let id = NatTrans::identity(x);
    for (k, g) in homs(a, &p.presheaf).into_iter().enumerate() {
        let fam = pullback_sub(&product_map(&g, &id), &p.membership)?;
        let hit = admitted.get_mut(fam.stages());
        let ok = hit.is_some();
        if let Some(n) = hit {
            *n += 1;
        }
        if !t.record(Ok(ok), || json!({ "object": i, "over": j, "map": k, "kind": "classified family not admitted" })) {
            return Ok(false);
        }
    }
    for (n, key) in order.iter().enumerate() {
        let count = admitted[key];
        let kind = if count == 0 { "no classifying map" } else { "several classifying maps" };
        if !t.record(Ok(count == 1), || json!({ "object": i, "over": j, "family": n, "kind": kind, "maps": count })) {
            return Ok(false);
        }
    }
    Ok(true)
}

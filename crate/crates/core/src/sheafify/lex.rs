use serde::Serialize;

use super::asf::{apply_functor, sheafify_with_cap, Sheafification};
use super::SheafError;
use crate::closure::ClosureContext;
use crate::fincat::{binary_product, equalizer, homs, image_factorization, pullback, NatTrans, Presheaf};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LexInstance {
    /// `terminal`, `product`, `equalizer` or `pullback`.
    pub kind: &'static str,
    /// Indices of the fixtures involved.
    pub objects: Vec<usize>,
    pub comparison_iso: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LexReport {
    pub instances: Vec<LexInstance>,
    /// Instances skipped because a power object exceeded the cap.
    pub skipped: usize,
}

impl LexReport {
    pub fn passed(&self) -> bool {
        self.instances.iter().all(|i| i.comparison_iso)
    }
}

struct Cache<'a> {
    ctx: &'a ClosureContext,
    cap: usize,
    done: Vec<(Presheaf, Option<Sheafification>)>,
}

impl Cache<'_> {
    fn get(&mut self, x: &Presheaf) -> Result<Option<Sheafification>, SheafError> {
        if let Some((_, s)) = self.done.iter().find(|(y, _)| y == x) {
            return Ok(s.clone());
        }
        let s = match sheafify_with_cap(self.ctx, x, self.cap) {
            Ok(s) => Some(s),
            Err(SheafError::Power(crate::powerobj::PowerError::CapExceeded { .. })) => None,
            Err(e) => return Err(e),
        };
        self.done.push((x.clone(), s.clone()));
        Ok(s)
    }
}

/// Compares `a` of terminal objects, binary products, equalizers and
/// pullbacks among `fixtures` with the corresponding limits of sheafified
/// diagrams, via the canonical comparison maps. At most `per_kind` instances
/// of each kind are run.
pub fn check_left_exactness(
    ctx: &ClosureContext,
    fixtures: &[Presheaf],
    cap: usize,
    per_kind: usize,
) -> Result<LexReport, SheafError> {
    let cat = ctx.cat();
    let mut cache = Cache { ctx, cap, done: Vec::new() };
    let mut report = LexReport::default();

    let one = Presheaf::terminal(cat);
    if let Some(s) = cache.get(&one)? {
        report.instances.push(LexInstance { kind: "terminal", objects: vec![], comparison_iso: s.sheaf.sizes().iter().all(|&n| n == 1) });
    }

    let mut count = 0;
    'prod: for (i, x) in fixtures.iter().enumerate() {
        for (j, y) in fixtures.iter().enumerate().skip(i) {
            if count >= per_kind {
                break 'prod;
            }
            let p = binary_product(x, y);
            let (Some(ap), Some(ax), Some(ay)) = (cache.get(&p.presheaf)?, cache.get(x)?, cache.get(y)?) else {
                report.skipped += 1;
                continue;
            };
            let l = apply_functor(ctx, &ap, &ax, &p.projections[0])?;
            let r = apply_functor(ctx, &ap, &ay, &p.projections[1])?;
            let target = binary_product(&ax.sheaf, &ay.sheaf);
            let cmp = target.tuple(&[l, r])?;
            report.instances.push(LexInstance { kind: "product", objects: vec![i, j], comparison_iso: cmp.is_iso() });
            count += 1;
        }
    }

    count = 0;
    'eq: for (i, x) in fixtures.iter().enumerate() {
        for (j, y) in fixtures.iter().enumerate() {
            let maps = homs(x, y);
            for (k, f) in maps.iter().enumerate() {
                for g in maps.iter().skip(k + 1) {
                    if count >= per_kind {
                        break 'eq;
                    }
                    let (_, e, incl) = equalizer(f, g)?;
                    let (Some(ae), Some(ax), Some(ay)) = (cache.get(&e)?, cache.get(x)?, cache.get(y)?) else {
                        report.skipped += 1;
                        continue;
                    };
                    let ai = apply_functor(ctx, &ae, &ax, &incl)?;
                    let (af, ag) = (apply_functor(ctx, &ax, &ay, f)?, apply_functor(ctx, &ax, &ay, g)?);
                    let (eq_sub, _, _) = equalizer(&af, &ag)?;
                    let iso = ai.is_mono() && image_factorization(&ai).image == eq_sub;
                    report.instances.push(LexInstance { kind: "equalizer", objects: vec![i, j], comparison_iso: iso });
                    count += 1;
                }
            }
        }
    }

    count = 0;
    'pb: for (i, x) in fixtures.iter().enumerate() {
        for (j, y) in fixtures.iter().enumerate().skip(i) {
            for (k, z) in fixtures.iter().enumerate() {
                let fs = homs(x, z);
                let gs = homs(y, z);
                for f in &fs {
                    for g in &gs {
                        if count >= per_kind {
                            break 'pb;
                        }
                        let pb = pullback(f, g)?;
                        let caches =
                            (cache.get(&pb.presheaf)?, cache.get(x)?, cache.get(y)?, cache.get(z)?);
                        let (Some(ap), Some(ax), Some(ay), Some(az)) = caches else {
                            report.skipped += 1;
                            continue;
                        };
                        let l = apply_functor(ctx, &ap, &ax, &pb.left)?;
                        let r = apply_functor(ctx, &ap, &ay, &pb.right)?;
                        let (af, ag) = (apply_functor(ctx, &ax, &az, f)?, apply_functor(ctx, &ay, &az, g)?);
                        let target = pullback(&af, &ag)?;
                        let cmp: NatTrans = target.mediate(&l, &r)?;
                        report.instances.push(LexInstance { kind: "pullback", objects: vec![i, j, k], comparison_iso: cmp.is_iso() });
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(report)
}

//! Runs the presheaf axiom harness on a few predicate families over the
//! auto universes of the fixture categories and prints which axioms hold.

use ltsheaf::fincat::enumerate::fixture_categories;
use ltsheaf::fincat::NatTrans;
use ltsheaf::powerobj::DEFAULT_CAP;
use ltsheaf::smallmaps::{check_axioms, check_p1, AllMaps, MapFamily, PredicateFamily, Presheaves, Status, Universe};

fn main() {
    let families: Vec<Box<dyn MapFamily>> = vec![
        Box::new(AllMaps),
        Box::new(PredicateFamily { name: "isos".into(), pred: |f: &NatTrans| f.is_iso() }),
        Box::new(PredicateFamily { name: "monos".into(), pred: |f: &NatTrans| f.is_mono() }),
        Box::new(PredicateFamily { name: "epis".into(), pred: |f: &NatTrans| f.is_epi() }),
    ];
    for (name, cat) in fixture_categories() {
        for n in [1, 2] {
            let u = Universe::auto(&cat, n).expect("universe");
            let amb = Presheaves::new(&cat);
            for fam in &families {
                let mut reports = check_axioms(&u, fam.as_ref(), &amb).expect("axioms");
                reports.push(check_p1(&u, fam.as_ref(), &amb, DEFAULT_CAP).expect("P1"));
                let line: Vec<String> = reports
                    .iter()
                    .map(|r| format!("{}{}", r.axiom, if r.status == Status::Verified { "+" } else { "-" }))
                    .collect();
                let all = reports.iter().all(|r| r.status == Status::Verified);
                println!("{name:<10} auto({n}) {:<6} {} {}", fam.name(), line.join(" "), if all { "ALL" } else { "" });
            }
        }
    }
}

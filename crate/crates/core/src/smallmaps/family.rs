use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::SmallMapsError;
use crate::closure::ClosureContext;
use crate::fincat::search::find_arrow_iso;
use crate::fincat::{NatTrans, Presheaf};
use crate::powerobj::{is_locally_small_in, power_object, PowerObject};

/// A family of maps, given by its membership predicate.
pub trait MapFamily {
    fn name(&self) -> String;
    fn contains(&self, f: &NatTrans) -> Result<bool, SmallMapsError>;
}

/// Every map.
pub struct AllMaps;

impl MapFamily for AllMaps {
    fn name(&self) -> String {
        "all".into()
    }

    fn contains(&self, _: &NatTrans) -> Result<bool, SmallMapsError> {
        Ok(true)
    }
}

/// An explicit list of maps. Membership is up to isomorphism of arrows,
/// and nothing is added to the list: the harness reports what is missing.
pub struct DeclaredMaps {
    pub name: String,
    pub maps: Vec<NatTrans>,
}

impl MapFamily for DeclaredMaps {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn contains(&self, f: &NatTrans) -> Result<bool, SmallMapsError> {
        Ok(self.maps.iter().any(|m| m == f || find_arrow_iso(f, m).is_some()))
    }
}

/// A family given by an arbitrary predicate.
pub struct PredicateFamily<F> {
    pub name: String,
    pub pred: F,
}

impl<F: Fn(&NatTrans) -> bool> MapFamily for PredicateFamily<F> {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn contains(&self, f: &NatTrans) -> Result<bool, SmallMapsError> {
        Ok((self.pred)(f))
    }
}

/// The locally small maps for a coverage, relative to the family of all
/// maps of presheaves. Power objects and answers are memoized.
pub struct LocallySmallMaps<'a> {
    ctx: &'a ClosureContext,
    cap: usize,
    powers: Mutex<HashMap<Presheaf, Arc<PowerObject>>>,
    answers: Mutex<HashMap<NatTrans, bool>>,
}

impl<'a> LocallySmallMaps<'a> {
    pub fn new(ctx: &'a ClosureContext, cap: usize) -> Self {
        LocallySmallMaps { ctx, cap, powers: Mutex::new(HashMap::new()), answers: Mutex::new(HashMap::new()) }
    }

    fn power(&self, x: &Presheaf) -> Result<Arc<PowerObject>, SmallMapsError> {
        if let Some(p) = self.powers.lock().expect("power cache").get(x) {
            return Ok(p.clone());
        }
        let p = Arc::new(power_object(x, self.cap)?);
        self.powers.lock().expect("power cache").insert(x.clone(), p.clone());
        Ok(p)
    }
}

impl MapFamily for LocallySmallMaps<'_> {
    fn name(&self) -> String {
        "locally-small".into()
    }

    fn contains(&self, f: &NatTrans) -> Result<bool, SmallMapsError> {
        if let Some(&b) = self.answers.lock().expect("answer cache").get(f) {
            return Ok(b);
        }
        let b = is_locally_small_in(self.ctx, f, &*self.power(f.source())?)?;
        self.answers.lock().expect("answer cache").insert(f.clone(), b);
        Ok(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::builtin_context;
    use crate::fincat::enumerate::{sierpinski, sierpinski_collapse};
    use crate::fincat::{find_iso, homs};

    #[test]
    fn declared_membership_is_up_to_arrow_iso() {
        let x = sierpinski_collapse();
        let swap = find_iso(&x, &x).unwrap();
        let fam = DeclaredMaps { name: "ids".into(), maps: vec![NatTrans::identity(&x)] };
        assert!(fam.contains(&swap).unwrap());
        let one = Presheaf::terminal(x.cat());
        assert!(!fam.contains(&NatTrans::to_terminal(&x)).unwrap());
        assert!(!fam.contains(&NatTrans::identity(&one)).unwrap());
    }

    #[test]
    fn everything_is_locally_small_over_presheaves() {
        let c = sierpinski();
        let ctx = builtin_context(&c, "dense").unwrap();
        let fam = LocallySmallMaps::new(&ctx, 16);
        let x = sierpinski_collapse();
        for f in homs(&x, &x) {
            assert!(fam.contains(&f).unwrap());
        }
    }
}

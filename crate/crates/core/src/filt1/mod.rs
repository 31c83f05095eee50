//! Window-truncated filtered groups indexed by integer chains.

pub mod numfield;
pub mod triple;

use serde::{Deserialize, Serialize};

use crate::archimed::C0arObject;
use crate::finabel::{quotient, FinAbGroup, Subgroup};
use crate::{Error, Result};

pub use triple::{amalgam1, fibered_product1, AdmissibleTriple1, Square1};

/// Behaviour of the filtration beyond the stored window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tail {
    /// the chain stops: F(i) = F(lo) below, F(i) = F(hi) above
    Trivial,
    /// the chain continues with finite quotients
    FiniteStable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Presentation {
    /// ambient W = F(hi)/F(lo) and levels S_i = F(i)/F(lo), lo <= i <= hi
    Fin { ambient: FinAbGroup, levels: Vec<Subgroup> },
    /// consecutive quotients F(i+1)/F(i), lo <= i < hi
    Ar { quotients: Vec<C0arObject> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilteredObject1 {
    pub lo: i64,
    pub hi: i64,
    pub pres: Presentation,
    pub lower: Tail,
    pub upper: Tail,
    pub o_ref: i64,
}

/// F(b)/F(a) with its relation to the ambient group.
#[derive(Clone, Debug)]
pub struct WindowGroup {
    pub a: i64,
    pub b: i64,
    pub group: FinAbGroup,
    /// ambient index -> window index, for ambient points in S_b
    pub w_to_q: Vec<Option<usize>>,
    /// one ambient representative per window element
    pub reps: Vec<usize>,
}

impl FilteredObject1 {
    pub fn new_fin(
        lo: i64,
        ambient: FinAbGroup,
        levels: Vec<Subgroup>,
        lower: Tail,
        upper: Tail,
        o_ref: i64,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Invalid("a window needs at least one level".into()));
        }
        let hi = lo + levels.len() as i64 - 1;
        if levels.iter().any(|s| s.group() != &ambient || !s.is_canonical()) {
            return Err(Error::NotCanonical);
        }
        if levels[0].order() != 1 || levels.last().unwrap().order() != ambient.order() {
            return Err(Error::Invalid("levels must run from 0 to the ambient group".into()));
        }
        if levels.windows(2).any(|w| !w[0].is_subgroup_of(&w[1])) {
            return Err(Error::Invalid("levels not nested".into()));
        }
        if o_ref < lo || o_ref > hi {
            return Err(Error::Invalid("o_ref outside window".into()));
        }
        Ok(Self {
            lo,
            hi,
            pres: Presentation::Fin { ambient, levels },
            lower,
            upper,
            o_ref,
        })
    }

    pub fn new_ar(lo: i64, quotients: Vec<C0arObject>, lower: Tail, upper: Tail, o_ref: i64) -> Result<Self> {
        let hi = lo + quotients.len() as i64;
        if o_ref < lo || o_ref > hi {
            return Err(Error::Invalid("o_ref outside window".into()));
        }
        Ok(Self {
            lo,
            hi,
            pres: Presentation::Ar { quotients },
            lower,
            upper,
            o_ref,
        })
    }

    /// Window [lo, hi] of F_q((t)) with F(i) = t^{-i} F_q[[t]]; coordinate c
    /// of the ambient (Z/q)^{hi-lo} is the coefficient of t^{c - hi}.
    pub fn laurent(q: i64, lo: i64, hi: i64, lower: Tail, upper: Tail, o_ref: i64) -> Result<Self> {
        let n = (hi - lo) as usize;
        let ambient = if n == 0 {
            FinAbGroup::trivial()
        } else {
            FinAbGroup::new(vec![q; n])?
        };
        let levels = (lo..=hi)
            .map(|i| {
                let k = (i - lo) as usize;
                let gens: Vec<Vec<i64>> = (0..k)
                    .map(|c| (0..n).map(|j| (j == c) as i64).collect())
                    .collect();
                Subgroup::generated_by(&ambient, &gens)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new_fin(lo, ambient, levels, lower, upper, o_ref)
    }

    pub fn ambient(&self) -> Option<&FinAbGroup> {
        match &self.pres {
            Presentation::Fin { ambient, .. } => Some(ambient),
            Presentation::Ar { .. } => None,
        }
    }

    pub fn fin(&self) -> Result<(&FinAbGroup, &[Subgroup])> {
        match &self.pres {
            Presentation::Fin { ambient, levels } => Ok((ambient, levels)),
            Presentation::Ar { .. } => Err(Error::Invalid("operation needs a finite-flavour object".into())),
        }
    }

    pub fn level(&self, i: i64) -> Result<&Subgroup> {
        let (_, levels) = self.fin()?;
        let i = i.clamp(self.lo, self.hi);
        Ok(&levels[(i - self.lo) as usize])
    }

    /// Order of S_i (levels below the window count as trivial).
    pub fn level_order(&self, i: i64) -> Result<usize> {
        Ok(self.level(i)?.order())
    }

    pub fn window_group(&self, a: i64, b: i64) -> Result<WindowGroup> {
        if a > b || a < self.lo || b > self.hi {
            return Err(Error::Invalid(format!("window [{a},{b}] outside [{},{}]", self.lo, self.hi)));
        }
        let (w, _) = self.fin()?;
        let sb = self.level(b)?;
        let sa = self.level(a)?;
        let (k, incl) = sb.as_group();
        let sub = incl.preimage(sa)?;
        let (q, proj) = quotient(&k, &sub)?;
        let mut w_to_q = vec![None; w.order()];
        let mut reps = vec![usize::MAX; q.order()];
        for y in k.elements() {
            let x = w.index_of(&incl.apply(&y));
            let z = q.index_of(&proj.apply(&y));
            w_to_q[x] = Some(z);
            if reps[z] == usize::MAX {
                reps[z] = x;
            }
        }
        Ok(WindowGroup { a, b, group: q, w_to_q, reps })
    }

    pub fn is_compact1(&self) -> bool {
        match &self.pres {
            Presentation::Fin { .. } => self.upper == Tail::Trivial,
            Presentation::Ar { quotients } => {
                self.upper == Tail::Trivial && quotients.iter().all(|c| c.is_compact())
            }
        }
    }

    pub fn is_discrete1(&self) -> bool {
        match &self.pres {
            Presentation::Fin { .. } => self.lower == Tail::Trivial,
            Presentation::Ar { quotients } => {
                self.lower == Tail::Trivial && quotients.iter().all(|c| c.is_discrete())
            }
        }
    }

    pub fn is_complete(&self) -> bool {
        true
    }

    /// Tail tags promising finite quotients next to non-compact (below) or
    /// non-discrete (above) window quotients.
    pub fn tag_violations(&self) -> Vec<String> {
        let mut out = vec![];
        if let Presentation::Ar { quotients } = &self.pres {
            if self.lower == Tail::FiniteStable {
                if let Some(c) = quotients.first() {
                    if !c.is_compact() {
                        out.push(format!("lower tail continues below a non-compact quotient {:?}", c));
                    }
                }
            }
            if self.upper == Tail::FiniteStable {
                if let Some(c) = quotients.last() {
                    if !c.is_discrete() {
                        out.push(format!("upper tail continues above a non-discrete quotient {:?}", c));
                    }
                }
            }
        }
        out
    }

    pub fn dual1(&self) -> FilteredObject1 {
        let pres = match &self.pres {
            Presentation::Fin { ambient, levels } => Presentation::Fin {
                ambient: ambient.dual(),
                levels: levels.iter().rev().map(|s| s.annihilator()).collect(),
            },
            Presentation::Ar { quotients } => Presentation::Ar {
                quotients: quotients.iter().rev().map(|c| c.dual()).collect(),
            },
        };
        FilteredObject1 {
            lo: -self.hi,
            hi: -self.lo,
            pres,
            lower: self.upper,
            upper: self.lower,
            o_ref: -self.o_ref,
        }
    }

    /// Completion; window objects are already complete, so this canonicalizes.
    pub fn completion_psi(&self) -> FilteredObject1 {
        let mut out = self.clone();
        if let Presentation::Fin { ambient, levels } = &mut out.pres {
            for s in levels.iter_mut() {
                *s = Subgroup::generated_by(ambient, s.rows()).unwrap();
            }
        }
        out
    }

    /// Restriction of the chain to the sub-window [a, b] with new tags.
    pub fn subwindow(&self, a: i64, b: i64) -> Result<FilteredObject1> {
        let wg = self.window_group(a, b)?;
        let (w, _) = self.fin()?;
        let q = &wg.group;
        let mut levels = vec![];
        for i in a..=b {
            let gens: Vec<Vec<i64>> = self
                .level(i)?
                .elements()
                .into_iter()
                .map(|x| q.element(wg.w_to_q[w.index_of(&x)].unwrap()))
                .collect();
            levels.push(Subgroup::generated_by(q, &gens)?);
        }
        let lower = if a == self.lo { self.lower } else { Tail::FiniteStable };
        let upper = if b == self.hi { self.upper } else { Tail::FiniteStable };
        FilteredObject1::new_fin(a, q.clone(), levels, lower, upper, self.o_ref.clamp(a, b))
    }

    fn level_list(&self) -> Option<&[Subgroup]> {
        match &self.pres {
            Presentation::Fin { levels, .. } => Some(levels),
            _ => None,
        }
    }
}

/// E1 dominates E2: every level of E2 occurs in E1 via phi.
#[derive(Clone, Debug, PartialEq)]
pub struct DominationMap {
    pub source: FilteredObject1,
    pub target: FilteredObject1,
    /// phi(target index) = source index
    pub phi: Vec<i64>,
}

impl DominationMap {
    pub fn find(source: &FilteredObject1, target: &FilteredObject1) -> Option<DominationMap> {
        if source.ambient() != target.ambient() || source.lower != target.lower || source.upper != target.upper {
            return None;
        }
        let (sl, tl) = (source.level_list()?, target.level_list()?);
        let mut phi = vec![];
        let mut from = 0usize;
        for t in tl {
            let k = (from..sl.len()).find(|&k| &sl[k] == t)?;
            phi.push(source.lo + k as i64);
            from = k;
        }
        // cofinal: endpoints 0 and W always match the ends of the source
        if phi.first() != Some(&source.lo) || phi.last() != Some(&source.hi) {
            return None;
        }
        Some(DominationMap {
            source: source.clone(),
            target: target.clone(),
            phi,
        })
    }

    pub fn is_valid(&self) -> bool {
        let (Some(sl), Some(tl)) = (self.source.level_list(), self.target.level_list()) else {
            return false;
        };
        self.phi.len() == tl.len()
            && self.phi.windows(2).all(|w| w[0] <= w[1])
            && self
                .phi
                .iter()
                .zip(tl)
                .all(|(&i, t)| i >= self.source.lo && i <= self.source.hi && &sl[(i - self.source.lo) as usize] == t)
    }
}

/// Coarse chain 0 < W carrying the same tags.
pub fn coarse(e: &FilteredObject1) -> Result<FilteredObject1> {
    let (w, _) = e.fin()?;
    FilteredObject1::new_fin(0, w.clone(), vec![Subgroup::zero(w), Subgroup::whole(w)], e.lower, e.upper, 0)
}

/// Zig-zag witness E -> C <- E' through the coarse chain.
#[derive(Clone, Debug)]
pub struct Equivalence {
    pub steps: Vec<DominationMap>,
}

pub fn check_equivalence(e: &FilteredObject1, f: &FilteredObject1) -> bool {
    equivalence_witness(e, f).is_some()
}

pub fn equivalence_witness(e: &FilteredObject1, f: &FilteredObject1) -> Option<Equivalence> {
    if e.ambient().is_none() || e.ambient() != f.ambient() {
        return None;
    }
    if let Some(d) = DominationMap::find(e, f).or_else(|| DominationMap::find(f, e)) {
        return Some(Equivalence { steps: vec![d] });
    }
    let c = coarse(e).ok()?;
    let a = DominationMap::find(e, &c)?;
    let b = DominationMap::find(f, &c)?;
    Some(Equivalence { steps: vec![a, b] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_chain_dual() {
        let e = FilteredObject1::laurent(3, 0, 0, Tail::Trivial, Tail::Trivial, 0).unwrap();
        let d = e.dual1();
        assert_eq!(d.ambient().unwrap().order(), 1);
        assert_eq!(d.dual1(), e);
    }

    #[test]
    fn power_series_window_dual() {
        // F_q[[t]] / t^2 F_q[[t]]
        let e = FilteredObject1::laurent(3, -2, 0, Tail::FiniteStable, Tail::Trivial, 0).unwrap();
        let d = e.dual1();
        assert_eq!((d.lo, d.hi), (0, 2));
        let orders: Vec<usize> = (d.lo..=d.hi).map(|i| d.level_order(i).unwrap()).collect();
        // annihilators of a chain of orders 1, 3, 9 have orders 1, 3, 9 read backwards
        assert_eq!(orders, vec![1, 3, 9]);
        for i in d.lo..=d.hi {
            let s = d.level(i).unwrap();
            assert_eq!(s, &e.level(-i).unwrap().annihilator());
        }
        assert!(e.is_compact1() && !e.is_discrete1());
        assert!(d.is_discrete1() && !d.is_compact1());
        assert_eq!(d.dual1(), e);
    }

    #[test]
    fn predicates() {
        let o = FilteredObject1::laurent(2, -3, 0, Tail::FiniteStable, Tail::Trivial, 0).unwrap();
        let k_mod_o = FilteredObject1::laurent(2, 0, 3, Tail::Trivial, Tail::FiniteStable, 0).unwrap();
        let k = FilteredObject1::laurent(2, -2, 2, Tail::FiniteStable, Tail::FiniteStable, 0).unwrap();
        assert!(o.is_compact1());
        assert!(k_mod_o.is_discrete1());
        assert!(!k.is_compact1() && !k.is_discrete1());
    }

    #[test]
    fn psi_is_canonicalization() {
        let e = FilteredObject1::laurent(5, -1, 2, Tail::FiniteStable, Tail::FiniteStable, 0).unwrap();
        assert_eq!(e.completion_psi(), e);
        assert_eq!(e.completion_psi().completion_psi(), e.completion_psi());
        assert_eq!(e.completion_psi(), e.dual1().dual1());
    }

    #[test]
    fn equivalence_examples() {
        let e = FilteredObject1::laurent(2, 0, 2, Tail::Trivial, Tail::Trivial, 0).unwrap();
        assert!(check_equivalence(&e, &e));
        let w = e.ambient().unwrap().clone();
        let coarse2 = FilteredObject1::new_fin(
            0,
            w.clone(),
            vec![Subgroup::zero(&w), Subgroup::whole(&w)],
            Tail::Trivial,
            Tail::Trivial,
            0,
        )
        .unwrap();
        let w1 = equivalence_witness(&e, &coarse2).unwrap();
        assert_eq!(w1.steps.len(), 1);
        assert!(w1.steps[0].is_valid());
        let other = FilteredObject1::laurent(2, 0, 3, Tail::Trivial, Tail::Trivial, 0).unwrap();
        assert!(!check_equivalence(&e, &other));
    }

    #[test]
    fn window_groups() {
        let e = FilteredObject1::laurent(3, -2, 2, Tail::FiniteStable, Tail::FiniteStable, 0).unwrap();
        let wg = e.window_group(-1, 1).unwrap();
        assert_eq!(wg.group.order(), 9);
        assert_eq!(wg.w_to_q.iter().filter(|x| x.is_some()).count(), 27);
    }

    #[test]
    fn tag_violations_flagged() {
        let r = C0arObject::new(FinAbGroup::trivial(), 0, 0, 1);
        let e = FilteredObject1::new_ar(0, vec![r], Tail::FiniteStable, Tail::Trivial, 0).unwrap();
        assert_eq!(e.tag_violations().len(), 1);
    }
}

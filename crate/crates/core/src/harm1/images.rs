//! The eight image maps of an admissible triple and the Poisson formula.

use serde::{Deserialize, Serialize};

use crate::filt1::AdmissibleTriple1;
use crate::finabel::{
    poisson_c0_check, pull, pull_dist_epi, pull_dist_mono, push_dist, push_epi, push_mono, AdmissibleTripleC0,
    DistributionC0, FunctionC0, MeasureC0,
};
use crate::{Error, Result};

use super::{same_parent, DistC1, MeasureLine1, SchwartzC1};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ImageMode1 {
    /// beta_*(f (x) mu1): S(E2) -> S(E3)
    I1,
    /// adjoint of I1: S'(E3) -> S'(E2)
    I2,
    /// alpha^* f: S(E2) -> S(E1)
    I3,
    /// alpha_* H: S'(E1) -> S'(E2)
    I4,
    /// beta^* f: S(E3) -> S(E2), E1 compact
    I5,
    /// beta_* H: S'(E2) -> S'(E3), E1 compact
    I6,
    /// alpha_* f: S(E1) -> S(E2), E3 discrete
    I7,
    /// alpha^* H: S'(E2) -> S'(E1), E3 discrete
    I8,
}

impl ImageMode1 {
    pub const ALL: [ImageMode1; 8] = [
        ImageMode1::I1,
        ImageMode1::I2,
        ImageMode1::I3,
        ImageMode1::I4,
        ImageMode1::I5,
        ImageMode1::I6,
        ImageMode1::I7,
        ImageMode1::I8,
    ];
}

#[derive(Clone, Debug, PartialEq)]
pub enum Element1 {
    F(SchwartzC1),
    D(DistC1),
}

impl Element1 {
    pub fn max_dev(&self, other: &Element1) -> f64 {
        match (self, other) {
            (Element1::F(a), Element1::F(b)) => a.max_dev(b),
            (Element1::D(a), Element1::D(b)) => a.max_dev(b),
            _ => f64::INFINITY,
        }
    }

    pub fn function(self) -> Result<SchwartzC1> {
        match self {
            Element1::F(f) => Ok(f),
            Element1::D(_) => Err(Error::Invalid("expected a function".into())),
        }
    }

    pub fn dist(self) -> Result<DistC1> {
        match self {
            Element1::D(h) => Ok(h),
            Element1::F(_) => Err(Error::Invalid("expected a distribution".into())),
        }
    }
}

fn c0_triple(t: &AdmissibleTriple1) -> Result<AdmissibleTripleC0> {
    AdmissibleTripleC0::new(t.alpha.clone(), t.beta.clone())
}

fn want_f(x: &Element1) -> Result<&SchwartzC1> {
    match x {
        Element1::F(f) => Ok(f),
        Element1::D(_) => Err(Error::Invalid("mode acts on functions".into())),
    }
}

fn want_d(x: &Element1) -> Result<&DistC1> {
    match x {
        Element1::D(h) => Ok(h),
        Element1::F(_) => Err(Error::Invalid("mode acts on distributions".into())),
    }
}

fn out_f(obj: &crate::filt1::FilteredObject1, g: FunctionC0) -> Result<Element1> {
    Ok(Element1::F(SchwartzC1::from_full(obj, g.table)?.canonicalize()))
}

fn out_d(obj: &crate::filt1::FilteredObject1, g: DistributionC0) -> Result<Element1> {
    Ok(Element1::D(DistC1::from_full(obj, g.kernel)?.canonicalize()))
}

/// Applies the image map `mode`; `mu1` is used by I1 and I2 only.
pub fn images1(t: &AdmissibleTriple1, x: &Element1, mode: ImageMode1, mu1: &MeasureLine1) -> Result<Element1> {
    use ImageMode1::*;
    match mode {
        I5 | I6 if !t.e1.is_compact1() => {
            return Err(Error::Hypothesis(format!("{mode:?} requires is_compact1(E1)")))
        }
        I7 | I8 if !t.e3.is_discrete1() => {
            return Err(Error::Hypothesis(format!("{mode:?} requires is_discrete1(E3)")))
        }
        _ => {}
    }
    match mode {
        I1 => {
            let f = want_f(x)?;
            same_parent(&f.obj, &t.e2, "I1")?;
            same_parent(&mu1.obj, &t.e1, "I1 measure")?;
            out_f(&t.e3, push_epi(&t.beta, &f.full_c0(), mu1.c0()?.scale)?)
        }
        I2 => {
            let h = want_d(x)?;
            same_parent(&h.obj, &t.e3, "I2")?;
            same_parent(&mu1.obj, &t.e1, "I2 measure")?;
            out_d(&t.e2, pull_dist_epi(&t.beta, &h.full_c0(), mu1.c0()?.scale)?)
        }
        I3 => {
            let f = want_f(x)?;
            same_parent(&f.obj, &t.e2, "I3")?;
            out_f(&t.e1, pull(&t.alpha, &f.full_c0())?)
        }
        I4 => {
            let h = want_d(x)?;
            same_parent(&h.obj, &t.e1, "I4")?;
            out_d(&t.e2, push_dist(&t.alpha, &h.full_c0())?)
        }
        I5 => {
            let f = want_f(x)?;
            same_parent(&f.obj, &t.e3, "I5")?;
            out_f(&t.e2, pull(&t.beta, &f.full_c0())?)
        }
        I6 => {
            let h = want_d(x)?;
            same_parent(&h.obj, &t.e2, "I6")?;
            out_d(&t.e3, push_dist(&t.beta, &h.full_c0())?)
        }
        I7 => {
            let f = want_f(x)?;
            same_parent(&f.obj, &t.e1, "I7")?;
            out_f(&t.e2, push_mono(&t.alpha, &f.full_c0())?)
        }
        I8 => {
            let h = want_d(x)?;
            same_parent(&h.obj, &t.e2, "I8")?;
            out_d(&t.e1, pull_dist_mono(&t.alpha, &h.full_c0())?)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Poisson1Report {
    pub max_deviation: f64,
    pub lhs_window: (i64, i64),
    pub rhs_window: (i64, i64),
}

/// F(alpha_* mu1) against hat(beta)_* mu3 on the dual of E2; `mu3` lives on
/// the dual of E3 and the transform uses mu1^{-1} (x) mu3.
pub fn poisson1_check(t: &AdmissibleTriple1, mu1: &MeasureLine1, mu3: &MeasureLine1) -> Result<Poisson1Report> {
    same_parent(&mu1.obj, &t.e1, "poisson1 mu1")?;
    same_parent(&mu3.obj, &t.e3.dual1(), "poisson1 mu3")?;
    let tc = c0_triple(t)?;
    let m3 = MeasureC0::new(mu3.obj.fin()?.0, mu3.c0()?.scale);
    let rep = poisson_c0_check(&tc, &mu1.c0()?, &m3)?;
    let e2d = t.e2.dual1();
    let lhs = DistC1::from_full(&e2d, rep.lhs.kernel)?.canonicalize();
    let rhs = DistC1::from_full(&e2d, rep.rhs.kernel)?.canonicalize();
    Ok(Poisson1Report {
        max_deviation: lhs.max_dev(&rhs),
        lhs_window: (lhs.a, lhs.b),
        rhs_window: (rhs.a, rhs.b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;
    use crate::filt1::{FilteredObject1, Tail};
    use crate::harm1::pairing1;
    use crate::finabel::Subgroup;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_c(rng: &mut ChaCha8Rng) -> C64 {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    fn rf(rng: &mut ChaCha8Rng, e: &FilteredObject1) -> SchwartzC1 {
        let n = e.fin().unwrap().0.order();
        SchwartzC1::from_full(e, (0..n).map(|_| rand_c(rng)).collect()).unwrap()
    }

    fn rh(rng: &mut ChaCha8Rng, e: &FilteredObject1) -> DistC1 {
        let n = e.fin().unwrap().0.order();
        DistC1::from_full(e, (0..n).map(|_| rand_c(rng)).collect()).unwrap()
    }

    /// E1 = O window, compact and with discrete quotient.
    fn compact_discrete() -> AdmissibleTriple1 {
        AdmissibleTriple1::laurent(3, -2, 2).unwrap()
    }

    #[test]
    fn adjoint_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = compact_discrete();
        let mu1 = MeasureLine1::new(&t.e1, C64::new(0.7, 0.2));
        let pairs = [
            (ImageMode1::I1, ImageMode1::I2, &t.e2, &t.e3),
            (ImageMode1::I3, ImageMode1::I4, &t.e2, &t.e1),
            (ImageMode1::I5, ImageMode1::I6, &t.e3, &t.e2),
            (ImageMode1::I7, ImageMode1::I8, &t.e1, &t.e2),
        ];
        for (fm, dm, src, dst) in pairs {
            let f = rf(&mut rng, src);
            let h = rh(&mut rng, dst);
            let lhs = pairing1(&images1(&t, &Element1::F(f.clone()), fm, &mu1).unwrap().function().unwrap(), &h).unwrap();
            let rhs = pairing1(&f, &images1(&t, &Element1::D(h), dm, &mu1).unwrap().dist().unwrap()).unwrap();
            assert!((lhs - rhs).norm() < 1e-9, "{fm:?}");
        }
    }

    #[test]
    fn pullback_constant() {
        let t = compact_discrete();
        let n = t.e2.fin().unwrap().0.order();
        let one = SchwartzC1::from_full(&t.e2, vec![C64::new(1.0, 0.0); n]).unwrap();
        let mu1 = MeasureLine1::normalized(&t.e1);
        let g = images1(&t, &Element1::F(one), ImageMode1::I3, &mu1).unwrap().function().unwrap();
        assert!(g.full().iter().all(|z| (z - C64::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn pushforward_of_level_indicator() {
        let t = compact_discrete();
        let mu1 = MeasureLine1::normalized(&t.e1);
        // 1_{F2(1)} pushed along beta: each fiber is a coset of O of volume 1
        let f = SchwartzC1::indicator(&t.e2, 1).unwrap();
        let g = images1(&t, &Element1::F(f), ImageMode1::I1, &mu1).unwrap().function().unwrap();
        let expected = SchwartzC1::indicator(&t.e3, 1).unwrap();
        assert!(g.max_dev(&expected) < 1e-12);
    }

    #[test]
    fn hypotheses_enforced() {
        // E3 = F_q((t)) / t^{-1}F_q[[t]] window is not discrete once E1 is not compact...
        let e2 = FilteredObject1::laurent(2, -1, 1, Tail::FiniteStable, Tail::FiniteStable, 0).unwrap();
        let sub = e2.level(1).unwrap().clone();
        let t = AdmissibleTriple1::from_sub(
            &e2,
            &sub,
            (Tail::FiniteStable, Tail::FiniteStable),
            (Tail::FiniteStable, Tail::FiniteStable),
        )
        .unwrap();
        let mu1 = MeasureLine1::normalized(&t.e1);
        let f = SchwartzC1::indicator(&t.e1, 0).unwrap();
        let r = images1(&t, &Element1::F(f), ImageMode1::I7, &mu1);
        assert!(matches!(r, Err(Error::Hypothesis(s)) if s.contains("is_discrete1")));
        let f3 = SchwartzC1::indicator(&t.e3, 0).unwrap();
        let r = images1(&t, &Element1::F(f3), ImageMode1::I5, &mu1);
        assert!(matches!(r, Err(Error::Hypothesis(s)) if s.contains("is_compact1")));
    }

    #[test]
    fn measures_multiply() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let t = compact_discrete();
        let (c1, c3) = (C64::new(1.3, 0.0), C64::new(0.4, -0.9));
        let f = rf(&mut rng, &t.e2);
        let lhs = pairing1(&f, &MeasureLine1::new(&t.e2, c1 * c3).as_dist().unwrap()).unwrap();
        let pushed = images1(&t, &Element1::F(f), ImageMode1::I1, &MeasureLine1::new(&t.e1, c1))
            .unwrap()
            .function()
            .unwrap();
        let rhs = pairing1(&pushed, &MeasureLine1::new(&t.e3, c3).as_dist().unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn poisson_laurent() {
        for q in [2, 3] {
            let t = AdmissibleTriple1::laurent(q, -2, 2).unwrap();
            let mu1 = MeasureLine1::new(&t.e1, C64::new(2.0, 0.0));
            let mu3 = MeasureLine1::new(&t.e3.dual1(), C64::new(0.5, 0.5));
            let r = poisson1_check(&t, &mu1, &mu3).unwrap();
            assert!(r.max_deviation <= 1e-9, "{}", r.max_deviation);
        }
    }

    #[test]
    fn poisson_trivial_e1() {
        let e2 = FilteredObject1::laurent(2, -1, 1, Tail::FiniteStable, Tail::FiniteStable, 0).unwrap();
        let w = e2.fin().unwrap().0.clone();
        let t = AdmissibleTriple1::from_sub(
            &e2,
            &Subgroup::zero(&w),
            (Tail::Trivial, Tail::Trivial),
            (Tail::FiniteStable, Tail::FiniteStable),
        )
        .unwrap();
        let mu1 = MeasureLine1::normalized(&t.e1);
        let mu3 = MeasureLine1::normalized(&t.e3.dual1());
        assert!(poisson1_check(&t, &mu1, &mu3).unwrap().max_deviation <= 1e-12);
    }
}

//! Characteristic elements of sub-objects and the two Poisson formulas.

use serde::{Deserialize, Serialize};

use super::images::{alpha_lower, alpha_lower_dist, beta_upper, beta_upper_dist};
use super::{c, DistC2, SchwartzC2};
use crate::filt2::{AdmissibleTriple2, Predicates2, Win2};
use crate::vmeas::{canonical_delta, canonical_one, dual_transport, kappa, VirtualMeasure};
use crate::{Error, Result};

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Poisson2Report {
    pub e1: Predicates2,
    pub e3: Predicates2,
    /// Deviation between the two constructions of the characteristic element.
    pub lemma_dev: f64,
    /// Deviation between F(δ_E1) and δ_Ě3.
    pub poisson_dev: f64,
    pub points_log_q: usize,
}

fn full_outer(w: Win2, t: &AdmissibleTriple2) -> Win2 {
    let (lo, hi) = t.e2.outer_window();
    Win2 { q: lo, p: hi, ..w }
}

/// ∇_μ: the Haar measure μ = m·b1_{o,Ihi} of V1/F1(o), at the window [o, Ihi].
pub fn nabla(t: &AdmissibleTriple2, mu: &VirtualMeasure) -> Result<DistC2> {
    let (kl, kh) = t.e1.inner_window();
    nabla_in(t, mu, kl, kh)
}

fn nabla_in(t: &AdmissibleTriple2, mu: &VirtualMeasure, kl: i64, kh: i64) -> Result<DistC2> {
    let e1 = &t.e1;
    if !e1.predicates().c {
        return Err(Error::Hypothesis("E1 c".into()));
    }
    let full = e1.full_window();
    let w = Win2 { q: e1.o_ref, kl, kh, ..full };
    let k = kappa(e1, w.q, w.p, w.kl);
    DistC2::constant(e1, w, mu.scalar * k)
}

/// δ_ν: the Dirac distribution on F3(o) with ν = n·b3_{o,Ilo}, at [Ilo, o].
pub fn dirac_nu(t: &AdmissibleTriple2, nu: &VirtualMeasure) -> Result<DistC2> {
    let (kl, kh) = t.e3.inner_window();
    dirac_nu_in(t, nu, kl, kh)
}

fn dirac_nu_in(t: &AdmissibleTriple2, nu: &VirtualMeasure, kl: i64, kh: i64) -> Result<DistC2> {
    let e3 = &t.e3;
    if !e3.predicates().d {
        return Err(Error::Hypothesis("E3 d".into()));
    }
    let full = e3.full_window();
    let w = Win2 { p: e3.o_ref, kl, kh, ..full };
    Ok(DistC2::delta(e3, w, c(1.0))?.scale(nu.scalar))
}

/// δ_{E1,μ⊗ν} = α_*(∇_μ ⊗ ν), and the second construction β^*(δ_ν ⊗ μ).
pub fn characteristic_delta(t: &AdmissibleTriple2, mu: &VirtualMeasure, nu: &VirtualMeasure) -> Result<(DistC2, DistC2)> {
    let (kl, kh) = t.e2.inner_window();
    characteristic_delta_in(t, mu, nu, kl, kh)
}

/// As [`characteristic_delta`] on the u-window [kl, kh].
pub fn characteristic_delta_in(
    t: &AdmissibleTriple2,
    mu: &VirtualMeasure,
    nu: &VirtualMeasure,
    kl: i64,
    kh: i64,
) -> Result<(DistC2, DistC2)> {
    let n = nabla_in(t, mu, kl, kh)?;
    let n = n.to_window(full_outer(n.win, t))?;
    let a = alpha_lower_dist(t, &n, nu)?;
    let d = dirac_nu_in(t, nu, kl, kh)?;
    let d = d.to_window(full_outer(d.win, t))?;
    let b = beta_upper_dist(t, &d, mu)?;
    Ok((a, b))
}

/// δ_E1 = α_*(1) for E1 cf and E3 df, and the second construction β^*(δ_0).
pub fn characteristic_delta_cf(t: &AdmissibleTriple2) -> Result<(SchwartzC2, SchwartzC2)> {
    characteristic_delta_cf_in(t, t.e2.full_window())
}

/// As [`characteristic_delta_cf`] on the window `w`.
pub fn characteristic_delta_cf_in(t: &AdmissibleTriple2, w: Win2) -> Result<(SchwartzC2, SchwartzC2)> {
    let o = t.e2.o_ref;
    let one = SchwartzC2::constant(&t.e1, w, c(1.0))?.scale(canonical_one(&t.e1, w.q, o)?.scalar);
    let a = alpha_lower(t, &one)?;
    let d0 = SchwartzC2::delta(&t.e3, w, c(1.0))?.scale(canonical_delta(&t.e3, w.q, o)?.scalar);
    let b = beta_upper(t, &d0)?;
    Ok((a, b))
}

/// μ and ν moved to the dual triple Ě3 -> Ě2 -> Ě1, where they swap roles.
pub fn dual_measures(mu: &VirtualMeasure, nu: &VirtualMeasure) -> (VirtualMeasure, VirtualMeasure) {
    (dual_transport(nu), dual_transport(mu))
}

pub fn poisson2_i_check(t: &AdmissibleTriple2, mu: &VirtualMeasure, nu: &VirtualMeasure) -> Result<Poisson2Report> {
    let (a, b) = characteristic_delta(t, mu, nu)?;
    let lhs = a.fourier2_dist()?;
    let td = t.dual();
    let (mu_d, nu_d) = dual_measures(mu, nu);
    let (rhs, _) = characteristic_delta(&td, &mu_d, &nu_d)?;
    Ok(Poisson2Report {
        e1: t.e1.predicates(),
        e3: t.e3.predicates(),
        lemma_dev: a.max_dev(&b),
        poisson_dev: lhs.max_dev(&rhs),
        points_log_q: a.table.n(),
    })
}

pub fn poisson2_ii_check(t: &AdmissibleTriple2) -> Result<Poisson2Report> {
    let (a, b) = characteristic_delta_cf(t)?;
    let lhs = a.fourier2()?;
    let (rhs, _) = characteristic_delta_cf(&t.dual())?;
    Ok(Poisson2Report {
        e1: t.e1.predicates(),
        e3: t.e3.predicates(),
        lemma_dev: a.max_dev(&b),
        poisson_dev: lhs.max_dev(&rhs),
        points_log_q: a.table.n(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filt2::{make_local_field2, Coeff, FilteredObject2, Shape};
    use crate::finabel::{poisson_c0_check, AdmissibleTripleC0, FinAbGroup, MeasureC0, Subgroup};
    use crate::harm2::images::{standard_mu, standard_nu};
    use crate::harm2::Table;

    fn field(q: i64, t: (i64, i64), u: (i64, i64)) -> FilteredObject2 {
        make_local_field2(Coeff::Fq(q), t, u).unwrap()
    }

    #[test]
    fn poisson_one_on_t_split() {
        for (q, t, u, cut) in [(2, (-1, 1), (-1, 1), 0), (3, (-2, 1), (-1, 1), 0), (2, (-2, 2), (-1, 0), 1)] {
            let e = field(q, t, u);
            let tr = AdmissibleTriple2::from_sub(&e, &Shape::t_at_least(cut)).unwrap();
            for (m, n) in [(1.0, 1.0), (2.0, 0.25)] {
                let r = poisson2_i_check(&tr, &standard_mu(&tr, m).unwrap(), &standard_nu(&tr, n).unwrap()).unwrap();
                assert!(r.lemma_dev < 1e-12 && r.poisson_dev < 1e-9, "{q} {t:?} {u:?}: {r:?}");
            }
        }
    }

    #[test]
    fn poisson_two_on_u_split() {
        for (q, t, u) in [(2, (-1, 1), (-1, 1)), (3, (-1, 0), (-2, 1))] {
            let e = field(q, t, u);
            let tr = AdmissibleTriple2::from_sub(&e, &Shape::u_at_least(0)).unwrap();
            let r = poisson2_ii_check(&tr).unwrap();
            assert!(r.lemma_dev < 1e-12 && r.poisson_dev < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn lattice_indicator() {
        let e = field(2, (-1, 0), (-1, 0));
        let tr = AdmissibleTriple2::from_sub(&e, &Shape::u_at_least(0)).unwrap();
        let (a, _) = characteristic_delta_cf(&tr).unwrap();
        let w = e.full_window();
        let ind = Table::subgroup_indicator(2, e.labels_in(&w), &|l| l.0 < 0);
        let s = a.values().eval(&[0, 0, 0, 0]);
        assert!(a.values().max_dev(&ind.scale(s)) < 1e-12);
    }

    #[test]
    fn trivial_e1_gives_dirac() {
        let e = field(2, (-1, 0), (0, 0)).with_shape(Shape::rect((None, None), (Some(-1), Some(0))));
        let tr = AdmissibleTriple2::from_sub(&e, &Shape::Empty).unwrap();
        let (a, b) = characteristic_delta(&tr, &standard_mu(&tr, 1.0).unwrap(), &standard_nu(&tr, 1.0).unwrap()).unwrap();
        assert!(a.max_dev(&b) < 1e-12);
        let w = e.full_window();
        let d = DistC2::delta(&e, w, c(1.0)).unwrap();
        assert!(a.to_window(w).unwrap().max_dev(&d) < 1e-12);
    }

    #[test]
    fn one_by_one_box_reduces_to_finite_poisson() {
        // one coordinate: E1 = F_3, E3 = 0, the finite formula for F_3 -> F_3 -> 0
        let e = field(3, (0, 0), (0, 0)).with_shape(Shape::rect((None, None), (Some(0), Some(0))));
        let tr = AdmissibleTriple2::from_sub(&e, &Shape::All).unwrap();
        let (mu, nu) = (standard_mu(&tr, 1.0).unwrap(), standard_nu(&tr, 1.0).unwrap());
        let r = poisson2_i_check(&tr, &mu, &nu).unwrap();
        assert!(r.poisson_dev < 1e-9);
        let (a, _) = characteristic_delta(&tr, &mu, &nu).unwrap();
        let ours = a.fourier2_dist().unwrap().values().dense_data().unwrap();
        let g = FinAbGroup::new(vec![3]).unwrap();
        let t0 = AdmissibleTripleC0::from_subgroup(&g, &Subgroup::whole(&g)).unwrap();
        let m1 = MeasureC0::counting(&t0.g1);
        let m3 = MeasureC0::counting(&t0.g3.dual());
        let fin = poisson_c0_check(&t0, &m1, &m3).unwrap();
        assert!(fin.max_deviation < 1e-9);
        let k = &fin.lhs.kernel;
        for x in 0..3 {
            assert!((ours[x] / ours[0] - k[x] / k[0]).norm() < 1e-12);
        }
    }
}

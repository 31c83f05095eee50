//! Central extension of Aut′ by C* and its representations on S_{F(o)} and S'_{F(o)}.
//!
//! A lift (g, μ) stores μ ∈ μ(F(o)|gF(o)) as coef·q^qexp·b_{o,o-β}, so the
//! powers of q coming from l_g stay exact integers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::filt2::{check_aut, AdmissibleTriple2, Automorphism2, Coeff, FilteredObject2, Label, Win2};
use crate::harm2::{
    characteristic_delta_cf_in, characteristic_delta_in, images::standard_mu, images::standard_nu, pairing2, DistC2,
    Elem2, Kind, SchwartzC2, Table,
};
use crate::vmeas::{check_index, dual_transport, kappa_exp, VirtualMeasure};
use crate::{Error, Result, C64};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CentralExtElement {
    /// Ambient object; its o_ref is the base point o.
    pub obj: FilteredObject2,
    pub g: Automorphism2,
    pub coef: C64,
    pub qexp: i64,
}

fn modulus(e: &FilteredObject2) -> Result<i64> {
    match e.coeff {
        Coeff::Fq(q) => Ok(q),
        Coeff::Real => Err(Error::Invalid("central extension needs a finite coefficient field".into())),
    }
}

fn prec(e: &FilteredObject2) -> (i64, i64) {
    (e.u_range.1 - e.u_range.0 + 1, e.t_range.1 - e.t_range.0 + 1)
}

fn box_index(e: &FilteredObject2, i: i64) -> Result<()> {
    check_index(e, i).map_err(|_| Error::Cutoff(format!("index {i} leaves the box")))
}

/// log_q λ with l_g b_{ij} = λ·b_{i-β, j-β}.
fn lg_exp(e: &FilteredObject2, g: &Automorphism2, i: i64, j: i64) -> Result<i64> {
    for x in [i, j, i - g.beta, j - g.beta] {
        box_index(e, x)?;
    }
    let k = e.k_ref - g.alpha;
    let (klo, khi) = e.inner_window();
    if k < klo || k > khi {
        return Err(Error::Cutoff("g moves Λ_k_ref out of the box".into()));
    }
    Ok(-kappa_exp(e, i - g.beta, j - g.beta, k))
}

fn qpow(e: &FilteredObject2, x: i64) -> f64 {
    match e.coeff {
        Coeff::Fq(q) => (q as f64).powi(x as i32),
        Coeff::Real => 1.0,
    }
}

impl CentralExtElement {
    /// (g, c·b_{o,o-β}).
    pub fn lift(obj: &FilteredObject2, g: &Automorphism2, scalar: C64) -> Result<Self> {
        modulus(obj)?;
        if scalar == C64::new(0.0, 0.0) {
            return Err(Error::ZeroMeasure);
        }
        let chk = check_aut(obj, g);
        if !chk.aut_prime {
            return Err(Error::Invalid(format!("g is not in Aut′: {}", chk.witness.unwrap_or_default())));
        }
        box_index(obj, obj.o_ref - g.beta)?;
        Ok(Self { obj: obj.clone(), g: g.clone(), coef: scalar, qexp: 0 })
    }

    pub fn unit(obj: &FilteredObject2) -> Result<Self> {
        Self::lift(obj, &Automorphism2::identity(), C64::new(1.0, 0.0))
    }

    /// Scalar lift (e, c).
    pub fn scalar(obj: &FilteredObject2, c: C64) -> Result<Self> {
        Self::lift(obj, &Automorphism2::identity(), c)
    }

    pub fn o(&self) -> i64 {
        self.obj.o_ref
    }

    /// Λ(x).
    pub fn projection(&self) -> &Automorphism2 {
        &self.g
    }

    /// μ as a virtual measure on the ambient object.
    pub fn mu(&self) -> Result<VirtualMeasure> {
        VirtualMeasure::new(&self.obj, self.o(), self.o() - self.g.beta, self.measure_scalar())
    }

    pub fn measure_scalar(&self) -> C64 {
        self.coef * qpow(&self.obj, self.qexp)
    }

    fn check_same(&self, o: &Self) -> Result<()> {
        if self.obj != o.obj {
            return Err(Error::ParentMismatch("lifts over different objects".into()));
        }
        Ok(())
    }

    /// (g1, μ1)(g2, μ2) = (g1 g2, γ(μ1 ⊗ l_{g1} μ2)).
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        let q = modulus(&self.obj)?;
        let e = &self.obj;
        let l = lg_exp(e, &self.g, e.o_ref, e.o_ref - o.g.beta)?;
        let g = self.g.compose(&o.g, q, prec(e));
        box_index(e, e.o_ref - g.beta)?;
        Ok(Self { obj: e.clone(), g, coef: self.coef * o.coef, qexp: self.qexp + o.qexp + l })
    }

    /// (g, μ)^{-1} = (g^{-1}, l_{g^{-1}}(μ^{-1})).
    pub fn inv(&self) -> Result<Self> {
        let q = modulus(&self.obj)?;
        let e = &self.obj;
        let gi = self.g.inverse(q, prec(e))?;
        let l = lg_exp(e, &gi, e.o_ref - self.g.beta, e.o_ref)?;
        Ok(Self { obj: e.clone(), g: gi, coef: self.coef.inv(), qexp: -self.qexp + l })
    }

    /// Exact equality: same truncated automorphism and the same scalar.
    pub fn same_as(&self, o: &Self) -> bool {
        let Ok(q) = modulus(&self.obj) else { return false };
        self.obj == o.obj && self.g.same_as(&o.g, q, prec(&self.obj)) && self.coef == o.coef && self.qexp == o.qexp
    }

    /// The kernel of Λ.
    pub fn is_central(&self) -> bool {
        modulus(&self.obj).map(|q| self.g.same_as(&Automorphism2::identity(), q, prec(&self.obj))).unwrap_or(false)
    }

    /// α_{o,o1} computed with the auxiliary ν = n·b_{o1,o}.
    pub fn rebase_alpha(&self, o1: i64, n: C64) -> Result<Self> {
        if n == C64::new(0.0, 0.0) {
            return Err(Error::ZeroMeasure);
        }
        let e = &self.obj;
        box_index(e, o1)?;
        // γ(γ(ν ⊗ μ) ⊗ l_g(ν^{-1}))
        let l = lg_exp(e, &self.g, e.o_ref, o1)?;
        let obj = e.with_refs(o1, e.k_ref)?;
        box_index(&obj, o1 - self.g.beta)?;
        Ok(Self { obj, g: self.g.clone(), coef: n * self.coef * n.inv(), qexp: self.qexp + l })
    }

    /// (ǧ^{-1}, μ) on the dual object.
    pub fn dual_lift(&self) -> Result<Self> {
        let q = modulus(&self.obj)?;
        let d = self.obj.dual2();
        let g = self.g.inverse(q, prec(&self.obj))?;
        let mu = dual_transport(&self.mu()?);
        debug_assert_eq!((mu.i, mu.j), (d.o_ref, d.o_ref - g.beta));
        Ok(Self { obj: d, g, coef: self.coef, qexp: self.qexp })
    }
}

/// Commutator x y x^{-1} y^{-1}, which lies in the kernel when Λ(x) and Λ(y) commute.
pub fn commutator(x: &CentralExtElement, y: &CentralExtElement) -> Result<CentralExtElement> {
    x.mul(y)?.mul(&x.inv()?)?.mul(&y.inv()?)
}

/// The scalar of a central commutator as (coef, log_q part).
pub fn commutator_scalar(x: &CentralExtElement, y: &CentralExtElement) -> Result<(C64, i64)> {
    let c = commutator(x, y)?;
    if !c.is_central() {
        return Err(Error::Invalid("Λ(x) and Λ(y) do not commute".into()));
    }
    Ok((c.coef, c.qexp))
}

/// Table T'(y) = T(g^{-1} y) on gW.
fn move_table(x: &CentralExtElement, t: &Table, w: &Win2) -> Result<(Win2, Table)> {
    let e = &x.obj;
    let q = modulus(e)?;
    let gw = w.shifted(x.g.alpha, x.g.beta);
    if !e.window_in_box(&gw) {
        return Err(Error::Cutoff(format!("g moves the window {w:?} out of the box")));
    }
    let gi = x.g.inverse(q, prec(e))?;
    let (src, dst, m) = gi.matrix_on(e, &gw)?;
    let row: BTreeMap<Label, usize> = dst.iter().enumerate().map(|(k, l)| (*l, k)).collect();
    let m: Vec<Vec<i64>> = t.labels.iter().map(|l| m[row[l]].clone()).collect();
    Ok((gw, t.pullback(src, &m)?))
}

fn on_base<K: Kind>(x: &CentralExtElement, f: &Elem2<K>) -> Result<()> {
    let (a, b) = (&x.obj, &f.obj);
    if a.coeff != b.coeff || a.t_range != b.t_range || a.u_range != b.u_range || a.labels() != b.labels() {
        return Err(Error::ParentMismatch("element lives on another object".into()));
    }
    if (a.o_ref, a.k_ref) != (b.o_ref, b.k_ref) {
        return Err(Error::ParentMismatch(format!("element is based at F({}), the lift at F({})", b.o_ref, a.o_ref)));
    }
    Ok(())
}

/// R_{(g,μ)}: r_g ⊗ l_g followed by μ^{-1}.
pub fn rep_r(x: &CentralExtElement, f: &SchwartzC2) -> Result<SchwartzC2> {
    on_base(x, f)?;
    let e = &x.obj;
    let (gw, t) = move_table(x, &f.table, &f.win)?;
    let l = lg_exp(e, &x.g, f.win.q, e.o_ref)?;
    let s = f.scalar * qpow(e, l - x.qexp) / x.coef;
    SchwartzC2::new(e, gw, t, s)
}

/// R'_{(g,μ)}: r'_g ⊗ l_g followed by μ.
pub fn rep_r_dist(x: &CentralExtElement, h: &DistC2) -> Result<DistC2> {
    on_base(x, h)?;
    let e = &x.obj;
    let (gw, t) = move_table(x, &h.table, &h.win)?;
    let l = lg_exp(e, &x.g, e.o_ref, h.win.q)?;
    let s = h.scalar * qpow(e, l + x.qexp) * x.coef;
    DistC2::new(e, gw, t, s)
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub fun_dev: f64,
    pub dist_dev: f64,
    pub points_log_q: usize,
}

fn rel<K: Kind>(a: &Elem2<K>, b: &Elem2<K>) -> f64 {
    a.max_dev(b) / a.values().norm_max().max(b.values().norm_max()).max(1.0)
}

/// F(R_x f) against R_{x̌}(F f), and the same for R' on distributions.
pub fn fourier_equivariance_check(x: &CentralExtElement, f: &SchwartzC2, h: &DistC2) -> Result<EquivarianceReport> {
    let xd = x.dual_lift()?;
    let a = rep_r(x, f)?.fourier2()?;
    let b = rep_r(&xd, &f.fourier2()?)?;
    let c = rep_r_dist(x, h)?.fourier2_dist()?;
    let d = rep_r_dist(&xd, &h.fourier2_dist()?)?;
    Ok(EquivarianceReport { fun_dev: rel(&a, &b), dist_dev: rel(&c, &d), points_log_q: f.table.n().max(h.table.n()) })
}

/// |⟨R'H, Rf⟩ - ⟨H, f⟩|, relative to the larger side.
pub fn pairing_invariance(x: &CentralExtElement, f: &SchwartzC2, h: &DistC2) -> Result<f64> {
    let a = pairing2(f, h)?;
    let b = pairing2(&rep_r(x, f)?, &rep_r_dist(x, h)?)?;
    Ok((a - b).norm() / a.norm().max(b.norm()).max(1.0))
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct TwistedPoissonReport {
    /// R_x(δ_E1) against c·δ_{gE1} on the moved triple.
    pub transport_dev: f64,
    /// The dual side: R_{x̌}(δ_Ě3) against c·δ on the dual of the moved triple.
    pub dual_transport_dev: f64,
    /// F(c·δ_{gE1}) against c·δ_{ǧ^{-1}Ě3}.
    pub corollary_dev: f64,
    pub scale: C64,
    pub points_log_q: usize,
}

fn moved_triple(t: &AdmissibleTriple2, g: &Automorphism2) -> Result<AdmissibleTriple2> {
    let chk = check_aut(&t.e2, g);
    if !chk.aut_prime || !chk.star {
        return Err(Error::Hypothesis("g must satisfy condition (*) on E2".into()));
    }
    if !g.is_monomial() {
        return Err(Error::Invalid("twisted checks use monomial g".into()));
    }
    AdmissibleTriple2::from_sub(&t.e2, &t.e1.shape.shifted(g.alpha, g.beta))
}

/// Best c with a ≈ c·b, and the relative residual.
fn proportional<K: Kind>(a: &Elem2<K>, b: &Elem2<K>) -> Result<(C64, f64)> {
    let bv = b.to_window(a.win)?.values();
    let av = a.values();
    let (num, den) = (bv.pair(&av.conj())?, bv.pair(&bv.conj())?);
    if den.norm() == 0.0 {
        return Err(Error::Invalid("reference element vanishes".into()));
    }
    let c = (num / den).conj();
    let dev = av.max_dev(&bv.scale(c)) / av.norm_max().max(1e-300);
    Ok((c, dev))
}

/// Twisted Poisson I on the u-window [kl, kh] (chosen so that g keeps it in the box).
pub fn twisted_poisson_i_check(
    t: &AdmissibleTriple2,
    x: &CentralExtElement,
    m: f64,
    n: f64,
    kl: i64,
    kh: i64,
) -> Result<TwistedPoissonReport> {
    let tg = moved_triple(t, &x.g)?;
    let (gkl, gkh) = (kl - x.g.alpha, kh - x.g.alpha);
    let (mu, nu) = (standard_mu(t, m)?, standard_nu(t, n)?);
    let (d, _) = characteristic_delta_in(t, &mu, &nu, kl, kh)?;
    let rd = rep_r_dist(x, &d)?;
    let (dg, _) = characteristic_delta_in(&tg, &standard_mu(&tg, 1.0)?, &standard_nu(&tg, 1.0)?, gkl, gkh)?;
    let (c, transport_dev) = proportional(&rd, &dg)?;
    // dual side, with the dual measures
    let td = t.dual();
    let (mud, nud) = (dual_transport(&nu), dual_transport(&mu));
    let (dd, _) = characteristic_delta_in(&td, &mud, &nud, -kh, -kl)?;
    let xd = x.dual_lift()?;
    let rdd = rep_r_dist(&xd, &dd)?;
    let tgd = tg.dual();
    let (ddg, _) = characteristic_delta_in(&tgd, &standard_mu(&tgd, 1.0)?, &standard_nu(&tgd, 1.0)?, -gkh, -gkl)?;
    let ddg = ddg.scale(c);
    let dual_transport_dev = rel(&rdd.to_window(ddg.win)?, &ddg);
    let lhs = dg.scale(c).fourier2_dist()?;
    Ok(TwistedPoissonReport {
        transport_dev,
        dual_transport_dev,
        corollary_dev: rel(&lhs, &ddg),
        scale: c,
        points_log_q: d.table.n(),
    })
}

/// Twisted Poisson II on the window `w` (chosen so that g keeps it in the box).
pub fn twisted_poisson_ii_check(t: &AdmissibleTriple2, x: &CentralExtElement, w: Win2) -> Result<TwistedPoissonReport> {
    let tg = moved_triple(t, &x.g)?;
    let gw = w.shifted(x.g.alpha, x.g.beta);
    let (d, _) = characteristic_delta_cf_in(t, w)?;
    let rd = rep_r(x, &d)?;
    let (dg, _) = characteristic_delta_cf_in(&tg, gw)?;
    let (c, transport_dev) = proportional(&rd, &dg)?;
    let (dd, _) = characteristic_delta_cf_in(&t.dual(), w.dual())?;
    let rdd = rep_r(&x.dual_lift()?, &dd)?;
    let (ddg, _) = characteristic_delta_cf_in(&tg.dual(), gw.dual())?;
    let ddg = ddg.scale(c);
    let dual_transport_dev = rel(&rdd, &ddg);
    let lhs = dg.scale(c).fourier2()?;
    Ok(TwistedPoissonReport {
        transport_dev,
        dual_transport_dev,
        corollary_dev: rel(&lhs, &ddg),
        scale: c,
        points_log_q: d.table.n(),
    })
}

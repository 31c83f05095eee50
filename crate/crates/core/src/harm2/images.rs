//! Direct and inverse images along coordinate triples E1 -> E2 -> E3.

use serde::{Deserialize, Serialize};

use super::{c, same_ambient, DistC2, Elem2, Kind, SchwartzC2};
use crate::filt2::{AdmissibleTriple2, FilteredObject2, Label, Win2};
use crate::vmeas::{canonical_delta, canonical_one, kappa, VirtualMeasure};
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageMode2 {
    /// β_*: integration along E1 (c-object), needs μ ∈ μ(F1(o)|V1).
    BetaLower,
    /// α^*: restriction to E1 (E3 d-object), needs ν ∈ μ(F3(o)|0).
    AlphaUpper,
    /// β^*: pull back from E3 (E1 cf-object).
    BetaUpper,
    /// α_*: extension by zero from E1 (E3 df-object).
    AlphaLower,
}

impl ImageMode2 {
    pub const ALL: [ImageMode2; 4] = [ImageMode2::BetaLower, ImageMode2::AlphaUpper, ImageMode2::BetaUpper, ImageMode2::AlphaLower];

    pub fn needs_measure(self) -> bool {
        matches!(self, ImageMode2::BetaLower | ImageMode2::AlphaUpper)
    }

    pub fn hypothesis(self) -> &'static str {
        match self {
            ImageMode2::BetaLower => "E1 c",
            ImageMode2::AlphaUpper => "E3 d",
            ImageMode2::BetaUpper => "E1 cf",
            ImageMode2::AlphaLower => "E3 df",
        }
    }
}

fn in_shape(e: &FilteredObject2, w: &Win2) -> Vec<Label> {
    e.labels_in(w)
}

fn need(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Hypothesis(what.into()))
    }
}

fn witness(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Cutoff(what.into()))
    }
}

fn on(x: &FilteredObject2, e: &FilteredObject2, which: &str) -> Result<()> {
    if !same_ambient(x, e) || x.o_ref != e.o_ref {
        return Err(Error::ParentMismatch(format!("element does not live on {which}")));
    }
    Ok(())
}

/// m with μ = m·b1_{o,Ihi}.
fn c_measure(t: &AdmissibleTriple2, mu: &VirtualMeasure) -> Result<C64> {
    let e1 = &t.e1;
    need(e1.predicates().c, "E1 c")?;
    witness(e1.top_in_box(), "E1 leaves the box in the t^-1 direction")?;
    if !same_ambient(&mu.parent, e1) || mu.i != e1.o_ref {
        return Err(Error::ParentMismatch("μ must lie in μ(F1(o)|V1)".into()));
    }
    if e1.labels().iter().any(|l| l.1 < -mu.j) {
        return Err(Error::ParentMismatch(format!("F1({}) is not V1", mu.j)));
    }
    Ok(mu.scalar)
}

/// n with ν = n·b3_{o,Ilo}.
fn d_measure(t: &AdmissibleTriple2, nu: &VirtualMeasure) -> Result<C64> {
    let e3 = &t.e3;
    need(e3.predicates().d, "E3 d")?;
    witness(e3.bottom_in_box(), "E3 leaves the box in the t direction")?;
    if !same_ambient(&nu.parent, e3) || nu.i != e3.o_ref {
        return Err(Error::ParentMismatch("ν must lie in μ(F3(o)|0)".into()));
    }
    if e3.labels().iter().any(|l| l.1 > -nu.j - 1) {
        return Err(Error::ParentMismatch(format!("F3({}) is not 0", nu.j)));
    }
    Ok(nu.scalar)
}

/// E3 vanishes in the rows quotiented by the window.
fn e3_clear_above(t: &AdmissibleTriple2, w: &Win2) -> Result<()> {
    witness(
        !t.e3.labels().iter().any(|l| l.1 > -w.q - 1),
        "window too coarse: E3 has coordinates inside F(q)",
    )
}

fn cf_witness(t: &AdmissibleTriple2, w: &Win2) -> Result<()> {
    need(t.e1.predicates().cf, "E1 cf")?;
    witness(t.e1.rows_low_inside(w.rows(), w.kh), "E1 rows leave the window in the u^-1 direction")
}

fn df_witness(t: &AdmissibleTriple2, w: &Win2) -> Result<()> {
    need(t.e3.predicates().df, "E3 df")?;
    witness(t.e3.rows_high_inside(w.rows(), w.kl), "E3 rows leave the window in the u direction")
}

fn build<K: Kind>(e: &FilteredObject2, w: Win2, t: super::Table, s: C64) -> Result<Elem2<K>> {
    Elem2::new(e, w, t, s)
}

pub fn beta_lower(t: &AdmissibleTriple2, f: &SchwartzC2, mu: &VirtualMeasure) -> Result<SchwartzC2> {
    on(&f.obj, &t.e2, "E2")?;
    let m = c_measure(t, mu)?;
    let w = f.win;
    let k = kappa(&t.e1, w.q, w.p, w.kl);
    build(&t.e3, w, f.table.sum_out(&in_shape(&t.e1, &w))?, f.scalar * m * k)
}

pub fn alpha_upper(t: &AdmissibleTriple2, f: &SchwartzC2, nu: &VirtualMeasure) -> Result<SchwartzC2> {
    on(&f.obj, &t.e2, "E2")?;
    let n = d_measure(t, nu)?;
    e3_clear_above(t, &f.win)?;
    build(&t.e1, f.win, f.table.restrict_zero(&in_shape(&t.e3, &f.win))?, f.scalar * n)
}

pub fn beta_upper(t: &AdmissibleTriple2, f: &SchwartzC2) -> Result<SchwartzC2> {
    on(&f.obj, &t.e3, "E3")?;
    cf_witness(t, &f.win)?;
    let c1 = canonical_one(&t.e1, f.win.q, t.e1.o_ref)?.scalar;
    build(&t.e2, f.win, f.table.inflate(&in_shape(&t.e1, &f.win))?, f.scalar * c1)
}

pub fn alpha_lower(t: &AdmissibleTriple2, f: &SchwartzC2) -> Result<SchwartzC2> {
    on(&f.obj, &t.e1, "E1")?;
    df_witness(t, &f.win)?;
    let d3 = canonical_delta(&t.e3, f.win.q, t.e3.o_ref)?.scalar;
    build(&t.e2, f.win, f.table.extend_zero(&in_shape(&t.e3, &f.win))?, f.scalar * d3)
}

/// Adjoint of β_*: S'(E3) -> S'(E2).
pub fn beta_upper_dist(t: &AdmissibleTriple2, h: &DistC2, mu: &VirtualMeasure) -> Result<DistC2> {
    on(&h.obj, &t.e3, "E3")?;
    let m = c_measure(t, mu)?;
    let w = h.win;
    let k = kappa(&t.e1, w.q, w.p, w.kl);
    build(&t.e2, w, h.table.inflate(&in_shape(&t.e1, &w))?, h.scalar * m * k)
}

/// Adjoint of α^*: S'(E1) -> S'(E2).
pub fn alpha_lower_dist(t: &AdmissibleTriple2, h: &DistC2, nu: &VirtualMeasure) -> Result<DistC2> {
    on(&h.obj, &t.e1, "E1")?;
    let n = d_measure(t, nu)?;
    e3_clear_above(t, &h.win)?;
    build(&t.e2, h.win, h.table.extend_zero(&in_shape(&t.e3, &h.win))?, h.scalar * n)
}

/// Adjoint of β^*: S'(E2) -> S'(E3).
pub fn beta_lower_dist(t: &AdmissibleTriple2, h: &DistC2) -> Result<DistC2> {
    on(&h.obj, &t.e2, "E2")?;
    cf_witness(t, &h.win)?;
    let c1 = canonical_one(&t.e1, h.win.q, t.e1.o_ref)?.scalar;
    build(&t.e3, h.win, h.table.sum_out(&in_shape(&t.e1, &h.win))?, h.scalar * c1)
}

/// Adjoint of α_*: S'(E2) -> S'(E1).
pub fn alpha_upper_dist(t: &AdmissibleTriple2, h: &DistC2) -> Result<DistC2> {
    on(&h.obj, &t.e2, "E2")?;
    df_witness(t, &h.win)?;
    let d3 = canonical_delta(&t.e3, h.win.q, t.e3.o_ref)?.scalar;
    build(&t.e1, h.win, h.table.restrict_zero(&in_shape(&t.e3, &h.win))?, h.scalar * d3)
}

/// Applies a function-level image; `measure` is μ or ν for the two measured modes.
pub fn image2(t: &AdmissibleTriple2, f: &SchwartzC2, mode: ImageMode2, measure: Option<&VirtualMeasure>) -> Result<SchwartzC2> {
    let m = || measure.ok_or_else(|| Error::Invalid(format!("{mode:?} needs a measure")));
    match mode {
        ImageMode2::BetaLower => beta_lower(t, f, m()?),
        ImageMode2::AlphaUpper => alpha_upper(t, f, m()?),
        ImageMode2::BetaUpper => beta_upper(t, f),
        ImageMode2::AlphaLower => alpha_lower(t, f),
    }
}

/// The distribution adjoint of `mode`.
pub fn image2_dist(t: &AdmissibleTriple2, h: &DistC2, mode: ImageMode2, measure: Option<&VirtualMeasure>) -> Result<DistC2> {
    let m = || measure.ok_or_else(|| Error::Invalid(format!("{mode:?} needs a measure")));
    match mode {
        ImageMode2::BetaLower => beta_upper_dist(t, h, m()?),
        ImageMode2::AlphaUpper => alpha_lower_dist(t, h, m()?),
        ImageMode2::BetaUpper => beta_lower_dist(t, h),
        ImageMode2::AlphaLower => alpha_upper_dist(t, h),
    }
}

/// Standard measures: μ = m·b1_{o,Ihi} and ν = n·b3_{o,Ilo}.
pub fn standard_mu(t: &AdmissibleTriple2, m: f64) -> Result<VirtualMeasure> {
    VirtualMeasure::new(&t.e1, t.e1.o_ref, t.e1.outer_window().1, c(m))
}

pub fn standard_nu(t: &AdmissibleTriple2, n: f64) -> Result<VirtualMeasure> {
    VirtualMeasure::new(&t.e3, t.e3.o_ref, t.e3.outer_window().0, c(n))
}

/// Source and target objects of a mode, for building test elements.
pub fn endpoints(t: &AdmissibleTriple2, mode: ImageMode2) -> (&FilteredObject2, &FilteredObject2) {
    match mode {
        ImageMode2::BetaLower => (&t.e2, &t.e3),
        ImageMode2::AlphaUpper => (&t.e2, &t.e1),
        ImageMode2::BetaUpper => (&t.e3, &t.e2),
        ImageMode2::AlphaLower => (&t.e1, &t.e2),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdjointReport {
    pub mode: ImageMode2,
    pub lhs: C64,
    pub rhs: C64,
    pub dev: f64,
}

/// ⟨image(f), H⟩ against ⟨f, adjoint(H)⟩.
pub fn adjoint_check(
    t: &AdmissibleTriple2,
    mode: ImageMode2,
    f: &SchwartzC2,
    h: &DistC2,
    measure: Option<&VirtualMeasure>,
) -> Result<AdjointReport> {
    let lhs = super::pairing2(&image2(t, f, mode, measure)?, h)?;
    let rhs = super::pairing2(f, &image2_dist(t, h, mode, measure)?)?;
    let dev = (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1.0);
    Ok(AdjointReport { mode, lhs, rhs, dev })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filt2::{make_local_field2, Coeff, Shape};
    use crate::harm2::Table;

    fn field(q: i64) -> FilteredObject2 {
        make_local_field2(Coeff::Fq(q), (-1, 1), (-1, 1)).unwrap()
    }

    fn t_split(q: i64) -> AdmissibleTriple2 {
        AdmissibleTriple2::from_sub(&field(q), &Shape::t_at_least(0)).unwrap()
    }

    fn u_split(q: i64) -> AdmissibleTriple2 {
        AdmissibleTriple2::from_sub(&field(q), &Shape::u_at_least(0)).unwrap()
    }

    #[test]
    fn adjointness_all_modes() {
        for q in [2, 3] {
            let tt = t_split(q);
            let tu = u_split(q);
            for mode in ImageMode2::ALL {
                let t = if mode.needs_measure() { &tt } else { &tu };
                let meas = match mode {
                    ImageMode2::BetaLower => Some(standard_mu(t, 1.7).unwrap()),
                    ImageMode2::AlphaUpper => Some(standard_nu(t, 0.6).unwrap()),
                    _ => None,
                };
                let (src, dst) = endpoints(t, mode);
                let f = SchwartzC2::random(src, src.full_window(), 2, 3).unwrap();
                let h = DistC2::random(dst, dst.full_window(), 2, 4).unwrap();
                let r = adjoint_check(t, mode, &f, &h, meas.as_ref()).unwrap();
                assert!(r.dev < 1e-9, "{mode:?} q={q}: {r:?}");
            }
        }
    }

    #[test]
    fn hypothesis_errors_are_named() {
        let t = u_split(2);
        let nu = VirtualMeasure::new(&t.e3, 0, -2, c(1.0)).unwrap();
        let f = SchwartzC2::random(&t.e2, t.e2.full_window(), 1, 1).unwrap();
        match alpha_upper(&t, &f, &nu) {
            Err(Error::Hypothesis(h)) => assert_eq!(h, "E3 d"),
            other => panic!("{other:?}"),
        }
        let g = SchwartzC2::random(&t_split(2).e1, t.e2.full_window(), 1, 1).unwrap();
        assert!(matches!(alpha_lower(&t_split(2), &g), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn extension_of_one_is_lattice_indicator() {
        let t = u_split(2);
        let w = t.e1.full_window();
        let one = SchwartzC2::constant(&t.e1, w, c(1.0)).unwrap();
        let d = alpha_lower(&t, &one).unwrap();
        let ind = Table::subgroup_indicator(2, t.e2.labels_in(&w), &|l| l.0 < 0);
        let d3 = canonical_delta(&t.e3, w.q, 0).unwrap().scalar;
        assert!(d.values().max_dev(&ind.scale(d3)) < 1e-12);
    }

    #[test]
    fn fibre_sum_oracle() {
        // indicator of the product cell, integrated along E1 = {b >= 0}
        let t = t_split(2);
        let w = t.e2.full_window();
        let f = SchwartzC2::delta(&t.e2, w, c(1.0)).unwrap();
        let mu = standard_mu(&t, 1.0).unwrap();
        let g = beta_lower(&t, &f, &mu).unwrap();
        // two E1 rows, each normalized by Λ_0 = {a >= 0} (two labels), point cells
        let want = Table::delta(2, t.e3.labels_in(&w), c(1.0 / 16.0));
        assert!(g.values().max_dev(&want) < 1e-12);
    }
}

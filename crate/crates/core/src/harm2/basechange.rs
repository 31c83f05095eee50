//! Base change, composition and Fourier/image squares.

use serde::{Deserialize, Serialize};

use super::images::*;
use super::{DistC2, Elem2, Kind, SchwartzC2};
use crate::filt2::{AdmissibleTriple2, FilteredObject2, ThreeZvezda, Zvezda};
use crate::vmeas::{dual_transport, VirtualMeasure};
use crate::{Error, Result};

/// The diagram an identity is evaluated on.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Square {
    Zvezda(Zvezda),
    Three(ThreeZvezda),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BaseChangeReport {
    pub identity: String,
    pub hypothesis: String,
    pub max_deviation: f64,
    /// Sup norm of the left side, to rule out vacuous agreement.
    pub lhs_norm: f64,
    pub points_log_q: usize,
}

/// Hypotheses of (ut1)..(ut16).
pub fn hypothesis(id: u8) -> &'static str {
    match id {
        1 | 2 => "E1 c, B d",
        3 | 4 => "E1 cf, B df",
        5 | 6 => "E1 c, B df",
        7 | 8 => "E1 cf, B d",
        9 | 10 => "E1 c, D c",
        11 | 12 => "E1 cf, D cf",
        13 | 14 => "E3 d, L' d",
        15 | 16 => "E3 df, L' df",
        _ => "",
    }
}

fn need(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Hypothesis(what.into()))
    }
}

fn rel_dev<K: Kind>(a: &Elem2<K>, b: &Elem2<K>) -> f64 {
    a.max_dev(b) / a.values().norm_max().max(b.values().norm_max()).max(1.0)
}

fn report<K: Kind>(id: u8, a: &Elem2<K>, b: &Elem2<K>) -> BaseChangeReport {
    BaseChangeReport {
        identity: format!("ut{id}"),
        hypothesis: hypothesis(id).into(),
        max_deviation: rel_dev(a, b),
        lhs_norm: a.values().norm_max(),
        points_log_q: a.table.n().max(b.table.n()),
    }
}

fn fun(e: &FilteredObject2, seed: u64) -> Result<SchwartzC2> {
    SchwartzC2::random(e, e.full_window(), 2, seed)
}

fn dist(e: &FilteredObject2, seed: u64) -> Result<DistC2> {
    DistC2::random(e, e.full_window(), 2, seed)
}

/// μ⊗ν on the middle term of `t`, from measures of the same kind on its ends.
fn product_mu(t: &AdmissibleTriple2, mu: &VirtualMeasure, nu: &VirtualMeasure) -> Result<VirtualMeasure> {
    standard_mu(t, 1.0)?.scale(mu.scalar * nu.scalar)
}

fn product_nu(t: &AdmissibleTriple2, mu: &VirtualMeasure, nu: &VirtualMeasure) -> Result<VirtualMeasure> {
    standard_nu(t, 1.0)?.scale(mu.scalar * nu.scalar)
}

/// Evaluates both sides of identity `id` on random elements; `m`, `n` scale the measures.
pub fn base_change2_check(sq: &Square, id: u8, m: f64, n: f64, seed: u64) -> Result<BaseChangeReport> {
    match (sq, id) {
        (Square::Zvezda(z), 1..=12) => zvezda_check(z, id, m, n, seed),
        (Square::Three(z), 13..=16) => three_check(z, id, m, n, seed),
        (_, 1..=16) => Err(Error::Invalid(format!("ut{id} is not defined on this diagram"))),
        _ => Err(Error::Invalid(format!("no identity ut{id}"))),
    }
}

fn zvezda_check(z: &Zvezda, id: u8, m: f64, n: f64, seed: u64) -> Result<BaseChangeReport> {
    // base E1 -> E2 -> E3, right D -> E3 -> B, top E1 -> X' -> D, left X' -> E2 -> B
    let (t, r, p, l) = (&z.base, &z.right, &z.top, &z.left);
    let (e1, d, b) = (t.e1.predicates(), r.e1.predicates(), r.e3.predicates());
    match id {
        1 | 2 => need(e1.c && b.d, hypothesis(id))?,
        3 | 4 => need(e1.cf && b.df, hypothesis(id))?,
        5 | 6 => need(e1.c && b.df, hypothesis(id))?,
        7 | 8 => need(e1.cf && b.d, hypothesis(id))?,
        9 | 10 => need(e1.c && d.c, hypothesis(id))?,
        _ => need(e1.cf && d.cf, hypothesis(id))?,
    }
    let mu = || standard_mu(t, m);
    let nu = || standard_nu(r, n);
    Ok(match id {
        1 => {
            let f = fun(&t.e2, seed)?;
            let a = alpha_upper(r, &beta_lower(t, &f, &mu()?)?, &nu()?)?;
            let b = beta_lower(p, &alpha_upper(l, &f, &nu()?)?, &mu()?)?;
            report(id, &a, &b)
        }
        2 => {
            let g = dist(&r.e1, seed)?;
            let a = beta_upper_dist(t, &alpha_lower_dist(r, &g, &nu()?)?, &mu()?)?;
            let b = alpha_lower_dist(l, &beta_upper_dist(p, &g, &mu()?)?, &nu()?)?;
            report(id, &a, &b)
        }
        3 => {
            let f = fun(&r.e1, seed)?;
            let a = beta_upper(t, &alpha_lower(r, &f)?)?;
            let b = alpha_lower(l, &beta_upper(p, &f)?)?;
            report(id, &a, &b)
        }
        4 => {
            let g = dist(&t.e2, seed)?;
            let a = alpha_upper_dist(r, &beta_lower_dist(t, &g)?)?;
            let b = beta_lower_dist(p, &alpha_upper_dist(l, &g)?)?;
            report(id, &a, &b)
        }
        5 => {
            let f = fun(&l.e1, seed)?;
            let a = beta_lower(t, &alpha_lower(l, &f)?, &mu()?)?;
            let b = alpha_lower(r, &beta_lower(p, &f, &mu()?)?)?;
            report(id, &a, &b)
        }
        6 => {
            let g = dist(&t.e3, seed)?;
            let a = alpha_upper_dist(l, &beta_upper_dist(t, &g, &mu()?)?)?;
            let b = beta_upper_dist(p, &alpha_upper_dist(r, &g)?, &mu()?)?;
            report(id, &a, &b)
        }
        7 => {
            let f = fun(&t.e3, seed)?;
            let a = alpha_upper(l, &beta_upper(t, &f)?, &nu()?)?;
            let b = beta_upper(p, &alpha_upper(r, &f, &nu()?)?)?;
            report(id, &a, &b)
        }
        8 => {
            let g = dist(&l.e1, seed)?;
            let a = beta_lower_dist(t, &alpha_lower_dist(l, &g, &nu()?)?)?;
            let b = alpha_lower_dist(r, &beta_lower_dist(p, &g)?, &nu()?)?;
            report(id, &a, &b)
        }
        9 => {
            // ν ∈ μ(D(o)|D) now sits on the kernel of δ
            let nu_d = standard_mu(r, n)?;
            let f = fun(&t.e2, seed)?;
            let a = beta_lower(l, &f, &product_mu(l, &mu()?, &nu_d)?)?;
            let b = beta_lower(r, &beta_lower(t, &f, &mu()?)?, &nu_d)?;
            report(id, &a, &b)
        }
        10 => {
            let nu_d = standard_mu(r, n)?;
            let g = dist(&r.e3, seed)?;
            let a = beta_upper_dist(l, &g, &product_mu(l, &mu()?, &nu_d)?)?;
            let b = beta_upper_dist(t, &beta_upper_dist(r, &g, &nu_d)?, &mu()?)?;
            report(id, &a, &b)
        }
        11 => {
            let f = fun(&r.e3, seed)?;
            let a = beta_upper(l, &f)?;
            let b = beta_upper(t, &beta_upper(r, &f)?)?;
            report(id, &a, &b)
        }
        _ => {
            let g = dist(&t.e2, seed)?;
            let a = beta_lower_dist(l, &g)?;
            let b = beta_lower_dist(r, &beta_lower_dist(t, &g)?)?;
            report(id, &a, &b)
        }
    })
}

fn three_check(z: &ThreeZvezda, id: u8, m: f64, n: f64, seed: u64) -> Result<BaseChangeReport> {
    // top E1 -> E2 -> E3, left E2 -> H' -> L', mid E1 -> H' -> E3 ⨿ H', right E3 -> E3 ⨿ H' -> L'
    let (t, l, md) = (&z.top, &z.left, &z.mid);
    let (e3, lp) = (t.e3.predicates(), l.e3.predicates());
    match id {
        13 | 14 => need(e3.d && lp.d, hypothesis(id))?,
        _ => need(e3.df && lp.df, hypothesis(id))?,
    }
    let mu = || standard_nu(t, m);
    let nu = || standard_nu(l, n);
    Ok(match id {
        13 => {
            let f = fun(&l.e2, seed)?;
            let a = alpha_upper(md, &f, &product_nu(md, &mu()?, &nu()?)?)?;
            let b = alpha_upper(t, &alpha_upper(l, &f, &nu()?)?, &mu()?)?;
            report(id, &a, &b)
        }
        14 => {
            let g = dist(&t.e1, seed)?;
            let a = alpha_lower_dist(md, &g, &product_nu(md, &mu()?, &nu()?)?)?;
            let b = alpha_lower_dist(l, &alpha_lower_dist(t, &g, &mu()?)?, &nu()?)?;
            report(id, &a, &b)
        }
        15 => {
            let f = fun(&t.e1, seed)?;
            let a = alpha_lower(md, &f)?;
            let b = alpha_lower(l, &alpha_lower(t, &f)?)?;
            report(id, &a, &b)
        }
        _ => {
            let g = dist(&l.e2, seed)?;
            let a = alpha_upper_dist(md, &g)?;
            let b = alpha_upper_dist(t, &alpha_upper_dist(l, &g)?)?;
            report(id, &a, &b)
        }
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SquareReport {
    pub square: u8,
    pub hypothesis: String,
    pub max_deviation: f64,
    pub points_log_q: usize,
}

pub fn square_hypothesis(sq: u8) -> &'static str {
    match sq {
        1 | 3 => "E1 c",
        2 | 4 => "E3 d",
        5 | 7 => "E1 cf",
        _ => "E3 df",
    }
}

/// Square `sq` of Fourier against the images of `t`, ending in the dual triple.
pub fn pppp_check(t: &AdmissibleTriple2, sq: u8, m: f64, n: f64, seed: u64) -> Result<SquareReport> {
    if !(1..=8).contains(&sq) {
        return Err(Error::Invalid(format!("no square {sq}")));
    }
    let td = t.dual();
    let mu = || standard_mu(t, m);
    let nu = || standard_nu(t, n);
    let fin = |a: &dyn Fn() -> Result<f64>, pts: usize| -> Result<SquareReport> {
        Ok(SquareReport { square: sq, hypothesis: square_hypothesis(sq).into(), max_deviation: a()?, points_log_q: pts })
    };
    match sq {
        1 => {
            let f = fun(&t.e2, seed)?;
            let a = beta_lower(t, &f, &mu()?)?.fourier2()?;
            let b = alpha_upper(&td, &f.fourier2()?, &dual_transport(&mu()?))?;
            fin(&|| Ok(rel_dev(&a, &b)), a.table.n())
        }
        2 => {
            let f = fun(&t.e2, seed)?;
            let a = alpha_upper(t, &f, &nu()?)?.fourier2()?;
            let b = beta_lower(&td, &f.fourier2()?, &dual_transport(&nu()?))?;
            fin(&|| Ok(rel_dev(&a, &b)), a.table.n())
        }
        3 => {
            let g = dist(&t.e3, seed)?;
            let a = beta_upper_dist(t, &g, &mu()?)?.fourier2_dist()?;
            let b = alpha_lower_dist(&td, &g.fourier2_dist()?, &dual_transport(&mu()?))?;
            fin(&|| Ok(rel_dev(&a, &b)), a.table.n())
        }
        4 => {
            let g = dist(&t.e1, seed)?;
            let a = alpha_lower_dist(t, &g, &nu()?)?.fourier2_dist()?;
            let b = beta_upper_dist(&td, &g.fourier2_dist()?, &dual_transport(&nu()?))?;
            fin(&|| Ok(rel_dev(&a, &b)), a.table.n())
        }
        5 => {
            let f = fun(&t.e3, seed)?;
            let a = beta_upper(t, &f)?.fourier2()?;
            let b = alpha_lower(&td, &f.fourier2()?)?;
            fin(&|| Ok(rel_dev(&a, &b)), a.table.n())
        }
        6 => {
            let f = fun(&t.e1, seed)?;
            let a = alpha_lower(t, &f)?.fourier2()?;
            let b = beta_upper(&td, &f.fourier2()?)?;
            fin(&|| Ok(rel_dev(&a, &b)), a.table.n())
        }
        7 => {
            let g = dist(&t.e2, seed)?;
            let a = beta_lower_dist(t, &g)?.fourier2_dist()?;
            let b = alpha_upper_dist(&td, &g.fourier2_dist()?)?;
            fin(&|| Ok(rel_dev(&a, &b)), a.table.n())
        }
        _ => {
            let g = dist(&t.e2, seed)?;
            let a = alpha_upper_dist(t, &g)?.fourier2_dist()?;
            let b = beta_lower_dist(&td, &g.fourier2_dist()?)?;
            fin(&|| Ok(rel_dev(&a, &b)), a.table.n())
        }
    }
}

/// Desk square with E1 c and cf, B d and df, D c and cf: E1 = {b >= 1, a >= 0},
/// D = {-1 <= b <= 0, a >= -1}, B = {b <= -2, a <= 0}.
pub fn desk_zvezda(q: i64, t_range: (i64, i64), u_range: (i64, i64)) -> Result<Zvezda> {
    use crate::filt2::{fibered_product2_checked, make_local_field2, Coeff, Shape};
    let e1 = Shape::rect((Some(0), None), (Some(1), None));
    let d = Shape::rect((Some(-1), None), (Some(-1), Some(0)));
    let b = Shape::rect((None, Some(0)), (None, Some(-2)));
    let e2 = make_local_field2(Coeff::Fq(q), t_range, u_range)?.with_shape(e1.union(&d).union(&b));
    let t = AdmissibleTriple2::from_sub(&e2, &e1)?;
    fibered_product2_checked(&t, &d)
}

/// Desk amalgam with E3 and L' both d and df: E1 = {b >= 1, a >= 0},
/// E3 = {-1 <= b <= 0, a <= 0}, L' = {b <= -2, a <= 0}.
pub fn desk_three_zvezda(q: i64, t_range: (i64, i64), u_range: (i64, i64)) -> Result<ThreeZvezda> {
    use crate::filt2::{amalgam2, make_local_field2, Coeff, Shape};
    let e1 = Shape::rect((Some(0), None), (Some(1), None));
    let e3 = Shape::rect((None, Some(0)), (Some(-1), Some(0)));
    let lp = Shape::rect((None, Some(0)), (None, Some(-2)));
    let e2 = e1.union(&e3);
    let h = make_local_field2(Coeff::Fq(q), t_range, u_range)?.with_shape(e2.union(&lp));
    let left = AdmissibleTriple2::from_sub(&h, &e2)?;
    amalgam2(&left, &e1)
}

/// Triple with E1 c and cf, E3 d and df: E1 = {a >= 0, b >= 0}, E3 = {a < 0, b < 0}.
pub fn desk_square_triple(q: i64, t_range: (i64, i64), u_range: (i64, i64)) -> Result<AdmissibleTriple2> {
    use crate::filt2::{make_local_field2, Coeff, Shape};
    let e1 = Shape::rect((Some(0), None), (Some(0), None));
    let e3 = Shape::rect((None, Some(-1)), (None, Some(-1)));
    let e2 = make_local_field2(Coeff::Fq(q), t_range, u_range)?.with_shape(e1.union(&e3));
    AdmissibleTriple2::from_sub(&e2, &e1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filt2::{fibered_product2, make_local_field2, Coeff, Shape};

    #[test]
    fn all_zvezda_identities() {
        for (q, t, u) in [(2, (-3, 2), (-1, 1)), (3, (-2, 1), (-1, 0))] {
            let z = Square::Zvezda(desk_zvezda(q, t, u).unwrap());
            for id in 1..=12 {
                let r = base_change2_check(&z, id, 1.3, 0.7, 40 + id as u64).unwrap();
                assert!(r.max_deviation < 1e-9 && r.lhs_norm > 1e-9, "q={q} {r:?}");
            }
        }
    }

    #[test]
    fn all_amalgam_identities() {
        for (q, t, u) in [(2, (-3, 2), (-1, 1)), (3, (-2, 1), (-1, 0))] {
            let z = Square::Three(desk_three_zvezda(q, t, u).unwrap());
            for id in 13..=16 {
                let r = base_change2_check(&z, id, 0.5, 2.0, id as u64).unwrap();
                assert!(r.max_deviation < 1e-9 && r.lhs_norm > 1e-9, "q={q} {r:?}");
            }
        }
    }

    #[test]
    fn identity_gamma_is_degenerate() {
        let z = desk_zvezda(2, (-3, 2), (-1, 1)).unwrap();
        let full = fibered_product2(&z.base, &z.base.e3.shape).unwrap();
        assert!(full.left.e1.shape.same_as(&z.base.e2.shape));
        let r = base_change2_check(&Square::Zvezda(full), 1, 1.0, 1.0, 3).unwrap();
        assert!(r.max_deviation < 1e-12);
    }

    #[test]
    fn hypotheses_are_enforced() {
        let e = make_local_field2(Coeff::Fq(2), (-1, 1), (-1, 1)).unwrap();
        let t = AdmissibleTriple2::from_sub(&e, &Shape::t_at_least(0)).unwrap();
        let z = Square::Zvezda(fibered_product2(&t, &Shape::t_at_most(-1)).unwrap());
        // E1 = {b >= 0} has rows unbounded in a
        match base_change2_check(&z, 3, 1.0, 1.0, 0) {
            Err(Error::Hypothesis(h)) => assert_eq!(h, "E1 cf, B df"),
            other => panic!("{other:?}"),
        }
        assert!(base_change2_check(&z, 13, 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn wrong_product_measure_is_detected() {
        let z = desk_zvezda(2, (-3, 2), (-1, 1)).unwrap();
        let (t, r, l) = (&z.base, &z.right, &z.left);
        let f = fun(&t.e2, 1).unwrap();
        let mu = standard_mu(t, 1.0).unwrap();
        let nu = standard_mu(r, 2.0).unwrap();
        let a = beta_lower(l, &f, &standard_mu(l, 1.0).unwrap()).unwrap();
        let b = beta_lower(r, &beta_lower(t, &f, &mu).unwrap(), &nu).unwrap();
        assert!(rel_dev(&a, &b) > 1e-3);
    }

    #[test]
    fn eight_squares_commute() {
        for (q, t, u) in [(2, (-2, 1), (-1, 1)), (3, (-1, 1), (-1, 0))] {
            let tr = desk_square_triple(q, t, u).unwrap();
            for sq in 1..=8 {
                let r = pppp_check(&tr, sq, 1.5, 0.8, 7 + sq as u64).unwrap();
                assert!(r.max_deviation < 1e-9, "q={q} {r:?}");
            }
        }
    }
}

//! The adelic complex of O(n·∞) on P^1 over F_q and the quotient sequence at a rational place.

use serde::{Deserialize, Serialize};

use super::fq::{self, rank};
use super::{places_up_to, Place, TruncatedAdele};
use crate::{Error, Result};

/// Finite places of degree at most this enter S in the cohomology computation.
const COMPLEX_PLACE_DEGREE: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveCohomology {
    pub q: i64,
    pub n: i64,
    pub truncation: i64,
    pub places: usize,
    pub ambient_dim: usize,
    pub h0: usize,
    pub h1: usize,
}

/// Product of π^e over the finite places, the common denominator of the
/// functions with poles of order <= e on S.
fn denominator(q: u32, places: &[Place], e: usize) -> fq::Poly {
    places.iter().fold(vec![1], |acc, x| match x {
        Place::Finite { poly, .. } => fq::mul(&acc, &fq::pow(poly, e, q), q),
        _ => acc,
    })
}

fn finite_degree(places: &[Place]) -> usize {
    places.iter().filter(|x| matches!(x, Place::Finite { .. })).map(|x| x.degree()).sum()
}

/// Basis of {f : poles only on S, of order <= e at every place of S}, as (num, den).
fn bounded_pole_basis(q: u32, places: &[Place], e: usize) -> (Vec<fq::Poly>, fq::Poly) {
    let den = denominator(q, places, e);
    let top = e * finite_degree(places) + if places.contains(&Place::Infinity) { e } else { 0 };
    ((0..=top).map(fq::monomial).collect(), den)
}

/// H^0 and H^1 of A_0 ⊕ A_1 -> A_01 for D = n·∞, every place of S kept at valuations [-T, T).
pub fn adelic_complex_curve(q: i64, n: i64, truncation: i64) -> Result<CurveCohomology> {
    let qq = fq::check_prime(q)?;
    let t = truncation;
    if t < n + 2 || t < 1 - n {
        return Err(Error::Cutoff(format!("truncation {t} too small for n = {n}")));
    }
    let mut places = places_up_to(qq, COMPLEX_PLACE_DEGREE);
    places.push(Place::Infinity);
    let inf = places.len() - 1;
    let ad = TruncatedAdele::new(qq, places.clone(), vec![(-t, t); places.len()])?;
    let (nums, den) = bounded_pole_basis(qq, &places, t as usize);
    let mut rows = nums.iter().map(|f| ad.embed(f, &den)).collect::<Result<Vec<_>>>()?;
    for i in 0..places.len() {
        let from = if i == inf { -n } else { 0 };
        rows.extend(ad.coords_from(i, from).into_iter().map(|c| ad.unit(c)));
    }
    let r = rank(&rows, qq);
    Ok(CurveCohomology {
        q,
        n,
        truncation,
        places: places.len(),
        ambient_dim: ad.dim(),
        h0: rows.len() - r,
        h1: ad.dim() - r,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SequenceReport {
    pub level: i64,
    pub ambient_dim: usize,
    /// dim of the truncated ∏_{x≠p} Ô_x
    pub first_dim: usize,
    /// dim of the truncated A/k(D)
    pub middle_dim: usize,
    /// dim of the truncated K_p/A_p
    pub last_dim: usize,
    pub injectivity_defect: usize,
    pub middle_defect: usize,
    pub surjectivity_defect: usize,
    pub kernel_defect: usize,
    pub defect: usize,
    /// every vector of the first term sits at valuations >= 0
    pub first_term_compact: bool,
    /// K_p = A_p ⊕ (positive valuations) inside the window
    pub quotient_compact: bool,
}

/// 0 -> ∏_{x≠p} Ô_x -> A/k(D) -> K_p/A_p -> 0 at level L: places of degree <= max(L, 1),
/// windows [-L, L), functions with poles of order <= L on S.
pub fn curve_quotient_sequence_check(q: i64, p: &Place, level: i64) -> Result<SequenceReport> {
    let qq = fq::check_prime(q)?;
    if !p.is_rational() || matches!(p, Place::Prime(_)) {
        return Err(Error::Hypothesis("p must be a rational place of P^1".into()));
    }
    if level < 0 {
        return Err(Error::Cutoff(format!("level {level} < 0")));
    }
    let l = level;
    let mut places = places_up_to(qq, (l as usize).max(1));
    places.push(Place::Infinity);
    let ip = places
        .iter()
        .position(|x| x == p)
        .ok_or_else(|| Error::Invalid(format!("{p:?} is not a place over F_{q}")))?;
    let ad = TruncatedAdele::new(qq, places.clone(), vec![(-l, l); places.len()])?;
    let (nums, den) = bounded_pole_basis(qq, &places, l as usize);
    let w: Vec<Vec<u32>> = if l == 0 {
        vec![]
    } else {
        nums.iter().map(|f| ad.embed(f, &den)).collect::<Result<_>>()?
    };
    let u: Vec<Vec<u32>> = (0..places.len())
        .filter(|&i| i != ip)
        .flat_map(|i| ad.coords_from(i, 0))
        .map(|c| ad.unit(c))
        .collect();
    let p_coords = ad.coords_of(ip);
    let kp: Vec<Vec<u32>> = p_coords.iter().map(|&c| ad.unit(c)).collect();
    // A_p: poles only at p, of order <= L, seen in the p-window alone
    let pi_p: fq::Poly = match p {
        Place::Finite { poly, .. } => poly.clone(),
        _ => vec![],
    };
    let ap: Vec<Vec<u32>> = if l == 0 {
        vec![]
    } else {
        (0..=l as usize)
            .map(|j| {
                let (num, den) = if pi_p.is_empty() { (fq::monomial(j), vec![1]) } else { (vec![1], fq::pow(&pi_p, j, qq)) };
                let full = ad.embed(&num, &den)?;
                Ok(ad.unit_mask(&full, &p_coords))
            })
            .collect::<Result<_>>()?
    };

    let cat = |parts: &[&[Vec<u32>]]| parts.iter().flat_map(|s| s.iter().cloned()).collect::<Vec<_>>();
    let r_w = rank(&w, qq);
    let r_wu = rank(&cat(&[&w, &u]), qq);
    let r_all = rank(&cat(&[&w, &u, &kp]), qq);
    let r_ap = rank(&ap, qq);
    let dim = ad.dim();
    let ker = kp.len() - (r_all - r_wu);
    let ap_inside = rank(&cat(&[&w, &u, &ap]), qq) == r_wu;
    let first_dim = u.len();
    let last_dim = kp.len() - r_ap;
    let middle_dim = dim - r_w;

    let injectivity_defect = first_dim - (r_wu - r_w);
    let surjectivity_defect = dim - r_all;
    let kernel_defect = ker.abs_diff(r_ap) + usize::from(!ap_inside);
    let middle_defect = middle_dim.abs_diff(first_dim + last_dim);
    let first_term_compact = u.iter().all(|v| {
        v.iter().enumerate().all(|(c, &x)| x == 0 || (0..places.len()).any(|i| ad.coords_from(i, 0).contains(&c)))
    });
    let positive: Vec<Vec<u32>> = ad.coords_from(ip, 1).into_iter().map(|c| ad.unit(c)).collect();
    let quotient_compact = rank(&cat(&[&ap, &positive]), qq) == kp.len() && r_ap + positive.len() == kp.len();
    Ok(SequenceReport {
        level,
        ambient_dim: dim,
        first_dim,
        middle_dim,
        last_dim,
        injectivity_defect,
        middle_defect,
        surjectivity_defect,
        kernel_defect,
        defect: injectivity_defect + middle_defect + surjectivity_defect + kernel_defect,
        first_term_compact,
        quotient_compact,
    })
}

impl TruncatedAdele {
    /// `v` with every coordinate outside `keep` set to zero.
    pub fn unit_mask(&self, v: &[u32], keep: &[usize]) -> Vec<u32> {
        let mut out = vec![0; v.len()];
        for &c in keep {
            out[c] = v[c];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// q^{h0} by listing reduced fractions P/Q with Q monic of degree <= 2 and keeping
    /// those that are polynomials of degree <= n.
    fn brute_h0(q: u32, n: i64) -> usize {
        if n < 0 {
            return 0;
        }
        let mut seen = HashSet::new();
        let dens: Vec<fq::Poly> = (0..=2).flat_map(|d| fq::monic_of_degree(q, d)).collect();
        for num in fq::all_polys(q, n as usize + 3) {
            for den in &dens {
                let (quo, r) = fq::divrem(&num, den, q);
                if r.is_empty() && fq::deg(&quo) <= n {
                    seen.insert(quo);
                }
            }
        }
        let mut h = 0;
        while q.pow(h as u32) < seen.len() as u32 {
            h += 1;
        }
        assert_eq!(q.pow(h as u32) as usize, seen.len());
        h
    }

    #[test]
    fn riemann_roch_against_brute_force() {
        for q in [2u32, 3] {
            for n in -3..=6i64 {
                let t = (n.abs() + 2).max(1 - n);
                let c = adelic_complex_curve(q as i64, n, t).unwrap();
                let h0 = brute_h0(q, n);
                // Serre duality on P^1: h1(n) = h0(-2-n)
                let h1 = brute_h0(q, -2 - n);
                assert_eq!((c.h0, c.h1), (h0, h1), "q={q} n={n}");
                assert_eq!(c.h0 as i64 - c.h1 as i64, n + 1);
            }
        }
    }

    #[test]
    fn examples() {
        let r = |n, t| {
            let c = adelic_complex_curve(2, n, t).unwrap();
            (c.h0, c.h1)
        };
        assert_eq!(r(2, 4), (3, 0));
        assert_eq!(r(0, 2), (1, 0));
        assert_eq!(r(-1, 2), (0, 0));
        assert!(adelic_complex_curve(2, 3, 4).is_err());
        assert!(adelic_complex_curve(2, -3, 3).is_err());
        assert!(adelic_complex_curve(4, 0, 2).is_err());
    }

    #[test]
    fn larger_truncation_is_stable() {
        for t in 3..6 {
            let c = adelic_complex_curve(3, 1, t).unwrap();
            assert_eq!((c.h0, c.h1), (2, 0));
        }
    }

    #[test]
    fn quotient_sequence_exact() {
        for q in [2, 3] {
            for l in 0..=3 {
                let r = curve_quotient_sequence_check(q, &Place::Infinity, l).unwrap();
                assert_eq!(r.defect, 0, "{q} {l}: {r:?}");
                assert!(r.first_term_compact && r.quotient_compact);
                assert_eq!(r.last_dim, (l - 1).max(0) as usize);
            }
        }
        let p = Place::finite(3, vec![1, 1]).unwrap();
        for l in 1..=2 {
            assert_eq!(curve_quotient_sequence_check(3, &p, l).unwrap().defect, 0);
        }
        assert!(curve_quotient_sequence_check(2, &Place::finite(2, vec![1, 1, 1]).unwrap(), 2).is_err());
    }

    #[test]
    fn level_zero_is_empty() {
        let r = curve_quotient_sequence_check(2, &Place::Infinity, 0).unwrap();
        assert_eq!((r.ambient_dim, r.defect), (0, 0));
    }
}

//! Desk-scale adelic instances: P^1 over F_q, P^1 x P^1, and Z inside Q.

pub mod analogy;
pub mod curve;
pub mod fq;
pub mod numfield;
pub mod surface;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};
use fq::Poly;

pub use analogy::{arithmetic_analogy_series, AnalogyDegree, AnalogyReport, CoefQuotient};
pub use curve::{adelic_complex_curve, curve_quotient_sequence_check, CurveCohomology, SequenceReport};
pub use numfield::{number_field_desk_check, NumberFieldReport};
pub use surface::{surface_quotient_dimension, theorem4_truncated_check, BoxSubspace, MonomialBoxSpace, Theorem4Report};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Place {
    /// monic irreducible π over F_q
    Finite { q: u32, poly: Poly, degree: usize },
    Infinity,
    Prime(i64),
}

impl Place {
    pub fn finite(q: i64, poly: Poly) -> Result<Self> {
        let q = fq::check_prime(q)?;
        let poly = fq::trim(poly);
        if poly.last() != Some(&1) || !fq::is_irreducible(&poly, q) {
            return Err(Error::Invalid(format!("{poly:?} is not monic irreducible over F_{q}")));
        }
        Ok(Place::Finite { q, degree: poly.len() - 1, poly })
    }

    pub fn prime(p: i64) -> Result<Self> {
        if !fq::is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        Ok(Place::Prime(p))
    }

    pub fn degree(&self) -> usize {
        match self {
            Place::Finite { degree, .. } => *degree,
            _ => 1,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }
}

/// Finite places of F_q(u) of degree <= d, by degree then coefficients.
pub fn places_up_to(q: u32, d: usize) -> Vec<Place> {
    (1..=d)
        .flat_map(|k| fq::irreducibles(q, k))
        .map(|poly| Place::Finite { q, degree: poly.len() - 1, poly })
        .collect()
}

/// Digits of num/den at `x` for valuations lo..hi, `degree` F_q-coordinates each.
pub fn expand(q: u32, num: &[u32], den: &[u32], x: &Place, lo: i64, hi: i64) -> Result<Vec<u32>> {
    let d = x.degree();
    let mut out = vec![0u32; (hi - lo).max(0) as usize * d];
    let num = fq::trim(num.to_vec());
    if num.is_empty() || hi <= lo {
        return Ok(out);
    }
    let (pi, mut a, mut b, mut v): (Poly, Poly, Poly, i64) = match x {
        Place::Finite { poly, .. } => (poly.clone(), num, den.to_vec(), 0),
        Place::Infinity => {
            let rev = |f: &[u32]| fq::trim(f.iter().rev().copied().collect());
            (vec![0, 1], rev(&num), rev(den), fq::deg(den) - fq::deg(&num))
        }
        Place::Prime(_) => return Err(Error::Invalid("not a function-field place".into())),
    };
    for (f, s) in [(&mut a, 1), (&mut b, -1)] {
        loop {
            let (qt, r) = fq::divrem(f, &pi, q);
            if !r.is_empty() {
                break;
            }
            *f = qt;
            v += s;
        }
    }
    if v < lo {
        return Err(Error::Cutoff(format!("valuation {v} below window {lo}")));
    }
    if v >= hi {
        return Ok(out);
    }
    let n = (hi - v) as usize;
    let m = fq::pow(&pi, n, q);
    let inv = fq::inv_mod(&b, &m, q).ok_or_else(|| Error::Invalid("denominator not coprime".into()))?;
    let mut g = fq::rem(&fq::mul(&a, &inv, q), &m, q);
    for i in 0..n {
        let (qt, r) = fq::divrem(&g, &pi, q);
        let j = v + i as i64 - lo;
        for (k, &c) in r.iter().enumerate() {
            out[j as usize * d + k] = c;
        }
        g = qt;
    }
    Ok(out)
}

/// Adeles truncated to a valuation window at each place of a finite set S;
/// components outside S are integral and dropped.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TruncatedAdele {
    pub q: u32,
    pub places: Vec<Place>,
    /// valuations lo..hi kept at each place
    pub windows: Vec<(i64, i64)>,
}

impl TruncatedAdele {
    pub fn new(q: u32, places: Vec<Place>, windows: Vec<(i64, i64)>) -> Result<Self> {
        if places.len() != windows.len() || windows.iter().any(|w| w.0 > w.1) {
            return Err(Error::Invalid("one window lo <= hi per place".into()));
        }
        Ok(Self { q, places, windows })
    }

    fn block(&self, i: usize) -> usize {
        (self.windows[i].1 - self.windows[i].0) as usize * self.places[i].degree()
    }

    pub fn offset(&self, i: usize) -> usize {
        (0..i).map(|k| self.block(k)).sum()
    }

    pub fn dim(&self) -> usize {
        self.offset(self.places.len())
    }

    /// Coordinates of place i at valuations >= v.
    pub fn coords_from(&self, i: usize, v: i64) -> Vec<usize> {
        let (lo, hi) = self.windows[i];
        let d = self.places[i].degree();
        let o = self.offset(i);
        (v.max(lo)..hi).flat_map(|j| (0..d).map(move |k| o + (j - lo) as usize * d + k)).collect()
    }

    pub fn coords_of(&self, i: usize) -> Vec<usize> {
        self.coords_from(i, self.windows[i].0)
    }

    /// Diagonal image of num/den.
    pub fn embed(&self, num: &[u32], den: &[u32]) -> Result<Vec<u32>> {
        let mut out = Vec::with_capacity(self.dim());
        for (x, &(lo, hi)) in self.places.iter().zip(&self.windows) {
            out.extend(expand(self.q, num, den, x, lo, hi)?);
        }
        Ok(out)
    }

    pub fn unit(&self, c: usize) -> Vec<u32> {
        let mut v = vec![0; self.dim()];
        v[c] = 1;
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn place_validation() {
        assert!(Place::finite(2, vec![1, 1, 1]).is_ok());
        assert!(Place::finite(2, vec![1, 0, 1]).is_err());
        assert!(Place::finite(4, vec![0, 1]).is_err());
        assert_eq!(Place::finite(3, vec![1, 0, 1]).unwrap().degree(), 2);
        assert!(Place::finite(3, vec![2, 0, 1]).is_err());
        assert!(Place::prime(9).is_err());
    }

    #[test]
    fn expansions() {
        // 1/(1-u) = 1 + u + u^2 + ... at u = 0
        let x = Place::finite(3, vec![0, 1]).unwrap();
        assert_eq!(expand(3, &[1], &[1, 2], &x, -1, 3).unwrap(), vec![0, 1, 1, 1]);
        // u/(u+1) at infinity: 1 - s + s^2 - ...
        assert_eq!(expand(3, &[0, 1], &[1, 1], &Place::Infinity, 0, 3).unwrap(), vec![1, 2, 1]);
        // u^2 has a double pole at infinity
        assert_eq!(expand(2, &[0, 0, 1], &[1], &Place::Infinity, -2, 1).unwrap(), vec![1, 0, 0]);
        assert!(expand(2, &[0, 0, 1], &[1], &Place::Infinity, -1, 1).is_err());
        // 1/(u^2+u+1) over F_2: digits in base π, each of degree < 2
        let y = Place::finite(2, vec![1, 1, 1]).unwrap();
        assert_eq!(expand(2, &[1], &[1, 1, 1], &y, -1, 1).unwrap(), vec![1, 0, 0, 0]);
    }

    #[test]
    fn place_lists() {
        assert_eq!(places_up_to(2, 3).iter().map(|p| p.degree()).sum::<usize>(), 2 + 2 + 6);
    }
}

//! Prime fields, polynomials over them and exact rank computations.

use crate::{Error, Result};

/// Polynomial over F_p, coefficients low to high, no trailing zeros.
pub type Poly = Vec<u32>;

pub fn is_prime(n: i64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

pub fn check_prime(q: i64) -> Result<u32> {
    if !is_prime(q) || q > 65521 {
        return Err(Error::Invalid(format!("q = {q} must be a small prime")));
    }
    Ok(q as u32)
}

fn mulmod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub fn inv_scalar(a: u32, p: u32) -> u32 {
    let (mut r, mut b, mut e) = (1u32, a % p, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    r
}

pub fn trim(mut f: Poly) -> Poly {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

/// Degree, with deg 0 = -1.
pub fn deg(f: &[u32]) -> i64 {
    f.len() as i64 - 1
}

pub fn add(f: &[u32], g: &[u32], p: u32) -> Poly {
    let n = f.len().max(g.len());
    trim((0..n).map(|i| (f.get(i).unwrap_or(&0) + g.get(i).unwrap_or(&0)) % p).collect())
}

pub fn neg(f: &[u32], p: u32) -> Poly {
    f.iter().map(|&c| (p - c) % p).collect()
}

pub fn sub(f: &[u32], g: &[u32], p: u32) -> Poly {
    add(f, &neg(g, p), p)
}

pub fn mul(f: &[u32], g: &[u32], p: u32) -> Poly {
    if f.is_empty() || g.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; f.len() + g.len() - 1];
    for (i, &a) in f.iter().enumerate() {
        for (j, &b) in g.iter().enumerate() {
            out[i + j] = (out[i + j] + a as u64 * b as u64) % p as u64;
        }
    }
    trim(out.into_iter().map(|c| c as u32).collect())
}

pub fn pow(f: &[u32], e: usize, p: u32) -> Poly {
    (0..e).fold(vec![1], |acc, _| mul(&acc, f, p))
}

pub fn monomial(k: usize) -> Poly {
    let mut f = vec![0; k + 1];
    f[k] = 1;
    f
}

pub fn divrem(f: &[u32], g: &[u32], p: u32) -> (Poly, Poly) {
    assert!(!g.is_empty(), "division by zero polynomial");
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    let lc = inv_scalar(g[dg], p);
    if r.len() <= dg {
        return (vec![], trim(r));
    }
    let mut quo = vec![0u32; r.len() - dg];
    for i in (dg..r.len()).rev() {
        let c = mulmod(r[i], lc, p);
        if c == 0 {
            continue;
        }
        quo[i - dg] = c;
        for (j, &b) in g.iter().enumerate() {
            let k = i - dg + j;
            r[k] = (r[k] + p - mulmod(c, b, p)) % p;
        }
    }
    (trim(quo), trim(r))
}

pub fn rem(f: &[u32], g: &[u32], p: u32) -> Poly {
    divrem(f, g, p).1
}

/// Inverse of f modulo m, if gcd(f, m) = 1.
pub fn inv_mod(f: &[u32], m: &[u32], p: u32) -> Option<Poly> {
    let (mut r0, mut r1) = (m.to_vec(), rem(f, m, p));
    let (mut s0, mut s1): (Poly, Poly) = (vec![], vec![1]);
    while !r1.is_empty() {
        let (qt, r2) = divrem(&r0, &r1, p);
        let s2 = sub(&s0, &mul(&qt, &s1, p), p);
        (r0, r1, s0, s1) = (r1, r2, s1, s2);
    }
    if r0.len() != 1 {
        return None;
    }
    let c = inv_scalar(r0[0], p);
    Some(rem(&mul(&s0, &[c], p), m, p))
}

/// Polynomials of degree < d in lexicographic order of coefficients.
pub fn all_polys(p: u32, d: usize) -> Vec<Poly> {
    let n = (p as usize).pow(d as u32);
    (0..n)
        .map(|mut k| {
            trim(
                (0..d)
                    .map(|_| {
                        let c = (k % p as usize) as u32;
                        k /= p as usize;
                        c
                    })
                    .collect(),
            )
        })
        .collect()
}

pub fn monic_of_degree(p: u32, d: usize) -> Vec<Poly> {
    all_polys(p, d)
        .into_iter()
        .map(|mut f| {
            f.resize(d, 0);
            f.push(1);
            f
        })
        .collect()
}

pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let d = deg(f);
    if d < 1 {
        return false;
    }
    (1..=d as usize / 2).all(|k| monic_of_degree(p, k).iter().all(|g| !rem(f, g, p).is_empty()))
}

pub fn irreducibles(p: u32, d: usize) -> Vec<Poly> {
    monic_of_degree(p, d).into_iter().filter(|f| is_irreducible(f, p)).collect()
}

/// Rank over F_p by Gaussian elimination.
pub fn rank(rows: &[Vec<u32>], p: u32) -> usize {
    let mut m: Vec<Vec<u32>> = rows.iter().filter(|r| r.iter().any(|&c| c != 0)).cloned().collect();
    let cols = m.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..m.len()).find(|&i| m[i].get(c).copied().unwrap_or(0) != 0) else {
            continue;
        };
        m.swap(r, piv);
        let inv = inv_scalar(m[r][c], p);
        let pivot: Vec<u32> = m[r].iter().map(|&x| mulmod(x, inv, p)).collect();
        for i in r + 1..m.len() {
            let f = m[i].get(c).copied().unwrap_or(0);
            if f != 0 {
                for (k, &pv) in pivot.iter().enumerate() {
                    m[i][k] = (m[i][k] + p - mulmod(f, pv, p)) % p;
                }
            }
        }
        m[r] = pivot;
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducible_counts() {
        // necklace counts: (1/d) sum mu(d/e) p^e
        assert_eq!(irreducibles(2, 1).len(), 2);
        assert_eq!(irreducibles(2, 2).len(), 1);
        assert_eq!(irreducibles(2, 3).len(), 2);
        assert_eq!(irreducibles(2, 4).len(), 3);
        assert_eq!(irreducibles(3, 2).len(), 3);
        assert_eq!(irreducibles(3, 3).len(), 8);
    }

    #[test]
    fn inverse_mod_power() {
        let pi = vec![1, 1, 1];
        let m = pow(&pi, 3, 2);
        for f in all_polys(2, 6) {
            match inv_mod(&f, &m, 2) {
                Some(g) => assert_eq!(rem(&mul(&f, &g, 2), &m, 2), vec![1]),
                None => assert!(f.is_empty() || rem(&f, &pi, 2).is_empty()),
            }
        }
    }

    #[test]
    fn division() {
        let f = vec![2, 0, 1, 1];
        let g = vec![1, 2];
        let (q, r) = divrem(&f, &g, 3);
        assert_eq!(add(&mul(&q, &g, 3), &r, 3), f);
    }

    #[test]
    fn rank_small() {
        assert_eq!(rank(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]], 2), 2);
        assert_eq!(rank(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]], 3), 3);
        assert_eq!(rank(&[], 5), 0);
    }
}

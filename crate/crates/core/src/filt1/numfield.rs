//! Window models of Z[1/M] inside Q_S x R and of the p-adic chain.

use crate::archimed::C0arObject;
use crate::finabel::{FinAbGroup, Subgroup};
use crate::Result;

use super::{FilteredObject1, Tail};

fn fin(m: i64) -> C0arObject {
    C0arObject::new(FinAbGroup::cyclic(m), 0, 0, 0)
}

fn zero() -> C0arObject {
    C0arObject::new(FinAbGroup::trivial(), 0, 0, 0)
}

/// P -> Q -> R for K = Z[1/M] in A = Q_S x R, S the primes of M, on [-k, k+1].
#[derive(Clone, Debug)]
pub struct NumberFieldTriple {
    pub m: i64,
    pub k: usize,
    pub p: FilteredObject1,
    pub q: FilteredObject1,
    pub r: FilteredObject1,
}

impl NumberFieldTriple {
    pub fn new(m: i64, k: usize) -> Result<Self> {
        let lo = -(k as i64);
        let mut qq = vec![fin(m); k];
        qq.push(C0arObject::new(FinAbGroup::trivial(), 0, 0, 1));
        qq.extend(vec![fin(m); k]);
        let mut pq = vec![zero(); k];
        pq.push(C0arObject::new(FinAbGroup::trivial(), 1, 0, 0));
        pq.extend(vec![fin(m); k]);
        let mut rq = vec![fin(m); k];
        rq.push(C0arObject::new(FinAbGroup::trivial(), 0, 1, 0));
        rq.extend(vec![zero(); k]);
        Ok(Self {
            m,
            k,
            p: FilteredObject1::new_ar(lo, pq, Tail::Trivial, Tail::FiniteStable, 0)?,
            q: FilteredObject1::new_ar(lo, qq, Tail::FiniteStable, Tail::FiniteStable, 0)?,
            r: FilteredObject1::new_ar(lo, rq, Tail::FiniteStable, Tail::Trivial, 0)?,
        })
    }

    /// Levelwise exactness of the quotient sequences on component data;
    /// l counts lattices Z in the sub whose cokernel is a torus.
    pub fn is_levelwise_exact(&self) -> bool {
        let get = |e: &FilteredObject1| match &e.pres {
            super::Presentation::Ar { quotients } => quotients.clone(),
            _ => vec![],
        };
        let (p, q, r) = (get(&self.p), get(&self.q), get(&self.r));
        p.len() == q.len()
            && q.len() == r.len()
            && p.iter().zip(&q).zip(&r).all(|((a, b), c)| {
                let Some(l) = b.q.checked_sub(a.q + c.q) else {
                    return false;
                };
                a.a.order() * c.a.order() == b.a.order()
                    && a.r + c.r == b.r + l
                    && a.p + c.p == b.p + l
            })
    }
}

/// Z_S/M^k Z_S as the cyclic group Z/M^k with levels M^{-i} Z/M^k, i in [-k, 0].
pub fn adic_window(m: i64, k: u32) -> Result<FilteredObject1> {
    let n = m.pow(k);
    let g = FinAbGroup::cyclic(n);
    let levels = (0..=k)
        .rev()
        .map(|e| Subgroup::generated_by(&g, &[vec![m.pow(e) % n]]))
        .collect::<Result<Vec<_>>>()?;
    FilteredObject1::new_fin(-(k as i64), g, levels, Tail::FiniteStable, Tail::Trivial, 0)
}

/// Distinct prime factors with multiplicity.
pub fn factor(mut m: i64) -> Vec<(i64, u32)> {
    let mut out = vec![];
    let mut p = 2;
    while p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// Z/M^j -> prod Z/p^{e j}, x -> residues, checked bijective and additive.
pub fn crt_brute_force(m: i64, j: u32) -> bool {
    let n = m.pow(j);
    let mods: Vec<i64> = factor(m).iter().map(|&(p, e)| p.pow(e * j)).collect();
    let img = |x: i64| mods.iter().map(|&q| x.rem_euclid(q)).collect::<Vec<_>>();
    let mut seen = std::collections::HashSet::new();
    for x in 0..n {
        if !seen.insert(img(x)) {
            return false;
        }
    }
    let additive = (0..n.min(64)).all(|x| {
        (0..n.min(64)).all(|y| {
            let (a, b, c) = (img(x), img(y), img(x + y));
            a.iter().zip(&b).zip(&c).zip(&mods).all(|(((a, b), c), q)| (a + b) % q == *c)
        })
    });
    additive && FinAbGroup::from_cyclic(&[n]) == FinAbGroup::from_cyclic(&mods)
}

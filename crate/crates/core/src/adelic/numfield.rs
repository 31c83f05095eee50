//! Z inside the adeles of Q for a finite set of primes.

use serde::{Deserialize, Serialize};

use super::fq::is_prime;
use crate::filt1::numfield::NumberFieldTriple;
use crate::{Error, Result};

/// Largest product of moduli checked by enumeration.
pub const CRT_LIMIT: i64 = 1 << 22;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NumberFieldReport {
    pub primes: Vec<i64>,
    pub moduli: Vec<i64>,
    /// Z -> ∏ Z/p^k hits every residue tuple
    pub crt_surjective: bool,
    pub images_seen: usize,
    pub p_discrete: bool,
    pub r_compact: bool,
    pub q_neither: bool,
    /// dual of P compact, dual of R discrete, dual of Q neither
    pub dual_swap: bool,
    pub levelwise_exact: bool,
}

pub fn number_field_desk_check(primes: &[i64], moduli: &[i64]) -> Result<NumberFieldReport> {
    if primes.len() != moduli.len() {
        return Err(Error::Invalid("one modulus per prime".into()));
    }
    let mut m = 1i64;
    for (&p, &k) in primes.iter().zip(moduli) {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        let mut r = k;
        while r > 1 && r % p == 0 {
            r /= p;
        }
        if k < 1 || r != 1 {
            return Err(Error::Invalid(format!("modulus {k} is not a power of {p}")));
        }
        m *= p;
    }
    if primes.iter().collect::<std::collections::BTreeSet<_>>().len() != primes.len() {
        return Err(Error::Invalid("repeated prime".into()));
    }
    let total: i64 = moduli.iter().product();
    if total > CRT_LIMIT {
        return Err(Error::Cutoff(format!("product of moduli {total} > {CRT_LIMIT}")));
    }
    let mut seen = std::collections::HashSet::new();
    for x in 0..total {
        seen.insert(moduli.iter().map(|&k| x % k).collect::<Vec<_>>());
    }
    let t = NumberFieldTriple::new(m, 1)?;
    let (pd, qd, rd) = (t.p.dual1(), t.q.dual1(), t.r.dual1());
    Ok(NumberFieldReport {
        primes: primes.to_vec(),
        moduli: moduli.to_vec(),
        crt_surjective: seen.len() as i64 == total,
        images_seen: seen.len(),
        p_discrete: t.p.is_discrete1() && !t.p.is_compact1(),
        r_compact: t.r.is_compact1() && !t.r.is_discrete1(),
        q_neither: !t.q.is_compact1() && !t.q.is_discrete1(),
        dual_swap: pd.is_compact1() && !pd.is_discrete1() && rd.is_discrete1() && !rd.is_compact1() && !qd.is_compact1() && !qd.is_discrete1(),
        levelwise_exact: t.is_levelwise_exact(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// residue tuples reached by x in [0, total), counted through a flat index
    fn oracle(moduli: &[i64]) -> usize {
        let total: i64 = moduli.iter().product();
        let mut hit = vec![false; total as usize];
        for x in 0..total {
            let mut idx = 0;
            for &k in moduli {
                idx = idx * k + x.rem_euclid(k);
            }
            hit[idx as usize] = true;
        }
        hit.iter().filter(|&&h| h).count()
    }

    #[test]
    fn crt_two_three() {
        let r = number_field_desk_check(&[2, 3], &[8, 9]).unwrap();
        assert!(r.crt_surjective && r.p_discrete && r.r_compact && r.q_neither && r.dual_swap && r.levelwise_exact);
        assert_eq!(r.images_seen, oracle(&[8, 9]));
    }

    #[test]
    fn empty_set() {
        let r = number_field_desk_check(&[], &[]).unwrap();
        assert!(r.crt_surjective);
        assert_eq!(r.images_seen, 1);
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(number_field_desk_check(&[2], &[6]).is_err());
        assert!(number_field_desk_check(&[4], &[16]).is_err());
        assert!(number_field_desk_check(&[2, 2], &[2, 4]).is_err());
    }
}

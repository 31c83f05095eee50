use serde::{Deserialize, Serialize};

use super::snf::smith_normal_form;
use crate::{Error, IMat, Result, C64};

/// Finite abelian group Z/d1 x ... x Z/dk in invariant-factor form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinAbGroup {
    moduli: Vec<i64>,
}

impl FinAbGroup {
    pub fn new(moduli: Vec<i64>) -> Result<Self> {
        if moduli.iter().any(|&d| d < 2) {
            return Err(Error::Invalid(format!("moduli must be >= 2: {moduli:?}")));
        }
        if moduli.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::Invalid(format!(
                "moduli must form a divisibility chain: {moduli:?}"
            )));
        }
        Ok(Self { moduli })
    }

    pub fn trivial() -> Self {
        Self { moduli: vec![] }
    }

    pub fn cyclic(n: i64) -> Self {
        if n == 1 {
            Self::trivial()
        } else {
            Self::new(vec![n]).expect("cyclic order >= 1")
        }
    }

    /// Normal form of an arbitrary product of cyclic groups.
    pub fn from_cyclic(orders: &[i64]) -> Self {
        present(&diag(orders)).group
    }

    pub fn moduli(&self) -> &[i64] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> usize {
        self.moduli.iter().product::<i64>() as usize
    }

    pub fn exponent(&self) -> i64 {
        self.moduli.last().copied().unwrap_or(1)
    }

    /// Pontryagin dual, identified with the group itself via the standard pairing.
    pub fn dual(&self) -> Self {
        self.clone()
    }

    pub fn reduce(&self, x: &[i64]) -> Vec<i64> {
        x.iter().zip(&self.moduli).map(|(a, d)| a.rem_euclid(*d)).collect()
    }

    /// Row-major mixed-radix index, last coordinate fastest.
    pub fn index_of(&self, x: &[i64]) -> usize {
        let mut idx = 0usize;
        for (a, d) in x.iter().zip(&self.moduli) {
            idx = idx * (*d as usize) + a.rem_euclid(*d) as usize;
        }
        idx
    }

    pub fn element(&self, mut idx: usize) -> Vec<i64> {
        let mut x = vec![0; self.rank()];
        for i in (0..self.rank()).rev() {
            let d = self.moduli[i] as usize;
            x[i] = (idx % d) as i64;
            idx /= d;
        }
        x
    }

    pub fn elements(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.order()).map(move |i| self.element(i))
    }

    pub fn add(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        self.reduce(&x.iter().zip(y).map(|(a, b)| a + b).collect::<Vec<_>>())
    }

    pub fn neg(&self, x: &[i64]) -> Vec<i64> {
        self.reduce(&x.iter().map(|a| -a).collect::<Vec<_>>())
    }

    /// Index of -x for every index x.
    pub fn negation_table(&self) -> Vec<usize> {
        (0..self.order())
            .map(|i| self.index_of(&self.neg(&self.element(i))))
            .collect()
    }

    pub fn element_checked(&self, x: &[i64]) -> Result<GroupElement> {
        if x.len() != self.rank() {
            return Err(Error::ParentMismatch(format!(
                "element of length {} in group of rank {}",
                x.len(),
                self.rank()
            )));
        }
        Ok(GroupElement {
            group: self.clone(),
            residues: self.reduce(x),
        })
    }

    /// Value of chi(x) = exp(2 pi i sum chi_i x_i / d_i).
    pub fn pairing(&self, chi: &[i64], x: &[i64]) -> C64 {
        let mut t = 0.0;
        for ((c, a), d) in chi.iter().zip(x).zip(&self.moduli) {
            t += ((c * a).rem_euclid(*d)) as f64 / *d as f64;
        }
        C64::from_polar(1.0, 2.0 * std::f64::consts::PI * t.fract())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupElement {
    pub group: FinAbGroup,
    pub residues: Vec<i64>,
}

/// Character chi evaluated at x; chi lives in the dual of x's parent.
pub fn eval_char(chi: &GroupElement, x: &GroupElement) -> Result<C64> {
    if chi.group != x.group.dual() {
        return Err(Error::ParentMismatch("character and element".into()));
    }
    Ok(x.group.pairing(&chi.residues, &x.residues))
}

pub(crate) fn diag(orders: &[i64]) -> IMat {
    (0..orders.len())
        .map(|i| (0..orders.len()).map(|j| if i == j { orders[i] } else { 0 }).collect())
        .collect()
}

/// The group Z^k / (column span of `rel`) together with coordinate maps.
#[derive(Clone, Debug)]
pub struct Presented {
    pub group: FinAbGroup,
    /// rank(group) x k: x in Z^k maps to `to * x` reduced.
    pub to: IMat,
    /// k x rank(group): a lift back to Z^k.
    pub from: IMat,
}

/// `rel` is k x m and must have full row rank over Q (finite quotient).
pub fn present(rel: &IMat) -> Presented {
    let k = rel.len();
    if k == 0 {
        return Presented {
            group: FinAbGroup::trivial(),
            to: vec![],
            from: vec![],
        };
    }
    let sm = smith_normal_form(rel);
    let d = sm.diag();
    assert!(d.len() == k && d.iter().all(|&x| x > 0), "presentation not finite");
    let kept: Vec<usize> = (0..k).filter(|&i| d[i] != 1).collect();
    let moduli: Vec<i64> = kept.iter().map(|&i| d[i]).collect();
    let to: IMat = kept
        .iter()
        .map(|&i| {
            sm.u[i]
                .iter()
                .map(|x| x.rem_euclid(d[i]))
                .collect()
        })
        .collect();
    let from: IMat = (0..k)
        .map(|r| kept.iter().map(|&c| sm.u_inv[r][c]).collect())
        .collect();
    Presented {
        group: FinAbGroup { moduli },
        to,
        from,
    }
}

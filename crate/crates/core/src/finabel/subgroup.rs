use serde::{Deserialize, Serialize};

use super::group::{present, FinAbGroup};
use super::hom::GroupHom;
use super::snf::{integer_kernel, transpose};
use crate::{Error, IMat, Result};

/// Subgroup stored as the Hermite basis of the lattice L with
/// dZ^k <= L <= Z^k and L / dZ^k = H. Rows are upper triangular, the pivot
/// p_j of row j divides d_j and entries above a pivot lie in [0, p_j).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subgroup {
    group: FinAbGroup,
    rows: IMat,
}

fn hermite(g: &FinAbGroup, gens: &[Vec<i64>]) -> IMat {
    let d = g.moduli();
    let k = d.len();
    let mut work: Vec<Vec<i64>> = gens.iter().map(|x| g.reduce(x)).collect();
    let mut reserve: Vec<Option<Vec<i64>>> = (0..k)
        .map(|j| Some((0..k).map(|i| if i == j { d[j] } else { 0 }).collect()))
        .collect();
    let mut out: IMat = Vec::with_capacity(k);
    for j in 0..k {
        work.push(reserve[j].take().unwrap());
        work.retain(|r| r.iter().any(|&x| x != 0));
        loop {
            let nz: Vec<usize> = (0..work.len()).filter(|&i| work[i][j] != 0).collect();
            let p = *nz.iter().min_by_key(|&&i| work[i][j].abs()).unwrap();
            if nz.len() == 1 {
                break;
            }
            for &i in &nz {
                if i == p {
                    continue;
                }
                let q = work[i][j].div_euclid(work[p][j]);
                for c in j..k {
                    work[i][c] -= q * work[p][c];
                }
                for c in j + 1..k {
                    work[i][c] = work[i][c].rem_euclid(d[c]);
                }
            }
        }
        let p = (0..work.len()).find(|&i| work[i][j] != 0).unwrap();
        let mut row = work.swap_remove(p);
        if row[j] < 0 {
            row.iter_mut().for_each(|x| *x = -*x);
        }
        for c in j + 1..k {
            row[c] = row[c].rem_euclid(d[c]);
        }
        out.push(row);
        work.retain(|r| r.iter().any(|&x| x != 0));
    }
    for j in 0..k {
        let p = out[j][j];
        for i in 0..j {
            let q = out[i][j].div_euclid(p);
            if q != 0 {
                for c in j..k {
                    out[i][c] -= q * out[j][c];
                }
            }
        }
    }
    out
}

impl Subgroup {
    pub fn generated_by(g: &FinAbGroup, gens: &[Vec<i64>]) -> Result<Self> {
        if gens.iter().any(|x| x.len() != g.rank()) {
            return Err(Error::ParentMismatch("generator length".into()));
        }
        Ok(Self {
            group: g.clone(),
            rows: hermite(g, gens),
        })
    }

    /// Wraps raw rows without normalizing; use `is_canonical` to validate.
    pub fn from_rows_unchecked(g: &FinAbGroup, rows: IMat) -> Self {
        Self {
            group: g.clone(),
            rows,
        }
    }

    pub fn whole(g: &FinAbGroup) -> Self {
        let k = g.rank();
        let gens: Vec<Vec<i64>> = (0..k)
            .map(|j| (0..k).map(|i| (i == j) as i64).collect())
            .collect();
        Self::generated_by(g, &gens).unwrap()
    }

    pub fn zero(g: &FinAbGroup) -> Self {
        Self::generated_by(g, &[]).unwrap()
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn rows(&self) -> &IMat {
        &self.rows
    }

    pub fn is_canonical(&self) -> bool {
        let k = self.group.rank();
        if self.rows.len() != k || self.rows.iter().any(|r| r.len() != k) {
            return false;
        }
        for j in 0..k {
            let p = self.rows[j][j];
            if p <= 0 || self.group.moduli()[j] % p != 0 {
                return false;
            }
            if (0..j).any(|c| self.rows[j][c] != 0) {
                return false;
            }
            if (0..j).any(|i| self.rows[i][j] < 0 || self.rows[i][j] >= p) {
                return false;
            }
        }
        // must also be the normal form of the lattice it spans
        hermite(&self.group, &self.rows) == self.rows
    }

    pub fn order(&self) -> usize {
        let d = self.group.moduli();
        (0..d.len())
            .map(|j| (d[j] / self.rows[j][j]) as usize)
            .product()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        let mut y = self.group.reduce(x);
        let d = self.group.moduli();
        for j in 0..d.len() {
            let p = self.rows[j][j];
            if y[j] % p != 0 {
                return false;
            }
            let c = y[j] / p;
            for t in j..d.len() {
                y[t] = (y[t] - c * self.rows[j][t]).rem_euclid(d[t]);
            }
        }
        true
    }

    pub fn elements(&self) -> Vec<Vec<i64>> {
        let d = self.group.moduli();
        let mut acc = vec![vec![0i64; d.len()]];
        for j in 0..d.len() {
            let m = d[j] / self.rows[j][j];
            let mut next = Vec::with_capacity(acc.len() * m as usize);
            for x in &acc {
                for c in 0..m {
                    let y: Vec<i64> = (0..d.len())
                        .map(|t| (x[t] + c * self.rows[j][t]).rem_euclid(d[t]))
                        .collect();
                    next.push(y);
                }
            }
            acc = next;
        }
        acc
    }

    /// Membership mask indexed like the parent group.
    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.group.order()];
        for x in self.elements() {
            m[self.group.index_of(&x)] = true;
        }
        m
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    /// Abstract group isomorphic to H with its inclusion into the parent.
    pub fn as_group(&self) -> (FinAbGroup, GroupHom) {
        let k = self.group.rank();
        let d = self.group.moduli();
        // v in Z^k maps to B^T v; relations: kernel of [B^T | -diag(d)]
        let bt = transpose(&self.rows, k);
        let big: IMat = (0..k)
            .map(|i| {
                let mut r = bt[i].clone();
                r.extend((0..k).map(|j| if i == j { -d[i] } else { 0 }));
                r
            })
            .collect();
        let ker = integer_kernel(&big, 2 * k);
        let rel: IMat = (0..k).map(|i| ker.iter().map(|c| c[i]).collect()).collect();
        let pres = present(&rel);
        let incl = if k == 0 {
            vec![]
        } else {
            (0..k)
                .map(|i| {
                    (0..pres.group.rank())
                        .map(|c| {
                            (0..k)
                                .map(|t| bt[i][t] * pres.from[t][c])
                                .sum::<i64>()
                                .rem_euclid(d[i])
                        })
                        .collect()
                })
                .collect()
        };
        let h = pres.group;
        let hom = GroupHom::new(h.clone(), self.group.clone(), incl).expect("inclusion is a hom");
        (h, hom)
    }

    /// Annihilator in the dual group.
    pub fn annihilator(&self) -> Subgroup {
        let g = &self.group;
        let n = g.exponent();
        let d = g.moduli();
        let rows = self.rows.len();
        let target = if rows == 0 {
            FinAbGroup::trivial()
        } else {
            FinAbGroup::new(vec![n; rows]).unwrap()
        };
        let m: IMat = self
            .rows
            .iter()
            .map(|h| (0..d.len()).map(|i| (h[i] * (n / d[i])).rem_euclid(n)).collect())
            .collect();
        let hom = GroupHom::new(g.dual(), target, m).expect("annihilator map");
        hom.kernel()
    }

    pub fn join(&self, other: &Subgroup) -> Result<Subgroup> {
        if self.group != other.group {
            return Err(Error::ParentMismatch("join".into()));
        }
        let mut gens = self.rows.clone();
        gens.extend(other.rows.iter().cloned());
        Subgroup::generated_by(&self.group, &gens)
    }

    pub fn intersect(&self, other: &Subgroup) -> Result<Subgroup> {
        if self.group != other.group {
            return Err(Error::ParentMismatch("intersect".into()));
        }
        let (h, incl) = self.as_group();
        let (_, proj) = quotient(&self.group, other)?;
        let k = proj.compose(&incl)?.kernel();
        let _ = h;
        incl.image_of(&k)
    }
}

/// G / H in invariant-factor form with the projection.
pub fn quotient(g: &FinAbGroup, h: &Subgroup) -> Result<(FinAbGroup, GroupHom)> {
    if h.group() != g {
        return Err(Error::ParentMismatch("quotient".into()));
    }
    if !h.is_canonical() {
        return Err(Error::NotCanonical);
    }
    let rel = transpose(h.rows(), g.rank());
    let pres = present(&rel);
    let q = pres.group.clone();
    let proj = GroupHom::new(g.clone(), q.clone(), pres.to)?;
    Ok((q, proj))
}

use serde::{Deserialize, Serialize};

use super::group::{diag, present, FinAbGroup};
use super::snf::integer_kernel;
use super::subgroup::Subgroup;
use crate::{Error, IMat, Result};

/// Homomorphism given by an integer matrix acting on residue vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupHom {
    src: FinAbGroup,
    dst: FinAbGroup,
    matrix: IMat,
}

impl GroupHom {
    /// `matrix` is dst.rank() x src.rank(); requires e_i | d_j * M_ij.
    pub fn new(src: FinAbGroup, dst: FinAbGroup, matrix: IMat) -> Result<Self> {
        let (n, m) = (src.rank(), dst.rank());
        if matrix.len() != m || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid(format!("hom matrix must be {m}x{n}")));
        }
        for i in 0..m {
            for j in 0..n {
                if (src.moduli()[j] * matrix[i][j]) % dst.moduli()[i] != 0 {
                    return Err(Error::Invalid(format!(
                        "entry ({i},{j}) does not define a homomorphism"
                    )));
                }
            }
        }
        let matrix = matrix
            .into_iter()
            .enumerate()
            .map(|(i, r)| r.into_iter().map(|x| x.rem_euclid(dst.moduli()[i])).collect())
            .collect();
        Ok(Self { src, dst, matrix })
    }

    pub fn identity(g: &FinAbGroup) -> Self {
        let k = g.rank();
        let m = (0..k).map(|i| (0..k).map(|j| (i == j) as i64).collect()).collect();
        Self::new(g.clone(), g.clone(), m).unwrap()
    }

    pub fn zero(src: &FinAbGroup, dst: &FinAbGroup) -> Self {
        Self::new(src.clone(), dst.clone(), vec![vec![0; src.rank()]; dst.rank()]).unwrap()
    }

    pub fn src(&self) -> &FinAbGroup {
        &self.src
    }

    pub fn dst(&self) -> &FinAbGroup {
        &self.dst
    }

    pub fn matrix(&self) -> &IMat {
        &self.matrix
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        let y: Vec<i64> = self
            .matrix
            .iter()
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect();
        self.dst.reduce(&y)
    }

    /// Image index for every source index.
    pub fn index_table(&self) -> Vec<usize> {
        (0..self.src.order())
            .map(|i| self.dst.index_of(&self.apply(&self.src.element(i))))
            .collect()
    }

    /// self after other.
    pub fn compose(&self, other: &GroupHom) -> Result<GroupHom> {
        if other.dst != self.src {
            return Err(Error::ParentMismatch("compose".into()));
        }
        let n = other.src.rank();
        let m: IMat = self
            .matrix
            .iter()
            .map(|r| {
                (0..n)
                    .map(|j| r.iter().zip(&other.matrix).map(|(a, o)| a * o[j]).sum())
                    .collect()
            })
            .collect();
        GroupHom::new(other.src.clone(), self.dst.clone(), m)
    }

    /// Dual map from dual(dst) to dual(src): chi -> chi o self.
    pub fn dual(&self) -> GroupHom {
        let d = self.src.moduli();
        let e = self.dst.moduli();
        let m: IMat = (0..d.len())
            .map(|j| {
                (0..e.len())
                    .map(|i| d[j] * self.matrix[i][j] / e[i])
                    .collect()
            })
            .collect();
        GroupHom::new(self.dst.dual(), self.src.dual(), m).expect("dual hom")
    }

    pub fn kernel(&self) -> Subgroup {
        let n = self.src.rank();
        let m = self.dst.rank();
        if m == 0 {
            return Subgroup::whole(&self.src);
        }
        let big: IMat = (0..m)
            .map(|i| {
                let mut r = self.matrix[i].clone();
                r.extend((0..m).map(|j| if i == j { -self.dst.moduli()[i] } else { 0 }));
                r
            })
            .collect();
        let gens: Vec<Vec<i64>> = integer_kernel(&big, n + m)
            .into_iter()
            .map(|v| v[..n].to_vec())
            .collect();
        Subgroup::generated_by(&self.src, &gens).unwrap()
    }

    pub fn image(&self) -> Subgroup {
        let n = self.src.rank();
        let gens: Vec<Vec<i64>> = (0..n)
            .map(|j| self.matrix.iter().map(|r| r[j]).collect())
            .collect();
        Subgroup::generated_by(&self.dst, &gens).unwrap()
    }

    pub fn image_of(&self, h: &Subgroup) -> Result<Subgroup> {
        if h.group() != &self.src {
            return Err(Error::ParentMismatch("image_of".into()));
        }
        let gens: Vec<Vec<i64>> = h.rows().iter().map(|r| self.apply(r)).collect();
        Subgroup::generated_by(&self.dst, &gens)
    }

    pub fn preimage(&self, h: &Subgroup) -> Result<Subgroup> {
        if h.group() != &self.dst {
            return Err(Error::ParentMismatch("preimage".into()));
        }
        let (_, proj) = super::subgroup::quotient(&self.dst, h)?;
        Ok(proj.compose(self)?.kernel())
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().order() == 1
    }

    pub fn is_surjective(&self) -> bool {
        self.image().order() == self.dst.order()
    }
}

/// A (+) B with injections and projections.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub group: FinAbGroup,
    pub inj: [GroupHom; 2],
    pub proj: [GroupHom; 2],
}

pub fn direct_sum(a: &FinAbGroup, b: &FinAbGroup) -> DirectSum {
    let mut orders = a.moduli().to_vec();
    orders.extend_from_slice(b.moduli());
    let pres = present(&diag(&orders));
    let s = pres.group.clone();
    let ka = a.rank();
    let cols = |range: std::ops::Range<usize>| -> IMat {
        pres.to.iter().map(|r| r[range.clone()].to_vec()).collect()
    };
    let rows = |range: std::ops::Range<usize>| -> IMat { pres.from[range].to_vec() };
    let k = orders.len();
    DirectSum {
        inj: [
            GroupHom::new(a.clone(), s.clone(), cols(0..ka)).unwrap(),
            GroupHom::new(b.clone(), s.clone(), cols(ka..k)).unwrap(),
        ],
        proj: [
            GroupHom::new(s.clone(), a.clone(), rows(0..ka)).unwrap(),
            GroupHom::new(s.clone(), b.clone(), rows(ka..k)).unwrap(),
        ],
        group: s,
    }
}

impl GroupHom {
    pub fn add(&self, other: &GroupHom) -> Result<GroupHom> {
        self.sub(&GroupHom::zero(&other.src, &other.dst).sub(other)?)
    }

    pub fn sub(&self, other: &GroupHom) -> Result<GroupHom> {
        if self.src != other.src || self.dst != other.dst {
            return Err(Error::ParentMismatch("sub".into()));
        }
        let m = self
            .matrix
            .iter()
            .zip(&other.matrix)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        GroupHom::new(self.src.clone(), self.dst.clone(), m)
    }
}

/// X x_Z Y for f: X -> Z, g: Y -> Z, with its two projections.
pub fn fibered_product(f: &GroupHom, g: &GroupHom) -> Result<(FinAbGroup, GroupHom, GroupHom)> {
    if f.dst() != g.dst() {
        return Err(Error::ParentMismatch("fibered_product".into()));
    }
    let ds = direct_sum(f.src(), g.src());
    let phi = f.compose(&ds.proj[0])?.sub(&g.compose(&ds.proj[1])?)?;
    let (p, incl) = phi.kernel().as_group();
    let px = ds.proj[0].compose(&incl)?;
    let py = ds.proj[1].compose(&incl)?;
    Ok((p, px, py))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hom() {
        let z2 = FinAbGroup::cyclic(2);
        let z4 = FinAbGroup::cyclic(4);
        assert!(GroupHom::new(z2.clone(), z4.clone(), vec![vec![1]]).is_err());
        assert!(GroupHom::new(z2, z4, vec![vec![2]]).is_ok());
    }

    #[test]
    fn dual_matches_character_composition() {
        let g = FinAbGroup::new(vec![2, 4]).unwrap();
        let h = FinAbGroup::new(vec![4]).unwrap();
        let f = GroupHom::new(g.clone(), h.clone(), vec![vec![2, 3]]).unwrap();
        let fd = f.dual();
        for chi in h.elements() {
            let psi = fd.apply(&chi);
            for x in g.elements() {
                let a = h.pairing(&chi, &f.apply(&x));
                let b = g.pairing(&psi, &x);
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn kernel_by_enumeration() {
        let g = FinAbGroup::new(vec![6, 12]).unwrap();
        let h = FinAbGroup::new(vec![4]).unwrap();
        let f = GroupHom::new(g.clone(), h, vec![vec![2, 1]]).unwrap();
        let k = f.kernel();
        let brute = g.elements().filter(|x| f.apply(x) == vec![0]).count();
        assert_eq!(k.order(), brute);
        assert!(k.elements().iter().all(|x| f.apply(x) == vec![0]));
    }

    #[test]
    fn direct_sum_roundtrip() {
        let a = FinAbGroup::new(vec![4]).unwrap();
        let b = FinAbGroup::new(vec![2, 6]).unwrap();
        let ds = direct_sum(&a, &b);
        assert_eq!(ds.group.order(), 48);
        for x in a.elements() {
            assert_eq!(ds.proj[0].apply(&ds.inj[0].apply(&x)), x);
            assert_eq!(ds.proj[1].apply(&ds.inj[0].apply(&x)), vec![0, 0]);
        }
        for y in b.elements() {
            assert_eq!(ds.proj[1].apply(&ds.inj[1].apply(&y)), y);
        }
    }

    #[test]
    fn fibered_product_order() {
        let z12 = FinAbGroup::cyclic(12);
        let z4 = FinAbGroup::cyclic(4);
        let f = GroupHom::new(z12.clone(), z4.clone(), vec![vec![1]]).unwrap();
        let g = GroupHom::new(FinAbGroup::cyclic(2), z4, vec![vec![2]]).unwrap();
        let (p, px, py) = fibered_product(&f, &g).unwrap();
        let brute = z12
            .elements()
            .flat_map(|x| (0..2).map(move |y| (x.clone(), y)))
            .filter(|(x, y)| f.apply(x) == g.apply(&[*y]))
            .count();
        assert_eq!(p.order(), brute);
        for z in p.elements() {
            assert_eq!(f.apply(&px.apply(&z)), g.apply(&py.apply(&z)));
        }
    }
}

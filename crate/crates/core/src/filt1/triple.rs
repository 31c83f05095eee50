//! Admissible triples of window objects, fibered products and amalgams.

use crate::finabel::{direct_sum, fibered_product, quotient, FinAbGroup, GroupHom, Subgroup};
use crate::{Error, IMat, Result};

use super::{FilteredObject1, Tail};

/// 0 -> E1 -> E2 -> E3 -> 0 on a shared window, maps given on ambients.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleTriple1 {
    pub e1: FilteredObject1,
    pub e2: FilteredObject1,
    pub e3: FilteredObject1,
    pub alpha: GroupHom,
    pub beta: GroupHom,
}

fn image_levels(h: &GroupHom, e: &FilteredObject1) -> Result<Vec<Subgroup>> {
    (e.lo..=e.hi).map(|i| h.image_of(e.level(i)?)).collect()
}

impl AdmissibleTriple1 {
    pub fn new(
        e1: FilteredObject1,
        e2: FilteredObject1,
        e3: FilteredObject1,
        alpha: GroupHom,
        beta: GroupHom,
    ) -> Result<Self> {
        if (e1.lo, e1.hi) != (e2.lo, e2.hi) || (e3.lo, e3.hi) != (e2.lo, e2.hi) {
            return Err(Error::NotAdmissible("windows differ".into()));
        }
        let (w1, w2, w3) = (e1.fin()?.0, e2.fin()?.0, e3.fin()?.0);
        if alpha.src() != w1 || alpha.dst() != w2 || beta.src() != w2 || beta.dst() != w3 {
            return Err(Error::ParentMismatch("triple maps do not match ambients".into()));
        }
        if !alpha.is_injective() || !beta.is_surjective() || beta.kernel() != alpha.image() {
            return Err(Error::NotAdmissible("ambient triple not exact".into()));
        }
        let im = alpha.image();
        for i in e2.lo..=e2.hi {
            let s2 = e2.level(i)?;
            if alpha.image_of(e1.level(i)?)? != im.intersect(s2)? {
                return Err(Error::NotAdmissible(format!("sub filtration differs at level {i}")));
            }
            if &beta.image_of(s2)? != e3.level(i)? {
                return Err(Error::NotAdmissible(format!("quotient filtration differs at level {i}")));
            }
        }
        Ok(Self { e1, e2, e3, alpha, beta })
    }

    /// E1 = sub with induced levels, E3 = E2/sub with image levels.
    pub fn from_sub(e2: &FilteredObject1, sub: &Subgroup, t1: (Tail, Tail), t3: (Tail, Tail)) -> Result<Self> {
        let (w, _) = e2.fin()?;
        let (g1, incl) = sub.as_group();
        let (g3, proj) = quotient(w, sub)?;
        let l1 = (e2.lo..=e2.hi)
            .map(|i| incl.preimage(e2.level(i)?))
            .collect::<Result<Vec<_>>>()?;
        let l3 = image_levels(&proj, e2)?;
        let e1 = FilteredObject1::new_fin(e2.lo, g1, l1, t1.0, t1.1, e2.o_ref)?;
        let e3 = FilteredObject1::new_fin(e2.lo, g3, l3, t3.0, t3.1, e2.o_ref)?;
        Self::new(e1, e2.clone(), e3, incl, proj)
    }

    /// F_q[[t]] -> F_q((t)) -> F_q((t))/F_q[[t]] on the window [lo, hi], lo <= 0 <= hi.
    pub fn laurent(q: i64, lo: i64, hi: i64) -> Result<Self> {
        if lo > 0 || hi < 0 {
            return Err(Error::Invalid("window must contain 0".into()));
        }
        let e2 = FilteredObject1::laurent(q, lo, hi, Tail::FiniteStable, Tail::FiniteStable, 0)?;
        let o = e2.level(0)?.clone();
        Self::from_sub(
            &e2,
            &o,
            (Tail::FiniteStable, Tail::Trivial),
            (Tail::Trivial, Tail::FiniteStable),
        )
    }

    pub fn dual(&self) -> Self {
        AdmissibleTriple1 {
            e1: self.e3.dual1(),
            e2: self.e2.dual1(),
            e3: self.e1.dual1(),
            alpha: self.beta.dual(),
            beta: self.alpha.dual(),
        }
    }
}

/// Result of a base change along gamma, with the square's maps.
#[derive(Clone, Debug)]
pub struct Square1 {
    pub triple: AdmissibleTriple1,
    /// G -> E2 (product) or E2 -> G (amalgam)
    pub to_e2: GroupHom,
    /// G -> D (product) or D -> G (amalgam)
    pub to_d: GroupHom,
    pub commutes: bool,
}

fn check_morphism(
    d: &FilteredObject1,
    e: &FilteredObject1,
    matrix: IMat,
) -> Result<GroupHom> {
    let g = GroupHom::new(d.fin()?.0.clone(), e.fin()?.0.clone(), matrix)
        .map_err(|e| Error::Invalid(format!("not a morphism: {e}")))?;
    if (d.lo, d.hi) != (e.lo, e.hi) {
        return Err(Error::Invalid("not a morphism: windows differ".into()));
    }
    for i in d.lo..=d.hi {
        if !g.image_of(d.level(i)?)?.is_subgroup_of(e.level(i)?) {
            return Err(Error::Invalid(format!("not a morphism: level {i} not preserved")));
        }
    }
    Ok(g)
}

/// E1 -> E2 x_{E3} D -> D for gamma: D -> E3 given by its matrix.
pub fn fibered_product1(t: &AdmissibleTriple1, d: &FilteredObject1, gamma: IMat) -> Result<Square1> {
    let gamma = check_morphism(d, &t.e3, gamma)?;
    let (g, p2, pd) = fibered_product(&t.beta, &gamma)?;
    let ds = direct_sum(t.e2.fin()?.0, d.fin()?.0);
    // G as a subgroup of W2 + D
    let into_sum = ds.inj[0].compose(&p2)?.add(&ds.inj[1].compose(&pd)?)?;
    let mut levels = vec![];
    for i in d.lo..=d.hi {
        let box_i = ds.inj[0].image_of(t.e2.level(i)?)?.join(&ds.inj[1].image_of(d.level(i)?)?)?;
        levels.push(into_sum.preimage(&box_i)?);
    }
    let e = FilteredObject1::new_fin(t.e2.lo, g.clone(), levels, t.e2.lower, t.e2.upper, t.e2.o_ref)?;
    let a_new = into_sum_lift(&g, &into_sum, &ds.inj[0].compose(&t.alpha)?)?;
    let triple = AdmissibleTriple1::new(t.e1.clone(), e, d.clone(), a_new, pd.clone())?;
    let commutes = t.beta.compose(&p2)? == gamma.compose(&pd)?;
    Ok(Square1 { triple, to_e2: p2, to_d: pd, commutes })
}

/// Factor h: X -> W through the injection j: G -> W.
fn into_sum_lift(g: &FinAbGroup, j: &GroupHom, h: &GroupHom) -> Result<GroupHom> {
    let table: Vec<(Vec<i64>, usize)> = g.elements().map(|y| {
        let idx = j.dst().index_of(&j.apply(&y));
        (y, idx)
    }).collect();
    let mut lookup = std::collections::HashMap::new();
    for (y, idx) in table {
        lookup.insert(idx, y);
    }
    let src = h.src();
    let cols: Vec<Vec<i64>> = (0..src.rank())
        .map(|k| {
            let e: Vec<i64> = (0..src.rank()).map(|l| (l == k) as i64).collect();
            let idx = h.dst().index_of(&h.apply(&e));
            lookup.get(&idx).cloned().ok_or_else(|| Error::Invalid("map does not factor".into()))
        })
        .collect::<Result<_>>()?;
    let matrix: IMat = (0..g.rank()).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    GroupHom::new(src.clone(), g.clone(), matrix)
}

/// D -> (D + E2)/(gamma, -alpha)(E1) -> E3 for gamma: E1 -> D given by its matrix.
pub fn amalgam1(t: &AdmissibleTriple1, d: &FilteredObject1, gamma: IMat) -> Result<Square1> {
    let gamma = check_morphism(&t.e1, d, gamma)?;
    let ds = direct_sum(d.fin()?.0, t.e2.fin()?.0);
    let rel = ds.inj[0].compose(&gamma)?.sub(&ds.inj[1].compose(&t.alpha)?)?;
    let (h, proj) = quotient(&ds.group, &rel.image())?;
    let to_d = proj.compose(&ds.inj[0])?;
    let to_e2 = proj.compose(&ds.inj[1])?;
    let mut levels = vec![];
    for i in d.lo..=d.hi {
        let box_i = ds.inj[0].image_of(d.level(i)?)?.join(&ds.inj[1].image_of(t.e2.level(i)?)?)?;
        levels.push(proj.image_of(&box_i)?);
    }
    let e = FilteredObject1::new_fin(t.e2.lo, h.clone(), levels, t.e2.lower, t.e2.upper, t.e2.o_ref)?;
    // (x, y) -> beta(y)
    let b_sum = t.beta.compose(&ds.proj[1])?;
    let b_new = descend(&h, &proj, &b_sum)?;
    let triple = AdmissibleTriple1::new(d.clone(), e, t.e3.clone(), to_d.clone(), b_new)?;
    let commutes = to_e2.compose(&t.alpha)? == to_d.compose(&gamma)?;
    Ok(Square1 { triple, to_e2, to_d, commutes })
}

/// Factor f: S -> T through the surjection p: S -> Q.
fn descend(q: &FinAbGroup, p: &GroupHom, f: &GroupHom) -> Result<GroupHom> {
    let s = p.src();
    let mut val: Vec<Option<Vec<i64>>> = vec![None; q.order()];
    for x in s.elements() {
        let qi = q.index_of(&p.apply(&x));
        let fx = f.apply(&x);
        match &val[qi] {
            None => val[qi] = Some(fx),
            Some(v) if *v == fx => {}
            Some(_) => return Err(Error::Invalid("map does not descend".into())),
        }
    }
    let cols: Vec<Vec<i64>> = (0..q.rank())
        .map(|k| {
            let e: Vec<i64> = (0..q.rank()).map(|l| (l == k) as i64).collect();
            val[q.index_of(&e)].clone().unwrap()
        })
        .collect();
    let matrix: IMat = (0..f.dst().rank()).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    GroupHom::new(q.clone(), f.dst().clone(), matrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_matrix(n: usize) -> IMat {
        (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect()
    }

    #[test]
    fn laurent_triple_is_admissible() {
        let t = AdmissibleTriple1::laurent(3, -2, 2).unwrap();
        assert!(t.e1.is_compact1());
        assert!(t.e3.is_discrete1());
        let d = t.dual();
        let d = AdmissibleTriple1::new(d.e1, d.e2, d.e3, d.alpha, d.beta).unwrap();
        assert!(d.e1.is_compact1() && d.e3.is_discrete1());
    }

    #[test]
    fn product_with_identity() {
        let t = AdmissibleTriple1::laurent(2, -2, 1).unwrap();
        let n = t.e3.fin().unwrap().0.rank();
        let sq = fibered_product1(&t, &t.e3, identity_matrix(n)).unwrap();
        assert!(sq.commutes);
        assert_eq!(sq.triple.e2.fin().unwrap().0.order(), t.e2.fin().unwrap().0.order());
        for i in t.e2.lo..=t.e2.hi {
            assert_eq!(sq.triple.e2.level_order(i).unwrap(), t.e2.level_order(i).unwrap());
        }
    }

    #[test]
    fn product_with_zero() {
        let t = AdmissibleTriple1::laurent(2, -2, 1).unwrap();
        let z = FilteredObject1::laurent(2, -2, -2, Tail::Trivial, Tail::Trivial, -2).unwrap();
        // a trivial object on the shared window
        let w = FinAbGroup::trivial();
        let d = FilteredObject1::new_fin(-2, w.clone(), vec![Subgroup::zero(&w); 4], Tail::Trivial, Tail::Trivial, 0)
            .unwrap();
        assert_eq!(z.fin().unwrap().0.order(), 1);
        let sq = fibered_product1(&t, &d, vec![vec![]; t.e3.fin().unwrap().0.rank()]).unwrap();
        assert_eq!(sq.triple.e2.fin().unwrap().0.order(), t.e1.fin().unwrap().0.order());
    }

    #[test]
    fn product_orders_levelwise() {
        // D = E3 window of F_q((t))/F_q[[t]] mapped to itself by multiplication by 2
        let t = AdmissibleTriple1::laurent(3, -1, 2).unwrap();
        let n = t.e3.fin().unwrap().0.rank();
        let m: IMat = (0..n).map(|i| (0..n).map(|j| 2 * (i == j) as i64).collect()).collect();
        let sq = fibered_product1(&t, &t.e3, m).unwrap();
        assert!(sq.commutes);
        for i in t.e2.lo..=t.e2.hi {
            let lhs = sq.triple.e2.level_order(i).unwrap();
            let rhs = t.e2.level_order(i).unwrap() * t.e3.level_order(i).unwrap() / t.e3.level_order(i).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn amalgam_with_identity() {
        let t = AdmissibleTriple1::laurent(2, -2, 1).unwrap();
        let n = t.e1.fin().unwrap().0.rank();
        let sq = amalgam1(&t, &t.e1, identity_matrix(n)).unwrap();
        assert!(sq.commutes);
        assert_eq!(sq.triple.e2.fin().unwrap().0.order(), t.e2.fin().unwrap().0.order());
    }

    #[test]
    fn non_morphism_rejected() {
        let t = AdmissibleTriple1::laurent(2, -1, 1).unwrap();
        let n = t.e2.fin().unwrap().0.rank();
        // sends the deepest coordinate to the top one
        let mut m = vec![vec![0; n]; n];
        m[n - 1][0] = 1;
        assert!(check_morphism(&t.e2, &t.e2, m).is_err());
        let n3 = t.e3.fin().unwrap().0.rank();
        let mut g = vec![vec![0; n]; n3];
        g[n3 - 1][0] = 1;
        assert!(fibered_product1(&t, &t.e2, g).is_err());
    }
}

//! Functions and distributions on two-dimensional box objects.
//!
//! A function is f ⊗ s·b_{q,o} with f a table on the window F(p)/F(q),
//! restricted to Λ_kh/Λ_kl; a distribution is H ⊗ s·b_{o,q}. Pairing of a
//! function and a distribution on a common window is Σ f·H·s·s'.

pub mod basechange;
pub mod images;
pub mod poisson;
pub mod table;

use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use crate::filt2::{Coeff, FilteredObject2, Label, Win2};
use crate::vmeas::{kappa, VirtualMeasure};
use crate::{Error, Result, C64};

pub use basechange::{base_change2_check, pppp_check, BaseChangeReport, Square, SquareReport};
pub use images::{image2, ImageMode2};
pub use poisson::{characteristic_delta, characteristic_delta_cf, characteristic_delta_cf_in, characteristic_delta_in, poisson2_i_check, poisson2_ii_check, Poisson2Report};
pub use table::{CpTerm, Table, TableData};

pub trait Kind: Clone + Copy + std::fmt::Debug + PartialEq + Send + Sync + Default {
    const DIST: bool;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fun;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dist;

impl Kind for Fun {
    const DIST: bool = false;
}

impl Kind for Dist {
    const DIST: bool = true;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Elem2<K: Kind> {
    pub obj: FilteredObject2,
    pub win: Win2,
    pub table: Table,
    /// Relative to b_{q,o} for functions and b_{o,q} for distributions.
    pub scalar: C64,
    #[serde(skip)]
    _k: PhantomData<K>,
}

pub type SchwartzC2 = Elem2<Fun>;
pub type DistC2 = Elem2<Dist>;

fn is_prime(q: i64) -> bool {
    q >= 2 && (2..q).take_while(|d| d * d <= q).all(|d| q % d != 0)
}

pub(crate) fn field_q(obj: &FilteredObject2) -> Result<usize> {
    match obj.coeff {
        Coeff::Fq(q) if is_prime(q) => Ok(q as usize),
        Coeff::Fq(q) => Err(Error::Invalid(format!("coefficient field F_{q}: prime q required"))),
        Coeff::Real => Err(Error::Invalid("harmonic analysis on real boxes is not available".into())),
    }
}

/// Same ambient box and label set; reference index may differ.
pub(crate) fn same_ambient(x: &FilteredObject2, y: &FilteredObject2) -> bool {
    x.coeff == y.coeff && x.t_range == y.t_range && x.u_range == y.u_range && x.k_ref == y.k_ref && x.labels() == y.labels()
}

fn labels_where(obj: &FilteredObject2, w: &Win2, pred: impl Fn(Label) -> bool) -> Vec<Label> {
    obj.labels_in(w).into_iter().filter(|l| pred(*l)).collect()
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

impl<K: Kind> Elem2<K> {
    pub fn new(obj: &FilteredObject2, win: Win2, table: Table, scalar: C64) -> Result<Self> {
        let q = field_q(obj)?;
        if !obj.window_in_box(&win) {
            return Err(Error::Cutoff(format!("window {win:?} is not inside the box")));
        }
        let mut want = obj.labels_in(&win);
        table::sort_labels(&mut want);
        if table.q != q || table.labels != want {
            return Err(Error::ParentMismatch("table coordinates differ from the window labels".into()));
        }
        Ok(Self { obj: obj.clone(), win, table, scalar, _k: PhantomData })
    }

    fn with(&self, obj: &FilteredObject2, win: Win2, table: Table, scalar: C64) -> Self {
        Self { obj: obj.clone(), win, table, scalar, _k: PhantomData }
    }

    pub fn zero(obj: &FilteredObject2, win: Win2) -> Result<Self> {
        let q = field_q(obj)?;
        Self::new(obj, win, Table::constant(q, obj.labels_in(&win), c(0.0)), c(1.0))
    }

    /// Constant table on the window.
    pub fn constant(obj: &FilteredObject2, win: Win2, value: C64) -> Result<Self> {
        let q = field_q(obj)?;
        Self::new(obj, win, Table::constant(q, obj.labels_in(&win), value), c(1.0))
    }

    /// Indicator of 0 on the window.
    pub fn delta(obj: &FilteredObject2, win: Win2, value: C64) -> Result<Self> {
        let q = field_q(obj)?;
        Self::new(obj, win, Table::delta(q, obj.labels_in(&win), value), c(1.0))
    }

    pub fn random(obj: &FilteredObject2, win: Win2, rank: usize, seed: u64) -> Result<Self> {
        let q = field_q(obj)?;
        Self::new(obj, win, Table::random(q, obj.labels_in(&win), rank, seed), c(1.0))
    }

    pub fn scale(&self, x: C64) -> Self {
        self.with(&self.obj, self.win, self.table.clone(), self.scalar * x)
    }

    /// Cell measure of the window: b_{q,p}-volume of a Λ_kl-cell.
    pub fn cell(&self) -> f64 {
        kappa(&self.obj, self.win.q, self.win.p, self.win.kl)
    }

    /// Table with the scalar folded in.
    pub fn values(&self) -> Table {
        self.table.scale(self.scalar)
    }

    /// Moves to window `w`: functions coarsen in t and refine in u,
    /// distributions extend in t and shrink in u.
    pub fn to_window(&self, w: Win2) -> Result<Self> {
        if w == self.win {
            return Ok(self.clone());
        }
        let v = self.win;
        let ok = if K::DIST {
            w.q <= v.q && w.p >= v.p && w.kl >= v.kl && w.kh <= v.kh
        } else {
            w.q >= v.q && w.p <= v.p && w.kl <= v.kl && w.kh >= v.kh
        };
        if !ok || !self.obj.window_in_box(&w) || w.q > w.p || w.kl > w.kh {
            return Err(Error::Cutoff(format!("cannot move {} from {v:?} to {w:?}", if K::DIST { "distribution" } else { "function" })));
        }
        let e = &self.obj;
        if K::DIST {
            // u: restrict below Λ_kh', sum over Λ_kl'/Λ_kl
            let t = self.table.restrict_zero(&labels_where(e, &v, |l| l.0 < -w.kh))?;
            let t = t.sum_out(&labels_where(e, &v, |l| l.0 >= -w.kl))?;
            // t: Haar kernel on F(q)/F(q'), zero beyond F(p)
            let inflate = labels_where(e, &Win2 { p: v.p, ..w }, |l| l.1 > -v.q - 1);
            let zeros = labels_where(e, &w, |l| l.1 < -v.p);
            let t = t.inflate(&inflate)?.extend_zero(&zeros)?;
            let k = kappa(e, w.q, v.q, w.kl);
            Ok(self.with(e, w, t.scale(c(k)), self.scalar))
        } else {
            // t: restrict to F(p'), integrate over F(q')/F(q)
            let t = self.table.restrict_zero(&labels_where(e, &v, |l| l.1 < -w.p))?;
            let t = t.sum_out(&labels_where(e, &v, |l| l.1 > -w.q - 1))?;
            let k = kappa(e, v.q, w.q, v.kl);
            // u: zero outside Λ_kh, constant along Λ_kl/Λ_kl'
            let zeros = labels_where(e, &w, |l| l.0 < -v.kh);
            let inflate = labels_where(e, &w, |l| l.0 > -v.kl - 1);
            let t = t.extend_zero(&zeros)?.inflate(&inflate)?;
            Ok(self.with(e, w, t.scale(c(k)), self.scalar))
        }
    }

    /// Deviation on a common window.
    pub fn max_dev(&self, o: &Self) -> f64 {
        if !self.obj.same_structure(&o.obj) {
            return f64::INFINITY;
        }
        let (a, b) = (self.win, o.win);
        let w = if K::DIST {
            Win2 { q: a.q.min(b.q), p: a.p.max(b.p), kl: a.kl.max(b.kl), kh: a.kh.min(b.kh) }
        } else {
            Win2 { q: a.q.max(b.q), p: a.p.min(b.p), kl: a.kl.min(b.kl), kh: a.kh.max(b.kh) }
        };
        match (self.to_window(w), o.to_window(w)) {
            (Ok(x), Ok(y)) => x.values().max_dev(&y.values()),
            _ => f64::INFINITY,
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if !self.obj.same_structure(&o.obj) || self.win != o.win {
            return Err(Error::ParentMismatch("elements on different windows".into()));
        }
        let t = self.values().add(&o.values())?;
        Ok(self.with(&self.obj, self.win, t, c(1.0)))
    }
}

impl SchwartzC2 {
    /// Canonical isomorphism S_{F(o)} ⊗ μ(F(o)|F(o1)) -> S_{F(o1)}.
    pub fn rebase(&self, m: &VirtualMeasure) -> Result<Self> {
        if !same_ambient(&m.parent, &self.obj) || m.i != self.obj.o_ref {
            return Err(Error::ParentMismatch("measure is not in μ(F(o)|F(o1))".into()));
        }
        let obj = self.obj.with_refs(m.j, self.obj.k_ref)?;
        Ok(self.with(&obj, self.win, self.table.clone(), self.scalar * m.scalar))
    }

    pub fn fourier2(&self) -> Result<SchwartzC2> {
        let t = self.table.dft()?.relabel(&|l| self.obj.sigma(l), 1)?.scale(c(self.cell()));
        Ok(self.with(&self.obj.dual2(), self.win.dual(), t, self.scalar))
    }

    /// f̌(x) = f(-x).
    pub fn check(&self) -> Result<SchwartzC2> {
        Ok(self.with(&self.obj, self.win, self.table.reflect()?, self.scalar))
    }
}

impl DistC2 {
    /// Canonical isomorphism S'_{F(o)} ⊗ μ(F(o1)|F(o)) -> S'_{F(o1)}.
    pub fn rebase(&self, m: &VirtualMeasure) -> Result<Self> {
        if !same_ambient(&m.parent, &self.obj) || m.j != self.obj.o_ref {
            return Err(Error::ParentMismatch("measure is not in μ(F(o1)|F(o))".into()));
        }
        let obj = self.obj.with_refs(m.i, self.obj.k_ref)?;
        Ok(self.with(&obj, self.win, self.table.clone(), self.scalar * m.scalar))
    }

    pub fn fourier2_dist(&self) -> Result<DistC2> {
        let n = self.table.len().map(|x| x as f64).unwrap_or_else(|| (self.table.q as f64).powi(self.table.n() as i32));
        let t = self.table.dft()?.relabel(&|l| self.obj.sigma(l), 1)?.scale(c(1.0 / (n * self.cell())));
        Ok(self.with(&self.obj.dual2(), self.win.dual(), t, self.scalar))
    }

    pub fn check(&self) -> Result<DistC2> {
        Ok(self.with(&self.obj, self.win, self.table.reflect()?, self.scalar))
    }
}

/// ⟨f, H⟩ on the window with the outer range of H and the inner range of f.
pub fn pairing2(f: &SchwartzC2, h: &DistC2) -> Result<C64> {
    if !f.obj.same_structure(&h.obj) {
        return Err(Error::ParentMismatch("pairing on different objects".into()));
    }
    let w = Win2 { q: h.win.q, p: h.win.p, kl: f.win.kl, kh: f.win.kh };
    let (x, y) = (f.to_window(w)?, h.to_window(w)?);
    Ok(x.table.pair(&y.table)? * x.scalar * y.scalar)
}

/// Deviation of F∘F from reflection and of ⟨F f, G⟩ from ⟨f, F G⟩.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct FourierReport {
    pub involution_dev: f64,
    pub dist_involution_dev: f64,
    pub adjoint_dev: f64,
    pub points_log_q: usize,
}

pub fn fourier2_check(f: &SchwartzC2, g: &DistC2) -> Result<FourierReport> {
    let ff = f.fourier2()?.fourier2()?;
    let gg = g.fourier2_dist()?.fourier2_dist()?;
    let lhs = pairing2(&f.fourier2()?, g)?;
    let rhs = pairing2(f, &g.fourier2_dist()?)?;
    let scale = lhs.norm().max(rhs.norm()).max(1.0);
    Ok(FourierReport {
        involution_dev: ff.max_dev(&f.check()?),
        dist_involution_dev: gg.max_dev(&g.check()?),
        adjoint_dev: (lhs - rhs).norm() / scale,
        points_log_q: f.table.n(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filt2::{make_local_field2, Shape};
    use crate::vmeas::canonical_one;

    fn field(q: i64, t: (i64, i64), u: (i64, i64)) -> FilteredObject2 {
        make_local_field2(Coeff::Fq(q), t, u).unwrap()
    }

    #[test]
    fn rejects_composite_and_real() {
        let e = field(4, (0, 0), (0, 0));
        assert!(SchwartzC2::constant(&e, e.full_window(), c(1.0)).is_err());
        let r = make_local_field2(Coeff::Real, (0, 0), (0, 0)).unwrap();
        assert!(SchwartzC2::constant(&r, r.full_window(), c(1.0)).is_err());
    }

    #[test]
    fn trivial_box_fourier_is_identity() {
        let e = field(2, (0, 0), (0, 0)).with_shape(Shape::Empty);
        let w = e.full_window();
        let f = SchwartzC2::constant(&e, w, c(2.5)).unwrap();
        let g = f.fourier2().unwrap();
        assert_eq!(g.table.n(), 0);
        assert!((g.values().eval(&[]) - c(2.5)).norm() < 1e-12);
    }

    #[test]
    fn self_dual_lattice_indicator() {
        // t, u in [-1, 0]; F_2[[u]]-lattice {a >= 0} in each row
        let e = field(2, (-1, 0), (-1, 0));
        let w = e.full_window();
        let lat = Table::subgroup_indicator(2, e.labels_in(&w), &|l| l.0 < 0);
        let f = SchwartzC2::new(&e, w, lat.clone(), c(1.0)).unwrap();
        let g = f.fourier2().unwrap();
        assert_eq!(g.win, w);
        assert!(g.obj.same_structure(&e));
        assert!(g.max_dev(&f) < 1e-12, "{}", g.max_dev(&f));
    }

    #[test]
    fn fourier_involution_and_adjoint() {
        for (q, t, u) in [(2, (-2, 1), (-1, 1)), (3, (-1, 1), (-1, 0)), (3, (-2, 1), (-2, 1))] {
            let e = field(q, t, u).with_refs(0, 0).unwrap();
            let w = e.full_window();
            let f = SchwartzC2::random(&e, w, 3, 11).unwrap();
            let g = DistC2::random(&e.dual2(), w.dual(), 3, 12).unwrap();
            let r = fourier2_check(&f, &g).unwrap();
            assert!(r.involution_dev < 1e-9 && r.dist_involution_dev < 1e-9 && r.adjoint_dev < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn windows_compose() {
        let e = field(3, (-2, 1), (-1, 1)).with_refs(0, 0).unwrap();
        let full = e.full_window();
        let f = SchwartzC2::random(&e, Win2 { kl: -1, kh: 1, ..full }, 2, 5).unwrap();
        let w1 = Win2 { q: -1, p: 1, kl: -2, kh: 1 };
        let w2 = Win2 { q: 0, p: 1, kl: -2, kh: 1 };
        let two = f.to_window(w1).unwrap().to_window(w2).unwrap();
        assert!(two.max_dev(&f.to_window(w2).unwrap()) < 1e-12);
        assert!(f.to_window(w2).unwrap().to_window(full).is_err());
        // pairing is window independent
        let h = DistC2::random(&e, Win2 { q: 0, p: 1, kl: -2, kh: 1 }, 2, 6).unwrap();
        let p0 = pairing2(&f, &h).unwrap();
        let p1 = pairing2(&f.to_window(w1).unwrap(), &h).unwrap();
        let hx = h.to_window(Win2 { q: -1, p: 1, kl: -2, kh: 1 }).unwrap();
        let p2 = pairing2(&f, &hx).unwrap();
        assert!((p0 - p1).norm() < 1e-9 && (p0 - p2).norm() < 1e-9);
    }

    #[test]
    fn coarsening_oracle() {
        // q = 2, one row b = 0 with a in {0}, window rows [-1, 0] -> [0, 0]
        let e = field(2, (0, 1), (0, 0)).with_refs(-1, -1).unwrap();
        let w = e.full_window();
        assert_eq!(w, Win2 { q: -2, p: 0, kl: -1, kh: 0 });
        let t = Table::dense(2, vec![(0, 0), (0, 1)], [1.0, 2.0, 3.0, 5.0].map(c).to_vec()).unwrap();
        let f = SchwartzC2::new(&e, w, t, c(1.0)).unwrap();
        // integrate out the row b = 1 (cell volume 1 with k_ref = 0)
        let g = f.to_window(Win2 { q: -1, ..w }).unwrap();
        assert_eq!(g.values().dense_data().unwrap(), vec![c(3.0), c(8.0)]);
        // restrict to F(-1): row b = 0 set to 0
        let h = f.to_window(Win2 { p: -1, ..w }).unwrap();
        assert_eq!(h.values().dense_data().unwrap(), vec![c(1.0), c(2.0)]);
    }

    #[test]
    fn rebase_coherence() {
        let e = field(2, (-2, 1), (-1, 1)).with_shape(Shape::u_at_least(0)).with_refs(0, 0).unwrap();
        let w = e.full_window();
        let f = SchwartzC2::random(&e, w, 2, 3).unwrap();
        assert_eq!(f.rebase(&VirtualMeasure::identity(&e, 0).unwrap()).unwrap(), f);
        let m1 = VirtualMeasure::new(&e, 0, 1, c(2.0)).unwrap();
        let e1 = e.with_refs(1, 0).unwrap();
        let m2 = VirtualMeasure::new(&e1, 1, -1, c(3.0)).unwrap();
        let two = f.rebase(&m1).unwrap().rebase(&m2).unwrap();
        let one = f.rebase(&m1.compose_gamma(&VirtualMeasure::new(&e, 1, -1, c(3.0)).unwrap()).unwrap()).unwrap();
        assert_eq!(two.scalar, one.scalar);
        // with canonical 1-measures the trivialized scalar is unchanged
        let q = w.q;
        let base = f.scale(canonical_one(&e, q, 0).unwrap().scalar);
        let moved = base.rebase(&canonical_one(&e, 0, 1).unwrap()).unwrap();
        let e1c = canonical_one(&e1, q, 1).unwrap();
        assert!((moved.scalar - e1c.scalar * f.scalar).norm() < 1e-12);
        assert_eq!(moved.table, f.table);
    }
}

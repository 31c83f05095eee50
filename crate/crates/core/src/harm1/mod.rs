//! Functions, distributions and Fourier analysis on window objects.
//!
//! Every element is stored on a window [a, b]; operations lift to the full
//! window [lo, hi] of the parent, act on the ambient group and canonicalize.

pub mod images;

use serde::{Deserialize, Serialize};

use crate::archimed::{poisson_lattice_check, Cutoffs, LatticePoissonReport};
use crate::filt1::FilteredObject1;
use crate::finabel::{fourier_c0, fourier_c0_dist, max_dev, DistributionC0, FinAbGroup, FunctionC0, MeasureC0};
use crate::{Error, Result, C64};

pub use images::{images1, poisson1_check, Element1, ImageMode1, Poisson1Report};

const CONST_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchwartzC1 {
    pub obj: FilteredObject1,
    pub a: i64,
    pub b: i64,
    pub table: Vec<C64>,
    pub canonical: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistC1 {
    pub obj: FilteredObject1,
    pub a: i64,
    pub b: i64,
    pub kernel: Vec<C64>,
}

/// Haar measure with vol(F(o_ref)) = scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureLine1 {
    pub obj: FilteredObject1,
    pub scale: C64,
}

fn ambient(obj: &FilteredObject1) -> Result<&FinAbGroup> {
    Ok(obj.fin()?.0)
}

/// Point mass of the normalized measure at the finest resolution.
fn point_mass(obj: &FilteredObject1) -> Result<f64> {
    Ok(1.0 / obj.level_order(obj.o_ref)? as f64)
}

fn same_parent(x: &FilteredObject1, y: &FilteredObject1, what: &str) -> Result<()> {
    if x != y {
        return Err(Error::ParentMismatch(what.into()));
    }
    Ok(())
}

/// Smallest level containing the support and largest level of invariance.
fn minimal_window(obj: &FilteredObject1, full: &[C64]) -> Result<(i64, i64)> {
    let w = ambient(obj)?;
    let scale = full.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = CONST_TOL * scale.max(1.0);
    let mut b = obj.hi;
    for i in obj.lo..=obj.hi {
        let mask = obj.level(i)?.mask();
        if full.iter().zip(&mask).all(|(z, &m)| m || z.norm() <= tol) {
            b = i;
            break;
        }
    }
    let mut a = obj.lo;
    for i in (obj.lo..=b).rev() {
        let gens = obj.level(i)?.rows().clone();
        let invariant = gens.iter().all(|s| {
            w.elements()
                .enumerate()
                .all(|(k, x)| (full[k] - full[w.index_of(&w.add(&x, s))]).norm() <= tol)
        });
        if invariant {
            a = i;
            break;
        }
    }
    Ok((a, b))
}

impl SchwartzC1 {
    pub fn new(obj: FilteredObject1, a: i64, b: i64, table: Vec<C64>) -> Result<Self> {
        let wg = obj.window_group(a, b)?;
        if table.len() != wg.group.order() {
            return Err(Error::Invalid("table size does not match window".into()));
        }
        Ok(Self { obj, a, b, table, canonical: false })
    }

    /// Build from a table on the ambient group (window [lo, hi]).
    pub fn from_full(obj: &FilteredObject1, full: Vec<C64>) -> Result<Self> {
        let f = Self::new(obj.clone(), obj.lo, obj.hi, full)?;
        Ok(f)
    }

    /// Indicator of the level F(i).
    pub fn indicator(obj: &FilteredObject1, i: i64) -> Result<Self> {
        let mask = obj.level(i)?.mask();
        let full = mask.into_iter().map(|m| C64::new(m as u8 as f64, 0.0)).collect();
        Ok(Self::from_full(obj, full)?.canonicalize())
    }

    pub fn full(&self) -> Vec<C64> {
        let w = ambient(&self.obj).unwrap();
        let wg = self.obj.window_group(self.a, self.b).unwrap();
        (0..w.order())
            .map(|x| wg.w_to_q[x].map_or(C64::new(0.0, 0.0), |z| self.table[z]))
            .collect()
    }

    pub fn full_c0(&self) -> FunctionC0 {
        FunctionC0 {
            group: ambient(&self.obj).unwrap().clone(),
            table: self.full(),
        }
    }

    /// The same function on another window, if it is representable there.
    pub fn at_window(&self, a: i64, b: i64) -> Result<Self> {
        let full = self.full();
        let (ma, mb) = minimal_window(&self.obj, &full)?;
        if a > ma || b < mb {
            return Err(Error::Invalid(format!("function needs a window containing [{ma},{mb}], got [{a},{b}]")));
        }
        let wg = self.obj.window_group(a, b)?;
        let table = wg.reps.iter().map(|&x| full[x]).collect();
        Self::new(self.obj.clone(), a, b, table)
    }

    pub fn canonicalize(&self) -> Self {
        canonicalize1(self)
    }

    pub fn max_dev(&self, other: &Self) -> f64 {
        if self.obj != other.obj {
            return f64::INFINITY;
        }
        max_dev(&self.full(), &other.full())
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        out.table.iter_mut().for_each(|z| *z *= c);
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_parent(&self.obj, &other.obj, "add")?;
        let full = self.full().iter().zip(other.full()).map(|(x, y)| x + y).collect();
        Ok(Self::from_full(&self.obj, full)?.canonicalize())
    }
}

pub fn canonicalize1(f: &SchwartzC1) -> SchwartzC1 {
    let full = f.full();
    let (a, b) = minimal_window(&f.obj, &full).unwrap();
    let mut out = f.at_window(a, b).unwrap();
    out.canonical = true;
    out
}

impl DistC1 {
    pub fn new(obj: FilteredObject1, a: i64, b: i64, kernel: Vec<C64>) -> Result<Self> {
        let wg = obj.window_group(a, b)?;
        if kernel.len() != wg.group.order() {
            return Err(Error::Invalid("kernel size does not match window".into()));
        }
        Ok(Self { obj, a, b, kernel })
    }

    pub fn from_full(obj: &FilteredObject1, full: Vec<C64>) -> Result<Self> {
        Self::new(obj.clone(), obj.lo, obj.hi, full)
    }

    /// Evaluation at 0.
    pub fn dirac(obj: &FilteredObject1) -> Result<Self> {
        let mut full = vec![C64::new(0.0, 0.0); ambient(obj)?.order()];
        full[0] = C64::new(1.0, 0.0);
        Self::from_full(obj, full)
    }

    /// Kernel on the ambient group: uniform on cosets of S_a, zero off S_b.
    pub fn full(&self) -> Vec<C64> {
        let w = ambient(&self.obj).unwrap();
        let wg = self.obj.window_group(self.a, self.b).unwrap();
        let na = self.obj.level_order(self.a).unwrap() as f64;
        (0..w.order())
            .map(|x| wg.w_to_q[x].map_or(C64::new(0.0, 0.0), |z| self.kernel[z] / na))
            .collect()
    }

    pub fn full_c0(&self) -> DistributionC0 {
        DistributionC0 {
            group: ambient(&self.obj).unwrap().clone(),
            kernel: self.full(),
        }
    }

    /// Fiber sums of the full kernel onto the window [a, b].
    pub fn at_window(&self, a: i64, b: i64) -> Result<Self> {
        let full = self.full();
        let wg = self.obj.window_group(a, b)?;
        let mut kernel = vec![C64::new(0.0, 0.0); wg.group.order()];
        for (x, z) in wg.w_to_q.iter().enumerate() {
            if let Some(z) = z {
                kernel[*z] += full[x];
            }
        }
        Self::new(self.obj.clone(), a, b, kernel)
    }

    pub fn canonicalize(&self) -> Self {
        let (a, b) = minimal_window(&self.obj, &self.full()).unwrap();
        self.at_window(a, b).unwrap()
    }

    pub fn max_dev(&self, other: &Self) -> f64 {
        if self.obj != other.obj {
            return f64::INFINITY;
        }
        max_dev(&self.full(), &other.full())
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        out.kernel.iter_mut().for_each(|z| *z *= c);
        out
    }
}

impl MeasureLine1 {
    pub fn new(obj: &FilteredObject1, scale: C64) -> Self {
        Self { obj: obj.clone(), scale }
    }

    pub fn normalized(obj: &FilteredObject1) -> Self {
        Self::new(obj, C64::new(1.0, 0.0))
    }

    /// Constant kernel on the full window.
    pub fn as_dist(&self) -> Result<DistC1> {
        let pm = point_mass(&self.obj)?;
        let n = ambient(&self.obj)?.order();
        Ok(DistC1::from_full(&self.obj, vec![self.scale * pm; n])?.canonicalize())
    }

    /// Same line on the dual object, normalized so that the pair is self-dual.
    pub fn inverse(&self) -> Result<MeasureLine1> {
        if self.scale.norm() == 0.0 {
            return Err(Error::ZeroMeasure);
        }
        Ok(MeasureLine1::new(&self.obj.dual1(), 1.0 / self.scale))
    }

    /// The measure on the ambient group at the finest resolution.
    pub fn c0(&self) -> Result<MeasureC0> {
        Ok(MeasureC0::new(ambient(&self.obj)?, self.scale * point_mass(&self.obj)?))
    }
}

pub fn pairing1(f: &SchwartzC1, h: &DistC1) -> Result<C64> {
    same_parent(&f.obj, &h.obj, "pairing1")?;
    Ok(f.full().iter().zip(h.full()).map(|(x, y)| x * y).sum())
}

/// F_mu(f) on the dual object.
pub fn fourier1(f: &SchwartzC1, mu: &MeasureLine1) -> Result<SchwartzC1> {
    same_parent(&f.obj, &mu.obj, "fourier1")?;
    let g = fourier_c0(&f.full_c0(), &mu.c0()?)?;
    Ok(SchwartzC1::from_full(&f.obj.dual1(), g.table)?.canonicalize())
}

/// Adjoint transform of a distribution; `nu` is a measure on the dual object.
pub fn fourier1_dist(h: &DistC1, nu: &MeasureLine1) -> Result<DistC1> {
    let dual = h.obj.dual1();
    same_parent(&dual, &nu.obj, "fourier1_dist")?;
    let g = fourier_c0_dist(&h.full_c0(), &nu.c0()?)?;
    Ok(DistC1::from_full(&dual, g.kernel)?.canonicalize())
}

/// Lattice Poisson summation for an archimedean window quotient Z in R.
pub fn poisson1_lattice(coeffs: &[C64], cut: &Cutoffs) -> Result<LatticePoissonReport> {
    poisson_lattice_check(coeffs, cut)
}

/// Reflection x -> -x of a function.
pub fn reflect1(f: &SchwartzC1) -> SchwartzC1 {
    let w = ambient(&f.obj).unwrap();
    let full = f.full();
    let neg = w.negation_table();
    SchwartzC1::from_full(&f.obj, neg.iter().map(|&j| full[j]).collect())
        .unwrap()
        .canonicalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filt1::Tail;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn laurent() -> FilteredObject1 {
        FilteredObject1::laurent(3, -2, 2, Tail::FiniteStable, Tail::FiniteStable, 0).unwrap()
    }

    fn random_f(rng: &mut ChaCha8Rng, obj: &FilteredObject1, a: i64, b: i64) -> SchwartzC1 {
        let n = obj.window_group(a, b).unwrap().group.order();
        let t = (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        SchwartzC1::new(obj.clone(), a, b, t).unwrap()
    }

    fn random_h(rng: &mut ChaCha8Rng, obj: &FilteredObject1, a: i64, b: i64) -> DistC1 {
        let n = obj.window_group(a, b).unwrap().group.order();
        let t = (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        DistC1::new(obj.clone(), a, b, t).unwrap()
    }

    #[test]
    fn canonical_windows() {
        let e = laurent();
        let f = SchwartzC1::indicator(&e, 0).unwrap();
        assert_eq!((f.a, f.b), (0, 0));
        assert_eq!(f.canonicalize(), f);
        // zero padded
        let g = f.at_window(-2, 2).unwrap();
        assert_eq!((g.a, g.b), (-2, 2));
        assert_eq!(canonicalize1(&g), f);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_f(&mut rng, &e, -1, 1);
        let k = h.at_window(-2, 2).unwrap().canonicalize();
        assert_eq!((k.a, k.b), (-1, 1));
        assert!(k.max_dev(&h) == 0.0);
    }

    #[test]
    fn pairing_examples() {
        let e = laurent();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_f(&mut rng, &e, -2, 1);
        let d = DistC1::dirac(&e).unwrap();
        let f0 = f.full()[0];
        assert!((pairing1(&f, &d).unwrap() - f0).norm() < 1e-15);
        // vol(F(i)) = q^i with vol(F(0)) = 1
        let mu = MeasureLine1::new(&e, c(2.0)).as_dist().unwrap();
        for i in -2..=2 {
            let v = pairing1(&SchwartzC1::indicator(&e, i).unwrap(), &mu).unwrap();
            assert!((v - c(2.0 * 3f64.powi(i as i32))).norm() < 1e-12);
        }
        let g = random_f(&mut rng, &e, 0, 2);
        let h = random_h(&mut rng, &e, -1, 2);
        let (s, t) = (C64::new(0.3, -1.1), C64::new(-2.0, 0.5));
        let lhs = pairing1(&f.scale(s).add(&g.scale(t)).unwrap(), &h).unwrap();
        let rhs = s * pairing1(&f, &h).unwrap() + t * pairing1(&g, &h).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn pairing_window_independent() {
        let e = laurent();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_f(&mut rng, &e, -1, 1);
        let h = random_h(&mut rng, &e, -2, 2);
        let p0 = pairing1(&f, &h).unwrap();
        for (a, b) in [(-2, 1), (-1, 2), (-2, 2)] {
            let p = pairing1(&f.at_window(a, b).unwrap(), &h).unwrap();
            assert!((p - p0).norm() < 1e-9);
        }
        // coarsening the distribution onto a window that still sees f
        let p = pairing1(&f, &h.at_window(-2, 1).unwrap()).unwrap();
        assert!((p - p0).norm() < 1e-9);
    }

    #[test]
    fn dist_window_roundtrip() {
        let e = laurent();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = random_h(&mut rng, &e, 0, 1);
        assert!(h.at_window(0, 1).unwrap().max_dev(&h) < 1e-15);
        assert!(h.at_window(-2, 2).unwrap().max_dev(&h) < 1e-15);
        assert!(h.at_window(-1, 1).unwrap().canonicalize().max_dev(&h) < 1e-15);
    }

    #[test]
    fn self_dual_indicator() {
        let e = laurent();
        let f = SchwartzC1::indicator(&e, 0).unwrap();
        let g = fourier1(&f, &MeasureLine1::normalized(&e)).unwrap();
        let expected = SchwartzC1::indicator(&e.dual1(), 0).unwrap();
        assert!(g.max_dev(&expected) < 1e-12);
        assert_eq!((g.a, g.b), (0, 0));
    }

    #[test]
    fn dirac_to_measure() {
        let e = laurent();
        let s = C64::new(0.5, 0.25);
        let nu = MeasureLine1::new(&e.dual1(), s);
        let fd = fourier1_dist(&DistC1::dirac(&e).unwrap(), &nu).unwrap();
        assert!(fd.max_dev(&nu.as_dist().unwrap()) < 1e-12);
    }

    #[test]
    fn trivial_object() {
        let e = FilteredObject1::laurent(2, 0, 0, Tail::Trivial, Tail::Trivial, 0).unwrap();
        let f = SchwartzC1::from_full(&e, vec![C64::new(1.5, -2.0)]).unwrap();
        let g = fourier1(&f, &MeasureLine1::normalized(&e)).unwrap();
        assert_eq!(g.table, f.table);
    }

    #[test]
    fn inversion_and_adjointness() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for q in [2, 3, 5] {
            let e = FilteredObject1::laurent(q, -1, 2, Tail::FiniteStable, Tail::FiniteStable, 1).unwrap();
            let f = random_f(&mut rng, &e, -1, 1);
            let mu = MeasureLine1::new(&e, C64::new(1.7, 0.4));
            let ff = fourier1(&fourier1(&f, &mu).unwrap(), &mu.inverse().unwrap()).unwrap();
            assert!(ff.max_dev(&reflect1(&f)) < 1e-9);
            // <F(f), H> = <f, F(H)> with H on the dual
            let ed = e.dual1();
            let h = random_h(&mut rng, &ed, ed.lo, ed.hi);
            let lhs = pairing1(&fourier1(&f, &mu).unwrap(), &h).unwrap();
            let rhs = pairing1(&f, &fourier1_dist(&h, &mu).unwrap()).unwrap();
            assert!((lhs - rhs).norm() < 1e-9);
        }
    }

    #[test]
    fn measure_translation_invariant() {
        let e = laurent();
        let mu = MeasureLine1::new(&e, c(3.0)).as_dist().unwrap();
        for a in e.lo..=e.hi {
            let k = mu.at_window(a, e.hi).unwrap().kernel;
            assert!(k.iter().all(|z| (z - k[0]).norm() < 1e-12));
        }
    }

    #[test]
    fn parent_mismatch() {
        let e = laurent();
        let other = FilteredObject1::laurent(3, -1, 2, Tail::FiniteStable, Tail::FiniteStable, 0).unwrap();
        let f = SchwartzC1::indicator(&e, 0).unwrap();
        assert!(matches!(pairing1(&f, &DistC1::dirac(&other).unwrap()), Err(Error::ParentMismatch(_))));
    }
}

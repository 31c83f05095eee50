//! Products A x Z^r x T^p x R^q with coefficient-tensor Schwartz functions.

pub mod hermite;
pub mod images;
pub mod tensor;

use serde::{Deserialize, Serialize};

use self::hermite::{eigenvalue, hermite_all, integrals, shift_matrix};
use self::tensor::Tensor;
use crate::finabel::fft::dft_axis;
use crate::finabel::FinAbGroup;
use crate::par::Exec;
use crate::{Error, Result, C64};

pub use images::{AdmissibleTripleC0ar, ImageMode, Role};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cutoffs {
    /// Hermite degrees 0..hermite
    pub hermite: usize,
    /// Z coordinates |n| <= z_box
    pub z_box: i64,
    /// T modes |k| <= t_box
    pub t_box: i64,
}

impl Default for Cutoffs {
    fn default() -> Self {
        Self {
            hermite: 32,
            z_box: 64,
            t_box: 32,
        }
    }
}

impl Cutoffs {
    /// Boxes seen from the dual object.
    pub fn dual(&self) -> Self {
        Self {
            hermite: self.hermite,
            z_box: self.t_box,
            t_box: self.z_box,
        }
    }
}

/// A x Z^r x T^p x R^q, coordinates in that order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct C0arObject {
    pub a: FinAbGroup,
    pub r: usize,
    pub p: usize,
    pub q: usize,
}

impl C0arObject {
    pub fn new(a: FinAbGroup, r: usize, p: usize, q: usize) -> Self {
        Self { a, r, p, q }
    }

    pub fn dual(&self) -> Self {
        Self {
            a: self.a.dual(),
            r: self.p,
            p: self.r,
            q: self.q,
        }
    }

    /// Real dimension of the Lie group.
    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    /// Rank of the discrete part of the component group.
    pub fn rank_pi0(&self) -> usize {
        self.r
    }

    pub fn is_compact(&self) -> bool {
        self.r == 0 && self.q == 0
    }

    pub fn is_discrete(&self) -> bool {
        self.p == 0 && self.q == 0
    }

    pub fn dims(&self, c: &Cutoffs) -> Vec<usize> {
        let mut d = vec![self.a.order()];
        d.extend(std::iter::repeat((2 * c.z_box + 1) as usize).take(self.r));
        d.extend(std::iter::repeat((2 * c.t_box + 1) as usize).take(self.p));
        d.extend(std::iter::repeat(c.hermite).take(self.q));
        d
    }
}

/// Coefficient tensor: f = sum coeff 1_a 1_n e^{2 pi i k theta} psi_m(x).
#[derive(Clone, Debug, PartialEq)]
pub struct SchwartzC0ar {
    pub obj: C0arObject,
    pub cut: Cutoffs,
    pub t: Tensor,
}

/// Values on the same basis; pairs with functions by sum h * f.
#[derive(Clone, Debug, PartialEq)]
pub struct DistC0ar {
    pub obj: C0arObject,
    pub cut: Cutoffs,
    pub t: Tensor,
}

/// Scalar relative to counting x counting x (mass-1 circle) x Lebesgue.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureC0ar {
    pub obj: C0arObject,
    pub scale: C64,
}

impl MeasureC0ar {
    pub fn canonical(obj: &C0arObject) -> Self {
        Self {
            obj: obj.clone(),
            scale: C64::new(1.0, 0.0),
        }
    }

    pub fn new(obj: &C0arObject, scale: C64) -> Self {
        Self {
            obj: obj.clone(),
            scale,
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.scale.norm() == 0.0 {
            return Err(Error::ZeroMeasure);
        }
        Ok(Self {
            obj: self.obj.dual(),
            scale: 1.0 / (self.scale * self.obj.a.order() as f64),
        })
    }
}

fn check_shape(obj: &C0arObject, cut: &Cutoffs, t: &Tensor) -> Result<()> {
    if t.dims != obj.dims(cut) {
        return Err(Error::ParentMismatch(format!(
            "tensor shape {:?} vs object {:?}",
            t.dims,
            obj.dims(cut)
        )));
    }
    if t.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Invalid("non-finite coefficient".into()));
    }
    Ok(())
}

impl SchwartzC0ar {
    pub fn new(obj: C0arObject, cut: Cutoffs, t: Tensor) -> Result<Self> {
        check_shape(&obj, &cut, &t)?;
        Ok(Self { obj, cut, t })
    }

    pub fn zeros(obj: &C0arObject, cut: &Cutoffs) -> Self {
        Self {
            obj: obj.clone(),
            cut: *cut,
            t: Tensor::zeros(obj.dims(cut)),
        }
    }

    pub fn max_dev(&self, other: &Self) -> f64 {
        crate::finabel::fourier::max_dev(&self.t.data, &other.t.data)
    }

    /// f(-x)
    pub fn check(&self) -> Self {
        Self {
            obj: self.obj.clone(),
            cut: self.cut,
            t: reflect(&self.obj, &self.t),
        }
    }

    /// Evaluation at (a, n, theta, x).
    pub fn eval(&self, a: &[i64], n: &[i64], theta: &[f64], x: &[f64]) -> C64 {
        let mut t = self.t.clone();
        let ai = self.obj.a.index_of(a);
        let mut w = vec![C64::new(0.0, 0.0); self.obj.a.order()];
        w[ai] = C64::new(1.0, 0.0);
        t = t.contract_axis(0, &w);
        for &ni in n {
            let mut w = vec![C64::new(0.0, 0.0); (2 * self.cut.z_box + 1) as usize];
            if ni.abs() <= self.cut.z_box {
                w[(ni + self.cut.z_box) as usize] = C64::new(1.0, 0.0);
            }
            t = t.contract_axis(0, &w);
        }
        for &th in theta {
            let w: Vec<C64> = (-self.cut.t_box..=self.cut.t_box)
                .map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 * th))
                .collect();
            t = t.contract_axis(0, &w);
        }
        for &xv in x {
            let w: Vec<C64> = hermite_all(self.cut.hermite, xv)
                .into_iter()
                .map(|v| C64::new(v, 0.0))
                .collect();
            t = t.contract_axis(0, &w);
        }
        t.data[0]
    }
}

impl DistC0ar {
    pub fn new(obj: C0arObject, cut: Cutoffs, t: Tensor) -> Result<Self> {
        check_shape(&obj, &cut, &t)?;
        Ok(Self { obj, cut, t })
    }

    pub fn pair(&self, f: &SchwartzC0ar) -> Result<C64> {
        if self.obj != f.obj || self.cut != f.cut {
            return Err(Error::ParentMismatch("pairing".into()));
        }
        Ok(self.t.data.iter().zip(&f.t.data).map(|(a, b)| a * b).sum())
    }

    pub fn max_dev(&self, other: &Self) -> f64 {
        crate::finabel::fourier::max_dev(&self.t.data, &other.t.data)
    }
}

fn reverse_axis(t: &Tensor, axis: usize) -> Tensor {
    let n = t.dims[axis];
    let mat: Vec<Vec<C64>> = (0..n)
        .map(|i| (0..n).map(|j| C64::new((i + j + 1 == n) as u8 as f64, 0.0)).collect())
        .collect();
    t.map_axis(axis, &mat)
}

fn diag_axis(t: &Tensor, axis: usize, d: &[C64]) -> Tensor {
    let n = d.len();
    let mat: Vec<Vec<C64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { d[i] } else { C64::new(0.0, 0.0) }).collect())
        .collect();
    t.map_axis(axis, &mat)
}

fn finite_map(t: &Tensor, a: &FinAbGroup, table: &[usize]) -> Tensor {
    let n = a.order();
    let mat: Vec<Vec<C64>> = (0..n)
        .map(|i| (0..n).map(|j| C64::new((table[i] == j) as u8 as f64, 0.0)).collect())
        .collect();
    t.map_axis(0, &mat)
}

fn reflect(obj: &C0arObject, t: &Tensor) -> Tensor {
    let mut out = finite_map(t, &obj.a, &obj.a.negation_table());
    for ax in 1..=obj.r + obj.p {
        out = reverse_axis(&out, ax);
    }
    for ax in 1 + obj.r + obj.p..1 + obj.r + obj.p + obj.q {
        let n = out.dims[ax];
        let sign: Vec<C64> = (0..n).map(|m| C64::new(if m % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
        out = diag_axis(&out, ax, &sign);
    }
    out
}

/// Core transform; `dist` selects the transposed action on Z/T blocks.
fn transform(obj: &C0arObject, t: &Tensor, scale: C64, dist: bool) -> Tensor {
    let mut x = t.scale(scale);
    let a_dims: Vec<usize> = obj.a.moduli().iter().map(|&d| d as usize).collect();
    if !a_dims.is_empty() {
        let mut full = a_dims.clone();
        let rest: usize = x.dims[1..].iter().product();
        full.push(rest);
        for ax in 0..a_dims.len() {
            dft_axis(&full, &mut x.data, ax, true, Exec::Sequential);
        }
    }
    // Z -> T reverses index for functions, keeps it for distributions; T -> Z the opposite.
    for ax in 1..=obj.r {
        if !dist {
            x = reverse_axis(&x, ax);
        }
    }
    for ax in 1 + obj.r..=obj.r + obj.p {
        if dist {
            x = reverse_axis(&x, ax);
        }
    }
    for ax in 1 + obj.r + obj.p..1 + obj.r + obj.p + obj.q {
        let n = x.dims[ax];
        let ev: Vec<C64> = (0..n).map(eigenvalue).collect();
        x = diag_axis(&x, ax, &ev);
    }
    // reorder (A, Z^r, T^p, R^q) -> (A, Z^p, T^r, R^q)
    let mut perm = vec![0];
    perm.extend(1 + obj.r..1 + obj.r + obj.p);
    perm.extend(1..1 + obj.r);
    perm.extend(1 + obj.r + obj.p..1 + obj.r + obj.p + obj.q);
    x.permute(&perm)
}

pub fn fourier_c0ar(f: &SchwartzC0ar, mu: &MeasureC0ar) -> Result<SchwartzC0ar> {
    if mu.obj != f.obj {
        return Err(Error::ParentMismatch("fourier_c0ar".into()));
    }
    Ok(SchwartzC0ar {
        obj: f.obj.dual(),
        cut: f.cut.dual(),
        t: transform(&f.obj, &f.t, mu.scale, false),
    })
}

/// Adjoint transform; `nu` is a measure on the dual object.
pub fn fourier_c0ar_dist(h: &DistC0ar, nu: &MeasureC0ar) -> Result<DistC0ar> {
    if nu.obj != h.obj.dual() {
        return Err(Error::ParentMismatch("fourier_c0ar_dist".into()));
    }
    Ok(DistC0ar {
        obj: h.obj.dual(),
        cut: h.cut.dual(),
        t: transform(&h.obj, &h.t, nu.scale, true),
    })
}

/// Integral of f against mu.
pub fn integral(f: &SchwartzC0ar, mu: &MeasureC0ar) -> C64 {
    let mut t = f.t.contract_axis(0, &vec![C64::new(1.0, 0.0); f.obj.a.order()]);
    for _ in 0..f.obj.r {
        t = t.contract_axis(0, &vec![C64::new(1.0, 0.0); t.dims[0]]);
    }
    for _ in 0..f.obj.p {
        let mut w = vec![C64::new(0.0, 0.0); t.dims[0]];
        w[f.cut.t_box as usize] = C64::new(1.0, 0.0);
        t = t.contract_axis(0, &w);
    }
    for _ in 0..f.obj.q {
        t = t.contract_axis(0, &integrals(f.cut.hermite));
    }
    t.data[0] * mu.scale
}

/// Group point for `translate`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Shift {
    pub a: Vec<i64>,
    pub z: Vec<i64>,
    pub t: Vec<f64>,
    pub r: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Translated {
    pub f: SchwartzC0ar,
    /// L2 norm lost when re-expanding R-coordinates at the stored cutoff.
    pub tolerance: f64,
}

/// (T_a f)(b) = f(b + a). Z-shifts pushing nonzero data out of the box and
/// R-shifts losing more than `max_loss` are errors.
pub fn translate(f: &SchwartzC0ar, s: &Shift, max_loss: f64) -> Result<Translated> {
    let o = &f.obj;
    if s.a.len() != o.a.rank() || s.z.len() != o.r || s.t.len() != o.p || s.r.len() != o.q {
        return Err(Error::ParentMismatch("shift shape".into()));
    }
    let table: Vec<usize> = (0..o.a.order())
        .map(|i| o.a.index_of(&o.a.add(&o.a.element(i), &s.a)))
        .collect();
    // new(x) = old(x + a): row x picks column x + a
    let mut t = finite_map(&f.t, &o.a, &table);
    for (k, &dz) in s.z.iter().enumerate() {
        let ax = 1 + k;
        let n = t.dims[ax];
        let zb = f.cut.z_box;
        let lost: Vec<C64> = (0..n)
            .map(|i| C64::new(((i as i64 - zb - dz).abs() > zb) as u8 as f64, 0.0))
            .collect();
        let outside: f64 = diag_axis(&t, ax, &lost).data.iter().map(|z| z.norm_sqr()).sum();
        if outside > 0.0 {
            return Err(Error::Cutoff(format!("Z shift by {dz} leaves the box |n| <= {zb}")));
        }
        let mat: Vec<Vec<C64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| C64::new((j as i64 == i as i64 + dz) as u8 as f64, 0.0))
                    .collect()
            })
            .collect();
        t = t.map_axis(ax, &mat);
    }
    for (k, &th) in s.t.iter().enumerate() {
        let ax = 1 + o.r + k;
        let d: Vec<C64> = (-f.cut.t_box..=f.cut.t_box)
            .map(|kk| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * kk as f64 * th))
            .collect();
        t = diag_axis(&t, ax, &d);
    }
    let mut tolerance: f64 = 0.0;
    for (k, &x0) in s.r.iter().enumerate() {
        let ax = 1 + o.r + o.p + k;
        let extra = 32;
        let m = shift_matrix(f.cut.hermite + extra, f.cut.hermite, x0);
        let mat: Vec<Vec<C64>> = m
            .iter()
            .map(|r| r.iter().map(|&v| C64::new(v, 0.0)).collect())
            .collect();
        let full = t.map_axis(ax, &mat);
        let keep: Vec<Vec<C64>> = (0..f.cut.hermite)
            .map(|i| (0..f.cut.hermite + extra).map(|j| C64::new((i == j) as u8 as f64, 0.0)).collect())
            .collect();
        let tail: Vec<C64> = (0..f.cut.hermite + extra)
            .map(|j| C64::new((j >= f.cut.hermite) as u8 as f64, 0.0))
            .collect();
        let lost: f64 = diag_axis(&full, ax, &tail).data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        t = full.map_axis(ax, &keep);
        tolerance = tolerance.max(lost);
    }
    if tolerance > max_loss {
        return Err(Error::Cutoff(format!(
            "R shift loses {tolerance:e} of L2 norm at degree cutoff {}",
            f.cut.hermite
        )));
    }
    Ok(Translated {
        f: SchwartzC0ar {
            obj: o.clone(),
            cut: f.cut,
            t,
        },
        tolerance,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticePoissonReport {
    pub lhs: C64,
    pub rhs: C64,
    pub n_terms: i64,
    pub max_deviation: f64,
}

/// Sum over Z of f(n) against sum over Z of (F f)(n) for f on R.
pub fn poisson_lattice_check(coeffs: &[C64], cut: &Cutoffs) -> Result<LatticePoissonReport> {
    if coeffs.len() > cut.hermite {
        return Err(Error::Cutoff(format!(
            "{} Hermite coefficients exceed cutoff {}",
            coeffs.len(),
            cut.hermite
        )));
    }
    if coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Invalid("non-decaying coefficient vector".into()));
    }
    let ft: Vec<C64> = coeffs.iter().enumerate().map(|(m, c)| c * eigenvalue(m)).collect();
    let eval = |c: &[C64], x: f64| -> C64 {
        hermite_all(c.len(), x).iter().zip(c).map(|(h, a)| a * h).sum()
    };
    let norm: f64 = coeffs.iter().map(|z| z.norm()).sum::<f64>().max(1e-300);
    // psi_m is negligible a few units past its turning point sqrt((2m+1)/(2 pi))
    let turn = ((2.0 * coeffs.len() as f64 + 1.0) / (2.0 * std::f64::consts::PI)).sqrt();
    let mut n = turn.ceil() as i64 + 2;
    loop {
        let tail = [n as f64, -(n as f64)]
            .iter()
            .map(|&x| eval(coeffs, x).norm() + eval(&ft, x).norm())
            .fold(0.0, f64::max);
        if tail < 1e-16 * norm || n > 64 {
            break;
        }
        n += 1;
    }
    let lhs: C64 = (-n..=n).map(|k| eval(coeffs, k as f64)).sum();
    let rhs: C64 = (-n..=n).map(|k| eval(&ft, k as f64)).sum();
    Ok(LatticePoissonReport {
        lhs,
        rhs,
        n_terms: n,
        max_deviation: (lhs - rhs).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small() -> Cutoffs {
        Cutoffs {
            hermite: 8,
            z_box: 3,
            t_box: 2,
        }
    }

    fn random(obj: &C0arObject, cut: &Cutoffs, seed: u64) -> SchwartzC0ar {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Tensor::zeros(obj.dims(cut));
        for z in t.data.iter_mut() {
            *z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        SchwartzC0ar::new(obj.clone(), *cut, t).unwrap()
    }

    #[test]
    fn gaussian_fixed_point() {
        let obj = C0arObject::new(FinAbGroup::trivial(), 0, 0, 1);
        let cut = Cutoffs::default();
        let mut f = SchwartzC0ar::zeros(&obj, &cut);
        f.t.data[0] = C64::new(1.0, 0.0);
        let g = fourier_c0ar(&f, &MeasureC0ar::canonical(&obj)).unwrap();
        assert_eq!(g.t, f.t);
        for y in [0.0, 0.7] {
            let q = hermite::transform_by_quadrature(0, y);
            assert!((g.eval(&[], &[], &[], &[y]) - q).norm() < 1e-10);
        }
    }

    #[test]
    fn circle_character_to_lattice_delta() {
        let obj = C0arObject::new(FinAbGroup::trivial(), 0, 1, 0);
        let cut = small();
        let mut f = SchwartzC0ar::zeros(&obj, &cut);
        f.t.data[(cut.t_box + 1) as usize] = C64::new(1.0, 0.0); // k = 1
        let g = fourier_c0ar(&f, &MeasureC0ar::canonical(&obj)).unwrap();
        assert_eq!(g.obj.r, 1);
        let want: Vec<f64> = (-cut.t_box..=cut.t_box).map(|n| (n == 1) as u8 as f64).collect();
        assert_eq!(g.t.data.iter().map(|z| z.re).collect::<Vec<_>>(), want);
    }

    #[test]
    fn lattice_delta_to_constant() {
        let obj = C0arObject::new(FinAbGroup::trivial(), 1, 0, 0);
        let cut = small();
        let mut f = SchwartzC0ar::zeros(&obj, &cut);
        f.t.data[cut.z_box as usize] = C64::new(1.0, 0.0);
        let g = fourier_c0ar(&f, &MeasureC0ar::canonical(&obj)).unwrap();
        for th in [0.0, 0.3, 0.71] {
            assert!((g.eval(&[], &[], &[th], &[]) - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn involution_on_random_tensors() {
        let obj = C0arObject::new(FinAbGroup::new(vec![2, 4]).unwrap(), 1, 1, 1);
        let cut = small();
        let f = random(&obj, &cut, 3);
        let mu = MeasureC0ar::new(&obj, C64::new(0.4, 1.3));
        let back = fourier_c0ar(&fourier_c0ar(&f, &mu).unwrap(), &mu.inverse().unwrap()).unwrap();
        assert!(back.max_dev(&f.check()) < 1e-9);
    }

    #[test]
    fn dist_transform_is_adjoint() {
        let obj = C0arObject::new(FinAbGroup::cyclic(3), 1, 1, 1);
        let cut = small();
        let dobj = obj.dual();
        let f = random(&dobj, &cut.dual(), 5);
        let h = DistC0ar::new(obj.clone(), cut, random(&obj, &cut, 6).t).unwrap();
        let nu = MeasureC0ar::new(&dobj, C64::new(0.3, -0.2));
        let mu_on_dual = MeasureC0ar::new(&dobj, nu.scale);
        let lhs = fourier_c0ar_dist(&h, &nu).unwrap().pair(&f).unwrap();
        let rhs = h.pair(&fourier_c0ar(&f, &mu_on_dual).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn translate_examples() {
        let obj = C0arObject::new(FinAbGroup::trivial(), 1, 1, 0);
        let cut = small();
        let f = random(&obj, &cut, 9);
        let z = Shift { a: vec![], z: vec![0], t: vec![0.0], r: vec![] };
        assert_eq!(translate(&f, &z, 0.0).unwrap().f, f);

        let tobj = C0arObject::new(FinAbGroup::trivial(), 0, 1, 0);
        let mut e1 = SchwartzC0ar::zeros(&tobj, &cut);
        e1.t.data[(cut.t_box + 1) as usize] = C64::new(1.0, 0.0);
        let half = Shift { a: vec![], z: vec![], t: vec![0.5], r: vec![] };
        let g = translate(&e1, &half, 0.0).unwrap().f;
        for th in [0.0, 0.2] {
            let want = e1.eval(&[], &[], &[th + 0.5], &[]);
            assert!((g.eval(&[], &[], &[th], &[]) - want).norm() < 1e-14);
            assert!((want + e1.eval(&[], &[], &[th], &[])).norm() < 1e-14);
        }

        let zobj = C0arObject::new(FinAbGroup::trivial(), 1, 0, 0);
        let mut d0 = SchwartzC0ar::zeros(&zobj, &cut);
        d0.t.data[cut.z_box as usize] = C64::new(1.0, 0.0);
        // f(n + a) with a = -1 moves delta_0 to delta_1
        let g = translate(&d0, &Shift { a: vec![], z: vec![-1], t: vec![], r: vec![] }, 0.0).unwrap().f;
        assert_eq!(g.t.data[(cut.z_box + 1) as usize], C64::new(1.0, 0.0));
        let far = Shift { a: vec![], z: vec![-(cut.z_box + 1)], t: vec![], r: vec![] };
        assert!(matches!(translate(&d0, &far, 0.0), Err(Error::Cutoff(_))));
    }

    #[test]
    fn r_translation_matches_evaluation() {
        let obj = C0arObject::new(FinAbGroup::trivial(), 0, 0, 1);
        let cut = Cutoffs::default();
        let mut f = SchwartzC0ar::zeros(&obj, &cut);
        f.t.data[0] = C64::new(1.0, 0.0);
        f.t.data[2] = C64::new(0.5, 0.0);
        let g = translate(&f, &Shift { a: vec![], z: vec![], t: vec![], r: vec![0.3] }, 1e-6).unwrap();
        assert!(g.tolerance < 1e-6);
        for x in [-0.5, 0.0, 0.8] {
            let want = f.eval(&[], &[], &[], &[x + 0.3]);
            assert!((g.f.eval(&[], &[], &[], &[x]) - want).norm() < 1e-8);
        }
    }

    #[test]
    fn haar_invariance() {
        let obj = C0arObject::new(FinAbGroup::cyclic(4), 1, 1, 1);
        let cut = Cutoffs { hermite: 32, z_box: 6, t_box: 3 };
        let mut f = SchwartzC0ar::zeros(&obj, &cut);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        // data confined to |n| <= 2 so Z shifts stay inside the box
        let dims = f.t.dims.clone();
        for (i, z) in f.t.data.iter_mut().enumerate() {
            let n = (i / (dims[2] * dims[3])) % dims[1];
            let m = i % dims[3];
            if (n as i64 - cut.z_box).abs() <= 2 && m < 4 {
                *z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let mu = MeasureC0ar::canonical(&obj);
        let base = integral(&f, &mu);
        let s = Shift { a: vec![3], z: vec![2], t: vec![0.37], r: vec![0.0] };
        let exact = integral(&translate(&f, &s, 1e-12).unwrap().f, &mu);
        assert!((exact - base).norm() < 1e-12);
        let s = Shift { a: vec![0], z: vec![0], t: vec![0.0], r: vec![0.25] };
        let moved = integral(&translate(&f, &s, 1e-6).unwrap().f, &mu);
        assert!((moved - base).norm() < 1e-8);
    }

    #[test]
    fn lattice_poisson_examples() {
        let cut = Cutoffs::default();
        let r = poisson_lattice_check(&[C64::new(1.0, 0.0)], &cut).unwrap();
        assert!(r.max_deviation <= 1e-10);
        // direct sum of 2^{1/4} e^{-pi n^2}
        let direct: f64 = (-20..=20).map(|n: i64| 2f64.powf(0.25) * (-std::f64::consts::PI * (n * n) as f64).exp()).sum();
        assert!((r.lhs.re - direct).abs() < 1e-12);
        let r = poisson_lattice_check(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)], &cut).unwrap();
        assert!(r.max_deviation <= 1e-10);
        let r = poisson_lattice_check(&[], &cut).unwrap();
        assert_eq!(r.lhs, C64::new(0.0, 0.0));
        assert!(poisson_lattice_check(&[C64::new(f64::NAN, 0.0)], &cut).is_err());
    }
}

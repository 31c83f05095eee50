//! Complex tables on (Z/q)^labels, dense or as sums of tensor products.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::filt2::Label;
use crate::finabel::fft::dft_axis;
use crate::par::Exec;
use crate::{Error, IMat, Result, C64};

/// Largest dense table built implicitly.
pub const DENSE_MAX: usize = 1 << 22;

const PROBE_POINTS: usize = 96;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpTerm {
    pub w: C64,
    /// One factor of length q per label.
    pub f: Vec<Vec<C64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TableData {
    Dense(Vec<C64>),
    Cp(Vec<CpTerm>),
}

/// Function on (Z/q)^n with one axis per label, labels sorted by (b, a).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub q: usize,
    pub labels: Vec<Label>,
    pub data: TableData,
}

fn key(l: &Label) -> (i64, i64) {
    (l.1, l.0)
}

pub fn sort_labels(v: &mut Vec<Label>) {
    v.sort_by_key(key);
    v.dedup();
}

fn size(q: usize, n: usize) -> Option<usize> {
    q.checked_pow(n as u32)
}

fn strides(q: usize, n: usize) -> Vec<usize> {
    let mut s = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        s[k] = s[k + 1] * q;
    }
    s
}

fn digits(mut idx: usize, q: usize, out: &mut [usize]) {
    for d in out.iter_mut().rev() {
        *d = idx % q;
        idx /= q;
    }
}

fn inv_mod(c: i64, q: usize) -> Result<usize> {
    let q = q as i64;
    let c = c.rem_euclid(q);
    (1..q)
        .find(|y| (c * y) % q == 1)
        .map(|y| y as usize)
        .ok_or_else(|| Error::Invalid(format!("{c} is not invertible mod {q}")))
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

impl Table {
    pub fn dense(q: usize, mut labels: Vec<Label>, data: Vec<C64>) -> Result<Self> {
        let n0 = labels.len();
        sort_labels(&mut labels);
        if labels.len() != n0 {
            return Err(Error::Invalid("repeated label".into()));
        }
        if size(q, labels.len()) != Some(data.len()) {
            return Err(Error::Invalid("table length does not match labels".into()));
        }
        Ok(Self { q, labels, data: TableData::Dense(data) })
    }

    /// Sum of w · ⊗ f, factors given in the order of `labels` (sorted on entry).
    pub fn cp(q: usize, labels: Vec<Label>, terms: Vec<CpTerm>) -> Result<Self> {
        let mut idx: Vec<usize> = (0..labels.len()).collect();
        idx.sort_by_key(|&k| key(&labels[k]));
        let sorted: Vec<Label> = idx.iter().map(|&k| labels[k]).collect();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("repeated label".into()));
        }
        let mut out = vec![];
        for t in terms {
            if t.f.len() != labels.len() || t.f.iter().any(|f| f.len() != q) {
                return Err(Error::Invalid("factor shape does not match labels".into()));
            }
            out.push(CpTerm { w: t.w, f: idx.iter().map(|&k| t.f[k].clone()).collect() });
        }
        Ok(Self { q, labels: sorted, data: TableData::Cp(out) })
    }

    pub fn constant(q: usize, mut labels: Vec<Label>, c: C64) -> Self {
        sort_labels(&mut labels);
        let f = vec![vec![one(); q]; labels.len()];
        Self { q, labels, data: TableData::Cp(vec![CpTerm { w: c, f }]) }
    }

    /// Indicator of the point 0.
    pub fn delta(q: usize, mut labels: Vec<Label>, c: C64) -> Self {
        sort_labels(&mut labels);
        let mut d = vec![zero(); q];
        d[0] = one();
        let f = vec![d; labels.len()];
        Self { q, labels, data: TableData::Cp(vec![CpTerm { w: c, f }]) }
    }

    /// Indicator of the coordinate subgroup where the `zero` labels vanish.
    pub fn subgroup_indicator(q: usize, mut labels: Vec<Label>, zero_on: &dyn Fn(Label) -> bool) -> Self {
        sort_labels(&mut labels);
        let mut d = vec![zero(); q];
        d[0] = one();
        let f = labels.iter().map(|l| if zero_on(*l) { d.clone() } else { vec![one(); q] }).collect();
        Self { q, labels, data: TableData::Cp(vec![CpTerm { w: one(), f }]) }
    }

    /// Seeded random table, dense when small, otherwise of the given rank.
    pub fn random(q: usize, mut labels: Vec<Label>, rank: usize, seed: u64) -> Self {
        sort_labels(&mut labels);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        match size(q, labels.len()) {
            Some(s) if s <= 4096 => {
                let data = (0..s).map(|_| c()).collect();
                Self { q, labels, data: TableData::Dense(data) }
            }
            _ => {
                let n = labels.len();
                let terms = (0..rank.max(1))
                    .map(|_| CpTerm { w: c(), f: (0..n).map(|_| (0..q).map(|_| c()).collect()).collect() })
                    .collect();
                Self { q, labels, data: TableData::Cp(terms) }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Number of points, if representable.
    pub fn len(&self) -> Option<usize> {
        size(self.q, self.n())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.data, TableData::Dense(_))
    }

    pub fn rank(&self) -> usize {
        match &self.data {
            TableData::Dense(_) => 1,
            TableData::Cp(t) => t.len(),
        }
    }

    fn pos(&self) -> BTreeMap<Label, usize> {
        self.labels.iter().enumerate().map(|(k, l)| (*l, k)).collect()
    }

    pub fn to_dense(&self) -> Result<Self> {
        let terms = match &self.data {
            TableData::Dense(_) => return Ok(self.clone()),
            TableData::Cp(t) => t,
        };
        let len = self.len().filter(|&s| s <= DENSE_MAX).ok_or_else(|| {
            Error::Cutoff(format!("dense table of {}^{} points", self.q, self.n()))
        })?;
        let (q, n) = (self.q, self.n());
        let data = Exec::current().map_range(len, |idx| {
            let mut d = vec![0usize; n];
            digits(idx, q, &mut d);
            terms.iter().map(|t| t.f.iter().zip(&d).fold(t.w, |acc, (f, &x)| acc * f[x])).sum()
        });
        Ok(Self { q, labels: self.labels.clone(), data: TableData::Dense(data) })
    }

    pub fn dense_data(&self) -> Result<Vec<C64>> {
        match self.to_dense()?.data {
            TableData::Dense(v) => Ok(v),
            TableData::Cp(_) => unreachable!(),
        }
    }

    /// Rebuilds a dense table over `dst` from a rule on destination digits.
    fn gather(&self, dst: Vec<Label>, rule: impl Fn(&[usize]) -> C64 + Sync + Send) -> Result<Self> {
        let len = size(self.q, dst.len())
            .filter(|&s| s <= DENSE_MAX)
            .ok_or_else(|| Error::Cutoff(format!("dense table of {}^{} points", self.q, dst.len())))?;
        let (q, n) = (self.q, dst.len());
        let data = Exec::current().map_range(len, |idx| {
            let mut d = vec![0usize; n];
            digits(idx, q, &mut d);
            rule(&d)
        });
        Ok(Self { q, labels: dst, data: TableData::Dense(data) })
    }

    fn split(&self, drop: &[Label]) -> (Vec<Label>, Vec<usize>, Vec<usize>) {
        let kept: Vec<usize> = (0..self.n()).filter(|&k| !drop.contains(&self.labels[k])).collect();
        let gone: Vec<usize> = (0..self.n()).filter(|&k| drop.contains(&self.labels[k])).collect();
        (kept.iter().map(|&k| self.labels[k]).collect(), kept, gone)
    }

    fn reduce(&self, drop: &[Label], sum: bool) -> Result<Self> {
        let (dst, kept, gone) = self.split(drop);
        if gone.is_empty() {
            return Ok(self.clone());
        }
        match &self.data {
            TableData::Cp(terms) => {
                let terms = terms
                    .iter()
                    .map(|t| {
                        let w = gone.iter().fold(t.w, |acc, &k| acc * if sum { t.f[k].iter().sum() } else { t.f[k][0] });
                        CpTerm { w, f: kept.iter().map(|&k| t.f[k].clone()).collect() }
                    })
                    .collect();
                Ok(Self { q: self.q, labels: dst, data: TableData::Cp(terms) })
            }
            TableData::Dense(src) => {
                let st = strides(self.q, self.n());
                let q = self.q;
                let mut offs = vec![0usize];
                if sum {
                    for &k in &gone {
                        let sk = st[k];
                        offs = offs.iter().flat_map(|&o| (0..q).map(move |x| o + x * sk)).collect();
                    }
                }
                let kst: Vec<usize> = kept.iter().map(|&k| st[k]).collect();
                self.gather(dst, move |d| {
                    let base: usize = d.iter().zip(&kst).map(|(x, s)| x * s).sum();
                    offs.iter().map(|o| src[base + o]).sum()
                })
            }
        }
    }

    /// Sums over the listed coordinates (missing labels ignored).
    pub fn sum_out(&self, drop: &[Label]) -> Result<Self> {
        self.reduce(drop, true)
    }

    /// Restricts to the listed coordinates being 0.
    pub fn restrict_zero(&self, drop: &[Label]) -> Result<Self> {
        self.reduce(drop, false)
    }

    fn grow(&self, add: &[Label], constant: bool) -> Result<Self> {
        let mut add: Vec<Label> = add.iter().copied().filter(|l| !self.labels.contains(l)).collect();
        sort_labels(&mut add);
        if add.is_empty() {
            return Ok(self.clone());
        }
        let mut dst = self.labels.clone();
        dst.extend(&add);
        sort_labels(&mut dst);
        let old = self.pos();
        let q = self.q;
        match &self.data {
            TableData::Cp(terms) => {
                let mut d = vec![zero(); q];
                d[0] = one();
                let fresh = if constant { vec![one(); q] } else { d };
                let terms = terms
                    .iter()
                    .map(|t| CpTerm {
                        w: t.w,
                        f: dst.iter().map(|l| old.get(l).map_or(fresh.clone(), |&k| t.f[k].clone())).collect(),
                    })
                    .collect();
                Ok(Self { q, labels: dst, data: TableData::Cp(terms) })
            }
            TableData::Dense(src) => {
                let st = strides(q, self.n());
                let map: Vec<Option<usize>> = dst.iter().map(|l| old.get(l).map(|&k| st[k])).collect();
                self.gather(dst, move |d| {
                    let mut base = 0;
                    for (x, m) in d.iter().zip(&map) {
                        match m {
                            Some(s) => base += x * s,
                            None if !constant && *x != 0 => return zero(),
                            None => {}
                        }
                    }
                    src[base]
                })
            }
        }
    }

    /// Adds coordinates on which the table is constant.
    pub fn inflate(&self, add: &[Label]) -> Result<Self> {
        self.grow(add, true)
    }

    /// Adds coordinates, extending by zero off 0.
    pub fn extend_zero(&self, add: &[Label]) -> Result<Self> {
        self.grow(add, false)
    }

    /// T'(y) = T(x) where y_{f(l)} = c · x_l.
    pub fn relabel(&self, f: &dyn Fn(Label) -> Label, c: i64) -> Result<Self> {
        let q = self.q;
        let cinv = inv_mod(c, q)?;
        let mut dst: Vec<Label> = self.labels.iter().map(|l| f(*l)).collect();
        sort_labels(&mut dst);
        if dst.len() != self.n() {
            return Err(Error::Invalid("relabelling is not injective".into()));
        }
        let newpos: BTreeMap<Label, usize> = dst.iter().enumerate().map(|(k, l)| (*l, k)).collect();
        let to: Vec<usize> = self.labels.iter().map(|l| newpos[&f(*l)]).collect();
        match &self.data {
            TableData::Cp(terms) => {
                let terms = terms
                    .iter()
                    .map(|t| {
                        let mut g = vec![vec![]; t.f.len()];
                        for (k, fk) in t.f.iter().enumerate() {
                            g[to[k]] = (0..q).map(|y| fk[(y * cinv) % q]).collect();
                        }
                        CpTerm { w: t.w, f: g }
                    })
                    .collect();
                Ok(Self { q, labels: dst, data: TableData::Cp(terms) })
            }
            TableData::Dense(src) => {
                let st = strides(q, self.n());
                // source stride for each destination axis
                let mut sst = vec![0usize; self.n()];
                for (k, &t) in to.iter().enumerate() {
                    sst[t] = st[k];
                }
                self.gather(dst, move |d| {
                    let idx: usize = d.iter().zip(&sst).map(|(y, s)| ((y * cinv) % q) * s).sum();
                    src[idx]
                })
            }
        }
    }

    /// x -> -x.
    pub fn reflect(&self) -> Result<Self> {
        self.relabel(&|l| l, -1)
    }

    /// T'(y) = T(M y) with M of shape labels × dst.
    pub fn pullback(&self, mut dst: Vec<Label>, m: &IMat) -> Result<Self> {
        let q = self.q;
        let n0 = dst.len();
        let mut idx: Vec<usize> = (0..n0).collect();
        idx.sort_by_key(|&k| key(&dst[k]));
        let m: IMat = m.iter().map(|row| idx.iter().map(|&k| row[k].rem_euclid(q as i64)).collect()).collect();
        sort_labels(&mut dst);
        if dst.len() != n0 || m.len() != self.n() || m.iter().any(|r| r.len() != n0) {
            return Err(Error::Invalid("pullback matrix shape".into()));
        }
        // monomial matrices keep the tensor structure
        let monomial = n0 == self.n()
            && m.iter().all(|r| r.iter().filter(|&&x| x != 0).count() == 1)
            && (0..n0).all(|c| m.iter().filter(|r| r[c] != 0).count() == 1);
        if let (TableData::Cp(terms), true) = (&self.data, monomial) {
            let terms = terms
                .iter()
                .map(|t| {
                    let mut g = vec![vec![]; n0];
                    for (r, row) in m.iter().enumerate() {
                        let c = row.iter().position(|&x| x != 0).unwrap();
                        let s = row[c] as usize;
                        g[c] = (0..q).map(|y| t.f[r][(y * s) % q]).collect();
                    }
                    CpTerm { w: t.w, f: g }
                })
                .collect();
            return Ok(Self { q, labels: dst, data: TableData::Cp(terms) });
        }
        let dense = self.to_dense()?;
        let src = match &dense.data {
            TableData::Dense(v) => v,
            TableData::Cp(_) => unreachable!(),
        };
        let st = strides(q, self.n());
        self.gather(dst, move |d| {
            let mut idx = 0;
            for (r, row) in m.iter().enumerate() {
                let x: usize = row.iter().zip(d).map(|(&a, &y)| a as usize * y).sum::<usize>() % q;
                idx += x * st[r];
            }
            src[idx]
        })
    }

    /// Unnormalized DFT Σ_x T(x) exp(-2πi x·y / q) along every axis.
    pub fn dft(&self) -> Result<Self> {
        let q = self.q;
        match &self.data {
            TableData::Cp(terms) => {
                let dims = [q];
                let terms = Exec::current().map(terms.clone(), |mut t| {
                    for f in t.f.iter_mut() {
                        dft_axis(&dims, f, 0, true, Exec::Sequential);
                    }
                    t
                });
                Ok(Self { q, labels: self.labels.clone(), data: TableData::Cp(terms) })
            }
            TableData::Dense(v) => {
                let dims = vec![q; self.n()];
                let mut v = v.clone();
                for a in 0..self.n() {
                    dft_axis(&dims, &mut v, a, true, Exec::current());
                }
                Ok(Self { q, labels: self.labels.clone(), data: TableData::Dense(v) })
            }
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        let data = match &self.data {
            TableData::Dense(v) => TableData::Dense(v.iter().map(|z| z * c).collect()),
            TableData::Cp(t) => TableData::Cp(t.iter().map(|x| CpTerm { w: x.w * c, f: x.f.clone() }).collect()),
        };
        Self { q: self.q, labels: self.labels.clone(), data }
    }

    pub fn conj(&self) -> Self {
        let data = match &self.data {
            TableData::Dense(v) => TableData::Dense(v.iter().map(|z| z.conj()).collect()),
            TableData::Cp(t) => TableData::Cp(
                t.iter().map(|x| CpTerm { w: x.w.conj(), f: x.f.iter().map(|r| r.iter().map(|z| z.conj()).collect()).collect() }).collect(),
            ),
        };
        Self { q: self.q, labels: self.labels.clone(), data }
    }

    fn check_same(&self, o: &Self) -> Result<()> {
        if self.q != o.q || self.labels != o.labels {
            return Err(Error::ParentMismatch("tables on different coordinates".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        match (&self.data, &o.data) {
            (TableData::Cp(a), TableData::Cp(b)) => {
                let mut t = a.clone();
                t.extend(b.iter().cloned());
                Ok(Self { q: self.q, labels: self.labels.clone(), data: TableData::Cp(t) })
            }
            _ => {
                let (a, b) = (self.dense_data()?, o.dense_data()?);
                Ok(Self {
                    q: self.q,
                    labels: self.labels.clone(),
                    data: TableData::Dense(a.iter().zip(&b).map(|(x, y)| x + y).collect()),
                })
            }
        }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(C64::new(-1.0, 0.0)))
    }

    /// Value at a point given by digits in label order.
    pub fn eval(&self, x: &[usize]) -> C64 {
        match &self.data {
            TableData::Dense(v) => {
                let idx = x.iter().fold(0usize, |acc, &d| acc * self.q + d);
                v[idx]
            }
            TableData::Cp(t) => t.iter().map(|c| c.f.iter().zip(x).fold(c.w, |acc, (f, &d)| acc * f[d])).sum(),
        }
    }

    /// Σ_x T(x) U(x).
    pub fn pair(&self, o: &Self) -> Result<C64> {
        self.check_same(o)?;
        let q = self.q;
        let n = self.n();
        match (&self.data, &o.data) {
            (TableData::Dense(a), TableData::Dense(b)) => Ok(a.iter().zip(b).map(|(x, y)| x * y).sum()),
            (TableData::Cp(a), TableData::Cp(b)) => Ok(a
                .iter()
                .flat_map(|s| b.iter().map(move |t| (s, t)))
                .map(|(s, t)| {
                    s.f.iter()
                        .zip(&t.f)
                        .fold(s.w * t.w, |acc, (f, g)| acc * f.iter().zip(g).map(|(x, y)| x * y).sum::<C64>())
                })
                .sum()),
            (TableData::Dense(d), TableData::Cp(c)) | (TableData::Cp(c), TableData::Dense(d)) => {
                let parts = Exec::current().map_range(d.len(), |idx| {
                    let mut x = vec![0usize; n];
                    digits(idx, q, &mut x);
                    let v: C64 = c.iter().map(|t| t.f.iter().zip(&x).fold(t.w, |acc, (f, &k)| acc * f[k])).sum();
                    v * d[idx]
                });
                Ok(parts.into_iter().sum())
            }
        }
    }

    /// Σ_x T(x).
    pub fn total(&self) -> C64 {
        match &self.data {
            TableData::Dense(v) => v.iter().sum(),
            TableData::Cp(t) => t.iter().map(|c| c.f.iter().fold(c.w, |acc, f| acc * f.iter().sum::<C64>())).sum(),
        }
    }

    /// Maximal pointwise deviation: exact when a dense table fits, otherwise
    /// the maximum over seeded point evaluations and subgroup averages.
    pub fn max_dev(&self, o: &Self) -> f64 {
        if self.check_same(o).is_err() {
            return f64::INFINITY;
        }
        if let (Ok(a), Ok(b)) = (self.dense_data(), o.dense_data()) {
            return a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        }
        let diff = match self.sub(o) {
            Ok(d) => d,
            Err(_) => return f64::INFINITY,
        };
        let (q, n) = (self.q, self.n());
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut points = vec![vec![0usize; n]];
        for _ in 0..PROBE_POINTS {
            points.push((0..n).map(|_| rng.gen_range(0..q)).collect());
        }
        let mut dev = Exec::current()
            .map(points, |x| diff.eval(&x).norm())
            .into_iter()
            .fold(0.0, f64::max);
        let rows: Vec<i64> = {
            let mut r: Vec<i64> = self.labels.iter().map(|l| l.1).collect();
            r.dedup();
            r
        };
        let cols: Vec<i64> = {
            let mut c: Vec<i64> = self.labels.iter().map(|l| l.0).collect();
            c.sort();
            c.dedup();
            c
        };
        for &b0 in &rows {
            for &a0 in &cols {
                let h = Table::subgroup_indicator(q, self.labels.clone(), &|l| l.1 < b0 || l.0 < a0);
                let free = self.labels.iter().filter(|l| l.1 >= b0 && l.0 >= a0).count();
                let avg = diff.pair(&h).unwrap_or(C64::new(f64::INFINITY, 0.0)) / (q as f64).powi(free as i32);
                dev = dev.max(avg.norm());
            }
        }
        dev
    }

    /// Largest absolute value, exact for dense tables and probed otherwise.
    pub fn norm_max(&self) -> f64 {
        let z = self.scale(zero());
        self.max_dev(&z)
    }
}

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::fft::dft_all;
use super::group::FinAbGroup;
use crate::par::Exec;
use crate::{Error, Result, C64};

/// Complex function on a finite abelian group, indexed like the group.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionC0 {
    pub group: FinAbGroup,
    pub table: Vec<C64>,
}

/// Distribution acting by f -> sum kernel(x) f(x).
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionC0 {
    pub group: FinAbGroup,
    pub kernel: Vec<C64>,
}

/// c times counting measure.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureC0 {
    pub group: FinAbGroup,
    pub scale: C64,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    group: FinAbGroup,
    re: Vec<f64>,
    im: Vec<f64>,
}

fn to_json(group: &FinAbGroup, t: &[C64]) -> TableJson {
    TableJson {
        group: group.clone(),
        re: t.iter().map(|z| z.re).collect(),
        im: t.iter().map(|z| z.im).collect(),
    }
}

fn from_json(j: TableJson) -> std::result::Result<(FinAbGroup, Vec<C64>), String> {
    if j.re.len() != j.group.order() || j.im.len() != j.group.order() {
        return Err("table length must equal group order".into());
    }
    let t = j.re.iter().zip(&j.im).map(|(a, b)| C64::new(*a, *b)).collect();
    Ok((j.group, t))
}

impl Serialize for FunctionC0 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_json(&self.group, &self.table).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FunctionC0 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (group, table) = from_json(TableJson::deserialize(d)?).map_err(serde::de::Error::custom)?;
        Ok(Self { group, table })
    }
}

impl Serialize for DistributionC0 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_json(&self.group, &self.kernel).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DistributionC0 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (group, kernel) = from_json(TableJson::deserialize(d)?).map_err(serde::de::Error::custom)?;
        Ok(Self { group, kernel })
    }
}

impl FunctionC0 {
    pub fn new(group: FinAbGroup, table: Vec<C64>) -> Result<Self> {
        if table.len() != group.order() {
            return Err(Error::ParentMismatch("table length".into()));
        }
        if table.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Invalid("non-finite entry".into()));
        }
        Ok(Self { group, table })
    }

    pub fn zeros(group: &FinAbGroup) -> Self {
        Self {
            group: group.clone(),
            table: vec![C64::new(0.0, 0.0); group.order()],
        }
    }

    pub fn constant(group: &FinAbGroup, c: C64) -> Self {
        Self {
            group: group.clone(),
            table: vec![c; group.order()],
        }
    }

    pub fn delta(group: &FinAbGroup, x: &[i64]) -> Self {
        let mut f = Self::zeros(group);
        f.table[group.index_of(x)] = C64::new(1.0, 0.0);
        f
    }

    /// f(-x)
    pub fn check(&self) -> Self {
        let neg = self.group.negation_table();
        Self {
            group: self.group.clone(),
            table: neg.iter().map(|&j| self.table[j]).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            group: self.group.clone(),
            table: self.table.iter().map(|z| z * c).collect(),
        }
    }

    pub fn max_dev(&self, other: &Self) -> f64 {
        max_dev(&self.table, &other.table)
    }
}

impl DistributionC0 {
    pub fn new(group: FinAbGroup, kernel: Vec<C64>) -> Result<Self> {
        if kernel.len() != group.order() {
            return Err(Error::ParentMismatch("kernel length".into()));
        }
        Ok(Self { group, kernel })
    }

    pub fn zeros(group: &FinAbGroup) -> Self {
        Self {
            group: group.clone(),
            kernel: vec![C64::new(0.0, 0.0); group.order()],
        }
    }

    /// The measure mu viewed as a distribution.
    pub fn from_measure(mu: &MeasureC0) -> Self {
        Self {
            group: mu.group.clone(),
            kernel: vec![mu.scale; mu.group.order()],
        }
    }

    pub fn check(&self) -> Self {
        let neg = self.group.negation_table();
        Self {
            group: self.group.clone(),
            kernel: neg.iter().map(|&j| self.kernel[j]).collect(),
        }
    }

    pub fn pair(&self, f: &FunctionC0) -> Result<C64> {
        if f.group != self.group {
            return Err(Error::ParentMismatch("pairing".into()));
        }
        Ok(self.kernel.iter().zip(&f.table).map(|(a, b)| a * b).sum())
    }

    pub fn max_dev(&self, other: &Self) -> f64 {
        max_dev(&self.kernel, &other.kernel)
    }
}

impl MeasureC0 {
    pub fn counting(group: &FinAbGroup) -> Self {
        Self {
            group: group.clone(),
            scale: C64::new(1.0, 0.0),
        }
    }

    pub fn new(group: &FinAbGroup, scale: C64) -> Self {
        Self {
            group: group.clone(),
            scale,
        }
    }

    /// Normalized measure of total mass one.
    pub fn probability(group: &FinAbGroup) -> Self {
        Self::new(group, C64::new(1.0 / group.order() as f64, 0.0))
    }

    /// The element of the dual line with mu (x) mu^{-1} = 1; the pairing of
    /// a*counting and b*counting(dual) is a*b*|G|.
    pub fn inverse(&self) -> Result<MeasureC0> {
        if self.scale.norm() == 0.0 {
            return Err(Error::ZeroMeasure);
        }
        Ok(Self {
            group: self.group.dual(),
            scale: 1.0 / (self.scale * self.group.order() as f64),
        })
    }
}

pub fn max_dev(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn transform(group: &FinAbGroup, t: &[C64], c: C64, exec: Exec) -> Vec<C64> {
    let dims: Vec<usize> = group.moduli().iter().map(|&d| d as usize).collect();
    let mut data: Vec<C64> = t.iter().map(|z| z * c).collect();
    dft_all(&dims, &mut data, true, exec);
    data
}

/// F_mu(f)(chi) = c * sum_x f(x) conj(chi(x)).
pub fn fourier_c0(f: &FunctionC0, mu: &MeasureC0) -> Result<FunctionC0> {
    fourier_c0_with(f, mu, Exec::default())
}

pub fn fourier_c0_with(f: &FunctionC0, mu: &MeasureC0, exec: Exec) -> Result<FunctionC0> {
    if f.group != mu.group {
        return Err(Error::ParentMismatch("fourier_c0".into()));
    }
    Ok(FunctionC0 {
        group: f.group.dual(),
        table: transform(&f.group, &f.table, mu.scale, exec),
    })
}

/// Adjoint of `fourier_c0`: <F(H), f> = <H, F(f)>; nu lives on the dual group.
pub fn fourier_c0_dist(h: &DistributionC0, nu: &MeasureC0) -> Result<DistributionC0> {
    if nu.group != h.group.dual() {
        return Err(Error::ParentMismatch("fourier_c0_dist".into()));
    }
    Ok(DistributionC0 {
        group: h.group.dual(),
        kernel: transform(&h.group, &h.kernel, nu.scale, Exec::default()),
    })
}

//! Virtual measures μ(F(i)|F(j)) as scalars against reference bases b_{ij}.
//!
//! For i <= j, b_{ij} is the Haar measure on F(j)/F(i) giving the
//! Λ_{k_ref}-part volume 1; b_{ji} = b_{ij}^{-1}.

use serde::{Deserialize, Serialize};

use crate::filt2::{check_aut, Automorphism2, Coeff, FilteredObject2};
use crate::{Error, Result, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VirtualMeasure {
    pub parent: FilteredObject2,
    pub i: i64,
    pub j: i64,
    pub scalar: C64,
}

pub(crate) fn check_index(e: &FilteredObject2, i: i64) -> Result<()> {
    let (lo, hi) = e.outer_window();
    if i < lo || i > hi {
        return Err(Error::Invalid(format!("index {i} outside [{lo}, {hi}]")));
    }
    Ok(())
}

/// b_{ij}-volume of the Λ_k-part of F(j)/F(i), inverted when i > j.
pub fn kappa(e: &FilteredObject2, i: i64, j: i64, k: i64) -> f64 {
    match e.coeff {
        Coeff::Real => 1.0,
        Coeff::Fq(q) => (q as f64).powi(kappa_exp(e, i, j, k) as i32),
    }
}

/// log_q of [`kappa`] for finite coefficients.
pub fn kappa_exp(e: &FilteredObject2, i: i64, j: i64, k: i64) -> i64 {
    if i > j {
        return -kappa_exp(e, j, i, k);
    }
    let kr = e.k_ref;
    let mut ex = 0i64;
    for &(a, b) in e.labels() {
        if b < -j || b > -i - 1 {
            continue;
        }
        if a >= -kr && a <= -k - 1 {
            ex -= 1;
        }
        if a >= -k && a <= -kr - 1 {
            ex += 1;
        }
    }
    ex
}

impl VirtualMeasure {
    pub fn new(parent: &FilteredObject2, i: i64, j: i64, scalar: C64) -> Result<Self> {
        check_index(parent, i)?;
        check_index(parent, j)?;
        if scalar == C64::new(0.0, 0.0) {
            return Err(Error::ZeroMeasure);
        }
        Ok(Self { parent: parent.clone(), i, j, scalar })
    }

    /// b_{ij} itself.
    pub fn basis(parent: &FilteredObject2, i: i64, j: i64) -> Result<Self> {
        Self::new(parent, i, j, C64::new(1.0, 0.0))
    }

    pub fn identity(parent: &FilteredObject2, i: i64) -> Result<Self> {
        Self::basis(parent, i, i)
    }

    pub fn compose_gamma(&self, other: &Self) -> Result<Self> {
        if self.parent != other.parent {
            return Err(Error::ParentMismatch("virtual measures on different objects".into()));
        }
        if self.j != other.i {
            return Err(Error::Invalid(format!("index mismatch: {} vs {}", self.j, other.i)));
        }
        Ok(Self { parent: self.parent.clone(), i: self.i, j: other.j, scalar: self.scalar * other.scalar })
    }

    pub fn invert(&self) -> Self {
        Self { parent: self.parent.clone(), i: self.j, j: self.i, scalar: self.scalar.inv() }
    }

    pub fn scale(&self, c: C64) -> Result<Self> {
        Self::new(&self.parent, self.i, self.j, self.scalar * c)
    }

    pub fn max_dev(&self, other: &Self) -> f64 {
        if self.parent != other.parent || (self.i, self.j) != (other.i, other.j) {
            return f64::INFINITY;
        }
        (self.scalar - other.scalar).norm()
    }

    /// Mass of this measure (i <= j) on the Λ_k-part of F(j)/F(i).
    pub fn volume_of_inner(&self, k: i64) -> C64 {
        self.scalar * kappa(&self.parent, self.i, self.j, k)
    }
}

/// 1_{ij}: the quotient F(j)/F(i) is compact and gets total mass 1.
pub fn canonical_one(e: &FilteredObject2, i: i64, j: i64) -> Result<VirtualMeasure> {
    if !e.predicates().cf {
        return Err(Error::Hypothesis("cf".into()));
    }
    let (_, khi) = e.inner_window();
    let rows = (Some(-i.max(j)), Some(-i.min(j) - 1));
    if e.coeff != Coeff::Real && !e.rows_low_inside(rows, khi) {
        return Err(Error::Cutoff(format!("rows of F({})/F({}) leave the box in the u^-1 direction", i.max(j), i.min(j))));
    }
    VirtualMeasure::new(e, i, j, C64::new(1.0 / kappa(e, i, j, khi), 0.0))
}

/// δ_{ij}: the quotient F(j)/F(i) is discrete and gets point mass 1.
pub fn canonical_delta(e: &FilteredObject2, i: i64, j: i64) -> Result<VirtualMeasure> {
    if !e.predicates().df {
        return Err(Error::Hypothesis("df".into()));
    }
    let (klo, _) = e.inner_window();
    let rows = (Some(-i.max(j)), Some(-i.min(j) - 1));
    if e.coeff != Coeff::Real && !e.rows_high_inside(rows, klo) {
        return Err(Error::Cutoff(format!("rows of F({})/F({}) leave the box in the u direction", i.max(j), i.min(j))));
    }
    VirtualMeasure::new(e, i, j, C64::new(1.0 / kappa(e, i, j, klo), 0.0))
}

/// Factor λ with l_g b_{ij} = λ · b_{i-β, j-β}.
pub fn lg_factor(e: &FilteredObject2, g: &Automorphism2, i: i64, j: i64) -> f64 {
    1.0 / kappa(e, i - g.beta, j - g.beta, e.k_ref - g.alpha)
}

/// Push-forward l_g : μ(F(i)|F(j)) -> μ(F(i-β)|F(j-β)).
pub fn transport_lg(g: &Automorphism2, m: &VirtualMeasure) -> Result<VirtualMeasure> {
    let chk = check_aut(&m.parent, g);
    if !chk.aut_prime {
        return Err(Error::Invalid(format!("not an admissible automorphism: {}", chk.witness.unwrap_or_default())));
    }
    let e = &m.parent;
    let (i2, j2) = (m.i - g.beta, m.j - g.beta);
    check_index(e, i2).and(check_index(e, j2)).map_err(|_| Error::Cutoff("g moves the indices out of the box".into()))?;
    let (klo, khi) = e.inner_window();
    if e.coeff != Coeff::Real && (e.k_ref - g.alpha < klo || e.k_ref - g.alpha > khi) {
        return Err(Error::Cutoff("g moves Λ_k_ref out of the box".into()));
    }
    VirtualMeasure::new(e, i2, j2, m.scalar * lg_factor(e, g, m.i, m.j))
}

/// μ(F(i)|F(j)) on E equals μ(F^0(-i)|F^0(-j)) on the dual.
pub fn dual_transport(m: &VirtualMeasure) -> VirtualMeasure {
    VirtualMeasure { parent: m.parent.dual2(), i: -m.i, j: -m.j, scalar: m.scalar }
}

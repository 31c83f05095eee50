use super::fourier::{fourier_c0_dist, DistributionC0, FunctionC0, MeasureC0};
use super::group::FinAbGroup;
use super::hom::GroupHom;
use super::subgroup::{quotient, Subgroup};
use crate::{Error, Result, C64};

/// 0 -> G1 -a-> G2 -b-> G3 -> 0, exact.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleTripleC0 {
    pub g1: FinAbGroup,
    pub g2: FinAbGroup,
    pub g3: FinAbGroup,
    pub alpha: GroupHom,
    pub beta: GroupHom,
}

impl AdmissibleTripleC0 {
    pub fn new(alpha: GroupHom, beta: GroupHom) -> Result<Self> {
        if alpha.dst() != beta.src() {
            return Err(Error::ParentMismatch("alpha target != beta source".into()));
        }
        if !alpha.is_injective() {
            return Err(Error::NotAdmissible("alpha not injective".into()));
        }
        if !beta.is_surjective() {
            return Err(Error::NotAdmissible("beta not surjective".into()));
        }
        if alpha.image() != beta.kernel() {
            return Err(Error::NotAdmissible("image(alpha) != kernel(beta)".into()));
        }
        Ok(Self {
            g1: alpha.src().clone(),
            g2: alpha.dst().clone(),
            g3: beta.dst().clone(),
            alpha,
            beta,
        })
    }

    /// H -> G -> G/H.
    pub fn from_subgroup(g: &FinAbGroup, h: &Subgroup) -> Result<Self> {
        let (_, incl) = h.as_group();
        let (_, proj) = quotient(g, h)?;
        Self::new(incl, proj)
    }

    /// dual(G3) -> dual(G2) -> dual(G1).
    pub fn dual(&self) -> Self {
        Self {
            g1: self.g3.dual(),
            g2: self.g2.dual(),
            g3: self.g1.dual(),
            alpha: self.beta.dual(),
            beta: self.alpha.dual(),
        }
    }
}

fn need(f: &FinAbGroup, g: &FinAbGroup, what: &str) -> Result<()> {
    if f != g {
        return Err(Error::ParentMismatch(what.into()));
    }
    Ok(())
}

/// c * sum over fibers of a surjection.
pub fn push_epi(beta: &GroupHom, f: &FunctionC0, c: C64) -> Result<FunctionC0> {
    need(&f.group, beta.src(), "push_epi")?;
    let mut out = FunctionC0::zeros(beta.dst());
    for (i, j) in beta.index_table().into_iter().enumerate() {
        out.table[j] += f.table[i] * c;
    }
    Ok(out)
}

/// f o h.
pub fn pull(h: &GroupHom, f: &FunctionC0) -> Result<FunctionC0> {
    need(&f.group, h.dst(), "pull")?;
    Ok(FunctionC0 {
        group: h.src().clone(),
        table: h.index_table().into_iter().map(|j| f.table[j]).collect(),
    })
}

/// Extension by zero along an injection.
pub fn push_mono(alpha: &GroupHom, f: &FunctionC0) -> Result<FunctionC0> {
    need(&f.group, alpha.src(), "push_mono")?;
    let mut out = FunctionC0::zeros(alpha.dst());
    for (i, j) in alpha.index_table().into_iter().enumerate() {
        out.table[j] = f.table[i];
    }
    Ok(out)
}

/// Adjoint of `pull`: sums a kernel over fibers.
pub fn push_dist(h: &GroupHom, d: &DistributionC0) -> Result<DistributionC0> {
    need(&d.group, h.src(), "push_dist")?;
    let mut out = DistributionC0::zeros(h.dst());
    for (i, j) in h.index_table().into_iter().enumerate() {
        out.kernel[j] += d.kernel[i];
    }
    Ok(out)
}

/// Adjoint of `push_epi`: c * (H o beta).
pub fn pull_dist_epi(beta: &GroupHom, d: &DistributionC0, c: C64) -> Result<DistributionC0> {
    need(&d.group, beta.dst(), "pull_dist_epi")?;
    Ok(DistributionC0 {
        group: beta.src().clone(),
        kernel: beta.index_table().into_iter().map(|j| d.kernel[j] * c).collect(),
    })
}

/// Adjoint of `push_mono`: restriction H o alpha.
pub fn pull_dist_mono(alpha: &GroupHom, d: &DistributionC0) -> Result<DistributionC0> {
    need(&d.group, alpha.dst(), "pull_dist_mono")?;
    Ok(DistributionC0 {
        group: alpha.src().clone(),
        kernel: alpha.index_table().into_iter().map(|j| d.kernel[j]).collect(),
    })
}

/// beta_*(f (x) mu1).
pub fn epi_pushforward(t: &AdmissibleTripleC0, f: &FunctionC0, mu1: &MeasureC0) -> Result<FunctionC0> {
    need(&mu1.group, &t.g1, "mu1")?;
    push_epi(&t.beta, f, mu1.scale)
}

/// beta^*(H (x) mu1), adjoint of `epi_pushforward`.
pub fn epi_pullback_dist(t: &AdmissibleTripleC0, h: &DistributionC0, mu1: &MeasureC0) -> Result<DistributionC0> {
    need(&mu1.group, &t.g1, "mu1")?;
    pull_dist_epi(&t.beta, h, mu1.scale)
}

/// alpha^* f = f o alpha.
pub fn mono_pullback(t: &AdmissibleTripleC0, f: &FunctionC0) -> Result<FunctionC0> {
    pull(&t.alpha, f)
}

/// alpha_* H, extension by zero; adjoint of `mono_pullback`.
pub fn mono_pushforward_dist(t: &AdmissibleTripleC0, h: &DistributionC0) -> Result<DistributionC0> {
    need(&h.group, &t.g1, "mono_pushforward_dist")?;
    let mut out = DistributionC0::zeros(&t.g2);
    for (i, j) in t.alpha.index_table().into_iter().enumerate() {
        out.kernel[j] = h.kernel[i];
    }
    Ok(out)
}

/// beta^* f = f o beta.
pub fn epi_pullback(t: &AdmissibleTripleC0, f: &FunctionC0) -> Result<FunctionC0> {
    pull(&t.beta, f)
}

/// beta_* H, fiber sums; adjoint of `epi_pullback`.
pub fn epi_pushforward_dist(t: &AdmissibleTripleC0, h: &DistributionC0) -> Result<DistributionC0> {
    push_dist(&t.beta, h)
}

/// alpha_* f, extension by zero.
pub fn mono_pushforward(t: &AdmissibleTripleC0, f: &FunctionC0) -> Result<FunctionC0> {
    push_mono(&t.alpha, f)
}

/// alpha^* H, restriction; adjoint of `mono_pushforward`.
pub fn mono_pullback_dist(t: &AdmissibleTripleC0, h: &DistributionC0) -> Result<DistributionC0> {
    pull_dist_mono(&t.alpha, h)
}

#[derive(Clone, Debug)]
pub struct PoissonC0Report {
    pub lhs: DistributionC0,
    pub rhs: DistributionC0,
    pub max_deviation: f64,
}

/// Compares F_{mu1^{-1} (x) mu3}(alpha_* mu1) with hat(beta)_* mu3 on dual(G2);
/// `mu3` lives on dual(G3).
pub fn poisson_c0_check(t: &AdmissibleTripleC0, mu1: &MeasureC0, mu3: &MeasureC0) -> Result<PoissonC0Report> {
    need(&mu1.group, &t.g1, "mu1")?;
    need(&mu3.group, &t.g3.dual(), "mu3")?;
    let inv1 = mu1.inverse()?;
    let nu = MeasureC0::new(&t.g2.dual(), inv1.scale * mu3.scale);
    let lhs = fourier_c0_dist(&mono_pushforward_dist(t, &DistributionC0::from_measure(mu1))?, &nu)?;
    let dt = t.dual();
    let rhs = mono_pushforward_dist(&dt, &DistributionC0::from_measure(mu3))?;
    let max_deviation = lhs.max_dev(&rhs);
    Ok(PoissonC0Report {
        lhs,
        rhs,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    fn z4_triple() -> AdmissibleTripleC0 {
        let z4 = FinAbGroup::cyclic(4);
        AdmissibleTripleC0::from_subgroup(&z4, &Subgroup::generated_by(&z4, &[vec![2]]).unwrap()).unwrap()
    }

    #[test]
    fn epi_push_delta() {
        let t = z4_triple();
        let f = FunctionC0::delta(&t.g2, &[0]);
        let r = epi_pushforward(&t, &f, &MeasureC0::counting(&t.g1)).unwrap();
        assert_eq!(r, FunctionC0::delta(&t.g3, &[0]));
    }

    #[test]
    fn epi_push_constant() {
        let t = z4_triple();
        let f = FunctionC0::constant(&t.g2, one());
        let r = epi_pushforward(&t, &f, &MeasureC0::counting(&t.g1)).unwrap();
        assert_eq!(r, FunctionC0::constant(&t.g3, C64::new(t.g1.order() as f64, 0.0)));
    }

    #[test]
    fn trivial_kernel_transports() {
        let g = FinAbGroup::new(vec![2, 6]).unwrap();
        let t = AdmissibleTripleC0::from_subgroup(&g, &Subgroup::zero(&g)).unwrap();
        let f = FunctionC0::new(g.clone(), (0..12).map(|i| C64::new(i as f64, 0.0)).collect()).unwrap();
        let r = epi_pushforward(&t, &f, &MeasureC0::counting(&t.g1)).unwrap();
        assert_eq!(pull(&t.beta, &r).unwrap(), f);
    }

    #[test]
    fn pullbacks_and_pushes() {
        let t = z4_triple();
        let c = C64::new(2.5, -1.0);
        assert_eq!(mono_pullback(&t, &FunctionC0::constant(&t.g2, c)).unwrap(), FunctionC0::constant(&t.g1, c));
        assert_eq!(
            mono_pushforward(&t, &FunctionC0::delta(&t.g1, &vec![0; t.g1.rank()])).unwrap(),
            FunctionC0::delta(&t.g2, &[0])
        );
        let ind = epi_pullback(&t, &FunctionC0::delta(&t.g3, &vec![0; t.g3.rank()])).unwrap();
        let ker = t.beta.kernel().mask();
        for (i, v) in ind.table.iter().enumerate() {
            assert_eq!(v.re, ker[i] as u8 as f64);
        }
    }

    #[test]
    fn adjoint_pairs() {
        let t = z4_triple();
        let f2 = FunctionC0::new(t.g2.clone(), (0..4).map(|i| C64::new(i as f64, 1.0)).collect()).unwrap();
        let h2 = DistributionC0::new(t.g2.clone(), (0..4).map(|i| C64::new(1.0, -(i as f64))).collect()).unwrap();
        let f1 = FunctionC0::new(t.g1.clone(), vec![C64::new(3.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        let h1 = DistributionC0::new(t.g1.clone(), vec![C64::new(-1.0, 0.5), C64::new(2.0, 0.0)]).unwrap();
        let f3 = FunctionC0::new(t.g3.clone(), vec![C64::new(1.0, 1.0), C64::new(0.0, 2.0)]).unwrap();
        let h3 = DistributionC0::new(t.g3.clone(), vec![C64::new(2.0, 0.0), C64::new(0.0, -1.0)]).unwrap();
        let mu = MeasureC0::new(&t.g1, C64::new(0.5, 0.25));
        let a = h3.pair(&epi_pushforward(&t, &f2, &mu).unwrap()).unwrap();
        let b = epi_pullback_dist(&t, &h3, &mu).unwrap().pair(&f2).unwrap();
        assert!((a - b).norm() < 1e-12);
        let a = h1.pair(&mono_pullback(&t, &f2).unwrap()).unwrap();
        let b = mono_pushforward_dist(&t, &h1).unwrap().pair(&f2).unwrap();
        assert!((a - b).norm() < 1e-12);
        let a = h2.pair(&epi_pullback(&t, &f3).unwrap()).unwrap();
        let b = epi_pushforward_dist(&t, &h2).unwrap().pair(&f3).unwrap();
        assert!((a - b).norm() < 1e-12);
        let a = h2.pair(&mono_pushforward(&t, &f1).unwrap()).unwrap();
        let b = mono_pullback_dist(&t, &h2).unwrap().pair(&f1).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    fn brute_poisson_lhs(t: &AdmissibleTripleC0, s: C64) -> Vec<C64> {
        // s * sum_{x in alpha(G1)} conj chi(x)
        let img = t.alpha.image().elements();
        t.g2
            .elements()
            .map(|chi| img.iter().map(|x| t.g2.pairing(&chi, x).conj()).sum::<C64>() * s)
            .collect()
    }

    #[test]
    fn poisson_z4() {
        let t = z4_triple();
        let mu1 = MeasureC0::counting(&t.g1);
        let mu3 = MeasureC0::counting(&t.g3.dual());
        let r = poisson_c0_check(&t, &mu1, &mu3).unwrap();
        assert!(r.max_deviation <= 1e-12);
        let s = 1.0 / t.g1.order() as f64;
        let b = brute_poisson_lhs(&t, C64::new(s, 0.0));
        assert!(super::super::fourier::max_dev(&b, &r.rhs.kernel) < 1e-12);
    }

    #[test]
    fn poisson_trivial_and_full() {
        let g = FinAbGroup::new(vec![3, 3]).unwrap();
        for h in [Subgroup::zero(&g), Subgroup::whole(&g)] {
            let t = AdmissibleTripleC0::from_subgroup(&g, &h).unwrap();
            let r = poisson_c0_check(&t, &MeasureC0::counting(&t.g1), &MeasureC0::counting(&t.g3.dual())).unwrap();
            assert!(r.max_deviation <= 1e-12);
        }
        let t = AdmissibleTripleC0::from_subgroup(&g, &Subgroup::whole(&g)).unwrap();
        let r = poisson_c0_check(&t, &MeasureC0::counting(&t.g1), &MeasureC0::counting(&t.g3.dual())).unwrap();
        // full group: supported at the trivial character only
        assert!(r.lhs.kernel[1..].iter().all(|z| z.norm() < 1e-12));
        assert!((r.lhs.kernel[0] - 1.0).norm() < 1e-12);
    }

    #[test]
    fn zero_measure_rejected() {
        let t = z4_triple();
        let r = poisson_c0_check(&t, &MeasureC0::new(&t.g1, C64::new(0.0, 0.0)), &MeasureC0::counting(&t.g3));
        assert_eq!(r.unwrap_err(), Error::ZeroMeasure);
    }
}

//! Randomized instances and the image/Fourier identity suite on finite groups.

use rand::Rng;
use serde::Serialize;

use super::fourier::{fourier_c0, fourier_c0_dist, max_dev, DistributionC0, FunctionC0, MeasureC0};
use super::group::FinAbGroup;
use super::hom::{fibered_product, GroupHom};
use super::images::{pull, pull_dist_epi, pull_dist_mono, push_dist, push_epi, push_mono, AdmissibleTripleC0};
use super::subgroup::{quotient, Subgroup};
use crate::{Result, C64};

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub max_deviation: f64,
}

fn check(name: &str, a: &[C64], b: &[C64]) -> IdentityCheck {
    IdentityCheck {
        name: name.to_string(),
        max_deviation: max_dev(a, b),
    }
}

pub fn random_group<R: Rng>(rng: &mut R, max_order: usize) -> FinAbGroup {
    let mut orders = vec![];
    let mut prod = 1usize;
    let factors = rng.gen_range(1..=3);
    for _ in 0..factors {
        let room = max_order / prod;
        if room < 2 {
            break;
        }
        let n = rng.gen_range(2..=room.min(64));
        orders.push(n as i64);
        prod *= n;
    }
    FinAbGroup::from_cyclic(&orders)
}

pub fn random_element<R: Rng>(rng: &mut R, g: &FinAbGroup) -> Vec<i64> {
    g.moduli().iter().map(|&d| rng.gen_range(0..d)).collect()
}

pub fn random_subgroup<R: Rng>(rng: &mut R, g: &FinAbGroup) -> Subgroup {
    let n = rng.gen_range(0..=2);
    let gens: Vec<Vec<i64>> = (0..n).map(|_| random_element(rng, g)).collect();
    Subgroup::generated_by(g, &gens).unwrap()
}

pub fn random_triple<R: Rng>(rng: &mut R, max_order: usize) -> AdmissibleTripleC0 {
    let g = random_group(rng, max_order);
    let h = random_subgroup(rng, &g);
    AdmissibleTripleC0::from_subgroup(&g, &h).unwrap()
}

pub fn random_scalar<R: Rng>(rng: &mut R) -> C64 {
    let r: f64 = rng.gen_range(0.5..2.0);
    C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

pub fn random_function<R: Rng>(rng: &mut R, g: &FinAbGroup) -> FunctionC0 {
    let t = (0..g.order())
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    FunctionC0::new(g.clone(), t).unwrap()
}

pub fn random_dist<R: Rng>(rng: &mut R, g: &FinAbGroup) -> DistributionC0 {
    let f = random_function(rng, g);
    DistributionC0::new(g.clone(), f.table).unwrap()
}

fn m(g: &FinAbGroup, s: C64) -> MeasureC0 {
    MeasureC0::new(g, s)
}

/// Fibered-product square over a triple: D -> E3 -> B, G = E2 x_{E3} D.
pub fn prop18_checks<R: Rng>(rng: &mut R, t: &AdmissibleTripleC0) -> Result<Vec<IdentityCheck>> {
    let dsub = random_subgroup(rng, &t.g3);
    let (d, gamma) = dsub.as_group();
    let (_, bg, gb) = fibered_product(&t.beta, &gamma)?;
    let beta = &t.beta;
    let mu = random_scalar(rng);
    let mut out = vec![];

    let f = random_function(rng, &t.g2);
    let l = pull(&gamma, &push_epi(beta, &f, mu)?)?;
    let r = push_epi(&gb, &pull(&bg, &f)?, mu)?;
    out.push(check("prop18_e''1", &l.table, &r.table));

    let h = random_dist(rng, &d);
    let l = pull_dist_epi(beta, &push_dist(&gamma, &h)?, mu)?;
    let r = push_dist(&bg, &pull_dist_epi(&gb, &h, mu)?)?;
    out.push(check("prop18_e''2", &l.kernel, &r.kernel));

    let f = random_function(rng, &t.g3);
    let l = pull(&gb, &pull(&gamma, &f)?)?;
    let r = pull(&bg, &pull(beta, &f)?)?;
    out.push(check("prop18_e''3", &l.table, &r.table));

    let h = random_dist(rng, bg.src());
    let l = push_dist(beta, &push_dist(&bg, &h)?)?;
    let r = push_dist(&gamma, &push_dist(&gb, &h)?)?;
    out.push(check("prop18_e''4", &l.kernel, &r.kernel));

    let f = random_function(rng, bg.src());
    let l = push_epi(beta, &push_mono(&bg, &f)?, mu)?;
    let r = push_mono(&gamma, &push_epi(&gb, &f, mu)?)?;
    out.push(check("prop18_f4c", &l.table, &r.table));

    let h = random_dist(rng, &t.g3);
    let l = pull_dist_epi(&gb, &pull_dist_mono(&gamma, &h)?, mu)?;
    let r = pull_dist_mono(&bg, &pull_dist_epi(beta, &h, mu)?)?;
    out.push(check("prop18_f4d", &l.kernel, &r.kernel));

    let f = random_function(rng, &d);
    let l = pull(beta, &push_mono(&gamma, &f)?)?;
    let r = push_mono(&bg, &pull(&gb, &f)?)?;
    out.push(check("prop18_f5", &l.table, &r.table));

    let h = random_dist(rng, &t.g2);
    let l = pull_dist_mono(&gamma, &push_dist(beta, &h)?)?;
    let r = push_dist(&gb, &pull_dist_mono(&bg, &h)?)?;
    out.push(check("prop18_f6", &l.kernel, &r.kernel));
    Ok(out)
}

/// L -> H -> E2 (beta') composed with E1 -> E2 -> E3.
pub fn prop16_checks<R: Rng>(rng: &mut R, max_order: usize) -> Result<Vec<IdentityCheck>> {
    let hgrp = random_group(rng, max_order);
    let lsub = random_subgroup(rng, &hgrp);
    let (e2, bp) = quotient(&hgrp, &lsub)?;
    let t = AdmissibleTripleC0::from_subgroup(&e2, &random_subgroup(rng, &e2))?;
    let bbp = t.beta.compose(&bp)?;
    let (nu, mu) = (random_scalar(rng), random_scalar(rng));
    let mut out = vec![];

    let f = random_function(rng, &hgrp);
    let l = push_epi(&bbp, &f, nu * mu)?;
    let r = push_epi(&t.beta, &push_epi(&bp, &f, nu)?, mu)?;
    out.push(check("prop16_e1", &l.table, &r.table));

    let g = random_dist(rng, &t.g3);
    let l = pull_dist_epi(&bbp, &g, nu * mu)?;
    let r = pull_dist_epi(&bp, &pull_dist_epi(&t.beta, &g, mu)?, nu)?;
    out.push(check("prop16_e2", &l.kernel, &r.kernel));

    let f = random_function(rng, &t.g3);
    let l = pull(&bbp, &f)?;
    let r = pull(&bp, &pull(&t.beta, &f)?)?;
    out.push(check("prop16_f5", &l.table, &r.table));

    let g = random_dist(rng, &hgrp);
    let l = push_dist(&bbp, &g)?;
    let r = push_dist(&t.beta, &push_dist(&bp, &g)?)?;
    out.push(check("prop16_f6", &l.kernel, &r.kernel));
    Ok(out)
}

/// E1 -> E2 -> E3 with E2 -> H' (alpha').
pub fn prop17_checks<R: Rng>(rng: &mut R, max_order: usize) -> Result<Vec<IdentityCheck>> {
    let hp = random_group(rng, max_order);
    let (e2, ap) = random_subgroup(rng, &hp).as_group();
    let t = AdmissibleTripleC0::from_subgroup(&e2, &random_subgroup(rng, &e2))?;
    let aap = ap.compose(&t.alpha)?;
    let mut out = vec![];

    let f = random_function(rng, &hp);
    let l = pull(&aap, &f)?;
    let r = pull(&t.alpha, &pull(&ap, &f)?)?;
    out.push(check("prop17_e'1", &l.table, &r.table));

    let g = random_dist(rng, &t.g1);
    let l = push_dist(&aap, &g)?;
    let r = push_dist(&ap, &push_dist(&t.alpha, &g)?)?;
    out.push(check("prop17_e'2", &l.kernel, &r.kernel));

    let f = random_function(rng, &t.g1);
    let l = push_mono(&aap, &f)?;
    let r = push_mono(&ap, &push_mono(&t.alpha, &f)?)?;
    out.push(check("prop17_f5", &l.table, &r.table));

    let g = random_dist(rng, &hp);
    let l = pull_dist_mono(&aap, &g)?;
    let r = pull_dist_mono(&t.alpha, &pull_dist_mono(&ap, &g)?)?;
    out.push(check("prop17_f6", &l.kernel, &r.kernel));
    Ok(out)
}

/// Fourier transform intertwines images with dual images.
pub fn fourier_image_checks<R: Rng>(rng: &mut R, t: &AdmissibleTripleC0) -> Result<Vec<IdentityCheck>> {
    let (c1, c3) = (random_scalar(rng), random_scalar(rng));
    let (n1, n2, n3) = (t.g1.order() as f64, t.g2.order() as f64, t.g3.order() as f64);
    let (g1d, g2d, g3d) = (t.g1.dual(), t.g2.dual(), t.g3.dual());
    let bh = t.beta.dual();
    let ah = t.alpha.dual();
    let mut out = vec![];

    let f = random_function(rng, &t.g2);
    let l = fourier_c0(&push_epi(&t.beta, &f, c1)?, &m(&t.g3, c3))?;
    let r = pull(&bh, &fourier_c0(&f, &m(&t.g2, c1 * c3))?)?;
    out.push(check("prpr_eq1", &l.table, &r.table));

    let l = fourier_c0(&pull(&t.alpha, &f)?, &m(&t.g1, c1))?;
    let r = push_epi(&ah, &fourier_c0(&f, &m(&t.g2, c1 * c3))?, 1.0 / (c3 * n3))?;
    out.push(check("prpr_eq2", &l.table, &r.table));

    let s2 = random_scalar(rng);
    let h3 = random_dist(rng, &t.g3);
    let l = fourier_c0_dist(&pull_dist_epi(&t.beta, &h3, c1)?, &m(&g2d, s2))?;
    let r = push_dist(&bh, &fourier_c0_dist(&h3, &m(&g3d, s2 * c1 * n1))?)?;
    out.push(check("prpr_eq3", &l.kernel, &r.kernel));

    let h1 = random_dist(rng, &t.g1);
    let l = fourier_c0_dist(&push_dist(&t.alpha, &h1)?, &m(&g2d, 1.0 / (c1 * c3 * n2)))?;
    let r = pull_dist_epi(&ah, &fourier_c0_dist(&h1, &m(&g1d, 1.0 / (c1 * n1)))?, 1.0 / (c3 * n3))?;
    out.push(check("prpr_eq4", &l.kernel, &r.kernel));

    let f3 = random_function(rng, &t.g3);
    let l = fourier_c0(&pull(&t.beta, &f3)?, &m(&t.g2, c3 / n1))?;
    let r = push_mono(&bh, &fourier_c0(&f3, &m(&t.g3, c3))?)?;
    out.push(check("comdia_eqq1", &l.table, &r.table));

    let f1 = random_function(rng, &t.g1);
    let l = fourier_c0(&push_mono(&t.alpha, &f1)?, &m(&t.g2, c1))?;
    let r = pull(&ah, &fourier_c0(&f1, &m(&t.g1, c1))?)?;
    out.push(check("comdia_eqq2", &l.table, &r.table));

    let h2 = random_dist(rng, &t.g2);
    let l = fourier_c0_dist(&pull_dist_mono(&t.alpha, &h2)?, &m(&g1d, s2 * n3))?;
    let r = push_dist(&ah, &fourier_c0_dist(&h2, &m(&g2d, s2))?)?;
    out.push(check("comdia_eqq3", &l.kernel, &r.kernel));

    let l = fourier_c0_dist(&push_dist(&t.beta, &h2)?, &m(&g3d, s2))?;
    let r = pull_dist_mono(&bh, &fourier_c0_dist(&h2, &m(&g2d, s2))?)?;
    out.push(check("comdia_eqq4", &l.kernel, &r.kernel));
    Ok(out)
}

/// All 24 identities on fresh random instances of order at most `max_order`.
pub fn identity_suite<R: Rng>(rng: &mut R, max_order: usize) -> Result<Vec<IdentityCheck>> {
    let t = random_triple(rng, max_order);
    let mut out = prop18_checks(rng, &t)?;
    out.extend(prop16_checks(rng, max_order)?);
    out.extend(prop17_checks(rng, max_order)?);
    out.extend(fourier_image_checks(rng, &t)?);
    Ok(out)
}

/// Dimension of the space of translation-invariant distributions, computed
/// as the number of connected classes under translation by generators.
pub fn invariant_distribution_dim(g: &FinAbGroup) -> usize {
    let n = g.order();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for i in 0..g.rank() {
        let e: Vec<i64> = (0..g.rank()).map(|j| (i == j) as i64).collect();
        for x in 0..n {
            let y = g.index_of(&g.add(&g.element(x), &e));
            let (a, b) = (find(&mut parent, x), find(&mut parent, y));
            parent[a] = b;
        }
    }
    (0..n).filter(|&x| find(&mut parent, x) == x).count()
}

pub fn hom_is_valid(h: &GroupHom) -> bool {
    GroupHom::new(h.src().clone(), h.dst().clone(), h.matrix().clone()).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_identities_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            for c in identity_suite(&mut rng, 256).unwrap() {
                assert!(c.max_deviation <= 1e-9, "{} {}", c.name, c.max_deviation);
            }
        }
    }

    #[test]
    fn suite_has_24_formulas() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(identity_suite(&mut rng, 64).unwrap().len(), 24);
    }

    #[test]
    fn haar_line_is_one_dimensional() {
        for m in [vec![], vec![6], vec![2, 4], vec![3, 3, 9]] {
            assert_eq!(invariant_distribution_dim(&FinAbGroup::new(m).unwrap()), 1);
        }
    }
}

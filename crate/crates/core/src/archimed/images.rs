//! Image maps on coordinate-aligned triples.

use rand::Rng;

use super::hermite::{hermite_all, integrals};
use super::tensor::Tensor;
use super::{fourier_c0ar, fourier_c0ar_dist, C0arObject, Cutoffs, DistC0ar, MeasureC0ar, SchwartzC0ar};
use crate::finabel::identities::{random_group, random_scalar, random_subgroup, IdentityCheck};
use crate::finabel::AdmissibleTripleC0;
use crate::{Error, Result, C64};

/// Where a continuous coordinate of G2 goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// coordinate of G1
    Sub,
    /// coordinate of G3
    Quot,
    /// R coordinate with Z in G1 and T = R/Z in G3
    LatticeZinR,
}

impl Role {
    fn flip(self) -> Role {
        match self {
            Role::Sub => Role::Quot,
            Role::Quot => Role::Sub,
            Role::LatticeZinR => Role::LatticeZinR,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageMode {
    EpiPush,
    MonoPull,
    EpiPull,
    MonoPush,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Z,
    T,
    R,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleTripleC0ar {
    pub fin: AdmissibleTripleC0,
    pub g2: C0arObject,
    pub roles: Vec<Role>,
    pub cut: Cutoffs,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn delta(n: usize, i: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[i] = one();
    v
}

impl AdmissibleTripleC0ar {
    pub fn new(fin: AdmissibleTripleC0, r: usize, p: usize, q: usize, roles: Vec<Role>, cut: Cutoffs) -> Result<Self> {
        if roles.len() != r + p + q {
            return Err(Error::Invalid("one role per continuous coordinate".into()));
        }
        if roles[..r + p].contains(&Role::LatticeZinR) {
            return Err(Error::NotAdmissible("only R coordinates contain a lattice".into()));
        }
        Ok(Self {
            g2: C0arObject::new(fin.g2.clone(), r, p, q),
            fin,
            roles,
            cut,
        })
    }

    fn kind(&self, c: usize) -> Kind {
        if c < self.g2.r {
            Kind::Z
        } else if c < self.g2.r + self.g2.p {
            Kind::T
        } else {
            Kind::R
        }
    }

    fn count(&self, kind: Kind, role: Role) -> usize {
        (0..self.roles.len())
            .filter(|&c| self.kind(c) == kind && self.roles[c] == role)
            .count()
    }

    pub fn g1(&self) -> C0arObject {
        let z = self.count(Kind::Z, Role::Sub) + self.count(Kind::R, Role::LatticeZinR);
        C0arObject::new(self.fin.g1.clone(), z, self.count(Kind::T, Role::Sub), self.count(Kind::R, Role::Sub))
    }

    pub fn g3(&self) -> C0arObject {
        let t = self.count(Kind::T, Role::Quot) + self.count(Kind::R, Role::LatticeZinR);
        C0arObject::new(self.fin.g3.clone(), self.count(Kind::Z, Role::Quot), t, self.count(Kind::R, Role::Quot))
    }

    pub fn dual(&self) -> Self {
        let (r, p) = (self.g2.r, self.g2.p);
        let mut roles: Vec<Role> = self.roles[r..r + p].iter().map(|x| x.flip()).collect();
        roles.extend(self.roles[..r].iter().map(|x| x.flip()));
        roles.extend(self.roles[r + p..].iter().map(|x| x.flip()));
        Self {
            fin: self.fin.dual(),
            g2: self.g2.dual(),
            roles,
            cut: self.cut.dual(),
        }
    }

    fn aligned(&self) -> Result<()> {
        if self.roles.contains(&Role::LatticeZinR) {
            return Err(Error::Hypothesis("Z -> R is not coordinate-aligned".into()));
        }
        Ok(())
    }

    pub fn g1_compact(&self) -> bool {
        self.g1().is_compact()
    }

    pub fn g3_discrete(&self) -> bool {
        self.g3().is_discrete()
    }

    fn len(&self, k: Kind) -> usize {
        match k {
            Kind::Z => (2 * self.cut.z_box + 1) as usize,
            Kind::T => (2 * self.cut.t_box + 1) as usize,
            Kind::R => self.cut.hermite,
        }
    }

    fn w_int(&self, k: Kind) -> Vec<C64> {
        match k {
            Kind::Z => vec![one(); self.len(k)],
            Kind::T => delta(self.len(k), self.cut.t_box as usize),
            Kind::R => integrals(self.cut.hermite),
        }
    }

    fn w_eval0(&self, k: Kind) -> Vec<C64> {
        match k {
            Kind::Z => delta(self.len(k), self.cut.z_box as usize),
            Kind::T => vec![one(); self.len(k)],
            Kind::R => hermite_all(self.cut.hermite, 0.0).into_iter().map(|v| C64::new(v, 0.0)).collect(),
        }
    }

    /// Constant function 1 (T) or delta at 0 (Z).
    fn w_unit(&self, k: Kind) -> Vec<C64> {
        match k {
            Kind::T => delta(self.len(k), self.cut.t_box as usize),
            _ => delta(self.len(k), self.cut.z_box as usize),
        }
    }

    fn beta_mat(&self) -> Vec<Vec<C64>> {
        let table = self.fin.beta.index_table();
        (0..self.fin.g3.order())
            .map(|y| table.iter().map(|&j| C64::new((j == y) as u8 as f64, 0.0)).collect())
            .collect()
    }

    fn alpha_mat(&self) -> Vec<Vec<C64>> {
        let table = self.fin.alpha.index_table();
        let n2 = self.fin.g2.order();
        table
            .iter()
            .map(|&j| (0..n2).map(|x| C64::new((x == j) as u8 as f64, 0.0)).collect())
            .collect()
    }

    fn axes(&self, role: Role) -> Vec<usize> {
        (0..self.roles.len()).filter(|&c| self.roles[c] == role).collect()
    }

    fn contract(&self, t: &Tensor, role: Role, w: impl Fn(Kind) -> Vec<C64>) -> Tensor {
        let mut out = t.clone();
        for c in self.axes(role).into_iter().rev() {
            out = out.contract_axis(1 + c, &w(self.kind(c)));
        }
        out
    }

    fn insert(&self, t: &Tensor, role: Role, w: impl Fn(Kind) -> Vec<C64>) -> Tensor {
        let mut out = t.clone();
        for c in self.axes(role) {
            out = out.insert_axis(1 + c, &w(self.kind(c)));
        }
        out
    }
}

fn transpose(m: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

fn need(a: &C0arObject, b: &C0arObject, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::ParentMismatch(what.into()));
    }
    Ok(())
}

/// beta_*(f (x) mu1)
pub fn epi_push(tr: &AdmissibleTripleC0ar, f: &SchwartzC0ar, mu1: &MeasureC0ar) -> Result<SchwartzC0ar> {
    tr.aligned()?;
    need(&f.obj, &tr.g2, "epi_push")?;
    need(&mu1.obj, &tr.g1(), "mu1")?;
    let t = tr.contract(&f.t.map_axis(0, &tr.beta_mat()), Role::Sub, |k| tr.w_int(k));
    Ok(SchwartzC0ar { obj: tr.g3(), cut: tr.cut, t: t.scale(mu1.scale) })
}

/// beta^*(H (x) mu1), adjoint of `epi_push`.
pub fn epi_pull_dist(tr: &AdmissibleTripleC0ar, h: &DistC0ar, mu1: &MeasureC0ar) -> Result<DistC0ar> {
    tr.aligned()?;
    need(&h.obj, &tr.g3(), "epi_pull_dist")?;
    need(&mu1.obj, &tr.g1(), "mu1")?;
    let t = tr.insert(&h.t.map_axis(0, &transpose(&tr.beta_mat())), Role::Sub, |k| tr.w_int(k));
    Ok(DistC0ar { obj: tr.g2.clone(), cut: tr.cut, t: t.scale(mu1.scale) })
}

/// alpha^* f
pub fn mono_pull(tr: &AdmissibleTripleC0ar, f: &SchwartzC0ar) -> Result<SchwartzC0ar> {
    tr.aligned()?;
    need(&f.obj, &tr.g2, "mono_pull")?;
    let t = tr.contract(&f.t.map_axis(0, &tr.alpha_mat()), Role::Quot, |k| tr.w_eval0(k));
    Ok(SchwartzC0ar { obj: tr.g1(), cut: tr.cut, t })
}

/// alpha_* H, adjoint of `mono_pull`.
pub fn mono_push_dist(tr: &AdmissibleTripleC0ar, h: &DistC0ar) -> Result<DistC0ar> {
    tr.aligned()?;
    need(&h.obj, &tr.g1(), "mono_push_dist")?;
    let t = tr.insert(&h.t.map_axis(0, &transpose(&tr.alpha_mat())), Role::Quot, |k| tr.w_eval0(k));
    Ok(DistC0ar { obj: tr.g2.clone(), cut: tr.cut, t })
}

/// beta^* f, needs G1 compact.
pub fn epi_pull(tr: &AdmissibleTripleC0ar, f: &SchwartzC0ar) -> Result<SchwartzC0ar> {
    tr.aligned()?;
    if !tr.g1_compact() {
        return Err(Error::Hypothesis("epi_pull needs G1 compact".into()));
    }
    need(&f.obj, &tr.g3(), "epi_pull")?;
    let t = tr.insert(&f.t.map_axis(0, &transpose(&tr.beta_mat())), Role::Sub, |k| tr.w_unit(k));
    Ok(SchwartzC0ar { obj: tr.g2.clone(), cut: tr.cut, t })
}

/// beta_* H, adjoint of `epi_pull`.
pub fn epi_push_dist(tr: &AdmissibleTripleC0ar, h: &DistC0ar) -> Result<DistC0ar> {
    tr.aligned()?;
    if !tr.g1_compact() {
        return Err(Error::Hypothesis("epi_push_dist needs G1 compact".into()));
    }
    need(&h.obj, &tr.g2, "epi_push_dist")?;
    let t = tr.contract(&h.t.map_axis(0, &tr.beta_mat()), Role::Sub, |k| tr.w_unit(k));
    Ok(DistC0ar { obj: tr.g3(), cut: tr.cut, t })
}

/// alpha_* f, extension by zero; needs G3 discrete.
pub fn mono_push(tr: &AdmissibleTripleC0ar, f: &SchwartzC0ar) -> Result<SchwartzC0ar> {
    tr.aligned()?;
    if !tr.g3_discrete() {
        return Err(Error::Hypothesis("mono_push needs G3 discrete".into()));
    }
    need(&f.obj, &tr.g1(), "mono_push")?;
    let t = tr.insert(&f.t.map_axis(0, &transpose(&tr.alpha_mat())), Role::Quot, |k| tr.w_unit(k));
    Ok(SchwartzC0ar { obj: tr.g2.clone(), cut: tr.cut, t })
}

/// alpha^* H, adjoint of `mono_push`.
pub fn mono_pull_dist(tr: &AdmissibleTripleC0ar, h: &DistC0ar) -> Result<DistC0ar> {
    tr.aligned()?;
    if !tr.g3_discrete() {
        return Err(Error::Hypothesis("mono_pull_dist needs G3 discrete".into()));
    }
    need(&h.obj, &tr.g2, "mono_pull_dist")?;
    let t = tr.contract(&h.t.map_axis(0, &tr.alpha_mat()), Role::Quot, |k| tr.w_unit(k));
    Ok(DistC0ar { obj: tr.g1(), cut: tr.cut, t })
}

/// Function-level dispatcher; `mu` is required for `EpiPush` only.
pub fn images_c0ar(
    tr: &AdmissibleTripleC0ar,
    f: &SchwartzC0ar,
    mu: Option<&MeasureC0ar>,
    mode: ImageMode,
) -> Result<SchwartzC0ar> {
    match mode {
        ImageMode::EpiPush => {
            let mu = mu.ok_or_else(|| Error::Invalid("epi_push needs a measure on G1".into()))?;
            epi_push(tr, f, mu)
        }
        ImageMode::MonoPull => mono_pull(tr, f),
        ImageMode::EpiPull => epi_pull(tr, f),
        ImageMode::MonoPush => mono_push(tr, f),
    }
}

fn random_tensor<R: Rng>(rng: &mut R, obj: &C0arObject, cut: &Cutoffs) -> Tensor {
    let mut t = Tensor::zeros(obj.dims(cut));
    for z in t.data.iter_mut() {
        *z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    t
}

fn rf<R: Rng>(rng: &mut R, obj: &C0arObject, cut: &Cutoffs) -> SchwartzC0ar {
    SchwartzC0ar { obj: obj.clone(), cut: *cut, t: random_tensor(rng, obj, cut) }
}

fn rd<R: Rng>(rng: &mut R, obj: &C0arObject, cut: &Cutoffs) -> DistC0ar {
    DistC0ar { obj: obj.clone(), cut: *cut, t: random_tensor(rng, obj, cut) }
}

/// Random coordinate-aligned triple; `compact_g1` / `discrete_g3` restrict roles.
pub fn random_triple_c0ar<R: Rng>(rng: &mut R, compact_g1: bool, discrete_g3: bool) -> AdmissibleTripleC0ar {
    let g = random_group(rng, 12);
    let fin = AdmissibleTripleC0::from_subgroup(&g, &random_subgroup(rng, &g)).unwrap();
    let (r, p, q) = (rng.gen_range(0..=1), rng.gen_range(0..=1), rng.gen_range(0..=1));
    let mut roles = vec![];
    for c in 0..r + p + q {
        let is_t = c >= r && c < r + p;
        let is_z = c < r;
        let role = if compact_g1 && !is_t {
            Role::Quot
        } else if discrete_g3 && !is_z {
            Role::Sub
        } else if rng.gen_bool(0.5) {
            Role::Sub
        } else {
            Role::Quot
        };
        roles.push(role);
    }
    if compact_g1 && discrete_g3 {
        roles.retain(|_| false);
        return AdmissibleTripleC0ar::new(fin, 0, 0, 0, roles, small_cut()).unwrap();
    }
    AdmissibleTripleC0ar::new(fin, r, p, q, roles, small_cut()).unwrap()
}

pub fn small_cut() -> Cutoffs {
    Cutoffs { hermite: 6, z_box: 3, t_box: 3 }
}

fn chk(name: &str, a: &Tensor, b: &Tensor) -> IdentityCheck {
    IdentityCheck {
        name: name.into(),
        max_deviation: if a.dims == b.dims {
            crate::finabel::fourier::max_dev(&a.data, &b.data)
        } else {
            f64::INFINITY
        },
    }
}

/// Fourier/image commutation identities on coordinate-aligned triples.
pub fn fourier_image_checks_c0ar<R: Rng>(rng: &mut R) -> Result<Vec<IdentityCheck>> {
    let mut out = vec![];
    let tr = random_triple_c0ar(rng, false, false);
    let dt = tr.dual();
    let (g1, g2, g3) = (tr.g1(), tr.g2.clone(), tr.g3());
    let (n1, n2, n3) = (g1.a.order() as f64, g2.a.order() as f64, g3.a.order() as f64);
    let (c1, c3, s2) = (random_scalar(rng), random_scalar(rng), random_scalar(rng));
    let m = MeasureC0ar::new;

    let f = rf(rng, &g2, &tr.cut);
    let l = fourier_c0ar(&epi_push(&tr, &f, &m(&g1, c1))?, &m(&g3, c3))?;
    let r = mono_pull(&dt, &fourier_c0ar(&f, &m(&g2, c1 * c3))?)?;
    out.push(chk("prpr_eq1", &l.t, &r.t));

    let l = fourier_c0ar(&mono_pull(&tr, &f)?, &m(&g1, c1))?;
    let r = epi_push(&dt, &fourier_c0ar(&f, &m(&g2, c1 * c3))?, &m(&g3.dual(), 1.0 / (c3 * n3)))?;
    out.push(chk("prpr_eq2", &l.t, &r.t));

    let h3 = rd(rng, &g3, &tr.cut);
    let l = fourier_c0ar_dist(&epi_pull_dist(&tr, &h3, &m(&g1, c1))?, &m(&g2.dual(), s2))?;
    let r = mono_push_dist(&dt, &fourier_c0ar_dist(&h3, &m(&g3.dual(), s2 * c1 * n1))?)?;
    out.push(chk("prpr_eq3", &l.t, &r.t));

    let h1 = rd(rng, &g1, &tr.cut);
    let l = fourier_c0ar_dist(&mono_push_dist(&tr, &h1)?, &m(&g2.dual(), 1.0 / (c1 * c3 * n2)))?;
    let r = epi_pull_dist(&dt, &fourier_c0ar_dist(&h1, &m(&g1.dual(), 1.0 / (c1 * n1)))?, &m(&g3.dual(), 1.0 / (c3 * n3)))?;
    out.push(chk("prpr_eq4", &l.t, &r.t));

    let tr = random_triple_c0ar(rng, true, false);
    let dt = tr.dual();
    let (g1, g2, g3) = (tr.g1(), tr.g2.clone(), tr.g3());
    let n1 = g1.a.order() as f64;
    let f3 = rf(rng, &g3, &tr.cut);
    let l = fourier_c0ar(&epi_pull(&tr, &f3)?, &m(&g2, c3 / n1))?;
    let r = mono_push(&dt, &fourier_c0ar(&f3, &m(&g3, c3))?)?;
    out.push(chk("comdia_eqq1", &l.t, &r.t));
    let h2 = rd(rng, &g2, &tr.cut);
    let l = fourier_c0ar_dist(&epi_push_dist(&tr, &h2)?, &m(&g3.dual(), s2))?;
    let r = mono_pull_dist(&dt, &fourier_c0ar_dist(&h2, &m(&g2.dual(), s2))?)?;
    out.push(chk("comdia_eqq4", &l.t, &r.t));

    let tr = random_triple_c0ar(rng, false, true);
    let dt = tr.dual();
    let (g1, g2, g3) = (tr.g1(), tr.g2.clone(), tr.g3());
    let n3 = g3.a.order() as f64;
    let f1 = rf(rng, &g1, &tr.cut);
    let l = fourier_c0ar(&mono_push(&tr, &f1)?, &m(&g2, c1))?;
    let r = epi_pull(&dt, &fourier_c0ar(&f1, &m(&g1, c1))?)?;
    out.push(chk("comdia_eqq2", &l.t, &r.t));
    let h2 = rd(rng, &g2, &tr.cut);
    let l = fourier_c0ar_dist(&mono_pull_dist(&tr, &h2)?, &m(&g1.dual(), s2 * n3))?;
    let r = epi_push_dist(&dt, &fourier_c0ar_dist(&h2, &m(&g2.dual(), s2))?)?;
    out.push(chk("comdia_eqq3", &l.t, &r.t));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finabel::{FinAbGroup, Subgroup};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r_to_point() -> AdmissibleTripleC0ar {
        let g = FinAbGroup::trivial();
        let fin = AdmissibleTripleC0::from_subgroup(&g, &Subgroup::whole(&g)).unwrap();
        AdmissibleTripleC0ar::new(fin, 0, 0, 1, vec![Role::Sub], Cutoffs::default()).unwrap()
    }

    #[test]
    fn gaussian_integral() {
        let tr = r_to_point();
        let mut f = SchwartzC0ar::zeros(&tr.g2, &tr.cut);
        f.t.data[0] = one();
        let r = epi_push(&tr, &f, &MeasureC0ar::canonical(&tr.g1())).unwrap();
        let h = 1.0 / 64.0;
        let quad: f64 = super::super::hermite::grid(10.0, h)
            .iter()
            .map(|&x| super::super::hermite::hermite(0, x))
            .sum::<f64>()
            * h;
        assert!((r.t.data[0].re - quad).abs() < 1e-12);
    }

    #[test]
    fn mono_pull_constant() {
        let g = FinAbGroup::new(vec![2, 4]).unwrap();
        let fin = AdmissibleTripleC0::from_subgroup(&g, &Subgroup::generated_by(&g, &[vec![1, 2]]).unwrap()).unwrap();
        let tr = AdmissibleTripleC0ar::new(fin, 0, 2, 0, vec![Role::Sub, Role::Quot], small_cut()).unwrap();
        let k0 = delta((2 * tr.cut.t_box + 1) as usize, tr.cut.t_box as usize);
        let t = Tensor { dims: vec![g.order()], data: vec![one(); g.order()] }
            .insert_axis(1, &k0)
            .insert_axis(2, &k0);
        let f = SchwartzC0ar::new(tr.g2.clone(), tr.cut, t).unwrap();
        let h = mono_pull(&tr, &f).unwrap();
        for a in h.obj.a.elements() {
            assert!((h.eval(&a, &[], &[0.3], &[]) - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn lattice_role_rejected() {
        let g = FinAbGroup::trivial();
        let fin = AdmissibleTripleC0::from_subgroup(&g, &Subgroup::whole(&g)).unwrap();
        let tr = AdmissibleTripleC0ar::new(fin, 0, 0, 1, vec![Role::LatticeZinR], Cutoffs::default()).unwrap();
        let f = SchwartzC0ar::zeros(&tr.g1(), &tr.cut);
        assert!(matches!(mono_push(&tr, &f), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn hypotheses_enforced() {
        let tr = r_to_point();
        let f = SchwartzC0ar::zeros(&tr.g3(), &tr.cut);
        assert!(matches!(epi_pull(&tr, &f), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn adjoint_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let tr = random_triple_c0ar(&mut rng, false, false);
            let mu = MeasureC0ar::new(&tr.g1(), C64::new(0.7, 0.2));
            let f2 = rf(&mut rng, &tr.g2, &tr.cut);
            let h3 = rd(&mut rng, &tr.g3(), &tr.cut);
            let a = h3.pair(&epi_push(&tr, &f2, &mu).unwrap()).unwrap();
            let b = epi_pull_dist(&tr, &h3, &mu).unwrap().pair(&f2).unwrap();
            assert!((a - b).norm() < 1e-10);
            let h1 = rd(&mut rng, &tr.g1(), &tr.cut);
            let a = h1.pair(&mono_pull(&tr, &f2).unwrap()).unwrap();
            let b = mono_push_dist(&tr, &h1).unwrap().pair(&f2).unwrap();
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn diagrams_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..25 {
            for c in fourier_image_checks_c0ar(&mut rng).unwrap() {
                assert!(c.max_deviation <= 1e-8, "{} {}", c.name, c.max_deviation);
            }
        }
    }
}

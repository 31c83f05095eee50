//! Named verification suites: scenario parsing, case generation and reports.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::adelic::{self, fq::is_prime, Place};
use crate::archimed::hermite::{eigenvalue, hermite, transform_by_quadrature};
use crate::archimed::{poisson_lattice_check, Cutoffs};
use crate::centext::{commutator_scalar, fourier_equivariance_check, pairing_invariance, rep_r, rep_r_dist, twisted_poisson_i_check, twisted_poisson_ii_check, CentralExtElement};
use crate::filt1::{AdmissibleTriple1, FilteredObject1};
use crate::filt2::{amalgam2, check_aut, fibered_product2_checked, make_local_field2, AdmissibleTriple2, Automorphism2, Coeff, FilteredObject2, Shape, Win2};
use crate::finabel::identities::{identity_suite, random_function, random_group, random_scalar, random_triple};
use crate::finabel::{fourier_c0, poisson_c0_check, MeasureC0};
use crate::harm1::{images1, pairing1, poisson1_check, DistC1, Element1, ImageMode1, MeasureLine1, SchwartzC1};
use crate::harm2::basechange::{desk_square_triple, desk_three_zvezda, desk_zvezda, hypothesis as ut_hypothesis, square_hypothesis};
use crate::harm2::images::{adjoint_check, endpoints, standard_mu, standard_nu};
use crate::harm2::{base_change2_check, fourier2_check, poisson2_i_check, poisson2_ii_check, pppp_check, DistC2, Elem2, ImageMode2, Kind, SchwartzC2, Square};
use crate::par::Exec;
use crate::report::{timed, Case, Report};
use crate::vmeas::{canonical_one, dual_transport, kappa, transport_lg, VirtualMeasure};
use crate::{Error, Result, C64};

pub const SUITES: [&str; 16] = [
    "fourier-c0",
    "images-c0",
    "poisson-c0",
    "archimed",
    "harm1",
    "boxes",
    "vmeas",
    "fourier2",
    "images2",
    "basechange",
    "centext",
    "poisson2",
    "adelic-curve",
    "adelic-surface",
    "adelic-numberfield",
    "analogy",
];

pub fn list_suites() -> Vec<&'static str> {
    SUITES.to_vec()
}

pub const DEFAULT_SEED: u64 = 1;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub suite: String,
    /// Suite-specific parameters; missing fields take their defaults.
    #[serde(default)]
    pub params: Value,
    /// Tolerance for deviation cases; the suite default when absent.
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Report path used when none is given on the command line.
    #[serde(default)]
    pub output: Option<String>,
}

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl Scenario {
    pub fn new(suite: &str) -> Self {
        Scenario { suite: suite.into(), ..Default::default() }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(s);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            if path == "." {
                config(format!("scenario: {}", e.inner()))
            } else {
                config(format!("{path}: {}", e.inner()))
            }
        })
    }
}

fn parse<P: DeserializeOwned + Default>(v: &Value) -> Result<P> {
    if v.is_null() {
        return Ok(P::default());
    }
    serde_path_to_error::deserialize(v.clone()).map_err(|e| config(format!("params.{}: {}", e.path(), e.inner())))
}

fn check_q(field: &str, qs: &[i64], allowed: &[i64]) -> Result<()> {
    if qs.is_empty() {
        return Err(config(format!("params.{field}: must not be empty")));
    }
    for (i, &q) in qs.iter().enumerate() {
        if !allowed.contains(&q) {
            return Err(config(format!("params.{field}[{i}]: q = {q} not in {allowed:?}")));
        }
    }
    Ok(())
}

fn check_range(field: &str, v: i64, lo: i64, hi: i64) -> Result<()> {
    if v < lo || v > hi {
        return Err(config(format!("params.{field}: {v} outside [{lo}, {hi}]")));
    }
    Ok(())
}

type Built = (Value, Vec<Case>);

/// Executes the named suite.  Case order is canonical whatever the execution order.
pub fn run_suite(sc: &Scenario) -> Result<Report> {
    let tol = match sc.tol {
        Some(t) if !(t.is_finite() && t > 0.0) => return Err(config(format!("tol: {t} must be a positive finite number"))),
        Some(t) => t,
        None if sc.suite == "archimed" => 1e-10,
        None => 1e-9,
    };
    let seed = sc.seed.unwrap_or(DEFAULT_SEED);
    let p = &sc.params;
    if !(p.is_null() || p.is_object()) {
        return Err(config("params: must be an object"));
    }
    let start = Instant::now();
    let (params, cases): Built = match sc.suite.as_str() {
        "fourier-c0" => fourier_c0_suite(p, seed, tol)?,
        "images-c0" => images_c0_suite(p, seed, tol)?,
        "poisson-c0" => poisson_c0_suite(p, seed, tol)?,
        "archimed" => archimed_suite(p, seed, tol)?,
        "harm1" => harm1_suite(p, seed, tol)?,
        "boxes" => boxes_suite(p)?,
        "vmeas" => vmeas_suite(p, tol)?,
        "fourier2" => fourier2_suite(p, seed, tol)?,
        "images2" => images2_suite(p, seed, tol)?,
        "basechange" => basechange_suite(p, seed, tol)?,
        "centext" => centext_suite(p, seed, tol)?,
        "poisson2" => poisson2_suite(p, tol)?,
        "adelic-curve" => adelic_curve_suite(p)?,
        "adelic-surface" => adelic_surface_suite(p)?,
        "adelic-numberfield" => adelic_numberfield_suite(p)?,
        "analogy" => analogy_suite(p)?,
        other => return Err(config(format!("suite: unknown suite `{other}` (see `alharm list`)"))),
    };
    let mut r = Report::new(&sc.suite, seed, tol, params, cases);
    // cases computed in parallel overlap; report wall time instead of their sum
    r.summary.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(r)
}

fn run_cases<T: Send>(items: Vec<T>, f: impl Fn(T) -> Vec<Case> + Sync + Send) -> Vec<Case> {
    Exec::current().map(items, f).concat()
}

fn case_seeds(seed: u64, n: usize) -> Vec<(usize, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| (i, rng.gen())).collect()
}

fn to_value(p: &impl Serialize) -> Value {
    serde_json::to_value(p).expect("params serialize")
}

fn rel<K: Kind>(a: &Elem2<K>, b: &Elem2<K>) -> f64 {
    a.max_dev(b) / a.values().norm_max().max(b.values().norm_max()).max(1.0)
}

fn field(q: i64, t: (i64, i64), u: (i64, i64)) -> Result<FilteredObject2> {
    make_local_field2(Coeff::Fq(q), t, u)
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn mono(a: i64, b: i64, s: i64) -> Automorphism2 {
    Automorphism2::monomial(a, b, s)
}

// ---- finite groups ----

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomParams {
    count: usize,
    max_order: usize,
}

fn random_params(p: &Value, cap: usize) -> Result<RandomParams> {
    let d: RandomParams = parse(p)?;
    if d.count == 0 {
        return Err(config("params.count: must be >= 1"));
    }
    if d.max_order == 0 || d.max_order > cap {
        return Err(config(format!("params.max_order: {} outside [1, {cap}]", d.max_order)));
    }
    Ok(d)
}

fn with_defaults(p: &Value, count: usize, max_order: usize) -> Value {
    let mut v = serde_json::json!({ "count": count, "max_order": max_order });
    if let Some(o) = p.as_object() {
        for (k, x) in o {
            v[k] = x.clone();
        }
    }
    v
}

fn fourier_c0_suite(p: &Value, seed: u64, tol: f64) -> Result<Built> {
    let d = random_params(&with_defaults(p, 200, 4096), 1 << 16)?;
    let cases = run_cases(case_seeds(seed, d.count), |(i, s)| {
        let name = format!("inversion/{i:03}");
        timed(&name.clone(), || {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let g = random_group(&mut rng, d.max_order);
            let f = random_function(&mut rng, &g);
            let mu = MeasureC0::new(&g, random_scalar(&mut rng));
            let back = fourier_c0(&fourier_c0(&f, &mu)?, &mu.inverse()?)?;
            Ok(vec![Case::deviation(name, back.max_dev(&f.check()), tol).with("moduli", g.moduli()).with("order", g.order())])
        })
    });
    Ok((to_value(&d), cases))
}

fn images_c0_suite(p: &Value, seed: u64, tol: f64) -> Result<Built> {
    let d = random_params(&with_defaults(p, 10, 256), 4096)?;
    let cases = run_cases(case_seeds(seed, d.count), |(i, s)| {
        timed(&format!("round{i:02}"), || {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            Ok(identity_suite(&mut rng, d.max_order)?
                .into_iter()
                .map(|c| Case::deviation(format!("round{i:02}/{}", c.name), c.max_deviation, tol))
                .collect())
        })
    });
    Ok((to_value(&d), cases))
}

fn poisson_c0_suite(p: &Value, seed: u64, tol: f64) -> Result<Built> {
    let d = random_params(&with_defaults(p, 100, 1024), 1 << 14)?;
    let cases = run_cases(case_seeds(seed, d.count), |(i, s)| {
        let name = format!("poisson/{i:03}");
        timed(&name.clone(), || {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let t = random_triple(&mut rng, d.max_order);
            let mu1 = MeasureC0::new(&t.g1, random_scalar(&mut rng));
            let mu3 = MeasureC0::new(&t.g3.dual(), random_scalar(&mut rng));
            let r = poisson_c0_check(&t, &mu1, &mu3)?;
            let orders = [t.g1.order(), t.g2.order(), t.g3.order()];
            Ok(vec![Case::deviation(name, r.max_deviation, tol).with("orders", orders)])
        })
    });
    Ok((to_value(&d), cases))
}

// ---- archimedean ----

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ArchimedParams {
    max_degree: usize,
    points: Vec<f64>,
    random_inputs: usize,
}

impl Default for ArchimedParams {
    fn default() -> Self {
        ArchimedParams { max_degree: 12, points: vec![-2.0, -1.3, -0.2, 0.0, 0.45, 1.0, 2.0], random_inputs: 8 }
    }
}

fn archimed_suite(p: &Value, seed: u64, tol: f64) -> Result<Built> {
    let d: ArchimedParams = parse(p)?;
    let cut = Cutoffs::default();
    check_range("max_degree", d.max_degree as i64, 0, cut.hermite as i64 - 1)?;
    if d.points.is_empty() || d.points.iter().any(|x| !x.is_finite() || x.abs() > 6.0) {
        return Err(config("params.points: need finite points with |y| <= 6"));
    }
    let mut cases = run_cases((0..=d.max_degree).collect(), |m| {
        let name = format!("hermite/{m:02}");
        timed(&name.clone(), || {
            let dev = d
                .points
                .iter()
                .map(|&y| (transform_by_quadrature(m, y) - eigenvalue(m) * hermite(m, y)).norm())
                .fold(0.0, f64::max);
            Ok(vec![Case::deviation(name, dev, tol)])
        })
    });
    let mut inputs: Vec<(String, Vec<C64>)> = (0..=d.max_degree)
        .map(|m| {
            let mut v = vec![c(0.0); m + 1];
            v[m] = c(1.0);
            (format!("lattice/h{m:02}"), v)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..d.random_inputs {
        let v = (0..=d.max_degree)
            .map(|k| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 0.7f64.powi(k as i32))
            .collect();
        inputs.push((format!("lattice/random{i:02}"), v));
    }
    cases.extend(run_cases(inputs, |(name, v)| {
        timed(&name.clone(), || {
            let r = poisson_lattice_check(&v, &cut)?;
            Ok(vec![Case::deviation(name, r.max_deviation, tol).with("terms", r.n_terms)])
        })
    }));
    Ok((to_value(&d), cases))
}

// ---- one-dimensional ----

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct Harm1Params {
    q: Vec<i64>,
    window: (i64, i64),
}

impl Default for Harm1Params {
    fn default() -> Self {
        Harm1Params { q: vec![2, 3], window: (-2, 2) }
    }
}

fn random_full(rng: &mut ChaCha8Rng, e: &FilteredObject1) -> Result<Vec<C64>> {
    let n = e.fin()?.0.order();
    Ok((0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
}

fn harm1_suite(p: &Value, seed: u64, tol: f64) -> Result<Built> {
    let d: Harm1Params = parse(p)?;
    check_q("q", &d.q, &[2, 3, 5, 7])?;
    let (lo, hi) = d.window;
    if lo > 0 || hi < 0 || hi - lo > 6 {
        return Err(config(format!("params.window: [{lo}, {hi}] must contain 0 and have width <= 6")));
    }
    let cases = run_cases(d.q.clone(), |q| {
        timed(&format!("q{q}"), || {
            let t = AdmissibleTriple1::laurent(q, lo, hi)?;
            let mut out = vec![];
            for (k, (a, b)) in [(c(1.0), c(1.0)), (c(2.0), C64::new(0.5, 0.5))].into_iter().enumerate() {
                let mu1 = MeasureLine1::new(&t.e1, a);
                let mu3 = MeasureLine1::new(&t.e3.dual1(), b);
                let r = poisson1_check(&t, &mu1, &mu3)?;
                out.push(Case::deviation(format!("q{q}/poisson/{k}"), r.max_deviation, tol).hyp("E1 compact, E3 discrete"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ q as u64);
            let mu1 = MeasureLine1::new(&t.e1, C64::new(0.7, 0.2));
            let pairs = [
                (ImageMode1::I1, ImageMode1::I2, &t.e2, &t.e3),
                (ImageMode1::I3, ImageMode1::I4, &t.e2, &t.e1),
                (ImageMode1::I5, ImageMode1::I6, &t.e3, &t.e2),
                (ImageMode1::I7, ImageMode1::I8, &t.e1, &t.e2),
            ];
            for (fm, dm, src, dst) in pairs {
                let f = SchwartzC1::from_full(src, random_full(&mut rng, src)?)?;
                let h = DistC1::from_full(dst, random_full(&mut rng, dst)?)?;
                let lhs = pairing1(&images1(&t, &Element1::F(f.clone()), fm, &mu1)?.function()?, &h)?;
                let rhs = pairing1(&f, &images1(&t, &Element1::D(h), dm, &mu1)?.dist()?)?;
                let dev = (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1.0);
                out.push(Case::deviation(format!("q{q}/adjoint/{fm:?}-{dm:?}"), dev, tol));
            }
            Ok(out)
        })
    });
    Ok((to_value(&d), cases))
}

// ---- two-dimensional structure ----

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct QParams {
    q: Vec<i64>,
}

impl Default for QParams {
    fn default() -> Self {
        QParams { q: vec![2, 3] }
    }
}

fn q_params(p: &Value) -> Result<QParams> {
    let d: QParams = parse(p)?;
    check_q("q", &d.q, &[2, 3])?;
    Ok(d)
}

fn boxes_suite(p: &Value) -> Result<Built> {
    let d = q_params(p)?;
    let cases = run_cases(d.q.clone(), |q| {
        timed(&format!("q{q}"), || {
            let mut out = vec![];
            let e = field(q, (-1, 1), (-1, 1))?;
            let t = AdmissibleTriple2::from_sub(&e, &Shape::t_at_least(1))?;
            let z = fibered_product2_checked(&t, &Shape::rect((None, None), (Some(-1), Some(0))))?;
            let r = z.check_levelwise(9)?;
            out.push(
                Case::defect(format!("q{q}/fibered-product/levelwise"), r.failures.len() as u64)
                    .with("pairs", r.pairs)
                    .with("skipped", r.skipped)
                    .require(r.pairs > 0, "some level pairs checked"),
            );
            let left = AdmissibleTriple2::from_sub(&e, &Shape::t_at_least(0))?;
            let a = amalgam2(&left, &Shape::t_at_least(1))?;
            let r = a.check_levelwise(9)?;
            out.push(
                Case::defect(format!("q{q}/amalgam/levelwise"), r.failures.len() as u64)
                    .with("pairs", r.pairs)
                    .with("skipped", r.skipped)
                    .require(r.pairs > 0, "some level pairs checked"),
            );
            // predicate flags swap under duality
            let mut swaps = 0;
            for sub in [Shape::t_at_least(0), Shape::u_at_least(0)] {
                let tr = AdmissibleTriple2::from_sub(&e, &sub)?;
                for o in [&tr.e1, &tr.e3] {
                    let (x, y) = (o.predicates(), o.dual2().predicates());
                    swaps += ((x.c, x.d, x.cf, x.df) != (y.d, y.c, y.df, y.cf)) as u64;
                }
            }
            out.push(Case::defect(format!("q{q}/duality/predicate-swap"), swaps));
            let big = field(q, (-3, 3), (-2, 2))?;
            let sub = big.with_shape(Shape::t_at_least(0));
            let auts = [
                ("t-shift", &big, mono(0, 1, 1), true),
                ("u-shift", &big, mono(1, 0, q - 1), true),
                ("identity", &big, Automorphism2::identity(), true),
                ("t-inverse-on-lattice", &sub, mono(0, -1, 1), false),
                ("non-unit", &big, Automorphism2::identity().with_unit(vec![(-1, 1, 1)]), false),
            ];
            for (name, obj, g, want) in auts {
                let r = check_aut(obj, &g);
                let got = r.aut_prime && r.star;
                out.push(
                    Case::defect(format!("q{q}/aut/{name}"), (got != want) as u64)
                        .with("aut_prime", r.aut_prime)
                        .with("star", r.star),
                );
            }
            Ok(out)
        })
    });
    Ok((to_value(&d), cases))
}

fn vmeas_suite(p: &Value, tol: f64) -> Result<Built> {
    let d = q_params(p)?;
    let cases = run_cases(d.q.clone(), |q| {
        timed(&format!("q{q}"), || {
            let mut out = vec![];
            let cf = field(q, (-2, 2), (-2, 2))?.with_shape(Shape::u_at_least(0));
            let (mut dev, mut n) = (0.0f64, 0);
            for i in -2..=1 {
                for j in -2..=1 {
                    for l in -2..=1 {
                        if let (Ok(a), Ok(b), Ok(ab)) = (canonical_one(&cf, i, j), canonical_one(&cf, j, l), canonical_one(&cf, i, l)) {
                            dev = dev.max(a.compose_gamma(&b)?.max_dev(&ab) / ab.scalar.norm().max(1.0));
                            n += 1;
                        }
                    }
                }
            }
            out.push(Case::deviation(format!("q{q}/canonical-one/cocycle"), dev, tol).hyp("E cf").with("triples", n).require(n > 0, "some triples"));
            let mixed = field(q, (-2, 2), (-2, 2))?.with_shape(Shape::u_at_least(-1).union(&Shape::t_at_least(1)));
            let mut kdev = 0.0f64;
            for i in -3..3 {
                for j in -3..3 {
                    for l in -3..3 {
                        for k in -3..3 {
                            let lhs = kappa(&mixed, i, j, k) * kappa(&mixed, j, l, k);
                            kdev = kdev.max((lhs - kappa(&mixed, i, l, k)).abs() / lhs.abs().max(1.0));
                        }
                    }
                }
            }
            out.push(Case::deviation(format!("q{q}/kappa/multiplicative"), kdev, tol));
            let e = field(q, (-4, 4), (-3, 3))?;
            let g = mono(-1, 1, q - 1);
            let a = VirtualMeasure::new(&e, -2, 0, c(2.0))?;
            let b = VirtualMeasure::new(&e, 0, 2, c(0.5))?;
            let lhs = transport_lg(&g, &a)?.compose_gamma(&transport_lg(&g, &b)?)?;
            let rhs = transport_lg(&g, &a.compose_gamma(&b)?)?;
            out.push(Case::deviation(format!("q{q}/transport/gamma-equivariant"), lhs.max_dev(&rhs), tol));
            let (g1, g2) = (mono(1, 1, 1), mono(1, -1, 1));
            let m = VirtualMeasure::new(&e, -1, 1, c(1.5))?;
            let both = transport_lg(&g1.compose(&g2, q, (8, 8)), &m)?;
            let step = transport_lg(&g1, &transport_lg(&g2, &m)?)?;
            out.push(Case::deviation(format!("q{q}/transport/composition"), both.max_dev(&step), tol));
            let one = canonical_one(&cf, -1, 1)?;
            let back = dual_transport(&dual_transport(&one));
            let bad = (back.i, back.j) != (one.i, one.j) || back.scalar != one.scalar || !back.parent.same_structure(&one.parent);
            out.push(Case::defect(format!("q{q}/dual-transport/involution"), bad as u64));
            Ok(out)
        })
    });
    Ok((to_value(&d), cases))
}

// ---- two-dimensional harmonic analysis ----

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxSpec {
    q: i64,
    t: (i64, i64),
    u: (i64, i64),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct Fourier2Params {
    boxes: Vec<BoxSpec>,
    rank: usize,
}

impl Default for Fourier2Params {
    fn default() -> Self {
        let b = |q, t, u| BoxSpec { q, t, u };
        Fourier2Params {
            boxes: vec![b(2, (-2, 1), (-1, 1)), b(3, (-1, 1), (-1, 0)), b(2, (-2, 1), (-2, 1)), b(3, (-2, 1), (-2, 1))],
            rank: 3,
        }
    }
}

fn fourier2_suite(p: &Value, seed: u64, tol: f64) -> Result<Built> {
    let d: Fourier2Params = parse(p)?;
    if d.boxes.is_empty() {
        return Err(config("params.boxes: must not be empty"));
    }
    for (i, b) in d.boxes.iter().enumerate() {
        check_q(&format!("boxes[{i}].q"), &[b.q], &[2, 3])?;
        for (name, (lo, hi)) in [("t", b.t), ("u", b.u)] {
            if hi < lo || hi - lo > 3 {
                return Err(config(format!("params.boxes[{i}].{name}: [{lo}, {hi}] must hold 1 to 4 values")));
            }
        }
    }
    check_range("rank", d.rank as i64, 1, 8)?;
    let items: Vec<(usize, BoxSpec)> = d.boxes.iter().cloned().enumerate().collect();
    let cases = run_cases(items, |(i, b)| {
        let name = format!("box{i}/q{}/{}x{}", b.q, b.t.1 - b.t.0 + 1, b.u.1 - b.u.0 + 1);
        timed(&name.clone(), || {
            let e = field(b.q, b.t, b.u)?.with_refs(0, 0)?;
            let w = e.full_window();
            let f = SchwartzC2::random(&e, w, d.rank, seed.wrapping_add(2 * i as u64))?;
            let g = DistC2::random(&e.dual2(), w.dual(), d.rank, seed.wrapping_add(2 * i as u64 + 1))?;
            let r = fourier2_check(&f, &g)?;
            Ok(vec![
                Case::deviation(format!("{name}/involution"), r.involution_dev, tol).with("points_log_q", r.points_log_q),
                Case::deviation(format!("{name}/dist-involution"), r.dist_involution_dev, tol),
                Case::deviation(format!("{name}/adjoint"), r.adjoint_dev, tol),
            ])
        })
    });
    Ok((to_value(&d), cases))
}

fn images2_suite(p: &Value, seed: u64, tol: f64) -> Result<Built> {
    let d = q_params(p)?;
    let items: Vec<(i64, ImageMode2)> = d.q.iter().flat_map(|&q| ImageMode2::ALL.map(|m| (q, m))).collect();
    let cases = run_cases(items, |(q, mode)| {
        let name = format!("q{q}/adjoint/{mode:?}");
        timed(&name.clone(), || {
            let e = field(q, (-1, 1), (-1, 1))?;
            let sub = if mode.needs_measure() { Shape::t_at_least(0) } else { Shape::u_at_least(0) };
            let t = AdmissibleTriple2::from_sub(&e, &sub)?;
            let meas = match mode {
                ImageMode2::BetaLower => Some(standard_mu(&t, 1.7)?),
                ImageMode2::AlphaUpper => Some(standard_nu(&t, 0.6)?),
                _ => None,
            };
            let (src, dst) = endpoints(&t, mode);
            let f = SchwartzC2::random(src, src.full_window(), 2, seed)?;
            let h = DistC2::random(dst, dst.full_window(), 2, seed.wrapping_add(1))?;
            let r = adjoint_check(&t, mode, &f, &h, meas.as_ref())?;
            Ok(vec![Case::deviation(name, r.dev, tol).hyp(mode.hypothesis()).require(r.lhs.norm() > 1e-12, "nonzero pairing")])
        })
    });
    Ok((to_value(&d), cases))
}

fn basechange_suite(p: &Value, seed: u64, tol: f64) -> Result<Built> {
    let d = q_params(p)?;
    let desk = |q: i64| if q == 2 { ((-3, 2), (-1, 1)) } else { ((-2, 1), (-1, 0)) };
    let square_box = |q: i64| if q == 2 { ((-2, 1), (-1, 1)) } else { ((-1, 1), (-1, 0)) };
    let mut items: Vec<(i64, u8, bool)> = vec![];
    for &q in &d.q {
        items.extend((1..=16).map(|id| (q, id, true)));
        items.extend((1..=8).map(|sq| (q, sq, false)));
    }
    let cases = run_cases(items, |(q, id, ut)| {
        let name = if ut { format!("q{q}/ut{id:02}") } else { format!("q{q}/square{id}") };
        timed(&name.clone(), || {
            let s = seed.wrapping_add(id as u64);
            if ut {
                let (t, u) = desk(q);
                let sq = if id <= 12 { Square::Zvezda(desk_zvezda(q, t, u)?) } else { Square::Three(desk_three_zvezda(q, t, u)?) };
                let r = base_change2_check(&sq, id, 1.3, 0.7, s)?;
                Ok(vec![Case::deviation(name, r.max_deviation, tol)
                    .hyp(ut_hypothesis(id))
                    .with("lhs_norm", r.lhs_norm)
                    .with("points_log_q", r.points_log_q)
                    .require(r.lhs_norm > 1e-9, "nondegenerate left side")])
            } else {
                let (t, u) = square_box(q);
                let r = pppp_check(&desk_square_triple(q, t, u)?, id, 1.5, 0.8, s)?;
                Ok(vec![Case::deviation(name, r.max_deviation, tol).hyp(square_hypothesis(id)).with("points_log_q", r.points_log_q)])
            }
        })
    });
    Ok((to_value(&d), cases))
}

fn centext_suite(p: &Value, seed: u64, tol: f64) -> Result<Built> {
    let d = q_params(p)?;
    let strict = tol.min(1e-12);
    let cases = run_cases(d.q.clone(), |q| {
        timed(&format!("q{q}"), || {
            let mut out = vec![];
            let cf = |e: &FilteredObject2| -> Result<FilteredObject2> { e.with_refs(0, 0) };
            // group axioms, exact
            let e = cf(&field(q, (-4, 4), (-4, 4))?)?;
            let xs = [
                CentralExtElement::lift(&e, &mono(1, 1, 1).with_unit(vec![(1, 0, 1)]), c(2.0))?,
                CentralExtElement::lift(&e, &mono(-1, 0, q - 1), C64::new(0.5, 0.5))?,
                CentralExtElement::lift(&e, &mono(0, -1, 1), c(-4.0))?,
            ];
            let one = CentralExtElement::unit(&e)?;
            let (mut assoc, mut unit, mut inv, mut proj, mut n) = (0u64, 0u64, 0u64, 0u64, 0);
            for x in &xs {
                unit += !(one.mul(x)?.same_as(x) && x.mul(&one)?.same_as(x)) as u64;
                inv += !(x.mul(&x.inv()?)?.same_as(&one) && x.inv()?.mul(x)?.same_as(&one)) as u64;
                for y in &xs {
                    let xy = x.mul(y)?;
                    let prec = (9, 9);
                    proj += !xy.g.same_as(&x.g.compose(&y.g, q, prec), q, prec) as u64;
                    for z in &xs {
                        assoc += !xy.mul(z)?.same_as(&x.mul(&y.mul(z)?)?) as u64;
                        n += 1;
                    }
                }
            }
            out.push(Case::defect(format!("q{q}/group/associativity"), assoc).with("triples", n));
            out.push(Case::defect(format!("q{q}/group/unit"), unit));
            out.push(Case::defect(format!("q{q}/group/inverse"), inv));
            out.push(Case::defect(format!("q{q}/group/projection"), proj));
            // representation and invariance of the pairing
            let e = cf(&field(q, (-3, 2), (-2, 2))?)?;
            let xs = [
                CentralExtElement::lift(&e, &mono(1, 0, 1), c(2.0))?,
                CentralExtElement::lift(&e, &mono(0, -1, q - 1).with_unit(vec![(1, 1, 1)]), c(0.5))?,
                CentralExtElement::lift(&e, &mono(-1, 1, 1), C64::new(0.0, 1.0))?,
            ];
            let w = Win2 { q: -2, p: 2, kl: -2, kh: 1 };
            let f = SchwartzC2::random(&e, w, 2, seed)?;
            let h = DistC2::random(&e, w, 2, seed.wrapping_add(1))?;
            let mf3 = xs.iter().map(|x| pairing_invariance(x, &f, &h)).collect::<Result<Vec<_>>>()?;
            out.push(Case::deviation(format!("q{q}/pairing-invariance"), mf3.into_iter().fold(0.0, f64::max), strict));
            let (x, y) = (&xs[0], &xs[1]);
            let fun = rel(&rep_r(x, &rep_r(y, &f)?)?, &rep_r(&x.mul(y)?, &f)?);
            let dist = rel(&rep_r_dist(x, &rep_r_dist(y, &h)?)?, &rep_r_dist(&x.mul(y)?, &h)?);
            out.push(Case::deviation(format!("q{q}/representation/functions"), fun, strict));
            out.push(Case::deviation(format!("q{q}/representation/distributions"), dist, strict));
            // Fourier equivariance
            let e = cf(&field(q, (-2, 2), (-2, 1))?)?;
            let full = e.full_window();
            let w = Win2 { q: full.q + 1, p: full.p - 1, kl: full.kl + 1, kh: full.kh - 1 };
            let f = SchwartzC2::random(&e, w, 2, seed.wrapping_add(2))?;
            let h = DistC2::random(&e, w, 2, seed.wrapping_add(3))?;
            let gs = [("u", mono(1, 0, 1)), ("t", mono(0, 1, q - 1)), ("mixed", mono(-1, -1, 1).with_unit(vec![(1, 0, 1)]))];
            for (name, g) in gs {
                let x = CentralExtElement::lift(&e, &g, c(1.5))?;
                let r = fourier_equivariance_check(&x, &f, &h)?;
                out.push(Case::deviation(format!("q{q}/equivariance/{name}"), r.fun_dev.max(r.dist_dev), tol).hyp("(*)"));
            }
            // commutator scalar of t and u: independent of lifts and of the box
            let mut seen = vec![];
            let mut lift_defect = 0u64;
            for (t, u) in [((-3, 3), (-3, 3)), ((-4, 4), (-3, 3)), ((-4, 5), (-5, 4))] {
                let e = cf(&field(q, t, u)?)?;
                let tt = CentralExtElement::lift(&e, &mono(0, 1, 1), c(1.0))?;
                let uu = CentralExtElement::lift(&e, &mono(1, 0, 1), c(1.0))?;
                let base = commutator_scalar(&tt, &uu)?;
                let t2 = tt.mul(&CentralExtElement::scalar(&e, c(2.0))?)?;
                let u2 = uu.mul(&CentralExtElement::scalar(&e, C64::new(0.0, -1.0))?)?;
                lift_defect += (commutator_scalar(&t2, &u2)? != base) as u64;
                seen.push(base);
            }
            let box_defect = seen.windows(2).filter(|w| w[0] != w[1]).count() as u64;
            out.push(
                Case::defect(format!("q{q}/commutator/lift-independent"), lift_defect + box_defect)
                    .with("coef", [seen[0].0.re, seen[0].0.im])
                    .with("log_q", seen[0].1),
            );
            Ok(out)
        })
    });
    Ok((to_value(&d), cases))
}

fn poisson2_suite(p: &Value, tol: f64) -> Result<Built> {
    let d = q_params(p)?;
    let has = |q: i64| d.q.contains(&q);
    let mut jobs: Vec<(String, Box<dyn Fn() -> Result<Vec<Case>> + Send + Sync>)> = vec![];
    for (q, t, u, cut) in [(2, (-1, 1), (-1, 1), 0), (3, (-2, 1), (-1, 1), 0), (2, (-2, 2), (-1, 0), 1)] {
        if !has(q) {
            continue;
        }
        for (m, n) in [(1.0, 1.0), (2.0, 0.25)] {
            let name = format!("q{q}/poisson-i/t{}..{}/u{}..{}/cut{cut}/m{m}-n{n}", t.0, t.1, u.0, u.1);
            jobs.push((
                name.clone(),
                Box::new(move || {
                    let tr = AdmissibleTriple2::from_sub(&field(q, t, u)?, &Shape::t_at_least(cut))?;
                    let r = poisson2_i_check(&tr, &standard_mu(&tr, m)?, &standard_nu(&tr, n)?)?;
                    Ok(vec![
                        Case::deviation(format!("{name}/lemma"), r.lemma_dev, tol).hyp("E1 c, E3 d"),
                        Case::deviation(format!("{name}/formula"), r.poisson_dev, tol).hyp("E1 c, E3 d").with("points_log_q", r.points_log_q),
                    ])
                }),
            ));
        }
    }
    for (q, t, u) in [(2, (-1, 1), (-1, 1)), (3, (-1, 0), (-2, 1))] {
        if !has(q) {
            continue;
        }
        let name = format!("q{q}/poisson-ii/t{}..{}/u{}..{}", t.0, t.1, u.0, u.1);
        jobs.push((
            name.clone(),
            Box::new(move || {
                let tr = AdmissibleTriple2::from_sub(&field(q, t, u)?, &Shape::u_at_least(0))?;
                let r = poisson2_ii_check(&tr)?;
                Ok(vec![
                    Case::deviation(format!("{name}/lemma"), r.lemma_dev, tol).hyp("E1 cf, E3 df"),
                    Case::deviation(format!("{name}/formula"), r.poisson_dev, tol).hyp("E1 cf, E3 df").with("points_log_q", r.points_log_q),
                ])
            }),
        ));
    }
    if has(2) {
        let lifts = [("u", mono(1, 0, 1), c(1.0)), ("u-scaled", mono(1, 0, 1), c(2.0)), ("central", mono(0, 0, 1), C64::new(0.0, 1.0))];
        for (gname, g, sc) in lifts {
            let name = format!("q2/twisted-i/{gname}");
            jobs.push((
                name.clone(),
                Box::new(move || {
                    let e = field(2, (-1, 2), (-2, 1))?.with_refs(0, 0)?;
                    let s = Shape::t_at_least(1).union(&Shape::rect((Some(0), None), (Some(0), Some(0))));
                    let t = AdmissibleTriple2::from_sub(&e, &s)?;
                    let (kl, kh) = e.inner_window();
                    let x = CentralExtElement::lift(&e, &g, sc)?;
                    let r = twisted_poisson_i_check(&t, &x, 1.5, 0.5, kl + g.alpha, kh)?;
                    Ok(twisted_cases(&name, r.transport_dev, r.dual_transport_dev, r.corollary_dev, tol))
                }),
            ));
        }
    }
    if has(3) {
        for (gname, g) in [("u", mono(1, 0, 2)), ("t", mono(0, 1, 1))] {
            let name = format!("q3/twisted-ii/{gname}");
            jobs.push((
                name.clone(),
                Box::new(move || {
                    let e = field(3, (-1, 1), (-2, 1))?.with_refs(0, 0)?;
                    let t = AdmissibleTriple2::from_sub(&e, &Shape::u_at_least(0))?;
                    let full = e.full_window();
                    let x = CentralExtElement::lift(&e, &g, c(1.0))?;
                    let w = Win2 { q: full.q + g.beta, kl: full.kl + g.alpha, ..full };
                    let r = twisted_poisson_ii_check(&t, &x, w)?;
                    Ok(twisted_cases(&name, r.transport_dev, r.dual_transport_dev, r.corollary_dev, tol))
                }),
            ));
        }
    }
    let cases = run_cases(jobs, |(name, job)| timed(&name, job));
    Ok((to_value(&d), cases))
}

fn twisted_cases(name: &str, tr: f64, dual: f64, cor: f64, tol: f64) -> Vec<Case> {
    vec![
        Case::deviation(format!("{name}/transport"), tr, tol).hyp("(*)"),
        Case::deviation(format!("{name}/dual-transport"), dual, tol).hyp("(*)"),
        Case::deviation(format!("{name}/corollary"), cor, tol).hyp("(*)"),
    ]
}

// ---- adelic ----

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct CurveParams {
    q: Vec<i64>,
    degrees: (i64, i64),
    /// extra truncation beyond the minimum the degree needs
    margin: i64,
    max_level: i64,
}

impl Default for CurveParams {
    fn default() -> Self {
        CurveParams { q: vec![2, 3], degrees: (-3, 6), margin: 1, max_level: 3 }
    }
}

fn rational_places(q: i64) -> Result<Vec<(String, Place)>> {
    Ok(vec![
        ("u".into(), Place::finite(q, vec![0, 1])?),
        ("u+1".into(), Place::finite(q, vec![1, 1])?),
        ("inf".into(), Place::Infinity),
    ])
}

fn adelic_curve_suite(p: &Value) -> Result<Built> {
    let d: CurveParams = parse(p)?;
    check_q("q", &d.q, &[2, 3, 5, 7])?;
    let (lo, hi) = d.degrees;
    if lo > hi || lo < -8 || hi > 8 {
        return Err(config(format!("params.degrees: [{lo}, {hi}] must lie in [-8, 8]")));
    }
    check_range("margin", d.margin, 0, 4)?;
    check_range("max_level", d.max_level, 0, 4)?;
    let mut items: Vec<(i64, i64, bool)> = vec![];
    for &q in &d.q {
        items.extend((lo..=hi).map(|n| (q, n, true)));
        items.extend((0..=d.max_level).map(|l| (q, l, false)));
    }
    let cases = run_cases(items, |(q, k, rr)| {
        if rr {
            let name = format!("q{q}/riemann-roch/n{k:+}");
            timed(&name.clone(), || {
                let t = (k + 2).max(1 - k) + d.margin;
                let r = adelic::adelic_complex_curve(q, k, t)?;
                let (h0, h1) = ((k + 1).max(0) as usize, (-k - 1).max(0) as usize);
                let defect = r.h0.abs_diff(h0) + r.h1.abs_diff(h1);
                Ok(vec![Case::defect(name, defect as u64)
                    .with("h0", r.h0)
                    .with("h1", r.h1)
                    .with("truncation", t)
                    .with("ambient_dim", r.ambient_dim)])
            })
        } else {
            timed(&format!("q{q}/sequence/level{k}"), || {
                let mut out = vec![];
                for (pname, place) in rational_places(q)? {
                    let r = adelic::curve_quotient_sequence_check(q, &place, k)?;
                    let defect = r.defect + !r.first_term_compact as usize + !r.quotient_compact as usize;
                    out.push(
                        Case::defect(format!("q{q}/sequence/level{k}/{pname}"), defect as u64)
                            .with("dims", [r.first_dim, r.middle_dim, r.last_dim])
                            .with("ambient_dim", r.ambient_dim),
                    );
                }
                Ok(out)
            })
        }
    });
    Ok((to_value(&d), cases))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SurfaceParams {
    q: Vec<i64>,
    max_n: i64,
    theorem4_max_n: i64,
}

impl Default for SurfaceParams {
    fn default() -> Self {
        SurfaceParams { q: vec![2, 3], max_n: 8, theorem4_max_n: 2 }
    }
}

fn adelic_surface_suite(p: &Value) -> Result<Built> {
    let d: SurfaceParams = parse(p)?;
    check_q("q", &d.q, &[2, 3, 5, 7])?;
    check_range("max_n", d.max_n, 0, surface_max())?;
    check_range("theorem4_max_n", d.theorem4_max_n, 0, 3)?;
    let mut items: Vec<(i64, i64, bool)> = vec![];
    for &q in &d.q {
        items.extend((0..=d.max_n).map(|n| (q, n, true)));
        items.extend((0..=d.theorem4_max_n).map(|n| (q, n, false)));
    }
    let cases = run_cases(items, |(q, n, quotient)| {
        let name = if quotient { format!("q{q}/quotient/N{n}") } else { format!("q{q}/theorem4/N{n}") };
        timed(&name.clone(), || {
            let want = (n * n) as usize;
            if quotient {
                let dim = adelic::surface_quotient_dimension(q, n)?;
                Ok(vec![Case::defect(name, dim.abs_diff(want) as u64).with("dim", dim)])
            } else {
                let r = adelic::theorem4_truncated_check(q, n)?;
                let defect = r.lhs_dim.abs_diff(r.rhs_dim) + r.lhs_dim.abs_diff(want) + r.adlemm_defect + r.bx_gap;
                Ok(vec![Case::defect(name, defect as u64)
                    .with("lhs_dim", r.lhs_dim)
                    .with("rhs_dim", r.rhs_dim)
                    .with("bx_curve_bound", r.bx_curve_bound)
                    .with("bx_gap", r.bx_gap)])
            }
        })
    });
    Ok((to_value(&d), cases))
}

fn surface_max() -> i64 {
    adelic::surface::MAX_BOX as i64
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PrimeSet {
    primes: Vec<i64>,
    moduli: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct NumberFieldParams {
    sets: Vec<PrimeSet>,
}

impl Default for NumberFieldParams {
    fn default() -> Self {
        let s = |primes: &[i64], moduli: &[i64]| PrimeSet { primes: primes.to_vec(), moduli: moduli.to_vec() };
        NumberFieldParams { sets: vec![s(&[], &[]), s(&[2], &[2]), s(&[2, 3, 5], &[8, 9, 25]), s(&[7, 11], &[49, 11])] }
    }
}

fn adelic_numberfield_suite(p: &Value) -> Result<Built> {
    let d: NumberFieldParams = parse(p)?;
    if d.sets.is_empty() {
        return Err(config("params.sets: must not be empty"));
    }
    for (i, s) in d.sets.iter().enumerate() {
        if s.primes.len() != s.moduli.len() {
            return Err(config(format!("params.sets[{i}].moduli: one modulus per prime")));
        }
        if let Some(j) = s.primes.iter().position(|&x| !is_prime(x)) {
            return Err(config(format!("params.sets[{i}].primes[{j}]: {} is not prime", s.primes[j])));
        }
    }
    let items: Vec<(usize, PrimeSet)> = d.sets.iter().cloned().enumerate().collect();
    let cases = run_cases(items, |(i, s)| {
        let name = format!("set{i}/{:?}", s.primes);
        timed(&name.clone(), || {
            let r = adelic::number_field_desk_check(&s.primes, &s.moduli)?;
            let flags = [r.crt_surjective, r.p_discrete, r.r_compact, r.q_neither, r.dual_swap, r.levelwise_exact];
            let defect = flags.iter().filter(|&&b| !b).count() as u64;
            Ok(vec![Case::defect(name, defect).with("moduli", &s.moduli).with("images_seen", r.images_seen)])
        })
    });
    Ok((to_value(&d), cases))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct AnalogyParams {
    max_n: i64,
}

impl Default for AnalogyParams {
    fn default() -> Self {
        AnalogyParams { max_n: 4 }
    }
}

fn analogy_suite(p: &Value) -> Result<Built> {
    let d: AnalogyParams = parse(p)?;
    check_range("max_n", d.max_n, 0, 64)?;
    let cases = run_cases((0..=d.max_n).collect(), |n| {
        let name = format!("series/N{n}");
        timed(&name.clone(), || {
            let r = adelic::arithmetic_analogy_series(n)?;
            let circles = r.degrees.iter().filter(|x| x.descriptor == adelic::CoefQuotient::Circle).count();
            let defect = !r.pattern_ok as u64 + !r.circle_dual_ok as u64 + (circles != n as usize) as u64;
            Ok(vec![Case::defect(name, defect).with("degrees", r.degrees.len()).with("circles", circles)])
        })
    });
    Ok((to_value(&d), cases))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_suites_in_order() {
        let l = list_suites();
        assert_eq!(l.len(), 16);
        assert_eq!(l[0], "fourier-c0");
        assert!(l.contains(&"poisson2"));
        assert_eq!(l, list_suites());
    }

    #[test]
    fn unknown_suite_is_config_error() {
        match run_suite(&Scenario::new("nope")) {
            Err(Error::Config(m)) => assert!(m.starts_with("suite:")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_name_the_field() {
        let mut sc = Scenario::new("fourier-c0");
        sc.params = serde_json::json!({"count": "many"});
        let e = run_suite(&sc).unwrap_err().to_string();
        assert!(e.contains("params.count"), "{e}");
        sc.params = serde_json::json!({"bogus": 1});
        assert!(run_suite(&sc).unwrap_err().to_string().contains("bogus"));
        sc.params = serde_json::json!({"max_order": 0});
        assert!(run_suite(&sc).unwrap_err().to_string().contains("params.max_order"));
        let mut sc = Scenario::new("adelic-surface");
        sc.params = serde_json::json!({"q": [2, 4]});
        assert!(run_suite(&sc).unwrap_err().to_string().contains("params.q[1]"));
        let mut sc = Scenario::new("vmeas");
        sc.tol = Some(-1.0);
        assert!(run_suite(&sc).unwrap_err().to_string().starts_with("config error: tol"));
        let e = Scenario::from_json(r#"{"suite": "vmeas", "seed": "x"}"#).unwrap_err().to_string();
        assert!(e.contains("seed"), "{e}");
        let e = Scenario::from_json(r#"{"suite": "vmeas", "extra": 1}"#).unwrap_err().to_string();
        assert!(e.contains("extra"), "{e}");
    }

    #[test]
    fn small_fourier_suite_is_deterministic() {
        let mut sc = Scenario::new("fourier-c0");
        sc.params = serde_json::json!({"count": 5, "max_order": 64});
        sc.seed = Some(9);
        let a = run_suite(&sc).unwrap();
        let b = run_suite(&sc).unwrap();
        assert!(a.pass());
        assert_eq!(a.cases.len(), 5);
        assert_eq!(a.body().to_json(), b.body().to_json());
        assert_eq!(a.params["count"], 5);
    }

    #[test]
    fn sequential_matches_parallel() {
        let mut sc = Scenario::new("poisson-c0");
        sc.params = serde_json::json!({"count": 6, "max_order": 128});
        let a = run_suite(&sc).unwrap();
        Exec::set_current(Exec::Sequential);
        let b = run_suite(&sc);
        Exec::set_current(Exec::Parallel);
        assert_eq!(a.body().to_json(), b.unwrap().body().to_json());
    }

    #[test]
    fn analogy_and_numberfield_pass() {
        assert!(run_suite(&Scenario::new("analogy")).unwrap().pass());
        assert!(run_suite(&Scenario::new("adelic-numberfield")).unwrap().pass());
    }
}

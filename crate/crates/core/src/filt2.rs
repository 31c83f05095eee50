//! Two-dimensional window boxes spanned by monomials u^a t^b.
//!
//! Outer levels are F(i) = {b >= -i}, inner levels Λ_k = {a >= -k}. The
//! infinite object is described by a [`Shape`] in the (a, b) plane and the
//! box keeps the labels with b in `t_range`, a in `u_range`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::archimed::C0arObject;
use crate::filt1::{amalgam1, fibered_product1, AdmissibleTriple1, FilteredObject1, Tail};
use crate::finabel::{FinAbGroup, GroupHom, Subgroup};
use crate::{Error, IMat, Result};

/// Exponent pair (a, b) of the monomial u^a t^b.
pub type Label = (i64, i64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coeff {
    Fq(i64),
    Real,
}

impl Coeff {
    pub fn modulus(self) -> Option<i64> {
        match self {
            Coeff::Fq(q) => Some(q),
            Coeff::Real => None,
        }
    }
}

pub type Bound = (Option<i64>, Option<i64>);

const FAR: i64 = 1 << 40;

/// Region of the (a, b) plane built from closed rectangles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Shape {
    All,
    Empty,
    Rect { a: Bound, b: Bound },
    Inter { l: Box<Shape>, r: Box<Shape> },
    Union { l: Box<Shape>, r: Box<Shape> },
    Diff { l: Box<Shape>, r: Box<Shape> },
}

fn in_bound(x: i64, (lo, hi): Bound) -> bool {
    lo.map_or(true, |l| x >= l) && hi.map_or(true, |h| x <= h)
}

fn shift_bound((lo, hi): Bound, d: i64) -> Bound {
    (lo.map(|x| x + d), hi.map(|x| x + d))
}

fn reflect_bound((lo, hi): Bound) -> Bound {
    (hi.map(|x| -1 - x), lo.map(|x| -1 - x))
}

impl Shape {
    pub fn rect(a: Bound, b: Bound) -> Shape {
        Shape::Rect { a, b }
    }
    pub fn t_at_least(b: i64) -> Shape {
        Shape::rect((None, None), (Some(b), None))
    }
    pub fn t_at_most(b: i64) -> Shape {
        Shape::rect((None, None), (None, Some(b)))
    }
    pub fn u_at_least(a: i64) -> Shape {
        Shape::rect((Some(a), None), (None, None))
    }
    pub fn u_at_most(a: i64) -> Shape {
        Shape::rect((None, Some(a)), (None, None))
    }
    pub fn inter(&self, o: &Shape) -> Shape {
        Shape::Inter { l: Box::new(self.clone()), r: Box::new(o.clone()) }
    }
    pub fn union(&self, o: &Shape) -> Shape {
        Shape::Union { l: Box::new(self.clone()), r: Box::new(o.clone()) }
    }
    pub fn diff(&self, o: &Shape) -> Shape {
        Shape::Diff { l: Box::new(self.clone()), r: Box::new(o.clone()) }
    }

    pub fn contains(&self, (a, b): Label) -> bool {
        match self {
            Shape::All => true,
            Shape::Empty => false,
            Shape::Rect { a: ba, b: bb } => in_bound(a, *ba) && in_bound(b, *bb),
            Shape::Inter { l, r } => l.contains((a, b)) && r.contains((a, b)),
            Shape::Union { l, r } => l.contains((a, b)) || r.contains((a, b)),
            Shape::Diff { l, r } => l.contains((a, b)) && !r.contains((a, b)),
        }
    }

    /// Image under (a, b) -> (a + da, b + db).
    pub fn shifted(&self, da: i64, db: i64) -> Shape {
        self.map_rects(&|a, b| (shift_bound(a, da), shift_bound(b, db)))
    }

    /// Image under (a, b) -> (-1 - a, -1 - b), or only b when `both` is false.
    pub fn reflected(&self, both: bool) -> Shape {
        self.map_rects(&|a, b| (if both { reflect_bound(a) } else { a }, reflect_bound(b)))
    }

    fn map_rects(&self, f: &dyn Fn(Bound, Bound) -> (Bound, Bound)) -> Shape {
        let bx = |s: &Shape| Box::new(s.map_rects(f));
        match self {
            Shape::All | Shape::Empty => self.clone(),
            Shape::Rect { a, b } => {
                let (a, b) = f(*a, *b);
                Shape::Rect { a, b }
            }
            Shape::Inter { l, r } => Shape::Inter { l: bx(l), r: bx(r) },
            Shape::Union { l, r } => Shape::Union { l: bx(l), r: bx(r) },
            Shape::Diff { l, r } => Shape::Diff { l: bx(l), r: bx(r) },
        }
    }

    fn constants(&self, ca: &mut Vec<i64>, cb: &mut Vec<i64>) {
        match self {
            Shape::All | Shape::Empty => {}
            Shape::Rect { a, b } => {
                ca.extend([a.0, a.1].into_iter().flatten());
                cb.extend([b.0, b.1].into_iter().flatten());
            }
            Shape::Inter { l, r } | Shape::Union { l, r } | Shape::Diff { l, r } => {
                l.constants(ca, cb);
                r.constants(ca, cb);
            }
        }
    }

    /// Probe grid deciding membership questions exactly: every cell of the
    /// arrangement cut out by the rectangle bounds has a representative.
    fn grid(shapes: &[&Shape]) -> (Vec<i64>, Vec<i64>) {
        let (mut ca, mut cb) = (vec![], vec![]);
        for s in shapes {
            s.constants(&mut ca, &mut cb);
        }
        let reps = |c: &[i64]| {
            let lo = c.iter().copied().min().unwrap_or(0) - 2;
            let hi = c.iter().copied().max().unwrap_or(0) + 2;
            let mut v = vec![-FAR];
            v.extend(lo..=hi);
            v.push(FAR);
            v
        };
        (reps(&ca), reps(&cb))
    }

    pub fn is_empty(&self) -> bool {
        let (ra, rb) = Shape::grid(&[self]);
        !ra.iter().any(|&a| rb.iter().any(|&b| self.contains((a, b))))
    }

    pub fn is_subset_of(&self, o: &Shape) -> bool {
        self.diff(o).is_empty()
    }

    pub fn same_as(&self, o: &Shape) -> bool {
        self.is_subset_of(o) && o.is_subset_of(self)
    }

    /// No member with b below some bound.
    pub fn t_bounded_below(&self) -> bool {
        let (ra, _) = Shape::grid(&[self]);
        !ra.iter().any(|&a| self.contains((a, -FAR)))
    }

    pub fn t_bounded_above(&self) -> bool {
        let (ra, _) = Shape::grid(&[self]);
        !ra.iter().any(|&a| self.contains((a, FAR)))
    }

    /// Every row b has a bounded below.
    pub fn rows_bounded_below(&self) -> bool {
        let (_, rb) = Shape::grid(&[self]);
        !rb.iter().any(|&b| self.contains((-FAR, b)))
    }

    pub fn rows_bounded_above(&self) -> bool {
        let (_, rb) = Shape::grid(&[self]);
        !rb.iter().any(|&b| self.contains((FAR, b)))
    }

    pub fn meets(&self, a: Bound, b: Bound) -> bool {
        !self.inter(&Shape::rect(a, b)).is_empty()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predicates2 {
    pub c: bool,
    pub d: bool,
    pub cf: bool,
    pub df: bool,
}

/// Tail behaviour in the four directions; `Trivial` means the object stops.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tags2 {
    pub t_low: Tail,
    pub t_high: Tail,
    pub u_low: Tail,
    pub u_high: Tail,
}

/// Window F(p)/F(q) with inner window Λ_kh/Λ_kl.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Win2 {
    pub q: i64,
    pub p: i64,
    pub kl: i64,
    pub kh: i64,
}

impl Win2 {
    pub fn contains(&self, (a, b): Label) -> bool {
        b >= -self.p && b <= -self.q - 1 && a >= -self.kh && a <= -self.kl - 1
    }
    pub fn dual(&self) -> Win2 {
        Win2 { q: -self.p, p: -self.q, kl: -self.kh, kh: -self.kl }
    }
    /// Window of g·W for g = u^alpha t^beta.
    pub fn shifted(&self, alpha: i64, beta: i64) -> Win2 {
        Win2 { q: self.q - beta, p: self.p - beta, kl: self.kl - alpha, kh: self.kh - alpha }
    }
    pub fn is_inside(&self, o: &Win2) -> bool {
        o.q <= self.q && self.p <= o.p && o.kl <= self.kl && self.kh <= o.kh
    }
    pub fn rows(&self) -> Bound {
        (Some(-self.p), Some(-self.q - 1))
    }
}

/// Monomial subquotient of F_q((u))((t)), or of R((t)) with a = 0 throughout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilteredObject2 {
    pub coeff: Coeff,
    pub t_range: (i64, i64),
    pub u_range: (i64, i64),
    pub shape: Shape,
    pub o_ref: i64,
    pub k_ref: i64,
    labels: Vec<Label>,
}

fn sorted_labels(t: (i64, i64), u: (i64, i64), shape: &Shape) -> Vec<Label> {
    let mut v = vec![];
    for b in t.0..=t.1 {
        for a in u.0..=u.1 {
            if shape.contains((a, b)) {
                v.push((a, b));
            }
        }
    }
    v
}

impl FilteredObject2 {
    pub fn new(
        coeff: Coeff,
        t_range: (i64, i64),
        u_range: (i64, i64),
        shape: Shape,
        o_ref: i64,
        k_ref: i64,
    ) -> Result<Self> {
        if t_range.0 > t_range.1 || u_range.0 > u_range.1 {
            return Err(Error::Invalid("empty exponent window".into()));
        }
        match coeff {
            Coeff::Fq(q) if q < 2 => return Err(Error::Invalid(format!("bad modulus {q}"))),
            Coeff::Real if u_range != (0, 0) => {
                return Err(Error::Invalid("real boxes have no u-direction".into()))
            }
            _ => {}
        }
        let labels = sorted_labels(t_range, u_range, &shape);
        let out = Self { coeff, t_range, u_range, shape, o_ref, k_ref, labels };
        let (ilo, ihi) = out.outer_window();
        let (klo, khi) = out.inner_window();
        if o_ref < ilo || o_ref > ihi {
            return Err(Error::Invalid(format!("o_ref {o_ref} outside [{ilo}, {ihi}]")));
        }
        if k_ref < klo || k_ref > khi {
            return Err(Error::Invalid(format!("k_ref {k_ref} outside [{klo}, {khi}]")));
        }
        Ok(out)
    }

    /// Same box and references, different shape.
    pub fn with_shape(&self, shape: Shape) -> Self {
        let labels = sorted_labels(self.t_range, self.u_range, &shape);
        Self { shape, labels, ..self.clone() }
    }

    pub fn with_refs(&self, o_ref: i64, k_ref: i64) -> Result<Self> {
        Self::new(self.coeff, self.t_range, self.u_range, self.shape.clone(), o_ref, k_ref)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn q(&self) -> Result<i64> {
        self.coeff
            .modulus()
            .ok_or_else(|| Error::Invalid("operation needs a finite coefficient field".into()))
    }

    /// [Ilo, Ihi] with F(Ilo) = 0 and F(Ihi) = everything inside the box.
    pub fn outer_window(&self) -> (i64, i64) {
        (-self.t_range.1 - 1, -self.t_range.0)
    }

    pub fn inner_window(&self) -> (i64, i64) {
        (-self.u_range.1 - 1, -self.u_range.0)
    }

    pub fn full_window(&self) -> Win2 {
        let (q, p) = self.outer_window();
        let (kl, kh) = self.inner_window();
        Win2 { q, p, kl, kh }
    }

    pub fn labels_in(&self, w: &Win2) -> Vec<Label> {
        self.labels.iter().copied().filter(|l| w.contains(*l)).collect()
    }

    pub fn window_in_box(&self, w: &Win2) -> bool {
        w.q <= w.p && w.kl <= w.kh && w.is_inside(&self.full_window())
    }

    /// log_q of the order of the ambient box group.
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn predicates(&self) -> Predicates2 {
        let s = &self.shape;
        let (cf, df) = match self.coeff {
            Coeff::Fq(_) => (s.rows_bounded_below(), s.rows_bounded_above()),
            Coeff::Real => (s.is_empty(), s.is_empty()),
        };
        Predicates2 { c: s.t_bounded_below(), d: s.t_bounded_above(), cf, df }
    }

    pub fn tags(&self) -> Tags2 {
        let p = self.predicates();
        let t = |b: bool| if b { Tail::Trivial } else { Tail::FiniteStable };
        Tags2 { t_low: t(p.c), t_high: t(p.d), u_low: t(p.cf), u_high: t(p.df) }
    }

    /// V lies inside the box in the low-t direction, so F(Ihi) = V.
    pub fn top_in_box(&self) -> bool {
        !self.shape.meets((None, None), (None, Some(self.t_range.0 - 1)))
    }

    /// F(Ilo) = 0 for the infinite object.
    pub fn bottom_in_box(&self) -> bool {
        !self.shape.meets((None, None), (Some(self.t_range.1 + 1), None))
    }

    /// Rows `rows` have no members with a < -kh.
    pub fn rows_low_inside(&self, rows: Bound, kh: i64) -> bool {
        !self.shape.meets((None, Some(-kh - 1)), rows)
    }

    /// Rows `rows` have no members with a >= -kl.
    pub fn rows_high_inside(&self, rows: Bound, kl: i64) -> bool {
        !self.shape.meets((Some(-kl), None), rows)
    }

    /// The one-dimensional object F(i)/F(j), j <= i.
    pub fn level1(&self, j: i64, i: i64) -> Result<FilteredObject1> {
        let (ilo, ihi) = self.outer_window();
        if j > i || j < ilo || i > ihi {
            return Err(Error::Invalid(format!("outer pair ({j}, {i}) outside [{ilo}, {ihi}]")));
        }
        let rows = (Some(-i), Some(-j - 1));
        let labs = self.level1_labels(j, i);
        let n = labs.len();
        if let Coeff::Real = self.coeff {
            let r = C0arObject::new(FinAbGroup::trivial(), 0, 0, n);
            return FilteredObject1::new_ar(0, vec![r], Tail::Trivial, Tail::Trivial, 0);
        }
        let q = self.q()?;
        let ambient = if n == 0 { FinAbGroup::trivial() } else { FinAbGroup::new(vec![q; n])? };
        let (klo, khi) = self.inner_window();
        let levels = (klo..=khi)
            .map(|k| {
                let gens: Vec<Vec<i64>> = labs
                    .iter()
                    .enumerate()
                    .filter(|(_, l)| l.0 >= -k)
                    .map(|(c, _)| (0..n).map(|r| (r == c) as i64).collect())
                    .collect();
                Subgroup::generated_by(&ambient, &gens)
            })
            .collect::<Result<Vec<_>>>()?;
        let lower = if self.rows_high_inside(rows, klo) { Tail::Trivial } else { Tail::FiniteStable };
        let upper = if self.rows_low_inside(rows, khi) { Tail::Trivial } else { Tail::FiniteStable };
        FilteredObject1::new_fin(klo, ambient, levels, lower, upper, self.k_ref)
    }

    /// Labels of F(i)/F(j) in the coordinate order used by [`Self::level1`].
    pub fn level1_labels(&self, j: i64, i: i64) -> Vec<Label> {
        let mut labs: Vec<Label> =
            self.labels.iter().copied().filter(|l| l.1 >= -i && l.1 <= -j - 1).collect();
        labs.sort_by_key(|l| (-l.0, l.1));
        labs
    }

    pub fn as_archimed(&self) -> Result<C0arObject> {
        match self.coeff {
            Coeff::Real => Ok(C0arObject::new(FinAbGroup::trivial(), 0, 0, self.labels.len())),
            Coeff::Fq(_) => Err(Error::Invalid("not a real box".into())),
        }
    }

    /// Annihilators under the residue pairing; labels map by (a, b) -> (-1-a, -1-b).
    pub fn dual2(&self) -> FilteredObject2 {
        let real = self.coeff == Coeff::Real;
        let t = (-1 - self.t_range.1, -1 - self.t_range.0);
        let u = if real { (0, 0) } else { (-1 - self.u_range.1, -1 - self.u_range.0) };
        let shape = self.shape.reflected(!real);
        let labels = sorted_labels(t, u, &shape);
        FilteredObject2 {
            coeff: self.coeff,
            t_range: t,
            u_range: u,
            shape,
            o_ref: -self.o_ref,
            k_ref: if real { self.k_ref } else { -self.k_ref },
            labels,
        }
    }

    pub fn sigma(&self, (a, b): Label) -> Label {
        match self.coeff {
            Coeff::Real => (a, -1 - b),
            Coeff::Fq(_) => (-1 - a, -1 - b),
        }
    }

    /// Completion; box objects are complete, so this rebuilds the label set.
    pub fn completion_omega(&self) -> FilteredObject2 {
        self.with_shape(self.shape.clone())
    }

    /// Same box, references and label set.
    pub fn same_structure(&self, o: &FilteredObject2) -> bool {
        self.coeff == o.coeff
            && self.t_range == o.t_range
            && self.u_range == o.u_range
            && self.o_ref == o.o_ref
            && self.k_ref == o.k_ref
            && self.labels == o.labels
            && self.tags() == o.tags()
    }
}

/// F_q((u))((t)) or R((t)) truncated to t^b, b in `t_range`, and u^a, a in `u_range`.
pub fn make_local_field2(coeff: Coeff, t_range: (i64, i64), u_range: (i64, i64)) -> Result<FilteredObject2> {
    let u = if coeff == Coeff::Real { (0, 0) } else { u_range };
    let o = 0i64.clamp(-t_range.1 - 1, -t_range.0);
    let k = 0i64.clamp(-u.1 - 1, -u.0);
    FilteredObject2::new(coeff, t_range, u, Shape::All, o, k)
}

/// 0 -> E1 -> E2 -> E3 -> 0 by coordinates; index maps are the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleTriple2 {
    pub e1: FilteredObject2,
    pub e2: FilteredObject2,
    pub e3: FilteredObject2,
}

fn same_box(x: &FilteredObject2, y: &FilteredObject2) -> bool {
    x.coeff == y.coeff
        && x.t_range == y.t_range
        && x.u_range == y.u_range
        && x.o_ref == y.o_ref
        && x.k_ref == y.k_ref
}

fn inclusion(src: &[Label], dst: &[Label]) -> IMat {
    dst.iter().map(|d| src.iter().map(|s| (s == d) as i64).collect()).collect()
}

fn level_group(q: i64, n: usize) -> Result<FinAbGroup> {
    if n == 0 {
        Ok(FinAbGroup::trivial())
    } else {
        FinAbGroup::new(vec![q; n])
    }
}

impl AdmissibleTriple2 {
    pub fn new(e1: FilteredObject2, e2: FilteredObject2, e3: FilteredObject2) -> Result<Self> {
        if !same_box(&e1, &e2) || !same_box(&e3, &e2) {
            return Err(Error::NotAdmissible("boxes or references differ".into()));
        }
        if !e1.shape.is_subset_of(&e2.shape) {
            return Err(Error::NotAdmissible("E1 is not inside E2".into()));
        }
        if !e3.shape.same_as(&e2.shape.diff(&e1.shape)) {
            return Err(Error::NotAdmissible("E3 is not E2/E1".into()));
        }
        Ok(Self { e1, e2, e3 })
    }

    pub fn from_sub(e2: &FilteredObject2, sub: &Shape) -> Result<Self> {
        let s1 = e2.shape.inter(sub);
        let s3 = e2.shape.diff(sub);
        Self::new(e2.with_shape(s1), e2.clone(), e2.with_shape(s3))
    }

    /// 0 -> Ě3 -> Ě2 -> Ě1 -> 0.
    pub fn dual(&self) -> Self {
        Self { e1: self.e3.dual2(), e2: self.e2.dual2(), e3: self.e1.dual2() }
    }

    /// Induced triple of one-dimensional objects on F(i)/F(j).
    pub fn level_triple1(&self, j: i64, i: i64) -> Result<AdmissibleTriple1> {
        let q = self.e2.q()?;
        let (l1, l2, l3) = (self.e1.level1_labels(j, i), self.e2.level1_labels(j, i), self.e3.level1_labels(j, i));
        let (g1, g2, g3) = (level_group(q, l1.len())?, level_group(q, l2.len())?, level_group(q, l3.len())?);
        let alpha = GroupHom::new(g1, g2.clone(), inclusion(&l1, &l2))?;
        let beta = GroupHom::new(g2, g3, inclusion(&l2, &l3))?;
        AdmissibleTriple1::new(self.e1.level1(j, i)?, self.e2.level1(j, i)?, self.e3.level1(j, i)?, alpha, beta)
    }
}

/// Base change square: E2 x_{E3} D over the triple D -> E3 -> B.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Zvezda {
    /// E1 -> E2 -> E3
    pub base: AdmissibleTriple2,
    /// D -> E3 -> B
    pub right: AdmissibleTriple2,
    /// E1 -> X' -> D
    pub top: AdmissibleTriple2,
    /// X' -> E2 -> B
    pub left: AdmissibleTriple2,
}

pub fn fibered_product2(t: &AdmissibleTriple2, d: &Shape) -> Result<Zvezda> {
    let d = t.e3.shape.inter(d);
    let right = AdmissibleTriple2::from_sub(&t.e3, &d)?;
    let x = t.e1.shape.union(&d);
    let left = AdmissibleTriple2::from_sub(&t.e2, &x)?;
    let top = AdmissibleTriple2::new(t.e1.clone(), left.e1.clone(), right.e1.clone())?;
    Ok(Zvezda { base: t.clone(), right, top, left })
}

/// As [`fibered_product2`], rejecting D that is not a sub-object of E3.
pub fn fibered_product2_checked(t: &AdmissibleTriple2, d: &Shape) -> Result<Zvezda> {
    if !d.is_subset_of(&t.e3.shape) {
        return Err(Error::Invalid("not a morphism: D is not inside E3".into()));
    }
    fibered_product2(t, d)
}

/// Amalgam square: E3 ⨿_{E2} H' for E1 ⊂ E2 ⊂ H'.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThreeZvezda {
    /// E1 -> E2 -> E3
    pub top: AdmissibleTriple2,
    /// E2 -> H' -> L'
    pub left: AdmissibleTriple2,
    /// E1 -> H' -> E3 ⨿ H'
    pub mid: AdmissibleTriple2,
    /// E3 -> E3 ⨿ H' -> L'
    pub right: AdmissibleTriple2,
}

/// `left` is E2 -> H' -> L', the map is E2 -> E2/E1.
pub fn amalgam2(left: &AdmissibleTriple2, e1: &Shape) -> Result<ThreeZvezda> {
    if !e1.is_subset_of(&left.e1.shape) {
        return Err(Error::Invalid("not a morphism: E1 is not inside E2".into()));
    }
    let top = AdmissibleTriple2::from_sub(&left.e1, e1)?;
    let mid = AdmissibleTriple2::from_sub(&left.e2, e1)?;
    let right = AdmissibleTriple2::new(top.e3.clone(), mid.e3.clone(), left.e3.clone())?;
    Ok(ThreeZvezda { top, left: left.clone(), mid, right })
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct LevelwiseReport {
    pub pairs: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
}

fn outer_pairs(e: &FilteredObject2) -> Vec<(i64, i64)> {
    let (lo, hi) = e.outer_window();
    (lo..=hi).flat_map(|j| (j..=hi).map(move |i| (j, i))).collect()
}

impl Zvezda {
    /// Rebuilds each F(i)/F(j) of X' with the one-dimensional fibered product
    /// and compares orders and commutativity.
    pub fn check_levelwise(&self, max_dim: usize) -> Result<LevelwiseReport> {
        let q = self.base.e2.q()?;
        let mut rep = LevelwiseReport::default();
        for (j, i) in outer_pairs(&self.base.e2) {
            if self.base.e2.level1_labels(j, i).len() + self.right.e1.level1_labels(j, i).len() > max_dim {
                rep.skipped += 1;
                continue;
            }
            rep.pairs += 1;
            let t = self.base.level_triple1(j, i)?;
            let d = self.right.e1.level1(j, i)?;
            let gamma = inclusion(&self.right.e1.level1_labels(j, i), &self.base.e3.level1_labels(j, i));
            let sq = fibered_product1(&t, &d, gamma)?;
            let n_x = self.left.e1.level1_labels(j, i).len() as u32;
            let want = (q as usize).pow(n_x);
            let got = sq.triple.e2.ambient().map(|g| g.order()).unwrap_or(0);
            if got != want || !sq.commutes {
                rep.failures.push(format!("({j}, {i}): order {got} vs {want}, commutes {}", sq.commutes));
            }
        }
        Ok(rep)
    }
}

impl ThreeZvezda {
    pub fn check_levelwise(&self, max_dim: usize) -> Result<LevelwiseReport> {
        let q = self.left.e2.q()?;
        let mut rep = LevelwiseReport::default();
        for (j, i) in outer_pairs(&self.left.e2) {
            if self.left.e2.level1_labels(j, i).len() + self.top.e3.level1_labels(j, i).len() > max_dim {
                rep.skipped += 1;
                continue;
            }
            rep.pairs += 1;
            let t = self.left.level_triple1(j, i)?;
            let d = self.top.e3.level1(j, i)?;
            let gamma = inclusion(&self.top.e2.level1_labels(j, i), &self.top.e3.level1_labels(j, i));
            let sq = amalgam1(&t, &d, gamma)?;
            let want = (q as usize).pow(self.mid.e3.level1_labels(j, i).len() as u32);
            let got = sq.triple.e2.ambient().map(|g| g.order()).unwrap_or(0);
            if got != want || !sq.commutes {
                rep.failures.push(format!("({j}, {i}): order {got} vs {want}, commutes {}", sq.commutes));
            }
        }
        Ok(rep)
    }
}

/// x -> scalar · u^alpha t^beta · (1 + Σ c u^a t^b), unit terms with a, b >= 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Automorphism2 {
    pub alpha: i64,
    pub beta: i64,
    pub scalar: i64,
    #[serde(default)]
    pub unit: Vec<(i64, i64, i64)>,
}

fn modp(x: i64, q: i64) -> i64 {
    x.rem_euclid(q)
}

fn inv_mod(x: i64, q: i64) -> Result<i64> {
    let x = modp(x, q);
    (1..q)
        .find(|y| (x * y) % q == 1)
        .ok_or_else(|| Error::Invalid(format!("{x} is not a unit mod {q}")))
}

type Series = BTreeMap<(i64, i64), i64>;

fn series_mul(x: &Series, y: &Series, q: i64, prec: (i64, i64)) -> Series {
    let mut out = Series::new();
    for (&(a1, b1), &c1) in x {
        for (&(a2, b2), &c2) in y {
            let e = (a1 + a2, b1 + b2);
            if e.0 <= prec.0 && e.1 <= prec.1 {
                *out.entry(e).or_insert(0) += c1 * c2;
            }
        }
    }
    out.retain(|_, c| {
        *c = modp(*c, q);
        *c != 0
    });
    out
}

impl Automorphism2 {
    pub fn identity() -> Self {
        Self::monomial(0, 0, 1)
    }

    pub fn monomial(alpha: i64, beta: i64, scalar: i64) -> Self {
        Self { alpha, beta, scalar, unit: vec![] }
    }

    pub fn with_unit(mut self, terms: Vec<(i64, i64, i64)>) -> Self {
        self.unit = terms;
        self
    }

    pub fn is_monomial(&self) -> bool {
        self.unit.iter().all(|t| t.2 == 0)
    }

    pub fn validate(&self, coeff: Coeff) -> Result<()> {
        match coeff {
            Coeff::Real => {
                if self.scalar == 0 || self.alpha != 0 || !self.unit.is_empty() {
                    return Err(Error::Invalid("real boxes admit t-shifts with nonzero scalar only".into()));
                }
            }
            Coeff::Fq(q) => {
                inv_mod(self.scalar, q)?;
                for &(a, b, _) in &self.unit {
                    if a < 0 || b < 0 || (a, b) == (0, 0) {
                        return Err(Error::Invalid(format!(
                            "unit term u^{a} t^{b} must have nonnegative exponents, not both zero"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn series(&self, q: i64) -> Series {
        let mut s = Series::new();
        s.insert((0, 0), 1);
        for &(a, b, c) in &self.unit {
            *s.entry((a, b)).or_insert(0) += c;
        }
        s.retain(|_, c| {
            *c = modp(*c, q);
            *c != 0
        });
        s
    }

    /// Product g·h, unit parts truncated at exponent `prec`.
    pub fn compose(&self, h: &Self, q: i64, prec: (i64, i64)) -> Self {
        let s = series_mul(&self.series(q), &h.series(q), q, prec);
        Self {
            alpha: self.alpha + h.alpha,
            beta: self.beta + h.beta,
            scalar: modp(self.scalar * h.scalar, q),
            unit: s.into_iter().filter(|(e, _)| *e != (0, 0)).map(|((a, b), c)| (a, b, c)).collect(),
        }
    }

    /// Inverse with the unit part truncated at exponent `prec`.
    pub fn inverse(&self, q: i64, prec: (i64, i64)) -> Result<Self> {
        let s = self.series(q);
        let mut minus_t: Series = s.iter().filter(|(e, _)| **e != (0, 0)).map(|(e, c)| (*e, modp(-c, q))).collect();
        minus_t.retain(|_, c| *c != 0);
        let mut inv = Series::new();
        inv.insert((0, 0), 1);
        let mut pow = inv.clone();
        for _ in 0..=(prec.0 + prec.1).max(0) {
            pow = series_mul(&pow, &minus_t, q, prec);
            if pow.is_empty() {
                break;
            }
            for (e, c) in &pow {
                *inv.entry(*e).or_insert(0) += c;
            }
        }
        inv.retain(|_, c| {
            *c = modp(*c, q);
            *c != 0
        });
        Ok(Self {
            alpha: -self.alpha,
            beta: -self.beta,
            scalar: inv_mod(self.scalar, q)?,
            unit: inv.into_iter().filter(|(e, _)| *e != (0, 0)).map(|((a, b), c)| (a, b, c)).collect(),
        })
    }

    /// Equality of the truncated actions.
    pub fn same_as(&self, o: &Self, q: i64, prec: (i64, i64)) -> bool {
        let trunc = |s: Series| -> Series { s.into_iter().filter(|((a, b), _)| *a <= prec.0 && *b <= prec.1).collect() };
        (self.alpha, self.beta, modp(self.scalar, q)) == (o.alpha, o.beta, modp(o.scalar, q))
            && trunc(self.series(q)) == trunc(o.series(q))
    }

    /// Matrix over F_q of g: W -> gW, rows indexed by the labels of gW.
    pub fn matrix_on(&self, e: &FilteredObject2, w: &Win2) -> Result<(Vec<Label>, Vec<Label>, IMat)> {
        let q = e.q()?;
        let src = e.labels_in(w);
        let gw = w.shifted(self.alpha, self.beta);
        if !e.window_in_box(&gw) {
            return Err(Error::Cutoff(format!("g moves the window {w:?} out of the box")));
        }
        let dst = e.labels_in(&gw);
        let pos: BTreeMap<Label, usize> = dst.iter().enumerate().map(|(k, l)| (*l, k)).collect();
        let s = self.series(q);
        let mut m = vec![vec![0i64; src.len()]; dst.len()];
        for (c, &(a, b)) in src.iter().enumerate() {
            for (&(da, db), &coef) in &s {
                let l = (a + self.alpha + da, b + self.beta + db);
                if let Some(&r) = pos.get(&l) {
                    m[r][c] = modp(m[r][c] + self.scalar * coef, q);
                } else if l.1 >= -gw.q || l.0 >= -gw.kl {
                    // lands in F(q') or Λ_kl', zero in the window
                } else {
                    return Err(Error::Cutoff(format!("image of {:?} leaves the window", (a, b))));
                }
            }
        }
        Ok((src, dst, m))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AutCheck {
    pub aut_prime: bool,
    pub star: bool,
    /// (i, p) with gF(i) = F(p)
    pub outer_map: Vec<(i64, i64)>,
    /// (k, r) with gΛ_k = Λ_r
    pub inner_map: Vec<(i64, i64)>,
    pub witness: Option<String>,
}

/// Membership in Aut′ and condition (*), decided on the shape and verified
/// on box levels that stay inside the box.
pub fn check_aut(e: &FilteredObject2, g: &Automorphism2) -> AutCheck {
    let fail = |w: String| AutCheck { aut_prime: false, star: false, outer_map: vec![], inner_map: vec![], witness: Some(w) };
    if let Err(err) = g.validate(e.coeff) {
        return fail(err.to_string());
    }
    let shifted = e.shape.shifted(g.alpha, g.beta);
    if !shifted.same_as(&e.shape) {
        return fail(format!("g·V != V for shift ({}, {})", g.alpha, g.beta));
    }
    for &(a, b, c) in &g.unit {
        if c != 0 && !e.shape.shifted(a, b).is_subset_of(&e.shape) {
            return fail(format!("unit term u^{a} t^{b} does not preserve V"));
        }
    }
    let (ilo, ihi) = e.outer_window();
    let (klo, khi) = e.inner_window();
    let outer_map: Vec<(i64, i64)> =
        (ilo..=ihi).map(|i| (i, i - g.beta)).filter(|(_, p)| *p >= ilo && *p <= ihi).collect();
    let inner_map: Vec<(i64, i64)> =
        (klo..=khi).map(|k| (k, k - g.alpha)).filter(|(_, r)| *r >= klo && *r <= khi).collect();
    // leading terms of g carry the box part of F(i) onto that of F(i - beta)
    for &(i, p) in &outer_map {
        let img: Vec<Label> = e
            .labels()
            .iter()
            .filter(|l| l.1 >= -i)
            .map(|l| (l.0 + g.alpha, l.1 + g.beta))
            .filter(|l| in_bound(l.0, (Some(e.u_range.0), Some(e.u_range.1))) && in_bound(l.1, (Some(e.t_range.0), Some(e.t_range.1))))
            .collect();
        let want: Vec<Label> = e
            .labels()
            .iter()
            .copied()
            .filter(|l| l.1 >= -p)
            .filter(|l| {
                let pre = (l.0 - g.alpha, l.1 - g.beta);
                in_bound(pre.0, (Some(e.u_range.0), Some(e.u_range.1))) && in_bound(pre.1, (Some(e.t_range.0), Some(e.t_range.1)))
            })
            .collect();
        let mut img = img;
        img.sort_by_key(|l| (l.1, l.0));
        if img != want {
            return AutCheck { aut_prime: false, star: false, outer_map, inner_map, witness: Some(format!("outer level {i}")) };
        }
    }
    AutCheck { aut_prime: true, star: true, outer_map, inner_map, witness: None }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box2() -> FilteredObject2 {
        make_local_field2(Coeff::Fq(2), (-1, 1), (-1, 1)).unwrap()
    }

    #[test]
    fn box_cardinality() {
        let e = box2();
        assert_eq!(e.dim(), 9);
        assert_eq!(e.outer_window(), (-2, 1));
        let e1 = e.level1(-2, 1).unwrap();
        assert_eq!(e1.ambient().unwrap().order(), 512);
    }

    #[test]
    fn real_box_is_archimedean() {
        let e = make_local_field2(Coeff::Real, (0, 0), (0, 0)).unwrap();
        let c = e.as_archimed().unwrap();
        assert_eq!((c.q, c.p, c.r, c.a.order()), (1, 0, 0, 1));
        let l = e.level1(-1, 0).unwrap();
        assert!(!l.is_compact1() || !l.is_discrete1());
    }

    #[test]
    fn degenerate_u_window_gives_cyclic_chain() {
        let e = make_local_field2(Coeff::Fq(3), (-1, 2), (0, 0)).unwrap();
        let (lo, hi) = e.outer_window();
        for k in 0..=(hi - lo) {
            let l = e.level1(lo, lo + k).unwrap();
            assert_eq!(l.ambient().unwrap().order(), 3usize.pow(k as u32));
        }
    }

    #[test]
    fn predicates_of_local_fields() {
        let e = box2();
        let p = e.predicates();
        assert!(!p.c && !p.d && !p.cf && !p.df);
        let t = AdmissibleTriple2::from_sub(&e, &Shape::t_at_least(0)).unwrap();
        assert!(t.e1.predicates().c && !t.e1.predicates().d);
        assert!(t.e3.predicates().d);
        let u = AdmissibleTriple2::from_sub(&e, &Shape::u_at_least(0)).unwrap();
        assert!(u.e1.predicates().cf && !u.e1.predicates().c);
        assert!(u.e3.predicates().df);
    }

    #[test]
    fn duality() {
        let e = box2();
        assert!(e.dual2().dual2().same_structure(&e));
        let t = AdmissibleTriple2::from_sub(&e, &Shape::t_at_least(0)).unwrap();
        let c = t.e1.predicates();
        let d = t.e1.dual2().predicates();
        assert_eq!((c.c, c.d, c.cf, c.df), (d.d, d.c, d.df, d.cf));
        let zero = e.with_shape(Shape::Empty);
        assert_eq!(zero.dual2().dim(), 0);
        // symmetric box: t, u in [-1, 0] reflect onto themselves
        let s = make_local_field2(Coeff::Fq(2), (-1, 0), (-1, 0)).unwrap();
        assert_eq!(s.dual2().labels(), s.labels());
        assert_eq!(e.completion_omega(), e.completion_omega().completion_omega());
    }

    #[test]
    fn dual_triple_is_admissible() {
        let t = AdmissibleTriple2::from_sub(&box2(), &Shape::t_at_least(0)).unwrap();
        let d = t.dual();
        AdmissibleTriple2::new(d.e1.clone(), d.e2.clone(), d.e3.clone()).unwrap();
        t.level_triple1(-1, 1).unwrap();
    }

    #[test]
    fn products_and_amalgams() {
        let e = box2();
        let t = AdmissibleTriple2::from_sub(&e, &Shape::t_at_least(1)).unwrap();
        let z = fibered_product2_checked(&t, &Shape::rect((None, None), (Some(-1), Some(0)))).unwrap();
        assert_eq!(z.left.e1.dim(), e.dim() + z.right.e1.dim() - t.e3.dim());
        let rep = z.check_levelwise(9).unwrap();
        assert!(rep.failures.is_empty() && rep.pairs > 0, "{rep:?}");
        let id = fibered_product2(&t, &Shape::All).unwrap();
        assert_eq!(id.left.e1.labels(), e.labels());
        let zero = fibered_product2(&t, &Shape::Empty).unwrap();
        assert_eq!(zero.left.e1.labels(), t.e1.labels());
        assert!(fibered_product2_checked(&t, &Shape::t_at_least(0)).is_err());

        let left = AdmissibleTriple2::from_sub(&e, &Shape::t_at_least(0)).unwrap();
        let a = amalgam2(&left, &Shape::t_at_least(1)).unwrap();
        assert_eq!(a.mid.e3.dim(), e.dim() - a.top.e1.dim());
        let rep = a.check_levelwise(9).unwrap();
        assert!(rep.failures.is_empty() && rep.pairs > 0, "{rep:?}");
        assert!(amalgam2(&left, &Shape::t_at_least(-1)).is_err());
    }

    #[test]
    fn automorphisms() {
        let e = make_local_field2(Coeff::Fq(3), (-3, 3), (-2, 2)).unwrap();
        let t = check_aut(&e, &Automorphism2::monomial(0, 1, 1));
        assert!(t.aut_prime && t.star);
        assert!(t.outer_map.iter().all(|(i, p)| i - p == 1));
        let u = check_aut(&e, &Automorphism2::monomial(1, 0, 2));
        assert!(u.star && u.inner_map.iter().all(|(k, r)| k - r == 1));
        assert!(check_aut(&e, &Automorphism2::identity()).star);
        let sub = e.with_shape(Shape::t_at_least(0));
        assert!(!check_aut(&sub, &Automorphism2::monomial(0, -1, 1)).aut_prime);
        assert!(check_aut(&sub, &Automorphism2::monomial(0, 1, 1)).witness.is_some());
        let bad = Automorphism2::identity().with_unit(vec![(-1, 1, 1)]);
        assert!(!check_aut(&e, &bad).aut_prime);
    }

    #[test]
    fn unit_inverse() {
        let g = Automorphism2::monomial(1, 1, 2).with_unit(vec![(1, 0, 1), (0, 1, 2)]);
        let prec = (6, 6);
        let h = g.inverse(3, prec).unwrap();
        assert!(g.compose(&h, 3, prec).same_as(&Automorphism2::identity(), 3, prec));
    }

    #[test]
    fn unit_matrix_is_invertible_on_window() {
        let e = make_local_field2(Coeff::Fq(2), (-2, 2), (-2, 2)).unwrap();
        let g = Automorphism2::identity().with_unit(vec![(1, 1, 1)]);
        let w = Win2 { q: -2, p: 1, kl: -2, kh: 1 };
        let (src, dst, m) = g.matrix_on(&e, &w).unwrap();
        assert_eq!(src, dst);
        // unipotent: identity on the diagonal
        assert!((0..src.len()).all(|k| m[k][k] == 1));
    }
}

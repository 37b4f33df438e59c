//! Geometry and measure model: axis-aligned boxes, balls, cubes, and
//! nonnegative simple functions built from box cells.
//!
//! All measures are Lebesgue. Volumes of ball/box intersections are exact
//! closed forms in dimensions 1 and 2, slice quadrature in dimension 3, and
//! certified adaptive subdivision above that; every path reports a two-sided
//! bracket so callers can tell exact results from approximate ones.
//!
//! Convention used throughout the crate: products of a zero factor with an
//! infinite one are zero (`0 * inf = 0`), matching the measure-theoretic
//! convention for modular integrals.

use crate::error::{Error, Result};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt;

/// `a * b` with the `0 * inf = 0` convention.
pub fn mul_measure(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// Volume of the unit ball in `R^n` (v0 = 1, v1 = 2, v_n = v_{n-2} * 2*pi/n).
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}

// ── Intervals and boxes ─────────────────────────────────────────────────────

/// Closed interval `[lo, hi]`; endpoints may be infinite (rays).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY
        {
            return Err(Error::domain(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn all() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Intersection, or `None` when the overlap is empty (zero-length overlaps
    /// are kept; they carry no measure).
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            Some(Interval { lo, hi })
        } else {
            None
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        if self.is_bounded() {
            0.5 * (self.lo + self.hi)
        } else if self.lo.is_finite() {
            self.lo + 1.0
        } else if self.hi.is_finite() {
            self.hi - 1.0
        } else {
            0.0
        }
    }
}

// JSON form: [lo, hi] where infinite endpoints are the strings "inf"/"-inf".
impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        fn endpoint<S: SerializeSeq>(seq: &mut S, x: f64) -> std::result::Result<(), S::Error> {
            if x == f64::INFINITY {
                seq.serialize_element("inf")
            } else if x == f64::NEG_INFINITY {
                seq.serialize_element("-inf")
            } else {
                seq.serialize_element(&x)
            }
        }
        let mut seq = s.serialize_seq(Some(2))?;
        endpoint(&mut seq, self.lo)?;
        endpoint(&mut seq, self.hi)?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct IvVisitor;

        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Endpoint {
            Num(f64),
            Tag(String),
        }

        fn resolve<E: de::Error>(e: Endpoint) -> std::result::Result<f64, E> {
            match e {
                Endpoint::Num(x) => Ok(x),
                Endpoint::Tag(s) => match s.trim() {
                    "inf" | "+inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    other => Err(E::custom(format!(
                        "interval endpoint must be a number, \"inf\" or \"-inf\", got {other:?}"
                    ))),
                },
            }
        }

        impl<'de> Visitor<'de> for IvVisitor {
            type Value = Interval;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a two-element array [lo, hi]")
            }
            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<Interval, A::Error> {
                let lo: Endpoint = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::custom("interval missing lower endpoint"))?;
                let hi: Endpoint = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::custom("interval missing upper endpoint"))?;
                if seq.next_element::<Endpoint>()?.is_some() {
                    return Err(de::Error::custom("interval has more than two endpoints"));
                }
                Interval::new(resolve(lo)?, resolve(hi)?)
                    .map_err(|e| de::Error::custom(e.to_string()))
            }
        }
        d.deserialize_seq(IvVisitor)
    }
}

/// Axis-aligned box: a product of intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoxN {
    pub intervals: Vec<Interval>,
}

impl BoxN {
    pub fn new(intervals: Vec<Interval>) -> Self {
        BoxN { intervals }
    }

    /// Box from `[lo, hi]` pairs; errors on invalid endpoints.
    pub fn from_bounds(bounds: &[(f64, f64)]) -> Result<Self> {
        let intervals = bounds
            .iter()
            .map(|&(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Ok(BoxN { intervals })
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn volume(&self) -> f64 {
        let mut v = 1.0;
        for iv in &self.intervals {
            v = mul_measure(v, iv.length());
        }
        v
    }

    pub fn is_bounded(&self) -> bool {
        self.intervals.iter().all(Interval::is_bounded)
    }

    pub fn intersect(&self, other: &BoxN) -> Option<BoxN> {
        debug_assert_eq!(self.dim(), other.dim());
        let mut ivs = Vec::with_capacity(self.dim());
        for (a, b) in self.intervals.iter().zip(&other.intervals) {
            ivs.push(a.intersect(b)?);
        }
        Some(BoxN { intervals: ivs })
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        self.intervals
            .iter()
            .zip(x)
            .all(|(iv, &xi)| iv.contains(xi))
    }

    pub fn contains_box(&self, other: &BoxN) -> bool {
        self.intervals
            .iter()
            .zip(&other.intervals)
            .all(|(a, b)| a.lo <= b.lo && b.hi <= a.hi)
    }

    pub fn representative_point(&self) -> Vec<f64> {
        self.intervals.iter().map(Interval::midpoint).collect()
    }
}

// ── Regions: balls, cubes, unions of boxes ──────────────────────────────────

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("ball center must be finite"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::domain(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.radius.powi(self.dim() as i32)
    }

    pub fn bounding_box(&self) -> BoxN {
        BoxN::new(
            self.center
                .iter()
                .map(|&c| Interval {
                    lo: c - self.radius,
                    hi: c + self.radius,
                })
                .collect(),
        )
    }
}

/// Cube `Q(a, r) = { x : max_i |x_i - a_i| <= r }`; `r` is the half-side, so
/// the side length is `2r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    pub center: Vec<f64>,
    pub half_side: f64,
}

impl Cube {
    pub fn new(center: Vec<f64>, half_side: f64) -> Result<Self> {
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("cube center must be finite"));
        }
        if !(half_side.is_finite() && half_side > 0.0) {
            return Err(Error::domain(format!(
                "cube half-side must be positive, got {half_side}"
            )));
        }
        Ok(Cube { center, half_side })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn side_length(&self) -> f64 {
        2.0 * self.half_side
    }

    pub fn volume(&self) -> f64 {
        self.side_length().powi(self.dim() as i32)
    }

    pub fn as_box(&self) -> BoxN {
        BoxN::new(
            self.center
                .iter()
                .map(|&c| Interval {
                    lo: c - self.half_side,
                    hi: c + self.half_side,
                })
                .collect(),
        )
    }
}

/// Finite union of pairwise a.e.-disjoint boxes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoxRegion {
    boxes: Vec<BoxN>,
}

impl BoxRegion {
    pub fn new(boxes: Vec<BoxN>) -> Result<Self> {
        if boxes.is_empty() {
            return Err(Error::usage("box region needs at least one box"));
        }
        let dim = boxes[0].dim();
        for b in &boxes {
            if b.dim() != dim {
                return Err(Error::domain("box region mixes dimensions"));
            }
        }
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                if !boxes_ae_disjoint(&boxes[i], &boxes[j]) {
                    return Err(Error::domain(format!(
                        "boxes {i} and {j} overlap on a set of positive measure"
                    )));
                }
            }
        }
        Ok(BoxRegion { boxes })
    }

    pub fn boxes(&self) -> &[BoxN] {
        &self.boxes
    }

    pub fn dim(&self) -> usize {
        self.boxes[0].dim()
    }

    pub fn volume(&self) -> f64 {
        self.boxes.iter().map(BoxN::volume).sum()
    }
}

/// Two boxes overlap on a null set iff along some axis their interiors miss.
pub fn boxes_ae_disjoint(a: &BoxN, b: &BoxN) -> bool {
    a.intervals
        .iter()
        .zip(&b.intervals)
        .any(|(ia, ib)| ia.hi.min(ib.hi) <= ia.lo.max(ib.lo))
}

/// Integration region for Luxemburg norms and distribution measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    Ball(Ball),
    Cube(Cube),
    Boxes(BoxRegion),
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Ball(b) => b.dim(),
            Region::Cube(c) => c.dim(),
            Region::Boxes(r) => r.dim(),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Region::Ball(b) => b.volume(),
            Region::Cube(c) => c.volume(),
            Region::Boxes(r) => r.volume(),
        }
    }

    /// Volume of `self ∩ bx` as a two-sided bracket.
    pub fn intersect_box(&self, bx: &BoxN) -> VolumeBracket {
        match self {
            Region::Ball(b) => ball_box_volume(b, bx, BALL_BOX_REL_TOL, BALL_BOX_BUDGET),
            Region::Cube(c) => {
                let v = c
                    .as_box()
                    .intersect(bx)
                    .map(|i| i.volume())
                    .unwrap_or(0.0);
                VolumeBracket::exact(v)
            }
            Region::Boxes(r) => {
                let v = r
                    .boxes
                    .iter()
                    .filter_map(|rb| rb.intersect(bx))
                    .map(|i| i.volume())
                    .sum();
                VolumeBracket::exact(v)
            }
        }
    }
}

// ── Ball/box intersection volume ────────────────────────────────────────────

/// Target relative accuracy (against the ball volume) of approximate paths.
pub const BALL_BOX_REL_TOL: f64 = 1e-8;
/// Subdivision budget before the bracket is returned uncertified.
pub const BALL_BOX_BUDGET: usize = 400_000;

/// Two-sided volume bracket. `exact` marks closed-form machine-precision
/// results; `certified` means `hi - lo` met the requested tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeBracket {
    pub lo: f64,
    pub hi: f64,
    pub exact: bool,
    pub certified: bool,
}

impl VolumeBracket {
    pub fn exact(v: f64) -> Self {
        VolumeBracket {
            lo: v,
            hi: v,
            exact: true,
            certified: true,
        }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// `|ball ∩ bx|`. Exact in dimensions 1-2 (and for boxes that trivially
/// contain or miss the ball), slice quadrature in dimension 3, certified
/// subdivision beyond that.
pub fn ball_box_volume(ball: &Ball, bx: &BoxN, rel_tol: f64, budget: usize) -> VolumeBracket {
    debug_assert_eq!(ball.dim(), bx.dim());
    let bbox = ball.bounding_box();
    let clipped = match bx.intersect(&bbox) {
        Some(c) => c,
        None => return VolumeBracket::exact(0.0),
    };
    if bx.contains_box(&bbox) {
        return VolumeBracket::exact(ball.volume());
    }
    // Re-center so the ball sits at the origin.
    let shifted: Vec<Interval> = clipped
        .intervals
        .iter()
        .zip(&ball.center)
        .map(|(iv, &c)| Interval {
            lo: iv.lo - c,
            hi: iv.hi - c,
        })
        .collect();
    let r = ball.radius;
    match ball.dim() {
        0 => VolumeBracket::exact(1.0),
        1 => VolumeBracket::exact((shifted[0].hi.min(r) - shifted[0].lo.max(-r)).max(0.0)),
        2 => VolumeBracket::exact(circle_box_area(
            r, shifted[0].lo, shifted[0].hi, shifted[1].lo, shifted[1].hi,
        )),
        3 => ball3_box_volume(r, &shifted),
        _ => ball_box_subdivision(r, &shifted, rel_tol, budget),
    }
}

/// Area of `{ (u,v) in [x1,x2] x [y1,y2] : u^2 + v^2 <= r^2 }`, exact.
pub fn circle_box_area(r: f64, x1: f64, x2: f64, y1: f64, y2: f64) -> f64 {
    let a = corner_area(r, x2, y2) - corner_area(r, x1, y2) - corner_area(r, x2, y1)
        + corner_area(r, x1, y1);
    // Clamp accumulated rounding dust into the feasible range.
    let cap = ((x2 - x1) * (y2 - y1)).min(std::f64::consts::PI * r * r);
    a.clamp(0.0, cap.max(0.0))
}

/// Antiderivative of the full chord: `F(t) = ∫ 2 sqrt(r²-u²) du`.
fn chord_integral(r: f64, t: f64) -> f64 {
    let t = t.clamp(-r, r);
    let s = (r * r - t * t).max(0.0).sqrt();
    t * s + r * r * (t / r).clamp(-1.0, 1.0).asin()
}

/// Area of the corner set `{ u <= x, v <= y, u^2 + v^2 <= r^2 }`.
fn corner_area(r: f64, x: f64, y: f64) -> f64 {
    if x <= -r || y <= -r {
        return 0.0;
    }
    let xt = x.min(r);
    let f = |t: f64| chord_integral(r, t);
    if y >= r {
        return f(xt) - f(-r);
    }
    // |y| < r: chords are truncated by the horizontal line v = y for
    // |u| <= u_star and (when y >= 0) full outside that band.
    let u_star = (r * r - y * y).max(0.0).sqrt();
    let mut area = 0.0;
    if y >= 0.0 {
        let b1 = xt.min(-u_star);
        if b1 > -r {
            area += f(b1) - f(-r);
        }
        let b3_lo = u_star;
        if xt > b3_lo {
            area += f(xt) - f(b3_lo);
        }
    }
    let a2 = (-u_star).max(-r);
    let b2 = xt.min(u_star);
    if b2 > a2 {
        // Integrand y + sqrt(r²-u²), nonnegative on this band.
        area += y * (b2 - a2) + 0.5 * (f(b2) - f(a2));
    }
    area.max(0.0)
}

/// Dimension 3: integrate exact disc/rectangle slice areas along the last
/// axis with adaptive Simpson between analytic breakpoints.
fn ball3_box_volume(r: f64, iv: &[Interval]) -> VolumeBracket {
    let (x1, x2) = (iv[0].lo, iv[0].hi);
    let (y1, y2) = (iv[1].lo, iv[1].hi);
    let (z1, z2) = (iv[2].lo.max(-r), iv[2].hi.min(r));
    if z1 >= z2 {
        return VolumeBracket::exact(0.0);
    }
    let slice = |z: f64| {
        let s2 = r * r - z * z;
        if s2 <= 0.0 {
            0.0
        } else {
            circle_box_area(s2.sqrt(), x1, x2, y1, y2)
        }
    };
    // Breakpoints: slice radius crossing an edge offset or a corner distance.
    let mut crit = vec![z1, z2];
    let mut push_dist = |d2: f64| {
        if d2 < r * r {
            let z = (r * r - d2).sqrt();
            for cand in [z, -z] {
                if cand > z1 && cand < z2 {
                    crit.push(cand);
                }
            }
        }
    };
    for &e in &[x1, x2, y1, y2] {
        push_dist(e * e);
    }
    for &ex in &[x1, x2] {
        for &ey in &[y1, y2] {
            push_dist(ex * ex + ey * ey);
        }
    }
    push_dist(0.0);
    crit.sort_by(|a, b| a.partial_cmp(b).unwrap());
    crit.dedup();
    let mut total = 0.0;
    for w in crit.windows(2) {
        total += adaptive_simpson(&slice, w[0], w[1], 1e-12 * r * r * r, 40);
    }
    // Quadrature error is far below the advertised tolerance; report a thin
    // non-exact bracket.
    let pad = 1e-10 * r * r * r + 1e-12 * total;
    VolumeBracket {
        lo: (total - pad).max(0.0),
        hi: total + pad,
        exact: false,
        certified: true,
    }
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    if a >= b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    rec(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, depth)
}

/// Generic certified path: dyadically subdivide straddling boxes until the
/// straddling volume drops below `rel_tol` of the ball volume or the budget
/// runs out.
fn ball_box_subdivision(r: f64, iv: &[Interval], rel_tol: f64, budget: usize) -> VolumeBracket {
    let n = iv.len();
    let ball_vol = unit_ball_volume(n) * r.powi(n as i32);
    let target = rel_tol * ball_vol;

    #[derive(Clone)]
    struct Piece {
        lo: Vec<f64>,
        hi: Vec<f64>,
        vol: f64,
    }
    let classify = |p: &Piece| -> i8 {
        let mut dmin = 0.0f64;
        let mut dmax = 0.0f64;
        for i in 0..p.lo.len() {
            let below = (-p.hi[i]).max(0.0);
            let above = p.lo[i].max(0.0);
            let out = below.max(above);
            dmin += out * out;
            let far = p.lo[i].abs().max(p.hi[i].abs());
            dmax += far * far;
        }
        if dmax <= r * r {
            1 // inside
        } else if dmin >= r * r {
            -1 // outside
        } else {
            0
        }
    };

    let root_vol: f64 = iv.iter().map(|i| i.length()).product();
    if root_vol <= 0.0 {
        return VolumeBracket::exact(0.0);
    }
    let root = Piece {
        lo: iv.iter().map(|i| i.lo).collect(),
        hi: iv.iter().map(|i| i.hi).collect(),
        vol: root_vol,
    };
    let mut inside = 0.0;
    let mut given_up = 0.0; // straddling volume we stopped refining
    let mut queued = root.vol; // unclassified volume still in the queue
    let mut queue = VecDeque::from([root]);
    let mut splits = 0usize;
    while let Some(p) = queue.pop_front() {
        queued -= p.vol;
        match classify(&p) {
            1 => inside += p.vol,
            -1 => {}
            _ => {
                if splits >= budget {
                    given_up += p.vol;
                } else {
                    splits += 1;
                    // Split along the widest axis.
                    let (axis, _) = p
                        .lo
                        .iter()
                        .zip(&p.hi)
                        .map(|(l, h)| h - l)
                        .enumerate()
                        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                        .unwrap();
                    let mid = 0.5 * (p.lo[axis] + p.hi[axis]);
                    let half = p.vol / 2.0;
                    let mut left = p.clone();
                    left.hi[axis] = mid;
                    left.vol = half;
                    let mut right = p;
                    right.lo[axis] = mid;
                    right.vol = half;
                    queued += 2.0 * half;
                    queue.push_back(left);
                    queue.push_back(right);
                }
            }
        }
        if queued + given_up <= target {
            break;
        }
    }
    let uncertain = (queued + given_up).max(0.0);
    if uncertain == 0.0 {
        // Every piece classified; the answer is a sum of box volumes.
        return VolumeBracket::exact(inside);
    }
    VolumeBracket {
        lo: inside,
        hi: (inside + uncertain).min(root_vol.min(ball_vol)),
        exact: false,
        certified: uncertain <= target * 1.0001,
    }
}

// ── Simple functions ────────────────────────────────────────────────────────

/// One constant piece of a simple function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    #[serde(rename = "box")]
    pub region: BoxN,
    pub value: f64,
}

/// Nonnegative simple function: finitely many pairwise a.e.-disjoint box
/// cells with finite nonnegative values; zero elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SimpleFunction {
    cells: Vec<Cell>,
    #[serde(skip)]
    dim: usize,
}

impl SimpleFunction {
    pub fn new(dim: usize, cells: Vec<Cell>) -> Result<Self> {
        for c in &cells {
            if c.region.dim() != dim {
                return Err(Error::domain(format!(
                    "cell dimension {} does not match function dimension {dim}",
                    c.region.dim()
                )));
            }
            if !(c.value.is_finite() && c.value >= 0.0) {
                return Err(Error::domain(format!(
                    "cell values must be finite and nonnegative, got {}",
                    c.value
                )));
            }
        }
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                if !boxes_ae_disjoint(&cells[i].region, &cells[j].region) {
                    return Err(Error::domain(format!(
                        "cells {i} and {j} overlap on a set of positive measure"
                    )));
                }
            }
        }
        Ok(SimpleFunction { cells, dim })
    }

    pub fn zero(dim: usize) -> Self {
        SimpleFunction { cells: Vec::new(), dim }
    }

    /// Indicator of a box (value 1 on it).
    pub fn indicator(bx: BoxN) -> Self {
        let dim = bx.dim();
        SimpleFunction {
            cells: vec![Cell {
                region: bx,
                value: 1.0,
            }],
            dim,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cells: Vec<Cell> = serde_json::from_str(s)?;
        if cells.is_empty() {
            return Err(Error::usage(
                "cannot infer dimension from an empty cell list; pass at least one cell",
            ));
        }
        let dim = cells[0].region.dim();
        SimpleFunction::new(dim, cells)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(|c| c.value == 0.0 || c.region.volume() == 0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.cells.iter().map(|c| c.value).fold(0.0, f64::max)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        for c in &self.cells {
            if c.region.contains_point(x) {
                return c.value;
            }
        }
        0.0
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::domain("scale factor must be finite and nonnegative"));
        }
        Ok(SimpleFunction {
            cells: self
                .cells
                .iter()
                .map(|cell| Cell {
                    region: cell.region.clone(),
                    value: cell.value * c,
                })
                .collect(),
            dim: self.dim,
        })
    }

    /// Distinct positive values, ascending.
    pub fn positive_values(&self) -> Vec<f64> {
        let mut vs: Vec<f64> = self
            .cells
            .iter()
            .map(|c| c.value)
            .filter(|&v| v > 0.0)
            .collect();
        vs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vs.dedup();
        vs
    }

    /// Indicator of the superlevel set `{ f >= v }`.
    pub fn superlevel_indicator(&self, v: f64) -> Self {
        SimpleFunction {
            cells: self
                .cells
                .iter()
                .filter(|c| c.value >= v)
                .map(|c| Cell {
                    region: c.region.clone(),
                    value: 1.0,
                })
                .collect(),
            dim: self.dim,
        }
    }

    /// Sorted finite cell-corner coordinates per axis.
    pub fn corner_coordinates(&self) -> Vec<Vec<f64>> {
        let mut per_axis = vec![Vec::new(); self.dim];
        for c in &self.cells {
            for (i, iv) in c.region.intervals.iter().enumerate() {
                if iv.lo.is_finite() {
                    per_axis[i].push(iv.lo);
                }
                if iv.hi.is_finite() {
                    per_axis[i].push(iv.hi);
                }
            }
        }
        for axis in &mut per_axis {
            axis.sort_by(|a, b| a.partial_cmp(b).unwrap());
            axis.dedup();
        }
        per_axis
    }

    /// Pointwise sum on the overlay grid of both cell partitions.
    pub fn add(&self, other: &SimpleFunction) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::domain("dimension mismatch in sum"));
        }
        let mut rails: Vec<Vec<f64>> = vec![Vec::new(); self.dim];
        for f in [self, other] {
            for c in &f.cells {
                for (i, iv) in c.region.intervals.iter().enumerate() {
                    rails[i].push(iv.lo);
                    rails[i].push(iv.hi);
                }
            }
        }
        let mut total: usize = 1;
        for axis in &mut rails {
            axis.push(f64::NEG_INFINITY);
            axis.push(f64::INFINITY);
            axis.sort_by(|a, b| a.partial_cmp(b).unwrap());
            axis.dedup();
            total = total.saturating_mul(axis.len().saturating_sub(1));
            if total > 200_000 {
                return Err(Error::usage("sum refinement grid too large"));
            }
        }
        let mut cells = Vec::new();
        let mut idx = vec![0usize; self.dim];
        'outer: loop {
            let bx = BoxN::new(
                idx.iter()
                    .enumerate()
                    .map(|(i, &j)| Interval {
                        lo: rails[i][j],
                        hi: rails[i][j + 1],
                    })
                    .collect(),
            );
            let p = bx.representative_point();
            let v = self.eval(&p) + other.eval(&p);
            if v > 0.0 && bx.volume() > 0.0 {
                cells.push(Cell {
                    region: bx,
                    value: v,
                });
            }
            // Odometer over the grid.
            for i in 0..self.dim {
                idx[i] += 1;
                if idx[i] < rails[i].len() - 1 {
                    continue 'outer;
                }
                idx[i] = 0;
            }
            break;
        }
        SimpleFunction::new(self.dim, cells)
    }
}

impl<'de> Deserialize<'de> for SimpleFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let cells: Vec<Cell> = Vec::deserialize(d)?;
        if cells.is_empty() {
            return Err(de::Error::custom(
                "cannot infer dimension from an empty cell list",
            ));
        }
        let dim = cells[0].region.dim();
        SimpleFunction::new(dim, cells).map_err(|e| de::Error::custom(e.to_string()))
    }
}

// ── Distribution and modular ────────────────────────────────────────────────

/// Distribution measure `m(A, f, t) = |{ x in A : f(x) > t }|`.
pub fn distribution(f: &SimpleFunction, region: &Region, t: f64) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::domain(format!("threshold must be >= 0, got {t}")));
    }
    if f.dim() != region.dim() {
        return Err(Error::domain("dimension mismatch between function and region"));
    }
    let mut m = 0.0;
    for c in f.cells() {
        if c.value > t {
            m += region.intersect_box(&c.region).mid();
        }
    }
    Ok(m)
}

/// Distribution measure over all of `R^n`. Infinite for cells with unbounded
/// support and positive value above the threshold.
pub fn distribution_global(f: &SimpleFunction, t: f64) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::domain(format!("threshold must be >= 0, got {t}")));
    }
    Ok(f.cells()
        .iter()
        .filter(|c| c.value > t)
        .map(|c| c.region.volume())
        .sum())
}

/// `(value, measure)` pairs of `f` restricted to a region, with geometry
/// exactness flag. Cells with zero overlap are dropped.
pub fn region_parts(f: &SimpleFunction, region: &Region) -> Result<(Vec<(f64, f64)>, bool)> {
    if f.dim() != region.dim() {
        return Err(Error::domain("dimension mismatch between function and region"));
    }
    let mut parts = Vec::with_capacity(f.cells().len());
    let mut exact = true;
    for c in f.cells() {
        let vb = region.intersect_box(&c.region);
        exact &= vb.exact || vb.certified;
        let m = vb.mid();
        if m > 0.0 {
            parts.push((c.value, m));
        }
    }
    Ok((parts, exact))
}

/// One piece of `f` restricted to a region with a measure bracket.
#[derive(Debug, Clone, Copy)]
pub struct Part {
    pub value: f64,
    pub mass_lo: f64,
    pub mass_hi: f64,
}

/// Like [`region_parts`] but keeps the measure brackets, so callers can
/// propagate geometric uncertainty through downstream optimization.
pub fn region_parts_bracketed(
    f: &SimpleFunction,
    region: &Region,
) -> Result<(Vec<Part>, bool)> {
    if f.dim() != region.dim() {
        return Err(Error::domain("dimension mismatch between function and region"));
    }
    let mut parts = Vec::with_capacity(f.cells().len());
    let mut exact = true;
    for c in f.cells() {
        let vb = region.intersect_box(&c.region);
        exact &= vb.exact;
        if vb.hi > 0.0 {
            parts.push(Part {
                value: c.value,
                mass_lo: vb.lo,
                mass_hi: vb.hi,
            });
        }
    }
    Ok((parts, exact))
}

/// Mean modular `(1/|B|) ∫_B Phi(f/lambda)` from precomputed parts.
pub fn modular_from_parts(
    parts: &[(f64, f64)],
    region_volume: f64,
    lambda: f64,
    phi: &crate::young::YoungFunction,
) -> f64 {
    debug_assert!(lambda > 0.0);
    let mut acc = 0.0;
    for &(v, m) in parts {
        acc += mul_measure(phi.value_at(v / lambda), m);
        if acc == f64::INFINITY {
            return f64::INFINITY;
        }
    }
    acc / region_volume
}

/// Mean modular `(1/|B|) ∫_B Phi(f/lambda)`.
pub fn modular(
    f: &SimpleFunction,
    region: &Region,
    lambda: f64,
    phi: &crate::young::YoungFunction,
) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(format!("lambda must be positive, got {lambda}")));
    }
    let (parts, _) = region_parts(f, region)?;
    Ok(modular_from_parts(&parts, region.volume(), lambda, phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn unit_ball_volumes_match_closed_forms() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((unit_ball_volume(4) - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn box_volume_handles_rays_and_zero_width() {
        let b = BoxN::new(vec![iv(0.0, 0.0), iv(f64::NEG_INFINITY, f64::INFINITY)]);
        assert_eq!(b.volume(), 0.0); // 0 * inf = 0
        let c = BoxN::new(vec![iv(0.0, 2.0), Interval::all()]);
        assert_eq!(c.volume(), f64::INFINITY);
    }

    #[test]
    fn interval_json_roundtrip_with_sentinels() {
        let b = BoxN::new(vec![iv(0.0, 1.0), iv(f64::NEG_INFINITY, 3.5), Interval::all()]);
        let s = serde_json::to_string(&b).unwrap();
        assert!(s.contains("\"-inf\""));
        let back: BoxN = serde_json::from_str(&s).unwrap();
        assert_eq!(b, back);
        let parsed: Interval = serde_json::from_str("[\"-inf\", 2.0]").unwrap();
        assert_eq!(parsed.lo, f64::NEG_INFINITY);
        assert!(serde_json::from_str::<Interval>("[3, 1]").is_err());
    }

    /// Monte-Carlo oracle for |ball ∩ box| (box must be bounded).
    fn mc_ball_box(ball: &Ball, bx: &BoxN, samples: usize, seed: u64) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let clipped = match bx.intersect(&ball.bounding_box()) {
            Some(c) => c,
            None => return (0.0, 0.0),
        };
        let vol = clipped.volume();
        if vol == 0.0 {
            return (0.0, 0.0);
        }
        let mut hits = 0usize;
        for _ in 0..samples {
            let p: Vec<f64> = clipped
                .intervals
                .iter()
                .map(|iv| rng.gen_range(iv.lo..iv.hi))
                .collect();
            let d2: f64 = p
                .iter()
                .zip(&ball.center)
                .map(|(x, c)| (x - c) * (x - c))
                .sum();
            if d2 <= ball.radius * ball.radius {
                hits += 1;
            }
        }
        let frac = hits as f64 / samples as f64;
        let est = frac * vol;
        let se = vol * (frac * (1.0 - frac) / samples as f64).sqrt();
        (est, se)
    }

    #[test]
    fn circle_box_area_against_monte_carlo() {
        let cases = vec![
            (Ball::new(vec![0.0, 0.0], 1.0).unwrap(), BoxN::from_bounds(&[(0.0, 1.0), (0.0, 1.0)]).unwrap()),
            (Ball::new(vec![0.3, -0.2], 0.8).unwrap(), BoxN::from_bounds(&[(-0.5, 0.4), (-1.0, 0.1)]).unwrap()),
            (Ball::new(vec![1.0, 1.0], 2.0).unwrap(), BoxN::from_bounds(&[(0.0, 0.5), (-3.0, 0.9)]).unwrap()),
            (Ball::new(vec![0.0, 0.0], 1.0).unwrap(), BoxN::from_bounds(&[(-2.0, 2.0), (-2.0, 2.0)]).unwrap()),
            (Ball::new(vec![-0.7, 0.4], 0.5).unwrap(), BoxN::from_bounds(&[(-0.8, -0.6), (0.3, 0.45)]).unwrap()),
        ];
        for (i, (ball, bx)) in cases.iter().enumerate() {
            let v = ball_box_volume(ball, bx, 1e-8, 100_000);
            assert!(v.exact, "case {i} should be exact");
            let (mc, se) = mc_ball_box(ball, bx, 400_000, 42 + i as u64);
            assert!(
                (v.mid() - mc).abs() <= 3.0 * se + 1e-12,
                "case {i}: exact {} vs mc {} (3se {})",
                v.mid(),
                mc,
                3.0 * se
            );
        }
        // Quarter disc sanity.
        let q = circle_box_area(1.0, 0.0, 1.0, 0.0, 1.0);
        assert!((q - std::f64::consts::PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn ball3_volume_against_monte_carlo_and_full_ball() {
        let ball = Ball::new(vec![0.0, 0.0, 0.0], 1.0).unwrap();
        let all = BoxN::from_bounds(&[(-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)]).unwrap();
        let v = ball_box_volume(&ball, &all, 1e-8, 100_000);
        assert!((v.mid() - ball.volume()).abs() < 1e-8);

        let bx = BoxN::from_bounds(&[(0.0, 0.7), (-0.4, 0.9), (0.1, 2.0)]).unwrap();
        let v = ball_box_volume(&ball, &bx, 1e-8, 100_000);
        let (mc, se) = mc_ball_box(&ball, &bx, 500_000, 7);
        assert!((v.mid() - mc).abs() <= 3.0 * se + 1e-12, "{} vs {}", v.mid(), mc);
    }

    #[test]
    fn ball4_subdivision_brackets_contain_monte_carlo() {
        let ball = Ball::new(vec![0.0; 4], 1.0).unwrap();
        let bx = BoxN::from_bounds(&[(0.0, 0.8), (-0.9, 0.5), (0.0, 2.0), (-0.3, 0.3)]).unwrap();
        let v = ball_box_volume(&ball, &bx, 1e-4, 400_000);
        let (mc, se) = mc_ball_box(&ball, &bx, 400_000, 11);
        assert!(v.lo <= mc + 3.0 * se && mc - 3.0 * se <= v.hi);
        // Trivial classifications stay exact in any dimension.
        let inside = BoxN::from_bounds(&[(-0.1, 0.1); 4]).unwrap();
        assert!(ball_box_volume(&ball, &inside, 1e-8, 10).exact);
        let hull = BoxN::from_bounds(&[(-1.0, 1.0); 4]).unwrap();
        assert_eq!(ball_box_volume(&ball, &hull, 1e-8, 10).mid(), ball.volume());
    }

    #[test]
    fn simple_function_rejects_overlaps_and_negative_values() {
        let a = Cell {
            region: BoxN::from_bounds(&[(0.0, 1.0)]).unwrap(),
            value: 1.0,
        };
        let b = Cell {
            region: BoxN::from_bounds(&[(0.5, 1.5)]).unwrap(),
            value: 2.0,
        };
        assert!(SimpleFunction::new(1, vec![a.clone(), b]).is_err());
        let touching = Cell {
            region: BoxN::from_bounds(&[(1.0, 2.0)]).unwrap(),
            value: 2.0,
        };
        assert!(SimpleFunction::new(1, vec![a.clone(), touching]).is_ok());
        let neg = Cell {
            region: BoxN::from_bounds(&[(2.0, 3.0)]).unwrap(),
            value: -1.0,
        };
        assert!(SimpleFunction::new(1, vec![neg]).is_err());
    }

    #[test]
    fn simple_function_json_matches_spec_shape() {
        let f = SimpleFunction::from_json(
            r#"[{"box": [[0, 1], [0, "inf"]], "value": 2.0},
                {"box": [[1, 2], [0, 1]], "value": 0.5}]"#,
        )
        .unwrap();
        assert_eq!(f.dim(), 2);
        assert_eq!(f.cells()[0].region.intervals[1].hi, f64::INFINITY);
        assert!(SimpleFunction::from_json("[]").is_err());
    }

    #[test]
    fn distribution_counts_strict_superlevels() {
        // f = 2 on [0,1], 1 on [1,3]
        let f = SimpleFunction::new(
            1,
            vec![
                Cell { region: BoxN::from_bounds(&[(0.0, 1.0)]).unwrap(), value: 2.0 },
                Cell { region: BoxN::from_bounds(&[(1.0, 3.0)]).unwrap(), value: 1.0 },
            ],
        )
        .unwrap();
        let region = Region::Boxes(BoxRegion::new(vec![BoxN::from_bounds(&[(0.0, 3.0)]).unwrap()]).unwrap());
        assert_eq!(distribution(&f, &region, 0.0).unwrap(), 3.0);
        assert_eq!(distribution(&f, &region, 1.0).unwrap(), 1.0); // strict >
        assert_eq!(distribution(&f, &region, 2.0).unwrap(), 0.0);
        assert_eq!(distribution_global(&f, 0.5).unwrap(), 3.0);
    }

    #[test]
    fn sum_refines_overlapping_partitions() {
        let f = SimpleFunction::new(
            1,
            vec![Cell { region: BoxN::from_bounds(&[(0.0, 2.0)]).unwrap(), value: 1.0 }],
        )
        .unwrap();
        let g = SimpleFunction::new(
            1,
            vec![Cell { region: BoxN::from_bounds(&[(1.0, 3.0)]).unwrap(), value: 2.0 }],
        )
        .unwrap();
        let s = f.add(&g).unwrap();
        assert_eq!(s.eval(&[0.5]), 1.0);
        assert_eq!(s.eval(&[1.5]), 3.0);
        assert_eq!(s.eval(&[2.5]), 2.0);
        assert_eq!(s.eval(&[3.5]), 0.0);
    }

    #[test]
    fn region_intersections_are_exact_for_cubes_and_boxes() {
        let cube = Region::Cube(Cube::new(vec![0.0, 0.0], 1.0).unwrap());
        let bx = BoxN::from_bounds(&[(0.0, 3.0), (-0.5, 0.5)]).unwrap();
        let v = cube.intersect_box(&bx);
        assert!(v.exact);
        assert_eq!(v.mid(), 1.0);
        assert_eq!(cube.volume(), 4.0);
    }

    #[test]
    fn random_ball_box_cases_match_monte_carlo_n2() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for i in 0..20 {
            let ball = Ball::new(
                vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
                rng.gen_range(0.2..2.0),
            )
            .unwrap();
            let x0 = rng.gen_range(-2.0..1.5);
            let y0 = rng.gen_range(-2.0..1.5);
            let bx = BoxN::from_bounds(&[
                (x0, x0 + rng.gen_range(0.1..2.5)),
                (y0, y0 + rng.gen_range(0.1..2.5)),
            ])
            .unwrap();
            let v = ball_box_volume(&ball, &bx, 1e-8, 100_000);
            let (mc, se) = mc_ball_box(&ball, &bx, 300_000, 1000 + i);
            assert!(
                (v.mid() - mc).abs() <= 3.0 * se + 1e-12,
                "case {i}: {} vs {} (se {})",
                v.mid(),
                mc,
                se
            );
        }
    }
}

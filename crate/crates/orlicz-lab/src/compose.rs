//! Composition operators `f -> f(psi(x))` on Orlicz-Morrey spaces.
//!
//! Affine maps are the workhorse: their singular values give the Lipschitz
//! constant, their determinant the measure-dilation constant, and together
//! these yield the sufficiency bound `K (C1 + C2 phi(L) L^n)` on the operator
//! norm. Exact composition of simple functions is supported for
//! box-preserving maps (diagonal times signed permutation plus shift), where
//! cell pre-images stay boxes. Plane rotations fall back to a rasterization
//! with reported cell size.
//!
//! Operator norms themselves are never computed exactly. The functions here
//! report certified lower estimates (ratios over explicit test families) and
//! theoretical upper bounds, which is what the underlying inequalities
//! provide.

use crate::domain::{BoxN, Cell, Interval, SimpleFunction};
use crate::error::{Error, Result};
use crate::growth::{
    log_spaced, CertifyOptions, ClassCertificate, GrowthFunction, PsiProfile,
};
use crate::indicators::{box_indicator_norm, BoxSpec};
use crate::norms::{orlicz_morrey_norm, NormEstimate, SearchSpec};
use crate::young::YoungFunction;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

// ── Small dense matrices ────────────────────────────────────────────────────

/// Row-major square matrix, sized for Jacobians (n <= 8 where SVD is used).
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    n: usize,
    a: Vec<f64>,
}

impl Mat {
    pub fn identity(n: usize) -> Self {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 1.0;
        }
        Mat { n, a }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::usage("matrix rows must form a nonempty square array"));
        }
        let a: Vec<f64> = rows.iter().flatten().copied().collect();
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::usage("matrix entries must be finite"));
        }
        Ok(Mat { n, a })
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        let mut m = Mat::identity(d.len());
        for (i, &di) in d.iter().enumerate() {
            if !di.is_finite() {
                return Err(Error::usage("diagonal entries must be finite"));
            }
            m.set(i, i, di);
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.a[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::identity(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat {
            n,
            a: vec![0.0; n * n],
        };
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += aik * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.n;
        let mut lu = self.a.clone();
        let mut det = 1.0;
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if lu[r * n + col].abs() > lu[piv * n + col].abs() {
                    piv = r;
                }
            }
            if lu[piv * n + col] == 0.0 {
                return 0.0;
            }
            if piv != col {
                for j in 0..n {
                    lu.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            let d = lu[col * n + col];
            det *= d;
            for r in col + 1..n {
                let factor = lu[r * n + col] / d;
                for j in col..n {
                    lu[r * n + j] -= factor * lu[col * n + j];
                }
            }
        }
        det
    }

    /// `max |(M^T M - I)_{ij}|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let g = self.transpose().matmul(self);
        let mut resid = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { 1.0 } else { 0.0 };
                resid = resid.max((g.get(i, j) - target).abs());
            }
        }
        resid
    }
}

impl Serialize for Mat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Mat::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

// ── Singular value decomposition ────────────────────────────────────────────

/// `U * diag(sigma) * V = A` with orthogonal `U`, `V` and ascending `sigma`.
#[derive(Debug, Clone, Serialize)]
pub struct SvdResult {
    pub u: Mat,
    pub v: Mat,
    pub sigma: Vec<f64>,
    pub orthogonality_residual: f64,
    pub reconstruction_residual: f64,
}

const SVD_MAX_SWEEPS: usize = 60;
const SVD_RANK_RTOL: f64 = 1e-12;

/// One-sided Jacobi SVD for small invertible matrices.
pub fn svd_small(a: &Mat) -> Result<SvdResult> {
    let n = a.dim();
    if n > 8 {
        return Err(Error::usage(format!("svd supports n <= 8, got {n}")));
    }
    let scale = a.max_abs();
    if !(scale > 0.0) {
        return Err(Error::RankDeficient("zero matrix".to_string()));
    }

    // Orthogonalize the columns of b by right rotations; b stays A * vacc.
    let mut b = a.clone();
    let mut vacc = Mat::identity(n);
    let col_dot = |m: &Mat, p: usize, q: usize| -> f64 {
        (0..n).map(|i| m.get(i, p) * m.get(i, q)).sum()
    };
    for _ in 0..SVD_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let app = col_dot(&b, p, p);
                let aqq = col_dot(&b, q, q);
                let apq = col_dot(&b, p, q);
                if apq.abs() <= 1e-15 * (app * aqq).sqrt().max(f64::MIN_POSITIVE) {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut b, &mut vacc] {
                    for i in 0..n {
                        let mp = m.get(i, p);
                        let mq = m.get(i, q);
                        m.set(i, p, c * mp - s * mq);
                        m.set(i, q, s * mp + c * mq);
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| col_dot(&b, j, j).sqrt()).collect();
    order.sort_by(|&i, &j| norms[i].partial_cmp(&norms[j]).unwrap());
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let smax = sigma[n - 1];
    if sigma[0] < SVD_RANK_RTOL * smax {
        return Err(Error::RankDeficient(format!(
            "singular value ratio {:.3e} below threshold",
            sigma[0] / smax
        )));
    }

    let mut u = Mat::identity(n);
    let mut v = Mat::identity(n); // rows of v = columns of vacc, reordered
    for (slot, &j) in order.iter().enumerate() {
        for i in 0..n {
            u.set(i, slot, b.get(i, j) / sigma[slot]);
            v.set(slot, i, vacc.get(i, j));
        }
    }

    let mut recon = u.clone();
    for i in 0..n {
        for j in 0..n {
            recon.set(i, j, u.get(i, j) * sigma[j]);
        }
    }
    let recon = recon.matmul(&v);
    let mut recon_resid = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            recon_resid = recon_resid.max((recon.get(i, j) - a.get(i, j)).abs());
        }
    }
    let orth = u.orthogonality_residual().max(v.orthogonality_residual());
    Ok(SvdResult {
        u,
        v,
        sigma,
        orthogonality_residual: orth,
        reconstruction_residual: recon_resid,
    })
}

// ── Affine maps ─────────────────────────────────────────────────────────────

/// `psi(x) = A x + b` with invertible `A`.
#[derive(Debug, Clone, Serialize)]
pub struct AffineMap {
    pub a: Mat,
    pub b: Vec<f64>,
}

impl AffineMap {
    pub fn new(a: Mat, b: Vec<f64>) -> Result<Self> {
        if b.len() != a.dim() {
            return Err(Error::usage("shift length must match matrix dimension"));
        }
        if b.iter().any(|x| !x.is_finite()) {
            return Err(Error::usage("shift entries must be finite"));
        }
        let det = a.det();
        if !(det.abs() > 0.0 && det.is_finite()) {
            return Err(Error::RankDeficient(format!("determinant {det}")));
        }
        Ok(AffineMap { a, b })
    }

    pub fn linear(a: Mat) -> Result<Self> {
        let n = a.dim();
        AffineMap::new(a, vec![0.0; n])
    }

    pub fn identity(n: usize) -> Self {
        AffineMap {
            a: Mat::identity(n),
            b: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.a.apply(x);
        for (yi, bi) in y.iter_mut().zip(&self.b) {
            *yi += bi;
        }
        y
    }

    pub fn det(&self) -> f64 {
        self.a.det()
    }

    /// Ascending singular values of the linear part.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        Ok(svd_small(&self.a)?.sigma)
    }

    /// Lipschitz constant: the largest singular value.
    pub fn lipschitz(&self) -> Result<f64> {
        let s = self.singular_values()?;
        Ok(s[s.len() - 1])
    }
}

/// Measure-dilation constant `K` with `|psi^{-1}(E)| = K |E|`; equals
/// `1/|det A|` for affine maps.
pub fn measure_dilation_constant(psi: &AffineMap) -> Result<f64> {
    let det = psi.det().abs();
    if !(det > 0.0 && det.is_finite()) {
        return Err(Error::RankDeficient(format!("determinant magnitude {det}")));
    }
    Ok(1.0 / det)
}

// ── Box-preserving maps and exact composition ───────────────────────────────

/// Normal form of a box-preserving affine map: `psi(x)_i = scale_i * x_{axis_i} + shift_i`.
#[derive(Debug, Clone, Serialize)]
pub struct BoxForm {
    pub axis: Vec<usize>,
    pub scale: Vec<f64>,
    pub shift: Vec<f64>,
}

/// Detects diagonal-times-signed-permutation structure (one nonzero per row
/// and column). Returns `None` for anything else, e.g. genuine rotations.
pub fn box_form(map: &AffineMap) -> Option<BoxForm> {
    let n = map.dim();
    let thresh = 1e-12 * map.a.max_abs();
    let mut axis = vec![0usize; n];
    let mut scale = vec![0.0f64; n];
    let mut col_used = vec![false; n];
    for i in 0..n {
        let mut nonzero = None;
        for j in 0..n {
            if map.a.get(i, j).abs() > thresh {
                if nonzero.is_some() {
                    return None;
                }
                nonzero = Some(j);
            }
        }
        let j = nonzero?;
        if col_used[j] {
            return None;
        }
        col_used[j] = true;
        axis[i] = j;
        scale[i] = map.a.get(i, j);
    }
    Some(BoxForm {
        axis,
        scale,
        shift: map.b.clone(),
    })
}

/// Pre-image of an axis-aligned box under a box-preserving map.
pub fn preimage_box(form: &BoxForm, e: &BoxN) -> Result<BoxN> {
    let n = form.axis.len();
    if e.dim() != n {
        return Err(Error::usage("box dimension does not match map dimension"));
    }
    let mut out = vec![Interval::all(); n];
    for i in 0..n {
        let iv = &e.intervals[i];
        let p = (iv.lo - form.shift[i]) / form.scale[i];
        let q = (iv.hi - form.shift[i]) / form.scale[i];
        out[form.axis[i]] = Interval::new(p.min(q), p.max(q))?;
    }
    Ok(BoxN::new(out))
}

/// Exact composition `x -> f(psi(x))` for box-preserving `psi`.
pub fn compose_simple(f: &SimpleFunction, psi: &AffineMap) -> Result<SimpleFunction> {
    if f.dim() != psi.dim() {
        return Err(Error::usage("function and map dimensions differ"));
    }
    let form = box_form(psi).ok_or_else(|| {
        Error::UnsupportedMap(
            "exact composition needs a box-preserving map (diagonal x signed permutation + shift)"
                .to_string(),
        )
    })?;
    let cells = f
        .cells()
        .iter()
        .map(|c| {
            Ok(Cell {
                region: preimage_box(&form, &c.region)?,
                value: c.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SimpleFunction::new(f.dim(), cells)
}

/// Approximate composition with a plane rotation by vertical strips of the
/// given width: exact in `y` per strip, so the error scales with `cell_size`.
pub fn compose_rasterized(
    f: &SimpleFunction,
    w: &Mat,
    cell_size: f64,
) -> Result<SimpleFunction> {
    if w.dim() != 2 || f.dim() != 2 {
        return Err(Error::UnsupportedMap(
            "rasterized composition is implemented for plane rotations only".to_string(),
        ));
    }
    if !(cell_size > 0.0 && cell_size.is_finite()) {
        return Err(Error::usage("raster cell size must be positive"));
    }
    let mut cells: Vec<Cell> = Vec::new();
    for cell in f.cells() {
        let bx = &cell.region;
        if !bx.is_bounded() {
            return Err(Error::UnsupportedMap(
                "rasterized composition needs bounded cells".to_string(),
            ));
        }
        // Support of x -> chi_B(Wx) is W^T B; scan its x-extent.
        let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for &cx in &[bx.intervals[0].lo, bx.intervals[0].hi] {
            for &cy in &[bx.intervals[1].lo, bx.intervals[1].hi] {
                let x = w.get(0, 0) * cx + w.get(1, 0) * cy;
                xmin = xmin.min(x);
                xmax = xmax.max(x);
            }
        }
        let strips = (((xmax - xmin) / cell_size).ceil() as usize).max(1);
        for s in 0..strips {
            let x0 = xmin + s as f64 * cell_size;
            let x1 = (x0 + cell_size).min(xmax);
            let xc = 0.5 * (x0 + x1);
            // y-range where (xc, y) lands in bx under W.
            let (mut ylo, mut yhi) = (f64::NEG_INFINITY, f64::INFINITY);
            let mut empty = false;
            for k in 0..2 {
                let c0 = w.get(k, 0);
                let c1 = w.get(k, 1);
                let (lo, hi) = (bx.intervals[k].lo, bx.intervals[k].hi);
                if c1.abs() < 1e-14 {
                    let val = c0 * xc;
                    if val < lo || val > hi {
                        empty = true;
                    }
                    continue;
                }
                let p = (lo - c0 * xc) / c1;
                let q = (hi - c0 * xc) / c1;
                ylo = ylo.max(p.min(q));
                yhi = yhi.min(p.max(q));
            }
            if empty || !(yhi > ylo) {
                continue;
            }
            cells.push(Cell {
                region: BoxN::from_bounds(&[(x0, x1), (ylo, yhi)])?,
                value: cell.value,
            });
        }
    }
    SimpleFunction::new(2, cells)
}

// ── Map specifications (JSON) ───────────────────────────────────────────────

/// JSON map descriptions accepted by the command line.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapSpec {
    /// `{"kind":"diag","d":[...],"shift":[...]?}`
    Diag {
        d: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shift: Option<Vec<f64>>,
    },
    /// `{"kind":"perm","perm":[...],"signs":[...]?,"shift":[...]?}`:
    /// `psi(x)_i = signs_i * x_{perm_i} + shift_i`.
    Perm {
        perm: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        signs: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shift: Option<Vec<f64>>,
    },
    /// `{"kind":"affine","A":[[...]],"b":[...]?}`
    Affine {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<Vec<f64>>,
    },
}

impl MapSpec {
    pub fn build(&self) -> Result<AffineMap> {
        match self {
            MapSpec::Diag { d, shift } => {
                if d.is_empty() {
                    return Err(Error::usage("diagonal map needs at least one entry"));
                }
                let a = Mat::diagonal(d)?;
                let b = shift.clone().unwrap_or_else(|| vec![0.0; d.len()]);
                AffineMap::new(a, b)
            }
            MapSpec::Perm { perm, signs, shift } => {
                let n = perm.len();
                let mut seen = vec![false; n];
                for &p in perm {
                    if p >= n || seen[p] {
                        return Err(Error::usage("perm must be a permutation of 0..n"));
                    }
                    seen[p] = true;
                }
                let signs = signs.clone().unwrap_or_else(|| vec![1.0; n]);
                if signs.len() != n || signs.iter().any(|s| s.abs() != 1.0) {
                    return Err(Error::usage("signs must be +-1 and match perm length"));
                }
                let mut a = Mat {
                    n,
                    a: vec![0.0; n * n],
                };
                for i in 0..n {
                    a.set(i, perm[i], signs[i]);
                }
                let b = shift.clone().unwrap_or_else(|| vec![0.0; n]);
                AffineMap::new(a, b)
            }
            MapSpec::Affine { a, b } => {
                let m = Mat::from_rows(a)?;
                let b = b.clone().unwrap_or_else(|| vec![0.0; m.dim()]);
                AffineMap::new(m, b)
            }
        }
    }
}

// ── Sampled differentiable maps ─────────────────────────────────────────────

/// One sample of a differentiable map: base point and Jacobian there.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JacobianSample {
    pub x: Vec<f64>,
    pub jacobian: Mat,
}

/// A differentiable map known through finitely many Jacobian samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiffeoSample {
    pub samples: Vec<JacobianSample>,
}

// ── Operator-norm results ───────────────────────────────────────────────────

fn default_certificate(phi_g: &GrowthFunction) -> Result<ClassCertificate> {
    phi_g.certify(&log_spaced(1e-6, 1e6, 48), &CertifyOptions::default())
}

#[derive(Debug, Clone, Serialize)]
pub struct FunctionRatio {
    pub index: usize,
    pub norm_original: f64,
    pub norm_composed: f64,
    pub ratio: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SufficiencyReport {
    pub k_measure: f64,
    pub lipschitz: f64,
    pub c1: f64,
    pub c2: f64,
    pub bound: f64,
    pub ratios: Vec<FunctionRatio>,
    pub pass: bool,
    pub certificate: ClassCertificate,
}

/// Theoretical bound `K (C1 + C2 phi(L) L^n)` on the composition-operator
/// norm, checked against empirical ratios on a test family.
pub fn sufficiency_bound(
    psi: &AffineMap,
    phi_y: &YoungFunction,
    phi_g: &GrowthFunction,
    test_functions: &[SimpleFunction],
    search: &SearchSpec,
    tol: f64,
) -> Result<SufficiencyReport> {
    let certificate = default_certificate(phi_g)?;
    if !certificate.in_g1_dec() {
        return Err(Error::precondition(
            "sufficiency bound needs an almost-decreasing submultiplicative growth function",
        ));
    }
    let c1 = certificate.almost_decreasing.value;
    let c2 = certificate.submultiplicative.value;
    let n = psi.dim();
    let lipschitz = psi.lipschitz()?;
    let k_measure = measure_dilation_constant(psi)?;
    let bound = k_measure * (c1 + c2 * phi_g.eval(lipschitz)? * lipschitz.powi(n as i32));

    let ratios: Vec<Result<FunctionRatio>> = test_functions
        .par_iter()
        .enumerate()
        .map(|(index, f)| {
            if f.is_zero() {
                return Ok(FunctionRatio {
                    index,
                    norm_original: 0.0,
                    norm_composed: 0.0,
                    ratio: f64::NAN,
                    pass: true,
                    note: Some("zero function skipped".to_string()),
                });
            }
            let composed = compose_simple(f, psi)?;
            let base = orlicz_morrey_norm(f, phi_y, phi_g, search, tol)?;
            let comp = orlicz_morrey_norm(&composed, phi_y, phi_g, search, tol)?;
            let ratio = comp.value / base.value;
            Ok(FunctionRatio {
                index,
                norm_original: base.value,
                norm_composed: comp.value,
                ratio,
                pass: ratio <= bound * (1.0 + 1e-9),
                note: None,
            })
        })
        .collect();
    let ratios: Vec<FunctionRatio> = ratios.into_iter().collect::<Result<_>>()?;
    let pass = ratios.iter().all(|r| r.pass);
    Ok(SufficiencyReport {
        k_measure,
        lipschitz,
        c1,
        c2,
        bound,
        ratios,
        pass,
        certificate,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DilationReport {
    pub c: f64,
    /// Grid infimum of `phi(c r) / phi(r)`: lower bound side of the sandwich.
    pub lower: f64,
    /// Grid supremum: upper bound side.
    pub upper: f64,
    /// The comparator `phi(c)`.
    pub phi_c: f64,
    pub grid_decades: f64,
}

/// Operator-norm sandwich for the dilation `x -> x/c` through the ratio
/// `phi(c r)/phi(r)` on a grid.
pub fn dilation_opnorm(phi_g: &GrowthFunction, c: f64, r_grid: &[f64]) -> Result<DilationReport> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::domain(format!("dilation factor must be positive, got {c}")));
    }
    if r_grid.is_empty() || r_grid.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::usage("grid must be nonempty with positive entries"));
    }
    let (gmin, gmax) = r_grid
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    let decades = (gmax / gmin).log10();
    if decades < 8.0 {
        return Err(Error::usage(format!(
            "grid must span at least 8 decades, got {decades:.2}"
        )));
    }
    let mut lower = f64::INFINITY;
    let mut upper = 0.0f64;
    for &r in r_grid {
        let ratio = phi_g.eval(c * r)? / phi_g.eval(r)?;
        lower = lower.min(ratio);
        upper = upper.max(ratio);
    }
    Ok(DilationReport {
        c,
        lower,
        upper,
        phi_c: phi_g.eval(c)?,
        grid_decades: decades,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OrthogonalReport {
    pub ratio: f64,
    pub norm_original: f64,
    pub norm_composed: f64,
    pub exact_path: bool,
    /// Raster cell size when the approximate path was used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raster_cell: Option<f64>,
    pub tol: f64,
    pub pass: bool,
}

pub const RASTER_CELL_DEFAULT: f64 = 1.0 / 1024.0;

/// Checks that composition with an orthogonal map leaves the norm unchanged.
/// Signed permutations go through the exact path (tol 1e-6 by default);
/// plane rotations are rasterized (tol 1e-2 by default).
pub fn orthogonal_invariance_check(
    w: &Mat,
    f: &SimpleFunction,
    phi_y: &YoungFunction,
    phi_g: &GrowthFunction,
    search: &SearchSpec,
    tol: Option<f64>,
) -> Result<OrthogonalReport> {
    if w.orthogonality_residual() > 1e-10 {
        return Err(Error::precondition(format!(
            "matrix is not orthogonal: residual {:.3e}",
            w.orthogonality_residual()
        )));
    }
    if f.is_zero() {
        return Err(Error::domain("invariance ratio needs a nonzero function"));
    }
    let map = AffineMap::linear(w.clone())?;
    let signed_perm = box_form(&map)
        .map(|bf| bf.scale.iter().all(|s| (s.abs() - 1.0).abs() <= 1e-12))
        .unwrap_or(false);
    let (composed, exact_path, raster_cell) = if signed_perm {
        (compose_simple(f, &map)?, true, None)
    } else {
        (
            compose_rasterized(f, w, RASTER_CELL_DEFAULT)?,
            false,
            Some(RASTER_CELL_DEFAULT),
        )
    };
    let tol = tol.unwrap_or(if exact_path { 1e-6 } else { 1e-2 });
    // The raster turns f into thousands of strip cells; a full-budget search
    // over that many corners is minutes of work for digits the 1e-2 ratio
    // tolerance cannot see. Thin the candidate set for both norms so the
    // comparison stays symmetric.
    let (search, lux_tol) = if exact_path {
        (search.clone(), 1e-10)
    } else {
        (
            SearchSpec {
                max_candidates: search.max_candidates.min(4000),
                refine_depth: search.refine_depth.min(2),
                golden_iters: search.golden_iters.min(28),
                ..search.clone()
            },
            1e-8,
        )
    };
    let base = orlicz_morrey_norm(f, phi_y, phi_g, &search, lux_tol)?;
    let comp = orlicz_morrey_norm(&composed, phi_y, phi_g, &search, lux_tol)?;
    let ratio = comp.value / base.value;
    Ok(OrthogonalReport {
        ratio,
        norm_original: base.value,
        norm_composed: comp.value,
        exact_path,
        raster_cell,
        tol,
        pass: (ratio - 1.0).abs() <= tol,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagEmpirical {
    /// Norm ratio of each step along the cyclic chain of box pre-images.
    pub per_step: Vec<f64>,
    /// Maximum single-step ratio: a lower estimate of the operator norm.
    pub max_ratio: f64,
    /// Box sides visited by the chain (first entry is the unit cube).
    pub chain_sides: Vec<Vec<f64>>,
}

/// Empirical operator-norm lower estimate for a diagonal map.
///
/// The chain starts at the unit cube and repeatedly takes pre-images under
/// the cyclically permuted diagonals; after n steps the cube has shrunk by
/// the full product, so the best single step is at least the geometric mean
/// and the estimate is sharp for power-law data.
pub fn diag_empirical_opnorm(
    d: &[f64],
    phi_y: &YoungFunction,
    phi_g: &GrowthFunction,
) -> Result<DiagEmpirical> {
    let n = d.len();
    if n == 0 || d.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::usage("diagonal entries must be positive and finite"));
    }
    let norm_of = |sides: &[f64]| -> Result<f64> {
        let mut sorted = sides.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(box_indicator_norm(&BoxSpec::new(sorted, n)?, phi_y, phi_g, 1e-10)?.value)
    };
    let mut sides = vec![1.0f64; n];
    let mut chain_sides = vec![sides.clone()];
    let mut prev = norm_of(&sides)?;
    let mut per_step = Vec::with_capacity(n);
    for m in 0..n {
        for (i, s) in sides.iter_mut().enumerate() {
            *s /= d[(i + m) % n];
        }
        let cur = norm_of(&sides)?;
        per_step.push(cur / prev);
        chain_sides.push(sides.clone());
        prev = cur;
    }
    let max_ratio = per_step.iter().fold(0.0f64, |m, r| m.max(*r));
    Ok(DiagEmpirical {
        per_step,
        max_ratio,
        chain_sides,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagLowerReport {
    pub product: f64,
    /// `phi(prod d)^{1/n}`: certified lower comparator for the operator norm.
    pub lower_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical: Option<f64>,
    pub slack: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    pub certificate: ClassCertificate,
}

/// Lower bound `phi(prod d_k)^{1/n}` for the diagonal composition operator.
pub fn diag_opnorm_lower(
    phi_g: &GrowthFunction,
    d: &[f64],
    empirical: Option<f64>,
) -> Result<DiagLowerReport> {
    let n = d.len();
    if n == 0 || d.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::usage("diagonal entries must be positive and finite"));
    }
    let certificate = default_certificate(phi_g)?;
    if !certificate.in_g2_dec() {
        return Err(Error::precondition(
            "diagonal lower bound needs the full decreasing-class certificate",
        ));
    }
    let product: f64 = d.iter().product();
    let lower_bound = phi_g.eval(product)?.powf(1.0 / n as f64);
    let slack = certificate.almost_decreasing.value
        * certificate.submultiplicative.value
        * certificate.reciprocal.value;
    let pass = empirical.map(|e| lower_bound <= e * slack * (1.0 + 1e-9));
    Ok(DiagLowerReport {
        product,
        lower_bound,
        empirical,
        slack,
        pass,
        certificate,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NecessitySample {
    pub index: usize,
    pub singular_values: Vec<f64>,
    pub product: f64,
    /// `phi` of the singular-value product; must sit in the band.
    pub value: f64,
    pub in_band: bool,
    /// `phi(alpha_min)`: the sufficient-condition comparator.
    pub phi_alpha_min: f64,
    pub remark_sufficient: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NecessityReport {
    pub band: f64,
    pub samples: Vec<NecessitySample>,
    pub pass: bool,
    pub certificate: ClassCertificate,
}

/// Per-sample necessity certificate: `phi` of the Jacobian singular-value
/// product must stay within `[1/band, band]` for the composition operator to
/// be bounded. `band` defaults to ten times the product of the certified
/// class constants.
pub fn necessity_certificate(
    samples: &DiffeoSample,
    phi_g: &GrowthFunction,
    band: Option<f64>,
) -> Result<NecessityReport> {
    let certificate = default_certificate(phi_g)?;
    if !certificate.in_g2_dec() {
        return Err(Error::precondition(
            "necessity certificate needs the full decreasing-class certificate",
        ));
    }
    let band = band.unwrap_or_else(|| {
        10.0 * certificate.almost_decreasing.value
            * certificate.submultiplicative.value
            * certificate.reciprocal.value
    });
    if !(band >= 1.0 && band.is_finite()) {
        return Err(Error::usage(format!("band must be >= 1, got {band}")));
    }
    let mut rows: Vec<NecessitySample> = samples
        .samples
        .par_iter()
        .enumerate()
        .map(|(index, s)| match svd_small(&s.jacobian) {
            Ok(svd) => {
                let product: f64 = svd.sigma.iter().product();
                let value = phi_g.value_at(product);
                let phi_alpha_min = phi_g.value_at(svd.sigma[0]);
                NecessitySample {
                    index,
                    singular_values: svd.sigma,
                    product,
                    value,
                    in_band: value >= 1.0 / band && value <= band,
                    phi_alpha_min,
                    remark_sufficient: phi_alpha_min <= band,
                    note: None,
                }
            }
            Err(e) => NecessitySample {
                index,
                singular_values: Vec::new(),
                product: f64::NAN,
                value: f64::NAN,
                in_band: false,
                phi_alpha_min: f64::NAN,
                remark_sufficient: false,
                note: Some(e.to_string()),
            },
        })
        .collect();
    rows.sort_by_key(|r| r.index);
    let pass = rows.iter().all(|r| r.in_band);
    Ok(NecessityReport {
        band,
        samples: rows,
        pass,
        certificate,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RescalingSample {
    pub index: usize,
    pub ratio: f64,
    pub bound: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RescalingReport {
    /// `sup_{t >= 1} Phi(t)/t^p`: finite under the hypothesis.
    pub c1_phi_power: f64,
    /// `sup_r r^{-n/p}/phi(r)`.
    pub c2_growth_floor: f64,
    pub samples: Vec<RescalingSample>,
    pub max_ratio: f64,
    pub pass: bool,
}

const HYPOTHESIS_CAP: f64 = 1e6;

/// Checks `|| f(Dpsi(x0) .) || <= multiple * bound * || f ||` at every sample
/// whose Jacobian is box-preserving; `bound` is the per-sample affine
/// sufficiency bound.
pub fn rescaling_bound_check(
    f: &SimpleFunction,
    samples: &DiffeoSample,
    p: f64,
    phi_y: &YoungFunction,
    phi_g: &GrowthFunction,
    search: &SearchSpec,
    multiple: f64,
) -> Result<RescalingReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::usage(format!("exponent p must be >= 1, got {p}")));
    }
    if f.is_zero() {
        return Err(Error::domain("rescaling check needs a nonzero function"));
    }
    let n = f.dim();
    // Hypotheses: Phi(t) <= C t^p for t >= 1, and r^{-n/p} <= C phi(r).
    let mut c1 = 0.0f64;
    for t in log_spaced(1.0, 1e6, 120) {
        c1 = c1.max(phi_y.eval(t)? / t.powf(p));
    }
    let mut c2 = 0.0f64;
    for r in log_spaced(1e-6, 1e6, 120) {
        c2 = c2.max(r.powf(-(n as f64) / p) / phi_g.eval(r)?);
    }
    if c1 > HYPOTHESIS_CAP || c2 > HYPOTHESIS_CAP {
        return Err(Error::precondition(format!(
            "rescaling hypotheses fail: sup Phi(t)/t^p = {c1:.3e}, sup r^(-n/p)/phi(r) = {c2:.3e}"
        )));
    }
    let certificate = default_certificate(phi_g)?;
    if !certificate.in_g1_dec() {
        return Err(Error::precondition(
            "rescaling check needs an almost-decreasing submultiplicative growth function",
        ));
    }
    let base = orlicz_morrey_norm(f, phi_y, phi_g, search, 1e-9)?;

    let mut rows: Vec<RescalingSample> = samples
        .samples
        .par_iter()
        .enumerate()
        .map(|(index, s)| {
            let map = match AffineMap::linear(s.jacobian.clone()) {
                Ok(m) => m,
                Err(e) => {
                    return RescalingSample {
                        index,
                        ratio: f64::NAN,
                        bound: f64::NAN,
                        pass: false,
                        note: Some(e.to_string()),
                    }
                }
            };
            if box_form(&map).is_none() {
                return RescalingSample {
                    index,
                    ratio: f64::NAN,
                    bound: f64::NAN,
                    pass: true,
                    note: Some("jacobian is not box-preserving; skipped".to_string()),
                };
            }
            let result = (|| -> Result<(f64, f64)> {
                let composed = compose_simple(f, &map)?;
                let comp = orlicz_morrey_norm(&composed, phi_y, phi_g, search, 1e-9)?;
                let lip = map.lipschitz()?;
                let k = measure_dilation_constant(&map)?;
                let bound = k
                    * (certificate.almost_decreasing.value
                        + certificate.submultiplicative.value
                            * phi_g.eval(lip)?
                            * lip.powi(n as i32));
                Ok((comp.value / base.value, bound))
            })();
            match result {
                Ok((ratio, bound)) => RescalingSample {
                    index,
                    ratio,
                    bound,
                    pass: ratio <= multiple * bound * (1.0 + 1e-9),
                    note: None,
                },
                Err(e) => RescalingSample {
                    index,
                    ratio: f64::NAN,
                    bound: f64::NAN,
                    pass: false,
                    note: Some(e.to_string()),
                },
            }
        })
        .collect();
    rows.sort_by_key(|r| r.index);
    let max_ratio = rows
        .iter()
        .filter(|r| r.ratio.is_finite())
        .fold(0.0f64, |m, r| m.max(r.ratio));
    let pass = rows.iter().all(|r| r.pass);
    Ok(RescalingReport {
        c1_phi_power: c1,
        c2_growth_floor: c2,
        samples: rows,
        max_ratio,
        pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferItem {
    pub index: usize,
    pub norm_region: f64,
    pub norm_preimage: f64,
    pub ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferReport {
    pub k_measure: f64,
    pub items: Vec<TransferItem>,
    /// Maximum indicator ratio: a lower estimate of the weak-space operator
    /// norm (for indicators the weak and strong norms coincide).
    pub max_ratio: f64,
    pub skipped: usize,
}

fn box_sides(bx: &BoxN) -> (Vec<f64>, bool) {
    let mut sides = Vec::new();
    let mut degenerate = false;
    for iv in &bx.intervals {
        let len = iv.length();
        if len.is_finite() {
            if len <= 0.0 {
                degenerate = true;
            }
            sides.push(len);
        }
    }
    sides.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (sides, degenerate)
}

/// Indicator-transfer ratios `||chi_{psi^{-1}(A)}|| / ||chi_A||` over a
/// family of boxes, via the aligned-cube scan on both sides.
pub fn indicator_transfer_check(
    psi: &AffineMap,
    regions: &[BoxN],
    phi_y: &YoungFunction,
    phi_g: &GrowthFunction,
) -> Result<TransferReport> {
    let form = box_form(psi).ok_or_else(|| {
        Error::UnsupportedMap("indicator transfer needs a box-preserving map".to_string())
    })?;
    let n = psi.dim();
    let k_measure = measure_dilation_constant(psi)?;
    let mut items = Vec::with_capacity(regions.len());
    let mut skipped = 0usize;
    let mut max_ratio = 0.0f64;
    for (index, region) in regions.iter().enumerate() {
        if region.dim() != n {
            return Err(Error::usage(format!(
                "region {index} has dimension {}, map has {n}",
                region.dim()
            )));
        }
        let (sides, degenerate) = box_sides(region);
        if degenerate || sides.is_empty() {
            items.push(TransferItem {
                index,
                norm_region: f64::NAN,
                norm_preimage: f64::NAN,
                ratio: f64::NAN,
                note: Some(if sides.is_empty() {
                    "region is all of space; skipped".to_string()
                } else {
                    "region has zero measure; skipped".to_string()
                }),
            });
            skipped += 1;
            continue;
        }
        let pre = preimage_box(&form, region)?;
        let (pre_sides, _) = box_sides(&pre);
        let norm_region =
            box_indicator_norm(&BoxSpec::new(sides, n)?, phi_y, phi_g, 1e-10)?.value;
        let norm_preimage =
            box_indicator_norm(&BoxSpec::new(pre_sides, n)?, phi_y, phi_g, 1e-10)?.value;
        let ratio = norm_preimage / norm_region;
        max_ratio = max_ratio.max(ratio);
        items.push(TransferItem {
            index,
            norm_region,
            norm_preimage,
            ratio,
            note: None,
        });
    }
    Ok(TransferReport {
        k_measure,
        items,
        max_ratio,
        skipped,
    })
}

/// Profiles bundled for reports that rely on window hypotheses.
#[derive(Debug, Clone, Serialize)]
pub struct WindowProfiles {
    pub increasing: PsiProfile,
    pub decreasing: PsiProfile,
}

/// Searched-norm alias re-exported for callers assembling reports.
pub type SearchedNorm = NormEstimate;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::WindowKind;
    use rand::{Rng, SeedableRng};

    fn mat2(a: f64, b: f64, c: f64, d: f64) -> Mat {
        Mat::from_rows(&[vec![a, b], vec![c, d]]).unwrap()
    }

    #[test]
    fn svd_identity_and_diagonal() {
        let svd = svd_small(&Mat::identity(3)).unwrap();
        for s in &svd.sigma {
            assert!((s - 1.0).abs() <= 1e-12);
        }
        let svd = svd_small(&Mat::diagonal(&[2.0, 0.5]).unwrap()).unwrap();
        assert!((svd.sigma[0] - 0.5).abs() <= 1e-12);
        assert!((svd.sigma[1] - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn svd_rotated_scaling() {
        // A^T A = diag(4, 9), so the singular values are 2 and 3.
        let svd = svd_small(&mat2(0.0, -3.0, 2.0, 0.0)).unwrap();
        assert!((svd.sigma[0] - 2.0).abs() <= 1e-10);
        assert!((svd.sigma[1] - 3.0).abs() <= 1e-10);
        assert!(svd.orthogonality_residual <= 1e-10);
        assert!(svd.reconstruction_residual <= 1e-8 * 3.0);
    }

    #[test]
    fn svd_random_reconstruction() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 1..=8usize {
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect();
            let a = match Mat::from_rows(&rows) {
                Ok(m) if m.det().abs() > 1e-6 => m,
                _ => continue,
            };
            let svd = svd_small(&a).unwrap();
            assert!(svd.orthogonality_residual <= 1e-10, "n={n}");
            assert!(
                svd.reconstruction_residual <= 1e-8 * a.max_abs(),
                "n={n}: {}",
                svd.reconstruction_residual
            );
            for w in svd.sigma.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn svd_rejects_singular() {
        let res = svd_small(&mat2(1.0, 2.0, 2.0, 4.0));
        assert!(matches!(res, Err(Error::RankDeficient(_))));
    }

    #[test]
    fn svd_signed_permutation_invariance() {
        let a = mat2(1.0, 2.0, 0.5, -1.0);
        let p = mat2(0.0, -1.0, 1.0, 0.0);
        let s1 = svd_small(&a).unwrap().sigma;
        let s2 = svd_small(&p.matmul(&a)).unwrap().sigma;
        let s3 = svd_small(&a.matmul(&p)).unwrap().sigma;
        for i in 0..2 {
            assert!((s1[i] - s2[i]).abs() <= 1e-10);
            assert!((s1[i] - s3[i]).abs() <= 1e-10);
        }
    }

    #[test]
    fn measure_dilation_values() {
        let half = AffineMap::linear(Mat::diagonal(&[0.5, 0.5, 0.5]).unwrap()).unwrap();
        assert!((measure_dilation_constant(&half).unwrap() - 8.0).abs() <= 1e-12);
        let theta: f64 = 0.7;
        let rot = AffineMap::linear(mat2(theta.cos(), -theta.sin(), theta.sin(), theta.cos()))
            .unwrap();
        assert!((measure_dilation_constant(&rot).unwrap() - 1.0).abs() <= 1e-12);
        let shear_free = AffineMap::linear(Mat::diagonal(&[3.0, 1.0 / 3.0]).unwrap()).unwrap();
        assert!((measure_dilation_constant(&shear_free).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn box_form_detection() {
        let diag_perm = AffineMap::new(mat2(0.0, 2.0, -0.5, 0.0), vec![1.0, 0.0]).unwrap();
        let form = box_form(&diag_perm).unwrap();
        assert_eq!(form.axis, vec![1, 0]);
        assert_eq!(form.scale, vec![2.0, -0.5]);
        let rot = AffineMap::linear(mat2(0.6, -0.8, 0.8, 0.6)).unwrap();
        assert!(box_form(&rot).is_none());
    }

    #[test]
    fn compose_matches_pointwise_evaluation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let f = SimpleFunction::new(
            2,
            vec![
                Cell {
                    region: BoxN::from_bounds(&[(0.0, 1.0), (0.0, 2.0)]).unwrap(),
                    value: 3.0,
                },
                Cell {
                    region: BoxN::from_bounds(&[(1.0, 2.5), (-1.0, 0.5)]).unwrap(),
                    value: 1.0,
                },
            ],
        )
        .unwrap();
        let psi = AffineMap::new(mat2(0.0, -1.5, 2.0, 0.0), vec![0.25, -1.0]).unwrap();
        let g = compose_simple(&f, &psi).unwrap();
        for _ in 0..500 {
            let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let y = psi.apply(&x);
            assert_eq!(g.eval(&x), f.eval(&y), "x = {x:?}");
        }
    }

    #[test]
    fn compose_halving_is_doubling_preimage() {
        let f = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0)]).unwrap());
        let psi = AffineMap::linear(Mat::diagonal(&[0.5]).unwrap()).unwrap();
        let g = compose_simple(&f, &psi).unwrap();
        let iv = g.cells()[0].region.intervals[0];
        assert_eq!((iv.lo, iv.hi), (0.0, 2.0));
    }

    #[test]
    fn compose_rejects_rotation() {
        let f = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0), (0.0, 1.0)]).unwrap());
        let rot = AffineMap::linear(mat2(0.6, -0.8, 0.8, 0.6)).unwrap();
        assert!(matches!(
            compose_simple(&f, &rot),
            Err(Error::UnsupportedMap(_))
        ));
    }

    #[test]
    fn sufficiency_identity_map() {
        let f = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0)]).unwrap());
        let phi_y = YoungFunction::power(2.0).unwrap();
        let phi_g = GrowthFunction::power(-0.5);
        let search = SearchSpec::with_window(WindowKind::Cube);
        let rep = sufficiency_bound(
            &AffineMap::identity(1),
            &phi_y,
            &phi_g,
            &[f],
            &search,
            1e-9,
        )
        .unwrap();
        assert!(rep.bound >= 1.0);
        assert!((rep.ratios[0].ratio - 1.0).abs() <= 1e-9);
        assert!(rep.pass);
    }

    #[test]
    fn sufficiency_halving_morrey_line() {
        // phi = r^{-1/2}, Phi = t: ||chi_[0,s]|| = sqrt(s), so the ratio is
        // sqrt(2); the bound is K (C1 + C2 phi(1/2) / 2) = 2 + sqrt(2).
        let f = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0)]).unwrap());
        let phi_y = YoungFunction::power(1.0).unwrap();
        let phi_g = GrowthFunction::power(-0.5);
        let psi = AffineMap::linear(Mat::diagonal(&[0.5]).unwrap()).unwrap();
        let search = SearchSpec::with_window(WindowKind::Cube);
        let rep = sufficiency_bound(&psi, &phi_y, &phi_g, &[f], &search, 1e-10).unwrap();
        assert!((rep.k_measure - 2.0).abs() <= 1e-12);
        assert!((rep.lipschitz - 0.5).abs() <= 1e-12);
        assert!((rep.bound - (2.0 + 2.0f64.sqrt())).abs() <= 1e-9, "{}", rep.bound);
        assert!((rep.ratios[0].ratio - 2.0f64.sqrt()).abs() <= 1e-6);
        assert!(rep.pass);
    }

    #[test]
    fn dilation_power_is_tight() {
        let phi_g = GrowthFunction::morrey(2, 4.0).unwrap();
        let grid = log_spaced(1e-5, 1e5, 200);
        let rep = dilation_opnorm(&phi_g, 2.0, &grid).unwrap();
        let expected = 2.0f64.powf(-0.5);
        assert!((rep.lower - expected).abs() <= 1e-12);
        assert!((rep.upper - expected).abs() <= 1e-12);
        assert!((rep.phi_c - expected).abs() <= 1e-12);
    }

    #[test]
    fn dilation_oscillating_sandwich() {
        let phi_g = GrowthFunction::osc_log(-1.0, 2.0, 1.0).unwrap();
        let cert = default_certificate(&phi_g).unwrap();
        assert!(cert.in_g2_dec());
        let grid = log_spaced(1e-6, 1e6, 400);
        let rep = dilation_opnorm(&phi_g, 2.0, &grid).unwrap();
        assert!(rep.lower < rep.upper);
        let c2 = cert.submultiplicative.value;
        let c3 = cert.reciprocal.value;
        assert!(rep.lower <= c2 * rep.phi_c * (1.0 + 1e-9));
        assert!(rep.upper >= rep.phi_c / (c2 * c3) * (1.0 - 1e-9));
    }

    #[test]
    fn dilation_needs_wide_grid() {
        let phi_g = GrowthFunction::power(-0.5);
        let grid = log_spaced(0.1, 10.0, 50);
        assert!(dilation_opnorm(&phi_g, 2.0, &grid).is_err());
    }

    #[test]
    fn orthogonal_swap_is_exact() {
        let f = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0), (0.0, 2.0)]).unwrap());
        let phi_y = YoungFunction::power(2.0).unwrap();
        let phi_g = GrowthFunction::morrey(2, 4.0).unwrap();
        let search = SearchSpec::with_window(WindowKind::Cube);
        let w = mat2(0.0, 1.0, 1.0, 0.0);
        let rep =
            orthogonal_invariance_check(&w, &f, &phi_y, &phi_g, &search, None).unwrap();
        assert!(rep.exact_path);
        assert!((rep.ratio - 1.0).abs() <= 1e-9, "{}", rep.ratio);
        let refl = mat2(-1.0, 0.0, 0.0, -1.0);
        let rep =
            orthogonal_invariance_check(&refl, &f, &phi_y, &phi_g, &search, None).unwrap();
        assert!(rep.exact_path && rep.pass);
    }

    #[test]
    fn orthogonal_rejects_non_orthogonal() {
        let f = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0), (0.0, 1.0)]).unwrap());
        let phi_y = YoungFunction::power(2.0).unwrap();
        let phi_g = GrowthFunction::morrey(2, 4.0).unwrap();
        let search = SearchSpec::default();
        let w = mat2(1.0, 0.5, 0.0, 1.0);
        assert!(matches!(
            orthogonal_invariance_check(&w, &f, &phi_y, &phi_g, &search, None),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn rasterized_rotation_preserves_mass() {
        let f = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0), (0.0, 1.0)]).unwrap());
        let th = std::f64::consts::FRAC_PI_4;
        let w = mat2(th.cos(), -th.sin(), th.sin(), th.cos());
        let g = compose_rasterized(&f, &w, RASTER_CELL_DEFAULT).unwrap();
        let area: f64 = g.cells().iter().map(|c| c.region.volume()).sum();
        assert!((area - 1.0).abs() <= 1e-3, "area {area}");
        // Pointwise agreement away from the boundary.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
            let y = w.apply(&x);
            let inside_dist = y
                .iter()
                .map(|&v| (v - 0.0).abs().min((v - 1.0).abs()))
                .fold(f64::INFINITY, f64::min);
            if inside_dist > 2.0 * RASTER_CELL_DEFAULT {
                assert_eq!(g.eval(&x), f.eval(&y));
            }
        }
    }

    #[test]
    fn diag_lower_bound_power_values() {
        let phi_g = GrowthFunction::power(-0.5);
        let rep = diag_opnorm_lower(&phi_g, &[0.25, 0.25], None).unwrap();
        assert!((rep.lower_bound - 2.0).abs() <= 1e-12);
        let rep = diag_opnorm_lower(&phi_g, &[2.0, 2.0], None).unwrap();
        assert!((rep.lower_bound - 2.0f64.powf(-0.5)).abs() <= 1e-12);
        let rep = diag_opnorm_lower(&phi_g, &[2.0, 0.5], None).unwrap();
        assert!((rep.lower_bound - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn diag_empirical_dominates_lower_bound() {
        // In-window Morrey data: the cyclic chain achieves the bound.
        let phi_y = YoungFunction::power(1.0).unwrap();
        let phi_g = GrowthFunction::power(-0.5);
        for d in [vec![0.25, 0.25], vec![2.0, 0.5], vec![0.5, 2.0, 1.0]] {
            let emp = diag_empirical_opnorm(&d, &phi_y, &phi_g).unwrap();
            let rep = diag_opnorm_lower(&phi_g, &d, Some(emp.max_ratio)).unwrap();
            assert_eq!(rep.pass, Some(true), "d = {d:?}");
        }
        let emp = diag_empirical_opnorm(&[0.25, 0.25], &phi_y, &phi_g).unwrap();
        assert!((emp.max_ratio - 2.0).abs() <= 1e-9, "{}", emp.max_ratio);
    }

    #[test]
    fn necessity_volume_preserving_is_exact() {
        let phi_g = GrowthFunction::power(-0.5);
        let theta: f64 = 1.1;
        let samples = DiffeoSample {
            samples: vec![
                JacobianSample {
                    x: vec![0.0, 0.0],
                    jacobian: mat2(theta.cos(), -theta.sin(), theta.sin(), theta.cos()),
                },
                JacobianSample {
                    x: vec![1.0, 2.0],
                    jacobian: mat2(2.0, 0.0, 0.0, 0.5),
                },
            ],
        };
        let rep = necessity_certificate(&samples, &phi_g, None).unwrap();
        assert!(rep.pass);
        for s in &rep.samples {
            assert!((s.value - 1.0).abs() <= 1e-10, "{}", s.value);
        }
    }

    #[test]
    fn necessity_halving_fails_tight_band() {
        let phi_g = GrowthFunction::power(-0.5);
        let samples = DiffeoSample {
            samples: vec![JacobianSample {
                x: vec![0.0, 0.0],
                jacobian: Mat::diagonal(&[0.5, 0.5]).unwrap(),
            }],
        };
        let rep = necessity_certificate(&samples, &phi_g, Some(1.5)).unwrap();
        assert!(!rep.pass);
        assert!((rep.samples[0].value - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn necessity_reports_singular_jacobian() {
        let phi_g = GrowthFunction::power(-0.5);
        let samples = DiffeoSample {
            samples: vec![JacobianSample {
                x: vec![0.0, 0.0],
                jacobian: mat2(1.0, 1.0, 1.0, 1.0),
            }],
        };
        let rep = necessity_certificate(&samples, &phi_g, None).unwrap();
        assert!(!rep.pass);
        assert!(rep.samples[0].note.is_some());
    }

    #[test]
    fn rescaling_identity_and_diag() {
        let f = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0), (0.0, 1.0)]).unwrap());
        let phi_y = YoungFunction::power(2.0).unwrap();
        let phi_g = GrowthFunction::morrey(2, 4.0).unwrap();
        let search = SearchSpec::with_window(WindowKind::Cube);
        let samples = DiffeoSample {
            samples: vec![
                JacobianSample {
                    x: vec![0.0, 0.0],
                    jacobian: Mat::identity(2),
                },
                JacobianSample {
                    x: vec![1.0, 1.0],
                    jacobian: Mat::diagonal(&[2.0, 0.5]).unwrap(),
                },
                JacobianSample {
                    x: vec![2.0, 2.0],
                    jacobian: mat2(0.6, -0.8, 0.8, 0.6), // rotation: skipped
                },
            ],
        };
        let rep =
            rescaling_bound_check(&f, &samples, 4.0, &phi_y, &phi_g, &search, 1.0).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!((rep.samples[0].ratio - 1.0).abs() <= 1e-6);
        assert!(rep.samples[2].note.is_some());
    }

    #[test]
    fn transfer_identity_and_halving() {
        let phi_y = YoungFunction::power(1.0).unwrap();
        let phi_g = GrowthFunction::power(-0.5);
        let regions = vec![
            BoxN::from_bounds(&[(0.0, 1.0)]).unwrap(),
            BoxN::from_bounds(&[(2.0, 2.0)]).unwrap(), // zero measure
        ];
        let ident = AffineMap::identity(1);
        let rep = indicator_transfer_check(&ident, &regions, &phi_y, &phi_g).unwrap();
        assert!((rep.items[0].ratio - 1.0).abs() <= 1e-9);
        assert_eq!(rep.skipped, 1);
        let half = AffineMap::linear(Mat::diagonal(&[0.5]).unwrap()).unwrap();
        let rep = indicator_transfer_check(&half, &regions, &phi_y, &phi_g).unwrap();
        // ||chi_[0,2]|| / ||chi_[0,1]|| = sqrt 2 for this Morrey pair.
        assert!((rep.max_ratio - 2.0f64.sqrt()).abs() <= 1e-9, "{}", rep.max_ratio);
    }

    #[test]
    fn transfer_bounded_by_sufficiency() {
        let phi_y = YoungFunction::power(2.0).unwrap();
        let phi_g = GrowthFunction::morrey(2, 4.0).unwrap();
        let psi = AffineMap::linear(Mat::diagonal(&[2.0, 0.5]).unwrap()).unwrap();
        let squares: Vec<BoxN> = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&s| BoxN::from_bounds(&[(0.0, s), (0.0, s)]).unwrap())
            .collect();
        let rep = indicator_transfer_check(&psi, &squares, &phi_y, &phi_g).unwrap();
        let fns: Vec<SimpleFunction> = squares
            .iter()
            .map(|b| SimpleFunction::indicator(b.clone()))
            .collect();
        let search = SearchSpec::with_window(WindowKind::Cube);
        let suff = sufficiency_bound(&psi, &phi_y, &phi_g, &fns, &search, 1e-9).unwrap();
        assert!(rep.max_ratio <= suff.bound * (1.0 + 1e-9));
        assert!(suff.pass);
    }

    #[test]
    fn map_spec_round_trip() {
        let diag: MapSpec = serde_json::from_str(r#"{"kind":"diag","d":[2.0,0.5]}"#).unwrap();
        let m = diag.build().unwrap();
        assert_eq!(m.a.get(0, 0), 2.0);
        assert_eq!(m.a.get(1, 1), 0.5);

        let perm: MapSpec =
            serde_json::from_str(r#"{"kind":"perm","perm":[1,0],"signs":[1.0,-1.0]}"#).unwrap();
        let m = perm.build().unwrap();
        assert_eq!(m.a.get(0, 1), 1.0);
        assert_eq!(m.a.get(1, 0), -1.0);

        let aff: MapSpec =
            serde_json::from_str(r#"{"kind":"affine","A":[[0.0,2.0],[1.0,0.0]],"b":[1.0,0.0]}"#)
                .unwrap();
        let m = aff.build().unwrap();
        assert_eq!(m.b, vec![1.0, 0.0]);
        assert!(box_form(&m).is_some());

        let bad: MapSpec = serde_json::from_str(r#"{"kind":"perm","perm":[0,0]}"#).unwrap();
        assert!(bad.build().is_err());
    }
}

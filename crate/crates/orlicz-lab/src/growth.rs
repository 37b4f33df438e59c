//! Growth functions `phi : (0, inf) -> (0, inf)` and empirical class
//! certificates.
//!
//! The certified classes:
//! * `G0`: `phi -> inf` at `0+` and `-> 0` at `inf` (checked at grid ends);
//! * almost decreasing with constant `C1`: `C1 phi(r) >= phi(s)` for `r < s`;
//! * submultiplicative with constant `C2`: `phi(rs) <= C2 phi(r) phi(s)`;
//! * reciprocal bound with constant `C3`: `phi(1/r) <= C3 / phi(r)`.
//!
//! Constants are empirical minima over the grid, clamped to `>= 1`, and fail
//! when they exceed the configured cap. Certificates are inputs to the
//! operator-norm and indicator-norm machinery, which quotes them as slack.

use crate::error::{Error, Result};
use crate::young::YoungFunction;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Log-spaced grid with `count` points from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

#[derive(Clone)]
enum Shape {
    /// `r^e`.
    Power { exponent: f64 },
    /// `(v_n r^n)^(-1/p)`: reciprocal p-th root of the ball volume.
    BallPower { p: f64, n: usize },
    /// `r^e (1 + |ln r|)`.
    PowerLog { exponent: f64 },
    /// `r^e (base + amp sin(ln r))`; requires `base > |amp|`.
    OscLog { exponent: f64, base: f64, amp: f64 },
    Constant { c: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Shape::Power { exponent } => write!(f, "Power {{ exponent: {exponent} }}"),
            Shape::BallPower { p, n } => write!(f, "BallPower {{ p: {p}, n: {n} }}"),
            Shape::PowerLog { exponent } => write!(f, "PowerLog {{ exponent: {exponent} }}"),
            Shape::OscLog { exponent, base, amp } => {
                write!(f, "OscLog {{ exponent: {exponent}, base: {base}, amp: {amp} }}")
            }
            Shape::Constant { c } => write!(f, "Constant {{ c: {c} }}"),
            Shape::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GrowthFunction {
    shape: Shape,
}

impl GrowthFunction {
    pub fn power(exponent: f64) -> Self {
        GrowthFunction {
            shape: Shape::Power { exponent },
        }
    }

    /// Morrey-scale power `r^{-n/p}`.
    pub fn morrey(n: usize, p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::domain(format!("Morrey exponent p must be positive, got {p}")));
        }
        Ok(GrowthFunction::power(-(n as f64) / p))
    }

    /// `|B(a, r)|^{-1/p}`: the ball-volume normalization.
    pub fn ball_power(n: usize, p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::domain(format!("ball-power p must be positive, got {p}")));
        }
        Ok(GrowthFunction {
            shape: Shape::BallPower { p, n },
        })
    }

    pub fn power_log(exponent: f64) -> Self {
        GrowthFunction {
            shape: Shape::PowerLog { exponent },
        }
    }

    pub fn osc_log(exponent: f64, base: f64, amp: f64) -> Result<Self> {
        if !(base > amp.abs()) {
            return Err(Error::domain(
                "oscillating growth function needs base > |amp| to stay positive",
            ));
        }
        Ok(GrowthFunction {
            shape: Shape::OscLog { exponent, base, amp },
        })
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::domain(format!("constant growth value must be positive, got {c}")));
        }
        Ok(GrowthFunction {
            shape: Shape::Constant { c },
        })
    }

    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        GrowthFunction {
            shape: Shape::Custom(Arc::new(f)),
        }
    }

    /// Evaluate at `r > 0`.
    pub fn value_at(&self, r: f64) -> f64 {
        debug_assert!(r > 0.0, "growth function evaluated at r = {r}");
        match &self.shape {
            Shape::Power { exponent } => r.powf(*exponent),
            Shape::BallPower { p, n } => {
                (crate::domain::unit_ball_volume(*n) * r.powi(*n as i32)).powf(-1.0 / p)
            }
            Shape::PowerLog { exponent } => r.powf(*exponent) * (1.0 + r.ln().abs()),
            Shape::OscLog { exponent, base, amp } => {
                r.powf(*exponent) * (base + amp * r.ln().sin())
            }
            Shape::Constant { c } => *c,
            Shape::Custom(f) => f(r),
        }
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::domain(format!("growth function argument must be > 0, got {r}")));
        }
        Ok(self.value_at(r))
    }

    /// Empirical class certificate over a positive grid.
    pub fn certify(&self, grid: &[f64], opts: &CertifyOptions) -> Result<ClassCertificate> {
        if grid.len() < 3 {
            return Err(Error::usage("certification grid needs at least 3 points"));
        }
        let mut rs: Vec<f64> = grid.to_vec();
        rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        rs.dedup();
        if rs[0] <= 0.0 {
            return Err(Error::domain("growth certification grid must be strictly positive"));
        }
        let vals: Vec<f64> = rs.iter().map(|&r| self.value_at(r)).collect();
        if vals.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::domain(
                "growth function must be finite and strictly positive on the grid",
            ));
        }

        // C1: worst increase along the grid.
        let mut c1 = 1.0f64;
        for i in 0..rs.len() {
            for j in i + 1..rs.len() {
                c1 = c1.max(vals[j] / vals[i]);
            }
        }
        // C2: worst submultiplicativity defect over grid pairs.
        let mut c2 = 1.0f64;
        for (i, &r) in rs.iter().enumerate() {
            for &s in &rs[i..] {
                let prod = r * s;
                if prod.is_finite() && prod > 0.0 {
                    c2 = c2.max(self.value_at(prod) / (vals[i] * self.value_at(s)));
                }
            }
        }
        // C3: worst reciprocal product.
        let mut c3 = 1.0f64;
        for &r in &rs {
            c3 = c3.max(self.value_at(1.0 / r) * self.value_at(r));
        }

        let slack = 1.0 + 1e-9;
        let g0_lo = vals[0];
        let g0_hi = *vals.last().unwrap();
        let in_g0 = g0_lo * slack >= 1.0 / opts.eps_g0 && g0_hi <= opts.eps_g0 * slack;

        let gate = |v: f64| ConstantEstimate {
            value: v,
            ok: v <= opts.cap,
        };
        Ok(ClassCertificate {
            in_g0,
            g0_lo_value: g0_lo,
            g0_hi_value: g0_hi,
            almost_decreasing: gate(c1),
            submultiplicative: gate(c2),
            reciprocal: gate(c3),
            phi_at_half: self.value_at(0.5),
            grid_min: rs[0],
            grid_max: *rs.last().unwrap(),
            grid_points: rs.len(),
        })
    }

    pub fn spec(&self) -> Option<GrowthSpec> {
        match &self.shape {
            Shape::Power { exponent } => Some(GrowthSpec::Power {
                exponent: Some(*exponent),
                p: None,
                n: None,
            }),
            Shape::BallPower { p, n } => Some(GrowthSpec::BallPower { p: *p, n: *n }),
            Shape::PowerLog { exponent } => Some(GrowthSpec::PowerLog { exponent: *exponent }),
            Shape::OscLog { exponent, base, amp } => Some(GrowthSpec::OscLog {
                exponent: *exponent,
                base: *base,
                amp: *amp,
            }),
            Shape::Constant { c } => Some(GrowthSpec::Constant { c: *c }),
            Shape::Custom(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    /// `G0` threshold: `phi(grid_min) >= 1/eps` and `phi(grid_max) <= eps`.
    pub eps_g0: f64,
    /// Constants above this cap are reported as failing the class.
    pub cap: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            eps_g0: 1e-3,
            cap: 1e6,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConstantEstimate {
    pub value: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassCertificate {
    pub in_g0: bool,
    pub g0_lo_value: f64,
    pub g0_hi_value: f64,
    /// `C1` for almost decreasing.
    pub almost_decreasing: ConstantEstimate,
    /// `C2` for submultiplicativity.
    pub submultiplicative: ConstantEstimate,
    /// `C3` for the reciprocal bound.
    pub reciprocal: ConstantEstimate,
    pub phi_at_half: f64,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
}

impl ClassCertificate {
    /// Almost decreasing.
    pub fn in_g_dec(&self) -> bool {
        self.almost_decreasing.ok
    }

    /// Almost decreasing and submultiplicative.
    pub fn in_g1_dec(&self) -> bool {
        self.almost_decreasing.ok && self.submultiplicative.ok
    }

    /// `G0` membership plus `G1` plus the reciprocal bound.
    pub fn in_g2_dec(&self) -> bool {
        self.in_g0 && self.in_g1_dec() && self.reciprocal.ok
    }

    /// `(C1^{-1}, C2 * phi(1/2))`: constants `(cl, cu)` with
    /// `cl * phi(2r) <= phi(r) <= cu * phi(2r)`.
    pub fn doubling_constants(&self) -> Result<(f64, f64)> {
        if !self.in_g1_dec() {
            return Err(Error::precondition(
                "doubling constants need almost-decreasing and submultiplicative certificates",
            ));
        }
        Ok((
            1.0 / self.almost_decreasing.value,
            self.submultiplicative.value * self.phi_at_half,
        ))
    }
}

// ── Psi profiles ────────────────────────────────────────────────────────────

/// Default cap on almost-monotonicity constants when classifying direction.
pub const PSI_DIRECTION_THRESHOLD: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    AlmostIncreasing,
    AlmostDecreasing,
    /// Both constants small: the profile is constant within tolerance.
    Constant,
    Neither,
}

impl Direction {
    pub fn is_almost_increasing(&self) -> bool {
        matches!(self, Direction::AlmostIncreasing | Direction::Constant)
    }
    pub fn is_almost_decreasing(&self) -> bool {
        matches!(self, Direction::AlmostDecreasing | Direction::Constant)
    }
}

/// Monotonicity profile of `Psi_k(C, r) = 1 / (phi(r) * inv_Phi(C r^k))` over
/// grids of `C` and `r`.
#[derive(Debug, Clone, Serialize)]
pub struct PsiProfile {
    pub k: u32,
    pub direction: Direction,
    /// Worst `Psi(r)/Psi(s)` over `r < s` (1 when genuinely increasing).
    pub increasing_constant: f64,
    /// Worst `Psi(s)/Psi(r)` over `r < s` (1 when genuinely decreasing).
    pub decreasing_constant: f64,
    pub threshold: f64,
    pub diagnostic: Option<String>,
}

/// Classify the monotonicity of `Psi_k` for a growth/Young pair.
pub fn psi_monotonicity(
    phi_g: &GrowthFunction,
    phi_y: &YoungFunction,
    k: u32,
    c_grid: &[f64],
    r_grid: &[f64],
    threshold: f64,
) -> Result<PsiProfile> {
    if c_grid.is_empty() || r_grid.is_empty() {
        return Err(Error::usage("psi profile needs nonempty C and r grids"));
    }
    let mut rs: Vec<f64> = r_grid.to_vec();
    rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rs.dedup();
    if rs[0] <= 0.0 {
        return Err(Error::domain("psi r-grid must be strictly positive"));
    }
    let mut inc = 1.0f64;
    let mut dec = 1.0f64;
    for &c in c_grid {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::domain(format!("psi C values must be positive, got {c}")));
        }
        let mut vals = Vec::with_capacity(rs.len());
        for &r in &rs {
            let arg = c * r.powi(k as i32);
            let (inv, degenerate) = phi_y.inverse_checked(arg)?;
            if degenerate || !inv.is_finite() {
                return Ok(PsiProfile {
                    k,
                    direction: Direction::Neither,
                    increasing_constant: f64::INFINITY,
                    decreasing_constant: f64::INFINITY,
                    threshold,
                    diagnostic: Some(format!(
                        "inverse of Young function degenerate at C*r^k = {arg} (inverse = {inv})"
                    )),
                });
            }
            vals.push(1.0 / (phi_g.value_at(r) * inv));
        }
        for i in 0..vals.len() {
            for j in i + 1..vals.len() {
                inc = inc.max(vals[i] / vals[j]);
                dec = dec.max(vals[j] / vals[i]);
            }
        }
    }
    let direction = match (inc <= threshold, dec <= threshold) {
        (true, true) => Direction::Constant,
        (true, false) => Direction::AlmostIncreasing,
        (false, true) => Direction::AlmostDecreasing,
        (false, false) => Direction::Neither,
    };
    Ok(PsiProfile {
        k,
        direction,
        increasing_constant: inc,
        decreasing_constant: dec,
        threshold,
        diagnostic: None,
    })
}

// ── JSON-facing description ─────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GrowthSpec {
    /// Either a raw exponent, or the Morrey form `r^{-n/p}` via `p` and `n`.
    Power {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exponent: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<f64>,
    },
    BallPower { p: f64, n: usize },
    PowerLog { exponent: f64 },
    OscLog { exponent: f64, base: f64, amp: f64 },
    #[serde(rename = "const")]
    Constant { c: f64 },
}

impl GrowthSpec {
    pub fn build(&self) -> Result<GrowthFunction> {
        match self {
            GrowthSpec::Power { exponent, p, n } => match (exponent, p, n) {
                (Some(e), None, None) => Ok(GrowthFunction::power(*e)),
                (None, Some(p), Some(n)) => {
                    if !(*p > 0.0) {
                        return Err(Error::usage(format!("power growth needs p > 0, got {p}")));
                    }
                    Ok(GrowthFunction::power(-n / p))
                }
                _ => Err(Error::usage(
                    "power growth spec needs either `exponent` or both `p` and `n`",
                )),
            },
            GrowthSpec::BallPower { p, n } => GrowthFunction::ball_power(*n, *p),
            GrowthSpec::PowerLog { exponent } => Ok(GrowthFunction::power_log(*exponent)),
            GrowthSpec::OscLog { exponent, base, amp } => {
                GrowthFunction::osc_log(*exponent, *base, *amp)
            }
            GrowthSpec::Constant { c } => GrowthFunction::constant(*c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_grid() -> Vec<f64> {
        log_spaced(1e-6, 1e6, 40)
    }

    #[test]
    fn power_law_certifies_with_unit_constants() {
        let phi = GrowthFunction::power(-0.5);
        let cert = phi.certify(&default_grid(), &CertifyOptions::default()).unwrap();
        assert!(cert.in_g0, "phi(1e-6) = {}", cert.g0_lo_value);
        assert!((cert.almost_decreasing.value - 1.0).abs() <= 1e-12);
        assert!((cert.submultiplicative.value - 1.0).abs() <= 1e-12);
        assert!((cert.reciprocal.value - 1.0).abs() <= 1e-12);
        assert!(cert.in_g2_dec());
        let (dl, du) = cert.doubling_constants().unwrap();
        assert!((dl - 1.0).abs() <= 1e-12);
        assert!((du - 2.0f64.sqrt()).abs() <= 1e-12);
    }

    #[test]
    fn constant_growth_fails_g0_but_keeps_submultiplicativity() {
        let phi = GrowthFunction::constant(2.0).unwrap();
        let cert = phi.certify(&default_grid(), &CertifyOptions::default()).unwrap();
        assert!(!cert.in_g0);
        assert!(cert.in_g1_dec());
        // Empirical C2 = 1/c < 1 is clamped to the reported floor 1.
        assert_eq!(cert.submultiplicative.value, 1.0);
        let half = GrowthFunction::constant(0.5).unwrap();
        let cert = half.certify(&default_grid(), &CertifyOptions::default()).unwrap();
        assert!((cert.submultiplicative.value - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn increasing_power_fails_almost_decreasing() {
        let phi = GrowthFunction::power(1.0);
        let cert = phi.certify(&default_grid(), &CertifyOptions::default()).unwrap();
        assert!(!cert.almost_decreasing.ok);
        assert!(!cert.in_g_dec());
        assert!(cert.doubling_constants().is_err());
    }

    #[test]
    fn oscillating_family_certifies_g2() {
        // Slope -1/4 is gentler than the oscillation, so the function is
        // genuinely non-monotone and C1 > 1; a steeper slope like -1 would
        // dominate the wiggle and give C1 = 1 exactly.
        let phi = GrowthFunction::osc_log(-0.25, 2.0, 1.0).unwrap();
        let grid: Vec<f64> = (-48..=48).map(|j| (2.0f64).powi(j)).collect();
        let cert = phi.certify(&grid, &CertifyOptions::default()).unwrap();
        assert!(cert.in_g0, "lo {} hi {}", cert.g0_lo_value, cert.g0_hi_value);
        assert!(cert.in_g2_dec(), "{cert:?}");
        assert!(cert.almost_decreasing.value > 1.0);
        assert!(cert.submultiplicative.value > 1.0);
    }

    #[test]
    fn nonpositive_growth_is_rejected() {
        let phi = GrowthFunction::custom(|r| r - 1.0);
        assert!(phi.certify(&default_grid(), &CertifyOptions::default()).is_err());
    }

    #[test]
    fn psi_direction_matches_morrey_exponent_arithmetic() {
        // n = 2, p = 1.5, q = 1: Psi_k ~ r^{n/p - k}, so Psi_1 increases and
        // Psi_2 decreases.
        let phi_g = GrowthFunction::morrey(2, 1.5).unwrap();
        let phi_y = YoungFunction::power(1.0).unwrap();
        let c_grid = [0.25, 1.0, 4.0];
        let r_grid = log_spaced(1e-6, 1e6, 30);
        let p1 = psi_monotonicity(&phi_g, &phi_y, 1, &c_grid, &r_grid, PSI_DIRECTION_THRESHOLD)
            .unwrap();
        assert_eq!(p1.direction, Direction::AlmostIncreasing);
        assert!(p1.increasing_constant <= 1.0 + 1e-9);
        let p2 = psi_monotonicity(&phi_g, &phi_y, 2, &c_grid, &r_grid, PSI_DIRECTION_THRESHOLD)
            .unwrap();
        assert_eq!(p2.direction, Direction::AlmostDecreasing);
    }

    #[test]
    fn psi_constant_profile_reports_both_directions() {
        // phi = r^{-1}, Phi = t, k = 1: Psi = 1/(r^{-1} C r) = 1/C, constant.
        let phi_g = GrowthFunction::power(-1.0);
        let phi_y = YoungFunction::power(1.0).unwrap();
        let p = psi_monotonicity(
            &phi_g,
            &phi_y,
            1,
            &[1.0, 2.0],
            &log_spaced(1e-4, 1e4, 20),
            PSI_DIRECTION_THRESHOLD,
        )
        .unwrap();
        assert_eq!(p.direction, Direction::Constant);
        assert!(p.direction.is_almost_increasing() && p.direction.is_almost_decreasing());
    }

    #[test]
    fn psi_degenerate_inverse_reports_neither_with_diagnostic() {
        // Flat-segment Young function: inverse is 1 for small args, fine; use
        // a custom Young function that jumps, making the inverse 0.
        let phi_y = YoungFunction::custom(|t| if t > 0.0 { 1e9 } else { 0.0 }, None);
        let phi_g = GrowthFunction::power(-0.5);
        let p = psi_monotonicity(
            &phi_g,
            &phi_y,
            1,
            &[1.0],
            &log_spaced(1e-3, 1e3, 10),
            PSI_DIRECTION_THRESHOLD,
        )
        .unwrap();
        assert_eq!(p.direction, Direction::Neither);
        assert!(p.diagnostic.is_some());
    }

    #[test]
    fn growth_spec_json_forms() {
        let m: GrowthSpec = serde_json::from_str(r#"{"kind":"power","p":4,"n":2}"#).unwrap();
        let phi = m.build().unwrap();
        assert!((phi.value_at(16.0) - 16.0f64.powf(-0.5)).abs() < 1e-15);
        let e: GrowthSpec = serde_json::from_str(r#"{"kind":"power","exponent":-0.25}"#).unwrap();
        assert!((e.build().unwrap().value_at(16.0) - 0.5).abs() < 1e-15);
        let c: GrowthSpec = serde_json::from_str(r#"{"kind":"const","c":1.5}"#).unwrap();
        assert_eq!(c.build().unwrap().value_at(123.0), 1.5);
        let bad: GrowthSpec = serde_json::from_str(r#"{"kind":"power"}"#).unwrap();
        assert!(bad.build().is_err());
    }

    #[test]
    fn ball_power_matches_ball_volume() {
        let phi = GrowthFunction::ball_power(2, 4.0).unwrap();
        let v = std::f64::consts::PI * 9.0; // |B(0,3)| in the plane
        assert!((phi.value_at(3.0) - v.powf(-0.25)).abs() < 1e-15);
    }
}

//! Young functions and their generalized (right-continuous) inverses.
//!
//! A Young function is convex, vanishes at zero, and tends to infinity. The
//! inverse used everywhere is
//!
//! `inv(u) = inf { t >= 0 : Phi(t) > u }`,   `inv(inf) = inf`,
//!
//! with a strict inequality inside the infimum, so flat segments of `Phi`
//! resolve to their right endpoint. Monotone bisection produces a certified
//! bracket `[lo, hi]` around the infimum; closed forms are used where the
//! function family admits them.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Default relative width of inverse brackets.
pub const INVERSE_RTOL: f64 = 1e-10;
/// Absolute floor for inverse brackets near zero.
pub const INVERSE_ATOL: f64 = 1e-12;

/// One closed-form piece of a piecewise Young function, valid on
/// `[start, next_start)`: `offset + coeff * (t - shift)^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub start: f64,
    pub coeff: f64,
    pub exponent: f64,
    pub shift: f64,
    #[serde(default)]
    pub offset: f64,
}

#[derive(Clone)]
enum Evaluator {
    /// `t^q`, `q >= 1`.
    Power { q: f64 },
    Piecewise { pieces: Vec<Piece> },
    /// Exponential-type preset: `2^{2n} exp(-1/t)` on `(0, 1/2]`, continued
    /// by the matching power branch `2^{4n} e^{-2} t^{2n}` for `t > 1/2`.
    /// The power coefficient is forced by continuity at `t = 1/2`.
    AppendixExp { n: u32 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Evaluator::Power { q } => write!(f, "Power {{ q: {q} }}"),
            Evaluator::Piecewise { pieces } => write!(f, "Piecewise({} pieces)", pieces.len()),
            Evaluator::AppendixExp { n } => write!(f, "AppendixExp {{ n: {n} }}"),
            Evaluator::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// A Young function with optional evaluation cap (`Phi = +inf` past the cap).
#[derive(Debug, Clone)]
pub struct YoungFunction {
    eval: Evaluator,
    domain_cap: Option<f64>,
}

impl YoungFunction {
    pub fn power(q: f64) -> Result<Self> {
        if !(q.is_finite() && q >= 1.0) {
            return Err(Error::domain(format!("power Young function needs q >= 1, got {q}")));
        }
        Ok(YoungFunction {
            eval: Evaluator::Power { q },
            domain_cap: None,
        })
    }

    pub fn piecewise(pieces: Vec<Piece>, domain_cap: Option<f64>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::domain("piecewise Young function needs at least one piece"));
        }
        if pieces[0].start != 0.0 {
            return Err(Error::domain("first piece must start at t = 0"));
        }
        for w in pieces.windows(2) {
            if !(w[1].start > w[0].start) {
                return Err(Error::domain("piece starts must be strictly increasing"));
            }
        }
        Ok(YoungFunction {
            eval: Evaluator::Piecewise { pieces },
            domain_cap,
        })
    }

    /// `Phi(t) = 0` on `[0, 1]`, `t - 1` beyond: the canonical flat-segment
    /// example whose inverse at 0 is the right endpoint 1.
    pub fn flat_segment() -> Self {
        YoungFunction {
            eval: Evaluator::Piecewise {
                pieces: vec![
                    Piece { start: 0.0, coeff: 0.0, exponent: 1.0, shift: 0.0, offset: 0.0 },
                    Piece { start: 1.0, coeff: 1.0, exponent: 1.0, shift: 1.0, offset: 0.0 },
                ],
            },
            domain_cap: None,
        }
    }

    pub fn appendix_exp(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("appendix-exp preset needs n >= 1"));
        }
        Ok(YoungFunction {
            eval: Evaluator::AppendixExp { n },
            domain_cap: None,
        })
    }

    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static, domain_cap: Option<f64>) -> Self {
        YoungFunction {
            eval: Evaluator::Custom(Arc::new(f)),
            domain_cap,
        }
    }

    pub fn domain_cap(&self) -> Option<f64> {
        self.domain_cap
    }

    /// Evaluate without the domain check; `t` must be nonnegative.
    pub fn value_at(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0, "Young function evaluated at negative t = {t}");
        if let Some(cap) = self.domain_cap {
            if t > cap {
                return f64::INFINITY;
            }
        }
        match &self.eval {
            Evaluator::Power { q } => t.powf(*q),
            Evaluator::Piecewise { pieces } => {
                let idx = pieces
                    .iter()
                    .rposition(|p| p.start <= t)
                    .expect("first piece starts at 0");
                let p = &pieces[idx];
                p.offset + p.coeff * (t - p.shift).powf(p.exponent)
            }
            Evaluator::AppendixExp { n } => {
                if t == 0.0 {
                    0.0
                } else if t <= 0.5 {
                    exp2_2n(*n) * (-1.0 / t).exp()
                } else {
                    exp2_2n(*n).powi(2) * (-2.0f64).exp() * t.powi(2 * *n as i32)
                }
            }
            Evaluator::Custom(f) => f(t),
        }
    }

    /// Checked evaluation.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::domain(format!("Young function argument must be >= 0, got {t}")));
        }
        Ok(self.value_at(t))
    }

    /// Generalized inverse with a certified bracket.
    pub fn generalized_inverse(&self, u: f64, rtol: f64, atol: f64) -> Result<InverseResult> {
        if u.is_nan() || u < 0.0 {
            return Err(Error::domain(format!("inverse argument must be >= 0, got {u}")));
        }
        if u == f64::INFINITY {
            return Ok(InverseResult {
                value: f64::INFINITY,
                lo: f64::INFINITY,
                hi: f64::INFINITY,
                overflowed: false,
            });
        }
        // Grow an upper end with Phi(hi) > u.
        let mut hi = 1.0f64;
        let mut lo = 0.0f64;
        while self.value_at(hi) <= u {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return Ok(InverseResult {
                    value: f64::INFINITY,
                    lo,
                    hi: f64::INFINITY,
                    overflowed: true,
                });
            }
        }
        // Invariant: Phi(lo) <= u < Phi(hi); the infimum lies in (lo, hi].
        while hi - lo > atol.max(rtol * hi) {
            let mid = 0.5 * (lo + hi);
            if self.value_at(mid) > u {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(InverseResult {
            value: 0.5 * (lo + hi),
            lo,
            hi,
            overflowed: false,
        })
    }

    /// Inverse as a plain number; closed form where the family admits one,
    /// default-tolerance bisection otherwise.
    pub fn inverse_value(&self, u: f64) -> f64 {
        if u == f64::INFINITY {
            return f64::INFINITY;
        }
        debug_assert!(u >= 0.0);
        match &self.eval {
            Evaluator::Power { q } if self.domain_cap.is_none() => u.powf(1.0 / q),
            Evaluator::AppendixExp { n } if self.domain_cap.is_none() => {
                if u == 0.0 {
                    return 0.0;
                }
                let n = *n;
                let knee = exp2_2n(n) * (-2.0f64).exp(); // Phi(1/2)
                if u <= knee {
                    1.0 / (2.0 * n as f64 * std::f64::consts::LN_2 - u.ln())
                } else {
                    (u * (2.0f64).exp() / exp2_2n(n).powi(2)).powf(1.0 / (2.0 * n as f64))
                }
            }
            _ => self
                .generalized_inverse(u, INVERSE_RTOL, INVERSE_ATOL)
                .map(|r| r.value)
                .unwrap_or(f64::NAN),
        }
    }

    /// Certified bracket `[lo, hi]` around the generalized inverse: exact for
    /// closed-form families, bisection bracket otherwise.
    pub fn inverse_bracket(&self, u: f64) -> Result<(f64, f64)> {
        let has_closed_form = matches!(
            (&self.eval, self.domain_cap),
            (Evaluator::Power { .. }, None) | (Evaluator::AppendixExp { .. }, None)
        );
        if has_closed_form {
            let v = self.inverse_value(u);
            return Ok((v, v));
        }
        let res = self.generalized_inverse(u, INVERSE_RTOL, INVERSE_ATOL)?;
        Ok((res.lo, res.hi))
    }

    /// Inverse value plus a degeneracy flag. The flag is set when the inverse
    /// is zero, non-finite where it should not be, or (for bisected
    /// evaluators) indistinguishable from zero at solver resolution, which
    /// makes downstream quotients like `1/inv` meaningless.
    pub fn inverse_checked(&self, u: f64) -> Result<(f64, bool)> {
        let has_closed_form = matches!(
            (&self.eval, self.domain_cap),
            (Evaluator::Power { .. }, None) | (Evaluator::AppendixExp { .. }, None)
        );
        if has_closed_form {
            let v = self.inverse_value(u);
            return Ok((v, !(v > 0.0)));
        }
        let res = self.generalized_inverse(u, INVERSE_RTOL, INVERSE_ATOL)?;
        let degenerate =
            !(res.value > 0.0) || (res.lo <= 0.0 && res.hi <= 1e3 * INVERSE_ATOL);
        Ok((res.value, degenerate))
    }

    /// Check `Phi(inv(u)) <= u <= inv(Phi(u))` over a grid, using bracket
    /// endpoints conservatively (left endpoint for the first inequality,
    /// right endpoint for the second).
    pub fn verify_inverse_sandwich(&self, us: &[f64], rtol: f64) -> Result<SandwichReport> {
        let mut violations = Vec::new();
        for &u in us {
            let inv = self.generalized_inverse(u, INVERSE_RTOL, INVERSE_ATOL)?;
            if !inv.value.is_finite() {
                continue; // Phi never exceeds u within range; nothing to check
            }
            let left = self.value_at(inv.lo);
            let left_ok = left <= u * (1.0 + rtol) + 1e-300;
            let w = self.value_at(u);
            let right_ok = if w == f64::INFINITY {
                true
            } else {
                let inv2 = self.generalized_inverse(w, INVERSE_RTOL, INVERSE_ATOL)?;
                u <= inv2.hi * (1.0 + rtol) + INVERSE_ATOL
            };
            if !(left_ok && right_ok) {
                violations.push(SandwichViolation {
                    u,
                    phi_of_inverse: left,
                    left_ok,
                    right_ok,
                });
            }
        }
        Ok(SandwichReport {
            checked: us.len(),
            violations,
        })
    }

    /// Empirical Young-property certificate on a sample grid: zero at zero,
    /// nondecreasing, midpoint-convex, eventually above 1.
    pub fn certify(&self, grid: &[f64], tol: f64) -> Result<YoungCertificate> {
        if grid.len() < 3 {
            return Err(Error::usage("certification grid needs at least 3 points"));
        }
        let mut ts: Vec<f64> = grid.to_vec();
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if ts[0] < 0.0 {
            return Err(Error::domain("certification grid contains negative points"));
        }
        let vals: Vec<f64> = ts.iter().map(|&t| self.value_at(t)).collect();

        let zero_at_zero = self.value_at(0.0) == 0.0;
        let mut monotone = true;
        for w in vals.windows(2) {
            if w[1] < w[0] * (1.0 - 1e-14) - 1e-300 {
                monotone = false;
                break;
            }
        }
        let mut convex = true;
        let mut worst_defect = 0.0f64;
        for i in 0..ts.len() {
            for j in i + 1..ts.len() {
                let avg = 0.5 * (vals[i] + vals[j]);
                if avg == f64::INFINITY {
                    continue;
                }
                let mid = self.value_at(0.5 * (ts[i] + ts[j]));
                if mid == f64::INFINITY {
                    convex = false;
                    worst_defect = f64::INFINITY;
                    continue;
                }
                let defect = (mid - avg) / avg.abs().max(1.0);
                worst_defect = worst_defect.max(defect);
                if mid > avg + tol * avg.abs().max(1.0) {
                    convex = false;
                }
            }
        }
        let tends_to_infinity = *vals.last().unwrap() > 1.0;
        Ok(YoungCertificate {
            zero_at_zero,
            monotone,
            convex,
            tends_to_infinity,
            worst_convexity_defect: worst_defect,
            grid_points: ts.len(),
            grid_min: ts[0],
            grid_max: *ts.last().unwrap(),
        })
    }

    /// Serializable description, if the function came from a named family.
    pub fn spec(&self) -> Option<YoungSpec> {
        match &self.eval {
            Evaluator::Power { q } => Some(YoungSpec::Power { q: *q }),
            Evaluator::Piecewise { pieces } => Some(YoungSpec::Piecewise {
                pieces: pieces.clone(),
                domain_cap: self.domain_cap,
            }),
            Evaluator::AppendixExp { n } => Some(YoungSpec::AppendixExp { n: *n }),
            Evaluator::Custom(_) => None,
        }
    }
}

fn exp2_2n(n: u32) -> f64 {
    (2.0f64).powi(2 * n as i32)
}

/// Certified inverse bracket: the infimum lies in `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InverseResult {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub overflowed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichViolation {
    pub u: f64,
    pub phi_of_inverse: f64,
    pub left_ok: bool,
    pub right_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub checked: usize,
    pub violations: Vec<SandwichViolation>,
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct YoungCertificate {
    pub zero_at_zero: bool,
    pub monotone: bool,
    pub convex: bool,
    pub tends_to_infinity: bool,
    pub worst_convexity_defect: f64,
    pub grid_points: usize,
    pub grid_min: f64,
    pub grid_max: f64,
}

impl YoungCertificate {
    pub fn passed(&self) -> bool {
        self.zero_at_zero && self.monotone && self.convex && self.tends_to_infinity
    }
}

/// JSON-facing description of a Young function.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum YoungSpec {
    Power { q: f64 },
    Piecewise {
        pieces: Vec<Piece>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        domain_cap: Option<f64>,
    },
    AppendixExp { n: u32 },
    FlatSegment,
}

impl YoungSpec {
    pub fn build(&self) -> Result<YoungFunction> {
        match self {
            YoungSpec::Power { q } => YoungFunction::power(*q),
            YoungSpec::Piecewise { pieces, domain_cap } => {
                YoungFunction::piecewise(pieces.clone(), *domain_cap)
            }
            YoungSpec::AppendixExp { n } => YoungFunction::appendix_exp(*n),
            YoungSpec::FlatSegment => Ok(YoungFunction::flat_segment()),
        }
    }
}

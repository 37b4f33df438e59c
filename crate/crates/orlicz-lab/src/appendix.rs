//! Two worked estimates for the exponential-type Young preset.
//!
//! The embedding check verifies `||f|| <= C ||f||_{M^4_2}^{1/n}` for the
//! preset pair (phi(r) = r^{-1/4}, exponential Phi), with `C` tracked
//! explicitly through the majorant `Psi(t) = 2^{2n} max(t^2, t^{2n})`:
//!
//! * `Phi(t) <= kappa_n Psi(t)` with `kappa_n = max(1, 2^{2n} e^{-2})`
//!   (the factor absorbs the continuity rescaling of the `t > 1/2` branch);
//! * `Psi` is submultiplicative up to `2^{-2n}`, so the Luxemburg value is at
//!   most `kappa^{1/2} / invPsi(|B| / int_B |f|^2)`;
//! * below the working range `|f| < 2^{-n}` only the quadratic branch of
//!   `Psi` is active and the inverse is the `1/(2n)` power branch, which
//!   turns the supremum into the fourth-power Morrey norm raised to `1/n`.
//!
//! The sandwich check verifies, for bounded growth functions,
//! `invPhi(1) inf phi ||f|| <= ||f||_inf <= invPhi(1) sup phi ||f||`.

use crate::domain::{unit_ball_volume, SimpleFunction};
use crate::error::{Error, Result};
use crate::growth::{log_spaced, GrowthFunction};
use crate::norms::{orlicz_morrey_norm, SearchSpec};
use crate::young::YoungFunction;
use serde::Serialize;

/// `kappa_n`: pointwise constant with `Phi_preset <= kappa_n Psi`.
pub fn majorant_constant(n: usize) -> f64 {
    (2.0f64.powi(2 * n as i32) * (-2.0f64).exp()).max(1.0)
}

/// The explicit embedding constant `2 kappa_n^{1/2} v_n^{-1/(4n)}`.
pub fn embedding_chain_constant(n: usize) -> f64 {
    2.0 * majorant_constant(n).sqrt() * unit_ball_volume(n).powf(-1.0 / (4.0 * n as f64))
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingChainReport {
    /// Norm for the preset pair (exponential Phi, phi = r^{-1/4}).
    pub norm_target: f64,
    /// Fourth-power Morrey norm (quadratic mean against `|B|^{-1/4}`).
    pub norm_source: f64,
    pub kappa: f64,
    pub chain_constant: f64,
    /// `chain_constant * norm_source^{1/n}`.
    pub bound: f64,
    /// Realized `norm_target / norm_source^{1/n}`, for regression tracking.
    pub ratio: f64,
    pub pass: bool,
    pub note: String,
}

/// Checks the embedding of bounded fourth-power Morrey functions into the
/// preset space, with the constant chain evaluated numerically.
pub fn appendix_a_embedding(f: &SimpleFunction, search: &SearchSpec) -> Result<EmbeddingChainReport> {
    let n = f.dim();
    let cap = 2.0f64.powi(-(n as i32));
    if f.max_value() >= cap {
        return Err(Error::precondition(format!(
            "embedding chain needs sup |f| < 2^-n = {cap}, got {}",
            f.max_value()
        )));
    }
    let note = "exponential preset rescales the t > 1/2 branch for continuity; \
                kappa absorbs the rescaling in the majorant step"
        .to_string();
    let kappa = majorant_constant(n);
    let chain_constant = embedding_chain_constant(n);
    if f.is_zero() {
        return Ok(EmbeddingChainReport {
            norm_target: 0.0,
            norm_source: 0.0,
            kappa,
            chain_constant,
            bound: 0.0,
            ratio: 0.0,
            pass: true,
            note,
        });
    }

    let phi_target = GrowthFunction::power(-0.25);
    let young_target = YoungFunction::appendix_exp(n as u32)?;
    let norm_target = orlicz_morrey_norm(f, &young_target, &phi_target, search, 1e-9)?.value;

    let phi_source = GrowthFunction::ball_power(n, 4.0)?;
    let young_source = YoungFunction::power(2.0)?;
    let norm_source = orlicz_morrey_norm(f, &young_source, &phi_source, search, 1e-9)?.value;

    let root = norm_source.powf(1.0 / n as f64);
    let bound = chain_constant * root;
    let ratio = norm_target / root;
    Ok(EmbeddingChainReport {
        norm_target,
        norm_source,
        kappa,
        chain_constant,
        bound,
        ratio,
        pass: norm_target <= bound * (1.0 + 1e-6),
        note,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    /// `invPhi(1) * inf phi * ||f||`.
    pub lhs: f64,
    /// `||f||_inf` (max cell value: exact for simple functions).
    pub mid: f64,
    /// `invPhi(1) * sup phi * ||f||`.
    pub rhs: f64,
    pub inf_phi: f64,
    pub sup_phi: f64,
    pub inv_at_one: f64,
    pub norm_value: f64,
    /// `(mid - lhs) / mid` when `mid > 0`.
    pub lower_margin: f64,
    /// `(rhs - mid) / mid` when `mid > 0`.
    pub upper_margin: f64,
    /// Smaller of the two margins.
    pub slack: f64,
    pub pass: bool,
}

/// Grid extremes of `phi`, sharpened by golden-section refinement around the
/// best samples.
fn phi_extremes(phi_g: &GrowthFunction, lo: f64, hi: f64, points: usize) -> Result<(f64, f64)> {
    let grid = log_spaced(lo, hi, points.max(3));
    let vals = grid
        .iter()
        .map(|&r| phi_g.eval(r))
        .collect::<Result<Vec<_>>>()?;
    let refine = |idx: usize, minimize: bool| -> Result<f64> {
        let a = grid[idx.saturating_sub(1)].ln();
        let b = grid[(idx + 1).min(grid.len() - 1)].ln();
        let golden: f64 = (5.0f64.sqrt() - 1.0) / 2.0;
        let (mut xa, mut xb) = (a, b);
        let sign = if minimize { -1.0 } else { 1.0 };
        let eval = |x: f64| phi_g.eval(x.exp()).map(|v| sign * v);
        let mut x1 = xb - golden * (xb - xa);
        let mut x2 = xa + golden * (xb - xa);
        let mut f1 = eval(x1)?;
        let mut f2 = eval(x2)?;
        let mut best = f1.max(f2);
        for _ in 0..60 {
            if f1 < f2 {
                xa = x1;
                x1 = x2;
                f1 = f2;
                x2 = xa + golden * (xb - xa);
                f2 = eval(x2)?;
            } else {
                xb = x2;
                x2 = x1;
                f2 = f1;
                x1 = xb - golden * (xb - xa);
                f1 = eval(x1)?;
            }
            best = best.max(f1.max(f2));
        }
        Ok(sign * best)
    };
    let (mut imin, mut imax) = (0usize, 0usize);
    for (i, v) in vals.iter().enumerate() {
        if *v < vals[imin] {
            imin = i;
        }
        if *v > vals[imax] {
            imax = i;
        }
    }
    let inf = refine(imin, true)?.min(vals[imin]);
    let sup = refine(imax, false)?.max(vals[imax]);
    Ok((inf, sup))
}

const BOUNDED_PHI_CAP: f64 = 1e6;

/// Essential-sup sandwich for bounded growth functions.
pub fn appendix_b_sandwich(
    f: &SimpleFunction,
    phi_y: &YoungFunction,
    phi_g: &GrowthFunction,
    search: &SearchSpec,
    tol: f64,
) -> Result<SandwichReport> {
    let (inf_phi, sup_phi) = phi_extremes(phi_g, 1e-8, 1e8, 600)?;
    if !(inf_phi > 0.0) || !sup_phi.is_finite() || sup_phi / inf_phi > BOUNDED_PHI_CAP {
        return Err(Error::precondition(format!(
            "sandwich needs a bounded growth function; grid gives inf {inf_phi:.3e}, sup {sup_phi:.3e}"
        )));
    }
    let inv_at_one = phi_y.inverse_value(1.0);
    if !(inv_at_one > 0.0 && inv_at_one.is_finite()) {
        return Err(Error::domain("generalized inverse at 1 is degenerate"));
    }
    let mid = f.max_value();
    if f.is_zero() {
        return Ok(SandwichReport {
            lhs: 0.0,
            mid: 0.0,
            rhs: 0.0,
            inf_phi,
            sup_phi,
            inv_at_one,
            norm_value: 0.0,
            lower_margin: 0.0,
            upper_margin: 0.0,
            slack: 0.0,
            pass: true,
        });
    }
    let norm_value = orlicz_morrey_norm(f, phi_y, phi_g, search, 1e-10)?.value;
    let lhs = inv_at_one * inf_phi * norm_value;
    let rhs = inv_at_one * sup_phi * norm_value;
    let lower_margin = (mid - lhs) / mid;
    let upper_margin = (rhs - mid) / mid;
    Ok(SandwichReport {
        lhs,
        mid,
        rhs,
        inf_phi,
        sup_phi,
        inv_at_one,
        norm_value,
        lower_margin,
        upper_margin,
        slack: lower_margin.min(upper_margin),
        pass: lhs <= mid * (1.0 + tol) && mid <= rhs * (1.0 + tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{BoxN, Cell};
    use crate::norms::WindowKind;

    #[test]
    fn chain_constant_values() {
        // n=1: kappa = max(1, 4 e^{-2}) = 1, v_1 = 2.
        assert!((majorant_constant(1) - 1.0).abs() <= 1e-12);
        let c1 = embedding_chain_constant(1);
        assert!((c1 - 2.0 * 2.0f64.powf(-0.25)).abs() <= 1e-12);
        // n=2: kappa = 16 e^{-2}.
        let k2 = 16.0 * (-2.0f64).exp();
        assert!((majorant_constant(2) - k2).abs() <= 1e-12);
        let c2 = embedding_chain_constant(2);
        let expected = 2.0 * k2.sqrt() * std::f64::consts::PI.powf(-1.0 / 8.0);
        assert!((c2 - expected).abs() <= 1e-12);
    }

    #[test]
    fn embedding_line_indicator() {
        // f = (1/4) chi_[0,1]: the Morrey side is 1/4 (best ball is [0,1]
        // itself), the target side is (1/2)^{1/4} * (1/4) / invPhi(1).
        let f = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0)]).unwrap())
            .scaled(0.25)
            .unwrap();
        let rep = appendix_a_embedding(&f, &SearchSpec::default()).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!((rep.norm_source - 0.25).abs() <= 1e-6, "{}", rep.norm_source);
        let inv1 = YoungFunction::appendix_exp(1).unwrap().inverse_value(1.0);
        let expected = 0.5f64.powf(0.25) * 0.25 / inv1;
        assert!((rep.norm_target - expected).abs() <= 1e-6, "{}", rep.norm_target);
        assert!(rep.ratio <= rep.chain_constant);
    }

    #[test]
    fn embedding_plane_staircase() {
        let f = SimpleFunction::new(
            2,
            vec![
                Cell {
                    region: BoxN::from_bounds(&[(0.0, 1.0), (0.0, 1.0)]).unwrap(),
                    value: 1.0 / 8.0,
                },
                Cell {
                    region: BoxN::from_bounds(&[(1.0, 2.0), (0.0, 2.0)]).unwrap(),
                    value: 1.0 / 16.0,
                },
            ],
        )
        .unwrap();
        let rep = appendix_a_embedding(&f, &SearchSpec::default()).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.ratio > 0.0 && rep.ratio <= rep.chain_constant);
    }

    #[test]
    fn embedding_zero_function() {
        let rep = appendix_a_embedding(&SimpleFunction::zero(2), &SearchSpec::default()).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.norm_target, 0.0);
    }

    #[test]
    fn embedding_rejects_large_values() {
        let f = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0)]).unwrap())
            .scaled(0.6)
            .unwrap();
        assert!(matches!(
            appendix_a_embedding(&f, &SearchSpec::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sandwich_constant_growth_is_equalities() {
        let f = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 8.0)]).unwrap())
            .scaled(2.0)
            .unwrap();
        let phi_y = YoungFunction::power(1.0).unwrap();
        let phi_g = GrowthFunction::constant(1.0).unwrap();
        let search = SearchSpec::with_window(WindowKind::Cube);
        let rep = appendix_b_sandwich(&f, &phi_y, &phi_g, &search, 1e-6).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!((rep.lhs - 2.0).abs() <= 1e-6);
        assert!((rep.mid - 2.0).abs() <= 1e-12);
        assert!((rep.rhs - 2.0).abs() <= 1e-6);
    }

    #[test]
    fn sandwich_oscillating_growth() {
        // phi = 2 + sin(log r) ranges over [1, 3]; the norm of chi_[0,1]
        // attains 1 where the oscillation bottoms out inside the support.
        let f = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0)]).unwrap());
        let phi_y = YoungFunction::power(2.0).unwrap();
        let phi_g = GrowthFunction::osc_log(0.0, 2.0, 1.0).unwrap();
        let search = SearchSpec::with_window(WindowKind::Cube);
        let rep = appendix_b_sandwich(&f, &phi_y, &phi_g, &search, 1e-6).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!((rep.inf_phi - 1.0).abs() <= 1e-9);
        assert!((rep.sup_phi - 3.0).abs() <= 1e-9);
        assert!((rep.mid - 1.0).abs() <= 1e-12);
        assert!(rep.norm_value <= 1.0 + 1e-9 && rep.norm_value >= 0.99);
    }

    #[test]
    fn sandwich_rejects_unbounded_growth() {
        let f = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0)]).unwrap());
        let phi_y = YoungFunction::power(2.0).unwrap();
        let phi_g = GrowthFunction::power(-0.5);
        assert!(matches!(
            appendix_b_sandwich(&f, &phi_y, &phi_g, &SearchSpec::default(), 1e-6),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sandwich_zero_function() {
        let phi_y = YoungFunction::power(1.0).unwrap();
        let phi_g = GrowthFunction::constant(2.0).unwrap();
        let rep = appendix_b_sandwich(
            &SimpleFunction::zero(1),
            &phi_y,
            &phi_g,
            &SearchSpec::default(),
            1e-6,
        )
        .unwrap();
        assert!(rep.pass);
        assert_eq!((rep.lhs, rep.mid, rep.rhs), (0.0, 0.0, 0.0));
    }
}

//! Small-eta_c expansion of the efficiency at maximal work, numeric
//! validation of its coefficients, classical comparison values, and
//! detection of temperature-dependent ("order-changing") constraints for
//! which any truncated expansion fails.
//!
//! The efficiency expands as `eta = eta_c/2 + a eta_c^2 + b eta_c^3 + ...`
//! with `a = G10 / (4 (G10 + G01))` at the chi = 0 point. A symmetric
//! constraint forces `a = 1/8`; same-signed first partials force
//! `0 <= a <= 1/4`, the window spanned by the two norm constraints.

use crate::constraint::ConstraintExpr;
use crate::numeric::polyfit;
use crate::optimizer::{maximize_work, OptimizationProblem};
use crate::{Error, Result};
use serde::Serialize;

/// Expansion coefficients of the efficiency at maximal work.
///
/// `cap_a`/`cap_b` are the linear coefficients of the log-derivative
/// expansion `r'/r = A + B chi`; the efficiency coefficients are
/// `a = A/4` and `b = B/8`. `b` is closed-form only for symmetric
/// constraints; for asymmetric ones it is left unset and the numeric
/// [`fit_expansion`] supplies it instead.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExpansionCoeffs {
    pub cap_a: f64,
    pub cap_b: Option<f64>,
    pub a: f64,
    pub b: Option<f64>,
    pub symmetric: bool,
    /// False for order-changing constraints, where no truncated expansion
    /// is meaningful and only the numeric optimizer applies.
    pub valid: bool,
}

/// Classical finite-time comparison values at one eta_c.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClassicalComparison {
    pub sigma_c: f64,
    pub sigma_h: f64,
    /// Low-dissipation window lower edge, eta_c / 2.
    pub eta_ld_low: f64,
    /// Low-dissipation window upper edge, eta_c / (2 - eta_c).
    pub eta_ld_high: f64,
    /// Curzon-Ahlborn value 1 - sqrt(1 - eta_c).
    pub eta_ca: f64,
    /// Quadratic coefficient 1 / (4 (1 + sqrt(sigma_c / sigma_h))) of the
    /// low-dissipation expansion.
    pub ld_quadratic_coeff: f64,
}

/// Sign classification of the quadratic coefficient `a` at chi = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ABoundsClass {
    /// Symmetric constraint, a = 1/8.
    Symmetric,
    /// G10 and G01 share a sign, 0 <= a <= 1/4.
    SameSign,
    /// Opposite signs; a may exceed 1/4 and the classical window.
    OppositeSign,
}

/// Classification plus the computed coefficient.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ABoundsReport {
    pub class: ABoundsClass,
    pub a: f64,
}

/// Analytic expansion coefficients at the chi = 0 point, where
/// |Ec| = |Eh| = `reference_eh` (the solved norm at chi = 0 for the
/// caller's g0).
pub fn expansion_coeffs(constraint: &ConstraintExpr, reference_eh: f64) -> Result<ExpansionCoeffs> {
    if constraint.references_eta_c() {
        return Ok(ExpansionCoeffs {
            cap_a: f64::NAN,
            cap_b: None,
            a: f64::NAN,
            b: None,
            symmetric: false,
            valid: false,
        });
    }
    let r = reference_eh;
    let p = constraint.partials(r, r)?;
    let denom = p.g10 + p.g01;
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::DegenerateConstraint);
    }
    let cap_a = p.g10 / denom;
    let a = cap_a / 4.0;
    let symmetric = constraint.is_symmetric(64)?;
    let (cap_b, b) = if symmetric {
        // B = 1/4 [1 + r (G11 - G20) / G10], b = B / 8
        let cap_b = 0.25 * (1.0 + r * (p.g11 - p.g20) / p.g10);
        (Some(cap_b), Some(cap_b / 8.0))
    } else {
        (None, None)
    };
    Ok(ExpansionCoeffs {
        cap_a,
        cap_b,
        a,
        b,
        symmetric,
        valid: true,
    })
}

/// Truncated series eta_c/2 + a eta_c^2 + b eta_c^3 (quadratic when `b`
/// is absent). Errors on coefficients of an order-changing constraint.
pub fn eta_series(eta_c: f64, coeffs: &ExpansionCoeffs) -> Result<f64> {
    if !coeffs.valid {
        return Err(Error::InvalidCoeffs(
            "order-changing constraint: the truncated series does not apply".into(),
        ));
    }
    Ok(eta_c / 2.0 + coeffs.a * eta_c * eta_c + coeffs.b.unwrap_or(0.0) * eta_c.powi(3))
}

/// Numerically fitted (a, b): least squares of
/// `(eta*(eta_c) - eta_c/2) / eta_c^2` over eta_c in
/// {0.01, 0.02, ..., 0.10}, with eta* from [`maximize_work`]. The fit
/// carries eta_c^2 and eta_c^3 nuisance regressors: a plain straight line
/// on this grid absorbs the series curvature into the intercept (a bias
/// of order 1e-2 for the steeper d-family), which would swamp the
/// coefficients themselves.
pub fn fit_expansion(constraint: &ConstraintExpr, g0: f64) -> Result<(f64, f64)> {
    let mut xs = Vec::with_capacity(10);
    let mut ys = Vec::with_capacity(10);
    for k in 1..=10 {
        let eta_c = 0.01 * k as f64;
        let problem = OptimizationProblem::new(constraint.clone(), g0, eta_c)?;
        let result = maximize_work(&problem)?;
        xs.push(eta_c);
        ys.push((result.eta_star - eta_c / 2.0) / (eta_c * eta_c));
    }
    let coeffs =
        polyfit(&xs, &ys, 3).ok_or_else(|| Error::InvalidCoeffs("degenerate fit grid".into()))?;
    Ok((coeffs[0], coeffs[1]))
}

/// Low-dissipation window, Curzon-Ahlborn value, and the classical
/// quadratic coefficient for bath relaxation scales (sigma_c, sigma_h).
pub fn classical_comparators(
    eta_c: f64,
    sigma_c: f64,
    sigma_h: f64,
) -> Result<ClassicalComparison> {
    if !(sigma_c >= 0.0 && sigma_h >= 0.0) {
        return Err(Error::Config(
            "bath relaxation scales must be non-negative".into(),
        ));
    }
    if sigma_c == 0.0 && sigma_h == 0.0 {
        return Err(Error::Config(
            "bath relaxation scales cannot both be zero".into(),
        ));
    }
    let ld_quadratic_coeff = if sigma_h == 0.0 {
        0.0
    } else {
        0.25 / (1.0 + (sigma_c / sigma_h).sqrt())
    };
    Ok(ClassicalComparison {
        sigma_c,
        sigma_h,
        eta_ld_low: eta_c / 2.0,
        eta_ld_high: eta_c / (2.0 - eta_c),
        eta_ca: 1.0 - (1.0 - eta_c).sqrt(),
        ld_quadratic_coeff,
    })
}

/// Outcome of [`order_changing_check`].
#[derive(Debug, Clone, Serialize)]
pub struct OrderChangingReport {
    /// True when the constraint references the reserved `eta_c` parameter.
    pub order_changing: bool,
    /// Closed-form eta* for the s-family, eta_c / (2 - s), when both s and
    /// eta_c are known.
    pub analytic_eta: Option<f64>,
    /// Whether that value escapes the low-dissipation window on the high
    /// side (true exactly when s > eta_c).
    pub exceeds_ld_bound: Option<bool>,
    /// Set for a d-family constraint with d <= eta_c, where the expansion
    /// in eta_c has no radius of convergence and the device stops being an
    /// engine at d = eta_c.
    pub boundary_case: bool,
    pub notes: Vec<String>,
}

/// Syntactic order-changing detection: a constraint whose coefficients
/// depend on eta_c folds every expansion order into the linear term, so
/// the truncated series can never be right and [`maximize_work`] is the
/// only route. `eta_c` enables the s-family report and the d = eta_c
/// boundary flag.
pub fn order_changing_check(
    constraint: &ConstraintExpr,
    eta_c: Option<f64>,
) -> OrderChangingReport {
    let order_changing = constraint.references_eta_c();
    let mut report = OrderChangingReport {
        order_changing,
        analytic_eta: None,
        exceeds_ld_bound: None,
        boundary_case: false,
        notes: Vec::new(),
    };
    if order_changing {
        report.notes.push(
            "constraint depends on eta_c: expansion coefficients are invalid, \
             use the numeric optimizer"
                .into(),
        );
        if let (Some(&s), Some(eta_c)) = (constraint.params().get("s"), eta_c) {
            let eta_s = eta_c / (2.0 - s);
            let ld_high = eta_c / (2.0 - eta_c);
            report.analytic_eta = Some(eta_s);
            report.exceeds_ld_bound = Some(eta_s > ld_high);
            if eta_s > ld_high {
                report.notes.push(format!(
                    "eta* = {eta_s} exceeds the low-dissipation upper edge {ld_high}"
                ));
            }
        }
    }
    if let (Some(&d), Some(eta_c)) = (constraint.params().get("d"), eta_c) {
        if d <= eta_c {
            report.boundary_case = true;
            report.notes.push(format!(
                "d = {d} <= eta_c = {eta_c}: the series in eta_c stops converging and \
                 the device stops operating as an engine"
            ));
        }
    }
    report
}

/// Classifies the quadratic coefficient by the signs of the first
/// partials at the chi = 0 point.
pub fn a_bounds_check(constraint: &ConstraintExpr, reference_eh: f64) -> Result<ABoundsReport> {
    let coeffs = expansion_coeffs(constraint, reference_eh)?;
    if !coeffs.valid {
        return Err(Error::InvalidCoeffs(
            "order-changing constraint has no chi = 0 expansion".into(),
        ));
    }
    let p = constraint.partials(reference_eh, reference_eh)?;
    let class = if coeffs.symmetric {
        ABoundsClass::Symmetric
    } else if p.g10 * p.g01 >= 0.0 {
        ABoundsClass::SameSign
    } else {
        ABoundsClass::OppositeSign
    };
    Ok(ABoundsReport { class, a: coeffs.a })
}

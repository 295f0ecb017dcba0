//! Maximization of the leading-order work over the compression deviation
//! `chi`, subject to a constraint G(|Ec|, |Eh|) = g0.
//!
//! With uniformly compressed spectra the work is
//! `W(chi) = (xi/(2-xi)) beta_c chi (eta_c - chi) |Eh(chi)|^2 / N`, where
//! `|Eh(chi)|` solves `G((1-chi) r, r) = g0`. The problem is inherently
//! one-dimensional: the prefactors shift `W` by a positive constant and
//! provably never move the maximizer.
//!
//! Stationarity of `W` pins the log-derivative of the solved norm:
//!
//! ```text
//! r'(chi)/r(chi) = (2 chi - eta_c) / (2 chi (eta_c - chi))
//! ```
//!
//! and implicit differentiation of the constraint gives
//! `r'/r = G10 / ((1-chi) G10 + G01)` at `(Ec, Eh) = ((1-chi) r, r)`.
//! The difference of the two sides is the optimality residual whose root
//! is polished after a coarse scan.

use crate::constraint::ConstraintExpr;
use crate::cycle::parallel_work;
use crate::numeric::{brent, golden_max};
use crate::{Error, Result, Tolerances};
use serde::Serialize;

/// One constrained work-maximization instance.
#[derive(Debug, Clone)]
pub struct OptimizationProblem {
    pub constraint: ConstraintExpr,
    /// Constraint constant g0.
    pub g0: f64,
    /// Carnot efficiency, in (0, 1).
    pub eta_c: f64,
    /// Cold inverse temperature; scales the work, not the maximizer.
    pub beta_c: f64,
    /// Swap strength; scales the work, not the maximizer.
    pub xi: f64,
    /// Level count; scales the work, not the maximizer.
    pub n_levels: usize,
    /// Initial |Eh| bracket for the root search (auto-expanded).
    pub eh_bracket: (f64, f64),
    pub tol: Tolerances,
}

impl OptimizationProblem {
    pub fn new(constraint: ConstraintExpr, g0: f64, eta_c: f64) -> Result<Self> {
        if !(eta_c > 0.0 && eta_c < 1.0) {
            return Err(Error::Config(format!("eta_c = {eta_c} must lie in (0, 1)")));
        }
        Ok(OptimizationProblem {
            constraint,
            g0,
            eta_c,
            beta_c: 1.0,
            xi: 1.0,
            n_levels: 2,
            eh_bracket: (1e-3, 1e3),
            tol: Tolerances::default(),
        })
    }

    pub fn with_engine_params(mut self, beta_c: f64, xi: f64, n_levels: usize) -> Self {
        self.beta_c = beta_c;
        self.xi = xi;
        self.n_levels = n_levels;
        self
    }

    /// Constraint with `eta_c` bound, so temperature-dependent presets
    /// evaluate.
    fn bound_constraint(&self) -> ConstraintExpr {
        if self.constraint.references_eta_c() {
            self.constraint.bind("eta_c", self.eta_c)
        } else {
            self.constraint.clone()
        }
    }
}

/// A polished local maximum, kept in the diagnostics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LocalMaximum {
    pub chi: f64,
    pub work: f64,
}

/// Result of [`maximize_work`].
#[derive(Debug, Clone, Serialize)]
pub struct OptimizationResult {
    pub chi_star: f64,
    /// Efficiency at the maximum; equals chi_star for parallel spectra.
    pub eta_star: f64,
    /// |Eh| solved at chi_star.
    pub eh_star: f64,
    pub work_star: f64,
    /// Optimality residual at chi_star (NaN when not evaluable there).
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Set when chi_star crowds the reversible boundary eta_c.
    pub boundary_warning: bool,
    /// Every polished local maximum found by the scan.
    pub local_maxima: Vec<LocalMaximum>,
}

const SCAN_POINTS: usize = 128;
const ROOT_SCAN_POINTS: usize = 256;
const BRACKET_EXPANSION_FACTOR: f64 = 4.0;
const BRACKET_MAX_DECADES: f64 = 40.0;

/// Solves G((1-chi) r, r) = g0 for r > 0 by bracketed root refinement.
///
/// The initial bracket is expanded geometrically until the residual
/// changes sign; a fixed grid scan then guards against multiple roots,
/// which are rejected as ambiguous rather than silently picked from.
pub fn solve_eh(problem: &OptimizationProblem, chi: f64) -> Result<f64> {
    solve_eh_with(&problem.bound_constraint(), problem, chi)
}

fn solve_eh_with(
    constraint: &ConstraintExpr,
    problem: &OptimizationProblem,
    chi: f64,
) -> Result<f64> {
    if chi >= 1.0 || chi.is_nan() {
        return Err(Error::ChiTooLarge(chi));
    }
    let g = |r: f64| -> Result<f64> { Ok(constraint.eval((1.0 - chi) * r, r)? - problem.g0) };
    let (mut lo, mut hi) = problem.eh_bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Config(format!("bad eh bracket ({lo}, {hi})")));
    }

    // expand until a sign change is visible on the scan grid
    let mut found = None;
    loop {
        if let Some(bracket) = scan_for_sign_change(&g, lo, hi, chi)? {
            found = Some(bracket);
            break;
        }
        lo /= BRACKET_EXPANSION_FACTOR;
        hi *= BRACKET_EXPANSION_FACTOR;
        if (hi / lo).log10() > BRACKET_MAX_DECADES {
            break;
        }
    }
    let Some((a, b)) = found else {
        return Err(Error::NoSolution { chi });
    };

    let f = |r: f64| g(r).unwrap_or(f64::NAN);
    let root = brent(f, a, b, 1e-15, 200).ok_or(Error::NoSolution { chi })?;
    let residual = g(root.x)?;
    if residual.abs() > problem.tol.constraint_root * (1.0 + problem.g0.abs()) {
        return Err(Error::NoSolution { chi });
    }
    Ok(root.x)
}

/// Scans a geometric grid for sign changes of `g`. Exactly one -> bracket;
/// more than one -> ambiguous; none -> None. Grid points where `g` hits a
/// domain error are skipped.
fn scan_for_sign_change<G>(g: &G, lo: f64, hi: f64, chi: f64) -> Result<Option<(f64, f64)>>
where
    G: Fn(f64) -> Result<f64>,
{
    let ratio = (hi / lo).powf(1.0 / (ROOT_SCAN_POINTS - 1) as f64);
    let mut prev: Option<(f64, f64)> = None;
    let mut bracket = None;
    let mut crossings = 0usize;
    let mut r = lo;
    for i in 0..ROOT_SCAN_POINTS {
        if let Ok(v) = g(r) {
            if v == 0.0 {
                // exact hit counts as one crossing centered at r
                crossings += 1;
                bracket.get_or_insert((r, r));
            } else if let Some((rp, vp)) = prev {
                if vp.signum() != v.signum() {
                    crossings += 1;
                    bracket.get_or_insert((rp, r));
                }
            }
            prev = Some((r, v));
        }
        if i + 1 < ROOT_SCAN_POINTS {
            r *= ratio;
        }
    }
    match crossings {
        0 => Ok(None),
        1 => Ok(bracket),
        n => Err(Error::AmbiguousConstraint { chi, crossings: n }),
    }
}

/// d ln|Eh| / d chi from implicit differentiation of the constraint,
/// evaluated at the solved norm.
pub fn log_derivative_eh(problem: &OptimizationProblem, chi: f64) -> Result<f64> {
    let constraint = problem.bound_constraint();
    let r = solve_eh_with(&constraint, problem, chi)?;
    log_derivative_at(&constraint, chi, r)
}

fn log_derivative_at(constraint: &ConstraintExpr, chi: f64, r: f64) -> Result<f64> {
    let p = constraint.partials((1.0 - chi) * r, r)?;
    let denom = (1.0 - chi) * p.g10 + p.g01;
    if denom.abs() <= 1e-300 || !denom.is_finite() {
        return Err(Error::SingularConstraint(chi));
    }
    Ok(p.g10 / denom)
}

/// Signed stationarity residual of the work at `chi`; a root marks a
/// stationary point of W(chi).
pub fn optimality_residual(problem: &OptimizationProblem, chi: f64) -> Result<f64> {
    let constraint = problem.bound_constraint();
    let r = solve_eh_with(&constraint, problem, chi)?;
    residual_at(&constraint, problem, chi, r)
}

fn residual_at(
    constraint: &ConstraintExpr,
    problem: &OptimizationProblem,
    chi: f64,
    r: f64,
) -> Result<f64> {
    let eta_c = problem.eta_c;
    if !(chi > 0.0 && chi < eta_c) {
        return Err(Error::Config(format!("chi = {chi} outside (0, {eta_c})")));
    }
    let lhs = log_derivative_at(constraint, chi, r)?;
    let rhs = (2.0 * chi - eta_c) / (2.0 * chi * (eta_c - chi));
    Ok(lhs - rhs)
}

/// Maximizes W(chi) on (0, eta_c): a 128-point scan locates every local
/// maximum, golden-section search narrows each, the stationarity residual
/// is root-polished where it brackets, and the best candidate wins.
pub fn maximize_work(problem: &OptimizationProblem) -> Result<OptimizationResult> {
    let constraint = problem.bound_constraint();
    let eta_c = problem.eta_c;
    let eps = 1e-9 * eta_c;
    let lo = eps;
    let hi = eta_c - eps;
    let evals = std::cell::Cell::new(0usize);

    let work_of = |chi: f64| -> Option<(f64, f64)> {
        evals.set(evals.get() + 1);
        let r = solve_eh_with(&constraint, problem, chi).ok()?;
        let w = parallel_work(
            chi,
            r * r,
            problem.beta_c,
            eta_c,
            problem.xi,
            problem.n_levels,
        );
        w.is_finite().then_some((w, r))
    };

    // coarse scan
    let mut xs = Vec::with_capacity(SCAN_POINTS);
    let mut ws = Vec::with_capacity(SCAN_POINTS);
    let mut any_solution = false;
    for i in 0..SCAN_POINTS {
        let chi = lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64;
        let w = match work_of(chi) {
            Some((w, _)) => {
                any_solution = true;
                w
            }
            None => f64::NEG_INFINITY,
        };
        xs.push(chi);
        ws.push(w);
    }
    if !any_solution {
        return Err(Error::Unsolvable);
    }

    // local maxima of the sampled curve (plateau ends count once)
    let mut candidates = Vec::new();
    for i in 0..SCAN_POINTS {
        let w = ws[i];
        if w == f64::NEG_INFINITY {
            continue;
        }
        let left = if i > 0 { ws[i - 1] } else { f64::NEG_INFINITY };
        let right = if i + 1 < SCAN_POINTS {
            ws[i + 1]
        } else {
            f64::NEG_INFINITY
        };
        if w >= left && w > right || (w > left && w >= right) {
            let a = if i > 0 { xs[i - 1] } else { lo };
            let b = if i + 1 < SCAN_POINTS { xs[i + 1] } else { hi };
            candidates.push((a, b));
        }
    }
    if candidates.is_empty() {
        return Err(Error::Unsolvable);
    }

    let mut local_maxima = Vec::new();
    let mut best: Option<(f64, f64, f64, bool)> = None; // chi, work, residual, polished

    for (a, b) in candidates {
        let golden = golden_max(
            |chi| work_of(chi).map(|(w, _)| w).unwrap_or(f64::NEG_INFINITY),
            a,
            b,
            1e-12,
            300,
        );
        evals.set(evals.get() + golden.iterations);
        let mut chi = golden.x;
        let mut polished = false;

        // residual root polish inside the scan bracket
        let res_f = |c: f64| -> f64 {
            solve_eh_with(&constraint, problem, c)
                .and_then(|r| residual_at(&constraint, problem, c, r))
                .unwrap_or(f64::NAN)
        };
        let span = (b - a).max(1e-12 * eta_c);
        let mut polish_bracket = None;
        let mut delta = span * 1e-3;
        while delta <= span {
            let (pa, pb) = ((chi - delta).max(lo), (chi + delta).min(hi));
            let (fa, fb) = (res_f(pa), res_f(pb));
            if fa.is_finite() && fb.is_finite() && fa.signum() != fb.signum() {
                polish_bracket = Some((pa, pb));
                break;
            }
            delta *= 4.0;
        }
        if let Some((pa, pb)) = polish_bracket {
            if let Some(root) = brent(res_f, pa, pb, 1e-15, 200) {
                if root.x > lo && root.x < hi {
                    chi = root.x;
                    polished = true;
                    evals.set(evals.get() + root.iterations);
                }
            }
        }

        let Some((w, _)) = work_of(chi) else { continue };
        let residual = res_f(chi);
        local_maxima.push(LocalMaximum { chi, work: w });
        let better = match best {
            None => true,
            Some((_, bw, ..)) => w > bw,
        };
        if better {
            best = Some((chi, w, residual, polished));
        }
    }

    let Some((chi_star, work_star, residual, polished)) = best else {
        return Err(Error::Unsolvable);
    };
    if work_star <= 0.0 {
        return Err(Error::NotAnEngine(format!(
            "maximal work {work_star} is not positive under this constraint"
        )));
    }
    let eh_star = solve_eh_with(&constraint, problem, chi_star)?;
    let converged = polished && residual.is_finite() && residual.abs() <= problem.tol.stationarity;
    Ok(OptimizationResult {
        chi_star,
        eta_star: chi_star,
        eh_star,
        work_star,
        residual,
        iterations: evals.get(),
        converged,
        boundary_warning: chi_star > problem.tol.boundary_fraction * eta_c,
        local_maxima,
    })
}

/// Constraint families with a closed-form efficiency at maximal work;
/// used as the analytic oracle against [`maximize_work`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    /// eta_c / 2
    HotNorm,
    /// eta_c / (2 - eta_c)
    ColdNorm,
    /// 1 - sqrt(1 - eta_c), the Curzon-Ahlborn value
    Product,
    /// eta_c / (2 - alpha eta_c)
    AlphaLinear,
    /// eta_c / (2 - s)
    SLinear,
}

/// Closed-form efficiency at maximal work.
pub fn closed_form_efficiency(form: ClosedForm, eta_c: f64, param: Option<f64>) -> Result<f64> {
    Ok(match form {
        ClosedForm::HotNorm => eta_c / 2.0,
        ClosedForm::ColdNorm => eta_c / (2.0 - eta_c),
        ClosedForm::Product => 1.0 - (1.0 - eta_c).sqrt(),
        ClosedForm::AlphaLinear => {
            let alpha = param.ok_or_else(|| Error::MissingParam {
                preset: "alpha_linear".into(),
                param: "alpha".into(),
            })?;
            eta_c / (2.0 - alpha * eta_c)
        }
        ClosedForm::SLinear => {
            let s = param.ok_or_else(|| Error::MissingParam {
                preset: "s_linear".into(),
                param: "s".into(),
            })?;
            eta_c / (2.0 - s)
        }
    })
}

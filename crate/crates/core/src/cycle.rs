//! Exact finite-temperature Otto-cycle computation (the ground truth) plus
//! the leading-order hot-regime work formula and its next-order correction.
//!
//! The cycle alternates two thermal strokes (partial swap toward the bath's
//! Gibbs vector, strength `xi`) with two adiabats that exchange the hot and
//! cold level structures at frozen populations. On the limit cycle the
//! populations after the hot and cold strokes (`p_A`, `p_B`) obey
//!
//! ```text
//! p_A = (1 - xi) p_B + xi g_h        p_B = (1 - xi) p_A + xi g_c
//! ```
//!
//! whose fixed point gives `p_A - p_B = (xi / (2 - xi)) (g_h - g_c)`
//! exactly, at any temperature. That prefactor is therefore a
//! non-perturbative identity of this thermalization map.

use crate::spectra::{CompressionDeviation, Spectrum};
use crate::{Error, Result};
use serde::Serialize;

/// Full parameter set of one engine: level structures, inverse
/// temperatures, and the swap strength.
#[derive(Debug, Clone)]
pub struct EngineSpec {
    hot: Spectrum,
    cold: Spectrum,
    beta_c: f64,
    beta_h: f64,
    xi: f64,
}

impl EngineSpec {
    /// Validates: equal level counts, 0 < beta_h <= beta_c, 0 < xi <= 1.
    /// xi = 0 is excluded as a zero-work degenerate.
    pub fn new(hot: Spectrum, cold: Spectrum, beta_c: f64, beta_h: f64, xi: f64) -> Result<Self> {
        if hot.n_levels() != cold.n_levels() {
            return Err(Error::DimensionMismatch(hot.n_levels(), cold.n_levels()));
        }
        if !(beta_h > 0.0 && beta_c >= beta_h && beta_c.is_finite()) {
            return Err(Error::InvalidEngine(format!(
                "need 0 < beta_h <= beta_c, got beta_h = {beta_h}, beta_c = {beta_c}"
            )));
        }
        if !(xi > 0.0 && xi <= 1.0) {
            return Err(Error::InvalidEngine(format!(
                "swap parameter xi = {xi} not in (0, 1]"
            )));
        }
        Ok(EngineSpec {
            hot,
            cold,
            beta_c,
            beta_h,
            xi,
        })
    }

    /// Engine with uniformly compressed cold levels, cold = (1-chi) * hot.
    pub fn parallel(
        hot: Spectrum,
        chi: CompressionDeviation,
        beta_c: f64,
        beta_h: f64,
        xi: f64,
    ) -> Result<Self> {
        let cold = hot.compress(chi)?;
        EngineSpec::new(hot, cold, beta_c, beta_h, xi)
    }

    pub fn hot(&self) -> &Spectrum {
        &self.hot
    }

    pub fn cold(&self) -> &Spectrum {
        &self.cold
    }

    pub fn beta_c(&self) -> f64 {
        self.beta_c
    }

    pub fn beta_h(&self) -> f64 {
        self.beta_h
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn n_levels(&self) -> usize {
        self.hot.n_levels()
    }

    /// Carnot efficiency 1 - beta_h/beta_c.
    pub fn eta_c(&self) -> f64 {
        1.0 - self.beta_h / self.beta_c
    }
}

/// One limit-cycle evaluation. Heats are signed as absorbed by the system,
/// so `work = q_hot + q_cold` is the first law with work counted as output.
#[derive(Debug, Clone, Serialize)]
pub struct CycleResult {
    pub work: f64,
    pub q_hot: f64,
    pub q_cold: f64,
    /// work / q_hot, present only when q_hot > 0.
    pub efficiency: Option<f64>,
    pub pop_after_hot: Vec<f64>,
    pub pop_after_cold: Vec<f64>,
}

/// Thermal populations p_i = exp(-beta E_i) / Z, computed with
/// max-subtraction so large beta*E cannot overflow.
pub fn gibbs_populations(s: &Spectrum, beta: f64) -> Result<Vec<f64>> {
    let m = s
        .levels()
        .iter()
        .map(|&e| -beta * e)
        .fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = s.levels().iter().map(|&e| (-beta * e - m).exp()).collect();
    let z: f64 = weights.iter().sum();
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::NonFinitePopulations(beta));
    }
    let p: Vec<f64> = weights.iter().map(|&w| w / z).collect();
    if p.iter().any(|q| !q.is_finite()) {
        return Err(Error::NonFinitePopulations(beta));
    }
    Ok(p)
}

/// Limit-cycle populations after the hot and the cold stroke, given the two
/// thermal targets. Closed form of the two-stroke fixed point:
///
/// ```text
/// p_A = (g_h + (1 - xi) g_c) / (2 - xi)
/// p_B = (g_c + (1 - xi) g_h) / (2 - xi)
/// ```
pub fn swap_steady_state(
    p_hot_th: &[f64],
    p_cold_th: &[f64],
    xi: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if p_hot_th.len() != p_cold_th.len() {
        return Err(Error::DimensionMismatch(p_hot_th.len(), p_cold_th.len()));
    }
    let denom = 2.0 - xi;
    let p_a = p_hot_th
        .iter()
        .zip(p_cold_th)
        .map(|(&h, &c)| (h + (1.0 - xi) * c) / denom)
        .collect();
    let p_b = p_hot_th
        .iter()
        .zip(p_cold_th)
        .map(|(&h, &c)| (c + (1.0 - xi) * h) / denom)
        .collect();
    Ok((p_a, p_b))
}

/// Runs the engine on its limit cycle and returns work, heats, efficiency,
/// and the stroke populations.
pub fn exact_cycle(e: &EngineSpec) -> Result<CycleResult> {
    let g_h = gibbs_populations(e.hot(), e.beta_h())?;
    let g_c = gibbs_populations(e.cold(), e.beta_c())?;
    let (p_a, p_b) = swap_steady_state(&g_h, &g_c, e.xi())?;
    let q_hot: f64 = e
        .hot()
        .levels()
        .iter()
        .zip(p_a.iter().zip(&p_b))
        .map(|(&eh, (&a, &b))| eh * (a - b))
        .sum();
    let q_cold: f64 = e
        .cold()
        .levels()
        .iter()
        .zip(p_a.iter().zip(&p_b))
        .map(|(&ec, (&a, &b))| ec * (b - a))
        .sum();
    let work = q_hot + q_cold;
    let efficiency = (q_hot > 0.0).then(|| work / q_hot);
    Ok(CycleResult {
        work,
        q_hot,
        q_cold,
        efficiency,
        pop_after_hot: p_a,
        pop_after_cold: p_b,
    })
}

/// Leading-order work of the hot N-level swap engine,
///
/// ```text
/// W = (xi / (2 - xi)) (1/N) [ (beta_c + beta_h) Ec.Eh
///                             - beta_c |Ec|^2 - beta_h |Eh|^2 ]
/// ```
///
/// Negative values mean the device is not an engine at these parameters.
pub fn ultra_hot_work(e: &EngineSpec) -> f64 {
    let n = e.n_levels() as f64;
    let dot: f64 = e
        .hot()
        .levels()
        .iter()
        .zip(e.cold().levels())
        .map(|(&h, &c)| h * c)
        .sum();
    let prefactor = e.xi() / (2.0 - e.xi()) / n;
    prefactor
        * ((e.beta_c() + e.beta_h()) * dot
            - e.beta_c() * e.cold().norm_sq()
            - e.beta_h() * e.hot().norm_sq())
}

/// Leading-order work for uniformly compressed spectra,
/// `W = (xi/(2-xi)) beta_c chi (eta_c - chi) |Eh|^2 / N`.
/// Vanishes at chi = 0 (no compression) and chi = eta_c (reversible limit).
pub fn parallel_work(
    chi: f64,
    norm_sq_h: f64,
    beta_c: f64,
    eta_c: f64,
    xi: f64,
    n_levels: usize,
) -> f64 {
    xi / (2.0 - xi) * beta_c * chi * (eta_c - chi) * norm_sq_h / n_levels as f64
}

/// Next-order (beta^2) additive correction to [`ultra_hot_work`]:
///
/// ```text
/// (xi/(2-xi)) (1/N) sum_i [ 1/2 beta_c^2 Ec_i^3 + 1/2 beta_h^2 Eh_i^3
///                           - 1/2 beta_c^2 Ec_i^2 Eh_i - 1/2 beta_h^2 Eh_i^2 Ec_i ]
/// ```
///
/// Each term sums to zero when both spectra are symmetric about zero, so
/// the correction vanishes identically for two-level systems and for
/// evenly spaced spectra.
pub fn beta2_correction(e: &EngineSpec) -> f64 {
    let n = e.n_levels() as f64;
    let bc2 = e.beta_c() * e.beta_c();
    let bh2 = e.beta_h() * e.beta_h();
    let sum: f64 = e
        .hot()
        .levels()
        .iter()
        .zip(e.cold().levels())
        .map(|(&h, &c)| {
            0.5 * bc2 * c * c * c + 0.5 * bh2 * h * h * h
                - 0.5 * bc2 * c * c * h
                - 0.5 * bh2 * h * h * c
        })
        .sum();
    e.xi() / (2.0 - e.xi()) / n * sum
}

/// Thermal-state observables of one bath contact, exact and to leading
/// order in beta, side by side.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BathObservables {
    /// Exact tr(rho E) = sum E_i p_i. Negative for beta > 0 since the
    /// Gibbs state overweights the low levels of a zero-mean spectrum.
    pub internal_energy: f64,
    /// Leading-order magnitude beta |E|^2 / N of the internal energy.
    pub internal_energy_ultra_mag: f64,
    /// Exact tr(rho^2) = sum p_i^2.
    pub purity: f64,
    /// 1/N + beta^2 |E|^2 / N^2.
    pub purity_ultra: f64,
    /// Exact beta^2 times the level variance under the thermal weights.
    pub heat_capacity: f64,
    /// beta^2 |E|^2 / N.
    pub heat_capacity_ultra: f64,
}

/// Internal energy, purity, and heat capacity of the Gibbs state at
/// inverse temperature `beta`, with their leading-order forms.
pub fn bath_observables(s: &Spectrum, beta: f64) -> Result<BathObservables> {
    let p = gibbs_populations(s, beta)?;
    let mean_e: f64 = s.levels().iter().zip(&p).map(|(&e, &q)| e * q).sum();
    let mean_e2: f64 = s.levels().iter().zip(&p).map(|(&e, &q)| e * e * q).sum();
    let purity: f64 = p.iter().map(|&q| q * q).sum();
    let n = s.n_levels() as f64;
    Ok(BathObservables {
        internal_energy: mean_e,
        internal_energy_ultra_mag: beta * s.norm_sq() / n,
        purity,
        purity_ultra: 1.0 / n + beta * beta * s.norm_sq() / (n * n),
        heat_capacity: beta * beta * (mean_e2 - mean_e * mean_e),
        heat_capacity_ultra: beta * beta * s.norm_sq() / n,
    })
}

/// work / q_hot on the limit cycle. Errors with a not-an-engine diagnostic
/// unless q_hot > 0 and work > 0. For uniformly compressed spectra the
/// value equals chi exactly, at any beta and xi.
pub fn exact_efficiency(e: &EngineSpec) -> Result<f64> {
    let cycle = exact_cycle(e)?;
    if cycle.q_hot <= 0.0 {
        return Err(Error::NotAnEngine(format!(
            "no heat drawn from the hot bath (q_hot = {})",
            cycle.q_hot
        )));
    }
    if cycle.work <= 0.0 {
        return Err(Error::NotAnEngine(format!(
            "no net work output (work = {})",
            cycle.work
        )));
    }
    Ok(cycle.work / cycle.q_hot)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen 50-digit oracle values
mod tests {
    use super::*;
    use crate::spectra::Spectrum;

    fn spectrum(levels: &[f64]) -> Spectrum {
        Spectrum::from_raw(levels).unwrap()
    }

    /// Iterates the two-stroke swap map from a uniform start until the
    /// populations stop moving; independent of the closed-form fixed point.
    fn limit_cycle_by_iteration(g_h: &[f64], g_c: &[f64], xi: f64) -> (Vec<f64>, Vec<f64>) {
        let n = g_h.len();
        let mut p = vec![1.0 / n as f64; n];
        let mut p_a = p.clone();
        let mut p_b = p.clone();
        for _ in 0..10_000 {
            let next_a: Vec<f64> = p
                .iter()
                .zip(g_h)
                .map(|(&q, &g)| (1.0 - xi) * q + xi * g)
                .collect();
            let next_b: Vec<f64> = next_a
                .iter()
                .zip(g_c)
                .map(|(&q, &g)| (1.0 - xi) * q + xi * g)
                .collect();
            let moved = next_b
                .iter()
                .zip(&p)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0_f64, f64::max);
            p_a = next_a;
            p_b = next_b.clone();
            p = next_b;
            if moved < 1e-16 {
                break;
            }
        }
        (p_a, p_b)
    }

    #[test]
    fn gibbs_infinite_temperature_is_uniform() {
        let p = gibbs_populations(&spectrum(&[-1.0, 1.0]), 0.0).unwrap();
        assert_eq!(p, vec![0.5, 0.5]);
    }

    #[test]
    fn gibbs_cold_limit_reaches_ground_state() {
        let p = gibbs_populations(&spectrum(&[-1.0, 1.0]), 800.0).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-300);
        assert!(p[1] < 1e-300);
        let p = gibbs_populations(&spectrum(&[-1.0, 1.0]), 1e6).unwrap();
        assert_eq!(p[0], 1.0);
    }

    #[test]
    fn gibbs_three_level_matches_high_precision_evaluation() {
        // exp(-beta E)/Z for E = [-1, 0, 1], beta = 0.1, evaluated at
        // 50-digit precision and rounded to f64.
        let p = gibbs_populations(&spectrum(&[-1.0, 0.0, 1.0]), 0.1).unwrap();
        let expect = [
            0.36716540111092546928,
            0.33222499353334724432,
            0.30060960535572728641,
        ];
        for (got, want) in p.iter().zip(expect) {
            assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn swap_full_thermalization_returns_targets() {
        let g_h = vec![0.7, 0.3];
        let g_c = vec![0.55, 0.45];
        let (p_a, p_b) = swap_steady_state(&g_h, &g_c, 1.0).unwrap();
        assert_eq!(p_a, g_h);
        assert_eq!(p_b, g_c);
    }

    #[test]
    fn swap_equal_baths_is_a_fixed_point_with_zero_gap() {
        let g = vec![0.6, 0.4];
        let (p_a, p_b) = swap_steady_state(&g, &g, 0.3).unwrap();
        for i in 0..2 {
            assert!((p_a[i] - g[i]).abs() < 1e-16);
            assert!((p_a[i] - p_b[i]).abs() < 1e-16);
        }
    }

    #[test]
    fn swap_partial_matches_iterated_map() {
        let g_h = vec![0.6, 0.4];
        let g_c = vec![0.8, 0.2];
        let (p_a, p_b) = swap_steady_state(&g_h, &g_c, 0.5).unwrap();
        // gap = (xi/(2-xi)) (g_h - g_c) = (1/3) [-0.2, 0.2]
        assert!((p_a[0] - p_b[0] + 0.2 / 3.0).abs() < 1e-15);
        assert!((p_a[1] - p_b[1] - 0.2 / 3.0).abs() < 1e-15);
        let (it_a, it_b) = limit_cycle_by_iteration(&g_h, &g_c, 0.5);
        for i in 0..2 {
            assert!((p_a[i] - it_a[i]).abs() < 1e-13);
            assert!((p_b[i] - it_b[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn swap_rejects_dimension_mismatch() {
        assert!(swap_steady_state(&[0.5, 0.5], &[1.0], 1.0).is_err());
    }

    #[test]
    fn cycle_extracts_no_work_without_temperature_difference() {
        // equal bath temperatures: compression costs work (W < 0 for
        // chi > 0, exactly 0 at chi = 0), never produces it
        let hot = spectrum(&[-1.0, 1.0]);
        for chi in [0.0, 0.2, 0.5] {
            let e =
                EngineSpec::parallel(hot.clone(), CompressionDeviation::new(chi), 0.5, 0.5, 1.0)
                    .unwrap();
            let r = exact_cycle(&e).unwrap();
            if chi == 0.0 {
                assert!(r.work.abs() < 1e-16);
            } else {
                assert!(r.work < 0.0, "chi = {chi}: work = {}", r.work);
            }
            assert!(matches!(exact_efficiency(&e), Err(Error::NotAnEngine(_))));
        }
    }

    #[test]
    fn cycle_zero_work_without_compression() {
        let hot = spectrum(&[-1.0, 1.0]);
        let e = EngineSpec::parallel(hot, CompressionDeviation::new(0.0), 0.02, 0.01, 1.0).unwrap();
        let r = exact_cycle(&e).unwrap();
        assert!(r.work.abs() < 1e-18);
        assert!(r.q_hot > 0.0);
    }

    #[test]
    fn cycle_two_level_matches_high_precision_value() {
        // hot [-1, 1], chi = 0.2, beta_c = 0.02, beta_h = 0.01, xi = 1,
        // evaluated at 50-digit precision and rounded to f64.
        let hot = spectrum(&[-1.0, 1.0]);
        let e = EngineSpec::parallel(hot, CompressionDeviation::new(0.2), 0.02, 0.01, 1.0).unwrap();
        let r = exact_cycle(&e).unwrap();
        assert!((r.work - 0.0011997936252925708341).abs() < 2e-15);
        let w_ultra = ultra_hot_work(&e);
        assert!((w_ultra - 0.0012).abs() < 1e-17);
        // leading-order error is O(beta^3) for a symmetric spectrum
        assert!((r.work - w_ultra).abs() < 3e-7);
        assert!((r.efficiency.unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn cycle_satisfies_first_law_and_population_invariants() {
        let hot = spectrum(&[0.0, 0.4, 1.3, 3.0]);
        let e = EngineSpec::parallel(hot, CompressionDeviation::new(0.3), 0.9, 0.4, 0.7).unwrap();
        let r = exact_cycle(&e).unwrap();
        let scale = r.q_hot.abs().max(r.q_cold.abs()).max(1e-300);
        assert!((r.work - (r.q_hot + r.q_cold)).abs() <= 1e-12 * scale);
        for pops in [&r.pop_after_hot, &r.pop_after_cold] {
            assert!((pops.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(pops.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn swap_prefactor_is_exact_at_any_beta() {
        let hot = spectrum(&[-1.0, -1.0, 2.0]);
        for (bc, bh) in [(0.3, 0.1), (2.0, 0.5)] {
            let w1 = exact_cycle(
                &EngineSpec::parallel(hot.clone(), CompressionDeviation::new(0.3), bc, bh, 1.0)
                    .unwrap(),
            )
            .unwrap()
            .work;
            for xi in [0.1, 0.5, 0.9] {
                let w = exact_cycle(
                    &EngineSpec::parallel(hot.clone(), CompressionDeviation::new(0.3), bc, bh, xi)
                        .unwrap(),
                )
                .unwrap()
                .work;
                let expect = xi / (2.0 - xi) * w1;
                assert!((w - expect).abs() <= 1e-12 * expect.abs());
            }
        }
    }

    #[test]
    fn ultra_hot_work_vanishes_for_identical_spectra() {
        let hot = spectrum(&[-1.0, 0.25, 0.75]);
        let e = EngineSpec::new(hot.clone(), hot, 0.02, 0.01, 1.0).unwrap();
        assert!(ultra_hot_work(&e).abs() < 1e-17);
    }

    #[test]
    fn ultra_hot_work_agrees_with_parallel_form() {
        let hot = spectrum(&[-1.3, 0.1, 1.2]);
        for chi in [0.05, 0.2, 0.45] {
            let e =
                EngineSpec::parallel(hot.clone(), CompressionDeviation::new(chi), 0.04, 0.01, 0.6)
                    .unwrap();
            let w = ultra_hot_work(&e);
            let wp = parallel_work(chi, hot.norm_sq(), 0.04, e.eta_c(), 0.6, 3);
            assert!((w - wp).abs() <= 1e-14 * wp.abs().max(1e-300));
        }
    }

    #[test]
    fn ultra_hot_work_anti_parallel_is_negative_with_known_value() {
        // Sorted canonical storage pairs sorted-to-sorted, so a literal
        // anti-parallel EngineSpec (Ec_i = -Eh_i) is not representable;
        // substitute Ec = -Eh into the work formula directly instead.
        let hot = spectrum(&[-1.0, -1.0, 2.0]);
        let (beta, xi) = (0.05, 0.6);
        let n = hot.n_levels() as f64;
        let dot = -hot.norm_sq(); // Ec . Eh with Ec = -Eh
        let w = xi / (2.0 - xi) / n
            * ((beta + beta) * dot - beta * hot.norm_sq() - beta * hot.norm_sq());
        let expect = xi / (2.0 - xi) / n * (-4.0 * beta * hot.norm_sq());
        assert!((w - expect).abs() < 1e-18);
        assert!(w < 0.0);
    }

    #[test]
    fn parallel_work_boundary_zeros_and_peak() {
        assert_eq!(parallel_work(0.0, 2.0, 1.0, 0.4, 1.0, 2), 0.0);
        assert_eq!(parallel_work(0.4, 2.0, 1.0, 0.4, 1.0, 2), 0.0);
        let w = parallel_work(0.2, 2.0, 1.0, 0.4, 1.0, 2);
        assert!((w - 0.04).abs() < 1e-17);
    }

    #[test]
    fn correction_vanishes_for_two_level_and_symmetric_spectra() {
        for levels in [
            vec![-1.0, 1.0],
            vec![-1.0, 0.0, 1.0],
            vec![-3.0, -1.0, 1.0, 3.0],
        ] {
            let hot = spectrum(&levels);
            let e =
                EngineSpec::parallel(hot, CompressionDeviation::new(0.3), 0.02, 0.01, 0.8).unwrap();
            assert!(beta2_correction(&e).abs() < 1e-18, "levels {levels:?}");
        }
    }

    #[test]
    fn correction_matches_beta2_coefficient_of_the_exact_residual() {
        // Fit (W_exact - W_ultra)/beta_c^2 = c2 + c3 beta_c over halvings at
        // fixed beta_h/beta_c and compare the intercept with the formula.
        let hot = spectrum(&[0.0, 0.0, 3.0]); // [-1, -1, 2]
        let chi = CompressionDeviation::new(0.3);
        let mut betas = Vec::new();
        let mut scaled = Vec::new();
        let mut bc = 0.02;
        for _ in 0..5 {
            let e = EngineSpec::parallel(hot.clone(), chi, bc, bc / 2.0, 1.0).unwrap();
            let diff = exact_cycle(&e).unwrap().work - ultra_hot_work(&e);
            betas.push(bc);
            scaled.push(diff / (bc * bc));
            bc /= 2.0;
        }
        let (intercept, _) = crate::numeric::linear_fit(&betas, &scaled).unwrap();
        let e = EngineSpec::parallel(hot, chi, 0.02, 0.01, 1.0).unwrap();
        let c2_formula = beta2_correction(&e) / (0.02 * 0.02);
        assert!(
            (intercept - c2_formula).abs() <= 1e-2 * c2_formula.abs(),
            "fit {intercept} vs formula {c2_formula}"
        );
    }

    #[test]
    fn observables_at_infinite_temperature() {
        let obs = bath_observables(&spectrum(&[-1.0, 0.0, 1.0]), 0.0).unwrap();
        assert!((obs.purity - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(obs.purity_ultra, 1.0 / 3.0);
        assert!(obs.internal_energy.abs() < 1e-16);
        assert_eq!(obs.internal_energy_ultra_mag, 0.0);
    }

    #[test]
    fn observables_two_level_match_closed_forms() {
        let obs = bath_observables(&spectrum(&[-1.0, 1.0]), 0.1).unwrap();
        // exact purity (e^{0.2} + e^{-0.2}) / (e^{0.1} + e^{-0.1})^2,
        // 50-digit evaluation rounded to f64
        assert!((obs.purity - 0.50496685457628011083).abs() < 1e-15);
        assert!((obs.purity_ultra - 0.505).abs() < 1e-16);
        assert!((obs.purity - obs.purity_ultra).abs() < 1e-4); // agree to O(beta^4)
        assert!((obs.heat_capacity_ultra - 0.01).abs() < 1e-17);
        assert!((obs.internal_energy - (-0.099667994624955817118)).abs() < 1e-15);
        assert!((obs.internal_energy_ultra_mag - 0.1).abs() < 1e-17);
        // documented sign mismatch: exact trace is negative, the
        // leading-order field reports the magnitude
        assert!(obs.internal_energy < 0.0);
        assert!((obs.internal_energy.abs() - obs.internal_energy_ultra_mag).abs() < 1e-3);
    }

    #[test]
    fn efficiency_equals_chi_for_parallel_spectra() {
        let hot = spectrum(&[-2.0, -0.5, 2.5]);
        for xi in [0.4, 1.0] {
            let e =
                EngineSpec::parallel(hot.clone(), CompressionDeviation::new(0.3), 0.2, 0.05, xi)
                    .unwrap();
            let eta = exact_efficiency(&e).unwrap();
            assert!((eta - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn efficiency_errors_without_compression() {
        let hot = spectrum(&[-1.0, 1.0]);
        let e = EngineSpec::parallel(hot, CompressionDeviation::new(0.0), 0.02, 0.01, 1.0).unwrap();
        assert!(matches!(exact_efficiency(&e), Err(Error::NotAnEngine(_))));
    }

    #[test]
    fn efficiency_non_parallel_agrees_with_iteration_oracle() {
        let hot = spectrum(&[-1.2, 0.1, 1.1]);
        let cold = spectrum(&[-0.9, 0.05, 0.85]); // not an exact scaling of hot
        let e = EngineSpec::new(hot.clone(), cold.clone(), 0.3, 0.1, 0.5).unwrap();
        let eta = exact_efficiency(&e).unwrap();
        let g_h = gibbs_populations(&hot, 0.1).unwrap();
        let g_c = gibbs_populations(&cold, 0.3).unwrap();
        let (p_a, p_b) = limit_cycle_by_iteration(&g_h, &g_c, 0.5);
        let q_hot: f64 = hot
            .levels()
            .iter()
            .zip(p_a.iter().zip(&p_b))
            .map(|(&eh, (&a, &b))| eh * (a - b))
            .sum();
        let q_cold: f64 = cold
            .levels()
            .iter()
            .zip(p_a.iter().zip(&p_b))
            .map(|(&ec, (&a, &b))| ec * (b - a))
            .sum();
        let eta_oracle = (q_hot + q_cold) / q_hot;
        assert!((eta - eta_oracle).abs() < 1e-10, "{eta} vs {eta_oracle}");
    }

    #[test]
    fn cycle_result_serializes_flat() {
        let hot = spectrum(&[-1.0, 1.0]);
        let e = EngineSpec::parallel(hot, CompressionDeviation::new(0.2), 0.02, 0.01, 1.0).unwrap();
        let r = exact_cycle(&e).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert!(v["work"].is_f64());
        assert!(v["q_hot"].is_f64());
        assert!(v["efficiency"].is_f64());
        assert_eq!(v["pop_after_hot"].as_array().unwrap().len(), 2);
        // q_hot <= 0 serializes efficiency as null
        let idle = EngineSpec::parallel(
            spectrum(&[-1.0, 1.0]),
            CompressionDeviation::new(0.6),
            0.02,
            0.01,
            1.0,
        )
        .unwrap();
        let r = exact_cycle(&idle).unwrap();
        if r.q_hot <= 0.0 {
            let v: serde_json::Value =
                serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
            assert!(v["efficiency"].is_null());
        }
    }

    #[test]
    fn engine_spec_validation() {
        let s = spectrum(&[-1.0, 1.0]);
        let t = spectrum(&[-1.0, 0.0, 1.0]);
        assert!(EngineSpec::new(s.clone(), t, 0.2, 0.1, 1.0).is_err());
        assert!(EngineSpec::new(s.clone(), s.clone(), 0.1, 0.2, 1.0).is_err()); // beta_h > beta_c
        assert!(EngineSpec::new(s.clone(), s.clone(), 0.2, 0.1, 0.0).is_err()); // xi = 0
        assert!(EngineSpec::new(s.clone(), s.clone(), 0.2, 0.1, 1.5).is_err());
        assert!(EngineSpec::new(s.clone(), s.clone(), 0.2, 0.2, 1.0).is_ok()); // beta_c = beta_h ok
        let e = EngineSpec::new(s.clone(), s, 0.2, 0.1, 1.0).unwrap();
        assert!((e.eta_c() - 0.5).abs() < 1e-15);
    }
}

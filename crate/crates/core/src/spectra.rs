//! Energy-level sets: zero-mean normalization, norms, and uniform
//! compression between the hot and cold configurations.

use crate::{Error, Result, Tolerances};
use serde::Serialize;

/// A zero-mean vector of N energy levels with its cached norm-squared.
///
/// Levels are stored sorted ascending; ordering is irrelevant to every
/// formula in the crate but a canonical order makes equality checks
/// deterministic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    levels: Vec<f64>,
    norm_sq: f64,
}

impl Spectrum {
    /// Builds a spectrum from raw levels: shifts to zero mean, sorts, and
    /// caches the norm-squared. Needs at least two finite levels.
    pub fn from_raw(raw: &[f64]) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::TooFewLevels(raw.len()));
        }
        for (i, &e) in raw.iter().enumerate() {
            if !e.is_finite() {
                return Err(Error::NonFiniteLevel(i));
            }
        }
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        let scale = raw.iter().fold(0.0_f64, |m, &e| m.max(e.abs()));
        // skip the shift for inputs already centered to machine precision;
        // this makes construction exactly idempotent
        let mut levels: Vec<f64> = if mean.abs() > 1e-14 * scale.max(1e-300) {
            raw.iter().map(|&e| e - mean).collect()
        } else {
            raw.to_vec()
        };
        levels.sort_by(|a, b| a.partial_cmp(b).expect("levels are finite"));
        let norm_sq = levels.iter().map(|&e| e * e).sum();
        Ok(Spectrum { levels, norm_sq })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Number of levels N.
    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    /// Cached |E|^2.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    /// Euclidean norm |E|.
    pub fn norm(&self) -> f64 {
        self.norm_sq.sqrt()
    }

    /// Cold spectrum with levels (1-chi) * self. Fails for chi >= 1, where
    /// the cold spectrum collapses or inverts.
    pub fn compress(&self, chi: CompressionDeviation) -> Result<Spectrum> {
        let x = chi.value();
        if x >= 1.0 {
            return Err(Error::ChiTooLarge(x));
        }
        let scale = 1.0 - x;
        let levels: Vec<f64> = self.levels.iter().map(|&e| scale * e).collect();
        Ok(Spectrum {
            levels,
            norm_sq: scale * scale * self.norm_sq,
        })
    }

    /// True iff the sorted levels mirror about zero within `tol * max|level|`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let scale = self.max_abs_level().max(1.0);
        let n = self.levels.len();
        (0..n / 2 + 1).all(|i| (self.levels[i] + self.levels[n - 1 - i]).abs() <= tol * scale)
    }

    /// True iff consecutive gaps are all equal within `tol * max|level|`.
    /// An evenly spaced zero-mean spectrum is also symmetric about zero.
    pub fn is_evenly_spaced(&self, tol: f64) -> bool {
        let scale = self.max_abs_level().max(1.0);
        let gap = self.levels[1] - self.levels[0];
        self.levels
            .windows(2)
            .all(|w| ((w[1] - w[0]) - gap).abs() <= tol * scale)
    }

    fn max_abs_level(&self) -> f64 {
        self.levels.iter().fold(0.0_f64, |m, &e| m.max(e.abs()))
    }

    /// Re-checks the construction invariants (zero mean, cached norm).
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let n = self.levels.len();
        if n < 2 {
            return Err(Error::TooFewLevels(n));
        }
        let mean = self.levels.iter().sum::<f64>() / n as f64;
        if mean.abs() > tol.spectrum_zero_mean * self.max_abs_level().max(1.0) {
            return Err(Error::InvalidEngine(format!(
                "spectrum mean {mean} is not zero"
            )));
        }
        let recomputed: f64 = self.levels.iter().map(|&e| e * e).sum();
        if (recomputed - self.norm_sq).abs() > tol.norm_recompute_rel * recomputed.max(1e-300) {
            return Err(Error::InvalidEngine(format!(
                "cached norm_sq {} disagrees with recompute {recomputed}",
                self.norm_sq
            )));
        }
        Ok(())
    }
}

/// Uniform scaling deviation between hot and cold spectra:
/// cold = (1-chi) * hot. Equals the engine efficiency for parallel spectra.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompressionDeviation(f64);

impl CompressionDeviation {
    pub fn new(chi: f64) -> Self {
        CompressionDeviation(chi)
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// Engine operation in the hot regime needs 0 <= chi <= eta_c.
    /// chi = 0 is the zero-work boundary (no compression).
    pub fn is_engine_regime(&self, eta_c: f64) -> bool {
        0.0 <= self.0 && self.0 <= eta_c
    }
}

/// Parses a comma-separated level list such as `-1, 0, 1`.
pub fn parse_levels(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            let t = s.trim();
            t.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad level value '{t}'")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn shifts_to_zero_mean_and_caches_norm() {
        let s = Spectrum::from_raw(&[1.0, 3.0]).unwrap();
        assert_eq!(s.levels(), &[-1.0, 1.0]);
        assert_eq!(s.norm_sq(), 2.0);

        let s = Spectrum::from_raw(&[0.0, 0.0, 3.0]).unwrap();
        assert_eq!(s.levels(), &[-1.0, -1.0, 2.0]);
        assert_eq!(s.norm_sq(), 6.0);
    }

    #[test]
    fn degenerate_spectrum_is_constructible() {
        let s = Spectrum::from_raw(&[5.0, 5.0]).unwrap();
        assert_eq!(s.levels(), &[0.0, 0.0]);
        assert_eq!(s.norm_sq(), 0.0);
    }

    #[test]
    fn rejects_short_and_non_finite_input() {
        assert!(matches!(
            Spectrum::from_raw(&[1.0]),
            Err(Error::TooFewLevels(1))
        ));
        assert!(matches!(
            Spectrum::from_raw(&[1.0, f64::NAN]),
            Err(Error::NonFiniteLevel(1))
        ));
        assert!(matches!(
            Spectrum::from_raw(&[f64::INFINITY, 0.0]),
            Err(Error::NonFiniteLevel(0))
        ));
    }

    #[test]
    fn compress_scales_levels_and_norm() {
        let s = Spectrum::from_raw(&[-1.0, 1.0]).unwrap();
        let same = s.compress(CompressionDeviation::new(0.0)).unwrap();
        assert_eq!(same.levels(), s.levels());

        let c = s.compress(CompressionDeviation::new(0.25)).unwrap();
        assert_eq!(c.levels(), &[-0.75, 0.75]);

        let s = Spectrum::from_raw(&[-2.0, 0.0, 2.0]).unwrap();
        let c = s.compress(CompressionDeviation::new(0.5)).unwrap();
        assert_eq!(c.levels(), &[-1.0, 0.0, 1.0]);
        assert_eq!(c.norm_sq(), 2.0);
    }

    #[test]
    fn compress_rejects_chi_at_or_above_one() {
        let s = Spectrum::from_raw(&[-1.0, 1.0]).unwrap();
        assert!(s.compress(CompressionDeviation::new(1.0)).is_err());
        assert!(s.compress(CompressionDeviation::new(1.5)).is_err());
    }

    #[test]
    fn negative_chi_expands_and_keeps_order() {
        let s = Spectrum::from_raw(&[-1.0, 1.0]).unwrap();
        let e = s.compress(CompressionDeviation::new(-0.5)).unwrap();
        assert_eq!(e.levels(), &[-1.5, 1.5]);
        assert!(e.validate(&Tolerances::default()).is_ok());
    }

    #[test]
    fn engine_regime_window() {
        assert!(CompressionDeviation::new(0.2).is_engine_regime(0.5));
        assert!(!CompressionDeviation::new(0.6).is_engine_regime(0.5));
        assert!(CompressionDeviation::new(0.0).is_engine_regime(0.5));
        assert!(CompressionDeviation::new(0.0).is_engine_regime(0.0));
        assert!(!CompressionDeviation::new(-0.1).is_engine_regime(0.5));
    }

    #[test]
    fn symmetry_checks() {
        let tol = 1e-12;
        assert!(Spectrum::from_raw(&[-1.0, 1.0]).unwrap().is_symmetric(tol));
        assert!(Spectrum::from_raw(&[-1.0, 0.0, 1.0])
            .unwrap()
            .is_symmetric(tol));
        assert!(!Spectrum::from_raw(&[-1.5, 0.5, 1.0])
            .unwrap()
            .is_symmetric(tol));
        assert!(Spectrum::from_raw(&[0.0, 1.0, 2.0, 3.0])
            .unwrap()
            .is_evenly_spaced(tol));
        assert!(!Spectrum::from_raw(&[0.0, 1.0, 2.5])
            .unwrap()
            .is_evenly_spaced(tol));
    }

    #[test]
    fn construction_is_idempotent() {
        let s = Spectrum::from_raw(&[0.3, -1.7, 2.2, 0.9]).unwrap();
        let again = Spectrum::from_raw(s.levels()).unwrap();
        assert_eq!(s.levels(), again.levels());
    }

    #[test]
    fn parses_comma_separated_levels() {
        assert_eq!(parse_levels("-1, 0, 1").unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(parse_levels("2.5e-1,1").unwrap(), vec![0.25, 1.0]);
        assert!(parse_levels("1, x").is_err());
    }

    proptest! {
        #[test]
        fn shift_invariance(
            raw in proptest::collection::vec(-1e3_f64..1e3, 2..12),
            shift in -1e3_f64..1e3,
        ) {
            let base = Spectrum::from_raw(&raw).unwrap();
            let shifted_raw: Vec<f64> = raw.iter().map(|&e| e + shift).collect();
            let shifted = Spectrum::from_raw(&shifted_raw).unwrap();
            let scale = base.levels().iter().fold(1.0_f64, |m, &e| m.max(e.abs()));
            for (a, b) in base.levels().iter().zip(shifted.levels()) {
                prop_assert!((a - b).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn compress_norm_ratio_is_exact(
            raw in proptest::collection::vec(-1e2_f64..1e2, 2..8),
            chi in -0.9_f64..0.99,
        ) {
            let s = Spectrum::from_raw(&raw).unwrap();
            prop_assume!(s.norm_sq() > 1e-9);
            let c = s.compress(CompressionDeviation::new(chi)).unwrap();
            let ratio = c.norm_sq() / s.norm_sq();
            let expect = (1.0 - chi) * (1.0 - chi);
            prop_assert!((ratio - expect).abs() <= 1e-14 * expect.max(1.0));
        }
    }
}

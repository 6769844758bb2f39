//! Zero-noise extrapolation over extracted features.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::noise::NoiseProfile;
use crate::qelm::{ExecutionBackend, FeatureKind, Mitigator, QelmFront};
use crate::simulator::{ideal_distribution, noisy_distribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Folding {
    /// Whole-circuit folding; fractional factors fold trailing gates.
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Extrapolation {
    Polynomial { degree: usize },
    Linear,
    /// `a·b^s + c`.
    Exponential,
}

impl Extrapolation {
    /// Number of free coefficients beyond the constant term.
    pub fn degree(self) -> usize {
        match self {
            Self::Polynomial { degree } => degree,
            Self::Linear => 1,
            Self::Exponential => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZneConfig {
    pub scale_factors: Vec<f64>,
    pub folding: Folding,
    pub extrapolation: Extrapolation,
}

impl Default for ZneConfig {
    fn default() -> Self {
        Self {
            scale_factors: vec![1.0, 2.0, 3.0, 5.0],
            folding: Folding::Global,
            extrapolation: Extrapolation::Polynomial { degree: 3 },
        }
    }
}

impl ZneConfig {
    pub fn new(scale_factors: Vec<f64>, extrapolation: Extrapolation) -> Result<Self> {
        let config = Self {
            scale_factors,
            folding: Folding::Global,
            extrapolation,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.scale_factors;
        if s.first() != Some(&1.0) {
            return Err(Error::Validation("scale_factors must start at 1.0".into()));
        }
        if s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Validation("scale_factors must be strictly increasing".into()));
        }
        let needed = match self.extrapolation {
            Extrapolation::Exponential => 3,
            e => e.degree() + 1,
        };
        if s.len() < needed {
            return Err(Error::Validation(format!(
                "{:?} extrapolation needs at least {needed} scale factors, got {}",
                self.extrapolation,
                s.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: f64,
    /// The exponential fit did not converge and a polynomial was used.
    pub fell_back: bool,
}

/// Zero-noise estimate of `values` measured at `scales`.
pub fn extrapolate(scales: &[f64], values: &[f64], method: Extrapolation) -> Result<f64> {
    extrapolate_detailed(scales, values, method).map(|e| e.value)
}

pub fn extrapolate_detailed(
    scales: &[f64],
    values: &[f64],
    method: Extrapolation,
) -> Result<Extrapolated> {
    if scales.len() != values.len() {
        return Err(Error::LengthMismatch {
            left: scales.len(),
            right: values.len(),
        });
    }
    let needed = match method {
        Extrapolation::Exponential => 3,
        m => (m.degree() + 1).max(2),
    };
    if scales.len() < needed {
        return Err(Error::InsufficientPoints {
            needed,
            got: scales.len(),
        });
    }
    match method {
        Extrapolation::Polynomial { degree } => Ok(Extrapolated {
            value: polynomial_at_zero(scales, values, degree),
            fell_back: false,
        }),
        Extrapolation::Linear => Ok(Extrapolated {
            value: polynomial_at_zero(scales, values, 1),
            fell_back: false,
        }),
        Extrapolation::Exponential => Ok(match exponential_at_zero(scales, values) {
            Some(value) => Extrapolated {
                value,
                fell_back: false,
            },
            None => Extrapolated {
                value: polynomial_at_zero(scales, values, 2.min(scales.len() - 1)),
                fell_back: true,
            },
        }),
    }
}

/// Least-squares polynomial fit evaluated at zero (the constant coefficient).
fn polynomial_at_zero(scales: &[f64], values: &[f64], degree: usize) -> f64 {
    let vander = DMatrix::from_fn(scales.len(), degree + 1, |r, c| scales[r].powi(c as i32));
    let rhs = DVector::from_column_slice(values);
    let coeffs = vander
        .svd(true, true)
        .solve(&rhs, 1e-13)
        .expect("both singular-vector sets were computed");
    coeffs[0]
}

const EXP_BASE_BOUNDS: (f64, f64) = (1e-3, 0.999);

/// Fit `a·b^s + c` with `b` constrained to the decay interval: for a fixed
/// `b` the model is linear in `(a, c)`, so only `b` is searched (coarse grid,
/// then golden section). Returns `None` when the optimum sits on a bound.
fn exponential_at_zero(scales: &[f64], values: &[f64]) -> Option<f64> {
    let fit = |b: f64| -> (f64, f64, f64) {
        let n = scales.len() as f64;
        let xs: Vec<f64> = scales.iter().map(|s| b.powf(*s)).collect();
        let mx = xs.iter().sum::<f64>() / n;
        let my = values.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs.iter().zip(values).map(|(x, y)| (x - mx) * (y - my)).sum();
        let a = if sxx > 1e-300 { sxy / sxx } else { 0.0 };
        let c = my - a * mx;
        let sse = xs.iter().zip(values).map(|(x, y)| (a * x + c - y).powi(2)).sum();
        (sse, a, c)
    };
    let (lo, hi) = EXP_BASE_BOUNDS;
    let grid = 400;
    let step = (hi - lo) / grid as f64;
    let (mut best_i, mut best_sse) = (0, f64::INFINITY);
    for i in 0..=grid {
        let sse = fit(lo + step * i as f64).0;
        if sse < best_sse {
            best_sse = sse;
            best_i = i;
        }
    }
    let scale_of_values = values.iter().map(|v| v * v).sum::<f64>().max(1e-300);
    if best_sse <= 1e-28 * scale_of_values {
        let (_, a, c) = fit(lo + step * best_i as f64);
        return Some(a + c);
    }
    if best_i == 0 || best_i == grid {
        return None;
    }
    let (mut a, mut b) = (lo + step * (best_i - 1) as f64, lo + step * (best_i + 1) as f64);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let x1 = b - ratio * (b - a);
        let x2 = a + ratio * (b - a);
        if fit(x1).0 <= fit(x2).0 {
            b = x2;
        } else {
            a = x1;
        }
    }
    let (_, amp, offset) = fit(0.5 * (a + b));
    Some(amp + offset)
}

/// Combine per-scale feature vectors (`per_scale[k]` measured at
/// `config.scale_factors[k]`) into one mitigated vector.
pub fn mitigate_values(per_scale: &[Vec<f64>], config: &ZneConfig, kind: FeatureKind) -> Result<Vec<f64>> {
    let dim = per_scale.first().map_or(0, Vec::len);
    let mut out = (0..dim)
        .map(|j| {
            let values: Vec<f64> = per_scale.iter().map(|v| v[j]).collect();
            extrapolate(&config.scale_factors, &values, config.extrapolation)
        })
        .collect::<Result<Vec<_>>>()?;
    kind.clip(&mut out);
    Ok(out)
}

/// Mitigated exact probability vector of `circuit` under `profile`.
pub fn zne_distribution(circuit: &Circuit, profile: &NoiseProfile, config: &ZneConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let per_scale = config
        .scale_factors
        .iter()
        .map(|&s| Ok(noisy_distribution(&circuit.fold_to_scale(s)?, profile)?.probabilities().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    mitigate_values(&per_scale, config, FeatureKind::Probabilities)
}

/// Mitigated features of `x` through `front`.
pub fn zne_features(
    front: &QelmFront,
    x: &[f64],
    profile: &NoiseProfile,
    config: &ZneConfig,
    seed: u64,
) -> Result<Vec<f64>> {
    let backend = ExecutionBackend::Mitigated {
        profile: profile.clone(),
        mitigator: Mitigator::Zne(config.clone()),
    };
    front.extract_features(x, &backend, seed)
}

/// Mean absolute error of one configuration on `representative`.
pub fn zne_error(circuit: &Circuit, profile: &NoiseProfile, config: &ZneConfig) -> Result<f64> {
    let ideal = ideal_distribution(circuit)?;
    let mitigated = zne_distribution(circuit, profile, config)?;
    Ok(ideal
        .probabilities()
        .iter()
        .zip(&mitigated)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / mitigated.len() as f64)
}

/// Grid entry with the lowest mitigated-vs-ideal MAE on `representative`.
/// Entries within 1e-9 of the best count as tied; ties prefer fewer scale
/// factors, then a lower extrapolation degree, then grid order.
pub fn zne_calibrate(profile: &NoiseProfile, representative: &Circuit, grid: &[ZneConfig]) -> Result<ZneConfig> {
    if grid.is_empty() {
        return Err(Error::Validation("calibration grid is empty".into()));
    }
    let errors = grid
        .iter()
        .map(|c| zne_error(representative, profile, c))
        .collect::<Result<Vec<_>>>()?;
    let best = errors.iter().copied().fold(f64::INFINITY, f64::min);
    let chosen = (0..grid.len())
        .filter(|&i| errors[i] <= best + 1e-9)
        .min_by_key(|&i| (grid[i].scale_factors.len(), grid[i].extrapolation.degree(), i))
        .expect("at least one entry attains the minimum");
    Ok(grid[chosen].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    const SCALES: [f64; 4] = [1.0, 2.0, 3.0, 5.0];

    /// Lagrange interpolation at zero: an independent route to the value of
    /// the unique interpolating polynomial.
    fn lagrange_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
        (0..xs.len())
            .map(|i| {
                let w: f64 = (0..xs.len())
                    .filter(|&j| j != i)
                    .map(|j| (0.0 - xs[j]) / (xs[i] - xs[j]))
                    .product();
                w * ys[i]
            })
            .sum()
    }

    #[test]
    fn constants_survive_every_method() {
        let v = [0.42; 4];
        for m in [
            Extrapolation::Linear,
            Extrapolation::Polynomial { degree: 3 },
            Extrapolation::Exponential,
        ] {
            assert!((extrapolate(&SCALES, &v, m).unwrap() - 0.42).abs() < 1e-9, "{m:?}");
        }
    }

    #[test]
    fn linear_data_recovered() {
        let v: Vec<f64> = SCALES.iter().map(|s| 1.0 - 0.1 * s).collect();
        assert!((extrapolate(&SCALES, &v, Extrapolation::Polynomial { degree: 1 }).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cubic_matches_lagrange_oracle() {
        let v: Vec<f64> = SCALES.iter().map(|s| 0.9f64.powf(*s)).collect();
        let got = extrapolate(&SCALES, &v, Extrapolation::Polynomial { degree: 3 }).unwrap();
        assert!((got - lagrange_at_zero(&SCALES, &v)).abs() < 1e-10);
    }

    #[test]
    fn exponential_recovers_decay() {
        let v: Vec<f64> = SCALES.iter().map(|s| 0.3 * 0.8f64.powf(*s) + 0.1).collect();
        let e = extrapolate_detailed(&SCALES, &v, Extrapolation::Exponential).unwrap();
        assert!(!e.fell_back);
        assert!((e.value - 0.4).abs() < 1e-6, "{}", e.value);
    }

    #[test]
    fn exponential_falls_back_on_growth() {
        let v: Vec<f64> = SCALES.iter().map(|s| 2f64.powf(*s)).collect();
        assert!(extrapolate_detailed(&SCALES, &v, Extrapolation::Exponential).unwrap().fell_back);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            extrapolate(&[1.0], &[0.5], Extrapolation::Linear),
            Err(Error::InsufficientPoints { .. })
        ));
        assert!(matches!(
            extrapolate(&[1.0, 2.0], &[0.5, 0.4], Extrapolation::Polynomial { degree: 2 }),
            Err(Error::InsufficientPoints { .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(ZneConfig::default().validate().is_ok());
        assert!(ZneConfig::new(vec![2.0, 3.0], Extrapolation::Linear).is_err());
        assert!(ZneConfig::new(vec![1.0, 1.0, 2.0], Extrapolation::Linear).is_err());
        assert!(ZneConfig::new(vec![1.0, 2.0], Extrapolation::Polynomial { degree: 2 }).is_err());
    }

    #[test]
    fn clipping_before_renormalization() {
        // each feature is linear in scale; the first extrapolates to 1.03
        let per_scale: Vec<Vec<f64>> = SCALES
            .iter()
            .map(|s| vec![1.03 - 0.01 * s, -0.01 + 0.01 * s])
            .collect();
        let cfg = ZneConfig::new(SCALES.to_vec(), Extrapolation::Linear).unwrap();
        assert_eq!(mitigate_values(&per_scale, &cfg, FeatureKind::Probabilities).unwrap(), vec![1.0, 0.0]);
    }

    fn toy(n_gates: usize) -> Circuit {
        Circuit::from_gates(1, (0..n_gates).map(|i| Gate::ry(0, if i % 2 == 0 { 0.3 } else { -0.1 }))).unwrap()
    }

    #[test]
    fn zero_noise_mitigation_is_exact() {
        let c = Circuit::bell();
        let got = zne_distribution(&c, &NoiseProfile::ideal(2), &ZneConfig::default()).unwrap();
        let ideal = ideal_distribution(&c).unwrap();
        for (a, b) in got.iter().zip(ideal.probabilities()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn depolarizing_decay_is_mitigated() {
        let c = toy(8);
        let profile = NoiseProfile::depolarizing(1, 0.02, 0.0);
        let ideal = ideal_distribution(&c).unwrap().probabilities()[0];
        let raw = noisy_distribution(&c, &profile).unwrap().probabilities()[0];
        let mitigated = zne_distribution(&c, &profile, &ZneConfig::default()).unwrap()[0];
        assert!((mitigated - ideal).abs() < (raw - ideal).abs());
    }

    #[test]
    fn calibration_prefers_simpler_configs_on_ties() {
        let grid = vec![
            ZneConfig::default(),
            ZneConfig::new(vec![1.0, 3.0], Extrapolation::Linear).unwrap(),
            ZneConfig::new(vec![1.0, 2.0, 3.0], Extrapolation::Linear).unwrap(),
        ];
        let chosen = zne_calibrate(&NoiseProfile::ideal(2), &Circuit::bell(), &grid).unwrap();
        assert_eq!(chosen, grid[1]);
        let single = zne_calibrate(&NoiseProfile::ideal(2), &Circuit::bell(), &grid[..1]).unwrap();
        assert_eq!(single, grid[0]);
    }

    #[test]
    fn calibration_returns_lowest_error_entry() {
        let c = toy(10);
        let profile = NoiseProfile::depolarizing(1, 0.05, 0.0);
        let grid = vec![
            ZneConfig::new(SCALES.to_vec(), Extrapolation::Linear).unwrap(),
            ZneConfig::default(),
        ];
        let chosen = zne_calibrate(&profile, &c, &grid).unwrap();
        let other = grid.iter().find(|g| **g != chosen).unwrap();
        assert!(zne_error(&c, &profile, &chosen).unwrap() <= zne_error(&c, &profile, other).unwrap());
    }
}

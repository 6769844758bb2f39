use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::Result;
use crate::mitigation::{mitigate_values, CircuitMeta, ZneConfig};
use crate::noise::NoiseProfile;
use crate::rng::derive_seed;
use crate::simulator::{ideal_distribution, noisy_distribution, OutcomeDistribution};

use super::backend::{json_fingerprint, ExecutionBackend, Mitigator};
use super::encoder::{encode, EncoderSpec};
use super::features::FeatureMapSpec;
use super::reservoir::{build_reservoir, ReservoirSpec};

/// Everything ahead of the readout: encoder, fixed reservoir, feature map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QelmFront {
    pub encoder: EncoderSpec,
    pub reservoir: ReservoirSpec,
    pub feature_map: FeatureMapSpec,
}

type Bits = Vec<u64>;

/// Memoized simulator output shared across trainings.
///
/// Outcome distributions do not depend on the sampling seed, so they are
/// keyed by `(front, input, execution target, fold scale)` and reused by
/// every repeat; final feature vectors are keyed by `(front, input, backend,
/// seed)`.
#[derive(Debug, Default)]
pub struct FeatureCache {
    distributions: Mutex<HashMap<(u64, Bits, u64, u64), Arc<OutcomeDistribution>>>,
    features: Mutex<HashMap<(u64, Bits, u64, u64), Arc<Vec<f64>>>>,
}

impl FeatureCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn n_distributions(&self) -> usize {
        self.distributions.lock().unwrap().len()
    }

    pub fn n_features(&self) -> usize {
        self.features.lock().unwrap().len()
    }
}

/// Per-call identities, hashed once.
struct Keys<'a> {
    cache: Option<&'a FeatureCache>,
    front: u64,
    /// The front without its shot count: outcome distributions do not
    /// depend on sampling.
    circuits: u64,
    backend: u64,
    target: u64,
}

fn bits(x: &[f64]) -> Bits {
    x.iter().map(|v| v.to_bits()).collect()
}

impl QelmFront {
    pub fn n_qubits(&self) -> usize {
        self.reservoir.n_qubits
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_map.dim(self.n_qubits())
    }

    pub fn reservoir_circuit(&self) -> Circuit {
        build_reservoir(&self.reservoir)
    }

    /// Encoder followed by the reservoir.
    pub fn circuit(&self, x: &[f64]) -> Result<Circuit> {
        encode(x, &self.encoder, self.n_qubits())?.compose(&self.reservoir_circuit())
    }

    pub fn extract_features(&self, x: &[f64], backend: &ExecutionBackend, seed: u64) -> Result<Vec<f64>> {
        let keys = self.keys(backend, None);
        self.features_keyed(x, backend, seed, &keys)
    }

    /// Features of every row; row `i` samples with `derive_seed(seed, i)`.
    pub fn extract_rows(
        &self,
        rows: &[Vec<f64>],
        backend: &ExecutionBackend,
        seed: u64,
        cache: Option<&FeatureCache>,
    ) -> Result<Vec<Vec<f64>>> {
        let keys = self.keys(backend, cache);
        rows.par_iter()
            .enumerate()
            .map(|(i, x)| self.features_keyed(x, backend, derive_seed(seed, i as u64), &keys))
            .collect()
    }

    fn keys<'a>(&self, backend: &ExecutionBackend, cache: Option<&'a FeatureCache>) -> Keys<'a> {
        if cache.is_none() {
            return Keys {
                cache,
                front: 0,
                circuits: 0,
                backend: 0,
                target: 0,
            };
        }
        let target = backend
            .profile()
            .filter(|p| !p.is_noiseless())
            .map_or(0, |p| json_fingerprint(p) | 1);
        let mut exact = self.clone();
        exact.feature_map.shots = 0;
        Keys {
            cache,
            front: json_fingerprint(self),
            circuits: json_fingerprint(&exact),
            backend: backend.fingerprint(),
            target,
        }
    }

    fn features_keyed(&self, x: &[f64], backend: &ExecutionBackend, seed: u64, keys: &Keys<'_>) -> Result<Vec<f64>> {
        let key = keys.cache.map(|_| (keys.front, bits(x), keys.backend, seed));
        if let (Some(cache), Some(key)) = (keys.cache, &key) {
            if let Some(hit) = cache.features.lock().unwrap().get(key) {
                return Ok(hit.as_ref().clone());
            }
        }
        let features = self.compute(x, backend, seed, keys)?;
        if let (Some(cache), Some(key)) = (keys.cache, key) {
            cache.features.lock().unwrap().insert(key, Arc::new(features.clone()));
        }
        Ok(features)
    }

    fn distribution(
        &self,
        x: &[f64],
        circuit: &Circuit,
        profile: Option<&NoiseProfile>,
        scale: f64,
        keys: &Keys<'_>,
    ) -> Result<Arc<OutcomeDistribution>> {
        let key = keys.cache.map(|_| (keys.circuits, bits(x), keys.target, scale.to_bits()));
        if let (Some(cache), Some(key)) = (keys.cache, &key) {
            if let Some(hit) = cache.distributions.lock().unwrap().get(key) {
                return Ok(Arc::clone(hit));
            }
        }
        let folded;
        let run = if scale == 1.0 {
            circuit
        } else {
            folded = circuit.fold_to_scale(scale)?;
            &folded
        };
        // a noiseless profile takes the state-vector path so that it
        // reproduces the ideal backend bit for bit
        let dist = Arc::new(match profile {
            Some(p) if !p.is_noiseless() => noisy_distribution(run, p)?,
            _ => ideal_distribution(run)?,
        });
        if let (Some(cache), Some(key)) = (keys.cache, key) {
            cache.distributions.lock().unwrap().insert(key, Arc::clone(&dist));
        }
        Ok(dist)
    }

    fn compute(&self, x: &[f64], backend: &ExecutionBackend, seed: u64, keys: &Keys<'_>) -> Result<Vec<f64>> {
        let circuit = self.circuit(x)?;
        let map = &self.feature_map;
        match backend {
            ExecutionBackend::Ideal => map.features(&*self.distribution(x, &circuit, None, 1.0, keys)?, seed),
            ExecutionBackend::Noisy(p) => map.features(&*self.distribution(x, &circuit, Some(p), 1.0, keys)?, seed),
            ExecutionBackend::Mitigated { profile, mitigator } => match mitigator {
                Mitigator::Zne(config) => {
                    let per_scale = self.zne_per_scale(x, &circuit, profile, config, seed, keys)?;
                    mitigate_values(&per_scale, config, map.kind)
                }
                Mitigator::Qlear(model) => {
                    let noisy = map.features(&*self.distribution(x, &circuit, Some(profile), 1.0, keys)?, seed)?;
                    model.correct(&noisy, &CircuitMeta::of(&circuit), profile)
                }
            },
        }
    }
}

impl QelmFront {
    /// Raw features at every scale factor. Scale 1 reuses the unmitigated
    /// seed, so it is exactly the unmitigated run.
    fn zne_per_scale(
        &self,
        x: &[f64],
        circuit: &Circuit,
        profile: &NoiseProfile,
        config: &ZneConfig,
        seed: u64,
        keys: &Keys<'_>,
    ) -> Result<Vec<Vec<f64>>> {
        config.validate()?;
        config
            .scale_factors
            .iter()
            .enumerate()
            .map(|(k, &s)| {
                let dist = self.distribution(x, circuit, Some(profile), s, keys)?;
                let s_seed = if k == 0 { seed } else { derive_seed(seed, k as u64) };
                self.feature_map.features(&dist, s_seed)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::qelm::{FeatureKind, ReservoirStyle};

    pub(crate) fn front(n: usize, kind: FeatureKind, shots: u64) -> QelmFront {
        QelmFront {
            encoder: EncoderSpec::new(vec![(0.0, 1.0); n], true).unwrap(),
            reservoir: ReservoirSpec {
                n_qubits: n,
                seed: 5,
                style: ReservoirStyle::ising(),
            },
            feature_map: FeatureMapSpec { kind, shots },
        }
    }

    #[test]
    fn identity_reservoir_minimum_input_gives_basis_vector() {
        let mut f = front(3, FeatureKind::Probabilities, 0);
        f.reservoir.style = ReservoirStyle::Rotation { layers: 0 };
        let v = f.extract_features(&[0.0; 3], &ExecutionBackend::Ideal, 0).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-12);
        assert!(v[1..].iter().all(|p| p.abs() < 1e-12));
    }

    #[test]
    fn zero_noise_backend_matches_ideal() {
        let f = front(3, FeatureKind::ZAndZzExpectations, 0);
        let x = [0.2, 0.7, 0.4];
        let a = f.extract_features(&x, &ExecutionBackend::Ideal, 1).unwrap();
        let b = f.extract_features(&x, &ExecutionBackend::Noisy(NoiseProfile::ideal(3)), 1).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn bell_front_probabilities() {
        // RY(π/2)|0⟩ = H|0⟩, so encoding the midpoint and appending CX(0, 1)
        // prepares the Bell state
        let mut f = front(2, FeatureKind::Probabilities, 0);
        f.encoder = EncoderSpec::new(vec![(0.0, 2.0); 2], false).unwrap();
        f.reservoir.style = ReservoirStyle::Rotation { layers: 0 };
        let circuit = f.circuit(&[1.0, 0.0]).unwrap().append_gate(Gate::cx(0, 1)).unwrap();
        let d = ideal_distribution(&circuit).unwrap();
        let v = FeatureKind::Probabilities.values(&d).unwrap();
        for (got, want) in v.iter().zip([0.5, 0.0, 0.0, 0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn probability_rows_sum_to_one_and_cache_is_transparent() {
        let f = front(3, FeatureKind::Probabilities, 256);
        let backend = ExecutionBackend::Noisy(NoiseProfile::bundled("device-a").unwrap());
        let rows = vec![vec![0.1, 0.5, 0.9], vec![0.3, 0.3, 0.3]];
        let cache = FeatureCache::new();
        let cached = f.extract_rows(&rows, &backend, 9, Some(&cache)).unwrap();
        let again = f.extract_rows(&rows, &backend, 9, Some(&cache)).unwrap();
        let plain = f.extract_rows(&rows, &backend, 9, None).unwrap();
        assert_eq!(cached, plain);
        assert_eq!(cached, again);
        assert_eq!(cache.n_distributions(), 2);
        for r in &cached {
            assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        // a new seed resamples but reuses the distributions
        f.extract_rows(&rows, &backend, 10, Some(&cache)).unwrap();
        assert_eq!(cache.n_distributions(), 2);
        assert_eq!(cache.n_features(), 4);
    }

    #[test]
    fn zne_scale_one_is_the_unmitigated_run() {
        let f = front(2, FeatureKind::Probabilities, 500);
        let profile = NoiseProfile::bundled("device-c").unwrap();
        let x = [0.3, 0.8];
        let keys = f.keys(&ExecutionBackend::Noisy(profile.clone()), None);
        let circuit = f.circuit(&x).unwrap();
        let per_scale = f.zne_per_scale(&x, &circuit, &profile, &ZneConfig::default(), 4, &keys).unwrap();
        let noisy = f.extract_features(&x, &ExecutionBackend::Noisy(profile), 4).unwrap();
        assert_eq!(per_scale[0], noisy);
        assert_ne!(per_scale[1], noisy);
    }
}

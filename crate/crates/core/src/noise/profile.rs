use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuit::Gate;
use crate::error::{Error, Result};

use super::channel::KrausChannel;

/// Per-qubit 2×2 row-stochastic matrix, `m[prepared][measured]`.
pub type Confusion = [[f64; 2]; 2];

/// A synthetic device: gate depolarizing strengths, thermal relaxation, and
/// readout confusion.
///
/// The register size the profile covers is the number of readout matrices;
/// `t1_us`/`t2_us` may be given as one scalar for every qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile")]
pub struct NoiseProfile {
    pub name: String,
    pub depol_1q: f64,
    pub depol_2q: f64,
    pub t1_us: Vec<f64>,
    pub t2_us: Vec<f64>,
    pub gate_time_1q_us: f64,
    pub gate_time_2q_us: f64,
    pub readout: Vec<Confusion>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PerQubit {
    Scalar(f64),
    List(Vec<f64>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    name: String,
    depol_1q: f64,
    depol_2q: f64,
    t1_us: PerQubit,
    t2_us: PerQubit,
    gate_time_1q_us: f64,
    gate_time_2q_us: f64,
    readout: Vec<Confusion>,
}

impl TryFrom<RawProfile> for NoiseProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        let n = raw.readout.len();
        let expand = |v: PerQubit, field: &str| match v {
            PerQubit::Scalar(x) => Ok(vec![x; n]),
            PerQubit::List(xs) if xs.len() == n => Ok(xs),
            PerQubit::List(xs) => Err(Error::Validation(format!(
                "{field} lists {} qubits but readout lists {n}",
                xs.len()
            ))),
        };
        let profile = NoiseProfile {
            name: raw.name,
            depol_1q: raw.depol_1q,
            depol_2q: raw.depol_2q,
            t1_us: expand(raw.t1_us, "t1_us")?,
            t2_us: expand(raw.t2_us, "t2_us")?,
            gate_time_1q_us: raw.gate_time_1q_us,
            gate_time_2q_us: raw.gate_time_2q_us,
            readout: raw.readout,
        };
        profile.validate()?;
        Ok(profile)
    }
}

const BUNDLED: [(&str, &str); 4] = [
    ("device-a", include_str!("../../../../profiles/device-a.json")),
    ("device-b", include_str!("../../../../profiles/device-b.json")),
    ("device-c", include_str!("../../../../profiles/device-c.json")),
    ("zero-noise", include_str!("../../../../profiles/zero-noise.json")),
];

impl NoiseProfile {
    /// Noise-free profile over `n_qubits`.
    pub fn ideal(n_qubits: usize) -> Self {
        Self {
            name: "zero-noise".into(),
            depol_1q: 0.0,
            depol_2q: 0.0,
            t1_us: vec![100.0; n_qubits],
            t2_us: vec![100.0; n_qubits],
            gate_time_1q_us: 0.0,
            gate_time_2q_us: 0.0,
            readout: vec![[[1.0, 0.0], [0.0, 1.0]]; n_qubits],
        }
    }

    /// Gate depolarizing only: no relaxation, perfect readout.
    pub fn depolarizing(n_qubits: usize, depol_1q: f64, depol_2q: f64) -> Self {
        Self {
            name: format!("depolarizing-{depol_1q}-{depol_2q}"),
            depol_1q,
            depol_2q,
            ..Self::ideal(n_qubits)
        }
    }

    /// One of the profiles shipped with the repository.
    pub fn bundled(name: &str) -> Result<Self> {
        let (_, text) = BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::Validation(format!("no bundled profile named `{name}`")))?;
        Self::from_json(text)
    }

    pub fn bundled_names() -> impl Iterator<Item = &'static str> {
        BUNDLED.iter().map(|(n, _)| *n)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            // serde wraps our validation errors as custom messages
            if e.is_data() && e.to_string().starts_with("validation failed") {
                Error::Validation(e.to_string())
            } else {
                Error::Parse(e.to_string())
            }
        })
    }

    /// Read a profile file, or a bundled profile when `path` names one and no
    /// such file exists.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.exists() {
            if let Some(name) = path.to_str() {
                if BUNDLED.iter().any(|(n, _)| *n == name) {
                    return Self::bundled(name);
                }
            }
        }
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn n_qubits(&self) -> usize {
        self.readout.len()
    }

    pub fn is_noiseless(&self) -> bool {
        self.depol_1q == 0.0
            && self.depol_2q == 0.0
            && self.gate_time_1q_us == 0.0
            && self.gate_time_2q_us == 0.0
            && self.readout.iter().all(|m| m[0][0] == 1.0 && m[1][1] == 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Validation(msg));
        if self.name.trim().is_empty() {
            return fail("name must be non-empty".into());
        }
        let n = self.readout.len();
        if n == 0 {
            return fail("readout must list at least one qubit".into());
        }
        if self.t1_us.len() != n || self.t2_us.len() != n {
            return fail(format!("t1_us/t2_us must list {n} qubits"));
        }
        for (field, p) in [("depol_1q", self.depol_1q), ("depol_2q", self.depol_2q)] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{field} = {p} must lie in [0, 1]"));
            }
        }
        for (field, t) in [
            ("gate_time_1q_us", self.gate_time_1q_us),
            ("gate_time_2q_us", self.gate_time_2q_us),
        ] {
            if !(t >= 0.0) || !t.is_finite() {
                return fail(format!("{field} = {t} must be a finite non-negative time"));
            }
        }
        for (q, (&t1, &t2)) in self.t1_us.iter().zip(&self.t2_us).enumerate() {
            if !(t1 > 0.0) {
                return fail(format!("t1_us[{q}] = {t1} must be positive"));
            }
            if !(t2 > 0.0 && t2 <= 2.0 * t1) {
                return fail(format!(
                    "t2_us[{q}] = {t2} must satisfy 0 < t2 <= 2*t1 = {}",
                    2.0 * t1
                ));
            }
        }
        for (q, m) in self.readout.iter().enumerate() {
            for row in m {
                if row.iter().any(|x| !(0.0..=1.0).contains(x)) {
                    return fail(format!("readout[{q}] entries must lie in [0, 1]"));
                }
                if (row[0] + row[1] - 1.0).abs() > 1e-12 {
                    return fail(format!("readout[{q}] rows must sum to 1"));
                }
            }
        }
        Ok(())
    }

    /// Noise channel applied after `gate`: depolarizing on the gate's qubits,
    /// then thermal relaxation for the gate duration on each of them.
    pub fn channel_for_gate(&self, gate: &Gate) -> Result<KrausChannel> {
        let arity = gate.arity();
        let (p, duration) = if arity == 1 {
            (self.depol_1q, self.gate_time_1q_us)
        } else {
            (self.depol_2q, self.gate_time_2q_us)
        };
        let depol = KrausChannel::depolarizing(arity, p)?;
        let mut relax: Option<KrausChannel> = None;
        for &q in &gate.targets {
            if q >= self.n_qubits() {
                return Err(Error::IncompatibleProfile {
                    profile: self.n_qubits(),
                    circuit: q + 1,
                });
            }
            let r = KrausChannel::thermal_relaxation(duration, self.t1_us[q], self.t2_us[q])?;
            relax = Some(match relax {
                None => r,
                Some(prev) => prev.tensor(&r),
            });
        }
        depol.compose(&relax.expect("gate has targets"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    #[test]
    fn bundled_device_a_values() {
        let p = NoiseProfile::bundled("device-a").unwrap();
        assert_eq!(p.depol_1q, 0.001);
        assert_eq!(p.depol_2q, 0.01);
        assert_eq!(p.n_qubits(), 12);
        for name in NoiseProfile::bundled_names() {
            NoiseProfile::bundled(name).unwrap();
        }
    }

    #[test]
    fn zero_noise_fixture() {
        let p = NoiseProfile::bundled("zero-noise").unwrap();
        assert!(p.is_noiseless());
        assert_eq!(p.depol_1q, 0.0);
        assert!(p.readout.iter().all(|m| *m == [[1.0, 0.0], [0.0, 1.0]]));
    }

    #[test]
    fn t2_above_twice_t1_rejected() {
        let text = r#"{"name":"bad","depol_1q":0.0,"depol_2q":0.0,"t1_us":10.0,"t2_us":30.0,
            "gate_time_1q_us":0.1,"gate_time_2q_us":0.2,"readout":[[[1,0],[0,1]]]}"#;
        let err = NoiseProfile::from_json(text).unwrap_err();
        match err {
            Error::Validation(msg) => assert!(msg.contains("t2"), "{msg}"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_is_parse_error() {
        assert!(matches!(
            NoiseProfile::from_json("{not json"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            NoiseProfile::from_json(r#"{"name":"x"}"#),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn confusion_rows_must_sum_to_one() {
        let text = r#"{"name":"bad","depol_1q":0.0,"depol_2q":0.0,"t1_us":10.0,"t2_us":10.0,
            "gate_time_1q_us":0.1,"gate_time_2q_us":0.2,"readout":[[[0.9,0.2],[0,1]]]}"#;
        assert!(matches!(
            NoiseProfile::from_json(text),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn load_from_file_roundtrip() {
        let p = NoiseProfile::bundled("device-b").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        std::fs::write(&path, serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(NoiseProfile::load(&path).unwrap(), p);
        assert_eq!(NoiseProfile::load("device-b").unwrap(), p);
    }

    #[test]
    fn zero_noise_channel_is_identity() {
        let p = NoiseProfile::ideal(3);
        for gate in [Gate::h(0), Gate::cx(1, 2), Gate::zz(0, 2, 0.4)] {
            let ch = p.channel_for_gate(&gate).unwrap();
            assert_eq!(ch.operators().len(), 1);
        }
    }

    #[test]
    fn device_channels_are_complete() {
        let p = NoiseProfile::bundled("device-c").unwrap();
        for gate in [Gate::rx(3, 0.2), Gate::cx(4, 1)] {
            let ch = p.channel_for_gate(&gate).unwrap();
            assert!(ch.completeness_defect() < 1e-10);
        }
        assert!(matches!(
            p.channel_for_gate(&Gate::h(12)),
            Err(Error::IncompatibleProfile { .. })
        ));
    }
}

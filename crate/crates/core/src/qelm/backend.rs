use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::Serialize;

use crate::mitigation::{QlearModel, ZneConfig};
use crate::noise::NoiseProfile;

#[derive(Debug, Clone, PartialEq)]
pub enum Mitigator {
    Zne(ZneConfig),
    Qlear(Arc<QlearModel>),
}

impl Mitigator {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Zne(_) => "zne",
            Self::Qlear(_) => "qlear",
        }
    }
}

/// Where feature-extraction circuits run.
#[derive(Debug, Clone, PartialEq)]
pub enum ExecutionBackend {
    Ideal,
    Noisy(NoiseProfile),
    Mitigated {
        profile: NoiseProfile,
        mitigator: Mitigator,
    },
}

impl ExecutionBackend {
    pub fn label(&self) -> String {
        match self {
            Self::Ideal => "ideal".into(),
            Self::Noisy(p) => format!("noisy({})", p.name),
            Self::Mitigated { profile, mitigator } => format!("{}({})", mitigator.name(), profile.name),
        }
    }

    pub fn profile(&self) -> Option<&NoiseProfile> {
        match self {
            Self::Ideal => None,
            Self::Noisy(p) | Self::Mitigated { profile: p, .. } => Some(p),
        }
    }

    /// In-process identity used for cache keys.
    pub(crate) fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        match self {
            Self::Ideal => 0u8.hash(&mut h),
            Self::Noisy(p) => {
                1u8.hash(&mut h);
                json_fingerprint(p).hash(&mut h);
            }
            Self::Mitigated { profile, mitigator } => {
                2u8.hash(&mut h);
                json_fingerprint(profile).hash(&mut h);
                match mitigator {
                    Mitigator::Zne(c) => json_fingerprint(c).hash(&mut h),
                    Mitigator::Qlear(m) => json_fingerprint(m.as_ref()).hash(&mut h),
                }
            }
        }
        h.finish()
    }
}

pub(crate) fn json_fingerprint(value: &impl Serialize) -> u64 {
    let mut h = DefaultHasher::new();
    serde_json::to_string(value)
        .expect("plain data serializes")
        .hash(&mut h);
    h.finish()
}

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bitset::ElementSet;
use crate::matroid::{FamilySpec, Matroid, MatroidError};
use crate::rainbow::{overlap_kappa, BoundParams, Universe};

use super::InstanceError;

pub const FORMAT_VERSION: u32 = 1;

/// Optional hypothesis parameters an instance claims to satisfy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Declared {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<usize>,
}

impl Declared {
    fn is_empty(&self) -> bool {
        self.beta.is_none() && self.kappa.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Source {
    pub generator: String,
    pub seed: u64,
}

/// A matroid with a base sequence, as stored on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub matroid: FamilySpec,
    /// `bases[c-1]` is `B_c`.
    pub bases: Vec<ElementSet>,
    pub declared: Declared,
    pub provenance: Option<Source>,
}

// Field order matters for TOML: plain values before tables.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    version: u32,
    bases: Vec<Vec<usize>>,
    matroid: FamilySpec,
    #[serde(default, skip_serializing_if = "Declared::is_empty")]
    declared: Declared,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Source>,
}

/// 1-based line of a byte offset.
fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let doc: Document = toml::from_str(text).map_err(|e| InstanceError::Syntax {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        reason: e.message().to_string(),
    })?;
    if doc.version != FORMAT_VERSION {
        return Err(InstanceError::Version(doc.version));
    }
    let mut bases = Vec::with_capacity(doc.bases.len());
    for (i, b) in doc.bases.iter().enumerate() {
        let set: ElementSet = b.iter().copied().filter(|&x| x < crate::bitset::MAX_ELEMENTS).collect();
        if set.len() != b.len() {
            return Err(InstanceError::Field {
                field: format!("bases[{i}]"),
                reason: "elements must be distinct and below the element cap".into(),
            });
        }
        bases.push(set);
    }
    let instance = Instance {
        matroid: doc.matroid,
        bases,
        declared: doc.declared,
        provenance: doc.provenance,
    };
    instance.validate()?;
    Ok(instance)
}

/// Canonical text: bases sorted, fields in schema order.
pub fn emit_instance(instance: &Instance) -> String {
    let doc = Document {
        version: FORMAT_VERSION,
        bases: instance.bases.iter().map(ElementSet::to_vec).collect(),
        matroid: instance.matroid.clone(),
        declared: instance.declared,
        provenance: instance.provenance.clone(),
    };
    toml::to_string(&doc).expect("instance documents always serialise")
}

impl Instance {
    pub fn new(matroid: FamilySpec, bases: Vec<ElementSet>) -> Self {
        Self {
            matroid,
            bases,
            declared: Declared::default(),
            provenance: None,
        }
    }

    pub fn n(&self) -> usize {
        self.bases.len()
    }

    pub fn m(&self) -> usize {
        self.matroid.ground_size()
    }

    pub fn family(&self) -> &'static str {
        self.matroid.name()
    }

    pub fn build_matroid(&self) -> Result<Matroid, InstanceError> {
        Ok(Matroid::build(self.matroid.clone())?)
    }

    pub fn universe(&self) -> Result<Universe, InstanceError> {
        let matroid = self.build_matroid()?;
        let n = matroid.rank();
        if self.bases.len() != n {
            return Err(InstanceError::Field {
                field: "bases".into(),
                reason: format!("expected {n} bases (the rank), found {}", self.bases.len()),
            });
        }
        for (i, b) in self.bases.iter().enumerate() {
            if b.len() != n {
                return Err(InstanceError::BaseSize {
                    colour: i + 1,
                    size: b.len(),
                    rank: n,
                });
            }
            if let Some(x) = b.iter().find(|&x| x >= matroid.ground_size()) {
                return Err(InstanceError::BaseInvalid {
                    colour: i + 1,
                    reason: format!("element {x} is outside the ground set"),
                });
            }
            if !matroid.independent(b) {
                return Err(InstanceError::BaseInvalid {
                    colour: i + 1,
                    reason: "elements are dependent".into(),
                });
            }
        }
        Ok(Universe::new(matroid, self.bases.clone())?)
    }

    /// Bases, declared κ and declared β against the matroid.
    pub fn validate(&self) -> Result<Universe, InstanceError> {
        let universe = self.universe()?;
        if let Some(kappa) = self.declared.kappa {
            let actual = overlap_kappa(&self.bases);
            if kappa < actual {
                let element = (0..self.m())
                    .find(|&x| self.bases.iter().filter(|b| b.contains(x)).count() > kappa)
                    .expect("some element exceeds the declared overlap");
                return Err(InstanceError::KappaTooSmall {
                    declared: kappa,
                    actual,
                    element,
                });
            }
        }
        if let Some(beta) = self.declared.beta {
            // only checked when the girth is cheap enough to compute
            if let Ok(girth) = universe.matroid().girth() {
                let required = BoundParams::beta_for_girth(self.n(), girth.finite());
                if beta < required {
                    return Err(InstanceError::BetaTooSmall {
                        declared: beta,
                        required,
                        girth: girth.to_string(),
                    });
                }
            }
        }
        Ok(universe)
    }

    /// Hex SHA-256 of the canonical text.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(emit_instance(self).as_bytes()))
    }
}

impl From<MatroidError> for InstanceError {
    fn from(e: MatroidError) -> Self {
        InstanceError::Matroid(e)
    }
}

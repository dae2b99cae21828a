//! Every inequality and structural property as an executable check.
//!
//! A check compares two computed numbers, folds a tolerance in, and keeps
//! the witnesses that produced them. On a valid instance a failing check is
//! a bug certificate: the witness replays the violation.

mod checks;
mod fuzz;
pub mod hausdorff;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::module_space::ModuleVector;
use crate::norms::{RangeSample, SupWitness};

pub use checks::{
    check_bilinear_agreement, check_equivalence, check_hilbert_reduction, check_kittaneh,
    check_lemma_bound, check_norm_axioms, check_oracle_soundness, check_range_properties,
    check_self_adjoint_equality, check_unitary_invariance, lemma_bound_with_radius, RangeCheckOptions,
    HAUSDORFF_REL_TOL,
};
pub use fuzz::{
    classify, fuzz_suite, generate_instance, instance_for, operator_hash, run_instance, FuzzConfig, FuzzInstance, InstanceReport,
    OperatorClass, VerificationReport,
};

/// Default tolerance for algebraic identities.
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Default tolerance for reductions compared with analytic values.
pub const REDUCTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// lhs ≤ rhs
    Le,
    /// lhs = rhs
    Eq,
}

/// Serializable form of a [`SupWitness`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub value: f64,
    pub character: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theta: Option<f64>,
    pub vector: Vec<Vec<Complex64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub partner: Option<Vec<Vec<Complex64>>>,
}

pub(crate) fn fibers_of(v: &ModuleVector) -> Vec<Vec<Complex64>> {
    v.fibers().iter().map(|f| f.iter().copied().collect()).collect()
}

impl From<&SupWitness> for WitnessRecord {
    fn from(w: &SupWitness) -> Self {
        Self {
            value: w.value,
            character: w.character,
            theta: w.theta,
            vector: fibers_of(&w.vector),
            partner: w.partner.as_ref().map(fibers_of),
        }
    }
}

/// One point of a sampled range, without its witness fiber.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub character: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theta: Option<f64>,
    pub value: Complex64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<Complex64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Witness {
    Sup { witnesses: Vec<WitnessRecord> },
    Points { points: Vec<PointRecord> },
    Vector { vector: Vec<Vec<Complex64>> },
}

impl Witness {
    pub fn sup(ws: &[&SupWitness]) -> Self {
        Witness::Sup {
            witnesses: ws.iter().map(|w| WitnessRecord::from(*w)).collect(),
        }
    }

    /// The first `limit` points of `sample`, with witness fibers.
    pub fn points(sample: &RangeSample, limit: usize) -> Self {
        Witness::Points {
            points: sample
                .points
                .iter()
                .take(limit)
                .map(|p| PointRecord {
                    character: p.character,
                    theta: p.theta,
                    value: p.value,
                    witness: Some(p.witness.iter().copied().collect()),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    /// rhs − lhs for inequalities, −|lhs − rhs| for equalities.
    pub margin: f64,
    /// Absolute slack actually allowed.
    pub tolerance: f64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub metrics: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

impl CheckResult {
    /// lhs ≤ rhs + tolerance.
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: lhs <= rhs + tolerance,
            relation: Relation::Le,
            lhs,
            rhs,
            margin: rhs - lhs,
            tolerance,
            metrics: BTreeMap::new(),
            witness: None,
        }
    }

    /// |lhs − rhs| ≤ tolerance.
    pub fn eq(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let gap = (lhs - rhs).abs();
        Self {
            name: name.into(),
            passed: gap <= tolerance,
            relation: Relation::Eq,
            lhs,
            rhs,
            margin: -gap,
            tolerance,
            metrics: BTreeMap::new(),
            witness: None,
        }
    }

    pub fn with_metric(mut self, key: &str, value: f64) -> Self {
        self.metrics.insert(key.to_string(), value);
        self
    }

    pub fn with_witness(mut self, witness: Witness) -> Self {
        self.witness = Some(witness);
        self
    }

    /// Fails the check on top of its numeric comparison.
    pub(crate) fn and(mut self, ok: bool) -> Self {
        self.passed &= ok;
        self
    }
}

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::checks::{
    bilinear_result, check_hilbert_reduction, check_norm_axioms, equivalence_results,
    kittaneh_results, lemma_bound_with_radius, oracle_results, range_results, self_adjoint_result,
    unitary_invariance_results, RangeCheckOptions,
};
use super::CheckResult;
use crate::error::{Error, Result};
use crate::module_space::{ModuleShape, ModuleVector, SampleDistribution};
use crate::norms::{module_norm, module_norm_bilinear, module_numerical_radius, SweepOptions};
use crate::operators::{Block, ModuleOperator, DEFAULT_PREDICATE_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorClass {
    Generic,
    SelfAdjoint,
    Unitary,
    /// Strictly upper triangular blocks, never zero.
    Nilpotent,
    /// U·diag(λ)·U* with U unitary.
    Normal,
}

impl OperatorClass {
    pub const ALL: [OperatorClass; 5] = [
        OperatorClass::Generic,
        OperatorClass::SelfAdjoint,
        OperatorClass::Unitary,
        OperatorClass::Nilpotent,
        OperatorClass::Normal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperatorClass::Generic => "generic",
            OperatorClass::SelfAdjoint => "self-adjoint",
            OperatorClass::Unitary => "unitary",
            OperatorClass::Nilpotent => "nilpotent",
            OperatorClass::Normal => "normal",
        }
    }
}

impl fmt::Display for OperatorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperatorClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OperatorClass::ALL
            .into_iter()
            .find(|c| c.name() == s || (s == "self_adjoint" && *c == OperatorClass::SelfAdjoint))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown operator class `{s}`")))
    }
}

/// Settings of a randomized campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub max_characters: usize,
    pub max_dim: usize,
    /// Assigned to instances round-robin.
    pub classes: Vec<OperatorClass>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub theta_steps: usize,
    /// Random interior points per character in each range sample.
    pub interior_samples: usize,
    /// Monte-Carlo trials per quantity in the soundness checks.
    pub mc_trials: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            max_characters: 3,
            max_dim: 4,
            classes: OperatorClass::ALL.to_vec(),
            trials: 1000,
            seed: 0,
            tol: 1e-9,
            theta_steps: crate::norms::DEFAULT_THETA_STEPS,
            interior_samples: 16,
            mc_trials: 200,
        }
    }
}

impl FuzzConfig {
    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.max_characters == 0 || self.max_dim == 0 {
            return bad("shapes need at least one character of dimension at least one");
        }
        if self.classes.is_empty() {
            return bad("at least one operator class is required");
        }
        if self.classes.contains(&OperatorClass::Nilpotent) && self.max_dim < 2 {
            return bad("nilpotent instances need fiber dimension at least 2");
        }
        if self.mc_trials == 0 {
            return bad("Monte-Carlo trials must be at least 1");
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return bad("tolerance must be non-negative");
        }
        SweepOptions::with_steps(self.theta_steps).validate()
    }
}

/// A generated operator together with everything the checks consume.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzInstance {
    pub class: OperatorClass,
    pub seed: u64,
    pub t: ModuleOperator,
    /// Generic second operator for the triangle and sum checks.
    pub s: ModuleOperator,
    pub u: ModuleOperator,
    pub alpha: Complex64,
    pub beta: Complex64,
    /// Arbitrary vector, possibly with zero fibers.
    pub x: ModuleVector,
}

fn normal_entry<R: Rng>(rng: &mut R) -> Complex64 {
    SampleDistribution::ComplexNormal.sample(rng)
}

fn gaussian_block<R: Rng>(d: usize, rng: &mut R) -> Block {
    DMatrix::from_fn(d, d, |_, _| normal_entry(rng))
}

/// Haar unitary: Q of a Gaussian matrix with the phases of diag(R) removed.
fn unitary_block<R: Rng>(d: usize, rng: &mut R) -> Block {
    let qr = gaussian_block(d, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        if rjj.norm() > 0.0 {
            let phase = rjj / rjj.norm();
            for i in 0..d {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

fn class_block<R: Rng>(class: OperatorClass, d: usize, rng: &mut R) -> Block {
    match class {
        OperatorClass::Generic => gaussian_block(d, rng),
        OperatorClass::SelfAdjoint => {
            let g = gaussian_block(d, rng);
            (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
        }
        OperatorClass::Unitary => unitary_block(d, rng),
        OperatorClass::Nilpotent => {
            DMatrix::from_fn(d, d, |i, j| if j > i { normal_entry(rng) } else { Complex64::new(0.0, 0.0) })
        }
        OperatorClass::Normal => {
            let u = unitary_block(d, rng);
            let diag = DVector::from_fn(d, |_, _| normal_entry(rng));
            &u * DMatrix::from_diagonal(&diag) * u.adjoint()
        }
    }
}

/// Draws one instance of `class` with at most `max_characters` characters
/// of dimension at most `max_dim`.
pub fn generate_instance(
    class: OperatorClass,
    max_characters: usize,
    max_dim: usize,
    seed: u64,
) -> Result<FuzzInstance> {
    if max_characters == 0 || max_dim == 0 {
        return Err(Error::InvalidParameter("empty shape bounds".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_characters);
    let mut dims: Vec<usize> = (0..n).map(|_| rng.random_range(1..=max_dim)).collect();
    if class == OperatorClass::Nilpotent {
        if max_dim < 2 {
            return Err(Error::InvalidParameter(
                "nilpotent instances need fiber dimension at least 2".into(),
            ));
        }
        // a nonzero nilpotent block needs dimension 2
        dims[0] = dims[0].max(2);
    }
    let shape = Arc::new(ModuleShape::from_dims(&dims)?);
    let blocks = dims.iter().map(|&d| class_block(class, d, &mut rng)).collect();
    let t = ModuleOperator::new(shape, blocks)?;
    companions(t, class, seed, &mut rng)
}

/// Wraps a given operator into an instance, drawing the second operator,
/// the unitary, the scalars and the test vector from `seed`.
pub fn instance_for(t: ModuleOperator, seed: u64) -> Result<FuzzInstance> {
    let class = classify(&t);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    companions(t, class, seed, &mut rng)
}

fn companions(
    t: ModuleOperator,
    class: OperatorClass,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Result<FuzzInstance> {
    let shape = Arc::clone(t.shape());
    let dims = shape.dims().to_vec();
    let blocks = |f: &mut dyn FnMut(usize) -> Block| dims.iter().map(|&d| f(d)).collect::<Vec<_>>();
    let s = ModuleOperator::new(Arc::clone(&shape), blocks(&mut |d| gaussian_block(d, rng)))?;
    let u = ModuleOperator::new(Arc::clone(&shape), blocks(&mut |d| unitary_block(d, rng)))?;
    let alpha = normal_entry(rng);
    let beta = normal_entry(rng);
    let scale = 10f64.powf(rng.random_range(-1.0..=1.0));
    let fibers = dims
        .iter()
        .map(|&d| {
            let zero = rng.random_bool(0.25);
            DVector::from_fn(d, |_, _| {
                let z = normal_entry(rng) * scale;
                if zero {
                    Complex64::new(0.0, 0.0)
                } else {
                    z
                }
            })
        })
        .collect();
    let x = ModuleVector::new(shape, fibers)?;
    Ok(FuzzInstance {
        class,
        seed,
        t,
        s,
        u,
        alpha,
        beta,
        x,
    })
}

/// The most specific class that `t` belongs to, up to the default
/// predicate tolerance.
pub fn classify(t: &ModuleOperator) -> OperatorClass {
    let tol = DEFAULT_PREDICATE_TOL * (1.0 + t.max_abs_entry());
    if t.is_self_adjoint(tol) {
        return OperatorClass::SelfAdjoint;
    }
    if t.is_unitary(DEFAULT_PREDICATE_TOL) {
        return OperatorClass::Unitary;
    }
    let ts = t.adjoint();
    let commutator = ts.compose(t).and_then(|a| a.sub(&t.compose(&ts)?));
    if commutator.is_ok_and(|c| c.max_abs_entry() <= tol * (1.0 + t.max_abs_entry())) {
        return OperatorClass::Normal;
    }
    let d = t.shape().dims().iter().copied().max().unwrap_or(1);
    let mut power = t.clone();
    for _ in 1..d {
        power = match power.compose(t) {
            Ok(p) => p,
            Err(_) => return OperatorClass::Generic,
        };
    }
    if power.max_abs_entry() <= tol {
        OperatorClass::Nilpotent
    } else {
        OperatorClass::Generic
    }
}

/// SHA-256 over the dimensions and the little-endian bytes of every entry,
/// blocks in order, column-major.
pub fn operator_hash(t: &ModuleOperator) -> String {
    let mut h = Sha256::new();
    for b in t.blocks() {
        h.update((b.nrows() as u64).to_le_bytes());
        for z in b.iter() {
            h.update(z.re.to_le_bytes());
            h.update(z.im.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub index: usize,
    pub instance_seed: u64,
    pub class: OperatorClass,
    pub dims: Vec<usize>,
    pub operator_hash: String,
    pub passed: bool,
    pub results: Vec<CheckResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub trials: usize,
    pub total_checks: usize,
    pub failed_checks: usize,
    pub overall: bool,
    pub instances: Vec<InstanceReport>,
}

impl VerificationReport {
    /// Every check result across instances.
    pub fn results(&self) -> impl Iterator<Item = &CheckResult> + '_ {
        self.instances.iter().flat_map(|r| r.results.iter())
    }

    pub fn failures(&self) -> impl Iterator<Item = (&InstanceReport, &CheckResult)> + '_ {
        self.instances
            .iter()
            .flat_map(|r| r.results.iter().filter(|c| !c.passed).map(move |c| (r, c)))
    }
}

fn instance_seed(master: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index as u64);
    rng.next_u64()
}

/// Runs every applicable check on one instance.
pub fn run_instance(instance: &FuzzInstance, config: &FuzzConfig) -> Result<Vec<CheckResult>> {
    let FuzzInstance {
        t, s, u, alpha, beta, x, ..
    } = instance;
    let tol = config.tol;
    let sweep = SweepOptions::with_steps(config.theta_steps);
    let n = module_norm(t);
    let b = module_norm_bilinear(t);
    let w = module_numerical_radius(t, sweep)?;

    let mut results = check_norm_axioms(t, s, *alpha, tol)?;
    if t.is_self_adjoint(DEFAULT_PREDICATE_TOL * (1.0 + t.max_abs_entry())) {
        results.push(self_adjoint_result(&n, &w, tol));
    }
    results.extend(equivalence_results(&n, &w, tol));
    results.extend(kittaneh_results(t, &w, tol)?);
    results.push(lemma_bound_with_radius(t, x, w.value, tol)?);
    results.push(bilinear_result(&n, &b, tol));
    if t.shape().num_characters() == 1 {
        results.push(check_hilbert_reduction(t, tol)?);
    }
    results.extend(unitary_invariance_results(t, u, &n, &w, sweep, tol)?);
    let norm_s = module_norm(s).value;
    let options = RangeCheckOptions {
        theta_steps: config.theta_steps,
        interior_samples: config.interior_samples,
        seed: instance.seed,
    };
    results.extend(range_results(t, s, u, *alpha, *beta, options, tol, n.value, norm_s)?);
    results.extend(oracle_results(t, &[n, b, w], config.mc_trials, instance.seed, tol)?);
    Ok(results)
}

/// Generates `config.trials` instances and checks each of them.
///
/// Instance k uses a seed derived from (`config.seed`, k) alone, so the
/// report does not depend on how rayon schedules the work. Witnesses are
/// kept only for failing checks.
pub fn fuzz_suite(config: &FuzzConfig) -> Result<VerificationReport> {
    config.validate()?;
    let instances: Vec<InstanceReport> = (0..config.trials)
        .into_par_iter()
        .map(|index| {
            let class = config.classes[index % config.classes.len()];
            let seed = instance_seed(config.seed, index);
            let instance = generate_instance(class, config.max_characters, config.max_dim, seed)?;
            let mut results = run_instance(&instance, config)?;
            for r in results.iter_mut().filter(|r| r.passed) {
                r.witness = None;
            }
            Ok(InstanceReport {
                index,
                instance_seed: seed,
                class,
                dims: instance.t.shape().dims().to_vec(),
                operator_hash: operator_hash(&instance.t),
                passed: results.iter().all(|r| r.passed),
                results,
            })
        })
        .collect::<Result<_>>()?;
    let total_checks = instances.iter().map(|r| r.results.len()).sum();
    let failed_checks = instances
        .iter()
        .flat_map(|r| &r.results)
        .filter(|r| !r.passed)
        .count();
    Ok(VerificationReport {
        seed: config.seed,
        trials: config.trials,
        total_checks,
        failed_checks,
        overall: failed_checks == 0,
        instances,
    })
}

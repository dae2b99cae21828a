use nalgebra::DVector;
use num_complex::Complex64;

use super::hausdorff::{boundary_hausdorff, chord_bound};
use super::{CheckResult, Witness};
use crate::error::{Error, Result};
use crate::module_space::ModuleVector;
use crate::norms::{
    module_norm, module_norm_bilinear, module_numerical_radius, monte_carlo_sup,
    sample_numerical_range, Quantity, RangeSample, SupWitness, SweepOptions,
};
use crate::operators::{ModuleOperator, DEFAULT_PREDICATE_TOL};

/// Relative part of the tolerance for sampled set comparisons.
pub const HAUSDORFF_REL_TOL: f64 = 1e-6;

/// Points of sampled ranges kept as witnesses in a check result.
const WITNESS_POINTS: usize = 8;

fn same_shape(t: &ModuleOperator, s: &ModuleOperator) -> Result<()> {
    if **t.shape() == **s.shape() {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!(
            "operators have dims {:?} and {:?}",
            t.shape().dims(),
            s.shape().dims()
        )))
    }
}

/// Triangle inequality, absolute homogeneity and definiteness of ⫴·⫴.
///
/// Definiteness is checked through max|Tₖₗ| ≤ ⫴T⫴, which forces T = 0 when
/// ⫴T⫴ = 0.
pub fn check_norm_axioms(
    t: &ModuleOperator,
    s: &ModuleOperator,
    alpha: Complex64,
    tol: f64,
) -> Result<Vec<CheckResult>> {
    same_shape(t, s)?;
    let nt = module_norm(t);
    let ns = module_norm(s);
    let sum = module_norm(&t.add(s)?);
    let scaled = module_norm(&t.scale(alpha));
    let rhs = nt.value + ns.value;
    let triangle = CheckResult::le("norm_triangle", sum.value, rhs, tol * (1.0 + rhs))
        .with_witness(Witness::sup(&[&sum, &nt, &ns]));
    let expected = alpha.norm() * nt.value;
    let homogeneity = CheckResult::eq("norm_homogeneity", scaled.value, expected, tol * (1.0 + expected))
        .with_metric("alpha_abs", alpha.norm());
    let entry = t.max_abs_entry();
    let definiteness = CheckResult::le("norm_definiteness", entry, nt.value, tol * (1.0 + nt.value))
        .with_witness(Witness::sup(&[&nt]));
    Ok(vec![triangle, homogeneity, definiteness])
}

fn self_adjoint_tol(t: &ModuleOperator, tol: f64) -> f64 {
    tol.max(DEFAULT_PREDICATE_TOL) * (1.0 + t.max_abs_entry())
}

/// ⫴T⫴ = ω_o(T) for self-adjoint T.
pub fn check_self_adjoint_equality(
    t: &ModuleOperator,
    sweep: SweepOptions,
    tol: f64,
) -> Result<CheckResult> {
    let deviation = t.self_adjoint_deviation();
    if deviation > self_adjoint_tol(t, tol) {
        return Err(Error::NotSelfAdjoint { deviation });
    }
    let n = module_norm(t);
    let w = module_numerical_radius(t, sweep)?;
    Ok(self_adjoint_result(&n, &w, tol))
}

pub(crate) fn self_adjoint_result(n: &SupWitness, w: &SupWitness, tol: f64) -> CheckResult {
    CheckResult::eq("self_adjoint_norm_equals_radius", n.value, w.value, tol * (1.0 + n.value))
        .with_witness(Witness::sup(&[n, w]))
}

/// ω_o(T) ≤ ⫴T⫴ ≤ 2ω_o(T), reported as two results carrying the ratio.
pub fn check_equivalence(
    t: &ModuleOperator,
    sweep: SweepOptions,
    tol: f64,
) -> Result<Vec<CheckResult>> {
    let n = module_norm(t);
    let w = module_numerical_radius(t, sweep)?;
    Ok(equivalence_results(&n, &w, tol))
}

pub(crate) fn equivalence_results(n: &SupWitness, w: &SupWitness, tol: f64) -> Vec<CheckResult> {
    let slack = tol * (1.0 + n.value);
    let mut lower = CheckResult::le("equivalence_lower", w.value, n.value, slack)
        .with_witness(Witness::sup(&[w, n]));
    let mut upper = CheckResult::le("equivalence_upper", n.value, 2.0 * w.value, slack)
        .with_witness(Witness::sup(&[n, w]));
    if w.value > 0.0 {
        let ratio = n.value / w.value;
        lower = lower.with_metric("ratio", ratio);
        upper = upper.with_metric("ratio", ratio);
    }
    vec![lower, upper]
}

/// ¼⫴T*T + TT*⫴ ≤ ω_o(T)² ≤ ½⫴T*T + TT*⫴.
pub fn check_kittaneh(
    t: &ModuleOperator,
    sweep: SweepOptions,
    tol: f64,
) -> Result<Vec<CheckResult>> {
    let w = module_numerical_radius(t, sweep)?;
    kittaneh_results(t, &w, tol)
}

pub(crate) fn kittaneh_results(
    t: &ModuleOperator,
    w: &SupWitness,
    tol: f64,
) -> Result<Vec<CheckResult>> {
    let ts = t.adjoint();
    let middle = ts.compose(t)?.add(&t.compose(&ts)?)?;
    let p = module_norm(&middle);
    let w2 = w.value * w.value;
    let slack = tol * (1.0 + p.value);
    let lower = CheckResult::le("kittaneh_lower", 0.25 * p.value, w2, slack)
        .with_metric("sum_norm", p.value)
        .with_metric("radius", w.value)
        .with_witness(Witness::sup(&[&p, w]));
    let upper = CheckResult::le("kittaneh_upper", w2, 0.5 * p.value, slack)
        .with_metric("sum_norm", p.value)
        .with_metric("radius", w.value)
        .with_witness(Witness::sup(&[w, &p]));
    Ok(vec![lower, upper])
}

/// φ(|⟨Tx, x⟩|) ≤ φ(|x|²)·ω_o(T) at every character, for arbitrary x.
pub fn check_lemma_bound(
    t: &ModuleOperator,
    x: &ModuleVector,
    sweep: SweepOptions,
    tol: f64,
) -> Result<CheckResult> {
    let w = module_numerical_radius(t, sweep)?;
    lemma_bound_with_radius(t, x, w.value, tol)
}

/// As [`check_lemma_bound`] with ω_o(T) supplied by the caller.
pub fn lemma_bound_with_radius(
    t: &ModuleOperator,
    x: &ModuleVector,
    radius: f64,
    tol: f64,
) -> Result<CheckResult> {
    let q = t.quadratic_form(x)?;
    // |a| = (a*a)^{1/2} in the algebra; |⟨x, Tx⟩| = |⟨Tx, x⟩|
    let abs_q = q.star().mul(&q)?.sqrt_positive()?;
    let x2 = x.inner_product(x)?;
    let mut worst: Option<(f64, f64, f64)> = None;
    let mut passed = true;
    for i in 0..t.shape().num_characters() {
        let lhs = abs_q.apply_character(i)?.re;
        let rhs = x2.apply_character(i)?.re * radius;
        let slack = tol * (1.0 + rhs);
        passed &= lhs <= rhs + slack;
        if worst.is_none_or(|(l, r, _)| rhs - lhs < r - l) {
            worst = Some((lhs, rhs, slack));
        }
    }
    let (lhs, rhs, slack) = worst.expect("at least one character");
    Ok(CheckResult::le("lemma_bound", lhs, rhs, slack)
        .and(passed)
        .with_metric("radius", radius)
        .with_witness(Witness::Vector {
            vector: super::fibers_of(x),
        }))
}

/// The bilinear supremum equals ⫴T⫴.
pub fn check_bilinear_agreement(t: &ModuleOperator, tol: f64) -> CheckResult {
    bilinear_result(&module_norm(t), &module_norm_bilinear(t), tol)
}

pub(crate) fn bilinear_result(n: &SupWitness, b: &SupWitness, tol: f64) -> CheckResult {
    CheckResult::eq("bilinear_agreement", b.value, n.value, tol * (1.0 + n.value))
        .with_witness(Witness::sup(&[b, n]))
}

/// With a single character, ⫴T⫴ is the operator norm of the only block.
///
/// The reference is √λ_max(B*B), computed without a singular value
/// decomposition.
pub fn check_hilbert_reduction(t: &ModuleOperator, tol: f64) -> Result<CheckResult> {
    if t.shape().num_characters() != 1 {
        return Err(Error::InvalidParameter(
            "Hilbert-space reduction needs exactly one character".into(),
        ));
    }
    let b = t.block(0);
    let gram = b.adjoint() * b;
    let top = gram
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(0.0, f64::max);
    let sigma = top.max(0.0).sqrt();
    let n = module_norm(t);
    Ok(CheckResult::eq("hilbert_reduction", n.value, sigma, tol * sigma.max(f64::MIN_POSITIVE))
        .with_witness(Witness::sup(&[&n])))
}

/// Monte-Carlo lower bounds never exceed the analytic values.
pub fn check_oracle_soundness(
    t: &ModuleOperator,
    sweep: SweepOptions,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<CheckResult>> {
    let analytic = [
        module_norm(t),
        module_norm_bilinear(t),
        module_numerical_radius(t, sweep)?,
    ];
    oracle_results(t, &analytic, trials, seed, tol)
}

/// `analytic` holds the norm, bilinear and radius values, in that order.
pub(crate) fn oracle_results(
    t: &ModuleOperator,
    analytic: &[SupWitness; 3],
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<CheckResult>> {
    Quantity::ALL
        .into_iter()
        .zip(analytic.iter())
        .enumerate()
        .map(|(k, (q, a))| {
            let mc = monte_carlo_sup(t, q, trials, seed.wrapping_add(k as u64))?;
            Ok(
                CheckResult::le(format!("oracle_soundness_{}", q.name()), mc, a.value, tol)
                    .with_metric("trials", trials as f64)
                    .with_witness(Witness::sup(&[a])),
            )
        })
        .collect()
}

/// ⫴U*TU⫴ = ⫴T⫴ and ω_o(U*TU) = ω_o(T) for unitary U.
pub fn check_unitary_invariance(
    t: &ModuleOperator,
    u: &ModuleOperator,
    sweep: SweepOptions,
    tol: f64,
) -> Result<Vec<CheckResult>> {
    let n0 = module_norm(t);
    let w0 = module_numerical_radius(t, sweep)?;
    unitary_invariance_results(t, u, &n0, &w0, sweep, tol)
}

pub(crate) fn unitary_invariance_results(
    t: &ModuleOperator,
    u: &ModuleOperator,
    n0: &SupWitness,
    w0: &SupWitness,
    sweep: SweepOptions,
    tol: f64,
) -> Result<Vec<CheckResult>> {
    same_shape(t, u)?;
    require_unitary(u, tol)?;
    let conj = u.adjoint().compose(t)?.compose(u)?;
    let n1 = module_norm(&conj);
    let w1 = module_numerical_radius(&conj, sweep)?;
    Ok(vec![
        CheckResult::eq("unitary_invariance_norm", n1.value, n0.value, tol * (1.0 + n0.value))
            .with_witness(Witness::sup(&[&n1, n0])),
        CheckResult::eq("unitary_invariance_radius", w1.value, w0.value, tol * (1.0 + n0.value))
            .with_witness(Witness::sup(&[&w1, w0])),
    ])
}

fn require_unitary(u: &ModuleOperator, tol: f64) -> Result<()> {
    let deviation = u.unitary_deviation();
    if deviation > tol.max(DEFAULT_PREDICATE_TOL) {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

/// Sampling settings for [`check_range_properties`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeCheckOptions {
    pub theta_steps: usize,
    pub interior_samples: usize,
    pub seed: u64,
}

impl Default for RangeCheckOptions {
    fn default() -> Self {
        Self {
            theta_steps: crate::norms::DEFAULT_THETA_STEPS,
            interior_samples: 200,
            seed: 0,
        }
    }
}

/// φᵢ(⟨x, op·x⟩) for x supported on fiber i. Equal to [`crate::norms::range_value`] on
/// the embedded vector, without building module elements.
fn fiber_value(op: &ModuleOperator, i: usize, w: &DVector<Complex64>) -> Complex64 {
    w.dotc(&(op.block(i) * w))
}

/// Largest |value(witness) − expected(point)| over a sample, where the
/// witness is first mapped by `transform` when one is given.
fn membership_residual(
    sample: &RangeSample,
    op: &ModuleOperator,
    transform: Option<&ModuleOperator>,
    expected: impl Fn(Complex64) -> Complex64,
) -> f64 {
    let mut worst: f64 = 0.0;
    for p in &sample.points {
        let z = match transform {
            Some(m) => fiber_value(op, p.character, &(m.block(p.character) * &p.witness)),
            None => fiber_value(op, p.character, &p.witness),
        };
        worst = worst.max((z - expected(p.value)).norm());
    }
    worst
}

/// Hausdorff distance, character by character, between the traced boundary
/// of `direct` and the image of the traced boundary of `base` under `map`.
/// Returns (distance, geometric grid term).
fn coverage(
    direct: &RangeSample,
    base: &RangeSample,
    map: impl Fn(Complex64) -> Complex64,
    slack: f64,
) -> (f64, f64) {
    let turn = std::f64::consts::TAU / direct.theta_steps as f64;
    let mut distance: f64 = 0.0;
    let mut grid: f64 = 0.0;
    for i in 0..direct.num_characters().max(base.num_characters()) {
        let a = direct.boundary(i);
        let b: Vec<_> = base.boundary(i).into_iter().map(&map).collect();
        let term = chord_bound(&a, turn).max(chord_bound(&b, turn));
        grid = grid.max(term);
        distance = distance.max(boundary_hausdorff(&a, &b, term + slack));
    }
    (distance, grid)
}

fn set_identity_result(
    name: &str,
    (distance, grid): (f64, f64),
    membership: f64,
    membership_tol: f64,
    slack: f64,
    witness: &RangeSample,
) -> CheckResult {
    CheckResult::le(name, distance, grid, slack)
        .and(membership <= membership_tol)
        .with_metric("hausdorff_bound", distance)
        .with_metric("grid_term", grid)
        .with_metric("membership_residual", membership)
        .with_witness(Witness::points(witness, WITNESS_POINTS))
}

/// The five structural properties of W_o:
///
/// 1. W_o(T*) is the complex conjugate of W_o(T);
/// 2. W_o(αT + βI) = αW_o(T) + β;
/// 3. W_o(UTU*) = W_o(T) for unitary U;
/// 4. W_o(T) ⊆ ℝ exactly when T is self-adjoint;
/// 5. W_o(T + S) ⊆ W_o(T) + W_o(S).
///
/// For 1–3 every sampled point is mapped through the identity at the level
/// of witnesses in both directions (exact membership), and the traced
/// boundaries are compared by Hausdorff distance, allowing the geometric
/// grid term plus `1e-6·(1 + ⫴T⫴)`. Property 5 is checked exactly by
/// splitting each witness value of T + S into its T and S parts.
#[allow(clippy::too_many_arguments)]
pub fn check_range_properties(
    t: &ModuleOperator,
    s: &ModuleOperator,
    u: &ModuleOperator,
    alpha: Complex64,
    beta: Complex64,
    options: RangeCheckOptions,
    tol: f64,
) -> Result<Vec<CheckResult>> {
    let norm_t = module_norm(t).value;
    let norm_s = module_norm(s).value;
    range_results(t, s, u, alpha, beta, options, tol, norm_t, norm_s)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn range_results(
    t: &ModuleOperator,
    s: &ModuleOperator,
    u: &ModuleOperator,
    alpha: Complex64,
    beta: Complex64,
    options: RangeCheckOptions,
    tol: f64,
    norm_t: f64,
    norm_s: f64,
) -> Result<Vec<CheckResult>> {
    same_shape(t, s)?;
    same_shape(t, u)?;
    require_unitary(u, tol)?;
    let RangeCheckOptions {
        theta_steps,
        interior_samples,
        seed,
    } = options;
    let sample = |op: &ModuleOperator, k: u64| {
        sample_numerical_range(op, theta_steps, interior_samples, seed.wrapping_add(k))
    };

    let base = sample(t, 0)?;
    let mut results = Vec::with_capacity(5);

    // (i) adjoint
    {
        let ts = t.adjoint();
        let direct = sample(&ts, 1)?;
        let forward = membership_residual(&base, &ts, None, |z| z.conj());
        let backward = membership_residual(&direct, t, None, |z| z.conj());
        let slack = HAUSDORFF_REL_TOL * (1.0 + norm_t);
        let cov = coverage(&direct, &base, |z| z.conj(), slack);
        results.push(set_identity_result(
            "range_adjoint_conjugate",
            cov,
            forward.max(backward),
            tol * (1.0 + norm_t),
            slack,
            &direct,
        ));
    }

    // (ii) affine image
    {
        let shifted = t.affine(alpha, beta);
        let scale = norm_t.max(module_norm(&shifted).value);
        let direct = sample(&shifted, 2)?;
        let forward = membership_residual(&base, &shifted, None, |z| alpha * z + beta);
        // a point z' of the direct sample is α·w + β with w = ⟨y, Ty⟩ ∈ W_o(T)
        let mut backward: f64 = 0.0;
        for p in &direct.points {
            let w = fiber_value(t, p.character, &p.witness);
            backward = backward.max((alpha * w + beta - p.value).norm());
        }
        let slack = HAUSDORFF_REL_TOL * (1.0 + scale);
        let cov = coverage(&direct, &base, |z| alpha * z + beta, slack);
        results.push(
            set_identity_result(
                "range_affine",
                cov,
                forward.max(backward),
                tol * (1.0 + scale + beta.norm()),
                slack,
                &direct,
            )
            .with_metric("alpha_re", alpha.re)
            .with_metric("alpha_im", alpha.im)
            .with_metric("beta_re", beta.re)
            .with_metric("beta_im", beta.im),
        );
    }

    // (iii) unitary similarity
    {
        let us = u.adjoint();
        let similar = u.compose(t)?.compose(&us)?;
        let direct = sample(&similar, 3)?;
        let forward = membership_residual(&base, &similar, Some(u), |z| z);
        let backward = membership_residual(&direct, t, Some(&us), |z| z);
        let slack = HAUSDORFF_REL_TOL * (1.0 + norm_t);
        let cov = coverage(&direct, &base, |z| z, slack);
        results.push(set_identity_result(
            "range_unitary_similarity",
            cov,
            forward.max(backward),
            tol * (1.0 + norm_t),
            slack,
            &direct,
        ));
    }

    // (iv) reality exactly for self-adjoint operators
    {
        let sa_tol = self_adjoint_tol(t, tol);
        let deviation = t.self_adjoint_deviation();
        let self_adjoint = deviation <= sa_tol;
        let max_imag = base.values().map(|z| z.im.abs()).fold(0.0, f64::max);
        let result = if self_adjoint {
            // every sampled point is real
            CheckResult::le("range_real_iff_self_adjoint", max_imag, 0.0, sa_tol)
        } else {
            // max |Im W(Tᵢ)| is the norm of the imaginary part, at least half
            // the largest entry of T − T*, so the sample must show it
            CheckResult::le("range_real_iff_self_adjoint", 0.5 * sa_tol, max_imag, 0.0)
        };
        results.push(
            result
                .with_metric("self_adjoint", if self_adjoint { 1.0 } else { 0.0 })
                .with_metric("deviation", deviation)
                .with_metric("max_abs_imag", max_imag),
        );
    }

    // (v) sub-additivity through shared witnesses
    {
        let sum = t.add(s)?;
        let direct = sample(&sum, 4)?;
        let mut residual: f64 = 0.0;
        for p in &direct.points {
            let zt = fiber_value(t, p.character, &p.witness);
            let zs = fiber_value(s, p.character, &p.witness);
            residual = residual.max((p.value - (zt + zs)).norm());
        }
        let scale = norm_t + norm_s;
        results.push(
            CheckResult::le("range_subadditive", residual, 0.0, tol * (1.0 + scale))
                .with_metric("points", direct.points.len() as f64)
                .with_witness(Witness::points(&direct, WITNESS_POINTS)),
        );
    }

    Ok(results)
}

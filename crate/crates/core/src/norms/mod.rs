//! ⫴T⫴, ω_o(T) and W_o(T).
//!
//! For a block-diagonal T we have φᵢ(|Tx|) = ‖Tᵢxᵢ‖ and φᵢ(|x|) = ‖xᵢ‖, so
//! the constraint φᵢ(|x|) = 1 only touches fiber i and each supremum splits
//! into one classical problem per character:
//!
//! ```text
//! ⫴T⫴    = maxᵢ ‖Tᵢ‖
//! ω_o(T) = maxᵢ ω(Tᵢ)
//! W_o(T) = ∪ᵢ W(Tᵢ)
//! ```
//!
//! The analytic routes live here; [`oracle`] samples the defining suprema
//! directly and is what the reductions are checked against.

pub mod block;
pub mod oracle;
pub mod range;

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::module_space::ModuleVector;
use crate::operators::ModuleOperator;

pub use block::{block_numerical_radius, block_operator_norm, rotated_hermitian_part};
pub use oracle::{monte_carlo_sup, Quantity};
pub use range::{sample_numerical_range, RangePoint, RangeSample};

pub const DEFAULT_THETA_STEPS: usize = 720;
pub const DEFAULT_REFINE_TOL: f64 = 1e-12;
pub const MIN_THETA_STEPS: usize = 8;

/// Grid and refinement settings for the θ-sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub theta_steps: usize,
    pub refine_tol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            theta_steps: DEFAULT_THETA_STEPS,
            refine_tol: DEFAULT_REFINE_TOL,
        }
    }
}

impl SweepOptions {
    pub fn with_steps(theta_steps: usize) -> Self {
        Self {
            theta_steps,
            ..Self::default()
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.theta_steps < MIN_THETA_STEPS {
            return Err(Error::InvalidParameter(format!(
                "theta steps must be at least {MIN_THETA_STEPS}, got {}",
                self.theta_steps
            )));
        }
        if self.refine_tol.is_nan() || self.refine_tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "refinement tolerance must be positive, got {}",
                self.refine_tol
            )));
        }
        Ok(())
    }
}

/// A supremum value together with the module element(s) attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct SupWitness {
    pub value: f64,
    pub character: usize,
    /// x with φ_character(|x|) = 1.
    pub vector: ModuleVector,
    /// y for the bilinear form, also normalized at `character`.
    pub partner: Option<ModuleVector>,
    /// Rotation angle of the maximizing Hermitian part (radius only).
    pub theta: Option<f64>,
}

impl SupWitness {
    /// Evaluates the defining expression of `quantity` at the witness.
    pub fn reevaluate(&self, t: &ModuleOperator, quantity: Quantity) -> Result<f64> {
        evaluate_at(t, quantity, self.character, &self.vector, self.partner.as_ref())
    }
}

/// φᵢ(|Tx|), |φᵢ(⟨Tx, y⟩)| or |φᵢ(⟨x, Tx⟩)| for the given x (and y).
pub(crate) fn evaluate_at(
    t: &ModuleOperator,
    quantity: Quantity,
    i: usize,
    x: &ModuleVector,
    y: Option<&ModuleVector>,
) -> Result<f64> {
    let tx = t.apply(x)?;
    let value = match quantity {
        Quantity::Norm => tx.modulus().apply_character(i)?.re,
        Quantity::Bilinear => {
            let y = y.ok_or_else(|| {
                Error::InvalidParameter("bilinear witness needs a partner vector".into())
            })?;
            tx.inner_product(y)?.apply_character(i)?.norm()
        }
        Quantity::Radius => x.inner_product(&tx)?.apply_character(i)?.norm(),
    };
    Ok(value)
}

/// Index of the largest value; the smallest index wins ties.
fn argmax(values: impl IntoIterator<Item = f64>) -> (usize, f64) {
    values
        .into_iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, v)| if v > best.1 { (k, v) } else { best })
}

/// ⫴T⫴ = sup{φ(|Tx|) : φ(|x|) = 1}, with the top right singular vector of
/// the maximizing block as witness.
pub fn module_norm(t: &ModuleOperator) -> SupWitness {
    let pairs: Vec<_> = t.blocks().iter().map(block::top_singular_pair).collect();
    let (i, value) = argmax(pairs.iter().map(|p| p.0));
    let vector = ModuleVector::embed(Arc::clone(t.shape()), i, pairs[i].1.clone())
        .expect("singular vector has the fiber's length");
    SupWitness {
        value,
        character: i,
        vector,
        partner: None,
        theta: None,
    }
}

/// sup{|φ(⟨Tx, y⟩)| : φ(|x|) = φ(|y|) = 1}.
///
/// The witness pair is x from [`module_norm`] and y = Tx/φ(|Tx|). When the
/// image vanishes there is nothing to normalize; y = x and the value is 0.
pub fn module_norm_bilinear(t: &ModuleOperator) -> SupWitness {
    let norm = module_norm(t);
    let i = norm.character;
    let tx = t.apply(&norm.vector).expect("witness has the operator's shape");
    let partner = match tx.normalize_at(i) {
        Ok(y) => y,
        Err(_) => norm.vector.clone(),
    };
    let value = tx
        .inner_product(&partner)
        .expect("same shape")
        .values()[i]
        .norm();
    SupWitness {
        value,
        character: i,
        vector: norm.vector,
        partner: Some(partner),
        theta: None,
    }
}

/// ω_o(T) = sup{|φ(⟨Tx, x⟩)| : φ(|x|) = 1}, via the θ-sweep on every block.
pub fn module_numerical_radius(t: &ModuleOperator, options: SweepOptions) -> Result<SupWitness> {
    options.validate()?;
    let sweeps: Vec<_> = t
        .blocks()
        .iter()
        .map(|b| block::block_numerical_radius_sweep(b, options.theta_steps, options.refine_tol))
        .collect();
    let (i, value) = argmax(sweeps.iter().map(|s| s.value));
    let vector = ModuleVector::embed(Arc::clone(t.shape()), i, sweeps[i].vector.clone())?;
    Ok(SupWitness {
        value,
        character: i,
        vector,
        partner: None,
        theta: Some(sweeps[i].theta),
    })
}

/// Point of W_o(T) at character `i` attained by `x` (not necessarily
/// normalized): φᵢ(⟨x, Tx⟩).
pub fn range_value(t: &ModuleOperator, i: usize, x: &ModuleVector) -> Result<Complex64> {
    t.quadratic_form(x)?.apply_character(i)
}

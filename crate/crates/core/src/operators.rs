//! Adjointable operators on E.
//!
//! Let eᵢ ∈ 𝒜 be the indicator of character i. An adjointable map commutes
//! with the module action, so T(x·eᵢ) = T(x)·eᵢ: the image of anything
//! supported on fiber i is again supported on fiber i. Every operator in
//! L(E) is therefore block diagonal, and that is the representation used
//! here. Sums, scalings, products and adjoints stay block diagonal.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gelfand::AlgebraElement;
use crate::module_space::{ModuleShape, ModuleVector};

/// Default absolute tolerance on matrix entries for structural predicates.
pub const DEFAULT_PREDICATE_TOL: f64 = 1e-10;

/// A complex square matrix, one per character.
pub type Block = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleOperator {
    shape: Arc<ModuleShape>,
    blocks: Vec<Block>,
}

impl ModuleOperator {
    pub fn new(shape: Arc<ModuleShape>, blocks: Vec<Block>) -> Result<Self> {
        if blocks.len() != shape.num_characters() {
            return Err(Error::ShapeMismatch(format!(
                "{} blocks for {} characters",
                blocks.len(),
                shape.num_characters()
            )));
        }
        for (i, (b, &d)) in blocks.iter().zip(shape.dims()).enumerate() {
            if b.nrows() != d || b.ncols() != d {
                return Err(Error::ShapeMismatch(format!(
                    "block {i} is {}x{}, expected {d}x{d}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Self { shape, blocks })
    }

    /// Builds the shape from the block sizes.
    pub fn from_blocks(blocks: Vec<Block>) -> Result<Self> {
        let dims: Vec<usize> = blocks.iter().map(|b| b.nrows()).collect();
        let shape = Arc::new(ModuleShape::from_dims(&dims)?);
        Self::new(shape, blocks)
    }

    pub fn identity(shape: Arc<ModuleShape>) -> Self {
        let blocks = shape.dims().iter().map(|&d| Block::identity(d, d)).collect();
        Self { shape, blocks }
    }

    pub fn zeros(shape: Arc<ModuleShape>) -> Self {
        let blocks = shape.dims().iter().map(|&d| Block::zeros(d, d)).collect();
        Self { shape, blocks }
    }

    /// Multiplication by an algebra element: x ↦ x·a. This is adjointable
    /// because 𝒜 is abelian.
    pub fn multiplication(shape: Arc<ModuleShape>, a: &AlgebraElement) -> Result<Self> {
        if **a.space() != **shape.space() {
            return Err(Error::SpaceMismatch);
        }
        let blocks = shape
            .dims()
            .iter()
            .zip(a.values())
            .map(|(&d, &v)| Block::identity(d, d) * v)
            .collect();
        Ok(Self { shape, blocks })
    }

    pub fn shape(&self) -> &Arc<ModuleShape> {
        &self.shape
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &Block {
        &self.blocks[i]
    }

    fn check_same_shape(&self, shape: &ModuleShape) -> Result<()> {
        if *self.shape == *shape {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "operator has dims {:?}, argument has dims {:?}",
                self.shape.dims(),
                shape.dims()
            )))
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Block, &Block) -> Block) -> Result<Self> {
        self.check_same_shape(&other.shape)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(Self {
            shape: Arc::clone(&self.shape),
            blocks,
        })
    }

    fn map_blocks(&self, f: impl Fn(&Block) -> Block) -> Self {
        Self {
            shape: Arc::clone(&self.shape),
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    /// Tx, computed fiberwise.
    pub fn apply(&self, x: &ModuleVector) -> Result<ModuleVector> {
        self.check_same_shape(x.shape())?;
        let fibers = self
            .blocks
            .iter()
            .zip(x.fibers())
            .map(|(b, f)| b * f)
            .collect();
        ModuleVector::new(Arc::clone(x.shape()), fibers)
    }

    /// T*, the blockwise conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.map_blocks(|b| b.adjoint())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        self.map_blocks(|b| b * alpha)
    }

    /// The composition `self ∘ other`, i.e. x ↦ self(other(x)).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// αT + βI.
    pub fn affine(&self, alpha: Complex64, beta: Complex64) -> Self {
        self.map_blocks(|b| {
            let mut out = b * alpha;
            for k in 0..out.nrows() {
                out[(k, k)] += beta;
            }
            out
        })
    }

    /// The algebra element ⟨x, Tx⟩, whose value at character i is
    /// xᵢᴴ Tᵢ xᵢ. Its conjugate is ⟨Tx, x⟩; both have the same modulus.
    pub fn quadratic_form(&self, x: &ModuleVector) -> Result<AlgebraElement> {
        let tx = self.apply(x)?;
        x.inner_product(&tx)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// max |(T − T*)ₖₗ| over all blocks.
    pub fn self_adjoint_deviation(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| max_abs_entry(&(b - b.adjoint())))
            .fold(0.0, f64::max)
    }

    /// max of |(T*T − I)ₖₗ| and |(TT* − I)ₖₗ| over all blocks.
    pub fn unitary_deviation(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let id = Block::identity(b.nrows(), b.ncols());
                let left = max_abs_entry(&(b.adjoint() * b - &id));
                let right = max_abs_entry(&(b * b.adjoint() - &id));
                left.max(right)
            })
            .fold(0.0, f64::max)
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.self_adjoint_deviation() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitary_deviation() <= tol
    }

    /// Cartesian decomposition T = M + iN with M = (T+T*)/2 and
    /// N = (T−T*)/(2i), both self-adjoint.
    pub fn cartesian_parts(&self) -> (Self, Self) {
        let m = self.map_blocks(|b| (b + b.adjoint()) * Complex64::new(0.5, 0.0));
        // 1/(2i) = -i/2
        let n = self.map_blocks(|b| (b - b.adjoint()) * Complex64::new(0.0, -0.5));
        (m, n)
    }
}

pub(crate) fn max_abs_entry(b: &Block) -> f64 {
    b.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

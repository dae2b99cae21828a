//! The Hilbert 𝒜-module E = ⊕ᵢ ℂ^{dᵢ}.
//!
//! Fiber `i` is the part of E on which the character φᵢ "lives": the inner
//! product ⟨x, y⟩ is the algebra element whose `i`-th value is the ordinary
//! Hermitian product of the `i`-th fibers, conjugate-linear in `x`.

use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::gelfand::{AlgebraElement, CharacterSpace};

/// Spectrum plus fiber dimensions. Every fiber has dimension at least one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleShape {
    space: Arc<CharacterSpace>,
    dims: Vec<usize>,
}

impl ModuleShape {
    pub fn new(space: Arc<CharacterSpace>, dims: Vec<usize>) -> Result<Self> {
        if dims.len() != space.size() {
            return Err(Error::InvalidShape(format!(
                "{} fiber dimensions for {} characters",
                dims.len(),
                space.size()
            )));
        }
        if let Some(k) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidShape(format!(
                "fiber {k} has dimension 0; every fiber needs d >= 1"
            )));
        }
        Ok(Self { space, dims })
    }

    /// Unlabelled spectrum with the given fiber dimensions.
    pub fn from_dims(dims: &[usize]) -> Result<Self> {
        let space = Arc::new(CharacterSpace::new(dims.len())?);
        Self::new(space, dims.to_vec())
    }

    pub fn space(&self) -> &Arc<CharacterSpace> {
        &self.space
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_characters(&self) -> usize {
        self.dims.len()
    }

    /// Total complex dimension Σ dᵢ.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }
}

/// How [`random_vector`] draws fiber entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SampleDistribution {
    /// Standard complex normal: real and imaginary parts i.i.d. N(0, 1/2).
    #[default]
    ComplexNormal,
    /// Real and imaginary parts i.i.d. uniform on [-1, 1].
    UniformBox,
}

impl SampleDistribution {
    pub(crate) fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> Complex64 {
        match self {
            SampleDistribution::ComplexNormal => {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            }
            SampleDistribution::UniformBox => {
                Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
            }
        }
    }
}

/// An element x ∈ E.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleVector {
    shape: Arc<ModuleShape>,
    fibers: Vec<DVector<Complex64>>,
}

impl ModuleVector {
    pub fn new(shape: Arc<ModuleShape>, fibers: Vec<DVector<Complex64>>) -> Result<Self> {
        if fibers.len() != shape.num_characters() {
            return Err(Error::ShapeMismatch(format!(
                "{} fibers for {} characters",
                fibers.len(),
                shape.num_characters()
            )));
        }
        for (i, (f, &d)) in fibers.iter().zip(shape.dims()).enumerate() {
            if f.len() != d {
                return Err(Error::ShapeMismatch(format!(
                    "fiber {i} has length {}, expected {d}",
                    f.len()
                )));
            }
        }
        Ok(Self { shape, fibers })
    }

    pub fn from_slices(shape: Arc<ModuleShape>, fibers: &[&[Complex64]]) -> Result<Self> {
        let fibers = fibers
            .iter()
            .map(|f| DVector::from_column_slice(f))
            .collect();
        Self::new(shape, fibers)
    }

    pub fn zeros(shape: Arc<ModuleShape>) -> Self {
        let fibers = shape.dims().iter().map(|&d| DVector::zeros(d)).collect();
        Self { shape, fibers }
    }

    /// The vector that equals `fiber` at character `i` and vanishes elsewhere.
    pub fn embed(shape: Arc<ModuleShape>, i: usize, fiber: DVector<Complex64>) -> Result<Self> {
        shape.space().check_index(i)?;
        if fiber.len() != shape.dims()[i] {
            return Err(Error::ShapeMismatch(format!(
                "fiber {i} has length {}, expected {}",
                fiber.len(),
                shape.dims()[i]
            )));
        }
        let mut v = Self::zeros(shape);
        v.fibers[i] = fiber;
        Ok(v)
    }

    pub fn shape(&self) -> &Arc<ModuleShape> {
        &self.shape
    }

    pub fn fibers(&self) -> &[DVector<Complex64>] {
        &self.fibers
    }

    pub fn fiber(&self, i: usize) -> &DVector<Complex64> {
        &self.fibers[i]
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape == other.shape || *self.shape == *other.shape {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(
                "module vectors have different shapes".into(),
            ))
        }
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&DVector<Complex64>, &DVector<Complex64>) -> DVector<Complex64>,
    ) -> Result<Self> {
        self.check_same_shape(other)?;
        let fibers = self
            .fibers
            .iter()
            .zip(&other.fibers)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(Self {
            shape: Arc::clone(&self.shape),
            fibers,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Multiplication by a complex scalar (not a module action).
    pub fn scale(&self, alpha: Complex64) -> Self {
        Self {
            shape: Arc::clone(&self.shape),
            fibers: self.fibers.iter().map(|f| f * alpha).collect(),
        }
    }

    /// ⟨x, y⟩ ∈ 𝒜 with value Σₖ conj(xᵢ[k])·yᵢ[k] at character i.
    pub fn inner_product(&self, other: &Self) -> Result<AlgebraElement> {
        self.check_same_shape(other)?;
        let values = self
            .fibers
            .iter()
            .zip(&other.fibers)
            .map(|(x, y)| x.dotc(y))
            .collect();
        AlgebraElement::new(Arc::clone(self.shape.space()), values)
    }

    /// Right action x·a: fiber i is scaled by a(φᵢ).
    pub fn module_action(&self, a: &AlgebraElement) -> Result<Self> {
        if **a.space() != **self.shape.space() {
            return Err(Error::SpaceMismatch);
        }
        let fibers = self
            .fibers
            .iter()
            .zip(a.values())
            .map(|(f, &s)| f * s)
            .collect();
        Ok(Self {
            shape: Arc::clone(&self.shape),
            fibers,
        })
    }

    /// |x| = ⟨x, x⟩^{1/2}; at character i this is the Euclidean norm of fiber i.
    pub fn modulus(&self) -> AlgebraElement {
        let values = self
            .fibers
            .iter()
            .map(|f| Complex64::new(f.norm(), 0.0))
            .collect();
        AlgebraElement::new(Arc::clone(self.shape.space()), values)
            .expect("one value per fiber")
    }

    /// φᵢ(|x|).
    pub fn fiber_norm(&self, i: usize) -> f64 {
        self.fibers[i].norm()
    }

    /// x / φᵢ(|x|), so that φᵢ(|result|) = 1.
    pub fn normalize_at(&self, i: usize) -> Result<Self> {
        self.shape.space().check_index(i)?;
        let norm = self.fiber_norm(i);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroFiber { character: i });
        }
        Ok(self.scale(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.fibers
            .iter()
            .flat_map(|f| f.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Deterministic pseudo-random vector of the given shape.
pub fn random_vector(
    shape: Arc<ModuleShape>,
    seed: u64,
    distribution: SampleDistribution,
) -> ModuleVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_vector_with(shape, &mut rng, distribution)
}

/// As [`random_vector`], drawing from a caller-supplied generator.
pub fn random_vector_with<R: Rng + ?Sized>(
    shape: Arc<ModuleShape>,
    rng: &mut R,
    distribution: SampleDistribution,
) -> ModuleVector {
    let fibers = shape
        .dims()
        .iter()
        .map(|&d| DVector::from_fn(d, |_, _| distribution.sample(rng)))
        .collect();
    ModuleVector { shape, fibers }
}

/// A random unit vector of ℂ^d (uniform on the sphere).
pub(crate) fn random_unit_fiber<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<Complex64> {
    loop {
        let v = DVector::from_fn(d, |_, _| SampleDistribution::ComplexNormal.sample(rng));
        let n = v.norm();
        if n > 1e-300 {
            return v / Complex64::new(n, 0.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn shape21() -> Arc<ModuleShape> {
        Arc::new(ModuleShape::from_dims(&[2, 1]).unwrap())
    }

    fn vec21(a: [Complex64; 2], b: Complex64) -> ModuleVector {
        ModuleVector::from_slices(shape21(), &[&a, &[b]]).unwrap()
    }

    #[test]
    fn shape_validation() {
        assert!(ModuleShape::from_dims(&[2, 0]).is_err());
        let space = Arc::new(CharacterSpace::new(3).unwrap());
        assert!(ModuleShape::new(space, vec![1, 1]).is_err());
        assert!(ModuleVector::from_slices(shape21(), &[&[c(1.0, 0.0)], &[c(1.0, 0.0)]]).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let x = vec21([c(1.0, 0.0), c(0.0, 0.0)], c(2.0, 0.0));
        let y = vec21([c(0.0, 0.0), c(1.0, 0.0)], c(0.0, 1.0));
        assert_eq!(x.inner_product(&y).unwrap().values(), &[c(0.0, 0.0), c(0.0, 2.0)]);
        assert_eq!(x.inner_product(&x).unwrap().values(), &[c(1.0, 0.0), c(4.0, 0.0)]);
        let zero = ModuleVector::zeros(shape21());
        assert_eq!(x.inner_product(&zero).unwrap().values(), &[c(0.0, 0.0); 2]);
        let other = ModuleVector::zeros(Arc::new(ModuleShape::from_dims(&[1, 2]).unwrap()));
        assert!(matches!(x.inner_product(&other), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn module_action_examples() {
        let x = vec21([c(1.0, 0.0), c(0.0, 0.0)], c(2.0, 0.0));
        let a = AlgebraElement::new(shape21().space().clone(), vec![c(2.0, 0.0), c(0.0, 1.0)])
            .unwrap();
        assert_eq!(
            x.module_action(&a).unwrap(),
            vec21([c(2.0, 0.0), c(0.0, 0.0)], c(0.0, 2.0))
        );
        let one = AlgebraElement::unit(shape21().space().clone());
        assert_eq!(x.module_action(&one).unwrap(), x);
        let zero = ModuleVector::zeros(shape21());
        assert_eq!(zero.module_action(&a).unwrap(), zero);
        let wrong = AlgebraElement::unit(Arc::new(CharacterSpace::new(3).unwrap()));
        assert_eq!(x.module_action(&wrong), Err(Error::SpaceMismatch));
    }

    #[test]
    fn modulus_examples() {
        let x = vec21([c(3.0, 0.0), c(4.0, 0.0)], c(0.0, 0.0));
        assert_eq!(x.modulus().values(), &[c(5.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(
            ModuleVector::zeros(shape21()).modulus().values(),
            &[c(0.0, 0.0); 2]
        );
        let y = vec21([c(1.0, 0.0), c(0.0, 0.0)], c(2.0, 0.0));
        assert_eq!(y.modulus().values(), &[c(1.0, 0.0), c(2.0, 0.0)]);
        let via_sqrt = y.inner_product(&y).unwrap().sqrt_positive().unwrap();
        assert_eq!(y.modulus(), via_sqrt);
    }

    #[test]
    fn normalize_examples() {
        let x = vec21([c(2.0, 0.0), c(0.0, 0.0)], c(4.0, 0.0));
        assert_eq!(
            x.normalize_at(0).unwrap(),
            vec21([c(1.0, 0.0), c(0.0, 0.0)], c(2.0, 0.0))
        );
        assert_eq!(
            x.normalize_at(1).unwrap(),
            vec21([c(0.5, 0.0), c(0.0, 0.0)], c(1.0, 0.0))
        );
        let z = vec21([c(0.0, 0.0), c(0.0, 0.0)], c(1.0, 0.0));
        assert_eq!(z.normalize_at(0), Err(Error::ZeroFiber { character: 0 }));
        assert!(matches!(z.normalize_at(5), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn random_vectors_are_deterministic() {
        let s = shape21();
        let a = random_vector(s.clone(), 7, SampleDistribution::ComplexNormal);
        let b = random_vector(s.clone(), 7, SampleDistribution::ComplexNormal);
        assert_eq!(a, b);
        let c = random_vector(s.clone(), 8, SampleDistribution::ComplexNormal);
        assert_ne!(a, c);
        assert_eq!(a.fiber(0).len(), 2);
        assert_eq!(a.fiber(1).len(), 1);
        let u = random_vector(s, 7, SampleDistribution::UniformBox);
        assert!(u.max_abs_entry() <= 2f64.sqrt());
    }

    type Case = (Vec<usize>, u64, u64, u64, (f64, f64), (f64, f64));

    fn shape_and_seeds() -> impl Strategy<Value = Case> {
        (
            proptest::collection::vec(1usize..5, 1..4),
            any::<u64>(),
            any::<u64>(),
            any::<u64>(),
            (-3.0..3.0f64, -3.0..3.0f64),
            (-3.0..3.0f64, -3.0..3.0f64),
        )
    }

    fn close(a: &AlgebraElement, b: &AlgebraElement, tol: f64) -> bool {
        a.values()
            .iter()
            .zip(b.values())
            .all(|(x, y)| (x - y).norm() <= tol * (1.0 + x.norm().max(y.norm())))
    }

    proptest! {
        #[test]
        fn module_axioms((dims, s1, s2, s3, (ar, ai), (br, bi)) in shape_and_seeds()) {
            let shape = Arc::new(ModuleShape::from_dims(&dims).unwrap());
            let x = random_vector(shape.clone(), s1, SampleDistribution::ComplexNormal);
            let y = random_vector(shape.clone(), s2, SampleDistribution::ComplexNormal);
            let z = random_vector(shape.clone(), s3, SampleDistribution::ComplexNormal);
            let (alpha, beta) = (c(ar, ai), c(br, bi));

            // (i) linearity in the second slot
            let lhs = x.inner_product(&y.scale(alpha).add(&z.scale(beta)).unwrap()).unwrap();
            let xy = x.inner_product(&y).unwrap();
            let xz = x.inner_product(&z).unwrap();
            let rhs: Vec<_> = xy.values().iter().zip(xz.values()).map(|(p, q)| alpha * p + beta * q).collect();
            let rhs = AlgebraElement::new(shape.space().clone(), rhs).unwrap();
            prop_assert!(close(&lhs, &rhs, 1e-12));

            // (ii) ⟨x, ya⟩ = ⟨x, y⟩a
            let a = random_vector(Arc::new(ModuleShape::from_dims(&vec![1; dims.len()]).unwrap()), s3 ^ 1, SampleDistribution::ComplexNormal);
            let a = AlgebraElement::new(shape.space().clone(), a.fibers().iter().map(|f| f[0]).collect()).unwrap();
            let lhs = x.inner_product(&y.module_action(&a).unwrap()).unwrap();
            prop_assert!(close(&lhs, &xy.mul(&a).unwrap(), 1e-12));

            // (iii) ⟨x, y⟩* = ⟨y, x⟩
            prop_assert!(close(&xy.star(), &y.inner_product(&x).unwrap(), 1e-12));

            // (iv) positivity and definiteness
            prop_assert!(x.inner_product(&x).unwrap().is_positive(1e-12));
            let zero = ModuleVector::zeros(shape.clone());
            prop_assert!(zero.inner_product(&zero).unwrap().values().iter().all(|v| *v == c(0.0, 0.0)));
        }

        #[test]
        fn pointwise_triangle_cauchy_schwarz_parallelogram((dims, s1, s2, ..) in shape_and_seeds()) {
            let shape = Arc::new(ModuleShape::from_dims(&dims).unwrap());
            let x = random_vector(shape.clone(), s1, SampleDistribution::ComplexNormal);
            let y = random_vector(shape.clone(), s2, SampleDistribution::UniformBox);
            let sum = x.add(&y).unwrap();
            let diff = x.sub(&y).unwrap();
            let xy = x.inner_product(&y).unwrap();
            for i in 0..dims.len() {
                let (nx, ny) = (x.fiber_norm(i), y.fiber_norm(i));
                prop_assert!(sum.fiber_norm(i) <= nx + ny + 1e-12);
                prop_assert!(xy.values()[i].norm() <= nx * ny * (1.0 + 1e-12) + 1e-300);
                let lhs = sum.fiber_norm(i).powi(2) + diff.fiber_norm(i).powi(2);
                let rhs = 2.0 * (nx * nx + ny * ny);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
            }
        }
    }
}

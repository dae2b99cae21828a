//! The abelian C*-algebra, seen through its finite Gelfand spectrum.
//!
//! Every character of a finite-dimensional abelian C*-algebra is evaluation at
//! a point of the spectrum, so an element is just a complex-valued function on
//! `n` points and all *-algebra operations are pointwise.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute tolerance for positivity tests.
pub const DEFAULT_POSITIVITY_TOL: f64 = 1e-10;

/// The character set τ(𝒜) of the algebra: `size` evaluation characters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterSpace {
    size: usize,
    labels: Option<Vec<String>>,
}

impl CharacterSpace {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidShape(
                "character space needs at least one character".into(),
            ));
        }
        Ok(Self { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidShape(
                "character space needs at least one character".into(),
            ));
        }
        Ok(Self {
            size: labels.len(),
            labels: Some(labels),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of character `i`, falling back to `phi{i}`.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(labels) if i < labels.len() => labels[i].clone(),
            _ => format!("phi{i}"),
        }
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i < self.size {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                size: self.size,
            })
        }
    }
}

/// An element of the algebra, stored as its Gelfand transform.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    space: Arc<CharacterSpace>,
    values: Vec<Complex64>,
}

impl AlgebraElement {
    pub fn new(space: Arc<CharacterSpace>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != space.size() {
            return Err(Error::ShapeMismatch(format!(
                "algebra element has {} values, spectrum has {} characters",
                values.len(),
                space.size()
            )));
        }
        Ok(Self { space, values })
    }

    pub fn zero(space: Arc<CharacterSpace>) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); space.size()];
        Self { space, values }
    }

    /// The unit 1 of the algebra.
    pub fn unit(space: Arc<CharacterSpace>) -> Self {
        let values = vec![Complex64::new(1.0, 0.0); space.size()];
        Self { space, values }
    }

    pub fn from_real(space: Arc<CharacterSpace>, values: &[f64]) -> Result<Self> {
        Self::new(
            space,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn space(&self) -> &Arc<CharacterSpace> {
        &self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// φ_i(a): evaluation of the `i`-th character.
    pub fn apply_character(&self, i: usize) -> Result<Complex64> {
        self.space.check_index(i)?;
        Ok(self.values[i])
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            space: Arc::clone(&self.space),
            values,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn star(&self) -> Self {
        Self {
            space: Arc::clone(&self.space),
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Pointwise positivity up to `tol` on both the imaginary dust and
    /// negative real parts.
    pub fn is_positive(&self, tol: f64) -> bool {
        self.values
            .iter()
            .all(|v| v.im.abs() <= tol && v.re >= -tol)
    }

    /// Continuous functional calculus for `t ↦ √t`, applied pointwise.
    ///
    /// Imaginary parts and tiny negative real parts (within the default
    /// positivity tolerance) are clamped to zero.
    pub fn sqrt_positive(&self) -> Result<Self> {
        self.sqrt_positive_with_tol(DEFAULT_POSITIVITY_TOL)
    }

    pub fn sqrt_positive_with_tol(&self, tol: f64) -> Result<Self> {
        let mut values = Vec::with_capacity(self.values.len());
        for (index, v) in self.values.iter().enumerate() {
            if v.im.abs() > tol || v.re < -tol {
                return Err(Error::NotPositive {
                    index,
                    re: v.re,
                    im: v.im,
                });
            }
            values.push(Complex64::new(v.re.max(0.0).sqrt(), 0.0));
        }
        Ok(Self {
            space: Arc::clone(&self.space),
            values,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn space(n: usize) -> Arc<CharacterSpace> {
        Arc::new(CharacterSpace::new(n).unwrap())
    }

    #[test]
    fn empty_space_rejected() {
        assert!(CharacterSpace::new(0).is_err());
        assert!(CharacterSpace::with_labels(vec![]).is_err());
    }

    #[test]
    fn character_evaluation() {
        let a = AlgebraElement::new(space(2), vec![c(3.0, 0.0), c(1.0, -1.0)]).unwrap();
        assert_eq!(a.apply_character(1).unwrap(), c(1.0, -1.0));
        let b = AlgebraElement::new(space(2), vec![c(0.0, 2.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(b.apply_character(0).unwrap(), c(0.0, 2.0));
        let one = AlgebraElement::unit(space(4));
        for i in 0..4 {
            assert_eq!(one.apply_character(i).unwrap(), c(1.0, 0.0));
        }
        assert_eq!(
            a.apply_character(2),
            Err(Error::IndexOutOfRange { index: 2, size: 2 })
        );
    }

    #[test]
    fn pointwise_operations() {
        let s = space(2);
        let a = AlgebraElement::from_real(s.clone(), &[1.0, 2.0]).unwrap();
        let b = AlgebraElement::from_real(s.clone(), &[3.0, 4.0]).unwrap();
        assert_eq!(a.mul(&b).unwrap().values(), &[c(3.0, 0.0), c(8.0, 0.0)]);
        let z = AlgebraElement::new(s.clone(), vec![c(0.0, 1.0), c(1.0, -1.0)]).unwrap();
        assert_eq!(z.star().values(), &[c(0.0, -1.0), c(1.0, 1.0)]);
        assert_eq!(z.add(&AlgebraElement::zero(s)).unwrap(), z);
        let other = AlgebraElement::unit(space(3));
        assert_eq!(a.mul(&other), Err(Error::SpaceMismatch));
        assert_eq!(a.add(&other), Err(Error::SpaceMismatch));
    }

    #[test]
    fn positivity() {
        let s = space(2);
        assert!(AlgebraElement::from_real(s.clone(), &[1.0, 2.0])
            .unwrap()
            .is_positive(0.0));
        assert!(!AlgebraElement::from_real(s.clone(), &[-1.0, 2.0])
            .unwrap()
            .is_positive(1e-12));
        let dust = AlgebraElement::new(s, vec![c(0.0, 1e-14), c(0.0, 0.0)]).unwrap();
        assert!(dust.is_positive(1e-12));
    }

    #[test]
    fn square_roots() {
        let s = space(2);
        let a = AlgebraElement::from_real(s.clone(), &[4.0, 9.0]).unwrap();
        assert_eq!(a.sqrt_positive().unwrap().values(), &[c(2.0, 0.0), c(3.0, 0.0)]);
        let z = AlgebraElement::zero(s.clone());
        assert_eq!(z.sqrt_positive().unwrap(), z);
        let b = AlgebraElement::from_real(s.clone(), &[2.0, 1.0]).unwrap();
        assert_eq!(
            b.sqrt_positive().unwrap().values(),
            &[c(2f64.sqrt(), 0.0), c(1.0, 0.0)]
        );
        let neg = AlgebraElement::from_real(s, &[1.0, -0.5]).unwrap();
        assert!(matches!(
            neg.sqrt_positive(),
            Err(Error::NotPositive { index: 1, .. })
        ));
    }

    fn element(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
        proptest::collection::vec((-10.0..10.0f64, -10.0..10.0f64), n)
            .prop_map(|v| v.into_iter().map(|(re, im)| c(re, im)).collect())
    }

    proptest! {
        #[test]
        fn characters_are_multiplicative((a, b) in (1usize..6).prop_flat_map(|n| (element(n), element(n)))) {
            let s = space(a.len());
            let a = AlgebraElement::new(s.clone(), a).unwrap();
            let b = AlgebraElement::new(s, b).unwrap();
            let ab = a.mul(&b).unwrap();
            for i in 0..a.values().len() {
                let lhs = ab.apply_character(i).unwrap();
                let rhs = a.apply_character(i).unwrap() * b.apply_character(i).unwrap();
                prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
                prop_assert_eq!(a.star().apply_character(i).unwrap(), a.apply_character(i).unwrap().conj());
            }
        }

        #[test]
        fn star_a_times_a_is_positive(a in (1usize..6).prop_flat_map(element)) {
            let a = AlgebraElement::new(space(a.len()), a).unwrap();
            let p = a.star().mul(&a).unwrap();
            prop_assert!(p.is_positive(1e-12));
            let r = p.sqrt_positive().unwrap();
            let back = r.mul(&r).unwrap();
            for (x, y) in back.values().iter().zip(p.values()) {
                prop_assert!((x - y).norm() <= 1e-12 * y.norm().max(f64::MIN_POSITIVE));
            }
        }
    }
}

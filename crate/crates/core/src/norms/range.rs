//! Witness-backed samples of W_o(T).
//!
//! Boundary points come from tracing: at each grid angle θ the top
//! eigenvector v of H(θ) gives vᴴTᵢv, the point of W(Tᵢ) supporting the
//! direction e^{−iθ}. Interior points come from random unit fibers. Every
//! point keeps the fiber that produced it, so membership is never in doubt.

use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::block::{extreme_eigenpairs, rotated_hermitian_part, theta_grid};
use crate::error::{Error, Result};
use crate::module_space::{random_unit_fiber, ModuleShape, ModuleVector};
use crate::operators::ModuleOperator;

use super::MIN_THETA_STEPS;

#[derive(Debug, Clone, PartialEq)]
pub struct RangePoint {
    pub character: usize,
    /// Grid angle for boundary points, `None` for interior samples.
    pub theta: Option<f64>,
    pub value: Complex64,
    /// Unit vector of fiber `character` attaining `value`.
    pub witness: DVector<Complex64>,
}

impl RangePoint {
    pub fn is_boundary(&self) -> bool {
        self.theta.is_some()
    }

    /// The witness as a module element supported on one fiber.
    pub fn witness_vector(&self, shape: &Arc<ModuleShape>) -> Result<ModuleVector> {
        ModuleVector::embed(Arc::clone(shape), self.character, self.witness.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeSample {
    pub points: Vec<RangePoint>,
    pub theta_steps: usize,
    /// Random interior points drawn per character.
    pub interior_samples: usize,
    pub seed: u64,
}

impl RangeSample {
    /// Boundary points of character `i` in increasing θ.
    pub fn boundary(&self, i: usize) -> Vec<Complex64> {
        self.points
            .iter()
            .filter(|p| p.character == i && p.is_boundary())
            .map(|p| p.value)
            .collect()
    }

    pub fn num_characters(&self) -> usize {
        self.points.iter().map(|p| p.character + 1).max().unwrap_or(0)
    }

    pub fn values(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.points.iter().map(|p| p.value)
    }
}

/// Samples W_o(T): `theta_steps` traced boundary points and
/// `interior_samples` random points for every character.
pub fn sample_numerical_range(
    t: &ModuleOperator,
    theta_steps: usize,
    interior_samples: usize,
    seed: u64,
) -> Result<RangeSample> {
    if theta_steps < MIN_THETA_STEPS {
        return Err(Error::InvalidParameter(format!(
            "theta steps must be at least {MIN_THETA_STEPS}, got {theta_steps}"
        )));
    }
    let grid = theta_grid(theta_steps);
    let mut points = Vec::with_capacity(t.blocks().len() * (theta_steps + interior_samples));
    for (i, b) in t.blocks().iter().enumerate() {
        let point = |theta: Option<f64>, v: DVector<Complex64>| RangePoint {
            character: i,
            theta,
            value: v.dotc(&(b * &v)),
            witness: v,
        };
        if theta_steps.is_multiple_of(2) {
            // H(θ + π) = −H(θ): the bottom eigenvector at θ is the top one at θ + π.
            let half = theta_steps / 2;
            let mut upper = Vec::with_capacity(half);
            for &theta in &grid[..half] {
                let pairs = extreme_eigenpairs(&rotated_hermitian_part(b, theta));
                points.push(point(Some(theta), pairs.max.1));
                upper.push(pairs.min.1);
            }
            for (v, &theta) in upper.into_iter().zip(&grid[half..]) {
                points.push(point(Some(theta), v));
            }
        } else {
            for &theta in &grid {
                let pairs = extreme_eigenpairs(&rotated_hermitian_part(b, theta));
                points.push(point(Some(theta), pairs.max.1));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        for _ in 0..interior_samples {
            let v = random_unit_fiber(b.nrows(), &mut rng);
            points.push(point(None, v));
        }
    }
    Ok(RangeSample {
        points,
        theta_steps,
        interior_samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::range_value;
    use crate::operators::Block;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(b: Block) -> ModuleOperator {
        ModuleOperator::from_blocks(vec![b]).unwrap()
    }

    #[test]
    fn identity_range_is_one_point() {
        let t = ModuleOperator::identity(Arc::new(ModuleShape::from_dims(&[2, 3]).unwrap()));
        let s = sample_numerical_range(&t, 64, 50, 1).unwrap();
        assert_eq!(s.points.len(), 2 * (64 + 50));
        for z in s.values() {
            assert!((z - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn jordan_range_is_half_disk() {
        let j = single(Block::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        ));
        let s = sample_numerical_range(&j, 360, 500, 2).unwrap();
        let max = s.values().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(s.values().all(|z| z.norm() <= 0.5 + 1e-9));
        assert!(max >= 0.5 - 1e-6);
        // boundary points are on the circle of radius 1/2
        for z in s.boundary(0) {
            assert!((z.norm() - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn hermitian_range_is_eigenvalue_interval() {
        let d = single(Block::from_diagonal(&DVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)])));
        let s = sample_numerical_range(&d, 720, 1000, 3).unwrap();
        for z in s.values() {
            assert!(z.im.abs() <= 1e-9);
            assert!(z.re >= -1e-9 && z.re <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn every_point_reevaluates_from_its_witness() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let blocks: Vec<Block> = [1usize, 3, 4]
            .iter()
            .map(|&d| {
                Block::from_fn(d, d, |_, _| {
                    crate::module_space::SampleDistribution::ComplexNormal.sample(&mut rng)
                })
            })
            .collect();
        let t = ModuleOperator::from_blocks(blocks).unwrap();
        for steps in [9, 40] {
            let s = sample_numerical_range(&t, steps, 25, 4).unwrap();
            assert_eq!(s.num_characters(), 3);
            for p in &s.points {
                let x = p.witness_vector(t.shape()).unwrap();
                assert!((x.fiber_norm(p.character) - 1.0).abs() < 1e-12);
                let z = range_value(&t, p.character, &x).unwrap();
                assert!((z - p.value).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn rejects_coarse_grid() {
        let t = single(Block::identity(2, 2));
        assert!(sample_numerical_range(&t, 7, 0, 0).is_err());
    }
}

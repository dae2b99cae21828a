//! Classical quantities of a single square block: operator norm and
//! numerical radius.
//!
//! The radius uses the rotation formula ω(B) = max_θ λ_max(H(θ)) with
//! H(θ) = (e^{iθ}B + e^{−iθ}B*)/2. λ_max(H(θ)) is the support function of
//! the numerical range in direction −θ, so every evaluation is an exact value
//! attained by some unit vector and the sweep can only underestimate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::operators::Block;

/// Largest singular value together with a unit right singular vector.
pub(crate) fn top_singular_pair(b: &Block) -> (f64, DVector<Complex64>) {
    let d = b.nrows();
    if d == 1 {
        return (b[(0, 0)].norm(), DVector::from_element(1, Complex64::new(1.0, 0.0)));
    }
    let svd = b.clone().svd(false, true);
    let (k, sigma) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, s)| if s > best.1 { (k, s) } else { best });
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut v: DVector<Complex64> = v_t.row(k).adjoint();
    let n = v.norm();
    if n > 0.0 && n.is_finite() {
        v /= Complex64::new(n, 0.0);
    } else {
        v = DVector::zeros(d);
        v[0] = Complex64::new(1.0, 0.0);
    }
    (sigma.max(0.0), v)
}

/// ‖B‖, the largest singular value.
pub fn block_operator_norm(b: &Block) -> f64 {
    top_singular_pair(b).0
}

/// (e^{iθ}B + e^{−iθ}B*)/2.
pub fn rotated_hermitian_part(b: &Block, theta: f64) -> DMatrix<Complex64> {
    let phase = Complex64::from_polar(1.0, theta);
    let r = b * phase;
    (&r + r.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Smallest and largest eigenvalue of a Hermitian matrix.
pub(crate) fn extreme_eigenvalues(h: &DMatrix<Complex64>) -> (f64, f64) {
    match h.nrows() {
        1 => {
            let a = h[(0, 0)].re;
            (a, a)
        }
        2 => {
            let (a, d, c) = (h[(0, 0)].re, h[(1, 1)].re, h[(0, 1)]);
            let mid = 0.5 * (a + d);
            let rad = (0.5 * (a - d)).hypot(c.norm());
            (mid - rad, mid + rad)
        }
        _ => {
            let ev = h.symmetric_eigenvalues();
            ev.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
        }
    }
}

/// Unit eigenvectors for the smallest and largest eigenvalue.
pub(crate) struct ExtremePairs {
    pub min: (f64, DVector<Complex64>),
    pub max: (f64, DVector<Complex64>),
}

fn unit(v: DVector<Complex64>) -> DVector<Complex64> {
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

fn eigvec_2x2(a: f64, d: f64, c: Complex64, lambda: f64) -> DVector<Complex64> {
    // (H − λ)v = 0 has the two candidate solutions (c, λ−a) and (λ−d, c̄);
    // take whichever is better conditioned.
    let v1 = DVector::from_vec(vec![c, Complex64::new(lambda - a, 0.0)]);
    let v2 = DVector::from_vec(vec![Complex64::new(lambda - d, 0.0), c.conj()]);
    let (n1, n2) = (v1.norm(), v2.norm());
    if n1.max(n2) <= f64::MIN_POSITIVE {
        // c = 0 and λ = a = d: H is a multiple of the identity
        return DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    }
    if n1 >= n2 {
        unit(v1)
    } else {
        unit(v2)
    }
}

pub(crate) fn extreme_eigenpairs(h: &DMatrix<Complex64>) -> ExtremePairs {
    match h.nrows() {
        1 => {
            let a = h[(0, 0)].re;
            let e = DVector::from_element(1, Complex64::new(1.0, 0.0));
            ExtremePairs {
                min: (a, e.clone()),
                max: (a, e),
            }
        }
        2 => {
            let (a, d, c) = (h[(0, 0)].re, h[(1, 1)].re, h[(0, 1)]);
            let mid = 0.5 * (a + d);
            let rad = (0.5 * (a - d)).hypot(c.norm());
            let (lo, hi) = (mid - rad, mid + rad);
            if c.norm() == 0.0 {
                let e0 = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
                let e1 = DVector::from_vec(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
                return if a >= d {
                    ExtremePairs { min: (d, e1), max: (a, e0) }
                } else {
                    ExtremePairs { min: (a, e0), max: (d, e1) }
                };
            }
            ExtremePairs {
                min: (lo, eigvec_2x2(a, d, c, lo)),
                max: (hi, eigvec_2x2(a, d, c, hi)),
            }
        }
        _ => {
            let eig = h.clone().symmetric_eigen();
            let (mut kmin, mut kmax) = (0, 0);
            for (k, &v) in eig.eigenvalues.iter().enumerate() {
                if v < eig.eigenvalues[kmin] {
                    kmin = k;
                }
                if v > eig.eigenvalues[kmax] {
                    kmax = k;
                }
            }
            ExtremePairs {
                min: (eig.eigenvalues[kmin], unit(eig.eigenvectors.column(kmin).into_owned())),
                max: (eig.eigenvalues[kmax], unit(eig.eigenvectors.column(kmax).into_owned())),
            }
        }
    }
}

/// The uniform grid θₖ = 2πk/steps, k = 0..steps.
pub fn theta_grid(steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|k| std::f64::consts::TAU * k as f64 / steps as f64)
        .collect()
}

/// λ_max(H(θ)) on the uniform grid, using H(θ+π) = −H(θ) to halve the work
/// when the grid has an even number of points.
pub(crate) fn support_on_grid(b: &Block, steps: usize) -> Vec<f64> {
    let grid = theta_grid(steps);
    let mut out = vec![f64::NEG_INFINITY; steps];
    if steps.is_multiple_of(2) {
        let half = steps / 2;
        for k in 0..half {
            let (lo, hi) = extreme_eigenvalues(&rotated_hermitian_part(b, grid[k]));
            out[k] = hi;
            out[k + half] = -lo;
        }
    } else {
        for (k, &t) in grid.iter().enumerate() {
            out[k] = extreme_eigenvalues(&rotated_hermitian_part(b, t)).1;
        }
    }
    out
}

/// Result of the θ-sweep: the radius estimate, the maximizing angle and a
/// unit top eigenvector of H(θ) there.
#[derive(Debug, Clone)]
pub struct RadiusSweep {
    pub value: f64,
    pub theta: f64,
    pub vector: DVector<Complex64>,
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// θ-sweep on `theta_steps` grid points, then golden-section search on the
/// two cells around the best grid point until the bracket is narrower than
/// `refine_tol`. The returned value is the best λ_max seen, a lower bound on
/// ω(B).
pub fn block_numerical_radius_sweep(b: &Block, theta_steps: usize, refine_tol: f64) -> RadiusSweep {
    let steps = theta_steps.max(1);
    let support = support_on_grid(b, steps);
    let (k_best, grid_best) = support
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, v)| if v > best.1 { (k, v) } else { best });
    let h = std::f64::consts::TAU / steps as f64;
    let mut best_theta = h * k_best as f64;
    let mut best_value = grid_best;

    let f = |t: f64| extreme_eigenvalues(&rotated_hermitian_part(b, t)).1;
    let (mut lo, mut hi) = (best_theta - h, best_theta + h);
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let tol = refine_tol.max(1e-15);
    let mut iterations = 0;
    while hi - lo > tol && iterations < 200 {
        iterations += 1;
        if f1 > best_value {
            best_value = f1;
            best_theta = x1;
        }
        if f2 > best_value {
            best_value = f2;
            best_theta = x2;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        }
    }
    for (t, v) in [(x1, f1), (x2, f2)] {
        if v > best_value {
            best_value = v;
            best_theta = t;
        }
    }
    let best_theta = best_theta.rem_euclid(std::f64::consts::TAU);
    let pairs = extreme_eigenpairs(&rotated_hermitian_part(b, best_theta));
    RadiusSweep {
        value: best_value.max(0.0),
        theta: best_theta,
        vector: pairs.max.1,
    }
}

/// ω(B) by θ-sweep plus golden-section refinement.
pub fn block_numerical_radius(b: &Block, theta_steps: usize, refine_tol: f64) -> f64 {
    block_numerical_radius_sweep(b, theta_steps, refine_tol).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_block(d: usize, rng: &mut ChaCha8Rng) -> Block {
        use crate::module_space::SampleDistribution;
        Block::from_fn(d, d, |_, _| SampleDistribution::ComplexNormal.sample(rng))
    }

    fn jordan() -> Block {
        Block::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
    }

    // Dense Rayleigh-quotient sampling of unit vectors: sup |xᴴBx| and
    // sup ‖Bx‖, independent of any eigen or singular value solver.
    fn rayleigh_oracle(b: &Block, samples: usize, seed: u64) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut radius: f64 = 0.0;
        let mut norm: f64 = 0.0;
        for _ in 0..samples {
            let x = crate::module_space::random_unit_fiber(b.nrows(), &mut rng);
            let bx = b * &x;
            radius = radius.max(x.dotc(&bx).norm());
            norm = norm.max(bx.norm());
        }
        (radius, norm)
    }

    #[test]
    fn operator_norm_examples() {
        assert!((block_operator_norm(&jordan()) - 1.0).abs() < 1e-15);
        assert_eq!(block_operator_norm(&Block::from_element(1, 1, c(3.0, 0.0))), 3.0);
        assert_eq!(block_operator_norm(&Block::zeros(3, 3)), 0.0);
    }

    #[test]
    fn hermitian_norm_matches_spectral_radius_and_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..=4 {
            let g = random_block(d, &mut rng);
            let h = (&g + g.adjoint()) * c(0.5, 0.0);
            let (lo, hi) = extreme_eigenvalues(&h);
            let norm = block_operator_norm(&h);
            assert!((norm - lo.abs().max(hi.abs())).abs() <= 1e-10 * norm);
            let (r, n) = rayleigh_oracle(&h, 200_000, 2);
            assert!(r <= norm + 1e-12 && n <= norm + 1e-12);
            assert!(n >= 0.97 * norm, "d={d}: oracle {n} vs {norm}");
        }
    }

    #[test]
    fn singular_vector_attains_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for d in 1..=8 {
            let b = random_block(d, &mut rng);
            let (s, v) = top_singular_pair(&b);
            assert!((v.norm() - 1.0).abs() < 1e-12);
            assert!(((&b * &v).norm() - s).abs() <= 1e-10 * s);
        }
    }

    #[test]
    fn radius_examples() {
        // the range of the 2x2 Jordan block is the disk of radius 1/2
        let w = block_numerical_radius(&jordan(), 360, 1e-12);
        assert!((w - 0.5).abs() < 1e-9);
        let (r, _) = rayleigh_oracle(&jordan(), 100_000, 3);
        assert!(r <= 0.5 + 1e-12 && r > 0.49);

        for d in 1..=4 {
            let w = block_numerical_radius(&Block::identity(d, d), 720, 1e-12);
            assert!((w - 1.0).abs() < 1e-12);
        }

        let normal = Block::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]));
        let w = block_numerical_radius(&normal, 720, 1e-12);
        assert!((w - 1.0).abs() < 1e-12);
        let (r, _) = rayleigh_oracle(&normal, 100_000, 5);
        assert!(r <= 1.0 + 1e-12 && r > 0.99);
    }

    #[test]
    fn radius_between_half_norm_and_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in 1..=5 {
            for _ in 0..20 {
                let b = random_block(d, &mut rng);
                let sweep = block_numerical_radius_sweep(&b, 720, 1e-12);
                let n = block_operator_norm(&b);
                assert!(sweep.value <= n * (1.0 + 1e-12));
                assert!(n <= 2.0 * sweep.value * (1.0 + 1e-9));
                // witness attains the value
                let q = sweep.vector.dotc(&(&b * &sweep.vector));
                assert!((q.norm() - sweep.value).abs() <= 1e-9 * (1.0 + sweep.value));
                let (r, _) = rayleigh_oracle(&b, 2_000, 10);
                assert!(r <= sweep.value + 1e-9);
            }
        }
    }

    #[test]
    fn odd_and_even_grids_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for d in 2..=4 {
            let b = random_block(d, &mut rng);
            let a = block_numerical_radius(&b, 720, 1e-12);
            let o = block_numerical_radius(&b, 721, 1e-12);
            assert!((a - o).abs() < 1e-9);
        }
    }

    #[test]
    fn eigenpairs_small_and_large_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in 1..=4 {
            let g = random_block(d, &mut rng);
            let h = (&g + g.adjoint()) * c(0.5, 0.0);
            let p = extreme_eigenpairs(&h);
            for (lambda, v) in [&p.min, &p.max] {
                let resid = (&h * v - v * c(*lambda, 0.0)).norm();
                assert!(resid <= 1e-12 * (1.0 + lambda.abs()), "d={d} resid={resid}");
            }
            let (lo, hi) = extreme_eigenvalues(&h);
            assert!((lo - p.min.0).abs() < 1e-12 && (hi - p.max.0).abs() < 1e-12);
        }
    }
}

//! Distances between traced boundaries of numerical ranges.
//!
//! A traced boundary is the closed polygon through the support points at
//! consecutive grid angles. Between two consecutive support points the true
//! boundary stays inside the triangle cut off by the two supporting lines,
//! whose height is at most `L·tan(h/2)/2` for a chord of length `L` and a
//! turning angle `h`. [`chord_bound`] is that worst-case height, so any point
//! of the true boundary lies within it of the polygon.

use num_complex::Complex64;

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a) * ab.conj()).re / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn edge_distance(p: Complex64, poly: &[Complex64], k: usize) -> f64 {
    let n = poly.len();
    segment_distance(p, poly[k % n], poly[(k + 1) % n])
}

/// Distance from `p` to the closed polygon `poly`.
pub fn polygon_distance(p: Complex64, poly: &[Complex64]) -> f64 {
    match poly.len() {
        0 => f64::INFINITY,
        1 => (p - poly[0]).norm(),
        n => (0..n).map(|k| edge_distance(p, poly, k)).fold(f64::INFINITY, f64::min),
    }
}

/// Largest possible gap between the true boundary and the traced polygon
/// when consecutive vertices are support points `turn` radians apart.
pub fn chord_bound(poly: &[Complex64], turn: f64) -> f64 {
    let n = poly.len();
    if n < 2 {
        return 0.0;
    }
    let factor = 0.5 * (0.5 * turn).tan();
    (0..n)
        .map(|k| (poly[(k + 1) % n] - poly[k]).norm() * factor)
        .fold(0.0, f64::max)
}

const WINDOW: usize = 4;

/// sup over points of `a` of the distance to polygon `b`.
///
/// Neighbouring points of `a` have neighbouring nearest edges in `b`, so
/// each point first searches a small window around the previous nearest
/// edge and only falls back to a full scan when the window gives more than
/// `cutoff`. The result is an upper bound on the exact distance and is exact
/// whenever it exceeds `cutoff`, so comparing it with `cutoff` decides the
/// same way the exact distance would.
pub fn directed_distance(a: &[Complex64], b: &[Complex64], cutoff: f64) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    if b.len() <= 2 * WINDOW + 1 {
        return a.iter().map(|&p| polygon_distance(p, b)).fold(0.0, f64::max);
    }
    let n = b.len();
    let nearest = |p: Complex64| -> (usize, f64) {
        (0..n)
            .map(|k| (k, edge_distance(p, b, k)))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
    };
    let (mut cursor, first) = nearest(a[0]);
    let mut worst = first;
    for &p in &a[1..] {
        let (k, d) = (0..=2 * WINDOW)
            .map(|j| (cursor + n + j - WINDOW) % n)
            .map(|k| (k, edge_distance(p, b, k)))
            .fold((cursor, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        let (k, d) = if d > cutoff { nearest(p) } else { (k, d) };
        cursor = k;
        worst = worst.max(d);
    }
    worst
}

/// Symmetric Hausdorff distance between two traced boundaries (bounded
/// above, see [`directed_distance`]).
pub fn boundary_hausdorff(a: &[Complex64], b: &[Complex64], cutoff: f64) -> f64 {
    directed_distance(a, b, cutoff).max(directed_distance(b, a, cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize, r: f64, shift: f64) -> Vec<Complex64> {
        (0..n)
            .map(|k| Complex64::from_polar(r, std::f64::consts::TAU * (k as f64 + shift) / n as f64))
            .collect()
    }

    #[test]
    fn identical_polygons_are_at_distance_zero() {
        let c = circle(720, 1.3, 0.0);
        assert_eq!(boundary_hausdorff(&c, &c, 1e-6), 0.0);
    }

    #[test]
    fn shifted_samplings_stay_within_chord_bound() {
        let turn = std::f64::consts::TAU / 720.0;
        let a = circle(720, 2.0, 0.0);
        let b = circle(720, 2.0, 0.37);
        let bound = chord_bound(&a, turn).max(chord_bound(&b, turn));
        let d = boundary_hausdorff(&a, &b, bound);
        assert!(d <= bound, "{d} > {bound}");
        // the exact sagitta of the circle polygon is r(1 − cos(h/2))
        assert!(d <= 2.0 * (1.0 - (turn / 2.0).cos()) + 1e-15);
    }

    #[test]
    fn reversed_orientation_is_handled() {
        let a = circle(360, 1.0, 0.0);
        let b: Vec<_> = a.iter().map(|z| z.conj()).collect();
        // conjugation maps the circle onto itself
        assert!(boundary_hausdorff(&a, &b, 1e-6) < 1e-12);
    }

    #[test]
    fn detects_a_real_gap() {
        let a = circle(360, 1.0, 0.0);
        let b = circle(360, 1.1, 0.0);
        let d = boundary_hausdorff(&a, &b, 1e-6);
        assert!((d - 0.1).abs() < 1e-9);
    }

    #[test]
    fn windowed_search_matches_full_scan() {
        let a = circle(200, 1.0, 0.0);
        let b: Vec<_> = circle(200, 1.0, 0.5).iter().map(|z| z * 1.001).collect();
        let exact = a.iter().map(|&p| polygon_distance(p, &b)).fold(0.0, f64::max);
        let fast = directed_distance(&a, &b, 1e-12);
        assert!((exact - fast).abs() < 1e-15);
    }

    #[test]
    fn degenerate_polygons() {
        let p = vec![Complex64::new(1.0, 2.0); 50];
        let q = vec![Complex64::new(1.0, 2.0)];
        assert_eq!(boundary_hausdorff(&p, &q, 1e-6), 0.0);
        assert_eq!(chord_bound(&p, 0.1), 0.0);
        assert_eq!(polygon_distance(Complex64::new(0.0, 0.0), &[]), f64::INFINITY);
    }
}

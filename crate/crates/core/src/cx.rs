//! C(X) as a Hilbert module over itself, on a finite sample of X.
//!
//! Each sample point xᵢ is a character φᵢ(f) = f(xᵢ) with a one-dimensional
//! fiber, so a multiplication operator M_g is the family of 1×1 blocks
//! [g(xᵢ)]. The model is exact at the sample points; nothing is claimed
//! between them.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gelfand::CharacterSpace;
use crate::module_space::ModuleShape;
use crate::norms::{module_norm, module_numerical_radius, SweepOptions};
use crate::operators::{Block, ModuleOperator};
use crate::verification::CheckResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    /// θₖ = 2πk/m on the unit circle, parametrized by angle.
    Circle,
    /// Uniform points of [0, 1], endpoints included.
    Interval,
    /// Caller-supplied distinct points.
    Custom,
}

impl FromStr for SpaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circle" => Ok(SpaceKind::Circle),
            "interval" => Ok(SpaceKind::Interval),
            "custom" => Ok(SpaceKind::Custom),
            _ => Err(Error::InvalidParameter(format!("unknown space kind `{s}`"))),
        }
    }
}

/// Finitely many points of X, one character each.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedSpace {
    kind: SpaceKind,
    points: Vec<f64>,
    space: Arc<CharacterSpace>,
}

impl DiscretizedSpace {
    pub fn circle(m: usize) -> Result<Self> {
        Self::from_parts(
            SpaceKind::Circle,
            (0..m).map(|k| TAU * k as f64 / m as f64).collect(),
        )
    }

    /// With m = 1 the single point is 0.
    pub fn interval(m: usize) -> Result<Self> {
        let points = match m {
            1 => vec![0.0],
            _ => (0..m).map(|k| k as f64 / (m - 1) as f64).collect(),
        };
        Self::from_parts(SpaceKind::Interval, points)
    }

    pub fn custom(points: Vec<f64>) -> Result<Self> {
        Self::from_parts(SpaceKind::Custom, points)
    }

    /// Dyadic mesh number `level`: 2^level circle points or 2^level + 1
    /// interval points. Consecutive levels are nested.
    pub fn dyadic(kind: SpaceKind, level: u32) -> Result<Self> {
        let m = 1usize
            .checked_shl(level)
            .filter(|_| level < 32)
            .ok_or_else(|| Error::InvalidParameter(format!("refinement level {level} too deep")))?;
        match kind {
            SpaceKind::Circle => Self::circle(m),
            SpaceKind::Interval => Self::interval(m + 1),
            SpaceKind::Custom => Err(Error::InvalidParameter(
                "custom spaces have no canonical refinement".into(),
            )),
        }
    }

    fn from_parts(kind: SpaceKind, points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidShape("a discretized space needs at least one point".into()));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter(format!("sample point {p} is not finite")));
        }
        let mut sorted = points.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("sample points must be distinct".into()));
        }
        let space = Arc::new(CharacterSpace::new(points.len())?);
        Ok(Self {
            kind,
            points,
            space,
        })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn space(&self) -> &Arc<CharacterSpace> {
        &self.space
    }
}

/// A function g on X, given by formula or by its values at the samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symbol {
    Constant(Complex64),
    /// g(x) = x, the sample coordinate (the angle on the circle).
    Identity,
    /// g(θ) = e^{iθ}.
    ExpITheta,
    /// Σ cₖ xᵏ, lowest degree first.
    Polynomial(Vec<Complex64>),
    /// g(xᵢ) listed point by point.
    Values(Vec<Complex64>),
}

impl Symbol {
    /// g at every sample point.
    pub fn evaluate(&self, space: &DiscretizedSpace) -> Result<Vec<Complex64>> {
        let at = |f: &dyn Fn(f64) -> Complex64| space.points.iter().map(|&x| f(x)).collect();
        Ok(match self {
            Symbol::Constant(c) => at(&|_| *c),
            Symbol::Identity => at(&|x| Complex64::new(x, 0.0)),
            Symbol::ExpITheta => at(&|x| Complex64::from_polar(1.0, x)),
            Symbol::Polynomial(coeffs) => at(&|x| {
                coeffs
                    .iter()
                    .rev()
                    .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
            }),
            Symbol::Values(values) => {
                if values.len() != space.len() {
                    return Err(Error::ShapeMismatch(format!(
                        "symbol has {} values for {} sample points",
                        values.len(),
                        space.len()
                    )));
                }
                values.clone()
            }
        })
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Constant(c) => write!(f, "const:{}:{}", c.re, c.im),
            Symbol::Identity => f.write_str("identity"),
            Symbol::ExpITheta => f.write_str("exp-i-theta"),
            Symbol::Polynomial(cs) => {
                f.write_str("poly:")?;
                for (k, c) in cs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}", c.re)?;
                    if c.im != 0.0 {
                        write!(f, "{:+}i", c.im)?;
                    }
                }
                Ok(())
            }
            Symbol::Values(v) => write!(f, "values[{}]", v.len()),
        }
    }
}

/// Parses `identity` (alias `x`), `exp-i-theta`, `zero`, `one`,
/// `const:RE[:IM]` and `poly:c0,c1,...` with real coefficients.
impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad number `{t}` in symbol `{s}`")))
        };
        match s {
            "identity" | "x" => return Ok(Symbol::Identity),
            "exp-i-theta" => return Ok(Symbol::ExpITheta),
            "zero" => return Ok(Symbol::Constant(Complex64::new(0.0, 0.0))),
            "one" => return Ok(Symbol::Constant(Complex64::new(1.0, 0.0))),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("const:") {
            let mut parts = rest.splitn(2, ':');
            let re = num(parts.next().unwrap_or(""))?;
            let im = parts.next().map(num).transpose()?.unwrap_or(0.0);
            return Ok(Symbol::Constant(Complex64::new(re, im)));
        }
        if let Some(rest) = s.strip_prefix("poly:") {
            let coeffs = rest
                .split(',')
                .map(|t| num(t).map(|re| Complex64::new(re, 0.0)))
                .collect::<Result<Vec<_>>>()?;
            return Ok(Symbol::Polynomial(coeffs));
        }
        Err(Error::InvalidParameter(format!("unknown symbol `{s}`")))
    }
}

/// M_g f = g·f on the sampled space.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicationOperator {
    values: Vec<Complex64>,
    operator: ModuleOperator,
}

impl MultiplicationOperator {
    /// g(xᵢ) for each sample point.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn operator(&self) -> &ModuleOperator {
        &self.operator
    }

    /// Multiplication by conj(g).
    pub fn adjoint(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| v.conj()).collect(),
            operator: self.operator.adjoint(),
        }
    }

    /// max |g(xᵢ)|.
    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Self-adjoint exactly when g is real at every sample.
    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.im.abs() <= tol)
    }
}

pub fn build_multiplication(space: &DiscretizedSpace, g: &Symbol) -> Result<MultiplicationOperator> {
    let values = g.evaluate(space)?;
    if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "symbol is not finite at sample point {}",
            space.points[i]
        )));
    }
    let shape = Arc::new(ModuleShape::new(Arc::clone(&space.space), vec![1; space.len()])?);
    let blocks = values.iter().map(|&v| Block::from_element(1, 1, v)).collect();
    let operator = ModuleOperator::new(shape, blocks)?;
    Ok(MultiplicationOperator { values, operator })
}

/// ⫴M_g⫴ = max |g(xᵢ)|, and ω_o(M_g) = ⫴M_g⫴ when g is real.
pub fn check_cx_identities(m: &MultiplicationOperator, tol: f64) -> Result<Vec<CheckResult>> {
    let sup = m.sup_abs();
    let norm = module_norm(&m.operator).value;
    let mut results = vec![CheckResult::eq("cx_norm_equals_sup", norm, sup, tol)];
    if m.is_real(tol) {
        let radius = module_numerical_radius(&m.operator, SweepOptions::default())?.value;
        results.push(CheckResult::eq("cx_radius_equals_norm", radius, norm, tol));
    }
    Ok(results)
}

/// ⫴M_g⫴ on the nested dyadic meshes 0..=levels.
pub fn refinement_norms(kind: SpaceKind, g: &Symbol, levels: u32) -> Result<Vec<f64>> {
    (0..=levels)
        .map(|level| {
            let space = DiscretizedSpace::dyadic(kind, level)?;
            Ok(module_norm(build_multiplication(&space, g)?.operator()).value)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{monte_carlo_sup, sample_numerical_range, Quantity};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn construction_examples() {
        let one = build_multiplication(&DiscretizedSpace::interval(7).unwrap(), &Symbol::Constant(c(1.0, 0.0)))
            .unwrap();
        assert_eq!(one.operator(), &ModuleOperator::identity(one.operator().shape().clone()));

        let e = build_multiplication(&DiscretizedSpace::circle(8).unwrap(), &Symbol::ExpITheta).unwrap();
        assert!(e.operator().is_unitary(1e-15));

        let x = build_multiplication(&DiscretizedSpace::interval(5).unwrap(), &Symbol::Identity).unwrap();
        let blocks: Vec<_> = x.operator().blocks().iter().map(|b| b[(0, 0)]).collect();
        assert_eq!(blocks, [0.0, 0.25, 0.5, 0.75, 1.0].map(|v| c(v, 0.0)));
        assert_eq!(x.adjoint().operator(), &x.operator().adjoint());
    }

    #[test]
    fn space_validation() {
        assert!(DiscretizedSpace::interval(0).is_err());
        assert_eq!(DiscretizedSpace::interval(1).unwrap().points(), &[0.0]);
        assert!(DiscretizedSpace::custom(vec![0.1, 0.3, 0.1]).is_err());
        assert!(DiscretizedSpace::custom(vec![f64::NAN]).is_err());
        let s = DiscretizedSpace::circle(4).unwrap();
        assert_eq!(s.space().size(), 4);
    }

    #[test]
    fn value_table_must_cover_every_point() {
        let s = DiscretizedSpace::interval(3).unwrap();
        let short = Symbol::Values(vec![c(1.0, 0.0); 2]);
        assert!(matches!(build_multiplication(&s, &short), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn identities_on_examples() {
        let tol = 1e-9;
        let x = build_multiplication(&DiscretizedSpace::interval(101).unwrap(), &Symbol::Identity).unwrap();
        let r = check_cx_identities(&x, tol).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|c| c.passed));
        assert!((r[0].lhs - 1.0).abs() < tol && (r[1].lhs - 1.0).abs() < tol);
        // the oracle reaches the sup exactly: every 1×1 witness attains |g(xᵢ)|
        let mc = monte_carlo_sup(x.operator(), Quantity::Radius, 2000, 1).unwrap();
        assert!((mc - 1.0).abs() < 1e-12);

        let zero = build_multiplication(&DiscretizedSpace::circle(10).unwrap(), &"zero".parse().unwrap())
            .unwrap();
        let r = check_cx_identities(&zero, tol).unwrap();
        assert!(r.iter().all(|c| c.passed && c.lhs == 0.0));

        let e = build_multiplication(&DiscretizedSpace::circle(360).unwrap(), &Symbol::ExpITheta).unwrap();
        let r = check_cx_identities(&e, tol).unwrap();
        assert_eq!(r.len(), 1, "complex symbol skips the radius identity");
        assert!(r[0].passed);
        let w = module_numerical_radius(e.operator(), SweepOptions::default()).unwrap();
        assert!((w.value - 1.0).abs() < tol);
    }

    #[test]
    fn sampled_range_is_the_set_of_values() {
        let s = DiscretizedSpace::circle(12).unwrap();
        let g = Symbol::Polynomial(vec![c(0.5, -1.0), c(0.0, 2.0), c(-0.25, 0.0)]);
        let m = build_multiplication(&s, &g).unwrap();
        let sample = sample_numerical_range(m.operator(), 16, 10, 4).unwrap();
        for p in &sample.points {
            assert!((p.value - m.values()[p.character]).norm() < 1e-9);
        }
    }

    #[test]
    fn dyadic_refinement_is_monotone() {
        let g = Symbol::Polynomial(vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]); // x − x², peak 1/4 at 1/2
        let norms = refinement_norms(SpaceKind::Interval, &g, 8).unwrap();
        assert!(norms.windows(2).all(|w| w[0] <= w[1]));
        assert!((norms[8] - 0.25).abs() < 1e-12);
        let wave = Symbol::Polynomial(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let circle = refinement_norms(SpaceKind::Circle, &wave, 6).unwrap();
        assert!(circle.windows(2).all(|w| w[0] <= w[1]));
        assert!(DiscretizedSpace::dyadic(SpaceKind::Interval, 40).is_err());
        assert!(refinement_norms(SpaceKind::Custom, &wave, 1).is_err());
    }

    #[test]
    fn symbol_strings() {
        assert_eq!("x".parse::<Symbol>().unwrap(), Symbol::Identity);
        assert_eq!("const:2:-1".parse::<Symbol>().unwrap(), Symbol::Constant(c(2.0, -1.0)));
        assert_eq!(
            "poly:1, 0,3".parse::<Symbol>().unwrap(),
            Symbol::Polynomial(vec![c(1.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)])
        );
        assert!("sin".parse::<Symbol>().is_err());
        assert!("poly:1,a".parse::<Symbol>().is_err());
        for s in ["identity", "exp-i-theta", "const:1.5:0", "poly:1,2"] {
            let sym: Symbol = s.parse().unwrap();
            assert_eq!(sym.to_string().parse::<Symbol>().unwrap(), sym);
        }
    }
}

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::cx::{build_multiplication, DiscretizedSpace, MultiplicationOperator, SpaceKind, Symbol};
use crate::gelfand::CharacterSpace;
use crate::module_space::ModuleShape;
use crate::operators::{Block, ModuleOperator};
use crate::verification::{CheckResult, VerificationReport, Witness};

/// A square block, either as rows of entries or as one flat row-major list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BlockEntries {
    Rows(Vec<Vec<Complex64>>),
    Flat(Vec<Complex64>),
}

impl BlockEntries {
    fn to_block(&self, d: usize, field: &str) -> Result<Block, CliError> {
        let bad = |msg: String| CliError::Input(format!("{field}: {msg}"));
        match self {
            BlockEntries::Rows(rows) => {
                if rows.len() != d {
                    return Err(bad(format!("expected {d} rows, got {}", rows.len())));
                }
                if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != d) {
                    return Err(bad(format!("row {r} has {} entries, expected {d}", row.len())));
                }
                Ok(Block::from_fn(d, d, |i, j| rows[i][j]))
            }
            BlockEntries::Flat(values) => {
                if values.len() != d * d {
                    return Err(bad(format!("expected {} entries for a {d}×{d} block, got {}", d * d, values.len())));
                }
                Ok(Block::from_row_slice(d, d, values))
            }
        }
    }

    fn from_block(b: &Block) -> Self {
        BlockEntries::Rows(
            (0..b.nrows())
                .map(|i| (0..b.ncols()).map(|j| b[(i, j)]).collect())
                .collect(),
        )
    }
}

/// A symbol given by name (`identity`, `exp-i-theta`, `const:1:0`, ...)
/// or in full.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolSpec {
    Name(String),
    Full(Symbol),
}

impl SymbolSpec {
    pub fn resolve(&self) -> Result<Symbol, CliError> {
        match self {
            SymbolSpec::Name(s) => s.parse().map_err(|e| CliError::Input(format!("cx.symbol: {e}"))),
            SymbolSpec::Full(s) => Ok(s.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CxSection {
    pub kind: SpaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<f64>>,
    pub symbol: SymbolSpec,
}

impl CxSection {
    pub fn space(&self) -> Result<DiscretizedSpace, CliError> {
        let input = |e: crate::Error| CliError::Input(format!("cx: {e}"));
        match (self.kind, self.m, &self.points) {
            (SpaceKind::Custom, _, Some(points)) => DiscretizedSpace::custom(points.clone()).map_err(input),
            (SpaceKind::Custom, _, None) => Err(CliError::Input("cx.points: required for kind `custom`".into())),
            (_, _, Some(_)) => Err(CliError::Input("cx.points: only allowed for kind `custom`".into())),
            (_, None, None) => Err(CliError::Input("cx.m: required for kinds `circle` and `interval`".into())),
            (SpaceKind::Circle, Some(m), None) => DiscretizedSpace::circle(m).map_err(input),
            (SpaceKind::Interval, Some(m), None) => DiscretizedSpace::interval(m).map_err(input),
        }
    }

    pub fn build(&self) -> Result<MultiplicationOperator, CliError> {
        let space = self.space()?;
        build_multiplication(&space, &self.symbol.resolve()?).map_err(|e| CliError::Input(format!("cx: {e}")))
    }
}

/// The JSON instance format read by every subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    #[serde(default)]
    pub characters: Vec<String>,
    #[serde(default)]
    pub dims: Vec<usize>,
    #[serde(default)]
    pub operators: BTreeMap<String, Vec<BlockEntries>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cx: Option<CxSection>,
}

impl InstanceDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed instance: {e}")))
    }

    /// Document holding a single operator named `name`.
    pub fn from_operator(name: &str, t: &ModuleOperator) -> Self {
        let space = t.shape().space();
        Self {
            characters: (0..space.size()).map(|i| space.label(i)).collect(),
            dims: t.shape().dims().to_vec(),
            operators: BTreeMap::from([(
                name.to_string(),
                t.blocks().iter().map(BlockEntries::from_block).collect(),
            )]),
            cx: None,
        }
    }

    pub fn shape(&self) -> Result<Arc<ModuleShape>, CliError> {
        if self.dims.is_empty() {
            return Err(CliError::Input("dims: at least one character is required".into()));
        }
        if self.characters.len() != self.dims.len() {
            return Err(CliError::Input(format!(
                "characters: {} labels for {} dims",
                self.characters.len(),
                self.dims.len()
            )));
        }
        if let Some(k) = self.dims.iter().position(|&d| d == 0) {
            return Err(CliError::Input(format!("dims[{k}]: fiber dimension must be positive")));
        }
        let space = CharacterSpace::with_labels(self.characters.clone())
            .map_err(|e| CliError::Input(format!("characters: {e}")))?;
        let shape = ModuleShape::new(Arc::new(space), self.dims.clone())
            .map_err(|e| CliError::Input(format!("dims: {e}")))?;
        Ok(Arc::new(shape))
    }

    /// The operator `name`, or the only one when `name` is `None`.
    pub fn operator(&self, name: Option<&str>) -> Result<(String, ModuleOperator), CliError> {
        let name = match name {
            Some(n) => n.to_string(),
            None if self.operators.len() == 1 => self.operators.keys().next().cloned().unwrap_or_default(),
            None if self.operators.contains_key("T") => "T".to_string(),
            None if self.operators.is_empty() => {
                return Err(CliError::Input("operators: the instance defines no operator".into()))
            }
            None => {
                return Err(CliError::Input(format!(
                    "operators: several operators ({}), choose one with --operator",
                    self.operators.keys().cloned().collect::<Vec<_>>().join(", ")
                )))
            }
        };
        let blocks = self
            .operators
            .get(&name)
            .ok_or_else(|| CliError::Input(format!("operators: no operator named `{name}`")))?;
        let shape = self.shape()?;
        if blocks.len() != shape.dims().len() {
            return Err(CliError::Input(format!(
                "operators.{name}: {} blocks for {} characters",
                blocks.len(),
                shape.dims().len()
            )));
        }
        let blocks = blocks
            .iter()
            .zip(shape.dims())
            .enumerate()
            .map(|(k, (b, &d))| b.to_block(d, &format!("operators.{name}[{k}]")))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some((k, _)) = blocks
            .iter()
            .enumerate()
            .find(|(_, b)| b.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())))
        {
            return Err(CliError::Input(format!("operators.{name}[{k}]: entries must be finite")));
        }
        let t = ModuleOperator::new(shape, blocks).map_err(|e| CliError::Input(format!("operators.{name}: {e}")))?;
        Ok((name, t))
    }
}

/// Everything a subcommand reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceDocument>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub values: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub witnesses: BTreeMap<String, Witness>,
    #[serde(default)]
    pub checks: Vec<CheckResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fuzz: Option<VerificationReport>,
    pub overall: bool,
}

impl ReportDocument {
    pub fn new(command: &str) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed: None,
            operator: None,
            instance: None,
            parameters: BTreeMap::new(),
            values: BTreeMap::new(),
            witnesses: BTreeMap::new(),
            checks: Vec::new(),
            fuzz: None,
            overall: true,
        }
    }

    pub fn parameter(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("parameters serialize");
        self.parameters.insert(key.to_string(), value);
    }

    pub fn value(&mut self, key: &str, v: f64) {
        self.values.insert(key.to_string(), v);
    }

    pub fn push_checks(&mut self, checks: impl IntoIterator<Item = CheckResult>) {
        for c in checks {
            self.overall &= c.passed;
            self.checks.push(c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const JORDAN: &str = r#"{
        "characters": ["a", "b"],
        "dims": [2, 1],
        "operators": {"T": [[[[0,0],[1,0]],[[0,0],[0,0]]], [[[2,0]]]]}
    }"#;

    #[test]
    fn nested_and_flat_blocks_agree() {
        let nested = InstanceDocument::parse(JORDAN).unwrap();
        let flat = InstanceDocument::parse(
            r#"{"characters":["a","b"],"dims":[2,1],"operators":{"T":[[[0,0],[1,0],[0,0],[0,0]],[[2,0]]]}}"#,
        )
        .unwrap();
        assert_eq!(nested.operator(None).unwrap(), flat.operator(None).unwrap());
        let (_, t) = nested.operator(Some("T")).unwrap();
        assert_eq!(t.block(0)[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(t.shape().space().label(1), "b");
    }

    #[test]
    fn diagnostics_name_the_field() {
        let doc = InstanceDocument::parse(
            r#"{"characters":["a"],"dims":[2],"operators":{"T":[[[[1,0]],[[0,0]]]]}}"#,
        )
        .unwrap();
        let err = doc.operator(None).unwrap_err().to_string();
        assert!(err.contains("operators.T[0]") && err.contains("row 0"), "{err}");
        let doc = InstanceDocument::parse(r#"{"characters":["a","b"],"dims":[1],"operators":{}}"#).unwrap();
        assert!(doc.shape().unwrap_err().to_string().contains("characters"));
        let err = InstanceDocument::parse("{\"dims\": [1,]}").unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
        assert!(InstanceDocument::parse(r#"{"dimz":[1]}"#).is_err());
    }

    #[test]
    fn document_round_trip() {
        let doc = InstanceDocument::parse(JORDAN).unwrap();
        let (name, t) = doc.operator(None).unwrap();
        let again = InstanceDocument::from_operator(&name, &t);
        assert_eq!(again.operator(None).unwrap().1, t);
        let text = serde_json::to_string(&again).unwrap();
        assert_eq!(InstanceDocument::parse(&text).unwrap(), again);
    }

    #[test]
    fn cx_sections() {
        let doc = InstanceDocument::parse(r#"{"cx":{"kind":"interval","m":5,"symbol":"identity"}}"#).unwrap();
        let m = doc.cx.unwrap().build().unwrap();
        assert_eq!(m.values().len(), 5);
        let doc = InstanceDocument::parse(
            r#"{"cx":{"kind":"custom","points":[0.0,2.0],"symbol":{"polynomial":[[1,0],[0,1]]}}}"#,
        )
        .unwrap();
        let m = doc.cx.unwrap().build().unwrap();
        assert_eq!(m.values()[1], Complex64::new(1.0, 2.0));
        let doc = InstanceDocument::parse(r#"{"cx":{"kind":"circle","symbol":"identity"}}"#).unwrap();
        assert!(doc.cx.unwrap().build().is_err());
        let doc = InstanceDocument::parse(r#"{"cx":{"kind":"circle","m":3,"symbol":"sin"}}"#).unwrap();
        assert!(doc.cx.unwrap().build().is_err());
    }
}

//! Typed subcommand inputs. Flags are converted to a JSON object and merged over `--input`.

use std::io::Read;

use masf_core::intmat::Rational;
use masf_core::invariants::{GammaInvariants, Level, SplitElement, Variant};
use masf_core::laurent::{CoefficientField, LaurentSeries};
use masf_core::loop_group::{LoopMatrix, MatrixGroup};
use masf_core::root_data::{RootDatum, RootDatumDoc};
use masf_core::{Error, Result};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{Map, Value};

/// Reads `--input`: inline JSON when it starts with `{`, a file path otherwise, `-` for stdin.
pub fn load(source: &str) -> Result<Value> {
    let text = if source.trim_start().starts_with('{') {
        source.to_string()
    } else if source == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(source).map_err(|e| Error::Parse(format!("{source}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("input JSON: {e}")))
}

fn strip_nulls(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let m: Map<String, Value> = m
                .into_iter()
                .filter(|(_, v)| !v.is_null())
                .map(|(k, v)| (k, strip_nulls(v)))
                .filter(|(_, v)| !matches!(v, Value::Object(o) if o.is_empty()))
                .collect();
            Value::Object(m)
        }
        other => other,
    }
}

fn merge(base: Value, over: Value) -> Value {
    match (base, over) {
        (Value::Object(mut b), Value::Object(o)) => {
            for (k, v) in o {
                let merged = match b.remove(&k) {
                    Some(old) => merge(old, v),
                    None => v,
                };
                b.insert(k, merged);
            }
            Value::Object(b)
        }
        (_, over) => over,
    }
}

/// Flags win over fields of the input document.
pub fn resolve<T: DeserializeOwned>(flags: Value, input: Option<&str>) -> Result<T> {
    let base = match input {
        Some(source) => load(source)?,
        None => Value::Object(Map::new()),
    };
    if !base.is_object() {
        return Err(Error::Parse("input must be a JSON object".into()));
    }
    let merged = merge(base, strip_nulls(flags));
    serde_json::from_value(merged).map_err(|e| Error::Parse(e.to_string()))
}

/// `--datum GL2` or an inline root-datum document.
pub fn datum_flag(s: &Option<String>) -> Result<Value> {
    match s {
        None => Ok(Value::Null),
        Some(s) if s.trim_start().starts_with('{') => {
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("--datum: {e}")))
        }
        Some(s) => Ok(Value::String(s.clone())),
    }
}

pub fn json_flag(name: &str, s: &Option<String>) -> Result<Value> {
    match s {
        None => Ok(Value::Null),
        Some(s) => serde_json::from_str(s).map_err(|e| Error::Parse(format!("--{name}: {e}"))),
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum DatumSpec {
    Preset(String),
    Doc(RootDatumDoc),
}

impl DatumSpec {
    pub fn build(&self) -> Result<RootDatum> {
        match self {
            DatumSpec::Preset(name) => RootDatum::preset(name),
            DatumSpec::Doc(doc) => RootDatum::from_doc(doc),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Text(String),
}

impl Number {
    fn rational(&self) -> Result<Rational> {
        match self {
            Number::Int(n) => Ok(Rational::from_integer(*n)),
            Number::Text(s) => s.trim().parse().map_err(|_| Error::Parse(format!("bad rational `{s}`"))),
        }
    }
}

fn field_of(s: &Option<String>) -> Result<CoefficientField> {
    match s {
        None => Ok(CoefficientField::Rationals),
        Some(s) => s.parse(),
    }
}

pub fn series(s: &str, field: CoefficientField, prec: i64) -> Result<LaurentSeries> {
    LaurentSeries::parse(s, field, Some(prec))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitGamma {
    pub mu: Vec<i64>,
    pub units: Vec<String>,
    #[serde(default)]
    pub field: Option<String>,
}

impl SplitGamma {
    pub fn build(&self, datum: &RootDatum, prec: i64) -> Result<SplitElement> {
        let field = field_of(&self.field)?;
        let units = self.units.iter().map(|u| series(u, field, prec)).collect::<Result<Vec<_>>>()?;
        SplitElement::new(datum, self.mu.clone(), units, prec)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitGamma {
    pub nu: Vec<Number>,
    pub kappa: Vec<i64>,
    pub d: i64,
    pub c: i64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum GammaSpec {
    Split(SplitGamma),
    Explicit(ExplicitGamma),
}

impl GammaSpec {
    pub fn invariants(&self, datum: &RootDatum, prec: i64) -> Result<GammaInvariants> {
        match self {
            GammaSpec::Split(g) => GammaInvariants::from_split(datum, &g.build(datum, prec)?),
            GammaSpec::Explicit(g) => {
                let nu = g.nu.iter().map(Number::rational).collect::<Result<Vec<_>>>()?;
                GammaInvariants::explicit(datum, nu, &g.kappa, g.d, g.c)
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumInput {
    pub datum: DatumSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdmInput {
    pub datum: DatumSpec,
    pub lambda: Vec<i64>,
    #[serde(default)]
    pub maximal: bool,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberInput {
    pub datum: DatumSpec,
    pub gamma: GammaSpec,
    pub lambda: Vec<i64>,
    #[serde(default = "spherical")]
    pub level: Level,
    #[serde(default = "closed")]
    pub variant: Variant,
}

fn spherical() -> Level {
    Level::Spherical
}

fn closed() -> Variant {
    Variant::Closed
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MvInput {
    pub datum: DatumSpec,
    pub lambda: Vec<i64>,
    pub mu: Vec<i64>,
    /// Finite Weyl word, 1-based; all of `W` when absent.
    #[serde(default)]
    pub w: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscInput {
    pub datum: DatumSpec,
    pub gamma: SplitGamma,
    #[serde(default)]
    pub lambda: Option<Vec<i64>>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum CellMethod {
    #[default]
    Invariant,
    Fast,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixInput {
    #[serde(default)]
    pub datum: Option<DatumSpec>,
    pub matrix: Vec<Vec<String>>,
    #[serde(default)]
    pub field: Option<String>,
    #[serde(default)]
    pub method: CellMethod,
}

impl MatrixInput {
    /// The datum and the matrix in its model; `GL_n` when no datum is given.
    pub fn build(&self, prec: i64) -> Result<(RootDatum, LoopMatrix)> {
        let n = self.matrix.len();
        let datum = match &self.datum {
            Some(d) => d.build()?,
            None => masf_core::loop_group::matrix_datum(n, MatrixGroup::GL)?,
        };
        let (m, group) = masf_core::loop_group::matrix_model(&datum)?;
        if m != n {
            return Err(Error::DimensionMismatch { expected: m, got: n });
        }
        let g = LoopMatrix::parse(&self.matrix, field_of(&self.field)?, Some(prec), group)?;
        Ok((datum, g))
    }
}

pub fn parse_square(rows: &[Vec<String>], n: usize, field: CoefficientField, prec: i64) -> Result<Vec<LaurentSeries>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: rows.len() });
    }
    rows.iter().flatten().map(|s| series(s, field, prec)).collect()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sl3Input {
    pub x: String,
    pub y: String,
    pub a1: Vec<Vec<String>>,
    pub a2: Vec<Vec<String>>,
    #[serde(default)]
    pub field: Option<String>,
}

impl Sl3Input {
    pub fn field(&self) -> Result<CoefficientField> {
        field_of(&self.field)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberInput {
    pub matrix: Vec<Vec<String>>,
    pub n: i64,
    #[serde(default)]
    pub field: Option<String>,
}

impl MemberInput {
    pub fn field(&self) -> Result<CoefficientField> {
        field_of(&self.field)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusInput {
    pub datum: DatumSpec,
    pub gamma: SplitGamma,
    pub lambda: Vec<i64>,
    #[serde(default = "spherical")]
    pub level: Level,
    #[serde(default = "closed")]
    pub variant: Variant,
    #[serde(default = "default_q")]
    pub q: u64,
    #[serde(default = "default_jet_level")]
    pub jet_level: u32,
    #[serde(default)]
    pub slack: Option<usize>,
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub companion: Option<u64>,
    #[serde(default = "yes")]
    pub estimate_dimension: bool,
    #[serde(default = "yes")]
    pub check_surjectivity: bool,
}

fn default_q() -> u64 {
    3
}

fn default_jet_level() -> u32 {
    3
}

fn yes() -> bool {
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flags_override_input() {
        let a: AdmInput = resolve(json!({"lambda": [2, 0], "datum": null}), Some(r#"{"datum": "GL2", "lambda": [1, 0]}"#)).unwrap();
        assert_eq!(a.lambda, vec![2, 0]);
        assert!(matches!(a.datum, DatumSpec::Preset(ref s) if s == "GL2"));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let r: Result<AdmInput> = resolve(json!({"datum": "GL2", "lambda": [1, 0], "lamda": [1]}), None);
        assert!(matches!(r, Err(Error::Parse(_))));
    }

    #[test]
    fn gamma_forms() {
        let g: GammaSpec = serde_json::from_value(json!({"mu": [1, 0], "units": ["1", "1"]})).unwrap();
        assert!(matches!(g, GammaSpec::Split(_)));
        let g: GammaSpec = serde_json::from_value(json!({"nu": ["1/2", "1/2"], "kappa": [1, 0], "d": 0, "c": 0})).unwrap();
        let d = RootDatum::preset("GL2").unwrap();
        let inv = g.invariants(&d, 16).unwrap();
        assert_eq!(inv.newton, vec![Rational::new(1, 2); 2]);
        let bad: std::result::Result<GammaSpec, _> = serde_json::from_value(json!({"mu": [1, 0]}));
        assert!(bad.is_err());
    }

    #[test]
    fn custom_datum_documents() {
        let d: DatumSpec = serde_json::from_value(json!({
            "rank": 1, "simple_roots": [[2]], "simple_coroots": [[1]], "pairing": [[1]]
        }))
        .unwrap();
        assert_eq!(d.build().unwrap().rank(), 1);
    }
}

//! JSON forms of problems, frameworks, and certificates.
//!
//! Rationals are written as strings ("3/7", "-2"); floats as JSON numbers. Either form is
//! accepted on input, and exact mode reads every number as a decimal rational.

use std::path::Path;

use facered::cones::{ConeDesc, Element, FaceRep};
use facered::facial::{CertStep, Certificate, ConicSystem, Mode, SingularityReport, Tolerances};
use facered::numerics::{format_rational, parse_rational, to_f64, Mat, Rational};
use facered::rigidity::{EdgeKind, Framework, Graph};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const ENGINE: &str = concat!("facered ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeJson {
    Exact,
    Float,
}

impl From<ModeJson> for Mode {
    fn from(m: ModeJson) -> Self {
        match m {
            ModeJson::Exact => Mode::Exact,
            ModeJson::Float => Mode::Float,
        }
    }
}

impl From<Mode> for ModeJson {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => ModeJson::Exact,
            Mode::Float => ModeJson::Float,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ConeJson {
    Orthant { n: usize },
    Psd { n: usize },
    Edm { n: usize },
    Product { parts: Vec<ConeJson> },
}

impl ConeJson {
    pub fn to_desc(&self) -> ConeDesc {
        match self {
            ConeJson::Orthant { n } => ConeDesc::Orthant(*n),
            ConeJson::Psd { n } => ConeDesc::Psd(*n),
            ConeJson::Edm { n } => ConeDesc::Edm(*n),
            ConeJson::Product { parts } => ConeDesc::Product(parts.iter().map(ConeJson::to_desc).collect()),
        }
    }

    pub fn from_desc(c: &ConeDesc) -> Result<Self, CliError> {
        Ok(match c {
            ConeDesc::Orthant(n) => ConeJson::Orthant { n: *n },
            ConeDesc::Psd(n) => ConeJson::Psd { n: *n },
            ConeDesc::Edm(n) => ConeJson::Edm { n: *n },
            ConeDesc::Product(parts) => ConeJson::Product { parts: parts.iter().map(ConeJson::from_desc).collect::<Result<_, _>>()? },
            ConeDesc::Fig1 => return Err(CliError::Parse("the non-exposed fixture cone has no file form".into())),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub cone: ConeJson,
    /// One entry per constraint: a vector for orthants, a list of rows for matrix cones,
    /// a list of parts for products.
    pub constraints: Vec<Value>,
    pub b: Vec<Value>,
    pub mode: ModeJson,
    /// A feasible point in the cone's coordinates; EDM blocks use reduced Gram form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_point: Option<Value>,
}

pub fn parse_number(v: &Value) -> Result<Rational, CliError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(CliError::Parse(format!("expected a number, found {other}"))),
    };
    parse_rational(&text).map_err(|e| CliError::Parse(e.to_string()))
}

fn parse_float(v: &Value) -> Result<f64, CliError> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| CliError::Parse(format!("number {n} out of range"))),
        _ => Ok(to_f64(&parse_number(v)?)),
    }
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, CliError> {
    v.as_array().ok_or_else(|| CliError::Parse(format!("{what}: expected an array, found {v}")))
}

fn parse_matrix(v: &Value) -> Result<Mat, CliError> {
    let rows = array(v, "matrix")?;
    let k = rows.len();
    let mut data = Vec::with_capacity(k * k);
    for row in rows {
        let row = array(row, "matrix row")?;
        if row.len() != k {
            return Err(CliError::Parse(format!("matrix row of length {} in a {k}×{k} matrix", row.len())));
        }
        for x in row {
            data.push(parse_float(x)?);
        }
    }
    Ok(Mat::from_vec(k, k, data))
}

fn matrix_value(m: &Mat) -> Value {
    Value::Array(m.to_rows().into_iter().map(|r| Value::Array(r.into_iter().map(float_value).collect())).collect())
}

fn float_value(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(x.to_string()))
}

pub fn rational_value(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

/// Read an element shaped by `cone`. Matrix blocks may have any order, since exposers of
/// EDM blocks live in reduced coordinates.
pub fn parse_element(cone: &ConeDesc, v: &Value, mode: Mode) -> Result<Element, CliError> {
    match cone {
        ConeDesc::Orthant(_) => {
            let xs = array(v, "vector")?;
            match mode {
                Mode::Exact => Ok(Element::Exact(xs.iter().map(parse_number).collect::<Result<_, _>>()?)),
                Mode::Float => Ok(Element::Vector(xs.iter().map(parse_float).collect::<Result<_, _>>()?)),
            }
        }
        ConeDesc::Psd(_) | ConeDesc::Edm(_) => Ok(Element::Matrix(parse_matrix(v)?)),
        ConeDesc::Product(parts) => {
            let xs = array(v, "product element")?;
            if xs.len() != parts.len() {
                return Err(CliError::Parse(format!("product element has {} parts, cone has {}", xs.len(), parts.len())));
            }
            Ok(Element::Product(parts.iter().zip(xs).map(|(c, x)| parse_element(c, x, mode)).collect::<Result<_, _>>()?))
        }
        ConeDesc::Fig1 => Err(CliError::Parse("the non-exposed fixture cone has no file form".into())),
    }
}

pub fn element_value(e: &Element) -> Value {
    match e {
        Element::Vector(v) => Value::Array(v.iter().map(|x| float_value(*x)).collect()),
        Element::Exact(v) => Value::Array(v.iter().map(rational_value).collect()),
        Element::Matrix(m) => matrix_value(m),
        Element::Product(parts) => Value::Array(parts.iter().map(element_value).collect()),
    }
}

impl ProblemFile {
    pub fn from_system(sys: &ConicSystem) -> Result<Self, CliError> {
        Ok(ProblemFile {
            cone: ConeJson::from_desc(&sys.cone)?,
            constraints: sys.constraints.iter().map(element_value).collect(),
            b: sys.b.iter().map(rational_value).collect(),
            mode: sys.mode.into(),
            known_point: sys.known_point.as_ref().map(element_value),
        })
    }

    /// Build and validate the system; `mode` overrides the file's mode.
    pub fn to_system(&self, mode: Option<Mode>) -> Result<ConicSystem, CliError> {
        let mode = mode.unwrap_or(self.mode.into());
        let cone = self.cone.to_desc();
        let constraints = self.constraints.iter().map(|c| parse_element(&cone, c, mode)).collect::<Result<_, _>>()?;
        let b = self.b.iter().map(parse_number).collect::<Result<_, _>>()?;
        let mut sys = ConicSystem::new(cone.clone(), constraints, b, mode)?;
        if let Some(x) = &self.known_point {
            if mode == Mode::Float {
                sys = sys.with_known_point(parse_element(&cone, x, mode)?)?;
            }
        }
        Ok(sys)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameworkFile {
    pub dim: usize,
    pub vertices: Vec<Vec<Value>>,
    pub edges: Vec<(usize, usize, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl FrameworkFile {
    pub fn from_framework(f: &Framework, seed: Option<u64>) -> Self {
        FrameworkFile {
            dim: f.dim,
            vertices: f.coords.iter().map(|p| p.iter().map(rational_value).collect()).collect(),
            edges: f.graph.edges.iter().zip(&f.graph.kinds).map(|(&(i, j), k)| (i, j, k.name().to_string())).collect(),
            seed,
            provenance: f.provenance.clone(),
        }
    }

    pub fn to_framework(&self) -> Result<Framework, CliError> {
        let edges = self
            .edges
            .iter()
            .map(|(i, j, k)| EdgeKind::parse(k).map(|k| (*i, *j, k)).ok_or_else(|| CliError::Parse(format!("unknown edge kind {k:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let graph = Graph::with_kinds(self.vertices.len(), &edges)?;
        let coords = self.vertices.iter().map(|p| p.iter().map(parse_number).collect::<Result<_, _>>()).collect::<Result<_, _>>()?;
        let mut f = Framework::new(graph, self.dim, coords)?;
        f.provenance = self.provenance.clone();
        Ok(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancesJson {
    pub aux: f64,
    pub exact_margin: f64,
    pub reconstruction: f64,
    pub orthogonality: f64,
}

impl From<Tolerances> for TolerancesJson {
    fn from(t: Tolerances) -> Self {
        TolerancesJson { aux: t.aux, exact_margin: t.exact_margin, reconstruction: t.reconstruction, orthogonality: t.orthogonality }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FaceJson {
    Orthant { n: usize, support: Vec<usize> },
    /// Orthonormal basis as `n` rows of `k` entries.
    Psd { n: usize, k: usize, basis: Vec<Vec<f64>> },
    Product { parts: Vec<FaceJson> },
}

impl FaceJson {
    pub fn from_face(f: &FaceRep) -> Result<Self, CliError> {
        Ok(match f {
            FaceRep::Orthant { n, support } => FaceJson::Orthant { n: *n, support: support.clone() },
            FaceRep::Psd { basis } => FaceJson::Psd { n: basis.rows(), k: basis.cols(), basis: basis.to_rows() },
            FaceRep::Product(parts) => FaceJson::Product { parts: parts.iter().map(FaceJson::from_face).collect::<Result<_, _>>()? },
            FaceRep::Fig1(_) => return Err(CliError::Parse("faces of the non-exposed fixture cone have no file form".into())),
        })
    }

    pub fn to_face(&self) -> Result<FaceRep, CliError> {
        Ok(match self {
            FaceJson::Orthant { n, support } => FaceRep::Orthant { n: *n, support: support.clone() },
            FaceJson::Psd { n, k, basis } => {
                if basis.len() != *n || basis.iter().any(|r| r.len() != *k) {
                    return Err(CliError::Parse(format!("face basis is not {n}×{k}")));
                }
                FaceRep::Psd { basis: Mat::from_vec(*n, *k, basis.concat()) }
            }
            FaceJson::Product { parts } => FaceRep::Product(parts.iter().map(FaceJson::to_face).collect::<Result<_, _>>()?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepJson {
    pub v: Vec<Value>,
    #[serde(rename = "Z")]
    pub z: Value,
    pub face_basis: FaceJson,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub engine: String,
    pub mode: ModeJson,
    pub sd: usize,
    pub tolerances: TolerancesJson,
    pub steps: Vec<StepJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl CertificateFile {
    pub fn from_report(report: &SingularityReport, mode: Mode) -> Result<Self, CliError> {
        let steps = report
            .certificate
            .steps
            .iter()
            .map(|s| {
                let v = match &s.v {
                    Element::Vector(v) => v.iter().map(|x| float_value(*x)).collect(),
                    Element::Exact(v) => v.iter().map(rational_value).collect(),
                    other => return Err(CliError::Parse(format!("multiplier is not a vector: {other:?}"))),
                };
                Ok(StepJson { v, z: element_value(&s.z), face_basis: FaceJson::from_face(&s.face)?, tol: s.tol })
            })
            .collect::<Result<_, CliError>>()?;
        Ok(CertificateFile {
            engine: ENGINE.to_string(),
            mode: mode.into(),
            sd: report.sd,
            tolerances: report.tolerances.into(),
            steps,
            witness: report.witness.as_ref().map(element_value),
        })
    }

    /// Certificate and witnesses, read against the cone of the paired problem.
    pub fn to_certificate(&self, cone: &ConeDesc) -> Result<(Certificate, Vec<Element>), CliError> {
        let mode: Mode = self.mode.into();
        let steps = self
            .steps
            .iter()
            .map(|s| {
                let v = match mode {
                    Mode::Exact => Element::Exact(s.v.iter().map(parse_number).collect::<Result<_, _>>()?),
                    Mode::Float => Element::Vector(s.v.iter().map(parse_float).collect::<Result<_, _>>()?),
                };
                Ok(CertStep { v, z: parse_element(cone, &s.z, mode)?, face: s.face_basis.to_face()?, tol: s.tol })
            })
            .collect::<Result<_, CliError>>()?;
        let witnesses = self.witness.iter().map(|w| parse_element(cone, w, mode)).collect::<Result<_, _>>()?;
        Ok((Certificate { steps }, witnesses))
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

//! JSON interchange format. Complex scalars are `[re, im]`, matrices are
//! row-major arrays of rows, and `dims` is authoritative over array shapes.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use mmsim_core::qcore::{CondProb, CpMap, Instrument, Multimeter, Povm};
use mmsim_core::supermap::{ClassicalRealization, GeneralRealization, Shape, Superchannel};
use mmsim_core::{CMat, C64};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Multimeter,
    Povm,
    Instrument,
    Superchannel,
    GeneralRealization,
    ClassicalRealization,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Multimeter => "multimeter",
            Kind::Povm => "povm",
            Kind::Instrument => "instrument",
            Kind::Superchannel => "superchannel",
            Kind::GeneralRealization => "general_realization",
            Kind::ClassicalRealization => "classical_realization",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactFile {
    pub kind: Kind,
    pub dims: BTreeMap<String, usize>,
    pub data: Value,
}

#[derive(Debug)]
pub enum LoadError {
    Io(String),
    Parse(String),
    /// Well-formed file whose content violates a domain invariant.
    Invalid(mmsim_core::Error),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Io(m) => write!(f, "I/O error: {m}"),
            LoadError::Parse(m) => write!(f, "parse error: {m}"),
            LoadError::Invalid(e) => write!(f, "invalid artifact: {e}"),
        }
    }
}

impl std::error::Error for LoadError {}

impl From<mmsim_core::Error> for LoadError {
    fn from(e: mmsim_core::Error) -> Self {
        LoadError::Invalid(e)
    }
}

type LoadResult<T> = std::result::Result<T, LoadError>;

#[derive(Debug, Clone)]
pub enum Artifact {
    Multimeter(Multimeter),
    Povm(Povm),
    Instrument(Instrument),
    Superchannel(Superchannel),
    GeneralRealization(GeneralRealization),
    ClassicalRealization(ClassicalRealization),
}

fn parse_err(what: &str) -> LoadError {
    LoadError::Parse(format!("expected {what}"))
}

fn shape_err(what: &str, expected: usize, got: usize) -> LoadError {
    LoadError::Invalid(mmsim_core::Error::Dimension(format!("{what}: expected {expected} entries, found {got}")))
}

fn array<'a>(v: &'a Value, what: &str, len: usize) -> LoadResult<&'a [Value]> {
    let arr = v.as_array().ok_or_else(|| parse_err(&format!("{what} to be an array")))?;
    if arr.len() != len {
        return Err(shape_err(what, len, arr.len()));
    }
    Ok(arr)
}

fn field<'a>(v: &'a Value, key: &str) -> LoadResult<&'a Value> {
    v.get(key).ok_or_else(|| LoadError::Parse(format!("missing field `{key}`")))
}

fn number(v: &Value, what: &str) -> LoadResult<f64> {
    v.as_f64().ok_or_else(|| parse_err(&format!("{what} to be a number")))
}

fn complex_value(z: C64) -> Value {
    json!([z.re, z.im])
}

fn parse_complex(v: &Value) -> LoadResult<C64> {
    let pair = array(v, "complex [re, im]", 2)?;
    Ok(C64::new(number(&pair[0], "real part")?, number(&pair[1], "imaginary part")?))
}

pub fn matrix_value(m: &CMat) -> Value {
    let n = m.dim();
    Value::Array((0..n).map(|i| Value::Array((0..n).map(|j| complex_value(m[(i, j)])).collect())).collect())
}

pub fn parse_matrix(v: &Value, dim: usize) -> LoadResult<CMat> {
    let rows = array(v, "matrix rows", dim)?;
    let mut data = Vec::with_capacity(dim * dim);
    for row in rows {
        for z in array(row, "matrix row", dim)? {
            data.push(parse_complex(z)?);
        }
    }
    Ok(CMat::from_vec(dim, data)?)
}

fn dims_of(pairs: &[(&str, usize)]) -> BTreeMap<String, usize> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn dim(dims: &BTreeMap<String, usize>, key: &str) -> LoadResult<usize> {
    dims.get(key).copied().ok_or_else(|| LoadError::Parse(format!("missing dimension `{key}`")))
}

fn shape_dims(dims: &BTreeMap<String, usize>) -> LoadResult<(Shape, Shape)> {
    Ok((
        Shape::new(dim(dims, "g")?, dim(dims, "k")?, dim(dims, "d")?),
        Shape::new(dim(dims, "r")?, dim(dims, "l")?, dim(dims, "n")?),
    ))
}

fn shape_pairs(a: Shape, b: Shape) -> Vec<(&'static str, usize)> {
    vec![("g", a.g), ("k", a.k), ("d", a.d), ("r", b.g), ("l", b.k), ("n", b.d)]
}

fn list<T>(v: &Value, what: &str, len: usize, f: impl Fn(&Value) -> LoadResult<T>) -> LoadResult<Vec<T>> {
    array(v, what, len)?.iter().map(f).collect()
}

pub fn povm_value(p: &Povm) -> Value {
    Value::Array(p.effects().iter().map(matrix_value).collect())
}

pub fn multimeter_value(m: &Multimeter) -> Value {
    Value::Array(m.povms().iter().map(povm_value).collect())
}

pub fn condprob_value(p: &CondProb) -> Value {
    json!({ "out": p.out(), "cond_shape": p.cond_shape(), "data": p.data() })
}

impl Artifact {
    pub fn kind(&self) -> Kind {
        match self {
            Artifact::Multimeter(_) => Kind::Multimeter,
            Artifact::Povm(_) => Kind::Povm,
            Artifact::Instrument(_) => Kind::Instrument,
            Artifact::Superchannel(_) => Kind::Superchannel,
            Artifact::GeneralRealization(_) => Kind::GeneralRealization,
            Artifact::ClassicalRealization(_) => Kind::ClassicalRealization,
        }
    }

    pub fn to_file(&self) -> ArtifactFile {
        let (dims, data) = match self {
            Artifact::Multimeter(m) => (dims_of(&[("g", m.g()), ("k", m.k()), ("d", m.d())]), multimeter_value(m)),
            Artifact::Povm(p) => (dims_of(&[("k", p.k()), ("d", p.d())]), povm_value(p)),
            Artifact::Instrument(ins) => (
                dims_of(&[("din", ins.din()), ("dout", ins.dout()), ("outcomes", ins.outcomes())]),
                Value::Array(ins.branches().iter().map(|b| matrix_value(b.choi())).collect()),
            ),
            Artifact::Superchannel(psi) => {
                (dims_of(&shape_pairs(psi.dims_in(), psi.dims_out())), matrix_value(psi.choi()))
            }
            Artifact::GeneralRealization(r) => {
                let mut pairs = shape_pairs(r.dims_in, r.dims_out);
                pairs.push(("s", r.s));
                let lambda: Vec<Value> = r
                    .lambda
                    .iter()
                    .map(|row| Value::Array(row.iter().map(|m| matrix_value(m.choi())).collect()))
                    .collect();
                let b: Vec<Value> = r
                    .b
                    .iter()
                    .map(|row| {
                        Value::Array(row.iter().map(|col| Value::Array(col.iter().map(povm_value).collect())).collect())
                    })
                    .collect();
                (dims_of(&pairs), json!({ "lambda": lambda, "b": b }))
            }
            Artifact::ClassicalRealization(r) => {
                let mut pairs = shape_pairs(r.dims_in, r.dims_out);
                pairs.push(("s", r.s));
                let lambda: Vec<Value> = r
                    .lambda
                    .iter()
                    .map(|ins| Value::Array(ins.branches().iter().map(|m| matrix_value(m.choi())).collect()))
                    .collect();
                (dims_of(&pairs), json!({ "lambda": lambda, "nu": r.nu.data() }))
            }
        };
        ArtifactFile { kind: self.kind(), dims, data }
    }

    pub fn from_file(f: &ArtifactFile) -> LoadResult<Self> {
        let dims = &f.dims;
        let data = &f.data;
        Ok(match f.kind {
            Kind::Povm => {
                let (k, d) = (dim(dims, "k")?, dim(dims, "d")?);
                Artifact::Povm(Povm::new(list(data, "effects", k, |e| parse_matrix(e, d))?)?)
            }
            Kind::Multimeter => {
                let (g, k, d) = (dim(dims, "g")?, dim(dims, "k")?, dim(dims, "d")?);
                let povms = list(data, "POVMs", g, |p| Ok(Povm::new(list(p, "effects", k, |e| parse_matrix(e, d))?)?))?;
                Artifact::Multimeter(Multimeter::new(povms)?)
            }
            Kind::Instrument => {
                let (din, dout, c) = (dim(dims, "din")?, dim(dims, "dout")?, dim(dims, "outcomes")?);
                let branches = list(data, "branches", c, |b| Ok(CpMap::new(din, dout, parse_matrix(b, din * dout)?)?))?;
                Artifact::Instrument(Instrument::new(branches)?)
            }
            Kind::Superchannel => {
                let (a, b) = shape_dims(dims)?;
                let (din, dout) = (a.choi_dim(), b.choi_dim());
                let map = CpMap::new_unchecked(din, dout, parse_matrix(data, din * dout)?)?;
                Artifact::Superchannel(Superchannel::new(a, b, map)?.verify()?)
            }
            Kind::GeneralRealization => {
                let (a, b) = shape_dims(dims)?;
                let s = dim(dims, "s")?;
                let lambda = list(field(data, "lambda")?, "lambda rows", b.g, |row| {
                    list(row, "lambda maps", a.g, |m| {
                        Ok(CpMap::new_unchecked(a.d * s, b.d, parse_matrix(m, a.d * s * b.d)?)?)
                    })
                })?;
                let povms = list(field(data, "b")?, "ancilla rows", b.g, |row| {
                    list(row, "ancilla settings", a.g, |col| {
                        list(col, "ancilla POVMs", a.k, |p| {
                            Ok(Povm::new_unchecked(list(p, "effects", b.k, |e| parse_matrix(e, s))?)?)
                        })
                    })
                })?;
                let r = GeneralRealization { s, dims_in: a, dims_out: b, lambda, b: povms };
                r.validate()?;
                Artifact::GeneralRealization(r)
            }
            Kind::ClassicalRealization => {
                let (a, b) = shape_dims(dims)?;
                let s = dim(dims, "s")?;
                let lambda = list(field(data, "lambda")?, "instruments", b.g, |ins| {
                    let branches = list(ins, "branches", a.g * s, |m| {
                        Ok(CpMap::new_unchecked(b.d, a.d, parse_matrix(m, a.d * b.d)?)?)
                    })?;
                    Ok(Instrument::new_unchecked(branches)?)
                })?;
                let len = b.k * a.k * a.g * b.g * s;
                let nu = list(field(data, "nu")?, "nu", len, |v| number(v, "probability"))?;
                let nu = CondProb::new(b.k, &[a.k, a.g, b.g, s], nu)?;
                let r = ClassicalRealization { s, dims_in: a, dims_out: b, lambda, nu };
                r.validate()?;
                Artifact::ClassicalRealization(r)
            }
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> LoadResult<Self> {
        let file: ArtifactFile = serde_json::from_str(text).map_err(|e| LoadError::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn read(path: &Path) -> LoadResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }
}

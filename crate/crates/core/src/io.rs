//! JSON files for spaces, elements and functionals.
//!
//! ```text
//! space:      { "ambient_dim": d, "representation": "diagonal" | "full",
//!               "basis": [...], "unit": null | [[re, im], ...] }
//! element:    { "level": n, "coeffs": [[re, im], ...] }
//!             { "level": n, "matrix": [[[re, im], ...], ...] }      (+ optional "X")
//! functional: { "space": "path/to/space.json", "values": [[re, im], ...] }
//! ```
//!
//! Diagonal basis entries are length-`d` lists; full ones are `d×d` matrices.
//! Element coefficients are indexed `i·n² + r·n + s` (basis element `i`,
//! matrix entry `(r, s)`). Malformed input fails with [`Error::Parse`]
//! carrying the JSON path of the offending field.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{serde_c64_vec, ComplexMatrix, C64};
use crate::space::{build_space, membership, LevelElement, OperatorSpace, Representation};

/// Residual tolerance (relative) when a matrix is resolved into coefficients.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

fn parse_value<T: DeserializeOwned>(value: serde_json::Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        Error::Parse {
            path: if inner == "." { prefix.to_string() } else { format!("{prefix}{inner}") },
            message: e.inner().to_string(),
        }
    })
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.into(),
        message: message.into(),
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    ambient_dim: usize,
    representation: Representation,
    basis: Vec<serde_json::Value>,
    #[serde(default, with = "opt_c64_vec")]
    unit: Option<Vec<C64>>,
}

mod opt_c64_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::linalg::C64;

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "crate::linalg::serde_c64_vec")] Vec<C64>);

    pub fn serialize<S: Serializer>(v: &Option<Vec<C64>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|x| Wrap(x.clone())).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<C64>>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

#[derive(Deserialize)]
struct DiagEntry(#[serde(with = "serde_c64_vec")] Vec<C64>);

pub fn parse_space(text: &str) -> Result<OperatorSpace> {
    let raw: RawSpace = parse(text)?;
    let d = raw.ambient_dim;
    if d == 0 {
        return Err(invalid("ambient_dim", "must be at least 1"));
    }
    if raw.basis.is_empty() {
        return Err(invalid("basis", "must not be empty"));
    }
    let mut basis = Vec::with_capacity(raw.basis.len());
    for (i, entry) in raw.basis.into_iter().enumerate() {
        let path = format!("basis[{i}]");
        let m = match raw.representation {
            Representation::Diagonal => {
                let DiagEntry(v) = parse_value(entry, &path)?;
                if v.len() != d {
                    return Err(invalid(path, format!("expected {d} diagonal entries, found {}", v.len())));
                }
                ComplexMatrix::from_diag(&v)
            }
            Representation::Full => {
                let m: ComplexMatrix = parse_value(entry, &path)?;
                if m.rows() != d || m.cols() != d {
                    return Err(invalid(path, format!("expected a {d}x{d} matrix, found {}x{}", m.rows(), m.cols())));
                }
                m
            }
        };
        basis.push(m);
    }
    build_space(basis, raw.unit).map_err(|e| match e {
        Error::InvalidUnit(msg) => invalid("unit", msg),
        other => other,
    })
}

pub fn load_space(path: &Path) -> Result<OperatorSpace> {
    parse_space(&read_text(path)?).map_err(|e| with_file(e, path))
}

/// Prefixes parse errors with the file name.
pub fn with_file(e: Error, path: &Path) -> Error {
    match e {
        Error::Parse { path: p, message } => Error::Parse {
            path: format!("{}:{p}", path.display()),
            message,
        },
        other => other,
    }
}

#[derive(Serialize)]
struct SpaceOut {
    ambient_dim: usize,
    representation: Representation,
    basis: Vec<serde_json::Value>,
    #[serde(with = "opt_c64_vec")]
    unit: Option<Vec<C64>>,
}

/// Serializes `space` in the space-file format.
pub fn space_to_json(space: &OperatorSpace) -> String {
    #[derive(Serialize)]
    struct Diag(#[serde(with = "serde_c64_vec")] Vec<C64>);
    let basis = space
        .basis()
        .iter()
        .map(|b| match space.representation() {
            Representation::Diagonal => serde_json::to_value(Diag(b.diagonal())),
            Representation::Full => serde_json::to_value(b),
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .expect("plain data serializes");
    let out = SpaceOut {
        ambient_dim: space.ambient_dim(),
        representation: space.representation(),
        basis,
        unit: space.unit_coeffs().map(|u| u.to_vec()),
    };
    serde_json::to_string_pretty(&out).expect("plain data serializes")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawElement {
    level: usize,
    #[serde(default, with = "opt_c64_vec")]
    coeffs: Option<Vec<C64>>,
    #[serde(default)]
    matrix: Option<ComplexMatrix>,
    #[serde(default, rename = "X")]
    x: Option<ComplexMatrix>,
}

/// An element file: the space part and, for unitized elements, `X`.
#[derive(Clone, Debug)]
pub struct ElementFile {
    pub element: LevelElement,
    pub x: Option<ComplexMatrix>,
}

pub fn parse_element(space: &OperatorSpace, text: &str) -> Result<ElementFile> {
    let raw: RawElement = parse(text)?;
    let n = raw.level;
    if n == 0 {
        return Err(invalid("level", "must be at least 1"));
    }
    let element = match (raw.coeffs, raw.matrix) {
        (Some(c), None) => {
            let want = n * n * space.dim();
            if c.len() != want {
                return Err(invalid("coeffs", format!("expected {want} coefficients, found {}", c.len())));
            }
            space.element(n, c)?
        }
        (None, Some(m)) => {
            let nd = n * space.ambient_dim();
            if m.rows() != nd || m.cols() != nd {
                return Err(invalid("matrix", format!("expected a {nd}x{nd} matrix, found {}x{}", m.rows(), m.cols())));
            }
            let c = membership(space, &m, n, MEMBERSHIP_TOL).map_err(|e| match e {
                Error::NotAMember { residual } => {
                    invalid("matrix", format!("not in the amplified space (residual {residual:.3e})"))
                }
                other => other,
            })?;
            space.element(n, c)?
        }
        (Some(_), Some(_)) => return Err(invalid("coeffs", "give either coeffs or matrix, not both")),
        (None, None) => return Err(invalid("coeffs", "missing: give coeffs or matrix")),
    };
    if let Some(x) = &raw.x {
        if x.rows() != n || x.cols() != n {
            return Err(invalid("X", format!("expected a {n}x{n} matrix, found {}x{}", x.rows(), x.cols())));
        }
    }
    Ok(ElementFile { element, x: raw.x })
}

pub fn load_element(space: &OperatorSpace, path: &Path) -> Result<ElementFile> {
    parse_element(space, &read_text(path)?).map_err(|e| with_file(e, path))
}

/// Serializes a level element in the coefficient form.
pub fn element_to_json(z: &LevelElement, x: Option<&ComplexMatrix>) -> String {
    #[derive(Serialize)]
    struct Out<'a> {
        level: usize,
        #[serde(with = "serde_c64_vec")]
        coeffs: Vec<C64>,
        #[serde(rename = "X", skip_serializing_if = "Option::is_none")]
        x: Option<&'a ComplexMatrix>,
    }
    serde_json::to_string_pretty(&Out {
        level: z.level(),
        coeffs: z.coeffs().to_vec(),
        x,
    })
    .expect("plain data serializes")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunctional {
    space: String,
    #[serde(with = "serde_c64_vec")]
    values: Vec<C64>,
}

/// A functional file with its space loaded; the space path is resolved
/// relative to the functional file.
#[derive(Clone, Debug)]
pub struct FunctionalFile {
    pub space_path: PathBuf,
    pub space: OperatorSpace,
    pub values: Vec<C64>,
}

pub fn load_functional(path: &Path) -> Result<FunctionalFile> {
    let raw: RawFunctional = parse(&read_text(path)?).map_err(|e| with_file(e, path))?;
    let space_path = path.parent().unwrap_or(Path::new(".")).join(&raw.space);
    let space = load_space(&space_path)?;
    if raw.values.len() != space.dim() {
        return Err(with_file(
            invalid("values", format!("expected {} values, found {}", space.dim(), raw.values.len())),
            path,
        ));
    }
    Ok(FunctionalFile {
        space_path,
        space,
        values: raw.values,
    })
}

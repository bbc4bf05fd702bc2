//! JSON input files: matrices, torus maps, groups, circle and annulus maps.

use serde::Deserialize;

use torus_orbit_core::mcg_algebra::IntMatrix2;
use torus_orbit_core::surfaces::{AnnulusMap, AnnulusTerm, BoundaryBehavior, CircleLift, CircleTerm};
use torus_orbit_core::torus_maps::{FourierMap, FourierTerm, GroupSpec, TorusMap};

#[derive(Debug, Clone, PartialEq)]
pub enum InputError {
    Io(String),
    Parse(String),
    Invalid(String),
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InputError::Io(m) => write!(f, "cannot read input: {m}"),
            InputError::Parse(m) => write!(f, "malformed input: {m}"),
            InputError::Invalid(m) => write!(f, "invalid input: {m}"),
        }
    }
}

impl std::error::Error for InputError {}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::Parse(e.to_string()))
}

pub fn matrix(rows: [[i64; 2]; 2]) -> Result<IntMatrix2, InputError> {
    IntMatrix2::from_rows(rows).map_err(|e| InputError::Invalid(e.to_string()))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatricesFile {
    pub generators: Vec<[[i64; 2]; 2]>,
}

pub fn read_matrices(text: &str) -> Result<Vec<IntMatrix2>, InputError> {
    let file: MatricesFile = parse(text)?;
    if file.generators.is_empty() {
        return Err(InputError::Invalid("no generators".into()));
    }
    file.generators.into_iter().map(matrix).collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDto {
    pub k: [i64; 2],
    #[serde(default)]
    pub cos: [f64; 2],
    #[serde(default)]
    pub sin: [f64; 2],
}

fn identity_rows() -> [[i64; 2]; 2] {
    [[1, 0], [0, 1]]
}

/// A lift as an expression tree.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MapDto {
    /// `A x + t + Σ c cos(2π k·x) + s sin(2π k·x)`.
    Fourier {
        #[serde(default = "identity_rows")]
        matrix: [[i64; 2]; 2],
        #[serde(default)]
        translation: [f64; 2],
        #[serde(default)]
        terms: Vec<TermDto>,
    },
    Translation {
        vector: [f64; 2],
    },
    /// `outer ∘ inner`.
    Compose {
        outer: Box<MapDto>,
        inner: Box<MapDto>,
    },
    Inverse {
        map: Box<MapDto>,
    },
    Power {
        map: Box<MapDto>,
        exponent: i64,
    },
}

impl MapDto {
    pub fn build(&self) -> Result<TorusMap, InputError> {
        Ok(match self {
            MapDto::Fourier { matrix: rows, translation, terms } => {
                let terms = terms
                    .iter()
                    .map(|t| FourierTerm { k: t.k, cos: t.cos, sin: t.sin })
                    .collect();
                FourierMap::new(matrix(*rows)?, *translation, terms)
                    .map_err(|e| InputError::Invalid(e.to_string()))?
                    .into()
            }
            MapDto::Translation { vector } => {
                if !vector.iter().all(|v| v.is_finite()) {
                    return Err(InputError::Invalid("non-finite translation".into()));
                }
                TorusMap::translation(*vector)
            }
            MapDto::Compose { outer, inner } => outer.build()?.compose(&inner.build()?),
            MapDto::Inverse { map } => map.build()?.inverse(),
            MapDto::Power { map, exponent } => map.build()?.power(*exponent),
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub map: MapDto,
}

pub fn read_map(text: &str) -> Result<TorusMap, InputError> {
    parse::<MapFile>(text)?.map.build()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDto {
    pub label: String,
    pub map: MapDto,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub generators: Vec<GeneratorDto>,
}

pub fn read_group(text: &str) -> Result<GroupSpec, InputError> {
    let file: GroupFile = parse(text)?;
    let generators = file
        .generators
        .iter()
        .map(|g| Ok((g.label.clone(), g.map.build()?)))
        .collect::<Result<Vec<_>, InputError>>()?;
    GroupSpec::new(generators).map_err(|e| InputError::Invalid(e.to_string()))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleTermDto {
    pub k: u32,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleFile {
    pub degree: i8,
    #[serde(default)]
    pub translation: f64,
    #[serde(default)]
    pub terms: Vec<CircleTermDto>,
}

pub fn read_circle(text: &str) -> Result<CircleLift, InputError> {
    let file: CircleFile = parse(text)?;
    let terms = file
        .terms
        .iter()
        .map(|t| CircleTerm { k: t.k, cos: t.cos, sin: t.sin })
        .collect();
    CircleLift::new(file.degree, file.translation, terms).map_err(|e| InputError::Invalid(e.to_string()))
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryDto {
    Preserves,
    Swaps,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnulusTermDto {
    pub kx: i64,
    #[serde(default)]
    pub ky: f64,
    #[serde(default)]
    pub cos: [f64; 2],
    #[serde(default)]
    pub sin: [f64; 2],
}

/// `(x, y) ↦ [[x_sign, shear], [0, y_scale]] (x, y) + translation + Σ terms`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnulusFile {
    pub x_sign: i8,
    #[serde(default)]
    pub shear: f64,
    pub y_scale: f64,
    #[serde(default)]
    pub translation: [f64; 2],
    #[serde(default)]
    pub terms: Vec<AnnulusTermDto>,
    pub boundary: BoundaryDto,
}

pub fn read_annulus(text: &str) -> Result<AnnulusMap, InputError> {
    let file: AnnulusFile = parse(text)?;
    let terms = file
        .terms
        .iter()
        .map(|t| AnnulusTerm { kx: t.kx, ky: t.ky, cos: t.cos, sin: t.sin })
        .collect();
    let boundary = match file.boundary {
        BoundaryDto::Preserves => BoundaryBehavior::PreservesComponents,
        BoundaryDto::Swaps => BoundaryBehavior::SwapsComponents,
    };
    AnnulusMap::new(file.x_sign, file.shear, file.y_scale, file.translation, terms, boundary)
        .map_err(|e| InputError::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_maps() {
        let text = r#"{"map": {"type": "compose",
            "outer": {"type": "fourier", "matrix": [[-1, 0], [0, -1]]},
            "inner": {"type": "power", "exponent": 2, "map": {"type": "translation", "vector": [0.25, 0]}}}}"#;
        let f = read_map(text).unwrap();
        assert_eq!(f.class(), IntMatrix2::MINUS_IDENTITY);
        let y = f.evaluate([0.0, 0.0]).unwrap();
        assert!((y[0] + 0.5).abs() < 1e-15 && y[1] == 0.0);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(read_map("{"), Err(InputError::Parse(_))));
        assert!(matches!(read_map(r#"{"map": {"type": "shear"}}"#), Err(InputError::Parse(_))));
        assert!(matches!(
            read_map(r#"{"map": {"type": "fourier", "matrix": [[2, 0], [0, 1]]}}"#),
            Err(InputError::Invalid(_))
        ));
        assert!(matches!(read_matrices(r#"{"generators": []}"#), Err(InputError::Invalid(_))));
        assert!(matches!(read_circle(r#"{"degree": 2}"#), Err(InputError::Invalid(_))));
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        let text = r#"{"generators": [
            {"label": "a", "map": {"type": "translation", "vector": [0.5, 0]}},
            {"label": "a", "map": {"type": "translation", "vector": [0, 0.5]}}]}"#;
        assert!(matches!(read_group(text), Err(InputError::Invalid(_))));
    }

    #[test]
    fn annulus_file() {
        let text = r#"{"x_sign": -1, "y_scale": -1, "translation": [0, 1], "boundary": "swaps"}"#;
        let f = read_annulus(text).unwrap();
        assert_eq!(f.boundary(), BoundaryBehavior::SwapsComponents);
    }
}

//! Polytope JSON and point-set CSV readers.

use std::path::Path;

use polylab_core::geometry::validate_polytope;
use polylab_core::{Error, LatticeSet, Point, Polytope};
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Deserialize)]
struct PolytopeFile {
    name: Option<String>,
    dim: usize,
    vertices: Vec<Value>,
}

/// A parsed polytope with its display name and raw bytes (for hashing).
pub struct LoadedPolytope {
    pub name: String,
    pub polytope: Polytope,
    pub bytes: Vec<u8>,
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))
}

pub fn load_polytope(path: &Path) -> Result<LoadedPolytope, CliError> {
    let bytes = read_bytes(path)?;
    let fallback = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let (name, polytope) = parse_polytope(&bytes, &fallback)?;
    Ok(LoadedPolytope { name, polytope, bytes })
}

pub fn parse_polytope(bytes: &[u8], fallback_name: &str) -> Result<(String, Polytope), CliError> {
    let file: PolytopeFile =
        serde_json::from_slice(bytes).map_err(|e| CliError::Parse(format!("polytope JSON: {e}")))?;
    let mut vertices = Vec::with_capacity(file.vertices.len());
    for (index, v) in file.vertices.iter().enumerate() {
        let coords = v.as_array().ok_or_else(|| {
            CliError::Core(Error::InvalidInput(format!("vertex {index} is not a coordinate array")))
        })?;
        if coords.len() != file.dim {
            return Err(CliError::Core(Error::InvalidInput(format!(
                "vertex {index} has {} coordinates, expected {}",
                coords.len(),
                file.dim
            ))));
        }
        let mut point = Vec::with_capacity(coords.len());
        for c in coords {
            match c.as_i64() {
                Some(x) => point.push(x),
                None if c.is_number() => return Err(CliError::Core(Error::NonIntegerVertex { index })),
                None => {
                    return Err(CliError::Core(Error::InvalidInput(format!(
                        "vertex {index} has a non-numeric coordinate"
                    ))))
                }
            }
        }
        vertices.push(Point(point));
    }
    let polytope = validate_polytope(file.dim, vertices)?;
    Ok((file.name.unwrap_or_else(|| fallback_name.to_string()), polytope))
}

/// One point per line, comma-separated integers. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_point_set(text: &str) -> Result<LatticeSet, CliError> {
    let mut dim = None;
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let coords = line
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Parse(format!("line {}: {e}", lineno + 1)))?;
        match dim {
            None => dim = Some(coords.len()),
            Some(d) if d != coords.len() => {
                return Err(CliError::Parse(format!(
                    "line {}: expected {d} coordinates, found {}",
                    lineno + 1,
                    coords.len()
                )))
            }
            _ => {}
        }
        points.push(Point(coords));
    }
    let dim = dim.ok_or(CliError::Core(Error::EmptySet))?;
    Ok(LatticeSet::from_points(dim, points))
}

//! Input files: side lengths, and polygons given by vertices or by lengths
//! and turn angles.

use std::path::Path;

use polylink::energy::manifold_tolerance;
use polylink::geometry::vertices_from_turn_angles;
use polylink::{PolygonChain, SideLengths, TurnAngles, Vec2};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LengthsFile {
    lengths: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolygonFile {
    vertices: Option<Vec<[f64; 2]>>,
    lengths: Option<Vec<f64>>,
    turn_angles: Option<Vec<f64>>,
}

/// A polygon read from a file, with the closure defect of the angle form.
pub struct PolygonInput {
    pub chain: PolygonChain,
    pub closure_defect: f64,
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, String> {
    serde_json::from_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn read_lengths(path: &Path) -> Result<SideLengths, String> {
    let file: LengthsFile = parse(path)?;
    SideLengths::new(file.lengths).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn read_polygon(path: &Path) -> Result<PolygonInput, String> {
    let file: PolygonFile = parse(path)?;
    let context = |e: polylink::Error| format!("{}: {e}", path.display());
    match (file.vertices, file.lengths, file.turn_angles) {
        (Some(v), None, None) => {
            Ok(PolygonInput { chain: PolygonChain::from_xy(&v).map_err(context)?, closure_defect: 0.0 })
        }
        (None, Some(l), Some(t)) => {
            let lengths = SideLengths::new(l).map_err(context)?;
            let rec = vertices_from_turn_angles(&lengths, &TurnAngles(t)).map_err(context)?;
            let limit = manifold_tolerance(&lengths);
            if rec.closure_defect > limit {
                return Err(format!(
                    "{}: turn angles leave a closure defect of {:e} (limit {:e})",
                    path.display(),
                    rec.closure_defect,
                    limit
                ));
            }
            let mut v = rec.chain.vertices().to_vec();
            let last = v.len() - 1;
            v[last] = Vec2::zeros();
            Ok(PolygonInput { chain: PolygonChain::new(v).map_err(context)?, closure_defect: rec.closure_defect })
        }
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            Err(format!("{}: give either vertices or lengths with turn_angles, not both", path.display()))
        }
        _ => Err(format!("{}: expected vertices, or lengths with turn_angles", path.display())),
    }
}

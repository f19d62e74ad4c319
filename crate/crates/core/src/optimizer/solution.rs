use super::mip::{ModelInstance, Var};
use crate::error::{Error, Result};
use crate::partition::{Partition, Provenance, ProvenanceKind};

/// Values within this distance of 0 or 1 are rounded.
pub const BINARY_TOLERANCE: f64 = 1e-6;

/// Reads a solver solution (`name value` per line, `#` comments) and rebuilds
/// the partition from its `x` variables. Variables absent from the file are
/// taken as 0. Lines ending in `:` before the value (solver banners such as
/// `objective value: 2`) are skipped.
pub fn import_solution(model: &ModelInstance, solution: &str) -> Result<Partition> {
    let width = model.width();
    let mut x = vec![0u8; 256 * width];
    for (i, raw) in solution.lines().enumerate() {
        let line = i + 1;
        let err = |reason: String| Error::SolutionFormat { line, reason };
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.iter().any(|t| t.ends_with(':')) {
            continue;
        }
        let [name, value] = tokens[..] else {
            return Err(err(format!("expected `name value`, got {text:?}")));
        };
        let var = model
            .var_by_name(name)
            .ok_or_else(|| err(format!("unknown variable {name:?}")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| err(format!("bad value {value:?}")))?;
        let rounded = if (value - 0.0).abs() <= BINARY_TOLERANCE {
            0
        } else if (value - 1.0).abs() <= BINARY_TOLERANCE {
            1
        } else {
            return Err(err(format!("{name} = {value} is not binary")));
        };
        if let Var::X { byte, bin } = var {
            x[byte as usize * width + bin] = rounded;
        }
    }

    let mut bins = [0usize; 256];
    for &byte in model.alphabet().bytes() {
        let row = &x[byte as usize * width..(byte as usize + 1) * width];
        let ones: Vec<usize> = row
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 1)
            .map(|(j, _)| j)
            .collect();
        match ones[..] {
            [bin] => bins[byte as usize] = bin,
            [] => {
                return Err(Error::InfeasibleSolution(format!(
                    "byte {byte} is assigned to no bin"
                )))
            }
            _ => {
                return Err(Error::InfeasibleSolution(format!(
                    "byte {byte} is assigned to bins {ones:?}"
                )))
            }
        }
    }
    Partition::from_fn(
        model.alphabet().clone(),
        width,
        Provenance::new(ProvenanceKind::Imported),
        |b| bins[b as usize],
    )
}

//! JSON algebra file format.
//!
//! ```json
//! {
//!   "name": "example",
//!   "dim": 2,
//!   "identity": [1.0, 0.0],
//!   "structure": [[0, 0, 0, 1.0], [1, 0, 1, 1.0]],
//!   "trace_form": [[1.0, 0.0], [0.0, 1.0]]
//! }
//! ```
//!
//! `structure` holds sparse `[k, i, j, value]` triples; entries with `i ≤ j`
//! imply the symmetric `(k, j, i)` slot. The loader rejects entries that
//! violate symmetry after expansion, duplicate and out-of-range indices, and
//! unknown keys.

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use super::AlgebraSpec;
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    name: String,
    dim: usize,
    identity: Vec<f64>,
    structure: Vec<(usize, usize, usize, f64)>,
    #[serde(default)]
    trace_form: Option<Vec<Vec<f64>>>,
}

/// Parses an algebra from its JSON description.
pub fn algebra_from_json(text: &str) -> Result<AlgebraSpec> {
    let file: AlgebraFile = serde_json::from_str(text)?;
    let dim = file.dim;
    if dim == 0 {
        return Err(Error::InvalidParameter("dim must be positive".into()));
    }
    if file.identity.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: file.identity.len() });
    }
    let mut structure: Vec<DMatrix<f64>> = vec![DMatrix::zeros(dim, dim); dim];
    let mut assigned = vec![DMatrix::from_element(dim, dim, false); dim];
    for &(k, i, j, v) in &file.structure {
        if k >= dim || i >= dim || j >= dim {
            return Err(Error::InvalidParameter(format!("structure index ({k},{i},{j}) out of range for dim {dim}")));
        }
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite structure value at ({k},{i},{j})")));
        }
        for (r, c) in [(i, j), (j, i)] {
            if assigned[k][(r, c)] && (structure[k][(r, c)] - v).abs() > 1e-12 * (1.0 + v.abs()) {
                return Err(Error::AsymmetricStructure {
                    k,
                    i: r,
                    j: c,
                    delta: (structure[k][(r, c)] - v).abs(),
                });
            }
            structure[k][(r, c)] = v;
            assigned[k][(r, c)] = true;
        }
    }
    let trace_form = match file.trace_form {
        Some(rows) => {
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(Error::DimensionMismatch { expected: dim, got: rows.len() });
            }
            Some(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
        }
        None => None,
    };
    AlgebraSpec::new(file.name, structure, DVector::from_vec(file.identity), trace_form)
}

/// Loads an algebra description from a file path.
pub fn algebra_from_path(path: &std::path::Path) -> Result<AlgebraSpec> {
    algebra_from_json(&std::fs::read_to_string(path)?)
}

/// The half-plane algebra (dual numbers): squares fill a half-plane, so the
/// order-unit seminorm has a nontrivial kernel. Test fixture.
#[cfg(test)]
pub(crate) fn dual_numbers_json() -> &'static str {
    r#"{"name":"dual_numbers","dim":2,"identity":[1.0,0.0],
        "structure":[[0,0,0,1.0],[1,0,1,1.0]],
        "trace_form":[[1.0,0.0],[0.0,1.0]]}"#
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_abelian_two() {
        let a = algebra_from_json(
            r#"{"name":"ab2","dim":2,"identity":[1.0,1.0],
                "structure":[[0,0,0,1.0],[1,1,1,1.0]]}"#,
        )
        .unwrap();
        assert_eq!(a.dim(), 2);
        let x = DVector::from_vec(vec![2.0, 3.0]);
        let p = a.product(&x, &x).unwrap();
        assert_eq!((p[0], p[1]), (4.0, 9.0));
    }

    #[test]
    fn rejects_symmetry_violation() {
        let err = algebra_from_json(
            r#"{"name":"bad","dim":2,"identity":[1.0,1.0],
                "structure":[[0,0,0,1.0],[1,1,1,1.0],[0,0,1,0.5],[0,1,0,0.25]]}"#,
        );
        assert!(matches!(err, Err(Error::AsymmetricStructure { .. })), "{err:?}");
    }

    #[test]
    fn rejects_unknown_keys() {
        let err = algebra_from_json(
            r#"{"name":"x","dim":1,"identity":[1.0],"structure":[[0,0,0,1.0]],"extra":true}"#,
        );
        assert!(matches!(err, Err(Error::Json(_))));
    }

    #[test]
    fn rejects_out_of_range_index() {
        let err = algebra_from_json(
            r#"{"name":"x","dim":1,"identity":[1.0],"structure":[[0,0,2,1.0]]}"#,
        );
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn loads_degenerate_fixture() {
        let a = algebra_from_json(dual_numbers_json()).unwrap();
        let x = DVector::from_vec(vec![0.0, 1.0]);
        let sq = a.product(&x, &x).unwrap();
        assert!(a.tau_norm(&sq) < 1e-14, "nilpotent square");
    }
}

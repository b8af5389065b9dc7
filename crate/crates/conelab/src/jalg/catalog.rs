//! Catalog of standard Euclidean Jordan algebras.
//!
//! Matrix algebras are realised over an orthonormal real basis of the
//! hermitian part (inner product `Re tr(XY)`) with product `(XY + YX)/2`;
//! the quaternionic case embeds into `2n × 2n` complex matrices.

use nalgebra::{Complex, DMatrix, DVector};

use super::{AlgebraSpec, Element};
use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex<f64>>;

/// Hermitian-matrix realisation of a catalog algebra: coordinates correspond
/// to an orthonormal basis (under `Re tr(XY)`) of a real subspace of complex
/// hermitian matrices closed under the symmetrised product.
#[derive(Debug, Clone)]
pub struct MatrixBasis {
    /// Matrix side length.
    pub n: usize,
    pub mats: Vec<CMat>,
}

impl MatrixBasis {
    pub fn dim(&self) -> usize {
        self.mats.len()
    }

    pub fn from_coords(&self, x: &Element) -> CMat {
        let mut m = CMat::zeros(self.n, self.n);
        for (c, b) in x.iter().zip(&self.mats) {
            m += b * Complex::new(*c, 0.0);
        }
        m
    }

    pub fn to_coords(&self, m: &CMat) -> Element {
        DVector::from_fn(self.mats.len(), |k, _| {
            (self.mats[k].adjoint() * m).trace().re
        })
    }
}

fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = Complex::new(1.0, 0.0);
    m
}

fn sym_basis(n: usize) -> MatrixBasis {
    let mut mats = Vec::new();
    for i in 0..n {
        mats.push(unit(n, i, i));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            mats.push((unit(n, i, j) + unit(n, j, i)) * Complex::new(s, 0.0));
        }
    }
    MatrixBasis { n, mats }
}

fn herm_basis(n: usize) -> MatrixBasis {
    let mut mats = sym_basis(n).mats;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            mats.push((unit(n, i, j) - unit(n, j, i)) * Complex::new(0.0, s));
        }
    }
    MatrixBasis { n, mats }
}

/// Basis of hermitian quaternionic matrices embedded in `M_{2n}(C)` via the
/// block form `[[A, B], [-conj(B), conj(A)]]` with `A` hermitian and `B`
/// complex antisymmetric.
fn quat_basis(n: usize) -> MatrixBasis {
    let two_n = 2 * n;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut mats = Vec::new();
    for h in herm_basis(n).mats {
        let mut m = CMat::zeros(two_n, two_n);
        m.view_mut((0, 0), (n, n)).copy_from(&h);
        m.view_mut((n, n), (n, n)).copy_from(&h.map(|z| z.conj()));
        mats.push(m * Complex::new(s, 0.0));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for phase in [Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)] {
                let b = (unit(n, i, j) - unit(n, j, i)) * phase * Complex::new(s, 0.0);
                let mut m = CMat::zeros(two_n, two_n);
                m.view_mut((0, n), (n, n)).copy_from(&b);
                m.view_mut((n, 0), (n, n)).copy_from(&(b.map(|z| z.conj()) * Complex::new(-1.0, 0.0)));
                mats.push(m * Complex::new(s, 0.0));
            }
        }
    }
    MatrixBasis { n: two_n, mats }
}

fn spec_from_matrix_basis(name: String, basis: &MatrixBasis) -> AlgebraSpec {
    let dim = basis.dim();
    let mut structure = vec![DMatrix::zeros(dim, dim); dim];
    for i in 0..dim {
        for j in i..dim {
            let p = (&basis.mats[i] * &basis.mats[j] + &basis.mats[j] * &basis.mats[i])
                * Complex::new(0.5, 0.0);
            let coords = basis.to_coords(&p);
            for (k, slice) in structure.iter_mut().enumerate() {
                slice[(i, j)] = coords[k];
                slice[(j, i)] = coords[k];
            }
        }
    }
    let eye = CMat::identity(basis.n, basis.n);
    let identity = basis.to_coords(&eye);
    AlgebraSpec::new(name, structure, identity, None).expect("catalog algebra must be valid")
}

/// Real symmetric `n × n` matrices, dimension `n(n+1)/2`.
pub fn sym_real(n: usize) -> AlgebraSpec {
    assert!(n >= 1, "sym_real requires n >= 1");
    spec_from_matrix_basis(format!("sym_real({n})"), &sym_basis(n))
}

/// Complex hermitian `n × n` matrices, dimension `n²`.
pub fn herm_complex(n: usize) -> AlgebraSpec {
    assert!(n >= 1, "herm_complex requires n >= 1");
    spec_from_matrix_basis(format!("herm_complex({n})"), &herm_basis(n))
}

/// Quaternionic hermitian `n × n` matrices, dimension `n(2n−1)`.
pub fn herm_quat(n: usize) -> AlgebraSpec {
    assert!(n >= 1, "herm_quat requires n >= 1");
    spec_from_matrix_basis(format!("herm_quat({n})"), &quat_basis(n))
}

/// Spin factor `R ⊕ R^k` with `(s,u)∘(t,v) = (st + ⟨u,v⟩, sv + tu)`,
/// dimension `k + 1`.
pub fn spin_factor(k: usize) -> AlgebraSpec {
    assert!(k >= 1, "spin_factor requires k >= 1");
    let dim = k + 1;
    let mut structure = vec![DMatrix::zeros(dim, dim); dim];
    structure[0] = DMatrix::identity(dim, dim);
    for m in 1..dim {
        structure[m][(0, m)] = 1.0;
        structure[m][(m, 0)] = 1.0;
    }
    let mut e = DVector::zeros(dim);
    e[0] = 1.0;
    AlgebraSpec::new(format!("spin_factor({k})"), structure, e, None).expect("spin factor must be valid")
}

/// Componentwise product on `R^n`.
pub fn abelian(n: usize) -> AlgebraSpec {
    assert!(n >= 1, "abelian requires n >= 1");
    let mut structure = vec![DMatrix::zeros(n, n); n];
    for k in 0..n {
        structure[k][(k, k)] = 1.0;
    }
    AlgebraSpec::new(format!("abelian({n})"), structure, DVector::repeat(n, 1.0), None)
        .expect("abelian algebra must be valid")
}

/// Direct sum with blockwise product and trace form.
pub fn direct_sum(a: &AlgebraSpec, b: &AlgebraSpec) -> Result<AlgebraSpec> {
    let (da, db) = (a.dim(), b.dim());
    let dim = da + db;
    let mut structure = vec![DMatrix::zeros(dim, dim); dim];
    for (slice, src) in structure.iter_mut().zip(a.structure()) {
        slice.view_mut((0, 0), (da, da)).copy_from(src);
    }
    for k in 0..db {
        structure[da + k].view_mut((da, da), (db, db)).copy_from(&b.structure()[k]);
    }
    let mut identity = DVector::zeros(dim);
    identity.rows_mut(0, da).copy_from(a.identity());
    identity.rows_mut(da, db).copy_from(b.identity());
    let mut gram = DMatrix::zeros(dim, dim);
    gram.view_mut((0, 0), (da, da)).copy_from(a.trace_form());
    gram.view_mut((da, da), (db, db)).copy_from(b.trace_form());
    AlgebraSpec::new(format!("direct_sum({},{})", a.name(), b.name()), structure, identity, Some(gram))
}

/// Looks up a catalog algebra by name and size parameter.
pub fn by_name(name: &str, param: usize) -> Result<AlgebraSpec> {
    if param == 0 {
        return Err(Error::InvalidParameter(format!("catalog `{name}` requires a positive size parameter")));
    }
    match name {
        "sym_real" | "sym" => Ok(sym_real(param)),
        "herm_complex" | "herm" => Ok(herm_complex(param)),
        "herm_quat" | "quat" => Ok(herm_quat(param)),
        "spin_factor" | "spin" => Ok(spin_factor(param)),
        "abelian" => Ok(abelian(param)),
        _ => Err(Error::UnknownCatalog { name: name.to_string() }),
    }
}

/// Recovers the hermitian-matrix realisation of a matrix-catalog algebra from
/// its name (`sym_real(n)`, `herm_complex(n)`, `herm_quat(n)`). Construction is
/// deterministic, so the returned basis reproduces the algebra's structure
/// constants exactly.
pub fn matrix_basis(name: &str) -> Option<MatrixBasis> {
    let (kind, rest) = name.split_once('(')?;
    let n: usize = rest.strip_suffix(')')?.parse().ok()?;
    if n == 0 {
        return None;
    }
    match kind {
        "sym_real" => Some(sym_basis(n)),
        "herm_complex" => Some(herm_basis(n)),
        "herm_quat" => Some(quat_basis(n)),
        _ => None,
    }
}

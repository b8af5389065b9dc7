//! Derivation algebras and orientations.
//!
//! An orientation is a linear map `J : V → aut V` with
//! `J(J(a)(b)) = [L_b, L_a]`; it encodes the Lie half of a C*-product on top
//! of the Jordan half. This module computes the derivation algebra as a
//! kernel problem, verifies candidate orientations, produces the canonical
//! commutator orientation on complex hermitian matrix algebras, extends cone
//! maps additively, and transports orientations between base points.

mod solver;

pub use solver::{solve_orientation, SolveOptions, SolveOutcome};

use nalgebra::{Complex, DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, tau_frobenius_inner};
use crate::jalg::{catalog, AlgebraSpec, Element};
use crate::linalg;
use crate::order::{self, Positivity};

/// Basis of the Lie algebra `aut V` of derivations, orthonormal under the
/// trace-form Frobenius pairing.
#[derive(Debug, Clone)]
pub struct DerivationSpace {
    pub basis: Vec<DMatrix<f64>>,
    /// Relative singular-value threshold used for the kernel cut.
    pub tolerance: f64,
    /// Max Leibniz residual of the returned basis over algebra basis pairs.
    pub leibniz_residual: f64,
    /// Max `‖D e‖` over the basis.
    pub identity_residual: f64,
    /// Ratio of the smallest kept to the largest dropped singular value.
    pub kernel_gap: f64,
    /// Kernel gap below 10 makes the dimension verdict ambiguous.
    pub ambiguous: bool,
    /// Cone-preservation failures of `exp(tD)` on sampled interior points.
    pub cone_failures: usize,
}

impl DerivationSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_hash(&self) -> u64 {
        linalg::fnv1a_f64(self.basis.iter().flat_map(|m| m.iter().cloned()))
    }

    /// Relative defect of projecting `m` onto the derivation span.
    pub fn projection_defect(&self, a: &AlgebraSpec, m: &DMatrix<f64>) -> f64 {
        geom::span_projection_defect(a, &self.basis, m)
    }

    /// Coefficients of `m` over the orthonormal basis.
    pub fn project_coeffs(&self, a: &AlgebraSpec, m: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_fn(self.basis.len(), |k, _| tau_frobenius_inner(a, &self.basis[k], m))
    }
}

/// Computes `aut V` as the kernel of the stacked Leibniz system
/// `D(b_i ∘ b_j) = D(b_i) ∘ b_j + b_i ∘ D(b_j)` via SVD.
pub fn derivation_space(a: &AlgebraSpec) -> Result<DerivationSpace> {
    let dim = a.dim();
    let tolerance = 1e-10;
    let basis_vecs: Vec<Element> = (0..dim)
        .map(|i| {
            let mut b = DVector::zeros(dim);
            b[i] = 1.0;
            b
        })
        .collect();
    let l_ops: Vec<DMatrix<f64>> = basis_vecs.iter().map(|b| a.l_operator(b).unwrap()).collect();

    let pairs: Vec<(usize, usize)> = (0..dim).flat_map(|i| (i..dim).map(move |j| (i, j))).collect();
    let mut system = DMatrix::zeros(pairs.len() * dim, dim * dim);
    for (pi, &(i, j)) in pairs.iter().enumerate() {
        let c_ij = a.product(&basis_vecs[i], &basis_vecs[j])?;
        for r in 0..dim {
            let row = pi * dim + r;
            // D(c_ij) term: coefficient of D[(r, q)] is c_ij[q].
            for (q, c) in c_ij.iter().enumerate() {
                system[(row, r * dim + q)] += c;
            }
            // −L_{b_i} D b_j and −L_{b_j} D b_i terms.
            for p in 0..dim {
                let li = l_ops[i][(r, p)];
                let lj = l_ops[j][(r, p)];
                for q in 0..dim {
                    // column index for D[(p, q)]; basis vectors are coordinate
                    // units, so b_j[q] = δ_jq
                    let col = p * dim + q;
                    let bj = if q == j { 1.0 } else { 0.0 };
                    let bi = if q == i { 1.0 } else { 0.0 };
                    system[(row, col)] -= li * bj + lj * bi;
                }
            }
        }
    }
    let (kernel, kernel_gap) = linalg::svd_kernel(&system, tolerance);
    let mut mats: Vec<DMatrix<f64>> = kernel
        .iter()
        .map(|v| DMatrix::from_fn(dim, dim, |r, c| v[r * dim + c]))
        .collect();

    // Orthonormalize under the τ-Frobenius pairing.
    let mut ortho: Vec<DMatrix<f64>> = Vec::new();
    for m in mats.drain(..) {
        let mut w = m;
        for b in &ortho {
            let c = tau_frobenius_inner(a, b, &w);
            w -= b * c;
        }
        for b in &ortho {
            let c = tau_frobenius_inner(a, b, &w);
            w -= b * c;
        }
        let n = a.op_frobenius(&w);
        if n > 1e-10 {
            ortho.push(w / n);
        }
    }

    // Residual diagnostics and the exp(tD) cross-check.
    let mut leibniz_residual = 0.0_f64;
    let mut identity_residual = 0.0_f64;
    let mut cone_failures = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(0xDE5);
    let samples: Vec<Element> =
        (0..8).map(|_| geom::sample_interior(a, &mut rng, 0.5)).collect::<Result<_>>()?;
    for d_mat in &ortho {
        for (i, bi) in basis_vecs.iter().enumerate() {
            for bj in basis_vecs.iter().skip(i) {
                let lhs = d_mat * a.product(bi, bj)?;
                let rhs = a.product(&(d_mat * bi), bj)? + a.product(bi, &(d_mat * bj))?;
                leibniz_residual = leibniz_residual.max(a.tau_norm(&(lhs - rhs)));
            }
        }
        identity_residual = identity_residual.max(a.tau_norm(&(d_mat * a.identity())));
        for &t in &[1.0, -1.0, 0.1, -0.1] {
            let g = (d_mat * t).exp();
            let fix = a.tau_norm(&(&g * a.identity() - a.identity()));
            if fix > 1e-8 * (1.0 + a.tau_norm(a.identity())) {
                cone_failures += 1;
                continue;
            }
            for s in &samples {
                if order::positivity(a, &(&g * s))? != Positivity::Interior {
                    cone_failures += 1;
                }
            }
        }
    }

    Ok(DerivationSpace {
        basis: ortho,
        tolerance,
        leibniz_residual,
        identity_residual,
        kernel_gap,
        ambiguous: kernel_gap < 10.0,
        cone_failures,
    })
}

/// A linear map `V → aut V` stored as coefficients over a derivation basis:
/// `J(a) = Σ_k (coeffs_k · a) D_k`.
#[derive(Debug, Clone)]
pub struct Orientation {
    /// `d × dim` coefficient matrix.
    pub coeffs: DMatrix<f64>,
    pub basis: Vec<DMatrix<f64>>,
    pub base_point: Element,
    /// Achieved residual of the defining quadratic constraint.
    pub residual: f64,
}

impl Orientation {
    pub fn zero(a: &AlgebraSpec, deriv: &DerivationSpace) -> Self {
        Orientation {
            coeffs: DMatrix::zeros(deriv.dim(), a.dim()),
            basis: deriv.basis.clone(),
            base_point: a.identity().clone(),
            residual: 0.0,
        }
    }

    /// Evaluates `J(x)` as an operator.
    pub fn apply(&self, x: &Element) -> DMatrix<f64> {
        let dim = self.base_point.len();
        let mut out = DMatrix::zeros(dim, dim);
        for (k, d_mat) in self.basis.iter().enumerate() {
            let c = self.coeffs.row(k).transpose().dot(x);
            out += d_mat * c;
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Orientation { coeffs: &self.coeffs * factor, ..self.clone() }
    }

    pub fn negated(&self) -> Self {
        self.scaled(-1.0)
    }

    pub fn basis_hash(&self) -> u64 {
        linalg::fnv1a_f64(self.basis.iter().flat_map(|m| m.iter().cloned()))
    }
}

/// Serialized orientation witness; `basis_hash` binds the coefficients to the
/// derivation basis that produced them.
#[derive(Debug, Serialize, Deserialize)]
pub struct OrientationFile {
    pub basis_hash: u64,
    pub coeffs: Vec<Vec<f64>>,
    pub residual: f64,
}

impl Orientation {
    pub fn to_file(&self) -> OrientationFile {
        OrientationFile {
            basis_hash: self.basis_hash(),
            coeffs: (0..self.coeffs.nrows())
                .map(|r| self.coeffs.row(r).iter().cloned().collect())
                .collect(),
            residual: self.residual,
        }
    }

    pub fn from_file(a: &AlgebraSpec, deriv: &DerivationSpace, file: &OrientationFile) -> Result<Self> {
        if file.basis_hash != deriv.basis_hash() {
            return Err(Error::BasisHashMismatch { expected: deriv.basis_hash(), got: file.basis_hash });
        }
        let d = deriv.dim();
        if file.coeffs.len() != d || file.coeffs.iter().any(|r| r.len() != a.dim()) {
            return Err(Error::DimensionMismatch { expected: d, got: file.coeffs.len() });
        }
        Ok(Orientation {
            coeffs: DMatrix::from_fn(d, a.dim(), |r, c| file.coeffs[r][c]),
            basis: deriv.basis.clone(),
            base_point: a.identity().clone(),
            residual: file.residual,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrientationReport {
    /// `max ‖J(J(a)b) − [L_b, L_a]‖` over orthonormal basis pairs.
    pub quadratic: f64,
    /// `max ‖J(a)b + J(b)a‖`.
    pub antisymmetry: f64,
    /// `max ‖J(z)‖` over the centre basis.
    pub center_kernel: f64,
    /// `max ‖[L_a, L_b] − [J(b), J(a)]‖`.
    pub bracket_compat: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Verifies the defining quadratic identity and the derived properties
/// (antisymmetry, centre kernel, bracket compatibility) of an orientation
/// candidate at base point `e`.
pub fn verify_orientation(a: &AlgebraSpec, j: &Orientation, tol: f64) -> Result<OrientationReport> {
    if a.tau_norm(&(&j.base_point - a.identity())) > 1e-9 * (1.0 + a.tau_norm(a.identity())) {
        return Err(Error::InvalidParameter("verify_orientation expects a base point at the identity".into()));
    }
    // J must be valued in the derivation span: spot-check Leibniz on the basis.
    let dim = a.dim();
    let onb = a.tau_orthonormal_basis();
    let ehat: Vec<Element> = (0..dim).map(|i| onb.column(i).into_owned()).collect();
    let mut leibniz = 0.0_f64;
    for x in &ehat {
        let jm = j.apply(x);
        for (i, bi) in ehat.iter().enumerate() {
            for bj in ehat.iter().skip(i) {
                let lhs = &jm * a.product(bi, bj)?;
                let rhs = a.product(&(&jm * bi), bj)? + a.product(bi, &(&jm * bj))?;
                leibniz = leibniz.max(a.tau_norm(&(lhs - rhs)));
            }
        }
    }
    if leibniz > 1e-6 {
        return Err(Error::NotDerivationValued { residual: leibniz });
    }

    let l_hat: Vec<DMatrix<f64>> = ehat.iter().map(|b| a.l_operator(b).unwrap()).collect();
    let j_hat: Vec<DMatrix<f64>> = ehat.iter().map(|b| j.apply(b)).collect();
    let mut quadratic = 0.0_f64;
    let mut antisymmetry = 0.0_f64;
    let mut bracket = 0.0_f64;
    for i in 0..dim {
        for jj in 0..dim {
            let jij = &j_hat[i] * &ehat[jj];
            let lhs = j.apply(&jij);
            let target = &l_hat[jj] * &l_hat[i] - &l_hat[i] * &l_hat[jj];
            quadratic = quadratic.max(a.op_frobenius(&(lhs - &target)));
            if jj >= i {
                antisymmetry = antisymmetry.max(a.tau_norm(&(&jij + &j_hat[jj] * &ehat[i])));
                let lbr = &l_hat[i] * &l_hat[jj] - &l_hat[jj] * &l_hat[i];
                let jbr = &j_hat[jj] * &j_hat[i] - &j_hat[i] * &j_hat[jj];
                bracket = bracket.max(a.op_frobenius(&(lbr - jbr)));
            }
        }
    }
    let mut center_kernel = 0.0_f64;
    for z in a.center()? {
        center_kernel = center_kernel.max(a.op_frobenius(&j.apply(&z)));
    }
    let pass = quadratic <= tol && antisymmetry <= tol && center_kernel <= tol && bracket <= tol;
    Ok(OrientationReport { quadratic, antisymmetry, center_kernel, bracket_compat: bracket, tol, pass })
}

/// The canonical orientation `J(a) = (i/2)[a, ·]` on complex hermitian matrix
/// algebras, expressed over the computed derivation basis.
pub fn canonical_orientation(a: &AlgebraSpec) -> Result<Orientation> {
    if !a.name().starts_with("herm_complex(") {
        return Err(Error::InvalidParameter(format!(
            "canonical orientation requires a herm_complex catalog algebra, got `{}`",
            a.name()
        )));
    }
    let basis = catalog::matrix_basis(a.name())
        .ok_or_else(|| Error::InvalidParameter(format!("no matrix realisation for `{}`", a.name())))?;
    let deriv = derivation_space(a)?;
    let dim = a.dim();
    let half_i = Complex::new(0.0, 0.5);
    let mut coeffs = DMatrix::zeros(deriv.dim(), dim);
    for i in 0..dim {
        // J(b_i) as a real operator: x ↦ coords((i/2)(B_i X − X B_i)).
        let mut op = DMatrix::zeros(dim, dim);
        for jj in 0..dim {
            let comm = (&basis.mats[i] * &basis.mats[jj] - &basis.mats[jj] * &basis.mats[i]) * half_i;
            op.set_column(jj, &basis.to_coords(&comm));
        }
        let defect = deriv.projection_defect(a, &op);
        if defect > 1e-9 {
            return Err(Error::NotDerivationValued { residual: defect });
        }
        coeffs.set_column(i, &deriv.project_coeffs(a, &op));
    }
    let mut orientation = Orientation {
        coeffs,
        basis: deriv.basis.clone(),
        base_point: a.identity().clone(),
        residual: 0.0,
    };
    let report = verify_orientation(a, &orientation, 1e-9)?;
    if !report.pass {
        return Err(Error::InvalidParameter(format!(
            "canonical orientation failed verification: {report:?}"
        )));
    }
    orientation.residual = report.quadratic;
    Ok(orientation)
}

/// Extends a positive homogeneous additive cone map to a linear map on `V`
/// by `J_V(v) = J(v + μe) − J(μe)`, checking additivity and well-definedness.
pub fn extend_cone_map(
    a: &AlgebraSpec,
    j_on_cone: &dyn Fn(&Element) -> Result<DMatrix<f64>>,
    v: &Element,
) -> Result<DMatrix<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xADD);
    for _ in 0..5 {
        let w1 = geom::sample_interior(a, &mut rng, 0.5)?;
        let w2 = geom::sample_interior(a, &mut rng, 0.5)?;
        let sum = j_on_cone(&(&w1 + &w2))?;
        let parts = j_on_cone(&w1)? + j_on_cone(&w2)?;
        let scale = 1.0 + a.op_frobenius(&parts);
        let additivity = a.op_frobenius(&(&sum - &parts)) / scale;
        let hom = a.op_frobenius(&(j_on_cone(&(&w1 * 2.0))? - j_on_cone(&w1)? * 2.0)) / scale;
        if additivity > 1e-8 || hom > 1e-8 {
            return Err(Error::NotAdditive { residual: additivity.max(hom) });
        }
    }
    let norm_v = a.spectral_radius(v)?;
    if norm_v == 0.0 {
        return Ok(DMatrix::zeros(a.dim(), a.dim()));
    }
    let mu = 2.0 * norm_v;
    let at = |m: f64| -> Result<DMatrix<f64>> {
        Ok(j_on_cone(&(v + a.identity() * m))? - j_on_cone(&(a.identity() * m))?)
    };
    let first = at(mu)?;
    let second = at(2.0 * mu)?;
    let agreement = a.op_frobenius(&(&first - &second)) / (1.0 + a.op_frobenius(&first));
    if agreement > 1e-8 {
        return Err(Error::NotAdditive { residual: agreement });
    }
    Ok(first)
}

#[derive(Debug, Clone, Serialize)]
pub struct TransportReport {
    /// `max ‖exp(t J'(a))(u) − u‖` over basis directions and t ∈ {±1, ±0.1}.
    pub fixes_base: f64,
    /// Residual of the transported constraint `J'(J'(a)b) = [𝓛_b, 𝓛_a]`.
    pub constraint: f64,
    /// `max ‖J'(g⁻¹ z)‖` over the centre basis (the transported kernel).
    pub kernel: f64,
}

/// Transports an orientation at `e` to base point `u` along
/// `g = transitive_map(u, e)`: `J'(a) = g⁻¹ J(g a) g`.
pub fn transport_orientation(
    a: &AlgebraSpec,
    j: &Orientation,
    u: &Element,
) -> Result<(Orientation, TransportReport)> {
    let report = verify_orientation(a, j, 1e-8)?;
    if !report.pass {
        return Err(Error::InvalidParameter(format!(
            "transport requires a verified orientation at e (quadratic residual {:.3e})",
            report.quadratic
        )));
    }
    let g = geom::transitive_map(a, u, a.identity())?;
    let g_inv = g.clone().try_inverse().ok_or(Error::SingularMap { context: "transitive map".into() })?;
    let basis: Vec<DMatrix<f64>> = j.basis.iter().map(|d| &g_inv * d * &g).collect();
    let coeffs = &j.coeffs * &g;
    let transported = Orientation { coeffs, basis, base_point: u.clone(), residual: j.residual };

    let dim = a.dim();
    let onb = a.tau_orthonormal_basis();
    let ehat: Vec<Element> = (0..dim).map(|i| onb.column(i).into_owned()).collect();
    let mut fixes_base = 0.0_f64;
    for x in &ehat {
        let jm = transported.apply(x);
        for &t in &[1.0, -1.0, 0.1, -0.1] {
            let flow = (jm.clone() * t).exp();
            fixes_base = fixes_base.max(a.tau_norm(&(&flow * u - u)) / (1.0 + a.tau_norm(u)));
        }
    }
    // 𝓛(a) = g⁻¹ L_{g a} g
    let script_l = |x: &Element| -> Result<DMatrix<f64>> { Ok(&g_inv * a.l_operator(&(&g * x))? * &g) };
    let mut constraint = 0.0_f64;
    for i in 0..dim {
        for jj in 0..dim {
            let jij = transported.apply(&ehat[i]) * &ehat[jj];
            let lhs = transported.apply(&jij);
            let target = script_l(&ehat[jj])? * script_l(&ehat[i])? - script_l(&ehat[i])? * script_l(&ehat[jj])?;
            constraint = constraint.max(a.op_frobenius(&(lhs - target)));
        }
    }
    let mut kernel = 0.0_f64;
    for z in a.center()? {
        kernel = kernel.max(a.op_frobenius(&transported.apply(&(&g_inv * z))));
    }
    Ok((transported, TransportReport { fixes_base, constraint, kernel }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jalg::catalog;
    use nalgebra::dvector;

    #[test]
    fn derivation_dims_match_closed_forms() {
        // abelian: every derivation vanishes
        assert_eq!(derivation_space(&catalog::abelian(3)).unwrap().dim(), 0);
        // sym_real(n): n(n−1)/2, herm_complex(n): n²−1, spin_factor(k): k(k−1)/2
        assert_eq!(derivation_space(&catalog::sym_real(2)).unwrap().dim(), 1);
        assert_eq!(derivation_space(&catalog::sym_real(3)).unwrap().dim(), 3);
        assert_eq!(derivation_space(&catalog::herm_complex(2)).unwrap().dim(), 3);
        assert_eq!(derivation_space(&catalog::herm_complex(3)).unwrap().dim(), 8);
        assert_eq!(derivation_space(&catalog::spin_factor(4)).unwrap().dim(), 6);
        assert_eq!(derivation_space(&catalog::spin_factor(5)).unwrap().dim(), 10);
    }

    #[test]
    fn derivation_space_diagnostics() {
        let a = catalog::herm_complex(2);
        let d = derivation_space(&a).unwrap();
        assert!(d.leibniz_residual <= 1e-9, "leibniz {}", d.leibniz_residual);
        assert!(d.identity_residual <= 1e-10);
        assert!(!d.ambiguous, "kernel gap {}", d.kernel_gap);
        assert_eq!(d.cone_failures, 0);
        // orthonormality
        for i in 0..d.dim() {
            for j in 0..d.dim() {
                let ip = tau_frobenius_inner(&a, &d.basis[i], &d.basis[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn canonical_orientation_verifies() {
        for n in [2usize, 3] {
            let a = catalog::herm_complex(n);
            let j = canonical_orientation(&a).unwrap();
            let report = verify_orientation(&a, &j, 1e-9).unwrap();
            assert!(report.pass, "{report:?}");
            // J(e) = 0 and J(a)(a) = 0
            assert!(a.op_frobenius(&j.apply(a.identity())) < 1e-10);
            let mut rng = ChaCha8Rng::seed_from_u64(13);
            for _ in 0..10 {
                let x = a.sample_gaussian(&mut rng);
                assert!(a.tau_norm(&(j.apply(&x) * &x)) < 1e-10 * (1.0 + a.tau_norm(&x).powi(2)));
            }
            // the sign-flipped orientation also verifies
            let report = verify_orientation(&a, &j.negated(), 1e-9).unwrap();
            assert!(report.pass);
        }
    }

    #[test]
    fn canonical_orientation_hand_checked_entry() {
        // a = diag(1,−1), x = offdiag(1): (i/2)[a, x] = i(E12 − E21), i.e. the
        // imaginary off-diagonal basis matrix scaled by √2.
        let a = catalog::herm_complex(2);
        let j = canonical_orientation(&a).unwrap();
        let av = dvector![1.0, -1.0, 0.0, 0.0];
        let xv = dvector![0.0, 0.0, 2.0_f64.sqrt(), 0.0]; // offdiag(1)
        let got = j.apply(&av) * &xv;
        let want = dvector![0.0, 0.0, 0.0, 2.0_f64.sqrt()]; // i(E12−E21)
        assert!(a.tau_norm(&(got.clone() - &want)) < 1e-10, "got {got:?}");
    }

    #[test]
    fn doubled_orientation_fails_with_scaling_mismatch() {
        let a = catalog::herm_complex(2);
        let j = canonical_orientation(&a).unwrap();
        let j2 = j.scaled(2.0);
        let report = verify_orientation(&a, &j2, 1e-9).unwrap();
        assert!(!report.pass);
        // J := 2J₀ gives J(J(a)b) = 4[L_b,L_a], so the defect is 3× the target.
        let mut max_target = 0.0_f64;
        let onb = a.tau_orthonormal_basis();
        for i in 0..a.dim() {
            for jj in 0..a.dim() {
                let li = a.l_operator(&onb.column(i).into_owned()).unwrap();
                let lj = a.l_operator(&onb.column(jj).into_owned()).unwrap();
                max_target = max_target.max(a.op_frobenius(&(&lj * &li - &li * &lj)));
            }
        }
        assert!((report.quadratic - 3.0 * max_target).abs() < 1e-8 * (1.0 + max_target));
    }

    #[test]
    fn verify_rejects_non_derivation_valued_maps() {
        // a coefficient map over matrices violating Leibniz is an input error
        let a = catalog::herm_complex(2);
        let mut basis = derivation_space(&a).unwrap().basis;
        basis[0] = DMatrix::identity(4, 4); // not a derivation (fails D(e) = 0)
        let j = Orientation {
            coeffs: DMatrix::from_element(basis.len(), 4, 0.5),
            basis,
            base_point: a.identity().clone(),
            residual: 0.0,
        };
        assert!(matches!(
            verify_orientation(&a, &j, 1e-8),
            Err(Error::NotDerivationValued { .. })
        ));
    }

    #[test]
    fn zero_orientation_passes_on_abelian() {
        let a = catalog::abelian(4);
        let deriv = derivation_space(&a).unwrap();
        let j = Orientation::zero(&a, &deriv);
        let report = verify_orientation(&a, &j, 1e-12).unwrap();
        assert!(report.pass);
        assert_eq!(report.quadratic, 0.0);
    }

    #[test]
    fn extend_cone_map_matches_linear_restriction() {
        let a = catalog::herm_complex(2);
        let j = canonical_orientation(&a).unwrap();
        let j_ref = &j;
        let on_cone = move |w: &Element| -> Result<DMatrix<f64>> {
            match order::positivity(&a, w)? {
                Positivity::Interior => Ok(j_ref.apply(w)),
                _ => Err(Error::NotInterior { min_spectral: 0.0 }),
            }
        };
        let a2 = catalog::herm_complex(2);
        // v interior: direct agreement
        let v = dvector![2.0, 1.0, 0.3, -0.1];
        let got = extend_cone_map(&a2, &on_cone, &v).unwrap();
        assert!(a2.op_frobenius(&(&got - j.apply(&v))) < 1e-8);
        // v = 0
        let zero = DVector::zeros(4);
        assert!(extend_cone_map(&a2, &on_cone, &zero).unwrap().amax() < 1e-14);
        // v = diag(1, −3), not in the cone
        let v = dvector![1.0, -3.0, 0.0, 0.0];
        let got = extend_cone_map(&a2, &on_cone, &v).unwrap();
        assert!(a2.op_frobenius(&(&got - j.apply(&v))) < 1e-8);
    }

    #[test]
    fn extend_cone_map_rejects_non_additive() {
        let a = catalog::herm_complex(2);
        let bad = |w: &Element| -> Result<DMatrix<f64>> {
            // quadratic in w: violates additivity
            let n = w.norm();
            Ok(DMatrix::identity(4, 4) * (n * n))
        };
        let v = dvector![1.0, 1.0, 0.0, 0.0];
        assert!(matches!(extend_cone_map(&a, &bad, &v), Err(Error::NotAdditive { .. })));
    }

    #[test]
    fn orientation_file_round_trip_binds_basis() {
        let a = catalog::herm_complex(2);
        let deriv = derivation_space(&a).unwrap();
        let j = canonical_orientation(&a).unwrap();
        let file = j.to_file();
        assert_eq!(file.basis_hash, deriv.basis_hash());
        let text = serde_json::to_string(&file).unwrap();
        let parsed: OrientationFile = serde_json::from_str(&text).unwrap();
        let back = Orientation::from_file(&a, &deriv, &parsed).unwrap();
        assert!((back.coeffs - &j.coeffs).amax() < 1e-15);

        let mut wrong = j.to_file();
        wrong.basis_hash ^= 1;
        assert!(matches!(
            Orientation::from_file(&a, &deriv, &wrong),
            Err(Error::BasisHashMismatch { .. })
        ));
    }

    #[test]
    fn transport_is_identity_at_e() {
        let a = catalog::herm_complex(2);
        let j = canonical_orientation(&a).unwrap();
        let (jt, rep) = transport_orientation(&a, &j, a.identity()).unwrap();
        assert!((jt.coeffs.clone() - &j.coeffs).amax() < 1e-10);
        assert!(rep.fixes_base < 1e-10);
        assert!(rep.constraint < 1e-9);
    }

    #[test]
    fn transport_to_interior_point() {
        let a = catalog::herm_complex(2);
        let j = canonical_orientation(&a).unwrap();
        let u = dvector![1.0, 4.0, 0.0, 0.0];
        let (jt, rep) = transport_orientation(&a, &j, &u).unwrap();
        assert!(rep.fixes_base <= 1e-8, "fixes_base {}", rep.fixes_base);
        assert!(rep.constraint <= 1e-7, "constraint {}", rep.constraint);
        assert!(rep.kernel <= 1e-8, "kernel {}", rep.kernel);
        assert!(a.tau_norm(&(&jt.base_point - &u)) < 1e-12);
        assert!(transport_orientation(&a, &j, &dvector![1.0, -1.0, 0.0, 0.0]).is_err());
    }
}

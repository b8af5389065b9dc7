//! Structure-constant Jordan algebra engine.
//!
//! An algebra is given by its dimension, a rank-3 structure tensor
//! `c[k][i][j]` with `(x∘y)_k = Σ_ij c[k][i][j] x_i y_j`, an identity element
//! and a positive-definite trace bilinear form. Everything downstream (order
//! structure, cone geometry, orientation search, C*-reconstruction) works
//! through this representation.

pub mod catalog;
pub mod io;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;

/// Coordinate vector over an algebra's basis.
pub type Element = DVector<f64>;

/// Spectral decomposition `x = Σ λ_i f_i` into an orthogonal idempotent frame.
#[derive(Debug, Clone)]
pub struct Spectral {
    /// Distinct spectral values, sorted ascending.
    pub values: Vec<f64>,
    /// Idempotent frame, one element per spectral value: `f_i ∘ f_j = δ_ij f_i`,
    /// `Σ f_i = e`.
    pub frame: Vec<Element>,
}

/// A commutative algebra presented by structure constants.
///
/// Immutable after construction; all operations are pure functions of their
/// inputs and safe to share across threads.
#[derive(Debug, Clone)]
pub struct AlgebraSpec {
    name: String,
    dim: usize,
    /// One symmetric `dim × dim` slice per output coordinate.
    structure: Vec<DMatrix<f64>>,
    identity: Element,
    trace_form: DMatrix<f64>,
    /// sqrt and inverse sqrt of the trace-form Gram matrix.
    g_sqrt: DMatrix<f64>,
    g_inv_sqrt: DMatrix<f64>,
    /// Relative tolerance for merging nearby minimal-polynomial roots.
    merge_tol: f64,
}

/// Verification report for the JB-algebra axioms on sampled pairs.
///
/// All residuals are scale-free (inputs normalized before measuring), so the
/// pass threshold `1e-8` is meaningful across algebras.
#[derive(Debug, Clone, Serialize)]
pub struct JbReport {
    pub samples: usize,
    pub commutativity: f64,
    pub jordan_identity: f64,
    pub norm_submultiplicative: f64,
    pub square_norm_identity: f64,
    pub square_sum_monotone: f64,
    pub power_associativity: f64,
    /// Samples whose spectral decomposition failed (should be zero for a
    /// genuine JB-algebra).
    pub spectral_failures: usize,
    pub pass: bool,
}

pub const JB_PASS_TOL: f64 = 1e-8;

impl AlgebraSpec {
    /// Builds an algebra from a full structure tensor.
    ///
    /// Rejects asymmetric tensors outright instead of averaging them, and
    /// validates the identity element and the positive definiteness of the
    /// trace form (default `τ(x,y) = tr L_{x∘y}`).
    pub fn new(
        name: impl Into<String>,
        structure: Vec<DMatrix<f64>>,
        identity: Element,
        trace_form: Option<DMatrix<f64>>,
    ) -> Result<Self> {
        let dim = structure.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("algebra dimension must be positive".into()));
        }
        if identity.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: identity.len() });
        }
        if identity.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("identity has non-finite coordinates".into()));
        }
        let mut scale = 0.0_f64;
        for slice in &structure {
            if slice.nrows() != dim || slice.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: slice.nrows() });
            }
            if slice.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("structure tensor has non-finite entries".into()));
            }
            scale = scale.max(slice.amax());
        }
        for (k, slice) in structure.iter().enumerate() {
            for i in 0..dim {
                for j in (i + 1)..dim {
                    let delta = (slice[(i, j)] - slice[(j, i)]).abs();
                    if delta > 1e-12 * (1.0 + scale) {
                        return Err(Error::AsymmetricStructure { k, i, j, delta });
                    }
                }
            }
        }

        let mut spec = AlgebraSpec {
            name: name.into(),
            dim,
            structure,
            identity,
            trace_form: DMatrix::identity(dim, dim),
            g_sqrt: DMatrix::identity(dim, dim),
            g_inv_sqrt: DMatrix::identity(dim, dim),
            merge_tol: 1e-7,
        };

        // e ∘ b_i = b_i for every basis vector.
        let l_e = spec.l_operator_unchecked(&spec.identity);
        let id_residual = (&l_e - DMatrix::<f64>::identity(dim, dim)).amax();
        if id_residual > 1e-6 * (1.0 + scale) {
            return Err(Error::IdentityViolation { residual: id_residual });
        }

        let gram = match trace_form {
            Some(g) => {
                if g.nrows() != dim || g.ncols() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: g.nrows() });
                }
                if g.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter("trace form has non-finite entries".into()));
                }
                g
            }
            None => spec.default_trace_form(),
        };
        let sym_residual = (&gram - gram.transpose()).amax();
        if sym_residual > 1e-9 * (1.0 + gram.amax()) {
            return Err(Error::TraceFormNotPositive { min_ratio: -sym_residual });
        }
        let gram = (&gram + gram.transpose()) * 0.5;
        let eig = gram.clone().symmetric_eigen();
        let max_eig = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
        let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig.is_nan() || min_eig <= 1e-12 * max_eig {
            return Err(Error::TraceFormNotPositive { min_ratio: min_eig / max_eig.max(f64::MIN_POSITIVE) });
        }
        let (g_sqrt, g_inv_sqrt) =
            linalg::spd_sqrt_pair(&gram).ok_or(Error::TraceFormNotPositive { min_ratio: min_eig / max_eig })?;
        spec.trace_form = gram;
        spec.g_sqrt = g_sqrt;
        spec.g_inv_sqrt = g_inv_sqrt;
        Ok(spec)
    }

    fn default_trace_form(&self) -> DMatrix<f64> {
        // τ(b_i, b_j) = tr L_{b_i ∘ b_j} = Σ_m c[m][i][j] tr L_{b_m}
        let traces: Vec<f64> = (0..self.dim)
            .map(|m| {
                let mut basis = DVector::zeros(self.dim);
                basis[m] = 1.0;
                self.l_operator_unchecked(&basis).trace()
            })
            .collect();
        DMatrix::from_fn(self.dim, self.dim, |i, j| {
            (0..self.dim).map(|m| self.structure[m][(i, j)] * traces[m]).sum()
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn identity(&self) -> &Element {
        &self.identity
    }

    pub fn trace_form(&self) -> &DMatrix<f64> {
        &self.trace_form
    }

    pub fn structure(&self) -> &[DMatrix<f64>] {
        &self.structure
    }

    pub fn merge_tol(&self) -> f64 {
        self.merge_tol
    }

    /// Overrides the spectral root-merging tolerance (relative).
    pub fn with_merge_tol(mut self, tol: f64) -> Self {
        self.merge_tol = tol;
        self
    }

    fn check_dim(&self, x: &Element) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// Jordan product `x ∘ y` by tensor contraction.
    pub fn product(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(DVector::from_fn(self.dim, |k, _| (&self.structure[k] * x).dot(y)))
    }

    /// Multiplication operator `L_x` with `L_x y = x ∘ y`; `L_e` is the identity.
    pub fn l_operator(&self, x: &Element) -> Result<DMatrix<f64>> {
        self.check_dim(x)?;
        Ok(self.l_operator_unchecked(x))
    }

    fn l_operator_unchecked(&self, x: &Element) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.dim, self.dim);
        for k in 0..self.dim {
            l.set_row(k, &(&self.structure[k] * x).transpose());
        }
        l
    }

    /// Quadratic representation `U_x = 2 L_x² − L_{x²}`.
    pub fn quad_rep(&self, x: &Element) -> Result<DMatrix<f64>> {
        let l = self.l_operator(x)?;
        let x2 = self.product(x, x)?;
        let l2 = self.l_operator(&x2)?;
        Ok(&l * &l * 2.0 - l2)
    }

    /// Trace-form pairing `τ(x, y)`.
    pub fn tau(&self, x: &Element, y: &Element) -> f64 {
        (&self.trace_form * x).dot(y)
    }

    /// Trace-form norm.
    pub fn tau_norm(&self, x: &Element) -> f64 {
        self.tau(x, x).max(0.0).sqrt()
    }

    /// Frobenius norm of an operator in trace-form-orthonormal coordinates.
    pub fn op_frobenius(&self, m: &DMatrix<f64>) -> f64 {
        self.op_transform(m).norm()
    }

    /// Representation of an operator in trace-form-orthonormal coordinates.
    pub fn op_transform(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        &self.g_sqrt * m * &self.g_inv_sqrt
    }

    /// Coordinates of a vector in the trace-form-orthonormal basis.
    pub fn to_tau_frame(&self, x: &Element) -> Element {
        &self.g_sqrt * x
    }

    /// Change-of-basis matrix into the trace-form-orthonormal frame (`G^{1/2}`).
    pub fn tau_frame_matrix(&self) -> &DMatrix<f64> {
        &self.g_sqrt
    }

    /// Coordinate basis orthonormalized against the trace form: column `i` of
    /// the returned matrix is the `i`-th orthonormal basis vector.
    pub fn tau_orthonormal_basis(&self) -> &DMatrix<f64> {
        &self.g_inv_sqrt
    }

    /// Minimal polynomial of `x` over the associative powers `e, x, x², …`.
    ///
    /// Returns the monic coefficients `c_0 … c_{d-1}` (with `x^d + Σ c_j x^j = 0`)
    /// and the computed powers `p_0 … p_{d-1}`.
    fn minimal_polynomial(&self, x: &Element) -> Result<(Vec<f64>, Vec<Element>)> {
        let scale = self.tau_norm(x);
        let xh = if scale > 0.0 { x / scale } else { x.clone() };
        let mut powers: Vec<Element> = vec![self.identity.clone()];
        // Orthonormal basis of the power span for dependency detection.
        let mut q_basis: Vec<Element> = vec![self.identity.clone() / self.tau_norm(&self.identity)];
        loop {
            let next = self.product(&xh, powers.last().unwrap())?;
            let mut resid = next.clone();
            for q in &q_basis {
                let c = self.tau(q, &resid);
                resid -= q * c;
            }
            let rn = self.tau_norm(&resid);
            if rn <= 1e-10 * (1.0 + self.tau_norm(&next)) || powers.len() == self.dim + 1 {
                // next = Σ coeff_j p_j : solve least squares in the power basis.
                let d = powers.len();
                let mat = DMatrix::from_fn(self.dim, d, |r, c| powers[c][r]);
                let svd = mat.svd(true, true);
                let sol = svd
                    .solve(&next, 1e-13)
                    .map_err(|e| Error::SingularMap { context: format!("minimal polynomial solve: {e}") })?;
                let mut coeffs: Vec<f64> = (0..d).map(|j| -sol[j]).collect();
                // Undo the input scaling: roots scale linearly.
                if scale > 0.0 {
                    for (j, c) in coeffs.iter_mut().enumerate() {
                        *c *= scale.powi((d - j) as i32);
                    }
                }
                let unscaled: Vec<Element> = powers
                    .iter()
                    .enumerate()
                    .map(|(j, p)| p * scale.powi(j as i32))
                    .collect();
                return Ok((coeffs, unscaled));
            }
            q_basis.push(&resid / rn);
            powers.push(next);
        }
    }

    /// Spectral values of `x`: roots of its minimal polynomial, merged within
    /// the relative tolerance and sorted ascending. Multiplicity information is
    /// discarded. Errors if roots are not real within tolerance.
    pub fn spectral_values(&self, x: &Element) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let (coeffs, _) = self.minimal_polynomial(x)?;
        self.poly_roots(&coeffs)
    }

    fn poly_roots(&self, monic_coeffs: &[f64]) -> Result<Vec<f64>> {
        let d = monic_coeffs.len();
        if d == 0 {
            return Ok(vec![0.0]);
        }
        let mut companion = DMatrix::zeros(d, d);
        for i in 1..d {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..d {
            companion[(i, d - 1)] = -monic_coeffs[i];
        }
        let eigen = companion.complex_eigenvalues();
        let max_mod = eigen.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
        let tol = self.merge_tol * (1.0 + max_mod);
        for z in eigen.iter() {
            if z.im.abs() > tol {
                return Err(Error::DegenerateSpectrum {
                    reason: format!("complex root {:.6e} + {:.6e}i", z.re, z.im),
                    gap: z.im.abs(),
                });
            }
        }
        let mut roots: Vec<f64> = eigen.iter().map(|z| z.re).collect();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // Merge clusters closer than the tolerance.
        let mut merged: Vec<f64> = Vec::new();
        let mut cluster: Vec<f64> = vec![roots[0]];
        for &r in &roots[1..] {
            if r - cluster.last().unwrap() < tol {
                cluster.push(r);
            } else {
                merged.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
                cluster = vec![r];
            }
        }
        merged.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
        Ok(merged)
    }

    /// Full spectral decomposition with idempotent frame, validated by
    /// reconstruction (`Σ λ_i f_i = x`), completeness (`Σ f_i = e`) and frame
    /// orthogonality.
    ///
    /// The frame comes from the eigendecomposition of `L_x` restricted to the
    /// power subalgebra `span{e, x, x², …}`, on which it is self-adjoint for
    /// the trace form; this stays stable for nearly degenerate spectra where
    /// Lagrange interpolation in the power basis would lose all accuracy.
    pub fn spectral(&self, x: &Element) -> Result<Spectral> {
        self.check_dim(x)?;
        let (_, powers) = self.minimal_polynomial(x)?;
        let q_basis = self.tau_orthonormalize(&powers);
        let d = q_basis.len();
        let mut restricted = DMatrix::zeros(d, d);
        for c in 0..d {
            let xq = self.product(x, &q_basis[c])?;
            for r in 0..d {
                restricted[(r, c)] = self.tau(&q_basis[r], &xq);
            }
        }
        // Self-adjointness holds exactly when the trace form is associative;
        // the deviation flows into the validation below.
        let sym = (&restricted + restricted.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());

        // Cluster nearby eigenvalues; spectral projectors of a cluster sum to
        // a single idempotent.
        let max_mod = eig.eigenvalues.iter().fold(0.0_f64, |m, &l| m.max(l.abs()));
        let tol = self.merge_tol * (1.0 + max_mod);
        let mut values: Vec<f64> = Vec::new();
        let mut frame: Vec<Element> = Vec::new();
        let mut cluster: Vec<usize> = Vec::new();
        let flush = |cluster: &mut Vec<usize>, values: &mut Vec<f64>, frame: &mut Vec<Element>| {
            if cluster.is_empty() {
                return;
            }
            let mean =
                cluster.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / cluster.len() as f64;
            let mut f = DVector::zeros(self.dim);
            for &i in cluster.iter() {
                let mut v = DVector::zeros(self.dim);
                for (r, q) in q_basis.iter().enumerate() {
                    v += q * eig.eigenvectors[(r, i)];
                }
                f += &v * self.tau(&v, &self.identity);
            }
            values.push(mean);
            frame.push(f);
            cluster.clear();
        };
        for &i in &order {
            if let Some(&last) = cluster.last() {
                if eig.eigenvalues[i] - eig.eigenvalues[last] > tol {
                    flush(&mut cluster, &mut values, &mut frame);
                }
            }
            cluster.push(i);
        }
        flush(&mut cluster, &mut values, &mut frame);
        let m = values.len();
        let min_gap = if m > 1 {
            values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
        } else {
            f64::INFINITY
        };
        // Validation.
        let scale = 1.0 + self.tau_norm(x);
        let mut recon = DVector::zeros(self.dim);
        let mut total = DVector::zeros(self.dim);
        for (i, f) in frame.iter().enumerate() {
            recon += f * values[i];
            total += f;
        }
        let recon_residual = self.tau_norm(&(recon - x)) / scale;
        let complete_residual = self.tau_norm(&(total - &self.identity));
        let mut idem_residual = 0.0_f64;
        for i in 0..m {
            for j in 0..m {
                let p = self.product(&frame[i], &frame[j])?;
                let expect = if i == j { frame[i].clone() } else { DVector::zeros(self.dim) };
                idem_residual = idem_residual.max(self.tau_norm(&(p - expect)));
            }
        }
        // Eigenvector mixing within a nearly degenerate pair scales like the
        // inverse gap.
        let spread = values.last().unwrap() - values.first().unwrap();
        let cond = if min_gap.is_finite() { (1.0 + spread) / min_gap } else { 1.0 };
        let idem_tol = (1e-8_f64).max(1e-13 * cond);
        if recon_residual > 1e-9 || complete_residual > 1e-9 || idem_residual > idem_tol {
            return Err(Error::DegenerateSpectrum {
                reason: format!(
                    "frame validation failed (reconstruction {recon_residual:.3e}, completeness {complete_residual:.3e}, idempotency {idem_residual:.3e})"
                ),
                gap: min_gap,
            });
        }
        Ok(Spectral { values, frame })
    }

    /// Applies a scalar function through the spectral decomposition:
    /// `f(x) = Σ f(λ_i) f_i`. The function returns `None` where undefined.
    pub fn functional_calculus(
        &self,
        x: &Element,
        f: impl Fn(f64) -> Option<f64>,
        fname: &'static str,
    ) -> Result<Element> {
        let spec = self.spectral(x)?;
        let mut out = DVector::zeros(self.dim);
        for (i, &l) in spec.values.iter().enumerate() {
            let fl = f(l).ok_or(Error::FunctionDomain { func: fname, value: l })?;
            out += &spec.frame[i] * fl;
        }
        Ok(out)
    }

    /// Jordan inverse. Requires all spectral values bounded away from zero.
    pub fn inverse(&self, x: &Element) -> Result<Element> {
        let scale = self.spectral_values(x)?.iter().fold(0.0_f64, |m, &l| m.max(l.abs()));
        let tol = 1e-12 * (1.0 + scale);
        self.functional_calculus(x, |l| if l.abs() > tol { Some(1.0 / l) } else { None }, "inverse")
    }

    /// Square root for elements with nonnegative spectrum.
    pub fn sqrt_element(&self, x: &Element) -> Result<Element> {
        let scale = self.spectral_values(x)?.iter().fold(0.0_f64, |m, &l| m.max(l.abs()));
        let tol = 1e-12 * (1.0 + scale);
        self.functional_calculus(x, |l| if l > -tol { Some(l.max(0.0).sqrt()) } else { None }, "sqrt")
    }

    /// Logarithm for elements with strictly positive spectrum.
    pub fn log_element(&self, x: &Element) -> Result<Element> {
        let scale = self.spectral_values(x)?.iter().fold(0.0_f64, |m, &l| m.max(l.abs()));
        let tol = 1e-12 * (1.0 + scale);
        self.functional_calculus(x, |l| if l > tol { Some(l.ln()) } else { None }, "log")
    }

    /// Inverse square root, `x^{-1/2}`.
    pub fn inv_sqrt_element(&self, x: &Element) -> Result<Element> {
        let scale = self.spectral_values(x)?.iter().fold(0.0_f64, |m, &l| m.max(l.abs()));
        let tol = 1e-12 * (1.0 + scale);
        self.functional_calculus(x, |l| if l > tol { Some(1.0 / l.sqrt()) } else { None }, "inv_sqrt")
    }

    /// Spectral power `x^p`; non-integer exponents need a positive spectrum.
    pub fn power_element(&self, x: &Element, p: f64) -> Result<Element> {
        let scale = self.spectral_values(x)?.iter().fold(0.0_f64, |m, &l| m.max(l.abs()));
        let tol = 1e-12 * (1.0 + scale);
        if p.fract() == 0.0 && p >= 0.0 {
            self.functional_calculus(x, |l| Some(l.powi(p as i32)), "power")
        } else {
            self.functional_calculus(x, |l| if l > tol { Some(l.powf(p)) } else { None }, "power")
        }
    }

    /// Orthonormal (w.r.t. the trace form) basis of the centre
    /// `{z : [L_z, L_x] = 0 for all x}`, computed as the kernel of the stacked
    /// commutator map. Always contains `e/‖e‖`.
    pub fn center(&self) -> Result<Vec<Element>> {
        let l_basis: Vec<DMatrix<f64>> = (0..self.dim)
            .map(|i| {
                let mut b = DVector::zeros(self.dim);
                b[i] = 1.0;
                self.l_operator_unchecked(&b)
            })
            .collect();
        // Column m of the stacked system: vec([L_{b_m}, L_{b_i}]) for every i.
        let rows = self.dim * self.dim * self.dim;
        let mut stacked = DMatrix::zeros(rows, self.dim);
        for m in 0..self.dim {
            for i in 0..self.dim {
                let comm = &l_basis[m] * &l_basis[i] - &l_basis[i] * &l_basis[m];
                for (r, v) in comm.iter().enumerate() {
                    stacked[(i * self.dim * self.dim + r, m)] = *v;
                }
            }
        }
        let (kernel, _) = linalg::svd_kernel(&stacked, 1e-10);
        Ok(self.tau_orthonormalize(&kernel))
    }

    /// Gram–Schmidt against the trace form, dropping dependent directions.
    pub fn tau_orthonormalize(&self, vectors: &[Element]) -> Vec<Element> {
        let mut basis: Vec<Element> = Vec::new();
        for v in vectors {
            let mut w = v.clone();
            for b in &basis {
                let c = self.tau(b, &w);
                w -= b * c;
            }
            // re-orthogonalize once for stability
            for b in &basis {
                let c = self.tau(b, &w);
                w -= b * c;
            }
            let n = self.tau_norm(&w);
            if n > 1e-10 * (1.0 + self.tau_norm(v)) {
                basis.push(w / n);
            }
        }
        basis
    }

    /// Verifies the JB-algebra axioms on `sample_count` seeded random pairs.
    pub fn verify_jb(&self, sample_count: usize, seed: u64) -> Result<JbReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = JbReport {
            samples: sample_count,
            commutativity: 0.0,
            jordan_identity: 0.0,
            norm_submultiplicative: 0.0,
            square_norm_identity: 0.0,
            square_sum_monotone: 0.0,
            power_associativity: 0.0,
            spectral_failures: 0,
            pass: false,
        };
        for _ in 0..sample_count {
            let a = self.sample_gaussian(&mut rng);
            let b = self.sample_gaussian(&mut rng);
            let (na_t, nb_t) = (self.tau_norm(&a).max(1e-300), self.tau_norm(&b).max(1e-300));

            let ab = self.product(&a, &b)?;
            let ba = self.product(&b, &a)?;
            report.commutativity = report.commutativity.max(self.tau_norm(&(&ab - &ba)) / (na_t * nb_t));

            let a2 = self.product(&a, &a)?;
            let lhs = self.product(&a, &self.product(&b, &a2)?)?;
            let rhs = self.product(&ab, &a2)?;
            report.jordan_identity =
                report.jordan_identity.max(self.tau_norm(&(lhs - rhs)) / (na_t * na_t * nb_t));

            // Power associativity spot check x^i ∘ x^j = x^{i+j} for i + j ≤ 6.
            let mut pows = vec![self.identity.clone(), a.clone() / na_t];
            for _ in 2..=6 {
                let next = self.product(&pows[1], pows.last().unwrap())?;
                pows.push(next);
            }
            for &(i, j) in &[(2usize, 2usize), (2, 3), (3, 3), (2, 4), (1, 5)] {
                let lhs = self.product(&pows[i], &pows[j])?;
                let resid = self.tau_norm(&(lhs - &pows[i + j])) / (1.0 + self.tau_norm(&pows[i + j]));
                report.power_associativity = report.power_associativity.max(resid);
            }

            // Norm axioms in the order-unit norm; spectral failures are counted,
            // not propagated, so a broken algebra still yields a failing report.
            let norms = (|| -> Result<(f64, f64, f64, f64, f64)> {
                let na = self.spectral_radius(&a)?;
                let nb = self.spectral_radius(&b)?;
                let nab = self.spectral_radius(&ab)?;
                let na2 = self.spectral_radius(&a2)?;
                let b2 = self.product(&b, &b)?;
                let na2b2 = self.spectral_radius(&(a2.clone() + b2))?;
                Ok((na, nb, nab, na2, na2b2))
            })();
            match norms {
                Ok((na, nb, nab, na2, na2b2)) => {
                    report.norm_submultiplicative =
                        report.norm_submultiplicative.max((nab - na * nb).max(0.0) / (na * nb).max(1e-300));
                    report.square_norm_identity =
                        report.square_norm_identity.max((na2 - na * na).abs() / (na * na).max(1e-300));
                    report.square_sum_monotone =
                        report.square_sum_monotone.max((na2 - na2b2).max(0.0) / na2.max(1e-300));
                }
                Err(_) => report.spectral_failures += 1,
            }
        }
        report.pass = report.spectral_failures == 0
            && report.commutativity <= JB_PASS_TOL
            && report.jordan_identity <= JB_PASS_TOL
            && report.norm_submultiplicative <= JB_PASS_TOL
            && report.square_norm_identity <= JB_PASS_TOL
            && report.square_sum_monotone <= JB_PASS_TOL
            && report.power_associativity <= JB_PASS_TOL;
        Ok(report)
    }

    /// `max |λ_i(x)|`; equals the order-unit seminorm at the identity.
    pub fn spectral_radius(&self, x: &Element) -> Result<f64> {
        Ok(self.spectral_values(x)?.iter().fold(0.0_f64, |m, &l| m.max(l.abs())))
    }

    /// Standard-normal coordinate sample.
    pub fn sample_gaussian(&self, rng: &mut impl Rng) -> Element {
        DVector::from_fn(self.dim, |_, _| StandardNormal.sample(rng))
    }
}

#[cfg(test)]
mod tests {
    use super::catalog;
    use super::*;
    use nalgebra::dvector;
    use proptest::prelude::*;

    /// Dense-matrix oracle for sym_real(n): maps coordinates to the symmetric
    /// matrix, multiplies there, and maps back.
    fn sym_oracle_product(n: usize, x: &Element, y: &Element) -> Element {
        let basis = catalog::matrix_basis(&format!("sym_real({n})")).unwrap();
        let xm = basis.from_coords(x);
        let ym = basis.from_coords(y);
        let prod = (&xm * &ym + &ym * &xm) * nalgebra::Complex::new(0.5, 0.0);
        basis.to_coords(&prod)
    }

    #[test]
    fn product_identity_is_neutral() {
        for a in [catalog::sym_real(3), catalog::spin_factor(4), catalog::herm_complex(2)] {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let x = a.sample_gaussian(&mut rng);
            let p = a.product(a.identity(), &x).unwrap();
            assert!(a.tau_norm(&(p - &x)) < 1e-12);
        }
    }

    #[test]
    fn product_matches_dense_matrix_oracle() {
        let a = catalog::sym_real(2);
        // basis order: E11, E22, offdiag; x = offdiag(1), y = diag(1, -1)
        let x = dvector![0.0, 0.0, 1.0];
        let y = dvector![1.0, -1.0, 0.0];
        let got = a.product(&x, &y).unwrap();
        let want = sym_oracle_product(2, &x, &y);
        assert!(a.tau_norm(&(got.clone() - want)) < 1e-12);
        assert!(got.amax() < 1e-12, "offdiag ∘ diag(1,-1) must vanish");
    }

    #[test]
    fn spin_factor_product_formula() {
        let a = catalog::spin_factor(3);
        let u = dvector![0.0, 1.0, 2.0, 0.5];
        let v = dvector![0.0, -1.0, 0.5, 3.0];
        let p = a.product(&u, &v).unwrap();
        // (0,u)∘(0,v) = (⟨u,v⟩, 0)
        assert!((p[0] - (-1.0 + 1.0 + 1.5)).abs() < 1e-12);
        assert!(p.rows(1, 3).amax() < 1e-12);
    }

    #[test]
    fn l_operator_identity_and_linearity() {
        let a = catalog::herm_complex(2);
        let l_e = a.l_operator(a.identity()).unwrap();
        assert!((l_e - DMatrix::<f64>::identity(4, 4)).amax() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = a.sample_gaussian(&mut rng);
        let l2 = a.l_operator(&(&x * 2.5)).unwrap();
        let l = a.l_operator(&x).unwrap();
        assert!((l2 - l * 2.5).amax() < 1e-12);
    }

    #[test]
    fn l_operator_eigenvalues_sym_real_2() {
        // x = diag(1,2): L_x on sym(2) has eigenvalues {1, 3/2, 2}.
        let a = catalog::sym_real(2);
        let x = dvector![1.0, 2.0, 0.0];
        let l = a.l_operator(&x).unwrap();
        let mut eig: Vec<f64> = l.complex_eigenvalues().iter().map(|z| z.re).collect();
        eig.sort_by(|p, q| p.partial_cmp(q).unwrap());
        for (got, want) in eig.iter().zip([1.0, 1.5, 2.0]) {
            assert!((got - want).abs() < 1e-10, "eigenvalues {eig:?}");
        }
    }

    #[test]
    fn spectral_of_identity() {
        let a = catalog::herm_complex(3);
        let s = a.spectral(a.identity()).unwrap();
        assert_eq!(s.values.len(), 1);
        assert!((s.values[0] - 1.0).abs() < 1e-12);
        assert!(a.tau_norm(&(s.frame[0].clone() - a.identity())) < 1e-10);
    }

    #[test]
    fn spectral_spin_factor_closed_form() {
        // (s, u) has minimal polynomial (λ−s)² − ‖u‖², so spectrum {s ± ‖u‖}.
        let a = catalog::spin_factor(4);
        let x = dvector![0.7, 1.0, -2.0, 0.5, 1.5];
        let nu = (1.0f64 + 4.0 + 0.25 + 2.25).sqrt();
        let s = a.spectral(&x).unwrap();
        assert_eq!(s.values.len(), 2);
        assert!((s.values[0] - (0.7 - nu)).abs() < 1e-10);
        assert!((s.values[1] - (0.7 + nu)).abs() < 1e-10);
        let mut recon = DVector::zeros(5);
        for (l, f) in s.values.iter().zip(&s.frame) {
            recon += f * *l;
        }
        assert!(a.tau_norm(&(recon - x)) < 1e-9);
    }

    #[test]
    fn spectral_herm_diagonal() {
        let a = catalog::herm_complex(2);
        // coords: E11, E22, re-offdiag, im-offdiag; diag(1,3) = (1, 3, 0, 0)
        let x = dvector![1.0, 3.0, 0.0, 0.0];
        let s = a.spectral(&x).unwrap();
        assert_eq!(s.values.len(), 2);
        assert!((s.values[0] - 1.0).abs() < 1e-10 && (s.values[1] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn functional_calculus_inverse_and_sqrt() {
        let a = catalog::sym_real(2);
        assert!(a.tau_norm(&(a.inverse(a.identity()).unwrap() - a.identity())) < 1e-12);
        let x = dvector![2.0, 4.0, 0.0];
        let inv = a.inverse(&x).unwrap();
        assert!(a.tau_norm(&(inv - dvector![0.5, 0.25, 0.0])) < 1e-10);
        // sqrt(x²) = x for positive spectrum
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let y = {
            let g = a.sample_gaussian(&mut rng);
            let sq = a.product(&g, &g).unwrap();
            sq + a.identity() * 0.1
        };
        let s = a.sqrt_element(&a.product(&y, &y).unwrap()).unwrap();
        assert!(a.tau_norm(&(s - y)) < 1e-8);
    }

    #[test]
    fn power_element_matches_repeated_product() {
        let a = catalog::herm_complex(2);
        let x = dvector![2.0, 0.5, 0.3, -0.2];
        let cube = a.power_element(&x, 3.0).unwrap();
        let direct = a.product(&a.product(&x, &x).unwrap(), &x).unwrap();
        assert!(a.tau_norm(&(cube - direct)) < 1e-10);
        // fractional powers need a positive spectrum
        let neg = dvector![1.0, -2.0, 0.0, 0.0];
        assert!(matches!(a.power_element(&neg, 0.5), Err(Error::FunctionDomain { .. })));
        let half = a.power_element(&(a.product(&x, &x).unwrap()), 0.5).unwrap();
        let sqrt = a.sqrt_element(&a.product(&x, &x).unwrap()).unwrap();
        assert!(a.tau_norm(&(half - sqrt)) < 1e-10);
    }

    #[test]
    fn functional_calculus_domain_errors() {
        let a = catalog::sym_real(2);
        let singular = dvector![1.0, 0.0, 0.0];
        match a.inverse(&singular) {
            Err(Error::FunctionDomain { func: "inverse", value }) => assert!(value.abs() < 1e-9),
            other => panic!("expected domain error, got {other:?}"),
        }
        let negative = dvector![1.0, -1.0, 0.0];
        assert!(matches!(a.log_element(&negative), Err(Error::FunctionDomain { func: "log", .. })));
    }

    #[test]
    fn quad_rep_against_congruence_oracle() {
        let a = catalog::sym_real(3);
        let basis = catalog::matrix_basis("sym_real(3)").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = a.sample_gaussian(&mut rng);
        let y = a.sample_gaussian(&mut rng);
        let u = a.quad_rep(&x).unwrap();
        let got = &u * &y;
        let xm = basis.from_coords(&x);
        let ym = basis.from_coords(&y);
        let want = basis.to_coords(&(&xm * &ym * &xm));
        assert!(a.tau_norm(&(got - want)) < 1e-10);
        // U_e = I, U_x(e) = x²
        assert!((a.quad_rep(a.identity()).unwrap() - DMatrix::<f64>::identity(6, 6)).amax() < 1e-12);
        let x2 = a.product(&x, &x).unwrap();
        assert!(a.tau_norm(&(&u * a.identity() - x2)) < 1e-10);
    }

    #[test]
    fn quad_rep_inverse_identity() {
        let a = catalog::herm_complex(2);
        let x = dvector![2.0, 0.5, 0.3, -0.2];
        let u = a.quad_rep(&x).unwrap();
        let xinv = a.inverse(&x).unwrap();
        assert!(a.tau_norm(&(&u * &xinv - x)) < 1e-8);
        let uinv = a.quad_rep(&xinv).unwrap();
        assert!((u * uinv - DMatrix::<f64>::identity(4, 4)).amax() < 1e-8);
    }

    #[test]
    fn center_dimensions() {
        assert_eq!(catalog::abelian(3).center().unwrap().len(), 3);
        let c = catalog::herm_complex(2).center().unwrap();
        assert_eq!(c.len(), 1);
        let a = catalog::herm_complex(2);
        let e_dir = a.identity() / a.tau_norm(a.identity());
        assert!((c[0].dot(&(&a.trace_form * &e_dir)).abs() - 1.0).abs() < 1e-9);
        let sum = catalog::direct_sum(&catalog::herm_complex(2), &catalog::herm_complex(2)).unwrap();
        assert_eq!(sum.center().unwrap().len(), 2);
    }

    #[test]
    fn center_elements_commute() {
        let a = catalog::direct_sum(&catalog::sym_real(2), &catalog::abelian(2)).unwrap();
        for z in a.center().unwrap() {
            let lz = a.l_operator(&z).unwrap();
            for i in 0..a.dim() {
                let mut b = DVector::zeros(a.dim());
                b[i] = 1.0;
                let lb = a.l_operator(&b).unwrap();
                assert!((&lz * &lb - &lb * &lz).amax() < 1e-9);
            }
        }
    }

    #[test]
    fn verify_jb_passes_on_catalog() {
        for a in [catalog::herm_complex(3), catalog::spin_factor(5)] {
            let r = a.verify_jb(100, 42).unwrap();
            assert!(r.pass, "expected pass, got {r:?}");
        }
    }

    #[test]
    fn verify_jb_fails_on_perturbed_structure() {
        let a = catalog::herm_complex(2);
        let mut structure = a.structure().to_vec();
        // Perturb an entry away from the identity's support so construction
        // still succeeds while the Jordan identity breaks.
        structure[2][(2, 3)] += 1e-2;
        structure[2][(3, 2)] += 1e-2;
        let bad = AlgebraSpec::new("perturbed", structure, a.identity().clone(), Some(a.trace_form().clone())).unwrap();
        let r = bad.verify_jb(100, 42).unwrap();
        assert!(!r.pass);
        assert!(r.jordan_identity >= 1e-3, "jordan residual {:.3e}", r.jordan_identity);
    }

    #[test]
    fn asymmetric_structure_rejected() {
        let a = catalog::abelian(2);
        let mut structure = a.structure().to_vec();
        structure[0][(0, 1)] += 1e-3;
        let err = AlgebraSpec::new("bad", structure, a.identity().clone(), None);
        assert!(matches!(err, Err(Error::AsymmetricStructure { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_commutative_and_jordan(seed in 0u64..1 << 16) {
            let a = catalog::herm_complex(2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = a.sample_gaussian(&mut rng);
            let y = a.sample_gaussian(&mut rng);
            let xy = a.product(&x, &y).unwrap();
            let yx = a.product(&y, &x).unwrap();
            prop_assert!(a.tau_norm(&(&xy - &yx)) <= 1e-12 * (1.0 + a.tau_norm(&x) * a.tau_norm(&y)));
            let x2 = a.product(&x, &x).unwrap();
            let lhs = a.product(&x, &a.product(&y, &x2).unwrap()).unwrap();
            let rhs = a.product(&xy, &x2).unwrap();
            let scale = a.tau_norm(&x).powi(2) * a.tau_norm(&y);
            prop_assert!(a.tau_norm(&(lhs - rhs)) <= 1e-10 * (1.0 + scale));
        }

        #[test]
        fn prop_spectral_reconstruction(seed in 0u64..1 << 16) {
            let a = catalog::spin_factor(3);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = a.sample_gaussian(&mut rng);
            let s = a.spectral(&x).unwrap();
            let mut recon = DVector::zeros(a.dim());
            let mut total = DVector::zeros(a.dim());
            for (l, f) in s.values.iter().zip(&s.frame) {
                recon += f * *l;
                total += f;
            }
            prop_assert!(a.tau_norm(&(recon - &x)) <= 1e-9 * (1.0 + a.tau_norm(&x)));
            prop_assert!(a.tau_norm(&(total - a.identity())) <= 1e-9);
        }
    }
}

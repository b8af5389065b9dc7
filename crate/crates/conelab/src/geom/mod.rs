//! Symmetric-cone geometry: point symmetries, the invariant tangent norm, the
//! exponential chart, the Cartan decomposition of linear vector fields, and
//! recovery of the Jordan product from a bare cone oracle.

pub mod oracle;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jalg::{AlgebraSpec, Element};
use crate::order::{self, Positivity};
use crate::orient;

fn require_interior(a: &AlgebraSpec, x: &Element) -> Result<()> {
    match order::positivity(a, x)? {
        Positivity::Interior => Ok(()),
        _ => {
            let min = a.spectral_values(x)?.into_iter().fold(f64::INFINITY, f64::min);
            Err(Error::NotInterior { min_spectral: min })
        }
    }
}

/// The symmetry of the cone at `p`, realised as `s_p(x) = U_p(x^{-1})`.
/// At the identity this is Jordan inversion.
pub fn symmetry_at(a: &AlgebraSpec, p: &Element, x: &Element) -> Result<Element> {
    require_interior(a, p)?;
    let xinv = a.inverse(x)?;
    Ok(a.quad_rep(p)? * xinv)
}

/// The invariant tangent norm `ν(p, v) = ‖v‖_p` (order-unit seminorm at `p`).
pub fn tangent_norm(a: &AlgebraSpec, p: &Element, v: &Element) -> Result<f64> {
    order::order_unit_seminorm(a, p, v)
}

/// A cone point from the exponential chart, `exp(L_v) e`.
pub fn exp_chart(a: &AlgebraSpec, v: &Element) -> Result<Element> {
    Ok(a.l_operator(v)?.exp() * a.identity())
}

/// Draws an interior point by pushing a Gaussian through the exponential chart.
pub fn sample_interior(a: &AlgebraSpec, rng: &mut impl Rng, spread: f64) -> Result<Element> {
    let v = a.sample_gaussian(rng) * spread;
    exp_chart(a, &v)
}

/// The map `g = U_{p^{1/2}} U_{u^{-1/2}}` carrying `u` to `p` inside the
/// automorphism group of the cone.
pub fn transitive_map(a: &AlgebraSpec, u: &Element, p: &Element) -> Result<DMatrix<f64>> {
    require_interior(a, u)?;
    require_interior(a, p)?;
    let p_sqrt = a.sqrt_element(p)?;
    let u_inv_sqrt = a.inv_sqrt_element(u)?;
    Ok(a.quad_rep(&p_sqrt)? * a.quad_rep(&u_inv_sqrt)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub samples: usize,
    pub cone_preserved: bool,
    /// Max of `|ν(gp, gv) − ν(p, v)|` over samples, relative.
    pub isometry_residual: f64,
}

/// Checks that `g` preserves the cone and the tangent norm on sampled pairs.
pub fn g_invariance_check(
    a: &AlgebraSpec,
    g: &DMatrix<f64>,
    samples: usize,
    seed: u64,
) -> Result<InvarianceReport> {
    if g.nrows() != a.dim() || g.ncols() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: g.nrows() });
    }
    if g.clone().try_inverse().is_none() {
        return Err(Error::SingularMap { context: "g_invariance_check requires invertible g".into() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cone_preserved = true;
    let mut isometry_residual = 0.0_f64;
    for _ in 0..samples {
        let p = sample_interior(a, &mut rng, 0.6)?;
        let v = a.sample_gaussian(&mut rng);
        let gp = g * &p;
        if order::positivity(a, &gp)? != Positivity::Interior {
            cone_preserved = false;
            continue;
        }
        let nu = tangent_norm(a, &p, &v)?;
        let nu_g = tangent_norm(a, &gp, &(g * &v))?;
        isometry_residual = isometry_residual.max((nu - nu_g).abs() / (1.0 + nu));
    }
    Ok(InvarianceReport { samples, cone_preserved, isometry_residual })
}

/// Cartan involution on linear vector fields: the first-order data of
/// `Ad(s_e)` at `e` is exactly `θ(M) = M − 2 L_{M e}`. Derivations (with
/// `Me = 0`) are fixed; multiplication operators are negated.
pub fn theta_apply(a: &AlgebraSpec, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let me = m * a.identity();
    Ok(m - a.l_operator(&me)? * 2.0)
}

/// Cartan decomposition of the linear part of the automorphism Lie algebra:
/// `k_basis` spans the θ-fixed derivations, `p_basis` the θ-negated
/// multiplication operators `L_a`.
#[derive(Debug, Clone)]
pub struct CartanSplit {
    pub k_basis: Vec<DMatrix<f64>>,
    pub p_basis: Vec<DMatrix<f64>>,
    /// `max ‖θ²(X) − X‖` over the span generators.
    pub involution_residual: f64,
    /// Residual of `[p, p] ⊂ k` (projection defect onto the derivation span).
    pub grading_residual: f64,
    /// Residual of the eigenspace split: θ-fixedness of `k`, θ-negation of `p`.
    pub split_residual: f64,
}

/// Builds the linear part of the cone's Lie algebra as `{L_a} ⊕ aut V` and
/// verifies the Cartan grading under θ.
pub fn lie_algebra_linear(a: &AlgebraSpec) -> Result<(Vec<DMatrix<f64>>, CartanSplit)> {
    let deriv = orient::derivation_space(a)?;
    let dim = a.dim();
    let mut p_basis = Vec::with_capacity(dim);
    let onb = a.tau_orthonormal_basis();
    for i in 0..dim {
        let b: Element = onb.column(i).into_owned();
        p_basis.push(a.l_operator(&b)?);
    }
    let k_basis = deriv.basis.clone();

    let mut involution_residual = 0.0_f64;
    let mut split_residual = 0.0_f64;
    for (mats, sign) in [(&k_basis, 1.0), (&p_basis, -1.0)] {
        for m in mats.iter() {
            let tm = theta_apply(a, m)?;
            let ttm = theta_apply(a, &tm)?;
            involution_residual = involution_residual.max(a.op_frobenius(&(&ttm - m)));
            split_residual = split_residual.max(a.op_frobenius(&(&tm - m * sign)) / (1.0 + a.op_frobenius(m)));
        }
    }

    // [p, p] ⊂ k: brackets of multiplication operators must lie in the
    // derivation span.
    let mut grading_residual = 0.0_f64;
    for i in 0..p_basis.len() {
        for j in (i + 1)..p_basis.len() {
            let br = &p_basis[i] * &p_basis[j] - &p_basis[j] * &p_basis[i];
            let defect = deriv.projection_defect(a, &br);
            grading_residual = grading_residual.max(defect);
        }
    }

    let mut full = p_basis.clone();
    full.extend(k_basis.iter().cloned());
    Ok((
        full,
        CartanSplit { k_basis, p_basis, involution_residual, grading_residual, split_residual },
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct EvaluationReport {
    pub bijective: bool,
    pub condition_number: f64,
    /// `max ‖L(a)(e) − a‖` over basis vectors after reconstructing `L` through
    /// the inverse evaluation map.
    pub reconstruction_residual: f64,
}

/// Checks that evaluation at `e` restricted to the `p`-part is a linear
/// bijection onto `V`, and reconstructs `L(a)` through its inverse.
pub fn evaluation_bijection_check(a: &AlgebraSpec, split: &CartanSplit) -> Result<EvaluationReport> {
    let dim = a.dim();
    if split.p_basis.len() != dim {
        return Err(Error::SingularMap {
            context: format!("p-part has dimension {} but V has dimension {}", split.p_basis.len(), dim),
        });
    }
    let mut eval = DMatrix::zeros(dim, dim);
    for (c, x) in split.p_basis.iter().enumerate() {
        eval.set_column(c, &(x * a.identity()));
    }
    let svd = eval.clone().svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let bijective = smin > 1e-10 * smax;
    if !bijective {
        return Ok(EvaluationReport {
            bijective,
            condition_number: f64::INFINITY,
            reconstruction_residual: f64::INFINITY,
        });
    }
    let inv = eval.clone().try_inverse().ok_or(Error::SingularMap { context: "evaluation map".into() })?;
    // L(a) = Σ_c (inv a)_c X_c ; check L(a)(e) = a and L(a) = L_a.
    let mut reconstruction_residual = 0.0_f64;
    for i in 0..dim {
        let mut basis = DVector::zeros(dim);
        basis[i] = 1.0;
        let coeff = &inv * &basis;
        let mut l = DMatrix::zeros(dim, dim);
        for (c, x) in split.p_basis.iter().enumerate() {
            l += x * coeff[c];
        }
        let back = &l * a.identity();
        reconstruction_residual =
            reconstruction_residual.max(a.tau_norm(&(back - &basis)) / (1.0 + a.tau_norm(&basis)));
        let direct = a.l_operator(&basis)?;
        reconstruction_residual = reconstruction_residual.max(a.op_frobenius(&(l - &direct)) / (1.0 + a.op_frobenius(&direct)));
    }
    Ok(EvaluationReport { bijective, condition_number: smax / smin, reconstruction_residual })
}

/// Geometry verification summary used by the CLI.
#[derive(Debug, Clone, Serialize)]
pub struct GeometryReport {
    pub symmetry_involution: f64,
    pub symmetry_fixed_point: f64,
    /// `max ‖ds_p(p) + I‖` estimated by finite differences.
    pub symmetry_derivative: f64,
    pub isometry_residual: f64,
    /// Compatibility sandwich against the identity chart: bounds r, R with
    /// `r ‖v‖ ≤ ν(p, v) ≤ R ‖v‖` over the sampled neighbourhood of e.
    pub sandwich_lower: f64,
    pub sandwich_upper: f64,
    pub cartan_involution: f64,
    pub cartan_grading: f64,
    pub cartan_split: f64,
    pub evaluation_bijective: bool,
    pub evaluation_condition: f64,
    pub exp_chart_spectral: f64,
    pub p_dim: usize,
    pub k_dim: usize,
    pub pass: bool,
}

/// Runs the symmetric-cone checks at tolerance `tol` on `samples` seeded draws.
pub fn geometry_report(a: &AlgebraSpec, samples: usize, seed: u64, tol: f64) -> Result<GeometryReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut involution = 0.0_f64;
    let mut fixed_point = 0.0_f64;
    let mut derivative = 0.0_f64;
    let mut isometry = 0.0_f64;
    let mut exp_spectral = 0.0_f64;
    let mut sandwich_lower = f64::INFINITY;
    let mut sandwich_upper = 0.0_f64;
    for _ in 0..samples {
        let p = sample_interior(a, &mut rng, 0.5)?;
        let x = sample_interior(a, &mut rng, 0.5)?;

        // ν(p, ·) is equivalent to the flat chart norm on a neighbourhood of e.
        let t = a.sample_gaussian(&mut rng);
        let tn = a.tau_norm(&t);
        if tn > 0.0 {
            let ratio = tangent_norm(a, &p, &t)? / tn;
            sandwich_lower = sandwich_lower.min(ratio);
            sandwich_upper = sandwich_upper.max(ratio);
        }
        let sx = symmetry_at(a, &p, &x)?;
        let ssx = symmetry_at(a, &p, &sx)?;
        involution = involution.max(a.tau_norm(&(ssx - &x)) / (1.0 + a.tau_norm(&x)));
        let sp = symmetry_at(a, &p, &p)?;
        fixed_point = fixed_point.max(a.tau_norm(&(sp - &p)) / (1.0 + a.tau_norm(&p)));

        // ds_p at p should be −I: finite differences along a random direction.
        let v = a.sample_gaussian(&mut rng);
        let h = 1e-5 / (1.0 + a.tau_norm(&v));
        let plus = symmetry_at(a, &p, &(&p + &v * h))?;
        let minus = symmetry_at(a, &p, &(&p - &v * h))?;
        let ds = (plus - minus) / (2.0 * h);
        derivative = derivative.max(a.tau_norm(&(ds + &v)) / (1.0 + a.tau_norm(&v)));

        // s_p is a ν-isometry (finite-difference pushforward of tangents).
        let w = a.sample_gaussian(&mut rng);
        let hw = 1e-5 / (1.0 + a.tau_norm(&w));
        let fwd = (symmetry_at(a, &p, &(&x + &w * hw))? - symmetry_at(a, &p, &(&x - &w * hw))?) / (2.0 * hw);
        let nu = tangent_norm(a, &x, &w)?;
        let nu_push = tangent_norm(a, &sx, &fwd)?;
        isometry = isometry.max((nu - nu_push).abs() / (1.0 + nu));

        // exp chart maps spectra exponentially.
        let u = a.sample_gaussian(&mut rng) * 0.5;
        let eu = exp_chart(a, &u)?;
        let mut want: Vec<f64> = a.spectral_values(&u)?.iter().map(|l| l.exp()).collect();
        want.sort_by(|p, q| p.partial_cmp(q).unwrap());
        let got = a.spectral_values(&eu)?;
        if got.len() == want.len() {
            for (g, w) in got.iter().zip(&want) {
                exp_spectral = exp_spectral.max((g - w).abs() / (1.0 + w.abs()));
            }
        } else {
            // merged exponentials: compare extremes
            exp_spectral = exp_spectral.max(
                (got[0] - want[0]).abs().max((got[got.len() - 1] - want[want.len() - 1]).abs()),
            );
        }
    }
    let (_, split) = lie_algebra_linear(a)?;
    let eval = evaluation_bijection_check(a, &split)?;
    let pass = involution <= tol
        && fixed_point <= tol
        && derivative <= 1e-6_f64.max(tol)
        && isometry <= 1e-6_f64.max(tol)
        && sandwich_lower > 0.0
        && sandwich_upper.is_finite()
        && split.involution_residual <= tol
        && split.grading_residual <= tol
        && split.split_residual <= tol
        && eval.bijective
        && exp_spectral <= tol.max(1e-8);
    Ok(GeometryReport {
        symmetry_involution: involution,
        symmetry_fixed_point: fixed_point,
        symmetry_derivative: derivative,
        isometry_residual: isometry,
        sandwich_lower,
        sandwich_upper,
        cartan_involution: split.involution_residual,
        cartan_grading: split.grading_residual,
        cartan_split: split.split_residual,
        evaluation_bijective: eval.bijective,
        evaluation_condition: eval.condition_number,
        exp_chart_spectral: exp_spectral,
        p_dim: split.p_basis.len(),
        k_dim: split.k_basis.len(),
        pass,
    })
}

/// Recovers the Jordan product from a cone oracle by differentiating the
/// transvection `t ↦ (s_{γ(t/2)} ∘ s_e)(b)` along `γ(t) = exp_chart(t a)`.
/// Central differences give an `O(h²)` approximation of `a ∘ b`.
pub fn recover_product(
    oracle: &oracle::ConeOracle,
    a: &Element,
    b: &Element,
    h: f64,
) -> Result<Element> {
    if !(1e-6..=1e-2).contains(&h) {
        return Err(Error::InvalidParameter(format!("step {h:.3e} outside (1e-6, 1e-2)")));
    }
    let e = &oracle.base_point;
    let sb = oracle.symmetry(e, b)?;
    // Involution sanity on the operand.
    let back = oracle.symmetry(e, &sb)?;
    let residual = (&back - b).norm() / (1.0 + b.norm());
    if residual > 1e-6 {
        return Err(Error::UnreliableOracle { residual, tolerance: 1e-6 });
    }
    let gamma_plus = oracle.exp(&(a * (h / 2.0)))?;
    let gamma_minus = oracle.exp(&(a * (-h / 2.0)))?;
    let f_plus = oracle.symmetry(&gamma_plus, &sb)?;
    let f_minus = oracle.symmetry(&gamma_minus, &sb)?;
    Ok((f_plus - f_minus) / (2.0 * h))
}

/// Recovers the full structure tensor from a cone oracle. Basis directions are
/// probed through interior shifts `e ± σ b_j`, so the oracle is only ever
/// evaluated at invertible points.
pub fn recover_structure_tensor(oracle: &oracle::ConeOracle, h: f64) -> Result<Vec<DMatrix<f64>>> {
    let dim = oracle.dim;
    let mut tensor = vec![DMatrix::zeros(dim, dim); dim];
    for i in 0..dim {
        let mut ei = DVector::zeros(dim);
        ei[i] = 1.0;
        for j in i..dim {
            let mut ej = DVector::zeros(dim);
            ej[j] = 1.0;
            let sigma = 0.25 / (1.0 + ej.norm());
            let plus = recover_product(oracle, &ei, &(&oracle.base_point + &ej * sigma), h)?;
            let minus = recover_product(oracle, &ei, &(&oracle.base_point - &ej * sigma), h)?;
            let prod: Element = (plus - minus) / (2.0 * sigma);
            for k in 0..dim {
                tensor[k][(i, j)] = prod[k];
                tensor[k][(j, i)] = prod[k];
            }
        }
    }
    Ok(tensor)
}

/// Projection defect helpers shared with `orient`.
pub(crate) fn span_projection_defect(
    a: &AlgebraSpec,
    basis: &[DMatrix<f64>],
    m: &DMatrix<f64>,
) -> f64 {
    // basis is orthonormal under the τ-Frobenius pairing.
    let mut resid = m.clone();
    for b in basis {
        let c = tau_frobenius_inner(a, b, &resid);
        resid -= b * c;
    }
    a.op_frobenius(&resid) / (1.0 + a.op_frobenius(m))
}

/// Frobenius pairing of operators in trace-form-orthonormal coordinates.
pub(crate) fn tau_frobenius_inner(a: &AlgebraSpec, x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    a.op_transform(x).dot(&a.op_transform(y))
}

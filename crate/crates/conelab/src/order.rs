//! Order structure of the cone Ω = interior{x²}: order-unit seminorms,
//! positivity verdicts, properness and normality estimates, and state-space
//! separation.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jalg::{AlgebraSpec, Element};

/// Verdict of the spectral membership test, with a scale-relative boundary
/// band `1e-9 · (1 + ‖x‖_e)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Positivity {
    Interior,
    Boundary,
    Outside,
}

/// Order-unit seminorm `‖x‖_base = inf{λ : −λ·base ≤ x ≤ λ·base}`, computed as
/// the spectral radius of `U_{base^{-1/2}} x`. The base point must be interior.
pub fn order_unit_seminorm(a: &AlgebraSpec, base: &Element, x: &Element) -> Result<f64> {
    if base == a.identity() {
        return a.spectral_radius(x);
    }
    let vals = a.spectral_values(base)?;
    let scale = vals.iter().fold(0.0_f64, |m, &l| m.max(l.abs()));
    let min = vals.iter().fold(f64::INFINITY, |m, &l| m.min(l));
    if min <= 1e-12 * (1.0 + scale) {
        return Err(Error::NotInterior { min_spectral: min });
    }
    let inv_sqrt = a.inv_sqrt_element(base)?;
    let u = a.quad_rep(&inv_sqrt)?;
    a.spectral_radius(&(&u * x))
}

/// Order-unit norm at the identity, `max |λ_i(x)|`.
pub fn order_unit_norm(a: &AlgebraSpec, x: &Element) -> Result<f64> {
    a.spectral_radius(x)
}

pub fn positivity(a: &AlgebraSpec, x: &Element) -> Result<Positivity> {
    let vals = a.spectral_values(x)?;
    let radius = vals.iter().fold(0.0_f64, |m, &l| m.max(l.abs()));
    let min = vals.iter().fold(f64::INFINITY, |m, &l| m.min(l));
    let tol = 1e-9 * (1.0 + radius);
    Ok(if min > tol {
        Positivity::Interior
    } else if min >= -tol {
        Positivity::Boundary
    } else {
        Positivity::Outside
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PropernessReport {
    pub proper: bool,
    pub kernel_dim: usize,
    /// Coordinates of an orthonormal (trace-form) kernel basis.
    pub kernel: Vec<Vec<f64>>,
    /// Whether the kernel estimate survived the seminorm-invariance cross-check.
    pub consistent: bool,
}

/// Estimates the seminorm kernel `{x : ‖x‖_e = 0}` from a basis probe.
///
/// Probes every basis vector and all pairwise sums and differences; directions
/// with an all-zero spectrum span the kernel candidate, which is then
/// cross-checked by seminorm invariance `‖y + z‖_e = ‖y‖_e` on random samples.
/// The cone is proper iff the kernel is trivial.
pub fn properness_check(a: &AlgebraSpec) -> Result<PropernessReport> {
    let dim = a.dim();
    let mut probes: Vec<Element> = Vec::new();
    for i in 0..dim {
        let mut b = DVector::zeros(dim);
        b[i] = 1.0;
        probes.push(b);
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let mut p = DVector::zeros(dim);
            p[i] = 1.0;
            p[j] = 1.0;
            probes.push(p.clone());
            p[j] = -1.0;
            probes.push(p);
        }
    }
    let mut candidates = Vec::new();
    for p in &probes {
        let radius = match a.spectral_radius(p) {
            Ok(r) => r,
            // A degenerate minimal polynomial cannot certify a zero spectrum.
            Err(_) => continue,
        };
        if radius <= 1e-8 * (1.0 + a.tau_norm(p)) {
            candidates.push(p.clone());
        }
    }
    let kernel = a.tau_orthonormalize(&candidates);
    let mut consistent = true;
    if !kernel.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0DE);
        for _ in 0..20 {
            let y = a.sample_gaussian(&mut rng);
            let mut z: Element = DVector::zeros(dim);
            for k in &kernel {
                z += k * rng.random_range(-2.0..2.0);
            }
            let ny = match a.spectral_radius(&y) {
                Ok(n) => n,
                Err(_) => continue,
            };
            let nyz = match a.spectral_radius(&(y + &z)) {
                Ok(n) => n,
                Err(_) => {
                    consistent = false;
                    continue;
                }
            };
            if (ny - nyz).abs() > 1e-6 * (1.0 + ny) {
                consistent = false;
            }
        }
    }
    Ok(PropernessReport {
        proper: kernel.is_empty(),
        kernel_dim: kernel.len(),
        kernel: kernel.iter().map(|k| k.iter().cloned().collect()).collect(),
        consistent,
    })
}

/// Which ambient norm the normality constant is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmbientNorm {
    TraceForm,
    OrderUnit,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalityEstimate {
    /// Empirical max of `‖x‖ / ‖y‖` over sampled `0 ≤ x ≤ y`.
    pub gamma: f64,
    /// Largest sampled radius with `e − B(0, r) ⊂ Ω` (ambient trace-form ball).
    pub inner_radius: f64,
    /// Empirical equivalence constants: `‖v‖_e ≤ upper · ‖v‖_τ` and
    /// `‖v‖_τ ≤ lower⁻¹... `lower ≤ ‖v‖_e / ‖v‖_τ ≤ upper` over samples.
    pub equiv_lower: f64,
    pub equiv_upper: f64,
    /// The bound `2 / r` that must dominate `equiv_upper`.
    pub radius_bound: f64,
    pub directions: usize,
    pub samples: usize,
}

/// Samples the normality constant γ and the inner radius r of the order
/// interval geometry. Bisection over 200 sphere directions, 40 steps each.
pub fn normality_estimate(a: &AlgebraSpec, seed: u64) -> Result<NormalityEstimate> {
    normality_estimate_with(a, AmbientNorm::TraceForm, 200, 40, 200, seed)
}

pub fn normality_estimate_with(
    a: &AlgebraSpec,
    norm: AmbientNorm,
    directions: usize,
    bisection_steps: usize,
    samples: usize,
    seed: u64,
) -> Result<NormalityEstimate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ambient = |a: &AlgebraSpec, v: &Element| -> Result<f64> {
        match norm {
            AmbientNorm::TraceForm => Ok(a.tau_norm(v)),
            AmbientNorm::OrderUnit => a.spectral_radius(v),
        }
    };

    // Inner radius: for each unit direction d (probed with both signs), bisect
    // the largest t with e − t·d interior; r is the minimum over directions.
    // Rays that stay interior past the cap impose no constraint.
    let mut inner_radius = f64::INFINITY;
    for _ in 0..directions {
        let g = a.sample_gaussian(&mut rng);
        let n = ambient(a, &g)?;
        if n == 0.0 {
            continue;
        }
        for sign in [1.0, -1.0] {
            let d = &g * (sign / n);
            let interior_at = |t: f64| -> bool {
                matches!(positivity(a, &(a.identity() - &d * t)), Ok(Positivity::Interior))
            };
            let mut hi = 1.0;
            let mut doublings = 0;
            let mut unbounded = false;
            while interior_at(hi) {
                hi *= 2.0;
                doublings += 1;
                if doublings >= 32 {
                    unbounded = true;
                    break;
                }
            }
            if unbounded {
                continue;
            }
            let mut lo = 0.0;
            for _ in 0..bisection_steps {
                let mid = 0.5 * (lo + hi);
                if interior_at(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            inner_radius = inner_radius.min(lo);
        }
    }

    // γ: sample 0 ≤ x ≤ y with x a square and y = x + (another square).
    let mut gamma = 0.0_f64;
    for _ in 0..samples {
        let u = a.sample_gaussian(&mut rng);
        let v = a.sample_gaussian(&mut rng);
        let x = a.product(&u, &u)?;
        let w = a.product(&v, &v)?;
        let y = &x + &w;
        let nx = ambient(a, &x)?;
        let ny = ambient(a, &y)?;
        if ny > 1e-300 {
            gamma = gamma.max(nx / ny);
        }
    }

    // Equivalence constants between ‖·‖_e and the ambient norm.
    let mut equiv_lower = f64::INFINITY;
    let mut equiv_upper = 0.0_f64;
    for _ in 0..samples {
        let v = a.sample_gaussian(&mut rng);
        let na = ambient(a, &v)?;
        if na <= 1e-300 {
            continue;
        }
        let ne = a.spectral_radius(&v)?;
        equiv_lower = equiv_lower.min(ne / na);
        equiv_upper = equiv_upper.max(ne / na);
    }

    Ok(NormalityEstimate {
        gamma,
        inner_radius,
        equiv_lower,
        equiv_upper,
        radius_bound: 2.0 / inner_radius,
        directions,
        samples,
    })
}

/// A normalised positive functional `f` with `f(e) = 1`, stored as the
/// trace-form representer: `f(x) = τ(coords, x)`.
#[derive(Debug, Clone)]
pub struct StateFunctional {
    pub coords: Element,
}

impl StateFunctional {
    /// Builds the conic state `f_q(·) = τ(U_q ·, e) / τ(U_q e, e)`. Returns
    /// `None` when the normalisation denominator degenerates.
    pub fn from_conic(a: &AlgebraSpec, q: &Element) -> Result<Option<Self>> {
        let u = a.quad_rep(q)?;
        let denom = a.tau(&(&u * a.identity()), a.identity());
        if denom.abs() < 1e-10 * (1.0 + a.tau_norm(q).powi(2)) {
            return Ok(None);
        }
        // τ(U_q x, e) = τ(U_qᵀ_τ e, x); the τ-adjoint of U_q is G⁻¹ U_qᵀ G.
        let ge = a.trace_form() * a.identity();
        let rep = u.transpose() * ge;
        let coords = a
            .tau_orthonormal_basis()
            * (a.tau_orthonormal_basis().transpose() * rep / denom);
        Ok(Some(StateFunctional { coords }))
    }

    pub fn eval(&self, a: &AlgebraSpec, x: &Element) -> f64 {
        a.tau(&self.coords, x)
    }

    /// Normalisation and positivity on sampled squares.
    pub fn validate(&self, a: &AlgebraSpec, samples: usize, seed: u64) -> Result<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let norm_residual = (self.eval(a, a.identity()) - 1.0).abs();
        let mut min_on_squares = f64::INFINITY;
        for _ in 0..samples {
            let x = a.sample_gaussian(&mut rng);
            let sq = a.product(&x, &x)?;
            min_on_squares = min_on_squares.min(self.eval(a, &sq) / (1.0 + a.tau_norm(&sq)));
        }
        Ok((norm_residual, min_on_squares))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StateSeparation {
    pub positive: bool,
    /// Minimum of `f(x)` over the sampled states.
    pub min_value: f64,
    pub states: usize,
}

/// Tests strict positivity of `x` against sampled states
/// `f_q(·) = τ(U_q ·, e) / τ(U_q e, e)`, augmented with the states induced by
/// the spectral frame of `x` itself (which witness the minimum eigenvalue).
/// Requires a proper cone.
pub fn state_separation(a: &AlgebraSpec, x: &Element, sample_count: usize, seed: u64) -> Result<StateSeparation> {
    let prop = properness_check(a)?;
    if !prop.proper {
        return Err(Error::PropernessViolated { kernel_dim: prop.kernel_dim });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = a.identity();
    let mut min_value = f64::INFINITY;
    let mut states = 0;

    let mut visit = |f: Option<StateFunctional>| {
        if let Some(f) = f {
            min_value = min_value.min(f.eval(a, x));
            states += 1;
        }
    };

    // The trace state (q = e) is always included.
    visit(StateFunctional::from_conic(a, e)?);
    for _ in 0..sample_count {
        let q = a.sample_gaussian(&mut rng);
        // Keep q² well-conditioned: reject nearly singular samples.
        let vals = match a.spectral_values(&q) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let radius = vals.iter().fold(0.0_f64, |m, &l| m.max(l.abs()));
        if vals.iter().any(|&l| l.abs() < 1e-4 * (1.0 + radius)) {
            continue;
        }
        visit(StateFunctional::from_conic(a, &q)?);
    }
    // Frame states of x pick out its eigenvalues exactly.
    if let Ok(spec) = a.spectral(x) {
        for f in &spec.frame {
            visit(StateFunctional::from_conic(a, f)?);
        }
    }
    Ok(StateSeparation { positive: min_value > 0.0, min_value, states })
}

/// Aggregate order report for machine consumption.
#[derive(Debug, Clone, Serialize)]
pub struct OrderReport {
    pub kernel_dim: usize,
    pub gamma: f64,
    pub r: f64,
    pub state_sample_size: usize,
    /// Fraction of sampled points where state separation and the spectral
    /// positivity verdict agree.
    pub agreements: f64,
    pub max_residuals: OrderResiduals,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderResiduals {
    /// `| ‖x²‖_e − ‖x‖_e² |` over samples (JB norm identity).
    pub square_norm: f64,
    /// Triangle inequality defect `max(0, ‖x+y‖ − ‖x‖ − ‖y‖)`.
    pub triangle: f64,
    /// Homogeneity defect `| ‖αx‖ − |α|‖x‖ |`.
    pub homogeneity: f64,
}

pub fn order_report(a: &AlgebraSpec, samples: usize, seed: u64) -> Result<OrderReport> {
    let prop = properness_check(a)?;
    let normality = normality_estimate(a, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
    let mut residuals = OrderResiduals { square_norm: 0.0, triangle: 0.0, homogeneity: 0.0 };
    let mut agree = 0usize;
    let mut total = 0usize;
    for i in 0..samples {
        let x = a.sample_gaussian(&mut rng);
        let y = a.sample_gaussian(&mut rng);
        let nx = a.spectral_radius(&x)?;
        let ny = a.spectral_radius(&y)?;
        let nxy = a.spectral_radius(&(&x + &y))?;
        residuals.triangle = residuals.triangle.max((nxy - nx - ny).max(0.0) / (nx + ny).max(1e-300));
        let x2 = a.product(&x, &x)?;
        let nx2 = a.spectral_radius(&x2)?;
        residuals.square_norm = residuals.square_norm.max((nx2 - nx * nx).abs() / (nx * nx).max(1e-300));
        let alpha: f64 = rng.random_range(-3.0..3.0);
        let nax = a.spectral_radius(&(&x * alpha))?;
        residuals.homogeneity =
            residuals.homogeneity.max((nax - alpha.abs() * nx).abs() / (alpha.abs() * nx).max(1e-300));
        if prop.proper && i < samples.min(50) {
            let sep = state_separation(a, &x, 40, seed ^ (i as u64))?;
            let verdict = positivity(a, &x)?;
            total += 1;
            let spectral_positive = verdict == Positivity::Interior;
            if sep.positive == spectral_positive {
                agree += 1;
            }
        }
    }
    Ok(OrderReport {
        kernel_dim: prop.kernel_dim,
        gamma: normality.gamma,
        r: normality.inner_radius,
        state_sample_size: total,
        agreements: if total == 0 { 1.0 } else { agree as f64 / total as f64 },
        max_residuals: residuals,
    })
}

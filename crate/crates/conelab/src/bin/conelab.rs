//! Command-line surface: catalog management, verification pipelines, and
//! machine-readable reports.
//!
//! Exit codes partition outcomes: 0 all checks pass, 1 checked failure,
//! 2 input error, 3 inconclusive orientation search.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use conelab::cstar::{self, extension};
use conelab::error::Error;
use conelab::geom;
use conelab::jalg::{catalog, io as algebra_io, AlgebraSpec};
use conelab::order;
use conelab::orient::{self, SolveOptions, SolveOutcome};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "conelab", version, about = "Numerical laboratory for symmetric cones and C*-products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the Jordan/order/geometry axioms of an algebra's cone.
    Verify(VerifyArgs),
    /// Search for an orientation and, when found, rebuild the C*-product.
    Orient(OrientArgs),
    /// Reconstruct a real C*-algebra from an orientable extension.
    Reconstruct(ReconstructArgs),
    /// Serve an algebra's cone over the stdin/stdout oracle protocol.
    OracleServe(ServeArgs),
}

#[derive(Args)]
struct AlgebraArgs {
    /// Catalog algebra name: sym_real | herm_complex | herm_quat | spin | abelian.
    #[arg(long)]
    catalog: Option<String>,
    /// Matrix side length for matrix-type catalog algebras.
    #[arg(long)]
    n: Option<usize>,
    /// Spin-factor rank.
    #[arg(long)]
    k: Option<usize>,
    /// JSON algebra description (alternative to --catalog).
    #[arg(long)]
    file: Option<PathBuf>,
    /// Relative tolerance for merging nearby spectral values.
    #[arg(long, default_value_t = 1e-7)]
    spectral_merge: f64,
}

#[derive(Args)]
struct OutputArgs {
    /// Emit the report as JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Write the report to a file (atomically) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    algebra: AlgebraArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OrientArgs {
    #[command(flatten)]
    algebra: AlgebraArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol_success: f64,
    #[arg(long, default_value_t = 1e-4)]
    tol_fail: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ReconstructArgs {
    #[command(flatten)]
    algebra: AlgebraArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ServeArgs {
    #[command(flatten)]
    algebra: AlgebraArgs,
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Orient(args) => cmd_orient(args),
        Command::Reconstruct(args) => cmd_reconstruct(args),
        Command::OracleServe(args) => cmd_oracle_serve(args),
    };
    match code {
        Ok(c) => std::process::ExitCode::from(c),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::from(2)
        }
    }
}

fn load_algebra(args: &AlgebraArgs) -> Result<AlgebraSpec, Error> {
    let spec = match (&args.catalog, &args.file) {
        (Some(name), None) => {
            let param = match name.as_str() {
                "spin" | "spin_factor" => args.k.or(args.n),
                _ => args.n.or(args.k),
            }
            .ok_or_else(|| Error::InvalidParameter(format!("--catalog {name} needs --n or --k")))?;
            catalog::by_name(name, param)?
        }
        (None, Some(path)) => algebra_io::algebra_from_path(path)?,
        _ => {
            return Err(Error::InvalidParameter(
                "exactly one of --catalog or --file is required".into(),
            ))
        }
    };
    if !(args.spectral_merge > 0.0 && args.spectral_merge < 1.0) {
        return Err(Error::InvalidParameter("--spectral-merge must lie in (0, 1)".into()));
    }
    Ok(spec.with_merge_tol(args.spectral_merge))
}

fn emit(output: &OutputArgs, report: &impl Serialize, text: String) -> Result<(), Error> {
    let body = if output.json { serde_json::to_string_pretty(report)? + "\n" } else { text };
    match &output.out {
        Some(path) => write_atomic(path, body.as_bytes()),
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct VerifyReport {
    schema: u32,
    command: &'static str,
    algebra: String,
    dim: usize,
    seed: u64,
    jb: conelab::jalg::JbReport,
    properness: order::PropernessReport,
    normality: order::NormalityEstimate,
    normality_bound_ok: bool,
    order: Option<order::OrderReport>,
    geometry: Option<geom::GeometryReport>,
    error: Option<String>,
    pass: bool,
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Error> {
    let a = load_algebra(&args.algebra)?;
    let jb = a.verify_jb(100, args.seed)?;
    let properness = order::properness_check(&a)?;
    let normality = order::normality_estimate(&a, args.seed)?;
    let normality_bound_ok = normality.equiv_upper <= normality.radius_bound + 1e-9;
    let order_summary = if properness.proper { order::order_report(&a, 60, args.seed).ok() } else { None };
    let (geometry, error) = match geom::geometry_report(&a, 20, args.seed, 1e-7) {
        Ok(g) => (Some(g), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let pass = jb.pass
        && properness.proper
        && normality_bound_ok
        && order_summary.as_ref().map(|o| o.agreements == 1.0).unwrap_or(false)
        && geometry.as_ref().map(|g| g.pass).unwrap_or(false);
    let report = VerifyReport {
        schema: SCHEMA,
        command: "verify",
        algebra: a.name().to_string(),
        dim: a.dim(),
        seed: args.seed,
        jb,
        properness,
        normality,
        normality_bound_ok,
        order: order_summary,
        geometry,
        error,
        pass,
    };
    let text = format!(
        "algebra {} (dim {})\n  jb axioms: {}\n  proper: {} (kernel dim {})\n  normality: gamma {:.3e}, r {:.3e}\n  geometry: {}\n  verdict: {}\n",
        report.algebra,
        report.dim,
        if report.jb.pass { "pass" } else { "FAIL" },
        report.properness.proper,
        report.properness.kernel_dim,
        report.normality.gamma,
        report.normality.inner_radius,
        report
            .geometry
            .as_ref()
            .map(|g| if g.pass { "pass".to_string() } else { "FAIL".to_string() })
            .unwrap_or_else(|| format!("error: {}", report.error.as_deref().unwrap_or("?"))),
        if report.pass { "PASS" } else { "FAIL" },
    );
    emit(&args.output, &report, text)?;
    Ok(if report.pass { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// orient
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct OrientReport {
    schema: u32,
    command: &'static str,
    algebra: String,
    dim: usize,
    seed: u64,
    restarts: usize,
    tol_success: f64,
    tol_fail: f64,
    verdict: String,
    residual: f64,
    derivation_dim: usize,
    witness: Option<String>,
    associativity: Option<f64>,
    cstar_identity: Option<cstar::CstarIdentityReport>,
}

fn cmd_orient(args: OrientArgs) -> Result<u8, Error> {
    if args.tol_success >= args.tol_fail || args.tol_success.is_nan() || args.tol_fail.is_nan() {
        return Err(Error::InvalidParameter("--tol-success must be below --tol-fail".into()));
    }
    let a = load_algebra(&args.algebra)?;
    let deriv = orient::derivation_space(&a)?;
    let opts = SolveOptions {
        restarts: args.restarts,
        seed: args.seed,
        tol_success: args.tol_success,
        tol_fail: args.tol_fail,
        ..SolveOptions::default()
    };
    let outcome = orient::solve_orientation(&a, &opts)?;
    let mut report = OrientReport {
        schema: SCHEMA,
        command: "orient",
        algebra: a.name().to_string(),
        dim: a.dim(),
        seed: args.seed,
        restarts: args.restarts,
        tol_success: args.tol_success,
        tol_fail: args.tol_fail,
        verdict: String::new(),
        residual: outcome.best_residual(),
        derivation_dim: deriv.dim(),
        witness: None,
        associativity: None,
        cstar_identity: None,
    };
    let code = match &outcome {
        SolveOutcome::Found(j) => {
            report.verdict = "found".into();
            let witness_path = match &args.output.out {
                Some(out) => {
                    let mut p = out.clone();
                    p.set_extension("orientation.json");
                    p
                }
                None => PathBuf::from("orientation.json"),
            };
            write_atomic(&witness_path, serde_json::to_string_pretty(&j.to_file())?.as_bytes())?;
            report.witness = Some(witness_path.display().to_string());
            let c = cstar::complexify(&a, j)?;
            report.associativity = Some(cstar::associativity_residual(&c));
            report.cstar_identity = Some(cstar::cstar_identity_check(&c, 100, args.seed)?);
            let cstar_ok = report.associativity.unwrap() <= 1e-9
                && report.cstar_identity.as_ref().unwrap().pass;
            if cstar_ok {
                0
            } else {
                1
            }
        }
        SolveOutcome::NotFound { .. } => {
            report.verdict = "not_found".into();
            1
        }
        SolveOutcome::Inconclusive { .. } => {
            report.verdict = "inconclusive".into();
            3
        }
    };
    let text = format!(
        "algebra {} (dim {}, derivations {})\n  verdict: {} (residual {:.3e})\n{}{}",
        report.algebra,
        report.dim,
        report.derivation_dim,
        report.verdict,
        report.residual,
        report
            .witness
            .as_ref()
            .map(|w| format!("  witness: {w}\n"))
            .unwrap_or_default(),
        report
            .associativity
            .map(|r| format!("  associativity residual: {r:.3e}\n"))
            .unwrap_or_default(),
    );
    emit(&args.output, &report, text)?;
    Ok(code)
}

// ---------------------------------------------------------------------------
// reconstruct
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct Dims {
    #[serde(rename = "V")]
    v: usize,
    #[serde(rename = "R(V)")]
    rv: usize,
    complexification: usize,
}

#[derive(Serialize)]
struct ReconstructReport {
    schema: u32,
    command: &'static str,
    input_algebra: String,
    seed: u64,
    orientation_residual: f64,
    associativity: f64,
    cstar_identity: f64,
    hermitian_part_match: f64,
    dims: Dims,
    extension: extension::ExtensionReport,
    psi_antiautomorphism: f64,
    reversible: bool,
    pass: bool,
}

fn build_extension(args: &ReconstructArgs) -> Result<(String, extension::ExtensionSpec), Error> {
    if let Some(path) = &args.algebra.file {
        return extension_from_file(path);
    }
    let name = args
        .algebra
        .catalog
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("reconstruct needs --catalog or --file".into()))?;
    let param = match name {
        "spin" | "spin_factor" => args.algebra.k.or(args.algebra.n),
        _ => args.algebra.n.or(args.algebra.k),
    }
    .ok_or_else(|| Error::InvalidParameter(format!("--catalog {name} needs --n or --k")))?;
    if param == 0 {
        return Err(Error::InvalidParameter("size parameter must be positive".into()));
    }
    let ext = match name {
        "sym_real" | "sym" => extension::builtin_sym_real(param)?,
        "herm_quat" | "quat" => extension::builtin_herm_quat(param)?,
        "abelian" => {
            let a = catalog::abelian(param);
            let deriv = orient::derivation_space(&a)?;
            let j = orient::Orientation::zero(&a, &deriv);
            extension::builtin_identity(a, j)?
        }
        "herm_complex" | "herm" => {
            let a = catalog::herm_complex(param);
            let j = orient::canonical_orientation(&a)?;
            extension::builtin_identity(a, j)?
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "no built-in extension for catalog `{other}`"
            )))
        }
    };
    Ok((format!("{name}({param})"), ext))
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtensionFile {
    ambient: AmbientRef,
    phi: Vec<Vec<f64>>,
    /// "canonical" (matrix catalog) or "solve".
    #[serde(default = "default_orientation_mode")]
    orientation: String,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct AmbientRef {
    #[serde(default)]
    catalog: Option<String>,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    algebra: Option<serde_json::Value>,
}

fn default_orientation_mode() -> String {
    "canonical".into()
}

fn extension_from_file(path: &Path) -> Result<(String, extension::ExtensionSpec), Error> {
    let text = std::fs::read_to_string(path)?;
    let file: ExtensionFile = serde_json::from_str(&text)?;
    let ambient = match (&file.ambient.catalog, &file.ambient.algebra) {
        (Some(name), None) => {
            let n = file.ambient.n.ok_or_else(|| {
                Error::InvalidParameter("extension ambient catalog needs `n`".into())
            })?;
            catalog::by_name(name, n)?
        }
        (None, Some(value)) => algebra_io::algebra_from_json(&value.to_string())?,
        _ => {
            return Err(Error::InvalidExtension(
                "ambient must name a catalog or embed an algebra".into(),
            ))
        }
    };
    let dim = ambient.dim();
    if file.phi.len() != dim || file.phi.iter().any(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: file.phi.len() });
    }
    let phi = nalgebra::DMatrix::from_fn(dim, dim, |i, j| file.phi[i][j]);
    let orientation = match file.orientation.as_str() {
        "canonical" => orient::canonical_orientation(&ambient)?,
        "solve" => match orient::solve_orientation(&ambient, &SolveOptions::default())? {
            SolveOutcome::Found(j) => j,
            other => {
                return Err(Error::InvalidExtension(format!(
                    "no orientation found on the ambient algebra (residual {:.3e})",
                    other.best_residual()
                )))
            }
        },
        other => {
            return Err(Error::InvalidExtension(format!("unknown orientation mode `{other}`")))
        }
    };
    let name = ambient.name().to_string();
    Ok((name, extension::ExtensionSpec::new(ambient, phi, orientation)?))
}

fn cmd_reconstruct(args: ReconstructArgs) -> Result<u8, Error> {
    let (input_name, ext) = build_extension(&args)?;
    let ext_report = extension::extension_verify(&ext, 40, args.seed)?;
    if !ext_report.pass {
        let report = serde_json::json!({
            "schema": SCHEMA,
            "command": "reconstruct",
            "input_algebra": input_name,
            "seed": args.seed,
            "extension": ext_report,
            "pass": false,
        });
        emit(
            &args.output,
            &report,
            format!("extension for {input_name}: verification FAILED\n{ext_report:?}\n"),
        )?;
        return Ok(1);
    }
    let rec = extension::real_reconstruct(&ext, 100, args.seed)?;
    let assoc = cstar::associativity_residual(&rec.complexification);
    let sub: Vec<_> = ext.fixed_basis.iter().map(|f| rec.complexification.embed(f)).collect();
    let reversibility = extension::reversibility_check(&rec.complexification, &sub)?;
    let pass = rec.report.pass && reversibility.reversible && assoc <= 1e-9;
    let report = ReconstructReport {
        schema: SCHEMA,
        command: "reconstruct",
        input_algebra: input_name,
        seed: args.seed,
        orientation_residual: ext.orientation.residual,
        associativity: assoc,
        cstar_identity: rec.report.cstar_identity,
        hermitian_part_match: rec.report.hermitian_match,
        dims: Dims {
            v: rec.report.dim_v,
            rv: rec.report.dim_rv,
            complexification: rec.report.dim_complexification,
        },
        extension: ext_report,
        psi_antiautomorphism: rec.report.psi_antiautomorphism,
        reversible: reversibility.reversible,
        pass,
    };
    let text = format!(
        "reconstruction of {}\n  dims: V {} -> R(V) {} (complexification {})\n  associativity {:.3e}, C* identity {:.3e}\n  hermitian part match {:.3e}, reversible {}\n  verdict: {}\n",
        report.input_algebra,
        report.dims.v,
        report.dims.rv,
        report.dims.complexification,
        report.associativity,
        report.cstar_identity,
        report.hermitian_part_match,
        report.reversible,
        if report.pass { "PASS" } else { "FAIL" },
    );
    emit(&args.output, &report, text)?;
    Ok(if report.pass { 0 } else { 1 })
}

fn cmd_oracle_serve(args: ServeArgs) -> Result<u8, Error> {
    let a = load_algebra(&args.algebra)?;
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    geom::oracle::serve_oracle(&a, stdin.lock(), stdout.lock())?;
    Ok(0)
}

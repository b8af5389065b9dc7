//! Drives the C ABI the way a foreign caller would: through raw pointers and
//! status codes.

use std::ffi::{CStr, CString};

use conelab_ffi::*;

fn catalog(name: &str, param: usize) -> *mut ConelabAlgebra {
    let name = CString::new(name).unwrap();
    let mut handle: *mut ConelabAlgebra = std::ptr::null_mut();
    let status = unsafe { conelab_algebra_catalog(name.as_ptr(), param, &mut handle) };
    assert_eq!(status, ConelabStatus::Ok);
    assert!(!handle.is_null());
    handle
}

#[test]
fn catalog_product_and_norm() {
    let alg = catalog("herm_complex", 2);
    unsafe {
        assert_eq!(conelab_algebra_dim(alg), 4);
        let mut e = [0.0; 4];
        assert_eq!(conelab_identity(alg, e.as_mut_ptr()), ConelabStatus::Ok);
        assert_eq!(e, [1.0, 1.0, 0.0, 0.0]);

        let mut out = [0.0; 4];
        let x = [2.0, -5.0, 0.0, 0.0];
        assert_eq!(conelab_product(alg, e.as_ptr(), x.as_ptr(), out.as_mut_ptr()), ConelabStatus::Ok);
        assert_eq!(out, x);

        let mut norm = 0.0;
        assert_eq!(conelab_order_unit_norm(alg, x.as_ptr(), &mut norm), ConelabStatus::Ok);
        assert!((norm - 5.0).abs() < 1e-10);

        let mut values = [0.0; 4];
        let mut count = 0usize;
        assert_eq!(
            conelab_spectral_values(alg, x.as_ptr(), values.as_mut_ptr(), &mut count),
            ConelabStatus::Ok
        );
        assert_eq!(count, 2);
        assert!((values[0] + 5.0).abs() < 1e-10 && (values[1] - 2.0).abs() < 1e-10);

        conelab_algebra_free(alg);
    }
}

#[test]
fn cone_oracle_surface() {
    let alg = catalog("sym_real", 2);
    unsafe {
        let mut verdict = ConelabPositivity::Outside;
        let interior = [1.0, 2.0, 0.0];
        assert_eq!(conelab_cone_member(alg, interior.as_ptr(), &mut verdict), ConelabStatus::Ok);
        assert_eq!(verdict, ConelabPositivity::Interior);
        let outside = [1.0, -1.0, 0.0];
        assert_eq!(conelab_cone_member(alg, outside.as_ptr(), &mut verdict), ConelabStatus::Ok);
        assert_eq!(verdict, ConelabPositivity::Outside);

        // s_e is Jordan inversion
        let e = [1.0, 1.0, 0.0];
        let x = [2.0, 4.0, 0.0];
        let mut out = [0.0; 3];
        assert_eq!(
            conelab_cone_symmetry(alg, e.as_ptr(), x.as_ptr(), out.as_mut_ptr()),
            ConelabStatus::Ok
        );
        assert!((out[0] - 0.5).abs() < 1e-10 && (out[1] - 0.25).abs() < 1e-10);

        // exp(0) = e and the image is interior
        let zero = [0.0; 3];
        assert_eq!(conelab_cone_exp(alg, zero.as_ptr(), out.as_mut_ptr()), ConelabStatus::Ok);
        assert_eq!(out, e);

        // non-interior base is a typed error with a readable message
        let boundary = [1.0, 0.0, 0.0];
        let status = conelab_cone_symmetry(alg, boundary.as_ptr(), x.as_ptr(), out.as_mut_ptr());
        assert_eq!(status, ConelabStatus::NotInterior);
        let msg = CStr::from_ptr(conelab_last_error_message());
        assert!(!msg.to_bytes().is_empty());

        conelab_algebra_free(alg);
    }
}

#[test]
fn verify_and_orient_through_abi() {
    let alg = catalog("herm_complex", 2);
    unsafe {
        let mut residual = f64::NAN;
        let mut pass = false;
        assert_eq!(conelab_verify_jb(alg, 50, 7, &mut residual, &mut pass), ConelabStatus::Ok);
        assert!(pass && residual <= 1e-8);

        let mut verdict = ConelabOrientationVerdict::Inconclusive;
        let mut floor = f64::NAN;
        assert_eq!(
            conelab_solve_orientation(alg, 3, 64, 1e-9, 1e-4, &mut verdict, &mut floor),
            ConelabStatus::Ok
        );
        assert_eq!(verdict, ConelabOrientationVerdict::Found);
        assert!(floor < 1e-9);
        conelab_algebra_free(alg);
    }

    let spin = catalog("spin_factor", 2);
    unsafe {
        let mut verdict = ConelabOrientationVerdict::Inconclusive;
        let mut floor = f64::NAN;
        assert_eq!(
            conelab_solve_orientation(spin, 3, 64, 1e-9, 1e-4, &mut verdict, &mut floor),
            ConelabStatus::Ok
        );
        assert_eq!(verdict, ConelabOrientationVerdict::NotFound);
        assert!(floor > 1e-2);
        conelab_algebra_free(spin);
    }
}

#[test]
fn json_ingestion_and_error_codes() {
    unsafe {
        let good = CString::new(
            r#"{"name":"ab2","dim":2,"identity":[1.0,1.0],
                "structure":[[0,0,0,1.0],[1,1,1,1.0]]}"#,
        )
        .unwrap();
        let mut handle: *mut ConelabAlgebra = std::ptr::null_mut();
        assert_eq!(conelab_algebra_from_json(good.as_ptr(), &mut handle), ConelabStatus::Ok);
        assert_eq!(conelab_algebra_dim(handle), 2);
        conelab_algebra_free(handle);

        let malformed = CString::new("{not json").unwrap();
        let mut handle: *mut ConelabAlgebra = std::ptr::null_mut();
        assert_eq!(conelab_algebra_from_json(malformed.as_ptr(), &mut handle), ConelabStatus::Json);

        let asym = CString::new(
            r#"{"name":"bad","dim":2,"identity":[1.0,1.0],
                "structure":[[0,0,0,1.0],[1,1,1,1.0],[0,0,1,0.5],[0,1,0,0.25]]}"#,
        )
        .unwrap();
        assert_eq!(
            conelab_algebra_from_json(asym.as_ptr(), &mut handle),
            ConelabStatus::InvalidArgument
        );

        let unknown = CString::new("octonion").unwrap();
        assert_eq!(
            conelab_algebra_catalog(unknown.as_ptr(), 3, &mut handle),
            ConelabStatus::InvalidArgument
        );
        let msg = CStr::from_ptr(conelab_last_error_message()).to_string_lossy().into_owned();
        assert!(msg.contains("octonion"), "message: {msg}");

        // null-pointer discipline
        assert_eq!(conelab_algebra_dim(std::ptr::null()), 0);
        assert_eq!(
            conelab_algebra_catalog(std::ptr::null(), 1, &mut handle),
            ConelabStatus::NullPointer
        );
        conelab_algebra_free(std::ptr::null_mut());
    }
}

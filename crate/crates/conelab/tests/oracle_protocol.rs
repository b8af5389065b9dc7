//! Exercises the subprocess oracle boundary: the conelab binary serves a
//! catalog cone over stdin/stdout and the client recovers the Jordan product
//! through the wire protocol alone.

use std::process::Command;

use nalgebra::{DVector, dvector};

use conelab::catalog;
use conelab::geom::oracle::process_oracle;
use conelab::geom::{recover_product, recover_structure_tensor};
use conelab::order::Positivity;

fn serve(catalog_args: &[&str], dim: usize) -> conelab::geom::oracle::ConeOracle {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_conelab"));
    cmd.arg("oracle-serve").args(catalog_args);
    process_oracle(cmd, dim).expect("spawn oracle subprocess")
}

#[test]
fn member_sym_exp_roundtrip() {
    let oracle = serve(&["--catalog", "herm_complex", "--n", "2"], 4);
    let a = catalog::herm_complex(2);
    assert!((oracle.base_point.clone() - a.identity()).norm() < 1e-12);

    assert_eq!(oracle.member(&dvector![1.0, 2.0, 0.0, 0.0]).unwrap(), Positivity::Interior);
    assert_eq!(oracle.member(&dvector![1.0, -2.0, 0.0, 0.0]).unwrap(), Positivity::Outside);
    assert_eq!(oracle.member(&dvector![1.0, 0.0, 0.0, 0.0]).unwrap(), Positivity::Boundary);

    let s = oracle.symmetry(a.identity(), &dvector![2.0, 4.0, 0.0, 0.0]).unwrap();
    assert!((s - dvector![0.5, 0.25, 0.0, 0.0]).norm() < 1e-10);

    let e = oracle.exp(&DVector::zeros(4)).unwrap();
    assert!((e - a.identity()).norm() < 1e-12);

    // errors travel over the wire: symmetry at a non-interior point
    assert!(oracle.symmetry(&dvector![1.0, -1.0, 0.0, 0.0], a.identity()).is_err());
}

#[test]
fn oracle_validation_over_the_wire() {
    let oracle = serve(&["--catalog", "sym_real", "--n", "2"], 3);
    let v = oracle.validate(10, 3).unwrap();
    assert!(v.exp_zero < 1e-12);
    assert!(v.fixed_point < 1e-9);
    assert!(v.involution < 1e-8);
}

#[test]
fn product_recovery_through_subprocess() {
    let oracle = serve(&["--catalog", "sym_real", "--n", "2"], 3);
    let a = catalog::sym_real(2);
    let x = dvector![0.4, -0.3, 0.6];
    let y = dvector![1.4, 0.9, -0.1];
    let want = a.product(&x, &y).unwrap();
    let got = recover_product(&oracle, &x, &y, 1e-3).unwrap();
    assert!(a.tau_norm(&(got - want)) < 1e-5);

    let tensor = recover_structure_tensor(&oracle, 1e-3).unwrap();
    for (k, slice) in tensor.iter().enumerate() {
        assert!((slice - &a.structure()[k]).amax() < 1e-4, "slice {k}");
    }
}

//! Cone oracles: a membership / symmetry / exponential-chart interface that
//! hides how the cone is realised, plus a subprocess plug-in boundary.
//!
//! Wire protocol (little-endian throughout): a request is one command byte —
//! `M` (MEMBER), `S` (SYM), `E` (EXP) — followed by its argument vectors, each
//! encoded as a `u32` length prefix and that many `f64` values. Responses are
//! `I`/`B`/`O` for MEMBER, `+` followed by one vector for SYM and EXP, or `!`
//! followed by a length-prefixed UTF-8 message on failure.

use std::io::{BufReader, Read, Write};
use std::process::{Child, Command, Stdio};
use std::sync::{Arc, Mutex};

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom;
use crate::jalg::{AlgebraSpec, Element};
use crate::order::{self, Positivity};

type MemberFn = dyn Fn(&Element) -> Result<Positivity> + Send + Sync;
type SymFn = dyn Fn(&Element, &Element) -> Result<Element> + Send + Sync;
type ExpFn = dyn Fn(&Element) -> Result<Element> + Send + Sync;

/// A symmetric cone presented operationally: membership verdicts, the point
/// symmetries `s_p` for interior `p`, and the exponential chart at the base
/// point.
pub struct ConeOracle {
    pub dim: usize,
    pub base_point: Element,
    member: Box<MemberFn>,
    sym: Box<SymFn>,
    exp: Box<ExpFn>,
}

impl ConeOracle {
    pub fn member(&self, x: &Element) -> Result<Positivity> {
        (self.member)(x)
    }

    pub fn symmetry(&self, p: &Element, x: &Element) -> Result<Element> {
        (self.sym)(p, x)
    }

    pub fn exp(&self, a: &Element) -> Result<Element> {
        (self.exp)(a)
    }

    /// Wraps a structure-constant algebra as an oracle.
    pub fn from_algebra(a: AlgebraSpec) -> Self {
        let a = Arc::new(a);
        let dim = a.dim();
        let base_point = a.identity().clone();
        let (ma, sa, ea) = (a.clone(), a.clone(), a);
        ConeOracle {
            dim,
            base_point,
            member: Box::new(move |x| order::positivity(&ma, x)),
            sym: Box::new(move |p, x| geom::symmetry_at(&sa, p, x)),
            exp: Box::new(move |v| geom::exp_chart(&ea, v)),
        }
    }

    /// Validates the oracle invariants on seeded samples: `s_p(p) = p`,
    /// involutivity, and `exp(0) = base`.
    pub fn validate(&self, samples: usize, seed: u64) -> Result<OracleValidation> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zero = DVector::zeros(self.dim);
        let exp_zero = (self.exp(&zero)? - &self.base_point).norm();
        let mut fixed_point = 0.0_f64;
        let mut involution = 0.0_f64;
        for _ in 0..samples {
            let p = self.exp(&(DVector::from_fn(self.dim, |_, _| {
                rand_distr::Distribution::<f64>::sample(&rand_distr::StandardNormal, &mut rng)
            }) * 0.4))?;
            let x = self.exp(&(DVector::from_fn(self.dim, |_, _| {
                rand_distr::Distribution::<f64>::sample(&rand_distr::StandardNormal, &mut rng)
            }) * 0.4))?;
            fixed_point = fixed_point.max((self.symmetry(&p, &p)? - &p).norm() / (1.0 + p.norm()));
            let ssx = self.symmetry(&p, &self.symmetry(&p, &x)?)?;
            involution = involution.max((ssx - &x).norm() / (1.0 + x.norm()));
        }
        Ok(OracleValidation { exp_zero, fixed_point, involution })
    }
}

#[derive(Debug, Clone)]
pub struct OracleValidation {
    pub exp_zero: f64,
    pub fixed_point: f64,
    pub involution: f64,
}

// ---------------------------------------------------------------------------
// Wire protocol
// ---------------------------------------------------------------------------

pub const CMD_MEMBER: u8 = b'M';
pub const CMD_SYM: u8 = b'S';
pub const CMD_EXP: u8 = b'E';

fn write_vector(w: &mut impl Write, v: &Element) -> std::io::Result<()> {
    w.write_all(&(v.len() as u32).to_le_bytes())?;
    for x in v.iter() {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn read_vector(r: &mut impl Read) -> std::io::Result<Element> {
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let n = u32::from_le_bytes(len) as usize;
    let mut out = DVector::zeros(n);
    let mut buf = [0u8; 8];
    for i in 0..n {
        r.read_exact(&mut buf)?;
        out[i] = f64::from_le_bytes(buf);
    }
    Ok(out)
}

fn write_error(w: &mut impl Write, msg: &str) -> std::io::Result<()> {
    w.write_all(b"!")?;
    w.write_all(&(msg.len() as u32).to_le_bytes())?;
    w.write_all(msg.as_bytes())?;
    Ok(())
}

fn read_failure(r: &mut impl Read) -> Result<Error> {
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let mut buf = vec![0u8; u32::from_le_bytes(len) as usize];
    r.read_exact(&mut buf)?;
    Ok(Error::Protocol(String::from_utf8_lossy(&buf).into_owned()))
}

/// Serves a structure-constant algebra over the wire protocol until EOF.
pub fn serve_oracle(a: &AlgebraSpec, input: impl Read, output: impl Write) -> Result<()> {
    let mut r = BufReader::new(input);
    let mut w = std::io::BufWriter::new(output);
    let mut cmd = [0u8; 1];
    loop {
        match r.read_exact(&mut cmd) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => return Ok(()),
            Err(e) => return Err(e.into()),
        }
        match cmd[0] {
            CMD_MEMBER => {
                let x = read_vector(&mut r)?;
                match order::positivity(a, &x) {
                    Ok(Positivity::Interior) => w.write_all(b"I")?,
                    Ok(Positivity::Boundary) => w.write_all(b"B")?,
                    Ok(Positivity::Outside) => w.write_all(b"O")?,
                    Err(e) => write_error(&mut w, &e.to_string())?,
                }
            }
            CMD_SYM => {
                let p = read_vector(&mut r)?;
                let x = read_vector(&mut r)?;
                match geom::symmetry_at(a, &p, &x) {
                    Ok(y) => {
                        w.write_all(b"+")?;
                        write_vector(&mut w, &y)?;
                    }
                    Err(e) => write_error(&mut w, &e.to_string())?,
                }
            }
            CMD_EXP => {
                let v = read_vector(&mut r)?;
                match geom::exp_chart(a, &v) {
                    Ok(y) => {
                        w.write_all(b"+")?;
                        write_vector(&mut w, &y)?;
                    }
                    Err(e) => write_error(&mut w, &e.to_string())?,
                }
            }
            other => {
                write_error(&mut w, &format!("unknown command byte {other:#04x}"))?;
            }
        }
        w.flush()?;
    }
}

struct ProcessHandle {
    child: Child,
    stdin: std::process::ChildStdin,
    stdout: BufReader<std::process::ChildStdout>,
}

impl Drop for ProcessHandle {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl ProcessHandle {
    fn roundtrip(&mut self, cmd: u8, args: &[&Element]) -> Result<Vec<u8>> {
        self.stdin.write_all(&[cmd])?;
        for v in args {
            write_vector(&mut self.stdin, v)?;
        }
        self.stdin.flush()?;
        let mut status = [0u8; 1];
        self.stdout.read_exact(&mut status)?;
        Ok(status.to_vec())
    }
}

/// Connects to an external cone served by a subprocess speaking the wire
/// protocol on stdin/stdout. The caller supplies the cone dimension; the base
/// point is fetched as `EXP(0)`.
pub fn process_oracle(mut command: Command, dim: usize) -> Result<ConeOracle> {
    command.stdin(Stdio::piped()).stdout(Stdio::piped());
    let mut child = command.spawn()?;
    let stdin = child.stdin.take().ok_or_else(|| Error::Protocol("no stdin pipe".into()))?;
    let stdout = child.stdout.take().ok_or_else(|| Error::Protocol("no stdout pipe".into()))?;
    let handle = Arc::new(Mutex::new(ProcessHandle { child, stdin, stdout: BufReader::new(stdout) }));

    let base_point = {
        let mut h = handle.lock().unwrap();
        let zero = DVector::zeros(dim);
        let status = h.roundtrip(CMD_EXP, &[&zero])?;
        match status[0] {
            b'+' => read_vector(&mut h.stdout)?,
            b'!' => return Err(read_failure(&mut h.stdout)?),
            other => return Err(Error::Protocol(format!("unexpected status byte {other:#04x}"))),
        }
    };
    if base_point.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: base_point.len() });
    }

    let (hm, hs, he) = (handle.clone(), handle.clone(), handle);
    Ok(ConeOracle {
        dim,
        base_point,
        member: Box::new(move |x| {
            let mut h = hm.lock().unwrap();
            let status = h.roundtrip(CMD_MEMBER, &[x])?;
            match status[0] {
                b'I' => Ok(Positivity::Interior),
                b'B' => Ok(Positivity::Boundary),
                b'O' => Ok(Positivity::Outside),
                b'!' => Err(read_failure(&mut h.stdout)?),
                other => Err(Error::Protocol(format!("unexpected status byte {other:#04x}"))),
            }
        }),
        sym: Box::new(move |p, x| {
            let mut h = hs.lock().unwrap();
            let status = h.roundtrip(CMD_SYM, &[p, x])?;
            match status[0] {
                b'+' => Ok(read_vector(&mut h.stdout)?),
                b'!' => Err(read_failure(&mut h.stdout)?),
                other => Err(Error::Protocol(format!("unexpected status byte {other:#04x}"))),
            }
        }),
        exp: Box::new(move |v| {
            let mut h = he.lock().unwrap();
            let status = h.roundtrip(CMD_EXP, &[v])?;
            match status[0] {
                b'+' => Ok(read_vector(&mut h.stdout)?),
                b'!' => Err(read_failure(&mut h.stdout)?),
                other => Err(Error::Protocol(format!("unexpected status byte {other:#04x}"))),
            }
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{recover_product, recover_structure_tensor};
    use crate::jalg::catalog;
    use nalgebra::dvector;

    #[test]
    fn oracle_invariants_hold() {
        let oracle = ConeOracle::from_algebra(catalog::herm_complex(2));
        let v = oracle.validate(20, 4).unwrap();
        assert!(v.exp_zero < 1e-12);
        assert!(v.fixed_point < 1e-9);
        assert!(v.involution < 1e-8);
    }

    #[test]
    fn recover_product_identity_direction() {
        let a = catalog::sym_real(2);
        let oracle = ConeOracle::from_algebra(a.clone());
        let b = dvector![1.3, 0.8, 0.2];
        let got = recover_product(&oracle, a.identity(), &b, 1e-3).unwrap();
        assert!(a.tau_norm(&(got - &b)) < 1e-6);
    }

    #[test]
    fn recover_product_matches_algebra() {
        let a = catalog::sym_real(2);
        let oracle = ConeOracle::from_algebra(a.clone());
        let x = dvector![0.4, -0.3, 0.6];
        let y = dvector![1.4, 0.9, -0.1]; // interior
        let want = a.product(&x, &y).unwrap();
        let got = recover_product(&oracle, &x, &y, 1e-3).unwrap();
        assert!(a.tau_norm(&(got.clone() - &want)) < 1e-5, "err {}", a.tau_norm(&(got - want)));
    }

    #[test]
    fn recover_product_second_order_convergence() {
        let a = catalog::herm_complex(2);
        let oracle = ConeOracle::from_algebra(a.clone());
        let x = dvector![0.2, -0.5, 0.3, 0.4];
        let y = dvector![1.5, 1.1, 0.2, -0.3];
        let want = a.product(&x, &y).unwrap();
        let e1 = a.tau_norm(&(recover_product(&oracle, &x, &y, 2e-3).unwrap() - &want));
        let e2 = a.tau_norm(&(recover_product(&oracle, &x, &y, 1e-3).unwrap() - &want));
        assert!(e1 / e2 >= 3.5, "convergence ratio {} (e1 {e1:.3e}, e2 {e2:.3e})", e1 / e2);
    }

    #[test]
    fn recovered_tensor_is_commutative_and_accurate() {
        let a = catalog::sym_real(2);
        let oracle = ConeOracle::from_algebra(a.clone());
        let tensor = recover_structure_tensor(&oracle, 1e-3).unwrap();
        for (k, slice) in tensor.iter().enumerate() {
            let diff = (slice - &a.structure()[k]).amax();
            assert!(diff < 1e-4, "slice {k} entrywise error {diff:.3e}");
        }
    }

    #[test]
    fn recovered_product_is_commutative() {
        let a = catalog::herm_complex(2);
        let oracle = ConeOracle::from_algebra(a.clone());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..5 {
            let x = crate::geom::sample_interior(&a, &mut rng, 0.5).unwrap();
            let y = crate::geom::sample_interior(&a, &mut rng, 0.5).unwrap();
            let xy = recover_product(&oracle, &x, &y, 1e-3).unwrap();
            let yx = recover_product(&oracle, &y, &x, 1e-3).unwrap();
            assert!(a.tau_norm(&(xy - yx)) <= 2e-5, "recovered product not commutative");
        }
    }

    #[test]
    fn rejects_out_of_range_step() {
        let a = catalog::sym_real(2);
        let oracle = ConeOracle::from_algebra(a.clone());
        let b = a.identity().clone();
        assert!(recover_product(&oracle, &b, &b, 0.5).is_err());
        assert!(recover_product(&oracle, &b, &b, 1e-9).is_err());
    }

    #[test]
    fn protocol_roundtrip_in_memory() {
        // Exercise the framing through an in-memory pipe: client requests are
        // pre-rendered, the server answers into a buffer, and the responses
        // are decoded against the in-process oracle.
        let a = catalog::herm_complex(2);
        let mut request = Vec::new();
        request.push(CMD_MEMBER);
        write_vector(&mut request, &dvector![1.0, 2.0, 0.0, 0.0]).unwrap();
        request.push(CMD_MEMBER);
        write_vector(&mut request, &dvector![1.0, -2.0, 0.0, 0.0]).unwrap();
        request.push(CMD_SYM);
        write_vector(&mut request, &dvector![1.0, 1.0, 0.0, 0.0]).unwrap();
        write_vector(&mut request, &dvector![2.0, 4.0, 0.0, 0.0]).unwrap();
        request.push(CMD_EXP);
        write_vector(&mut request, &dvector![0.0, 0.0, 0.0, 0.0]).unwrap();
        request.push(CMD_SYM);
        write_vector(&mut request, &dvector![1.0, -1.0, 0.0, 0.0]).unwrap(); // not interior
        write_vector(&mut request, &dvector![1.0, 1.0, 0.0, 0.0]).unwrap();

        let mut response = Vec::new();
        serve_oracle(&a, request.as_slice(), &mut response).unwrap();

        let mut r = response.as_slice();
        let mut status = [0u8; 1];
        r.read_exact(&mut status).unwrap();
        assert_eq!(status[0], b'I');
        r.read_exact(&mut status).unwrap();
        assert_eq!(status[0], b'O');
        r.read_exact(&mut status).unwrap();
        assert_eq!(status[0], b'+');
        let sym = read_vector(&mut r).unwrap();
        assert!((sym - dvector![0.5, 0.25, 0.0, 0.0]).norm() < 1e-10);
        r.read_exact(&mut status).unwrap();
        assert_eq!(status[0], b'+');
        let e = read_vector(&mut r).unwrap();
        assert!((e - a.identity()).norm() < 1e-12);
        r.read_exact(&mut status).unwrap();
        assert_eq!(status[0], b'!');
        assert!(matches!(read_failure(&mut r).unwrap(), Error::Protocol(_)));
        assert!(r.is_empty());
    }
}

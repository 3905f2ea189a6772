//! Brute-force ranges and computability certificates for iterated maps.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{AppMap, Evaluator, ExecError};
use crate::mach::MachParams;
use crate::theory::Theory;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("bound q = [{q_lo:?}, {q_hi:?}] is not contained in p")]
    NotEnclosed { q_lo: Vec<i64>, q_hi: Vec<i64> },
    #[error("initial state {0:?} is not in p")]
    NotElement(Vec<i64>),
    #[error("box has {points} lattice points, cap is {cap}")]
    CapExceeded { points: u128, cap: u128 },
    #[error(transparent)]
    Exec(#[from] ExecError),
}

fn points(lo: &[i64], hi: &[i64]) -> u128 {
    lo.iter().zip(hi).map(|(a, b)| (b - a + 1) as u128).product()
}

/// Exact coordinatewise `[min, max]` of `f` over every lattice point of `[lo, hi]`.
pub fn range_oracle(
    f: &dyn AppMap,
    lo: &[i64],
    hi: &[i64],
    nint: i64,
    cap: u128,
) -> Result<(Vec<i64>, Vec<i64>), CertifyError> {
    let n = points(lo, hi);
    if n > cap {
        return Err(CertifyError::CapExceeded { points: n, cap });
    }
    let mut x = lo.to_vec();
    let mut rlo: Option<Vec<i64>> = None;
    let mut rhi: Vec<i64> = Vec::new();
    loop {
        let y = f.apply(&x, nint)?;
        match &mut rlo {
            None => {
                rlo = Some(y.clone());
                rhi = y;
            }
            Some(l) => {
                for (k, v) in y.iter().enumerate() {
                    l[k] = l[k].min(*v);
                    rhi[k] = rhi[k].max(*v);
                }
            }
        }
        let mut k = 0;
        loop {
            if k == x.len() {
                return Ok((rlo.unwrap_or_default(), rhi));
            }
            if x[k] < hi[k] {
                x[k] += 1;
                break;
            }
            x[k] = lo[k];
            k += 1;
        }
    }
}

/// Signed statement that `iterf [v n] [w]` is computable for every `n >= 0`
/// and every `v` in `p`, because `boundf(p) = q` lies inside `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub theory: String,
    pub mach: MachParams,
    pub map: String,
    pub p: (Vec<i64>, Vec<i64>),
    pub q: (Vec<i64>, Vec<i64>),
    /// Iterations run as a spot check.
    pub checked_steps: i64,
    pub digest: String,
}

impl Certificate {
    fn content(&self) -> String {
        format!(
            "theory {}\nnint {} nlst {} tcpu {}\nmap {}\np {:?} {:?}\nq {:?} {:?}\nchecked {}\n",
            self.theory,
            self.mach.nint,
            self.mach.nlst,
            self.mach.tcpu,
            self.map,
            self.p.0,
            self.p.1,
            self.q.0,
            self.q.1,
            self.checked_steps
        )
    }

    fn compute_digest(&self) -> String {
        hex::encode(Sha256::digest(self.content().as_bytes()))
    }

    /// True when the digest matches the content.
    pub fn verify(&self) -> bool {
        self.digest == self.compute_digest()
    }

    /// The signed text block.
    pub fn render(&self) -> String {
        format!("-----BEGIN CERTIFICATE-----\n{}sha256 {}\n-----END CERTIFICATE-----\n", self.content(), self.digest)
    }
}

fn inside(v: &[i64], lo: &[i64], hi: &[i64]) -> bool {
    v.len() == lo.len() && v.iter().zip(lo.iter().zip(hi)).all(|(x, (l, h))| l <= x && x <= h)
}

/// Checks the premises of axc5 for `p` and `v`, then spot-validates by iterating `n` times.
pub fn certify_axc5(
    th: &Theory,
    mach: MachParams,
    map: &dyn AppMap,
    p: (&[i64], &[i64]),
    v: &[i64],
    n: i64,
) -> Result<Certificate, CertifyError> {
    let (lo, hi) = p;
    let (qlo, qhi) = map.bound(lo, hi, mach.nint)?;
    let enclosed = qlo.len() == lo.len() && inside(&qlo, lo, hi) && inside(&qhi, lo, hi);
    if !enclosed {
        return Err(CertifyError::NotEnclosed { q_lo: qlo, q_hi: qhi });
    }
    if !inside(v, lo, hi) {
        return Err(CertifyError::NotElement(v.to_vec()));
    }
    let mut ev = Evaluator::new(th, mach).with_map(map);
    let mut w = v.to_vec();
    for _ in 0..n {
        w = ev.iterf(&w, 1)?;
        if !inside(&w, &qlo, &qhi) {
            return Err(CertifyError::NotEnclosed { q_lo: qlo, q_hi: qhi });
        }
    }
    let mut cert = Certificate {
        theory: th.name.clone(),
        mach,
        map: map.id(),
        p: (lo.to_vec(), hi.to_vec()),
        q: (qlo, qhi),
        checked_steps: n,
        digest: String::new(),
    };
    cert.digest = cert.compute_digest();
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{ArithMap, CellularAutomaton};

    #[test]
    fn square_range() {
        let f = ArithMap { exprs: vec![crate::eval::Expr::Mult(
            Box::new(crate::eval::Expr::Coord(0)),
            Box::new(crate::eval::Expr::Coord(0)),
        )] };
        assert_eq!(range_oracle(&f, &[-3], &[2], 100, 1000).unwrap(), (vec![0], vec![9]));
        assert_eq!(f.bound(&[-3], &[2], 100).unwrap(), (vec![-6], vec![9]));
        assert!(matches!(range_oracle(&f, &[0], &[2000], 10_000_000, 1000), Err(CertifyError::CapExceeded { .. })));
    }

    #[test]
    fn automaton_certificate() {
        let th = Theory::bundled_axioms("vec").unwrap();
        let ca = CellularAutomaton::new(110, 8).unwrap();
        let (lo, hi) = ca.domain();
        let v = vec![0, 1, 1, 0, 1, 0, 0, 1];
        let cert = certify_axc5(&th, MachParams::default(), &ca, (&lo, &hi), &v, 100).unwrap();
        assert!(cert.verify());
        let mut forged = cert.clone();
        forged.checked_steps = 1;
        assert!(!forged.verify());
        assert!(matches!(certify_axc5(&th, MachParams::default(), &ca, (&lo, &hi), &[2; 8], 1), Err(CertifyError::NotElement(_))));
    }

    #[test]
    fn doubling_is_refused() {
        let th = Theory::bundled_axioms("vec").unwrap();
        let f = ArithMap::scaling(1, 2);
        let r = certify_axc5(&th, MachParams::default(), &f, (&[1], &[4]), &[1], 3);
        assert_eq!(r.unwrap_err(), CertifyError::NotEnclosed { q_lo: vec![2], q_hi: vec![8] });
    }
}

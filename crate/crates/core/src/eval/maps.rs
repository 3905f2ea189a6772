//! Application maps bound to the atoms `f` and `boundf`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::interval::Interval;
use super::{ExecError, ExecErrorKind};

/// A map `f: vec[m] -> vec[m]` together with a box bound `boundf`.
pub trait AppMap: Send + Sync {
    /// Stable identifier recorded in certificates.
    fn id(&self) -> String;
    fn apply(&self, v: &[i64], nint: i64) -> Result<Vec<i64>, ExecError>;
    /// A box containing `f(p)`.
    fn bound(&self, lo: &[i64], hi: &[i64], nint: i64) -> Result<(Vec<i64>, Vec<i64>), ExecError>;
}

fn err(kind: ExecErrorKind, detail: impl Into<String>) -> ExecError {
    ExecError { kind, site: 0, detail: detail.into() }
}

/// Elementary binary cellular automaton on a periodic lattice of `m <= 12` cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellularAutomaton {
    pub rule: u8,
    pub m: usize,
}

impl CellularAutomaton {
    pub const MAX_CELLS: usize = 12;

    pub fn new(rule: u8, m: usize) -> Option<Self> {
        (1..=Self::MAX_CELLS).contains(&m).then_some(CellularAutomaton { rule, m })
    }

    pub fn domain(&self) -> (Vec<i64>, Vec<i64>) {
        (vec![0; self.m], vec![1; self.m])
    }
}

impl AppMap for CellularAutomaton {
    fn id(&self) -> String {
        format!("ca:rule{}:m{}", self.rule, self.m)
    }

    fn apply(&self, v: &[i64], _nint: i64) -> Result<Vec<i64>, ExecError> {
        if v.len() != self.m {
            return Err(err(ExecErrorKind::DimMismatch, format!("automaton has {} cells, state has {}", self.m, v.len())));
        }
        if v.iter().any(|&x| x != 0 && x != 1) {
            return Err(err(ExecErrorKind::TypeViolation, "automaton state is not binary"));
        }
        let m = self.m;
        Ok((0..m)
            .map(|i| {
                let l = v[(i + m - 1) % m];
                let c = v[i];
                let r = v[(i + 1) % m];
                let idx = (l << 2 | c << 1 | r) as u8;
                i64::from(self.rule >> idx & 1)
            })
            .collect())
    }

    /// `[0,1]^m` for any box inside the binary domain.
    fn bound(&self, lo: &[i64], hi: &[i64], _nint: i64) -> Result<(Vec<i64>, Vec<i64>), ExecError> {
        if lo.len() != self.m || hi.len() != self.m {
            return Err(err(ExecErrorKind::DimMismatch, "box dimension differs from the automaton"));
        }
        if lo.iter().chain(hi).any(|&x| !(0..=1).contains(&x)) {
            return Err(err(ExecErrorKind::TypeViolation, "box leaves the binary domain"));
        }
        Ok(self.domain())
    }
}

/// Expression over the coordinates of the input vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expr {
    Coord(usize),
    Const(i64),
    Add(Box<Expr>, Box<Expr>),
    Mult(Box<Expr>, Box<Expr>),
    Smult(i64, Box<Expr>),
}

fn checked(x: i128, nint: i64) -> Result<i64, ExecError> {
    if x.abs() > nint as i128 {
        Err(err(ExecErrorKind::Overflow, format!("{x} exceeds nint {nint}")))
    } else {
        Ok(x as i64)
    }
}

impl Expr {
    pub fn eval(&self, v: &[i64], nint: i64) -> Result<i64, ExecError> {
        match self {
            Expr::Coord(i) => v.get(*i).copied().ok_or_else(|| err(ExecErrorKind::DimMismatch, "coordinate out of range")),
            Expr::Const(c) => checked(*c as i128, nint),
            Expr::Add(a, b) => checked(a.eval(v, nint)? as i128 + b.eval(v, nint)? as i128, nint),
            Expr::Mult(a, b) => checked(a.eval(v, nint)? as i128 * b.eval(v, nint)? as i128, nint),
            Expr::Smult(s, a) => checked(*s as i128 * a.eval(v, nint)? as i128, nint),
        }
    }

    pub fn eval_interval(&self, p: &[Interval], nint: i64) -> Result<Interval, ExecError> {
        let of = || err(ExecErrorKind::Overflow, "interval endpoint exceeds nint");
        match self {
            Expr::Coord(i) => p.get(*i).copied().ok_or_else(|| err(ExecErrorKind::DimMismatch, "coordinate out of range")),
            Expr::Const(c) => Ok(Interval::point(*c)),
            Expr::Add(a, b) => a.eval_interval(p, nint)?.add(&b.eval_interval(p, nint)?, nint).ok_or_else(of),
            Expr::Mult(a, b) => a.eval_interval(p, nint)?.mul(&b.eval_interval(p, nint)?, nint).ok_or_else(of),
            Expr::Smult(s, a) => a.eval_interval(p, nint)?.scale(*s, nint).ok_or_else(of),
        }
    }

    /// A random tree of at most `depth` levels over `dim` coordinates.
    pub fn random<R: Rng>(rng: &mut R, dim: usize, depth: usize) -> Expr {
        if depth == 0 || rng.random_bool(0.3) {
            return if rng.random_bool(0.8) {
                Expr::Coord(rng.random_range(0..dim))
            } else {
                Expr::Const(rng.random_range(-3..=3))
            };
        }
        match rng.random_range(0..3) {
            0 => Expr::Add(Box::new(Self::random(rng, dim, depth - 1)), Box::new(Self::random(rng, dim, depth - 1))),
            1 => Expr::Mult(Box::new(Self::random(rng, dim, depth - 1)), Box::new(Self::random(rng, dim, depth - 1))),
            _ => Expr::Smult(rng.random_range(-3..=3), Box::new(Self::random(rng, dim, depth - 1))),
        }
    }
}

/// Coordinatewise polynomial map built from `add`, `mult` and `smult`; its
/// bound is the interval extension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArithMap {
    pub exprs: Vec<Expr>,
}

impl ArithMap {
    pub fn random<R: Rng>(rng: &mut R, dim: usize, depth: usize) -> ArithMap {
        ArithMap { exprs: (0..dim).map(|_| Expr::random(rng, dim, depth)).collect() }
    }

    /// `v -> k v`.
    pub fn scaling(dim: usize, k: i64) -> ArithMap {
        ArithMap { exprs: (0..dim).map(|i| Expr::Smult(k, Box::new(Expr::Coord(i)))).collect() }
    }
}

impl AppMap for ArithMap {
    fn id(&self) -> String {
        format!("arith:{}", serde_json::to_string(&self.exprs).unwrap_or_default())
    }

    fn apply(&self, v: &[i64], nint: i64) -> Result<Vec<i64>, ExecError> {
        if v.len() != self.exprs.len() {
            return Err(err(ExecErrorKind::DimMismatch, format!("map has dimension {}, vector {}", self.exprs.len(), v.len())));
        }
        self.exprs.iter().map(|e| e.eval(v, nint)).collect()
    }

    fn bound(&self, lo: &[i64], hi: &[i64], nint: i64) -> Result<(Vec<i64>, Vec<i64>), ExecError> {
        if lo.len() != self.exprs.len() || hi.len() != self.exprs.len() {
            return Err(err(ExecErrorKind::DimMismatch, "box dimension differs from the map"));
        }
        let p: Vec<Interval> = lo.iter().zip(hi).map(|(&a, &b)| Interval { lo: a, hi: b }).collect();
        let r: Vec<Interval> = self.exprs.iter().map(|e| e.eval_interval(&p, nint)).collect::<Result<_, _>>()?;
        Ok((r.iter().map(|i| i.lo).collect(), r.iter().map(|i| i.hi).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_90_is_xor_of_neighbours() {
        let ca = CellularAutomaton::new(90, 5).unwrap();
        let v = vec![0, 0, 1, 0, 0];
        assert_eq!(ca.apply(&v, 10).unwrap(), vec![0, 1, 0, 1, 0]);
        assert_eq!(ca.apply(&[0, 2, 0, 0, 0], 10).unwrap_err().kind, ExecErrorKind::TypeViolation);
        assert!(CellularAutomaton::new(30, 13).is_none());
    }

    #[test]
    fn automaton_bound() {
        let ca = CellularAutomaton::new(110, 3).unwrap();
        assert_eq!(ca.bound(&[0, 0, 1], &[1, 0, 1], 10).unwrap(), (vec![0, 0, 0], vec![1, 1, 1]));
        assert!(ca.bound(&[0, 0, 0], &[2, 1, 1], 10).is_err());
    }

    #[test]
    fn doubling_bound() {
        let f = ArithMap::scaling(1, 2);
        assert_eq!(f.bound(&[1], &[4], 100).unwrap(), (vec![2], vec![8]));
        assert_eq!(f.apply(&[60], 100).unwrap_err().kind, ExecErrorKind::Overflow);
    }
}

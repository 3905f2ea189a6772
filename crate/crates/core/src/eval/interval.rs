//! Discrete interval arithmetic with machine bounds.

use serde::{Deserialize, Serialize};

/// `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

fn bounded(x: i128, nint: i64) -> Option<i64> {
    (x.abs() <= nint as i128).then_some(x as i64)
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Option<Interval> {
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn point(a: i64) -> Interval {
        Interval { lo: a, hi: a }
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_subset(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// `None` when an endpoint leaves `[-nint, nint]`.
    pub fn add(&self, o: &Interval, nint: i64) -> Option<Interval> {
        Some(Interval {
            lo: bounded(self.lo as i128 + o.lo as i128, nint)?,
            hi: bounded(self.hi as i128 + o.hi as i128, nint)?,
        })
    }

    pub fn sub(&self, o: &Interval, nint: i64) -> Option<Interval> {
        Some(Interval {
            lo: bounded(self.lo as i128 - o.hi as i128, nint)?,
            hi: bounded(self.hi as i128 - o.lo as i128, nint)?,
        })
    }

    /// Hull of the four corner products.
    pub fn mul(&self, o: &Interval, nint: i64) -> Option<Interval> {
        let c = [
            self.lo as i128 * o.lo as i128,
            self.lo as i128 * o.hi as i128,
            self.hi as i128 * o.lo as i128,
            self.hi as i128 * o.hi as i128,
        ];
        Some(Interval {
            lo: bounded(*c.iter().min().unwrap(), nint)?,
            hi: bounded(*c.iter().max().unwrap(), nint)?,
        })
    }

    pub fn scale(&self, s: i64, nint: i64) -> Option<Interval> {
        self.mul(&Interval::point(s), nint)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_products() {
        let a = Interval::new(1, 3).unwrap();
        let b = Interval::new(-2, 2).unwrap();
        assert_eq!(a.mul(&b, 100), Interval::new(-6, 6));
        let brute: Vec<i64> = (1..=3).flat_map(|x| (-2..=2).map(move |y| x * y)).collect();
        assert_eq!(*brute.iter().min().unwrap(), -6);
        assert_eq!(*brute.iter().max().unwrap(), 6);
    }

    #[test]
    fn square_overestimates() {
        let p = Interval::new(-3, 2).unwrap();
        assert_eq!(p.mul(&p, 100), Interval::new(-6, 9));
        assert_eq!(Interval::new(1, 3).unwrap().mul(&Interval::new(1, 3).unwrap(), 100), Interval::new(1, 9));
    }

    #[test]
    fn bounds_and_subtraction() {
        let a = Interval::new(1, 3).unwrap();
        let b = Interval::new(2, 5).unwrap();
        assert_eq!(a.sub(&b, 100), Interval::new(-4, 1));
        assert_eq!(Interval::point(60).add(&Interval::point(50), 100), None);
        assert_eq!(Interval::point(4).add(&Interval::point(5), 100), Some(Interval::point(9)));
    }
}

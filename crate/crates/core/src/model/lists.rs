//! Order-preserving list operations; the first occurrence of an element is kept.

use std::collections::HashMap;
use std::hash::Hash;

pub fn unique<T: Clone + PartialEq>(xs: &[T]) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(xs.len());
    for x in xs {
        if !out.contains(x) {
            out.push(x.clone());
        }
    }
    out
}

/// `a \ b`: elements of `a` that do not occur in `b`, repetitions in `a` kept.
pub fn setminus<T: Clone + PartialEq>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().filter(|x| !b.contains(x)).cloned().collect()
}

pub fn intersection<T: Clone + PartialEq>(a: &[T], b: &[T]) -> Vec<T> {
    unique(&a.iter().filter(|x| b.contains(x)).cloned().collect::<Vec<_>>())
}

/// Replace every element found in `map` by its image.
pub fn substitute<T: Clone + Eq + Hash>(xs: &[T], map: &HashMap<T, T>) -> Vec<T> {
    xs.iter().map(|x| map.get(x).cloned().unwrap_or_else(|| x.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_examples() {
        assert_eq!(unique(&["a", "b", "b", "a"]), vec!["a", "b"]);
        assert_eq!(setminus(&["a", "b", "c"], &["b"]), vec!["a", "c"]);
        assert_eq!(intersection(&["a", "b"], &["b", "d"]), vec!["b"]);
        let map: HashMap<_, _> = [("a", "x")].into_iter().collect();
        assert_eq!(substitute(&["a", "b", "a"], &map), vec!["x", "b", "x"]);
    }
}

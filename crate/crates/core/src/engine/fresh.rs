use std::collections::HashSet;

/// The `i`-th name of the sequence `a, ..., z, a1, ..., z1, a2, ...`.
pub fn fresh_name(i: usize) -> String {
    let letter = (b'a' + (i % 26) as u8) as char;
    match i / 26 {
        0 => letter.to_string(),
        round => format!("{letter}{round}"),
    }
}

/// Generator of names not in a used set.
#[derive(Debug, Clone)]
pub struct FreshNames {
    used: HashSet<String>,
    next: usize,
}

impl FreshNames {
    pub fn new(used: HashSet<String>) -> Self {
        FreshNames { used, next: 0 }
    }

    pub fn next_name(&mut self) -> String {
        loop {
            let n = fresh_name(self.next);
            self.next += 1;
            if self.used.insert(n.clone()) {
                return n;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence() {
        assert_eq!(fresh_name(0), "a");
        assert_eq!(fresh_name(25), "z");
        assert_eq!(fresh_name(26), "a1");
        assert_eq!(fresh_name(53), "b2");
    }

    #[test]
    fn skips_used() {
        let used: HashSet<String> = ["a", "b", "d"].iter().map(|s| s.to_string()).collect();
        let mut g = FreshNames::new(used);
        assert_eq!(g.next_name(), "c");
        assert_eq!(g.next_name(), "e");
    }
}

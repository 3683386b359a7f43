use std::fmt;

use crate::error::{Error, Result};

/// Bijection of `{0, …, n-1}`; printed and parsed in 1-based cycle notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self { images: (0..n).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::domain(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Self { images })
    }

    /// Parses 1-based cycle notation: `"(123)"` is 1→2→3→1, `"(13)(24)"`,
    /// `"e"` or `"()"` for the identity.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut moved = vec![false; n];
        let text = text.trim();
        if text == "e" {
            return Ok(Self { images });
        }
        for cycle in text.split('(').skip(1) {
            let body =
                cycle.strip_suffix(')').ok_or_else(|| Error::domain(format!("malformed cycle notation `{text}`")))?;
            let points: Vec<usize> = body
                .chars()
                .filter(|c| !c.is_whitespace() && *c != ',')
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .filter(|&d| d >= 1 && d <= n)
                        .ok_or_else(|| Error::domain(format!("bad point `{c}` in `{text}` for S_{n}")))
                })
                .collect::<Result<_>>()?;
            for (k, &p) in points.iter().enumerate() {
                if std::mem::replace(&mut moved[p - 1], true) {
                    return Err(Error::domain(format!("point {p} repeated in `{text}`")));
                }
                images[p - 1] = points[(k + 1) % points.len()] - 1;
            }
        }
        Self::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "composing permutations of different degree");
        Permutation { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    /// Number of disjoint cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        self.cycle_type().len()
    }

    /// Cycle lengths in descending order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
                len += 1;
            }
            if len > 0 {
                lengths.push(len);
            }
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        lengths
    }

    /// All `n!` permutations in lexicographic order of their image vectors.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fn rec(n: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if current.len() == n {
                out.push(Permutation { images: current.clone() });
                return;
            }
            for i in 0..n {
                if !used[i] {
                    used[i] = true;
                    current.push(i);
                    rec(n, current, used, out);
                    current.pop();
                    used[i] = false;
                }
            }
        }
        rec(n, &mut current, &mut used, &mut out);
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut wrote = false;
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            write!(f, "(")?;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                write!(f, "{}", i + 1)?;
                i = self.images[i];
            }
            write!(f, ")")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "e")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cycle_counts_in_s4() {
        assert_eq!(Permutation::identity(4).cycle_count(), 4);
        assert_eq!(Permutation::parse(4, "(12)").unwrap().cycle_count(), 3);
        assert_eq!(Permutation::parse(4, "(1234)").unwrap().cycle_count(), 1);
        assert_eq!(Permutation::parse(4, "(13)(24)").unwrap().cycle_count(), 2);
    }

    #[test]
    fn parse_and_display() {
        let p = Permutation::parse(3, "(123)").unwrap();
        assert_eq!(p.images(), &[1, 2, 0]);
        assert_eq!(p.to_string(), "(123)");
        assert_eq!(Permutation::parse(4, "(1243)").unwrap().to_string(), "(1243)");
        assert_eq!(Permutation::parse(2, "e").unwrap(), Permutation::identity(2));
        assert!(Permutation::parse(3, "(14)").is_err());
        assert!(Permutation::parse(3, "(121)").is_err());
        assert!(Permutation::from_images(vec![0, 0]).is_err());
    }

    #[test]
    fn composition_applies_right_factor_first() {
        let a = Permutation::parse(3, "(12)").unwrap();
        let b = Permutation::parse(3, "(23)").unwrap();
        // (12)∘(23): 3 → 2 → 1
        assert_eq!(a.compose(&b).apply(2), 0);
        assert_eq!(a.compose(&b).to_string(), "(123)");
    }

    #[test]
    fn group_orders() {
        assert_eq!(Permutation::all(3).len(), 6);
        assert_eq!(Permutation::all(4).len(), 24);
    }

    proptest! {
        #[test]
        fn inverse_composes_to_identity(idx in 0usize..24, jdx in 0usize..24) {
            let all = Permutation::all(4);
            let p = &all[idx];
            prop_assert_eq!(p.compose(&p.inverse()), Permutation::identity(4));
            // conjugate products have equal cycle counts
            let q = &all[jdx];
            prop_assert_eq!(p.compose(q).cycle_count(), q.compose(p).cycle_count());
        }
    }
}

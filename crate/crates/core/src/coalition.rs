//! Feature subsets as fixed-width bitsets.

use std::fmt;

use crate::error::{Error, Result};

/// Largest ground set a [`Coalition`] can represent.
pub const MAX_FEATURES: usize = 64;

/// A subset `T` of the features `{0, .., n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition {
    n: u8,
    bits: u64,
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl Coalition {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_FEATURES, "coalition over {n} features");
        Self { n: n as u8, bits: 0 }
    }

    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_FEATURES, "coalition over {n} features");
        Self {
            n: n as u8,
            bits: full_mask(n),
        }
    }

    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        if n > MAX_FEATURES {
            return Err(Error::invalid(
                "coalition",
                format!("{n} features exceeds {MAX_FEATURES}"),
            ));
        }
        if bits & !full_mask(n) != 0 {
            return Err(Error::invalid(
                "coalition",
                format!("bits {bits:#x} outside {n} features"),
            ));
        }
        Ok(Self { n: n as u8, bits })
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut c = Self::empty(n);
        for &i in indices {
            if i >= n {
                return Err(Error::invalid("coalition", format!("index {i} outside {n} features")));
            }
            c = c.with(i);
        }
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_full(&self) -> bool {
        self.bits == full_mask(self.n())
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n() && self.bits >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        debug_assert!(i < self.n());
        Self {
            bits: self.bits | 1 << i,
            ..self
        }
    }

    pub fn without(self, i: usize) -> Self {
        Self {
            bits: self.bits & !(1 << i),
            ..self
        }
    }

    pub fn complement(self) -> Self {
        Self {
            bits: !self.bits & full_mask(self.n()),
            ..self
        }
    }

    /// Member indices in increasing order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(|&i| self.contains(i))
    }

    /// Every subset of `{0, .., n-1}` in increasing bit order.
    pub fn all(n: usize) -> impl Iterator<Item = Coalition> {
        assert!(n < MAX_FEATURES, "cannot enumerate 2^{n} coalitions");
        (0..1u64 << n).map(move |bits| Coalition { n: n as u8, bits })
    }

    /// Combines `x` on the coalition with `other` elsewhere.
    pub fn splice(&self, x: &[f64], other: &[f64], out: &mut [f64]) {
        for i in 0..out.len() {
            out[i] = if self.contains(i) { x[i] } else { other[i] };
        }
    }
}

/// Set notation with 1-based feature numbers, e.g. `{1,3}`.
impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basics() {
        let t = Coalition::from_indices(4, &[0, 2]).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.complement().indices().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(t.to_string(), "{1,3}");
        assert!(Coalition::empty(3).complement().is_full());
        assert!(Coalition::from_indices(2, &[2]).is_err());
        assert!(Coalition::from_bits(2, 0b100).is_err());
        assert_eq!(Coalition::all(3).count(), 8);
        assert!(Coalition::full(64).is_full());
        let mut out = [0.0; 3];
        Coalition::from_indices(3, &[1])
            .unwrap()
            .splice(&[1.0, 2.0, 3.0], &[9.0, 9.0, 9.0], &mut out);
        assert_eq!(out, [9.0, 2.0, 9.0]);
    }

    proptest! {
        #[test]
        fn complement_is_involutive_and_disjoint(n in 1usize..=64, raw in any::<u64>()) {
            let bits = raw & full_mask(n);
            let t = Coalition::from_bits(n, bits).unwrap();
            let c = t.complement();
            prop_assert_eq!(c.complement(), t);
            prop_assert_eq!(t.bits() & c.bits(), 0);
            prop_assert_eq!(t.len() + c.len(), n);
        }
    }
}

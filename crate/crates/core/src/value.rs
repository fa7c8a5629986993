use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

/// An extended integer: a finite `i64` or `+∞`.
///
/// Addition saturates at infinity, and every finite value compares below it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtValue {
    Finite(i64),
    Infinite,
}

impl ExtValue {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtValue::Finite(_))
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            ExtValue::Finite(v) => Some(v),
            ExtValue::Infinite => None,
        }
    }

    /// `self - other` when both are finite.
    pub fn diff(self, other: ExtValue) -> Option<i64> {
        Some(self.finite()? - other.finite()?)
    }
}

impl From<i64> for ExtValue {
    fn from(v: i64) -> Self {
        ExtValue::Finite(v)
    }
}

impl Add for ExtValue {
    type Output = ExtValue;

    fn add(self, rhs: ExtValue) -> ExtValue {
        match (self, rhs) {
            (ExtValue::Finite(a), ExtValue::Finite(b)) => ExtValue::Finite(a.saturating_add(b)),
            _ => ExtValue::Infinite,
        }
    }
}

impl std::iter::Sum for ExtValue {
    fn sum<I: Iterator<Item = ExtValue>>(iter: I) -> ExtValue {
        iter.fold(ExtValue::Finite(0), |a, b| a + b)
    }
}

impl PartialOrd for ExtValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtValue::Finite(a), ExtValue::Finite(b)) => a.cmp(b),
            (ExtValue::Finite(_), ExtValue::Infinite) => Ordering::Less,
            (ExtValue::Infinite, ExtValue::Finite(_)) => Ordering::Greater,
            (ExtValue::Infinite, ExtValue::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::Finite(v) => write!(f, "{v}"),
            ExtValue::Infinite => f.write_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_saturates_and_dominates() {
        assert_eq!(ExtValue::Finite(3) + ExtValue::Infinite, ExtValue::Infinite);
        assert!(ExtValue::Finite(i64::MAX) < ExtValue::Infinite);
        let s: ExtValue = [1, 2, 3].into_iter().map(ExtValue::Finite).sum();
        assert_eq!(s, ExtValue::Finite(6));
        assert_eq!(ExtValue::Finite(5).diff(ExtValue::Finite(7)), Some(-2));
        assert_eq!(ExtValue::Infinite.diff(ExtValue::Finite(7)), None);
    }
}

use std::collections::VecDeque;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::EvalError;

/// Finite sequence of booleans. Index 1 is the front (the top, when the
/// sequence is used as a stack); posted goals accumulate at the back.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BoolSeq(VecDeque<bool>);

impl BoolSeq {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(b: bool) -> Self {
        BoolSeq(VecDeque::from([b]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `s↓i`, 1-based.
    pub fn select(&self, i: usize) -> Option<bool> {
        i.checked_sub(1).and_then(|j| self.0.get(j).copied())
    }

    /// `s↑i`: entries after position `i`; empty when `i ≥ length`.
    pub fn rest(&self, i: usize) -> BoolSeq {
        BoolSeq(self.0.iter().skip(i).copied().collect())
    }

    /// `self + other`.
    pub fn concat(&self, other: &BoolSeq) -> BoolSeq {
        let mut out = self.clone();
        out.append(other);
        out
    }

    pub fn push_front(&mut self, b: bool) {
        self.0.push_front(b);
    }

    /// Appends `other` at the back in place.
    pub fn append(&mut self, other: &BoolSeq) {
        self.0.extend(other.0.iter().copied());
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn top(&self) -> Option<bool> {
        self.0.front().copied()
    }

    fn combine(mut self, op: &'static str, f: fn(bool, bool) -> bool) -> Result<BoolSeq, EvalError> {
        if self.0.len() < 2 {
            return Err(EvalError::Underflow { op, len: self.0.len() });
        }
        let first = self.0.pop_front().expect("length checked");
        let second = self.0.pop_front().expect("length checked");
        self.0.push_front(f(first, second));
        Ok(self)
    }

    /// `⟨s↓1 | s↓2⟩ + s↑2`.
    pub fn or_step(self) -> Result<BoolSeq, EvalError> {
        self.combine("or", |a, b| a | b)
    }

    /// `⟨s↓1 & s↓2⟩ + s↑2`.
    pub fn and_step(self) -> Result<BoolSeq, EvalError> {
        self.combine("and", |a, b| a & b)
    }
}

impl FromIterator<bool> for BoolSeq {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BoolSeq(iter.into_iter().collect())
    }
}

impl<const N: usize> From<[u8; N]> for BoolSeq {
    fn from(bits: [u8; N]) -> Self {
        bits.iter().map(|&b| b != 0).collect()
    }
}

impl fmt::Debug for BoolSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟨")?;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(if *b { "1" } else { "0" })?;
        }
        f.write_str("⟩")
    }
}

impl fmt::Display for BoolSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Serializes front-first as an array of `0`/`1`.
impl Serialize for BoolSeq {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter().map(|&b| u8::from(b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn adt_operations() {
        let s = BoolSeq::from([1, 0, 1]);
        assert_eq!(s.len(), 3);
        assert_eq!(s.select(1), Some(true));
        assert_eq!(s.select(2), Some(false));
        assert_eq!(s.select(0), None);
        assert_eq!(s.select(4), None);
        assert_eq!(s.rest(1), BoolSeq::from([0, 1]));
        assert_eq!(s.rest(3), BoolSeq::new());
        assert_eq!(s.concat(&BoolSeq::from([0])), BoolSeq::from([1, 0, 1, 0]));
    }

    #[test]
    fn combining_steps() {
        assert_eq!(BoolSeq::from([1, 0, 1]).or_step(), Ok(BoolSeq::from([1, 1])));
        assert_eq!(BoolSeq::from([0, 0]).or_step(), Ok(BoolSeq::from([0])));
        assert_eq!(
            BoolSeq::from([1]).or_step(),
            Err(EvalError::Underflow { op: "or", len: 1 })
        );
        assert_eq!(BoolSeq::from([1, 1, 0]).and_step(), Ok(BoolSeq::from([1, 0])));
        assert_eq!(BoolSeq::from([1, 0]).and_step(), Ok(BoolSeq::from([0])));
        assert_eq!(
            BoolSeq::new().and_step(),
            Err(EvalError::Underflow { op: "and", len: 0 })
        );
    }

    #[test]
    fn json_is_front_first() {
        assert_eq!(serde_json::to_string(&BoolSeq::from([1, 1, 0])).unwrap(), "[1,1,0]");
        assert_eq!(format!("{}", BoolSeq::from([1, 0])), "⟨1,0⟩");
    }

    fn seq() -> impl Strategy<Value = BoolSeq> {
        prop::collection::vec(any::<bool>(), 0..12).prop_map(BoolSeq::from_iter)
    }

    proptest! {
        #[test]
        fn concat_is_a_monoid(a in seq(), b in seq(), c in seq()) {
            prop_assert_eq!(a.concat(&b).concat(&c), a.concat(&b.concat(&c)));
            prop_assert_eq!(a.concat(&BoolSeq::new()), a.clone());
            prop_assert_eq!(BoolSeq::new().concat(&a), a);
        }

        #[test]
        fn steps_shrink_by_one(s in seq()) {
            let n = s.len();
            match s.clone().or_step() {
                Ok(r) => {
                    prop_assert_eq!(r.len(), n - 1);
                    prop_assert_eq!(r.rest(1), s.rest(2));
                    prop_assert_eq!(r.select(1), Some(s.select(1).unwrap() | s.select(2).unwrap()));
                }
                Err(_) => prop_assert!(n < 2),
            }
            match s.clone().and_step() {
                Ok(r) => prop_assert_eq!(r.select(1), Some(s.select(1).unwrap() & s.select(2).unwrap())),
                Err(_) => prop_assert!(n < 2),
            }
        }

        #[test]
        fn select_and_rest_agree(s in seq(), i in 0usize..14) {
            prop_assert_eq!(s.select(i).is_some(), i >= 1 && i <= s.len());
            let r = s.rest(i);
            prop_assert_eq!(r.len(), s.len().saturating_sub(i));
        }
    }
}

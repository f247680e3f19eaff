//! Exact arithmetic and ordering for the non-standard time domain.
//!
//! An instant has the form `v + k*eps` where `v` counts macro time units and
//! `k` counts infinitesimal units. `eps` is a symbolic unit: only the pair
//! `(v, k)` is stored, so comparisons are exact.

use std::cmp::Ordering;
use std::fmt;

/// A point of the non-standard time domain, `v + k*eps`.
///
/// Ordering is lexicographic on `(std_part, inf_part)`: any positive number
/// of infinitesimal units is smaller than one macro unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NsInstant {
    /// Count of macro time units (`v`).
    pub std_part: u64,
    /// Count of infinitesimal units (`k`).
    pub inf_part: u64,
}

/// The two successor kinds used when building histories: a micro step adds
/// one infinitesimal, a macro step advances to the next standard natural.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    Micro,
    Macro,
}

impl NsInstant {
    pub const ZERO: NsInstant = NsInstant { std_part: 0, inf_part: 0 };

    pub fn new(std_part: u64, inf_part: u64) -> Self {
        NsInstant { std_part, inf_part }
    }

    /// True iff the instant is a standard number (`k = 0`).
    pub fn is_standard(&self) -> bool {
        self.inf_part == 0
    }

    /// Componentwise sum.
    pub fn add(&self, other: &NsInstant) -> NsInstant {
        NsInstant {
            std_part: self.std_part + other.std_part,
            inf_part: self.inf_part + other.inf_part,
        }
    }

    /// Successor under a history step: micro goes to `v + (k+1)eps`, macro
    /// lands on the next standard natural `v + 1`, resetting the
    /// infinitesimal count.
    pub fn step(&self, kind: StepKind) -> NsInstant {
        match kind {
            StepKind::Micro => NsInstant::new(self.std_part, self.inf_part + 1),
            StepKind::Macro => NsInstant::new(self.std_part + 1, 0),
        }
    }
}

pub fn ns_compare(a: &NsInstant, b: &NsInstant) -> Ordering {
    a.cmp(b)
}

impl fmt::Display for NsInstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.inf_part {
            0 => write!(f, "{}", self.std_part),
            k => write!(f, "{}+{}*eps", self.std_part, k),
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepKind::Micro => write!(f, "micro"),
            StepKind::Macro => write!(f, "macro"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ordering_is_lexicographic() {
        assert_eq!(ns_compare(&NsInstant::new(1, 0), &NsInstant::new(0, 5)), Ordering::Greater);
        assert_eq!(ns_compare(&NsInstant::new(0, 0), &NsInstant::new(0, 0)), Ordering::Equal);
        assert_eq!(ns_compare(&NsInstant::new(2, 3), &NsInstant::new(2, 4)), Ordering::Less);
    }

    #[test]
    fn addition_is_componentwise() {
        assert_eq!(NsInstant::new(1, 2).add(&NsInstant::new(0, 1)), NsInstant::new(1, 3));
        assert_eq!(NsInstant::new(0, 0).add(&NsInstant::new(1, 0)), NsInstant::new(1, 0));
        assert_eq!(NsInstant::new(2, 5).add(&NsInstant::new(1, 0)), NsInstant::new(3, 5));
    }

    #[test]
    fn step_successors() {
        assert_eq!(NsInstant::ZERO.step(StepKind::Micro), NsInstant::new(0, 1));
        assert_eq!(NsInstant::new(0, 3).step(StepKind::Macro), NsInstant::new(1, 0));
        assert_eq!(NsInstant::new(2, 0).step(StepKind::Macro), NsInstant::new(3, 0));
    }

    #[test]
    fn zero_is_standard() {
        assert!(NsInstant::ZERO.is_standard());
        assert_eq!(NsInstant::ZERO, NsInstant::new(0, 0));
    }

    #[test]
    fn display_format() {
        assert_eq!(NsInstant::new(2, 3).to_string(), "2+3*eps");
        assert_eq!(NsInstant::new(5, 0).to_string(), "5");
    }

    proptest! {
        #[test]
        fn add_strictly_increases(v in 0u64..1000, k in 0u64..1000, dv in 0u64..1000, dk in 0u64..1000) {
            let a = NsInstant::new(v, k);
            let b = NsInstant::new(dv, dk);
            if b != NsInstant::ZERO {
                prop_assert!(a.add(&b) > a);
            } else {
                prop_assert_eq!(a.add(&b), a);
            }
        }

        #[test]
        fn steps_strictly_increase(v in 0u64..1000, k in 0u64..1000) {
            let a = NsInstant::new(v, k);
            prop_assert!(a.step(StepKind::Micro) > a);
            prop_assert!(a.step(StepKind::Macro) > a);
            prop_assert!(a.step(StepKind::Macro).is_standard());
            prop_assert!(!a.step(StepKind::Micro).is_standard());
        }

        #[test]
        fn micro_chains_stay_below_next_standard(v in 0u64..100, n in 1u64..200) {
            // infinitesimals never accumulate past a standard unit
            let mut t = NsInstant::new(v, 0);
            for _ in 0..n {
                t = t.step(StepKind::Micro);
            }
            prop_assert!(t < NsInstant::new(v + 1, 0));
        }
    }
}

//! Fusion of the distance-based and time-based labels into four classes.
//!
//! Crossing both binary labels keeps the information of space and time:
//!
//! | class | distance | time | typical cause                                   |
//! |-------|----------|------|--------------------------------------------------|
//! | 1     | AME      | AME  | real movement along a route                      |
//! | 2     | AME      | UAE  | sparse awakenings scattered by measurement noise |
//! | 3     | UAE      | AME  | slow movement (queues, storage) or a machine     |
//! | 4     | UAE      | UAE  | stationary device waking up in place             |
//!
//! Events still in either classifier's burn-in phase carry no evidence and
//! fuse to `Unfused`.

use std::fmt;

use crate::label::MovementLabel;

/// One of the four fused classes, or `Unfused` for burn-in events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FusedClass {
    Class1,
    Class2,
    Class3,
    Class4,
    Unfused,
}

impl FusedClass {
    /// The four real classes, in increasing class number.
    pub const CLASSES: [FusedClass; 4] = [
        FusedClass::Class1,
        FusedClass::Class2,
        FusedClass::Class3,
        FusedClass::Class4,
    ];

    /// Class number 1..=4, `None` for `Unfused`.
    pub fn number(self) -> Option<u8> {
        match self {
            FusedClass::Class1 => Some(1),
            FusedClass::Class2 => Some(2),
            FusedClass::Class3 => Some(3),
            FusedClass::Class4 => Some(4),
            FusedClass::Unfused => None,
        }
    }

    /// Index 0..=3 into per-class count arrays, `None` for `Unfused`.
    pub fn index(self) -> Option<usize> {
        self.number().map(|n| n as usize - 1)
    }

    /// Token used in label output files: the class number, or `unfused`.
    pub fn as_str(self) -> &'static str {
        match self {
            FusedClass::Class1 => "1",
            FusedClass::Class2 => "2",
            FusedClass::Class3 => "3",
            FusedClass::Class4 => "4",
            FusedClass::Unfused => "unfused",
        }
    }

    /// Parses the file token written by [`as_str`](Self::as_str).
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "1" => Some(FusedClass::Class1),
            "2" => Some(FusedClass::Class2),
            "3" => Some(FusedClass::Class3),
            "4" => Some(FusedClass::Class4),
            "unfused" => Some(FusedClass::Unfused),
            _ => None,
        }
    }
}

impl fmt::Display for FusedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Crosses a (distance label, time label) pair into a fused class.
///
/// Any burn-in input yields `Unfused`; the mapping is total.
pub fn fuse(dist_label: MovementLabel, time_label: MovementLabel) -> FusedClass {
    use MovementLabel::*;
    match (dist_label, time_label) {
        (Burnin, _) | (_, Burnin) => FusedClass::Unfused,
        (Ame, Ame) => FusedClass::Class1,
        (Ame, Uae) => FusedClass::Class2,
        (Uae, Ame) => FusedClass::Class3,
        (Uae, Uae) => FusedClass::Class4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use MovementLabel::*;

    #[test]
    fn all_nine_pairs_map_as_defined() {
        let expected = [
            ((Ame, Ame), FusedClass::Class1),
            ((Ame, Uae), FusedClass::Class2),
            ((Uae, Ame), FusedClass::Class3),
            ((Uae, Uae), FusedClass::Class4),
            ((Burnin, Ame), FusedClass::Unfused),
            ((Burnin, Uae), FusedClass::Unfused),
            ((Burnin, Burnin), FusedClass::Unfused),
            ((Ame, Burnin), FusedClass::Unfused),
            ((Uae, Burnin), FusedClass::Unfused),
        ];
        assert_eq!(expected.len(), 9, "exhaustive over {{AME,UAE,Burnin}}^2");
        for ((d, t), want) in expected {
            assert_eq!(fuse(d, t), want, "fuse({d:?}, {t:?})");
        }
    }

    #[test]
    fn tokens_round_trip() {
        for class in FusedClass::CLASSES.into_iter().chain([FusedClass::Unfused]) {
            assert_eq!(FusedClass::parse(class.as_str()), Some(class));
        }
        assert_eq!(FusedClass::parse("5"), None);
    }

    #[test]
    fn numbers_and_indices_agree() {
        for (i, class) in FusedClass::CLASSES.into_iter().enumerate() {
            assert_eq!(class.index(), Some(i));
            assert_eq!(class.number(), Some(i as u8 + 1));
        }
        assert_eq!(FusedClass::Unfused.index(), None);
    }
}

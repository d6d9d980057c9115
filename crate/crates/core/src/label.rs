//! The binary movement label shared by both classifiers.

use std::fmt;

/// Per-event classification outcome.
///
/// `Burnin` marks the first `k` events of a device, for which no window
/// value exists yet. It is a distinct label rather than an omission so that
/// downstream counts always reconcile with the input event count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MovementLabel {
    /// Actual movement event: the attached object really moved.
    Ame,
    /// Undesired awakening event: emitted without real movement.
    Uae,
    /// One of the first `k` events; not classified.
    Burnin,
}

impl MovementLabel {
    pub fn is_burnin(self) -> bool {
        matches!(self, MovementLabel::Burnin)
    }

    /// Token used in label output files.
    pub fn as_str(self) -> &'static str {
        match self {
            MovementLabel::Ame => "AME",
            MovementLabel::Uae => "UAE",
            MovementLabel::Burnin => "Burnin",
        }
    }

    /// Parses the file token written by [`as_str`](Self::as_str).
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "AME" => Some(MovementLabel::Ame),
            "UAE" => Some(MovementLabel::Uae),
            "Burnin" => Some(MovementLabel::Burnin),
            _ => None,
        }
    }
}

impl fmt::Display for MovementLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

//! Progress measure. Every transition moves to a strictly greater value, and
//! the values reachable from a fixed program form a finite set, which is what
//! makes every path finite.

use super::{Side, State};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Measure {
    Node {
        left: Vec<usize>,
        left_learnt: usize,
        label: u32,
        right: Vec<usize>,
        right_learnt: usize,
    },
    Terminal,
}

impl Measure {
    /// `left_complete` tells whether the left record assigns every atom of
    /// the generated program. With a complete left record the left side ranks
    /// below every right side; otherwise above.
    pub fn of(s: &State, left_complete: bool) -> Measure {
        let State::Pair(p) = s else {
            return Measure::Terminal;
        };
        let label = match (p.side, left_complete) {
            (Side::Left, true) => 0,
            (Side::Right(i), true) => 1 + i,
            (Side::Right(i), false) => i,
            (Side::Left, false) => u32::MAX,
        };
        Measure::Node {
            left: p.left.depth(),
            left_learnt: p.left_learnt.len(),
            label,
            right: p.right.depth(),
            right_learnt: p.right_learnt.len(),
        }
    }
}

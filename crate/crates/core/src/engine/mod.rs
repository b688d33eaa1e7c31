//! Transition systems: the single-layer DPLL template and the two-layer
//! generate-and-test template with its extensions.

mod explore;
mod measure;
mod run;
mod single;
mod strategy;
mod two_layer;

pub use explore::{compare_graphs, explore_single, explore_two_layer, ChecksReport, GraphDiff, Verdict};
pub use measure::Measure;
pub use run::{replay, run, run_single, RunOptions, RunReport, Stats, TraceStep, Outcome, LearntEvent};
pub use single::{BasicState, Dpt};
pub use strategy::{ScriptStep, Strategy};
pub use two_layer::Solver;

use std::fmt;

use thiserror::Error;

use crate::extensions::{Clause, ClauseStore};
use crate::oracle::ModelType;
use crate::program::Lit;
use crate::propagators::{PCondition, PSet};
use crate::record::Record;
use crate::transforms::{GenKind, TestKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("incompatible configuration: {0}")]
    Incompatible(String),
    #[error("step limit of {0} exceeded")]
    StepLimit(u64),
    #[error("script diverged at step {step}: {msg}")]
    Diverged { step: usize, msg: String },
    #[error("no applicable transition at a non-terminal state")]
    Stuck,
}

/// Which record a two-layer state is working on. Right states carry the
/// index of the part under test in separate-components mode, 0 otherwise.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right(u32),
}

impl Side {
    pub fn label(self) -> String {
        match self {
            Side::Left => "L".into(),
            Side::Right(0) => "R".into(),
            Side::Right(i) => format!("R{i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pair {
    pub left: Record,
    pub right: Record,
    pub side: Side,
    pub left_learnt: ClauseStore,
    pub right_learnt: ClauseStore,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum State {
    Pair(Pair),
    Ok(Record),
    Failstate,
}

impl State {
    pub fn is_terminal(&self) -> bool {
        !matches!(self, State::Pair(_))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum RuleName {
    Conclude,
    Backtrack,
    Propagate,
    Decide,
    Success,
    ConcludeL,
    BacktrackL,
    PropagateL,
    DecideL,
    CrossLR,
    ConcludeR,
    BacktrackR,
    PropagateR,
    DecideR,
    ConcludeRL,
    BacktrackRL,
    EarlyTestR,
    ConcludeR1,
    ConcludeR2,
    CrossLR1,
    PropagateR1,
    PropagateL1,
    LearnLeft,
    LearnRight,
    BackjumpL,
    BackjumpR,
    BackjumpRL,
    Unit,
}

impl RuleName {
    pub const ALL: [RuleName; 28] = [
        RuleName::Conclude,
        RuleName::Backtrack,
        RuleName::Propagate,
        RuleName::Decide,
        RuleName::Success,
        RuleName::ConcludeL,
        RuleName::BacktrackL,
        RuleName::PropagateL,
        RuleName::DecideL,
        RuleName::CrossLR,
        RuleName::ConcludeR,
        RuleName::BacktrackR,
        RuleName::PropagateR,
        RuleName::DecideR,
        RuleName::ConcludeRL,
        RuleName::BacktrackRL,
        RuleName::EarlyTestR,
        RuleName::ConcludeR1,
        RuleName::ConcludeR2,
        RuleName::CrossLR1,
        RuleName::PropagateR1,
        RuleName::PropagateL1,
        RuleName::LearnLeft,
        RuleName::LearnRight,
        RuleName::BackjumpL,
        RuleName::BackjumpR,
        RuleName::BackjumpRL,
        RuleName::Unit,
    ];

    pub fn as_str(self) -> &'static str {
        use RuleName::*;
        match self {
            Conclude => "Conclude",
            Backtrack => "Backtrack",
            Propagate => "Propagate",
            Decide => "Decide",
            Success => "Success",
            ConcludeL => "Conclude_L",
            BacktrackL => "Backtrack_L",
            PropagateL => "Propagate_L",
            DecideL => "Decide_L",
            CrossLR => "Cross_LR",
            ConcludeR => "Conclude_R",
            BacktrackR => "Backtrack_R",
            PropagateR => "Propagate_R",
            DecideR => "Decide_R",
            ConcludeRL => "Conclude_RL",
            BacktrackRL => "Backtrack_RL",
            EarlyTestR => "EarlyTest_R",
            ConcludeR1 => "Conclude_R'",
            ConcludeR2 => "Conclude_R''",
            CrossLR1 => "Cross_LR'",
            PropagateR1 => "Propagate_R'",
            PropagateL1 => "Propagate_L'",
            LearnLeft => "Learn_Left",
            LearnRight => "Learn_Right",
            BackjumpL => "Backjump_L",
            BackjumpR => "Backjump_R",
            BackjumpRL => "Backjump_RL",
            Unit => "Unit",
        }
    }

    pub fn parse(s: &str) -> Option<RuleName> {
        RuleName::ALL.into_iter().find(|r| r.as_str() == s.trim())
    }

    pub fn is_decide(self) -> bool {
        matches!(self, RuleName::Decide | RuleName::DecideL | RuleName::DecideR)
    }

    pub fn is_propagate(self) -> bool {
        matches!(
            self,
            RuleName::Propagate
                | RuleName::Unit
                | RuleName::PropagateL
                | RuleName::PropagateR
                | RuleName::PropagateL1
                | RuleName::PropagateR1
        )
    }

    pub fn is_backtrack(self) -> bool {
        matches!(
            self,
            RuleName::Backtrack
                | RuleName::BacktrackL
                | RuleName::BacktrackR
                | RuleName::BacktrackRL
                | RuleName::BackjumpL
                | RuleName::BackjumpR
                | RuleName::BackjumpRL
                | RuleName::EarlyTestR
        )
    }

    pub fn is_cross(self) -> bool {
        matches!(self, RuleName::CrossLR | RuleName::CrossLR1)
    }

    /// Rules that leave the right layer for the left one or for Failstate.
    pub fn is_right_to_left(self) -> bool {
        matches!(
            self,
            RuleName::ConcludeRL | RuleName::BacktrackRL | RuleName::BackjumpRL | RuleName::EarlyTestR
        )
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An applicable transition, described by its rule and payload.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    pub rule: RuleName,
    /// Decided, derived or flipped literal.
    pub lit: Option<Lit>,
    /// Propagation of the falsum marker.
    pub falsum: bool,
    /// All p-conditions deriving `lit` (bit mask in condition order).
    pub pconds: u8,
    /// The p-condition reported for a propagation.
    pub pcond: Option<PCondition>,
    /// Clause learnt by a Learn rule or justifying a Backjump.
    pub clause: Option<Clause>,
}

impl Move {
    pub fn plain(rule: RuleName) -> Move {
        Move {
            rule,
            lit: None,
            falsum: false,
            pconds: 0,
            pcond: None,
            clause: None,
        }
    }

    pub fn with_lit(rule: RuleName, l: Lit) -> Move {
        Move {
            lit: Some(l),
            ..Move::plain(rule)
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub enum Extension {
    #[default]
    None,
    EarlyTest,
    SeparateComponents,
    Learning,
}

/// Generating pair, witness pair and extension of a two-layer solver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub gen: GenKind,
    pub left: PSet,
    pub test: TestKind,
    pub right: PSet,
    pub extension: Extension,
    pub store_cap: usize,
    /// Skip pair validation.
    pub unsafe_pairs: bool,
}

impl SolverConfig {
    pub fn new(gen: GenKind, left: PSet, test: TestKind, right: PSet) -> SolverConfig {
        SolverConfig {
            gen,
            left,
            test,
            right,
            extension: Extension::None,
            store_cap: crate::extensions::DEFAULT_STORE_CAP,
            unsafe_pairs: false,
        }
    }

    pub fn cmodels() -> SolverConfig {
        SolverConfig::new(GenKind::CmodelsGen, PSet::UP, TestKind::CmodelsTest, PSet::UP)
    }

    pub fn gnt() -> SolverConfig {
        SolverConfig::new(GenKind::GntGen, PSet::SM, TestKind::GntTest, PSet::SM)
    }

    pub fn dlv() -> SolverConfig {
        SolverConfig::new(GenKind::DlvGen, PSet::SD, TestKind::DlvTest, PSet::UP)
    }

    pub fn named(name: &str) -> Option<SolverConfig> {
        match name.to_ascii_lowercase().as_str() {
            "cmodels" => Some(SolverConfig::cmodels()),
            "gnt" => Some(SolverConfig::gnt()),
            "dlv" => Some(SolverConfig::dlv()),
            _ => None,
        }
    }

    pub fn with_extension(mut self, e: Extension) -> SolverConfig {
        self.extension = e;
        self
    }

    /// Checks the declared types of both pairs and the extension's needs.
    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |m: String| Err(EngineError::Incompatible(m));
        if self.left.enforcing() != Some(self.gen.w1()) {
            return bad(format!(
                "{} does not enforce the {} models {} produces",
                self.left,
                self.gen.w1().name(),
                self.gen
            ));
        }
        if self.right.enforcing() != Some(self.test.w1()) {
            return bad(format!(
                "{} does not enforce the {} models {} produces",
                self.right,
                self.test.w1().name(),
                self.test
            ));
        }
        let g = self.gen.wrt().iter().map(|w| w.strength()).max().unwrap_or(0);
        let t = self.test.wrt().iter().map(|w| w.strength()).min().unwrap_or(u8::MAX);
        if g < t {
            return bad(format!("{} and {} share no model type", self.gen, self.test));
        }
        match self.extension {
            Extension::EarlyTest
                if self.gen != GenKind::GntGen || self.test != TestKind::GntTest =>
            {
                bad("early tests need the gnt transforms".into())
            }
            Extension::SeparateComponents if self.test != TestKind::DlvTest => {
                bad("separate component checks need the dlv witness".into())
            }
            _ => Ok(()),
        }
    }

    pub fn describe(&self) -> String {
        format!("{}:{} / {}:{}", self.gen, self.left, self.test, self.right)
    }

    /// Model type shared by the generating and witness pairs.
    pub fn common_type(&self) -> ModelType {
        if self.gen.wrt().contains(&ModelType::Sup) && self.test.wrt().contains(&ModelType::Sup) {
            ModelType::Sup
        } else {
            ModelType::Cla
        }
    }
}

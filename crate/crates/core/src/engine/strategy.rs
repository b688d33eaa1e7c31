//! Choosing one applicable transition.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EngineError, Move};
use crate::propagators::{Derived, PCondition};

/// One expected step of a scripted run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptStep {
    pub rule: String,
    /// Literal as rendered in traces (`a`, `-a`, or `#false`).
    pub lit: Option<String>,
    pub pcond: Option<PCondition>,
}

impl ScriptStep {
    pub fn new(rule: &str, lit: Option<&str>, pcond: Option<PCondition>) -> ScriptStep {
        ScriptStep {
            rule: rule.to_string(),
            lit: lit.map(str::to_string),
            pcond,
        }
    }

    /// Parses `Rule`, `Rule lit` or `Rule lit Condition`.
    pub fn parse(line: &str) -> Option<ScriptStep> {
        let mut it = line.split_whitespace();
        let rule = it.next()?;
        let lit = it.next();
        let pcond = match it.next() {
            Some(c) => Some(PCondition::parse(c)?),
            None => None,
        };
        Some(ScriptStep::new(rule, lit, pcond))
    }
}

pub enum Strategy {
    /// First applicable transition in rule order.
    Priority,
    /// Rule order, but decisions are drawn at random among the candidates.
    PriorityRandomDecide(ChaCha8Rng),
    /// Uniform over all applicable transitions.
    Random(ChaCha8Rng),
    /// Follows a fixed sequence of steps.
    Scripted(VecDeque<ScriptStep>, usize),
}

impl Strategy {
    pub fn random(seed: u64) -> Strategy {
        Strategy::Random(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn random_decide(seed: u64) -> Strategy {
        Strategy::PriorityRandomDecide(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn scripted(steps: Vec<ScriptStep>) -> Strategy {
        Strategy::Scripted(steps.into(), 0)
    }

    /// Picks a move. `names[i]` is the rendered literal of `moves[i]`.
    /// Returns the index and the p-condition to report.
    pub fn choose(
        &mut self,
        moves: &[Move],
        names: &[Option<String>],
    ) -> Result<(usize, Option<PCondition>), EngineError> {
        if moves.is_empty() {
            return Err(EngineError::Stuck);
        }
        match self {
            Strategy::Priority => Ok((0, moves[0].pcond)),
            Strategy::PriorityRandomDecide(rng) => {
                if moves[0].rule.is_decide() {
                    let ds: Vec<usize> = (0..moves.len()).filter(|&i| moves[i].rule.is_decide()).collect();
                    let i = *ds.choose(rng).unwrap();
                    Ok((i, moves[i].pcond))
                } else {
                    Ok((0, moves[0].pcond))
                }
            }
            Strategy::Random(rng) => {
                let i = rng.gen_range(0..moves.len());
                Ok((i, moves[i].pcond))
            }
            Strategy::Scripted(steps, done) => {
                let step_no = *done + 1;
                let Some(step) = steps.pop_front() else {
                    return Err(EngineError::Diverged {
                        step: step_no,
                        msg: "script exhausted before a terminal state".into(),
                    });
                };
                *done += 1;
                let found = moves.iter().enumerate().find(|(i, mv)| {
                    mv.rule.as_str() == step.rule
                        && match &step.lit {
                            None => true,
                            Some(l) => names[*i].as_deref() == Some(l.as_str()),
                        }
                });
                let Some((i, mv)) = found else {
                    let avail: Vec<String> = moves
                        .iter()
                        .zip(names)
                        .map(|(m, n)| match n {
                            Some(n) => format!("{} {n}", m.rule),
                            None => m.rule.to_string(),
                        })
                        .collect();
                    return Err(EngineError::Diverged {
                        step: step_no,
                        msg: format!(
                            "`{} {}` is not applicable; available: {}",
                            step.rule,
                            step.lit.clone().unwrap_or_default(),
                            avail.join(", ")
                        ),
                    });
                };
                match step.pcond {
                    Some(c) if mv.rule.is_propagate() => {
                        if Derived::derived_by(mv.pconds, c) {
                            Ok((i, Some(c)))
                        } else {
                            Err(EngineError::Diverged {
                                step: step_no,
                                msg: format!("{} does not derive this literal", c.name()),
                            })
                        }
                    }
                    _ => Ok((i, mv.pcond)),
                }
            }
        }
    }
}

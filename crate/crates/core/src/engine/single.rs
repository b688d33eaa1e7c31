//! The single-layer DPLL template over one program.

use super::{Move, RuleName};
use crate::program::{Lit, Program};
use crate::propagators::{out_prop, Derived, PSet};
use crate::record::Record;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BasicState {
    Node(Record),
    Ok(Record),
    Failstate,
}

/// `DP` with a p-condition set in place of unit propagation.
pub struct Dpt {
    pub program: Program,
    pub pset: PSet,
    propagate: RuleName,
}

impl Dpt {
    pub fn new(program: Program, pset: PSet) -> Dpt {
        Dpt {
            program,
            pset,
            propagate: RuleName::Propagate,
        }
    }

    /// The plain DPLL graph: unit propagation only, under the rule name `Unit`.
    pub fn dp(program: Program) -> Dpt {
        Dpt {
            program,
            pset: PSet::UP,
            propagate: RuleName::Unit,
        }
    }

    pub fn initial(&self) -> BasicState {
        BasicState::Node(Record::new())
    }

    pub fn moves(&self, s: &BasicState) -> Vec<Move> {
        let BasicState::Node(r) = s else {
            return Vec::new();
        };
        let mut out = Vec::new();
        if !r.is_consistent() {
            match r.last_decision() {
                Some(k) => out.push(Move::with_lit(RuleName::Backtrack, r.entries()[k].0.complement())),
                None => out.push(Move::plain(RuleName::Conclude)),
            }
        }
        let m = r.assign(self.program.table().len());
        let d = out_prop(self.pset, &self.program, &[], &m);
        if d.falsum {
            out.push(Move {
                falsum: true,
                pconds: 1,
                pcond: Some(crate::propagators::PCondition::UnitPropagate),
                ..Move::plain(self.propagate)
            });
        }
        for (l, mask) in d.lits {
            out.push(Move {
                pconds: mask,
                pcond: Derived::first_condition(mask),
                ..Move::with_lit(self.propagate, l)
            });
        }
        if m.is_consistent() {
            for &a in self.program.atoms() {
                if !m.is_assigned(a) {
                    out.push(Move::with_lit(RuleName::Decide, Lit::pos(a)));
                    out.push(Move::with_lit(RuleName::Decide, Lit::neg(a)));
                }
            }
        }
        if out.is_empty() {
            out.push(Move::plain(RuleName::Success));
        }
        out
    }

    pub fn apply(&self, s: &BasicState, mv: &Move) -> BasicState {
        let BasicState::Node(r) = s else {
            return s.clone();
        };
        match mv.rule {
            RuleName::Conclude => BasicState::Failstate,
            RuleName::Success => BasicState::Ok(r.clone()),
            RuleName::Backtrack => BasicState::Node(r.backtrack().expect("a decision literal")),
            RuleName::Propagate | RuleName::Unit => {
                let mut r = r.clone();
                if mv.falsum {
                    r.push_falsum();
                } else {
                    r.push(mv.lit.unwrap());
                }
                BasicState::Node(r)
            }
            RuleName::Decide => {
                let mut r = r.clone();
                r.decide(mv.lit.unwrap());
                BasicState::Node(r)
            }
            _ => s.clone(),
        }
    }
}

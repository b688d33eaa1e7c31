//! The two-layer template and its extended rule sets.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use super::{EngineError, Extension, Move, Pair, RuleName, Side, SolverConfig, State};
use crate::extensions::{conflict_backjump_clause, gnt_early_witness, part_witness, separate_parts, Clause, ClauseStore, Part};
use crate::program::{Atom, Lit, Program};
use crate::propagators::{out_prop, Derived, PSet};
use crate::record::{Assign, Record};

const CACHE_LIMIT: usize = 50_000;

/// Restricted candidate and part index; keys the witness programs.
type WitnessKey = (Vec<Lit>, u32);

/// A two-layer graph instantiated on one program.
pub struct Solver {
    pi: Program,
    gen: Program,
    cfg: SolverConfig,
    parts: Vec<Part>,
    cache: RefCell<HashMap<WitnessKey, Arc<Program>>>,
    props: RefCell<HashMap<(Option<WitnessKey>, Assign), Derived>>,
}

impl Solver {
    pub fn new(pi: Program, cfg: SolverConfig) -> Result<Solver, EngineError> {
        if !cfg.unsafe_pairs {
            cfg.validate()?;
        }
        let gen = cfg.gen.apply(&pi);
        let parts = if cfg.extension == Extension::SeparateComponents {
            separate_parts(&pi)
        } else {
            Vec::new()
        };
        Ok(Solver {
            pi,
            gen,
            cfg,
            parts,
            cache: RefCell::new(HashMap::new()),
            props: RefCell::new(HashMap::new()),
        })
    }

    pub fn program(&self) -> &Program {
        &self.pi
    }

    pub fn generated(&self) -> &Program {
        &self.gen
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn initial(&self) -> State {
        State::Pair(Pair {
            left: Record::new(),
            right: Record::new(),
            side: Side::Left,
            left_learnt: ClauseStore::new(self.cfg.store_cap),
            right_learnt: ClauseStore::new(self.cfg.store_cap),
        })
    }

    fn learning(&self) -> bool {
        self.cfg.extension == Extension::Learning
    }

    /// Left literals restricted to the atoms of the input program.
    pub fn candidate(&self, left: &Record) -> Vec<Lit> {
        let mut v: Vec<Lit> = left.lits().filter(|l| self.pi.has_atom(l.atom())).collect();
        v.sort_unstable();
        v
    }

    /// Witness program for the left record (and part index in separate mode).
    pub fn witness(&self, left: &Record, index: u32) -> Arc<Program> {
        let key = (self.candidate(left), index);
        if let Some(w) = self.cache.borrow().get(&key) {
            return w.clone();
        }
        let m = Assign::from_lits(self.pi.table().len(), &key.0);
        let w = match self.cfg.extension {
            Extension::EarlyTest => gnt_early_witness(&self.pi, &m),
            Extension::SeparateComponents => {
                part_witness(&self.pi, &m, &self.parts[(index.max(1) - 1) as usize])
            }
            _ => self.cfg.test.apply_unchecked(&self.pi, &m),
        };
        let w = Arc::new(w);
        let mut c = self.cache.borrow_mut();
        if c.len() > CACHE_LIMIT {
            c.clear();
        }
        c.insert(key, w.clone());
        w
    }

    /// `out_prop` without learnt clauses, memoized per side and assignment.
    fn derive(&self, side: Option<(&Record, u32)>, w: &Program, pset: PSet, m: &Assign) -> Derived {
        let key = (side.map(|(l, i)| (self.candidate(l), i)), m.clone());
        if let Some(d) = self.props.borrow().get(&key) {
            return d.clone();
        }
        let d = out_prop(pset, w, &[], m);
        let mut c = self.props.borrow_mut();
        if c.len() > CACHE_LIMIT * 4 {
            c.clear();
        }
        c.insert(key, d.clone());
        d
    }

    /// True when the left record assigns every atom of the generated program.
    pub fn left_complete(&self, left: &Record) -> bool {
        left.assign(self.gen.table().len()).covers(self.gen.atoms())
    }

    /// Applicable transitions in priority order. `pending` is a clause that
    /// may be learnt on the left (offered after a right-to-left backjump).
    pub fn moves(&self, s: &State, pending: Option<&Clause>) -> Vec<Move> {
        match s {
            State::Pair(p) => match p.side {
                Side::Left => self.left_moves(p, pending),
                Side::Right(i) => self.right_moves(p, i),
            },
            _ => Vec::new(),
        }
    }

    fn propagations(out: &mut Vec<Move>, rule: RuleName, d: Derived) {
        if d.falsum {
            out.push(Move {
                falsum: true,
                pconds: 1,
                pcond: Some(crate::propagators::PCondition::UnitPropagate),
                ..Move::plain(rule)
            });
        }
        for (l, mask) in d.lits {
            out.push(Move {
                pconds: mask,
                pcond: Derived::first_condition(mask),
                ..Move::with_lit(rule, l)
            });
        }
    }

    fn decisions(out: &mut Vec<Move>, rule: RuleName, atoms: &[Atom], m: &Assign) {
        for &a in atoms {
            if !m.is_assigned(a) {
                out.push(Move::with_lit(rule, Lit::pos(a)));
                out.push(Move::with_lit(rule, Lit::neg(a)));
            }
        }
    }

    fn learnt(store: &ClauseStore) -> Vec<Clause> {
        store.clauses()
    }

    fn left_moves(&self, p: &Pair, pending: Option<&Clause>) -> Vec<Move> {
        let mut out = Vec::new();
        let learning = self.learning();
        if let Some(c) = pending {
            if learning && p.right.is_empty() && p.right_learnt.is_empty() && !p.left_learnt.contains(c) {
                out.push(Move {
                    clause: Some(c.clone()),
                    ..Move::plain(RuleName::LearnLeft)
                });
            }
        }
        let start = out.len();
        if !p.left.is_consistent() {
            match conflict_backjump_clause(&p.left) {
                Some(bj) if learning => {
                    if !p.left_learnt.contains(&bj.clause) {
                        out.insert(
                            start,
                            Move {
                                clause: Some(bj.clause.clone()),
                                ..Move::plain(RuleName::LearnLeft)
                            },
                        );
                    }
                    out.push(Move {
                        clause: Some(bj.clause),
                        ..Move::with_lit(RuleName::BackjumpL, bj.flipped)
                    });
                }
                Some(bj) => out.push(Move::with_lit(RuleName::BacktrackL, bj.flipped)),
                None => out.push(Move::plain(RuleName::ConcludeL)),
            }
        }
        let m = p.left.assign(self.gen.table().len());
        let d = if learning {
            out_prop(self.cfg.left, &self.gen, &Solver::learnt(&p.left_learnt), &m)
        } else {
            self.derive(None, &self.gen, self.cfg.left, &m)
        };
        let prop = if learning { RuleName::PropagateL1 } else { RuleName::PropagateL };
        Solver::propagations(&mut out, prop, d);
        if m.is_consistent() {
            Solver::decisions(&mut out, RuleName::DecideL, self.gen.atoms(), &m);
        }
        let rule_moves = out[start..].iter().any(|mv| mv.rule != RuleName::LearnLeft);
        if !rule_moves {
            let cross = if self.cfg.extension == Extension::SeparateComponents {
                RuleName::CrossLR1
            } else {
                RuleName::CrossLR
            };
            out.push(Move::plain(cross));
        }
        out
    }

    fn right_moves(&self, p: &Pair, i: u32) -> Vec<Move> {
        let mut out = Vec::new();
        let learning = self.learning();
        let ext = self.cfg.extension;
        let w = self.witness(&p.left, i);
        let m = p.right.assign(w.table().len());
        if !p.right.is_consistent() {
            match conflict_backjump_clause(&p.right) {
                Some(bj) if learning => {
                    if !p.right_learnt.contains(&bj.clause) {
                        out.push(Move {
                            clause: Some(bj.clause.clone()),
                            ..Move::plain(RuleName::LearnRight)
                        });
                    }
                    out.push(Move {
                        clause: Some(bj.clause),
                        ..Move::with_lit(RuleName::BackjumpR, bj.flipped)
                    });
                }
                Some(bj) => out.push(Move::with_lit(RuleName::BacktrackR, bj.flipped)),
                None => out.push(Move::plain(match ext {
                    Extension::EarlyTest if self.covers_pi(&p.left) => RuleName::ConcludeR1,
                    Extension::EarlyTest => RuleName::ConcludeR2,
                    Extension::SeparateComponents if (i as usize) < self.parts.len() => {
                        RuleName::ConcludeR1
                    }
                    Extension::SeparateComponents => RuleName::ConcludeR2,
                    _ => RuleName::ConcludeR,
                })),
            }
        }
        let d = if learning {
            out_prop(self.cfg.right, &w, &Solver::learnt(&p.right_learnt), &m)
        } else {
            self.derive(Some((&p.left, i)), &w, self.cfg.right, &m)
        };
        let prop = if learning || ext == Extension::SeparateComponents {
            RuleName::PropagateR1
        } else {
            RuleName::PropagateR
        };
        Solver::propagations(&mut out, prop, d);
        if m.is_consistent() {
            Solver::decisions(&mut out, RuleName::DecideR, w.atoms(), &m);
        }
        let rule_moves = out.iter().any(|mv| mv.rule != RuleName::LearnRight);
        if !rule_moves {
            let last = p.left.last_decision().map(|k| p.left.entries()[k].0.complement());
            match last {
                Some(l) if ext == Extension::EarlyTest => {
                    out.push(Move::with_lit(RuleName::EarlyTestR, l))
                }
                Some(l) if learning => {
                    let bj = conflict_backjump_clause(&p.left).unwrap();
                    out.push(Move {
                        clause: Some(bj.clause),
                        ..Move::with_lit(RuleName::BackjumpRL, l)
                    });
                }
                Some(l) => out.push(Move::with_lit(RuleName::BacktrackRL, l)),
                None => out.push(Move::plain(RuleName::ConcludeRL)),
            }
        }
        out
    }

    fn covers_pi(&self, left: &Record) -> bool {
        left.assign(self.pi.table().len()).covers(self.pi.atoms())
    }

    /// Target of `mv` at `s`.
    pub fn apply(&self, s: &State, mv: &Move) -> State {
        let State::Pair(p) = s else {
            return s.clone();
        };
        let mut q = p.clone();
        let to_left = |mut q: Pair, left: Record| {
            q.left = left;
            q.right = Record::new();
            q.right_learnt = ClauseStore::new(self.cfg.store_cap);
            q.side = Side::Left;
            State::Pair(q)
        };
        let to_right = |mut q: Pair, left: Record, i: u32| {
            q.left = left;
            q.right = Record::new();
            q.right_learnt = ClauseStore::new(self.cfg.store_cap);
            q.side = Side::Right(i);
            State::Pair(q)
        };
        use RuleName::*;
        match mv.rule {
            ConcludeL | ConcludeRL => State::Failstate,
            BacktrackL | BackjumpL | BacktrackRL | BackjumpRL => {
                let left = p.left.backtrack().expect("a decision literal");
                to_left(q, left)
            }
            PropagateL | PropagateL1 => {
                push(&mut q.left, mv);
                State::Pair(q)
            }
            DecideL => {
                q.left.decide(mv.lit.unwrap());
                State::Pair(q)
            }
            CrossLR => to_right(q, p.left.clone(), 0),
            CrossLR1 => to_right(q, p.left.clone(), 1),
            ConcludeR => State::Ok(p.left.clone()),
            ConcludeR1 => match (self.cfg.extension, p.side) {
                (Extension::SeparateComponents, Side::Right(i)) => to_right(q, p.left.clone(), i + 1),
                _ => State::Ok(p.left.clone()),
            },
            ConcludeR2 => match self.cfg.extension {
                Extension::SeparateComponents => State::Ok(p.left.clone()),
                _ => to_left(q, p.left.clone()),
            },
            BacktrackR | BackjumpR => {
                q.right = p.right.backtrack().expect("a decision literal");
                State::Pair(q)
            }
            PropagateR | PropagateR1 => {
                push(&mut q.right, mv);
                State::Pair(q)
            }
            DecideR => {
                q.right.decide(mv.lit.unwrap());
                State::Pair(q)
            }
            EarlyTestR => {
                let left = p.left.backtrack().expect("a decision literal");
                to_right(q, left, 0)
            }
            LearnLeft => {
                q.left_learnt.add(mv.clause.clone().unwrap());
                State::Pair(q)
            }
            LearnRight => {
                q.right_learnt.add(mv.clause.clone().unwrap());
                State::Pair(q)
            }
            Conclude | Backtrack | Propagate | Unit | Decide | Success => s.clone(),
        }
    }

    /// Set of p-conditions used on the side of `s`.
    pub fn pset_for(&self, side: Side) -> PSet {
        match side {
            Side::Left => self.cfg.left,
            Side::Right(_) => self.cfg.right,
        }
    }
}

fn push(r: &mut Record, mv: &Move) {
    if mv.falsum {
        r.push_falsum();
    } else {
        r.push(mv.lit.unwrap());
    }
}

//! Running a graph from its initial state, with traces and runtime checks.

use serde::{Deserialize, Serialize};

use super::{BasicState, Dpt, EngineError, Measure, Move, RuleName, ScriptStep, Side, Solver, State, Strategy};
use crate::extensions::Clause;
use crate::program::{Atom, AtomTable, Program};
use crate::propagators::is_w_model;
use crate::record::Record;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub max_steps: u64,
    pub record_trace: bool,
    pub check_measure: bool,
    pub check_invariants: bool,
}

impl Default for RunOptions {
    fn default() -> RunOptions {
        RunOptions {
            max_steps: 10_000_000,
            record_trace: false,
            check_measure: false,
            check_invariants: false,
        }
    }
}

impl RunOptions {
    pub fn checked() -> RunOptions {
        RunOptions {
            check_measure: true,
            check_invariants: true,
            ..RunOptions::default()
        }
    }
}

/// One line of a trace; the records are those of the target state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub rule: String,
    pub pcondition: Option<String>,
    pub literal: Option<String>,
    pub left: String,
    pub right: String,
    pub side: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Sat(Vec<Atom>),
    Unsat,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Stats {
    pub decisions: u64,
    pub propagations: u64,
    pub backtracks: u64,
    pub crossings: u64,
    pub learnt_count: u64,
}

impl Stats {
    fn record(&mut self, r: RuleName) {
        if r.is_decide() {
            self.decisions += 1;
        } else if r.is_propagate() {
            self.propagations += 1;
        } else if r.is_backtrack() {
            self.backtracks += 1;
        } else if r.is_cross() {
            self.crossings += 1;
        } else if matches!(r, RuleName::LearnLeft | RuleName::LearnRight) {
            self.learnt_count += 1;
        }
    }
}

/// A clause added to a learnt store, with the left record at that time.
#[derive(Clone, Debug)]
pub struct LearntEvent {
    pub side: Side,
    pub clause: Clause,
    pub left: Record,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub outcome: Outcome,
    pub steps: u64,
    pub trace: Vec<TraceStep>,
    pub stats: Stats,
    pub measure_violations: Vec<String>,
    pub invariant_violations: Vec<String>,
    pub learnt: Vec<LearntEvent>,
    pub terminal_record: Option<Record>,
}

impl RunReport {
    pub fn model_names(&self, p: &Program) -> Option<Vec<String>> {
        match &self.outcome {
            Outcome::Sat(m) => Some(m.iter().map(|&a| p.table().name(a).to_string()).collect()),
            Outcome::Unsat => None,
        }
    }

    /// Closing line of a trace.
    pub fn terminal_json(&self, p: &Program) -> serde_json::Value {
        match self.model_names(p) {
            Some(m) => serde_json::json!({"terminal": "ok", "model": m}),
            None => serde_json::json!({"terminal": "failstate"}),
        }
    }
}

fn lit_text(table: &AtomTable, mv: &Move) -> Option<String> {
    if mv.falsum {
        Some("#false".into())
    } else {
        mv.lit.map(|l| table.lit_name(l))
    }
}

fn model_of(p: &Program, r: &Record) -> Vec<Atom> {
    let mut m: Vec<Atom> = r
        .lits()
        .filter(|l| l.is_positive() && p.has_atom(l.atom()))
        .map(|l| l.atom())
        .collect();
    m.sort_unstable();
    m.dedup();
    m
}

/// Runs the two-layer graph until a terminal state.
pub fn run(solver: &Solver, strategy: &mut Strategy, opts: &RunOptions) -> Result<RunReport, EngineError> {
    let mut s = solver.initial();
    let mut pending: Option<Clause> = None;
    let mut rep = RunReport {
        outcome: Outcome::Unsat,
        steps: 0,
        trace: Vec::new(),
        stats: Stats::default(),
        measure_violations: Vec::new(),
        invariant_violations: Vec::new(),
        learnt: Vec::new(),
        terminal_record: None,
    };
    let scripted = matches!(strategy, Strategy::Scripted(..));
    let gen = solver.generated();
    while let State::Pair(p) = &s {
        if rep.steps >= opts.max_steps {
            return Err(EngineError::StepLimit(opts.max_steps));
        }
        let moves = solver.moves(&s, pending.as_ref());
        let side_table = |side: Side| match side {
            Side::Left => None,
            Side::Right(i) => Some(solver.witness(&p.left, i)),
        };
        let wt = side_table(p.side);
        let table = wt.as_ref().map_or(gen.table(), |w| w.table());
        // right-to-left rules flip a literal of the left record
        let table_of = |mv: &Move| if mv.rule.is_right_to_left() { gen.table() } else { table };
        let names: Vec<Option<String>> = if scripted {
            moves.iter().map(|mv| lit_text(table_of(mv), mv)).collect()
        } else {
            Vec::new()
        };
        let (i, pcond) = strategy.choose(&moves, &names)?;
        let mv = &moves[i];

        if opts.check_invariants {
            if mv.rule.is_cross() {
                let m = p.left.assign(gen.table().len());
                if !is_w_model(gen, &m, solver.config().gen.w1()) {
                    rep.invariant_violations.push(format!(
                        "left record {} is not a {}-model of the generated program at {}",
                        p.left.render(gen.table()),
                        solver.config().gen.w1().name(),
                        mv.rule
                    ));
                }
            }
            if mv.rule.is_right_to_left() {
                if let Some(w) = &wt {
                    let m = p.right.assign(w.table().len());
                    if !is_w_model(w, &m, solver.config().test.w1()) {
                        rep.invariant_violations.push(format!(
                            "right record {} is not a {}-model of the witness at {}",
                            p.right.render(w.table()),
                            solver.config().test.w1().name(),
                            mv.rule
                        ));
                    }
                }
            }
        }

        let t = solver.apply(&s, mv);
        if opts.check_measure {
            let before = Measure::of(&s, solver.left_complete(&p.left));
            let after = match &t {
                State::Pair(q) => Measure::of(&t, solver.left_complete(&q.left)),
                _ => Measure::Terminal,
            };
            if after <= before {
                rep.measure_violations
                    .push(format!("{} does not increase the measure: {before:?} -> {after:?}", mv.rule));
            }
        }
        rep.stats.record(mv.rule);
        match mv.rule {
            RuleName::LearnLeft | RuleName::LearnRight => rep.learnt.push(LearntEvent {
                side: if mv.rule == RuleName::LearnLeft { Side::Left } else { p.side },
                clause: mv.clause.clone().unwrap_or_default(),
                left: p.left.clone(),
            }),
            _ => {}
        }
        pending = if mv.rule == RuleName::BackjumpRL { mv.clause.clone() } else { None };
        if opts.record_trace {
            let literal = lit_text(table_of(mv), mv);
            let (left, right, side) = match &t {
                State::Pair(q) => {
                    let right = match q.side {
                        Side::Left => String::new(),
                        Side::Right(i) => q.right.render(solver.witness(&q.left, i).table()),
                    };
                    (q.left.render(gen.table()), right, q.side.label())
                }
                State::Ok(l) => (l.render(gen.table()), String::new(), "ok".into()),
                State::Failstate => (String::new(), String::new(), "fail".into()),
            };
            rep.trace.push(TraceStep {
                step: rep.steps as usize + 1,
                rule: mv.rule.as_str().into(),
                pcondition: if mv.rule.is_propagate() { pcond.map(|c| c.name().into()) } else { None },
                literal,
                left,
                right,
                side,
            });
        }
        rep.steps += 1;
        s = t;
    }
    match s {
        State::Ok(l) => {
            rep.outcome = Outcome::Sat(model_of(solver.program(), &l));
            rep.terminal_record = Some(l);
        }
        _ => rep.outcome = Outcome::Unsat,
    }
    Ok(rep)
}

/// Runs the single-layer graph until a terminal state.
pub fn run_single(dpt: &Dpt, strategy: &mut Strategy, opts: &RunOptions) -> Result<RunReport, EngineError> {
    let mut s = dpt.initial();
    let mut rep = RunReport {
        outcome: Outcome::Unsat,
        steps: 0,
        trace: Vec::new(),
        stats: Stats::default(),
        measure_violations: Vec::new(),
        invariant_violations: Vec::new(),
        learnt: Vec::new(),
        terminal_record: None,
    };
    let table = dpt.program.table();
    while let BasicState::Node(r) = &s {
        if rep.steps >= opts.max_steps {
            return Err(EngineError::StepLimit(opts.max_steps));
        }
        let moves = dpt.moves(&s);
        let names: Vec<Option<String>> = moves.iter().map(|mv| lit_text(table, mv)).collect();
        let (i, pcond) = strategy.choose(&moves, &names)?;
        let mv = &moves[i];
        let t = dpt.apply(&s, mv);
        if opts.check_measure {
            let ok = match &t {
                BasicState::Node(r2) => r2.depth() > r.depth(),
                _ => true,
            };
            if !ok {
                rep.measure_violations.push(format!("{} does not increase the measure", mv.rule));
            }
        }
        rep.stats.record(mv.rule);
        if opts.record_trace {
            let (left, side) = match &t {
                BasicState::Node(r) => (r.render(table), "L"),
                BasicState::Ok(r) => (r.render(table), "ok"),
                BasicState::Failstate => (String::new(), "fail"),
            };
            rep.trace.push(TraceStep {
                step: rep.steps as usize + 1,
                rule: mv.rule.as_str().into(),
                pcondition: if mv.rule.is_propagate() { pcond.map(|c| c.name().into()) } else { None },
                literal: lit_text(table, mv),
                left,
                right: String::new(),
                side: side.into(),
            });
        }
        rep.steps += 1;
        s = t;
    }
    if let BasicState::Ok(l) = s {
        rep.outcome = Outcome::Sat(model_of(&dpt.program, &l));
        rep.terminal_record = Some(l);
    }
    Ok(rep)
}

/// Replays recorded steps and checks that every target state matches.
pub fn replay(solver: &Solver, recorded: &[TraceStep], opts: &RunOptions) -> Result<RunReport, EngineError> {
    let script = recorded
        .iter()
        .map(|t| ScriptStep {
            rule: t.rule.clone(),
            lit: t.literal.clone(),
            pcond: t.pcondition.as_deref().and_then(crate::propagators::PCondition::parse),
        })
        .collect();
    let mut strategy = Strategy::scripted(script);
    let opts = RunOptions {
        record_trace: true,
        ..opts.clone()
    };
    let rep = run(solver, &mut strategy, &opts)?;
    for (k, (got, want)) in rep.trace.iter().zip(recorded).enumerate() {
        if got != want {
            return Err(EngineError::Diverged {
                step: k + 1,
                msg: format!(
                    "expected {} [{}] | [{}], got {} [{}] | [{}]",
                    want.rule, want.left, want.right, got.rule, got.left, got.right
                ),
            });
        }
    }
    if rep.trace.len() != recorded.len() {
        return Err(EngineError::Diverged {
            step: rep.trace.len().min(recorded.len()) + 1,
            msg: format!("trace has {} steps, run took {}", recorded.len(), rep.trace.len()),
        });
    }
    Ok(rep)
}

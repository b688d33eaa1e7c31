use std::collections::BTreeSet;

use dasp_core::engine::*;
use dasp_core::oracle::{classical_models, stable_models, Model};
use dasp_core::propagators::PSet;
use dasp_core::random::{random_program, GenParams};
use dasp_core::transforms::{GenKind, TestKind};
use dasp_core::{parse_program, Lit, Program, Record};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EXAMPLE: &str = "a :- c. b :- c. c :- a, b. a | b.";
const PI1: &str = ":- not a, not b. :- a, not c.";

fn lit(p: &Program, s: &str) -> Lit {
    p.table().parse_lit(s).unwrap()
}

fn rules(moves: &[Move]) -> Vec<RuleName> {
    moves.iter().map(|m| m.rule).collect()
}

/// Applies the moves named by `lines` (`Rule` or `Rule lit`) from the initial state.
fn walk(s: &Solver, lines: &[&str]) -> State {
    let mut st = s.initial();
    for line in lines {
        let mut it = line.split_whitespace();
        let (rule, l) = (it.next().unwrap(), it.next());
        let State::Pair(p) = &st else { panic!("terminal before {line}") };
        let witness = match p.side {
            Side::Left => None,
            Side::Right(i) => Some(s.witness(&p.left, i)),
        };
        let table = witness.as_ref().map_or(s.generated().table(), |w| w.table());
        let mv = s
            .moves(&st, None)
            .into_iter()
            .find(|m| m.rule.as_str() == rule && m.lit.map(|x| table.lit_name(x)).as_deref() == l)
            .unwrap_or_else(|| panic!("{line} not applicable"));
        st = s.apply(&st, &mv);
    }
    st
}

#[test]
fn dp_moves() {
    let p = parse_program(PI1).unwrap();
    let dpt = Dpt::dp(p.clone());
    let m = dpt.moves(&dpt.initial());
    assert_eq!(m.len(), 6);
    assert!(m.iter().all(|x| x.rule == RuleName::Decide));

    let mut r = Record::new();
    r.decide(lit(&p, "a"));
    r.decide(lit(&p, "-c"));
    r.push(lit(&p, "c"));
    // Unit still applies to inconsistent records: -a from the clause -a | c
    let m = dpt.moves(&BasicState::Node(r.clone()));
    assert_eq!(rules(&m), [RuleName::Backtrack, RuleName::Unit]);
    assert_eq!(m[1].lit, Some(lit(&p, "-a")));
    let next = dpt.apply(&BasicState::Node(r), &m[0]);
    let BasicState::Node(b) = next else { panic!() };
    assert_eq!(b.render(p.table()), "a* c");

    assert!(dpt.moves(&BasicState::Failstate).is_empty());
    assert!(dpt.moves(&BasicState::Ok(Record::new())).is_empty());
}

#[test]
fn dp_conclude_without_decisions() {
    let p = parse_program("a. :- a.").unwrap();
    let rep = run_single(&Dpt::dp(p), &mut Strategy::Priority, &RunOptions::checked()).unwrap();
    assert_eq!(rep.outcome, Outcome::Unsat);
}

#[test]
fn dlv_right_layer_gives_up_to_the_left() {
    let s = Solver::new(parse_program(EXAMPLE).unwrap(), SolverConfig::dlv()).unwrap();
    let st = walk(
        &s,
        &["Decide_L c", "Propagate_L a", "Propagate_L b", "Cross_LR", "Decide_R b", "Propagate_R -a", "Propagate_R c"],
    );
    let m = s.moves(&st, None);
    assert_eq!(rules(&m), [RuleName::BacktrackRL]);
    let State::Pair(p) = s.apply(&st, &m[0]) else { panic!() };
    assert_eq!(p.side, Side::Left);
    assert_eq!(p.left.render(s.generated().table()), "-c");
    assert!(p.right.is_empty());
    assert!(s.moves(&State::Failstate, None).is_empty());
}

#[test]
fn gnt_right_layer_starts_with_a_decision() {
    let s = Solver::new(parse_program(EXAMPLE).unwrap(), SolverConfig::gnt()).unwrap();
    let st = walk(
        &s,
        &[
            "Decide_L -a__r",
            "Propagate_L a",
            "Propagate_L a__s",
            "Decide_L -b",
            "Propagate_L b__r",
            "Propagate_L -c",
            "Decide_L -b__s",
            "Cross_LR",
        ],
    );
    assert!(rules(&s.moves(&st, None)).contains(&RuleName::DecideR));
}

fn configs() -> Vec<SolverConfig> {
    vec![
        SolverConfig::cmodels(),
        SolverConfig::gnt(),
        SolverConfig::dlv(),
        SolverConfig::new(GenKind::Cnfcomp, PSet::UP, TestKind::GntTest, PSet::SM),
        SolverConfig::new(GenKind::CmodelsGen, PSet::UP, TestKind::DlvTest, PSet::UP),
    ]
}

fn corpus(seed: u64, n: usize) -> Vec<Program> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_program(&mut rng, &GenParams::tiny(5, 6))).collect()
}

fn agrees(outcome: &Outcome, st: &[Model]) -> bool {
    match outcome {
        Outcome::Sat(m) => st.contains(m),
        Outcome::Unsat => st.is_empty(),
    }
}

#[test]
fn answers_do_not_depend_on_the_strategy() {
    let mut programs = corpus(21, 20);
    programs.push(parse_program(EXAMPLE).unwrap());
    for p in &programs {
        let st = stable_models(p, 20).unwrap();
        for cfg in configs() {
            let s = Solver::new(p.clone(), cfg.clone()).unwrap();
            let mut strategies = vec![Strategy::Priority];
            for seed in 0..20 {
                strategies.push(Strategy::random_decide(seed));
                strategies.push(Strategy::random(seed));
            }
            for mut strat in strategies {
                let rep = run(&s, &mut strat, &RunOptions::checked()).unwrap();
                assert!(agrees(&rep.outcome, &st), "{} on\n{}", cfg.describe(), p.render());
                assert!(rep.measure_violations.is_empty(), "{:?}", rep.measure_violations);
                assert!(rep.invariant_violations.is_empty(), "{:?}", rep.invariant_violations);
            }
        }
    }
}

#[test]
fn replay_reproduces_a_run() {
    let opts = RunOptions {
        record_trace: true,
        ..RunOptions::default()
    };
    for (k, p) in corpus(22, 10).iter().enumerate() {
        for cfg in configs() {
            let s = Solver::new(p.clone(), cfg).unwrap();
            let rep = run(&s, &mut Strategy::random(k as u64), &opts).unwrap();
            assert_eq!(rep.trace.len() as u64, rep.steps);
            let again = replay(&s, &rep.trace, &RunOptions::default()).unwrap();
            assert_eq!(again.outcome, rep.outcome);
            assert_eq!(again.trace, rep.trace);
        }
    }
}

#[test]
fn replay_reports_divergence() {
    let s = Solver::new(parse_program(EXAMPLE).unwrap(), SolverConfig::dlv()).unwrap();
    let opts = RunOptions {
        record_trace: true,
        ..RunOptions::default()
    };
    let rep = run(&s, &mut Strategy::Priority, &opts).unwrap();
    let mut bad = rep.trace.clone();
    bad[0].left = "nonsense".into();
    assert!(matches!(replay(&s, &bad, &opts), Err(EngineError::Diverged { step: 1, .. })));
    let short = &rep.trace[..rep.trace.len() - 1];
    assert!(matches!(replay(&s, short, &opts), Err(EngineError::Diverged { .. })));
}

#[test]
fn step_limit() {
    let s = Solver::new(parse_program(EXAMPLE).unwrap(), SolverConfig::gnt()).unwrap();
    let opts = RunOptions {
        max_steps: 2,
        ..RunOptions::default()
    };
    assert_eq!(run(&s, &mut Strategy::Priority, &opts).unwrap_err(), EngineError::StepLimit(2));
}

#[test]
fn stats_count_rules() {
    let s = Solver::new(parse_program(EXAMPLE).unwrap(), SolverConfig::dlv()).unwrap();
    let rep = run(&s, &mut Strategy::Priority, &RunOptions::default()).unwrap();
    let st = &rep.stats;
    assert!(st.crossings >= 1);
    assert!(st.decisions + st.propagations + st.backtracks + st.crossings <= rep.steps);
}

#[test]
fn validation() {
    let bad = SolverConfig::new(GenKind::GntGen, PSet::UP, TestKind::GntTest, PSet::SM);
    assert!(matches!(bad.validate(), Err(EngineError::Incompatible(_))));
    let bad = SolverConfig::new(GenKind::DlvGen, PSet::SD, TestKind::DlvTest, PSet::SM);
    assert!(bad.validate().is_err());
    assert!(SolverConfig::dlv().with_extension(Extension::EarlyTest).validate().is_err());
    assert!(SolverConfig::gnt().with_extension(Extension::SeparateComponents).validate().is_err());
    for cfg in configs() {
        assert!(cfg.validate().is_ok(), "{}", cfg.describe());
    }
    assert!(SolverConfig::dlv().with_extension(Extension::SeparateComponents).validate().is_ok());
    assert!(SolverConfig::gnt().with_extension(Extension::EarlyTest).validate().is_ok());
    let p = parse_program("a.").unwrap();
    let mut loose = SolverConfig::new(GenKind::DlvGen, PSet::SM, TestKind::CmodelsTest, PSet::UP);
    assert!(Solver::new(p.clone(), loose.clone()).is_err());
    loose.unsafe_pairs = true;
    assert!(Solver::new(p, loose).is_ok());
    assert_eq!(SolverConfig::named("DLV"), Some(SolverConfig::dlv()));
    assert_eq!(SolverConfig::named("clasp"), None);
}

#[test]
fn graph_comparison() {
    let t = TestKind::CmodelsTest;
    let up = SolverConfig::new(GenKind::Cnfcomp, PSet::UP, t, PSet::UP);
    let sd = SolverConfig::new(GenKind::DlvGen, PSet::SD, t, PSet::UP);
    let mut sm = SolverConfig::new(GenKind::DlvGen, PSet::SM, t, PSet::UP);
    sm.unsafe_pairs = true;
    let p = parse_program("a :- a.").unwrap();
    assert!(compare_graphs(&p, &up, &sd, 10_000).unwrap().identical);
    let d = compare_graphs(&p, &up, &sm, 10_000).unwrap();
    assert!(!d.identical && !d.inconclusive);
    assert!(d.first_difference.is_some());
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..10 {
        let mut params = GenParams::tiny(3, 3);
        params.max_head = 2;
        let q = random_program(&mut rng, &params);
        // full graphs of the extended generators are too large here
        for cfg in [SolverConfig::dlv(), up.clone(), sd.clone()] {
            let d = compare_graphs(&q, &cfg, &cfg, 1_000_000).unwrap();
            assert!(d.identical, "{} {:?} on\n{}", cfg.describe(), d, q.render());
        }
    }
    let tiny = compare_graphs(&parse_program(EXAMPLE).unwrap(), &up, &sd, 3).unwrap();
    assert!(tiny.inconclusive);
}

fn model_set(ms: &[Model]) -> BTreeSet<Model> {
    ms.iter().cloned().collect()
}

#[test]
fn explorer_examples() {
    let pi1 = parse_program(PI1).unwrap();
    let cm = classical_models(&pi1, 20).unwrap();
    let r = explore_single(&Dpt::dp(pi1), &cm, 10_000);
    assert!(r.passed(), "{:?}", r.violations);
    assert_eq!(r.ok_models, model_set(&cm));

    let ab = parse_program("a | b.").unwrap();
    let st = stable_models(&ab, 20).unwrap();
    assert_eq!(st.len(), 2);
    let s = Solver::new(ab, SolverConfig::cmodels()).unwrap();
    let r = explore_two_layer(&s, &st, 100_000);
    assert!(r.passed(), "{:?}", r.violations);
    assert_eq!(r.ok_models, model_set(&st));

    let odd = parse_program("a :- not a.").unwrap();
    for cfg in configs() {
        let s = Solver::new(odd.clone(), cfg).unwrap();
        let r = explore_two_layer(&s, &[], 100_000);
        assert!(r.passed() && r.fail_reachable && r.ok_models.is_empty());
    }
}

#[test]
fn explorer_flags_a_wrong_expectation() {
    let ab = parse_program("a | b.").unwrap();
    let s = Solver::new(ab.clone(), SolverConfig::dlv()).unwrap();
    let r = explore_two_layer(&s, &[vec![0]], 100_000);
    assert_eq!(r.verdict, Verdict::Fail);
    let r = explore_two_layer(&Solver::new(parse_program(EXAMPLE).unwrap(), SolverConfig::gnt()).unwrap(), &[], 5);
    assert_eq!(r.verdict, Verdict::Inconclusive);
}

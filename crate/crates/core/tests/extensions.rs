use dasp_core::engine::{run, Extension, Outcome, RunOptions, Solver, SolverConfig, Strategy};
use dasp_core::extensions::*;
use dasp_core::oracle::{classical_models, is_answer_set, is_unfounded, stable_models};
use dasp_core::random::{random_program, GenParams};
use dasp_core::{parse_program, Assign, Lit, Program, Record};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EXAMPLE: &str = "a :- c. b :- c. c :- a, b. a | b.";
const TWO_COPIES: &str = "a :- c. b :- c. c :- a, b. a | b. d :- f. e :- f. f :- d, e. d | e.";

fn atoms(p: &Program, names: &[&str]) -> Vec<u32> {
    let mut v: Vec<u32> = names.iter().map(|n| p.table().lookup(n).unwrap()).collect();
    v.sort_unstable();
    v
}

#[test]
fn components() {
    let p = parse_program(EXAMPLE).unwrap();
    let ca = component_analysis(&p);
    assert_eq!(ca.components, vec![atoms(&p, &["a", "b", "c"])]);
    assert_eq!(ca.hcf, vec![false]);
    assert_eq!(ca.nhcfc(), vec![0]);

    let ab = parse_program("a | b.").unwrap();
    let ca = component_analysis(&ab);
    assert_eq!(ca.components, vec![vec![0], vec![1]]);
    assert_eq!(ca.hcf, vec![true, true]);
    assert_eq!(separate_parts(&ab), vec![Part::Hcf(vec![vec![0], vec![1]])]);

    let e = component_analysis(&Program::empty());
    assert!(e.components.is_empty());
    assert_eq!(separate_parts(&Program::empty()), vec![Part::Hcf(vec![])]);

    let two = parse_program(TWO_COPIES).unwrap();
    let parts = separate_parts(&two);
    assert_eq!(
        parts,
        vec![Part::NonHcf(atoms(&two, &["a", "b", "c"])), Part::NonHcf(atoms(&two, &["d", "e", "f"]))]
    );
}

fn count_rule(cfg: &SolverConfig, src: &str, rule: &str, seeds: u64) -> usize {
    let p = parse_program(src).unwrap();
    let st = stable_models(&p, 20).unwrap();
    let s = Solver::new(p, cfg.clone()).unwrap();
    let opts = RunOptions {
        record_trace: true,
        ..RunOptions::checked()
    };
    let mut seen = 0;
    for seed in 0..seeds {
        let rep = run(&s, &mut Strategy::random_decide(seed), &opts).unwrap();
        match &rep.outcome {
            Outcome::Sat(m) => assert!(st.contains(m)),
            Outcome::Unsat => assert!(st.is_empty()),
        }
        assert!(rep.measure_violations.is_empty() && rep.invariant_violations.is_empty());
        seen += rep.trace.iter().filter(|t| t.rule == rule).count();
    }
    seen
}

#[test]
fn separate_components_step_between_parts() {
    let cfg = SolverConfig::dlv().with_extension(Extension::SeparateComponents);
    assert!(count_rule(&cfg, TWO_COPIES, "Conclude_R'", 30) > 0);
    assert!(count_rule(&cfg, TWO_COPIES, "Cross_LR'", 30) > 0);
}

#[test]
fn early_test_fires() {
    let cfg = SolverConfig::gnt().with_extension(Extension::EarlyTest);
    assert!(count_rule(&cfg, EXAMPLE, "EarlyTest_R", 40) + count_rule(&cfg, TWO_COPIES, "EarlyTest_R", 40) > 0);
}

#[test]
fn learning_runs() {
    for cfg in [SolverConfig::cmodels(), SolverConfig::gnt(), SolverConfig::dlv()] {
        let cfg = cfg.with_extension(Extension::Learning);
        let p = parse_program("a :- not a.").unwrap();
        let s = Solver::new(p, cfg.clone()).unwrap();
        for seed in 0..10 {
            let rep = run(&s, &mut Strategy::random(seed), &RunOptions::checked()).unwrap();
            assert_eq!(rep.outcome, Outcome::Unsat);
        }
        assert!(count_rule(&cfg, TWO_COPIES, "Conclude_R", 10) > 0);
    }
    let cfg = SolverConfig::dlv().with_extension(Extension::Learning);
    assert!(count_rule(&cfg, TWO_COPIES, "Learn_Right", 30) + count_rule(&cfg, TWO_COPIES, "Learn_Left", 30) > 0);
}

#[test]
fn backjump_clause() {
    let p = parse_program("a. b. c.").unwrap();
    let l = |s: &str| p.table().parse_lit(s).unwrap();
    let mut r = Record::new();
    r.decide(l("a"));
    r.push(l("c"));
    r.decide(l("b"));
    r.push(l("-b"));
    let bj = conflict_backjump_clause(&r).unwrap();
    assert_eq!(bj.clause, vec![l("-a"), l("-b")]);
    assert_eq!(bj.flipped, l("-b"));
    assert_eq!(bj.prefix, 2);

    let mut one = Record::new();
    one.decide(l("a"));
    one.push(l("-a"));
    assert_eq!(conflict_backjump_clause(&one).unwrap().clause, vec![l("-a")]);
    assert!(conflict_backjump_clause(&Record::from_lits(&[l("a"), l("-a")])).is_none());
}

#[test]
fn clause_store_evicts_oldest() {
    let c = |k: u32| vec![Lit::pos(k)];
    let mut s = ClauseStore::new(2);
    assert_eq!(s.add(c(0)), None);
    assert_eq!(s.add(c(1)), None);
    assert_eq!(s.add(c(1)), None);
    assert_eq!(s.len(), 2);
    assert_eq!(s.add(c(2)), Some(c(0)));
    assert_eq!(s.clauses(), vec![c(1), c(2)]);
    assert!(!s.contains(&c(0)));
    let mut unbounded = ClauseStore::new(0);
    for k in 0..100 {
        assert_eq!(unbounded.add(c(k)), None);
    }
    assert_eq!(unbounded.len(), 100);
}

#[test]
fn early_witness_rejects_non_models() {
    let p = parse_program("a :- b. b.").unwrap();
    let m = Assign::from_lits(2, &[Lit::neg(0), Lit::pos(1)]);
    assert!(!classical_models(&gnt_early_witness(&p, &m), 20).unwrap().is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// A classical model is stable iff no part finds an unfounded subset.
    #[test]
    fn parts_decide_stability(seed in any::<u64>()) {
        let p = random_program(&mut ChaCha8Rng::seed_from_u64(seed), &GenParams::tiny(6, 8));
        let parts = separate_parts(&p);
        for m in classical_models(&p, 20).unwrap() {
            let a = Assign::from_model(p.table().len(), p.atoms(), &m);
            let none = parts
                .iter()
                .all(|part| classical_models(&part_witness(&p, &a, part), 20).unwrap().is_empty());
            prop_assert_eq!(none, is_answer_set(&p, &m, 20).unwrap(), "{:?} on\n{}", m, p.render());
        }
    }

    /// On head-cycle-free components the fixpoint finds exactly the
    /// non-empty unfounded subsets of the true atoms.
    #[test]
    fn hcf_check_matches_brute_force(seed in any::<u64>()) {
        let p = random_program(&mut ChaCha8Rng::seed_from_u64(seed), &GenParams::tiny(6, 8));
        let ca = component_analysis(&p);
        for m in classical_models(&p, 20).unwrap() {
            let a = Assign::from_model(p.table().len(), p.atoms(), &m);
            for (c, _) in ca.components.iter().zip(&ca.hcf).filter(|(_, &h)| h) {
                let t: Vec<u32> = c.iter().copied().filter(|x| m.contains(x)).collect();
                let brute = (1u32..(1 << t.len())).any(|bits| {
                    let x: Vec<u32> = (0..t.len()).filter(|i| bits >> i & 1 == 1).map(|i| t[i]).collect();
                    is_unfounded(&x, &a, &p).unwrap()
                });
                prop_assert_eq!(hcf_unfounded_exists(&p, &a, c), brute, "{:?} {:?} on\n{}", c, m, p.render());
            }
        }
    }

    #[test]
    fn components_partition_the_atoms(seed in any::<u64>()) {
        let p = random_program(&mut ChaCha8Rng::seed_from_u64(seed), &GenParams::default());
        let ca = component_analysis(&p);
        let mut all: Vec<u32> = ca.components.concat();
        all.sort_unstable();
        prop_assert_eq!(all, p.atoms().to_vec());
        prop_assert_eq!(ca.components.len(), ca.hcf.len());
    }
}

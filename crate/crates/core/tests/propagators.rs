use std::collections::BTreeSet;

use dasp_core::oracle::{is_model, is_unfounded, ModelType};
use dasp_core::propagators::*;
use dasp_core::random::{random_program, GenParams};
use dasp_core::transforms::{gen_gnt, test_gnt};
use dasp_core::{parse_program, Assign, Lit, Program};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXAMPLE: &str = "a :- c. b :- c. c :- a, b. a | b.";
const PI1: &str = ":- not a, not b. :- a, not c.";

fn at(p: &Program, text: &str) -> Assign {
    let lits: Vec<Lit> = text.split_whitespace().map(|t| p.table().parse_lit(t).unwrap()).collect();
    Assign::from_lits(p.table().len(), &lits)
}

fn names(p: &Program, lits: &[Lit]) -> Vec<String> {
    lits.iter().map(|&l| p.table().lit_name(l)).collect()
}

/// The gnt witness for the candidate {a} of the example.
fn gnt_witness() -> Program {
    let p = parse_program(EXAMPLE).unwrap();
    test_gnt(&p, &at(&p, "a -b -c"))
}

#[test]
fn unit_propagate() {
    let p = parse_program(PI1).unwrap();
    assert_eq!(names(&p, &pc_unit_propagate(&p, &at(&p, "a"))), ["c"]);
    assert!(pc_unit_propagate(&p, &Assign::new(3)).is_empty());
    let g = gen_gnt(&parse_program(EXAMPLE).unwrap());
    assert!(names(&g, &pc_unit_propagate(&g, &at(&g, "-a__r"))).contains(&"a".to_string()));
    assert!(pc_unit_propagate(&Program::empty(), &Assign::new(0)).is_empty());
}

#[test]
fn unit_propagate_on_violated_rules() {
    // a falsified clause yields its literals, making the record inconsistent
    let p = parse_program(PI1).unwrap();
    let d = out_prop(PSet::UP, &p, &[], &at(&p, "-a -b"));
    assert!(!d.falsum);
    assert_eq!(names(&p, &d.lits.iter().map(|e| e.0).collect::<Vec<_>>()), ["a", "b"]);
    // only the empty clause gives falsum
    let e = parse_program(":- .").unwrap();
    assert!(out_prop(PSet::UP, &e, &[], &Assign::new(0)).falsum);
}

#[test]
fn all_rules_cancelled() {
    let w = gnt_witness();
    assert!(names(&w, &pc_all_rules_cancelled(&w, &at(&w, "-a b"))).contains(&"-b".to_string()));
    let p = parse_program(":- a.").unwrap();
    assert_eq!(names(&p, &pc_all_rules_cancelled(&p, &Assign::new(1))), ["-a"]);
    let f = parse_program("a.").unwrap();
    assert!(pc_all_rules_cancelled(&f, &Assign::new(1)).is_empty());
}

#[test]
fn backchain_true() {
    let w = gnt_witness();
    assert!(names(&w, &pc_backchain_true(&w, &at(&w, "a"))).contains(&"-a__r".to_string()));
    let p = parse_program("a :- b.").unwrap();
    assert_eq!(names(&p, &pc_backchain_true(&p, &at(&p, "a"))), ["b"]);
    let q = parse_program("a :- b. a :- c.").unwrap();
    assert!(pc_backchain_true(&q, &at(&q, "a")).is_empty());
}

#[test]
fn unfounded() {
    let g = gen_gnt(&parse_program(EXAMPLE).unwrap());
    let m = at(&g, "-a__r a a__s -b b__r");
    assert!(names(&g, &pc_unfounded(&g, &m)).contains(&"-c".to_string()));
    let p = parse_program("a :- a.").unwrap();
    assert_eq!(names(&p, &pc_unfounded(&p, &Assign::new(1))), ["-a"]);
    let f = parse_program("a.").unwrap();
    assert!(pc_unfounded(&f, &Assign::new(1)).is_empty());
    // a and b support each other through the disjunction only when one is false
    let d = parse_program("a | b. a :- b. b :- a.").unwrap();
    assert!(pc_unfounded(&d, &at(&d, "a b")).is_empty());
}

#[test]
fn named_sets() {
    assert_eq!(PSet::parse("sd"), Some(PSet::SD));
    assert_eq!(PSet::parse("UnitPropagate,Unfounded").unwrap().enforcing(), Some(ModelType::Sta));
    assert_eq!(PSet::parse("UnitPropagate,AllRulesCancelled").unwrap().enforcing(), Some(ModelType::Sup));
    assert_eq!(PSet::SM.enforcing(), Some(ModelType::Sta));
    assert_eq!(PSet::UP.enforcing(), Some(ModelType::Cla));
    assert_eq!(PSet::parse("AllRulesCancelled").unwrap().enforcing(), None);
    assert_eq!(PSet::parse("up,bogus"), None);
    assert!(PSet::UP.is_subset(PSet::SD) && PSet::SD.is_subset(PSet::SM));
}

#[test]
fn small_enforcing_runs() {
    let params = GenParams::tiny(5, 6);
    for (s, w) in [(PSet::UP, ModelType::Cla), (PSet::SD, ModelType::Sup), (PSet::SM, ModelType::Sta)] {
        let r = check_enforcing(s, w, 200, 3, &params);
        assert!(r.passed(), "{s}: {:?}", r.counterexamples);
    }
    // sd does not enforce stable models: {a <- a} with a true is a counterexample
    let r = check_enforcing(PSet::SD, ModelType::Sta, 300, 3, &params);
    assert!(!r.passed());
}

/// A random program and a random consistent partial assignment over it.
fn sample(seed: u64) -> (Program, Assign) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = random_program(&mut rng, &GenParams::tiny(5, 7));
    let mut m = Assign::new(p.table().len());
    for &a in p.atoms() {
        match rng.gen_range(0..3) {
            0 => m.set(Lit::pos(a)),
            1 => m.set(Lit::neg(a)),
            _ => {}
        }
    }
    (p, m)
}

fn lit_set(d: &Derived) -> BTreeSet<Lit> {
    d.lits.iter().map(|e| e.0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn larger_sets_derive_more(seed in any::<u64>()) {
        let (p, m) = sample(seed);
        let up = out_prop(PSet::UP, &p, &[], &m);
        let sd = out_prop(PSet::SD, &p, &[], &m);
        let sm = out_prop(PSet::SM, &p, &[], &m);
        prop_assert!(lit_set(&up).is_subset(&lit_set(&sd)));
        prop_assert!(lit_set(&sd).is_subset(&lit_set(&sm)));
        prop_assert!(up.falsum <= sd.falsum && sd.falsum <= sm.falsum);
        for (l, _) in &sm.lits {
            prop_assert!(!m.has(*l));
        }
    }

    #[test]
    fn unfounded_witnesses_are_unfounded(seed in any::<u64>()) {
        let (p, m) = sample(seed);
        for (a, x) in unfounded_atoms(&p, &m) {
            prop_assert!(x.contains(&a));
            prop_assert!(is_unfounded(&x, &m, &p).unwrap(), "{:?} on\n{}", x, p.render());
        }
    }

    /// Every atom of every unfounded set is found.
    #[test]
    fn unfounded_is_complete(seed in any::<u64>()) {
        let (p, m) = sample(seed);
        let got: BTreeSet<Lit> = pc_unfounded(&p, &m).into_iter().collect();
        let atoms = p.atoms();
        for bits in 1u32..(1 << atoms.len()) {
            let x: Vec<_> = (0..atoms.len()).filter(|i| bits >> i & 1 == 1).map(|i| atoms[i]).collect();
            if is_unfounded(&x, &m, &p).unwrap() {
                for &a in &x {
                    prop_assert!(m.is_false(a) || got.contains(&Lit::neg(a)), "{:?} on\n{}", x, p.render());
                }
            }
        }
    }

    #[test]
    fn model_check_agrees_with_the_oracle(seed in any::<u64>()) {
        let (p, _) = sample(seed);
        let atoms = p.atoms();
        for bits in 0u32..(1 << atoms.len()) {
            let x: Vec<_> = (0..atoms.len()).filter(|i| bits >> i & 1 == 1).map(|i| atoms[i]).collect();
            let m = Assign::from_model(p.table().len(), atoms, &x);
            for w in [ModelType::Cla, ModelType::Sup, ModelType::Sta] {
                prop_assert_eq!(is_w_model(&p, &m, w), is_model(&p, &x, w, 20).unwrap());
            }
        }
    }
}

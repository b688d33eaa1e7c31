use dasp_core::oracle::*;
use dasp_core::random::{random_program, GenParams};
use dasp_core::{parse_program, Assign, Atom, Lit, Program};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn atoms(p: &Program, names: &str) -> Vec<Atom> {
    let mut v: Vec<Atom> = names.split_whitespace().map(|n| p.table().lookup(n).unwrap()).collect();
    v.sort_unstable();
    v
}

fn assign(p: &Program, text: &str) -> Assign {
    let lits: Vec<Lit> = text.split_whitespace().map(|t| p.table().parse_lit(t).unwrap()).collect();
    Assign::from_lits(p.table().len(), &lits)
}

fn named(p: &Program, ms: &[Model]) -> Vec<String> {
    ms.iter()
        .map(|m| m.iter().map(|&a| p.table().name(a)).collect::<Vec<_>>().join(" "))
        .collect()
}

#[test]
fn reducts() {
    let p = parse_program("a :- not b. b :- not a.").unwrap();
    assert_eq!(reduct(&p, &atoms(&p, "a")).render(), "a.\n");
    let q = parse_program("a :- b. b | c.").unwrap();
    assert_eq!(reduct(&q, &atoms(&q, "a")), q);
    let r = parse_program("a :- not a.").unwrap();
    assert!(reduct(&r, &atoms(&r, "a")).rules().is_empty());
}

#[test]
fn classical_models_of_pi1() {
    let p = parse_program(":- not a, not b. :- a, not c.").unwrap();
    let ms = classical_models(&p, DEFAULT_CAP).unwrap();
    assert_eq!(named(&p, &ms), ["b", "a c", "b c", "a b c"]);
    assert!(ms.contains(&atoms(&p, "a b c")));
}

#[test]
fn classical_edge_cases() {
    assert_eq!(classical_models(&Program::empty(), DEFAULT_CAP).unwrap(), vec![Vec::<Atom>::new()]);
    assert!(classical_models(&parse_program(":- .").unwrap(), DEFAULT_CAP).unwrap().is_empty());
}

#[test]
fn supporting_rules() {
    let p = parse_program("a :- a.").unwrap();
    assert!(is_supporting_rule(&p.rules()[0], 0, &assign(&p, "a")).unwrap());
    let q = parse_program("a | b.").unwrap();
    assert!(!is_supporting_rule(&q.rules()[0], 0, &assign(&q, "b")).unwrap());
    let r = parse_program("a :- not c.").unwrap();
    assert!(!is_supporting_rule(&r.rules()[0], 0, &assign(&r, "c")).unwrap());
}

#[test]
fn supported_models() {
    let p = parse_program("a :- a.").unwrap();
    assert_eq!(named(&p, &dasp_core::oracle::supported_models(&p, DEFAULT_CAP).unwrap()), ["", "a"]);
    let q = parse_program("a.").unwrap();
    assert_eq!(named(&q, &dasp_core::oracle::supported_models(&q, DEFAULT_CAP).unwrap()), ["a"]);
    let r = parse_program(":- not a.").unwrap();
    assert!(dasp_core::oracle::supported_models(&r, DEFAULT_CAP).unwrap().is_empty());
}

#[test]
fn unfounded_sets() {
    let p = parse_program("a :- a.").unwrap();
    assert!(is_unfounded(&atoms(&p, "a"), &Assign::new(p.table().len()), &p).unwrap());
    let q = parse_program("c :- a, b. a. b.").unwrap();
    assert!(is_unfounded(&atoms(&q, "c"), &assign(&q, "-b"), &q).unwrap());
    assert!(!is_unfounded(&atoms(&q, "c"), &assign(&q, "b"), &q).unwrap());
    assert!(is_unfounded(&[], &assign(&q, "a"), &q).unwrap());
}

#[test]
fn answer_sets() {
    let p = parse_program("a | b.").unwrap();
    assert!(is_answer_set(&p, &atoms(&p, "a"), DEFAULT_CAP).unwrap());
    assert!(!is_answer_set(&p, &atoms(&p, "a b"), DEFAULT_CAP).unwrap());
    let q = parse_program("a :- a.").unwrap();
    assert!(!is_answer_set(&q, &atoms(&q, "a"), DEFAULT_CAP).unwrap());
    assert!(is_answer_set(&q, &[], DEFAULT_CAP).unwrap());
    let e = parse_program("a :- c. b :- c. c :- a, b. a | b.").unwrap();
    assert!(is_answer_set(&e, &atoms(&e, "a"), DEFAULT_CAP).unwrap());
    assert!(is_answer_set(&e, &atoms(&e, "b"), DEFAULT_CAP).unwrap());
    assert!(!is_answer_set(&e, &atoms(&e, "a b c"), DEFAULT_CAP).unwrap());
}

#[test]
fn stable_model_enumeration() {
    for (src, want) in [
        ("a | b.", vec!["a", "b"]),
        ("a :- not a.", vec![]),
        ("a :- c. b :- c. c :- a, b. a | b.", vec!["a", "b"]),
    ] {
        let p = parse_program(src).unwrap();
        assert_eq!(named(&p, &stable_models(&p, DEFAULT_CAP).unwrap()), want, "{src}");
        assert_eq!(named(&p, &stable_models_unfounded(&p, DEFAULT_CAP).unwrap()), want, "{src}");
    }
    let pi1 = parse_program(":- not a, not b. :- a, not c.").unwrap();
    assert!(stable_models(&pi1, DEFAULT_CAP).unwrap().is_empty());
    assert!(stable_models_unfounded(&pi1, DEFAULT_CAP).unwrap().is_empty());
}

#[test]
fn cap_is_enforced() {
    let src: String = (0..21).map(|i| format!("x{i} | y{i}.\n")).collect();
    let p = parse_program(&src).unwrap();
    assert!(matches!(stable_models(&p, DEFAULT_CAP), Err(OracleError::CapExceeded { .. })));
}

#[test]
fn model_kinds() {
    let p = parse_program("a :- a.").unwrap();
    assert!(is_model(&p, &atoms(&p, "a"), ModelType::Sup, DEFAULT_CAP).unwrap());
    assert!(!is_model(&p, &atoms(&p, "a"), ModelType::Sta, DEFAULT_CAP).unwrap());
    assert!(ModelType::Cla.strength() < ModelType::Sup.strength());
    assert!(ModelType::Sup.strength() < ModelType::Sta.strength());
}

proptest! {
    #[test]
    fn oracles_agree_and_nest(seed in any::<u64>()) {
        let p = random_program(&mut ChaCha8Rng::seed_from_u64(seed), &GenParams::default());
        let st = stable_models(&p, DEFAULT_CAP).unwrap();
        prop_assert_eq!(&st, &stable_models_unfounded(&p, DEFAULT_CAP).unwrap());
        let sup = dasp_core::oracle::supported_models(&p, DEFAULT_CAP).unwrap();
        let cla = classical_models(&p, DEFAULT_CAP).unwrap();
        prop_assert!(st.iter().all(|m| sup.contains(m)));
        prop_assert!(sup.iter().all(|m| cla.contains(m)));
        for m in &cla {
            prop_assert_eq!(st.contains(m), is_answer_set(&p, m, DEFAULT_CAP).unwrap());
        }
    }

    #[test]
    fn stable_models_are_minimal_models_of_the_reduct(seed in any::<u64>()) {
        let p = random_program(&mut ChaCha8Rng::seed_from_u64(seed), &GenParams::tiny(5, 6));
        for m in stable_models(&p, DEFAULT_CAP).unwrap() {
            let r = reduct(&p, &m);
            prop_assert!(satisfies(&r, &m));
            for smaller in classical_models(&r, DEFAULT_CAP).unwrap() {
                prop_assert!(!(smaller.len() < m.len() && smaller.iter().all(|a| m.contains(a))));
            }
        }
    }
}

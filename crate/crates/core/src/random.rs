//! Random small ground programs for fuzzing and sampling.

use std::sync::Arc;

use rand::Rng;

use crate::program::{Atom, AtomTable, Program, Rule};

#[derive(Clone, Debug)]
pub struct GenParams {
    pub max_atoms: usize,
    pub max_rules: usize,
    pub max_head: usize,
    pub max_body: usize,
    pub negation: bool,
    pub constraints: bool,
}

impl Default for GenParams {
    fn default() -> GenParams {
        GenParams {
            max_atoms: 8,
            max_rules: 12,
            max_head: 3,
            max_body: 2,
            negation: true,
            constraints: true,
        }
    }
}

impl GenParams {
    pub fn tiny(max_atoms: usize, max_rules: usize) -> GenParams {
        GenParams {
            max_atoms,
            max_rules,
            ..GenParams::default()
        }
    }
}

fn pick(rng: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    let mut v = Vec::new();
    for _ in 0..k {
        let a = rng.gen_range(0..n);
        if !v.contains(&a) {
            v.push(a);
        }
    }
    v
}

/// Atoms are named `a`, `b`, ... and interned in order of first occurrence.
pub fn random_program(rng: &mut impl Rng, params: &GenParams) -> Program {
    let n = rng.gen_range(1..=params.max_atoms.clamp(1, 26));
    let count = rng.gen_range(1..=params.max_rules.max(1));
    let mut raw = Vec::with_capacity(count);
    for _ in 0..count {
        let hsize = if params.constraints && rng.gen_bool(0.12) {
            0
        } else if params.max_head > 1 && rng.gen_bool(0.35) {
            rng.gen_range(2..=params.max_head)
        } else {
            1
        };
        let head = pick(rng, n, hsize);
        let k = rng.gen_range(0..=params.max_body);
        let pos = pick(rng, n, k);
        let neg = if params.negation {
            let k = rng.gen_range(0..=params.max_body);
            pick(rng, n, k)
        } else {
            Vec::new()
        };
        raw.push((head, pos, neg));
    }
    let mut table = AtomTable::new();
    let mut ids: Vec<Option<Atom>> = vec![None; n];
    let mut id = |i: usize, table: &mut AtomTable| -> Atom {
        *ids[i].get_or_insert_with(|| table.intern(&((b'a' + i as u8) as char).to_string()))
    };
    let mut rules = Vec::with_capacity(count);
    for (h, p, ng) in raw {
        let head = h.into_iter().map(|i| id(i, &mut table)).collect();
        let pos = p.into_iter().map(|i| id(i, &mut table)).collect();
        let neg = ng.into_iter().map(|i| id(i, &mut table)).collect();
        rules.push(Rule::new(head, pos, neg));
    }
    Program::new(Arc::new(table), rules)
}

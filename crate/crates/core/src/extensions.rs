//! Component analysis, head-cycle-free checks, early minimality witnesses
//! and learnt-clause stores.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::program::{Atom, Lit, Program, Rule};
use crate::record::{Assign, Record};
use crate::transforms::test_gnt;

/// SCCs of the positive dependency graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentAnalysis {
    /// Ordered by smallest atom; each component ascending.
    pub components: Vec<Vec<Atom>>,
    /// `hcf[i]` is true when no two distinct atoms of component `i` share a head.
    pub hcf: Vec<bool>,
}

impl ComponentAnalysis {
    /// Indices of the non-HCF components, in order.
    pub fn nhcfc(&self) -> Vec<usize> {
        (0..self.components.len()).filter(|&i| !self.hcf[i]).collect()
    }
}

pub fn component_analysis(p: &Program) -> ComponentAnalysis {
    let n = p.table().len();
    let mut succ: Vec<Vec<Atom>> = vec![Vec::new(); n];
    for r in p.rules() {
        for &h in &r.head {
            for &b in &r.pos {
                succ[h as usize].push(b);
            }
        }
    }
    let mut comps = tarjan(p.atoms(), &succ, n);
    for c in comps.iter_mut() {
        c.sort_unstable();
    }
    comps.sort();
    let mut comp_of = vec![usize::MAX; n];
    for (i, c) in comps.iter().enumerate() {
        for &a in c {
            comp_of[a as usize] = i;
        }
    }
    let mut hcf = vec![true; comps.len()];
    for r in p.rules() {
        for (k, &x) in r.head.iter().enumerate() {
            for &y in &r.head[k + 1..] {
                if x != y && comp_of[x as usize] == comp_of[y as usize] {
                    hcf[comp_of[x as usize]] = false;
                }
            }
        }
    }
    ComponentAnalysis {
        components: comps,
        hcf,
    }
}

fn tarjan(atoms: &[Atom], succ: &[Vec<Atom>], n: usize) -> Vec<Vec<Atom>> {
    struct St<'a> {
        succ: &'a [Vec<Atom>],
        index: Vec<usize>,
        low: Vec<usize>,
        on: Vec<bool>,
        stack: Vec<Atom>,
        next: usize,
        out: Vec<Vec<Atom>>,
    }
    fn visit(s: &mut St, v: Atom) {
        let vi = v as usize;
        s.index[vi] = s.next;
        s.low[vi] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on[vi] = true;
        for k in 0..s.succ[vi].len() {
            let w = s.succ[vi][k];
            let wi = w as usize;
            if s.index[wi] == usize::MAX {
                visit(s, w);
                s.low[vi] = s.low[vi].min(s.low[wi]);
            } else if s.on[wi] {
                s.low[vi] = s.low[vi].min(s.index[wi]);
            }
        }
        if s.low[vi] == s.index[vi] {
            let mut c = Vec::new();
            loop {
                let w = s.stack.pop().unwrap();
                s.on[w as usize] = false;
                c.push(w);
                if w == v {
                    break;
                }
            }
            s.out.push(c);
        }
    }
    let mut s = St {
        succ,
        index: vec![usize::MAX; n],
        low: vec![0; n],
        on: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for &a in atoms {
        if s.index[a as usize] == usize::MAX {
            visit(&mut s, a);
        }
    }
    s.out
}

/// Polynomial check for a head-cycle-free component: does some non-empty
/// subset of `M+ ∩ comp` form an unfounded set on the complete assignment `m`?
pub fn hcf_unfounded_exists(p: &Program, m: &Assign, comp: &[Atom]) -> bool {
    let n = p.table().len();
    let mut y = vec![false; n];
    for &a in comp {
        y[a as usize] = m.is_true(a);
    }
    loop {
        let mut changed = false;
        for &a in comp {
            if !y[a as usize] {
                continue;
            }
            let escapes = p.rules_with_head(a).iter().any(|&i| {
                let r = &p.rules()[i as usize];
                r.pos.iter().all(|&b| m.is_true(b))
                    && !r.neg.iter().any(|&b| m.is_true(b))
                    && !r.pos.iter().any(|&b| y[b as usize])
                    && !r.head.iter().any(|&h| h != a && m.is_true(h))
            });
            if escapes {
                y[a as usize] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    comp.iter().any(|&a| y[a as usize])
}

/// One step of the separate-components minimality test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Part {
    /// A non-HCF component, tested with the restricted dlv witness.
    NonHcf(Vec<Atom>),
    /// All HCF components, tested by the polynomial check.
    Hcf(Vec<Vec<Atom>>),
}

/// Non-HCF components in order, then one part for the HCF components. The
/// trailing part is present when there is some HCF component or no non-HCF
/// component at all, so the list is never empty.
pub fn separate_parts(p: &Program) -> Vec<Part> {
    let ca = component_analysis(p);
    let mut parts: Vec<Part> = ca
        .nhcfc()
        .into_iter()
        .map(|i| Part::NonHcf(ca.components[i].clone()))
        .collect();
    let hcf: Vec<Vec<Atom>> = ca
        .components
        .iter()
        .zip(&ca.hcf)
        .filter(|(_, &h)| h)
        .map(|(c, _)| c.clone())
        .collect();
    if !hcf.is_empty() || parts.is_empty() {
        parts.push(Part::Hcf(hcf));
    }
    parts
}

/// Witness program of a part: it has a classical model iff the part finds a
/// non-empty unfounded subset of the true atoms.
pub fn part_witness(p: &Program, m: &Assign, part: &Part) -> Program {
    match part {
        Part::NonHcf(c) => {
            let in_c = |a: Atom| c.binary_search(&a).is_ok();
            let mut cl = Vec::new();
            for r in p.rules() {
                if r.neg.iter().any(|&a| m.is_true(a)) || !r.pos.iter().all(|&a| m.is_true(a)) {
                    continue;
                }
                if r.head.iter().any(|&h| m.is_true(h) && !in_c(h)) {
                    continue;
                }
                let mut clause: Vec<Lit> = r
                    .head
                    .iter()
                    .filter(|&&h| m.is_true(h))
                    .map(|&h| Lit::neg(h))
                    .collect();
                clause.extend(r.pos.iter().filter(|&&b| in_c(b)).map(|&b| Lit::pos(b)));
                cl.push(clause);
            }
            cl.push(
                c.iter()
                    .filter(|&&a| m.is_true(a))
                    .map(|&a| Lit::pos(a))
                    .collect(),
            );
            Program::from_clauses(p.shared_table(), &cl)
        }
        Part::Hcf(comps) => {
            let found = comps.iter().any(|c| hcf_unfounded_exists(p, m, c));
            let rules = if found {
                Vec::new()
            } else {
                vec![Rule::default()]
            };
            Program::new(p.shared_table(), rules)
        }
    }
}

/// Witness used by the early minimality test. A covering candidate that is
/// not a classical model gets a satisfiable witness so it is never accepted.
pub fn gnt_early_witness(p: &Program, m: &Assign) -> Program {
    if m.covers(p.atoms()) {
        let model = p
            .rules()
            .iter()
            .all(|r| r.clause().iter().any(|&l| m.has(l)));
        if !model {
            return Program::new(Arc::new(p.table().clone()), Vec::new());
        }
    }
    test_gnt(p, m)
}

/// A learnt clause in canonical literal order.
pub type Clause = Vec<Lit>;

/// Backjump data derived from a conflicting record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Backjump {
    /// Negation of all decision literals.
    pub clause: Clause,
    /// Entries kept before the flipped literal.
    pub prefix: usize,
    pub flipped: Lit,
}

/// The decision-negation clause, jumping back to the rightmost decision.
pub fn conflict_backjump_clause(record: &Record) -> Option<Backjump> {
    let prefix = record.last_decision()?;
    let mut clause: Clause = record.decisions().map(|d| d.complement()).collect();
    clause.sort_unstable();
    clause.dedup();
    Some(Backjump {
        clause,
        prefix,
        flipped: record.entries()[prefix].0.complement(),
    })
}

/// Learnt clauses with first-in first-out eviction past `cap`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ClauseStore {
    clauses: VecDeque<Clause>,
    cap: usize,
}

pub const DEFAULT_STORE_CAP: usize = 10_000;

impl ClauseStore {
    pub fn new(cap: usize) -> ClauseStore {
        ClauseStore {
            clauses: VecDeque::new(),
            cap,
        }
    }

    pub fn contains(&self, c: &[Lit]) -> bool {
        self.clauses.iter().any(|x| x.as_slice() == c)
    }

    /// Adds `c` unless present. Returns the evicted clause, if any.
    pub fn add(&mut self, c: Clause) -> Option<Clause> {
        if self.contains(&c) {
            return None;
        }
        self.clauses.push_back(c);
        if self.cap > 0 && self.clauses.len() > self.cap {
            self.clauses.pop_front()
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn clauses(&self) -> Vec<Clause> {
        self.clauses.iter().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter()
    }
}

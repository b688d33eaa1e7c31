//! Generating and witness program functions.
//!
//! Generators map a program to the program searched by the left layer.
//! Witness functions map a program and a candidate to a program that has a
//! model exactly when the candidate is not minimal.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::oracle::ModelType;
use crate::program::{Atom, AtomTable, Lit, Program, Rule};
use crate::record::Assign;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("the candidate is inconsistent")]
    Inconsistent,
    #[error("the candidate does not cover the program")]
    NotCovering,
    #[error("unknown transform `{0}`")]
    Unknown(String),
}

/// Generating functions.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum GenKind {
    Cnfcomp,
    CmodelsGen,
    GntGen,
    DlvGen,
}

/// Witness functions.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum TestKind {
    CmodelsTest,
    GntTest,
    DlvTest,
}

impl GenKind {
    pub const ALL: [GenKind; 4] = [
        GenKind::Cnfcomp,
        GenKind::CmodelsGen,
        GenKind::GntGen,
        GenKind::DlvGen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GenKind::Cnfcomp => "cnfcomp",
            GenKind::CmodelsGen => "cmodelsGen",
            GenKind::GntGen => "gntGen",
            GenKind::DlvGen => "dlvGen",
        }
    }

    pub fn parse(s: &str) -> Result<GenKind, TransformError> {
        GenKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| TransformError::Unknown(s.to_string()))
    }

    /// Type of the generated program's models the left layer must enforce.
    pub fn w1(self) -> ModelType {
        match self {
            GenKind::Cnfcomp | GenKind::CmodelsGen => ModelType::Cla,
            GenKind::GntGen => ModelType::Sta,
            GenKind::DlvGen => ModelType::Sup,
        }
    }

    /// Types `w` such that the function is approximating w.r.t. `w`.
    pub fn wrt(self) -> &'static [ModelType] {
        match self {
            GenKind::Cnfcomp | GenKind::CmodelsGen => &[ModelType::Sup, ModelType::Cla],
            GenKind::GntGen | GenKind::DlvGen => &[ModelType::Cla],
        }
    }

    pub fn apply(self, p: &Program) -> Program {
        match self {
            GenKind::Cnfcomp => cnfcomp(p),
            GenKind::CmodelsGen => gen_cmodels(p),
            GenKind::GntGen => gen_gnt(p),
            GenKind::DlvGen => gen_dlv(p),
        }
    }
}

impl TestKind {
    pub const ALL: [TestKind; 3] = [TestKind::CmodelsTest, TestKind::GntTest, TestKind::DlvTest];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::CmodelsTest => "cmodelsTest",
            TestKind::GntTest => "gntTest",
            TestKind::DlvTest => "dlvTest",
        }
    }

    pub fn parse(s: &str) -> Result<TestKind, TransformError> {
        TestKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| TransformError::Unknown(s.to_string()))
    }

    /// Type of witness models the right layer must enforce.
    pub fn w1(self) -> ModelType {
        match self {
            TestKind::CmodelsTest | TestKind::DlvTest => ModelType::Cla,
            TestKind::GntTest => ModelType::Sta,
        }
    }

    pub fn wrt(self) -> &'static [ModelType] {
        match self {
            TestKind::CmodelsTest => &[ModelType::Cla, ModelType::Sup, ModelType::Sta],
            TestKind::GntTest | TestKind::DlvTest => &[ModelType::Cla],
        }
    }

    /// Checked application: `m` must be consistent and cover `p`.
    pub fn apply(self, p: &Program, m: &Assign) -> Result<Program, TransformError> {
        if !m.is_consistent() {
            return Err(TransformError::Inconsistent);
        }
        if !m.covers(p.atoms()) {
            return Err(TransformError::NotCovering);
        }
        Ok(self.apply_unchecked(p, m))
    }

    pub fn apply_unchecked(self, p: &Program, m: &Assign) -> Program {
        match self {
            TestKind::CmodelsTest => test_cmodels(p, m),
            TestKind::GntTest => test_gnt(p, m),
            TestKind::DlvTest => test_dlv(p, m),
        }
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A program together with its per-atom support formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    /// The rules read as clauses, in program order.
    pub rule_clauses: Vec<Vec<Lit>>,
    /// For each atom `a`, the conjunctions `D` of `~a v D1 v ... v Dn`.
    pub support: Vec<(Atom, Vec<Vec<Lit>>)>,
}

/// Body literals followed by the complements of the other head atoms.
fn support_conjunction(r: &Rule, a: Atom) -> Vec<Lit> {
    let mut d = r.body();
    d.extend(r.head.iter().filter(|&&h| h != a).map(|&h| Lit::neg(h)));
    d
}

pub fn completion(p: &Program) -> Completion {
    let rule_clauses = p.clauses();
    let support = p
        .atoms()
        .iter()
        .map(|&a| {
            let ds = p
                .rules_with_head(a)
                .iter()
                .map(|&i| support_conjunction(&p.rules()[i as usize], a))
                .collect();
            (a, ds)
        })
        .collect();
    Completion {
        rule_clauses,
        support,
    }
}

/// CNF of `prefix v D1 v ... v Dn` by distribution, `D1` outermost.
///
/// An empty conjunction is verum and yields no clauses; no conjunctions at all
/// yields the single clause `prefix`. Repeated literals are kept.
pub fn distribute(prefix: &[Lit], dnf: &[Vec<Lit>]) -> Vec<Vec<Lit>> {
    if dnf.iter().any(|d| d.is_empty()) {
        return Vec::new();
    }
    let mut out = vec![prefix.to_vec()];
    for d in dnf {
        let mut next = Vec::with_capacity(out.len() * d.len());
        for c in &out {
            for &l in d {
                let mut c2 = c.clone();
                c2.push(l);
                next.push(c2);
            }
        }
        out = next;
    }
    out
}

/// Completion as a clause-mode CNF: rule clauses, then the distributed
/// support formulas per atom.
pub fn cnfcomp(p: &Program) -> Program {
    let comp = completion(p);
    let mut clauses = comp.rule_clauses;
    for (a, ds) in &comp.support {
        clauses.extend(distribute(&[Lit::neg(*a)], ds));
    }
    Program::from_clauses(p.shared_table(), &clauses)
}

fn body_name(table: &AtomTable, lits: &[Lit]) -> String {
    let mut v = lits.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.is_empty() {
        return "empty".to_string();
    }
    v.iter()
        .map(|&l| {
            let tag = if l.is_positive() { "p" } else { "n" };
            format!("{tag}__{}", table.name(l.atom()))
        })
        .collect::<Vec<_>>()
        .join("__")
}

/// Clausified completion with one auxiliary atom per distinct body and one
/// per head atom of each disjunctive rule.
pub fn gen_cmodels(p: &Program) -> Program {
    let mut table = p.table().clone();
    let mut body_aux: HashMap<Vec<Lit>, Atom> = HashMap::new();
    let mut bodies: Vec<(Vec<Lit>, Atom)> = Vec::new();
    let mut rule_aux: Vec<Atom> = Vec::with_capacity(p.rules().len());
    for r in p.rules() {
        let mut key = r.body();
        key.sort_unstable();
        key.dedup();
        let x = *body_aux.entry(key.clone()).or_insert_with(|| {
            let x = table.intern(&format!("b__{}", body_name(p.table(), &key)));
            bodies.push((key, x));
            x
        });
        rule_aux.push(x);
    }
    // aux(a,B) abbreviates B & ~(A \ {a}); named after that conjunction
    let mut head_aux: HashMap<(usize, Atom), Atom> = HashMap::new();
    for (i, r) in p.rules().iter().enumerate() {
        if r.is_disjunctive() {
            for &a in &r.head {
                let name = format!(
                    "h__{}__{}",
                    p.table().name(a),
                    body_name(p.table(), &support_conjunction(r, a))
                );
                head_aux.insert((i, a), table.intern(&name));
            }
        }
    }

    let mut cl: Vec<Vec<Lit>> = Vec::new();
    for (b, x) in &bodies {
        let mut c = vec![Lit::pos(*x)];
        c.extend(b.iter().map(|l| l.complement()));
        cl.push(c);
    }
    for (b, x) in &bodies {
        for &l in b {
            cl.push(vec![Lit::neg(*x), l]);
        }
    }
    for (i, r) in p.rules().iter().enumerate() {
        if !r.is_disjunctive() {
            continue;
        }
        let xb = rule_aux[i];
        for &a in &r.head {
            let y = head_aux[&(i, a)];
            let mut c = vec![Lit::pos(y), Lit::neg(xb)];
            c.extend(r.head.iter().filter(|&&h| h != a).map(|&h| Lit::pos(h)));
            cl.push(c);
        }
    }
    for (i, r) in p.rules().iter().enumerate() {
        if !r.is_disjunctive() {
            continue;
        }
        let xb = rule_aux[i];
        for &a in &r.head {
            let y = head_aux[&(i, a)];
            for &h in r.head.iter().filter(|&&h| h != a) {
                cl.push(vec![Lit::neg(y), Lit::neg(h)]);
            }
            cl.push(vec![Lit::neg(y), Lit::pos(xb)]);
        }
    }
    for (i, r) in p.rules().iter().enumerate() {
        let mut c = vec![Lit::neg(rule_aux[i])];
        c.extend(r.head.iter().map(|&h| Lit::pos(h)));
        cl.push(c);
    }
    for &a in p.atoms() {
        let mut c = vec![Lit::neg(a)];
        for &i in p.rules_with_head(a) {
            let r = &p.rules()[i as usize];
            let x = if r.is_disjunctive() {
                head_aux[&(i as usize, a)]
            } else {
                rule_aux[i as usize]
            };
            if !c.contains(&Lit::pos(x)) {
                c.push(Lit::pos(x));
            }
        }
        cl.push(c);
    }
    Program::from_clauses(Arc::new(table), &cl)
}

/// Witness CNF of the cmodels solver.
pub fn test_cmodels(p: &Program, m: &Assign) -> Program {
    let t: Vec<Atom> = p.atoms().iter().copied().filter(|&a| m.is_true(a)).collect();
    let mut cl = vec![t.iter().map(|&a| Lit::neg(a)).collect::<Vec<_>>()];
    for &a in p.atoms() {
        if m.is_false(a) {
            cl.push(vec![Lit::neg(a)]);
        }
    }
    for r in p.rules() {
        if r.neg.iter().any(|&a| m.is_true(a)) || !r.pos.iter().all(|&a| m.is_true(a)) {
            continue;
        }
        let mut c: Vec<Lit> = r.pos.iter().map(|&a| Lit::neg(a)).collect();
        c.extend(r.head.iter().map(|&a| Lit::pos(a)));
        cl.push(c);
    }
    Program::from_clauses(p.shared_table(), &cl)
}

pub fn aux_r_name(table: &AtomTable, a: Atom) -> String {
    format!("{}__r", table.name(a))
}

pub fn aux_s_name(table: &AtomTable, a: Atom) -> String {
    format!("{}__s", table.name(a))
}

/// Non-disjunctive generator of the gnt solver. Every disjunctive head atom
/// `a` gets a guess atom `a__r` and a support atom `a__s`.
pub fn gen_gnt(p: &Program) -> Program {
    let mut table = p.table().clone();
    let mut out: Vec<Rule> = p
        .rules()
        .iter()
        .filter(|r| !r.is_disjunctive())
        .cloned()
        .collect();
    let mut disj_atoms: Vec<Atom> = Vec::new();
    let mut ar: HashMap<Atom, Atom> = HashMap::new();
    for r in p.rules().iter().filter(|r| r.is_disjunctive()) {
        for &a in &r.head {
            if !disj_atoms.contains(&a) {
                disj_atoms.push(a);
                ar.insert(a, table.intern(&aux_r_name(p.table(), a)));
            }
        }
    }
    disj_atoms.sort_unstable();
    let aspos: HashMap<Atom, Atom> = disj_atoms
        .iter()
        .map(|&a| (a, table.intern(&aux_s_name(p.table(), a))))
        .collect();
    let mut guess_rules = Vec::new();
    for r in p.rules().iter().filter(|r| r.is_disjunctive()) {
        for &a in &r.head {
            let mut neg = r.neg.clone();
            neg.push(ar[&a]);
            out.push(Rule::new(vec![a], r.pos.clone(), neg));
            let g = Rule::new(vec![ar[&a]], vec![], vec![a]);
            if !guess_rules.contains(&g) {
                guess_rules.push(g);
            }
        }
    }
    out.extend(guess_rules);
    for r in p.rules().iter().filter(|r| r.is_disjunctive()) {
        let mut neg = r.head.clone();
        neg.extend(r.neg.iter().copied());
        out.push(Rule::new(vec![], r.pos.clone(), dedup(neg)));
    }
    for &a in &disj_atoms {
        for &i in p.rules_with_head(a) {
            let r = &p.rules()[i as usize];
            let mut neg: Vec<Atom> = r.head.iter().copied().filter(|&h| h != a).collect();
            neg.extend(r.neg.iter().copied());
            out.push(Rule::new(vec![aspos[&a]], r.pos.clone(), dedup(neg)));
        }
    }
    for &a in &disj_atoms {
        out.push(Rule::new(vec![], vec![a], vec![aspos[&a]]));
    }
    Program::new(Arc::new(table), out)
}

fn dedup(v: Vec<Atom>) -> Vec<Atom> {
    let mut out = Vec::with_capacity(v.len());
    for a in v {
        if !out.contains(&a) {
            out.push(a);
        }
    }
    out
}

/// Witness program of the gnt solver.
///
/// For a complete candidate this is the usual construction. For a partial
/// one, rules whose body the candidate falsifies are skipped and unassigned
/// positive body atoms are dropped, so a witness model still picks out a
/// non-empty unfounded set inside the true atoms.
pub fn test_gnt(p: &Program, m: &Assign) -> Program {
    let mut table = p.table().clone();
    let alive = |r: &Rule| !r.pos.iter().any(|&a| m.is_false(a)) && !r.neg.iter().any(|&a| m.is_true(a));
    let bpos = |r: &Rule| -> Vec<Atom> { r.pos.iter().copied().filter(|&a| m.is_true(a)).collect() };
    let mut out = Vec::new();
    let mut guessed: Vec<(Atom, Atom)> = Vec::new();
    for r in p.rules().iter().filter(|r| r.is_disjunctive() && alive(r)) {
        for &a in r.head.iter().filter(|&&a| m.is_true(a)) {
            let ar = table.intern(&aux_r_name(p.table(), a));
            out.push(Rule::new(vec![a], bpos(r), vec![ar]));
            if !guessed.iter().any(|g| g.0 == a) {
                guessed.push((a, ar));
            }
        }
    }
    for &(a, ar) in &guessed {
        out.push(Rule::new(vec![ar], vec![], vec![a]));
    }
    for r in p.rules().iter().filter(|r| r.is_disjunctive() && alive(r)) {
        out.push(Rule::new(vec![], bpos(r), r.head.clone()));
    }
    for r in p.rules().iter().filter(|r| !r.is_disjunctive() && alive(r)) {
        if let Some(&a) = r.head.first() {
            if m.is_true(a) {
                out.push(Rule::new(vec![a], bpos(r), vec![]));
            }
        }
    }
    let t: Vec<Atom> = p.atoms().iter().copied().filter(|&a| m.is_true(a)).collect();
    let f: Vec<Atom> = p.atoms().iter().copied().filter(|&a| m.is_false(a)).collect();
    out.push(Rule::new(vec![], t, f));
    Program::new(Arc::new(table), out)
}

pub fn gen_dlv(p: &Program) -> Program {
    p.clone()
}

/// Witness CNF of the dlv solver: a model picks a proper subset of the true
/// atoms that still satisfies the reduct.
pub fn test_dlv(p: &Program, m: &Assign) -> Program {
    let mut cl = Vec::new();
    for r in p.rules() {
        if r.neg.iter().any(|&a| m.is_true(a)) || !r.pos.iter().all(|&a| m.is_true(a)) {
            continue;
        }
        let mut c: Vec<Lit> = r
            .head
            .iter()
            .filter(|&&a| m.is_true(a))
            .map(|&a| Lit::neg(a))
            .collect();
        c.extend(r.pos.iter().map(|&a| Lit::pos(a)));
        cl.push(c);
    }
    cl.push(
        p.atoms()
            .iter()
            .filter(|&&a| m.is_true(a))
            .map(|&a| Lit::pos(a))
            .collect(),
    );
    Program::from_clauses(p.shared_table(), &cl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::parse_program;

    #[test]
    fn distribute_orders_first_conjunction_outermost() {
        let (a, b, c, d) = (Lit::pos(0), Lit::pos(1), Lit::pos(2), Lit::pos(3));
        let out = distribute(&[], &[vec![a, b], vec![c, d]]);
        assert_eq!(out, vec![vec![a, c], vec![a, d], vec![b, c], vec![b, d]]);
        assert!(distribute(&[a], &[vec![b], vec![]]).is_empty());
        assert_eq!(distribute(&[a], &[]), vec![vec![a]]);
    }

    #[test]
    fn gen_dlv_is_identity() {
        let p = parse_program("a | b :- c. c :- not d.").unwrap();
        assert_eq!(gen_dlv(&p), p);
    }
}

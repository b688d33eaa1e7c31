//! Propagator conditions and their sets.
//!
//! Each condition maps a program and a literal set to literals that may be
//! added to the record. The engine adds one literal per transition.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::oracle::{self, supports, ModelType};
use crate::program::{Atom, Lit, Program, Rule};
use crate::random::{random_program, GenParams};
use crate::record::Assign;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PCondition {
    UnitPropagate,
    AllRulesCancelled,
    BackchainTrue,
    Unfounded,
}

impl PCondition {
    pub const ALL: [PCondition; 4] = [
        PCondition::UnitPropagate,
        PCondition::AllRulesCancelled,
        PCondition::BackchainTrue,
        PCondition::Unfounded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PCondition::UnitPropagate => "UnitPropagate",
            PCondition::AllRulesCancelled => "AllRulesCancelled",
            PCondition::BackchainTrue => "BackchainTrue",
            PCondition::Unfounded => "Unfounded",
        }
    }

    fn bit(self) -> u8 {
        1 << self as u8
    }

    pub fn parse(s: &str) -> Option<PCondition> {
        let s = s.trim();
        PCondition::ALL.into_iter().find(|p| {
            p.name().eq_ignore_ascii_case(s)
                || matches!(
                    (p, s.to_ascii_lowercase().as_str()),
                    (PCondition::UnitPropagate, "up" | "unit")
                        | (PCondition::AllRulesCancelled, "arc")
                        | (PCondition::BackchainTrue, "bt")
                        | (PCondition::Unfounded, "unf")
                )
        })
    }
}

impl fmt::Display for PCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A set of p-conditions.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Default)]
pub struct PSet(u8);

impl PSet {
    pub const UP: PSet = PSet(1);
    pub const SD: PSet = PSet(0b0111);
    pub const SM: PSet = PSet(0b1111);

    pub fn of(conds: &[PCondition]) -> PSet {
        PSet(conds.iter().fold(0, |m, c| m | c.bit()))
    }

    pub fn contains(self, c: PCondition) -> bool {
        self.0 & c.bit() != 0
    }

    pub fn members(self) -> Vec<PCondition> {
        PCondition::ALL.into_iter().filter(|&c| self.contains(c)).collect()
    }

    pub fn is_subset(self, other: PSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// The strongest model type this set enforces, if any.
    pub fn enforcing(self) -> Option<ModelType> {
        let up = self.contains(PCondition::UnitPropagate);
        if up && self.contains(PCondition::Unfounded) {
            Some(ModelType::Sta)
        } else if up && self.contains(PCondition::AllRulesCancelled) && self.is_subset(PSet::SD) {
            Some(ModelType::Sup)
        } else if self == PSet::UP {
            Some(ModelType::Cla)
        } else {
            None
        }
    }

    /// `up`, `sd`, `sm`, or a comma list of condition names.
    pub fn parse(s: &str) -> Option<PSet> {
        match s.trim().to_ascii_lowercase().as_str() {
            "up" => return Some(PSet::UP),
            "sd" => return Some(PSet::SD),
            "sm" => return Some(PSet::SM),
            _ => {}
        }
        let mut conds = Vec::new();
        for part in s.split(',') {
            conds.push(PCondition::parse(part)?);
        }
        Some(PSet::of(&conds))
    }

    pub fn name(self) -> String {
        match self {
            PSet::UP => "up".into(),
            PSet::SD => "sd".into(),
            PSet::SM => "sm".into(),
            _ => self
                .members()
                .iter()
                .map(|c| c.name())
                .collect::<Vec<_>>()
                .join(","),
        }
    }
}

impl fmt::Debug for PSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PSet({})", self.name())
    }
}

impl fmt::Display for PSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Literals derivable under a p-condition set, each with every condition
/// that derives it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Derived {
    pub falsum: bool,
    /// Canonical literal order; the mask lists the deriving conditions.
    pub lits: Vec<(Lit, u8)>,
}

impl Derived {
    pub fn is_empty(&self) -> bool {
        !self.falsum && self.lits.is_empty()
    }

    pub fn contains(&self, l: Lit) -> bool {
        self.lits.iter().any(|e| e.0 == l)
    }

    /// First condition in the fixed order that derives `l`.
    pub fn first_condition(mask: u8) -> Option<PCondition> {
        PCondition::ALL.into_iter().find(|c| mask & c.bit() != 0)
    }

    pub fn derived_by(mask: u8, c: PCondition) -> bool {
        mask & c.bit() != 0
    }
}

fn clause_lits<'a>(r: &'a Rule) -> impl Iterator<Item = Lit> + Clone + 'a {
    r.head
        .iter()
        .map(|&a| Lit::pos(a))
        .chain(r.pos.iter().map(|&a| Lit::neg(a)))
        .chain(r.neg.iter().map(|&a| Lit::pos(a)))
}

fn unit_clause(c: impl Iterator<Item = Lit> + Clone, m: &Assign, out: &mut Vec<Lit>, falsum: &mut bool) {
    let mut open = 0;
    let mut last = None;
    for l in c.clone() {
        if !m.has(l.complement()) {
            open += 1;
            last = Some(l);
            if open > 1 {
                return;
            }
        }
    }
    match last {
        None if c.clone().next().is_none() => *falsum = true,
        None => out.extend(c.filter(|&l| !m.has(l))),
        Some(l) if !m.has(l) => out.push(l),
        Some(_) => {}
    }
}

fn sorted_unique(mut v: Vec<Lit>) -> Vec<Lit> {
    v.sort_unstable();
    v.dedup();
    v
}

/// Literals `l` not in `m` such that some clause is `C v l` with `~C` in `m`.
pub fn pc_unit_propagate(p: &Program, m: &Assign) -> Vec<Lit> {
    let mut out = Vec::new();
    let mut f = false;
    for r in p.rules() {
        unit_clause(clause_lits(r), m, &mut out, &mut f);
    }
    sorted_unique(out)
}

/// `~a` for atoms with no supporting rule.
pub fn pc_all_rules_cancelled(p: &Program, m: &Assign) -> Vec<Lit> {
    p.atoms()
        .iter()
        .copied()
        .filter(|&a| !m.is_false(a))
        .filter(|&a| {
            !p.rules_with_head(a)
                .iter()
                .any(|&i| supports(&p.rules()[i as usize], a, m))
        })
        .map(Lit::neg)
        .collect()
}

/// For a true atom with a single possibly supporting rule, the literals that
/// make that rule supporting.
pub fn pc_backchain_true(p: &Program, m: &Assign) -> Vec<Lit> {
    let mut out = Vec::new();
    for &a in p.atoms() {
        if !m.is_true(a) {
            continue;
        }
        let rs = p.rules_with_head(a);
        let supporting: Vec<bool> = rs
            .iter()
            .map(|&i| supports(&p.rules()[i as usize], a, m))
            .collect();
        let count = supporting.iter().filter(|&&s| s).count();
        for (k, &i) in rs.iter().enumerate() {
            if count - supporting[k] as usize > 0 {
                continue;
            }
            let r = &p.rules()[i as usize];
            let cand = r
                .head
                .iter()
                .filter(|&&h| h != a)
                .map(|&h| Lit::neg(h))
                .chain(r.pos.iter().map(|&b| Lit::pos(b)))
                .chain(r.neg.iter().map(|&b| Lit::neg(b)));
            out.extend(cand.filter(|&l| !m.has(l)));
        }
    }
    sorted_unique(out)
}

/// Atoms belonging to some unfounded set on `m`, each with a witness set.
///
/// Search is exact. Atoms true in `m` that share a head with another atom are
/// the only ones whose membership is not monotone, so every subset of them is
/// tried, and the greatest unfounded set containing the chosen subset is
/// computed by elimination. For programs without such atoms this is a single
/// polynomial fixpoint.
pub fn unfounded_atoms(p: &Program, m: &Assign) -> Vec<(Atom, Vec<Atom>)> {
    if !m.is_consistent() {
        return Vec::new();
    }
    let n = p.table().len().max(m.size());
    let mut shared = vec![false; n];
    for r in p.rules() {
        if r.is_disjunctive() {
            for &h in &r.head {
                shared[h as usize] = true;
            }
        }
    }
    let d: Vec<Atom> = p
        .atoms()
        .iter()
        .copied()
        .filter(|&a| shared[a as usize] && m.is_true(a))
        .collect();
    let mut found: Vec<Option<Vec<Atom>>> = vec![None; n];
    let mut remaining = p.atoms().len();
    let limit: u64 = 1 << d.len().min(30);
    for t in 0..limit {
        let mut in_s = vec![false; n];
        for &a in p.atoms() {
            in_s[a as usize] = !shared[a as usize] || !m.is_true(a);
        }
        for (k, &a) in d.iter().enumerate() {
            in_s[a as usize] = t >> k & 1 == 1;
        }
        if !eliminate(p, m, &mut in_s, &d, t) {
            continue;
        }
        let s: Vec<Atom> = p.atoms().iter().copied().filter(|&a| in_s[a as usize]).collect();
        for &a in &s {
            if found[a as usize].is_none() {
                found[a as usize] = Some(s.clone());
                remaining -= 1;
            }
        }
        if remaining == 0 {
            break;
        }
    }
    p.atoms()
        .iter()
        .filter_map(|&a| found[a as usize].take().map(|x| (a, x)))
        .collect()
}

/// Removes atoms of `s` that have a rule violating all three conditions.
/// Returns false if a forced member (chosen from `d` by `t`) must go.
fn eliminate(p: &Program, m: &Assign, s: &mut [bool], d: &[Atom], t: u64) -> bool {
    let forced = |a: Atom| d.iter().position(|&x| x == a).is_some_and(|k| t >> k & 1 == 1);
    loop {
        let mut changed = false;
        for &a in p.atoms() {
            if !s[a as usize] {
                continue;
            }
            let escapes = p.rules_with_head(a).iter().any(|&i| {
                let r = &p.rules()[i as usize];
                let c1 = r.pos.iter().any(|&b| m.is_false(b)) || r.neg.iter().any(|&b| m.is_true(b));
                let c2 = r.pos.iter().any(|&b| s[b as usize]);
                let c3 = r.head.iter().any(|&h| !s[h as usize] && m.is_true(h));
                !(c1 || c2 || c3)
            });
            if escapes {
                if forced(a) {
                    return false;
                }
                s[a as usize] = false;
                changed = true;
            }
        }
        if !changed {
            return true;
        }
    }
}

/// `~a` for atoms in some unfounded set, if `m` is consistent.
pub fn pc_unfounded(p: &Program, m: &Assign) -> Vec<Lit> {
    unfounded_atoms(p, m)
        .into_iter()
        .map(|(a, _)| Lit::neg(a))
        .filter(|&l| !m.has(l))
        .collect()
}

pub fn evaluate(c: PCondition, p: &Program, m: &Assign) -> Vec<Lit> {
    match c {
        PCondition::UnitPropagate => pc_unit_propagate(p, m),
        PCondition::AllRulesCancelled => pc_all_rules_cancelled(p, m),
        PCondition::BackchainTrue => pc_backchain_true(p, m),
        PCondition::Unfounded => pc_unfounded(p, m),
    }
}

/// Union of the members' outputs. `extra` clauses (learnt clauses) take part
/// in unit propagation. An empty clause whose body is satisfied yields falsum.
pub fn out_prop(s: PSet, p: &Program, extra: &[Vec<Lit>], m: &Assign) -> Derived {
    let mut d = Derived::default();
    let add = |lits: Vec<Lit>, c: PCondition, d: &mut Derived| {
        for l in lits {
            match d.lits.iter_mut().find(|e| e.0 == l) {
                Some(e) => e.1 |= c.bit(),
                None => d.lits.push((l, c.bit())),
            }
        }
    };
    if s.contains(PCondition::UnitPropagate) {
        let mut out = Vec::new();
        let mut falsum = false;
        for r in p.rules() {
            unit_clause(clause_lits(r), m, &mut out, &mut falsum);
        }
        for c in extra {
            unit_clause(c.iter().copied(), m, &mut out, &mut falsum);
        }
        d.falsum = falsum && !m.has_falsum();
        add(sorted_unique(out), PCondition::UnitPropagate, &mut d);
    }
    for c in [
        PCondition::AllRulesCancelled,
        PCondition::BackchainTrue,
        PCondition::Unfounded,
    ] {
        if s.contains(c) {
            add(evaluate(c, p, m), c, &mut d);
        }
    }
    d.lits.sort_unstable_by_key(|e| e.0);
    d
}

/// Model check of a complete assignment over `atoms(p)`.
pub fn is_w_model(p: &Program, m: &Assign, w: ModelType) -> bool {
    if !m.is_consistent() || !m.covers(p.atoms()) {
        return false;
    }
    let classical = p
        .rules()
        .iter()
        .all(|r| clause_lits(r).any(|l| m.has(l)));
    if !classical {
        return false;
    }
    match w {
        ModelType::Cla => true,
        ModelType::Sup => p.atoms().iter().filter(|&&a| m.is_true(a)).all(|&a| {
            p.rules_with_head(a)
                .iter()
                .any(|&i| supports(&p.rules()[i as usize], a, m))
        }),
        ModelType::Sta => unfounded_atoms(p, m).iter().all(|(a, _)| !m.is_true(*a)),
    }
}

/// Outcome of [`check_enforcing`].
#[derive(Clone, Debug, Default)]
pub struct EnforcingReport {
    pub programs: usize,
    pub soundness_checks: usize,
    pub completeness_checks: usize,
    pub counterexamples: Vec<String>,
}

impl EnforcingReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Samples programs and assignments and checks that `s` is `w`-sound and
/// `w`-complete against the brute-force oracle.
pub fn check_enforcing(
    s: PSet,
    w: ModelType,
    samples: usize,
    seed: u64,
    params: &GenParams,
) -> EnforcingReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = EnforcingReport::default();
    while rep.soundness_checks < samples || rep.completeness_checks < samples {
        let p = random_program(&mut rng, params);
        rep.programs += 1;
        let n = p.table().len();
        let atoms = p.atoms().to_vec();
        let models = match oracle::models(&p, w, oracle::DEFAULT_CAP) {
            Ok(ms) => ms,
            Err(e) => {
                rep.counterexamples.push(e.to_string());
                return rep;
            }
        };
        let full: Vec<Assign> = models.iter().map(|x| Assign::from_model(n, &atoms, x)).collect();

        // soundness: a random partial assignment, usually inside some model
        for _ in 0..2 {
            let base: Vec<Lit> = if !full.is_empty() && rng.gen_bool(0.8) {
                full.choose(&mut rng).unwrap().lits()
            } else {
                atoms.iter().map(|&a| Lit::new(a, rng.gen())).collect()
            };
            let part: Vec<Lit> = base.into_iter().filter(|_| rng.gen_bool(0.5)).collect();
            let m = Assign::from_lits(n, &part);
            let d = out_prop(s, &p, &[], &m);
            rep.soundness_checks += 1;
            for m1 in full.iter().filter(|m1| part.iter().all(|&l| m1.has(l))) {
                if d.falsum {
                    rep.counterexamples.push(format!(
                        "unsound: falsum derived on {{{}}} but {} extends it\n{}",
                        render_lits(&p, &part),
                        render_lits(&p, &m1.lits()),
                        p.render()
                    ));
                }
                if let Some(&(l, _)) = d.lits.iter().find(|e| !m1.has(e.0)) {
                    rep.counterexamples.push(format!(
                        "unsound: {} derived on {{{}}} but {} extends it\n{}",
                        p.table().lit_name(l),
                        render_lits(&p, &part),
                        render_lits(&p, &m1.lits()),
                        p.render()
                    ));
                }
            }
        }

        // completeness: a random complete assignment and a random model
        let mut tries: Vec<Assign> = vec![Assign::from_model(
            n,
            &atoms,
            &atoms.iter().copied().filter(|_| rng.gen()).collect::<Vec<_>>(),
        )];
        if let Some(m1) = full.choose(&mut rng) {
            tries.push(m1.clone());
        }
        for m in tries {
            let is_model = models.iter().any(|x| Assign::from_model(n, &atoms, x) == m);
            let quiet = out_prop(s, &p, &[], &m).is_empty();
            rep.completeness_checks += 1;
            if is_model != quiet {
                rep.counterexamples.push(format!(
                    "incomplete: {} is {}a {}-model but propagation is {}\n{}",
                    render_lits(&p, &m.lits()),
                    if is_model { "" } else { "not " },
                    w.name(),
                    if quiet { "empty" } else { "non-empty" },
                    p.render()
                ));
            }
        }
        if rep.counterexamples.len() > 20 {
            break;
        }
    }
    rep
}

fn render_lits(p: &Program, lits: &[Lit]) -> String {
    lits.iter()
        .map(|&l| p.table().lit_name(l))
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::parse_program;

    #[test]
    fn enforcing_types() {
        use PCondition::*;
        assert_eq!(PSet::UP.enforcing(), Some(ModelType::Cla));
        assert_eq!(PSet::of(&[UnitPropagate, AllRulesCancelled]).enforcing(), Some(ModelType::Sup));
        assert_eq!(PSet::SD.enforcing(), Some(ModelType::Sup));
        assert_eq!(PSet::of(&[UnitPropagate, Unfounded]).enforcing(), Some(ModelType::Sta));
        assert_eq!(PSet::SM.enforcing(), Some(ModelType::Sta));
        assert_eq!(PSet::of(&[UnitPropagate, BackchainTrue]).enforcing(), None);
    }

    #[test]
    fn unfounded_needs_whole_loop() {
        let p = parse_program("a :- b. b :- b.").unwrap();
        let m = Assign::new(p.table().len());
        let u = unfounded_atoms(&p, &m);
        assert_eq!(u.len(), 2);
        assert_eq!(u[0].1, vec![0, 1]);
    }
}

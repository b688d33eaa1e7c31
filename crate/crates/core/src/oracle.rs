//! Brute-force reference semantics: classical, supported and stable models,
//! reducts and unfounded sets.
//!
//! Everything here enumerates assignments, so it is exponential and bounded
//! by a configurable atom cap.

use thiserror::Error;

use crate::program::{Atom, Program, Rule};
use crate::record::Assign;

/// Default number of atoms the enumerators accept.
pub const DEFAULT_CAP: usize = 20;

/// True atoms of an interpretation, ascending.
pub type Model = Vec<Atom>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{atoms} atoms exceed the brute-force cap of {cap}")]
    CapExceeded { atoms: usize, cap: usize },
    #[error("the assignment is inconsistent")]
    Inconsistent,
    #[error("atom is not in the head of the rule")]
    NotInHead,
}

/// Kinds of models a program may be asked for.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelType {
    Cla,
    Sup,
    Sta,
}

impl ModelType {
    pub fn name(self) -> &'static str {
        match self {
            ModelType::Cla => "cla",
            ModelType::Sup => "sup",
            ModelType::Sta => "sta",
        }
    }

    /// `cla < sup < sta`; stronger types have fewer models.
    pub fn strength(self) -> u8 {
        self as u8
    }
}

/// Program compiled to bitmasks over positions in `atoms`.
struct Masks {
    atoms: Vec<Atom>,
    rules: Vec<(u64, u64, u64)>,
}

impl Masks {
    fn new(p: &Program, cap: usize) -> Result<Masks, OracleError> {
        let atoms = p.atoms().to_vec();
        if atoms.len() > cap.min(63) {
            return Err(OracleError::CapExceeded {
                atoms: atoms.len(),
                cap,
            });
        }
        let pos_of = |a: Atom| atoms.binary_search(&a).unwrap();
        let mask = |v: &[Atom]| v.iter().fold(0u64, |m, &a| m | 1 << pos_of(a));
        let rules = p
            .rules()
            .iter()
            .map(|r| (mask(&r.head), mask(&r.pos), mask(&r.neg)))
            .collect();
        Ok(Masks { atoms, rules })
    }

    fn full(&self) -> u64 {
        (1u64 << self.atoms.len()) - 1
    }

    fn to_model(&self, x: u64) -> Model {
        (0..self.atoms.len())
            .filter(|i| x >> i & 1 == 1)
            .map(|i| self.atoms[i])
            .collect()
    }

    fn to_mask(&self, m: &[Atom]) -> u64 {
        m.iter()
            .filter_map(|a| self.atoms.binary_search(a).ok())
            .fold(0, |acc, i| acc | 1 << i)
    }

    fn satisfies(&self, x: u64) -> bool {
        self.rules
            .iter()
            .all(|&(h, p, n)| p & !x != 0 || n & x != 0 || h & x != 0)
    }

    /// `y` satisfies the reduct of the program w.r.t. `x`.
    fn satisfies_reduct(&self, x: u64, y: u64) -> bool {
        self.rules
            .iter()
            .all(|&(h, p, n)| n & x != 0 || p & !y != 0 || h & y != 0)
    }

    fn supported(&self, x: u64) -> bool {
        let mut need = x;
        for &(h, p, n) in &self.rules {
            if p & !x == 0 && n & x == 0 {
                let hx = h & x;
                if hx.count_ones() == 1 {
                    need &= !hx;
                }
            }
        }
        need == 0
    }

    fn answer_set(&self, x: u64) -> bool {
        if !self.satisfies_reduct(x, x) {
            return false;
        }
        // proper subsets of x
        let mut y = x;
        while y != 0 {
            y = (y - 1) & x;
            if self.satisfies_reduct(x, y) {
                return false;
            }
        }
        true
    }

    /// `u` is unfounded on the complete assignment `x`.
    fn unfounded(&self, u: u64, x: u64) -> bool {
        self.rules.iter().all(|&(h, p, n)| {
            h & u == 0 || p & !x != 0 || n & x != 0 || u & p != 0 || h & !u & x != 0
        })
    }

    fn stable_by_unfounded(&self, x: u64) -> bool {
        if !self.satisfies(x) {
            return false;
        }
        let mut u = x;
        while u != 0 {
            if self.unfounded(u, x) {
                return false;
            }
            u = (u - 1) & x;
        }
        true
    }

    fn enumerate(&self, f: impl Fn(&Masks, u64) -> bool) -> Vec<Model> {
        (0..=self.full())
            .filter(|&x| f(self, x))
            .map(|x| self.to_model(x))
            .collect()
    }
}

/// Drops rules whose negative body meets `x` and clears the remaining
/// negative bodies.
pub fn reduct(p: &Program, x: &[Atom]) -> Program {
    let rules = p
        .rules()
        .iter()
        .filter(|r| !r.neg.iter().any(|a| x.contains(a)))
        .map(|r| Rule::new(r.head.clone(), r.pos.clone(), Vec::new()))
        .collect();
    p.with_rules(rules)
}

/// `x` (true atoms, others false) satisfies every rule read as a clause.
pub fn satisfies(p: &Program, x: &[Atom]) -> bool {
    p.rules().iter().all(|r| {
        !r.pos.iter().all(|a| x.contains(a))
            || r.neg.iter().any(|a| x.contains(a))
            || r.head.iter().any(|a| x.contains(a))
    })
}

pub fn classical_models(p: &Program, cap: usize) -> Result<Vec<Model>, OracleError> {
    let m = Masks::new(p, cap)?;
    Ok(m.enumerate(|m, x| m.satisfies(x)))
}

pub fn supported_models(p: &Program, cap: usize) -> Result<Vec<Model>, OracleError> {
    let m = Masks::new(p, cap)?;
    Ok(m.enumerate(|m, x| m.satisfies(x) && m.supported(x)))
}

/// Stable models by reduct minimality.
pub fn stable_models(p: &Program, cap: usize) -> Result<Vec<Model>, OracleError> {
    let m = Masks::new(p, cap)?;
    Ok(m.enumerate(|m, x| m.answer_set(x)))
}

/// Stable models as classical models without a non-empty unfounded subset
/// of their true atoms.
pub fn stable_models_unfounded(p: &Program, cap: usize) -> Result<Vec<Model>, OracleError> {
    let m = Masks::new(p, cap)?;
    Ok(m.enumerate(|m, x| m.stable_by_unfounded(x)))
}

pub fn models(p: &Program, w: ModelType, cap: usize) -> Result<Vec<Model>, OracleError> {
    match w {
        ModelType::Cla => classical_models(p, cap),
        ModelType::Sup => supported_models(p, cap),
        ModelType::Sta => stable_models(p, cap),
    }
}

pub fn is_answer_set(p: &Program, x: &[Atom], cap: usize) -> Result<bool, OracleError> {
    let m = Masks::new(p, cap)?;
    if x.iter().any(|a| !p.has_atom(*a)) {
        return Ok(false);
    }
    Ok(m.answer_set(m.to_mask(x)))
}

/// `true_atoms` (over `atoms(p)`) is a model of type `w`.
pub fn is_model(p: &Program, true_atoms: &[Atom], w: ModelType, cap: usize) -> Result<bool, OracleError> {
    let m = Masks::new(p, cap)?;
    let x = m.to_mask(true_atoms);
    Ok(match w {
        ModelType::Cla => m.satisfies(x),
        ModelType::Sup => m.satisfies(x) && m.supported(x),
        ModelType::Sta => m.answer_set(x),
    })
}

/// `l` avoids the complemented body and the rest of the head.
pub fn is_supporting_rule(r: &Rule, a: Atom, l: &Assign) -> Result<bool, OracleError> {
    if !r.head.contains(&a) {
        return Err(OracleError::NotInHead);
    }
    Ok(supports(r, a, l))
}

pub(crate) fn supports(r: &Rule, a: Atom, l: &Assign) -> bool {
    !r.pos.iter().any(|&b| l.is_false(b))
        && !r.neg.iter().any(|&b| l.is_true(b))
        && !r.head.iter().any(|&h| h != a && l.is_true(h))
}

/// The three-condition definition, checked literally.
pub fn is_unfounded(x: &[Atom], l: &Assign, p: &Program) -> Result<bool, OracleError> {
    if !l.is_consistent() {
        return Err(OracleError::Inconsistent);
    }
    Ok(x.iter().all(|&a| {
        p.rules_with_head(a).iter().all(|&i| {
            let r = &p.rules()[i as usize];
            let c1 = r.pos.iter().any(|&b| l.is_false(b)) || r.neg.iter().any(|&b| l.is_true(b));
            let c2 = r.pos.iter().any(|b| x.contains(b));
            let c3 = r.head.iter().any(|h| !x.contains(h) && l.is_true(*h));
            c1 || c2 || c3
        })
    }))
}

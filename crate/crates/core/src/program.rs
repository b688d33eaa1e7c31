//! Ground disjunctive programs: atoms, literals, rules, parsing and printing.
//!
//! A rule `A <- B` doubles as the clause `A v ~B`. Programs built from clauses
//! (CNF formulas) store each clause `C` as the constraint `<- ~C`, so a single
//! representation serves both readings.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Dense atom identifier, valid within one [`AtomTable`].
pub type Atom = u32;

/// A literal packed as `atom << 1 | positive`.
///
/// The derived order is the canonical one: by atom id, negative before positive.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Lit(u32);

impl Lit {
    pub fn new(atom: Atom, positive: bool) -> Lit {
        Lit(atom << 1 | positive as u32)
    }

    pub fn pos(atom: Atom) -> Lit {
        Lit::new(atom, true)
    }

    pub fn neg(atom: Atom) -> Lit {
        Lit::new(atom, false)
    }

    pub fn atom(self) -> Atom {
        self.0 >> 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn complement(self) -> Lit {
        Lit(self.0 ^ 1)
    }

    /// Index usable for per-literal tables of size `2 * atoms`.
    pub fn code(self) -> usize {
        self.0 as usize
    }
}

/// Bijection between atom names and dense ids.
#[derive(Clone, Default, Debug, PartialEq, Eq)]
pub struct AtomTable {
    names: Vec<String>,
    index: HashMap<String, Atom>,
}

impl AtomTable {
    pub fn new() -> AtomTable {
        AtomTable::default()
    }

    /// Returns the id of `name`, allocating the next id on first sight.
    pub fn intern(&mut self, name: &str) -> Atom {
        if let Some(&a) = self.index.get(name) {
            return a;
        }
        let a = self.names.len() as Atom;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), a);
        a
    }

    pub fn lookup(&self, name: &str) -> Option<Atom> {
        self.index.get(name).copied()
    }

    pub fn name(&self, a: Atom) -> &str {
        &self.names[a as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// `a` or `-a`.
    pub fn lit_name(&self, l: Lit) -> String {
        if l.is_positive() {
            self.name(l.atom()).to_string()
        } else {
            format!("-{}", self.name(l.atom()))
        }
    }

    /// Inverse of [`AtomTable::lit_name`]; also accepts `~a` and `not a`.
    pub fn parse_lit(&self, text: &str) -> Option<Lit> {
        let t = text.trim();
        let (positive, name) = if let Some(rest) = t.strip_prefix('-') {
            (false, rest)
        } else if let Some(rest) = t.strip_prefix('~') {
            (false, rest)
        } else if let Some(rest) = t.strip_prefix("not ") {
            (false, rest.trim())
        } else {
            (true, t)
        };
        self.lookup(name).map(|a| Lit::new(a, positive))
    }
}

/// `head <- pos, not neg`. Constraints have an empty head.
///
/// Parsed rules are duplicate-free in each part. Rules coming from clause-mode
/// transforms may repeat atoms, which is how repeated literals in a clause are kept.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Vec<Atom>,
    pub pos: Vec<Atom>,
    pub neg: Vec<Atom>,
}

impl Rule {
    pub fn new(head: Vec<Atom>, pos: Vec<Atom>, neg: Vec<Atom>) -> Rule {
        Rule { head, pos, neg }
    }

    pub fn fact(a: Atom) -> Rule {
        Rule::new(vec![a], vec![], vec![])
    }

    /// The clause `C` read as the constraint `<- ~C`.
    pub fn from_clause(clause: &[Lit]) -> Rule {
        let mut r = Rule::default();
        for &l in clause {
            if l.is_positive() {
                r.neg.push(l.atom());
            } else {
                r.pos.push(l.atom());
            }
        }
        r
    }

    /// Clause view `A v ~B`, repetitions kept: head atoms, then negated positive
    /// body, then the atoms of the negative body.
    pub fn clause(&self) -> Vec<Lit> {
        let mut c = Vec::with_capacity(self.len());
        self.for_each_clause_lit(|l| c.push(l));
        c
    }

    pub fn for_each_clause_lit(&self, mut f: impl FnMut(Lit)) {
        for &a in &self.head {
            f(Lit::pos(a));
        }
        for &a in &self.pos {
            f(Lit::neg(a));
        }
        for &a in &self.neg {
            f(Lit::pos(a));
        }
    }

    /// Body as a conjunction of literals.
    pub fn body(&self) -> Vec<Lit> {
        self.pos
            .iter()
            .map(|&a| Lit::pos(a))
            .chain(self.neg.iter().map(|&a| Lit::neg(a)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.head.len() + self.pos.len() + self.neg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_empty()
    }

    /// More than one distinct head atom.
    pub fn is_disjunctive(&self) -> bool {
        self.head.iter().any(|&h| h != self.head[0])
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.head
            .iter()
            .chain(self.pos.iter())
            .chain(self.neg.iter())
            .copied()
    }

    fn key(&self) -> (Vec<Atom>, Vec<Atom>, Vec<Atom>) {
        let mut h = self.head.clone();
        let mut p = self.pos.clone();
        let mut n = self.neg.clone();
        h.sort_unstable();
        p.sort_unstable();
        n.sort_unstable();
        (h, p, n)
    }
}

/// A finite set of rules over an atom table.
#[derive(Clone, Debug)]
pub struct Program {
    table: Arc<AtomTable>,
    rules: Vec<Rule>,
    clause_mode: bool,
    atoms: Vec<Atom>,
    heads: Vec<Vec<u32>>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Program) -> bool {
        self.rules == other.rules && self.clause_mode == other.clause_mode && {
            let names = |p: &Program| {
                p.atoms
                    .iter()
                    .map(|&a| p.table.name(a).to_string())
                    .collect::<Vec<_>>()
            };
            names(self) == names(other)
        }
    }
}

impl Program {
    /// Builds a program; structurally identical rules are kept once.
    pub fn new(table: Arc<AtomTable>, rules: Vec<Rule>) -> Program {
        Program::build(table, rules, false)
    }

    /// Builds a CNF program in clause mode; each clause becomes `<- ~C`.
    pub fn from_clauses(table: Arc<AtomTable>, clauses: &[Vec<Lit>]) -> Program {
        let rules = clauses.iter().map(|c| Rule::from_clause(c)).collect();
        Program::build(table, rules, true)
    }

    pub fn empty() -> Program {
        Program::new(Arc::new(AtomTable::new()), Vec::new())
    }

    fn build(table: Arc<AtomTable>, rules: Vec<Rule>, clause_mode: bool) -> Program {
        let mut seen = HashSet::new();
        let rules: Vec<Rule> = rules.into_iter().filter(|r| seen.insert(r.key())).collect();
        let n = table.len();
        let mut present = vec![false; n];
        let mut heads = vec![Vec::new(); n];
        for (i, r) in rules.iter().enumerate() {
            for a in r.atoms() {
                present[a as usize] = true;
            }
            let mut hs = r.head.clone();
            hs.sort_unstable();
            hs.dedup();
            for h in hs {
                heads[h as usize].push(i as u32);
            }
        }
        let atoms = (0..n as Atom).filter(|&a| present[a as usize]).collect();
        Program {
            table,
            rules,
            clause_mode,
            atoms,
            heads,
        }
    }

    /// Same table, different rules.
    pub fn with_rules(&self, rules: Vec<Rule>) -> Program {
        Program::build(self.table.clone(), rules, self.clause_mode)
    }

    pub fn table(&self) -> &AtomTable {
        &self.table
    }

    pub fn shared_table(&self) -> Arc<AtomTable> {
        self.table.clone()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn clause_mode(&self) -> bool {
        self.clause_mode
    }

    /// Atoms occurring in some rule, ascending.
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn has_atom(&self, a: Atom) -> bool {
        self.atoms.binary_search(&a).is_ok()
    }

    /// Indices of the rules having `a` in the head.
    pub fn rules_with_head(&self, a: Atom) -> &[u32] {
        self.heads.get(a as usize).map_or(&[], |v| v.as_slice())
    }

    pub fn is_disjunctive(&self) -> bool {
        self.rules.iter().any(Rule::is_disjunctive)
    }

    pub fn clauses(&self) -> Vec<Vec<Lit>> {
        self.rules.iter().map(Rule::clause).collect()
    }

    pub fn render_rule(&self, r: &Rule) -> String {
        let t = &self.table;
        let head = r
            .head
            .iter()
            .map(|&a| t.name(a))
            .collect::<Vec<_>>()
            .join(" | ");
        let body = r
            .pos
            .iter()
            .map(|&a| t.name(a).to_string())
            .chain(r.neg.iter().map(|&a| format!("not {}", t.name(a))))
            .collect::<Vec<_>>()
            .join(", ");
        match (head.is_empty(), body.is_empty()) {
            (false, true) => format!("{head}."),
            (false, false) => format!("{head} :- {body}."),
            (true, false) => format!(":- {body}."),
            (true, true) => ":- .".to_string(),
        }
    }

    /// One rule per line in input syntax.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for r in &self.rules {
            s.push_str(&self.render_rule(r));
            s.push('\n');
        }
        s
    }

    pub fn render_clause(&self, c: &[Lit]) -> String {
        if c.is_empty() {
            return "#false".to_string();
        }
        c.iter()
            .map(|&l| self.table.lit_name(l))
            .collect::<Vec<_>>()
            .join(" | ")
    }

    /// The program as a CNF, e.g. `(a | a) & (-a | -a)`.
    pub fn render_cnf(&self) -> String {
        self.rules
            .iter()
            .map(|r| format!("({})", self.render_clause(&r.clause())))
            .collect::<Vec<_>>()
            .join(" & ")
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// `{l in lits | atom(l) in atoms}`.
pub fn restrict(lits: &[Lit], atoms: &[Atom]) -> Vec<Lit> {
    let keep: HashSet<Atom> = atoms.iter().copied().collect();
    lits.iter().copied().filter(|l| keep.contains(&l.atom())).collect()
}

/// True iff every atom of `p` occurs in `lits`.
pub fn covers(lits: &[Lit], p: &Program) -> bool {
    let have: HashSet<Atom> = lits.iter().map(|l| l.atom()).collect();
    p.atoms().iter().all(|a| have.contains(a))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: atom `{name}` uses the reserved `__` infix")]
    Reserved { line: usize, col: usize, name: String },
}

/// Parses ground programs:
///
/// ```text
/// program := rule* ; rule := head? (":-" body?)? "." ;
/// head := atom ("|" atom)* ; body := lit ("," lit)* ; lit := ("not" WS)? atom
/// ```
///
/// `%` starts a comment that runs to the end of the line.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        line: 1,
        col: 1,
        table: AtomTable::new(),
    };
    let mut rules = Vec::new();
    loop {
        p.skip_ws();
        if p.peek().is_none() {
            break;
        }
        rules.push(p.rule()?);
    }
    Ok(Program::new(Arc::new(p.table), rules))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
    table: AtomTable,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += 1;
            if c == b'\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c == b'%' {
                while let Some(c) = self.peek() {
                    if c == b'\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_ascii_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        })
    }

    fn expect_char(&mut self, c: u8, what: &str) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn at_implication(&self) -> bool {
        self.src[self.pos..].starts_with(b":-")
    }

    fn ident(&mut self) -> Result<(String, usize, usize), ParseError> {
        self.skip_ws();
        let (line, col) = (self.line, self.col);
        match self.peek() {
            Some(c) if c.is_ascii_lowercase() => {}
            _ => return self.err("expected an atom"),
        }
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.bump();
            } else {
                break;
            }
        }
        let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
        Ok((name, line, col))
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let (name, line, col) = self.ident()?;
        self.intern(name, line, col)
    }

    fn intern(&mut self, name: String, line: usize, col: usize) -> Result<Atom, ParseError> {
        if name.contains("__") {
            return Err(ParseError::Reserved { line, col, name });
        }
        Ok(self.table.intern(&name))
    }

    fn rule(&mut self) -> Result<Rule, ParseError> {
        let mut r = Rule::default();
        self.skip_ws();
        if self.peek().is_some_and(|c| c.is_ascii_lowercase()) {
            loop {
                let a = self.atom()?;
                if !r.head.contains(&a) {
                    r.head.push(a);
                }
                self.skip_ws();
                if self.peek() == Some(b'|') {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.skip_ws();
        if self.at_implication() {
            self.bump();
            self.bump();
            self.skip_ws();
            if self.peek() != Some(b'.') {
                loop {
                    self.body_lit(&mut r)?;
                    self.skip_ws();
                    if self.peek() == Some(b',') {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
        }
        self.expect_char(b'.', "`.` at the end of the rule")?;
        Ok(r)
    }

    fn body_lit(&mut self, r: &mut Rule) -> Result<(), ParseError> {
        let (name, line, col) = self.ident()?;
        let negated = name == "not"
            && self.peek().is_some_and(|c| c.is_ascii_whitespace() || c == b'%')
            && {
                let save = (self.pos, self.line, self.col);
                self.skip_ws();
                let next_is_atom = self.peek().is_some_and(|c| c.is_ascii_lowercase());
                if !next_is_atom {
                    (self.pos, self.line, self.col) = save;
                }
                next_is_atom
            };
        if negated {
            let a = self.atom()?;
            if !r.neg.contains(&a) {
                r.neg.push(a);
            }
        } else {
            let a = self.intern(name, line, col)?;
            if !r.pos.contains(&a) {
                r.pos.push(a);
            }
        }
        Ok(())
    }
}

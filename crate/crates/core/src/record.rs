//! Records: the ordered literal strings that make up solver states.

use crate::program::{Atom, AtomTable, Lit};

/// Entries are `(literal, is_decision)`. A falsum marker may sit at some
/// position; it counts as one element of the record.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Record {
    entries: Vec<(Lit, bool)>,
    falsum: Option<usize>,
}

impl Record {
    pub fn new() -> Record {
        Record::default()
    }

    pub fn from_lits(lits: &[Lit]) -> Record {
        let mut r = Record::new();
        for &l in lits {
            r.push(l);
        }
        r
    }

    pub fn entries(&self) -> &[(Lit, bool)] {
        &self.entries
    }

    pub fn lits(&self) -> impl Iterator<Item = Lit> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len() + self.falsum.is_some() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Appends a derived literal. Repeating a literal already present is ignored.
    pub fn push(&mut self, l: Lit) {
        if !self.contains(l) {
            self.entries.push((l, false));
        }
    }

    pub fn decide(&mut self, l: Lit) {
        if !self.contains(l) {
            self.entries.push((l, true));
        }
    }

    pub fn push_falsum(&mut self) {
        if self.falsum.is_none() {
            self.falsum = Some(self.entries.len());
        }
    }

    pub fn has_falsum(&self) -> bool {
        self.falsum.is_some()
    }

    pub fn falsum_position(&self) -> Option<usize> {
        self.falsum
    }

    pub fn contains(&self, l: Lit) -> bool {
        self.entries.iter().any(|e| e.0 == l)
    }

    pub fn is_consistent(&self) -> bool {
        if self.falsum.is_some() {
            return false;
        }
        let mut seen = std::collections::HashSet::with_capacity(self.entries.len());
        for &(l, _) in &self.entries {
            if seen.contains(&l.complement()) {
                return false;
            }
            seen.insert(l);
        }
        true
    }

    pub fn decisions(&self) -> impl Iterator<Item = Lit> + '_ {
        self.entries.iter().filter(|e| e.1).map(|e| e.0)
    }

    pub fn has_decision(&self) -> bool {
        self.entries.iter().any(|e| e.1)
    }

    pub fn last_decision(&self) -> Option<usize> {
        self.entries.iter().rposition(|e| e.1)
    }

    /// Keeps the first `n` entries; a falsum placed after them is dropped.
    pub fn truncate(&mut self, n: usize) {
        self.entries.truncate(n);
        if self.falsum.is_some_and(|p| p > n) {
            self.falsum = None;
        }
    }

    /// `L l* L'` becomes `L ~l`, with `l*` the rightmost decision.
    pub fn backtrack(&self) -> Option<Record> {
        let i = self.last_decision()?;
        let l = self.entries[i].0;
        let mut r = self.clone();
        r.truncate(i);
        r.push(l.complement());
        Some(r)
    }

    /// Lengths of the segments delimited by decision literals.
    pub fn depth(&self) -> Vec<usize> {
        let mut d = vec![0];
        for (i, &(_, dec)) in self.entries.iter().enumerate() {
            if self.falsum == Some(i) {
                *d.last_mut().unwrap() += 1;
            }
            if dec {
                d.push(0);
            }
            *d.last_mut().unwrap() += 1;
        }
        if self.falsum == Some(self.entries.len()) {
            *d.last_mut().unwrap() += 1;
        }
        d
    }

    /// Same segments with the literals inside each segment sorted and the
    /// falsum marker at the end of its segment. Moves only look at the
    /// literal set and the decisions, so records with equal canonical forms
    /// have the same successors up to canonical form.
    pub fn canonical(&self) -> Record {
        let mut bounds = vec![0];
        bounds.extend((0..self.entries.len()).filter(|&i| self.entries[i].1));
        bounds.push(self.entries.len());
        let mut out = Record::new();
        for w in bounds.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mut seg = self.entries[lo..hi].to_vec();
            let skip = seg.first().is_some_and(|e| e.1) as usize;
            seg[skip..].sort_unstable();
            out.entries.extend(seg);
            if out.falsum.is_none() && self.falsum.is_some_and(|p| p <= hi) {
                out.falsum = Some(hi);
            }
        }
        out
    }

    /// Literal set of the record in canonical order.
    pub fn sorted_lits(&self) -> Vec<Lit> {
        let mut v: Vec<Lit> = self.lits().collect();
        v.sort_unstable();
        v
    }

    /// Assignment view sized for a table of `n` atoms.
    pub fn assign(&self, n: usize) -> Assign {
        let mut m = Assign::new(n);
        for l in self.lits() {
            m.set(l);
        }
        if self.falsum.is_some() {
            m.falsum = true;
        }
        m
    }

    /// `a* -c`, with `#false` for the falsum marker.
    pub fn render(&self, table: &AtomTable) -> String {
        let mut parts = Vec::new();
        for (i, &(l, dec)) in self.entries.iter().enumerate() {
            if self.falsum == Some(i) {
                parts.push("#false".to_string());
            }
            let mut s = table.lit_name(l);
            if dec {
                s.push('*');
            }
            parts.push(s);
        }
        if self.falsum == Some(self.entries.len()) {
            parts.push("#false".to_string());
        }
        parts.join(" ")
    }
}

const POS: u8 = 1;
const NEG: u8 = 2;

/// Set of literals as a per-atom bitmask.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assign {
    vals: Vec<u8>,
    falsum: bool,
}

impl Assign {
    pub fn new(n: usize) -> Assign {
        Assign {
            vals: vec![0; n],
            falsum: false,
        }
    }

    pub fn from_lits(n: usize, lits: &[Lit]) -> Assign {
        let mut m = Assign::new(n);
        for &l in lits {
            m.set(l);
        }
        m
    }

    /// Complete assignment over `universe` with exactly `true_atoms` true.
    pub fn from_model(n: usize, universe: &[Atom], true_atoms: &[Atom]) -> Assign {
        let mut m = Assign::new(n);
        for &a in universe {
            m.set(Lit::neg(a));
        }
        for &a in true_atoms {
            m.vals[a as usize] = POS;
        }
        m
    }

    pub fn size(&self) -> usize {
        self.vals.len()
    }

    pub fn set(&mut self, l: Lit) {
        let a = l.atom() as usize;
        if a >= self.vals.len() {
            self.vals.resize(a + 1, 0);
        }
        self.vals[a] |= if l.is_positive() { POS } else { NEG };
    }

    pub fn set_falsum(&mut self) {
        self.falsum = true;
    }

    pub fn has(&self, l: Lit) -> bool {
        let bit = if l.is_positive() { POS } else { NEG };
        self.vals.get(l.atom() as usize).is_some_and(|v| v & bit != 0)
    }

    pub fn is_true(&self, a: Atom) -> bool {
        self.has(Lit::pos(a))
    }

    pub fn is_false(&self, a: Atom) -> bool {
        self.has(Lit::neg(a))
    }

    pub fn is_assigned(&self, a: Atom) -> bool {
        self.vals.get(a as usize).is_some_and(|&v| v != 0)
    }

    pub fn has_falsum(&self) -> bool {
        self.falsum
    }

    pub fn is_consistent(&self) -> bool {
        !self.falsum && self.vals.iter().all(|&v| v != POS | NEG)
    }

    pub fn covers(&self, atoms: &[Atom]) -> bool {
        atoms.iter().all(|&a| self.is_assigned(a))
    }

    pub fn true_atoms(&self) -> Vec<Atom> {
        (0..self.vals.len() as Atom)
            .filter(|&a| self.is_true(a))
            .collect()
    }

    pub fn lits(&self) -> Vec<Lit> {
        let mut v = Vec::new();
        for (a, &x) in self.vals.iter().enumerate() {
            if x & NEG != 0 {
                v.push(Lit::neg(a as Atom));
            }
            if x & POS != 0 {
                v.push(Lit::pos(a as Atom));
            }
        }
        v
    }

    /// Keeps only the literals over `atoms`.
    pub fn restricted(&self, atoms: &[Atom]) -> Assign {
        let mut m = Assign::new(self.vals.len());
        for &a in atoms {
            if let Some(&v) = self.vals.get(a as usize) {
                m.vals[a as usize] = v;
            }
        }
        m.falsum = self.falsum;
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backtrack_flips_last_decision() {
        let mut r = Record::new();
        r.decide(Lit::pos(0));
        r.push(Lit::pos(2));
        r.decide(Lit::pos(1));
        r.push(Lit::neg(1));
        let b = r.backtrack().unwrap();
        assert_eq!(
            b.entries(),
            &[(Lit::pos(0), true), (Lit::pos(2), false), (Lit::neg(1), false)]
        );
        assert!(!r.is_consistent());
        assert!(b.is_consistent());
    }

    #[test]
    fn depth_and_falsum() {
        let mut r = Record::new();
        r.push(Lit::pos(0));
        r.decide(Lit::pos(1));
        r.push_falsum();
        assert_eq!(r.depth(), vec![1, 2]);
        let b = r.backtrack().unwrap();
        assert!(!b.has_falsum());
        assert_eq!(b.depth(), vec![2]);
    }
}

//! Exhaustive exploration of reachable states.
//!
//! `compare_graphs` builds the reachable graph. The right layer entered from
//! a left record `L` only depends on the witness program, a function of `L`
//! restricted to the input atoms, so each right-layer block is explored once
//! and the left level treats blocks as single nodes. Records are stored in
//! canonical form (see [`Record::canonical`]): successors are determined by
//! it, so this is the reachable graph up to the order of derived literals
//! inside a decision segment.
//!
//! `explore_two_layer` goes further and summarizes per literal set, which
//! keeps programs with a dozen generated atoms within reach.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use super::{BasicState, Dpt, Extension, Side, Solver, SolverConfig, State};
use crate::oracle::Model;
use crate::program::{Lit, Program};
use crate::record::{Assign, Record};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct ChecksReport {
    pub verdict: Verdict,
    pub violations: Vec<String>,
    pub states: usize,
    pub edges: usize,
    pub ok_models: BTreeSet<Model>,
    pub fail_reachable: bool,
}

impl ChecksReport {
    fn inconclusive(states: usize) -> ChecksReport {
        ChecksReport {
            verdict: Verdict::Inconclusive,
            violations: vec![format!("state limit reached after {states} states")],
            states,
            edges: 0,
            ok_models: BTreeSet::new(),
            fail_reachable: false,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Kahn's algorithm; true when the graph has no cycle.
fn acyclic(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for &(a, b) in edges {
        indeg[b] += 1;
        succ[a].push(b);
    }
    let mut q: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(a) = q.pop_front() {
        seen += 1;
        for &b in &succ[a] {
            indeg[b] -= 1;
            if indeg[b] == 0 {
                q.push_back(b);
            }
        }
    }
    seen == n
}

fn check_ok(p: &Program, l: &Record, expected: &[Model], out: &mut Vec<String>) -> Option<Model> {
    let m = l.assign(p.table().len());
    if !m.is_consistent() || !m.covers(p.atoms()) {
        out.push(format!("Ok({}) does not assign every atom consistently", l.render(p.table())));
        return None;
    }
    let model: Model = p.atoms().iter().copied().filter(|&a| m.is_true(a)).collect();
    if !expected.contains(&model) {
        out.push(format!("Ok({}) is not an expected model", l.render(p.table())));
    }
    Some(model)
}

fn finish(
    mut violations: Vec<String>,
    states: usize,
    edges: usize,
    ok_models: BTreeSet<Model>,
    fail_reachable: bool,
    expected: &[Model],
) -> ChecksReport {
    if fail_reachable != expected.is_empty() {
        violations.push(if fail_reachable {
            "Failstate is reachable although models exist".into()
        } else {
            "Failstate is unreachable although there are no models".into()
        });
    }
    ChecksReport {
        verdict: if violations.is_empty() { Verdict::Pass } else { Verdict::Fail },
        violations,
        states,
        edges,
        ok_models,
        fail_reachable,
    }
}

/// Checks the single-layer graph against `expected`.
pub fn explore_single(dpt: &Dpt, expected: &[Model], max_states: usize) -> ChecksReport {
    let mut ids: HashMap<BasicState, usize> = HashMap::new();
    let mut nodes: Vec<BasicState> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut violations = Vec::new();
    let mut ok_models = BTreeSet::new();
    let mut fail = false;
    let init = dpt.initial();
    ids.insert(init.clone(), 0);
    nodes.push(init);
    let mut k = 0;
    while k < nodes.len() {
        if nodes.len() > max_states {
            return ChecksReport::inconclusive(nodes.len());
        }
        let s = nodes[k].clone();
        match &s {
            BasicState::Ok(l) => {
                if let Some(m) = check_ok(&dpt.program, l, expected, &mut violations) {
                    ok_models.insert(m);
                }
            }
            BasicState::Failstate => fail = true,
            BasicState::Node(r) => {
                let moves = dpt.moves(&s);
                if moves.is_empty() {
                    violations.push(format!("non-terminal state {} has no successor", r.render(dpt.program.table())));
                }
                let mut succ = BTreeSet::new();
                for mv in &moves {
                    let t = match dpt.apply(&s, mv) {
                        BasicState::Node(r) => BasicState::Node(r.canonical()),
                        BasicState::Ok(r) => BasicState::Ok(r.canonical()),
                        f => f,
                    };
                    let next = ids.len();
                    let id = *ids.entry(t.clone()).or_insert_with(|| {
                        nodes.push(t);
                        next
                    });
                    succ.insert(id);
                }
                edges.extend(succ.into_iter().map(|b| (k, b)));
            }
        }
        k += 1;
    }
    if !acyclic(nodes.len(), &edges) {
        violations.push("the reachable graph has a cycle".into());
    }
    finish(violations, nodes.len(), edges.len(), ok_models, fail, expected)
}

/// Where a right-layer edge leads.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum BlockTarget {
    Inner(Record),
    Ok,
    Exit,
}

/// Summary of the right layer for one witness.
#[derive(Debug)]
struct Block {
    states: usize,
    concludes: bool,
    exits: bool,
    edges: Vec<(Record, BlockTarget)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Node {
    Left(Record),
    Block(Record),
    Ok(Record),
    Fail,
}

struct Graph {
    nodes: Vec<Node>,
    ids: HashMap<Node, usize>,
    succ: Vec<Vec<usize>>,
    edge_ids: Vec<(usize, usize)>,
    blocks: HashMap<Vec<Lit>, Arc<Block>>,
    states: usize,
}

fn explore_block(solver: &Solver, left: &Record, budget: usize) -> Option<Block> {
    let mut ids: HashMap<Record, usize> = HashMap::new();
    let mut nodes: Vec<Record> = Vec::new();
    let mut digest = Vec::new();
    let mut concludes = false;
    let mut exits = false;
    let State::Pair(base) = solver.initial() else { unreachable!() };
    let first = State::Pair(super::Pair {
        left: left.clone(),
        side: Side::Right(0),
        ..base
    });
    ids.insert(Record::new(), 0);
    nodes.push(Record::new());
    let mut k = 0;
    while k < nodes.len() {
        if nodes.len() > budget {
            return None;
        }
        let s = match &first {
            State::Pair(p) => State::Pair(super::Pair {
                right: nodes[k].clone(),
                ..p.clone()
            }),
            _ => unreachable!(),
        };
        for mv in &solver.moves(&s, None) {
            let t = solver.apply(&s, mv);
            let target = match t {
                State::Pair(q) if q.side != Side::Left && q.left == *left => {
                    let next = ids.len();
                    let r = q.right.canonical();
                    ids.entry(r.clone()).or_insert_with(|| {
                        nodes.push(r.clone());
                        next
                    });
                    BlockTarget::Inner(r)
                }
                State::Ok(_) => {
                    concludes = true;
                    BlockTarget::Ok
                }
                _ => {
                    exits = true;
                    BlockTarget::Exit
                }
            };
            digest.push((nodes[k].clone(), target));
        }
        k += 1;
    }
    digest.sort();
    digest.dedup();
    Some(Block {
        states: nodes.len(),
        concludes,
        exits,
        edges: digest,
    })
}

fn build(solver: &Solver, max_states: usize) -> Option<Graph> {
    let mut g = Graph {
        nodes: Vec::new(),
        ids: HashMap::new(),
        succ: Vec::new(),
        edge_ids: Vec::new(),
        blocks: HashMap::new(),
        states: 0,
    };
    let start = Node::Left(Record::new());
    g.ids.insert(start.clone(), 0);
    g.nodes.push(start);
    let State::Pair(base) = solver.initial() else { unreachable!() };
    let mut k = 0;
    while k < g.nodes.len() {
        if g.states + g.nodes.len() > max_states {
            return None;
        }
        let node = g.nodes[k].clone();
        let mut targets: Vec<Node> = Vec::new();
        match &node {
            Node::Left(l) => {
                let s = State::Pair(super::Pair {
                    left: l.clone(),
                    ..base.clone()
                });
                for mv in solver.moves(&s, None) {
                    targets.push(match solver.apply(&s, &mv) {
                        State::Pair(q) if q.side == Side::Left => Node::Left(q.left.canonical()),
                        State::Pair(q) => Node::Block(q.left.canonical()),
                        State::Ok(l) => Node::Ok(l.canonical()),
                        State::Failstate => Node::Fail,
                    });
                }
            }
            Node::Block(l) => {
                let key = solver.candidate(l);
                let block = match g.blocks.get(&key) {
                    Some(b) => b.clone(),
                    None => {
                        let budget = max_states.saturating_sub(g.states + g.nodes.len());
                        let b = Arc::new(explore_block(solver, l, budget)?);
                        g.states += b.states;
                        g.blocks.insert(key, b.clone());
                        b
                    }
                };
                if block.concludes {
                    targets.push(Node::Ok(l.clone()));
                }
                if block.exits {
                    targets.push(match l.backtrack() {
                        Some(b) => Node::Left(b.canonical()),
                        None => Node::Fail,
                    });
                }
            }
            _ => {}
        }
        let mut succ = Vec::with_capacity(targets.len());
        for t in targets {
            let next = g.ids.len();
            let id = match g.ids.get(&t) {
                Some(&id) => id,
                None => {
                    g.nodes.push(t.clone());
                    g.ids.insert(t, next);
                    next
                }
            };
            if !succ.contains(&id) {
                succ.push(id);
                g.edge_ids.push((k, id));
            }
        }
        g.succ.push(succ);
        k += 1;
    }
    g.states += g.nodes.len();
    Some(g)
}

/// What a level of the search can reach: terminal outcomes, a backtrack
/// out of the level (`Pop`), or, on the right, a return to the left layer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Out {
    Ok(Model),
    Pop,
    Exit,
}

type Outs = BTreeSet<Out>;

/// Summaries per literal set. Transitions out of a record depend on its
/// literal set, except that a conflict or a failed check backtracks to the
/// prefix before the last decision. So the outcomes reachable from a record
/// with literal set `M` are those of `M` with `Pop` standing for the
/// outcomes of the sibling reached by flipping the last decision. Decide on
/// `x` at `M` yields `outs(M + x)` with `Pop` replaced by `outs(M + ~x)`.
struct Summary<'a> {
    solver: &'a Solver,
    left: HashMap<Assign, Outs>,
    blocks: HashMap<Vec<Lit>, HashMap<Assign, Outs>>,
    block_outs: HashMap<Vec<Lit>, Outs>,
    edges: usize,
    states: usize,
    max_states: usize,
    violations: Vec<String>,
}

fn record_of(m: &Assign) -> Record {
    let mut r = Record::from_lits(&m.lits());
    if m.has_falsum() {
        r.push_falsum();
    }
    r
}

fn extend(m: &Assign, mv: &super::Move) -> Assign {
    let mut t = m.clone();
    if mv.falsum {
        t.set_falsum();
    } else if let Some(l) = mv.lit {
        t.set(l);
    }
    t
}

fn substitute(mut outs: Outs, pop: impl FnOnce() -> Option<Outs>) -> Option<Outs> {
    if outs.remove(&Out::Pop) {
        outs.extend(pop()?);
    }
    Some(outs)
}

impl Summary<'_> {
    fn budget(&mut self) -> Option<()> {
        self.states += 1;
        (self.states <= self.max_states).then_some(())
    }

    fn base(&self) -> super::Pair {
        let State::Pair(p) = self.solver.initial() else { unreachable!() };
        p
    }

    fn grows(&mut self, m: &Assign, mv: &super::Move, side: &str) -> bool {
        let fresh = if mv.falsum { !m.has_falsum() } else { mv.lit.is_some_and(|l| !m.has(l)) };
        if !fresh {
            self.violations.push(format!("{} on the {side} adds nothing, giving a cycle", mv.rule));
        }
        fresh
    }

    fn left_outs(&mut self, m: &Assign) -> Option<Outs> {
        if let Some(o) = self.left.get(m) {
            return Some(o.clone());
        }
        self.budget()?;
        let gen = self.solver.generated();
        let l = record_of(m);
        let s = State::Pair(super::Pair {
            left: l.clone(),
            ..self.base()
        });
        let moves = self.solver.moves(&s, None);
        if moves.is_empty() {
            self.violations.push(format!("left state {} has no successor", l.render(gen.table())));
        }
        let mut outs = Outs::new();
        for mv in &moves {
            self.edges += 1;
            use super::RuleName::*;
            match mv.rule {
                ConcludeL | BacktrackL => {
                    outs.insert(Out::Pop);
                }
                PropagateL => {
                    if self.grows(m, mv, "left") {
                        outs.extend(self.left_outs(&extend(m, mv))?);
                    }
                }
                DecideL => {
                    let x = mv.lit.unwrap();
                    let mut flip = m.clone();
                    flip.set(x.complement());
                    let inner = self.left_outs(&extend(m, mv))?;
                    outs.extend(substitute(inner, || self.left_outs(&flip))?);
                }
                CrossLR => {
                    let b = self.block_outs(&l)?;
                    if b.contains(&Out::Ok(Vec::new())) {
                        let model = self.solver.program().atoms().iter().copied().filter(|&a| m.is_true(a)).collect();
                        if !m.is_consistent() || !m.covers(self.solver.program().atoms()) {
                            self.violations.push(format!("Ok({}) does not assign every atom consistently", l.render(gen.table())));
                        }
                        outs.insert(Out::Ok(model));
                    }
                    if b.contains(&Out::Exit) {
                        outs.insert(Out::Pop);
                    }
                }
                r => self.violations.push(format!("unexpected left rule {r}")),
            }
        }
        self.left.insert(m.clone(), outs.clone());
        Some(outs)
    }

    /// Right layer entered from `left`; `Ok(vec![])` marks Conclude_R.
    fn block_outs(&mut self, left: &Record) -> Option<Outs> {
        let key = self.solver.candidate(left);
        if let Some(o) = self.block_outs.get(&key) {
            return Some(o.clone());
        }
        self.blocks.insert(key.clone(), HashMap::new());
        let w = self.solver.witness(left, 0);
        let root = Assign::new(w.table().len());
        let outs = self.right_outs(&key, left, &root)?;
        let outs = substitute(outs, || Some([Out::Ok(Vec::new())].into()))?;
        self.blocks.remove(&key);
        self.block_outs.insert(key, outs.clone());
        Some(outs)
    }

    fn right_outs(&mut self, key: &Vec<Lit>, left: &Record, m: &Assign) -> Option<Outs> {
        if let Some(o) = self.blocks[key].get(m) {
            return Some(o.clone());
        }
        self.budget()?;
        let s = State::Pair(super::Pair {
            left: left.clone(),
            right: record_of(m),
            side: Side::Right(0),
            ..self.base()
        });
        let moves = self.solver.moves(&s, None);
        if moves.is_empty() {
            let w = self.solver.witness(left, 0);
            self.violations.push(format!("right state {} has no successor", record_of(m).render(w.table())));
        }
        let mut outs = Outs::new();
        for mv in &moves {
            self.edges += 1;
            use super::RuleName::*;
            match mv.rule {
                ConcludeR | BacktrackR => {
                    outs.insert(Out::Pop);
                }
                ConcludeRL | BacktrackRL => {
                    outs.insert(Out::Exit);
                }
                PropagateR => {
                    if self.grows(m, mv, "right") {
                        outs.extend(self.right_outs(key, left, &extend(m, mv))?);
                    }
                }
                DecideR => {
                    let x = mv.lit.unwrap();
                    let mut flip = m.clone();
                    flip.set(x.complement());
                    let inner = self.right_outs(key, left, &extend(m, mv))?;
                    outs.extend(substitute(inner, || self.right_outs(key, left, &flip))?);
                }
                r => self.violations.push(format!("unexpected right rule {r}")),
            }
        }
        self.blocks.get_mut(key).unwrap().insert(m.clone(), outs.clone());
        Some(outs)
    }
}

/// Checks a two-layer graph (without extensions) against `expected`.
///
/// Works on summaries per literal set rather than on individual records;
/// every edge out of a non-conflicting state adds a new literal, so the
/// reachable graph is acyclic when no such edge is flagged and every
/// backtrack moves up the lexicographic order.
pub fn explore_two_layer(solver: &Solver, expected: &[Model], max_states: usize) -> ChecksReport {
    if solver.config().extension != Extension::None {
        return ChecksReport {
            verdict: Verdict::Inconclusive,
            violations: vec!["exploration covers graphs without extensions only".into()],
            states: 0,
            edges: 0,
            ok_models: BTreeSet::new(),
            fail_reachable: false,
        };
    }
    let mut sm = Summary {
        solver,
        left: HashMap::new(),
        blocks: HashMap::new(),
        block_outs: HashMap::new(),
        edges: 0,
        states: 0,
        max_states,
        violations: Vec::new(),
    };
    let root = Assign::new(solver.generated().table().len());
    let Some(outs) = sm.left_outs(&root) else {
        return ChecksReport::inconclusive(max_states);
    };
    let mut violations = sm.violations;
    let mut ok_models = BTreeSet::new();
    let mut fail = false;
    for o in outs {
        match o {
            Out::Ok(m) => {
                if !expected.contains(&m) {
                    let names: Vec<&str> = m.iter().map(|&a| solver.program().table().name(a)).collect();
                    violations.push(format!("Ok with {{{}}} is reachable but not expected", names.join(", ")));
                }
                ok_models.insert(m);
            }
            Out::Pop => fail = true,
            Out::Exit => violations.push("right layer exit at the top level".into()),
        }
    }
    finish(violations, sm.states, sm.edges, ok_models, fail, expected)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphDiff {
    pub identical: bool,
    pub inconclusive: bool,
    pub first_difference: Option<String>,
    pub states: (usize, usize),
}

/// Compares the reachable edge relations of two graphs on `p`, ignoring
/// rule names.
pub fn compare_graphs(p: &Program, a: &SolverConfig, b: &SolverConfig, max_states: usize) -> Result<GraphDiff, super::EngineError> {
    let sa = Solver::new(p.clone(), a.clone())?;
    let sb = Solver::new(p.clone(), b.clone())?;
    let (Some(ga), Some(gb)) = (build(&sa, max_states), build(&sb, max_states)) else {
        return Ok(GraphDiff {
            identical: false,
            inconclusive: true,
            first_difference: None,
            states: (0, 0),
        });
    };
    let states = (ga.states, gb.states);
    let render = |s: &Solver, n: &Node| match n {
        Node::Left(l) => format!("({}, )_L", l.render(s.generated().table())),
        Node::Block(l) => format!("({}, ...)_R", l.render(s.generated().table())),
        Node::Ok(l) => format!("Ok({})", l.render(s.generated().table())),
        Node::Fail => "Failstate".into(),
    };
    let edge_diff = |x: &Graph, y: &Graph| -> Option<(Node, Option<Node>)> {
        for (i, n) in x.nodes.iter().enumerate() {
            let Some(&j) = y.ids.get(n) else {
                return Some((n.clone(), None));
            };
            let there: BTreeSet<&Node> = y.succ[j].iter().map(|&t| &y.nodes[t]).collect();
            for &t in &x.succ[i] {
                if !there.contains(&x.nodes[t]) {
                    return Some((n.clone(), Some(x.nodes[t].clone())));
                }
            }
        }
        None
    };
    for (owner, x, y, s) in [("first", &ga, &gb, &sa), ("second", &gb, &ga, &sb)] {
        if let Some((n, t)) = edge_diff(x, y) {
            let what = match t {
                Some(t) => format!("{} -> {}", render(s, &n), render(s, &t)),
                None => format!("state {}", render(s, &n)),
            };
            return Ok(GraphDiff {
                identical: false,
                inconclusive: false,
                first_difference: Some(format!("only the {owner} graph has {what}")),
                states,
            });
        }
    }
    let mut keys: Vec<&Vec<Lit>> = ga.blocks.keys().collect();
    keys.sort();
    for k in keys {
        let differs = match gb.blocks.get(k) {
            Some(bb) => bb.edges != ga.blocks[k].edges,
            None => true,
        };
        if differs {
            let names: Vec<String> = k.iter().map(|&l| p.table().lit_name(l)).collect();
            return Ok(GraphDiff {
                identical: false,
                inconclusive: false,
                first_difference: Some(format!("right layers differ for candidate {}", names.join(" "))),
                states,
            });
        }
    }
    Ok(GraphDiff {
        identical: true,
        inconclusive: false,
        first_difference: None,
        states,
    })
}

//! Best-first search combining deduction, abduction and ranked induction,
//! and the replay checker for emitted scripts.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::abduce::{valuable_conjectures, AbduceLimits};
use crate::deduct::{DeductBudgets, Deducer};
use crate::eval::{find_counterexample, Counterexample};
use crate::induct::{candidate_applications, InductLimits};
use crate::kernel::{Sequent, Theory};
use crate::mlfeat::Ranker;
use crate::psl::{apply_step, ProofScript, ProofStep, StepError};

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct PriorityWeights {
    pub step: f64,
    pub size: f64,
    pub depth: f64,
    pub goals: f64,
    /// Step score of a deductive child.
    pub deductive_bonus: f64,
}

impl Default for PriorityWeights {
    fn default() -> Self {
        PriorityWeights {
            step: 1.0,
            size: 0.1,
            depth: 0.5,
            goals: 1.0,
            deductive_bonus: 5.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct UniteConfig {
    pub max_nodes: usize,
    /// Induction candidates tried per expansion.
    pub top_k: usize,
    pub induct: InductLimits,
    pub abduce: AbduceLimits,
    pub budgets: DeductBudgets,
    pub weights: PriorityWeights,
    pub ranker: Ranker,
    pub timeout: Option<Duration>,
    /// States popped and expanded together; 1 is the deterministic default.
    pub jobs: usize,
}

impl Default for UniteConfig {
    fn default() -> Self {
        UniteConfig {
            max_nodes: 50_000,
            top_k: 5,
            induct: InductLimits::default(),
            abduce: AbduceLimits::default(),
            budgets: DeductBudgets::default(),
            weights: PriorityWeights::default(),
            ranker: Ranker::default(),
            timeout: None,
            jobs: 1,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProofState {
    pub goals: Vec<Sequent>,
    pub log: Vec<ProofStep>,
    pub depth: usize,
    pub seqno: u64,
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub enum StepKind {
    Deductive,
    /// Ranking score of the induction arguments.
    Inductive(f64),
    /// Size of the inserted conjecture.
    Abductive(usize),
}

/// `wS * stepScore - wG * total goal size - wD * depth - wN * #goals`
pub fn priority(state: &ProofState, kind: StepKind, w: &PriorityWeights) -> f64 {
    let step = match kind {
        StepKind::Deductive => w.deductive_bonus,
        StepKind::Inductive(s) => s,
        StepKind::Abductive(size) => -(size as f64) / 4.0,
    };
    let size: usize = state.goals.iter().map(|g| g.size()).sum();
    w.step * step - w.size * size as f64 - w.depth * state.depth as f64 - w.goals * state.goals.len() as f64
}

struct Entry {
    priority: f64,
    seqno: u64,
    state: ProofState,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .total_cmp(&other.priority)
            .then_with(|| other.seqno.cmp(&self.seqno))
    }
}

/// Max-priority queue; equal priorities pop in insertion order.
#[derive(Default)]
pub struct PriorityQueue {
    heap: BinaryHeap<Entry>,
    next: u64,
}

impl PriorityQueue {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assigns the state its sequence number.
    pub fn push(&mut self, priority: f64, mut state: ProofState) {
        state.seqno = self.next;
        self.next += 1;
        self.heap.push(Entry {
            priority,
            seqno: state.seqno,
            state,
        });
    }

    pub fn pop(&mut self) -> Option<(f64, ProofState)> {
        self.heap.pop().map(|e| (e.priority, e.state))
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Stats {
    pub nodes: usize,
    pub millis: u128,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GiveUpReason {
    BudgetExhausted,
    QueueEmpty,
}

impl fmt::Display for GiveUpReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GiveUpReason::BudgetExhausted => "budget exhausted",
            GiveUpReason::QueueEmpty => "queue empty",
        })
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum SearchResult {
    Proved(ProofScript, Stats),
    Refuted(Counterexample, Stats),
    GaveUp(GiveUpReason, Stats),
}

impl SearchResult {
    pub fn stats(&self) -> Stats {
        match self {
            SearchResult::Proved(_, s) | SearchResult::Refuted(_, s) | SearchResult::GaveUp(_, s) => *s,
        }
    }

    pub fn verdict(&self) -> &'static str {
        match self {
            SearchResult::Proved(..) => "PROVED",
            SearchResult::Refuted(..) => "REFUTED",
            SearchResult::GaveUp(..) => "GAVEUP",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UniteError {
    #[error("unknown goal '{0}'")]
    UnknownGoal(String),
}

pub struct Child {
    pub kind: StepKind,
    pub state: ProofState,
    pub priority: f64,
}

pub enum Expansion {
    /// A step log that closes every goal.
    Solved(Vec<ProofStep>),
    Children(Vec<Child>),
}

fn child(deducer: &Deducer, parent: &ProofState, step: ProofStep, kind: StepKind, w: &PriorityWeights) -> Option<Child> {
    let goals = apply_step(deducer, &parent.goals, &step).ok()?;
    let mut log = parent.log.clone();
    log.push(step);
    let state = ProofState {
        goals,
        log,
        depth: parent.depth + 1,
        seqno: 0,
    };
    let priority = priority(&state, kind, w);
    Some(Child { kind, state, priority })
}

/// Deduction first; if it changes nothing, conjectures and the top-ranked
/// induction candidates for the first goal.
pub fn expand(deducer: &Deducer, state: &ProofState, config: &UniteConfig) -> Expansion {
    let w = &config.weights;
    if let Some(c) = child(deducer, state, ProofStep::Auto, StepKind::Deductive, w) {
        if c.state.goals.is_empty() {
            return Expansion::Solved(c.state.log);
        }
        return Expansion::Children(vec![c]);
    }
    let Some(first) = state.goals.first() else {
        return Expansion::Solved(state.log.clone());
    };
    let theory = deducer.theory();
    let mut out = Vec::new();
    for conj in valuable_conjectures(deducer, first, &config.abduce) {
        let kind = StepKind::Abductive(conj.size());
        out.extend(child(deducer, state, ProofStep::Conjecture(conj), kind, w));
    }
    let candidates = candidate_applications(first, theory, config.induct);
    for r in config.ranker.rank(first, theory, candidates).into_iter().take(config.top_k) {
        out.extend(child(deducer, state, ProofStep::Induct(r.args), StepKind::Inductive(r.score), w));
    }
    Expansion::Children(out)
}

/// Search without touching the theory.
pub fn search(theory: &Theory, goal: &str, config: &UniteConfig) -> Result<SearchResult, UniteError> {
    let start = Instant::now();
    let named = theory.goal(goal).ok_or_else(|| UniteError::UnknownGoal(goal.to_string()))?;
    let stats = |nodes| Stats {
        nodes,
        millis: start.elapsed().as_millis(),
    };
    if let Some(cex) = find_counterexample(theory, &named.formula, config.abduce.refute_size, config.abduce.fuel) {
        return Ok(SearchResult::Refuted(cex, stats(0)));
    }
    let deducer = Deducer::new(theory, config.budgets);
    let finish = |log: Vec<ProofStep>, nodes| {
        let mut steps = log;
        steps.push(ProofStep::Qed);
        SearchResult::Proved(
            ProofScript {
                goal: named.name.clone(),
                steps,
            },
            stats(nodes),
        )
    };
    let root = ProofState {
        goals: vec![Sequent::root(&named.formula)],
        log: Vec::new(),
        depth: 0,
        seqno: 0,
    };
    let mut seen: HashSet<Vec<Sequent>> = HashSet::new();
    seen.insert(root.goals.clone());
    let mut queue = PriorityQueue::new();
    queue.push(0.0, root);
    let mut nodes = 0;
    let jobs = config.jobs.max(1);
    while !queue.is_empty() {
        if nodes >= config.max_nodes || config.timeout.is_some_and(|t| start.elapsed() >= t) {
            return Ok(SearchResult::GaveUp(GiveUpReason::BudgetExhausted, stats(nodes)));
        }
        let take = jobs.min(config.max_nodes - nodes);
        let batch: Vec<ProofState> = (0..take).filter_map(|_| queue.pop().map(|(_, s)| s)).collect();
        nodes += batch.len();
        let expansions: Vec<Expansion> = if batch.len() == 1 {
            vec![expand(&deducer, &batch[0], config)]
        } else {
            std::thread::scope(|sc| {
                let handles: Vec<_> = batch
                    .iter()
                    .map(|s| sc.spawn(|| expand(&deducer, s, config)))
                    .collect();
                handles.into_iter().map(|h| h.join().expect("expansion thread")).collect()
            })
        };
        for e in expansions {
            match e {
                Expansion::Solved(log) => return Ok(finish(log, nodes)),
                Expansion::Children(cs) => {
                    for c in cs {
                        if seen.insert(c.state.goals.clone()) {
                            queue.push(c.priority, c.state);
                        }
                    }
                }
            }
        }
    }
    Ok(SearchResult::GaveUp(GiveUpReason::QueueEmpty, stats(nodes)))
}

/// Search, and on success add the goal to the theory's lemmas.
pub fn united_prove(theory: &mut Theory, goal: &str, config: &UniteConfig) -> Result<SearchResult, UniteError> {
    let result = search(theory, goal, config)?;
    if let SearchResult::Proved(..) = result {
        let f = theory.goal(goal).expect("goal exists").formula.clone();
        theory.add_lemma(goal, f);
    }
    Ok(result)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("step {step}: {reason}")]
pub struct ReplayError {
    /// 1-based index of the failing step.
    pub step: usize,
    pub reason: String,
}

/// Replays `script` against the named goal. Never searches.
pub fn check_script(theory: &Theory, goal: &str, script: &ProofScript, budgets: DeductBudgets) -> Result<(), ReplayError> {
    let named = theory.goal(goal).ok_or_else(|| ReplayError {
        step: 0,
        reason: format!("unknown goal '{goal}'"),
    })?;
    let deducer = Deducer::new(theory, budgets);
    let mut goals = vec![Sequent::root(&named.formula)];
    for (i, step) in script.steps.iter().enumerate() {
        if *step == ProofStep::Qed && i + 1 != script.steps.len() {
            return Err(ReplayError {
                step: i + 2,
                reason: "step after qed".into(),
            });
        }
        goals = apply_step(&deducer, &goals, step).map_err(|e: StepError| ReplayError {
            step: i + 1,
            reason: e.to_string(),
        })?;
    }
    if script.steps.last() != Some(&ProofStep::Qed) {
        return Err(ReplayError {
            step: script.steps.len() + 1,
            reason: "missing qed".into(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::induct::InductArgs;
    use crate::syntax::{parse_theory, print_script};

    const LISTREV: &str = include_str!("../tests/data/listrev.thy");

    fn th() -> Theory {
        parse_theory(LISTREV).unwrap()
    }

    fn state(depth: usize, goals: Vec<Sequent>) -> ProofState {
        ProofState {
            goals,
            log: Vec::new(),
            depth,
            seqno: 0,
        }
    }

    #[test]
    fn priority_examples() {
        let th = th();
        let g = Sequent::root(&th.goal("rev_rev").unwrap().formula);
        let w = PriorityWeights::default();
        let a = priority(&state(1, vec![g.clone()]), StepKind::Deductive, &w);
        let b = priority(&state(2, vec![g.clone()]), StepKind::Deductive, &w);
        assert!(b < a);
        let hi = priority(&state(1, vec![g.clone()]), StepKind::Inductive(2.0), &w);
        let lo = priority(&state(1, vec![g]), StepKind::Inductive(0.5), &w);
        assert!((hi - lo - 1.5).abs() < 1e-12);
    }

    #[test]
    fn queue_is_fifo_among_equals() {
        let mut q = PriorityQueue::new();
        for (i, p) in [1.0, 2.0, 1.0, 2.0].into_iter().enumerate() {
            q.push(p, state(i, Vec::new()));
        }
        let order: Vec<usize> = std::iter::from_fn(|| q.pop().map(|(_, s)| s.depth)).collect();
        assert_eq!(order, vec![1, 3, 0, 2]);
    }

    #[test]
    fn proves_app_assoc() {
        let mut th = th();
        let r = united_prove(&mut th, "app_assoc", &UniteConfig::default()).unwrap();
        let SearchResult::Proved(script, _) = r else { panic!("{r:?}") };
        assert_eq!(
            script.steps,
            vec![ProofStep::Induct(InductArgs::on(&["xs"])), ProofStep::Auto, ProofStep::Qed]
        );
        assert!(th.lemmas.iter().any(|l| &*l.name == "app_assoc"));
    }

    #[test]
    fn refutes_rev_id() {
        let mut th = th();
        let f = crate::syntax::parse_formula("rev xs = xs", &th).unwrap();
        th.goals.push(crate::kernel::NamedFormula {
            name: "rev_id".into(),
            formula: f,
        });
        let r = search(&th, "rev_id", &UniteConfig::default()).unwrap();
        let SearchResult::Refuted(cex, _) = r else { panic!("{r:?}") };
        assert_eq!(cex.to_string(), "{xs = Cons Zero (Cons (Suc Zero) Nil)}");
    }

    #[test]
    fn unknown_goal() {
        let th = th();
        assert!(matches!(search(&th, "nope", &UniteConfig::default()), Err(UniteError::UnknownGoal(_))));
    }

    #[test]
    fn replay() {
        let th = th();
        let r = search(&th, "app_assoc", &UniteConfig::default()).unwrap();
        let SearchResult::Proved(script, _) = r else { panic!() };
        let b = DeductBudgets::default();
        assert_eq!(check_script(&th, "app_assoc", &script, b), Ok(()));
        let mut no_auto = script.clone();
        no_auto.steps.retain(|s| *s != ProofStep::Auto);
        assert_eq!(check_script(&th, "app_assoc", &no_auto, b).unwrap_err().step, 2);
        assert!(check_script(&th, "rev_rev", &script, b).is_err());
        let mut no_qed = script.clone();
        no_qed.steps.pop();
        assert_eq!(check_script(&th, "app_assoc", &no_qed, b).unwrap_err().reason, "missing qed");
        let _ = print_script(&script);
    }

    #[test]
    fn solved_state_short_circuits() {
        let th = th();
        let d = Deducer::new(&th, DeductBudgets::default());
        let g = crate::syntax::parse_formula("app Nil ys = ys", &th).unwrap();
        let s = state(0, vec![Sequent::root(&g)]);
        assert!(matches!(expand(&d, &s, &UniteConfig::default()), Expansion::Solved(_)));
    }
}

//! Strategy language: AST, step semantics shared with the united search and
//! the replay checker, and an iterative-deepening runtime over lazy
//! iterators.

use std::cell::Cell;
use std::fmt;

use thiserror::Error;

use crate::abduce::{insert_conjecture, valuable_conjectures, AbduceLimits};
use crate::deduct::{DeductBudgets, DeductOutcome, Deducer};
use crate::induct::{apply_cases, apply_induction, candidate_applications, InductArgs, InductError, InductLimits};
use crate::kernel::{Formula, NamedFormula, Sequent, Sym, Theory};
use crate::mlfeat::Ranker;
use crate::syntax::{print_step, print_strategy};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum DynamicKind {
    Induct,
    Conjecture,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Strategy {
    Auto,
    Simp,
    IsSolved,
    Dynamic(DynamicKind),
    Thens(Vec<Strategy>),
    Ors(Vec<Strategy>),
    Repeat(Box<Strategy>, usize),
}

impl Strategy {
    /// `Thens [Dynamic(Induct), Auto, IsSolved]`
    pub fn dind() -> Strategy {
        Strategy::Thens(vec![Strategy::Dynamic(DynamicKind::Induct), Strategy::Auto, Strategy::IsSolved])
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_strategy(self))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ProofStep {
    Induct(InductArgs),
    Cases(Sym),
    Auto,
    Simp,
    Conjecture(Formula),
    Qed,
}

impl fmt::Display for ProofStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_step(self))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProofScript {
    pub goal: Sym,
    pub steps: Vec<ProofStep>,
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum StepError {
    #[error("no open goals")]
    NoGoals,
    #[error("no progress")]
    NoProgress,
    #[error("{0}")]
    Induct(#[from] InductError),
    #[error("{0} goal(s) remain")]
    GoalsRemain(usize),
}

/// Deterministic effect of one script step. `auto` and `simp` act on every
/// open goal; the other steps act on the first one.
pub fn apply_step(deducer: &Deducer, goals: &[Sequent], step: &ProofStep) -> Result<Vec<Sequent>, StepError> {
    let theory = deducer.theory();
    match step {
        ProofStep::Qed => {
            if goals.is_empty() {
                Ok(Vec::new())
            } else {
                Err(StepError::GoalsRemain(goals.len()))
            }
        }
        ProofStep::Auto | ProofStep::Simp => {
            if goals.is_empty() {
                return Err(StepError::NoGoals);
            }
            let mut changed = false;
            let mut out = Vec::new();
            for g in goals {
                let outcome = if *step == ProofStep::Auto {
                    deducer.auto(g)
                } else {
                    deducer.simp(g)
                };
                match outcome {
                    DeductOutcome::Solved(_) => changed = true,
                    DeductOutcome::Progress(r, _) => {
                        changed = true;
                        out.extend(r);
                    }
                    DeductOutcome::Stuck => out.push(g.clone()),
                }
            }
            if changed {
                Ok(out)
            } else {
                Err(StepError::NoProgress)
            }
        }
        ProofStep::Induct(args) => {
            let (first, rest) = goals.split_first().ok_or(StepError::NoGoals)?;
            let mut out = apply_induction(first, args, theory)?;
            out.extend_from_slice(rest);
            Ok(out)
        }
        ProofStep::Cases(v) => {
            let (first, rest) = goals.split_first().ok_or(StepError::NoGoals)?;
            let mut out = apply_cases(first, v, theory)?;
            out.extend_from_slice(rest);
            Ok(out)
        }
        ProofStep::Conjecture(c) => {
            let (first, rest) = goals.split_first().ok_or(StepError::NoGoals)?;
            let mut out = insert_conjecture(theory, first, c);
            out.extend_from_slice(rest);
            Ok(out)
        }
    }
}

#[derive(Clone, Debug)]
pub struct PslConfig {
    pub max_depth: usize,
    pub max_nodes: usize,
    pub induct: InductLimits,
    pub abduce: AbduceLimits,
    pub budgets: DeductBudgets,
    /// Orders `Dynamic(Induct)` alternatives when present.
    pub ranker: Option<Ranker>,
}

impl Default for PslConfig {
    fn default() -> Self {
        PslConfig {
            max_depth: 4,
            max_nodes: 10_000,
            induct: InductLimits::default(),
            abduce: AbduceLimits::default(),
            budgets: DeductBudgets::default(),
            ranker: None,
        }
    }
}

/// A proof state inside the strategy runtime.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Node {
    pub goals: Vec<Sequent>,
    pub steps: Vec<ProofStep>,
    /// Choice points taken so far.
    pub depth: usize,
}

impl Node {
    pub fn root(goal: &Formula) -> Self {
        Node {
            goals: vec![Sequent::root(goal)],
            steps: Vec::new(),
            depth: 0,
        }
    }

    fn step(&self, deducer: &Deducer, step: ProofStep) -> Option<Node> {
        let goals = apply_step(deducer, &self.goals, &step).ok()?;
        let mut steps = self.steps.clone();
        steps.push(step);
        Some(Node {
            goals,
            steps,
            depth: self.depth,
        })
    }
}

type Nodes<'s> = Box<dyn Iterator<Item = Node> + 's>;

/// Evaluates strategies lazily under a choice-point bound and a shared node
/// budget.
pub struct Runner<'a, 't> {
    deducer: &'a Deducer<'t>,
    config: &'a PslConfig,
    bound: usize,
    nodes: Cell<usize>,
}

impl<'a, 't> Runner<'a, 't> {
    pub fn new(deducer: &'a Deducer<'t>, config: &'a PslConfig, bound: usize) -> Self {
        Runner {
            deducer,
            config,
            bound,
            nodes: Cell::new(0),
        }
    }

    /// Nodes produced so far, including those counted before this runner.
    pub fn nodes(&self) -> usize {
        self.nodes.get()
    }

    pub fn exhausted(&self) -> bool {
        self.nodes.get() >= self.config.max_nodes
    }

    fn tick(&self) -> bool {
        if self.exhausted() {
            return false;
        }
        self.nodes.set(self.nodes.get() + 1);
        true
    }

    /// All states reachable from `node` by `strategy`, in choice order.
    pub fn apply<'s>(&'s self, strategy: &'s Strategy, node: Node) -> Nodes<'s> {
        match strategy {
            Strategy::Auto => self.single(node, ProofStep::Auto),
            Strategy::Simp => self.single(node, ProofStep::Simp),
            Strategy::IsSolved => {
                if node.goals.is_empty() {
                    Box::new(std::iter::once(node))
                } else {
                    Box::new(std::iter::empty())
                }
            }
            Strategy::Dynamic(kind) => {
                if node.depth >= self.bound || node.goals.is_empty() {
                    return Box::new(std::iter::empty());
                }
                let steps = match kind {
                    DynamicKind::Induct => self.induct_steps(&node.goals[0]),
                    DynamicKind::Conjecture => valuable_conjectures(self.deducer, &node.goals[0], &self.config.abduce)
                        .into_iter()
                        .map(ProofStep::Conjecture)
                        .collect(),
                };
                let mut base = node;
                base.depth += 1;
                Box::new(steps.into_iter().filter_map(move |s| {
                    if !self.tick() {
                        return None;
                    }
                    base.step(self.deducer, s)
                }))
            }
            Strategy::Thens(items) => {
                let mut it: Nodes<'s> = Box::new(std::iter::once(node));
                for s in items {
                    it = Box::new(it.flat_map(move |n| self.apply(s, n)));
                }
                it
            }
            Strategy::Ors(alts) => {
                if node.depth >= self.bound {
                    return Box::new(std::iter::empty());
                }
                let mut base = node;
                base.depth += 1;
                Box::new(alts.iter().flat_map(move |a| self.apply(a, base.clone())))
            }
            Strategy::Repeat(inner, n) => self.repeat(inner, *n, node),
        }
    }

    fn repeat<'s>(&'s self, s: &'s Strategy, n: usize, node: Node) -> Nodes<'s> {
        if n == 0 {
            return Box::new(std::iter::once(node));
        }
        let again = self.apply(s, node.clone()).flat_map(move |m| self.repeat(s, n - 1, m));
        Box::new(again.chain(std::iter::once(node)))
    }

    fn single<'s>(&'s self, node: Node, step: ProofStep) -> Nodes<'s> {
        if !self.tick() {
            return Box::new(std::iter::empty());
        }
        Box::new(node.step(self.deducer, step).into_iter())
    }

    fn induct_steps(&self, first: &Sequent) -> Vec<ProofStep> {
        let theory = self.deducer.theory();
        let candidates = candidate_applications(first, theory, self.config.induct);
        let ordered = match &self.config.ranker {
            Some(r) => r.rank(first, theory, candidates).into_iter().map(|c| c.args).collect(),
            None => candidates,
        };
        ordered.into_iter().map(ProofStep::Induct).collect()
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct PslRun {
    pub script: Option<ProofScript>,
    pub nodes: usize,
    /// The bound at which the script was found.
    pub depth: Option<usize>,
}

/// Iterative deepening over choice-point depth 1..=max_depth; the first
/// state with no open goals wins.
pub fn run_strategy(theory: &Theory, goal: &NamedFormula, strategy: &Strategy, config: &PslConfig) -> PslRun {
    let deducer = Deducer::new(theory, config.budgets);
    let mut total = 0;
    for bound in 1..=config.max_depth.max(1) {
        let runner = Runner::new(&deducer, config, bound);
        runner.nodes.set(total);
        let found = runner.apply(strategy, Node::root(&goal.formula)).find(|n| n.goals.is_empty());
        total = runner.nodes();
        if let Some(n) = found {
            let mut steps = n.steps;
            steps.push(ProofStep::Qed);
            return PslRun {
                script: Some(ProofScript {
                    goal: goal.name.clone(),
                    steps,
                }),
                nodes: total,
                depth: Some(bound),
            };
        }
        if runner.exhausted() {
            break;
        }
    }
    PslRun {
        script: None,
        nodes: total,
        depth: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_strategy, parse_theory, print_script};

    const LISTREV: &str = include_str!("../tests/data/listrev.thy");

    fn th() -> Theory {
        parse_theory(LISTREV).unwrap()
    }

    fn script(th: &Theory, goal: &str, s: &Strategy) -> Option<String> {
        run_strategy(th, th.goal(goal).unwrap(), s, &PslConfig::default())
            .script
            .map(|s| print_script(&s))
    }

    #[test]
    fn dind_proves_direct_goals() {
        let th = th();
        let expected = "proof app_nil\ninduct xs\nauto\nqed\n";
        assert_eq!(script(&th, "app_nil", &Strategy::dind()).unwrap(), expected);
        let s = script(&th, "app_assoc", &Strategy::dind()).unwrap();
        assert!(s.contains("induct xs\nauto\nqed"), "{s}");
    }

    #[test]
    fn dind_fails_on_rev_rev() {
        let th = th();
        assert_eq!(script(&th, "rev_rev", &Strategy::dind()), None);
    }

    #[test]
    fn auto_then_solved_on_reflexive_goal() {
        let mut th = th();
        let f = parse_formula("rev xs = rev xs", &th).unwrap();
        th.goals.push(NamedFormula {
            name: "refl".into(),
            formula: f,
        });
        let s = parse_strategy("Thens [Auto, IsSolved]").unwrap();
        let run = run_strategy(&th, th.goal("refl").unwrap(), &s, &PslConfig::default());
        assert_eq!(run.script.unwrap().steps, vec![ProofStep::Auto, ProofStep::Qed]);
    }

    #[test]
    fn is_solved_and_ors() {
        let th = th();
        let d = Deducer::new(&th, DeductBudgets::default());
        let cfg = PslConfig::default();
        let r = Runner::new(&d, &cfg, 2);
        let open = Node::root(&parse_formula("rev (rev xs) = xs", &th).unwrap());
        assert_eq!(r.apply(&Strategy::IsSolved, open).count(), 0);
        let done = Node {
            goals: Vec::new(),
            steps: Vec::new(),
            depth: 0,
        };
        let s = Strategy::Ors(vec![Strategy::IsSolved, Strategy::Auto]);
        assert_eq!(r.apply(&s, done).next().map(|n| n.steps.len()), Some(0));
    }

    #[test]
    fn node_budget_is_respected() {
        let th = th();
        let cfg = PslConfig {
            max_nodes: 5,
            ..PslConfig::default()
        };
        let s = Strategy::Repeat(Box::new(Strategy::Thens(vec![Strategy::Dynamic(DynamicKind::Induct), Strategy::Auto])), 4);
        let run = run_strategy(&th, th.goal("rev_rev").unwrap(), &s, &cfg);
        assert!(run.nodes <= 5);
    }
}

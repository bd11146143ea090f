//! Rewriting-based deduction: the simplifier, the goal closer and the
//! implication check used when filtering conjectures.
//!
//! Defining equations and proved lemmas rewrite innermost to normal form.
//! Hypotheses (induction hypotheses, inserted conjectures) rewrite in their
//! forward orientation during normalisation; a small breadth-first search
//! over single hypothesis applications in either orientation then tries to
//! close what normalisation leaves open. Schematic hypothesis rules are
//! capped per rule, and every rewrite consumes one unit of the step budget.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::induct::{apply_induction, InductArgs};
use crate::kernel::{
    match_into, substitute, Equation, Formula, Hypothesis, NameSupply, Sequent, Substitution, Sym, Term, Theory, Var,
};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DeductBudgets {
    /// Rewrite steps per simplifier call.
    pub simp_steps: usize,
    /// Loop iterations per `auto` call.
    pub auto_iters: usize,
    /// Applications of one schematic hypothesis rule per simplifier call.
    pub rule_cap: usize,
    /// States explored when trying to close a goal with hypotheses.
    pub close_search: usize,
    /// Allow one level of structural induction in `prove_implication`.
    pub fastforce_induction: bool,
    /// Rewrites producing a larger term are not applied.
    pub max_term_size: usize,
}

impl Default for DeductBudgets {
    fn default() -> Self {
        DeductBudgets {
            simp_steps: 2000,
            auto_iters: 500,
            rule_cap: 3,
            close_search: 64,
            fastforce_induction: true,
            max_term_size: 100,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Origin {
    Definition(Sym, usize),
    Lemma(Sym),
    Hypothesis(usize),
    Premise(usize),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RewriteRule {
    pub lhs: Term,
    pub rhs: Term,
    pub conditions: Vec<Equation>,
    /// `None` means every variable of the rule is schematic.
    pub schematic: Option<BTreeSet<Var>>,
    pub origin: Origin,
    /// Permutative rules fire only when the result is smaller in [`term_order`].
    pub ordered: bool,
}

/// Each side is an instance of the other, as in `add x y = add y x`.
fn is_permutation(a: &Term, b: &Term) -> bool {
    let any = |_: &Var| true;
    match_into(a, b, &mut Substitution::new(), &any) && match_into(b, a, &mut Substitution::new(), &any)
}

/// Total order used for permutative rules: size, then structure.
pub fn term_order(a: &Term, b: &Term) -> std::cmp::Ordering {
    a.size().cmp(&b.size()).then_with(|| a.cmp(b))
}

impl RewriteRule {
    fn is_schematic(&self, v: &Var) -> bool {
        self.schematic.as_ref().map_or(true, |s| s.contains(v))
    }

    fn has_schematic_vars(&self) -> bool {
        self.schematic.as_ref().map_or(true, |s| !s.is_empty())
    }

    /// Orient `eq` as a rule if every schematic variable of the right-hand
    /// side and the conditions is bound by the left-hand side.
    fn oriented(
        lhs: &Term,
        rhs: &Term,
        conditions: &[Equation],
        schematic: Option<&BTreeSet<Var>>,
        origin: Origin,
    ) -> Option<RewriteRule> {
        let is_schem = |v: &Var| schematic.map_or(true, |s| s.contains(v));
        if let Term::Var(v) = lhs {
            if is_schem(v) {
                return None;
            }
        }
        if lhs == rhs {
            return None;
        }
        let bound = lhs.vars();
        let mut needed = rhs.vars();
        for c in conditions {
            c.lhs.collect_vars(&mut needed);
            c.rhs.collect_vars(&mut needed);
        }
        if needed.iter().any(|v| is_schem(v) && !bound.contains(v)) {
            return None;
        }
        let ordered = is_permutation(lhs, rhs);
        Some(RewriteRule {
            lhs: lhs.clone(),
            rhs: rhs.clone(),
            conditions: conditions.to_vec(),
            schematic: schematic.cloned(),
            origin,
            ordered,
        })
    }

    fn describe(&self) -> String {
        match &self.origin {
            Origin::Definition(f, i) => format!("{f}.{}", i + 1),
            Origin::Lemma(n) => n.to_string(),
            Origin::Hypothesis(i) => format!("hyp{i}"),
            Origin::Premise(i) => format!("prem{i}"),
        }
    }
}

/// Names of the rewrite rules applied, in order.
pub type Trace = Vec<String>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DeductOutcome {
    Solved(Trace),
    Progress(Vec<Sequent>, Trace),
    Stuck,
}

impl DeductOutcome {
    pub fn is_solved(&self) -> bool {
        matches!(self, DeductOutcome::Solved(_))
    }
}

/// Rule sets derived from a theory, reusable across many sequents.
pub struct Deducer<'t> {
    theory: &'t Theory,
    budgets: DeductBudgets,
    defs: HashMap<Sym, Vec<RewriteRule>>,
    lemmas: HashMap<Sym, Vec<RewriteRule>>,
}

impl<'t> Deducer<'t> {
    pub fn new(theory: &'t Theory, budgets: DeductBudgets) -> Self {
        let mut defs: HashMap<Sym, Vec<RewriteRule>> = HashMap::new();
        for f in &theory.functions {
            let rules = f
                .equations
                .iter()
                .enumerate()
                .map(|(i, eq)| RewriteRule {
                    lhs: f.lhs(eq),
                    rhs: eq.rhs.clone(),
                    conditions: Vec::new(),
                    schematic: None,
                    origin: Origin::Definition(f.name.clone(), i),
                    ordered: false,
                })
                .collect();
            defs.insert(f.name.clone(), rules);
        }
        let mut lemmas: HashMap<Sym, Vec<RewriteRule>> = HashMap::new();
        for l in &theory.lemmas {
            let c = &l.formula.conclusion;
            let origin = Origin::Lemma(l.name.clone());
            let rule = RewriteRule::oriented(&c.lhs, &c.rhs, &l.formula.premises, None, origin.clone())
                .or_else(|| RewriteRule::oriented(&c.rhs, &c.lhs, &l.formula.premises, None, origin));
            if let Some(rule) = rule {
                let head = rule.lhs.head().cloned().expect("lemma rules have a symbol head");
                lemmas.entry(head).or_default().push(rule);
            }
        }
        Deducer {
            theory,
            budgets,
            defs,
            lemmas,
        }
    }

    pub fn theory(&self) -> &'t Theory {
        self.theory
    }

    pub fn budgets(&self) -> DeductBudgets {
        self.budgets
    }

    /// Exhaustive rewriting of the target, within the step budget.
    pub fn simp(&self, sequent: &Sequent) -> DeductOutcome {
        self.simp_counted(sequent, &mut Vec::new())
    }

    /// `simp` with hypothesis rule use counts carried in from earlier rounds.
    fn simp_counted(&self, sequent: &Sequent, uses: &mut Vec<usize>) -> DeductOutcome {
        let mut sess = Session::new(self, sequent);
        if uses.len() == sess.uses.len() {
            sess.uses.clone_from(uses);
        }
        for h in &sequent.hyps {
            if h.formula.premises.is_empty() {
                let l = sess.norm(&h.formula.conclusion.lhs, false);
                let r = sess.norm(&h.formula.conclusion.rhs, false);
                if self.theory.is_clash(&Equation::new(l, r)) {
                    sess.trace.push("clash".into());
                    return DeductOutcome::Solved(sess.trace);
                }
            }
        }
        let mut premises = Vec::new();
        for p in &sequent.target.premises {
            let e = Equation::new(sess.norm(&p.lhs, true), sess.norm(&p.rhs, true));
            if e.is_reflexive() || premises.contains(&e) {
                continue;
            }
            if self.theory.is_clash(&e) {
                sess.trace.push("clash".into());
                return DeductOutcome::Solved(sess.trace);
            }
            premises.push(e);
        }
        sess.set_premises(&premises);
        let concl = &sequent.target.conclusion;
        let l = sess.norm(&concl.lhs, true);
        let r = sess.norm(&concl.rhs, true);
        if l == r || sess.close(&l, &r) {
            return DeductOutcome::Solved(sess.trace);
        }
        let target = Formula::new(premises, Equation::new(l, r));
        uses.clone_from(&sess.uses);
        if target == sequent.target {
            DeductOutcome::Stuck
        } else {
            DeductOutcome::Progress(
                vec![Sequent {
                    fixed: sequent.fixed.clone(),
                    hyps: sequent.hyps.clone(),
                    target,
                }],
                sess.trace,
            )
        }
    }

    /// Fixpoint of simplification, constructor reasoning and hypothesis
    /// instantiation. Residual sequents are returned left to right.
    pub fn auto(&self, sequent: &Sequent) -> DeductOutcome {
        let mut iters = self.budgets.auto_iters;
        let mut trace = Vec::new();
        let residual = self.auto_rec(sequent.clone(), &mut iters, &mut trace);
        if residual.is_empty() {
            DeductOutcome::Solved(trace)
        } else if residual.len() == 1 && residual[0] == *sequent {
            DeductOutcome::Stuck
        } else {
            DeductOutcome::Progress(residual, trace)
        }
    }

    fn auto_rec(&self, mut s: Sequent, iters: &mut usize, trace: &mut Trace) -> Vec<Sequent> {
        let mut uses = Vec::new();
        loop {
            if *iters == 0 {
                return vec![s];
            }
            *iters -= 1;
            match self.simp_counted(&s, &mut uses) {
                DeductOutcome::Solved(t) => {
                    trace.extend(t);
                    return Vec::new();
                }
                DeductOutcome::Progress(mut r, t) => {
                    let next = r.remove(0);
                    if next.size() > 2 * self.budgets.max_term_size {
                        return vec![s];
                    }
                    trace.extend(t);
                    s = next;
                    continue;
                }
                DeductOutcome::Stuck => {}
            }
            if self.closes_by_hypothesis(&s) {
                trace.push("hyp-inst".into());
                return Vec::new();
            }
            if let Some(next) = self.split_premises(&s) {
                trace.push("inject-premise".into());
                s = next;
                continue;
            }
            let c = &s.target.conclusion;
            if let (Term::App(f, xs), Term::App(g, ys)) = (&c.lhs, &c.rhs) {
                if f == g && self.theory.is_ctor(f) {
                    trace.push("inject".into());
                    let mut out = Vec::new();
                    for (a, b) in xs.iter().zip(ys) {
                        if a == b {
                            continue;
                        }
                        let sub = Sequent {
                            fixed: s.fixed.clone(),
                            hyps: s.hyps.clone(),
                            target: Formula::new(s.target.premises.clone(), Equation::new(a.clone(), b.clone())),
                        };
                        out.extend(self.auto_rec(sub, iters, trace));
                    }
                    return out;
                }
            }
            return vec![s];
        }
    }

    /// Replace a premise `C(a..) = C(b..)` by the argument equations.
    fn split_premises(&self, s: &Sequent) -> Option<Sequent> {
        let idx = s.target.premises.iter().position(|p| match (&p.lhs, &p.rhs) {
            (Term::App(f, _), Term::App(g, _)) => f == g && self.theory.is_ctor(f),
            _ => false,
        })?;
        let mut premises = s.target.premises.clone();
        let p = premises.remove(idx);
        for (a, b) in p.lhs.args().iter().zip(p.rhs.args()).rev() {
            if a != b {
                premises.insert(idx, Equation::new(a.clone(), b.clone()));
            }
        }
        Some(Sequent {
            fixed: s.fixed.clone(),
            hyps: s.hyps.clone(),
            target: Formula::new(premises, s.target.conclusion.clone()),
        })
    }

    /// A hypothesis whose conclusion matches the goal, with premises that
    /// simplify to true, closes the goal.
    fn closes_by_hypothesis(&self, s: &Sequent) -> bool {
        let goal = &s.target.conclusion;
        for h in &s.hyps {
            let bindable = |v: &Var| h.schematic.contains(v);
            for concl in [h.formula.conclusion.clone(), h.formula.conclusion.flipped()] {
                let mut sub = Substitution::new();
                if !(match_into(&concl.lhs, &goal.lhs, &mut sub, &bindable)
                    && match_into(&concl.rhs, &goal.rhs, &mut sub, &bindable))
                {
                    continue;
                }
                let instantiated: Vec<Equation> = h.formula.premises.iter().map(|p| p.map(|t| substitute(t, &sub))).collect();
                let unbound = instantiated
                    .iter()
                    .flat_map(|e| e.lhs.vars().into_iter().chain(e.rhs.vars()))
                    .any(|v| h.schematic.contains(&v));
                if unbound {
                    continue;
                }
                let mut sess = Session::new(self, s);
                sess.set_premises(&s.target.premises);
                if instantiated.iter().all(|p| sess.holds(p)) {
                    return true;
                }
            }
        }
        false
    }

    /// Does the sequent follow once `conjecture` is available as a schematic
    /// rule? Optionally retries after one structural induction.
    pub fn prove_implication(&self, conjecture: &Formula, sequent: &Sequent) -> bool {
        let with = with_conjecture(self.theory, sequent, conjecture);
        if self.auto(&with).is_solved() {
            return true;
        }
        if !self.budgets.fastforce_induction {
            return false;
        }
        for v in with.target.vars() {
            if self.theory.datatype(&v.ty).is_none() {
                continue;
            }
            let args = InductArgs {
                on: vec![v.name.clone()],
                arbitrary: Vec::new(),
                rule: None,
            };
            if let Ok(cases) = apply_induction(&with, &args, self.theory) {
                if cases.iter().all(|c| self.auto(c).is_solved()) {
                    return true;
                }
            }
        }
        false
    }
}

/// The sequent extended with `conjecture` as a hypothesis whose variables
/// are all schematic, renamed apart from the sequent's names.
pub fn with_conjecture(theory: &Theory, sequent: &Sequent, conjecture: &Formula) -> Sequent {
    let mut supply = NameSupply::new(theory);
    supply.reserve_all(sequent.names_in_use().iter());
    let renaming: Substitution = conjecture
        .vars()
        .into_iter()
        .map(|v| {
            let f = supply.fresh(&v.name, &v.ty);
            (v, Term::Var(f))
        })
        .collect();
    let mut out = sequent.clone();
    out.hyps.push(Hypothesis::closed(conjecture.substitute(&renaming)));
    out
}

struct Slot {
    rule: RewriteRule,
    hyp: usize,
    forward: bool,
}

/// State of one simplifier call.
struct Session<'d, 't> {
    d: &'d Deducer<'t>,
    budget: usize,
    slots: Vec<Slot>,
    uses: Vec<usize>,
    premise_rules: Vec<RewriteRule>,
    premises: Vec<Equation>,
    cond_depth: usize,
    trace: Trace,
}

impl<'d, 't> Session<'d, 't> {
    fn new(d: &'d Deducer<'t>, s: &Sequent) -> Self {
        let mut slots = Vec::new();
        for (i, h) in s.hyps.iter().enumerate() {
            let c = &h.formula.conclusion;
            if c.is_reflexive() {
                continue;
            }
            let fwd = RewriteRule::oriented(&c.lhs, &c.rhs, &h.formula.premises, Some(&h.schematic), Origin::Hypothesis(i));
            let bwd = RewriteRule::oriented(&c.rhs, &c.lhs, &h.formula.premises, Some(&h.schematic), Origin::Hypothesis(i));
            let has_fwd = fwd.is_some();
            if let Some(rule) = fwd {
                slots.push(Slot { rule, hyp: i, forward: true });
            }
            if let Some(rule) = bwd {
                slots.push(Slot { rule, hyp: i, forward: !has_fwd });
            }
        }
        let uses = vec![0; slots.len()];
        Session {
            d,
            budget: d.budgets.simp_steps,
            slots,
            uses,
            premise_rules: Vec::new(),
            premises: Vec::new(),
            cond_depth: 0,
            trace: Vec::new(),
        }
    }

    fn set_premises(&mut self, premises: &[Equation]) {
        self.premises = premises.to_vec();
        self.premise_rules = premises
            .iter()
            .enumerate()
            .filter_map(|(i, p)| {
                let (l, r) = orient_ground(p);
                (!r.contains(l)).then(|| RewriteRule {
                    lhs: l.clone(),
                    rhs: r.clone(),
                    conditions: Vec::new(),
                    schematic: Some(BTreeSet::new()),
                    origin: Origin::Premise(i),
                    ordered: false,
                })
            })
            .collect();
    }

    fn norm(&mut self, t: &Term, use_hyps: bool) -> Term {
        let t = match t {
            Term::App(h, args) => Term::App(h.clone(), args.iter().map(|a| self.norm(a, use_hyps)).collect()),
            Term::Var(_) => t.clone(),
        };
        self.reduce_root(t, use_hyps)
    }

    fn reduce_root(&mut self, mut t: Term, use_hyps: bool) -> Term {
        let mut seen: Vec<Term> = Vec::new();
        loop {
            if self.budget == 0 {
                return t;
            }
            let Some(u) = self.step_root(&t, use_hyps) else {
                return t;
            };
            if u.size() > self.d.budgets.max_term_size {
                return t;
            }
            self.budget -= 1;
            if u == t || seen.contains(&u) {
                return t;
            }
            seen.push(t);
            t = self.norm(&u, use_hyps);
        }
    }

    fn try_rule(&mut self, rule: &RewriteRule, t: &Term) -> Option<Term> {
        let mut sub = Substitution::new();
        if !match_into(&rule.lhs, t, &mut sub, &|v| rule.is_schematic(v)) {
            return None;
        }
        if !rule.conditions.is_empty() {
            let conds: Vec<Equation> = rule.conditions.iter().map(|c| c.map(|x| substitute(x, &sub))).collect();
            if !conds.iter().all(|c| self.holds(c)) {
                return None;
            }
        }
        let u = substitute(&rule.rhs, &sub);
        if rule.ordered && term_order(&u, t) != std::cmp::Ordering::Less {
            return None;
        }
        Some(u)
    }

    fn step_root(&mut self, t: &Term, use_hyps: bool) -> Option<Term> {
        let d = self.d;
        if let Term::App(h, _) = t {
            if let Some(rules) = d.defs.get(h) {
                for r in rules {
                    if let Some(u) = self.try_rule(r, t) {
                        self.trace.push(r.describe());
                        return Some(u);
                    }
                }
            }
            if let Some(rules) = d.lemmas.get(h) {
                for r in rules {
                    if let Some(u) = self.try_rule(r, t) {
                        self.trace.push(r.describe());
                        return Some(u);
                    }
                }
            }
        }
        for i in 0..self.premise_rules.len() {
            if self.premise_rules[i].lhs == *t {
                self.trace.push(self.premise_rules[i].describe());
                return Some(self.premise_rules[i].rhs.clone());
            }
        }
        if use_hyps {
            for i in 0..self.slots.len() {
                if !self.slots[i].forward {
                    continue;
                }
                let capped = self.slots[i].rule.has_schematic_vars();
                if capped && self.uses[i] >= d.budgets.rule_cap {
                    continue;
                }
                let rule = self.slots[i].rule.clone();
                if !capped && rule.rhs.contains(&rule.lhs) {
                    continue;
                }
                if let Some(u) = self.try_rule(&rule, t) {
                    self.uses[i] += 1;
                    self.trace.push(rule.describe());
                    return Some(u);
                }
            }
        }
        None
    }

    /// A condition holds if it is a premise or both sides normalise to the
    /// same term.
    fn holds(&mut self, c: &Equation) -> bool {
        if c.is_reflexive() || self.premises.contains(c) || self.premises.contains(&c.flipped()) {
            return true;
        }
        if self.cond_depth >= 2 {
            return false;
        }
        self.cond_depth += 1;
        let l = self.norm(&c.lhs, false);
        let r = self.norm(&c.rhs, false);
        self.cond_depth -= 1;
        l == r
    }

    /// Breadth-first search over single hypothesis applications, in either
    /// orientation, for a path that makes both sides equal.
    fn close(&mut self, l: &Term, r: &Term) -> bool {
        if self.slots.is_empty() {
            return false;
        }
        let cap = self.d.budgets.rule_cap;
        let mut visited: HashSet<(Term, Term)> = HashSet::new();
        visited.insert((l.clone(), r.clone()));
        let mut queue = VecDeque::new();
        queue.push_back((l.clone(), r.clone(), vec![0usize; self.slots.len()]));
        let mut expanded = 0;
        while let Some((l, r, counts)) = queue.pop_front() {
            if expanded >= self.d.budgets.close_search || self.budget == 0 {
                return false;
            }
            expanded += 1;
            for i in 0..self.slots.len() {
                if counts[i] >= cap {
                    continue;
                }
                let rule = self.slots[i].rule.clone();
                for side in 0..2 {
                    let term = if side == 0 { &l } else { &r };
                    for pos in term.positions() {
                        let sub = term.at(&pos).expect("valid position");
                        let Some(u) = self.try_rule(&rule, sub) else { continue };
                        if self.budget == 0 {
                            return false;
                        }
                        self.budget -= 1;
                        let rewritten = term.replace_at(&pos, u);
                        let rewritten = self.norm(&rewritten, false);
                        let (nl, nr) = if side == 0 { (rewritten, r.clone()) } else { (l.clone(), rewritten) };
                        if nl == nr {
                            self.trace.push(format!("{}{}", rule.describe(), if self.slots[i].forward { "" } else { "<-" }));
                            let _ = self.slots[i].hyp;
                            return true;
                        }
                        if visited.insert((nl.clone(), nr.clone())) {
                            let mut c = counts.clone();
                            c[i] += 1;
                            queue.push_back((nl, nr, c));
                        }
                    }
                }
            }
        }
        false
    }
}

/// Orientation of a ground premise used as a rewrite rule: eliminate a
/// variable if possible, otherwise rewrite the larger side to the smaller.
fn orient_ground(p: &Equation) -> (&Term, &Term) {
    match (&p.lhs, &p.rhs) {
        (Term::Var(_), r) if !r.contains(&p.lhs) => (&p.lhs, &p.rhs),
        (l, Term::Var(_)) if !l.contains(&p.rhs) => (&p.rhs, &p.lhs),
        (l, r) if r.size() > l.size() => (&p.rhs, &p.lhs),
        _ => (&p.lhs, &p.rhs),
    }
}

pub fn simp(theory: &Theory, sequent: &Sequent, budgets: DeductBudgets) -> DeductOutcome {
    Deducer::new(theory, budgets).simp(sequent)
}

pub fn auto(theory: &Theory, sequent: &Sequent, budgets: DeductBudgets) -> DeductOutcome {
    Deducer::new(theory, budgets).auto(sequent)
}

pub fn prove_implication(theory: &Theory, conjecture: &Formula, sequent: &Sequent, budgets: DeductBudgets) -> bool {
    Deducer::new(theory, budgets).prove_implication(conjecture, sequent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::induct::apply_induction;
    use crate::syntax::{parse_formula, parse_theory, print_formula};

    const LISTREV: &str = include_str!("../tests/data/listrev.thy");

    fn th() -> Theory {
        parse_theory(LISTREV).unwrap()
    }

    fn root(th: &Theory, s: &str) -> Sequent {
        Sequent::root(&parse_formula(s, th).unwrap())
    }

    fn b() -> DeductBudgets {
        DeductBudgets::default()
    }

    fn rev_rev_step(th: &Theory) -> Sequent {
        let s = root(th, "rev (rev xs) = xs");
        apply_induction(&s, &InductArgs::on(&["xs"]), th).unwrap().remove(1)
    }

    #[test]
    fn permutative_lemma_rewrites_towards_smaller_term() {
        let src = format!("{LISTREV}\nlemma add_comm: add x y = add y x\n");
        let th = parse_theory(&src).unwrap();
        let s = root(&th, "add (len ys) (len xs) = add (len xs) (len ys)");
        assert!(simp(&th, &s, b()).is_solved());
        assert!(is_permutation(&th.lemmas[0].formula.conclusion.lhs, &th.lemmas[0].formula.conclusion.rhs));
        let assoc = parse_formula("app (app xs ys) zs = app xs (app ys zs)", &th).unwrap();
        assert!(!is_permutation(&assoc.conclusion.lhs, &assoc.conclusion.rhs));
    }

    #[test]
    fn growing_hypothesis_is_capped_across_auto_rounds() {
        let th = th();
        let s = root(&th, "app (rev xs) (Cons y zs) = rev xs");
        let c = parse_formula("app xs (Cons x ys) = app (app xs (Cons x Nil)) ys", &th).unwrap();
        let with = with_conjecture(&th, &s, &c);
        match auto(&th, &with, b()) {
            DeductOutcome::Progress(r, _) => assert!(r[0].size() <= 2 * b().max_term_size),
            DeductOutcome::Stuck => {}
            DeductOutcome::Solved(_) => panic!("false goal solved"),
        }
    }

    #[test]
    fn simp_closes_by_definition() {
        let th = th();
        assert!(simp(&th, &root(&th, "app Nil ys = ys"), b()).is_solved());
    }

    #[test]
    fn simp_closes_on_contradictory_hypothesis() {
        let th = th();
        let mut s = root(&th, "rev xs = xs");
        s.hyps.push(Hypothesis::fixed(parse_formula("Zero = Suc Zero", &th).unwrap()));
        assert!(simp(&th, &s, b()).is_solved());
    }

    #[test]
    fn simp_stuck_on_rev_rev() {
        let th = th();
        assert_eq!(simp(&th, &root(&th, "rev (rev xs) = xs"), b()), DeductOutcome::Stuck);
    }

    #[test]
    fn simp_reports_progress() {
        let th = th();
        match simp(&th, &root(&th, "app (Cons x Nil) ys = ys"), b()) {
            DeductOutcome::Progress(r, _) => assert_eq!(print_formula(&r[0].target), "Cons x ys = ys"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn auto_injectivity() {
        let th = th();
        match auto(&th, &root(&th, "Suc x = Suc y"), b()) {
            DeductOutcome::Progress(r, _) => {
                assert_eq!(r.len(), 1);
                assert_eq!(print_formula(&r[0].target), "(x :: nat) = y");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn auto_uses_schematic_hypothesis() {
        let th = th();
        let mut s = root(&th, "itrev xs (Cons a ys) = app (rev xs) (Cons a ys)");
        let ih = parse_formula("itrev xs zs = app (rev xs) zs", &th).unwrap();
        let zs = ih.vars().into_iter().find(|v| &*v.name == "zs").unwrap();
        s.hyps.push(Hypothesis {
            formula: ih,
            schematic: [zs].into_iter().collect(),
        });
        assert!(auto(&th, &s, b()).is_solved());
    }

    #[test]
    fn auto_stuck_on_rev_rev_step() {
        let th = th();
        let s = rev_rev_step(&th);
        // Simplification makes progress once, then nothing applies.
        let next = match auto(&th, &s, b()) {
            DeductOutcome::Progress(r, _) => r,
            other => panic!("{other:?}"),
        };
        assert_eq!(next.len(), 1);
        assert_eq!(print_formula(&next[0].target), "rev (app (rev xs1) (Cons n Nil)) = Cons n xs1");
        assert_eq!(auto(&th, &next[0], b()), DeductOutcome::Stuck);
    }

    #[test]
    fn implication_with_valuable_conjecture() {
        let th = th();
        let s = rev_rev_step(&th);
        let c = parse_formula("rev (app ys (Cons x Nil)) = Cons x (rev ys)", &th).unwrap();
        assert!(prove_implication(&th, &c, &s, b()));
    }

    #[test]
    fn implication_with_useless_conjecture() {
        let th = th();
        let s = rev_rev_step(&th);
        let c = parse_formula("rev xs = xs", &th).unwrap();
        assert!(!prove_implication(&th, &c, &s, b()));
    }

    #[test]
    fn implication_with_own_target() {
        let th = th();
        let s = rev_rev_step(&th);
        assert!(prove_implication(&th, &s.target.clone(), &s, b()));
    }

    #[test]
    fn implication_needs_bounded_induction() {
        let th = th();
        let s = root(&th, "itrev xs Nil = rev xs");
        let c = parse_formula("itrev xs ys = app (rev xs) ys", &th).unwrap();
        let no_ind = DeductBudgets { fastforce_induction: false, ..b() };
        assert!(!prove_implication(&th, &c, &s, no_ind));
        assert!(prove_implication(&th, &c, &s, b()));
    }

    #[test]
    fn premises_are_used() {
        let th = th();
        assert!(auto(&th, &root(&th, "x = Zero ==> add x y = y"), b()).is_solved());
        assert!(auto(&th, &root(&th, "Suc x = Zero ==> rev xs = xs"), b()).is_solved());
        assert!(auto(&th, &root(&th, "Suc x = Suc Zero ==> add x y = y"), b()).is_solved());
    }

    #[test]
    fn looping_rules_terminate() {
        let mut th = th();
        th.add_lemma("comm", parse_formula("add x y = add y x", &th).unwrap());
        let s = root(&th, "add a b = add b a");
        let out = auto(&th, &s, b());
        assert!(matches!(out, DeductOutcome::Solved(_) | DeductOutcome::Stuck | DeductOutcome::Progress(..)));
    }
}

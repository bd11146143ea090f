//! Ground evaluation, size-ordered enumeration of constructor terms and the
//! exhaustive small-scope counterexample finder.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use crate::kernel::{match_into, substitute, Formula, Substitution, Term, Theory, Type, Var};
use crate::syntax::print_term;

pub const DEFAULT_MAX_SIZE: usize = 8;
pub const DEFAULT_FUEL: usize = 10_000;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EvalResult {
    Value(Term),
    OutOfFuel,
}

/// Call-by-value evaluation of a ground term. Every defining-equation
/// application consumes one unit of fuel.
pub fn eval(theory: &Theory, term: &Term, fuel: usize) -> EvalResult {
    let mut ev = Evaluator { theory, fuel };
    match ev.eval(term) {
        Some(v) => EvalResult::Value(v),
        None => EvalResult::OutOfFuel,
    }
}

struct Evaluator<'t> {
    theory: &'t Theory,
    fuel: usize,
}

impl Evaluator<'_> {
    fn eval(&mut self, term: &Term) -> Option<Term> {
        let mut cur = term.clone();
        loop {
            let Term::App(head, args) = &cur else {
                debug_assert!(false, "eval on non-ground term");
                return None;
            };
            let vals = args.iter().map(|a| self.eval(a)).collect::<Option<Vec<_>>>()?;
            let Some(f) = self.theory.function(head) else {
                return Some(Term::App(head.clone(), vals));
            };
            let mut subst = Substitution::new();
            let eq = f.equations.iter().find(|eq| {
                subst = Substitution::new();
                eq.patterns
                    .iter()
                    .zip(&vals)
                    .all(|(p, v)| match_into(p, v, &mut subst, &|_| true))
            })?;
            if self.fuel == 0 {
                return None;
            }
            self.fuel -= 1;
            // Tail position: keep looping instead of recursing.
            cur = substitute(&eq.rhs, &subst);
        }
    }
}

/// Memoised enumeration of ground constructor terms by exact size.
pub struct Enumerator<'t> {
    theory: &'t Theory,
    memo: HashMap<(Type, usize), Rc<Vec<Term>>>,
}

impl<'t> Enumerator<'t> {
    pub fn new(theory: &'t Theory) -> Self {
        Enumerator { theory, memo: HashMap::new() }
    }

    /// All constructor terms of `ty` with exactly `size` nodes, ordered by
    /// constructor declaration order, then argument-wise (size first).
    pub fn of_size(&mut self, ty: &Type, size: usize) -> Rc<Vec<Term>> {
        if let Some(v) = self.memo.get(&(ty.clone(), size)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if size >= 1 {
            if let Some(dt) = self.theory.datatype(ty) {
                for c in &dt.ctors {
                    let mut acc = Vec::new();
                    self.fill_args(&c.args, size - 1, &mut acc, &mut |args| {
                        out.push(Term::App(c.name.clone(), args.to_vec()));
                    });
                }
            }
        }
        let out = Rc::new(out);
        self.memo.insert((ty.clone(), size), out.clone());
        out
    }

    fn fill_args(&mut self, tys: &[Type], budget: usize, acc: &mut Vec<Term>, emit: &mut dyn FnMut(&[Term])) {
        match tys.split_first() {
            None => {
                if budget == 0 {
                    emit(acc);
                }
            }
            Some((ty, rest)) => {
                if budget < tys.len() {
                    return;
                }
                let max_here = budget - rest.len();
                for s in 1..=max_here {
                    let terms = self.of_size(ty, s);
                    for t in terms.iter() {
                        acc.push(t.clone());
                        self.fill_args(rest, budget - s, acc, emit);
                        acc.pop();
                    }
                }
            }
        }
    }

    pub fn up_to(&mut self, ty: &Type, max_size: usize) -> Vec<Term> {
        (1..=max_size).flat_map(|s| self.of_size(ty, s).as_ref().clone()).collect()
    }
}

pub fn enumerate_terms(theory: &Theory, ty: &Type, max_size: usize) -> Vec<Term> {
    Enumerator::new(theory).up_to(ty, max_size)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Counterexample {
    pub assignment: Vec<(Var, Term)>,
}

impl Counterexample {
    pub fn substitution(&self) -> Substitution {
        self.assignment.iter().cloned().collect()
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.assignment.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self
            .assignment
            .iter()
            .map(|(v, t)| format!("{} = {}", v.name, print_term(t)))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Outcome {
    Holds,
    Falsified,
    Unknown,
}

/// Evaluates a formula under a ground substitution.
fn check_instance(theory: &Theory, f: &Formula, s: &Substitution, fuel: usize) -> Outcome {
    let value = |t: &Term| match eval(theory, &substitute(t, s), fuel) {
        EvalResult::Value(v) => Some(v),
        EvalResult::OutOfFuel => None,
    };
    for p in &f.premises {
        match (value(&p.lhs), value(&p.rhs)) {
            (Some(a), Some(b)) if a == b => {}
            (Some(_), Some(_)) => return Outcome::Holds,
            _ => return Outcome::Unknown,
        }
    }
    match (value(&f.conclusion.lhs), value(&f.conclusion.rhs)) {
        (Some(a), Some(b)) if a == b => Outcome::Holds,
        (Some(_), Some(_)) => Outcome::Falsified,
        _ => Outcome::Unknown,
    }
}

/// True when the assignment falsifies the formula (premises hold, conclusion
/// sides differ). Independent re-check used by callers and tests.
pub fn falsifies(theory: &Theory, f: &Formula, cex: &Counterexample, fuel: usize) -> bool {
    check_instance(theory, f, &cex.substitution(), fuel) == Outcome::Falsified
}

/// Exhaustive search for a falsifying assignment. Variables are ordered by
/// first occurrence; assignments by total size, then lexicographically.
/// `max_size` bounds the total size of an assignment.
pub fn find_counterexample(theory: &Theory, f: &Formula, max_size: usize, fuel: usize) -> Option<Counterexample> {
    let vars = f.vars();
    let mut en = Enumerator::new(theory);
    if vars.is_empty() {
        let cex = Counterexample { assignment: Vec::new() };
        return (check_instance(theory, f, &Substitution::new(), fuel) == Outcome::Falsified).then_some(cex);
    }
    let mut found = None;
    for total in vars.len()..=max_size {
        let mut chosen = Vec::with_capacity(vars.len());
        search(theory, f, &vars, &mut en, total, fuel, &mut chosen, &mut found);
        if found.is_some() {
            break;
        }
    }
    found
}

#[allow(clippy::too_many_arguments)]
fn search(
    theory: &Theory,
    f: &Formula,
    vars: &[Var],
    en: &mut Enumerator,
    budget: usize,
    fuel: usize,
    chosen: &mut Vec<(Var, Term)>,
    found: &mut Option<Counterexample>,
) {
    if found.is_some() {
        return;
    }
    let i = chosen.len();
    if i == vars.len() {
        if budget == 0 {
            let s: Substitution = chosen.iter().cloned().collect();
            if check_instance(theory, f, &s, fuel) == Outcome::Falsified {
                *found = Some(Counterexample { assignment: chosen.clone() });
            }
        }
        return;
    }
    let remaining = vars.len() - i - 1;
    if budget < remaining + 1 {
        return;
    }
    let max_here = if remaining == 0 { budget } else { budget - remaining };
    let lo = if remaining == 0 { budget } else { 1 };
    for s in lo..=max_here {
        let terms = en.of_size(&vars[i].ty, s);
        for t in terms.iter() {
            chosen.push((vars[i].clone(), t.clone()));
            search(theory, f, vars, en, budget - s, fuel, chosen, found);
            chosen.pop();
            if found.is_some() {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_term, parse_theory};

    const LISTREV: &str = include_str!("../tests/data/listrev.thy");

    fn th() -> Theory {
        parse_theory(LISTREV).unwrap()
    }

    fn t(th: &Theory, s: &str) -> Term {
        parse_term(s, th).unwrap()
    }

    #[test]
    fn eval_examples() {
        let th = th();
        assert_eq!(
            eval(&th, &t(&th, "add (Suc Zero) (Suc Zero)"), DEFAULT_FUEL),
            EvalResult::Value(t(&th, "Suc (Suc Zero)"))
        );
        assert_eq!(
            eval(&th, &t(&th, "rev (Cons Zero (Cons (Suc Zero) Nil))"), DEFAULT_FUEL),
            EvalResult::Value(t(&th, "Cons (Suc Zero) (Cons Zero Nil)"))
        );
        assert_eq!(eval(&th, &t(&th, "add Zero Zero"), 0), EvalResult::OutOfFuel);
    }

    #[test]
    fn constructor_terms_need_no_fuel() {
        let th = th();
        let v = t(&th, "Cons Zero Nil");
        assert_eq!(eval(&th, &v, 0), EvalResult::Value(v));
    }

    #[test]
    fn enumeration_examples() {
        let th = th();
        let nat = Type::new("nat");
        let list = Type::new("list");
        assert_eq!(
            enumerate_terms(&th, &nat, 3),
            vec![t(&th, "Zero"), t(&th, "Suc Zero"), t(&th, "Suc (Suc Zero)")]
        );
        assert_eq!(enumerate_terms(&th, &list, 3), vec![t(&th, "Nil"), t(&th, "Cons Zero Nil")]);
        assert_eq!(enumerate_terms(&th, &nat, 1), vec![t(&th, "Zero")]);
    }

    #[test]
    fn counterexample_examples() {
        let th = th();
        let f = parse_formula("rev xs = xs", &th).unwrap();
        let cex = find_counterexample(&th, &f, DEFAULT_MAX_SIZE, DEFAULT_FUEL).unwrap();
        assert_eq!(cex.assignment.len(), 1);
        assert_eq!(cex.assignment[0].1, t(&th, "Cons Zero (Cons (Suc Zero) Nil)"));
        assert!(falsifies(&th, &f, &cex, DEFAULT_FUEL));

        let f = parse_formula("app xs Nil = xs", &th).unwrap();
        assert_eq!(find_counterexample(&th, &f, 6, DEFAULT_FUEL), None);

        let f = parse_formula("Zero = Suc Zero", &th).unwrap();
        let cex = find_counterexample(&th, &f, DEFAULT_MAX_SIZE, DEFAULT_FUEL).unwrap();
        assert!(cex.assignment.is_empty());
    }

    #[test]
    fn premises_must_hold() {
        let th = th();
        let f = parse_formula("add x y = Zero ==> x = Zero", &th).unwrap();
        assert_eq!(find_counterexample(&th, &f, DEFAULT_MAX_SIZE, DEFAULT_FUEL), None);
        let f = parse_formula("add x y = Suc Zero ==> x = Zero", &th).unwrap();
        let cex = find_counterexample(&th, &f, DEFAULT_MAX_SIZE, DEFAULT_FUEL).unwrap();
        assert_eq!(cex.to_string(), "{x = Suc Zero, y = Zero}");
    }

    #[test]
    fn out_of_fuel_assignments_are_skipped() {
        let src = "theory loop\ndatatype nat = Zero | Suc nat\nfun f :: nat -> nat\n  f Zero = Zero\n  f (Suc x) = f (Suc (Suc x))\ngoal g: f x = Zero\n";
        let th = parse_theory(src).unwrap();
        let g = th.goal("g").unwrap().formula.clone();
        assert_eq!(find_counterexample(&th, &g, 6, 200), None);
    }
}

//! Independent reference implementations used as test oracles: a
//! brute-force value enumerator, a naive interpreter and an exhaustive
//! counterexample search with its own ordering key.

#![allow(dead_code)]

pub mod gen;

use std::cmp::Ordering;

use united::kernel::{Formula, Sym, Term, Theory, Type, Var};

/// Every constructor term of `ty` with at most `max` nodes, in no
/// particular order.
pub fn values(th: &Theory, ty: &Type, max: usize) -> Vec<Term> {
    if max == 0 {
        return Vec::new();
    }
    let Some(dt) = th.datatype(ty) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for c in &dt.ctors {
        let mut partial: Vec<Vec<Term>> = vec![Vec::new()];
        for aty in &c.args {
            let mut next = Vec::new();
            for p in &partial {
                let used: usize = 1 + p.iter().map(Term::size).sum::<usize>();
                if used >= max {
                    continue;
                }
                for v in values(th, aty, max - used) {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
            partial = next;
        }
        for args in partial {
            let t = Term::App(c.name.clone(), args);
            if t.size() <= max {
                out.push(t);
            }
        }
    }
    out
}

fn bind(pat: &Term, val: &Term, env: &mut Vec<(Sym, Term)>) -> bool {
    match pat {
        Term::Var(v) => match env.iter().find(|(n, _)| *n == v.name) {
            Some((_, t)) => t == val,
            None => {
                env.push((v.name.clone(), val.clone()));
                true
            }
        },
        Term::App(c, ps) => match val {
            Term::App(d, vs) if c == d && ps.len() == vs.len() => ps.iter().zip(vs).all(|(p, v)| bind(p, v, env)),
            _ => false,
        },
    }
}

fn plug(t: &Term, env: &[(Sym, Term)]) -> Term {
    match t {
        Term::Var(v) => env
            .iter()
            .find(|(n, _)| *n == v.name)
            .map(|(_, x)| x.clone())
            .unwrap_or_else(|| t.clone()),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| plug(a, env)).collect()),
    }
}

/// Innermost evaluation of a ground term; `None` when fuel runs out or no
/// equation applies.
pub fn eval(th: &Theory, t: &Term, fuel: &mut usize) -> Option<Term> {
    let Term::App(f, args) = t else { return None };
    let mut vals = Vec::with_capacity(args.len());
    for a in args {
        vals.push(eval(th, a, fuel)?);
    }
    if th.is_ctor(f) {
        return Some(Term::App(f.clone(), vals));
    }
    let def = th.function(f)?;
    for eq in &def.equations {
        let mut env = Vec::new();
        if eq.patterns.iter().zip(&vals).all(|(p, v)| bind(p, v, &mut env)) {
            if *fuel == 0 {
                return None;
            }
            *fuel -= 1;
            return eval(th, &plug(&eq.rhs, &env), fuel);
        }
    }
    None
}

/// Variables by first occurrence: premises left to right, then the
/// conclusion, each side in pre-order.
pub fn vars_in_order(f: &Formula) -> Vec<Var> {
    fn walk(t: &Term, out: &mut Vec<Var>) {
        match t {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| walk(a, out)),
        }
    }
    let mut out = Vec::new();
    for e in f.premises.iter().chain(std::iter::once(&f.conclusion)) {
        walk(&e.lhs, &mut out);
        walk(&e.rhs, &mut out);
    }
    out
}

/// `Some(true)` if the instance holds, `Some(false)` if it is falsified and
/// `None` if evaluation did not finish.
pub fn instance_holds(th: &Theory, f: &Formula, assignment: &[(Var, Term)], fuel: usize) -> Option<bool> {
    let env: Vec<(Sym, Term)> = assignment.iter().map(|(v, t)| (v.name.clone(), t.clone())).collect();
    let mut fuel = fuel;
    for p in &f.premises {
        let l = eval(th, &plug(&p.lhs, &env), &mut fuel)?;
        let r = eval(th, &plug(&p.rhs, &env), &mut fuel)?;
        if l != r {
            return Some(true);
        }
    }
    let l = eval(th, &plug(&f.conclusion.lhs, &env), &mut fuel)?;
    let r = eval(th, &plug(&f.conclusion.rhs, &env), &mut fuel)?;
    Some(l == r)
}

/// Ordering key of a value: size, constructor declaration index, then the
/// keys of the arguments. Keys form a prefix code, so comparing the
/// flattened vectors lexicographically compares the tuples.
pub fn key(th: &Theory, t: &Term) -> Vec<usize> {
    let Term::App(c, args) = t else { return vec![usize::MAX] };
    let ty = th.type_of(t).expect("typed value");
    let idx = th.datatype(&ty).and_then(|d| d.ctor(c)).map(|(i, _)| i).expect("constructor");
    let mut k = vec![t.size(), idx];
    for a in args {
        k.extend(key(th, a));
    }
    k
}

fn assignments(th: &Theory, vars: &[Var], max_total: usize) -> Vec<Vec<(Var, Term)>> {
    let mut out: Vec<Vec<(Var, Term)>> = vec![Vec::new()];
    for (i, v) in vars.iter().enumerate() {
        let reserve = vars.len() - i - 1;
        let mut next = Vec::new();
        for a in &out {
            let used: usize = a.iter().map(|(_, t)| t.size()).sum();
            if used + reserve >= max_total {
                continue;
            }
            for t in values(th, &v.ty, max_total - used - reserve) {
                let mut b = a.clone();
                b.push((v.clone(), t));
                next.push(b);
            }
        }
        out = next;
    }
    out
}

fn assignment_order(th: &Theory, a: &[(Var, Term)], b: &[(Var, Term)]) -> Ordering {
    let total = |x: &[(Var, Term)]| x.iter().map(|(_, t)| t.size()).sum::<usize>();
    let flat = |x: &[(Var, Term)]| x.iter().flat_map(|(_, t)| key(th, t)).collect::<Vec<_>>();
    total(a).cmp(&total(b)).then_with(|| flat(a).cmp(&flat(b)))
}

/// The least falsifying assignment with total size at most `max_total`.
pub fn first_counterexample(th: &Theory, f: &Formula, max_total: usize, fuel: usize) -> Option<Vec<(Var, Term)>> {
    let vars = vars_in_order(f);
    assignments(th, &vars, max_total)
        .into_iter()
        .filter(|a| instance_holds(th, f, a, fuel) == Some(false))
        .min_by(|a, b| assignment_order(th, a, b))
}

/// No ground instance up to `max_total` falsifies the formula.
pub fn no_counterexample(th: &Theory, f: &Formula, max_total: usize, fuel: usize) -> bool {
    let vars = vars_in_order(f);
    assignments(th, &vars, max_total)
        .iter()
        .all(|a| instance_holds(th, f, a, fuel) != Some(false))
}

/// `{x = t, ...}` in the prover's counterexample notation.
pub fn show_assignment(a: &[(Var, Term)]) -> String {
    let parts: Vec<String> = a
        .iter()
        .map(|(v, t)| format!("{} = {}", v.name, united::syntax::print_term(t)))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

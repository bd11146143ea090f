//! Induction: candidate generation and application of structural
//! induction, recursion induction and case analysis.

use std::collections::BTreeSet;
use std::fmt;

use crate::kernel::{
    substitute, FunctionDef, Hypothesis, NameSupply, Sequent, Substitution, Sym, Term, Theory, Type, Var,
};

/// One `induct` invocation: induction variables, generalised variables and
/// an optional recursion-induction rule.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct InductArgs {
    pub on: Vec<Sym>,
    pub arbitrary: Vec<Sym>,
    pub rule: Option<Sym>,
}

impl InductArgs {
    pub fn on(vars: &[&str]) -> Self {
        InductArgs {
            on: vars.iter().map(|v| Sym::from(*v)).collect(),
            arbitrary: Vec::new(),
            rule: None,
        }
    }

    pub fn arbitrary(mut self, vars: &[&str]) -> Self {
        self.arbitrary = vars.iter().map(|v| Sym::from(*v)).collect();
        self
    }

    pub fn rule(mut self, f: &str) -> Self {
        self.rule = Some(Sym::from(f));
        self
    }
}

impl fmt::Display for InductArgs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_induct_args(self))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct InductLimits {
    pub max_arbitrary: usize,
}

impl Default for InductLimits {
    fn default() -> Self {
        InductLimits { max_arbitrary: 2 }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum InductError {
    #[error("invalid induction arguments: {0}")]
    InvalidArgs(String),
}

fn invalid(msg: impl Into<String>) -> InductError {
    InductError::InvalidArgs(msg.into())
}

/// Subsets of `pool` with at most `max` elements: smaller first, then in
/// pool order.
fn subsets(pool: &[Sym], max: usize) -> Vec<Vec<Sym>> {
    fn combos(pool: &[Sym], k: usize, start: usize, acc: &mut Vec<Sym>, out: &mut Vec<Vec<Sym>>) {
        if acc.len() == k {
            out.push(acc.clone());
            return;
        }
        for i in start..pool.len() {
            acc.push(pool[i].clone());
            combos(pool, k, i + 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    for k in 0..=max.min(pool.len()) {
        combos(pool, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

fn datatype_vars(sequent: &Sequent, theory: &Theory) -> Vec<Var> {
    sequent
        .target
        .vars()
        .into_iter()
        .filter(|v| theory.datatype(&v.ty).is_some())
        .collect()
}

/// Applications `f x1 .. xn` of a structurally recursive function to
/// distinct variables, in preorder over the target.
fn rule_occurrences(sequent: &Sequent, theory: &Theory) -> Vec<(Sym, Vec<Sym>)> {
    let f = &sequent.target;
    let mut out: Vec<(Sym, Vec<Sym>)> = Vec::new();
    for e in f.premises.iter().chain(std::iter::once(&f.conclusion)) {
        for side in [&e.lhs, &e.rhs] {
            for t in side.subterms() {
                let Term::App(h, args) = t else { continue };
                let Some(def) = theory.function(h) else { continue };
                if args.is_empty() || def.decreasing_position().is_none() {
                    continue;
                }
                let names: Option<Vec<Sym>> = args.iter().map(|a| a.as_var().map(|v| v.name.clone())).collect();
                let Some(names) = names else { continue };
                let distinct: BTreeSet<&Sym> = names.iter().collect();
                if distinct.len() != names.len() {
                    continue;
                }
                let cand = (h.clone(), names);
                if !out.contains(&cand) {
                    out.push(cand);
                }
            }
        }
    }
    out
}

/// The induction candidate space for a sequent, in the canonical order:
/// structural before rule-based, variables by first occurrence, smaller
/// `arbitrary` sets first.
pub fn candidate_applications(sequent: &Sequent, theory: &Theory, limits: InductLimits) -> Vec<InductArgs> {
    let vars: Vec<Sym> = datatype_vars(sequent, theory).into_iter().map(|v| v.name).collect();
    let mut out = Vec::new();
    for v in &vars {
        let rest: Vec<Sym> = vars.iter().filter(|w| *w != v).cloned().collect();
        for arb in subsets(&rest, limits.max_arbitrary) {
            out.push(InductArgs {
                on: vec![v.clone()],
                arbitrary: arb,
                rule: None,
            });
        }
    }
    for (f, on) in rule_occurrences(sequent, theory) {
        let rest: Vec<Sym> = vars.iter().filter(|w| !on.contains(w)).cloned().collect();
        for arb in subsets(&rest, limits.max_arbitrary) {
            let cand = InductArgs {
                on: on.clone(),
                arbitrary: arb,
                rule: Some(f.clone()),
            };
            if !out.contains(&cand) {
                out.push(cand);
            }
        }
    }
    out
}

fn resolve(sequent: &Sequent, name: &Sym) -> Result<Var, InductError> {
    sequent
        .target
        .vars()
        .into_iter()
        .find(|v| &v.name == name)
        .ok_or_else(|| invalid(format!("{name} is not a variable of the goal")))
}

struct Schema<'a> {
    theory: &'a Theory,
    sequent: &'a Sequent,
    supply: NameSupply,
    arbitrary: Vec<Var>,
    removed: Vec<Var>,
}

impl<'a> Schema<'a> {
    fn new(theory: &'a Theory, sequent: &'a Sequent, on: &[Var], arbitrary: Vec<Var>) -> Self {
        let mut supply = NameSupply::new(theory);
        supply.reserve_all(sequent.names_in_use().iter());
        let mut removed = on.to_vec();
        removed.extend(arbitrary.iter().cloned());
        Schema {
            theory,
            sequent,
            supply,
            arbitrary,
            removed,
        }
    }

    fn base_name(&self, ty: &Type) -> String {
        ty.name().chars().next().map(|c| c.to_ascii_lowercase().to_string()).unwrap_or_else(|| "v".into())
    }

    fn fresh(&mut self, base: &str, ty: &Type) -> Var {
        self.supply.fresh(base, ty)
    }

    /// Fresh copies of the arbitrary variables, frozen (for the case target)
    /// or schematic (for hypotheses).
    fn generalised(&mut self) -> (Substitution, Vec<Var>) {
        let mut s = Substitution::new();
        let mut vs = Vec::new();
        for a in self.arbitrary.clone() {
            let f = self.fresh(&a.name, &a.ty);
            s.insert(a, Term::Var(f.clone()));
            vs.push(f);
        }
        (s, vs)
    }

    /// Hypotheses that do not depend on the variables being eliminated.
    fn kept_hyps(&self) -> Vec<Hypothesis> {
        self.sequent
            .hyps
            .iter()
            .filter(|h| !self.removed.iter().any(|v| h.mentions_fixed(v)))
            .cloned()
            .collect()
    }

    fn case(&mut self, case_subst: &Substitution, new_vars: Vec<Var>, ih_substs: Vec<Substitution>) -> Sequent {
        let (frozen, frozen_vars) = self.generalised();
        let target = self.sequent.target.substitute(case_subst).substitute(&frozen);
        let mut hyps = self.kept_hyps();
        for ih in ih_substs {
            let (schem, schem_vars) = self.generalised();
            let formula = self.sequent.target.substitute(&ih).substitute(&schem);
            hyps.push(Hypothesis {
                formula,
                schematic: schem_vars.into_iter().collect(),
            });
        }
        let mut fixed: Vec<Var> = self
            .sequent
            .fixed
            .iter()
            .filter(|v| !self.removed.contains(v))
            .cloned()
            .collect();
        fixed.extend(new_vars);
        fixed.extend(frozen_vars);
        Sequent { fixed, hyps, target }
    }
}

fn check_args(sequent: &Sequent, theory: &Theory, args: &InductArgs) -> Result<(Vec<Var>, Vec<Var>), InductError> {
    if args.on.is_empty() {
        return Err(invalid("no induction variable"));
    }
    let on = args.on.iter().map(|n| resolve(sequent, n)).collect::<Result<Vec<_>, _>>()?;
    let arb = args.arbitrary.iter().map(|n| resolve(sequent, n)).collect::<Result<Vec<_>, _>>()?;
    let mut seen = BTreeSet::new();
    for v in on.iter().chain(&arb) {
        if !seen.insert(&v.name) {
            return Err(invalid(format!("{} named twice", v.name)));
        }
        if theory.datatype(&v.ty).is_none() {
            return Err(invalid(format!("{} does not have a datatype type", v.name)));
        }
    }
    Ok((on, arb))
}

fn rename_pattern_vars(schema: &mut Schema, patterns: &[Term]) -> (Substitution, Vec<Var>) {
    let mut vars = Vec::new();
    for p in patterns {
        p.collect_vars(&mut vars);
    }
    let mut s = Substitution::new();
    let mut fresh = Vec::new();
    for v in vars {
        let f = schema.fresh(&v.name, &v.ty);
        s.insert(v, Term::Var(f.clone()));
        fresh.push(f);
    }
    (s, fresh)
}

fn structural(schema: &mut Schema, x: &Var) -> Vec<Sequent> {
    let dt = schema.theory.datatype(&x.ty).expect("checked datatype").clone();
    let mut out = Vec::new();
    for c in &dt.ctors {
        // Cases are independent sequents, so each starts from the same names.
        let saved = schema.supply.clone();
        let mut args = Vec::new();
        for ty in &c.args {
            let base = if *ty == x.ty { x.name.to_string() } else { schema.base_name(ty) };
            args.push(schema.fresh(&base, ty));
        }
        let value = Term::App(c.name.clone(), args.iter().cloned().map(Term::Var).collect());
        let case_subst = Substitution::single(x.clone(), value);
        let ihs = args
            .iter()
            .filter(|a| a.ty == x.ty)
            .map(|a| Substitution::single(x.clone(), Term::Var(a.clone())))
            .collect();
        out.push(schema.case(&case_subst, args, ihs));
        schema.supply = saved;
    }
    out
}

fn recursion(schema: &mut Schema, on: &[Var], f: &FunctionDef) -> Vec<Sequent> {
    let mut out = Vec::new();
    for eq in &f.equations {
        let saved = schema.supply.clone();
        let (ren, fresh) = rename_pattern_vars(schema, &eq.patterns);
        let case_subst: Substitution = on
            .iter()
            .zip(&eq.patterns)
            .map(|(v, p)| (v.clone(), substitute(p, &ren)))
            .collect();
        let ihs = f
            .recursive_calls(eq)
            .into_iter()
            .map(|call| {
                on.iter()
                    .zip(call)
                    .map(|(v, a)| (v.clone(), substitute(a, &ren)))
                    .collect::<Substitution>()
            })
            .collect();
        out.push(schema.case(&case_subst, fresh, ihs));
        schema.supply = saved;
    }
    out
}

/// Applies induction to a sequent. Hypotheses that mention an induction or
/// generalised variable are dropped from the cases.
pub fn apply_induction(sequent: &Sequent, args: &InductArgs, theory: &Theory) -> Result<Vec<Sequent>, InductError> {
    let (on, arb) = check_args(sequent, theory, args)?;
    match &args.rule {
        None => {
            if on.len() != 1 {
                return Err(invalid("structural induction takes exactly one variable"));
            }
            let mut schema = Schema::new(theory, sequent, &on, arb);
            Ok(structural(&mut schema, &on[0]))
        }
        Some(r) => {
            let f = theory
                .function(r)
                .ok_or_else(|| invalid(format!("unknown function {r}")))?;
            if f.arity() != on.len() {
                return Err(invalid(format!("{r} takes {} arguments, {} given", f.arity(), on.len())));
            }
            if f.decreasing_position().is_none() {
                return Err(invalid(format!("{r} is not structurally recursive")));
            }
            for (v, ty) in on.iter().zip(&f.arg_types) {
                if v.ty != *ty {
                    return Err(invalid(format!("{} has type {}, {r} expects {ty}", v.name, v.ty)));
                }
            }
            let mut schema = Schema::new(theory, sequent, &on, arb);
            Ok(recursion(&mut schema, &on, f))
        }
    }
}

/// Case analysis on a variable: one sequent per constructor, no hypotheses
/// added. Hypotheses are instantiated along with the target.
pub fn apply_cases(sequent: &Sequent, var: &Sym, theory: &Theory) -> Result<Vec<Sequent>, InductError> {
    let x = resolve(sequent, var)?;
    let dt = theory
        .datatype(&x.ty)
        .ok_or_else(|| invalid(format!("{} does not have a datatype type", x.name)))?;
    let mut supply = NameSupply::new(theory);
    supply.reserve_all(sequent.names_in_use().iter());
    let mut out = Vec::new();
    for c in &dt.ctors {
        let args: Vec<Var> = c
            .args
            .iter()
            .map(|ty| {
                let base = if *ty == x.ty {
                    x.name.to_string()
                } else {
                    ty.name().chars().next().unwrap_or('v').to_ascii_lowercase().to_string()
                };
                supply.fresh(&base, ty)
            })
            .collect();
        let s = Substitution::single(x.clone(), Term::App(c.name.clone(), args.iter().cloned().map(Term::Var).collect()));
        let hyps = sequent
            .hyps
            .iter()
            .map(|h| {
                if h.schematic.contains(&x) {
                    h.clone()
                } else {
                    Hypothesis {
                        formula: h.formula.substitute(&s),
                        schematic: h.schematic.clone(),
                    }
                }
            })
            .collect();
        let mut fixed: Vec<Var> = sequent.fixed.iter().filter(|v| **v != x).cloned().collect();
        fixed.extend(args);
        out.push(Sequent {
            fixed,
            hyps,
            target: sequent.target.substitute(&s),
        });
    }
    Ok(out)
}

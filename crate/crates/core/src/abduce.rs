//! Conjecture generation for stuck sequents, the discharge/refute filter,
//! and the two-subgoal insertion.
//!
//! Generation heuristics:
//! - G0 rewrites the target once with each premise-free hypothesis, in both
//!   orientations, on the left side, the right side or both;
//! - G1 generalises a non-variable subterm shared by both sides;
//! - G2 replaces a nullary constructor argument on the left side by a fresh
//!   variable and synthesises right sides around it;
//! - G3 drops the premises.
//!
//! G1 to G3 run on the original target and on every G0 variant.

use std::fmt;

use crate::deduct::{with_conjecture, Deducer};
use crate::eval::{find_counterexample, Counterexample, DEFAULT_FUEL, DEFAULT_MAX_SIZE};
use crate::kernel::{
    canonical_names, match_into, substitute, Equation, Formula, NameSupply, Sequent, Substitution, Term, Theory, Var,
};
use crate::syntax::print_formula;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct AbduceLimits {
    pub max_conjectures: usize,
    /// Total assignment size for refutation.
    pub refute_size: usize,
    pub fuel: usize,
}

impl Default for AbduceLimits {
    fn default() -> Self {
        AbduceLimits {
            max_conjectures: 8,
            refute_size: DEFAULT_MAX_SIZE,
            fuel: DEFAULT_FUEL,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ConjectureVerdict {
    Valuable,
    NotStrongEnough,
    Refuted(Counterexample),
}

impl fmt::Display for ConjectureVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConjectureVerdict::Valuable => write!(f, "VALUABLE"),
            ConjectureVerdict::NotStrongEnough => write!(f, "NOT_STRONG_ENOUGH"),
            ConjectureVerdict::Refuted(c) => write!(f, "REFUTED {c}"),
        }
    }
}

/// Rewrite the outermost instances of `lhs` in `t`, without rewriting
/// inside replaced subterms.
fn rewrite_once(t: &Term, lhs: &Term, rhs: &Term, bindable: &dyn Fn(&Var) -> bool) -> Term {
    let mut s = Substitution::new();
    if match_into(lhs, t, &mut s, bindable) {
        return substitute(rhs, &s);
    }
    match t {
        Term::App(h, args) => Term::App(h.clone(), args.iter().map(|a| rewrite_once(a, lhs, rhs, bindable)).collect()),
        Term::Var(_) => t.clone(),
    }
}

/// G0: target variants obtained from the hypotheses.
fn hypothesis_variants(sequent: &Sequent) -> Vec<Formula> {
    let target = &sequent.target;
    let mut out = Vec::new();
    for h in &sequent.hyps {
        if !h.formula.premises.is_empty() {
            continue;
        }
        let bindable = |v: &Var| h.schematic.contains(v);
        let c = &h.formula.conclusion;
        for (from, to) in [(&c.lhs, &c.rhs), (&c.rhs, &c.lhs)] {
            if matches!(from, Term::Var(v) if bindable(v)) {
                continue;
            }
            let l = rewrite_once(&target.conclusion.lhs, from, to, &bindable);
            let r = rewrite_once(&target.conclusion.rhs, from, to, &bindable);
            let old = &target.conclusion;
            for concl in [
                Equation::new(l.clone(), old.rhs.clone()),
                Equation::new(old.lhs.clone(), r.clone()),
                Equation::new(l.clone(), r.clone()),
            ] {
                if concl != *old {
                    out.push(Formula::new(target.premises.clone(), concl));
                }
            }
        }
    }
    out
}

/// G1: generalise each non-ground, non-variable subterm occurring on both
/// sides.
fn generalize_common(f: &Formula, supply: &mut NameSupply, theory: &Theory) -> Vec<Formula> {
    let c = &f.conclusion;
    let mut seen: Vec<&Term> = Vec::new();
    let mut out = Vec::new();
    for t in c.lhs.subterms() {
        if matches!(t, Term::Var(_)) || t.is_ground() || seen.contains(&t) || !c.rhs.contains(t) {
            continue;
        }
        seen.push(t);
        let Some(ty) = theory.type_of(t) else { continue };
        let v = Term::Var(supply.fresh("g", &ty));
        out.push(f.map_terms(|x| x.replace_all(t, &v)));
    }
    out
}

/// G2: abstract a nullary constructor argument on the left side.
fn generalize_constant(f: &Formula, supply: &mut NameSupply, theory: &Theory) -> Vec<Formula> {
    let c = &f.conclusion;
    let Some(rhs_ty) = theory.type_of(&c.rhs) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for pos in c.lhs.positions() {
        if pos.is_empty() {
            continue;
        }
        let t = c.lhs.at(&pos).expect("valid position");
        let Term::App(name, args) = t else { continue };
        if !args.is_empty() || !theory.is_ctor(name) {
            continue;
        }
        let Some(ty) = theory.type_of(t) else { continue };
        let y = Term::Var(supply.fresh("g", &ty));
        let lhs = c.lhs.replace_at(&pos, y.clone());
        let mut rhss = vec![c.rhs.clone()];
        for g in &theory.functions {
            if g.arity() != 2 || g.ret != rhs_ty {
                continue;
            }
            if g.arg_types[0] == rhs_ty && g.arg_types[1] == ty {
                rhss.push(Term::App(g.name.clone(), vec![c.rhs.clone(), y.clone()]));
            }
            if g.arg_types[0] == ty && g.arg_types[1] == rhs_ty {
                rhss.push(Term::App(g.name.clone(), vec![y.clone(), c.rhs.clone()]));
            }
        }
        for r in rhss {
            out.push(Formula::new(f.premises.clone(), Equation::new(lhs.clone(), r)));
        }
    }
    out
}

/// Candidate conjectures for `sequent`, smallest first, capped.
pub fn generate_conjectures(sequent: &Sequent, theory: &Theory, limits: &AbduceLimits) -> Vec<Formula> {
    if limits.max_conjectures == 0 {
        return Vec::new();
    }
    let mut supply = NameSupply::new(theory);
    supply.reserve_all(sequent.names_in_use().iter());
    let mut bases = vec![sequent.target.clone()];
    bases.extend(hypothesis_variants(sequent));
    let mut raw = Vec::new();
    for b in &bases {
        raw.extend(generalize_common(b, &mut supply, theory));
        raw.extend(generalize_constant(b, &mut supply, theory));
        if !b.premises.is_empty() {
            raw.push(Formula::new(Vec::new(), b.conclusion.clone()));
        }
    }
    let own = canonical_names(theory, &sequent.target);
    let mut out: Vec<Formula> = Vec::new();
    for f in raw {
        let f = canonical_names(theory, &f);
        if f.conclusion.is_reflexive() || f == own || out.contains(&f) {
            continue;
        }
        out.push(f);
    }
    out.sort_by_key(|f| f.size());
    out.truncate(limits.max_conjectures);
    out
}

/// Discharge check first, refutation second.
pub fn filter_conjecture(deducer: &Deducer, sequent: &Sequent, conjecture: &Formula, limits: &AbduceLimits) -> ConjectureVerdict {
    if !deducer.prove_implication(conjecture, sequent) {
        return ConjectureVerdict::NotStrongEnough;
    }
    match find_counterexample(deducer.theory(), conjecture, limits.refute_size, limits.fuel) {
        Some(cex) => ConjectureVerdict::Refuted(cex),
        None => ConjectureVerdict::Valuable,
    }
}

/// Generated conjectures with their verdicts, in generation order.
pub fn judge_conjectures(deducer: &Deducer, sequent: &Sequent, limits: &AbduceLimits) -> Vec<(Formula, ConjectureVerdict)> {
    generate_conjectures(sequent, deducer.theory(), limits)
        .into_iter()
        .map(|c| {
            let v = filter_conjecture(deducer, sequent, &c, limits);
            (c, v)
        })
        .collect()
}

/// Valuable conjectures not already available as hypotheses.
pub fn valuable_conjectures(deducer: &Deducer, sequent: &Sequent, limits: &AbduceLimits) -> Vec<Formula> {
    let theory = deducer.theory();
    let present: Vec<Formula> = sequent
        .hyps
        .iter()
        .map(|h| canonical_names(theory, &h.formula))
        .collect();
    generate_conjectures(sequent, theory, limits)
        .into_iter()
        .filter(|c| !present.contains(c))
        .filter(|c| filter_conjecture(deducer, sequent, c, limits) == ConjectureVerdict::Valuable)
        .collect()
}

/// `[sequent + conjecture as a schematic hypothesis, the conjecture alone]`
pub fn insert_conjecture(theory: &Theory, sequent: &Sequent, conjecture: &Formula) -> Vec<Sequent> {
    vec![with_conjecture(theory, sequent, conjecture), Sequent::root(conjecture)]
}

pub fn describe(theory: &Theory, f: &Formula) -> String {
    print_formula(&canonical_names(theory, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deduct::{DeductBudgets, DeductOutcome};
    use crate::induct::{apply_induction, InductArgs};
    use crate::syntax::{parse_formula, parse_theory};

    const LISTREV: &str = include_str!("../tests/data/listrev.thy");

    fn th() -> Theory {
        parse_theory(LISTREV).unwrap()
    }

    fn canon(th: &Theory, s: &str) -> Formula {
        canonical_names(th, &parse_formula(s, th).unwrap())
    }

    fn stuck_rev_rev(th: &Theory) -> Sequent {
        let d = Deducer::new(th, DeductBudgets::default());
        let root = Sequent::root(&th.goal("rev_rev").unwrap().formula);
        let step = apply_induction(&root, &InductArgs::on(&["xs"]), th).unwrap().remove(1);
        match d.auto(&step) {
            DeductOutcome::Progress(mut r, _) => r.remove(0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rev_rev_conjecture_is_generated() {
        let th = th();
        let s = stuck_rev_rev(&th);
        let cs = generate_conjectures(&s, &th, &AbduceLimits::default());
        let want = canon(&th, "rev (app ys (Cons x Nil)) = Cons x (rev ys)");
        assert!(cs.contains(&want), "{:?}", cs.iter().map(print_formula).collect::<Vec<_>>());
    }

    #[test]
    fn itrev_generalisations() {
        let th = th();
        let s = Sequent::root(&th.goal("itrev_rev").unwrap().formula);
        let cs = generate_conjectures(&s, &th, &AbduceLimits::default());
        for want in [
            "itrev xs ys = app (rev xs) ys",
            "itrev xs ys = app ys (rev xs)",
            "itrev xs ys = rev xs",
        ] {
            assert!(cs.contains(&canon(&th, want)), "missing {want}");
        }
    }

    #[test]
    fn generation_is_capped_and_unique() {
        let th = th();
        let s = stuck_rev_rev(&th);
        let limits = AbduceLimits {
            max_conjectures: 2,
            ..AbduceLimits::default()
        };
        let cs = generate_conjectures(&s, &th, &limits);
        assert!(cs.len() <= 2);
        let all = generate_conjectures(&s, &th, &AbduceLimits::default());
        for (i, a) in all.iter().enumerate() {
            assert!(!all[i + 1..].contains(a));
        }
    }

    #[test]
    fn premise_free_goal_gains_nothing_from_g3() {
        let th = th();
        let s = Sequent::root(&parse_formula("add x y = add y x", &th).unwrap());
        let cs = generate_conjectures(&s, &th, &AbduceLimits::default());
        assert!(!cs.contains(&canon(&th, "add x y = add y x")));
    }

    #[test]
    fn verdicts() {
        let th = th();
        let d = Deducer::new(&th, DeductBudgets::default());
        let lim = AbduceLimits::default();
        let s = stuck_rev_rev(&th);
        let good = canon(&th, "rev (app ys (Cons x Nil)) = Cons x (rev ys)");
        assert_eq!(filter_conjecture(&d, &s, &good, &lim), ConjectureVerdict::Valuable);

        let root = Sequent::root(&th.goal("itrev_rev").unwrap().formula);
        let bad = canon(&th, "itrev xs ys = app ys (rev xs)");
        match filter_conjecture(&d, &root, &bad, &lim) {
            ConjectureVerdict::Refuted(cex) => assert!(crate::eval::falsifies(&th, &bad, &cex, DEFAULT_FUEL)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn refuted_witness_for_wrong_itrev() {
        let th = th();
        let f = canon(&th, "itrev xs ys = rev xs");
        let cex = find_counterexample(&th, &f, 8, DEFAULT_FUEL).unwrap();
        assert_eq!(cex.to_string(), "{xs = Nil, ys = Cons Zero Nil}");
    }

    #[test]
    fn insertion_gives_two_subgoals() {
        let th = th();
        let s = stuck_rev_rev(&th);
        let c = canon(&th, "rev (app ys (Cons x Nil)) = Cons x (rev ys)");
        let out = insert_conjecture(&th, &s, &c);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].hyps.len(), s.hyps.len() + 1);
        assert_eq!(out[1], Sequent::root(&c));
        let d = Deducer::new(&th, DeductBudgets::default());
        assert!(d.auto(&out[0]).is_solved());
    }
}

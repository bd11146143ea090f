//! Symbolic data model: terms, equations, formulas, sequents and theories,
//! together with first-order matching, substitution and well-formedness
//! checking of theories.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

/// Interned-ish identifier. Cloning is a reference-count bump.
pub type Sym = Arc<str>;

pub fn sym(s: &str) -> Sym {
    Arc::from(s)
}

/// A monomorphic datatype name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Type(pub Sym);

impl Type {
    pub fn new(name: &str) -> Self {
        Type(sym(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Var {
    pub name: Sym,
    pub ty: Type,
}

impl Var {
    pub fn new(name: &str, ty: &Type) -> Self {
        Var {
            name: sym(name),
            ty: ty.clone(),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Var(Var),
    App(Sym, Vec<Term>),
}

impl Term {
    pub fn var(name: &str, ty: &Type) -> Term {
        Term::Var(Var::new(name, ty))
    }

    pub fn app(head: &str, args: Vec<Term>) -> Term {
        Term::App(sym(head), args)
    }

    pub fn constant(head: &str) -> Term {
        Term::App(sym(head), Vec::new())
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    pub fn head(&self) -> Option<&Sym> {
        match self {
            Term::Var(_) => None,
            Term::App(h, _) => Some(h),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Free variables in first-occurrence (preorder) order, without duplicates.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    pub fn contains(&self, needle: &Term) -> bool {
        self == needle
            || match self {
                Term::Var(_) => false,
                Term::App(_, args) => args.iter().any(|a| a.contains(needle)),
            }
    }

    pub fn mentions_symbol(&self, s: &str) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(h, args) => &**h == s || args.iter().any(|a| a.mentions_symbol(s)),
        }
    }

    /// All subterm positions in preorder. The root is the empty path.
    pub fn positions(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_positions(&mut path, &mut out);
        out
    }

    fn collect_positions(&self, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(path.clone());
        if let Term::App(_, args) = self {
            for (i, a) in args.iter().enumerate() {
                path.push(i);
                a.collect_positions(path, out);
                path.pop();
            }
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&Term> {
        let mut cur = self;
        for &i in path {
            cur = cur.args().get(i)?;
        }
        Some(cur)
    }

    pub fn replace_at(&self, path: &[usize], new: Term) -> Term {
        match path.split_first() {
            None => new,
            Some((&i, rest)) => match self {
                Term::App(h, args) => {
                    let mut args = args.clone();
                    args[i] = args[i].replace_at(rest, new);
                    Term::App(h.clone(), args)
                }
                Term::Var(_) => self.clone(),
            },
        }
    }

    /// Replace every occurrence of `from` by `to` (outermost occurrences first).
    pub fn replace_all(&self, from: &Term, to: &Term) -> Term {
        if self == from {
            return to.clone();
        }
        match self {
            Term::Var(_) => self.clone(),
            Term::App(h, args) => Term::App(
                h.clone(),
                args.iter().map(|a| a.replace_all(from, to)).collect(),
            ),
        }
    }

    /// Preorder iterator over all subterms, including `self`.
    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            out.push(t);
            for a in t.args().iter().rev() {
                stack.push(a);
            }
        }
        out
    }
}

pub fn term_size(term: &Term) -> usize {
    term.size()
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Equation { lhs, rhs }
    }

    pub fn is_reflexive(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn flipped(&self) -> Equation {
        Equation::new(self.rhs.clone(), self.lhs.clone())
    }

    pub fn size(&self) -> usize {
        self.lhs.size() + self.rhs.size()
    }

    pub fn map(&self, mut f: impl FnMut(&Term) -> Term) -> Equation {
        Equation::new(f(&self.lhs), f(&self.rhs))
    }
}

/// Conditional equation. Free variables are implicitly universally quantified.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Formula {
    pub premises: Vec<Equation>,
    pub conclusion: Equation,
}

impl Formula {
    pub fn new(premises: Vec<Equation>, conclusion: Equation) -> Self {
        Formula {
            premises,
            conclusion,
        }
    }

    pub fn eq(lhs: Term, rhs: Term) -> Self {
        Formula::new(Vec::new(), Equation::new(lhs, rhs))
    }

    /// Variables in first-occurrence order: premises left to right, then the conclusion.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for e in self.premises.iter().chain(std::iter::once(&self.conclusion)) {
            e.lhs.collect_vars(&mut out);
            e.rhs.collect_vars(&mut out);
        }
        out
    }

    pub fn size(&self) -> usize {
        self.premises.iter().map(Equation::size).sum::<usize>() + self.conclusion.size()
    }

    pub fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> Formula {
        Formula {
            premises: self.premises.iter().map(|e| e.map(&mut f)).collect(),
            conclusion: self.conclusion.map(&mut f),
        }
    }

    pub fn substitute(&self, s: &Substitution) -> Formula {
        self.map_terms(|t| substitute(t, s))
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        self.premises
            .iter()
            .chain(std::iter::once(&self.conclusion))
            .any(|e| e.lhs.contains_var(v) || e.rhs.contains_var(v))
    }

    pub fn mentions_symbol(&self, s: &str) -> bool {
        self.premises
            .iter()
            .chain(std::iter::once(&self.conclusion))
            .any(|e| e.lhs.mentions_symbol(s) || e.rhs.mentions_symbol(s))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Hypothesis {
    pub formula: Formula,
    /// Variables that may be instantiated when the hypothesis is used.
    pub schematic: BTreeSet<Var>,
}

impl Hypothesis {
    pub fn fixed(formula: Formula) -> Self {
        Hypothesis {
            formula,
            schematic: BTreeSet::new(),
        }
    }

    /// A hypothesis in which every variable is schematic.
    pub fn closed(formula: Formula) -> Self {
        let schematic = formula.vars().into_iter().collect();
        Hypothesis { formula, schematic }
    }

    pub fn mentions_fixed(&self, v: &Var) -> bool {
        !self.schematic.contains(v) && self.formula.contains_var(v)
    }
}

/// A proof obligation: frozen eigenvariables, hypotheses and a target formula.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Sequent {
    pub fixed: Vec<Var>,
    pub hyps: Vec<Hypothesis>,
    pub target: Formula,
}

impl Sequent {
    /// The root sequent of a goal: all free variables become fixed.
    pub fn root(goal: &Formula) -> Self {
        Sequent {
            fixed: goal.vars(),
            hyps: Vec::new(),
            target: goal.clone(),
        }
    }

    /// Every variable name in use anywhere in the sequent.
    pub fn names_in_use(&self) -> HashSet<Sym> {
        let mut names: HashSet<Sym> = self.fixed.iter().map(|v| v.name.clone()).collect();
        for v in self.target.vars() {
            names.insert(v.name);
        }
        for h in &self.hyps {
            for v in h.formula.vars() {
                names.insert(v.name);
            }
        }
        names
    }

    pub fn size(&self) -> usize {
        self.target.size()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CtorDef {
    pub name: Sym,
    pub args: Vec<Type>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DatatypeDef {
    pub name: Type,
    pub ctors: Vec<CtorDef>,
}

impl DatatypeDef {
    pub fn ctor(&self, name: &str) -> Option<(usize, &CtorDef)> {
        self.ctors.iter().enumerate().find(|(_, c)| &*c.name == name)
    }

    pub fn is_recursive_ctor(&self, c: &CtorDef) -> bool {
        c.args.contains(&self.name)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FunEquation {
    pub patterns: Vec<Term>,
    pub rhs: Term,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FunctionDef {
    pub name: Sym,
    pub arg_types: Vec<Type>,
    pub ret: Type,
    pub equations: Vec<FunEquation>,
}

impl FunctionDef {
    pub fn arity(&self) -> usize {
        self.arg_types.len()
    }

    pub fn lhs(&self, eq: &FunEquation) -> Term {
        Term::App(self.name.clone(), eq.patterns.clone())
    }

    /// Recursive calls of this function inside `eq.rhs`, outermost first.
    pub fn recursive_calls<'a>(&self, eq: &'a FunEquation) -> Vec<&'a [Term]> {
        eq.rhs
            .subterms()
            .into_iter()
            .filter_map(|t| match t {
                Term::App(h, args) if *h == self.name => Some(args.as_slice()),
                _ => None,
            })
            .collect()
    }

    pub fn is_recursive(&self) -> bool {
        self.equations
            .iter()
            .any(|e| e.rhs.mentions_symbol(&self.name))
    }

    /// Some equation matches on a constructor at `pos` and recurses with a
    /// strict subterm of that pattern in the same position.
    pub fn recurses_on(&self, pos: usize) -> bool {
        self.equations.iter().any(|eq| {
            let pat = &eq.patterns[pos];
            matches!(pat, Term::App(..))
                && self.recursive_calls(eq).iter().any(|call| {
                    call.get(pos)
                        .map(|a| a != pat && pat.contains(a))
                        .unwrap_or(false)
                })
        })
    }

    /// Some equation binds a plain variable at `pos` and passes a different
    /// term in the same position to a recursive call (an accumulator).
    pub fn varies_at(&self, pos: usize) -> bool {
        self.equations.iter().any(|eq| {
            let pat = &eq.patterns[pos];
            matches!(pat, Term::Var(_))
                && self
                    .recursive_calls(eq)
                    .iter()
                    .any(|call| call.get(pos).map(|a| a != pat).unwrap_or(false))
        })
    }

    /// Structural recursion: one argument position shrinks strictly in every
    /// recursive call. Required for recursion induction to be sound.
    pub fn decreasing_position(&self) -> Option<usize> {
        (0..self.arity()).find(|&i| {
            self.equations.iter().all(|eq| {
                self.recursive_calls(eq).iter().all(|call| {
                    let pat = &eq.patterns[i];
                    call.get(i)
                        .map(|a| a != pat && pat.contains(a))
                        .unwrap_or(false)
                })
            })
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NamedFormula {
    pub name: Sym,
    pub formula: Formula,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Theory {
    pub name: String,
    pub datatypes: Vec<DatatypeDef>,
    pub functions: Vec<FunctionDef>,
    /// Proved formulas used as left-to-right rewrite rules.
    pub lemmas: Vec<NamedFormula>,
    pub goals: Vec<NamedFormula>,
}

#[derive(Clone, Copy, Debug)]
pub enum Symbol<'a> {
    Ctor(&'a DatatypeDef, usize),
    Fun(&'a FunctionDef),
}

impl<'a> Symbol<'a> {
    pub fn arg_types(&self) -> &'a [Type] {
        match *self {
            Symbol::Ctor(dt, i) => &dt.ctors[i].args,
            Symbol::Fun(f) => &f.arg_types,
        }
    }

    pub fn ret(&self) -> &'a Type {
        match *self {
            Symbol::Ctor(dt, _) => &dt.name,
            Symbol::Fun(f) => &f.ret,
        }
    }
}

impl Theory {
    pub fn datatype(&self, ty: &Type) -> Option<&DatatypeDef> {
        self.datatypes.iter().find(|d| &d.name == ty)
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDef> {
        self.functions.iter().find(|f| &*f.name == name)
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol<'_>> {
        for dt in &self.datatypes {
            if let Some((i, _)) = dt.ctor(name) {
                return Some(Symbol::Ctor(dt, i));
            }
        }
        self.function(name).map(Symbol::Fun)
    }

    pub fn is_ctor(&self, name: &str) -> bool {
        matches!(self.symbol(name), Some(Symbol::Ctor(..)))
    }

    pub fn goal(&self, name: &str) -> Option<&NamedFormula> {
        self.goals.iter().find(|g| &*g.name == name)
    }

    /// Type of a term, assuming it is well formed.
    pub fn type_of(&self, t: &Term) -> Option<Type> {
        match t {
            Term::Var(v) => Some(v.ty.clone()),
            Term::App(h, _) => self.symbol(h).map(|s| s.ret().clone()),
        }
    }

    /// True when the term is built only from constructors.
    pub fn is_value(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => false,
            Term::App(h, args) => self.is_ctor(h) && args.iter().all(|a| self.is_value(a)),
        }
    }

    /// Constructor application `C(..) = D(..)` with different heads.
    pub fn is_clash(&self, eq: &Equation) -> bool {
        match (&eq.lhs, &eq.rhs) {
            (Term::App(f, _), Term::App(g, _)) => f != g && self.is_ctor(f) && self.is_ctor(g),
            _ => false,
        }
    }

    pub fn add_lemma(&mut self, name: &str, formula: Formula) {
        self.lemmas.push(NamedFormula {
            name: sym(name),
            formula,
        });
    }
}

/// A simultaneous substitution. Small, so a vector beats a map.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Substitution(Vec<(Var, Term)>);

impl Substitution {
    pub fn new() -> Self {
        Substitution(Vec::new())
    }

    pub fn single(v: Var, t: Term) -> Self {
        Substitution(vec![(v, t)])
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.0.iter().find(|(w, _)| w == v).map(|(_, t)| t)
    }

    pub fn insert(&mut self, v: Var, t: Term) {
        match self.0.iter_mut().find(|(w, _)| *w == v) {
            Some(slot) => slot.1 = t,
            None => self.0.push((v, t)),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter().map(|(v, t)| (v, t))
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut out: Vec<(Var, Term)> = other
            .0
            .iter()
            .map(|(v, t)| (v.clone(), substitute(t, self)))
            .collect();
        for (v, t) in &self.0 {
            if other.get(v).is_none() {
                out.push((v.clone(), t.clone()));
            }
        }
        Substitution(out)
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (v, t) in iter {
            s.insert(v, t);
        }
        s
    }
}

pub fn substitute(term: &Term, subst: &Substitution) -> Term {
    if subst.is_empty() {
        return term.clone();
    }
    match term {
        Term::Var(v) => subst.get(v).cloned().unwrap_or_else(|| term.clone()),
        Term::App(h, args) => Term::App(h.clone(), args.iter().map(|a| substitute(a, subst)).collect()),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, thiserror::Error)]
#[error("no match")]
pub struct NoMatch;

/// Syntactic first-order matching; every pattern variable may be bound.
pub fn match_term(pattern: &Term, subject: &Term) -> Result<Substitution, NoMatch> {
    let mut s = Substitution::new();
    if match_into(pattern, subject, &mut s, &|_| true) {
        Ok(s)
    } else {
        Err(NoMatch)
    }
}

/// Matching that only binds variables accepted by `bindable`; other pattern
/// variables must coincide with the subject. Extends `subst` in place; on
/// failure `subst` may hold partial bindings.
pub fn match_into(
    pattern: &Term,
    subject: &Term,
    subst: &mut Substitution,
    bindable: &dyn Fn(&Var) -> bool,
) -> bool {
    match pattern {
        Term::Var(v) if bindable(v) => match subst.get(v) {
            Some(bound) => bound == subject,
            None => {
                if v.ty != subject_type_hint(subject, &v.ty) {
                    return false;
                }
                subst.insert(v.clone(), subject.clone());
                true
            }
        },
        Term::Var(_) => pattern == subject,
        Term::App(f, pargs) => match subject {
            Term::App(g, sargs) if f == g && pargs.len() == sargs.len() => pargs
                .iter()
                .zip(sargs)
                .all(|(p, s)| match_into(p, s, subst, bindable)),
            _ => false,
        },
    }
}

// Variables carry their type; applications are assumed well typed, so only a
// variable subject can reveal a mismatch.
fn subject_type_hint(subject: &Term, expected: &Type) -> Type {
    match subject {
        Term::Var(v) => v.ty.clone(),
        Term::App(..) => expected.clone(),
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Location {
    Theory,
    Datatype(Sym),
    Function(Sym, Option<usize>),
    Lemma(Sym),
    Goal(Sym),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Theory => write!(f, "theory"),
            Location::Datatype(n) => write!(f, "datatype {n}"),
            Location::Function(n, None) => write!(f, "fun {n}"),
            Location::Function(n, Some(i)) => write!(f, "fun {n}, equation {}", i + 1),
            Location::Lemma(n) => write!(f, "lemma {n}"),
            Location::Goal(n) => write!(f, "goal {n}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Diagnostic {
    pub location: Location,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

struct Checker<'a> {
    theory: &'a Theory,
    out: Vec<Diagnostic>,
}

impl<'a> Checker<'a> {
    fn report(&mut self, location: &Location, message: impl Into<String>) {
        self.out.push(Diagnostic {
            location: location.clone(),
            message: message.into(),
        });
    }

    /// Type-checks `t` and returns its type. Reports arity, unknown-symbol
    /// and argument-type problems.
    fn check_term(&mut self, t: &Term, loc: &Location, env: &mut HashMap<Sym, Type>) -> Option<Type> {
        match t {
            Term::Var(v) => {
                if self.theory.datatype(&v.ty).is_none() {
                    self.report(loc, format!("unknown type {} for variable {}", v.ty, v.name));
                }
                if self.theory.symbol(&v.name).is_some() {
                    self.report(loc, format!("variable {} shadows a declared symbol", v.name));
                }
                match env.get(&v.name) {
                    Some(ty) if *ty != v.ty => {
                        self.report(loc, format!("inconsistent type for variable {}", v.name));
                    }
                    Some(_) => {}
                    None => {
                        env.insert(v.name.clone(), v.ty.clone());
                    }
                }
                Some(v.ty.clone())
            }
            Term::App(h, args) => {
                let Some(s) = self.theory.symbol(h) else {
                    self.report(loc, format!("unknown symbol {h}"));
                    for a in args {
                        self.check_term(a, loc, env);
                    }
                    return None;
                };
                let expected = s.arg_types();
                if expected.len() != args.len() {
                    self.report(
                        loc,
                        format!(
                            "arity mismatch: {h} expects {} arguments, got {}",
                            expected.len(),
                            args.len()
                        ),
                    );
                }
                for (i, a) in args.iter().enumerate() {
                    let got = self.check_term(a, loc, env);
                    if let (Some(got), Some(want)) = (got, expected.get(i)) {
                        if &got != want {
                            self.report(
                                loc,
                                format!("type mismatch: argument {} of {h} has type {got}, expected {want}", i + 1),
                            );
                        }
                    }
                }
                Some(s.ret().clone())
            }
        }
    }

    fn check_formula(&mut self, f: &Formula, loc: &Location) {
        let mut env = HashMap::new();
        for e in f.premises.iter().chain(std::iter::once(&f.conclusion)) {
            let l = self.check_term(&e.lhs, loc, &mut env);
            let r = self.check_term(&e.rhs, loc, &mut env);
            if let (Some(l), Some(r)) = (l, r) {
                if l != r {
                    self.report(loc, format!("type mismatch: equation sides have types {l} and {r}"));
                }
            }
        }
    }

    fn check_pattern(&mut self, p: &Term, loc: &Location, seen: &mut Vec<Sym>) {
        match p {
            Term::Var(v) => {
                if seen.contains(&v.name) {
                    self.report(loc, format!("non-left-linear pattern: {} repeated", v.name));
                } else {
                    seen.push(v.name.clone());
                }
            }
            Term::App(h, args) => {
                if !self.theory.is_ctor(h) {
                    self.report(loc, format!("pattern uses non-constructor {h}"));
                }
                for a in args {
                    self.check_pattern(a, loc, seen);
                }
            }
        }
    }
}

/// Two linear patterns overlap iff they unify, which for linear patterns is
/// a purely structural test.
pub fn patterns_overlap(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Var(_), _) | (_, Term::Var(_)) => true,
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| patterns_overlap(x, y))
        }
    }
}

fn rows_overlap(a: &[Term], b: &[Term]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| patterns_overlap(x, y))
}

/// Exhaustiveness of a pattern matrix, by constructor specialisation.
fn exhaustive(theory: &Theory, rows: &[Vec<Term>], types: &[Type]) -> bool {
    if types.is_empty() {
        return !rows.is_empty();
    }
    if rows.is_empty() {
        return false;
    }
    let Some(dt) = theory.datatype(&types[0]) else {
        return true;
    };
    let all_vars = rows.iter().all(|r| matches!(r[0], Term::Var(_)));
    if all_vars {
        let rest: Vec<Vec<Term>> = rows.iter().map(|r| r[1..].to_vec()).collect();
        return exhaustive(theory, &rest, &types[1..]);
    }
    dt.ctors.iter().all(|c| {
        let mut spec = Vec::new();
        for r in rows {
            match &r[0] {
                Term::Var(_) => {
                    let mut row: Vec<Term> = c.args.iter().map(|t| Term::var("_", t)).collect();
                    row.extend_from_slice(&r[1..]);
                    spec.push(row);
                }
                Term::App(h, args) if *h == c.name && args.len() == c.args.len() => {
                    let mut row = args.clone();
                    row.extend_from_slice(&r[1..]);
                    spec.push(row);
                }
                Term::App(..) => {}
            }
        }
        let mut tys = c.args.clone();
        tys.extend_from_slice(&types[1..]);
        exhaustive(theory, &spec, &tys)
    })
}

/// Well-formedness diagnostics; empty iff the theory satisfies every
/// structural invariant of the data model.
pub fn check_theory(theory: &Theory) -> Vec<Diagnostic> {
    let mut ck = Checker {
        theory,
        out: Vec::new(),
    };
    let mut names: HashSet<&str> = HashSet::new();
    let mut types_seen: HashSet<&Type> = HashSet::new();

    for dt in &theory.datatypes {
        let loc = Location::Datatype(dt.name.0.clone());
        if !types_seen.insert(&dt.name) {
            ck.report(&loc, format!("duplicate datatype {}", dt.name));
        }
        if dt.ctors.is_empty() {
            ck.report(&loc, "datatype has no constructors");
        }
        if !dt.ctors.iter().any(|c| !dt.is_recursive_ctor(c)) && !dt.ctors.is_empty() {
            ck.report(&loc, "datatype has no non-recursive constructor");
        }
        for c in &dt.ctors {
            if !names.insert(&c.name) {
                ck.report(&loc, format!("duplicate name {}", c.name));
            }
            for a in &c.args {
                if theory.datatype(a).is_none() {
                    ck.report(&loc, format!("unknown type {a} in constructor {}", c.name));
                }
            }
        }
    }

    for f in &theory.functions {
        let floc = Location::Function(f.name.clone(), None);
        if !names.insert(&f.name) {
            ck.report(&floc, format!("duplicate name {}", f.name));
        }
        if f.arg_types.is_empty() {
            ck.report(&floc, "function must take at least one argument");
        }
        for t in f.arg_types.iter().chain(std::iter::once(&f.ret)) {
            if theory.datatype(t).is_none() {
                ck.report(&floc, format!("unknown type {t}"));
            }
        }
        if f.equations.is_empty() {
            ck.report(&floc, "function has no equations");
        }
        for (i, eq) in f.equations.iter().enumerate() {
            let loc = Location::Function(f.name.clone(), Some(i));
            if eq.patterns.len() != f.arity() {
                ck.report(
                    &loc,
                    format!("arity mismatch: {} expects {} arguments, got {}", f.name, f.arity(), eq.patterns.len()),
                );
                continue;
            }
            let mut seen = Vec::new();
            let mut env = HashMap::new();
            for (p, want) in eq.patterns.iter().zip(&f.arg_types) {
                ck.check_pattern(p, &loc, &mut seen);
                if let Some(got) = ck.check_term(p, &loc, &mut env) {
                    if &got != want {
                        ck.report(&loc, format!("type mismatch: pattern has type {got}, expected {want}"));
                    }
                }
            }
            if let Some(got) = ck.check_term(&eq.rhs, &loc, &mut env) {
                if got != f.ret {
                    ck.report(&loc, format!("type mismatch: right-hand side has type {got}, expected {}", f.ret));
                }
            }
            for v in eq.rhs.vars() {
                if !seen.contains(&v.name) {
                    ck.report(&loc, format!("unbound variable {} in right-hand side", v.name));
                }
            }
        }
        for i in 0..f.equations.len() {
            for j in 0..i {
                if rows_overlap(&f.equations[j].patterns, &f.equations[i].patterns) {
                    ck.report(
                        &Location::Function(f.name.clone(), Some(i)),
                        format!("overlapping patterns with equation {}", j + 1),
                    );
                }
            }
        }
        let rows: Vec<Vec<Term>> = f
            .equations
            .iter()
            .filter(|e| e.patterns.len() == f.arity())
            .map(|e| e.patterns.clone())
            .collect();
        if !f.equations.is_empty() && !exhaustive(theory, &rows, &f.arg_types) {
            ck.report(&floc, "non-exhaustive patterns");
        }
    }

    let mut formula_names: HashSet<&str> = HashSet::new();
    for l in &theory.lemmas {
        let loc = Location::Lemma(l.name.clone());
        if !formula_names.insert(&l.name) {
            ck.report(&loc, format!("duplicate name {}", l.name));
        }
        ck.check_formula(&l.formula, &loc);
    }
    for g in &theory.goals {
        let loc = Location::Goal(g.name.clone());
        if !formula_names.insert(&g.name) {
            ck.report(&loc, format!("duplicate name {}", g.name));
        }
        ck.check_formula(&g.formula, &loc);
    }
    ck.out
}

/// Fresh variable names, avoiding everything registered so far.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    used: HashSet<Sym>,
}

impl NameSupply {
    pub fn new(theory: &Theory) -> Self {
        let mut used = HashSet::new();
        for dt in &theory.datatypes {
            used.insert(dt.name.0.clone());
            for c in &dt.ctors {
                used.insert(c.name.clone());
            }
        }
        for f in &theory.functions {
            used.insert(f.name.clone());
        }
        for kw in crate::syntax::KEYWORDS {
            used.insert(sym(kw));
        }
        NameSupply { used }
    }

    pub fn reserve(&mut self, name: &Sym) {
        self.used.insert(name.clone());
    }

    pub fn reserve_all<'a>(&mut self, names: impl IntoIterator<Item = &'a Sym>) {
        for n in names {
            self.used.insert(n.clone());
        }
    }

    pub fn is_used(&self, name: &str) -> bool {
        self.used.contains(name)
    }

    /// `base` itself when free, otherwise `base1`, `base2`, ...
    pub fn fresh(&mut self, base: &str, ty: &Type) -> Var {
        let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
        let stem = if stem.is_empty() { "v" } else { stem };
        let mut candidate = stem.to_string();
        let mut k = 1;
        while self.used.contains(candidate.as_str()) {
            candidate = format!("{stem}{k}");
            k += 1;
        }
        let v = Var::new(&candidate, ty);
        self.used.insert(v.name.clone());
        v
    }
}

/// Rename variables to a canonical scheme by first occurrence, so that
/// alpha-equivalent formulas become syntactically equal.
pub fn canonical_names(theory: &Theory, f: &Formula) -> Formula {
    let mut supply = NameSupply::new(theory);
    let mut s = Substitution::new();
    for v in f.vars() {
        let container = theory
            .datatype(&v.ty)
            .map(|dt| {
                dt.ctors
                    .iter()
                    .any(|c| c.args.contains(&dt.name) && c.args.iter().any(|a| *a != dt.name))
            })
            .unwrap_or(false);
        let pool: &[&str] = if container {
            &["xs", "ys", "zs", "ws"]
        } else {
            &["x", "y", "z", "w"]
        };
        let name = pool
            .iter()
            .find(|n| !supply.is_used(n))
            .map(|n| n.to_string())
            .unwrap_or_else(|| pool[0].to_string());
        let fresh = supply.fresh(&name, &v.ty);
        s.insert(v, Term::Var(fresh));
    }
    f.substitute(&s)
}

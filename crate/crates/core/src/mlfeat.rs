//! Boolean feature assertions over (sequent, induction arguments) pairs,
//! feature vectors, linear scoring and naive-Bayes weight fitting.
//!
//! Assertion syntax:
//!
//! ```text
//! expr  ::= or ("->" expr)?
//! or    ::= and ("or" and)*
//! and   ::= unary ("and" unary)*
//! unary ::= "not" unary | "(" expr ")" | quant | atom
//! quant ::= ("all" | "some") ("ind" | "arb" | "fun") IDENT "." expr
//!         | ("all" | "some") "occ" IDENT "of" IDENT "." expr
//! atom  ::= "true" | "false" | IDENT "(" IDENT ("," IDENT)* ")"
//!         | "uses_rule" | "rule_function_occurs_in_goal"
//!         | ("count_on" | "count_arbitrary") "<=" NUM
//! ```

use std::fmt;

use thiserror::Error;

use crate::induct::{candidate_applications, InductArgs, InductLimits};
use crate::kernel::{Sequent, Sym, Term, Theory, Var};
use crate::syntax::{parse_induct_args, ParseError};

pub const DEFAULT_FEATURES: &str = include_str!("../data/default.features");
pub const DEFAULT_WEIGHTS: &str = include_str!("../data/default.weights");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MlError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{0} weights for {1} features")]
    LengthMismatch(usize, usize),
    #[error("invalid weight '{0}'")]
    BadWeight(String),
    #[error("unknown goal '{0}'")]
    UnknownGoal(String),
    #[error("chosen candidate '{args}' for goal '{goal}' is not in the candidate space")]
    UnknownChoice { goal: String, args: String },
    #[error("corpus line {0}: {1}")]
    Corpus(usize, String),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Domain {
    Ind,
    Arb,
    Fun,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Atom {
    IsDatatypeVar(String),
    OccursInConclusion(String),
    IsRecursive(String),
    AtRecArgpos(String, String),
    AtVaryingArgpos(String, String),
    UsesRule,
    RuleFunctionOccursInGoal,
    CountOn(usize),
    CountArbitrary(usize),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FeatureExpr {
    Const(bool),
    Not(Box<FeatureExpr>),
    And(Box<FeatureExpr>, Box<FeatureExpr>),
    Or(Box<FeatureExpr>, Box<FeatureExpr>),
    Implies(Box<FeatureExpr>, Box<FeatureExpr>),
    Quant {
        all: bool,
        domain: Domain,
        var: String,
        body: Box<FeatureExpr>,
    },
    QuantOcc {
        all: bool,
        var: String,
        of: String,
        body: Box<FeatureExpr>,
    },
    Atom(Atom),
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Ident(String),
    Num(usize),
    Punct(&'static str),
    Eof,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    scope: Vec<(String, Kind)>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Kind {
    Var,
    Fun,
    Occ,
}

impl Parser {
    fn new(text: &str, line: usize) -> Result<Self, MlError> {
        let chars: Vec<char> = text.chars().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                toks.push((Tok::Ident(chars[start..i].iter().collect()), col));
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse().map_err(|_| syntax(line, col, "number too large"))?;
                toks.push((Tok::Num(n), col));
            } else {
                let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
                let p = ["->", "<=", "(", ")", ",", "."]
                    .into_iter()
                    .find(|p| rest.starts_with(p))
                    .ok_or_else(|| syntax(line, col, &format!("unexpected character '{c}'")))?;
                i += p.len();
                toks.push((Tok::Punct(p), col));
            }
        }
        toks.push((Tok::Eof, chars.len() + 1));
        Ok(Parser {
            toks,
            pos: 0,
            line,
            scope: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> MlError {
        let (t, col) = &self.toks[self.pos];
        let found = match t {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Num(n) => n.to_string(),
            Tok::Punct(p) => format!("'{p}'"),
            Tok::Eof => "end of line".into(),
        };
        syntax(self.line, *col, &format!("expected {expected}, found {found}"))
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Tok::Punct(q) if *q == p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), MlError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(&format!("'{p}'")))
        }
    }

    fn ident(&mut self) -> Result<String, MlError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error("identifier")),
        }
    }

    fn bound(&self, name: &str, kind: Kind) -> Result<(), MlError> {
        match self.scope.iter().rev().find(|(n, _)| n == name) {
            Some((_, k)) if *k == kind => Ok(()),
            Some(_) => Err(syntax(self.line, self.toks[self.pos].1, &format!("'{name}' has the wrong kind"))),
            None => Err(syntax(self.line, self.toks[self.pos].1, &format!("unbound variable '{name}'"))),
        }
    }

    fn expr(&mut self) -> Result<FeatureExpr, MlError> {
        let lhs = self.or()?;
        if self.eat_punct("->") {
            let rhs = self.expr()?;
            return Ok(FeatureExpr::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<FeatureExpr, MlError> {
        let mut e = self.and()?;
        while self.is_word("or") {
            self.bump();
            e = FeatureExpr::Or(Box::new(e), Box::new(self.and()?));
        }
        Ok(e)
    }

    fn and(&mut self) -> Result<FeatureExpr, MlError> {
        let mut e = self.unary()?;
        while self.is_word("and") {
            self.bump();
            e = FeatureExpr::And(Box::new(e), Box::new(self.unary()?));
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<FeatureExpr, MlError> {
        if self.eat_punct("(") {
            let e = self.expr()?;
            self.expect_punct(")")?;
            return Ok(e);
        }
        let word = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.error("assertion")),
        };
        match word.as_str() {
            "not" => {
                self.bump();
                Ok(FeatureExpr::Not(Box::new(self.unary()?)))
            }
            "all" | "some" => self.quant(word == "all"),
            "true" | "false" => {
                self.bump();
                Ok(FeatureExpr::Const(word == "true"))
            }
            _ => self.atom(),
        }
    }

    fn quant(&mut self, all: bool) -> Result<FeatureExpr, MlError> {
        self.bump();
        let dom = self.ident()?;
        let (domain, kind) = match dom.as_str() {
            "ind" => (Some(Domain::Ind), Kind::Var),
            "arb" => (Some(Domain::Arb), Kind::Var),
            "fun" => (Some(Domain::Fun), Kind::Fun),
            "occ" => (None, Kind::Occ),
            _ => {
                self.pos -= 1;
                return Err(self.error("'ind', 'arb', 'fun' or 'occ'"));
            }
        };
        let var = self.ident()?;
        let of = if domain.is_none() {
            if !self.is_word("of") {
                return Err(self.error("'of'"));
            }
            self.bump();
            let v = self.ident()?;
            self.bound(&v, Kind::Var)?;
            Some(v)
        } else {
            None
        };
        self.expect_punct(".")?;
        self.scope.push((var.clone(), kind));
        let body = Box::new(self.expr()?);
        self.scope.pop();
        Ok(match (domain, of) {
            (Some(domain), _) => FeatureExpr::Quant { all, domain, var, body },
            (None, Some(of)) => FeatureExpr::QuantOcc { all, var, of, body },
            (None, None) => unreachable!("occ quantifier always has 'of'"),
        })
    }

    fn args(&mut self, n: usize) -> Result<Vec<String>, MlError> {
        self.expect_punct("(")?;
        let mut out = vec![self.ident()?];
        while out.len() < n {
            self.expect_punct(",")?;
            out.push(self.ident()?);
        }
        self.expect_punct(")")?;
        Ok(out)
    }

    fn atom(&mut self) -> Result<FeatureExpr, MlError> {
        let name = self.ident()?;
        let atom = match name.as_str() {
            "uses_rule" => Atom::UsesRule,
            "rule_function_occurs_in_goal" => Atom::RuleFunctionOccursInGoal,
            "count_on" | "count_arbitrary" => {
                self.expect_punct("<=")?;
                let k = match self.bump() {
                    Tok::Num(k) => k,
                    _ => {
                        self.pos -= 1;
                        return Err(self.error("number"));
                    }
                };
                if name == "count_on" {
                    Atom::CountOn(k)
                } else {
                    Atom::CountArbitrary(k)
                }
            }
            "is_datatype_var" | "occurs_in_conclusion" => {
                let a = self.args(1)?.remove(0);
                self.bound(&a, Kind::Var)?;
                if name == "is_datatype_var" {
                    Atom::IsDatatypeVar(a)
                } else {
                    Atom::OccursInConclusion(a)
                }
            }
            "is_recursive" => {
                let a = self.args(1)?.remove(0);
                self.fun_arg(&a)?;
                Atom::IsRecursive(a)
            }
            "at_rec_argpos" | "at_varying_argpos" => {
                let mut a = self.args(2)?;
                let f = a.pop().expect("two arguments");
                let o = a.pop().expect("two arguments");
                self.bound(&o, Kind::Occ)?;
                self.fun_arg(&f)?;
                if name == "at_rec_argpos" {
                    Atom::AtRecArgpos(o, f)
                } else {
                    Atom::AtVaryingArgpos(o, f)
                }
            }
            _ => {
                self.pos -= 1;
                return Err(self.error("assertion"));
            }
        };
        Ok(FeatureExpr::Atom(atom))
    }

    /// A function argument is either a bound `fun` variable or a literal
    /// function name.
    fn fun_arg(&self, name: &str) -> Result<(), MlError> {
        match self.scope.iter().rev().find(|(n, _)| n == name) {
            Some((_, Kind::Fun)) | None => Ok(()),
            Some(_) => Err(syntax(self.line, self.toks[self.pos].1, &format!("'{name}' is not a function"))),
        }
    }
}

fn syntax(line: usize, column: usize, message: &str) -> MlError {
    MlError::Syntax {
        line,
        column,
        message: message.to_string(),
    }
}

pub fn parse_feature(text: &str) -> Result<FeatureExpr, MlError> {
    parse_feature_at(text, 1)
}

fn parse_feature_at(text: &str, line: usize) -> Result<FeatureExpr, MlError> {
    let mut p = Parser::new(text, line)?;
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("end of assertion"));
    }
    Ok(e)
}

#[derive(Clone, PartialEq, Debug, Default)]
pub struct FeatureSet {
    pub names: Vec<String>,
    pub exprs: Vec<FeatureExpr>,
}

impl FeatureSet {
    /// One assertion per line, optionally `name: assertion`; `#` comments.
    pub fn parse(text: &str) -> Result<Self, MlError> {
        let mut set = FeatureSet::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let (name, body, offset) = match line.split_once(':') {
                Some((n, b)) if is_name(n.trim()) => (n.trim().to_string(), b, n.len() + 1),
                _ => (format!("f{}", set.exprs.len() + 1), line, 0),
            };
            let expr = parse_feature_at(body, i + 1).map_err(|e| match e {
                MlError::Syntax { line, column, message } => MlError::Syntax {
                    line,
                    column: column + offset,
                    message,
                },
                other => other,
            })?;
            set.names.push(name);
            set.exprs.push(expr);
        }
        Ok(set)
    }

    pub fn default_set() -> Self {
        FeatureSet::parse(DEFAULT_FEATURES).expect("shipped feature set parses")
    }

    pub fn len(&self) -> usize {
        self.exprs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exprs.is_empty()
    }
}

fn is_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct FeatureVector(pub Vec<bool>);

impl fmt::Display for FeatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Debug, Default)]
pub struct Weights(pub Vec<f64>);

impl Weights {
    pub fn parse(text: &str) -> Result<Self, MlError> {
        text.lines()
            .flat_map(|l| l.split('#').next().unwrap_or("").split_whitespace())
            .map(|w| match w.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(MlError::BadWeight(w.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Weights)
    }

    pub fn default_weights() -> Self {
        Weights::parse(DEFAULT_WEIGHTS).expect("shipped weights parse")
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.0 {
            writeln!(f, "{w}")?;
        }
        Ok(())
    }
}

/// An occurrence of a variable: the function application it is an argument
/// of (if any), and whether it lies in the conclusion.
#[derive(Clone, PartialEq, Eq, Debug)]
struct Occurrence {
    parent: Option<(Sym, usize)>,
}

#[derive(Clone, Debug)]
enum Value {
    Var(Var),
    Fun(Sym),
    Occ(Occurrence),
}

struct Ctx<'a> {
    sequent: &'a Sequent,
    args: &'a InductArgs,
    theory: &'a Theory,
    vars: Vec<Var>,
}

impl Ctx<'_> {
    fn lookup_var(&self, name: &str) -> Option<Var> {
        self.vars.iter().find(|v| &*v.name == name).cloned()
    }

    fn domain(&self, d: Domain) -> Vec<Value> {
        match d {
            Domain::Ind => self.args.on.iter().filter_map(|n| self.lookup_var(n)).map(Value::Var).collect(),
            Domain::Arb => self.args.arbitrary.iter().filter_map(|n| self.lookup_var(n)).map(Value::Var).collect(),
            Domain::Fun => {
                let mut out: Vec<Sym> = Vec::new();
                for t in target_terms(self.sequent) {
                    for s in t.subterms() {
                        if let Term::App(h, _) = s {
                            if self.theory.function(h).is_some() && !out.contains(h) {
                                out.push(h.clone());
                            }
                        }
                    }
                }
                out.into_iter().map(Value::Fun).collect()
            }
        }
    }

    fn occurrences(&self, v: &Var) -> Vec<Value> {
        fn walk(t: &Term, v: &Var, parent: Option<(Sym, usize)>, out: &mut Vec<Value>) {
            match t {
                Term::Var(w) if w == v => out.push(Value::Occ(Occurrence { parent })),
                Term::Var(_) => {}
                Term::App(h, args) => {
                    for (i, a) in args.iter().enumerate() {
                        walk(a, v, Some((h.clone(), i)), out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        for t in target_terms(self.sequent) {
            walk(t, v, None, &mut out);
        }
        out
    }
}

fn target_terms(s: &Sequent) -> impl Iterator<Item = &Term> {
    s.target
        .premises
        .iter()
        .chain(std::iter::once(&s.target.conclusion))
        .flat_map(|e| [&e.lhs, &e.rhs])
}

type Env = Vec<(String, Value)>;

fn lookup<'e>(env: &'e Env, name: &str) -> Option<&'e Value> {
    env.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
}

fn eval_expr(e: &FeatureExpr, ctx: &Ctx, env: &mut Env) -> bool {
    match e {
        FeatureExpr::Const(b) => *b,
        FeatureExpr::Not(a) => !eval_expr(a, ctx, env),
        FeatureExpr::And(a, b) => eval_expr(a, ctx, env) && eval_expr(b, ctx, env),
        FeatureExpr::Or(a, b) => eval_expr(a, ctx, env) || eval_expr(b, ctx, env),
        FeatureExpr::Implies(a, b) => !eval_expr(a, ctx, env) || eval_expr(b, ctx, env),
        FeatureExpr::Quant { all, domain, var, body } => quantify(*all, ctx.domain(*domain), var, body, ctx, env),
        FeatureExpr::QuantOcc { all, var, of, body } => {
            let dom = match lookup(env, of) {
                Some(Value::Var(v)) => ctx.occurrences(v),
                _ => Vec::new(),
            };
            quantify(*all, dom, var, body, ctx, env)
        }
        FeatureExpr::Atom(a) => eval_atom(a, ctx, env),
    }
}

fn quantify(all: bool, dom: Vec<Value>, var: &str, body: &FeatureExpr, ctx: &Ctx, env: &mut Env) -> bool {
    for v in dom {
        env.push((var.to_string(), v));
        let b = eval_expr(body, ctx, env);
        env.pop();
        if b != all {
            return !all;
        }
    }
    all
}

fn eval_atom(a: &Atom, ctx: &Ctx, env: &Env) -> bool {
    let var = |n: &str| match lookup(env, n) {
        Some(Value::Var(v)) => Some(v.clone()),
        _ => None,
    };
    let fun = |n: &str| match lookup(env, n) {
        Some(Value::Fun(f)) => ctx.theory.function(f),
        Some(_) => None,
        None => ctx.theory.function(n),
    };
    let occ = |n: &str| match lookup(env, n) {
        Some(Value::Occ(o)) => o.parent.clone(),
        _ => None,
    };
    match a {
        Atom::IsDatatypeVar(v) => var(v).map_or(false, |v| ctx.theory.datatype(&v.ty).is_some()),
        Atom::OccursInConclusion(v) => var(v).map_or(false, |v| {
            let c = &ctx.sequent.target.conclusion;
            c.lhs.contains_var(&v) || c.rhs.contains_var(&v)
        }),
        Atom::IsRecursive(f) => fun(f).map_or(false, |f| f.is_recursive()),
        Atom::AtRecArgpos(o, f) | Atom::AtVaryingArgpos(o, f) => {
            let (Some((parent, i)), Some(def)) = (occ(o), fun(f)) else {
                return false;
            };
            parent == def.name
                && if matches!(a, Atom::AtRecArgpos(..)) {
                    def.recurses_on(i)
                } else {
                    def.varies_at(i)
                }
        }
        Atom::UsesRule => ctx.args.rule.is_some(),
        Atom::RuleFunctionOccursInGoal => {
            let Some(rule) = &ctx.args.rule else {
                return false;
            };
            target_terms(ctx.sequent).any(|t| {
                t.subterms().into_iter().any(|s| match s {
                    Term::App(h, xs) if h == rule => {
                        xs.len() == ctx.args.on.len()
                            && xs.iter().zip(&ctx.args.on).all(|(x, n)| x.as_var().map_or(false, |v| v.name == *n))
                    }
                    _ => false,
                })
            })
        }
        Atom::CountOn(k) => ctx.args.on.len() <= *k,
        Atom::CountArbitrary(k) => ctx.args.arbitrary.len() <= *k,
    }
}

pub fn eval_feature(expr: &FeatureExpr, sequent: &Sequent, args: &InductArgs, theory: &Theory) -> bool {
    let ctx = Ctx {
        sequent,
        args,
        theory,
        vars: sequent.target.vars(),
    };
    eval_expr(expr, &ctx, &mut Vec::new())
}

pub fn extract(sequent: &Sequent, args: &InductArgs, set: &FeatureSet, theory: &Theory) -> FeatureVector {
    FeatureVector(set.exprs.iter().map(|e| eval_feature(e, sequent, args, theory)).collect())
}

pub fn score(v: &FeatureVector, w: &Weights) -> Result<f64, MlError> {
    if v.0.len() != w.0.len() {
        return Err(MlError::LengthMismatch(w.0.len(), v.0.len()));
    }
    Ok(v.0.iter().zip(&w.0).filter(|(b, _)| **b).map(|(_, x)| x).sum())
}

#[derive(Clone, PartialEq, Debug)]
pub struct Ranked {
    pub args: InductArgs,
    pub vector: FeatureVector,
    pub score: f64,
}

/// Stable sort by descending score.
pub fn rank(candidates: Vec<(InductArgs, FeatureVector)>, w: &Weights) -> Result<Vec<Ranked>, MlError> {
    let mut out = candidates
        .into_iter()
        .map(|(args, vector)| {
            let score = score(&vector, w)?;
            Ok(Ranked { args, vector, score })
        })
        .collect::<Result<Vec<_>, MlError>>()?;
    out.sort_by(|a, b| b.score.total_cmp(&a.score));
    Ok(out)
}

/// A feature set with aligned weights.
#[derive(Clone, PartialEq, Debug)]
pub struct Ranker {
    pub features: FeatureSet,
    pub weights: Weights,
}

impl Default for Ranker {
    fn default() -> Self {
        Ranker {
            features: FeatureSet::default_set(),
            weights: Weights::default_weights(),
        }
    }
}

impl Ranker {
    pub fn new(features: FeatureSet, weights: Weights) -> Result<Self, MlError> {
        if features.len() != weights.0.len() {
            return Err(MlError::LengthMismatch(weights.0.len(), features.len()));
        }
        Ok(Ranker { features, weights })
    }

    pub fn rank(&self, sequent: &Sequent, theory: &Theory, candidates: Vec<InductArgs>) -> Vec<Ranked> {
        let pairs = candidates
            .into_iter()
            .map(|a| {
                let v = extract(sequent, &a, &self.features, theory);
                (a, v)
            })
            .collect();
        rank(pairs, &self.weights).expect("lengths checked at construction")
    }
}

#[derive(Clone, Debug)]
pub struct CorpusExample<'t> {
    pub theory: &'t Theory,
    pub goal: Sym,
    pub chosen: InductArgs,
}

fn same_args(a: &InductArgs, b: &InductArgs) -> bool {
    let mut x = a.arbitrary.clone();
    let mut y = b.arbitrary.clone();
    x.sort();
    y.sort();
    a.on == b.on && a.rule == b.rule && x == y
}

/// Add-one smoothed log-odds per feature:
/// `log((Pj+1)/(P+2)) - log((Nj+1)/(N+2))`.
pub fn fit_weights(corpus: &[CorpusExample], set: &FeatureSet, limits: InductLimits) -> Result<Weights, MlError> {
    let n_feat = set.len();
    let (mut p, mut n) = (0usize, 0usize);
    let mut pj = vec![0usize; n_feat];
    let mut nj = vec![0usize; n_feat];
    for ex in corpus {
        let goal = ex
            .theory
            .goal(&ex.goal)
            .ok_or_else(|| MlError::UnknownGoal(ex.goal.to_string()))?;
        let seq = Sequent::root(&goal.formula);
        let cands = candidate_applications(&seq, ex.theory, limits);
        if !cands.iter().any(|c| same_args(c, &ex.chosen)) {
            return Err(MlError::UnknownChoice {
                goal: ex.goal.to_string(),
                args: ex.chosen.to_string(),
            });
        }
        for c in &cands {
            let v = extract(&seq, c, set, ex.theory);
            let (total, counts) = if same_args(c, &ex.chosen) {
                (&mut p, &mut pj)
            } else {
                (&mut n, &mut nj)
            };
            *total += 1;
            for (k, b) in v.0.iter().enumerate() {
                if *b {
                    counts[k] += 1;
                }
            }
        }
    }
    let lo = |k: usize, t: usize| ((k as f64 + 1.0) / (t as f64 + 2.0)).ln();
    Ok(Weights((0..n_feat).map(|j| lo(pj[j], p) - lo(nj[j], n)).collect()))
}

/// `<theory-path> <goal-name> induct <vars> [arbitrary: <vars>] [rule: <f>]`
pub fn parse_corpus_line(line: &str) -> Result<Option<(String, Sym, InductArgs)>, String> {
    let line = line.split('#').next().unwrap_or("").trim();
    if line.is_empty() {
        return Ok(None);
    }
    let mut parts = line.splitn(3, char::is_whitespace);
    let (Some(path), Some(goal), Some(rest)) = (parts.next(), parts.next(), parts.next()) else {
        return Err("expected '<theory> <goal> induct ...'".into());
    };
    let args = parse_induct_args(rest.trim()).map_err(|e: ParseError| e.to_string())?;
    Ok(Some((path.to_string(), Sym::from(goal), args)))
}

/// Parse a corpus file into `(theory path, goal, chosen arguments)` entries.
pub fn parse_corpus(text: &str) -> Result<Vec<(String, Sym, InductArgs)>, MlError> {
    let mut out = Vec::new();
    for (i, l) in text.lines().enumerate() {
        match parse_corpus_line(l) {
            Ok(Some(e)) => out.push(e),
            Ok(None) => {}
            Err(m) => return Err(MlError::Corpus(i + 1, m)),
        }
    }
    Ok(out)
}

/// Distinct theory paths of a corpus in first-occurrence order.
pub fn corpus_paths(entries: &[(String, Sym, InductArgs)]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for (p, _, _) in entries {
        if !out.contains(p) {
            out.push(p.clone());
        }
    }
    out
}

//! Concrete syntax: lexer, recursive-descent parsers and printers for theory
//! files, formulas, strategies and proof scripts.
//!
//! Application is prefix and greedy, but an unparenthesised argument list
//! never continues onto a new line; terms that span lines must be
//! parenthesised. Variable types are inferred from the signatures of the
//! symbols they appear under; `(x :: T)` annotates a variable explicitly.

use std::collections::HashMap;
use std::fmt;

use crate::induct::InductArgs;
use crate::kernel::{
    check_theory, sym, CtorDef, DatatypeDef, Equation, Formula, FunEquation, FunctionDef, Location,
    NamedFormula, Sym, Term, Theory, Type, Var,
};
use crate::psl::{DynamicKind, ProofScript, ProofStep, Strategy};

pub const KEYWORDS: &[&str] = &["theory", "datatype", "fun", "goal", "lemma"];

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct SourcePos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
#[error("{pos}: expected {expected}, found {found}")]
pub struct ParseError {
    pub pos: SourcePos,
    pub expected: String,
    pub found: String,
}

impl ParseError {
    fn new(pos: SourcePos, expected: impl Into<String>, found: impl Into<String>) -> Self {
        ParseError {
            pos,
            expected: expected.into(),
            found: found.into(),
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub(crate) enum Tok {
    Ident(Sym),
    Num(u64),
    Str(String),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Num(n) => write!(f, "'{n}'"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Punct(p) => write!(f, "'{p}'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: SourcePos,
    /// First token on its line.
    pub line_start: bool,
}

const PUNCTS: &[&str] = &[
    "==>", "::", "->", "<=", "=", "|", "(", ")", ":", "[", "]", ",", ".",
];

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut fresh_line = true;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            fresh_line = true;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let pos = SourcePos { line, column: col };
        let line_start = std::mem::replace(&mut fresh_line, false);
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Ident(sym(&s)), pos, line_start });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            let n = s
                .parse::<u64>()
                .map_err(|_| ParseError::new(pos, "natural number", s.clone()))?;
            out.push(Token { tok: Tok::Num(n), pos, line_start });
            continue;
        }
        if c == '"' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                j += 1;
            }
            if j >= chars.len() || chars[j] != '"' {
                let end = SourcePos { line, column: col + (j - i) };
                return Err(ParseError::new(end, "closing '\"'", "end of line"));
            }
            let s: String = chars[start..j].iter().collect();
            col += j + 1 - i;
            i = j + 1;
            out.push(Token { tok: Tok::Str(s), pos, line_start });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                i += p.len();
                col += p.len();
                out.push(Token { tok: Tok::Punct(p), pos, line_start });
            }
            None => return Err(ParseError::new(pos, "token", format!("'{c}'"))),
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: SourcePos { line, column: col },
        line_start: true,
    });
    Ok(out)
}

/// Untyped term as written, before signature-driven elaboration.
#[derive(Clone, Debug)]
struct Raw {
    name: Sym,
    args: Vec<Raw>,
    pos: SourcePos,
    annot: Option<Type>,
}

pub(crate) struct Cursor {
    toks: Vec<Token>,
    idx: usize,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Cursor { toks: tokenize(text)?, idx: 0 })
    }

    pub(crate) fn peek(&self) -> &Token {
        &self.toks[self.idx]
    }

    pub(crate) fn bump(&mut self) -> Token {
        let t = self.toks[self.idx].clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    pub(crate) fn at_eof(&self) -> bool {
        matches!(self.peek().tok, Tok::Eof)
    }

    pub(crate) fn error(&self, expected: &str) -> ParseError {
        let t = self.peek();
        ParseError::new(t.pos, expected, t.tok.to_string())
    }

    pub(crate) fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek().tok, Tok::Punct(q) if q == p)
    }

    pub(crate) fn is_ident(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(q) if &**q == s)
    }

    pub(crate) fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect_punct(&mut self, p: &str) -> Result<SourcePos, ParseError> {
        if self.is_punct(p) {
            Ok(self.bump().pos)
        } else {
            Err(self.error(&format!("'{p}'")))
        }
    }

    pub(crate) fn expect_ident(&mut self, what: &str) -> Result<(Sym, SourcePos), ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) if !KEYWORDS.contains(&&**s) => {
                let s = s.clone();
                Ok((s, self.bump().pos))
            }
            _ => Err(self.error(what)),
        }
    }

    pub(crate) fn expect_keyword(&mut self, kw: &str) -> Result<SourcePos, ParseError> {
        if self.is_ident(kw) {
            Ok(self.bump().pos)
        } else {
            Err(self.error(&format!("'{kw}'")))
        }
    }

    pub(crate) fn expect_num(&mut self) -> Result<u64, ParseError> {
        match self.peek().tok {
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.error("number")),
        }
    }

    fn atom_starts(&self) -> bool {
        match &self.peek().tok {
            Tok::Punct("(") => true,
            Tok::Ident(s) => !KEYWORDS.contains(&&**s),
            _ => false,
        }
    }

    fn raw_term(&mut self) -> Result<Raw, ParseError> {
        if self.is_punct("(") {
            return self.raw_atom();
        }
        let (name, pos) = self.expect_ident("term")?;
        let mut args = Vec::new();
        while self.atom_starts() && !self.peek().line_start {
            args.push(self.raw_atom()?);
        }
        Ok(Raw { name, args, pos, annot: None })
    }

    fn raw_atom(&mut self) -> Result<Raw, ParseError> {
        if self.eat_punct("(") {
            let (name, pos) = self.expect_ident("identifier")?;
            if self.eat_punct("::") {
                let (ty, _) = self.expect_ident("type")?;
                self.expect_punct(")")?;
                return Ok(Raw { name, args: Vec::new(), pos, annot: Some(Type(ty)) });
            }
            let mut args = Vec::new();
            while !self.is_punct(")") {
                if !self.atom_starts() {
                    return Err(self.error("term or ')'"));
                }
                args.push(self.raw_atom()?);
            }
            self.bump();
            Ok(Raw { name, args, pos, annot: None })
        } else {
            let (name, pos) = self.expect_ident("term")?;
            Ok(Raw { name, args: Vec::new(), pos, annot: None })
        }
    }

    fn raw_equation(&mut self) -> Result<(Raw, Raw), ParseError> {
        let lhs = self.raw_term()?;
        self.expect_punct("=")?;
        let rhs = self.raw_term()?;
        Ok((lhs, rhs))
    }

    fn raw_formula(&mut self) -> Result<Vec<(Raw, Raw)>, ParseError> {
        let mut eqs = vec![self.raw_equation()?];
        while self.eat_punct("==>") {
            eqs.push(self.raw_equation()?);
        }
        Ok(eqs)
    }
}

/// Signature-driven typing of raw terms.
struct Elab<'t> {
    theory: &'t Theory,
    env: HashMap<Sym, Type>,
}

impl<'t> Elab<'t> {
    fn new(theory: &'t Theory) -> Self {
        Elab { theory, env: HashMap::new() }
    }

    fn check_annot(&mut self, r: &Raw) -> Result<(), ParseError> {
        if let Some(ty) = &r.annot {
            if self.theory.datatype(ty).is_none() {
                return Err(ParseError::new(r.pos, "declared type", ty.to_string()));
            }
            self.bind(r, ty)?;
        }
        Ok(())
    }

    fn bind(&mut self, r: &Raw, ty: &Type) -> Result<(), ParseError> {
        match self.env.get(&r.name) {
            Some(t) if t != ty => Err(ParseError::new(
                r.pos,
                format!("{} of type {ty}", r.name),
                format!("variable of type {t}"),
            )),
            Some(_) => Ok(()),
            None => {
                self.env.insert(r.name.clone(), ty.clone());
                Ok(())
            }
        }
    }

    fn infer(&mut self, r: &Raw) -> Result<Option<Type>, ParseError> {
        match self.theory.symbol(&r.name) {
            Some(s) => {
                let want = s.arg_types();
                if want.len() != r.args.len() {
                    return Err(ParseError::new(
                        r.pos,
                        format!("{} argument(s) for {}", want.len(), r.name),
                        format!("{} argument(s) (arity mismatch)", r.args.len()),
                    ));
                }
                for (a, ty) in r.args.iter().zip(want) {
                    self.constrain(a, ty)?;
                }
                Ok(Some(s.ret().clone()))
            }
            None => {
                if !r.args.is_empty() {
                    return Err(ParseError::new(r.pos, "declared function or constructor", format!("'{}'", r.name)));
                }
                self.check_annot(r)?;
                Ok(self.env.get(&r.name).cloned())
            }
        }
    }

    fn constrain(&mut self, r: &Raw, ty: &Type) -> Result<(), ParseError> {
        if self.theory.symbol(&r.name).is_some() {
            let got = self.infer(r)?.expect("symbols have a type");
            if &got != ty {
                return Err(ParseError::new(r.pos, format!("term of type {ty}"), format!("'{}' of type {got}", r.name)));
            }
            Ok(())
        } else {
            if !r.args.is_empty() {
                return Err(ParseError::new(r.pos, "declared function or constructor", format!("'{}'", r.name)));
            }
            self.check_annot(r)?;
            self.bind(r, ty)
        }
    }

    fn solve(&mut self, eqs: &[(Raw, Raw)]) -> Result<(), ParseError> {
        loop {
            let before = self.env.len();
            for (l, r) in eqs {
                let lt = self.infer(l)?;
                let rt = self.infer(r)?;
                match (lt, rt) {
                    (Some(a), Some(b)) if a != b => {
                        return Err(ParseError::new(r.pos, format!("term of type {a}"), format!("term of type {b}")));
                    }
                    (Some(a), None) => self.constrain(r, &a)?,
                    (None, Some(b)) => self.constrain(l, &b)?,
                    _ => {}
                }
            }
            if self.env.len() == before {
                return Ok(());
            }
        }
    }

    fn build(&self, r: &Raw) -> Result<Term, ParseError> {
        if self.theory.symbol(&r.name).is_some() {
            let args = r.args.iter().map(|a| self.build(a)).collect::<Result<_, _>>()?;
            Ok(Term::App(r.name.clone(), args))
        } else {
            match self.env.get(&r.name) {
                Some(ty) => Ok(Term::Var(Var { name: r.name.clone(), ty: ty.clone() })),
                None => Err(ParseError::new(
                    r.pos,
                    format!("context determining the type of '{}'", r.name),
                    "ambiguous variable",
                )),
            }
        }
    }

    fn formula(&mut self, eqs: &[(Raw, Raw)]) -> Result<Formula, ParseError> {
        self.solve(eqs)?;
        let mut built = eqs
            .iter()
            .map(|(l, r)| Ok(Equation::new(self.build(l)?, self.build(r)?)))
            .collect::<Result<Vec<_>, ParseError>>()?;
        let conclusion = built.pop().expect("formula has a conclusion");
        Ok(Formula::new(built, conclusion))
    }
}

fn parse_formula_in(cur: &mut Cursor, theory: &Theory) -> Result<Formula, ParseError> {
    let raw = cur.raw_formula()?;
    Elab::new(theory).formula(&raw)
}

pub fn parse_formula(text: &str, theory: &Theory) -> Result<Formula, ParseError> {
    let mut cur = Cursor::new(text)?;
    let f = parse_formula_in(&mut cur, theory)?;
    if !cur.at_eof() {
        return Err(cur.error("end of formula"));
    }
    Ok(f)
}

pub fn parse_term(text: &str, theory: &Theory) -> Result<Term, ParseError> {
    let mut cur = Cursor::new(text)?;
    let raw = cur.raw_term()?;
    if !cur.at_eof() {
        return Err(cur.error("end of term"));
    }
    let mut el = Elab::new(theory);
    el.infer(&raw)?;
    el.build(&raw)
}

struct TheoryParser {
    cur: Cursor,
    theory: Theory,
    locations: HashMap<Location, SourcePos>,
}

impl TheoryParser {
    fn item(&mut self) -> Result<(), ParseError> {
        if self.cur.is_ident("datatype") {
            self.datatype()
        } else if self.cur.is_ident("fun") {
            self.fundef()
        } else if self.cur.is_ident("goal") || self.cur.is_ident("lemma") {
            self.named_formula()
        } else {
            Err(self.cur.error("'datatype', 'fun', 'goal' or 'lemma'"))
        }
    }

    fn type_name(&mut self) -> Result<Type, ParseError> {
        let (name, pos) = self.cur.expect_ident("type")?;
        let ty = Type(name);
        if self.theory.datatype(&ty).is_none() {
            return Err(ParseError::new(pos, "declared type", ty.to_string()));
        }
        Ok(ty)
    }

    fn fresh_symbol(&self, name: &Sym, pos: SourcePos) -> Result<(), ParseError> {
        if self.theory.symbol(name).is_some() {
            return Err(ParseError::new(pos, "fresh name", format!("duplicate name '{name}'")));
        }
        Ok(())
    }

    fn datatype(&mut self) -> Result<(), ParseError> {
        let kw = self.cur.bump().pos;
        let (name, pos) = self.cur.expect_ident("datatype name")?;
        let ty = Type(name.clone());
        if self.theory.datatype(&ty).is_some() {
            return Err(ParseError::new(pos, "fresh type name", format!("duplicate datatype '{name}'")));
        }
        self.locations.insert(Location::Datatype(name.clone()), kw);
        self.theory.datatypes.push(DatatypeDef { name: ty, ctors: Vec::new() });
        self.cur.expect_punct("=")?;
        loop {
            let (cname, cpos) = self.cur.expect_ident("constructor")?;
            self.fresh_symbol(&cname, cpos)?;
            let mut args = Vec::new();
            while matches!(&self.cur.peek().tok, Tok::Ident(s) if !KEYWORDS.contains(&&**s)) {
                args.push(self.type_name()?);
            }
            self.theory
                .datatypes
                .last_mut()
                .expect("just pushed")
                .ctors
                .push(CtorDef { name: cname, args });
            if !self.cur.eat_punct("|") {
                return Ok(());
            }
        }
    }

    fn fundef(&mut self) -> Result<(), ParseError> {
        let kw = self.cur.bump().pos;
        let (name, pos) = self.cur.expect_ident("function name")?;
        self.fresh_symbol(&name, pos)?;
        self.cur.expect_punct("::")?;
        let mut tys = vec![self.type_name()?];
        self.cur.expect_punct("->")?;
        tys.push(self.type_name()?);
        while self.cur.eat_punct("->") {
            tys.push(self.type_name()?);
        }
        let ret = tys.pop().expect("at least two types");
        self.locations.insert(Location::Function(name.clone(), None), kw);
        self.theory.functions.push(FunctionDef {
            name: name.clone(),
            arg_types: tys,
            ret,
            equations: Vec::new(),
        });
        let idx = self.theory.functions.len() - 1;
        if !self.cur.is_ident(&name) {
            return Err(self.cur.error(&format!("equation for '{name}'")));
        }
        while self.cur.is_ident(&name) {
            let eq_pos = self.cur.bump().pos;
            let mut pats = Vec::new();
            while !self.cur.is_punct("=") {
                if !self.cur.atom_starts() {
                    return Err(self.cur.error("pattern or '='"));
                }
                pats.push(self.cur.raw_atom()?);
            }
            self.cur.bump();
            let rhs = self.cur.raw_term()?;
            let f = &self.theory.functions[idx];
            if pats.len() != f.arity() {
                return Err(ParseError::new(
                    eq_pos,
                    format!("{} pattern(s) for {name}", f.arity()),
                    format!("{} pattern(s) (arity mismatch)", pats.len()),
                ));
            }
            let arg_types = f.arg_types.clone();
            let ret = f.ret.clone();
            let mut el = Elab::new(&self.theory);
            for (p, ty) in pats.iter().zip(&arg_types) {
                el.constrain(p, ty)?;
            }
            el.constrain(&rhs, &ret)?;
            let patterns = pats.iter().map(|p| el.build(p)).collect::<Result<Vec<_>, _>>()?;
            let rhs = el.build(&rhs)?;
            let n = self.theory.functions[idx].equations.len();
            self.locations.insert(Location::Function(name.clone(), Some(n)), eq_pos);
            self.theory.functions[idx].equations.push(FunEquation { patterns, rhs });
        }
        Ok(())
    }

    fn named_formula(&mut self) -> Result<(), ParseError> {
        let is_goal = self.cur.is_ident("goal");
        let kw = self.cur.bump().pos;
        let (name, _) = self.cur.expect_ident("name")?;
        self.cur.expect_punct(":")?;
        let formula = parse_formula_in(&mut self.cur, &self.theory)?;
        let nf = NamedFormula { name: name.clone(), formula };
        if is_goal {
            self.locations.insert(Location::Goal(name), kw);
            self.theory.goals.push(nf);
        } else {
            self.locations.insert(Location::Lemma(name), kw);
            self.theory.lemmas.push(nf);
        }
        Ok(())
    }
}

pub fn parse_theory(text: &str) -> Result<Theory, ParseError> {
    let mut p = TheoryParser {
        cur: Cursor::new(text)?,
        theory: Theory::default(),
        locations: HashMap::new(),
    };
    p.cur.expect_keyword("theory")?;
    let (name, _) = p.cur.expect_ident("theory name")?;
    p.theory.name = name.to_string();
    while !p.cur.at_eof() {
        p.item()?;
    }
    if let Some(d) = check_theory(&p.theory).into_iter().next() {
        let pos = p
            .locations
            .get(&d.location)
            .or_else(|| match &d.location {
                Location::Function(n, Some(_)) => p.locations.get(&Location::Function(n.clone(), None)),
                _ => None,
            })
            .copied()
            .unwrap_or(SourcePos { line: 1, column: 1 });
        return Err(ParseError::new(pos, "well-formed definitions", d.to_string()));
    }
    Ok(p.theory)
}

fn write_atom(out: &mut String, t: &Term) {
    match t {
        Term::App(_, args) if !args.is_empty() => {
            out.push('(');
            write_term(out, t);
            out.push(')');
        }
        _ => write_term(out, t),
    }
}

fn write_term(out: &mut String, t: &Term) {
    match t {
        Term::Var(v) => out.push_str(&v.name),
        Term::App(h, args) => {
            out.push_str(h);
            for a in args {
                out.push(' ');
                write_atom(out, a);
            }
        }
    }
}

pub fn print_term(t: &Term) -> String {
    let mut s = String::new();
    write_term(&mut s, t);
    s
}

fn print_equation(e: &Equation) -> String {
    match (&e.lhs, &e.rhs) {
        (Term::Var(v), Term::Var(_)) => format!("({} :: {}) = {}", v.name, v.ty, print_term(&e.rhs)),
        _ => format!("{} = {}", print_term(&e.lhs), print_term(&e.rhs)),
    }
}

pub fn print_formula(f: &Formula) -> String {
    let mut parts: Vec<String> = f.premises.iter().map(print_equation).collect();
    parts.push(print_equation(&f.conclusion));
    parts.join(" ==> ")
}

pub fn print_theory(th: &Theory) -> String {
    let mut out = format!("theory {}\n", th.name);
    for dt in &th.datatypes {
        let ctors: Vec<String> = dt
            .ctors
            .iter()
            .map(|c| {
                let mut s = c.name.to_string();
                for a in &c.args {
                    s.push(' ');
                    s.push_str(a.name());
                }
                s
            })
            .collect();
        out.push_str(&format!("datatype {} = {}\n", dt.name, ctors.join(" | ")));
    }
    for f in &th.functions {
        let tys: Vec<&str> = f.arg_types.iter().chain(std::iter::once(&f.ret)).map(Type::name).collect();
        out.push_str(&format!("fun {} :: {}\n", f.name, tys.join(" -> ")));
        for eq in &f.equations {
            let mut line = format!("  {}", f.name);
            for p in &eq.patterns {
                line.push(' ');
                write_atom(&mut line, p);
            }
            line.push_str(" = ");
            write_term(&mut line, &eq.rhs);
            out.push_str(&line);
            out.push('\n');
        }
    }
    for l in &th.lemmas {
        out.push_str(&format!("lemma {}: {}\n", l.name, print_formula(&l.formula)));
    }
    for g in &th.goals {
        out.push_str(&format!("goal {}: {}\n", g.name, print_formula(&g.formula)));
    }
    out
}

fn strategy_in(cur: &mut Cursor) -> Result<Strategy, ParseError> {
    let (name, pos) = cur.expect_ident("strategy")?;
    match &*name {
        "Auto" => Ok(Strategy::Auto),
        "Simp" => Ok(Strategy::Simp),
        "IsSolved" => Ok(Strategy::IsSolved),
        "DInd" => Ok(Strategy::dind()),
        "Dynamic" => {
            cur.expect_punct("(")?;
            let (kind, _) = cur.expect_ident("'Induct' or 'Conjecture'")?;
            let kind = match &*kind {
                "Induct" => DynamicKind::Induct,
                "Conjecture" => DynamicKind::Conjecture,
                other => {
                    return Err(ParseError::new(pos, "'Induct' or 'Conjecture'", format!("'{other}'")));
                }
            };
            cur.expect_punct(")")?;
            Ok(Strategy::Dynamic(kind))
        }
        "Thens" | "Ors" => {
            cur.expect_punct("[")?;
            let mut items = vec![strategy_in(cur)?];
            while cur.eat_punct(",") {
                items.push(strategy_in(cur)?);
            }
            cur.expect_punct("]")?;
            Ok(if &*name == "Thens" { Strategy::Thens(items) } else { Strategy::Ors(items) })
        }
        "Repeat" => {
            cur.expect_punct("(")?;
            let inner = strategy_in(cur)?;
            cur.expect_punct(",")?;
            let n = cur.expect_num()?;
            if n == 0 {
                return Err(ParseError::new(cur.peek().pos, "iteration bound >= 1", "0"));
            }
            cur.expect_punct(")")?;
            Ok(Strategy::Repeat(Box::new(inner), n as usize))
        }
        other => Err(ParseError::new(pos, "strategy", format!("'{other}'"))),
    }
}

pub fn parse_strategy(text: &str) -> Result<Strategy, ParseError> {
    let mut cur = Cursor::new(text)?;
    let s = strategy_in(&mut cur)?;
    if !cur.at_eof() {
        return Err(cur.error("end of strategy"));
    }
    Ok(s)
}

pub fn print_strategy(s: &Strategy) -> String {
    match s {
        Strategy::Auto => "Auto".into(),
        Strategy::Simp => "Simp".into(),
        Strategy::IsSolved => "IsSolved".into(),
        Strategy::Dynamic(DynamicKind::Induct) => "Dynamic(Induct)".into(),
        Strategy::Dynamic(DynamicKind::Conjecture) => "Dynamic(Conjecture)".into(),
        Strategy::Thens(xs) | Strategy::Ors(xs) => {
            let head = if matches!(s, Strategy::Thens(_)) { "Thens" } else { "Ors" };
            let inner: Vec<String> = xs.iter().map(print_strategy).collect();
            format!("{head} [{}]", inner.join(", "))
        }
        Strategy::Repeat(inner, n) => format!("Repeat({}, {n})", print_strategy(inner)),
    }
}

pub fn print_induct_args(args: &InductArgs) -> String {
    let mut s = String::from("induct");
    for v in &args.on {
        s.push(' ');
        s.push_str(v);
    }
    if !args.arbitrary.is_empty() {
        s.push_str(" arbitrary:");
        for v in &args.arbitrary {
            s.push(' ');
            s.push_str(v);
        }
    }
    if let Some(r) = &args.rule {
        s.push_str(" rule: ");
        s.push_str(r);
    }
    s
}

pub fn print_step(step: &ProofStep) -> String {
    match step {
        ProofStep::Induct(a) => print_induct_args(a),
        ProofStep::Cases(v) => format!("cases {v}"),
        ProofStep::Auto => "auto".into(),
        ProofStep::Simp => "simp".into(),
        ProofStep::Conjecture(f) => format!("conjecture \"{}\"", print_formula(f)),
        ProofStep::Qed => "qed".into(),
    }
}

pub fn print_script(script: &ProofScript) -> String {
    let mut out = format!("proof {}\n", script.goal);
    for st in &script.steps {
        out.push_str(&print_step(st));
        out.push('\n');
    }
    out
}

fn line_idents(cur: &mut Cursor) -> Vec<Sym> {
    let mut out = Vec::new();
    while !cur.peek().line_start {
        match &cur.peek().tok {
            Tok::Ident(s) if &**s != "arbitrary" && &**s != "rule" => {
                out.push(s.clone());
                cur.bump();
            }
            _ => break,
        }
    }
    out
}

fn step_in(cur: &mut Cursor, theory: &Theory) -> Result<ProofStep, ParseError> {
    let (kw, pos) = match &cur.peek().tok {
        Tok::Ident(s) => (s.clone(), cur.bump().pos),
        _ => return Err(cur.error("proof step")),
    };
    let step = match &*kw {
        "auto" => ProofStep::Auto,
        "simp" => ProofStep::Simp,
        "qed" => ProofStep::Qed,
        "cases" => {
            let (v, _) = cur.expect_ident("variable")?;
            ProofStep::Cases(v)
        }
        "induct" => {
            let on = line_idents(cur);
            if on.is_empty() {
                return Err(cur.error("induction variable"));
            }
            let mut args = InductArgs { on, arbitrary: Vec::new(), rule: None };
            if !cur.peek().line_start && cur.is_ident("arbitrary") {
                cur.bump();
                cur.expect_punct(":")?;
                args.arbitrary = line_idents(cur);
                if args.arbitrary.is_empty() {
                    return Err(cur.error("variable"));
                }
            }
            if !cur.peek().line_start && cur.is_ident("rule") {
                cur.bump();
                cur.expect_punct(":")?;
                let (r, _) = cur.expect_ident("function name")?;
                args.rule = Some(r);
            }
            ProofStep::Induct(args)
        }
        "conjecture" => match &cur.peek().tok {
            Tok::Str(s) => {
                let s = s.clone();
                let spos = cur.bump().pos;
                let f = parse_formula(&s, theory).map_err(|mut e| {
                    // Positions inside the quoted formula are relative to it.
                    e.pos = SourcePos {
                        line: spos.line,
                        column: spos.column + e.pos.column,
                    };
                    e
                })?;
                ProofStep::Conjecture(f)
            }
            _ => return Err(cur.error("quoted formula")),
        },
        other => return Err(ParseError::new(pos, "proof step", format!("'{other}'"))),
    };
    if !cur.peek().line_start {
        return Err(cur.error("end of line"));
    }
    Ok(step)
}

/// Parses a single `induct ...` step.
pub fn parse_induct_args(text: &str) -> Result<InductArgs, ParseError> {
    let mut cur = Cursor::new(text)?;
    if !cur.is_ident("induct") {
        return Err(cur.error("'induct'"));
    }
    let step = step_in(&mut cur, &Theory::default())?;
    if !cur.at_eof() {
        return Err(cur.error("end of input"));
    }
    match step {
        ProofStep::Induct(a) => Ok(a),
        _ => unreachable!("checked keyword"),
    }
}

/// Parses one or more `proof <goal>` blocks.
pub fn parse_scripts(text: &str, theory: &Theory) -> Result<Vec<ProofScript>, ParseError> {
    let mut cur = Cursor::new(text)?;
    let mut scripts = Vec::new();
    if cur.at_eof() {
        return Err(cur.error("'proof'"));
    }
    while !cur.at_eof() {
        if !cur.is_ident("proof") {
            return Err(cur.error("'proof'"));
        }
        cur.bump();
        let (goal, _) = cur.expect_ident("goal name")?;
        if !cur.peek().line_start {
            return Err(cur.error("end of line"));
        }
        let mut steps = Vec::new();
        while !cur.at_eof() && !cur.is_ident("proof") {
            steps.push(step_in(&mut cur, theory)?);
        }
        scripts.push(ProofScript { goal, steps });
    }
    Ok(scripts)
}

pub fn parse_script(text: &str, theory: &Theory) -> Result<ProofScript, ParseError> {
    let mut all = parse_scripts(text, theory)?;
    if all.len() != 1 {
        return Err(ParseError::new(
            SourcePos { line: 1, column: 1 },
            "exactly one proof",
            format!("{} proofs", all.len()),
        ));
    }
    Ok(all.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const LISTREV: &str = include_str!("../tests/data/listrev.thy");

    #[test]
    fn benchmark_file_counts() {
        let th = parse_theory(LISTREV).unwrap();
        assert_eq!(th.datatypes.len(), 2);
        assert_eq!(th.functions.len(), 5);
        assert_eq!(th.goals.len(), 4);
        assert!(check_theory(&th).is_empty());
    }

    #[test]
    fn missing_constructor_is_an_error() {
        let e = parse_theory("theory t\ndatatype nat = Zero |").unwrap_err();
        assert_eq!(e.expected, "constructor");
        assert_eq!(e.pos, SourcePos { line: 2, column: 22 });
    }

    #[test]
    fn goal_variable_types_from_signature() {
        let th = parse_theory(&format!("{LISTREV}\ngoal g: rev xs = ys\n")).unwrap();
        let g = th.goal("g").unwrap();
        let vars = g.formula.vars();
        assert_eq!(vars.len(), 2);
        assert!(vars.iter().all(|v| v.ty.name() == "list"));
    }

    #[test]
    fn arity_misuse_is_reported() {
        let e = parse_theory(&format!("{LISTREV}\ngoal g: Suc Zero Zero = Zero\n")).unwrap_err();
        assert!(e.found.contains("arity mismatch"), "{e}");
    }

    #[test]
    fn overlapping_patterns_rejected_with_position() {
        let src = "theory t\ndatatype nat = Zero | Suc nat\nfun f :: nat -> nat\n  f Zero = Zero\n  f x = x\n";
        let e = parse_theory(src).unwrap_err();
        assert!(e.found.contains("overlapping patterns"), "{e}");
        assert_eq!(e.pos.line, 5);
    }

    #[test]
    fn ambiguous_variable_needs_annotation() {
        let th = parse_theory(LISTREV).unwrap();
        assert!(parse_formula("x = y", &th).is_err());
        let f = parse_formula("(x :: nat) = y", &th).unwrap();
        assert_eq!(print_formula(&f), "(x :: nat) = y");
    }

    #[test]
    fn formula_printing() {
        let th = parse_theory(LISTREV).unwrap();
        let f = parse_formula("rev (rev xs) = xs", &th).unwrap();
        assert_eq!(print_formula(&f), "rev (rev xs) = xs");
        let f = parse_formula("add x y = Zero ==> x = Zero", &th).unwrap();
        assert_eq!(f.premises.len(), 1);
        assert_eq!(print_formula(&f), "add x y = Zero ==> x = Zero");
    }

    #[test]
    fn strategies() {
        let s = parse_strategy("Thens [Dynamic(Induct), Auto, IsSolved]").unwrap();
        assert_eq!(
            s,
            Strategy::Thens(vec![Strategy::Dynamic(DynamicKind::Induct), Strategy::Auto, Strategy::IsSolved])
        );
        assert_eq!(parse_strategy("DInd").unwrap(), s);
        assert_eq!(
            parse_strategy("Ors [Simp, Auto]").unwrap(),
            Strategy::Ors(vec![Strategy::Simp, Strategy::Auto])
        );
        assert!(parse_strategy("Thens [Auto,").is_err());
        assert!(parse_strategy("Thens []").is_err());
        assert!(parse_strategy("Repeat(Auto, 0)").is_err());
        let r = parse_strategy("Repeat(Ors [Auto, Dynamic(Conjecture)], 3)").unwrap();
        assert_eq!(parse_strategy(&print_strategy(&r)).unwrap(), r);
    }

    #[test]
    fn scripts_round_trip() {
        let th = parse_theory(LISTREV).unwrap();
        let text = "proof itrev_rev\ninduct xs arbitrary: ys rule: itrev\ncases xs\nconjecture \"itrev xs ys = app (rev xs) ys\"\nauto\nsimp\nqed\n";
        let s = parse_script(text, &th).unwrap();
        assert_eq!(s.steps.len(), 6);
        assert_eq!(print_script(&s), text);
    }

    #[test]
    fn script_errors() {
        let th = parse_theory(LISTREV).unwrap();
        assert!(parse_script("proof g\ninduct\nqed\n", &th).is_err());
        assert!(parse_script("proof g\nfrobnicate\n", &th).is_err());
        assert!(parse_script("proof g\nconjecture \"rev xs =\"\n", &th).is_err());
    }

    #[test]
    fn theory_round_trip() {
        let th = parse_theory(LISTREV).unwrap();
        let again = parse_theory(&print_theory(&th)).unwrap();
        assert_eq!(th, again);
    }

    #[test]
    fn truncations_report_positions_within_file() {
        let lines = LISTREV.lines().count();
        for cut in 0..LISTREV.len() {
            if !LISTREV.is_char_boundary(cut) {
                continue;
            }
            if let Err(e) = parse_theory(&LISTREV[..cut]) {
                assert!(e.pos.line >= 1 && e.pos.line <= lines + 1, "{e} at cut {cut}");
                assert!(e.pos.column >= 1);
            }
        }
    }
}

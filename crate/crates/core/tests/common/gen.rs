//! Seeded generators of well-formed theories, formulas, scripts and
//! strategies for round-trip and cross-check tests.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use united::induct::InductArgs;
use united::kernel::{
    sym, CtorDef, DatatypeDef, Equation, Formula, FunEquation, FunctionDef, NamedFormula, Term, Theory, Type, Var,
};
use united::psl::{DynamicKind, ProofScript, ProofStep, Strategy};

/// A ground or open term of type `ty`, built from `vars` and the theory's
/// symbols, at most `depth` applications deep.
pub fn term(rng: &mut ChaCha8Rng, th: &Theory, ty: &Type, vars: &[Var], depth: usize) -> Term {
    let here: Vec<&Var> = vars.iter().filter(|v| v.ty == *ty).collect();
    if !here.is_empty() && (depth == 0 || rng.gen_bool(0.3)) {
        return Term::Var((*here.choose(rng).unwrap()).clone());
    }
    let dt = th.datatype(ty).expect("known type");
    if depth == 0 {
        return base_value(th, ty);
    }
    let funs: Vec<&FunctionDef> = th.functions.iter().filter(|f| f.ret == *ty).collect();
    if !funs.is_empty() && rng.gen_bool(0.4) {
        let f = *funs.choose(rng).unwrap();
        let args = f.arg_types.iter().map(|a| term(rng, th, a, vars, depth - 1)).collect();
        return Term::App(f.name.clone(), args);
    }
    let c = dt.ctors.choose(rng).unwrap();
    let args = c.args.iter().map(|a| term(rng, th, a, vars, depth - 1)).collect();
    Term::App(c.name.clone(), args)
}

/// The smallest value built from each type's first constructor.
pub fn base_value(th: &Theory, ty: &Type) -> Term {
    let c = &th.datatype(ty).expect("known type").ctors[0];
    Term::App(c.name.clone(), c.args.iter().map(|a| base_value(th, a)).collect())
}

/// Variables `<prefix><type index><n>` for every datatype.
pub fn var_pool(th: &Theory, prefix: &str, per_type: usize) -> Vec<Var> {
    let mut out = Vec::new();
    for (i, dt) in th.datatypes.iter().enumerate() {
        for n in 0..per_type {
            out.push(Var::new(&format!("{prefix}{i}{n}"), &dt.name));
        }
    }
    out
}

pub fn formula(rng: &mut ChaCha8Rng, th: &Theory, depth: usize) -> Formula {
    let pool = var_pool(th, "x", 2);
    let eq = |rng: &mut ChaCha8Rng| {
        let ty = th.datatypes.choose(rng).unwrap().name.clone();
        Equation::new(term(rng, th, &ty, &pool, depth), term(rng, th, &ty, &pool, depth))
    };
    let premises = (0..rng.gen_range(0..=1)).map(|_| eq(rng)).collect();
    Formula::new(premises, eq(rng))
}

/// One to three datatypes, one to three functions defined by exhaustive
/// case analysis on their first argument, plus lemmas and goals.
pub fn theory(rng: &mut ChaCha8Rng) -> Theory {
    let mut th = Theory {
        name: format!("t{}", rng.gen_range(0..100)),
        ..Theory::default()
    };
    let n_types = rng.gen_range(1..=3);
    for i in 0..n_types {
        let name = Type::new(&format!("ty{i}"));
        let earlier: Vec<Type> = th.datatypes.iter().map(|d| d.name.clone()).collect();
        let mut ctors = vec![CtorDef {
            name: sym(&format!("K{i}a")),
            args: (0..rng.gen_range(0..=1).min(earlier.len())).map(|_| earlier.choose(rng).unwrap().clone()).collect(),
        }];
        for j in 1..rng.gen_range(1..=3) {
            let mut pool = earlier.clone();
            pool.push(name.clone());
            ctors.push(CtorDef {
                name: sym(&format!("K{i}{}", (b'a' + j as u8) as char)),
                args: (0..rng.gen_range(0..=2)).map(|_| pool.choose(rng).unwrap().clone()).collect(),
            });
        }
        th.datatypes.push(DatatypeDef { name, ctors });
    }
    let types: Vec<Type> = th.datatypes.iter().map(|d| d.name.clone()).collect();
    for k in 0..rng.gen_range(1..=3) {
        let arg_types: Vec<Type> = (0..rng.gen_range(1..=2)).map(|_| types.choose(rng).unwrap().clone()).collect();
        let ret = types.choose(rng).unwrap().clone();
        let name = sym(&format!("f{k}"));
        th.functions.push(FunctionDef {
            name: name.clone(),
            arg_types: arg_types.clone(),
            ret: ret.clone(),
            equations: Vec::new(),
        });
        let dt = th.datatype(&arg_types[0]).unwrap().clone();
        let mut equations = Vec::new();
        for c in &dt.ctors {
            let mut vars = Vec::new();
            let sub: Vec<Term> = c
                .args
                .iter()
                .enumerate()
                .map(|(n, t)| {
                    let v = Var::new(&format!("p{n}"), t);
                    vars.push(v.clone());
                    Term::Var(v)
                })
                .collect();
            let mut patterns = vec![Term::App(c.name.clone(), sub)];
            for (n, t) in arg_types.iter().enumerate().skip(1) {
                let v = Var::new(&format!("q{n}"), t);
                vars.push(v.clone());
                patterns.push(Term::Var(v));
            }
            let rhs = term(rng, &th, &ret, &vars, 2);
            equations.push(FunEquation { patterns, rhs });
        }
        th.functions.last_mut().unwrap().equations = equations;
    }
    for i in 0..rng.gen_range(0..=2) {
        let f = formula(rng, &th, 2);
        th.lemmas.push(NamedFormula { name: sym(&format!("lem{i}")), formula: f });
    }
    for i in 0..rng.gen_range(1..=3) {
        let f = formula(rng, &th, 2);
        th.goals.push(NamedFormula { name: sym(&format!("g{i}")), formula: f });
    }
    th
}

pub fn induct_args(rng: &mut ChaCha8Rng, th: &Theory) -> InductArgs {
    let names = ["xs", "ys", "n", "m", "x1"];
    let on = (0..rng.gen_range(1..=2)).map(|i| sym(names[i])).collect();
    let arbitrary = if rng.gen_bool(0.4) { vec![sym("zs")] } else { Vec::new() };
    let rule = if rng.gen_bool(0.3) { th.functions.choose(rng).map(|f| f.name.clone()) } else { None };
    InductArgs { on, arbitrary, rule }
}

pub fn script(rng: &mut ChaCha8Rng, th: &Theory) -> ProofScript {
    let goal = th.goals.choose(rng).expect("theory has goals").name.clone();
    let mut steps = Vec::new();
    for _ in 0..rng.gen_range(0..6) {
        steps.push(match rng.gen_range(0..5) {
            0 => ProofStep::Induct(induct_args(rng, th)),
            1 => ProofStep::Cases(sym("xs")),
            2 => ProofStep::Auto,
            3 => ProofStep::Simp,
            _ => ProofStep::Conjecture(formula(rng, th, 2)),
        });
    }
    steps.push(ProofStep::Qed);
    ProofScript { goal, steps }
}

pub fn strategy(rng: &mut ChaCha8Rng, depth: usize) -> Strategy {
    let leaf = depth == 0 || rng.gen_bool(0.4);
    if leaf {
        return match rng.gen_range(0..5) {
            0 => Strategy::Auto,
            1 => Strategy::Simp,
            2 => Strategy::IsSolved,
            3 => Strategy::Dynamic(DynamicKind::Induct),
            _ => Strategy::Dynamic(DynamicKind::Conjecture),
        };
    }
    match rng.gen_range(0..3) {
        0 => Strategy::Thens((0..rng.gen_range(1..=3)).map(|_| strategy(rng, depth - 1)).collect()),
        1 => Strategy::Ors((0..rng.gen_range(1..=3)).map(|_| strategy(rng, depth - 1)).collect()),
        _ => Strategy::Repeat(Box::new(strategy(rng, depth - 1)), rng.gen_range(1..=4)),
    }
}

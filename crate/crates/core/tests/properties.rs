mod common;

use std::time::{Duration, Instant};

use common::gen;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use united::deduct::{auto, simp, DeductBudgets};
use united::kernel::{match_term, substitute, Sequent, Substitution, Theory, Type};
use united::syntax::{parse_formula, parse_theory};
use united::unite::{PriorityQueue, ProofState};

const LISTREV: &str = include_str!("data/listrev.thy");

fn listrev() -> Theory {
    parse_theory(LISTREV).unwrap()
}

fn state(tag: usize) -> ProofState {
    ProofState {
        goals: Vec::new(),
        log: Vec::new(),
        depth: tag,
        seqno: 0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn match_then_substitute_reproduces_subject(seed in any::<u64>()) {
        let th = listrev();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = gen::var_pool(&th, "v", 2);
        let pat = gen::term(&mut rng, &th, &Type::new("list"), &pool, 3);
        let mut s = Substitution::new();
        for v in pat.vars() {
            s.insert(v.clone(), gen::term(&mut rng, &th, &v.ty, &[], 3));
        }
        let subject = substitute(&pat, &s);
        let m = match_term(&pat, &subject).expect("instance matches");
        prop_assert_eq!(substitute(&pat, &m), subject);
    }

    #[test]
    fn substitution_size_and_groundness(seed in any::<u64>()) {
        let th = listrev();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = gen::var_pool(&th, "v", 2);
        let t = gen::term(&mut rng, &th, &Type::new("nat"), &pool, 3);
        let mut s = Substitution::new();
        for v in t.vars() {
            s.insert(v.clone(), gen::base_value(&th, &v.ty));
        }
        let u = substitute(&t, &s);
        prop_assert!(u.is_ground());
        prop_assert!(u.size() >= t.size());
        for p in t.positions() {
            prop_assert!(t.at(&p).is_some());
        }
    }

    #[test]
    fn queue_pops_by_priority_then_fifo(prios in proptest::collection::vec(-3i32..3, 1..40)) {
        let mut q = PriorityQueue::new();
        for (i, p) in prios.iter().enumerate() {
            q.push(*p as f64, state(i));
        }
        let mut out = Vec::new();
        while let Some((p, s)) = q.pop() {
            out.push((p, s.depth));
        }
        prop_assert_eq!(out.len(), prios.len());
        for w in out.windows(2) {
            prop_assert!(w[0].0 > w[1].0 || (w[0].0 == w[1].0 && w[0].1 < w[1].1), "{:?}", w);
        }
    }
}

#[test]
fn simp_terminates_with_looping_lemmas() {
    let src = format!(
        "{LISTREV}\nlemma loop1: rev xs = itrev xs Nil\nlemma loop2: itrev xs Nil = rev xs\n\
         lemma grow: len xs = len (app xs Nil)\nlemma comm: app xs ys = app ys xs\n"
    );
    let th = parse_theory(&src).unwrap();
    let budgets = DeductBudgets::default();
    for g in ["rev (rev xs) = xs", "len (rev xs) = len xs", "app xs (rev ys) = rev (app ys xs)"] {
        let f = parse_formula(g, &th).unwrap();
        let start = Instant::now();
        let _ = simp(&th, &Sequent::root(&f), budgets);
        let _ = auto(&th, &Sequent::root(&f), budgets);
        assert!(start.elapsed() < Duration::from_secs(10), "{g}");
    }
}

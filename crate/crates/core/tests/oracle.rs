mod common;

use common::*;
use prepost::dsl::{parse, parse_checked, parse_expr, pretty};
use prepost::eval::{evaluate, EvalConfig, EvalResult};
use prepost::problem::{Problem, Quadrant};
use prepost::random_check::{eliminate_common_clauses, run_random_check};

fn three_valued(r: EvalResult) -> Option<bool> {
    match r {
        EvalResult::True | EvalResult::Approx(true) => Some(true),
        EvalResult::False | EvalResult::Approx(false) => Some(false),
        EvalResult::Undefined(_) => None,
    }
}

fn small_domain() -> EvalConfig {
    EvalConfig { int_range: (LO, HI), max_array_len: MAX_LEN, ..Default::default() }
}

#[test]
fn oracle_matches_hand_computed_regions() {
    let x = || T::Var("x".into());
    let m = F::Cmp(Cmp::Gt, x(), T::Lit(0));
    let s = F::Cmp(Cmp::Ge, x(), T::Lit(0));
    let r = oracle(&m, &s, &[("x".into(), OTy::Int)]);
    assert_eq!(r.domain, 5);
    assert_eq!(r.count(Quadrant::NMS), 1);
    assert_eq!(r.count(Quadrant::MnS), 0);
    assert_eq!(r.count(Quadrant::MS), 2);
    assert_eq!(all_arrays().len(), 2 + 5 + 25 + 125);
}

#[test]
fn crate_evaluator_agrees_with_reference_on_corpus() {
    let (sigs, pairs) = corpus(200, 1);
    let cfg = EvalConfig::default();
    for p in &pairs {
        let sig = &sigs[p.sig_index];
        let spec = parse_checked(&p.model_text(&sigs)).unwrap_or_else(|d| panic!("{d}\n{}", p.model_text(&sigs)));
        for env in enumerate(&sig.vars) {
            let a = to_assignment(&env);
            for (e, f) in spec.pres.iter().zip(&p.model) {
                assert_eq!(three_valued(evaluate(e, &a, &cfg)), eval(f, &env), "{} under {env:?}", render(f));
            }
        }
    }
}

#[test]
fn pretty_printing_round_trips_corpus_formulas() {
    let (sigs, pairs) = corpus(200, 2);
    for p in &pairs {
        let spec = parse(&p.student_text(&sigs)).unwrap();
        for e in &spec.pres {
            let text = pretty(e);
            assert_eq!(&parse_expr(&text).unwrap(), e, "{text}");
        }
    }
}

#[test]
fn no_false_refutation_on_rewrites() {
    let sigs = corpus_signatures();
    for k in 0..60u64 {
        let sig = &sigs[k as usize % sigs.len()];
        let mut g = Gen::new(sig, 100 + k);
        let m = g.formula(3);
        let s = g.rewrite(&m);
        assert!(oracle(&m, &s, &sig.vars).equivalent(), "rewrite changed meaning: {} vs {}", render(&m), render(&s));
        let model = parse_checked(&spec_text(sig, &[m])).unwrap();
        let student = parse_checked(&spec_text(sig, &[s])).unwrap();
        let r = run_random_check(&Problem::pre(&model, &student), &small_domain(), 500, k);
        assert!(r.no_counterexample(), "{:?}", r.counts);
    }
}

#[test]
fn stored_witnesses_land_in_their_quadrant() {
    let (sigs, pairs) = corpus(90, 3);
    for p in &pairs {
        let model = parse_checked(&p.model_text(&sigs)).unwrap();
        let student = parse_checked(&p.student_text(&sigs)).unwrap();
        let r = run_random_check(&Problem::pre(&model, &student), &small_domain(), 300, 9);
        for (q, ws) in &r.witnesses {
            for w in ws {
                let env = from_assignment(w);
                assert_eq!(quadrant_of(eval(&p.model_f(), &env), eval(&p.student_f(), &env)), Some(*q));
            }
        }
    }
}

// Dropping shared clauses outright is unsound: `C && A` and `C && B` may agree although
// `A` and `B` do not. The split keeps the shared clauses as a guard, and each side must
// stay equivalent to its original.
#[test]
fn clause_elimination_keeps_each_side_intact() {
    let (sigs, pairs) = corpus(150, 4);
    let mut eliminated = 0;
    for p in pairs.iter().filter(|p| p.model.len() > 1) {
        let sig = &sigs[p.sig_index];
        let model = parse_checked(&p.model_text(&sigs)).unwrap();
        let student = parse_checked(&p.student_text(&sigs)).unwrap();
        let split = eliminate_common_clauses(&model.pres, &student.pres);
        eliminated += split.common.len();
        let conj_of = |es: &[&[prepost::dsl::Expr]]| conj(&es.iter().flat_map(|s| s.iter()).map(from_expr).collect::<Vec<_>>());
        let m_split = conj_of(&[&split.common, &split.m_rest]);
        let s_split = conj_of(&[&split.common, &split.s_rest]);
        assert!(oracle(&p.model_f(), &m_split, &sig.vars).equivalent());
        assert!(oracle(&p.student_f(), &s_split, &sig.vars).equivalent());
        assert_eq!(
            oracle(&p.model_f(), &p.student_f(), &sig.vars).equivalent(),
            oracle(&m_split, &s_split, &sig.vars).equivalent()
        );
    }
    assert!(eliminated > 0);
}

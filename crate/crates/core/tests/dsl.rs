mod common;

use common::{corpus_signatures, render, spec_text, Gen};
use prepost::dsl::{normalize, parse, parse_checked, pretty, spec_from_doc, spec_to_doc};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pretty_output_parses_back(seed in any::<u64>(), sig in 0usize..4, depth in 0u32..4) {
        let sigs = corpus_signatures();
        let f = Gen::new(&sigs[sig], seed).formula(depth);
        let spec = parse(&spec_text(&sigs[sig], &[f.clone()])).unwrap();
        let printed = format!("{}\npre({});", sigs[sig].header(), pretty(&spec.pres[0]));
        let again = parse(&printed).unwrap();
        prop_assert_eq!(&again.pres[0], &spec.pres[0], "{}", render(&f));
    }

    #[test]
    fn doc_form_round_trips(seed in any::<u64>(), sig in 0usize..4) {
        let sigs = corpus_signatures();
        let mut g = Gen::new(&sigs[sig], seed);
        let pres = vec![g.formula(2), g.formula(3)];
        let spec = parse_checked(&spec_text(&sigs[sig], &pres)).unwrap();
        let doc = spec_to_doc(&spec);
        let back = spec_from_doc(&doc, None).unwrap();
        prop_assert_eq!(&back.pres, &spec.pres);
        prop_assert_eq!(&back.signature, &spec.signature);
        prop_assert_eq!(spec_to_doc(&back), doc);
    }

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>(), sig in 0usize..4) {
        let sigs = corpus_signatures();
        let f = Gen::new(&sigs[sig], seed).formula(3);
        let e = parse_checked(&spec_text(&sigs[sig], &[f])).unwrap().pres.remove(0);
        let n = normalize(&e);
        prop_assert_eq!(normalize(&n), n);
    }
}

#[test]
fn diagnostics_carry_positions() {
    let err = parse_checked("method f(x: int) -> int;\npre(x > );").unwrap_err();
    let d = &err.0[0];
    assert_eq!(d.line, 2);
    assert!(d.col > 1, "{d}");

    let err = parse_checked("method f(x: int) -> int;\npre(retval > x);").unwrap_err();
    assert!(err.0.iter().any(|d| d.message.contains("retval")), "{err}");

    let err = parse_checked("method f(x: int) -> int;\npre(x + true > 0);").unwrap_err();
    assert_eq!(err.0[0].line, 2);
}

#[test]
fn doc_without_signature_uses_fallback() {
    let spec = parse_checked("method f(a: int[]) -> int;\npre(a != null);\npost(exists(a, i -> a[i] == retval));").unwrap();
    let mut doc = spec_to_doc(&spec);
    doc.as_object_mut().unwrap().remove("signature");
    assert!(spec_from_doc(&doc, None).is_err());
    let back = spec_from_doc(&doc, Some(&spec.signature)).unwrap();
    assert_eq!(back.posts, spec.posts);
}

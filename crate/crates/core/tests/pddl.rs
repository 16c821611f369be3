mod common;

use common::{fixture, fixtures, DOMAINS};
use proptest::prelude::*;
use schema_ensemble::pddl::{
    parse_action, parse_condition, parse_domain, parse_problem, print_action, print_condition, print_domain,
    print_problem, repair_syntax, validate_schema, DiagnosticCode, Literal, Term,
};

#[test]
fn fixture_domains_round_trip() {
    for name in DOMAINS {
        let (d, p) = fixture(name);
        assert_eq!(parse_domain(&print_domain(&d)).unwrap(), d, "{name}");
        assert_eq!(parse_problem(&print_problem(&p)).unwrap(), p, "{name}");
        for a in &d.actions {
            assert!(validate_schema(a, &d).is_empty(), "{name}/{}", a.name);
        }
    }
    for t in ["newspapers", "blocksworld", "gripper", "ferry", "logistics"] {
        let text = std::fs::read_to_string(fixtures().join("training").join(t).join("domain.pddl")).unwrap();
        let d = parse_domain(&text).unwrap();
        assert_eq!(parse_domain(&print_domain(&d)).unwrap(), d, "{t}");
    }
}

#[test]
fn diagnostics_carry_codes_and_positions() {
    let (d, _) = fixture("libraryworld");
    let a = parse_action(
        "(:action take-from-table :parameters (?x - book)
           :precondition (and (on-table ?x) (hands-free ?x) (levitating ?x))
           :effect (holding ?y))",
    )
    .unwrap();
    let diags = validate_schema(&a, &d);
    let codes: Vec<DiagnosticCode> = diags.iter().map(|d| d.code).collect();
    assert!(codes.contains(&DiagnosticCode::ArityMismatch), "{codes:?}");
    assert!(codes.contains(&DiagnosticCode::UndeclaredPredicate), "{codes:?}");
    assert!(codes.contains(&DiagnosticCode::UnboundVariable), "{codes:?}");
    assert!(diags.iter().all(|d| d.line >= 1));
    let json = serde_json::to_value(&diags[0]).unwrap();
    for k in ["code", "message", "line", "column"] {
        assert!(json.get(k).is_some());
    }
}

#[test]
fn repair_fixes_fences_case_and_parens() {
    let declared = vec!["on-table".to_string(), "holding".to_string()];
    let out = repair_syntax("```pddl\n(AND (On_Table ?x) (not (holding ?x))\n```", Some(&declared)).unwrap();
    assert_eq!(print_condition(&parse_condition(&out).unwrap()), "(and (on-table ?x) (not (holding ?x)))");
    assert!(repair_syntax("((((", Some(&declared)).is_err());
}

fn ident() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9]{0,5}(-[a-z0-9]{1,4})?".prop_filter("reserved", |s| s != "and" && s != "not")
}

fn literal() -> impl Strategy<Value = Literal> {
    (
        ident(),
        prop::collection::vec(prop_oneof![ident().prop_map(Term::Var), ident().prop_map(Term::Const)], 0..4),
        any::<bool>(),
    )
        .prop_map(|(p, args, neg)| Literal::new(p, args, neg))
}

proptest! {
    #[test]
    fn condition_print_parse_round_trip(lits in prop::collection::vec(literal(), 0..6)) {
        let text = print_condition(&lits);
        let back = parse_condition(&text).unwrap();
        prop_assert_eq!(&back, &lits);
        prop_assert_eq!(print_condition(&back), text);
    }

    #[test]
    fn repair_leaves_valid_text_alone(lits in prop::collection::vec(literal(), 1..6)) {
        let text = print_condition(&lits);
        prop_assert_eq!(repair_syntax(&text, None).unwrap(), text);
    }

    #[test]
    fn action_print_is_a_fixed_point(pre in prop::collection::vec(literal(), 0..4), eff in prop::collection::vec(literal(), 0..4)) {
        let src = format!("(:action a :parameters () :precondition {} :effect {})", print_condition(&pre), print_condition(&eff));
        let a = parse_action(&src).unwrap();
        let once = print_action(&a);
        prop_assert_eq!(print_action(&parse_action(&once).unwrap()), once);
    }
}

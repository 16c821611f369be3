//! Hard-negative synthesis: single-literal schema manipulations, mutex
//! tables, and triplet export for encoder finetuning.

mod manipulate;
mod mutex;
mod triplets;

use thiserror::Error;

pub use manipulate::{eligible_edits, manipulate, manipulate_at, ManipulationKind, Side, Target};
pub use mutex::{detect_mutexes, MutexProvenance, MutexTable};
pub use triplets::{build_triplets, write_triplets, NegativeType, TrainingDomain, TripletSample};

#[derive(Debug, Error)]
pub enum NegativeError {
    #[error("NOT_APPLICABLE: {kind:?} cannot fire on `{action}`")]
    NotApplicable {
        kind: ManipulationKind,
        action: String,
    },
    #[error("STATE_BOUND_EXCEEDED: more than {0} reachable states")]
    StateBoundExceeded(usize),
    #[error("infeasible weights: {0}")]
    InfeasibleWeights(String),
    #[error("invalid mutex table: {0}")]
    InvalidMutex(String),
    #[error(transparent)]
    Plan(#[from] crate::planner::PlanError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_action, parse_domain, parse_problem, print_condition, ActionSchema, Domain};

    fn toy() -> Domain {
        parse_domain(
            "(define (domain toy) (:types obj)
               (:predicates (at ?x ?y - obj) (clear ?x - obj) (on ?x ?y - obj)
                            (on-table ?x - obj) (holding ?x - obj)))",
        )
        .unwrap()
    }

    fn act(src: &str) -> ActionSchema {
        parse_action(src).unwrap()
    }

    fn table(pairs: &[(&str, &str)]) -> MutexTable {
        MutexTable::from_pairs(pairs.iter().copied(), MutexProvenance::Config).unwrap()
    }

    #[test]
    fn swap_exchanges_pre_and_effect() {
        let a = act("(:action m :parameters (?x ?y ?z - obj) :precondition (at ?x ?y) :effect (not (at ?x ?z)))");
        let out = manipulate_at(&a, ManipulationKind::Swap, Target::Swap { pre: 0, eff: 0 }, &table(&[]), &toy()).unwrap();
        assert_eq!(print_condition(&out.preconditions), "(not (at ?x ?z))");
        assert_eq!(print_condition(&out.effects), "(at ?x ?y)");
    }

    #[test]
    fn negation_flips_one_literal() {
        let a = act("(:action m :parameters (?x - obj) :precondition (clear ?x) :effect (holding ?x))");
        let out = manipulate(&a, ManipulationKind::Negation, 0, &table(&[]), &toy());
        // two targets: the precondition and the effect
        let pre = manipulate_at(&a, ManipulationKind::Negation, Target::At(Side::Pre, 0), &table(&[]), &toy()).unwrap();
        assert_eq!(print_condition(&pre.preconditions), "(not (clear ?x))");
        assert!(out.is_ok());
    }

    #[test]
    fn removal_drops_one_literal() {
        let a = act("(:action m :parameters (?x ?y - obj) :precondition (and (on ?x ?y) (clear ?x)) :effect (holding ?x))");
        let out = manipulate_at(&a, ManipulationKind::Removal, Target::At(Side::Pre, 1), &table(&[]), &toy()).unwrap();
        assert_eq!(print_condition(&out.preconditions), "(on ?x ?y)");
    }

    #[test]
    fn addition_inserts_mutex_partner() {
        let a = act("(:action m :parameters (?x - obj) :precondition (holding ?x) :effect (on-table ?x))");
        let t = table(&[("on-table", "holding")]);
        let out = manipulate_at(&a, ManipulationKind::Addition, Target::At(Side::Eff, 0), &t, &toy()).unwrap();
        assert_eq!(print_condition(&out.effects), "(and (on-table ?x) (holding ?x))");
    }

    #[test]
    fn removal_from_empty_side_is_not_applicable() {
        let a = act("(:action m :parameters () :effect (and))");
        assert!(matches!(
            manipulate(&a, ManipulationKind::Removal, 3, &table(&[]), &toy()),
            Err(NegativeError::NotApplicable { .. })
        ));
    }

    #[test]
    fn seeds_cover_every_target() {
        let a = act("(:action m :parameters (?x ?y - obj) :precondition (and (on ?x ?y) (clear ?x)) :effect (and (holding ?x) (not (on ?x ?y))))");
        let all = eligible_edits(&a, ManipulationKind::Removal, &table(&[]), &toy());
        assert_eq!(all.len(), 4);
        let mut hit = std::collections::HashSet::new();
        for s in 0..200 {
            hit.insert(manipulate(&a, ManipulationKind::Removal, s, &table(&[]), &toy()).unwrap().canonical_text());
        }
        assert_eq!(hit.len(), 4);
    }

    #[test]
    fn self_pair_is_rejected() {
        assert!(MutexTable::from_pairs([("a", "a")], MutexProvenance::Config).is_err());
    }

    fn libraryworld() -> (Domain, crate::pddl::ProblemInstance) {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/domains/libraryworld/");
        (
            parse_domain(&std::fs::read_to_string(format!("{dir}domain.pddl")).unwrap()).unwrap(),
            parse_problem(&std::fs::read_to_string(format!("{dir}problem.pddl")).unwrap()).unwrap(),
        )
    }

    #[test]
    fn detects_holding_on_table() {
        let (d, p) = libraryworld();
        let t = detect_mutexes(&d, &p, 100_000).unwrap();
        assert!(t.contains("holding", "on-table"), "{:?}", t.pairs);
        assert_eq!(t.provenance, MutexProvenance::Detected);
    }

    #[test]
    fn single_predicate_domain_has_no_mutexes() {
        let d = parse_domain(
            "(define (domain one) (:predicates (p ?x))
               (:action a :parameters (?x) :precondition (p ?x) :effect (not (p ?x))))",
        )
        .unwrap();
        let p = parse_problem("(define (problem q) (:domain one) (:objects o) (:init (p o)) (:goal (and)))").unwrap();
        assert!(detect_mutexes(&d, &p, 100).unwrap().pairs.is_empty());
    }

    #[test]
    fn state_bound_is_enforced() {
        let (d, p) = libraryworld();
        assert!(matches!(
            detect_mutexes(&d, &p, 3),
            Err(NegativeError::StateBoundExceeded(3))
        ));
    }
}

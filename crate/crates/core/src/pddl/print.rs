use std::fmt::Write;

use super::{ActionSchema, Domain, Literal, ProblemInstance, TypedName, OBJECT_TYPE};

pub fn print_literal(lit: &Literal) -> String {
    let mut atom = format!("({}", lit.predicate);
    for a in &lit.args {
        let _ = write!(atom, " {a}");
    }
    atom.push(')');
    if lit.negated {
        format!("(not {atom})")
    } else {
        atom
    }
}

/// A bare literal for one-element conjunctions, `(and ...)` otherwise.
pub fn print_condition(lits: &[Literal]) -> String {
    match lits {
        [one] => print_literal(one),
        _ => conjunction(lits),
    }
}

fn conjunction(lits: &[Literal]) -> String {
    let mut s = String::from("(and");
    for l in lits {
        s.push(' ');
        s.push_str(&print_literal(l));
    }
    s.push(')');
    s
}

/// Groups consecutive names sharing a type: `?x ?y - book ?c - category`.
fn typed_list(items: &[TypedName], vars: bool) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let ty = &items[i].ty;
        let mut j = i;
        while j < items.len() && &items[j].ty == ty {
            j += 1;
        }
        let names: Vec<String> = items[i..j]
            .iter()
            .map(|n| if vars { format!("?{}", n.name) } else { n.name.clone() })
            .collect();
        if ty == OBJECT_TYPE {
            parts.push(names.join(" "));
        } else {
            parts.push(format!("{} - {}", names.join(" "), ty));
        }
        i = j;
    }
    parts.join(" ")
}

fn write_action(out: &mut String, a: &ActionSchema, indent: &str) {
    let _ = writeln!(out, "{indent}(:action {}", a.name);
    let _ = writeln!(out, "{indent}  :parameters ({})", typed_list(&a.parameters, true));
    let _ = writeln!(out, "{indent}  :precondition {}", conjunction(&a.preconditions));
    let _ = writeln!(out, "{indent}  :effect {}", conjunction(&a.effects));
    let _ = write!(out, "{indent})");
}

/// Canonical text of a single action schema (no trailing newline).
pub fn print_action(a: &ActionSchema) -> String {
    let mut s = String::new();
    write_action(&mut s, a, "");
    s
}

pub fn print_domain(d: &Domain) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (domain {})", d.name);
    if !d.requirements.is_empty() {
        let reqs: Vec<&str> = d.requirements.iter().map(|r| r.keyword()).collect();
        let _ = writeln!(out, "  (:requirements {})", reqs.join(" "));
    }
    if !d.types.is_empty() {
        let _ = writeln!(out, "  (:types {})", d.types.join(" "));
    }
    if !d.constants.is_empty() {
        let _ = writeln!(out, "  (:constants {})", typed_list(&d.constants, false));
    }
    out.push_str("  (:predicates\n");
    for p in &d.predicates {
        let sig = signature(&p.name, &p.parameters);
        match &p.doc {
            Some(doc) => {
                let _ = writeln!(out, "    {sig} ;; {doc}");
            }
            None => {
                let _ = writeln!(out, "    {sig}");
            }
        }
    }
    out.push_str("  )\n");
    for a in &d.actions {
        write_action(&mut out, a, "  ");
        out.push('\n');
    }
    out.push_str(")\n");
    out
}

fn signature(name: &str, params: &[TypedName]) -> String {
    if params.is_empty() {
        format!("({name})")
    } else {
        format!("({name} {})", typed_list(params, true))
    }
}

pub fn print_problem(p: &ProblemInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {})", p.name);
    let _ = writeln!(out, "  (:domain {})", p.domain_name);
    let _ = writeln!(out, "  (:objects {})", typed_list(&p.objects, false));
    out.push_str("  (:init\n");
    for a in &p.init {
        let _ = writeln!(out, "    {a}");
    }
    out.push_str("  )\n");
    out.push_str("  (:goal (and");
    for g in &p.goal {
        if g.negated {
            let _ = write!(out, " (not {})", g.atom);
        } else {
            let _ = write!(out, " {}", g.atom);
        }
    }
    out.push_str("))\n)\n");
    out
}

/// Numbered predicate list with `;;` docs, as shown to the language model.
pub fn render_predicate_list(d: &Domain) -> String {
    d.predicates
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let sig = signature(&p.name, &p.parameters);
            match &p.doc {
                Some(doc) => format!("{}. {sig} ;; {doc}", i + 1),
                None => format!("{}. {sig}", i + 1),
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

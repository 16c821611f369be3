use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{MutexTable, NegativeError};
use crate::pddl::{validate_schema, ActionSchema, Domain, Literal, Term, OBJECT_TYPE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ManipulationKind {
    /// Exchange one precondition literal with one effect literal.
    Swap,
    /// Flip the sign of one literal.
    Negation,
    /// Drop one literal.
    Removal,
    /// Insert the mutex partner of one positive literal right after it.
    Addition,
}

impl ManipulationKind {
    pub const ALL: [ManipulationKind; 4] = [
        ManipulationKind::Swap,
        ManipulationKind::Negation,
        ManipulationKind::Removal,
        ManipulationKind::Addition,
    ];
}

/// Which literal an edit touches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Pre,
    Eff,
}

/// A single-literal edit. `Swap` uses both indices, the others one side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Swap { pre: usize, eff: usize },
    At(Side, usize),
}

fn lits(a: &ActionSchema, s: Side) -> &Vec<Literal> {
    match s {
        Side::Pre => &a.preconditions,
        Side::Eff => &a.effects,
    }
}

fn lits_mut(a: &mut ActionSchema, s: Side) -> &mut Vec<Literal> {
    match s {
        Side::Pre => &mut a.preconditions,
        Side::Eff => &mut a.effects,
    }
}

fn dedup(v: &mut Vec<Literal>) {
    let mut out: Vec<Literal> = Vec::with_capacity(v.len());
    for l in v.drain(..) {
        if !out.contains(&l) {
            out.push(l);
        }
    }
    *v = out;
}

fn term_type<'a>(a: &'a ActionSchema, d: &'a Domain, t: &Term) -> Option<&'a str> {
    match t {
        Term::Var(v) => a.parameter(v).map(|p| p.ty.as_str()),
        Term::Const(c) => d.constants.iter().find(|k| &k.name == c).map(|k| k.ty.as_str()),
    }
}

fn fits(slot: &str, ty: &str) -> bool {
    slot == OBJECT_TYPE || slot == ty
}

/// Instantiates `partner` positionally over `lit`'s arguments; unmatched slots
/// take the first schema parameter of a compatible type.
fn partner_literal(a: &ActionSchema, d: &Domain, lit: &Literal, partner: &str) -> Option<Literal> {
    let sig = d.predicate(partner)?;
    let mut args = Vec::with_capacity(sig.arity());
    for (i, slot) in sig.parameters.iter().enumerate() {
        let positional = lit
            .args
            .get(i)
            .filter(|t| term_type(a, d, t).is_some_and(|ty| fits(&slot.ty, ty)));
        match positional {
            Some(t) => args.push(t.clone()),
            None => {
                let p = a.parameters.iter().find(|p| fits(&slot.ty, &p.ty))?;
                args.push(Term::Var(p.name.clone()));
            }
        }
    }
    Some(Literal::positive(partner, args))
}

/// Applies one explicit edit. `None` when the target does not exist or the
/// kind cannot fire there.
pub fn manipulate_at(
    a: &ActionSchema,
    kind: ManipulationKind,
    target: Target,
    mutexes: &MutexTable,
    d: &Domain,
) -> Option<ActionSchema> {
    let mut out = a.clone();
    match (kind, target) {
        (ManipulationKind::Swap, Target::Swap { pre, eff }) => {
            let p = a.preconditions.get(pre)?.clone();
            let e = a.effects.get(eff)?.clone();
            out.preconditions[pre] = e;
            out.effects[eff] = p;
        }
        (ManipulationKind::Negation, Target::At(side, i)) => {
            let l = lits_mut(&mut out, side).get_mut(i)?;
            l.negated = !l.negated;
        }
        (ManipulationKind::Removal, Target::At(side, i)) => {
            if i >= lits(a, side).len() {
                return None;
            }
            lits_mut(&mut out, side).remove(i);
        }
        (ManipulationKind::Addition, Target::At(side, i)) => {
            let l = lits(a, side).get(i)?;
            if l.negated {
                return None;
            }
            let partner = mutexes.partners(&l.predicate).next()?;
            let added = partner_literal(a, d, l, partner)?;
            lits_mut(&mut out, side).insert(i + 1, added);
        }
        _ => return None,
    }
    dedup(&mut out.preconditions);
    dedup(&mut out.effects);
    Some(out)
}

fn targets(a: &ActionSchema, kind: ManipulationKind) -> Vec<Target> {
    match kind {
        ManipulationKind::Swap => (0..a.preconditions.len())
            .flat_map(|pre| (0..a.effects.len()).map(move |eff| Target::Swap { pre, eff }))
            .collect(),
        _ => (0..a.preconditions.len())
            .map(|i| Target::At(Side::Pre, i))
            .chain((0..a.effects.len()).map(|i| Target::At(Side::Eff, i)))
            .collect(),
    }
}

/// Every well-formed, distinct result of `kind` on `a`, in target order.
/// Additions fan out over all mutex partners of the target predicate.
pub fn eligible_edits(
    a: &ActionSchema,
    kind: ManipulationKind,
    mutexes: &MutexTable,
    d: &Domain,
) -> Vec<ActionSchema> {
    let mut out = Vec::new();
    for t in targets(a, kind) {
        let results: Vec<ActionSchema> = match (kind, t) {
            (ManipulationKind::Addition, Target::At(side, i)) => {
                let l = &lits(a, side)[i];
                if l.negated {
                    continue;
                }
                mutexes
                    .partners(&l.predicate)
                    .filter_map(|q| {
                        let added = partner_literal(a, d, l, q)?;
                        let mut s = a.clone();
                        lits_mut(&mut s, side).insert(i + 1, added);
                        dedup(&mut s.preconditions);
                        dedup(&mut s.effects);
                        Some(s)
                    })
                    .collect()
            }
            _ => manipulate_at(a, kind, t, mutexes, d).into_iter().collect(),
        };
        for r in results {
            if r.canonical_text() != a.canonical_text()
                && validate_schema(&r, d).is_empty()
                && !out.contains(&r)
            {
                out.push(r);
            }
        }
    }
    out
}

/// Seeded single-literal corruption of `a`.
pub fn manipulate(
    a: &ActionSchema,
    kind: ManipulationKind,
    seed: u64,
    mutexes: &MutexTable,
    d: &Domain,
) -> Result<ActionSchema, NegativeError> {
    let mut options = eligible_edits(a, kind, mutexes, d);
    if options.is_empty() {
        return Err(NegativeError::NotApplicable {
            kind,
            action: a.name.clone(),
        });
    }
    let i = ChaCha8Rng::seed_from_u64(seed).random_range(0..options.len());
    Ok(options.swap_remove(i))
}

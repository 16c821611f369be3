use std::collections::{BTreeSet, HashMap};

use crate::pddl::{ActionSchema, Domain, GroundAtom, Literal, ProblemInstance, Term, OBJECT_TYPE};

use super::{GroundAction, GroundTask, PlanError};

/// Counters reported by [`ground_with_stats`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GroundingStats {
    /// Type-consistent instantiations enumerated before pruning.
    pub enumerated: usize,
    /// Instantiations dropped as statically inapplicable.
    pub pruned: usize,
}

/// Default cap on enumerated instantiations per task.
pub const DEFAULT_GROUNDING_BOUND: usize = 1_000_000;

pub fn ground(d: &Domain, p: &ProblemInstance) -> Result<GroundTask, PlanError> {
    ground_with_stats(d, p, DEFAULT_GROUNDING_BOUND).map(|(t, _)| t)
}

struct Proto {
    name: String,
    args: Vec<String>,
    pre_pos: Vec<GroundAtom>,
    pre_neg: Vec<GroundAtom>,
    add: Vec<GroundAtom>,
    del: Vec<GroundAtom>,
}

/// Instantiates every schema of `d` over the typed objects of `p` (plus domain
/// constants), then drops actions whose positive preconditions are relaxed
/// unreachable or that contradict themselves.
pub fn ground_with_stats(
    d: &Domain,
    p: &ProblemInstance,
    bound: usize,
) -> Result<(GroundTask, GroundingStats), PlanError> {
    let mut universe_objs: Vec<(String, String)> = p
        .objects
        .iter()
        .map(|o| (o.name.clone(), o.ty.clone()))
        .collect();
    for c in &d.constants {
        if !universe_objs.iter().any(|(n, _)| n == &c.name) {
            universe_objs.push((c.name.clone(), c.ty.clone()));
        }
    }
    for (name, ty) in &universe_objs {
        if !d.has_type(ty) {
            return Err(PlanError::UnknownType(format!("{ty} (object `{name}`)")));
        }
    }

    let mut protos = Vec::new();
    let mut stats = GroundingStats::default();
    for schema in &d.actions {
        check_schema(schema, d, &universe_objs)?;
        let domains: Vec<Vec<&str>> = schema
            .parameters
            .iter()
            .map(|prm| {
                universe_objs
                    .iter()
                    .filter(|(_, t)| prm.ty == OBJECT_TYPE || *t == prm.ty)
                    .map(|(n, _)| n.as_str())
                    .collect()
            })
            .collect();
        let count = domains
            .iter()
            .try_fold(1usize, |acc, v| acc.checked_mul(v.len()))
            .unwrap_or(usize::MAX);
        stats.enumerated = stats.enumerated.saturating_add(count);
        if stats.enumerated > bound {
            return Err(PlanError::GroundingBound { bound });
        }
        for n in 0..count {
            // mixed radix, last parameter varies fastest
            let mut rest = n;
            let mut binding = vec![""; domains.len()];
            for k in (0..domains.len()).rev() {
                binding[k] = domains[k][rest % domains[k].len()];
                rest /= domains[k].len();
            }
            protos.push(instantiate(schema, &binding));
        }
    }

    // Static pruning: relaxed reachability over positive preconditions.
    let init: BTreeSet<GroundAtom> = p.init.iter().cloned().collect();
    let mut reached: BTreeSet<&GroundAtom> = init.iter().collect();
    let mut alive = vec![false; protos.len()];
    loop {
        let mut changed = false;
        for (i, a) in protos.iter().enumerate() {
            if alive[i] || !a.pre_pos.iter().all(|x| reached.contains(x)) {
                continue;
            }
            alive[i] = true;
            changed = true;
            for x in &a.add {
                reached.insert(x);
            }
        }
        if !changed {
            break;
        }
    }
    let kept: Vec<&Proto> = protos
        .iter()
        .zip(&alive)
        .filter(|(a, &ok)| ok && !a.pre_pos.iter().any(|x| a.pre_neg.contains(x)))
        .map(|(a, _)| a)
        .collect();
    stats.pruned = protos.len() - kept.len();

    let mut atoms: BTreeSet<&GroundAtom> = init.iter().collect();
    for a in &kept {
        atoms.extend(a.pre_pos.iter().chain(&a.pre_neg).chain(&a.add).chain(&a.del));
    }
    for g in &p.goal {
        atoms.insert(&g.atom);
    }
    let mut atoms: Vec<GroundAtom> = atoms.into_iter().cloned().collect();
    atoms.sort_by_cached_key(|a| a.to_string());
    let index: HashMap<&GroundAtom, u32> =
        atoms.iter().enumerate().map(|(i, a)| (a, i as u32)).collect();
    let ids = |xs: &[GroundAtom]| -> Vec<u32> {
        let mut v: Vec<u32> = xs.iter().map(|x| index[x]).collect();
        v.sort_unstable();
        v.dedup();
        v
    };

    let actions = kept
        .iter()
        .map(|a| {
            let add = ids(&a.add);
            // add wins when an atom is both added and deleted
            let del = ids(&a.del).into_iter().filter(|x| !add.contains(x)).collect();
            GroundAction {
                name: a.name.clone(),
                args: a.args.clone(),
                pre_pos: ids(&a.pre_pos),
                pre_neg: ids(&a.pre_neg),
                add,
                del,
            }
        })
        .collect();

    let mut goal_pos = Vec::new();
    let mut goal_neg = Vec::new();
    for g in &p.goal {
        let id = index[&g.atom];
        if g.negated {
            goal_neg.push(id);
        } else {
            goal_pos.push(id);
        }
    }
    goal_pos.sort_unstable();
    goal_pos.dedup();
    goal_neg.sort_unstable();
    goal_neg.dedup();
    let mut init_ids: Vec<u32> = init.iter().map(|a| index[a]).collect();
    init_ids.sort_unstable();

    Ok((
        GroundTask {
            atoms,
            init: init_ids,
            goal_pos,
            goal_neg,
            actions,
        },
        stats,
    ))
}

fn check_schema(
    schema: &ActionSchema,
    d: &Domain,
    objs: &[(String, String)],
) -> Result<(), PlanError> {
    for prm in &schema.parameters {
        if !d.has_type(&prm.ty) {
            return Err(PlanError::UnknownType(format!(
                "{} (parameter `?{}` of `{}`)",
                prm.ty, prm.name, schema.name
            )));
        }
    }
    for lit in schema.preconditions.iter().chain(&schema.effects) {
        let sig = d
            .predicate(&lit.predicate)
            .ok_or_else(|| PlanError::UndeclaredPredicate(lit.predicate.clone()))?;
        if sig.arity() != lit.args.len() {
            return Err(PlanError::Arity(lit.to_string()));
        }
        for t in &lit.args {
            match t {
                Term::Var(v) if schema.parameter(v).is_none() => {
                    return Err(PlanError::UnboundVariable(format!("?{v} in {}", schema.name)))
                }
                Term::Const(c) if !objs.iter().any(|(n, _)| n == c) => {
                    return Err(PlanError::UnknownObject(c.clone()))
                }
                _ => {}
            }
        }
    }
    Ok(())
}

fn instantiate(schema: &ActionSchema, binding: &[&str]) -> Proto {
    let bind = |lit: &Literal| -> GroundAtom {
        let args = lit
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => {
                    let i = schema
                        .parameters
                        .iter()
                        .position(|p| &p.name == v)
                        .expect("checked before instantiation");
                    binding[i].to_string()
                }
                Term::Const(c) => c.clone(),
            })
            .collect();
        GroundAtom::new(lit.predicate.clone(), args)
    };
    let split = |lits: &[Literal]| -> (Vec<GroundAtom>, Vec<GroundAtom>) {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for l in lits {
            if l.negated {
                neg.push(bind(l));
            } else {
                pos.push(bind(l));
            }
        }
        (pos, neg)
    };
    let (pre_pos, pre_neg) = split(&schema.preconditions);
    let (add, del) = split(&schema.effects);
    Proto {
        name: schema.name.clone(),
        args: binding.iter().map(|s| s.to_string()).collect(),
        pre_pos,
        pre_neg,
        add,
        del,
    }
}

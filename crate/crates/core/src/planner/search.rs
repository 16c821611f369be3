use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet, VecDeque};

use super::{GroundAction, GroundTask, Plan, SearchLimits, Strategy};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Plan(Plan),
    /// The reachable state space was exhausted without meeting the goal.
    Unsolvable,
    ResourcesExhausted,
}

type State = Box<[u64]>;

fn words(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

fn has(s: &[u64], i: u32) -> bool {
    s[(i / 64) as usize] >> (i % 64) & 1 == 1
}

fn set(s: &mut [u64], i: u32, on: bool) {
    let w = &mut s[(i / 64) as usize];
    if on {
        *w |= 1 << (i % 64);
    } else {
        *w &= !(1 << (i % 64));
    }
}

fn initial(t: &GroundTask) -> State {
    let mut s = vec![0u64; words(t.atoms.len())].into_boxed_slice();
    for &i in &t.init {
        set(&mut s, i, true);
    }
    s
}

fn applicable(a: &GroundAction, s: &[u64]) -> bool {
    a.pre_pos.iter().all(|&i| has(s, i)) && !a.pre_neg.iter().any(|&i| has(s, i))
}

fn apply(a: &GroundAction, s: &[u64]) -> State {
    let mut n: State = s.into();
    for &i in &a.del {
        set(&mut n, i, false);
    }
    for &i in &a.add {
        set(&mut n, i, true);
    }
    n
}

fn is_goal(t: &GroundTask, s: &[u64]) -> bool {
    t.goal_pos.iter().all(|&i| has(s, i)) && !t.goal_neg.iter().any(|&i| has(s, i))
}

/// Delete-free fixpoint from the initial state, ignoring negative conditions.
/// `false` proves the task unsolvable; `true` is inconclusive.
pub fn relaxed_reachable(t: &GroundTask) -> bool {
    let mut reached = vec![false; t.atoms.len()];
    for &i in &t.init {
        reached[i as usize] = true;
    }
    let mut fired = vec![false; t.actions.len()];
    loop {
        let mut changed = false;
        for (k, a) in t.actions.iter().enumerate() {
            if fired[k] || !a.pre_pos.iter().all(|&i| reached[i as usize]) {
                continue;
            }
            fired[k] = true;
            for &i in &a.add {
                if !reached[i as usize] {
                    reached[i as usize] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    t.goal_pos.iter().all(|&i| reached[i as usize])
}

/// Simulates `plan` from the initial state. Steps that name no action of `t`
/// make the plan invalid.
pub fn validate_plan(t: &GroundTask, plan: &Plan) -> bool {
    let mut s = initial(t);
    for step in &plan.steps {
        match t.find_action(step) {
            Some(a) if applicable(a, &s) => s = apply(a, &s),
            _ => return false,
        }
    }
    is_goal(t, &s)
}

pub fn search_plan(t: &GroundTask, lim: &SearchLimits) -> SearchOutcome {
    match lim.strategy {
        Strategy::Bfs => bfs(t, lim),
        Strategy::GbfsHadd => gbfs(t, lim),
    }
}

struct Node {
    parent: usize,
    action: usize,
    depth: usize,
}

fn extract(t: &GroundTask, nodes: &[Node], mut at: usize) -> Plan {
    let mut steps = Vec::new();
    while at != 0 {
        steps.push(t.actions[nodes[at].action].step());
        at = nodes[at].parent;
    }
    steps.reverse();
    Plan { steps }
}

fn bfs(t: &GroundTask, lim: &SearchLimits) -> SearchOutcome {
    let start = initial(t);
    if is_goal(t, &start) {
        return SearchOutcome::Plan(Plan::default());
    }
    let mut seen: HashSet<State> = HashSet::new();
    let mut states: Vec<State> = vec![start.clone()];
    let mut nodes = vec![Node {
        parent: 0,
        action: usize::MAX,
        depth: 0,
    }];
    seen.insert(start);
    let mut queue = VecDeque::from([0usize]);
    let mut expanded = 0;
    let mut cut = false;
    while let Some(cur) = queue.pop_front() {
        if nodes[cur].depth >= lim.max_plan_length {
            cut = true;
            continue;
        }
        expanded += 1;
        if expanded > lim.max_expanded_states {
            return SearchOutcome::ResourcesExhausted;
        }
        for (k, a) in t.actions.iter().enumerate() {
            if !applicable(a, &states[cur]) {
                continue;
            }
            let next = apply(a, &states[cur]);
            if seen.contains(&next) {
                continue;
            }
            seen.insert(next.clone());
            nodes.push(Node {
                parent: cur,
                action: k,
                depth: nodes[cur].depth + 1,
            });
            let id = nodes.len() - 1;
            if is_goal(t, &next) {
                return SearchOutcome::Plan(extract(t, &nodes, id));
            }
            states.push(next);
            queue.push_back(id);
        }
    }
    if cut {
        SearchOutcome::ResourcesExhausted
    } else {
        SearchOutcome::Unsolvable
    }
}

/// Additive heuristic; `None` when some positive goal is relaxed unreachable.
fn h_add(t: &GroundTask, s: &[u64]) -> Option<u64> {
    const INF: u64 = u64::MAX;
    let mut cost = vec![INF; t.atoms.len()];
    for (i, c) in cost.iter_mut().enumerate() {
        if has(s, i as u32) {
            *c = 0;
        }
    }
    loop {
        let mut changed = false;
        for a in &t.actions {
            let mut pre = 1u64;
            for &i in &a.pre_pos {
                let c = cost[i as usize];
                if c == INF {
                    pre = INF;
                    break;
                }
                pre = pre.saturating_add(c);
            }
            if pre == INF {
                continue;
            }
            for &i in &a.add {
                if pre < cost[i as usize] {
                    cost[i as usize] = pre;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    t.goal_pos.iter().try_fold(0u64, |acc, &i| {
        let c = cost[i as usize];
        (c != INF).then(|| acc.saturating_add(c))
    })
}

fn gbfs(t: &GroundTask, lim: &SearchLimits) -> SearchOutcome {
    let start = initial(t);
    let Some(h0) = h_add(t, &start) else {
        return SearchOutcome::Unsolvable;
    };
    let mut seen: HashSet<State> = HashSet::new();
    let mut states = vec![start.clone()];
    let mut nodes = vec![Node {
        parent: 0,
        action: usize::MAX,
        depth: 0,
    }];
    seen.insert(start);
    // ties broken by insertion order for reproducibility
    let mut open = BinaryHeap::from([Reverse((h0, 0usize))]);
    let mut expanded = 0;
    let mut cut = false;
    while let Some(Reverse((_, cur))) = open.pop() {
        if is_goal(t, &states[cur]) {
            return SearchOutcome::Plan(extract(t, &nodes, cur));
        }
        if nodes[cur].depth >= lim.max_plan_length {
            cut = true;
            continue;
        }
        expanded += 1;
        if expanded > lim.max_expanded_states {
            return SearchOutcome::ResourcesExhausted;
        }
        for (k, a) in t.actions.iter().enumerate() {
            if !applicable(a, &states[cur]) {
                continue;
            }
            let next = apply(a, &states[cur]);
            if seen.contains(&next) {
                continue;
            }
            seen.insert(next.clone());
            let h = h_add(t, &next);
            nodes.push(Node {
                parent: cur,
                action: k,
                depth: nodes[cur].depth + 1,
            });
            states.push(next);
            if let Some(h) = h {
                open.push(Reverse((h, nodes.len() - 1)));
            }
        }
    }
    if cut {
        SearchOutcome::ResourcesExhausted
    } else {
        SearchOutcome::Unsolvable
    }
}

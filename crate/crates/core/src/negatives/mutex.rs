use std::collections::{BTreeSet, HashSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::NegativeError;
use crate::pddl::{Domain, ProblemInstance};
use crate::planner::ground;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutexProvenance {
    Config,
    Detected,
}

/// Unordered predicate pairs that never hold together (stored sorted).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutexTable {
    pub pairs: BTreeSet<(String, String)>,
    pub provenance: MutexProvenance,
}

impl MutexTable {
    pub fn empty(provenance: MutexProvenance) -> Self {
        MutexTable {
            pairs: BTreeSet::new(),
            provenance,
        }
    }

    pub fn from_pairs<I, S>(pairs: I, provenance: MutexProvenance) -> Result<Self, NegativeError>
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut t = MutexTable::empty(provenance);
        for (a, b) in pairs {
            let (a, b) = (a.into().to_lowercase(), b.into().to_lowercase());
            if a == b {
                return Err(NegativeError::InvalidMutex(format!("`{a}` paired with itself")));
            }
            t.pairs.insert(if a < b { (a, b) } else { (b, a) });
        }
        Ok(t)
    }

    /// Reads a JSON list of `[pred_a, pred_b]` pairs.
    pub fn load(path: &Path) -> Result<Self, NegativeError> {
        let raw: Vec<(String, String)> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        Self::from_pairs(raw, MutexProvenance::Config)
    }

    pub fn to_json(&self) -> String {
        let v: Vec<[&str; 2]> = self.pairs.iter().map(|(a, b)| [a.as_str(), b.as_str()]).collect();
        serde_json::to_string(&v).expect("string pairs serialize")
    }

    /// Fails when a pair names a predicate `d` does not declare.
    pub fn check(&self, d: &Domain) -> Result<(), NegativeError> {
        for (a, b) in &self.pairs {
            for p in [a, b] {
                if d.predicate(p).is_none() {
                    return Err(NegativeError::InvalidMutex(format!(
                        "`{p}` is not declared in `{}`",
                        d.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, a: &str, b: &str) -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        self.pairs.iter().any(|(x, y)| x == key.0 && y == key.1)
    }

    /// Mutex partners of `pred`, sorted.
    pub fn partners<'a>(&'a self, pred: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.pairs.iter().filter_map(move |(a, b)| {
            if a == pred {
                Some(b.as_str())
            } else if b == pred {
                Some(a.as_str())
            } else {
                None
            }
        })
    }
}

/// Enumerates the reachable states of `(d, p)` and keeps the predicate pairs
/// that are never true together on a shared object (or with either side
/// nullary). Predicates never true in any reachable state are ignored.
pub fn detect_mutexes(
    d: &Domain,
    p: &ProblemInstance,
    state_bound: usize,
) -> Result<MutexTable, NegativeError> {
    let t = ground(d, p)?;
    let start: Vec<u32> = t.init.clone();
    let mut seen: HashSet<Vec<u32>> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut states = Vec::new();
    while let Some(s) = queue.pop_front() {
        for a in &t.actions {
            let ok = a.pre_pos.iter().all(|x| s.binary_search(x).is_ok())
                && !a.pre_neg.iter().any(|x| s.binary_search(x).is_ok());
            if !ok {
                continue;
            }
            let mut n: Vec<u32> = s.iter().copied().filter(|x| !a.del.contains(x)).collect();
            n.extend(&a.add);
            n.sort_unstable();
            n.dedup();
            if seen.insert(n.clone()) {
                if seen.len() > state_bound {
                    return Err(NegativeError::StateBoundExceeded(state_bound));
                }
                queue.push_back(n);
            }
        }
        states.push(s);
    }

    let preds: Vec<&str> = d.predicates.iter().map(|p| p.name.as_str()).collect();
    let mut ever_true: HashSet<&str> = HashSet::new();
    let mut co_true: HashSet<(&str, &str)> = HashSet::new();
    for s in &states {
        let atoms: Vec<_> = s.iter().map(|&i| &t.atoms[i as usize]).collect();
        for x in &atoms {
            ever_true.insert(x.predicate.as_str());
        }
        for (i, x) in atoms.iter().enumerate() {
            for y in &atoms[i + 1..] {
                let linked = x.args.is_empty()
                    || y.args.is_empty()
                    || x.args.iter().any(|o| y.args.contains(o));
                if linked {
                    let (a, b) = (x.predicate.as_str(), y.predicate.as_str());
                    co_true.insert(if a < b { (a, b) } else { (b, a) });
                }
            }
        }
    }

    let mut table = MutexTable::empty(MutexProvenance::Detected);
    for (i, a) in preds.iter().enumerate() {
        for b in &preds[i + 1..] {
            if !ever_true.contains(a) || !ever_true.contains(b) {
                continue;
            }
            let key = if a < b { (*a, *b) } else { (*b, *a) };
            if !co_true.contains(&key) {
                table.pairs.insert((key.0.to_string(), key.1.to_string()));
            }
        }
    }
    Ok(table)
}

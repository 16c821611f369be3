//! Schema-set enumeration, solvability sweep, plan ranking and reporting.

mod rank;
mod report;
mod sweep;

use thiserror::Error;

use crate::ingest::{CandidateSchema, SchemaLibrary};
use crate::pddl::Domain;

pub use rank::{dedupe_plans, rank_plans, write_ranked, PlanGroup, RankedPlan};
pub use report::{report, write_report_csv, ReportContext, SweepReport, CSV_HEADERS};
pub use sweep::{sweep, sweep_sets, SweepResult, SweepStatus};

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("EMPTY_BUCKET: no selectable candidate for {}", .0.join(", "))]
    EmptyBucket(Vec<String>),
    #[error("too many combinations to index: {0}")]
    TooManySets(u128),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// One complete selection, one candidate per action in reference order.
#[derive(Clone, Debug)]
pub struct SchemaSet<'a> {
    pub set_id: u64,
    pub selections: Vec<&'a CandidateSchema>,
}

impl SchemaSet<'_> {
    /// The reference domain with this set's schemas as its actions.
    pub fn domain(&self, reference: &Domain) -> Domain {
        reference.with_actions(
            self.selections
                .iter()
                .filter_map(|c| c.schema.clone())
                .collect(),
        )
    }

    pub fn similarities(&self) -> Vec<f64> {
        self.selections.iter().map(|c| c.similarity.unwrap_or(0.0)).collect()
    }
}

/// Streams every combination of selectable candidates in mixed-radix order:
/// the last action varies fastest and `set_id` is the mixed-radix index.
pub struct SetIter<'a> {
    pools: Vec<Vec<&'a CandidateSchema>>,
    next: u64,
    total: u64,
}

impl<'a> SetIter<'a> {
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Decodes a set id without walking the stream.
    pub fn get(&self, set_id: u64) -> Option<SchemaSet<'a>> {
        if set_id >= self.total {
            return None;
        }
        let mut rest = set_id;
        let mut selections = vec![self.pools[0][0]; self.pools.len()];
        for (i, pool) in self.pools.iter().enumerate().rev() {
            let m = pool.len() as u64;
            selections[i] = pool[(rest % m) as usize];
            rest /= m;
        }
        Some(SchemaSet { set_id, selections })
    }
}

impl<'a> Iterator for SetIter<'a> {
    type Item = SchemaSet<'a>;

    fn next(&mut self) -> Option<Self::Item> {
        let s = self.get(self.next)?;
        self.next += 1;
        Some(s)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next.min(self.total)) as usize;
        (left, Some(left))
    }
}

pub fn enumerate_sets(lib: &SchemaLibrary) -> Result<SetIter<'_>, EnsembleError> {
    let pools: Vec<Vec<&CandidateSchema>> = lib.buckets.iter().map(|b| b.selectable().collect()).collect();
    let empty: Vec<String> = lib
        .buckets
        .iter()
        .zip(&pools)
        .filter(|(_, p)| p.is_empty())
        .map(|(b, _)| b.action.clone())
        .collect();
    if !empty.is_empty() {
        return Err(EnsembleError::EmptyBucket(empty));
    }
    let total = lib.viable_combinations();
    if total > u64::MAX as u128 {
        return Err(EnsembleError::TooManySets(total));
    }
    // A library with no actions has exactly one (empty) set; guard the decoder.
    if pools.is_empty() {
        return Ok(SetIter {
            pools,
            next: 1,
            total: 1,
        });
    }
    Ok(SetIter {
        pools,
        next: 0,
        total: total as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Bucket;
    use crate::pddl::parse_action;

    pub(crate) fn lib(sizes: &[usize]) -> SchemaLibrary {
        SchemaLibrary {
            domain: "t".into(),
            buckets: sizes
                .iter()
                .enumerate()
                .map(|(j, &m)| Bucket {
                    action: format!("a{j}"),
                    candidates: (0..m)
                        .map(|i| {
                            let s = parse_action(&format!("(:action a{j} :parameters () :effect (p{i}))")).unwrap();
                            CandidateSchema::from_schema(s, j as u32 + 1, i as u32 + 1)
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    #[test]
    fn product_count_and_order() {
        let l = lib(&[3, 2, 4]);
        let sets: Vec<_> = enumerate_sets(&l).unwrap().collect();
        assert_eq!(sets.len(), 24);
        assert!(sets.iter().enumerate().all(|(i, s)| s.set_id == i as u64));
        // last action varies fastest
        assert_eq!(sets[1].selections[2].instance, 2);
        assert_eq!(sets[4].selections[1].instance, 2);
        assert_eq!(sets[8].selections[0].instance, 2);
        assert_eq!(enumerate_sets(&lib(&[1, 1, 1])).unwrap().count(), 1);
    }

    #[test]
    fn empty_bucket_names_the_action() {
        match enumerate_sets(&lib(&[2, 0, 3, 0])) {
            Err(EnsembleError::EmptyBucket(a)) => assert_eq!(a, vec!["a1", "a3"]),
            other => panic!("{:?}", other.map(|i| i.total())),
        }
    }
}

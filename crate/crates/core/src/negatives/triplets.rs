use std::io::{BufWriter, Write};
use std::path::Path;

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{manipulate, ManipulationKind, MutexTable, NegativeError};
use crate::ingest::{Granularity, NaturalLanguageSpec};
use crate::pddl::Domain;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativeType {
    /// Schema from another domain.
    Easy,
    /// Another action of the same domain.
    SemiHard,
    /// Manipulated copy of the true schema.
    Hard,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripletSample {
    pub anchor: String,
    pub positive: String,
    pub negative: String,
    pub negative_type: NegativeType,
    pub manipulation: Option<ManipulationKind>,
    pub domain: String,
    pub action: String,
}

/// One training domain: its descriptions, reference schemas and mutexes.
#[derive(Clone, Debug)]
pub struct TrainingDomain {
    pub spec: NaturalLanguageSpec,
    pub domain: Domain,
    pub mutexes: MutexTable,
}

/// Draws `count` triplets. Negative types follow `weights` = [easy,
/// semi-hard, hard]; hard negatives use a uniformly drawn manipulation kind,
/// falling back to the remaining kinds when one cannot fire. Anchors use the
/// detailed or ambiguous description with equal probability.
pub fn build_triplets(
    corpus: &[TrainingDomain],
    weights: [f64; 3],
    count: usize,
    seed: u64,
) -> Result<Vec<TripletSample>, NegativeError> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-6 {
        return Err(NegativeError::InfeasibleWeights(format!(
            "{weights:?} must be nonnegative and sum to 1"
        )));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    if corpus.is_empty() {
        return Err(NegativeError::InfeasibleWeights("empty corpus".into()));
    }
    if weights[0] > 0.0 && corpus.len() < 2 {
        return Err(NegativeError::InfeasibleWeights(
            "easy negatives need at least two domains".into(),
        ));
    }
    if weights[1] > 0.0 && !corpus.iter().any(|c| c.domain.actions.len() >= 2) {
        return Err(NegativeError::InfeasibleWeights(
            "semi-hard negatives need a domain with two actions".into(),
        ));
    }
    let kinds = WeightedIndex::new(weights)
        .map_err(|e| NegativeError::InfeasibleWeights(e.to_string()))?;
    let types = [NegativeType::Easy, NegativeType::SemiHard, NegativeType::Hard];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut stalls = 0usize;

    while out.len() < count {
        let ty = types[kinds.sample(&mut rng)];
        let di = rng.random_range(0..corpus.len());
        let td = &corpus[di];
        if td.domain.actions.is_empty() || (ty == NegativeType::SemiHard && td.domain.actions.len() < 2) {
            continue;
        }
        let ai = rng.random_range(0..td.domain.actions.len());
        let action = &td.domain.actions[ai];
        let g = if rng.random_bool(0.5) {
            Granularity::Detailed
        } else {
            Granularity::Ambiguous
        };
        let anchor = td
            .spec
            .actions
            .get(&action.name)
            .map(|d| d.at(g).to_string())
            .unwrap_or_default();
        let positive = action.canonical_text();

        let (negative, manipulation) = match ty {
            NegativeType::Easy => {
                let others: Vec<usize> = (0..corpus.len())
                    .filter(|&k| k != di && !corpus[k].domain.actions.is_empty())
                    .collect();
                let Some(&k) = others.choose(&mut rng) else {
                    stalls += 1;
                    check_stalls(stalls)?;
                    continue;
                };
                let acts = &corpus[k].domain.actions;
                (acts[rng.random_range(0..acts.len())].canonical_text(), None)
            }
            NegativeType::SemiHard => {
                let mut j = rng.random_range(0..td.domain.actions.len() - 1);
                if j >= ai {
                    j += 1;
                }
                (td.domain.actions[j].canonical_text(), None)
            }
            NegativeType::Hard => {
                let mut order = ManipulationKind::ALL;
                order.shuffle(&mut rng);
                let s = rng.next_u64();
                match order
                    .iter()
                    .find_map(|&k| manipulate(action, k, s, &td.mutexes, &td.domain).ok().map(|m| (m, k)))
                {
                    Some((m, k)) => (m.canonical_text(), Some(k)),
                    None => {
                        stalls += 1;
                        check_stalls(stalls)?;
                        continue;
                    }
                }
            }
        };
        if negative == positive || anchor.is_empty() {
            stalls += 1;
            check_stalls(stalls)?;
            continue;
        }
        out.push(TripletSample {
            anchor,
            positive,
            negative,
            negative_type: ty,
            manipulation,
            domain: td.domain.name.clone(),
            action: action.name.clone(),
        });
    }
    Ok(out)
}

fn check_stalls(n: usize) -> Result<(), NegativeError> {
    if n > 100_000 {
        Err(NegativeError::InfeasibleWeights(
            "corpus cannot produce the requested negative types".into(),
        ))
    } else {
        Ok(())
    }
}

#[derive(Serialize)]
struct Line<'a> {
    #[serde(flatten)]
    sample: &'a TripletSample,
    config_digest: &'a str,
}

pub fn write_triplets(
    path: &Path,
    samples: &[TripletSample],
    config_digest: &str,
) -> Result<(), NegativeError> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    for s in samples {
        serde_json::to_writer(&mut w, &Line {
            sample: s,
            config_digest,
        })?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

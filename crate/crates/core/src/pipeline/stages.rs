use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{PipelineConfig, PipelineError, ProviderKind, EMBEDDING_KEY_ENV};
use crate::ensemble::{
    dedupe_plans, enumerate_sets, rank_plans, report, sweep_sets, write_ranked, write_report_csv,
    EnsembleError, PlanGroup, RankedPlan, ReportContext, SweepReport,
};
use crate::ingest::{
    build_library, read_candidates, render_prompt, write_candidates, CandidateSchema, FewShotExample,
    Granularity, LlmClient, NaturalLanguageSpec, SchemaLibrary,
};
use crate::negatives::{build_triplets, detect_mutexes, write_triplets, MutexProvenance, MutexTable, TrainingDomain, TripletSample};
use crate::pddl::{parse_action, parse_domain, parse_problem, Domain, ProblemInstance};
use crate::semantic::{
    calibrate, filter_library, load_calibration, score_library, score_records, CalibrationSet, EmbeddingProvider,
    LocalBaseline, RemoteHttp, Threshold,
};

fn read(path: &Path) -> Result<String, PipelineError> {
    std::fs::read_to_string(path).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))
}

fn reference(cfg: &PipelineConfig) -> Result<Domain, PipelineError> {
    Ok(parse_domain(&read(&cfg.require(&cfg.paths.domain, "domain")?)?)?)
}

fn problem(cfg: &PipelineConfig) -> Result<ProblemInstance, PipelineError> {
    Ok(parse_problem(&read(&cfg.require(&cfg.paths.problem, "problem")?)?)?)
}

fn nl_spec(cfg: &PipelineConfig, d: &Domain) -> Result<NaturalLanguageSpec, PipelineError> {
    let path = cfg.require(&cfg.paths.nl_spec, "nl_spec")?;
    NaturalLanguageSpec::load(&path, d, cfg.granularity).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn ensure_parent(path: &Path) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(())
}

pub fn provider(cfg: &PipelineConfig) -> Box<dyn EmbeddingProvider> {
    match cfg.embedding.provider {
        ProviderKind::LocalBaseline => Box::new(LocalBaseline::default()),
        ProviderKind::RemoteHttp => Box::new(RemoteHttp::new(
            cfg.embedding.endpoint.clone(),
            cfg.embedding.model.clone(),
            std::env::var(EMBEDDING_KEY_ENV).ok(),
            cfg.embedding.max_in_flight,
        )),
    }
}

/// Step 1: N candidates for every action, written to the candidate store in
/// (action, instance) order.
pub fn generate_stage(cfg: &PipelineConfig) -> Result<Vec<CandidateSchema>, PipelineError> {
    let d = reference(cfg)?;
    let spec = nl_spec(cfg, &d)?;
    let examples: Vec<FewShotExample> = match &cfg.paths.few_shot {
        Some(_) => serde_json::from_str(&read(&cfg.require(&cfg.paths.few_shot, "few_shot")?)?)?,
        None => Vec::new(),
    };
    let mut llm = cfg.llm.clone();
    llm.replay_store = llm.replay_store.as_deref().map(|p| cfg.resolve(p));
    let client = LlmClient::from_config(llm)?;

    let mut jobs = Vec::new();
    for a in &d.actions {
        let prompt = render_prompt(&spec, &a.name, &examples)?;
        for i in 1..=cfg.llm.instances {
            jobs.push((prompt.clone(), i));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.llm.concurrency)
        .build()
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    let candidates: Vec<CandidateSchema> = pool.install(|| {
        jobs.par_iter()
            .map(|(prompt, i)| {
                let raw = client.request(prompt, *i)?;
                Ok(CandidateSchema::from_response(&prompt.action, *i, &raw, &d)?)
            })
            .collect::<Result<_, PipelineError>>()
    })?;
    let out = cfg.candidates_path();
    ensure_parent(&out)?;
    write_candidates(&out, &candidates, &cfg.digest())?;
    Ok(candidates)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFile {
    #[serde(flatten)]
    pub threshold: Threshold,
    pub config_digest: String,
}

fn compute_threshold(cfg: &PipelineConfig, provider: &dyn EmbeddingProvider) -> Result<Threshold, PipelineError> {
    let mut records = load_calibration(&cfg.require(&cfg.paths.calibration, "calibration")?)?;
    score_records(&mut records, provider)?;
    Ok(calibrate(
        &CalibrationSet {
            records,
            epsilon: cfg.cp.epsilon,
            mode: cfg.cp.mode,
        },
        &provider.id(),
    )?)
}

/// Scores the calibration set and writes `threshold.json`.
pub fn calibrate_stage(cfg: &PipelineConfig) -> Result<Threshold, PipelineError> {
    let p = provider(cfg);
    let th = compute_threshold(cfg, p.as_ref())?;
    write_json(
        &cfg.output_dir().join("threshold.json"),
        &ThresholdFile {
            threshold: th.clone(),
            config_digest: cfg.digest(),
        },
    )?;
    Ok(th)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LibraryFile {
    pub config_digest: String,
    pub cp_applied: bool,
    pub threshold: Option<Threshold>,
    /// Selectable candidates m_i per action.
    pub viable_counts: Vec<usize>,
    pub combinations: u128,
    pub library: SchemaLibrary,
}

/// Reads a library file and re-parses each candidate's schema text.
pub fn load_library(path: &Path) -> Result<LibraryFile, PipelineError> {
    let mut f: LibraryFile = serde_json::from_str(&read(path)?)?;
    for c in f.library.buckets.iter_mut().flat_map(|b| b.candidates.iter_mut()) {
        if !c.schema_pddl.is_empty() {
            c.schema = Some(parse_action(&c.schema_pddl)?);
        }
    }
    Ok(f)
}

/// Step 2: similarity scores for every candidate and, with CP enabled, the
/// conformal filter. Nothing is written unless every score succeeds.
pub fn filter_stage(cfg: &PipelineConfig) -> Result<LibraryFile, PipelineError> {
    let d = reference(cfg)?;
    let spec = nl_spec(cfg, &d)?;
    let lib = build_library(read_candidates(&cfg.candidates_path())?, &d)?;
    let p = provider(cfg);
    let (lib, threshold) = if cfg.cp.enabled {
        let th = compute_threshold(cfg, p.as_ref())?;
        (filter_library(&lib, &spec, &th, p.as_ref())?, Some(th))
    } else {
        (score_library(&lib, &spec, p.as_ref())?, None)
    };
    let file = LibraryFile {
        config_digest: cfg.digest(),
        cp_applied: cfg.cp.enabled,
        threshold: threshold.clone(),
        viable_counts: lib.viable_counts(),
        combinations: lib.viable_combinations(),
        library: lib,
    };
    if let Some(th) = threshold {
        write_json(
            &cfg.output_dir().join("threshold.json"),
            &ThresholdFile {
                threshold: th,
                config_digest: cfg.digest(),
            },
        )?;
    }
    write_json(&cfg.library_path(), &file)?;
    Ok(file)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanRankOutcome {
    pub config_digest: String,
    pub report: SweepReport,
    /// Actions left without a selectable candidate.
    pub empty_buckets: Vec<String>,
    pub ranked: Vec<RankedPlan>,
    pub groups: Vec<PlanGroup>,
}

impl PlanRankOutcome {
    pub fn solved(&self) -> bool {
        self.report.solved_combinations > 0
    }
}

/// Step 3: sweep every set, rank the plans and write the reports. Reads the
/// library file when present, the raw candidate store otherwise.
pub fn plan_rank_stage(cfg: &PipelineConfig) -> Result<PlanRankOutcome, PipelineError> {
    let d = reference(cfg)?;
    let p = problem(cfg)?;
    let lib_path = cfg.library_path();
    let file = if lib_path.exists() {
        load_library(&lib_path)?
    } else {
        let lib = build_library(read_candidates(&cfg.candidates_path())?, &d)?;
        LibraryFile {
            config_digest: cfg.digest(),
            cp_applied: false,
            threshold: None,
            viable_counts: lib.viable_counts(),
            combinations: lib.viable_combinations(),
            library: lib,
        }
    };
    let (results, empty_buckets) = match enumerate_sets(&file.library) {
        Ok(sets) => (sweep_sets(sets, &d, &p, &cfg.search, cfg.parallelism)?, Vec::new()),
        Err(EnsembleError::EmptyBucket(actions)) => (Vec::new(), actions),
        Err(e) => return Err(e.into()),
    };
    let ctx = ReportContext {
        domain: d.name.clone(),
        granularity: cfg.granularity,
        instances: cfg.llm.instances,
        cp_applied: file.cp_applied,
        cp_threshold: file.threshold.as_ref().map(|t| t.q_hat),
    };
    let ranked = rank_plans(&results);
    let groups = dedupe_plans(&ranked);
    let out = PlanRankOutcome {
        config_digest: cfg.digest(),
        report: report(&results, &ctx),
        empty_buckets,
        ranked,
        groups,
    };
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir)?;
    write_report_csv(&dir.join("report.csv"), std::slice::from_ref(&out.report))?;
    write_json(
        &dir.join("report.json"),
        &json!({
            "config_digest": out.config_digest,
            "report": out.report,
            "empty_buckets": out.empty_buckets,
            "top_plan": out.ranked.first(),
        }),
    )?;
    write_ranked(&dir.join("ranked_plans.jsonl"), &out.ranked, &out.config_digest)?;
    write_json(
        &dir.join("plan_groups.json"),
        &json!({ "config_digest": out.config_digest, "groups": out.groups }),
    )?;
    Ok(out)
}

fn training_domain(dir: &Path, state_bound: usize) -> Result<TrainingDomain, PipelineError> {
    let domain = parse_domain(&read(&dir.join("domain.pddl"))?)?;
    let spec = NaturalLanguageSpec::load(&dir.join("nl.json"), &domain, Granularity::Detailed)?;
    let mutex_path = dir.join("mutexes.json");
    let problem_path = dir.join("problem.pddl");
    let mutexes = if mutex_path.exists() {
        MutexTable::load(&mutex_path)?
    } else if problem_path.exists() {
        detect_mutexes(&domain, &parse_problem(&read(&problem_path)?)?, state_bound)?
    } else {
        MutexTable::empty(MutexProvenance::Config)
    };
    mutexes.check(&domain)?;
    Ok(TrainingDomain { spec, domain, mutexes })
}

/// Triplet dataset over the training domains, seeded from the config seed.
pub fn negatives_stage(cfg: &PipelineConfig) -> Result<Vec<TripletSample>, PipelineError> {
    if cfg.paths.training.is_empty() {
        return Err(PipelineError::Config("paths.training is empty".into()));
    }
    let corpus: Vec<TrainingDomain> = cfg
        .paths
        .training
        .iter()
        .map(|p| training_domain(&cfg.resolve(p), cfg.negatives.state_bound))
        .collect::<Result<_, _>>()?;
    let samples = build_triplets(&corpus, cfg.negatives.weights, cfg.negatives.count, cfg.stage_seed("negatives"))?;
    let out = cfg.output_dir().join("triplets.jsonl");
    ensure_parent(&out)?;
    write_triplets(&out, &samples, &cfg.digest())?;
    Ok(samples)
}

/// generate → filter → plan-rank.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PlanRankOutcome, PipelineError> {
    generate_stage(cfg)?;
    filter_stage(cfg)?;
    plan_rank_stage(cfg)
}

/// Records when `command` last ran. The only artifact with wall-clock data.
pub fn write_run_metadata(cfg: &PipelineConfig, command: &str) -> Result<PathBuf, PipelineError> {
    let path = cfg.output_dir().join("run_metadata.json");
    let mut meta: Value = if path.exists() {
        serde_json::from_str(&read(&path)?).unwrap_or_else(|_| json!({}))
    } else {
        json!({})
    };
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    meta[command] = json!({
        "config_digest": cfg.digest(),
        "finished_unix": now,
        "version": env!("CARGO_PKG_VERSION"),
    });
    write_json(&path, &meta)?;
    Ok(path)
}

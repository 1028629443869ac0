//! Batch execution: N independent runs per configuration with derived
//! seeds, per-run artifacts, aggregate statistics, and parameter sweeps.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::engine::{Engine, Population};
use crate::metrics::{
    quantile, relative_fht, write_series_csv, write_spread_csv, MetricsCollector, RunMetrics,
    SpreadRecord,
};
use crate::problems::Genotype;
use crate::topology::Graph;

use super::config::{derive_seed, ExperimentConfig, ENGINE_STREAM, GRAPH_STREAM};
use super::HarnessError;

/// RNG provenance recorded in every summary, enough to rerun any single run.
pub const RNG_DESCRIPTION: &str =
    "chacha8 (rand_chacha 0.3); run seeds = splitmix64(master ^ stream*K1 ^ index*K2), \
     stream 1 = graph, stream 2 = engine";

/// Statistics over the runs where a metric was defined.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct StatSummary {
    pub defined: usize,
    pub undefined: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub median: Option<f64>,
    pub q1: Option<f64>,
    pub q3: Option<f64>,
}

impl StatSummary {
    pub fn from_values(values: &[f64], undefined: usize) -> Self {
        if values.is_empty() {
            return StatSummary {
                defined: 0,
                undefined,
                mean: None,
                std: None,
                median: None,
                q1: None,
                q3: None,
            };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        StatSummary {
            defined: values.len(),
            undefined,
            mean: Some(mean),
            std: Some(std),
            median: Some(quantile(&sorted, 0.5)),
            q1: Some(quantile(&sorted, 0.25)),
            q3: Some(quantile(&sorted, 0.75)),
        }
    }

    /// Standard error of the mean.
    pub fn standard_error(&self) -> Option<f64> {
        match (self.std, self.defined) {
            (Some(std), n) if n > 0 => Some(std / (n as f64).sqrt()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CampaignSummary {
    pub runs: usize,
    pub failures: usize,
    pub fht: StatSummary,
    pub fct: StatSummary,
    pub max_distinct_optima: StatSummary,
}

/// One line of runs.jsonl / one row of runs.csv.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph_seed: Option<u64>,
    pub fht: Option<u64>,
    pub fct: Option<u64>,
    pub max_distinct_optima: usize,
    pub final_distinct_optima: usize,
    pub cum_distinct_optima: usize,
}

#[derive(Debug)]
pub struct CampaignOutput {
    pub summary: CampaignSummary,
    pub records: Vec<RunRecord>,
    pub output_dir: PathBuf,
}

/// Optional population initializer, run index -> individuals; `None` falls
/// back on the uniform random initialization. A test hook.
pub type PopulationInit = dyn Fn(usize) -> Option<Vec<Genotype>> + Sync;

/// Pooled (first-optimal generation - FHT) delays, indexed by distance.
type SpreadDelays = Vec<Vec<f64>>;

struct RunArtifacts {
    record: RunRecord,
    spread_delays: Option<SpreadDelays>,
    error: Option<String>,
}

pub fn run_campaign(cfg: &ExperimentConfig) -> Result<CampaignOutput, HarnessError> {
    run_campaign_with(cfg, None)
}

pub fn run_campaign_with(
    cfg: &ExperimentConfig,
    init: Option<&PopulationInit>,
) -> Result<CampaignOutput, HarnessError> {
    let out_dir = cfg.resolved_output_dir();
    run_campaign_at(cfg, &out_dir, init)
}

/// Campaign into an explicit directory (no environment lookup); the entry
/// point for sweep cells.
fn run_campaign_at(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    init: Option<&PopulationInit>,
) -> Result<CampaignOutput, HarnessError> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    let master = cfg.campaign.master_seed;

    // A fixed instance is shared across runs; random models default to one
    // fresh instance per run.
    let shared: Option<Arc<Graph>> =
        if !cfg.topology.regenerate_per_run || !cfg.topology.is_random() {
            let (g, _) = cfg
                .topology
                .build_connected(derive_seed(master, GRAPH_STREAM, 0))?;
            Some(Arc::new(g))
        } else {
            None
        };

    let artifacts: Vec<RunArtifacts> = (0..cfg.campaign.runs)
        .into_par_iter()
        .map(|run_idx| {
            let engine_seed = derive_seed(master, ENGINE_STREAM, run_idx as u64);
            let mut record = RunRecord {
                run: run_idx,
                seed: engine_seed,
                graph_seed: None,
                fht: None,
                fct: None,
                max_distinct_optima: 0,
                final_distinct_optima: 0,
                cum_distinct_optima: 0,
            };
            let graph: Arc<Graph> = match &shared {
                Some(g) => Arc::clone(g),
                None => {
                    match cfg
                        .topology
                        .build_connected(derive_seed(master, GRAPH_STREAM, run_idx as u64))
                    {
                        Ok((g, seed)) => {
                            record.graph_seed = Some(seed);
                            Arc::new(g)
                        }
                        Err(e) => {
                            return RunArtifacts {
                                record,
                                spread_delays: None,
                                error: Some(e.to_string()),
                            }
                        }
                    }
                }
            };
            match execute_run(cfg, run_idx, engine_seed, &graph, init, out_dir) {
                Ok((metrics, delays)) => {
                    record.fht = metrics.fht;
                    record.fct = metrics.fct;
                    record.max_distinct_optima = metrics.max_distinct_optima;
                    record.final_distinct_optima = metrics.final_distinct_optima;
                    record.cum_distinct_optima = metrics.cumulative_distinct_optima;
                    RunArtifacts {
                        record,
                        spread_delays: delays,
                        error: None,
                    }
                }
                Err(e) => RunArtifacts {
                    record,
                    spread_delays: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    if let Some(bad) = artifacts.iter().find(|a| a.error.is_some()) {
        return Err(HarnessError::Config(format!(
            "run {} failed: {}",
            bad.record.run,
            bad.error.as_deref().unwrap_or("unknown")
        )));
    }

    let records: Vec<RunRecord> = artifacts.iter().map(|a| a.record.clone()).collect();
    let summary = summarize(&records);

    write_run_files(cfg, &summary, &records, out_dir)?;
    if cfg.campaign.write_spread {
        write_spread_summary(&artifacts, out_dir)?;
    }

    Ok(CampaignOutput {
        summary,
        records,
        output_dir: out_dir.to_path_buf(),
    })
}

fn execute_run(
    cfg: &ExperimentConfig,
    run_idx: usize,
    engine_seed: u64,
    graph: &Graph,
    init: Option<&PopulationInit>,
    out_dir: &Path,
) -> Result<(RunMetrics, Option<SpreadDelays>), HarnessError> {
    let problem = cfg.problem_spec()?;
    let engine_cfg = cfg.engine_config(engine_seed)?;
    let engine = match init.and_then(|f| f(run_idx)) {
        Some(individuals) => {
            let pop = Population::from_individuals(&problem, individuals)?;
            Engine::with_population(engine_cfg, graph, pop)?
        }
        None => Engine::new(engine_cfg, graph)?,
    };

    let mut collector = MetricsCollector::new(problem, cfg.campaign.write_series);
    let mut events_out = if cfg.campaign.write_events {
        let file = File::create(out_dir.join(format!("run_{run_idx:04}_events.csv")))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "generation,replaced,newly_optimal")?;
        Some(w)
    } else {
        None
    };

    let mut observe_error = None;
    let outcome = engine.run_with(|event, pop| {
        if observe_error.is_none() {
            if let Err(e) = collector.observe(event, pop) {
                observe_error = Some(e);
                return;
            }
            if let Some(w) = &mut events_out {
                let replaced = event.replaced.iter().filter(|&&x| x).count();
                let _ = writeln!(
                    w,
                    "{},{},{}",
                    event.generation,
                    replaced,
                    event.newly_optimal.len()
                );
            }
        }
    });
    if let Some(e) = observe_error {
        return Err(HarnessError::Config(format!("observer failed: {e}")));
    }
    if let Some(mut w) = events_out {
        w.flush()?;
    }
    let metrics = collector.finish();

    debug_assert_eq!(metrics.fht, outcome.fht);
    debug_assert_eq!(metrics.fct, outcome.fct);

    if cfg.campaign.write_series {
        let file = File::create(out_dir.join(format!("run_{run_idx:04}_series.csv")))?;
        let mut w = BufWriter::new(file);
        write_series_csv(&metrics, &mut w)?;
        w.flush()?;
    }

    let spread_delays = if cfg.campaign.write_spread && metrics.fht.is_some() {
        let record =
            SpreadRecord::from_run(&metrics, graph).expect("hitting time checked above");
        let file = File::create(out_dir.join(format!("run_{run_idx:04}_spread.csv")))?;
        let mut w = BufWriter::new(file);
        write_spread_csv(&record, &mut w)?;
        w.flush()?;
        let max_d = record.distance.iter().flatten().copied().max().unwrap_or(0);
        let mut by_distance: SpreadDelays = vec![Vec::new(); max_d as usize + 1];
        for (node, d) in record.distance.iter().enumerate() {
            if let (Some(d), Some(gen)) = (d, record.first_optimal_generation[node]) {
                by_distance[*d as usize].push((gen - record.fht) as f64);
            }
        }
        Some(by_distance)
    } else {
        None
    };

    Ok((metrics, spread_delays))
}

fn summarize(records: &[RunRecord]) -> CampaignSummary {
    let fht: Vec<f64> = records.iter().filter_map(|r| r.fht.map(|v| v as f64)).collect();
    let fct: Vec<f64> = records.iter().filter_map(|r| r.fct.map(|v| v as f64)).collect();
    let opt: Vec<f64> = records
        .iter()
        .map(|r| r.max_distinct_optima as f64)
        .collect();
    CampaignSummary {
        runs: records.len(),
        failures: 0,
        fht: StatSummary::from_values(&fht, records.len() - fht.len()),
        fct: StatSummary::from_values(&fct, records.len() - fct.len()),
        max_distinct_optima: StatSummary::from_values(&opt, 0),
    }
}

fn write_run_files(
    cfg: &ExperimentConfig,
    summary: &CampaignSummary,
    records: &[RunRecord],
    out_dir: &Path,
) -> Result<(), HarnessError> {
    let mut jsonl = BufWriter::new(File::create(out_dir.join("runs.jsonl"))?);
    for record in records {
        let line = json!({
            "config": cfg,
            "rng": RNG_DESCRIPTION,
            "record": record,
        });
        writeln!(jsonl, "{line}")?;
    }
    jsonl.flush()?;

    let mut csv = BufWriter::new(File::create(out_dir.join("runs.csv"))?);
    writeln!(
        csv,
        "run,seed,graph_seed,fht,fct,max_distinct_optima,final_distinct_optima,cum_distinct_optima"
    )?;
    for r in records {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            r.run,
            r.seed,
            r.graph_seed.map_or(String::new(), |s| s.to_string()),
            r.fht.map_or(String::new(), |v| v.to_string()),
            r.fct.map_or(String::new(), |v| v.to_string()),
            r.max_distinct_optima,
            r.final_distinct_optima,
            r.cum_distinct_optima
        )?;
    }
    csv.flush()?;

    let doc = json!({
        "config": cfg,
        "rng": RNG_DESCRIPTION,
        "master_seed": cfg.campaign.master_seed,
        "summary": summary,
    });
    let mut out = BufWriter::new(File::create(out_dir.join("summary.json"))?);
    serde_json::to_writer_pretty(&mut out, &doc)
        .map_err(|e| HarnessError::Config(format!("summary serialization: {e}")))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Aggregate per-distance delay quartiles over all runs, plot-ready.
fn write_spread_summary(artifacts: &[RunArtifacts], out_dir: &Path) -> Result<(), HarnessError> {
    let max_d = artifacts
        .iter()
        .filter_map(|a| a.spread_delays.as_ref())
        .map(|d| d.len())
        .max()
        .unwrap_or(0);
    let mut pooled: Vec<Vec<f64>> = vec![Vec::new(); max_d];
    for a in artifacts {
        if let Some(delays) = &a.spread_delays {
            for (d, v) in delays.iter().enumerate() {
                pooled[d].extend_from_slice(v);
            }
        }
    }
    let mut out = BufWriter::new(File::create(out_dir.join("spread_summary.csv"))?);
    writeln!(out, "distance,count,median_delay,q1_delay,q3_delay")?;
    for (d, mut values) in pooled.into_iter().enumerate() {
        if values.is_empty() {
            continue;
        }
        values.sort_by(f64::total_cmp);
        writeln!(
            out,
            "{},{},{},{},{}",
            d,
            values.len(),
            quantile(&values, 0.5),
            quantile(&values, 0.25),
            quantile(&values, 0.75)
        )?;
    }
    out.flush()?;
    Ok(())
}

/// One sweep cell: the swept values and the campaign outcome.
#[derive(Debug)]
pub struct SweepCell {
    pub r: Option<f64>,
    pub alpha: Option<f64>,
    pub b: Option<usize>,
    pub result: Result<CampaignOutput, HarnessError>,
}

pub struct SweepOutput {
    pub cells: Vec<SweepCell>,
    pub output_dir: PathBuf,
}

/// Run the cartesian product of the sweep lists, each cell overriding the
/// base config; per-cell failures are recorded and the sweep continues.
pub fn sweep(base: &ExperimentConfig) -> Result<SweepOutput, HarnessError> {
    base.validate()?;
    let section = base
        .sweep
        .as_ref()
        .filter(|s| !s.is_empty())
        .ok_or(HarnessError::EmptySweep)?
        .clone();
    let out_dir = base.resolved_output_dir();
    fs::create_dir_all(&out_dir)?;

    let expand_f = |v: &[f64]| -> Vec<Option<f64>> {
        if v.is_empty() {
            vec![None]
        } else {
            v.iter().copied().map(Some).collect()
        }
    };
    let bs: Vec<Option<usize>> = if section.b.is_empty() {
        vec![None]
    } else {
        section.b.iter().copied().map(Some).collect()
    };

    let mut cells = Vec::new();
    for &b in &bs {
        for &r in &expand_f(&section.r) {
            for &alpha in &expand_f(&section.alpha) {
                let mut cfg = base.clone();
                cfg.sweep = None;
                let mut name = String::from("cell");
                if let Some(b) = b {
                    cfg.problem.b = b;
                    name.push_str(&format!("_b{b}"));
                }
                if let Some(r) = r {
                    cfg.topology.r = Some(r);
                    name.push_str(&format!("_r{r}"));
                }
                if let Some(alpha) = alpha {
                    cfg.engine.alpha = alpha;
                    name.push_str(&format!("_alpha{alpha}"));
                }
                let cell_dir = out_dir.join(&name);
                cfg.campaign.output_dir = cell_dir.clone();
                let result = run_campaign_at(&cfg, &cell_dir, None);
                cells.push(SweepCell { r, alpha, b, result });
            }
        }
    }

    write_sweep_files(base, &cells, &out_dir)?;
    Ok(SweepOutput { cells, output_dir: out_dir })
}

fn write_sweep_files(
    base: &ExperimentConfig,
    cells: &[SweepCell],
    out_dir: &Path,
) -> Result<(), HarnessError> {
    let fmt_opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    let mut table = BufWriter::new(File::create(out_dir.join("sweep_cells.csv"))?);
    writeln!(
        table,
        "b,r,alpha,runs,fht_mean,fht_std,fct_mean,fct_std,optima_mean,optima_std,\
         fht_undefined,fct_undefined,error"
    )?;
    for cell in cells {
        let b = cell.b.map_or(String::new(), |v| v.to_string());
        let r = fmt_opt(cell.r);
        let alpha = fmt_opt(cell.alpha);
        match &cell.result {
            Ok(out) => {
                let s = &out.summary;
                writeln!(
                    table,
                    "{b},{r},{alpha},{},{},{},{},{},{},{},{},{},",
                    s.runs,
                    fmt_opt(s.fht.mean),
                    fmt_opt(s.fht.std),
                    fmt_opt(s.fct.mean),
                    fmt_opt(s.fct.std),
                    fmt_opt(s.max_distinct_optima.mean),
                    fmt_opt(s.max_distinct_optima.std),
                    s.fht.undefined,
                    s.fct.undefined,
                )?;
            }
            Err(e) => {
                let msg = e.to_string().replace(',', ";");
                writeln!(table, "{b},{r},{alpha},0,,,,,,,,,{msg}")?;
            }
        }
    }
    table.flush()?;

    // Per-run rows with relative FHT computed within each problem-size
    // group across every cell of the sweep.
    struct Row {
        b: usize,
        r: Option<f64>,
        alpha: Option<f64>,
        run: usize,
        seed: u64,
        fht: Option<u64>,
        fct: Option<u64>,
        optima: usize,
    }
    let mut rows: Vec<Row> = Vec::new();
    for cell in cells {
        if let Ok(out) = &cell.result {
            for rec in &out.records {
                rows.push(Row {
                    b: cell.b.unwrap_or(base.problem.b),
                    r: cell.r,
                    alpha: cell.alpha,
                    run: rec.run,
                    seed: rec.seed,
                    fht: rec.fht,
                    fct: rec.fct,
                    optima: rec.max_distinct_optima,
                });
            }
        }
    }
    let mut groups: Vec<usize> = rows.iter().map(|row| row.b).collect();
    groups.sort_unstable();
    groups.dedup();
    let mut rel: Vec<Option<f64>> = vec![None; rows.len()];
    for b in groups {
        let idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].b == b).collect();
        let fhts: Vec<Option<u64>> = idx.iter().map(|&i| rows[i].fht).collect();
        for (&i, value) in idx.iter().zip(relative_fht(&fhts)) {
            rel[i] = value;
        }
    }
    let mut runs_csv = BufWriter::new(File::create(out_dir.join("sweep_runs.csv"))?);
    writeln!(
        runs_csv,
        "b,r,alpha,run,seed,fht,fct,max_distinct_optima,relative_fht"
    )?;
    for (row, rel) in rows.iter().zip(rel) {
        writeln!(
            runs_csv,
            "{},{},{},{},{},{},{},{},{}",
            row.b,
            fmt_opt(row.r),
            fmt_opt(row.alpha),
            row.run,
            row.seed,
            row.fht.map_or(String::new(), |v| v.to_string()),
            row.fct.map_or(String::new(), |v| v.to_string()),
            row.optima,
            rel.map_or(String::new(), |v| v.to_string()),
        )?;
    }
    runs_csv.flush()?;
    Ok(())
}

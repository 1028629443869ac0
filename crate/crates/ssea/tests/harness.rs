//! Library-level harness integration: sweeps over parameter grids and the
//! seed discipline tying sweep cells to standalone campaigns.

use ssea::harness::{run_campaign, sweep, ExperimentConfig, HarnessError};

fn base_config(out: &std::path::Path) -> String {
    format!(
        r#"
[problem]
kind = "nmax"
b = 4
l = 2

[topology]
model = "sw"
n = 60
k = 2
r = 0.0

[engine]
alpha = 0.0
max_generations = 2000

[campaign]
runs = 4
master_seed = 21
output_dir = "{}"
"#,
        out.display()
    )
}

#[test]
fn sweep_alpha_zero_cell_matches_unweighted_campaign() {
    // Seeds derive from (master_seed, run index) alone, so the alpha = 0
    // sweep cell must reproduce the plain campaign record for record.
    let dir = tempfile::tempdir().unwrap();
    let plain_dir = dir.path().join("plain");
    let cfg = ExperimentConfig::from_toml_str(&base_config(&plain_dir)).unwrap();
    let plain = run_campaign(&cfg).unwrap();

    let sweep_dir = dir.path().join("swept");
    let mut swept_cfg =
        ExperimentConfig::from_toml_str(&format!("{}\n[sweep]\nalpha = [0.0, 1.0]\n", base_config(&sweep_dir)))
            .unwrap();
    swept_cfg.campaign.output_dir = sweep_dir.clone();
    let swept = sweep(&swept_cfg).unwrap();
    assert_eq!(swept.cells.len(), 2);

    let zero_cell = swept
        .cells
        .iter()
        .find(|c| c.alpha == Some(0.0))
        .unwrap()
        .result
        .as_ref()
        .unwrap();
    for (a, b) in plain.records.iter().zip(&zero_cell.records) {
        assert_eq!(a.seed, b.seed);
        assert_eq!(a.fht, b.fht);
        assert_eq!(a.fct, b.fct);
        assert_eq!(a.max_distinct_optima, b.max_distinct_optima);
    }
    assert_eq!(plain.summary, zero_cell.summary);

    // The weighted cell really ran as a different configuration.
    let one_cell = swept
        .cells
        .iter()
        .find(|c| c.alpha == Some(1.0))
        .unwrap()
        .result
        .as_ref()
        .unwrap();
    assert_eq!(one_cell.records.len(), 4);
    assert!(sweep_dir.join("sweep_cells.csv").exists());
    assert!(sweep_dir.join("sweep_runs.csv").exists());
}

#[test]
fn sweep_grid_covers_cartesian_product_and_relative_fht() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid");
    let text = format!(
        "{}\n[sweep]\nr = [0.0, 0.5]\nb = [4, 6]\n",
        base_config(&out)
    );
    let cfg = ExperimentConfig::from_toml_str(&text).unwrap();
    let result = sweep(&cfg).unwrap();
    assert_eq!(result.cells.len(), 4);
    assert!(result.cells.iter().all(|c| c.result.is_ok()));

    let runs_csv = std::fs::read_to_string(out.join("sweep_runs.csv")).unwrap();
    let mut lines = runs_csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "b,r,alpha,run,seed,fht,fct,max_distinct_optima,relative_fht"
    );
    // Every run hit the optimum at this scale; each b-group's relative FHT
    // has minimum exactly 1 and no value below 1.
    let mut per_b_min: std::collections::HashMap<&str, f64> = Default::default();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        let rel: f64 = fields[8].parse().unwrap();
        assert!(rel >= 1.0);
        let entry = per_b_min.entry(fields[0]).or_insert(f64::INFINITY);
        *entry = entry.min(rel);
    }
    for (b, min) in per_b_min {
        assert_eq!(min, 1.0, "b={b} group minimum");
    }
}

#[test]
fn sweep_requires_a_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::from_toml_str(&base_config(dir.path())).unwrap();
    assert!(matches!(sweep(&cfg), Err(HarnessError::EmptySweep)));
}

#[test]
fn campaign_rejects_zero_runs() {
    let dir = tempfile::tempdir().unwrap();
    let text = base_config(dir.path()).replace("runs = 4", "runs = 0");
    assert!(ExperimentConfig::from_toml_str(&text).is_err());
}

#[test]
fn campaign_honors_shared_topology_flag() {
    // With regeneration disabled every run records no per-run graph seed
    // (one shared instance), and results stay deterministic.
    let dir = tempfile::tempdir().unwrap();
    let text = base_config(&dir.path().join("shared"))
        .replace("model = \"sw\"", "model = \"er\"")
        .replace("k = 2\nr = 0.0", "links = 240\nregenerate_per_run = false");
    let cfg = ExperimentConfig::from_toml_str(&text).unwrap();
    let out = run_campaign(&cfg).unwrap();
    assert!(out.records.iter().all(|r| r.graph_seed.is_none()));

    let per_run = base_config(&dir.path().join("perrun"))
        .replace("model = \"sw\"", "model = \"er\"")
        .replace("k = 2\nr = 0.0", "links = 240");
    let cfg = ExperimentConfig::from_toml_str(&per_run).unwrap();
    let out = run_campaign(&cfg).unwrap();
    assert!(out.records.iter().all(|r| r.graph_seed.is_some()));
}

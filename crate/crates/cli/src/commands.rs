use std::path::Path;

use serde_json::json;

use hamclass::color::{color_graph, ColorBits, Rgb};
use hamclass::eval::{
    apply_threshold, benchmark_cases, benchmark_metrics_with, records_csv, run_benchmark_case, run_color_task,
    svg_energy_sorted, svg_hue_sorted, svg_overlap_scatter, sweep as run_sweep, Band, BenchLayout, BenchmarkMetrics,
    ColorOptions, EvaluationRecord, Evaluator, Score,
};
use hamclass::model::{
    build_training_layout, presets, Grouping, InteractionGraph, LabeledDataset, LayoutMode, Model, SetName,
    TrainedClassifier,
};
use hamclass::oracle::{exact_spectrum, overlap_scores_from, ORACLE_MAX_QUBITS};
use hamclass::train::{train as run_train, TrainingSetup};

use crate::args::{AnnealArgs, BenchArgs, ClassifyArgs, ColorArgs, GraphArgs, OracleArgs, RunConfig, SweepArgs, TrainArgs};
use crate::failure::{require_file, CliResult, Failure};
use crate::output::{load_classifier, weights_table, write, write_json, ReportFile};

/// Largest data register `classify` enumerates exhaustively.
const MAX_ENUMERATED_BITS: usize = 20;

fn preset(name: &str, set: SetName) -> CliResult<InteractionGraph> {
    let g = match name.to_ascii_lowercase().as_str() {
        "edge" | "graph1" => presets::edge(set),
        "path3" | "graph2" => presets::path(3, set),
        "path4" | "graph3" => presets::path(4, set),
        "cycle8" | "graph4" => presets::cycle8_chord(set),
        _ => {
            return Err(Failure::user(format!(
                "unknown preset `{name}` (edge, path3, path4, cycle8, graph1..graph4)"
            )))
        }
    };
    Ok(g)
}

/// Graph from a file or preset, with `--set`/`--seed` applied; also returns
/// a label for the run config.
fn resolve_graph(g: &GraphArgs) -> CliResult<(InteractionGraph, String)> {
    let (mut graph, label) = match (&g.graph, &g.preset) {
        (Some(p), _) => {
            require_file(p, "graph")?;
            (InteractionGraph::load(p)?, p.display().to_string())
        }
        (None, Some(name)) => (preset(name, g.set.unwrap_or(SetName::Proj))?, format!("preset:{name}")),
        (None, None) => return Err(Failure::user("give `--graph FILE` or `--preset NAME`")),
    };
    if let Some(s) = g.set {
        graph = graph.with_set(s);
    }
    if let Some(seed) = g.seed {
        graph = graph.with_seed(seed);
    }
    Ok((graph, label))
}

fn load_dataset(path: &Path) -> CliResult<LabeledDataset> {
    require_file(path, "dataset")?;
    Ok(LabeledDataset::load(path)?)
}

fn anneal_config(cfg: &mut RunConfig, a: &AnnealArgs) -> CliResult<(hamclass::anneal::AnnealConfig, hamclass::anneal::AnnealSchedule)> {
    let (c, s) = (a.config()?, a.schedule()?);
    cfg.anneal = Some(c);
    cfg.schedule = Some(s.clone());
    Ok((c, s))
}

pub fn train(a: &TrainArgs) -> CliResult {
    let mut cfg = RunConfig::new("train", &a.out);
    let (graph, label) = resolve_graph(&a.graph)?;
    let dataset = load_dataset(&a.data)?;
    let (anneal, schedule) = anneal_config(&mut cfg, &a.anneal)?;
    cfg.graph = Some(label);
    cfg.data = Some(a.data.display().to_string());
    cfg.set = a.graph.set;
    cfg.seed = Some(graph.seed());
    cfg.mode = Some(a.layout.mode);
    cfg.grouping = Some(a.layout.group.clone());
    cfg.range = Some(a.range);
    cfg.method = Some(a.method);

    let model = Model::new(graph.clone())?;
    let layout = build_training_layout(&model, a.layout.mode, &a.layout.group, 1.0)?;
    println!(
        "qubits: {} system + {} control = {}",
        layout.n_system,
        layout.n_control(),
        layout.n_qubits()
    );
    let setup = TrainingSetup {
        model,
        layout,
        anneal,
        schedule,
        range: a.range,
    };
    let report = run_train(a.method, &setup, &dataset)?;
    println!("method: {:?}, calibration flipped: {}", a.method, report.calibration_flipped);
    print!("{}", weights_table(&report.trained));
    println!(
        "trace energy: YES {:+.4}, NO {:+.4}",
        report.yes_energy, report.no_energy
    );
    write_json(&a.out, "report.json", &ReportFile::new(cfg.json(), &graph, &report))
}

fn side_bands(m: &BenchmarkMetrics, score: Score) -> [Band; 2] {
    let (ym, ys, nm, ns) = match score {
        Score::Energy => (m.yes_energy_mean, m.yes_energy_std, m.no_energy_mean, m.no_energy_std),
        Score::Overlap => (m.yes_overlap_mean, m.yes_overlap_std, m.no_overlap_mean, m.no_overlap_std),
    };
    [
        Band {
            mean: ym,
            std: ys,
            color: "blue",
        },
        Band {
            mean: nm,
            std: ns,
            color: "red",
        },
    ]
}

/// CSV plus the three plots; the hue plot only for RGB-shaped data.
fn emit_records(
    out: &Path,
    records: &[EvaluationRecord],
    metrics: Option<(&BenchmarkMetrics, &BenchmarkMetrics)>,
    config: &serde_json::Value,
) -> CliResult {
    write(out, "records.csv", &records_csv(records, config))?;
    write(out, "energy_sorted.svg", &svg_energy_sorted(records, config))?;
    let (eb, ob) = match metrics {
        Some((o, e)) => (side_bands(e, Score::Energy).to_vec(), side_bands(o, Score::Overlap).to_vec()),
        None => (Vec::new(), Vec::new()),
    };
    if records.iter().all(|r| r.hue.is_some()) {
        write(out, "energy_by_hue.svg", &svg_hue_sorted(records, &eb, config)?)?;
    }
    write(out, "overlap_log.svg", &svg_overlap_scatter(records, &ob, config)?)
}

fn print_metrics(name: &str, m: &BenchmarkMetrics) {
    println!(
        "{name}: f = {:.1}% ({}/{}), threshold {:.4e}, ΔE = {:.4}",
        m.fidelity, m.correct, m.labelled, m.threshold, m.delta_e
    );
}

pub fn classify(a: &ClassifyArgs) -> CliResult {
    let mut cfg = RunConfig::new("classify", &a.out);
    cfg.report = Some(a.report.display().to_string());
    let trained: TrainedClassifier = load_classifier(&a.report)?;
    let (anneal, schedule) = anneal_config(&mut cfg, &a.anneal)?;
    let labels = match &a.data {
        Some(p) => {
            cfg.data = Some(p.display().to_string());
            load_dataset(p)?
        }
        None => LabeledDataset::new(Vec::new(), Vec::new())?,
    };
    let d = trained.model().data_qubits().len();
    if d > MAX_ENUMERATED_BITS {
        return Err(Failure::user(format!("{d} data bits is too many to enumerate (max {MAX_ENUMERATED_BITS})")));
    }
    labels.check_width(d)?;
    cfg.seed = Some(trained.model().graph().seed());
    let config = cfg.json();
    let evaluator = Evaluator::new(trained, &anneal, &schedule)?;
    let mut records = evaluator.evaluate_all(&labels)?;
    if d % 3 == 0 {
        for r in &mut records {
            r.hue = Some(Rgb::decode(&r.datum)?.hue());
        }
    }
    let metrics = if labels.yes().is_empty() || labels.no().is_empty() {
        log::warn!("no two-sided labelled data; skipping threshold and fidelity");
        None
    } else {
        let o = benchmark_metrics_with(&records, &labels, Score::Overlap)?;
        let e = benchmark_metrics_with(&records, &labels, Score::Energy)?;
        apply_threshold(&mut records, &o);
        print_metrics("overlap threshold", &o);
        print_metrics("energy threshold", &e);
        write_json(&a.out, "metrics.json", &json!({"config": config, "overlap": o, "energy": e}))?;
        Some((o, e))
    };
    println!("evaluated {} strings", records.len());
    emit_records(&a.out, &records, metrics.as_ref().map(|(o, e)| (o, e)), &config)
}

pub fn color(a: &ColorArgs) -> CliResult {
    let mut cfg = RunConfig::new("color", &a.out);
    let bits = ColorBits::from_bits(a.bits)?;
    let (anneal, schedule) = anneal_config(&mut cfg, &a.anneal)?;
    cfg.set = Some(SetName::Proj);
    cfg.mode = Some(a.mode);
    cfg.grouping = Some(a.group.clone());
    cfg.range = Some(a.range);
    cfg.method = Some(a.method);
    cfg.extra = json!({ "bits": a.bits });
    let config = cfg.json();
    let options = ColorOptions {
        mode: a.mode,
        grouping: a.group.clone(),
        method: a.method,
        range: a.range,
    };
    let run = run_color_task(bits, &options, &anneal, &schedule)?;
    let graph = color_graph(bits);
    println!("{bits} color task, {} qubits, {:.1} s", run.report.n_qubits.unwrap_or(0), run.seconds);
    let e = &run.energy_metrics;
    println!(
        "mean energy: blue (YES) {:+.4} ± {:.4}, red (NO) {:+.4} ± {:.4}",
        e.yes_energy_mean, e.yes_energy_std, e.no_energy_mean, e.no_energy_std
    );
    print_metrics("overlap threshold", &run.overlap_metrics);
    print_metrics("energy threshold", e);
    write_json(&a.out, "report.json", &ReportFile::new(config.clone(), &graph, &run.report))?;
    write_json(
        &a.out,
        "metrics.json",
        &json!({"config": config, "overlap": run.overlap_metrics, "energy": run.energy_metrics, "seconds": run.seconds}),
    )?;
    emit_records(&a.out, &run.records, Some((&run.overlap_metrics, e)), &config)
}

pub fn sweep(a: &SweepArgs) -> CliResult {
    let mut cfg = RunConfig::new("sweep", &a.out);
    let bits = ColorBits::from_bits(a.bits)?;
    if a.trotter_grid.is_empty() || a.steps_grid.is_empty() {
        return Err(Failure::user("empty sweep grid"));
    }
    let anneal_args = AnnealArgs {
        steps: a.steps_grid[0],
        trotter: a.trotter_grid[0],
        time: a.time,
        max_qubits: a.max_qubits,
        schedule: a.schedule.clone(),
    };
    let (base, schedule) = anneal_config(&mut cfg, &anneal_args)?;
    cfg.mode = Some(a.mode);
    cfg.grouping = Some(a.group.clone());
    cfg.range = Some(a.range);
    cfg.extra = json!({"bits": a.bits, "trotter_grid": a.trotter_grid, "steps_grid": a.steps_grid});
    let options = ColorOptions {
        mode: a.mode,
        grouping: a.group.clone(),
        range: a.range,
        ..ColorOptions::default()
    };
    let cells = run_sweep(bits, &options, &a.trotter_grid, &a.steps_grid, &base, &schedule)?;
    let reference = cells
        .iter()
        .max_by_key(|c| (c.trotter, c.steps))
        .expect("grid is non-empty");
    let (ref_o, ref_e) = (reference.overlap.fidelity, reference.energy.fidelity);
    println!(
        "reference cell n_T={} R={}: f_overlap {:.1}%, f_energy {:.1}%",
        reference.trotter, reference.steps, ref_o, ref_e
    );
    let mut csv = format!("# config: {}\n", cfg.json());
    csv.push_str("trotter,steps,f_overlap,f_energy,delta_e,gap_overlap,gap_energy,seconds,seconds_per_slice\n");
    println!("{:>4} {:>4} {:>8} {:>8} {:>8} {:>9}", "n_T", "R", "f_ov", "f_E", "ΔE", "seconds");
    for c in &cells {
        let slices = (c.trotter * c.steps) as f64;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            c.trotter,
            c.steps,
            c.overlap.fidelity,
            c.energy.fidelity,
            c.energy.delta_e,
            c.overlap.fidelity - ref_o,
            c.energy.fidelity - ref_e,
            c.seconds,
            c.seconds / slices
        ));
        println!(
            "{:>4} {:>4} {:>8.1} {:>8.1} {:>8.4} {:>9.2}",
            c.trotter, c.steps, c.overlap.fidelity, c.energy.fidelity, c.energy.delta_e, c.seconds
        );
    }
    let off: Vec<String> = cells
        .iter()
        .filter(|c| c.trotter >= 30 && (c.overlap.fidelity - ref_o).abs() > 5.0)
        .map(|c| format!("(n_T={}, R={})", c.trotter, c.steps))
        .collect();
    if off.is_empty() {
        println!("plateau: every cell with n_T >= 30 is within 5 points of the reference");
    } else {
        println!("plateau: cells more than 5 points from the reference: {}", off.join(", "));
    }
    write(&a.out, "sweep.csv", &csv)
}

pub fn bench(a: &BenchArgs) -> CliResult {
    let mut cfg = RunConfig::new("bench-interactions", &a.out);
    let (anneal, schedule) = anneal_config(&mut cfg, &a.anneal)?;
    cfg.seed = Some(a.seed);
    cfg.range = Some(a.range);
    cfg.extra = json!({"graphs": a.graphs, "sets": a.sets, "datasets": a.datasets, "layout": a.layout, "counts_only": a.counts_only});
    let sets = if a.sets.is_empty() { SetName::ALL.to_vec() } else { a.sets.clone() };
    let cases: Vec<_> = benchmark_cases()
        .into_iter()
        .filter(|c| a.graphs.contains(&c.graph) && sets.contains(&c.set))
        .collect();
    if cases.is_empty() {
        return Err(Failure::user("no benchmark rows match the chosen graphs and sets"));
    }
    let mut csv = format!("# config: {}\n", cfg.json());
    if a.counts_only {
        csv.push_str("graph,set,n_qubits,n_opt,table_n,table_opt\n");
        for c in &cases {
            let model = Model::new(presets::benchmark(c.graph, c.set)?)?;
            let full = build_training_layout(&model, LayoutMode::PerTerm, &Grouping::Global, 1.0)?.n_qubits();
            let opt = build_training_layout(&model, LayoutMode::Qudit, &c.grouping, 1.0)?.n_qubits();
            println!("graph {} {:<6} N = {full:>3} ({opt:>2})   table {} ({})", c.graph, c.set, c.n_qubits, c.n_opt);
            csv.push_str(&format!("{},{},{full},{opt},{},{}\n", c.graph, c.set, c.n_qubits, c.n_opt));
        }
        return write(&a.out, "bench_counts.csv", &csv);
    }
    csv.push_str("graph,set,n_qubits,n_opt,trained_qubits,datasets,yes_overlap,no_overlap,fidelity,delta_e,seconds_per_dataset\n");
    for c in &cases {
        let needed = if a.layout == BenchLayout::Full { c.n_qubits } else { c.n_opt };
        if needed > anneal.max_qubits {
            log::warn!("skipping graph {} {}: {} qubits exceed the cap", c.graph, c.set, c.n_opt);
            continue;
        }
        let row = run_benchmark_case(c, a.datasets, a.seed, a.range, a.layout, &anneal, &schedule)?;
        println!(
            "graph {} {:<6} N = {:>3} ({:>2}) trained on {:>2}  p_yes {:.3e}  p_no {:.3e}  f {:5.1}%  ΔE {:.3}  {:.1} s/set",
            row.graph,
            row.set,
            row.n_qubits,
            row.n_opt,
            row.trained_qubits,
            row.yes_overlap,
            row.no_overlap,
            row.fidelity,
            row.delta_e,
            row.seconds_per_dataset
        );
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            row.graph,
            row.set,
            row.n_qubits,
            row.n_opt,
            row.trained_qubits,
            row.datasets,
            row.yes_overlap,
            row.no_overlap,
            row.fidelity,
            row.delta_e,
            row.seconds_per_dataset
        ));
    }
    write(&a.out, "bench.csv", &csv)
}

pub fn oracle(a: &OracleArgs) -> CliResult {
    let mut cfg = RunConfig::new("oracle", &a.out);
    let trained = match &a.report {
        Some(p) => {
            cfg.report = Some(p.display().to_string());
            load_classifier(p)?
        }
        None => {
            let (graph, label) = resolve_graph(&a.graph)?;
            cfg.graph = Some(label);
            cfg.set = a.graph.set;
            cfg.seed = Some(graph.seed());
            cfg.range = Some(a.range);
            cfg.extra = json!({ "weights": a.weights });
            TrainedClassifier::new(Model::new(graph)?, a.weights.clone(), a.range)?
        }
    };
    let model = trained.model();
    let n = model.n_system();
    if n > ORACLE_MAX_QUBITS {
        return Err(hamclass::Error::QubitCap {
            requested: n,
            cap: ORACLE_MAX_QUBITS,
        }
        .into());
    }
    let spectrum = exact_spectrum(&trained.hamiltonian(), n)?;
    let data_qubits = model.data_qubits();
    let marginal = spectrum.ground_distribution(&data_qubits)?;
    println!(
        "ground energy {:+.6}, degeneracy {}",
        spectrum.ground_energy(),
        spectrum.ground_dimension()
    );
    let mut support: Vec<(String, f64)> = marginal.iter().filter(|(_, p)| *p > 1e-9).collect();
    support.sort_by(|x, y| y.1.total_cmp(&x.1));
    for (bits, p) in support.iter().take(16) {
        println!("  {bits}  {p:.6}");
    }
    let overlaps = match &a.data {
        Some(p) => {
            cfg.data = Some(p.display().to_string());
            let ds = load_dataset(p)?;
            let s = overlap_scores_from(&spectrum, &data_qubits, &ds)?;
            println!("overlap score: YES mean {:.4}, NO mean {:.4}", s.yes_mean, s.no_mean);
            Some(s)
        }
        None => None,
    };
    write_json(
        &a.out,
        "oracle.json",
        &json!({
            "config": cfg.json(),
            "ground_energy": spectrum.ground_energy(),
            "degeneracy": spectrum.ground_dimension(),
            "data_marginal": support,
            "overlaps": overlaps,
        }),
    )
}

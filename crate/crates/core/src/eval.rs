//! Classification and benchmarking of trained classifiers.

use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anneal::{driver_hamiltonian, run_anneal, AnnealConfig, AnnealSchedule};
use crate::color::{color_dataset, color_graph, hue_sort, ColorBits, Rgb};
use crate::model::{
    build_training_layout, presets, BitString, Grouping, LabeledDataset, LayoutMode, Model,
    SetName, Side, TrainedClassifier, WeightRange,
};
use crate::tensor::{expectation_and_std, Complex64, Distribution, StateVector, WeightedTermList};
use crate::train::{train, Method, TrainingReport, TrainingSetup};
use crate::{Error, Result};

/// Outcome of testing one bitstring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub datum: BitString,
    /// Hue in degrees, for color tasks.
    pub hue: Option<f64>,
    pub energy_mean: f64,
    pub energy_std: f64,
    /// Probability of `datum` in a data-register measurement of the
    /// annealed ground state of the trained Hamiltonian.
    pub overlap_p: f64,
    pub label: Option<Side>,
    pub predicted: Option<Side>,
}

/// `|l⟩` on the data vertices, `|+⟩` on every hidden vertex.
pub fn probe_state(model: &Model, datum: &BitString) -> Result<StateVector> {
    let data = model.data_qubits();
    if datum.len() != data.len() {
        return Err(Error::DimensionMismatch(format!(
            "datum `{datum}` has {} bits, model has {} data vertices",
            datum.len(),
            data.len()
        )));
    }
    let n = model.n_system();
    let hidden = model.hidden_qubits();
    let mut base = 0usize;
    for (&q, &b) in data.iter().zip(datum.bits()) {
        if b {
            base |= 1 << (n - 1 - q);
        }
    }
    let amp = Complex64::new((1u64 << hidden.len()) as f64, 0.0).sqrt().inv();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    for x in 0..1usize << hidden.len() {
        let mut idx = base;
        for (j, &q) in hidden.iter().enumerate() {
            if (x >> (hidden.len() - 1 - j)) & 1 == 1 {
                idx |= 1 << (n - 1 - q);
            }
        }
        amps[idx] = amp;
    }
    StateVector::from_amplitudes(amps)
}

/// A trained classifier together with the data-register distribution of its
/// annealed ground state, shared by every datum it evaluates.
#[derive(Debug, Clone)]
pub struct Evaluator {
    classifier: TrainedClassifier,
    hamiltonian: WeightedTermList,
    overlap: Distribution,
}

impl Evaluator {
    /// Anneals the trained Hamiltonian alone: driver plus `H` on the
    /// control curve, no data family.
    pub fn new(classifier: TrainedClassifier, config: &AnnealConfig, schedule: &AnnealSchedule) -> Result<Self> {
        let model = classifier.model();
        let hamiltonian = classifier.hamiltonian();
        let result = run_anneal(
            &driver_hamiltonian(model.n_system()),
            &WeightedTermList::new(),
            &hamiltonian,
            config,
            schedule,
        )?;
        let overlap = result.distribution(&model.data_qubits())?;
        Ok(Self {
            classifier,
            hamiltonian,
            overlap,
        })
    }

    pub fn classifier(&self) -> &TrainedClassifier {
        &self.classifier
    }

    pub fn overlap_distribution(&self) -> &Distribution {
        &self.overlap
    }

    pub fn evaluate(&self, datum: &BitString) -> Result<EvaluationRecord> {
        let psi = probe_state(self.classifier.model(), datum)?;
        let (energy_mean, energy_std) = expectation_and_std(&psi, &self.hamiltonian)?;
        Ok(EvaluationRecord {
            datum: datum.clone(),
            hue: None,
            energy_mean,
            energy_std,
            overlap_p: self.overlap.get(datum.bits()),
            label: None,
            predicted: None,
        })
    }

    /// Every data string, in integer order, labelled from `labels`.
    pub fn evaluate_all(&self, labels: &LabeledDataset) -> Result<Vec<EvaluationRecord>> {
        let d = self.classifier.model().data_qubits().len();
        (0..1usize << d)
            .into_par_iter()
            .map(|v| {
                let s = BitString::from_index(v, d);
                let mut r = self.evaluate(&s)?;
                r.label = labels.label_of(&s);
                Ok(r)
            })
            .collect()
    }
}

/// One-off evaluation; prefer [`Evaluator`] for more than one datum.
pub fn evaluate_datum(
    trained: &TrainedClassifier,
    datum: &BitString,
    config: &AnnealConfig,
    schedule: &AnnealSchedule,
) -> Result<EvaluationRecord> {
    Evaluator::new(trained.clone(), config, schedule)?.evaluate(datum)
}

/// Which per-record number the threshold classifier reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Score {
    Overlap,
    Energy,
}

impl Score {
    fn of(self, r: &EvaluationRecord) -> f64 {
        match self {
            Score::Overlap => r.overlap_p,
            Score::Energy => r.energy_mean,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkMetrics {
    pub score: Score,
    /// Percent of labelled records on the correct side of the threshold.
    pub fidelity: f64,
    /// `|mean E(NO) - mean E(YES)|` over the training data.
    pub delta_e: f64,
    pub threshold: f64,
    /// True when YES lies above the threshold.
    pub yes_above: bool,
    pub yes_energy_mean: f64,
    pub yes_energy_std: f64,
    pub no_energy_mean: f64,
    pub no_energy_std: f64,
    pub yes_overlap_mean: f64,
    pub yes_overlap_std: f64,
    pub no_overlap_mean: f64,
    pub no_overlap_std: f64,
    pub correct: usize,
    pub labelled: usize,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    (m, var.sqrt())
}

/// Midpoint-threshold classifier on the overlap probability.
pub fn benchmark_metrics(records: &[EvaluationRecord], training: &LabeledDataset) -> Result<BenchmarkMetrics> {
    benchmark_metrics_with(records, training, Score::Overlap)
}

/// Threshold = midpoint of the YES and NO training means of `score`; the
/// YES side is whichever side the YES mean falls on.
pub fn benchmark_metrics_with(
    records: &[EvaluationRecord],
    training: &LabeledDataset,
    score: Score,
) -> Result<BenchmarkMetrics> {
    let side = |s: Side| -> Result<Vec<&EvaluationRecord>> {
        let wanted = training.side(s);
        let found: Vec<&EvaluationRecord> =
            records.iter().filter(|r| wanted.contains(&r.datum)).collect();
        if found.is_empty() {
            return Err(Error::EmptySide(if s == Side::Yes { "YES" } else { "NO" }));
        }
        Ok(found)
    };
    let (yes, no) = (side(Side::Yes)?, side(Side::No)?);
    let stats = |rs: &[&EvaluationRecord], f: fn(&EvaluationRecord) -> f64| {
        mean_std(&rs.iter().map(|r| f(r)).collect::<Vec<_>>())
    };
    let (ye, yes_energy_std) = stats(&yes, |r| r.energy_mean);
    let (ne, no_energy_std) = stats(&no, |r| r.energy_mean);
    let (yo, yes_overlap_std) = stats(&yes, |r| r.overlap_p);
    let (no_, no_overlap_std) = stats(&no, |r| r.overlap_p);
    let (ys, ns) = match score {
        Score::Overlap => (yo, no_),
        Score::Energy => (ye, ne),
    };
    let threshold = 0.5 * (ys + ns);
    let yes_above = ys >= ns;
    let labelled: Vec<&EvaluationRecord> = records.iter().filter(|r| r.label.is_some()).collect();
    if labelled.is_empty() {
        return Err(Error::InvalidDataset("no labelled records to score".into()));
    }
    let correct = labelled
        .iter()
        .filter(|r| predict(score.of(r), threshold, yes_above) == r.label.unwrap())
        .count();
    Ok(BenchmarkMetrics {
        score,
        fidelity: 100.0 * correct as f64 / labelled.len() as f64,
        delta_e: (ne - ye).abs(),
        threshold,
        yes_above,
        yes_energy_mean: ye,
        yes_energy_std,
        no_energy_mean: ne,
        no_energy_std,
        yes_overlap_mean: yo,
        yes_overlap_std,
        no_overlap_mean: no_,
        no_overlap_std,
        correct,
        labelled: labelled.len(),
    })
}

fn predict(x: f64, threshold: f64, yes_above: bool) -> Side {
    if (x >= threshold) == yes_above {
        Side::Yes
    } else {
        Side::No
    }
}

/// Fills in `predicted` from a fitted threshold.
pub fn apply_threshold(records: &mut [EvaluationRecord], metrics: &BenchmarkMetrics) {
    for r in records {
        r.predicted = Some(predict(metrics.score.of(r), metrics.threshold, metrics.yes_above));
    }
}

/// Smoothing with a unit-mass Gaussian kernel truncated at `4σ`; samples
/// beyond either end are mirrored (half-sample symmetric).
pub fn gaussian_moving_average(series: &[f64], sigma: f64) -> Result<Vec<f64>> {
    if series.is_empty() {
        return Err(Error::InvalidArgument("empty series".into()));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("σ = {sigma} must be positive")));
    }
    let radius = (4.0 * sigma).ceil() as i64;
    let kernel: Vec<f64> = (-radius..=radius)
        .map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let mass: f64 = kernel.iter().sum();
    let n = series.len() as i64;
    let reflect = |i: i64| -> usize {
        let period = 2 * n;
        let m = i.rem_euclid(period);
        (if m < n { m } else { period - 1 - m }) as usize
    };
    Ok((0..n)
        .map(|i| {
            kernel
                .iter()
                .enumerate()
                .map(|(j, w)| w * series[reflect(i + j as i64 - radius)])
                .sum::<f64>()
                / mass
        })
        .collect())
}

/// CSV with a leading `# config:` comment line.
pub fn records_csv(records: &[EvaluationRecord], config: &serde_json::Value) -> String {
    let mut out = format!("# config: {config}\n");
    out.push_str("bitstring,hue,energy_mean,energy_std,overlap_p,label,predicted\n");
    let opt = |s: Option<Side>| s.map_or(String::new(), |s| s.to_string());
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.datum,
            r.hue.map_or(String::new(), |h| format!("{h}")),
            r.energy_mean,
            r.energy_std,
            r.overlap_p,
            opt(r.label),
            opt(r.predicted),
        );
    }
    out
}

/// Mean ± std band drawn across a plot.
#[derive(Debug, Clone, Copy)]
pub struct Band {
    pub mean: f64,
    pub std: f64,
    pub color: &'static str,
}

struct Frame {
    w: f64,
    h: f64,
    pad: f64,
    x_max: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn new(n: usize, ys: impl Iterator<Item = f64>) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for y in ys.filter(|y| y.is_finite()) {
            lo = lo.min(y);
            hi = hi.max(y);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        let m = 0.05 * (hi - lo);
        Self {
            w: 800.0,
            h: 400.0,
            pad: 50.0,
            x_max: (n.max(2) - 1) as f64,
            y_lo: lo - m,
            y_hi: hi + m,
        }
    }

    fn x(&self, i: f64) -> f64 {
        self.pad + i / self.x_max * (self.w - 2.0 * self.pad)
    }

    fn y(&self, v: f64) -> f64 {
        self.h - self.pad - (v - self.y_lo) / (self.y_hi - self.y_lo) * (self.h - 2.0 * self.pad)
    }

    fn open(&self, title: &str, y_label: &str, config: &serde_json::Value) -> String {
        let comment = config.to_string().replace("--", "- -");
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
            self.w, self.h, self.w, self.h
        );
        let _ = writeln!(s, "<!-- config: {comment} -->");
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="20" font-size="14" text-anchor="middle">{}</text>"#,
            self.w / 2.0,
            title
        );
        let _ = writeln!(
            s,
            r#"<line x1="{p}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{p}" y1="{t}" x2="{p}" y2="{b}" stroke="black"/>"#,
            p = self.pad,
            b = self.h - self.pad,
            r = self.w - self.pad,
            t = self.pad
        );
        for (v, anchor) in [(self.y_lo, self.h - self.pad), (self.y_hi, self.pad)] {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{:.3}</text>"#,
                self.pad - 4.0,
                anchor,
                v
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="12" y="{}" font-size="12" transform="rotate(-90 12 {})" text-anchor="middle">{}</text>"#,
            self.h / 2.0,
            self.h / 2.0,
            y_label
        );
        s
    }

    fn band(&self, s: &mut String, b: &Band) {
        let top = self.y((b.mean + b.std).min(self.y_hi));
        let bottom = self.y((b.mean - b.std).max(self.y_lo));
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}" fill-opacity="0.15"/>"#,
            self.pad,
            top,
            self.w - 2.0 * self.pad,
            (bottom - top).max(0.0),
            b.color
        );
        let y = self.y(b.mean);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-dasharray="4 3"/>"#,
            self.pad,
            self.w - self.pad,
            b.color
        );
    }
}

fn dot_color(r: &EvaluationRecord) -> String {
    Rgb::decode(&r.datum)
        .ok()
        .filter(|_| r.hue.is_some())
        .map_or_else(|| "black".to_string(), |c| c.hex())
}

/// Records sorted by energy, with ±std error bars.
pub fn svg_energy_sorted(records: &[EvaluationRecord], config: &serde_json::Value) -> String {
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| records[a].energy_mean.total_cmp(&records[b].energy_mean));
    let f = Frame::new(
        records.len(),
        records
            .iter()
            .flat_map(|r| [r.energy_mean - r.energy_std, r.energy_mean + r.energy_std]),
    );
    let mut s = f.open("energy expectation, sorted", "energy", config);
    for (i, &k) in order.iter().enumerate() {
        let r = &records[k];
        let x = f.x(i as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="gray" stroke-width="0.5"/><circle cx="{x}" cy="{}" r="2" fill="{}"/>"#,
            f.y(r.energy_mean - r.energy_std),
            f.y(r.energy_mean + r.energy_std),
            f.y(r.energy_mean),
            dot_color(r)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn series_plot(
    title: &str,
    y_label: &str,
    records: &[EvaluationRecord],
    values: &[f64],
    smooth: &[f64],
    bands: &[Band],
    config: &serde_json::Value,
) -> String {
    let f = Frame::new(
        values.len(),
        values
            .iter()
            .chain(smooth)
            .copied()
            .chain(bands.iter().flat_map(|b| [b.mean - b.std, b.mean + b.std])),
    );
    let mut s = f.open(title, y_label, config);
    for b in bands {
        f.band(&mut s, b);
    }
    for (i, (r, v)) in records.iter().zip(values).enumerate() {
        if v.is_finite() {
            let _ = writeln!(
                s,
                r#"<circle cx="{}" cy="{}" r="2" fill="{}"/>"#,
                f.x(i as f64),
                f.y(*v),
                dot_color(r)
            );
        }
    }
    let pts: Vec<String> = smooth
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .map(|(i, v)| format!("{:.2},{:.2}", f.x(i as f64), f.y(*v)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        pts.join(" ")
    );
    s.push_str("</svg>\n");
    s
}

fn hue_order(records: &[EvaluationRecord]) -> Vec<usize> {
    let data: Vec<BitString> = records.iter().map(|r| r.datum.clone()).collect();
    hue_sort(&data).unwrap_or_else(|_| (0..records.len()).collect())
}

/// Energies in hue order with a Gaussian moving average (σ = 3) and the
/// training bands.
pub fn svg_hue_sorted(records: &[EvaluationRecord], bands: &[Band], config: &serde_json::Value) -> Result<String> {
    let order = hue_order(records);
    let sorted: Vec<EvaluationRecord> = order.iter().map(|&i| records[i].clone()).collect();
    let values: Vec<f64> = sorted.iter().map(|r| r.energy_mean).collect();
    let smooth = gaussian_moving_average(&values, 3.0)?;
    Ok(series_plot("energy by hue", "energy", &sorted, &values, &smooth, bands, config))
}

/// `log10 p` in hue order with moving average and training bands.
pub fn svg_overlap_scatter(records: &[EvaluationRecord], bands: &[Band], config: &serde_json::Value) -> Result<String> {
    let order = hue_order(records);
    let sorted: Vec<EvaluationRecord> = order.iter().map(|&i| records[i].clone()).collect();
    let floor = 1e-12;
    let values: Vec<f64> = sorted.iter().map(|r| r.overlap_p.max(floor).log10()).collect();
    let smooth = gaussian_moving_average(&values, 3.0)?;
    let log_bands: Vec<Band> = bands
        .iter()
        .map(|b| Band {
            mean: b.mean.max(floor).log10(),
            std: 0.0,
            color: b.color,
        })
        .collect();
    Ok(series_plot(
        "ground-state measurement probability by hue",
        "log10 p",
        &sorted,
        &values,
        &smooth,
        &log_bands,
        config,
    ))
}

/// Result of training and testing the color task.
#[derive(Debug, Clone)]
pub struct ColorRun {
    pub bits: ColorBits,
    pub report: TrainingReport,
    pub records: Vec<EvaluationRecord>,
    /// Midpoint threshold on the overlap probability.
    pub overlap_metrics: BenchmarkMetrics,
    /// Midpoint threshold on the energy.
    pub energy_metrics: BenchmarkMetrics,
    pub seconds: f64,
}

/// How the color task's control register is laid out.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorOptions {
    pub mode: LayoutMode,
    pub grouping: Grouping,
    pub method: Method,
    pub range: WeightRange,
}

impl Default for ColorOptions {
    fn default() -> Self {
        Self {
            mode: LayoutMode::Qudit,
            grouping: Grouping::Global,
            method: Method::OneShot,
            range: WeightRange::default(),
        }
    }
}

/// Trains on the embedded colors and tests every color of the given depth.
pub fn run_color_task(
    bits: ColorBits,
    options: &ColorOptions,
    anneal: &AnnealConfig,
    schedule: &AnnealSchedule,
) -> Result<ColorRun> {
    let start = Instant::now();
    let dataset = color_dataset(bits)?;
    let model = Model::new(color_graph(bits))?;
    let layout = build_training_layout(&model, options.mode, &options.grouping, 1.0)?;
    if layout.n_qubits() > anneal.max_qubits {
        return Err(Error::QubitCap {
            requested: layout.n_qubits(),
            cap: anneal.max_qubits,
        });
    }
    let setup = TrainingSetup {
        model,
        layout,
        anneal: *anneal,
        schedule: schedule.clone(),
        range: options.range,
    };
    let report = train(options.method, &setup, &dataset)?;
    let evaluator = Evaluator::new(report.trained.clone(), anneal, schedule)?;
    let mut records = evaluator.evaluate_all(&dataset)?;
    for r in &mut records {
        r.hue = Some(Rgb::decode(&r.datum)?.hue());
    }
    let overlap_metrics = benchmark_metrics_with(&records, &dataset, Score::Overlap)?;
    let energy_metrics = benchmark_metrics_with(&records, &dataset, Score::Energy)?;
    apply_threshold(&mut records, &energy_metrics);
    Ok(ColorRun {
        bits,
        report,
        records,
        overlap_metrics,
        energy_metrics,
        seconds: start.elapsed().as_secs_f64(),
    })
}

impl ColorRun {
    /// Blue (YES) and red (NO) training bands of the energy.
    pub fn energy_bands(&self) -> [Band; 2] {
        let m = &self.energy_metrics;
        [
            Band {
                mean: m.yes_energy_mean,
                std: m.yes_energy_std,
                color: "blue",
            },
            Band {
                mean: m.no_energy_mean,
                std: m.no_energy_std,
                color: "red",
            },
        ]
    }

    pub fn overlap_bands(&self) -> [Band; 2] {
        let m = &self.energy_metrics;
        [
            Band {
                mean: m.yes_overlap_mean,
                std: m.yes_overlap_std,
                color: "blue",
            },
            Band {
                mean: m.no_overlap_mean,
                std: m.no_overlap_std,
                color: "red",
            },
        ]
    }
}

/// One `(n_T, R)` cell of a parameter sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepCell {
    pub trotter: usize,
    pub steps: usize,
    pub overlap: BenchmarkMetrics,
    pub energy: BenchmarkMetrics,
    pub seconds: f64,
}

/// Color task at every `(n_T, R)` pair of the grid, cells in parallel.
pub fn sweep(
    bits: ColorBits,
    options: &ColorOptions,
    trotter: &[usize],
    steps: &[usize],
    base: &AnnealConfig,
    schedule: &AnnealSchedule,
) -> Result<Vec<SweepCell>> {
    let cells: Vec<(usize, usize)> = trotter
        .iter()
        .flat_map(|&t| steps.iter().map(move |&r| (t, r)))
        .collect();
    cells
        .par_iter()
        .map(|&(t, r)| {
            let config = AnnealConfig {
                steps: r,
                trotter: t,
                ..*base
            };
            let run = run_color_task(bits, options, &config, schedule)?;
            Ok(SweepCell {
                trotter: t,
                steps: r,
                overlap: run.overlap_metrics,
                energy: run.energy_metrics,
                seconds: run.seconds,
            })
        })
        .collect()
}

/// One row of the interaction benchmark table: a stand-in graph, an
/// interaction set, the qubit counts it implies and the qudit grouping that
/// reproduces the compressed count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkCase {
    pub graph: usize,
    pub set: SetName,
    pub n_qubits: usize,
    pub n_opt: usize,
    pub grouping: Grouping,
}

/// The nineteen rows of the interaction benchmark. No single grouping rule
/// reproduces every compressed count, so each row names its own.
pub fn benchmark_cases() -> Vec<BenchmarkCase> {
    use Grouping::*;
    use SetName::*;
    let row = |graph, set, n_qubits, n_opt, grouping| BenchmarkCase {
        graph,
        set,
        n_qubits,
        n_opt,
        grouping,
    };
    vec![
        row(1, Pauli, 18, 7, Global),
        row(1, Proj, 6, 5, Global),
        row(1, Rand, 9, 5, Global),
        row(1, Heis, 5, 4, Global),
        row(1, Ising, 5, 4, Global),
        row(2, Pauli, 35, 13, PerEdge),
        row(2, Proj, 11, 7, Global),
        row(2, Rand, 17, 7, Global),
        row(2, Heis, 9, 6, Global),
        row(2, Ising, 8, 6, Global),
        row(3, Pauli, 52, 19, PerEdge),
        row(3, Proj, 16, 8, Global),
        row(3, Rand, 25, 9, Global),
        row(3, Heis, 13, 8, Global),
        row(3, Ising, 11, 7, Global),
        row(4, Proj, 44, 20, Chunks(12)),
        row(4, Rand, 71, 22, Sizes(vec![31, 17, 15])),
        row(4, Heis, 35, 16, Chunks(15)),
        row(4, Ising, 25, 14, Chunks(15)),
    ]
}

/// A seeded labelling of all `2^n` strings, half YES and half NO.
pub fn random_balanced_dataset(n_bits: usize, seed: u64) -> Result<LabeledDataset> {
    let mut all: Vec<BitString> = (0..1usize << n_bits).map(|v| BitString::from_index(v, n_bits)).collect();
    all.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let no = all.split_off(all.len() / 2);
    LabeledDataset::new(all, no)
}

/// Control layout the benchmark trains with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchLayout {
    /// One control qubit per term.
    Full,
    /// The row's qudit grouping.
    Compressed,
    /// Full up to [`AUTO_FULL_MAX_QUBITS`], compressed above.
    #[default]
    Auto,
}

/// Largest full register [`BenchLayout::Auto`] anneals; an 18-qubit run
/// already takes minutes per dataset on one core.
pub const AUTO_FULL_MAX_QUBITS: usize = 16;

impl std::str::FromStr for BenchLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" | "per-term" => Ok(Self::Full),
            "compressed" | "qudit" | "opt" => Ok(Self::Compressed),
            "auto" => Ok(Self::Auto),
            _ => Err(Error::InvalidArgument(format!("unknown benchmark layout `{s}` (full, compressed, auto)"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkRow {
    pub graph: usize,
    pub set: SetName,
    pub n_qubits: usize,
    pub n_opt: usize,
    /// Register size actually annealed.
    pub trained_qubits: usize,
    pub datasets: usize,
    pub yes_overlap: f64,
    pub no_overlap: f64,
    /// Mean over datasets.
    pub fidelity: f64,
    pub delta_e: f64,
    pub seconds_per_dataset: f64,
}

/// Trains one-shot on `datasets` random balanced labellings and scores each
/// on all of its labelled strings.
pub fn run_benchmark_case(
    case: &BenchmarkCase,
    datasets: usize,
    seed: u64,
    range: WeightRange,
    layout: BenchLayout,
    anneal: &AnnealConfig,
    schedule: &AnnealSchedule,
) -> Result<BenchmarkRow> {
    if datasets == 0 {
        return Err(Error::InvalidArgument("need at least one dataset".into()));
    }
    let graph = presets::benchmark(case.graph, case.set)?.with_seed(seed);
    let model = Model::new(graph)?;
    let full = build_training_layout(&model, LayoutMode::PerTerm, &Grouping::Global, 1.0)?;
    let compressed = build_training_layout(&model, LayoutMode::Qudit, &case.grouping, 1.0)?;
    let (n_qubits, n_opt) = (full.n_qubits(), compressed.n_qubits());
    let layout = match layout {
        BenchLayout::Full => full,
        BenchLayout::Compressed => compressed,
        BenchLayout::Auto if n_qubits <= AUTO_FULL_MAX_QUBITS.min(anneal.max_qubits) => full,
        BenchLayout::Auto => compressed,
    };
    let setup = TrainingSetup {
        model,
        layout,
        anneal: *anneal,
        schedule: schedule.clone(),
        range,
    };
    let n_data = setup.model.data_qubits().len();
    let start = Instant::now();
    let mut acc = (0.0, 0.0, 0.0, 0.0);
    for k in 0..datasets {
        let data = random_balanced_dataset(n_data, seed.wrapping_add(k as u64))?;
        let report = train(Method::OneShot, &setup, &data)?;
        let evaluator = Evaluator::new(report.trained, anneal, schedule)?;
        let records = evaluator.evaluate_all(&data)?;
        let m = benchmark_metrics(&records, &data)?;
        acc.0 += m.fidelity;
        acc.1 += m.delta_e;
        acc.2 += m.yes_overlap_mean;
        acc.3 += m.no_overlap_mean;
    }
    let d = datasets as f64;
    Ok(BenchmarkRow {
        graph: case.graph,
        set: case.set,
        n_qubits,
        n_opt,
        trained_qubits: setup.layout.n_qubits(),
        datasets,
        yes_overlap: acc.2 / d,
        no_overlap: acc.3 / d,
        fidelity: acc.0 / d,
        delta_e: acc.1 / d,
        seconds_per_dataset: start.elapsed().as_secs_f64() / d,
    })
}

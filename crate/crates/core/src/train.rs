//! Training schemes: one-shot and serial annealing, the exact box LP for
//! energy expectation, and the dense projected-block method.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anneal::{driver_hamiltonian, run_anneal, AnnealConfig, AnnealSchedule};
use crate::model::{
    data_projector, BitString, CoefficientEntry, LabeledDataset, Model, TrainedClassifier,
    TrainingLayout, WeightRange,
};
use crate::oracle::dense_matrix;
use crate::tensor::WeightedTermList;
use crate::{Error, Result};

/// Everything the annealing trainers need besides the data.
#[derive(Debug, Clone)]
pub struct TrainingSetup {
    pub model: Model,
    pub layout: TrainingLayout,
    pub anneal: AnnealConfig,
    pub schedule: AnnealSchedule,
    pub range: WeightRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    OneShot,
    Serial,
    ExactLp,
    ProjectedOracle,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "one-shot" | "oneshot" => Ok(Self::OneShot),
            "serial" => Ok(Self::Serial),
            "exact-lp" | "lp" => Ok(Self::ExactLp),
            "projected-oracle" | "projected" => Ok(Self::ProjectedOracle),
            _ => Err(Error::InvalidArgument(format!(
                "unknown method `{s}` (one-shot, serial, exact-lp, projected-oracle)"
            ))),
        }
    }
}

/// Runs `method`; the LP and projected methods ignore the anneal settings.
pub fn train(method: Method, setup: &TrainingSetup, dataset: &LabeledDataset) -> Result<TrainingReport> {
    match method {
        Method::OneShot => train_one_shot(setup, dataset),
        Method::Serial => train_serial(setup, dataset),
        Method::ExactLp => train_exact_lp(&setup.model, dataset, setup.range),
        Method::ProjectedOracle => train_projected_oracle(&setup.model, dataset, &setup.layout, setup.range),
    }
}

/// Control marginals of one annealing run, per term instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMarginals {
    pub raw: Vec<f64>,
    /// Min-max normalized to `[0, 1]`; all zeros when the raw values are flat.
    pub shifted: Vec<f64>,
}

impl RunMarginals {
    fn new(raw: Vec<f64>) -> Self {
        let shifted = min_max(&raw);
        Self { raw, shifted }
    }
}

/// Per-datum result of serial training.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SerialRun {
    pub datum: BitString,
    pub marginals: RunMarginals,
    /// Term instances whose shifted marginal exceeds 0.5.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpDetails {
    /// `c[l][i] = tr(tr_h(h_i) |l⟩⟨l|)`, YES rows first, then NO rows.
    pub c: Vec<Vec<f64>>,
    /// `κ_i = mean_YES c_i - mean_NO c_i`.
    pub kappa: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectedDetails {
    /// `tr_system(H_2)` per control-register value.
    pub traced_diagonal: Vec<f64>,
    pub minimal_blocks: Vec<usize>,
}

/// Outcome of a training run, serializable for reports.
#[derive(Debug, Clone, Serialize)]
pub struct TrainingReport {
    pub method: Method,
    #[serde(skip)]
    pub trained: TrainedClassifier,
    pub weights: Vec<CoefficientEntry>,
    pub range: WeightRange,
    /// Weights after the range map but before calibration.
    pub uncalibrated: Vec<f64>,
    pub calibration_flipped: bool,
    /// Mean trace energy of each side under the final weights.
    pub yes_energy: f64,
    pub no_energy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub yes_run: Option<RunMarginals>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub no_run: Option<RunMarginals>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub serial: Vec<SerialRun>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lp: Option<LpDetails>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projected: Option<ProjectedDetails>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_qubits: Option<usize>,
    pub seed: u64,
}

impl TrainingReport {
    pub fn coefficients(&self) -> &[f64] {
        self.trained.coefficients()
    }
}

fn min_max(v: &[f64]) -> Vec<f64> {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if v.is_empty() || hi - lo <= 1e-12 {
        return vec![0.0; v.len()];
    }
    v.iter().map(|x| (x - lo) / (hi - lo)).collect()
}

/// Bits of `l` laid out over the system register: data vertices take the
/// datum's bits in order, hidden vertices are `None`.
fn system_assignment(model: &Model, l: &BitString) -> Vec<Option<bool>> {
    let mut a = vec![None; model.n_system()];
    for (&q, &b) in model.data_qubits().iter().zip(l.bits()) {
        a[q] = Some(b);
    }
    a
}

/// `c_i(l) = tr(tr_h(h_i) |l⟩⟨l|)` for every term instance, where the
/// partial trace runs over all hidden vertices.
pub fn trace_coefficients(model: &Model, l: &BitString) -> Result<Vec<f64>> {
    if l.len() != model.data_qubits().len() {
        return Err(Error::DimensionMismatch(format!(
            "datum `{l}` has {} bits, model has {} data vertices",
            l.len(),
            model.data_qubits().len()
        )));
    }
    let assign = system_assignment(model, l);
    let n_hidden = model.hidden_qubits().len();
    Ok(model
        .instances()
        .iter()
        .map(|inst| {
            let targets = inst.operator.targets();
            let k = targets.len();
            let m = inst.operator.matrix();
            let free: Vec<usize> = (0..k).filter(|&j| assign[targets[j]].is_none()).collect();
            let base = (0..k).fold(0usize, |acc, j| {
                (acc << 1) | assign[targets[j]].unwrap_or(false) as usize
            });
            let mut sum = 0.0;
            for x in 0..1usize << free.len() {
                let mut idx = base;
                for (b, &j) in free.iter().enumerate() {
                    if (x >> (free.len() - 1 - b)) & 1 == 1 {
                        idx |= 1 << (k - 1 - j);
                    }
                }
                sum += m[(idx, idx)].re;
            }
            sum * (1u64 << (n_hidden - free.len())) as f64
        })
        .collect())
}

fn coefficient_rows(model: &Model, data: &[BitString]) -> Result<Vec<Vec<f64>>> {
    data.iter().map(|l| trace_coefficients(model, l)).collect()
}

fn mean_energy(rows: &[Vec<f64>], w: &[f64]) -> f64 {
    rows.iter()
        .map(|c| c.iter().zip(w).map(|(a, b)| a * b).sum::<f64>())
        .sum::<f64>()
        / rows.len() as f64
}

struct Calibrated {
    weights: Vec<f64>,
    flipped: bool,
    yes: f64,
    no: f64,
}

/// Picks the orientation (weights or their reflection in the range) whose
/// YES mean energy does not exceed the NO mean energy.
fn calibrate(w: Vec<f64>, range: WeightRange, yes: &[Vec<f64>], no: &[Vec<f64>]) -> Calibrated {
    let (ey, en) = (mean_energy(yes, &w), mean_energy(no, &w));
    if ey <= en + 1e-12 {
        return Calibrated {
            weights: w,
            flipped: false,
            yes: ey,
            no: en,
        };
    }
    let r: Vec<f64> = w.iter().map(|&x| range.reflect(x)).collect();
    let (ry, rn) = (mean_energy(yes, &r), mean_energy(no, &r));
    if ry - rn > ey - en {
        log::warn!("sign calibration could not improve the YES/NO energy order");
        return Calibrated {
            weights: w,
            flipped: false,
            yes: ey,
            no: en,
        };
    }
    if ry > rn + 1e-12 {
        log::warn!("YES energy stays above NO energy in both orientations");
    }
    Calibrated {
        weights: r,
        flipped: true,
        yes: ry,
        no: rn,
    }
}

struct Parts {
    method: Method,
    uncalibrated: Vec<f64>,
    yes_run: Option<RunMarginals>,
    no_run: Option<RunMarginals>,
    serial: Vec<SerialRun>,
    lp: Option<LpDetails>,
    projected: Option<ProjectedDetails>,
    n_qubits: Option<usize>,
}

fn finish(model: &Model, dataset: &LabeledDataset, range: WeightRange, p: Parts) -> Result<TrainingReport> {
    let yes = coefficient_rows(model, dataset.yes())?;
    let no = coefficient_rows(model, dataset.no())?;
    let cal = calibrate(p.uncalibrated.clone(), range, &yes, &no);
    let weights: Vec<f64> = cal.weights.iter().map(|&w| range.clamp(w)).collect();
    let trained = TrainedClassifier::new(model.clone(), weights, range)?;
    Ok(TrainingReport {
        method: p.method,
        weights: trained.entries(),
        trained,
        range,
        uncalibrated: p.uncalibrated,
        calibration_flipped: cal.flipped,
        yes_energy: cal.yes,
        no_energy: cal.no,
        yes_run: p.yes_run,
        no_run: p.no_run,
        serial: p.serial,
        lp: p.lp,
        projected: p.projected,
        n_qubits: p.n_qubits,
        seed: model.graph().seed(),
    })
}

impl TrainingSetup {
    fn check(&self, dataset: &LabeledDataset) -> Result<()> {
        dataset.check_trainable(self.model.data_qubits().len())?;
        if self.layout.n_terms != self.model.n_terms() {
            return Err(Error::InvalidLayout("layout was built for a different model".into()));
        }
        let n = self.layout.n_qubits();
        if n > self.anneal.max_qubits {
            return Err(Error::QubitCap {
                requested: n,
                cap: self.anneal.max_qubits,
            });
        }
        Ok(())
    }

    /// Anneals `H_c - δ Π(strings)` and returns per-term control marginals.
    fn anneal_with(&self, strings: &[BitString], driver: &WeightedTermList, control: &WeightedTermList) -> Result<RunMarginals> {
        let pi = data_projector(strings, &self.model.data_qubits())?.scaled(-self.layout.delta);
        let result = run_anneal(driver, &pi, control, &self.anneal, &self.schedule)?;
        Ok(RunMarginals::new(result.control_statistics(&self.layout)?.term_p))
    }

    fn families(&self) -> Result<(WeightedTermList, WeightedTermList)> {
        Ok((
            driver_hamiltonian(self.layout.n_qubits()),
            self.layout.control_hamiltonian(&self.model)?,
        ))
    }
}

/// Two anneals, with `Π_YES` and with `Π_NO`. Weights are the NO minus the
/// YES shifted marginals, mapped from `[-1, 1]` onto the weight range, then
/// sign-calibrated.
pub fn train_one_shot(setup: &TrainingSetup, dataset: &LabeledDataset) -> Result<TrainingReport> {
    setup.check(dataset)?;
    let (driver, control) = setup.families()?;
    let (yes, no) = rayon::join(
        || setup.anneal_with(dataset.yes(), &driver, &control),
        || setup.anneal_with(dataset.no(), &driver, &control),
    );
    let (yes, no) = (yes?, no?);
    let uncalibrated = yes
        .shifted
        .iter()
        .zip(&no.shifted)
        .map(|(y, n)| setup.range.from_unit(n - y))
        .collect();
    finish(
        &setup.model,
        dataset,
        setup.range,
        Parts {
            method: Method::OneShot,
            uncalibrated,
            yes_run: Some(yes),
            no_run: Some(no),
            serial: Vec::new(),
            lp: None,
            projected: None,
            n_qubits: Some(setup.layout.n_qubits()),
        },
    )
}

/// One anneal per datum with a rank-1 projector. A term belongs to `M_l`
/// when its shifted marginal exceeds 0.5; the weight is the YES membership
/// frequency minus the NO membership frequency, mapped onto the range and
/// sign-calibrated.
pub fn train_serial(setup: &TrainingSetup, dataset: &LabeledDataset) -> Result<TrainingReport> {
    setup.check(dataset)?;
    let (driver, control) = setup.families()?;
    let records: Vec<(BitString, bool)> = dataset
        .yes()
        .iter()
        .map(|l| (l.clone(), true))
        .chain(dataset.no().iter().map(|l| (l.clone(), false)))
        .collect();
    let runs: Vec<SerialRun> = records
        .par_iter()
        .map(|(l, _)| {
            let marginals = setup.anneal_with(std::slice::from_ref(l), &driver, &control)?;
            let members = (0..marginals.shifted.len())
                .filter(|&i| marginals.shifted[i] > 0.5)
                .collect();
            Ok(SerialRun {
                datum: l.clone(),
                marginals,
                members,
            })
        })
        .collect::<Result<_>>()?;
    let n_terms = setup.model.n_terms();
    let (ny, nn) = (dataset.yes().len() as f64, dataset.no().len() as f64);
    let mut a = vec![0.0; n_terms];
    for (run, (_, is_yes)) in runs.iter().zip(&records) {
        let w = if *is_yes { 1.0 / ny } else { -1.0 / nn };
        for &i in &run.members {
            a[i] += w;
        }
    }
    let uncalibrated = a.iter().map(|&x| setup.range.from_unit(x)).collect();
    finish(
        &setup.model,
        dataset,
        setup.range,
        Parts {
            method: Method::Serial,
            uncalibrated,
            yes_run: None,
            no_run: None,
            serial: runs,
            lp: None,
            projected: None,
            n_qubits: Some(setup.layout.n_qubits()),
        },
    )
}

/// Minimizes `Σ_i a_i κ_i` over the box `a ∈ [lo, hi]^N`: each coordinate
/// sits at `hi` when `κ_i < 0`, at `lo` when `κ_i > 0`, and at the point
/// of the range closest to zero on a tie (`|κ| ≤ 1e-12`).
pub fn train_exact_lp(model: &Model, dataset: &LabeledDataset, range: WeightRange) -> Result<TrainingReport> {
    dataset.check_trainable(model.data_qubits().len())?;
    let yes = coefficient_rows(model, dataset.yes())?;
    let no = coefficient_rows(model, dataset.no())?;
    let kappa = lp_objective(&yes, &no, model.n_terms());
    let uncalibrated = kappa.iter().map(|&k| lp_corner(k, range)).collect();
    let c = yes.into_iter().chain(no).collect();
    finish(
        model,
        dataset,
        range,
        Parts {
            method: Method::ExactLp,
            uncalibrated,
            yes_run: None,
            no_run: None,
            serial: Vec::new(),
            lp: Some(LpDetails { c, kappa }),
            projected: None,
            n_qubits: None,
        },
    )
}

fn lp_objective(yes: &[Vec<f64>], no: &[Vec<f64>], n_terms: usize) -> Vec<f64> {
    (0..n_terms)
        .map(|i| {
            let my = yes.iter().map(|c| c[i]).sum::<f64>() / yes.len() as f64;
            let mn = no.iter().map(|c| c[i]).sum::<f64>() / no.len() as f64;
            my - mn
        })
        .collect()
}

fn lp_corner(kappa: f64, range: WeightRange) -> f64 {
    if kappa.abs() <= 1e-12 {
        range.clamp(0.0)
    } else if kappa < 0.0 {
        range.hi
    } else {
        range.lo
    }
}

/// Largest register [`train_projected_oracle`] accepts.
pub const PROJECTED_MAX_QUBITS: usize = 14;

/// Dense `H_2 = (1 ⊗ Π_YES) H_c (1 ⊗ Π_YES)`, traced over the system. Terms
/// switched on in any minimal block get weight 1, all others 0 (both
/// clamped into the range).
pub fn train_projected_oracle(
    model: &Model,
    dataset: &LabeledDataset,
    layout: &TrainingLayout,
    range: WeightRange,
) -> Result<TrainingReport> {
    dataset.check_trainable(model.data_qubits().len())?;
    let n = layout.n_qubits();
    if n > PROJECTED_MAX_QUBITS {
        return Err(Error::QubitCap {
            requested: n,
            cap: PROJECTED_MAX_QUBITS,
        });
    }
    let hc = dense_matrix(&layout.control_hamiltonian(model)?, n)?;
    let pi = dense_matrix(&data_projector(dataset.yes(), &model.data_qubits())?, n)?;
    let h2 = &pi * hc * &pi;
    let traced = traced_control_diagonal(&h2, layout.n_system, layout.n_control());
    let lo = traced.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = traced.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-9 * (hi - lo + 1.0);
    let minimal: Vec<usize> = (0..traced.len()).filter(|&b| traced[b] - lo <= tol).collect();
    let w = layout.n_control();
    let mut chosen = vec![false; model.n_terms()];
    for &b in &minimal {
        let bits: Vec<bool> = (0..w).map(|j| (b >> (w - 1 - j)) & 1 == 1).collect();
        for t in layout.active_terms(&bits) {
            chosen[t] = true;
        }
    }
    let uncalibrated = chosen
        .iter()
        .map(|&c| range.clamp(if c { 1.0 } else { 0.0 }))
        .collect();
    finish(
        model,
        dataset,
        range,
        Parts {
            method: Method::ProjectedOracle,
            uncalibrated,
            yes_run: None,
            no_run: None,
            serial: Vec::new(),
            lp: None,
            projected: Some(ProjectedDetails {
                traced_diagonal: traced,
                minimal_blocks: minimal,
            }),
            n_qubits: Some(n),
        },
    )
}

/// Diagonal of `tr_system(M)` for a register ordered system first, control last.
pub fn traced_control_diagonal(
    m: &nalgebra::DMatrix<crate::tensor::Complex64>,
    n_system: usize,
    n_control: usize,
) -> Vec<f64> {
    (0..1usize << n_control)
        .map(|b| {
            (0..1usize << n_system)
                .map(|s| m[((s << n_control) | b, (s << n_control) | b)].re)
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_training_layout, presets, Grouping, LayoutMode, SetName};

    fn not_task() -> LabeledDataset {
        LabeledDataset::from_strs(&["01", "10"], &["00", "11"]).unwrap()
    }

    #[test]
    fn trace_coefficients_for_projectors() {
        let m = Model::new(presets::edge(SetName::Proj)).unwrap();
        let c = trace_coefficients(&m, &"01".parse().unwrap()).unwrap();
        assert_eq!(c, vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn trace_coefficients_with_hidden_vertex() {
        // star: data a, b around hidden center 2; Proj on (a, c) and (b, c).
        let m = Model::new(presets::star(&["a", "b"], SetName::Proj)).unwrap();
        let c = trace_coefficients(&m, &"10".parse().unwrap()).unwrap();
        // edge 0 is (a=1, c): |10⟩⟨10| and |11⟩⟨11| each contribute 1 (one
        // hidden state), times 2^(1-1).
        assert_eq!(c, vec![0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn lp_on_not_task() {
        let m = Model::new(presets::edge(SetName::Proj)).unwrap();
        let r = train_exact_lp(&m, &not_task(), WeightRange::default()).unwrap();
        assert_eq!(r.coefficients(), &[1.0, -1.0, -1.0, 1.0]);
        assert!(!r.calibration_flipped);
        assert!(r.yes_energy < r.no_energy);
    }

    #[test]
    fn lp_tie_gives_zero() {
        let m = Model::new(presets::edge(SetName::Heis)).unwrap();
        // Heisenberg terms have zero diagonal except zz, which is symmetric here.
        let d = LabeledDataset::from_strs(&["00"], &["11"]).unwrap();
        let r = train_exact_lp(&m, &d, WeightRange::default()).unwrap();
        assert_eq!(r.coefficients(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn projected_oracle_on_not_task() {
        let m = Model::new(presets::edge(SetName::Proj)).unwrap();
        let l = build_training_layout(&m, LayoutMode::PerTerm, &Grouping::Global, 1.0).unwrap();
        let r = train_projected_oracle(&m, &not_task(), &l, WeightRange::new(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(r.coefficients(), &[1.0, 0.0, 0.0, 1.0]);
        let p = r.projected.unwrap();
        // blocks with only the 00 and 11 controls: 0000, 0001, 1000, 1001
        assert_eq!(p.minimal_blocks, vec![0, 1, 8, 9]);
    }

    #[test]
    fn two_term_traced_diagonal() {
        // Each block's entry is the sum of tr(Π h) over its active terms.
        let m = Model::new(presets::edge(SetName::Proj)).unwrap();
        let l = build_training_layout(&m, LayoutMode::PerTerm, &Grouping::Global, 1.0).unwrap();
        let d = LabeledDataset::from_strs(&["01", "11"], &["00"]).unwrap();
        let r = train_projected_oracle(&m, &d, &l, WeightRange::default()).unwrap();
        let t = r.projected.unwrap().traced_diagonal;
        for b in 0..16usize {
            let want = ((b >> 2) & 1) + (b & 1); // controls of |01⟩⟨01| and |11⟩⟨11|
            assert!((t[b] - want as f64).abs() < 1e-12, "block {b}");
        }
    }

    #[test]
    fn min_max_degenerate() {
        assert_eq!(min_max(&[0.3, 0.3]), vec![0.0, 0.0]);
        assert_eq!(min_max(&[0.25, 0.75, 0.5]), vec![0.0, 1.0, 0.5]);
    }

    #[test]
    fn calibration_reflects() {
        let yes = vec![vec![1.0, 0.0]];
        let no = vec![vec![0.0, 1.0]];
        let c = calibrate(vec![1.0, -1.0], WeightRange::default(), &yes, &no);
        assert!(c.flipped);
        assert_eq!(c.weights, vec![-1.0, 1.0]);
        assert!(c.yes <= c.no);
    }
}

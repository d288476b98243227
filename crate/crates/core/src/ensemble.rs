//! Ensembles of independent trajectories: histogram aggregation, comparison
//! against the initial-state prediction, end-state class statistics, and the
//! error-scaling / evolution-degradation studies.
//!
//! Per-run seeds derive deterministically from `(master_seed, run_index)`,
//! so the merged output is a pure function of the configuration no matter
//! how many workers execute it. Failed runs are excluded from the merged
//! histogram and reported, never silently resampled.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::hamiltonian::{HamiltonianOperator, ManyBodyState, Propagator};
use crate::jump::{derive_run_seed, EventKind, JumpError, JumpProcess};
use crate::scattering::ScatteringKernel;
use crate::stats;

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    /// Number of independent runs `n`.
    pub run_count: usize,
    /// Detection events per run `m`.
    pub event_count: usize,
    /// Free-evolution time between events (must match the propagator).
    pub dt: f64,
    /// Angular histogram bins over `[-pi, pi]`.
    pub bin_count: usize,
    pub master_seed: u64,
    /// Worker threads; 0 or 1 runs serially. Output does not depend on it.
    pub worker_count: usize,
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<(), &'static str> {
        if self.run_count == 0 {
            return Err("run_count must be >= 1");
        }
        if self.event_count == 0 {
            return Err("event_count must be >= 1");
        }
        if self.bin_count == 0 {
            return Err("bin_count must be >= 1");
        }
        if !(self.dt >= 0.0) {
            return Err("dt must be non-negative");
        }
        Ok(())
    }
}

/// Detection counts over uniform angular bins plus the non-scattering tally.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularHistogram {
    counts: Vec<u64>,
    nonscatter_count: u64,
    total_events: u64,
}

impl AngularHistogram {
    pub fn new(bin_count: usize) -> Self {
        Self { counts: vec![0; bin_count], nonscatter_count: 0, total_events: 0 }
    }

    pub fn bin_count(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self) -> f64 {
        2.0 * PI / self.counts.len() as f64
    }

    pub fn bin_center(&self, index: usize) -> f64 {
        -PI + (index as f64 + 0.5) * self.bin_width()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn nonscatter_count(&self) -> u64 {
        self.nonscatter_count
    }

    /// All detections, scattering or not.
    pub fn total_events(&self) -> u64 {
        self.total_events
    }

    pub fn scatter_total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn record(&mut self, event: EventKind) {
        match event {
            EventKind::Scatter { theta } => {
                let bins = self.counts.len();
                let index = ((((theta + PI) / (2.0 * PI)) * bins as f64) as usize).min(bins - 1);
                self.counts[index] += 1;
            }
            EventKind::NonScatter => self.nonscatter_count += 1,
        }
        self.total_events += 1;
    }

    pub fn merge(&mut self, other: &AngularHistogram) {
        debug_assert_eq!(self.counts.len(), other.counts.len());
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.nonscatter_count += other.nonscatter_count;
        self.total_events += other.total_events;
    }

    /// Per-bin probabilities conditioned on scattering.
    pub fn conditional_probabilities(&self) -> Vec<f64> {
        let total = self.scatter_total() as f64;
        if total == 0.0 {
            return vec![0.0; self.counts.len()];
        }
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }
}

/// `sum_b |p_b - q_b|` between the conditional distributions of two
/// histograms.
pub fn histogram_l1(a: &AngularHistogram, b: &AngularHistogram) -> f64 {
    let pa = a.conditional_probabilities();
    let pb = b.conditional_probabilities();
    pa.iter().zip(&pb).map(|(x, y)| (x - y).abs()).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub run_index: usize,
    pub seed: u64,
    pub scatter_count: u64,
    pub nonscatter_count: u64,
    pub final_class_weights: Vec<f64>,
    /// Class holding the largest final weight.
    pub dominant_class: usize,
    pub dominant_weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub run_index: usize,
    pub seed: u64,
    pub event_index: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub histogram: AngularHistogram,
    pub runs: Vec<RunSummary>,
    pub failures: Vec<RunFailure>,
}

impl EnsembleResult {
    pub fn completed_runs(&self) -> usize {
        self.runs.len()
    }
}

struct RunOutput {
    histogram: AngularHistogram,
    summary: RunSummary,
}

fn run_single(
    initial: &ManyBodyState,
    propagator: &Propagator,
    kernel: &ScatteringKernel,
    event_count: usize,
    bin_count: usize,
    run_index: usize,
    seed: u64,
) -> Result<RunOutput, JumpError> {
    let mut process = JumpProcess::new(initial, propagator, kernel, seed)?;
    let mut histogram = AngularHistogram::new(bin_count);
    let mut scatter_count = 0u64;
    for _ in 0..event_count {
        let kind = process.step()?;
        if kind.is_scatter() {
            scatter_count += 1;
        }
        histogram.record(kind);
    }
    let final_state = process.into_state();
    let final_class_weights = kernel.class_weights(&final_state);
    let (dominant_class, dominant_weight) = final_class_weights
        .iter()
        .enumerate()
        .fold((0, 0.0), |best, (c, &w)| if w > best.1 { (c, w) } else { best });
    Ok(RunOutput {
        histogram,
        summary: RunSummary {
            run_index,
            seed,
            scatter_count,
            nonscatter_count: event_count as u64 - scatter_count,
            final_class_weights,
            dominant_class,
            dominant_weight,
        },
    })
}

fn run_range(
    initial: &ManyBodyState,
    propagator: &Propagator,
    kernel: &ScatteringKernel,
    config: &EnsembleConfig,
    range: core::ops::Range<usize>,
) -> EnsembleResult {
    let mut histogram = AngularHistogram::new(config.bin_count);
    let mut runs = Vec::with_capacity(range.len());
    let mut failures = Vec::new();
    for run_index in range {
        let seed = derive_run_seed(config.master_seed, run_index as u64);
        match run_single(initial, propagator, kernel, config.event_count, config.bin_count, run_index, seed)
        {
            Ok(output) => {
                histogram.merge(&output.histogram);
                runs.push(output.summary);
            }
            Err(error) => failures.push(RunFailure {
                run_index,
                seed,
                event_index: error.event_index,
                message: error.to_string(),
            }),
        }
    }
    EnsembleResult { histogram, runs, failures }
}

/// Run `n` independent trajectories and merge their detection histograms.
///
/// The result is identical for every `worker_count`, including zero and one.
pub fn run_ensemble(
    initial: &ManyBodyState,
    propagator: &Propagator,
    kernel: &ScatteringKernel,
    config: &EnsembleConfig,
) -> EnsembleResult {
    #[cfg(feature = "std")]
    {
        let workers = config.worker_count.clamp(1, config.run_count.max(1));
        if workers > 1 {
            return run_ensemble_threaded(initial, propagator, kernel, config, workers);
        }
    }
    run_range(initial, propagator, kernel, config, 0..config.run_count)
}

#[cfg(feature = "std")]
fn run_ensemble_threaded(
    initial: &ManyBodyState,
    propagator: &Propagator,
    kernel: &ScatteringKernel,
    config: &EnsembleConfig,
    workers: usize,
) -> EnsembleResult {
    let n = config.run_count;
    let chunk = n.div_ceil(workers);
    let mut partials: Vec<Option<EnsembleResult>> = Vec::new();
    partials.resize_with(workers, || None);

    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for (w, slot) in partials.iter_mut().enumerate() {
            let start = w * chunk;
            let end = ((w + 1) * chunk).min(n);
            if start >= end {
                continue;
            }
            handles.push(scope.spawn(move || {
                *slot = Some(run_range(initial, propagator, kernel, config, start..end));
            }));
        }
        for handle in handles {
            handle.join().expect("ensemble worker panicked");
        }
    });

    // merge in run-index order: identical bytes to the serial path
    let mut merged = EnsembleResult {
        histogram: AngularHistogram::new(config.bin_count),
        runs: Vec::with_capacity(n),
        failures: Vec::new(),
    };
    for partial in partials.into_iter().flatten() {
        merged.histogram.merge(&partial.histogram);
        merged.runs.extend(partial.runs);
        merged.failures.extend(partial.failures);
    }
    merged
}

/// Detection density of `initial` evaluated at the centers of `bin_count`
/// uniform bins: the no-backaction prediction all reconstructions are
/// measured against.
pub fn predicted_initial_distribution(
    initial: &ManyBodyState,
    kernel: &ScatteringKernel,
    bin_count: usize,
) -> Vec<f64> {
    let width = 2.0 * PI / bin_count as f64;
    (0..bin_count)
        .map(|b| {
            let theta = -PI + (b as f64 + 0.5) * width;
            kernel.angular_density(initial, theta)
        })
        .collect()
}

/// Histogram against prediction, both conditioned on scattering.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionComparison {
    /// Conditional per-bin probabilities of the prediction.
    pub predicted: Vec<f64>,
    /// Conditional per-bin probabilities of the histogram.
    pub empirical: Vec<f64>,
    /// `sum_b |empirical - predicted|`.
    pub l1: f64,
    /// `sqrt(sum_b (empirical - predicted)^2)`.
    pub l2: f64,
    /// Per-bin deviation in Poisson standard deviations.
    pub z_scores: Vec<f64>,
}

pub fn compare_with_prediction(
    histogram: &AngularHistogram,
    predicted_density: &[f64],
) -> DistributionComparison {
    assert_eq!(histogram.bin_count(), predicted_density.len());
    let total_density: f64 = predicted_density.iter().sum();
    let predicted: Vec<f64> = if total_density > 0.0 {
        predicted_density.iter().map(|&p| p / total_density).collect()
    } else {
        vec![0.0; predicted_density.len()]
    };
    let empirical = histogram.conditional_probabilities();
    let scatter_total = histogram.scatter_total() as f64;

    let mut l1 = 0.0;
    let mut l2 = 0.0;
    let mut z_scores = Vec::with_capacity(predicted.len());
    for ((&e, &p), &count) in empirical.iter().zip(&predicted).zip(histogram.counts()) {
        let diff = e - p;
        l1 += diff.abs();
        l2 += diff * diff;
        let expectation = scatter_total * p;
        z_scores.push(if expectation > 0.0 {
            (count as f64 - expectation) / expectation.sqrt()
        } else {
            0.0
        });
    }
    DistributionComparison { predicted, empirical, l1, l2: l2.sqrt(), z_scores }
}

/// How often each class ends up dominating a run, against the Born weights
/// of the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassFrequency {
    pub class_id: usize,
    pub predicted_weight: f64,
    pub observed_runs: u64,
    pub frequency: f64,
    /// Binomial standard deviation of the frequency.
    pub sigma: f64,
    /// Deviation in units of `sigma`.
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndStateStatistics {
    pub per_class: Vec<ClassFrequency>,
    pub total_runs: usize,
    /// Runs whose dominant class weight stayed below 0.99.
    pub unconverged_runs: usize,
}

pub fn end_state_statistics(
    runs: &[RunSummary],
    predicted_class_weights: &[f64],
) -> EndStateStatistics {
    let total = runs.len();
    let mut dominated = vec![0u64; predicted_class_weights.len()];
    let mut unconverged = 0;
    for run in runs {
        dominated[run.dominant_class] += 1;
        if run.dominant_weight < 0.99 {
            unconverged += 1;
        }
    }
    let per_class = predicted_class_weights
        .iter()
        .enumerate()
        .map(|(class_id, &weight)| {
            let observed = dominated[class_id];
            let frequency = if total > 0 { observed as f64 / total as f64 } else { 0.0 };
            let sigma = (weight * (1.0 - weight) / total.max(1) as f64).sqrt();
            ClassFrequency {
                class_id,
                predicted_weight: weight,
                observed_runs: observed,
                frequency,
                sigma,
                z: stats::binomial_z(observed, total as u64, weight),
            }
        })
        .collect();
    EndStateStatistics { per_class, total_runs: total, unconverged_runs: unconverged }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPoint {
    pub event_count: usize,
    pub run_count: usize,
    pub total_events: u64,
    pub scatter_total: u64,
    pub l1: f64,
    pub l2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingStudy {
    pub points: Vec<ScalingPoint>,
    /// Fitted slope of `ln(l2)` against `ln(m n)`.
    pub slope: f64,
    pub intercept: f64,
}

/// Reconstruction error against the initial-state prediction for a list of
/// `(events per run, runs)` configurations at frozen evolution (`dt = 0`).
pub fn error_scaling_study(
    initial: &ManyBodyState,
    kernel: &ScatteringKernel,
    pairs: &[(usize, usize)],
    bin_count: usize,
    master_seed: u64,
    worker_count: usize,
) -> ScalingStudy {
    let propagator = Propagator::Identity;
    let prediction = predicted_initial_distribution(initial, kernel, bin_count);

    let mut points = Vec::with_capacity(pairs.len());
    for (i, &(event_count, run_count)) in pairs.iter().enumerate() {
        let config = EnsembleConfig {
            run_count,
            event_count,
            dt: 0.0,
            bin_count,
            master_seed: derive_run_seed(master_seed, i as u64),
            worker_count,
        };
        let result = run_ensemble(initial, &propagator, kernel, &config);
        let comparison = compare_with_prediction(&result.histogram, &prediction);
        points.push(ScalingPoint {
            event_count,
            run_count,
            total_events: (event_count * run_count) as u64,
            scatter_total: result.histogram.scatter_total(),
            l1: comparison.l1,
            l2: comparison.l2,
        });
    }

    let samples: Vec<(f64, f64)> =
        points.iter().map(|p| (p.total_events as f64, p.l2)).collect();
    let (slope, intercept) = stats::log_log_fit(&samples);
    ScalingStudy { points, slope, intercept }
}

/// One `(dt, m, n)` configuration of the evolution-degradation study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyPoint {
    pub dt: f64,
    pub event_count: usize,
    pub run_count: usize,
}

/// Histograms for two initial states at one study point, with the fidelity
/// of each to its own prediction and the distance between the two.
#[derive(Debug, Clone)]
pub struct DegradationPoint {
    pub point: StudyPoint,
    pub histogram_a: AngularHistogram,
    pub histogram_b: AngularHistogram,
    pub comparison_a: DistributionComparison,
    pub comparison_b: DistributionComparison,
    /// L1 distance between the two conditional histograms.
    pub d_between: f64,
}

impl DegradationPoint {
    pub fn d_fidelity_a(&self) -> f64 {
        self.comparison_a.l1
    }

    pub fn d_fidelity_b(&self) -> f64 {
        self.comparison_b.l1
    }
}

/// Compare the reconstruction of two initial states as the free evolution
/// between events grows.
pub fn evolution_degradation_study(
    initial_a: &ManyBodyState,
    initial_b: &ManyBodyState,
    h: &HamiltonianOperator,
    kernel: &ScatteringKernel,
    points: &[StudyPoint],
    bin_count: usize,
    master_seed: u64,
    worker_count: usize,
) -> Result<Vec<DegradationPoint>, crate::hamiltonian::HamiltonianError> {
    let prediction_a = predicted_initial_distribution(initial_a, kernel, bin_count);
    let prediction_b = predicted_initial_distribution(initial_b, kernel, bin_count);

    let mut results = Vec::with_capacity(points.len());
    for (i, &point) in points.iter().enumerate() {
        let propagator = Propagator::new(h, point.dt)?;
        let run = |initial: &ManyBodyState, which: u64| {
            let config = EnsembleConfig {
                run_count: point.run_count,
                event_count: point.event_count,
                dt: point.dt,
                bin_count,
                master_seed: derive_run_seed(master_seed, 2 * i as u64 + which),
                worker_count,
            };
            run_ensemble(initial, &propagator, kernel, &config)
        };
        let result_a = run(initial_a, 0);
        let result_b = run(initial_b, 1);
        let comparison_a = compare_with_prediction(&result_a.histogram, &prediction_a);
        let comparison_b = compare_with_prediction(&result_b.histogram, &prediction_b);
        let d_between = histogram_l1(&result_a.histogram, &result_b.histogram);
        results.push(DegradationPoint {
            point,
            histogram_a: result_a.histogram,
            histogram_b: result_b.histogram,
            comparison_a,
            comparison_b,
            d_between,
        });
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{equivalence_classes, FockBasis, OccupationVector};
    use crate::hamiltonian::{ground_state, BoseHubbardParams, HamiltonianOperator};
    use crate::scattering::ScatteringConfig;

    fn setup(
        interaction: f64,
        coupling: f64,
    ) -> (FockBasis, HamiltonianOperator, ScatteringKernel) {
        let basis = FockBasis::enumerate(3, 3).unwrap();
        let classes = equivalence_classes(&basis);
        let config = ScatteringConfig { coupling, ..Default::default() };
        let kernel = ScatteringKernel::build(&basis, &classes, &config).unwrap();
        let params = BoseHubbardParams::with_interaction_ratio(3, 3, interaction);
        let h = HamiltonianOperator::build(&params, &basis).unwrap();
        (basis, h, kernel)
    }

    #[test]
    fn histogram_conserves_event_totals() {
        let (_, h, kernel) = setup(0.05, 0.1);
        let gs = ground_state(&h).unwrap();
        let propagator = Propagator::new(&h, 0.0).unwrap();
        let config = EnsembleConfig {
            run_count: 40,
            event_count: 100,
            dt: 0.0,
            bin_count: 600,
            master_seed: 1,
            worker_count: 1,
        };
        let result = run_ensemble(&gs.state, &propagator, &kernel, &config);
        assert_eq!(result.completed_runs(), 40);
        assert!(result.failures.is_empty());
        assert_eq!(
            result.histogram.scatter_total() + result.histogram.nonscatter_count(),
            40 * 100
        );
        assert_eq!(result.histogram.total_events(), 4000);
    }

    #[test]
    fn switched_off_probe_gives_empty_histogram() {
        let (_, h, kernel) = setup(0.05, 0.0);
        let gs = ground_state(&h).unwrap();
        let propagator = Propagator::new(&h, 0.0).unwrap();
        let config = EnsembleConfig {
            run_count: 10,
            event_count: 50,
            dt: 0.0,
            bin_count: 16,
            master_seed: 3,
            worker_count: 1,
        };
        let result = run_ensemble(&gs.state, &propagator, &kernel, &config);
        assert_eq!(result.histogram.scatter_total(), 0);
        assert_eq!(result.histogram.nonscatter_count(), 500);
    }

    #[cfg(feature = "std")]
    #[test]
    fn worker_count_does_not_change_the_result() {
        let (_, h, kernel) = setup(0.05, 0.1);
        let gs = ground_state(&h).unwrap();
        let propagator = Propagator::new(&h, 0.0).unwrap();
        let base = EnsembleConfig {
            run_count: 37,
            event_count: 60,
            dt: 0.0,
            bin_count: 64,
            master_seed: 5,
            worker_count: 1,
        };
        let serial = run_ensemble(&gs.state, &propagator, &kernel, &base);
        for workers in [2, 4, 8] {
            let config = EnsembleConfig { worker_count: workers, ..base.clone() };
            let parallel = run_ensemble(&gs.state, &propagator, &kernel, &config);
            assert_eq!(serial.histogram, parallel.histogram, "workers = {workers}");
            assert_eq!(serial.runs, parallel.runs, "workers = {workers}");
        }
    }

    #[test]
    fn single_run_matches_trajectory_events() {
        let (_, h, kernel) = setup(0.05, 0.1);
        let gs = ground_state(&h).unwrap();
        let propagator = Propagator::new(&h, 0.0).unwrap();
        let config = EnsembleConfig {
            run_count: 1,
            event_count: 200,
            dt: 0.0,
            bin_count: 600,
            master_seed: 7,
            worker_count: 1,
        };
        let result = run_ensemble(&gs.state, &propagator, &kernel, &config);

        let trajectory = crate::jump::run_trajectory(
            &gs.state,
            &propagator,
            &kernel,
            &crate::jump::TrajectoryConfig {
                event_count: 200,
                dt: 0.0,
                rng_seed: derive_run_seed(7, 0),
                snapshot_stride: 0,
            },
        )
        .unwrap();

        let mut expected = AngularHistogram::new(600);
        for event in &trajectory.events {
            expected.record(event.kind);
        }
        assert_eq!(result.histogram, expected);
        assert_eq!(result.runs[0].scatter_count, trajectory.scatter_count);
    }

    #[test]
    fn fock_initial_state_dominates_its_own_class() {
        let (basis, h, kernel) = setup(0.05, 0.1);
        let u = basis.index_of(&OccupationVector::new(vec![1, 1, 1])).unwrap();
        let state = ManyBodyState::fock(basis.len(), u);
        let propagator = Propagator::new(&h, 0.0).unwrap();
        let config = EnsembleConfig {
            run_count: 25,
            event_count: 100,
            dt: 0.0,
            bin_count: 60,
            master_seed: 11,
            worker_count: 1,
        };
        let result = run_ensemble(&state, &propagator, &kernel, &config);
        let mut predicted = vec![0.0; kernel.class_count()];
        predicted[kernel.class_of(u)] = 1.0;
        let statistics = end_state_statistics(&result.runs, &predicted);
        assert_eq!(statistics.unconverged_runs, 0);
        let entry = &statistics.per_class[kernel.class_of(u)];
        assert_eq!(entry.observed_runs, 25);
        assert!((entry.frequency - 1.0).abs() < 1e-12);
    }

    #[test]
    fn comparison_is_exact_on_the_prediction_itself() {
        let (_, h, kernel) = setup(0.05, 0.1);
        let gs = ground_state(&h).unwrap();
        let prediction = predicted_initial_distribution(&gs.state, &kernel, 600);
        // a fake histogram sampled exactly proportional to the prediction
        let mut histogram = AngularHistogram::new(600);
        let total: f64 = prediction.iter().sum();
        for (b, &p) in prediction.iter().enumerate() {
            let count = (p / total * 1e6).round() as u64;
            for _ in 0..count.min(3) {
                // token counts only sanity-check the plumbing
                histogram.record(EventKind::Scatter { theta: histogram.bin_center(b) });
            }
        }
        let comparison = compare_with_prediction(&histogram, &prediction);
        assert!(comparison.l1 < 0.6);
        assert_eq!(comparison.predicted.len(), 600);
    }

    #[test]
    fn predicted_distribution_integrates_to_scatter_probability() {
        let (_, h, kernel) = setup(0.05, 0.1);
        let gs = ground_state(&h).unwrap();
        let bins = 600;
        let prediction = predicted_initial_distribution(&gs.state, &kernel, bins);
        let width = 2.0 * PI / bins as f64;
        let integral: f64 = prediction.iter().map(|p| p * width).sum();
        let total = kernel.total_scatter_probability(&gs.state);
        assert!((integral - total).abs() < 1e-3, "{integral} vs {total}");
    }

    #[test]
    fn scaling_study_produces_a_negative_slope() {
        let (_, h, kernel) = setup(0.05, 0.1);
        let gs = ground_state(&h).unwrap();
        let study = error_scaling_study(
            &gs.state,
            &kernel,
            &[(50, 40), (100, 100), (200, 250)],
            120,
            13,
            1,
        );
        assert_eq!(study.points.len(), 3);
        assert!(study.slope < -0.2, "slope {}", study.slope);
        let _ = h;
    }

    #[test]
    fn degradation_study_reports_all_points() {
        let (_, h, kernel) = setup(0.1, 0.1);
        let superfluid = ground_state(&h).unwrap();
        let params = BoseHubbardParams::with_interaction_ratio(3, 3, 10.0);
        let basis = FockBasis::enumerate(3, 3).unwrap();
        let mott_h = HamiltonianOperator::build(&params, &basis).unwrap();
        let mott = ground_state(&mott_h).unwrap();

        let points = [
            StudyPoint { dt: 0.0, event_count: 80, run_count: 30 },
            StudyPoint { dt: 0.01, event_count: 80, run_count: 30 },
        ];
        let results = evolution_degradation_study(
            &superfluid.state,
            &mott.state,
            &h,
            &kernel,
            &points,
            60,
            17,
            1,
        )
        .unwrap();
        assert_eq!(results.len(), 2);
        for point in &results {
            assert!(point.d_between >= 0.0);
            assert!(point.d_fidelity_a() >= 0.0);
            assert!(point.d_fidelity_b() >= 0.0);
        }
    }
}

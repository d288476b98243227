//! A single quantum-jump trajectory: sample the detection outcome, apply
//! the matching projection, normalize, evolve, repeat.
//!
//! One pseudo-random draw per event decides both whether the probe scatters
//! and, if it does, into which direction: the unit interval is split into
//! the non-scattering mass followed by the scattering CDF over the angular
//! quadrature grid, inverted with linear interpolation inside a grid cell.
//!
//! The generator is ChaCha8 seeded from a 64-bit value, so a trajectory is a
//! pure function of `(initial state, Hamiltonian, kernel, config)` on every
//! platform. Ensemble runs derive per-run seeds with [`derive_run_seed`].

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::hamiltonian::{HamiltonianError, ManyBodyState, Propagator};
use crate::scattering::{ScatteringError, ScatteringKernel};

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryConfig {
    /// Number of detection events `m`.
    pub event_count: usize,
    /// Free-evolution time between events, in units of `hbar / J`.
    pub dt: f64,
    pub rng_seed: u64,
    /// Store `|psi_u|^2` every this many events; 0 disables snapshots.
    pub snapshot_stride: usize,
}

impl TrajectoryConfig {
    pub fn validate(&self) -> Result<(), JumpError> {
        if self.event_count == 0 {
            return Err(JumpError::at(0, JumpErrorKind::InvalidConfig("event_count must be >= 1")));
        }
        if !(self.dt >= 0.0) {
            return Err(JumpError::at(0, JumpErrorKind::InvalidConfig("dt must be non-negative")));
        }
        Ok(())
    }
}

/// Outcome of one detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    Scatter { theta: f64 },
    NonScatter,
}

impl EventKind {
    pub fn is_scatter(&self) -> bool {
        matches!(self, EventKind::Scatter { .. })
    }

    /// Angle for plotting; non-scattering detections sit at zero.
    pub fn plot_angle(&self) -> f64 {
        match self {
            EventKind::Scatter { theta } => *theta,
            EventKind::NonScatter => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    /// 1-based event index.
    pub index: usize,
    /// `index * dt`.
    pub time: f64,
    pub kind: EventKind,
}

/// `|psi_u|^2` after a given event.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub event_index: usize,
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub events: Vec<EventRecord>,
    /// `|<initial|state>|^2` after each event's projection.
    pub overlaps: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    /// State after the final projection (no trailing evolution).
    pub final_state: ManyBodyState,
    /// Per-class probability mass of the final state.
    pub final_class_weights: Vec<f64>,
    pub seed: u64,
    pub scatter_count: u64,
    pub nonscatter_count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum JumpErrorKind {
    InvalidConfig(&'static str),
    Scattering(ScatteringError),
    Propagation(HamiltonianError),
}

/// Failure during a trajectory, tagged with the 1-based event index.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpError {
    pub event_index: usize,
    pub kind: JumpErrorKind,
}

impl JumpError {
    fn at(event_index: usize, kind: JumpErrorKind) -> Self {
        Self { event_index, kind }
    }
}

impl fmt::Display for JumpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            JumpErrorKind::InvalidConfig(reason) => write!(f, "invalid trajectory config: {reason}"),
            JumpErrorKind::Scattering(e) => write!(f, "event {}: {e}", self.event_index),
            JumpErrorKind::Propagation(e) => write!(f, "event {}: {e}", self.event_index),
        }
    }
}

impl core::error::Error for JumpError {}

/// SplitMix64 finalizer over `master xor golden-ratio stride`; the standard
/// way to spawn decorrelated per-run seeds from one master seed.
pub fn derive_run_seed(master_seed: u64, run_index: u64) -> u64 {
    let mut z = master_seed
        ^ run_index.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The trajectory generator: platform-stable, seedable, counter-based.
pub fn trajectory_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw in `[0, 1)` from the top 53 bits.
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draw the next detection outcome for a normalized state.
pub fn sample_event(
    state: &ManyBodyState,
    kernel: &ScatteringKernel,
    rng: &mut ChaCha8Rng,
) -> Result<EventKind, ScatteringError> {
    if state.dim() != kernel.dim() {
        return Err(ScatteringError::DimensionMismatch { expected: kernel.dim(), got: state.dim() });
    }
    let mut weights = vec![0.0; kernel.class_count()];
    let mut masses = Vec::new();
    Ok(sample_event_with(state, kernel, rng, &mut weights, &mut masses))
}

fn sample_event_with(
    state: &ManyBodyState,
    kernel: &ScatteringKernel,
    rng: &mut ChaCha8Rng,
    weights: &mut [f64],
    masses: &mut Vec<f64>,
) -> EventKind {
    kernel.accumulate_class_weights(state, weights);
    let nonscatter: f64 = weights
        .iter()
        .enumerate()
        .map(|(c, w)| w * kernel.class_nonscatter_amplitude(c).powi(2))
        .sum();

    let draw = uniform(rng);
    if draw < nonscatter {
        return EventKind::NonScatter;
    }

    let total = kernel.scatter_masses(weights, masses);
    if total <= 0.0 {
        // reachable only when 1 - P_ns underflows; the probe passed through
        return EventKind::NonScatter;
    }
    // map the remaining uniform mass onto the scattering CDF
    let mut target = (draw - nonscatter) / (1.0 - nonscatter) * total;
    if !(target >= 0.0) {
        target = 0.0;
    }

    let mut acc = 0.0;
    let mut cell = masses.len() - 1;
    for (i, &mass) in masses.iter().enumerate() {
        if acc + mass > target {
            cell = i;
            break;
        }
        acc += mass;
    }
    let grid = kernel.grid();
    let mass = masses[cell];
    let fraction = if mass > 0.0 { ((target - acc) / mass).clamp(0.0, 1.0) } else { 0.5 };
    let theta = grid.cell_start(cell) + fraction * grid.step();
    EventKind::Scatter { theta }
}

/// Driver for one trajectory; owns the state, the generator and the scratch
/// buffers, and shares the immutable kernel and propagator.
pub struct JumpProcess<'a> {
    kernel: &'a ScatteringKernel,
    propagator: &'a Propagator,
    state: ManyBodyState,
    rng: ChaCha8Rng,
    events_done: usize,
    weights: Vec<f64>,
    masses: Vec<f64>,
}

impl<'a> JumpProcess<'a> {
    pub fn new(
        initial: &ManyBodyState,
        propagator: &'a Propagator,
        kernel: &'a ScatteringKernel,
        seed: u64,
    ) -> Result<Self, JumpError> {
        if initial.dim() != kernel.dim() {
            return Err(JumpError::at(
                0,
                JumpErrorKind::Scattering(ScatteringError::DimensionMismatch {
                    expected: kernel.dim(),
                    got: initial.dim(),
                }),
            ));
        }
        let mut state = initial.clone();
        state.normalize();
        Ok(Self {
            kernel,
            propagator,
            state,
            rng: trajectory_rng(seed),
            events_done: 0,
            weights: vec![0.0; kernel.class_count()],
            masses: Vec::new(),
        })
    }

    pub fn state(&self) -> &ManyBodyState {
        &self.state
    }

    pub fn into_state(self) -> ManyBodyState {
        self.state
    }

    pub fn events_done(&self) -> usize {
        self.events_done
    }

    /// Run one detection cycle and return its outcome. Free evolution is
    /// applied before the sample on every cycle but the first, so the first
    /// detection always probes the prepared state.
    pub fn step(&mut self) -> Result<EventKind, JumpError> {
        let index = self.events_done + 1;
        if self.events_done > 0 {
            self.propagator
                .apply_in_place(&mut self.state)
                .map_err(|e| JumpError::at(index, JumpErrorKind::Propagation(e)))?;
        }

        let kind = sample_event_with(
            &self.state,
            self.kernel,
            &mut self.rng,
            &mut self.weights,
            &mut self.masses,
        );
        let projection = match kind {
            EventKind::Scatter { theta } => {
                self.kernel.project_scatter_in_place(&mut self.state, theta)
            }
            EventKind::NonScatter => self.kernel.project_nonscatter_in_place(&mut self.state),
        };
        projection.map_err(|e| JumpError::at(index, JumpErrorKind::Scattering(e)))?;

        self.events_done = index;
        Ok(kind)
    }
}

/// Run a full trajectory, recording every event, the overlap trace with the
/// initial state, and optional coefficient snapshots.
pub fn run_trajectory(
    initial: &ManyBodyState,
    propagator: &Propagator,
    kernel: &ScatteringKernel,
    config: &TrajectoryConfig,
) -> Result<Trajectory, JumpError> {
    config.validate()?;
    let mut process = JumpProcess::new(initial, propagator, kernel, config.rng_seed)?;
    let reference = process.state().clone();

    let m = config.event_count;
    let mut events = Vec::with_capacity(m);
    let mut overlaps = Vec::with_capacity(m);
    let mut snapshots = Vec::new();
    let mut scatter_count = 0u64;
    let mut nonscatter_count = 0u64;

    if config.snapshot_stride > 0 {
        snapshots.push(Snapshot { event_index: 0, probabilities: reference.probabilities() });
    }

    for index in 1..=m {
        let kind = process.step()?;
        match kind {
            EventKind::Scatter { .. } => scatter_count += 1,
            EventKind::NonScatter => nonscatter_count += 1,
        }
        events.push(EventRecord { index, time: index as f64 * config.dt, kind });
        overlaps.push(reference.overlap(process.state()).norm_sqr());
        if config.snapshot_stride > 0 && index % config.snapshot_stride == 0 {
            snapshots
                .push(Snapshot { event_index: index, probabilities: process.state().probabilities() });
        }
    }

    let final_state = process.into_state();
    let final_class_weights = kernel.class_weights(&final_state);
    Ok(Trajectory {
        events,
        overlaps,
        snapshots,
        final_state,
        final_class_weights,
        seed: config.rng_seed,
        scatter_count,
        nonscatter_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{equivalence_classes, FockBasis, OccupationVector};
    use crate::hamiltonian::{BoseHubbardParams, HamiltonianOperator};
    use crate::scattering::ScatteringConfig;
    use crate::stats;

    fn setup(
        m: usize,
        n: u32,
        interaction: f64,
        scattering: &ScatteringConfig,
    ) -> (FockBasis, HamiltonianOperator, ScatteringKernel) {
        let basis = FockBasis::enumerate(m, n).unwrap();
        let classes = equivalence_classes(&basis);
        let kernel = ScatteringKernel::build(&basis, &classes, scattering).unwrap();
        let params = BoseHubbardParams::with_interaction_ratio(m, n, interaction);
        let h = HamiltonianOperator::build(&params, &basis).unwrap();
        (basis, h, kernel)
    }

    #[test]
    fn switched_off_probe_only_reports_nonscatter() {
        let config = ScatteringConfig { coupling: 0.0, ..Default::default() };
        let (basis, _, kernel) = setup(3, 3, 0.1, &config);
        let state = ManyBodyState::fock(basis.len(), 3);
        let mut rng = trajectory_rng(7);
        for _ in 0..200 {
            assert_eq!(sample_event(&state, &kernel, &mut rng).unwrap(), EventKind::NonScatter);
        }
    }

    #[test]
    fn stacked_state_scatters_uniformly_with_the_right_rate() {
        // |3 0 0>: flat pattern, scatter probability exactly 9 g^2 = 0.09
        let (basis, _, kernel) = setup(3, 3, 0.1, &ScatteringConfig::default());
        let u = basis.index_of(&OccupationVector::new(vec![3, 0, 0])).unwrap();
        let state = ManyBodyState::fock(basis.len(), u);
        let mut rng = trajectory_rng(20260809);

        let draws = 100_000;
        let bins = 600;
        let mut histogram = vec![0u64; bins];
        let mut scattered = 0u64;
        for _ in 0..draws {
            if let EventKind::Scatter { theta } = sample_event(&state, &kernel, &mut rng).unwrap() {
                scattered += 1;
                let b = (((theta + core::f64::consts::PI) / (2.0 * core::f64::consts::PI))
                    * bins as f64) as usize;
                histogram[b.min(bins - 1)] += 1;
            }
        }
        let rate = scattered as f64 / draws as f64;
        assert!((rate - 0.09).abs() < 0.004, "scatter rate {rate}");

        // chi-square against the uniform distribution over the bins
        let probs = alloc::vec![1.0 / bins as f64; bins];
        let gof = stats::chi_square_gof(&histogram, &probs, 10);
        assert!(gof.p_value > 0.001, "p = {}", gof.p_value);
    }

    #[test]
    fn same_seed_reproduces_the_event_sequence() {
        let (_, h, kernel) = setup(3, 3, 0.05, &ScatteringConfig::default());
        let gs = crate::hamiltonian::ground_state(&h).unwrap();
        let propagator = Propagator::new(&h, 0.01).unwrap();
        let config =
            TrajectoryConfig { event_count: 300, dt: 0.01, rng_seed: 99, snapshot_stride: 0 };
        let one = run_trajectory(&gs.state, &propagator, &kernel, &config).unwrap();
        let two = run_trajectory(&gs.state, &propagator, &kernel, &config).unwrap();
        assert_eq!(one.events, two.events);
        assert_eq!(one.final_state, two.final_state);
    }

    #[test]
    fn fock_initial_state_is_a_fixed_point_without_evolution() {
        let (basis, h, kernel) = setup(3, 3, 0.05, &ScatteringConfig::default());
        let u = basis.index_of(&OccupationVector::new(vec![1, 1, 1])).unwrap();
        let state = ManyBodyState::fock(basis.len(), u);
        let propagator = Propagator::new(&h, 0.0).unwrap();
        let config = TrajectoryConfig { event_count: 1000, dt: 0.0, rng_seed: 5, snapshot_stride: 0 };
        let trajectory = run_trajectory(&state, &propagator, &kernel, &config).unwrap();
        for overlap in &trajectory.overlaps {
            assert!((overlap - 1.0).abs() < 1e-10);
        }
        assert_eq!(trajectory.scatter_count + trajectory.nonscatter_count, 1000);
    }

    #[test]
    fn support_never_leaves_the_initial_class_without_evolution() {
        let (basis, h, kernel) = setup(3, 3, 0.05, &ScatteringConfig::default());
        let i = basis.index_of(&OccupationVector::new(vec![2, 0, 1])).unwrap();
        let j = basis.index_of(&OccupationVector::new(vec![1, 0, 2])).unwrap();
        let mut amps = alloc::vec![num_complex::Complex64::new(0.0, 0.0); basis.len()];
        amps[i] = num_complex::Complex64::new(0.6, 0.0);
        amps[j] = num_complex::Complex64::new(0.0, 0.8);
        let state = ManyBodyState::new(amps).unwrap();

        let propagator = Propagator::new(&h, 0.0).unwrap();
        let config = TrajectoryConfig { event_count: 500, dt: 0.0, rng_seed: 3, snapshot_stride: 0 };
        let trajectory = run_trajectory(&state, &propagator, &kernel, &config).unwrap();

        let class = kernel.class_of(i);
        let weights = &trajectory.final_class_weights;
        assert!((weights[class] - 1.0).abs() < 1e-9, "class weights {weights:?}");
        // moduli within the class are preserved by every projection
        let wi = trajectory.final_state.amplitudes()[i].norm();
        let wj = trajectory.final_state.amplitudes()[j].norm();
        assert!((wi - 0.6).abs() < 1e-9);
        assert!((wj - 0.8).abs() < 1e-9);
    }

    #[test]
    fn norm_stays_unit_along_a_trajectory_with_evolution() {
        let (_, h, kernel) = setup(3, 3, 0.05, &ScatteringConfig::default());
        let gs = crate::hamiltonian::ground_state(&h).unwrap();
        let propagator = Propagator::new(&h, 0.01).unwrap();
        let mut process = JumpProcess::new(&gs.state, &propagator, &kernel, 17).unwrap();
        for _ in 0..500 {
            process.step().unwrap();
            assert!((process.state().norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn trajectories_settle_into_one_class_without_evolution() {
        let (_, h, kernel) = setup(3, 3, 0.05, &ScatteringConfig::default());
        let gs = crate::hamiltonian::ground_state(&h).unwrap();
        let propagator = Propagator::new(&h, 0.0).unwrap();

        let runs = 60;
        let mut settled = 0;
        for run in 0..runs {
            let config = TrajectoryConfig {
                event_count: 1000,
                dt: 0.0,
                rng_seed: derive_run_seed(41, run),
                snapshot_stride: 0,
            };
            let trajectory = run_trajectory(&gs.state, &propagator, &kernel, &config).unwrap();
            let max = trajectory.final_class_weights.iter().fold(0.0f64, |a, &b| a.max(b));
            if max > 0.99 {
                settled += 1;
            }
        }
        assert!(settled * 10 >= runs * 9, "only {settled}/{runs} runs settled");
    }

    #[test]
    fn overlap_jumps_at_scatter_events_and_drifts_under_nonscatter() {
        let (_, h, kernel) = setup(3, 3, 0.05, &ScatteringConfig::default());
        let gs = crate::hamiltonian::ground_state(&h).unwrap();
        let propagator = Propagator::new(&h, 0.0).unwrap();
        let config = TrajectoryConfig { event_count: 1000, dt: 0.0, rng_seed: 11, snapshot_stride: 0 };
        let trajectory = run_trajectory(&gs.state, &propagator, &kernel, &config).unwrap();

        let mut scatter_changes = Vec::new();
        let mut nonscatter_changes = Vec::new();
        let mut previous = 1.0;
        for (event, &overlap) in trajectory.events.iter().zip(&trajectory.overlaps) {
            let change = (overlap - previous).abs();
            if event.kind.is_scatter() {
                scatter_changes.push(change);
            } else {
                nonscatter_changes.push(change);
            }
            previous = overlap;
        }
        assert!(!scatter_changes.is_empty());
        let mean_scatter: f64 = scatter_changes.iter().sum::<f64>() / scatter_changes.len() as f64;
        nonscatter_changes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median_nonscatter = nonscatter_changes[nonscatter_changes.len() / 2];
        assert!(
            mean_scatter > median_nonscatter,
            "scatter changes {mean_scatter} vs nonscatter median {median_nonscatter}"
        );
    }

    #[test]
    fn snapshots_follow_the_stride() {
        let (basis, h, kernel) = setup(3, 3, 0.05, &ScatteringConfig::default());
        let state = ManyBodyState::fock(basis.len(), 0);
        let propagator = Propagator::new(&h, 0.0).unwrap();
        let config = TrajectoryConfig { event_count: 10, dt: 0.0, rng_seed: 1, snapshot_stride: 4 };
        let trajectory = run_trajectory(&state, &propagator, &kernel, &config).unwrap();
        let indices: Vec<usize> = trajectory.snapshots.iter().map(|s| s.event_index).collect();
        assert_eq!(indices, alloc::vec![0, 4, 8]);

        let none = TrajectoryConfig { snapshot_stride: 0, ..config };
        let trajectory = run_trajectory(&state, &propagator, &kernel, &none).unwrap();
        assert!(trajectory.snapshots.is_empty());
    }

    #[test]
    fn seed_derivation_spreads_nearby_inputs() {
        let a = derive_run_seed(1, 2);
        let b = derive_run_seed(1, 3);
        let c = derive_run_seed(2, 2);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(b, c);
        // reproducible across calls
        assert_eq!(a, derive_run_seed(1, 2));
    }

    #[test]
    fn single_event_trajectory() {
        let (basis, h, kernel) = setup(3, 3, 0.05, &ScatteringConfig::default());
        let state = ManyBodyState::fock(basis.len(), 4);
        let propagator = Propagator::new(&h, 0.0).unwrap();
        let config = TrajectoryConfig { event_count: 1, dt: 0.0, rng_seed: 2, snapshot_stride: 0 };
        let trajectory = run_trajectory(&state, &propagator, &kernel, &config).unwrap();
        assert_eq!(trajectory.events.len(), 1);
        assert_eq!(trajectory.events[0].index, 1);
    }

    #[test]
    fn zero_event_count_is_rejected() {
        let config = TrajectoryConfig { event_count: 0, dt: 0.0, rng_seed: 0, snapshot_stride: 0 };
        assert!(config.validate().is_err());
    }
}

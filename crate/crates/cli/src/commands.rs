//! The experiment subcommands: each builds the simulation objects, runs the
//! requested computation, and writes CSV/JSON/SVG outputs.

use backaction_core::ensemble::{
    self, compare_with_prediction, end_state_statistics, predicted_initial_distribution,
    run_ensemble, AngularHistogram, DistributionComparison, EnsembleConfig, StudyPoint,
};
use backaction_core::hamiltonian::{dense_spectrum, ground_state, Propagator, DENSE_LIMIT};
use backaction_core::jump::{run_trajectory, EventKind, TrajectoryConfig};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::experiment::{self, numerical};
use crate::output::{csv_field, OutputDir};
use crate::svg::{Plot, Series, PALETTE};
use crate::CliError;

/// Enumerate the basis, group it into scattering-equivalence classes, and
/// export the class table.
pub fn classes(config: &ExperimentConfig) -> Result<(), CliError> {
    let experiment = experiment::build(config)?;
    let out = OutputDir::prepare(config, "classes")?;

    if config.wants("csv") {
        let rows: Vec<String> = experiment
            .classes
            .classes()
            .iter()
            .enumerate()
            .map(|(id, class)| {
                let members: Vec<String> =
                    class.members.iter().map(|&u| experiment.basis.state(u).to_string()).collect();
                format!(
                    "{id},{},{},{}",
                    csv_field(&class.signature.to_string()),
                    class.members.len(),
                    csv_field(&members.join(" "))
                )
            })
            .collect();
        out.write_csv("classes.csv", "class_id,signature,member_count,members", &rows)?;

        let rows: Vec<String> = (0..experiment.classes.len())
            .map(|id| {
                format!(
                    "{id},{},{}",
                    experiment.kernel.class_nonscatter_amplitude(id),
                    experiment.kernel.class_scatter_integral(id)
                )
            })
            .collect();
        out.write_csv("kernel.csv", "class_id,nonscatter_amplitude,scatter_integral", &rows)?;
    }

    if config.wants("json") {
        #[derive(Serialize)]
        struct Report<'a> {
            config: &'a ExperimentConfig,
            basis_dimension: usize,
            class_count: usize,
        }
        out.write_json(
            "classes.json",
            &Report {
                config,
                basis_dimension: experiment.basis.len(),
                class_count: experiment.classes.len(),
            },
        )?;
    }

    println!(
        "classes: M={} N={} basis={} classes={}",
        config.physics.sites,
        config.physics.atoms,
        experiment.basis.len(),
        experiment.classes.len()
    );
    Ok(())
}

/// Solve the configured ground state and export amplitudes, the predicted
/// angular distribution, and (on the dense path) the full spectrum.
pub fn ground_state_cmd(config: &ExperimentConfig) -> Result<(), CliError> {
    let experiment = experiment::build(config)?;
    let solved = ground_state(&experiment.hamiltonian).map_err(numerical)?;
    let out = OutputDir::prepare(config, "ground-state")?;

    let bins = config.ensemble.bins;
    let prediction = predicted_initial_distribution(&solved.state, &experiment.kernel, bins);
    let class_weights = experiment.kernel.class_weights(&solved.state);

    if config.wants("csv") {
        let rows: Vec<String> = solved
            .state
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(u, amp)| {
                format!("{u},{},{},{}", csv_field(&experiment.basis.state(u).to_string()), amp.re, amp.im)
            })
            .collect();
        out.write_csv("ground_state.csv", "basis_index,occupation,re,im", &rows)?;

        let width = 2.0 * std::f64::consts::PI / bins as f64;
        let rows: Vec<String> = prediction
            .iter()
            .enumerate()
            .map(|(b, p)| format!("{b},{},{p}", -std::f64::consts::PI + (b as f64 + 0.5) * width))
            .collect();
        out.write_csv("predicted_curve.csv", "bin_index,theta,density", &rows)?;

        if experiment.hamiltonian.dim() <= DENSE_LIMIT {
            let spectrum = dense_spectrum(&experiment.hamiltonian);
            let rows: Vec<String> =
                spectrum.values.iter().enumerate().map(|(k, e)| format!("{k},{e}")).collect();
            out.write_csv("spectrum.csv", "level,energy", &rows)?;
        }
    }

    if config.wants("json") {
        #[derive(Serialize)]
        struct Report<'a> {
            config: &'a ExperimentConfig,
            energy: f64,
            residual: f64,
            gap: Option<f64>,
            degenerate: bool,
            class_weights: &'a [f64],
            total_scatter_probability: f64,
        }
        out.write_json(
            "ground_state.json",
            &Report {
                config,
                energy: solved.energy,
                residual: solved.residual,
                gap: solved.gap,
                degenerate: solved.is_degenerate(),
                class_weights: &class_weights,
                total_scatter_probability: experiment
                    .kernel
                    .total_scatter_probability(&solved.state),
            },
        )?;
    }

    if config.wants("svg") {
        let width = 2.0 * std::f64::consts::PI / bins as f64;
        let data: Vec<(f64, f64)> = prediction
            .iter()
            .enumerate()
            .map(|(b, &p)| (-std::f64::consts::PI + (b as f64 + 0.5) * width, p))
            .collect();
        let plot = Plot {
            title: format!(
                "Predicted detection density, U/J={} M={} N={}",
                config.physics.interaction, config.physics.sites, config.physics.atoms
            ),
            x_label: "theta (rad)".into(),
            y_label: "P(theta)".into(),
            series: vec![Series::Line { label: "prediction".into(), color: PALETTE[0], data }],
        };
        out.write_svg("predicted_curve.svg", &plot.render())?;
    }

    if solved.is_degenerate() {
        eprintln!("warning: ground state degenerate within 1e-12; phase convention may be arbitrary");
    }
    println!(
        "ground-state: energy={} residual={:.3e} dominant_class_weight={:.6}",
        solved.energy,
        solved.residual,
        class_weights.iter().cloned().fold(0.0f64, f64::max)
    );
    Ok(())
}

/// Run one quantum-jump trajectory and export events, overlaps, snapshots,
/// and the three diagnostic panels.
pub fn trajectory_cmd(config: &ExperimentConfig) -> Result<(), CliError> {
    let experiment = experiment::build(config)?;
    let initial = experiment::initial_state(config, &experiment)?;
    let propagator =
        Propagator::new(&experiment.hamiltonian, config.trajectory.dt).map_err(numerical)?;

    let trajectory_config = TrajectoryConfig {
        event_count: config.trajectory.events,
        dt: config.trajectory.dt,
        rng_seed: config.trajectory.seed,
        snapshot_stride: config.trajectory.snapshot_stride,
    };
    let trajectory =
        run_trajectory(&initial.state, &propagator, &experiment.kernel, &trajectory_config)
            .map_err(|e| CliError::Numerical(e.to_string()))?;

    let out = OutputDir::prepare(config, "trajectory")?;

    if config.wants("csv") {
        let rows: Vec<String> = trajectory
            .events
            .iter()
            .map(|event| match event.kind {
                EventKind::Scatter { theta } => {
                    format!("{},{},scatter,{theta}", event.index, event.time)
                }
                EventKind::NonScatter => format!("{},{},nonscatter,", event.index, event.time),
            })
            .collect();
        out.write_csv("events.csv", "index,time,kind,theta", &rows)?;

        let rows: Vec<String> = trajectory
            .overlaps
            .iter()
            .enumerate()
            .map(|(i, overlap)| format!("{},{overlap}", i + 1))
            .collect();
        out.write_csv("overlaps.csv", "index,overlap", &rows)?;

        if !trajectory.snapshots.is_empty() {
            let mut rows = Vec::new();
            for snapshot in &trajectory.snapshots {
                for (u, p) in snapshot.probabilities.iter().enumerate() {
                    rows.push(format!("{},{u},{p}", snapshot.event_index));
                }
            }
            out.write_csv("snapshots.csv", "event_index,basis_index,probability", &rows)?;
        }
    }

    if config.wants("json") {
        #[derive(Serialize)]
        struct Report<'a> {
            config: &'a ExperimentConfig,
            initial_state: String,
            scatter_count: u64,
            nonscatter_count: u64,
            final_class_weights: &'a [f64],
        }
        out.write_json(
            "trajectory.json",
            &Report {
                config,
                initial_state: initial.describe(),
                scatter_count: trajectory.scatter_count,
                nonscatter_count: trajectory.nonscatter_count,
                final_class_weights: &trajectory.final_class_weights,
            },
        )?;
    }

    if config.wants("svg") {
        let events: Vec<(f64, f64)> = trajectory
            .events
            .iter()
            .map(|event| (event.index as f64, event.kind.plot_angle()))
            .collect();
        out.write_svg(
            "trajectory_events.svg",
            &Plot {
                title: "Detected events (non-scattering at theta = 0)".into(),
                x_label: "event index".into(),
                y_label: "theta (rad)".into(),
                series: vec![Series::Points { label: String::new(), color: PALETTE[0], data: events }],
            }
            .render(),
        )?;

        let overlaps: Vec<(f64, f64)> = trajectory
            .overlaps
            .iter()
            .enumerate()
            .map(|(i, &overlap)| ((i + 1) as f64, overlap))
            .collect();
        out.write_svg(
            "trajectory_overlap.svg",
            &Plot {
                title: "Overlap with the initial state".into(),
                x_label: "event index".into(),
                y_label: "|<initial|state>|^2".into(),
                series: vec![Series::Line { label: String::new(), color: PALETTE[1], data: overlaps }],
            }
            .render(),
        )?;

        if !trajectory.snapshots.is_empty() {
            // the states that matter most anywhere along the run
            let dim = experiment.basis.len();
            let mut peak: Vec<(usize, f64)> = (0..dim)
                .map(|u| {
                    let max = trajectory
                        .snapshots
                        .iter()
                        .map(|s| s.probabilities[u])
                        .fold(0.0f64, f64::max);
                    (u, max)
                })
                .collect();
            peak.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
            let shown: Vec<usize> = peak.iter().take(PALETTE.len()).map(|&(u, _)| u).collect();

            let series: Vec<Series> = shown
                .iter()
                .enumerate()
                .map(|(slot, &u)| Series::Line {
                    label: experiment.basis.state(u).to_string(),
                    color: PALETTE[slot % PALETTE.len()],
                    data: trajectory
                        .snapshots
                        .iter()
                        .map(|s| (s.event_index as f64, s.probabilities[u]))
                        .collect(),
                })
                .collect();
            out.write_svg(
                "trajectory_coefficients.svg",
                &Plot {
                    title: "Basis-state weights along the trajectory".into(),
                    x_label: "event index".into(),
                    y_label: "|psi_u|^2".into(),
                    series,
                }
                .render(),
            )?;
        }
    }

    println!(
        "trajectory: events={} scatter={} nonscatter={} ({})",
        config.trajectory.events,
        trajectory.scatter_count,
        trajectory.nonscatter_count,
        initial.describe()
    );
    Ok(())
}

fn ensemble_config(config: &ExperimentConfig) -> EnsembleConfig {
    EnsembleConfig {
        run_count: config.ensemble.runs,
        event_count: config.trajectory.events,
        dt: config.trajectory.dt,
        bin_count: config.ensemble.bins,
        master_seed: config.ensemble.master_seed,
        worker_count: config.effective_workers(),
    }
}

fn overlay_series(
    histogram: &AngularHistogram,
    comparison: &DistributionComparison,
    label: &str,
    color_points: &'static str,
    color_line: &'static str,
) -> Vec<Series> {
    let scatter_total = histogram.scatter_total() as f64;
    let points: Vec<(f64, f64)> = histogram
        .counts()
        .iter()
        .enumerate()
        .map(|(b, &count)| (histogram.bin_center(b), count as f64))
        .collect();
    let line: Vec<(f64, f64)> = comparison
        .predicted
        .iter()
        .enumerate()
        .map(|(b, &p)| (histogram.bin_center(b), p * scatter_total))
        .collect();
    vec![
        Series::Points { label: format!("{label} counts"), color: color_points, data: points },
        Series::Line { label: format!("{label} prediction"), color: color_line, data: line },
    ]
}

/// Run the full ensemble, compare the summed histogram against the
/// initial-state prediction, and export everything.
pub fn ensemble_cmd(config: &ExperimentConfig) -> Result<(), CliError> {
    let experiment = experiment::build(config)?;
    let initial = experiment::initial_state(config, &experiment)?;
    let propagator =
        Propagator::new(&experiment.hamiltonian, config.trajectory.dt).map_err(numerical)?;

    let result = run_ensemble(&initial.state, &propagator, &experiment.kernel, &ensemble_config(config));
    let prediction =
        predicted_initial_distribution(&initial.state, &experiment.kernel, config.ensemble.bins);
    let comparison = compare_with_prediction(&result.histogram, &prediction);
    let predicted_weights = experiment.kernel.class_weights(&initial.state);
    let end_states = (config.trajectory.dt == 0.0)
        .then(|| end_state_statistics(&result.runs, &predicted_weights));

    let out = OutputDir::prepare(config, "ensemble")?;

    if config.wants("csv") {
        let rows: Vec<String> = result
            .histogram
            .counts()
            .iter()
            .enumerate()
            .map(|(b, count)| format!("{b},{},{count}", result.histogram.bin_center(b)))
            .collect();
        out.write_csv("histogram.csv", "bin_index,theta,count", &rows)?;

        let scatter_total = result.histogram.scatter_total() as f64;
        let rows: Vec<String> = (0..config.ensemble.bins)
            .map(|b| {
                format!(
                    "{b},{},{},{},{}",
                    result.histogram.bin_center(b),
                    prediction[b],
                    comparison.predicted[b],
                    comparison.predicted[b] * scatter_total
                )
            })
            .collect();
        out.write_csv(
            "prediction.csv",
            "bin_index,theta,density,conditional_probability,expected_count",
            &rows,
        )?;

        let rows: Vec<String> = (0..config.ensemble.bins)
            .map(|b| {
                format!(
                    "{b},{},{},{},{}",
                    result.histogram.bin_center(b),
                    comparison.empirical[b],
                    comparison.predicted[b],
                    comparison.z_scores[b]
                )
            })
            .collect();
        out.write_csv(
            "comparison.csv",
            "bin_index,theta,empirical_probability,predicted_probability,z_score",
            &rows,
        )?;

        let rows: Vec<String> = result
            .runs
            .iter()
            .map(|run| {
                format!(
                    "{},{},{},{},{},{}",
                    run.run_index,
                    run.seed,
                    run.scatter_count,
                    run.nonscatter_count,
                    run.dominant_class,
                    run.dominant_weight
                )
            })
            .collect();
        out.write_csv(
            "runs.csv",
            "run_index,seed,scatter_count,nonscatter_count,dominant_class,dominant_weight",
            &rows,
        )?;

        if let Some(stats) = &end_states {
            let rows: Vec<String> = stats
                .per_class
                .iter()
                .map(|entry| {
                    format!(
                        "{},{},{},{},{},{}",
                        entry.class_id,
                        entry.predicted_weight,
                        entry.observed_runs,
                        entry.frequency,
                        entry.sigma,
                        entry.z
                    )
                })
                .collect();
            out.write_csv(
                "end_states.csv",
                "class_id,predicted_weight,observed_runs,frequency,sigma,z",
                &rows,
            )?;
        }
    }

    if config.wants("json") {
        #[derive(Serialize)]
        struct EndStateEntry {
            class_id: usize,
            predicted_weight: f64,
            observed_runs: u64,
            frequency: f64,
            sigma: f64,
            z: f64,
        }
        #[derive(Serialize)]
        struct Report<'a> {
            config: &'a ExperimentConfig,
            initial_state: String,
            completed_runs: usize,
            failed_runs: usize,
            scatter_total: u64,
            nonscatter_total: u64,
            scatter_fraction: f64,
            l1_error: f64,
            l2_error: f64,
            max_abs_z: f64,
            unconverged_runs: Option<usize>,
            end_states: Option<Vec<EndStateEntry>>,
            failures: Vec<String>,
        }
        let report = Report {
            config,
            initial_state: initial.describe(),
            completed_runs: result.completed_runs(),
            failed_runs: result.failures.len(),
            scatter_total: result.histogram.scatter_total(),
            nonscatter_total: result.histogram.nonscatter_count(),
            scatter_fraction: result.histogram.scatter_total() as f64
                / result.histogram.total_events().max(1) as f64,
            l1_error: comparison.l1,
            l2_error: comparison.l2,
            max_abs_z: comparison.z_scores.iter().fold(0.0f64, |a, &z| a.max(z.abs())),
            unconverged_runs: end_states.as_ref().map(|s| s.unconverged_runs),
            end_states: end_states.as_ref().map(|stats| {
                stats
                    .per_class
                    .iter()
                    .map(|entry| EndStateEntry {
                        class_id: entry.class_id,
                        predicted_weight: entry.predicted_weight,
                        observed_runs: entry.observed_runs,
                        frequency: entry.frequency,
                        sigma: entry.sigma,
                        z: entry.z,
                    })
                    .collect()
            }),
            failures: result.failures.iter().map(|f| format!("run {}: {}", f.run_index, f.message)).collect(),
        };
        out.write_json("comparison.json", &report)?;
    }

    if config.wants("svg") {
        let series = overlay_series(&result.histogram, &comparison, "", PALETTE[0], PALETTE[1]);
        out.write_svg(
            "ensemble_overlay.svg",
            &Plot {
                title: format!(
                    "Summed detections vs initial-state prediction (runs={}, events={})",
                    config.ensemble.runs, config.trajectory.events
                ),
                x_label: "theta (rad)".into(),
                y_label: "detections per bin".into(),
                series,
            }
            .render(),
        )?;
    }

    println!(
        "ensemble: runs={} completed={} scatter={} nonscatter={} L1={:.4} L2={:.4}",
        config.ensemble.runs,
        result.completed_runs(),
        result.histogram.scatter_total(),
        result.histogram.nonscatter_count(),
        comparison.l1,
        comparison.l2
    );
    if let Some(stats) = &end_states {
        if stats.unconverged_runs > 0 {
            eprintln!(
                "warning: {} of {} runs did not settle (dominant class weight < 0.99)",
                stats.unconverged_runs, stats.total_runs
            );
        }
    }
    if !result.failures.is_empty() {
        for failure in &result.failures {
            eprintln!("run {} failed: {}", failure.run_index, failure.message);
        }
        return Err(CliError::PartialFailure(format!(
            "{} of {} runs failed",
            result.failures.len(),
            config.ensemble.runs
        )));
    }
    Ok(())
}

/// Reconstruction error against the total event budget `m x n`, with the
/// fitted power law.
pub fn scaling_cmd(config: &ExperimentConfig) -> Result<(), CliError> {
    if config.trajectory.dt != 0.0 {
        return Err(CliError::Config(
            "scaling-study requires trajectory.dt = 0 (frozen evolution)".into(),
        ));
    }
    let experiment = experiment::build(config)?;
    let initial = experiment::initial_state(config, &experiment)?;

    let pairs: Vec<(usize, usize)> =
        config.scaling.points.iter().map(|p| (p.events, p.runs)).collect();
    let study = ensemble::error_scaling_study(
        &initial.state,
        &experiment.kernel,
        &pairs,
        config.ensemble.bins,
        config.ensemble.master_seed,
        config.effective_workers(),
    );

    let out = OutputDir::prepare(config, "scaling-study")?;

    if config.wants("csv") {
        let rows: Vec<String> = study
            .points
            .iter()
            .map(|p| {
                format!(
                    "{},{},{},{},{},{}",
                    p.event_count, p.run_count, p.total_events, p.scatter_total, p.l1, p.l2
                )
            })
            .collect();
        out.write_csv("scaling.csv", "events,runs,total_events,scatter_total,l1,l2", &rows)?;
    }

    if config.wants("json") {
        #[derive(Serialize)]
        struct PointReport {
            events: usize,
            runs: usize,
            total_events: u64,
            scatter_total: u64,
            l1: f64,
            l2: f64,
        }
        #[derive(Serialize)]
        struct Report<'a> {
            config: &'a ExperimentConfig,
            initial_state: String,
            slope: f64,
            intercept: f64,
            points: Vec<PointReport>,
        }
        out.write_json(
            "scaling.json",
            &Report {
                config,
                initial_state: initial.describe(),
                slope: study.slope,
                intercept: study.intercept,
                points: study
                    .points
                    .iter()
                    .map(|p| PointReport {
                        events: p.event_count,
                        runs: p.run_count,
                        total_events: p.total_events,
                        scatter_total: p.scatter_total,
                        l1: p.l1,
                        l2: p.l2,
                    })
                    .collect(),
            },
        )?;
    }

    if config.wants("svg") {
        let points: Vec<(f64, f64)> = study
            .points
            .iter()
            .map(|p| ((p.total_events as f64).log10(), p.l2.log10()))
            .collect();
        let fit: Vec<(f64, f64)> = study
            .points
            .iter()
            .map(|p| {
                let x = (p.total_events as f64).ln();
                let y = study.slope * x + study.intercept;
                (x / std::f64::consts::LN_10, y / std::f64::consts::LN_10)
            })
            .collect();
        out.write_svg(
            "scaling.svg",
            &Plot {
                title: format!("Reconstruction error scaling, slope {:.3}", study.slope),
                x_label: "log10(total events)".into(),
                y_label: "log10(L2 error)".into(),
                series: vec![
                    Series::Points { label: "measured".into(), color: PALETTE[0], data: points },
                    Series::Line { label: "fit".into(), color: PALETTE[1], data: fit },
                ],
            }
            .render(),
        )?;
    }

    println!(
        "scaling-study: {} points, fitted slope {:.4}",
        study.points.len(),
        study.slope
    );
    Ok(())
}

/// Compare two ground states' reconstructions across a list of
/// inter-event evolution times.
pub fn evolution_cmd(config: &ExperimentConfig) -> Result<(), CliError> {
    let experiment = experiment::build(config)?;

    let mut states = Vec::new();
    for &interaction in &config.evolution.interactions {
        let mut adjusted = config.clone();
        adjusted.physics.interaction = interaction;
        let h = backaction_core::HamiltonianOperator::build(
            &adjusted.bose_hubbard_params(),
            &experiment.basis,
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
        let gs = ground_state(&h).map_err(numerical)?;
        states.push(gs.state);
    }

    let points: Vec<StudyPoint> = config
        .evolution
        .points
        .iter()
        .map(|p| StudyPoint { dt: p.dt, event_count: p.events, run_count: p.runs })
        .collect();

    let results = ensemble::evolution_degradation_study(
        &states[0],
        &states[1],
        &experiment.hamiltonian,
        &experiment.kernel,
        &points,
        config.ensemble.bins,
        config.ensemble.master_seed,
        config.effective_workers(),
    )
    .map_err(numerical)?;

    let out = OutputDir::prepare(config, "evolution-study")?;

    if config.wants("csv") {
        let rows: Vec<String> = results
            .iter()
            .map(|point| {
                format!(
                    "{},{},{},{},{},{}",
                    point.point.dt,
                    point.point.event_count,
                    point.point.run_count,
                    point.d_between,
                    point.d_fidelity_a(),
                    point.d_fidelity_b()
                )
            })
            .collect();
        out.write_csv("evolution.csv", "dt,events,runs,d_between,d_fidelity_a,d_fidelity_b", &rows)?;
    }

    if config.wants("json") {
        #[derive(Serialize)]
        struct PointReport {
            dt: f64,
            events: usize,
            runs: usize,
            d_between: f64,
            d_fidelity_a: f64,
            d_fidelity_b: f64,
            scatter_total_a: u64,
            scatter_total_b: u64,
        }
        #[derive(Serialize)]
        struct Report<'a> {
            config: &'a ExperimentConfig,
            interactions: [f64; 2],
            points: Vec<PointReport>,
        }
        out.write_json(
            "evolution.json",
            &Report {
                config,
                interactions: config.evolution.interactions,
                points: results
                    .iter()
                    .map(|point| PointReport {
                        dt: point.point.dt,
                        events: point.point.event_count,
                        runs: point.point.run_count,
                        d_between: point.d_between,
                        d_fidelity_a: point.d_fidelity_a(),
                        d_fidelity_b: point.d_fidelity_b(),
                        scatter_total_a: point.histogram_a.scatter_total(),
                        scatter_total_b: point.histogram_b.scatter_total(),
                    })
                    .collect(),
            },
        )?;
    }

    if config.wants("svg") {
        for (i, point) in results.iter().enumerate() {
            let mut series = overlay_series(
                &point.histogram_a,
                &point.comparison_a,
                &format!("U/J={}", config.evolution.interactions[0]),
                PALETTE[0],
                PALETTE[0],
            );
            series.extend(overlay_series(
                &point.histogram_b,
                &point.comparison_b,
                &format!("U/J={}", config.evolution.interactions[1]),
                PALETTE[1],
                PALETTE[1],
            ));
            out.write_svg(
                &format!("evolution_point_{i}.svg"),
                &Plot {
                    title: format!(
                        "dt={} events={} runs={}",
                        point.point.dt, point.point.event_count, point.point.run_count
                    ),
                    x_label: "theta (rad)".into(),
                    y_label: "detections per bin".into(),
                    series,
                }
                .render(),
            )?;
        }
    }

    for point in &results {
        println!(
            "evolution-study: dt={} D_between={:.4} D_fid_a={:.4} D_fid_b={:.4}",
            point.point.dt,
            point.d_between,
            point.d_fidelity_a(),
            point.d_fidelity_b()
        );
    }
    Ok(())
}

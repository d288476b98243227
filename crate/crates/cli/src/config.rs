//! Experiment configuration: a TOML file with `key = value` sections,
//! overridable by command-line flags. Unknown keys are rejected so a typo
//! cannot silently fall back to a default.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsSection {
    pub sites: usize,
    pub atoms: u32,
    /// Interaction-to-hopping ratio `U/J`.
    pub interaction: f64,
    pub hopping: f64,
    pub open_boundary: bool,
}

impl Default for PhysicsSection {
    fn default() -> Self {
        Self { sites: 3, atoms: 3, interaction: 0.1, hopping: 1.0, open_boundary: true }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ScatteringSection {
    pub coupling: f64,
    /// `k0 a`; defaults to pi.
    pub probe_wavenumber: f64,
    pub wannier_width: f64,
    pub quadrature_points: usize,
}

impl Default for ScatteringSection {
    fn default() -> Self {
        Self { coupling: 0.1, probe_wavenumber: PI, wannier_width: 0.0, quadrature_points: 4096 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectorySection {
    pub events: usize,
    pub dt: f64,
    pub seed: u64,
    pub snapshot_stride: usize,
}

impl Default for TrajectorySection {
    fn default() -> Self {
        Self { events: 1000, dt: 0.0, seed: 1, snapshot_stride: 0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSection {
    pub runs: usize,
    pub bins: usize,
    pub master_seed: u64,
    /// 0 means: take BACKACTION_WORKERS from the environment, else 1.
    pub workers: usize,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        Self { runs: 100, bins: 600, master_seed: 1, workers: 0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub directory: PathBuf,
    /// Any of "csv", "json", "svg".
    pub formats: Vec<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            formats: vec!["csv".into(), "json".into(), "svg".into()],
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct InitialStateSection {
    /// CSV of `basis_index, re, im` amplitudes; empty means: use the ground
    /// state of the configured Hamiltonian.
    pub amplitudes: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScalingPointSection {
    pub events: usize,
    pub runs: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingSection {
    pub points: Vec<ScalingPointSection>,
}

impl Default for ScalingSection {
    fn default() -> Self {
        Self {
            points: vec![
                ScalingPointSection { events: 100, runs: 100 },
                ScalingPointSection { events: 316, runs: 316 },
                ScalingPointSection { events: 1000, runs: 1000 },
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EvolutionPointSection {
    pub dt: f64,
    pub events: usize,
    pub runs: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionSection {
    /// The two `U/J` values whose ground states are compared.
    pub interactions: [f64; 2],
    pub points: Vec<EvolutionPointSection>,
}

impl Default for EvolutionSection {
    fn default() -> Self {
        Self {
            interactions: [0.1, 10.0],
            points: vec![
                EvolutionPointSection { dt: 0.001, events: 1000, runs: 1000 },
                EvolutionPointSection { dt: 0.01, events: 1000, runs: 1000 },
            ],
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub physics: PhysicsSection,
    pub scattering: ScatteringSection,
    pub trajectory: TrajectorySection,
    pub ensemble: EnsembleSection,
    pub output: OutputSection,
    pub initial_state: InitialStateSection,
    pub scaling: ScalingSection,
    pub evolution: EvolutionSection,
}

/// Command-line overrides; flags win over file values.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<String>>,
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let mut config = match path {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::Config(format!("cannot read config {}: {e}", path.display()))
                })?;
                toml::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => ExperimentConfig::default(),
        };
        config.apply(overrides);
        config.validate()?;
        Ok(config)
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(seed) = overrides.seed {
            self.ensemble.master_seed = seed;
            self.trajectory.seed = seed;
        }
        if let Some(workers) = overrides.workers {
            self.ensemble.workers = workers;
        }
        if let Some(out) = &overrides.out {
            self.output.directory = out.clone();
        }
        if let Some(formats) = &overrides.formats {
            self.output.formats = formats.clone();
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |reason: String| Err(CliError::Config(reason));
        if self.physics.sites == 0 || self.physics.atoms == 0 {
            return bad(format!(
                "physics: need at least one site and one atom, got sites={} atoms={}",
                self.physics.sites, self.physics.atoms
            ));
        }
        if !(self.physics.hopping > 0.0) {
            return bad("physics: hopping must be positive".into());
        }
        if !(self.physics.interaction >= 0.0) {
            return bad("physics: interaction must be non-negative".into());
        }
        self.scattering_config()
            .validate()
            .map_err(|e| CliError::Config(format!("scattering: {e}")))?;
        if self.trajectory.events == 0 {
            return bad("trajectory: events must be >= 1".into());
        }
        if !(self.trajectory.dt >= 0.0) {
            return bad("trajectory: dt must be non-negative".into());
        }
        if self.ensemble.runs == 0 {
            return bad("ensemble: runs must be >= 1".into());
        }
        if self.ensemble.bins == 0 {
            return bad("ensemble: bins must be >= 1".into());
        }
        for format in &self.output.formats {
            if !matches!(format.as_str(), "csv" | "json" | "svg") {
                return bad(format!("output: unknown format {format:?}"));
            }
        }
        if self.scaling.points.is_empty() {
            return bad("scaling: need at least one (events, runs) point".into());
        }
        for point in &self.scaling.points {
            if point.events == 0 || point.runs == 0 {
                return bad("scaling: events and runs must be >= 1".into());
            }
        }
        if self.evolution.points.is_empty() {
            return bad("evolution: need at least one study point".into());
        }
        for point in &self.evolution.points {
            if point.events == 0 || point.runs == 0 {
                return bad("evolution: events and runs must be >= 1".into());
            }
            if !(point.dt >= 0.0) {
                return bad("evolution: dt must be non-negative".into());
            }
        }
        Ok(())
    }

    pub fn scattering_config(&self) -> backaction_core::ScatteringConfig {
        backaction_core::ScatteringConfig {
            coupling: self.scattering.coupling,
            probe_wavenumber: self.scattering.probe_wavenumber,
            wannier_width: self.scattering.wannier_width,
            quadrature_points: self.scattering.quadrature_points,
        }
    }

    pub fn bose_hubbard_params(&self) -> backaction_core::BoseHubbardParams {
        backaction_core::BoseHubbardParams {
            hopping: self.physics.hopping,
            interaction: self.physics.interaction * self.physics.hopping,
            sites: self.physics.sites,
            atoms: self.physics.atoms,
            open_boundary: self.physics.open_boundary,
        }
    }

    /// Worker count after resolving 0 against `BACKACTION_WORKERS`.
    pub fn effective_workers(&self) -> usize {
        if self.ensemble.workers > 0 {
            return self.ensemble.workers;
        }
        std::env::var("BACKACTION_WORKERS")
            .ok()
            .and_then(|value| value.parse::<usize>().ok())
            .filter(|&workers| workers > 0)
            .unwrap_or(1)
    }

    /// TOML echo of the full configuration, reloadable as-is.
    pub fn echo_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Short `key=value` lines for provenance headers in data files.
    /// Execution-only settings (workers, output paths) are omitted so the
    /// data bytes depend only on what determines the numbers.
    pub fn provenance_lines(&self) -> Vec<String> {
        vec![
            format!(
                "physics: sites={} atoms={} interaction={} hopping={} open_boundary={}",
                self.physics.sites,
                self.physics.atoms,
                self.physics.interaction,
                self.physics.hopping,
                self.physics.open_boundary
            ),
            format!(
                "scattering: coupling={} probe_wavenumber={} wannier_width={} quadrature_points={}",
                self.scattering.coupling,
                self.scattering.probe_wavenumber,
                self.scattering.wannier_width,
                self.scattering.quadrature_points
            ),
            format!(
                "trajectory: events={} dt={} seed={} snapshot_stride={}",
                self.trajectory.events,
                self.trajectory.dt,
                self.trajectory.seed,
                self.trajectory.snapshot_stride
            ),
            format!(
                "ensemble: runs={} bins={} master_seed={}",
                self.ensemble.runs, self.ensemble.bins, self.ensemble.master_seed
            ),
            "units: hbar=1, energies in J, times in hbar/J".to_string(),
            "assumption: open-chain nearest-neighbour hopping unless open_boundary=false"
                .to_string(),
        ]
    }

    pub fn wants(&self, format: &str) -> bool {
        self.output.formats.iter().any(|f| f == format)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        assert!(ExperimentConfig::default().validate().is_ok());
    }

    #[test]
    fn echo_round_trips() {
        let mut config = ExperimentConfig::default();
        config.physics.sites = 9;
        config.physics.atoms = 9;
        config.scattering.coupling = 0.07;
        config.evolution.points.push(EvolutionPointSection { dt: 1.0, events: 5, runs: 1 });
        let echoed = config.echo_toml();
        let reloaded: ExperimentConfig = toml::from_str(&echoed).unwrap();
        assert_eq!(config, reloaded);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<ExperimentConfig>("[physics]\nsites = 3\nsite_count = 3\n")
            .unwrap_err();
        assert!(err.to_string().contains("site_count"));
    }

    #[test]
    fn zero_atoms_fail_validation() {
        let mut config = ExperimentConfig::default();
        config.physics.atoms = 0;
        assert!(matches!(config.validate(), Err(CliError::Config(_))));
    }

    #[test]
    fn flag_overrides_win() {
        let mut config = ExperimentConfig::default();
        config.apply(&Overrides {
            seed: Some(42),
            workers: Some(8),
            out: Some(PathBuf::from("elsewhere")),
            formats: Some(vec!["csv".into()]),
        });
        assert_eq!(config.ensemble.master_seed, 42);
        assert_eq!(config.trajectory.seed, 42);
        assert_eq!(config.ensemble.workers, 8);
        assert_eq!(config.output.directory, PathBuf::from("elsewhere"));
        assert_eq!(config.output.formats, vec!["csv".to_string()]);
    }
}

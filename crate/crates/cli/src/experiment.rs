//! Shared assembly of the simulation objects from a validated config, plus
//! loading of user-supplied initial-state amplitude files.

use std::fs;
use std::path::Path;

use backaction_core::fock::{equivalence_classes, EquivalenceClasses, FockBasis};
use backaction_core::hamiltonian::{self, ground_state, HamiltonianOperator, ManyBodyState};
use backaction_core::scattering::ScatteringKernel;
use num_complex::Complex64;

use crate::config::ExperimentConfig;
use crate::CliError;

pub struct Experiment {
    pub basis: FockBasis,
    pub classes: EquivalenceClasses,
    pub kernel: ScatteringKernel,
    pub hamiltonian: HamiltonianOperator,
}

pub fn build(config: &ExperimentConfig) -> Result<Experiment, CliError> {
    let basis = FockBasis::enumerate(config.physics.sites, config.physics.atoms)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let classes = equivalence_classes(&basis);
    let kernel = ScatteringKernel::build(&basis, &classes, &config.scattering_config())
        .map_err(|e| CliError::Config(e.to_string()))?;
    let hamiltonian = HamiltonianOperator::build(&config.bose_hubbard_params(), &basis)
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Experiment { basis, classes, kernel, hamiltonian })
}

pub enum InitialSource {
    GroundState { energy: f64, residual: f64, gap: Option<f64> },
    File { path: String },
}

pub struct InitialState {
    pub state: ManyBodyState,
    pub source: InitialSource,
}

impl InitialState {
    pub fn describe(&self) -> String {
        match &self.source {
            InitialSource::GroundState { energy, residual, gap } => {
                let mut line = format!("ground state: energy={energy} residual={residual:.3e}");
                if let Some(gap) = gap {
                    line.push_str(&format!(" gap={gap:.6e}"));
                    if *gap < 1e-12 {
                        line.push_str(" (warning: degenerate within tolerance)");
                    }
                }
                line
            }
            InitialSource::File { path } => format!("amplitudes loaded from {path}"),
        }
    }
}

/// Either the configured Hamiltonian's ground state or an amplitude CSV.
pub fn initial_state(
    config: &ExperimentConfig,
    experiment: &Experiment,
) -> Result<InitialState, CliError> {
    if let Some(path) = &config.initial_state.amplitudes {
        let state = load_amplitudes(path, experiment.basis.len())?;
        return Ok(InitialState {
            state,
            source: InitialSource::File { path: path.display().to_string() },
        });
    }
    let gs = ground_state(&experiment.hamiltonian).map_err(numerical)?;
    Ok(InitialState {
        state: gs.state,
        source: InitialSource::GroundState {
            energy: gs.energy,
            residual: gs.residual,
            gap: gs.gap,
        },
    })
}

pub fn numerical(error: hamiltonian::HamiltonianError) -> CliError {
    CliError::Numerical(error.to_string())
}

/// Amplitude CSV: rows of `basis_index, re, im`; `#` comments and a header
/// row are skipped. Unlisted indices stay zero; the state is normalized.
pub fn load_amplitudes(path: &Path, dim: usize) -> Result<ManyBodyState, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    let mut any = false;
    for (number, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 3 {
            return Err(CliError::Config(format!(
                "{}:{}: expected `basis_index, re, im`",
                path.display(),
                number + 1
            )));
        }
        let index: usize = match fields[0].parse() {
            Ok(index) => index,
            // tolerate one header row
            Err(_) if !any => continue,
            Err(e) => {
                return Err(CliError::Config(format!(
                    "{}:{}: bad basis index: {e}",
                    path.display(),
                    number + 1
                )))
            }
        };
        if index >= dim {
            return Err(CliError::Config(format!(
                "{}:{}: basis index {index} out of range (dim {dim})",
                path.display(),
                number + 1
            )));
        }
        let re: f64 = fields[1].parse().map_err(|e| {
            CliError::Config(format!("{}:{}: bad re: {e}", path.display(), number + 1))
        })?;
        let im: f64 = fields[2].parse().map_err(|e| {
            CliError::Config(format!("{}:{}: bad im: {e}", path.display(), number + 1))
        })?;
        amps[index] = Complex64::new(re, im);
        any = true;
    }
    if !any {
        return Err(CliError::Config(format!("{}: no amplitudes found", path.display())));
    }
    ManyBodyState::new(amps)
        .map_err(|_| CliError::Config(format!("{}: amplitudes have zero norm", path.display())))
}

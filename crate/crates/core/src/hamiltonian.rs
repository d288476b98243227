//! One-dimensional Bose-Hubbard Hamiltonian on the fixed-atom-number basis,
//! its ground states, and the unitary evolution applied between detection
//! events.
//!
//! Conventions: `hbar = 1`, energies in units of the hopping `J`, times in
//! `hbar/J`. The chain is open (nearest-neighbour hopping only) unless the
//! parameters ask for a periodic wrap:
//!
//! `H = -J sum_j (b_j^dag b_{j+1} + h.c.) + (U/2) sum_j n_j (n_j - 1)`

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] use num_traits::Float;

use crate::fock::FockBasis;
use crate::linalg::{
    self, LanczosOptions, PropagationFailure, SymmetricEigen,
};

/// Above this dimension the dense eigendecomposition paths hand over to
/// iterative (Lanczos / Krylov) methods.
pub const DENSE_LIMIT: usize = 2000;

/// Residual tolerance of the Krylov propagator.
pub const KRYLOV_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BoseHubbardParams {
    /// Hopping amplitude `J`; the natural choice is 1 so that `interaction`
    /// is the ratio `U/J`.
    pub hopping: f64,
    /// On-site interaction `U`.
    pub interaction: f64,
    pub sites: usize,
    pub atoms: u32,
    /// Open chain when `true`; `false` adds the wrap-around bond.
    pub open_boundary: bool,
}

impl BoseHubbardParams {
    /// Standard open chain with `J = 1` and a given `U/J`.
    pub fn with_interaction_ratio(sites: usize, atoms: u32, interaction: f64) -> Self {
        Self { hopping: 1.0, interaction, sites, atoms, open_boundary: true }
    }

    pub fn validate(&self) -> Result<(), HamiltonianError> {
        if !(self.hopping > 0.0) {
            return Err(HamiltonianError::InvalidParams("hopping must be positive"));
        }
        if !(self.interaction >= 0.0) {
            return Err(HamiltonianError::InvalidParams("interaction must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianError {
    InvalidParams(&'static str),
    BasisMismatch { expected_sites: usize, expected_atoms: u32, sites: usize, atoms: u32 },
    NegativeTime(f64),
    GroundStateNotConverged { residual: f64, iterations: usize },
    Propagation(PropagationFailure),
    ZeroState,
}

impl fmt::Display for HamiltonianError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HamiltonianError::InvalidParams(reason) => write!(f, "invalid parameters: {reason}"),
            HamiltonianError::BasisMismatch { expected_sites, expected_atoms, sites, atoms } => {
                write!(
                    f,
                    "basis (M={sites}, N={atoms}) does not match parameters (M={expected_sites}, N={expected_atoms})"
                )
            }
            HamiltonianError::NegativeTime(dt) => write!(f, "time step must be non-negative, got {dt}"),
            HamiltonianError::GroundStateNotConverged { residual, iterations } => write!(
                f,
                "ground-state solver stalled at residual {residual:.3e} after {iterations} iterations"
            ),
            HamiltonianError::Propagation(inner) => inner.fmt(f),
            HamiltonianError::ZeroState => write!(f, "state has zero norm"),
        }
    }
}

impl core::error::Error for HamiltonianError {}

impl From<PropagationFailure> for HamiltonianError {
    fn from(value: PropagationFailure) -> Self {
        HamiltonianError::Propagation(value)
    }
}

/// Sparse symmetric Bose-Hubbard Hamiltonian in CSR layout.
#[derive(Debug, Clone)]
pub struct HamiltonianOperator {
    params: BoseHubbardParams,
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl HamiltonianOperator {
    pub fn build(params: &BoseHubbardParams, basis: &FockBasis) -> Result<Self, HamiltonianError> {
        params.validate()?;
        if basis.sites() != params.sites || basis.atoms() != params.atoms {
            return Err(HamiltonianError::BasisMismatch {
                expected_sites: params.sites,
                expected_atoms: params.atoms,
                sites: basis.sites(),
                atoms: basis.atoms(),
            });
        }

        let m = basis.sites();
        let dim = basis.len();
        let mut bonds: Vec<(usize, usize)> = (0..m.saturating_sub(1)).map(|j| (j, j + 1)).collect();
        if !params.open_boundary && m > 2 {
            bonds.push((m - 1, 0));
        }

        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);

        let mut row: Vec<(usize, f64)> = Vec::with_capacity(2 * bonds.len() + 1);
        let mut moved = vec![0u32; m];
        for (u, occ) in basis.iter().enumerate() {
            row.clear();
            let n = occ.as_slice();

            let diagonal: f64 = 0.5
                * params.interaction
                * n.iter().map(|&x| f64::from(x) * f64::from(x.saturating_sub(1))).sum::<f64>();
            row.push((u, diagonal));

            for &(a, b) in &bonds {
                for (src, dst) in [(a, b), (b, a)] {
                    if n[src] == 0 {
                        continue;
                    }
                    moved.copy_from_slice(n);
                    moved[src] -= 1;
                    moved[dst] += 1;
                    let target = basis
                        .index_of(&crate::fock::OccupationVector::new(moved.clone()))
                        .expect("hopping stays within the fixed-N sector");
                    let amplitude =
                        -params.hopping * (f64::from(n[src]) * f64::from(n[dst] + 1)).sqrt();
                    row.push((target, amplitude));
                }
            }

            row.sort_by_key(|&(col, _)| col);
            for &(col, val) in row.iter() {
                if val != 0.0 || col == u {
                    cols.push(col);
                    vals.push(val);
                }
            }
            row_ptr.push(cols.len());
        }

        Ok(Self { params: params.clone(), dim, row_ptr, cols, vals })
    }

    pub fn params(&self) -> &BoseHubbardParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Matrix element `<u|H|v>`.
    pub fn element(&self, u: usize, v: usize) -> f64 {
        let lo = self.row_ptr[u];
        let hi = self.row_ptr[u + 1];
        match self.cols[lo..hi].binary_search(&v) {
            Ok(k) => self.vals[lo + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec_real(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        for (u, slot) in y.iter_mut().enumerate() {
            let lo = self.row_ptr[u];
            let hi = self.row_ptr[u + 1];
            let mut acc = 0.0;
            for k in lo..hi {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *slot = acc;
        }
    }

    pub fn matvec_complex(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim);
        for (u, slot) in y.iter_mut().enumerate() {
            let lo = self.row_ptr[u];
            let hi = self.row_ptr[u + 1];
            let mut acc = Complex64::new(0.0, 0.0);
            for k in lo..hi {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *slot = acc;
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.dim * self.dim];
        for u in 0..self.dim {
            for k in self.row_ptr[u]..self.row_ptr[u + 1] {
                dense[u * self.dim + self.cols[k]] = self.vals[k];
            }
        }
        dense
    }

    /// Energy expectation value of a normalized state.
    pub fn expectation(&self, state: &ManyBodyState) -> f64 {
        let mut hx = vec![Complex64::new(0.0, 0.0); self.dim];
        self.matvec_complex(state.amplitudes(), &mut hx);
        state
            .amplitudes()
            .iter()
            .zip(&hx)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }
}

/// Complex amplitude vector over a [`FockBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyState {
    amps: Vec<Complex64>,
}

impl ManyBodyState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self, HamiltonianError> {
        let mut state = Self { amps };
        if state.norm() == 0.0 {
            return Err(HamiltonianError::ZeroState);
        }
        state.normalize();
        Ok(state)
    }

    /// The basis state `|n_u>` as a normalized many-body state.
    pub fn fock(dim: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn from_real(vector: &[f64]) -> Self {
        Self { amps: vector.iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    pub fn overlap(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Rotate the global phase so the largest-modulus amplitude is real
    /// and positive.
    pub fn fix_phase(&mut self) {
        let mut best = 0;
        let mut best_mod = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            let m = a.norm_sqr();
            if m > best_mod {
                best_mod = m;
                best = i;
            }
        }
        let pivot = self.amps[best];
        let modulus = pivot.norm();
        if modulus > 0.0 {
            let rotation = pivot.conj() / modulus;
            for a in &mut self.amps {
                *a *= rotation;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub state: ManyBodyState,
    pub energy: f64,
    /// `||H psi - E psi||` of the returned pair.
    pub residual: f64,
    pub iterations: usize,
    /// Gap to the first excited state when the dense path computed it.
    pub gap: Option<f64>,
}

impl GroundState {
    /// Ground-state degeneracy within numerical resolution.
    pub fn is_degenerate(&self) -> bool {
        matches!(self.gap, Some(g) if g < 1e-12)
    }
}

/// Full dense spectrum; only sensible for `dim <= DENSE_LIMIT`.
pub fn dense_spectrum(h: &HamiltonianOperator) -> SymmetricEigen {
    linalg::symmetric_eigen(&h.to_dense(), h.dim())
}

pub fn ground_state(h: &HamiltonianOperator) -> Result<GroundState, HamiltonianError> {
    ground_state_with(h, &LanczosOptions { residual_tolerance: 1e-9, ..LanczosOptions::default() })
}

pub fn ground_state_with(
    h: &HamiltonianOperator,
    opts: &LanczosOptions,
) -> Result<GroundState, HamiltonianError> {
    if h.dim() <= DENSE_LIMIT {
        let eig = dense_spectrum(h);
        let mut state = ManyBodyState::from_real(&eig.vectors[0]);
        state.fix_phase();
        let energy = eig.values[0];
        let gap = if h.dim() > 1 { Some(eig.values[1] - eig.values[0]) } else { None };
        let mut hv = vec![0.0; h.dim()];
        h.matvec_real(&eig.vectors[0], &mut hv);
        let residual = eig.vectors[0]
            .iter()
            .zip(&hv)
            .map(|(x, y)| {
                let r = y - energy * x;
                r * r
            })
            .sum::<f64>()
            .sqrt();
        return Ok(GroundState { state, energy, residual, iterations: 0, gap });
    }

    let out = linalg::lanczos_lowest(|x, y| h.matvec_real(x, y), h.dim(), opts);
    if !out.converged {
        return Err(HamiltonianError::GroundStateNotConverged {
            residual: out.residual,
            iterations: out.iterations,
        });
    }
    let mut state = ManyBodyState::from_real(&out.vector);
    state.fix_phase();
    Ok(GroundState {
        state,
        energy: out.eigenvalue,
        residual: out.residual,
        iterations: out.iterations,
        gap: None,
    })
}

/// Precomputed `exp(-i H dt)` application strategy.
///
/// Immutable and shareable between trajectory workers. The spectral form is
/// exact (up to the dense eigensolve) and costs `O(dim^2)` per application;
/// the Krylov form re-expands per call at `KRYLOV_TOLERANCE`.
#[derive(Debug, Clone)]
pub enum Propagator {
    Identity,
    Spectral { dt: f64, eigenvectors: Vec<Vec<f64>>, phases: Vec<Complex64> },
    Krylov { h: HamiltonianOperator, dt: f64 },
}

impl Propagator {
    pub fn new(h: &HamiltonianOperator, dt: f64) -> Result<Self, HamiltonianError> {
        if dt < 0.0 {
            return Err(HamiltonianError::NegativeTime(dt));
        }
        if dt == 0.0 {
            return Ok(Propagator::Identity);
        }
        if h.dim() <= DENSE_LIMIT {
            Ok(Self::from_spectrum(&dense_spectrum(h), dt))
        } else {
            Ok(Propagator::Krylov { h: h.clone(), dt })
        }
    }

    /// Build the spectral propagator from an existing eigendecomposition.
    pub fn from_spectrum(spectrum: &SymmetricEigen, dt: f64) -> Self {
        if dt == 0.0 {
            return Propagator::Identity;
        }
        let phases = spectrum
            .values
            .iter()
            .map(|&e| Complex64::new(0.0, -e * dt).exp())
            .collect();
        Propagator::Spectral { dt, eigenvectors: spectrum.vectors.clone(), phases }
    }

    pub fn dt(&self) -> f64 {
        match self {
            Propagator::Identity => 0.0,
            Propagator::Spectral { dt, .. } => *dt,
            Propagator::Krylov { dt, .. } => *dt,
        }
    }

    pub fn apply_in_place(&self, state: &mut ManyBodyState) -> Result<(), HamiltonianError> {
        match self {
            Propagator::Identity => Ok(()),
            Propagator::Spectral { eigenvectors, phases, .. } => {
                let dim = state.dim();
                let mut modes = vec![Complex64::new(0.0, 0.0); dim];
                for ((mode, vector), phase) in modes.iter_mut().zip(eigenvectors).zip(phases) {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (v, a) in vector.iter().zip(state.amplitudes()) {
                        acc += v * a;
                    }
                    *mode = acc * phase;
                }
                let amps = state.amplitudes_mut();
                for a in amps.iter_mut() {
                    *a = Complex64::new(0.0, 0.0);
                }
                for (mode, vector) in modes.iter().zip(eigenvectors) {
                    for (a, v) in amps.iter_mut().zip(vector) {
                        *a += mode * v;
                    }
                }
                Ok(())
            }
            Propagator::Krylov { h, dt } => {
                linalg::krylov_propagate(
                    |x, y| h.matvec_complex(x, y),
                    state.amplitudes_mut(),
                    *dt,
                    KRYLOV_TOLERANCE,
                    48,
                )?;
                Ok(())
            }
        }
    }

    pub fn apply(&self, state: &ManyBodyState) -> Result<ManyBodyState, HamiltonianError> {
        let mut out = state.clone();
        self.apply_in_place(&mut out)?;
        Ok(out)
    }
}

/// `exp(-i H dt) |state>`. Convenience wrapper that builds a throwaway
/// propagator; trajectory loops should build one [`Propagator`] and reuse it.
pub fn evolve(
    state: &ManyBodyState,
    h: &HamiltonianOperator,
    dt: f64,
) -> Result<ManyBodyState, HamiltonianError> {
    Propagator::new(h, dt)?.apply(state)
}

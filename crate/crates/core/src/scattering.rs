//! Angular scattering density, non-scattering amplitudes, and the two
//! measurement projections applied after each probe detection.
//!
//! Geometry: the chain lies along the y-axis with site positions
//! `r_j = (0, j a)` and the probe arrives along x with wavenumber `k0`.
//! A detection at angle `theta` transfers momentum
//! `k(theta) = k0 (1 - cos theta, -sin theta)`, so the site phases are
//! `r_j . k(theta) = -j (k0 a) sin theta`.
//!
//! For a state `sum_u psi_u |n_u>` the detection density at angle `theta` is
//!
//! `P(theta) = (g^2 / 2 pi) sum_u |psi_u|^2 |f_u(theta)|^2`,
//! `f_u(theta) = I(theta) sum_j n_j^u exp(i r_j . k(theta))`,
//!
//! and the probe passes undeflected with amplitude
//! `A_u = sqrt(1 - (g^2 / 2 pi) int |f_u|^2 dtheta)`.
//!
//! Everything here reduces to the pair-correlation signature `g[d]`:
//! `|f_u(theta)|^2 = I^2 (g[0] + 2 sum_{d>=1} g[d] cos(d k0 a sin theta))`,
//! which collapses per-state integrals into per-class ones and makes every
//! density evaluation `O(M)` instead of `O(dim)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::fock::{EquivalenceClasses, FockBasis, OccupationVector};
use crate::hamiltonian::ManyBodyState;

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringConfig {
    /// Probe-system coupling `g`.
    pub coupling: f64,
    /// Probe wavenumber times the lattice spacing, `k0 a`.
    pub probe_wavenumber: f64,
    /// Width of the Gaussian on-site (Wannier) density in units of `a`;
    /// zero means point particles and a flat form factor.
    pub wannier_width: f64,
    /// Midpoint-rule quadrature points on `[-pi, pi]`.
    pub quadrature_points: usize,
}

impl Default for ScatteringConfig {
    fn default() -> Self {
        Self { coupling: 0.1, probe_wavenumber: PI, wannier_width: 0.0, quadrature_points: 4096 }
    }
}

impl ScatteringConfig {
    pub fn validate(&self) -> Result<(), ScatteringError> {
        // The model also makes sense at g = 0 (probe switched off); several
        // trivial limits rely on it, so only negative couplings are rejected.
        if !(self.coupling >= 0.0) {
            return Err(ScatteringError::InvalidConfig("coupling must be non-negative"));
        }
        if !(self.probe_wavenumber > 0.0) {
            return Err(ScatteringError::InvalidConfig("probe wavenumber must be positive"));
        }
        if !(self.wannier_width >= 0.0) {
            return Err(ScatteringError::InvalidConfig("wannier width must be non-negative"));
        }
        if self.quadrature_points < 64 || self.quadrature_points % 2 != 0 {
            return Err(ScatteringError::InvalidConfig("quadrature_points must be even and >= 64"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScatteringError {
    InvalidConfig(&'static str),
    /// `1 - (g^2/2pi) int |f|^2` went negative: the single-scattering model
    /// cannot accommodate this coupling for the named class.
    UnphysicalCoupling { class_id: usize, radicand: f64 },
    /// The projected state vanished: the detection was impossible from the
    /// input state.
    ZeroNormProjection,
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for ScatteringError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScatteringError::InvalidConfig(reason) => write!(f, "invalid scattering config: {reason}"),
            ScatteringError::UnphysicalCoupling { class_id, radicand } => write!(
                f,
                "coupling too large for the single-scattering model: class {class_id} \
                 has non-scattering radicand {radicand:.6}"
            ),
            ScatteringError::ZeroNormProjection => {
                write!(f, "projection annihilated the state (detection impossible from this state)")
            }
            ScatteringError::DimensionMismatch { expected, got } => {
                write!(f, "state dimension {got} does not match kernel dimension {expected}")
            }
        }
    }
}

impl core::error::Error for ScatteringError {}

/// Momentum transfer `k(theta) = k0 (1 - cos theta, -sin theta)`.
pub fn momentum_transfer(theta: f64, probe_wavenumber: f64) -> [f64; 2] {
    [probe_wavenumber * (1.0 - theta.cos()), -probe_wavenumber * theta.sin()]
}

/// Fourier transform of the on-site density at the transferred momentum.
///
/// With the isotropic Gaussian model `|w(r)|^2 ~ exp(-r^2 / sigma^2)` this is
/// `exp(-sigma^2 |k(theta)|^2 / 4)`; `|k|^2 = 2 k0^2 (1 - cos theta)`.
pub fn form_factor(theta: f64, config: &ScatteringConfig) -> f64 {
    let sigma = config.wannier_width;
    if sigma == 0.0 {
        return 1.0;
    }
    let k0 = config.probe_wavenumber;
    (-0.5 * sigma * sigma * k0 * k0 * (1.0 - theta.cos())).exp()
}

/// Uniform midpoint grid on `[-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaGrid {
    points: usize,
    step: f64,
}

impl ThetaGrid {
    pub fn new(points: usize) -> Self {
        Self { points, step: 2.0 * PI / points as f64 }
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn angle(&self, i: usize) -> f64 {
        -PI + (i as f64 + 0.5) * self.step
    }

    /// Left edge of cell `i`; the cell covers `[edge, edge + step)`.
    pub fn cell_start(&self, i: usize) -> f64 {
        -PI + i as f64 * self.step
    }
}

/// Precomputed scattering tables for one basis: per-class non-scattering
/// amplitudes, form-factor quadrature weights, and the cosine tables of the
/// signature decomposition. Immutable once built.
#[derive(Debug, Clone)]
pub struct ScatteringKernel {
    config: ScatteringConfig,
    grid: ThetaGrid,
    sites: usize,
    dim: usize,
    /// Flattened `dim x sites` occupation numbers.
    occupations: Vec<u32>,
    class_of: Vec<u32>,
    class_signatures: Vec<Vec<u64>>,
    /// `int |f_c|^2 dtheta` per class, by the fixed quadrature rule.
    class_scatter_integral: Vec<f64>,
    /// `A_c` per class.
    class_amplitude: Vec<f64>,
    /// `I^2(theta_i) * dtheta` per grid point.
    quad_weights: Vec<f64>,
    /// `cos(d k0 a sin theta_i)`, row `d` in `0..sites`.
    cos_table: Vec<Vec<f64>>,
}

impl ScatteringKernel {
    pub fn build(
        basis: &FockBasis,
        classes: &EquivalenceClasses,
        config: &ScatteringConfig,
    ) -> Result<Self, ScatteringError> {
        config.validate()?;
        let sites = basis.sites();
        let dim = basis.len();
        let grid = ThetaGrid::new(config.quadrature_points);

        let mut occupations = Vec::with_capacity(dim * sites);
        for occ in basis {
            occupations.extend_from_slice(occ.as_slice());
        }

        let mut quad_weights = Vec::with_capacity(grid.len());
        let mut cos_table = vec![Vec::with_capacity(grid.len()); sites];
        for i in 0..grid.len() {
            let theta = grid.angle(i);
            let form = form_factor(theta, config);
            quad_weights.push(form * form * grid.step());
            let phase = config.probe_wavenumber * theta.sin();
            for (d, row) in cos_table.iter_mut().enumerate() {
                row.push((d as f64 * phase).cos());
            }
        }

        // int I^2 cos(d k0 a sin theta) dtheta for each distance d
        let distance_integral: Vec<f64> = (0..sites)
            .map(|d| quad_weights.iter().zip(&cos_table[d]).map(|(w, c)| w * c).sum())
            .collect();

        let prefactor = config.coupling * config.coupling / (2.0 * PI);
        let mut class_signatures = Vec::with_capacity(classes.len());
        let mut class_scatter_integral = Vec::with_capacity(classes.len());
        let mut class_amplitude = Vec::with_capacity(classes.len());
        let mut worst: Option<(usize, f64)> = None;
        for (id, class) in classes.classes().iter().enumerate() {
            let signature = class.signature.as_slice().to_vec();
            let integral = signature_integral(&signature, &distance_integral);
            let radicand = 1.0 - prefactor * integral;
            if radicand < 0.0 {
                match worst {
                    Some((_, r)) if r <= radicand => {}
                    _ => worst = Some((id, radicand)),
                }
            }
            class_signatures.push(signature);
            class_scatter_integral.push(integral);
            class_amplitude.push(if radicand > 0.0 { radicand.sqrt() } else { 0.0 });
        }
        if let Some((class_id, radicand)) = worst {
            return Err(ScatteringError::UnphysicalCoupling { class_id, radicand });
        }

        Ok(Self {
            config: config.clone(),
            grid,
            sites,
            dim,
            occupations,
            class_of: classes.class_map().to_vec(),
            class_signatures,
            class_scatter_integral,
            class_amplitude,
            quad_weights,
            cos_table,
        })
    }

    pub fn config(&self) -> &ScatteringConfig {
        &self.config
    }

    pub fn grid(&self) -> &ThetaGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn class_count(&self) -> usize {
        self.class_amplitude.len()
    }

    pub fn class_of(&self, state_index: usize) -> usize {
        self.class_of[state_index] as usize
    }

    /// Non-scattering amplitude of one basis state.
    pub fn nonscatter_amplitude(&self, state_index: usize) -> f64 {
        self.class_amplitude[self.class_of(state_index)]
    }

    pub fn class_nonscatter_amplitude(&self, class_id: usize) -> f64 {
        self.class_amplitude[class_id]
    }

    /// `int |f_c|^2 dtheta` for one class under the kernel quadrature.
    pub fn class_scatter_integral(&self, class_id: usize) -> f64 {
        self.class_scatter_integral[class_id]
    }

    /// Non-scattering amplitude recomputed from an occupation vector alone
    /// (no class lookup); the cached per-class table is the hot path.
    pub fn nonscatter_amplitude_for(
        &self,
        occ: &OccupationVector,
    ) -> Result<f64, ScatteringError> {
        if occ.sites() != self.sites {
            return Err(ScatteringError::DimensionMismatch { expected: self.sites, got: occ.sites() });
        }
        let signature = occ.signature();
        let distance_integral: Vec<f64> = (0..self.sites)
            .map(|d| self.quad_weights.iter().zip(&self.cos_table[d]).map(|(w, c)| w * c).sum())
            .collect();
        let integral = signature_integral(signature.as_slice(), &distance_integral);
        let prefactor = self.config.coupling * self.config.coupling / (2.0 * PI);
        let radicand = 1.0 - prefactor * integral;
        if radicand < 0.0 {
            return Err(ScatteringError::UnphysicalCoupling { class_id: usize::MAX, radicand });
        }
        Ok(radicand.sqrt())
    }

    /// `|f_u(theta)|^2` for one basis state at an arbitrary angle.
    pub fn structure_factor_sq(&self, state_index: usize, theta: f64) -> f64 {
        let signature = &self.class_signatures[self.class_of(state_index)];
        let form = form_factor(theta, &self.config);
        let phase = self.config.probe_wavenumber * theta.sin();
        let mut total = signature[0] as f64;
        for (d, &g) in signature.iter().enumerate().skip(1) {
            total += 2.0 * g as f64 * (d as f64 * phase).cos();
        }
        form * form * total
    }

    fn check_state(&self, state: &ManyBodyState) -> Result<(), ScatteringError> {
        if state.dim() != self.dim {
            return Err(ScatteringError::DimensionMismatch { expected: self.dim, got: state.dim() });
        }
        Ok(())
    }

    /// Per-class probability mass `W_c = sum_{u in c} |psi_u|^2`.
    pub fn class_weights(&self, state: &ManyBodyState) -> Vec<f64> {
        let mut weights = vec![0.0; self.class_count()];
        self.accumulate_class_weights(state, &mut weights);
        weights
    }

    pub(crate) fn accumulate_class_weights(&self, state: &ManyBodyState, weights: &mut [f64]) {
        for w in weights.iter_mut() {
            *w = 0.0;
        }
        for (amp, &class) in state.amplitudes().iter().zip(&self.class_of) {
            weights[class as usize] += amp.norm_sqr();
        }
    }

    /// Probability that the next probe particle is not scattered.
    pub fn nonscatter_probability(&self, state: &ManyBodyState) -> f64 {
        state
            .amplitudes()
            .iter()
            .zip(&self.class_of)
            .map(|(amp, &class)| amp.norm_sqr() * self.class_amplitude[class as usize].powi(2))
            .sum()
    }

    /// Aggregated signature `G[d] = sum_c W_c g_c[d]` for a class-weight
    /// vector; the detection density is a cosine series in `G`.
    fn aggregate_signature(&self, class_weights: &[f64], out: &mut [f64]) {
        for slot in out.iter_mut() {
            *slot = 0.0;
        }
        for (weight, signature) in class_weights.iter().zip(&self.class_signatures) {
            if *weight == 0.0 {
                continue;
            }
            for (slot, &g) in out.iter_mut().zip(signature) {
                *slot += weight * g as f64;
            }
        }
    }

    /// Detection density `P(theta)` of a normalized state at any angle.
    pub fn angular_density(&self, state: &ManyBodyState, theta: f64) -> f64 {
        let weights = self.class_weights(state);
        let mut aggregated = vec![0.0; self.sites];
        self.aggregate_signature(&weights, &mut aggregated);
        let form = form_factor(theta, &self.config);
        let phase = self.config.probe_wavenumber * theta.sin();
        let mut total = aggregated[0];
        for (d, &g) in aggregated.iter().enumerate().skip(1) {
            total += 2.0 * g * (d as f64 * phase).cos();
        }
        let prefactor = self.config.coupling * self.config.coupling / (2.0 * PI);
        prefactor * form * form * total
    }

    /// Per-cell probability masses `P(theta_i) dtheta` on the quadrature
    /// grid, written into `masses`. Returns the total scattering
    /// probability. Tiny negative lobes from rounding are clamped to zero.
    pub(crate) fn scatter_masses(&self, class_weights: &[f64], masses: &mut Vec<f64>) -> f64 {
        let mut aggregated = vec![0.0; self.sites];
        self.aggregate_signature(class_weights, &mut aggregated);
        let prefactor = self.config.coupling * self.config.coupling / (2.0 * PI);

        masses.clear();
        masses.reserve(self.grid.len());
        let mut total = 0.0;
        for i in 0..self.grid.len() {
            let mut value = aggregated[0];
            for (d, row) in self.cos_table.iter().enumerate().skip(1) {
                value += 2.0 * aggregated[d] * row[i];
            }
            let mass = (prefactor * self.quad_weights[i] * value).max(0.0);
            total += mass;
            masses.push(mass);
        }
        total
    }

    /// `int P(theta) dtheta` by the kernel quadrature; complements
    /// [`Self::nonscatter_probability`] to one.
    pub fn total_scatter_probability(&self, state: &ManyBodyState) -> f64 {
        let weights = self.class_weights(state);
        let mut masses = Vec::new();
        self.scatter_masses(&weights, &mut masses)
    }

    /// Detection density evaluated on every grid angle.
    pub fn density_curve(&self, state: &ManyBodyState) -> Vec<f64> {
        let weights = self.class_weights(state);
        let mut masses = Vec::new();
        self.scatter_masses(&weights, &mut masses);
        masses.iter().map(|m| m / self.grid.step()).collect()
    }

    /// Projection after a detection at angle `theta`: each amplitude picks
    /// up the complex structure factor `f_u(theta)` before renormalization.
    /// On error the state contents are unspecified.
    pub fn project_scatter_in_place(
        &self,
        state: &mut ManyBodyState,
        theta: f64,
    ) -> Result<(), ScatteringError> {
        self.check_state(state)?;
        let phase = -self.config.probe_wavenumber * theta.sin();
        let site_phases: Vec<Complex64> =
            (0..self.sites).map(|j| Complex64::from_polar(1.0, j as f64 * phase)).collect();
        let form = form_factor(theta, &self.config);

        let mut norm_sq = 0.0;
        for (u, amp) in state.amplitudes_mut().iter_mut().enumerate() {
            let occ = &self.occupations[u * self.sites..(u + 1) * self.sites];
            let mut factor = Complex64::new(0.0, 0.0);
            for (&n, p) in occ.iter().zip(&site_phases) {
                if n != 0 {
                    factor += f64::from(n) * p;
                }
            }
            *amp *= factor * form;
            norm_sq += amp.norm_sqr();
        }
        if norm_sq.sqrt() < 1e-12 {
            return Err(ScatteringError::ZeroNormProjection);
        }
        state.normalize();
        Ok(())
    }

    pub fn project_scatter(
        &self,
        state: &ManyBodyState,
        theta: f64,
    ) -> Result<ManyBodyState, ScatteringError> {
        let mut out = state.clone();
        self.project_scatter_in_place(&mut out, theta)?;
        Ok(out)
    }

    /// Projection after a non-scattering detection: diagonal multiplication
    /// by `A_u`, favouring weakly scattering configurations.
    pub fn project_nonscatter_in_place(
        &self,
        state: &mut ManyBodyState,
    ) -> Result<(), ScatteringError> {
        self.check_state(state)?;
        let mut norm_sq = 0.0;
        for (amp, &class) in state.amplitudes_mut().iter_mut().zip(&self.class_of) {
            *amp *= self.class_amplitude[class as usize];
            norm_sq += amp.norm_sqr();
        }
        if norm_sq.sqrt() < 1e-12 {
            return Err(ScatteringError::ZeroNormProjection);
        }
        state.normalize();
        Ok(())
    }

    pub fn project_nonscatter(
        &self,
        state: &ManyBodyState,
    ) -> Result<ManyBodyState, ScatteringError> {
        let mut out = state.clone();
        self.project_nonscatter_in_place(&mut out)?;
        Ok(out)
    }
}

/// `g[0] q[0] + 2 sum_{d>=1} g[d] q[d]`.
fn signature_integral(signature: &[u64], distance_integral: &[f64]) -> f64 {
    let mut total = signature[0] as f64 * distance_integral[0];
    for (g, q) in signature.iter().zip(distance_integral).skip(1) {
        total += 2.0 * *g as f64 * q;
    }
    total
}

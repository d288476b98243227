//! Checks the kernel's signature-decomposition fast paths against a direct
//! evaluation of the structure factor from raw occupations and positions.

use std::f64::consts::PI;

use backaction_core::fock::{equivalence_classes, FockBasis};
use backaction_core::hamiltonian::ManyBodyState;
use backaction_core::scattering::{form_factor, ScatteringConfig, ScatteringKernel};
use num_complex::Complex64;
use proptest::prelude::*;

/// `f_u(theta)` straight from the definition, with an arbitrary position
/// offset for the first lattice site.
fn structure_factor_direct(
    occupations: &[u32],
    theta: f64,
    config: &ScatteringConfig,
    offset: f64,
) -> Complex64 {
    let phase = -config.probe_wavenumber * theta.sin();
    let mut f = Complex64::new(0.0, 0.0);
    for (j, &n) in occupations.iter().enumerate() {
        f += n as f64 * Complex64::from_polar(1.0, (j as f64 + offset) * phase);
    }
    f * form_factor(theta, config)
}

fn nonscatter_direct(occupations: &[u32], config: &ScatteringConfig) -> f64 {
    let points = config.quadrature_points;
    let step = 2.0 * PI / points as f64;
    let mut integral = 0.0;
    for i in 0..points {
        let theta = -PI + (i as f64 + 0.5) * step;
        integral += structure_factor_direct(occupations, theta, config, 0.0).norm_sqr() * step;
    }
    (1.0 - config.coupling * config.coupling / (2.0 * PI) * integral).sqrt()
}

fn build(m: usize, n: u32, config: &ScatteringConfig) -> (FockBasis, ScatteringKernel) {
    let basis = FockBasis::enumerate(m, n).unwrap();
    let classes = equivalence_classes(&basis);
    let kernel = ScatteringKernel::build(&basis, &classes, config).unwrap();
    (basis, kernel)
}

#[test]
fn structure_factor_modulus_matches_direct_evaluation() {
    for config in [
        ScatteringConfig::default(),
        ScatteringConfig { wannier_width: 0.3, probe_wavenumber: 2.2, ..Default::default() },
    ] {
        let (basis, kernel) = build(4, 4, &config);
        let tolerance = 1e-12 * (basis.atoms() as f64).powi(2);
        for u in 0..basis.len() {
            for step in 0..24 {
                let theta = -PI + step as f64 * (2.0 * PI / 24.0) + 0.013;
                let direct =
                    structure_factor_direct(basis.state(u).as_slice(), theta, &config, 0.0)
                        .norm_sqr();
                let fast = kernel.structure_factor_sq(u, theta);
                assert!(
                    (direct - fast).abs() < tolerance,
                    "u={u} theta={theta}: {direct} vs {fast}"
                );
            }
        }
    }
}

#[test]
fn class_members_share_the_modulus_everywhere() {
    let (basis, kernel) = build(4, 4, &ScatteringConfig::default());
    let classes = equivalence_classes(&basis);
    let tolerance = 1e-12 * (basis.atoms() as f64).powi(2);
    for class in classes.classes() {
        let reference = class.members[0];
        for &member in &class.members[1..] {
            for step in 0..64 {
                let theta = -PI + (step as f64 + 0.5) * (2.0 * PI / 64.0);
                let a = kernel.structure_factor_sq(reference, theta);
                let b = kernel.structure_factor_sq(member, theta);
                assert!((a - b).abs() < tolerance);
            }
        }
    }
}

#[test]
fn nonscatter_amplitudes_match_direct_quadrature() {
    let config = ScatteringConfig { wannier_width: 0.2, ..Default::default() };
    let (basis, kernel) = build(4, 3, &config);
    for u in 0..basis.len() {
        let direct = nonscatter_direct(basis.state(u).as_slice(), &config);
        let fast = kernel.nonscatter_amplitude(u);
        assert!((direct - fast).abs() < 1e-12, "u={u}: {direct} vs {fast}");
    }
}

#[test]
fn shifting_all_site_positions_changes_nothing_observable() {
    // the direct evaluation with offset c equals the kernel's f up to a
    // global phase, so |f|^2, the non-scattering amplitude, and projection
    // outputs are unchanged
    let config = ScatteringConfig::default();
    let (basis, kernel) = build(3, 3, &config);
    for offset in [1.0, 2.5, -0.75] {
        for u in 0..basis.len() {
            for theta in [-2.1, -0.6, 0.4, 1.9] {
                let shifted =
                    structure_factor_direct(basis.state(u).as_slice(), theta, &config, offset)
                        .norm_sqr();
                let fast = kernel.structure_factor_sq(u, theta);
                assert!((shifted - fast).abs() < 1e-12 * 9.0);
            }
        }
    }
}

#[test]
fn projection_commutes_with_position_offset_up_to_global_phase() {
    let config = ScatteringConfig::default();
    let (basis, kernel) = build(3, 3, &config);
    let amps: Vec<Complex64> = (0..basis.len())
        .map(|i| Complex64::new((i as f64 * 0.31).sin() + 0.2, (i as f64 * 0.17).cos()))
        .collect();
    let state = ManyBodyState::new(amps).unwrap();

    let theta = 0.9;
    let projected = kernel.project_scatter(&state, theta).unwrap();

    // offset projection applied manually
    let offset = 2.0;
    let mut shifted: Vec<Complex64> = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(u, amp)| {
            amp * structure_factor_direct(basis.state(u).as_slice(), theta, &config, offset)
        })
        .collect();
    let norm = shifted.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut shifted {
        *a /= norm;
    }

    // compare moduli (global phase drops out) and relative phases via
    // overlap modulus
    for (a, b) in projected.amplitudes().iter().zip(&shifted) {
        assert!((a.norm() - b.norm()).abs() < 1e-12);
    }
    let overlap: Complex64 =
        projected.amplitudes().iter().zip(&shifted).map(|(a, b)| a.conj() * b).sum();
    assert!((overlap.norm() - 1.0).abs() < 1e-12);
}

fn normalized_state_strategy(dim: usize) -> impl Strategy<Value = ManyBodyState> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter_map("zero state", |parts| {
            let norm_sq: f64 = parts.iter().map(|(re, im)| re * re + im * im).sum();
            if norm_sq < 1e-3 {
                return None;
            }
            let amps = parts.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
            ManyBodyState::new(amps).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scatter_plus_nonscatter_is_unity(state in normalized_state_strategy(10)) {
        let (_, kernel) = build(3, 3, &ScatteringConfig::default());
        let closure = kernel.total_scatter_probability(&state)
            + kernel.nonscatter_probability(&state);
        prop_assert!((closure - 1.0).abs() < 1e-9, "closure {}", closure);
    }

    #[test]
    fn projections_return_normalized_states(
        state in normalized_state_strategy(10),
        theta in -PI..PI,
    ) {
        let (_, kernel) = build(3, 3, &ScatteringConfig::default());
        if let Ok(projected) = kernel.project_scatter(&state, theta) {
            prop_assert!((projected.norm() - 1.0).abs() < 1e-10);
        }
        let projected = kernel.project_nonscatter(&state).unwrap();
        prop_assert!((projected.norm() - 1.0).abs() < 1e-10);
    }
}

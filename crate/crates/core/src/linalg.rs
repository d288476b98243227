//! Dense and iterative symmetric eigensolvers plus a Krylov propagator.
//!
//! The dense path is the classic Householder tridiagonalization followed by
//! implicit-QL iteration (EISPACK `tred2`/`tql2` lineage), which keeps the
//! crate free of linear-algebra dependencies and works under `no_std`.
//! The iterative path is Lanczos with full reorthogonalization, restarted
//! until an explicit residual bound is met.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] use num_traits::Float;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

/// Full eigendecomposition of a dense real symmetric matrix (row-major).
pub fn symmetric_eigen(matrix: &[f64], n: usize) -> SymmetricEigen {
    assert_eq!(matrix.len(), n * n);
    let mut v = matrix.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, n, &mut d, &mut e);
    tql2(&mut d, &mut e, Some(&mut v), n);
    collect_columns(d, &v, n)
}

/// Eigendecomposition of a symmetric tridiagonal matrix given its diagonal
/// and subdiagonal (`sub[i]` couples rows `i` and `i + 1`).
pub fn tridiagonal_eigen(diag: &[f64], sub: &[f64]) -> SymmetricEigen {
    let n = diag.len();
    assert_eq!(sub.len() + 1, n);
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[1..].copy_from_slice(sub);
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    tql2(&mut d, &mut e, Some(&mut v), n);
    collect_columns(d, &v, n)
}

/// Eigenvalues only, ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], sub: &[f64]) -> Vec<f64> {
    let n = diag.len();
    assert_eq!(sub.len() + 1, n);
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[1..].copy_from_slice(sub);
    tql2(&mut d, &mut e, None, n);
    d.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalue is NaN"));
    d
}

fn collect_columns(d: Vec<f64>, v: &[f64], n: usize) -> SymmetricEigen {
    let vectors = (0..n)
        .map(|col| (0..n).map(|row| v[row * n + col]).collect())
        .collect();
    SymmetricEigen { values: d, vectors }
}

/// Householder reduction to tridiagonal form with accumulated transform.
/// Port of the public-domain JAMA `tred2`. On exit `d` holds the diagonal,
/// `e[i]` couples rows `i - 1` and `i`, and `v` holds the orthogonal matrix.
fn tred2(v: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) {
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
                v[j * n + i] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v[j * n + i] = f;
                g = e[j] + v[j * n + j] * f;
                for k in j + 1..i {
                    g += v[k * n + j] * d[k];
                    e[k] += v[k * n + j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k * n + j] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for i in 0..n - 1 {
        v[(n - 1) * n + i] = v[i * n + i];
        v[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k * n + i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k * n + i + 1] * v[k * n + j];
                }
                for k in 0..=i {
                    v[k * n + j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k * n + i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
        v[(n - 1) * n + j] = 0.0;
    }
    v[(n - 1) * n + n - 1] = 1.0;
    e[0] = 0.0;
}

/// Implicit-QL iteration on a symmetric tridiagonal matrix (JAMA `tql2`).
/// `e[i]` couples rows `i - 1` and `i` on entry. When `v` is given the
/// eigenvectors are accumulated into its columns and sorted ascending.
fn tql2(d: &mut [f64], e: &mut [f64], mut v: Option<&mut [f64]>, n: usize) {
    if n == 0 {
        return;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l && m < n {
            loop {
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    if let Some(v) = v.as_deref_mut() {
                        for k in 0..n {
                            h = v[k * n + i + 1];
                            v[k * n + i + 1] = s * v[k * n + i] + c * h;
                            v[k * n + i] = c * v[k * n + i] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // Selection sort, ascending; only needed with vectors (the values-only
    // caller sorts for itself).
    if let Some(v) = v {
        for i in 0..n.saturating_sub(1) {
            let mut k = i;
            let mut p = d[i];
            for j in i + 1..n {
                if d[j] < p {
                    k = j;
                    p = d[j];
                }
            }
            if k != i {
                d[k] = d[i];
                d[i] = p;
                for j in 0..n {
                    v.swap(j * n + i, j * n + k);
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct LanczosOptions {
    /// Krylov dimension per sweep.
    pub max_iterations: usize,
    /// Stop a sweep when the lowest Ritz value moves less than this.
    pub eigenvalue_tolerance: f64,
    /// Required `||A x - lambda x||` of the final eigenpair.
    pub residual_tolerance: f64,
    /// Sweeps restarted from the best Ritz vector so far.
    pub max_restarts: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_iterations: 400,
            eigenvalue_tolerance: 1e-14,
            residual_tolerance: 1e-9,
            max_restarts: 8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LanczosOutcome {
    pub eigenvalue: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Deterministic start vector; irrational stride keeps it unbiased with
/// respect to any basis ordering.
fn seed_vector(dim: usize) -> Vec<f64> {
    let mut q: Vec<f64> = (0..dim)
        .map(|i| ((i as f64 + 1.0) * 0.618_033_988_749_895).fract() - 0.5)
        .collect();
    let s = norm(&q);
    for x in &mut q {
        *x /= s;
    }
    q
}

/// Lowest eigenpair of a symmetric operator by restarted Lanczos with full
/// reorthogonalization.
pub fn lanczos_lowest<F>(matvec: F, dim: usize, opts: &LanczosOptions) -> LanczosOutcome
where
    F: Fn(&[f64], &mut [f64]),
{
    let mut start = seed_vector(dim);
    let mut best: Option<LanczosOutcome> = None;
    let mut total_iterations = 0;

    for _ in 0..=opts.max_restarts {
        let sweep = lanczos_sweep(&matvec, dim, &start, opts);
        total_iterations += sweep.iterations;

        let mut outcome = sweep;
        outcome.iterations = total_iterations;
        let good_enough = outcome.residual <= opts.residual_tolerance;
        start = outcome.vector.clone();
        match &best {
            Some(b) if b.residual <= outcome.residual => {}
            _ => best = Some(outcome),
        }
        if good_enough {
            break;
        }
    }

    let mut outcome = best.expect("at least one Lanczos sweep ran");
    outcome.iterations = total_iterations;
    outcome.converged = outcome.residual <= opts.residual_tolerance;
    outcome
}

fn lanczos_sweep<F>(matvec: &F, dim: usize, start: &[f64], opts: &LanczosOptions) -> LanczosOutcome
where
    F: Fn(&[f64], &mut [f64]),
{
    let m = opts.max_iterations.min(dim);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut alpha: Vec<f64> = Vec::with_capacity(m);
    let mut beta: Vec<f64> = Vec::with_capacity(m);

    let mut q = start.to_vec();
    let s = norm(&q);
    for x in &mut q {
        *x /= s;
    }
    basis.push(q);

    let mut w = vec![0.0; dim];
    let mut previous_low = f64::MAX;

    for j in 0..m {
        matvec(&basis[j], &mut w);
        let a = dot(&basis[j], &w);
        alpha.push(a);
        for (wi, qi) in w.iter_mut().zip(&basis[j]) {
            *wi -= a * qi;
        }
        if j > 0 {
            let b = beta[j - 1];
            for (wi, qi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= b * qi;
            }
        }
        // Full reorthogonalization; without it Lanczos re-discovers
        // converged Ritz values as spurious copies.
        for q in &basis {
            let overlap = dot(q, &w);
            if overlap != 0.0 {
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= overlap * qi;
                }
            }
        }

        let b = norm(&w);
        let exhausted = b < 1e-14 || j + 1 == m;
        if (j + 1) % 8 == 0 || exhausted {
            let low = tridiagonal_eigenvalues(&alpha, &beta)[0];
            if (previous_low - low).abs() < opts.eigenvalue_tolerance || exhausted {
                return ritz_lowest(matvec, dim, &alpha, &beta, &basis, j + 1);
            }
            previous_low = low;
        }

        beta.push(b);
        let mut next = w.clone();
        for x in &mut next {
            *x /= b;
        }
        basis.push(next);
    }

    ritz_lowest(matvec, dim, &alpha, &beta, &basis, alpha.len())
}

fn ritz_lowest<F>(
    matvec: &F,
    dim: usize,
    alpha: &[f64],
    beta: &[f64],
    basis: &[Vec<f64>],
    iterations: usize,
) -> LanczosOutcome
where
    F: Fn(&[f64], &mut [f64]),
{
    let eig = tridiagonal_eigen(alpha, &beta[..alpha.len() - 1]);
    let coeffs = &eig.vectors[0];
    let mut vector = vec![0.0; dim];
    for (c, q) in coeffs.iter().zip(basis) {
        for (vi, qi) in vector.iter_mut().zip(q) {
            *vi += c * qi;
        }
    }
    let s = norm(&vector);
    for x in &mut vector {
        *x /= s;
    }

    let eigenvalue = eig.values[0];
    let mut hv = vec![0.0; dim];
    matvec(&vector, &mut hv);
    let residual = vector
        .iter()
        .zip(&hv)
        .map(|(x, y)| {
            let r = y - eigenvalue * x;
            r * r
        })
        .sum::<f64>()
        .sqrt();

    LanczosOutcome { eigenvalue, vector, residual, iterations, converged: false }
}

/// Why a Krylov propagation attempt gave up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagationFailure {
    pub reason: &'static str,
}

impl fmt::Display for PropagationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Krylov propagation failed: {}", self.reason)
    }
}

impl core::error::Error for PropagationFailure {}

fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn cnorm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Apply `exp(-i A t)` to `state` for a real symmetric operator `A`, using
/// Hermitian Lanczos with adaptive sub-stepping. The defect estimate
/// `beta_k |u_k|` is held below `tol` for every substep.
pub fn krylov_propagate<F>(
    matvec: F,
    state: &mut [Complex64],
    t: f64,
    tol: f64,
    max_krylov: usize,
) -> Result<(), PropagationFailure>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    if t == 0.0 {
        return Ok(());
    }
    let dim = state.len();
    let max_krylov = max_krylov.min(dim);
    let mut remaining = t;
    let mut step = t;
    let min_step = t.abs() * 1e-9;

    while remaining.abs() > 1e-300 {
        if step.abs() > remaining.abs() {
            step = remaining;
        }
        match krylov_substep(&matvec, state, step, tol, max_krylov, dim)? {
            true => {
                remaining -= step;
            }
            false => {
                step *= 0.5;
                if step.abs() < min_step {
                    return Err(PropagationFailure {
                        reason: "substep underflow before reaching the defect tolerance",
                    });
                }
            }
        }
    }
    Ok(())
}

/// One trial substep. `Ok(true)` commits the update to `state`.
fn krylov_substep<F>(
    matvec: &F,
    state: &mut [Complex64],
    step: f64,
    tol: f64,
    max_krylov: usize,
    dim: usize,
) -> Result<bool, PropagationFailure>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    let amplitude = cnorm(state);
    if amplitude == 0.0 {
        return Err(PropagationFailure { reason: "zero state cannot be propagated" });
    }

    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(max_krylov);
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();

    let mut q: Vec<Complex64> = state.iter().map(|x| x / amplitude).collect();
    basis.push(q.clone());
    let mut w = vec![Complex64::new(0.0, 0.0); dim];

    let mut accepted: Option<Vec<Complex64>> = None;
    for j in 0..max_krylov {
        matvec(&basis[j], &mut w);
        let a = cdot(&basis[j], &w).re;
        alpha.push(a);
        for (wi, qi) in w.iter_mut().zip(&basis[j]) {
            *wi -= a * qi;
        }
        if j > 0 {
            let b = beta[j - 1];
            for (wi, qi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= b * qi;
            }
        }
        for q in &basis {
            let overlap = cdot(q, &w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= overlap * qi;
            }
        }
        let b = cnorm(&w);

        let invariant = b < 1e-14;
        if invariant || j + 1 == max_krylov || j >= 2 {
            let u = small_exponential(&alpha, &beta, step);
            let defect = if invariant { 0.0 } else { b * u[alpha.len() - 1].norm() };
            if defect <= tol || invariant {
                let mut result = vec![Complex64::new(0.0, 0.0); dim];
                for (coeff, qv) in u.iter().zip(&basis) {
                    let scaled = coeff * amplitude;
                    for (ri, qi) in result.iter_mut().zip(qv) {
                        *ri += scaled * qi;
                    }
                }
                accepted = Some(result);
                break;
            }
        }

        if j + 1 < max_krylov {
            beta.push(b);
            q.clone_from(&w);
            for x in &mut q {
                *x /= b;
            }
            basis.push(q.clone());
        }
    }

    match accepted {
        Some(result) => {
            state.copy_from_slice(&result);
            Ok(true)
        }
        None => Ok(false),
    }
}

/// `exp(-i T step) e_1` for the Lanczos tridiagonal matrix.
fn small_exponential(alpha: &[f64], beta: &[f64], step: f64) -> Vec<Complex64> {
    let k = alpha.len();
    let eig = tridiagonal_eigen(alpha, &beta[..k - 1]);
    let mut u = vec![Complex64::new(0.0, 0.0); k];
    for (value, vector) in eig.values.iter().zip(&eig.vectors) {
        let phase = Complex64::new(0.0, -value * step).exp();
        let weight = phase * vector[0];
        for (ui, vi) in u.iter_mut().zip(vector) {
            *ui += weight * vi;
        }
    }
    u
}

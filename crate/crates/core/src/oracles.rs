//! Slow, literal reference computations used to validate the fast paths.
//!
//! Nothing here shares code with the builders it checks: operators are formed
//! as explicit matrices and multiplied, displacements are integrated by a
//! short-step Taylor series, and the mean-field energy is minimized
//! numerically.

use faer::Mat;

use crate::error::{domain, Result};
use crate::model::ModelParams;

/// Largest basis the brute-force builder accepts.
pub const BRUTE_FORCE_MAX_DIM: usize = 2_000;

fn kron(a: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

fn matmul(a: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), b.ncols(), |i, j| (0..a.ncols()).map(|k| a[(i, k)] * b[(k, j)]).sum())
}

fn add_scaled(acc: &mut Mat<f64>, x: &Mat<f64>, s: f64) {
    for j in 0..acc.ncols() {
        for i in 0..acc.nrows() {
            acc[(i, j)] += s * x[(i, j)];
        }
    }
}

/// `ω a†a + Δ J_z + (γ/√N)(a† + a)(J₊ + J₋)` from explicit operator matrices,
/// ordered spin-major to match the basis index map.
pub fn brute_force_hamiltonian(params: &ModelParams, cutoff: u32) -> Result<Mat<f64>> {
    let levels = cutoff as usize + 1;
    let spins = params.n_atoms() as usize + 1;
    if levels * spins > BRUTE_FORCE_MAX_DIM {
        return domain(format!("brute-force oracle limited to dimension {BRUTE_FORCE_MAX_DIM}"));
    }
    let j = params.j_value();

    let a = Mat::<f64>::from_fn(levels, levels, |r, c| if c == r + 1 { (c as f64).sqrt() } else { 0.0 });
    let a_dag = a.transpose().to_owned();
    let number = matmul(&a_dag, &a);
    let quadrature = Mat::from_fn(levels, levels, |r, c| a[(r, c)] + a_dag[(r, c)]);

    // |j, m⟩ with m = −j + r; J₊|m⟩ = √(j(j+1) − m(m+1)) |m+1⟩
    let j_plus = Mat::<f64>::from_fn(spins, spins, |r, c| {
        let m = -j + c as f64;
        if r == c + 1 {
            (j * (j + 1.0) - m * (m + 1.0)).sqrt()
        } else {
            0.0
        }
    });
    let j_minus = j_plus.transpose().to_owned();
    let j_z = Mat::<f64>::from_fn(spins, spins, |r, c| if r == c { -j + r as f64 } else { 0.0 });
    let j_sum = Mat::from_fn(spins, spins, |r, c| j_plus[(r, c)] + j_minus[(r, c)]);

    let spin_identity = Mat::<f64>::identity(spins, spins);
    let field_identity = Mat::<f64>::identity(levels, levels);

    let mut h = kron(&spin_identity, &number);
    for v in h.col_iter_mut() {
        for x in v.iter_mut() {
            *x *= params.omega();
        }
    }
    add_scaled(&mut h, &kron(&j_z, &field_identity), params.delta());
    add_scaled(
        &mut h,
        &kron(&j_sum, &quadrature),
        params.gamma() / (params.n_atoms() as f64).sqrt(),
    );
    Ok(h)
}

/// `⟨nprime|D(β)|n⟩` by applying `exp(β(a† − a))` to `|n⟩` in a Fock space
/// truncated at `series_cutoff`, as a product of short Taylor-series steps.
pub fn displaced_overlap_series(nprime: u32, n: u32, beta: f64, series_cutoff: u32) -> f64 {
    let required = n + nprime + 40 * (beta * beta).ceil() as u32;
    let size = series_cutoff.max(required) as usize + 1;
    let mut state = vec![0.0; size];
    state[n as usize] = 1.0;
    let steps = (beta.abs() / 0.05).ceil().max(1.0) as usize;
    let h = beta / steps as f64;
    let sqrt: Vec<f64> = (0..size).map(|k| (k as f64).sqrt()).collect();
    let mut term = vec![0.0; size];
    let mut next = vec![0.0; size];
    for _ in 0..steps {
        term.copy_from_slice(&state);
        let mut order = 1.0;
        loop {
            // next = (a† − a) term · h / order
            for k in 0..size {
                let up = if k > 0 { sqrt[k] * term[k - 1] } else { 0.0 };
                let down = if k + 1 < size { sqrt[k + 1] * term[k + 1] } else { 0.0 };
                next[k] = (up - down) * h / order;
            }
            std::mem::swap(&mut term, &mut next);
            let mut largest = 0.0f64;
            for (s, t) in state.iter_mut().zip(&term) {
                *s += t;
                largest = largest.max(t.abs());
            }
            if largest < 1e-20 {
                break;
            }
            order += 1.0;
        }
    }
    let tail: f64 = state[size.saturating_sub(10)..].iter().map(|x| x * x).sum::<f64>().sqrt();
    if tail > 1e-14 {
        log::warn!("displacement series tail {tail:.2e} above 1e-14 (cutoff {})", size - 1);
    }
    state.get(nprime as usize).copied().unwrap_or(0.0)
}

/// Product coherent-state minimum of the classical energy surface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanFieldSolution {
    /// `⟨J_z⟩/j`
    pub z: f64,
    /// Field amplitude for the reference `j`.
    pub alpha: f64,
    pub energy_per_j: f64,
}

impl MeanFieldSolution {
    /// `⟨a†a⟩/j = α²/j`.
    pub fn photon_per_j(&self, j: f64) -> f64 {
        self.alpha * self.alpha / j
    }
}

/// `E(z, α) = ωα² + Δjz + (γ/√(2j))·2α·2j√(1−z²)`.
pub fn mean_field_energy(params: &ModelParams, z: f64, alpha: f64) -> f64 {
    let j = params.j_value();
    params.omega() * alpha * alpha
        + params.delta() * j * z
        + params.gamma() / (2.0 * j).sqrt() * 2.0 * alpha * 2.0 * j * (1.0 - z * z).max(0.0).sqrt()
}

/// Closed-form minimizer. Normal phase for `γ ≤ √(ωΔ)/2`, otherwise
/// `z = −ωΔ/(4γ²)` and `E/j = −2γ²/ω − Δ²ω/(8γ²)`.
pub fn mean_field(params: &ModelParams) -> MeanFieldSolution {
    let (omega, delta, gamma) = (params.omega(), params.delta(), params.gamma());
    let j = params.j_value();
    let critical = (omega * delta).sqrt() / 2.0;
    if gamma <= critical {
        return MeanFieldSolution { z: -1.0, alpha: 0.0, energy_per_j: -delta };
    }
    let z = -omega * delta / (4.0 * gamma * gamma);
    let alpha = -(2.0 * gamma * gamma * j * (1.0 - z * z)).sqrt() / omega;
    MeanFieldSolution {
        z,
        alpha,
        energy_per_j: -2.0 * gamma * gamma / omega - delta * delta * omega / (8.0 * gamma * gamma),
    }
}

/// Minimizes [`mean_field_energy`] without using the closed form: bisection on
/// `∂E/∂α` for each `z`, then bisection on the numerical derivative of the
/// profile in `z`.
pub fn mean_field_numerical(params: &ModelParams) -> MeanFieldSolution {
    let j = params.j_value();
    let scale = (params.gamma() * 2.0 * j / params.omega()).abs() + 1.0;

    let best_alpha = |z: f64| -> f64 {
        let slope = |a: f64| {
            let h = 1e-6 * scale;
            (mean_field_energy(params, z, a + h) - mean_field_energy(params, z, a - h)) / (2.0 * h)
        };
        // E is convex in α; the minimizer lies in [−scale, scale]
        bisect(slope, -scale, scale)
    };
    let profile = |z: f64| mean_field_energy(params, z, best_alpha(z));
    let profile_slope = |z: f64| {
        let h = 1e-7;
        let (lo, hi) = ((z - h).max(-1.0), (z + h).min(1.0));
        (profile(hi) - profile(lo)) / (hi - lo)
    };

    let z = if profile_slope(-1.0 + 1e-12) >= 0.0 {
        -1.0
    } else {
        bisect(profile_slope, -1.0 + 1e-12, 0.0)
    };
    // refine the energy with the exact inner minimum of the quadratic in α
    let alpha = best_alpha(z);
    MeanFieldSolution { z, alpha, energy_per_j: mean_field_energy(params, z, alpha) / j }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    if f(lo) >= 0.0 {
        return lo;
    }
    if f(hi) <= 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

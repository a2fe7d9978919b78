//! Dicke Hamiltonian on the displaced-oscillator ("coherent") basis.
//!
//! ## Frame
//!
//! The pseudospin is rotated so that `J'_z = −J_x`, `J'_x = −J_z`, `J'_y = −J_y`
//! (a proper rotation), and the field is shifted sector by sector:
//! `A = a − G J'_z` with `G = 2γ/(ω√N)`. Then
//!
//! `H = ω (A†A − G² J'_z²) − (Δ/2)(J'_+ + J'_−)`.
//!
//! Basis kets are `|n; m⟩_b = D(G m)|n⟩ ⊗ |j, m⟩'`, where `D` is the displacement
//! operator and `|j, m⟩'` are `J'_z` eigenstates with the usual phase convention
//! for `J'_±`. With this orientation the photon overlap between neighbouring
//! sectors is `⟨n'|D(∓G)|n⟩` for `m' = m ± 1`, which carries the sign
//! `(−1)^{n'−k}` (raising) or `(−1)^{n−k}` (lowering) inside the finite sum.
//!
//! Kets with different `m` are orthogonal through the spin factor and kets with
//! equal `m` share one displacement, so the full product basis is orthonormal
//! and the eigenproblem is a standard symmetric one. The spin-flip term enters
//! with the prefactor `−Δ/2` (`J_z = −(J'_+ + J'_−)/2`); this is the convention
//! that agrees with the Fock-basis spectrum.

use faer::{Mat, Side};

use crate::error::{DickeError, Result};
use crate::matrix::{dot, Budget, HamiltonianMatrix};
use crate::model::{ladder_coeff_plus, BasisKind, BasisSpec, BasisState, HalfInt, ModelParams};

/// Which neighbouring pseudospin sector the bra sits in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `m' = m + 1`
    RaiseM,
    /// `m' = m − 1`
    LowerM,
}

impl Direction {
    fn displacement(self, g: f64) -> f64 {
        match self {
            Direction::RaiseM => -g,
            Direction::LowerM => g,
        }
    }
}

/// `ln k!` for `k = 0..len`.
pub(crate) fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len.max(1));
    out.push(0.0);
    for k in 1..len {
        let prev = out[k - 1];
        out.push(prev + (k as f64).ln());
    }
    out
}

const RESCALE: f64 = 1e200;
const LN_RESCALE: f64 = 460.517_018_598_809_1; // ln(1e200)

/// Walks one diagonal `|k − n| = offset` of the displacement matrix, calling
/// `visit(lo, value)` with `lo = min(k, n)` and the magnitude-signed value of
/// `√(lo!/(lo+offset)!) |β|^offset e^{−β²/2} L_lo^{(offset)}(β²)`.
///
/// The generalized Laguerre polynomial is advanced with its three-term
/// recurrence in degree; the prefactor is kept in the log domain together with
/// a running scale for `L`, so nothing overflows for degrees in the thousands.
fn walk_diagonal(beta: f64, offset: usize, len: usize, lnfact: &[f64], mut visit: impl FnMut(usize, f64)) {
    let x = beta * beta;
    let a = offset as f64;
    let ln_beta = beta.abs().ln();
    let (mut prev, mut cur, mut scale) = (0.0f64, 1.0f64, 0.0f64);
    for lo in 0..len {
        if lo == 1 {
            prev = 1.0;
            cur = 1.0 + a - x;
        } else if lo > 1 {
            let i = (lo - 1) as f64;
            let next = ((2.0 * i + 1.0 + a - x) * cur - (i + a) * prev) / (i + 1.0);
            prev = cur;
            cur = next;
        }
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            scale += LN_RESCALE;
        }
        let value = if cur == 0.0 {
            0.0
        } else {
            let ln_pref = 0.5 * (lnfact[lo] - lnfact[lo + offset]) + a * ln_beta - 0.5 * x;
            cur.signum() * (ln_pref + cur.abs().ln() + scale).exp()
        };
        visit(lo, value);
    }
}

fn diagonal_sign(beta: f64, offset: usize, above: bool) -> f64 {
    // β^offset sign, times (−1)^offset for the reflected upper triangle.
    let odd = offset % 2 == 1;
    let mut s = if beta < 0.0 && odd { -1.0 } else { 1.0 };
    if above && odd {
        s = -s;
    }
    s
}

/// `⟨k|D(β)|n⟩` for real `β`.
pub fn displacement_element(k: u32, n: u32, beta: f64) -> f64 {
    if beta == 0.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let (lo, offset) = (k.min(n) as usize, k.abs_diff(n) as usize);
    let lnfact = ln_factorials(lo + offset + 1);
    let mut out = 0.0;
    walk_diagonal(beta, offset, lo + 1, &lnfact, |i, v| {
        if i == lo {
            out = v;
        }
    });
    out * diagonal_sign(beta, offset, k < n)
}

/// Rectangular block `⟨k|D(β)|n⟩`, `k < rows`, `n < cols`.
pub fn displacement_table(beta: f64, rows: usize, cols: usize) -> Mat<f64> {
    let mut out = Mat::<f64>::zeros(rows, cols);
    if beta == 0.0 {
        for i in 0..rows.min(cols) {
            out[(i, i)] = 1.0;
        }
        return out;
    }
    let lnfact = ln_factorials(rows + cols + 1);
    // lower triangle (k ≥ n): k = lo + offset, n = lo
    for offset in 0..rows {
        let len = cols.min(rows - offset);
        let s = diagonal_sign(beta, offset, false);
        walk_diagonal(beta, offset, len, &lnfact, |lo, v| out[(lo + offset, lo)] = s * v);
    }
    // upper triangle (k < n): k = lo, n = lo + offset
    for offset in 1..cols {
        let len = rows.min(cols - offset);
        let s = diagonal_sign(beta, offset, true);
        walk_diagonal(beta, offset, len, &lnfact, |lo, v| out[(lo, lo + offset)] = s * v);
    }
    out
}

/// Photon overlap between displaced number states of neighbouring sectors,
/// `⟨n'; m ± 1|n; m⟩` restricted to the field factor.
pub fn overlap(nprime: u32, n: u32, g: f64, direction: Direction) -> f64 {
    displacement_element(nprime, n, direction.displacement(g))
}

/// The same overlap from the explicit finite sum
/// `e^{−G²/2} Σ_k √(n'! n!)/((n'−k)!(n−k)!k!) (±1) G^{n+n'−2k}`,
/// with each term formed in the log domain.
///
/// Returns the value together with a rounding-error bound proportional to the
/// largest term; the sum cancels badly once `G` or the indices grow, which is
/// why it only serves as a cross-check.
pub fn overlap_direct_sum(nprime: u32, n: u32, g: f64, direction: Direction) -> (f64, f64) {
    let lnfact = ln_factorials((nprime.max(n) + 1) as usize);
    let (np, nn) = (nprime as usize, n as usize);
    let mut sum = 0.0;
    let mut largest = 0.0f64;
    for k in 0..=np.min(nn) {
        let power = np + nn - 2 * k;
        let magnitude = if power == 0 {
            (0.5 * (lnfact[np] + lnfact[nn]) - lnfact[np - k] - lnfact[nn - k] - lnfact[k] - 0.5 * g * g).exp()
        } else if g == 0.0 {
            0.0
        } else {
            (0.5 * (lnfact[np] + lnfact[nn]) - lnfact[np - k] - lnfact[nn - k] - lnfact[k] + power as f64 * g.ln()
                - 0.5 * g * g)
                .exp()
        };
        let sign_power = match direction {
            Direction::RaiseM => np - k,
            Direction::LowerM => nn - k,
        };
        let term = if sign_power % 2 == 0 { magnitude } else { -magnitude };
        largest = largest.max(magnitude);
        sum += term;
    }
    let terms = (np.min(nn) + 1) as f64;
    (sum, 4.0 * terms * f64::EPSILON * largest)
}

/// Tabulated neighbouring-sector overlaps for one `G` and cutoff.
#[derive(Clone, Debug)]
pub struct OverlapKernel {
    g: f64,
    cutoff: u32,
    raise: Mat<f64>,
}

impl OverlapKernel {
    pub fn new(g: f64, cutoff: u32) -> Self {
        let size = cutoff as usize + 1;
        Self { g, cutoff, raise: displacement_table(-g, size, size) }
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn get(&self, nprime: u32, n: u32, direction: Direction) -> f64 {
        let v = self.raise[(nprime as usize, n as usize)];
        match direction {
            Direction::RaiseM => v,
            Direction::LowerM if (nprime + n) % 2 == 1 => -v,
            Direction::LowerM => v,
        }
    }

    pub fn raise_table(&self) -> &Mat<f64> {
        &self.raise
    }
}

/// `J'_z` eigenstates expressed on the original `|j, m_z⟩` basis.
///
/// Column `i` holds `|j, m = −j + i⟩'`. Phases follow `J'_+|m⟩' = c₊(m)|m+1⟩'`.
#[derive(Clone, Debug)]
pub struct SpinFrame {
    j: HalfInt,
    rotation: Mat<f64>,
}

impl SpinFrame {
    pub fn new(j: HalfInt) -> Result<Self> {
        let d = j.twice() as usize + 1;
        let jx = spin_matrix(j, |plus, minus| 0.5 * (plus + minus));
        let eig = jx.self_adjoint_eigen(Side::Lower).map_err(|e| DickeError::Solver {
            dim: d,
            max_abs: j.value(),
            message: format!("{e:?}"),
        })?;
        let u = eig.U();
        // J'_z = −J_x: ascending m pairs with descending J_x eigenvalue.
        let mut rotation = Mat::<f64>::from_fn(d, d, |r, c| u[(r, d - 1 - c)]);

        // J'_+ = −J_z − (J_+ − J_-)/2
        let jprime_plus = spin_matrix(j, |plus, minus| -0.5 * (plus - minus));
        let mut jprime_plus = jprime_plus;
        for (i, m) in (0..d).map(|i| (i, -j.value() + i as f64)) {
            jprime_plus[(i, i)] -= m;
        }

        // anchor: |−j⟩' = |J_x = +j⟩ has all components of one sign
        let anchor_sum: f64 = (0..d).map(|r| rotation[(r, 0)]).sum();
        if anchor_sum < 0.0 {
            for r in 0..d {
                rotation[(r, 0)] = -rotation[(r, 0)];
            }
        }
        for c in 0..d.saturating_sub(1) {
            let from: Vec<f64> = (0..d).map(|r| rotation[(r, c)]).collect();
            let raised = mat_vec(&jprime_plus, &from);
            let to: Vec<f64> = (0..d).map(|r| rotation[(r, c + 1)]).collect();
            if dot(&to, &raised) < 0.0 {
                for r in 0..d {
                    rotation[(r, c + 1)] = -rotation[(r, c + 1)];
                }
            }
        }
        Ok(Self { j, rotation })
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    /// `⟨j, m_z | j, m⟩'` with both indices offset by `j`.
    pub fn component(&self, mz_index: usize, m_index: usize) -> f64 {
        self.rotation[(mz_index, m_index)]
    }

    pub fn rotation(&self) -> &Mat<f64> {
        &self.rotation
    }

    /// The pseudospin part of the parity operator, `e^{iπ(j + J_z)}`, in the
    /// primed basis. It maps `|m⟩'` to `±|−m⟩'`.
    pub fn spin_parity(&self) -> Mat<f64> {
        let d = self.rotation.nrows();
        let sign = |mz: usize| if mz.is_multiple_of(2) { 1.0 } else { -1.0 };
        Mat::from_fn(d, d, |a, b| (0..d).map(|r| self.rotation[(r, a)] * sign(r) * self.rotation[(r, b)]).sum())
    }
}

/// A `(2j+1)²` matrix on `|j, m_z⟩` assembled from the `J₊`/`J₋` elements:
/// `entry(m+1, m) = f(c₊, 0)`, `entry(m, m+1) = f(0, c₊)`.
fn spin_matrix(j: HalfInt, f: impl Fn(f64, f64) -> f64) -> Mat<f64> {
    let d = j.twice() as usize + 1;
    let mut out = Mat::<f64>::zeros(d, d);
    for i in 0..d - 1 {
        let m = HalfInt::from_twice(2 * i as i32 - j.twice());
        let c = ladder_coeff_plus(j, m).expect("projection within ladder");
        out[(i + 1, i)] = f(c, 0.0);
        out[(i, i + 1)] = f(0.0, c);
    }
    out
}

fn mat_vec(m: &Mat<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)] * v[c]).sum()).collect()
}

pub fn build_coherent_hamiltonian(params: &ModelParams, cutoff: u32, budget: &Budget) -> Result<HamiltonianMatrix> {
    let spec = BasisSpec::new(BasisKind::Coherent, cutoff, params.j());
    budget.check(spec.dimension())?;
    let g = params.g();
    let kernel = OverlapKernel::new(g, cutoff);
    let omega = params.omega();
    let mut h = Mat::<f64>::zeros(spec.dimension(), spec.dimension());
    for (i, s) in spec.states().enumerate() {
        let m = s.m.value();
        h[(i, i)] = omega * (s.n as f64 - g * g * m * m);
    }
    add_spin_flip(&mut h, &spec, &kernel, -0.5 * params.delta())?;
    let out = HamiltonianMatrix::from_parts(spec, None, Some(g), spec.states().collect(), h);
    let asym = out.max_asymmetry();
    if asym > 1e-12 {
        return Err(DickeError::Solver {
            dim: out.dim(),
            max_abs: out.max_abs(),
            message: format!("coherent Hamiltonian asymmetric by {asym:.3e}"),
        });
    }
    Ok(out)
}

/// Adds `scale·(J'_+ + J'_−)` dressed with the photon overlaps.
/// Sub-diagonal blocks come from the raising table and super-diagonal blocks
/// from the lowering table, so a sign slip would surface as asymmetry.
fn add_spin_flip(h: &mut Mat<f64>, spec: &BasisSpec, kernel: &OverlapKernel, scale: f64) -> Result<()> {
    if scale == 0.0 {
        return Ok(());
    }
    let levels = spec.cutoff + 1;
    let j = spec.j;
    for m in spec.projections() {
        if m == j {
            continue;
        }
        let up = HalfInt::from_twice(m.twice() + 2);
        let c_up = ladder_coeff_plus(j, m)?;
        let c_down = crate::model::ladder_coeff_minus(j, up)?;
        for n in 0..levels {
            let col = spec.index_of(BasisState::new(n, m))?;
            for np in 0..levels {
                let row = spec.index_of(BasisState::new(np, up))?;
                h[(row, col)] += scale * c_up * kernel.get(np, n, Direction::RaiseM);
                h[(col, row)] += scale * c_down * kernel.get(n, np, Direction::LowerM);
            }
        }
    }
    Ok(())
}

/// `a†a = A†A + G J'_z (A + A†) + G² J'_z²` on the coherent basis.
pub fn photon_number_operator_coherent(params: &ModelParams, cutoff: u32, budget: &Budget) -> Result<HamiltonianMatrix> {
    let g = params.g();
    field_operator(params, cutoff, budget, |n, m| n + g * g * m * m, |m| g * m)
}

/// Original-frame `J_z = −(J'_+ + J'_−)/2` on the coherent basis.
pub fn jz_operator_coherent(params: &ModelParams, cutoff: u32, budget: &Budget) -> Result<HamiltonianMatrix> {
    let spec = BasisSpec::new(BasisKind::Coherent, cutoff, params.j());
    budget.check(spec.dimension())?;
    let g = params.g();
    let kernel = OverlapKernel::new(g, cutoff);
    let mut h = Mat::<f64>::zeros(spec.dimension(), spec.dimension());
    add_spin_flip(&mut h, &spec, &kernel, -0.5)?;
    Ok(HamiltonianMatrix::from_parts(spec, None, Some(g), spec.states().collect(), h))
}

/// `∂H/∂γ = (2/√N)(a + a†) J_x = −(2/√N) J'_z (A + A† + 2G J'_z)` on the coherent basis.
pub fn coupling_derivative_coherent(params: &ModelParams, cutoff: u32, budget: &Budget) -> Result<HamiltonianMatrix> {
    let g = params.g();
    let pref = 2.0 / (params.n_atoms() as f64).sqrt();
    field_operator(params, cutoff, budget, |_, m| -pref * 2.0 * g * m * m, |m| -pref * m)
}

/// Operators diagonal in `m` and tridiagonal in `n`: `diag(n, m)` on the
/// diagonal and `ladder(m)·√(n+1)` between `n` and `n + 1`.
fn field_operator(
    params: &ModelParams,
    cutoff: u32,
    budget: &Budget,
    diag: impl Fn(f64, f64) -> f64,
    ladder: impl Fn(f64) -> f64,
) -> Result<HamiltonianMatrix> {
    let spec = BasisSpec::new(BasisKind::Coherent, cutoff, params.j());
    budget.check(spec.dimension())?;
    let mut h = Mat::<f64>::zeros(spec.dimension(), spec.dimension());
    for (i, s) in spec.states().enumerate() {
        let m = s.m.value();
        h[(i, i)] = diag(s.n as f64, m);
        if s.n < cutoff {
            let v = ladder(m) * ((s.n + 1) as f64).sqrt();
            h[(i + 1, i)] = v;
            h[(i, i + 1)] = v;
        }
    }
    Ok(HamiltonianMatrix::from_parts(spec, None, Some(params.g()), spec.states().collect(), h))
}

/// A coherent-basis vector re-expressed on Fock ⊗ `|j, m_z⟩`.
#[derive(Clone, Debug)]
pub struct FockExpansion {
    pub spec: BasisSpec,
    pub values: Vec<f64>,
    pub captured_norm: f64,
}

/// Norm that a Fock expansion must retain.
pub const NORM_CAPTURE: f64 = 1.0 - 1e-8;

/// Maps a coherent-basis vector (standard index map of the coherent spec) to the
/// original Fock frame with photon cutoff `fock_cutoff`.
pub fn coherent_to_fock(vector: &[f64], params: &ModelParams, coherent_cutoff: u32, fock_cutoff: u32) -> Result<FockExpansion> {
    let expansion = expand_to_fock(vector, params, coherent_cutoff, fock_cutoff)?;
    let input_norm = dot(vector, vector);
    if expansion.captured_norm < NORM_CAPTURE * input_norm {
        return Err(DickeError::NormLoss { fock_cutoff, captured: expansion.captured_norm / input_norm });
    }
    Ok(expansion)
}

/// Like [`coherent_to_fock`] but grows the Fock cutoff until the captured norm
/// reaches [`NORM_CAPTURE`].
pub fn coherent_to_fock_auto(vector: &[f64], params: &ModelParams, coherent_cutoff: u32) -> Result<FockExpansion> {
    let reach = params.g() * params.j_value() + (coherent_cutoff as f64).sqrt();
    let mut fock_cutoff = (coherent_cutoff as f64 + (reach + 8.0).powi(2)).ceil() as u32;
    loop {
        match coherent_to_fock(vector, params, coherent_cutoff, fock_cutoff) {
            Err(DickeError::NormLoss { .. }) if fock_cutoff < 100_000 => fock_cutoff *= 2,
            other => return other,
        }
    }
}

fn expand_to_fock(vector: &[f64], params: &ModelParams, coherent_cutoff: u32, fock_cutoff: u32) -> Result<FockExpansion> {
    let cspec = BasisSpec::new(BasisKind::Coherent, coherent_cutoff, params.j());
    if vector.len() != cspec.dimension() {
        return Err(DickeError::Domain(format!(
            "vector length {} does not match coherent basis dimension {}",
            vector.len(),
            cspec.dimension()
        )));
    }
    let fspec = BasisSpec::new(BasisKind::Fock, fock_cutoff, params.j());
    let frame = SpinFrame::new(params.j())?;
    let g = params.g();
    let (clevels, flevels) = (coherent_cutoff as usize + 1, fock_cutoff as usize + 1);
    let spins = cspec.spin_multiplicity();
    let mut values = vec![0.0; fspec.dimension()];
    for (mi, m) in cspec.projections().enumerate() {
        let coeffs = &vector[mi * clevels..(mi + 1) * clevels];
        if coeffs.iter().all(|&c| c == 0.0) {
            continue;
        }
        // photon amplitudes D(G m)|ψ_m⟩ on the Fock ladder
        let table = displacement_table(g * m.value(), flevels, clevels);
        let field: Vec<f64> = (0..flevels)
            .map(|k| (0..clevels).map(|n| table[(k, n)] * coeffs[n]).sum())
            .collect();
        for mz in 0..spins {
            let w = frame.component(mz, mi);
            if w == 0.0 {
                continue;
            }
            let block = &mut values[mz * flevels..(mz + 1) * flevels];
            for (b, f) in block.iter_mut().zip(&field) {
                *b += w * f;
            }
        }
    }
    let captured_norm = dot(&values, &values);
    Ok(FockExpansion { spec: fspec, values, captured_norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_fock_hamiltonian;
    use crate::oracles::displaced_overlap_series;

    #[test]
    fn closed_form_cells() {
        for &g in &[0.0f64, 0.1, 0.5, 1.0, 2.0, 3.5] {
            let e = (-0.5 * g * g).exp();
            for dir in [Direction::RaiseM, Direction::LowerM] {
                assert!((overlap(0, 0, g, dir) - e).abs() < 1e-15);
                assert!((overlap(1, 1, g, dir) - (1.0 - g * g) * e).abs() < 1e-14);
            }
            assert!((overlap(1, 0, g, Direction::RaiseM) + g * e).abs() < 1e-15);
            assert!((overlap(1, 0, g, Direction::LowerM) - g * e).abs() < 1e-15);
        }
    }

    #[test]
    fn kernel_identity_at_zero() {
        let k = OverlapKernel::new(0.0, 6);
        for a in 0..=6 {
            for b in 0..=6 {
                assert_eq!(k.get(a, b, Direction::RaiseM), if a == b { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn kernel_sign_relation_and_bounds() {
        let k = OverlapKernel::new(1.7, 25);
        for a in 0..=25 {
            for b in 0..=25 {
                let up = k.get(a, b, Direction::RaiseM);
                let down = k.get(a, b, Direction::LowerM);
                let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(down, sign * up);
                assert!(up.abs() <= 1.0 + 1e-14);
                assert!((up - overlap(a, b, 1.7, Direction::RaiseM)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn direct_sum_agrees_within_its_error_bound() {
        for &g in &[0.1, 0.5, 1.0, 2.0] {
            for a in 0..=30 {
                for b in 0..=30 {
                    for dir in [Direction::RaiseM, Direction::LowerM] {
                        let (v, bound) = overlap_direct_sum(a, b, g, dir);
                        let lag = overlap(a, b, g, dir);
                        assert!((v - lag).abs() <= bound + 1e-14, "g={g} ({a},{b}): {v} vs {lag}");
                    }
                }
            }
        }
    }

    #[test]
    fn large_index_stability() {
        // unitarity of the displacement on a wide window, n up to 200
        let beta = 2.3;
        let table = displacement_table(beta, 600, 201);
        for n in [0usize, 50, 120, 200] {
            let norm: f64 = (0..600).map(|k| table[(k, n)].powi(2)).sum();
            assert!((norm - 1.0).abs() < 1e-11, "n={n} norm={norm}");
        }
        let cross: f64 = (0..600).map(|k| table[(k, 200)] * table[(k, 199)]).sum();
        assert!(cross.abs() < 1e-11);
        assert!((table[(200, 180)] - displacement_element(200, 180, beta)).abs() < 1e-15);
        assert!((table[(17, 200)] - displacement_element(17, 200, beta)).abs() < 1e-15);
    }

    #[test]
    fn kernel_unitarity_defect() {
        for &g in &[0.5f64, 1.0, 2.0] {
            for &(n, np) in &[(0u32, 0u32), (3, 5), (10, 10), (12, 7)] {
                let cutoff = n + np + 40 * (g * g).ceil() as u32;
                let k = OverlapKernel::new(g, cutoff);
                let s: f64 = (0..=cutoff)
                    .map(|i| k.get(i, n, Direction::RaiseM) * k.get(i, np, Direction::RaiseM))
                    .sum();
                let target = if n == np { 1.0 } else { 0.0 };
                assert!((s - target).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn kernel_matches_series_oracle_at_037() {
        let g = 0.37;
        let k = OverlapKernel::new(g, 30);
        for n in 0..=30u32 {
            for np in 0..=30u32 {
                let oracle = displaced_overlap_series(np, n, -g, 400);
                assert!((k.get(np, n, Direction::RaiseM) - oracle).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spin_frame_ladder_relations() {
        for tj in 1..=12 {
            let j = HalfInt::from_twice(tj);
            let frame = SpinFrame::new(j).unwrap();
            let d = tj as usize + 1;
            let jx = spin_matrix(j, |p, m| 0.5 * (p + m));
            let mut jpp = spin_matrix(j, |p, m| -0.5 * (p - m));
            for i in 0..d {
                jpp[(i, i)] -= -j.value() + i as f64;
            }
            for c in 0..d {
                let col: Vec<f64> = (0..d).map(|r| frame.component(r, c)).collect();
                let m = -j.value() + c as f64;
                // J'_z = −J_x
                let jxv = mat_vec(&jx, &col);
                for r in 0..d {
                    assert!((jxv[r] + m * col[r]).abs() < 1e-12);
                }
                if c + 1 < d {
                    let raised = mat_vec(&jpp, &col);
                    let cp = ladder_coeff_plus(j, HalfInt::from_twice(2 * c as i32 - tj)).unwrap();
                    for r in 0..d {
                        assert!((raised[r] - cp * frame.component(r, c + 1)).abs() < 1e-11);
                    }
                }
            }
            // spin parity maps m to −m
            let ps = frame.spin_parity();
            for a in 0..d {
                for b in 0..d {
                    let expected = if a + b == d - 1 { 1.0 } else { 0.0 };
                    assert!((ps[(a, b)].abs() - expected).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_delta_is_diagonal() {
        let p = ModelParams::new(1.0, 0.0, 2.0, 20.0).unwrap();
        let h = build_coherent_hamiltonian(&p, 5, &Budget::default()).unwrap();
        let g = p.g();
        for i in 0..h.dim() {
            for k in 0..h.dim() {
                if i != k {
                    assert_eq!(h.get(i, k), 0.0);
                }
            }
        }
        let top = h.spec().index_of(BasisState::new(0, HalfInt::from_twice(40))).unwrap();
        assert!((h.get(top, top) + g * g * 400.0).abs() < 1e-12);
        assert!((h.get(top, top) + 160.0).abs() < 1e-12);
    }

    #[test]
    fn photon_operator_basics() {
        let p0 = ModelParams::resonant(0.0, 2.0).unwrap();
        let op = photon_number_operator_coherent(&p0, 4, &Budget::default()).unwrap();
        for i in 0..op.dim() {
            for k in 0..op.dim() {
                let expected = if i == k { op.states()[i].n as f64 } else { 0.0 };
                assert_eq!(op.get(i, k), expected);
            }
        }
        let p = ModelParams::resonant(1.3, 2.0).unwrap();
        let op = photon_number_operator_coherent(&p, 4, &Budget::default()).unwrap();
        let g = p.g();
        for m in op.spec().projections() {
            let i = op.spec().index_of(BasisState::new(0, m)).unwrap();
            assert!((op.get(i, i) - g * g * m.value().powi(2)).abs() < 1e-14);
        }
    }

    #[test]
    fn jz_operator_reduces_to_minus_jx_at_zero_coupling() {
        let p = ModelParams::resonant(0.0, 1.5).unwrap();
        let op = jz_operator_coherent(&p, 3, &Budget::default()).unwrap();
        let spec = *op.spec();
        for a in spec.states() {
            for b in spec.states() {
                let (i, k) = (spec.index_of(a).unwrap(), spec.index_of(b).unwrap());
                let expected = if a.n != b.n {
                    0.0
                } else if a.m.twice() == b.m.twice() + 2 {
                    -0.5 * ladder_coeff_plus(spec.j, b.m).unwrap()
                } else if b.m.twice() == a.m.twice() + 2 {
                    -0.5 * ladder_coeff_plus(spec.j, a.m).unwrap()
                } else {
                    0.0
                };
                assert!((op.get(i, k) - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn displaced_vacuum_maps_to_coherent_state() {
        let p = ModelParams::resonant(0.8, 2.0).unwrap();
        let spec = BasisSpec::new(BasisKind::Coherent, 3, p.j());
        let mut v = vec![0.0; spec.dimension()];
        v[spec.index_of(BasisState::new(0, p.j())).unwrap()] = 1.0;
        let fock = coherent_to_fock_auto(&v, &p, 3).unwrap();
        let photons: f64 = fock
            .spec
            .states()
            .zip(&fock.values)
            .map(|(s, c)| s.n as f64 * c * c)
            .sum();
        let gj = p.g() * 2.0;
        assert!((photons - gj * gj).abs() < 1e-9);
    }

    #[test]
    fn zero_coupling_mapping_is_spin_rotation() {
        let p = ModelParams::resonant(0.0, 1.0).unwrap();
        let spec = BasisSpec::new(BasisKind::Coherent, 2, p.j());
        let v: Vec<f64> = (0..spec.dimension()).map(|i| ((i * 7 % 5) as f64 - 2.0) / 5.0).collect();
        let fock = coherent_to_fock(&v, &p, 2, 2).unwrap();
        let frame = SpinFrame::new(p.j()).unwrap();
        for mz in 0..3 {
            for n in 0..3 {
                let expected: f64 = (0..3).map(|mi| frame.component(mz, mi) * v[mi * 3 + n]).sum();
                assert!((fock.values[mz * 3 + n] - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn norm_loss_is_reported() {
        let p = ModelParams::resonant(2.0, 5.0).unwrap();
        let spec = BasisSpec::new(BasisKind::Coherent, 2, p.j());
        let mut v = vec![0.0; spec.dimension()];
        v[spec.index_of(BasisState::new(0, p.j())).unwrap()] = 1.0;
        match coherent_to_fock(&v, &p, 2, 10) {
            Err(DickeError::NormLoss { captured, .. }) => assert!(captured < 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mapped_state_reproduces_fock_energy_expectation() {
        // a coherent-basis vector that is not an eigenvector still has the same ⟨H⟩
        let p = ModelParams::resonant(1.0, 1.0).unwrap();
        let hc = build_coherent_hamiltonian(&p, 12, &Budget::default()).unwrap();
        let v: Vec<f64> = {
            let raw: Vec<f64> = (0..hc.dim()).map(|i| (-(i as f64) / 6.0).exp() * if i % 3 == 0 { -1.0 } else { 1.0 }).collect();
            let n = dot(&raw, &raw).sqrt();
            raw.iter().map(|x| x / n).collect()
        };
        let fock = coherent_to_fock_auto(&v, &p, 12).unwrap();
        let hf = build_fock_hamiltonian(&p, fock.spec.cutoff, None, &Budget::new(100_000)).unwrap();
        assert!((hf.expectation(&fock.values) - hc.expectation(&v)).abs() < 1e-8);
    }
}

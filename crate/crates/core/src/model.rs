//! Physical parameters, pseudospin ladder algebra and basis indexing.
//!
//! Spin quantum numbers are stored doubled ([`HalfInt`]) so that
//! half-integer projections compare exactly.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// An integer or half-integer stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const fn from_twice(twice: i32) -> Self {
        Self(twice)
    }

    /// Converts a real number that must be a multiple of 1/2.
    pub fn from_f64(value: f64) -> Result<Self> {
        let twice = 2.0 * value;
        if !twice.is_finite() || (twice - twice.round()).abs() > 1e-9 || twice.abs() > i32::MAX as f64 {
            return domain(format!("{value} is not an integer or half-integer"));
        }
        Ok(Self(twice.round() as i32))
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Couplings of the single-mode Dicke Hamiltonian
/// `H = ω a†a + Δ J_z + (γ/√N)(a† + a)(J₊ + J₋)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    omega: f64,
    delta: f64,
    gamma: f64,
    j: HalfInt,
}

impl ModelParams {
    pub fn new(omega: f64, delta: f64, gamma: f64, j: f64) -> Result<Self> {
        Self::with_spin(omega, delta, gamma, HalfInt::from_f64(j)?)
    }

    pub fn with_spin(omega: f64, delta: f64, gamma: f64, j: HalfInt) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return domain(format!("omega must be positive, got {omega}"));
        }
        if !(delta.is_finite() && delta >= 0.0) {
            return domain(format!("delta must be non-negative, got {delta}"));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return domain(format!("gamma must be non-negative, got {gamma}"));
        }
        if j.twice() <= 0 {
            return domain(format!("pseudospin length must be positive, got {j}"));
        }
        Ok(Self { omega, delta, gamma, j })
    }

    /// Resonant parameters `ω = Δ = 1`.
    pub fn resonant(gamma: f64, j: f64) -> Result<Self> {
        Self::new(1.0, 1.0, gamma, j)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn j_value(&self) -> f64 {
        self.j.value()
    }

    /// Number of atoms `N = 2j`.
    pub fn n_atoms(&self) -> u32 {
        self.j.twice() as u32
    }

    /// Displacement step `G = 2γ / (ω √N)` between neighbouring pseudospin sectors.
    pub fn g(&self) -> f64 {
        2.0 * self.gamma / (self.omega * (self.n_atoms() as f64).sqrt())
    }

    pub fn set_gamma(self, gamma: f64) -> Result<Self> {
        Self::with_spin(self.omega, self.delta, gamma, self.j)
    }

    pub fn set_delta(self, delta: f64) -> Result<Self> {
        Self::with_spin(self.omega, delta, self.gamma, self.j)
    }

    pub fn set_omega(self, omega: f64) -> Result<Self> {
        Self::with_spin(omega, self.delta, self.gamma, self.j)
    }

    pub fn set_j(self, j: f64) -> Result<Self> {
        Self::new(self.omega, self.delta, self.gamma, j)
    }
}

impl Serialize for ModelParams {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("ModelParams", 4)?;
        s.serialize_field("omega", &self.omega)?;
        s.serialize_field("delta", &self.delta)?;
        s.serialize_field("gamma", &self.gamma)?;
        s.serialize_field("j", &self.j.value())?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for ModelParams {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            omega: f64,
            delta: f64,
            gamma: f64,
            j: f64,
        }
        let raw = Raw::deserialize(deserializer)?;
        ModelParams::new(raw.omega, raw.delta, raw.gamma, raw.j).map_err(serde::de::Error::custom)
    }
}

/// `√(j(j+1) − m(m+1))`, the `J₊` matrix element `⟨m+1|J₊|m⟩`.
pub fn ladder_coeff_plus(j: HalfInt, m: HalfInt) -> Result<f64> {
    check_projection(j, m)?;
    let (tj, tm) = (j.twice() as i64, m.twice() as i64);
    // 4·(j(j+1) − m(m+1)) in exact integer arithmetic
    let quad = tj * (tj + 2) - tm * (tm + 2);
    Ok((quad as f64).sqrt() / 2.0)
}

/// `√(j(j+1) − m(m−1))`, the `J₋` matrix element `⟨m−1|J₋|m⟩`.
pub fn ladder_coeff_minus(j: HalfInt, m: HalfInt) -> Result<f64> {
    check_projection(j, m)?;
    let (tj, tm) = (j.twice() as i64, m.twice() as i64);
    let quad = tj * (tj + 2) - tm * (tm - 2);
    Ok((quad as f64).sqrt() / 2.0)
}

fn check_projection(j: HalfInt, m: HalfInt) -> Result<()> {
    if j.twice() < 0 || m.twice().abs() > j.twice() || (j.twice() - m.twice()) % 2 != 0 {
        return domain(format!("projection m = {m} is not in the ladder of j = {j}"));
    }
    Ok(())
}

/// One product state: oscillator excitation `n` and pseudospin projection `m`.
///
/// In the Fock basis `n` counts photons and `m` is the `J_z` eigenvalue; in the
/// coherent basis they are eigenvalues of `A†A` and `J'_z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub n: u32,
    pub m: HalfInt,
}

impl BasisState {
    pub fn new(n: u32, m: HalfInt) -> Self {
        Self { n, m }
    }

    /// Excitation number `λ = j + m + n`.
    pub fn excitation_number(&self, j: HalfInt) -> u64 {
        ((j.twice() + self.m.twice()) / 2) as u64 + self.n as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Fock,
    Coherent,
}

impl BasisKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BasisKind::Fock => "fock",
            BasisKind::Coherent => "coherent",
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BasisKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fock" => Ok(BasisKind::Fock),
            "coherent" => Ok(BasisKind::Coherent),
            other => Err(format!("unknown basis '{other}' (expected fock or coherent)")),
        }
    }
}

/// A truncated product basis: oscillator levels `0..=cutoff` times the `2j + 1`
/// pseudospin projections.
///
/// The linear index of `(n, m)` is `(m + j)·(cutoff + 1) + n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisSpec {
    pub kind: BasisKind,
    pub cutoff: u32,
    pub j: HalfInt,
}

impl BasisSpec {
    pub fn new(kind: BasisKind, cutoff: u32, j: HalfInt) -> Self {
        Self { kind, cutoff, j }
    }

    pub fn spin_multiplicity(&self) -> usize {
        self.j.twice() as usize + 1
    }

    pub fn dimension(&self) -> usize {
        (self.cutoff as usize + 1) * self.spin_multiplicity()
    }

    pub fn index_of(&self, state: BasisState) -> Result<usize> {
        let spin_offset = self.j.twice() + state.m.twice();
        if state.n > self.cutoff || spin_offset < 0 || spin_offset > 2 * self.j.twice() || spin_offset % 2 != 0 {
            return domain(format!(
                "state (n={}, m={}) outside basis (cutoff={}, j={})",
                state.n, state.m, self.cutoff, self.j
            ));
        }
        Ok((spin_offset / 2) as usize * (self.cutoff as usize + 1) + state.n as usize)
    }

    pub fn state_of(&self, index: usize) -> Result<BasisState> {
        if index >= self.dimension() {
            return domain(format!("index {index} outside basis of dimension {}", self.dimension()));
        }
        let levels = self.cutoff as usize + 1;
        let spin_step = (index / levels) as i32;
        Ok(BasisState {
            n: (index % levels) as u32,
            m: HalfInt::from_twice(2 * spin_step - self.j.twice()),
        })
    }

    /// All states in linear index order.
    pub fn states(&self) -> impl Iterator<Item = BasisState> + '_ {
        let levels = self.cutoff + 1;
        let tj = self.j.twice();
        (0..self.spin_multiplicity() as i32).flat_map(move |s| {
            (0..levels).map(move |n| BasisState {
                n,
                m: HalfInt::from_twice(2 * s - tj),
            })
        })
    }

    /// Projections `m = −j, …, j` in index order.
    pub fn projections(&self) -> impl Iterator<Item = HalfInt> {
        let tj = self.j.twice();
        (0..=tj).map(move |s| HalfInt::from_twice(2 * s - tj))
    }
}

/// Parity of the excitation number `λ = j + m + n` (eigenvalue `±1` of `e^{iπΛ}`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityLabel {
    Even,
    Odd,
}

impl ParityLabel {
    pub fn sign(self) -> f64 {
        match self {
            ParityLabel::Even => 1.0,
            ParityLabel::Odd => -1.0,
        }
    }

    pub fn from_sign(value: f64) -> Self {
        if value >= 0.0 {
            ParityLabel::Even
        } else {
            ParityLabel::Odd
        }
    }
}

pub fn parity_of(state: BasisState, j: HalfInt) -> ParityLabel {
    if state.excitation_number(j).is_multiple_of(2) {
        ParityLabel::Even
    } else {
        ParityLabel::Odd
    }
}

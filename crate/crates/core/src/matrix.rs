//! Dense real-symmetric matrices on a truncated product basis, plus the
//! plain-text dump format.
//!
//! Dump layout: a header line
//! `dicke-matrix v1 kind=<fock|coherent> dim=<d>[ parity=<even|odd>][ G=<value>]`
//! followed by `d` lines holding the lower triangle row by row
//! (row `i` carries `i + 1` space-separated values, shortest round-trip decimal).

use std::io::{BufRead, Write};

use faer::Mat;

use crate::error::{DickeError, Result};
use crate::model::{BasisKind, BasisSpec, BasisState, ParityLabel};

/// Refuse to allocate bases larger than this unless overridden.
pub const DEFAULT_MAX_DIM: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_dim: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_dim: DEFAULT_MAX_DIM }
    }
}

impl Budget {
    pub fn new(max_dim: usize) -> Self {
        Self { max_dim }
    }

    pub fn check(&self, dim: usize) -> Result<()> {
        if dim > self.max_dim {
            return Err(DickeError::Resource { dim, max_dim: self.max_dim });
        }
        Ok(())
    }
}

/// A dense real-symmetric operator tagged with the basis it acts on.
///
/// `states[i]` is the basis state of row/column `i`. For an unrestricted basis
/// this is the standard index map of [`BasisSpec`]; for a parity block it is the
/// retained subset in ascending full-basis order.
#[derive(Clone, Debug)]
pub struct HamiltonianMatrix {
    spec: BasisSpec,
    parity_block: Option<ParityLabel>,
    displacement: Option<f64>,
    states: Vec<BasisState>,
    entries: Mat<f64>,
}

impl HamiltonianMatrix {
    pub(crate) fn from_parts(
        spec: BasisSpec,
        parity_block: Option<ParityLabel>,
        displacement: Option<f64>,
        states: Vec<BasisState>,
        entries: Mat<f64>,
    ) -> Self {
        debug_assert_eq!(entries.nrows(), states.len());
        debug_assert_eq!(entries.ncols(), states.len());
        Self { spec, parity_block, displacement, states, entries }
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn kind(&self) -> BasisKind {
        self.spec.kind
    }

    pub fn parity_block(&self) -> Option<ParityLabel> {
        self.parity_block
    }

    /// Displacement step `G` for coherent-basis operators.
    pub fn displacement(&self) -> Option<f64> {
        self.displacement
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[(row, col)]
    }

    pub fn entries(&self) -> &Mat<f64> {
        &self.entries
    }

    /// Largest `|H[i,j] − H[j,i]|`.
    pub fn max_asymmetry(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..i {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                worst = worst.max(self.entries[(i, j)].abs());
            }
        }
        worst
    }

    /// `H·v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim());
        let d = self.dim();
        let mut out = vec![0.0; d];
        for (j, &vj) in v.iter().enumerate() {
            if vj == 0.0 {
                continue;
            }
            let col = self.entries.col(j);
            for (o, &h) in out.iter_mut().zip(col.iter()) {
                *o += h * vj;
            }
        }
        out
    }

    /// `vᵀ H v`.
    pub fn expectation(&self, v: &[f64]) -> f64 {
        dot(v, &self.apply(v))
    }

    /// `uᵀ H v`.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        dot(u, &self.apply(v))
    }

    pub fn write_dump<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "dicke-matrix v1 kind={} dim={}", self.spec.kind, self.dim())?;
        if let Some(p) = self.parity_block {
            write!(out, " parity={}", if p == ParityLabel::Even { "even" } else { "odd" })?;
        }
        if let Some(g) = self.displacement {
            write!(out, " G={g}")?;
        }
        writeln!(out)?;
        for i in 0..self.dim() {
            let mut line = String::new();
            for j in 0..=i {
                if j > 0 {
                    line.push(' ');
                }
                line.push_str(&format!("{}", self.entries[(i, j)]));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A parsed matrix dump.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixDump {
    pub kind: BasisKind,
    pub dim: usize,
    pub parity: Option<ParityLabel>,
    pub displacement: Option<f64>,
    /// Full symmetric matrix, row-major.
    pub values: Vec<f64>,
}

impl MatrixDump {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.dim + col]
    }
}

pub fn read_dump<R: BufRead>(input: R) -> Result<MatrixDump> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input"))??;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("dicke-matrix") || fields.next() != Some("v1") {
        return Err(parse_err(1, "missing 'dicke-matrix v1' header"));
    }
    let (mut kind, mut dim, mut parity, mut displacement) = (None, None, None, None);
    for field in fields {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(1, format!("malformed header field '{field}'")))?;
        match key {
            "kind" => kind = Some(value.parse::<BasisKind>().map_err(|e| parse_err(1, e))?),
            "dim" => dim = Some(value.parse::<usize>().map_err(|e| parse_err(1, e.to_string()))?),
            "parity" => {
                parity = Some(match value {
                    "even" => ParityLabel::Even,
                    "odd" => ParityLabel::Odd,
                    other => return Err(parse_err(1, format!("bad parity '{other}'"))),
                })
            }
            "G" => displacement = Some(value.parse::<f64>().map_err(|e| parse_err(1, e.to_string()))?),
            other => return Err(parse_err(1, format!("unknown header key '{other}'"))),
        }
    }
    let kind = kind.ok_or_else(|| parse_err(1, "header lacks kind="))?;
    let dim = dim.ok_or_else(|| parse_err(1, "header lacks dim="))?;
    let mut values = vec![0.0; dim * dim];
    for row in 0..dim {
        let line_no = row + 2;
        let line = lines
            .next()
            .ok_or_else(|| parse_err(line_no, "unexpected end of input"))??;
        let mut count = 0;
        for (col, token) in line.split_whitespace().enumerate() {
            if col > row {
                return Err(parse_err(line_no, "too many values for lower triangle"));
            }
            let v: f64 = token.parse().map_err(|_| parse_err(line_no, format!("bad number '{token}'")))?;
            values[row * dim + col] = v;
            values[col * dim + row] = v;
            count += 1;
        }
        if count != row + 1 {
            return Err(parse_err(line_no, format!("expected {} values, found {count}", row + 1)));
        }
    }
    Ok(MatrixDump { kind, dim, parity, displacement, values })
}

fn parse_err(line: usize, message: impl Into<String>) -> DickeError {
    DickeError::Parse { line, message: message.into() }
}

//! Quantum Reed–Solomon codes from Vandermonde matrices.
//!
//! With `V` the Vandermonde matrix on the evaluation points and `W = (V^{-1})^T`:
//! X-type stabilizers are rows `0..r` of `V`, X-type logicals rows `r..r+k`,
//! Z-type stabilizers rows `r+k..n` of `W` and Z-type logicals rows `r..r+k` of `W`.

use thiserror::Error;

use crate::access::{all_subsets, PartySubset};
use crate::field::{dual_vandermonde, vandermonde, FieldElement, FieldError, FieldMatrix, PrimeField};
use crate::oracle::dense::{checked_dimension, C64};
use crate::oracle::{amplitude_budget, OracleError, StateVector};
use crate::pauli::{PauliError, PauliString, QuditLayout, StabilizerGroup};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RsError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("parameter constraint {constraint} violated ({detail})")]
    Parameter { constraint: &'static str, detail: String },
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("the code has no logical qudits, so its distance is undefined")]
    NoLogicals,
}

pub type Result<T> = std::result::Result<T, RsError>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsCode {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    field: PrimeField,
    points: Vec<u32>,
    v: FieldMatrix,
    w: FieldMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Distances {
    pub d_z: usize,
    pub d_x: usize,
    pub d: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeStateMode {
    /// Logical basis state `|s̄⟩` for a length-`k` label `s`.
    Coset(Vec<u32>),
    /// Uniform superposition over the classical code spanned by rows `0..r+k` of `V`.
    XLogicalEigenstate,
}

fn violated(constraint: &'static str, detail: String) -> RsError {
    RsError::Parameter { constraint, detail }
}

/// Builds the code on `points` (default `0..n`).
pub fn build_rs(n: usize, k: usize, r: usize, p: u64, points: Option<&[u32]>) -> Result<RsCode> {
    let field = PrimeField::new(p)?;
    if n == 0 {
        return Err(violated("n >= 1", "n = 0".into()));
    }
    if (p as usize) < n {
        return Err(violated("p >= n", format!("n = {n}, p = {p}")));
    }
    if r + k > n {
        return Err(violated("r + k <= n", format!("r = {r}, k = {k}, n = {n}")));
    }
    let points: Vec<u32> = match points {
        Some(pts) => pts.to_vec(),
        None => (0..n as u32).collect(),
    };
    if points.len() != n {
        return Err(violated("one evaluation point per qudit", format!("{} points for n = {n}", points.len())));
    }
    let elems: Vec<FieldElement> = points.iter().map(|&x| field.element(x as i64)).collect();
    let v = vandermonde(&elems)?;
    let w = dual_vandermonde(&v)?;
    let code = RsCode { n, k, r, field, points: elems.iter().map(|e| e.value()).collect(), v, w };
    debug_assert!(code.v.mul(&code.w.transpose()).map(|m| m == FieldMatrix::identity(field, n)).unwrap_or(false));
    Ok(code)
}

impl RsCode {
    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.modulus()
    }

    pub fn points(&self) -> &[u32] {
        &self.points
    }

    pub fn v(&self) -> &FieldMatrix {
        &self.v
    }

    pub fn w(&self) -> &FieldMatrix {
        &self.w
    }

    fn rows(m: &FieldMatrix, range: std::ops::Range<usize>) -> Vec<Vec<u32>> {
        range.map(|i| m.row(i).to_vec()).collect()
    }

    pub fn x_stabilizer_rows(&self) -> Vec<Vec<u32>> {
        Self::rows(&self.v, 0..self.r)
    }

    pub fn x_logical_rows(&self) -> Vec<Vec<u32>> {
        Self::rows(&self.v, self.r..self.r + self.k)
    }

    pub fn z_stabilizer_rows(&self) -> Vec<Vec<u32>> {
        Self::rows(&self.w, self.r + self.k..self.n)
    }

    pub fn z_logical_rows(&self) -> Vec<Vec<u32>> {
        Self::rows(&self.w, self.r..self.r + self.k)
    }

    pub fn layout(&self) -> QuditLayout {
        QuditLayout::new(self.field, self.n, (0..self.n).collect()).expect("owners in range")
    }

    fn x_string(&self, row: Vec<u32>) -> PauliString {
        PauliString::new(row, vec![0; self.n])
    }

    fn z_string(&self, row: Vec<u32>) -> PauliString {
        PauliString::new(vec![0; self.n], row)
    }

    /// Stabilizer group of the code space (mixed when `k > 0`).
    pub fn code_group(&self) -> Result<StabilizerGroup> {
        let mut gens: Vec<PauliString> = self.x_stabilizer_rows().into_iter().map(|r| self.x_string(r)).collect();
        gens.extend(self.z_stabilizer_rows().into_iter().map(|r| self.z_string(r)));
        Ok(StabilizerGroup::new(self.layout(), gens)?)
    }

    /// Stabilizer group of the X-logical eigenstate: stabilizers plus X logicals.
    pub fn x_eigenstate_group(&self) -> Result<StabilizerGroup> {
        let mut gens: Vec<PauliString> =
            Self::rows(&self.v, 0..self.r + self.k).into_iter().map(|r| self.x_string(r)).collect();
        gens.extend(self.z_stabilizer_rows().into_iter().map(|r| self.z_string(r)));
        Ok(StabilizerGroup::new(self.layout(), gens)?)
    }

    pub fn x_logicals(&self) -> Vec<PauliString> {
        self.x_logical_rows().into_iter().map(|r| self.x_string(r)).collect()
    }

    pub fn z_logicals(&self) -> Vec<PauliString> {
        self.z_logical_rows().into_iter().map(|r| self.z_string(r)).collect()
    }

    fn rank_on(&self, rows: std::ops::Range<usize>, cols: &[usize]) -> usize {
        if rows.is_empty() || cols.is_empty() {
            return 0;
        }
        let idx: Vec<usize> = rows.collect();
        self.v.select_rows(&idx).select_columns(cols).rank()
    }

    /// `(g_X, g_Z)`: independent X- and Z-type logical operators supported on `subset`.
    pub fn logical_counts(&self, subset: PartySubset) -> (usize, usize) {
        let a: Vec<usize> = subset.iter().filter(|&q| q < self.n).collect();
        let ac: Vec<usize> = subset.complement(self.n).to_vec();
        let (r, k) = (self.r, self.k);
        // Z type on A: dim ker V[0..r, A] - dim ker V[0..r+k, A]
        let g_z = self.rank_on(0..r + k, &a) - self.rank_on(0..r, &a);
        // X type on A: combinations of rows vanishing on A^c, modulo stabilizer combinations
        let all = (r + k) - self.rank_on(0..r + k, &ac);
        let stab = r - self.rank_on(0..r, &ac);
        (all - stab, g_z)
    }

    /// Closed-form counts `(clamp(ℓ+r+k−n), clamp(ℓ−r))` for a subset of size `ℓ`.
    pub fn predicted_counts(&self, size: usize) -> (usize, usize) {
        let clamp = |v: isize| v.clamp(0, self.k as isize) as usize;
        let l = size as isize;
        let (n, k, r) = (self.n as isize, self.k as isize, self.r as isize);
        (clamp(l + r + k - n), clamp(l - r))
    }

    /// Code distances; brute force scans subsets in increasing size.
    pub fn distance(&self, brute_force: bool) -> Result<Distances> {
        if !brute_force {
            let d_z = self.r + 1;
            let d_x = self.n - self.r - self.k + 1;
            return Ok(Distances { d_z, d_x, d: d_z.min(d_x) });
        }
        if self.k == 0 {
            return Err(RsError::NoLogicals);
        }
        let mut d_z = None;
        let mut d_x = None;
        for s in all_subsets(self.n) {
            if d_z.is_some() && d_x.is_some() {
                break;
            }
            let (gx, gz) = self.logical_counts(s);
            if d_z.is_none() && gz > 0 {
                d_z = Some(s.len());
            }
            if d_x.is_none() && gx > 0 {
                d_x = Some(s.len());
            }
        }
        let (d_z, d_x) = (d_z.expect("full set supports logicals"), d_x.expect("full set supports logicals"));
        Ok(Distances { d_z, d_x, d: d_z.min(d_x) })
    }

    /// Dense codeword superposition; every generator is checked to fix it.
    pub fn code_state(&self, mode: &CodeStateMode) -> Result<StateVector> {
        let p = self.p() as usize;
        let budget = amplitude_budget();
        let dim = checked_dimension(self.p(), self.n, budget, "code state")?;
        let (free_rows, offset): (usize, Vec<u32>) = match mode {
            CodeStateMode::Coset(s) => {
                if s.len() != self.k {
                    return Err(violated("label length = k", format!("{} entries for k = {}", s.len(), self.k)));
                }
                let mut off = vec![0u32; self.n];
                for (j, &sj) in s.iter().enumerate() {
                    self.field.axpy(&mut off, sj % self.p(), self.v.row(self.r + j));
                }
                (self.r, off)
            }
            CodeStateMode::XLogicalEigenstate => (self.r + self.k, vec![0; self.n]),
        };
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        let count = p.pow(free_rows as u32);
        for code in 0..count {
            let mut c = code;
            let mut word = offset.clone();
            for i in 0..free_rows {
                let ci = (c % p) as u32;
                c /= p;
                self.field.axpy(&mut word, ci, self.v.row(i));
            }
            let idx = word.iter().fold(0usize, |acc, &d| acc * p + d as usize);
            amps[idx] += C64::new(1.0, 0.0);
        }
        let state = StateVector::from_amplitudes(self.layout(), amps)?;
        let group = match mode {
            CodeStateMode::Coset(_) => self.code_group()?,
            CodeStateMode::XLogicalEigenstate => self.x_eigenstate_group()?,
        };
        for g in group.generators() {
            let e = state.expectation(g);
            if (e - C64::new(1.0, 0.0)).norm() > 1e-10 {
                return Err(RsError::Oracle(OracleError::Invalid(format!(
                    "generator {} has expectation {e} on the code state",
                    g.encode()
                ))));
            }
        }
        Ok(state)
    }
}

//! Dense complex state vectors over qudits of a common prime dimension.
//!
//! Basis index convention: qudit 0 is the most significant digit.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{OracleError, Result};
use crate::access::PartySubset;
use crate::pauli::{PauliString, QuditLayout};

pub type C64 = Complex64;

/// Values below this are treated as zero eigenvalues.
pub const SPECTRUM_CUTOFF: f64 = 1e-12;

/// Matrix representation `ω^{b j} |j + a⟩⟨j|` of `X^a Z^b` on one qudit, times
/// `i^{ab}` for qubits so that every qubit Pauli is Hermitian.
pub fn single_qudit_action(p: u32, a: u32, b: u32, j: u32) -> (u32, C64) {
    let target = (j + a) % p;
    let mut phase = C64::from_polar(1.0, 2.0 * PI * ((b as u64 * j as u64) % p as u64) as f64 / p as f64);
    if p == 2 && a == 1 && b == 1 {
        phase *= C64::new(0.0, 1.0);
    }
    (target, phase)
}

/// Dense `p × p` matrix of the canonical single-qudit operator.
pub fn single_qudit_matrix(p: u32, a: u32, b: u32) -> DMatrix<C64> {
    let d = p as usize;
    let mut m = DMatrix::zeros(d, d);
    for j in 0..p {
        let (t, ph) = single_qudit_action(p, a, b, j);
        m[(t as usize, j as usize)] = ph;
    }
    m
}

/// Dense matrix of a Pauli string on the listed qudits (first listed is most significant).
pub fn pauli_matrix(p: u32, s: &PauliString, qudits: &[usize]) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for &q in qudits {
        m = m.kronecker(&single_qudit_matrix(p, s.x[q], s.z[q]));
    }
    m
}

#[derive(Clone, Debug)]
pub struct StateVector {
    layout: QuditLayout,
    amps: Vec<C64>,
}

pub(crate) fn checked_dimension(p: u32, qudits: usize, budget: usize, what: &str) -> Result<usize> {
    let mut d: usize = 1;
    for _ in 0..qudits {
        d = match d.checked_mul(p as usize) {
            Some(v) if v <= budget => v,
            _ => {
                return Err(OracleError::Budget {
                    what: what.to_string(),
                    requested: format!("{p}^{qudits}"),
                    budget,
                })
            }
        };
    }
    Ok(d)
}

impl StateVector {
    /// Normalizes `amps`; the length must be `p^qudits`.
    pub fn from_amplitudes(layout: QuditLayout, mut amps: Vec<C64>) -> Result<Self> {
        let expected = (layout.p() as usize).pow(layout.qudits() as u32);
        if amps.len() != expected {
            return Err(OracleError::Invalid(format!("{} amplitudes for dimension {expected}", amps.len())));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(OracleError::Invalid("zero vector".into()));
        }
        for a in amps.iter_mut() {
            *a /= norm;
        }
        Ok(StateVector { layout, amps })
    }

    pub fn layout(&self) -> &QuditLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn dims(&self) -> Vec<usize> {
        vec![self.layout.p() as usize; self.layout.qudits()]
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|⟨self|other⟩|`, i.e. equality up to global phase when 1.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }

    fn digits(&self, mut idx: usize, out: &mut [u32]) {
        let p = self.layout.p() as usize;
        for q in (0..out.len()).rev() {
            out[q] = (idx % p) as u32;
            idx /= p;
        }
    }

    /// Applies the canonical operator of `s`.
    pub fn apply_pauli(&mut self, s: &PauliString) {
        self.amps = apply_pauli_to(&self.amps, self.layout.p(), self.layout.qudits(), s);
    }

    pub fn expectation(&self, s: &PauliString) -> C64 {
        let moved = apply_pauli_to(&self.amps, self.layout.p(), self.layout.qudits(), s);
        self.amps.iter().zip(&moved).map(|(a, b)| a.conj() * b).sum()
    }

    /// Applies a unitary on the listed qudits (first listed is most significant).
    pub fn apply_unitary(&mut self, qudits: &[usize], u: &DMatrix<C64>) {
        let p = self.layout.p() as usize;
        let m = self.layout.qudits();
        let k = qudits.len();
        let sub = p.pow(k as u32);
        assert_eq!(u.nrows(), sub, "unitary size");
        let strides: Vec<usize> = qudits.iter().map(|&q| p.pow((m - 1 - q) as u32)).collect();
        let mut offsets = vec![0usize; sub];
        for (s, off) in offsets.iter_mut().enumerate() {
            let mut rem = s;
            let mut o = 0;
            for t in (0..k).rev() {
                o += (rem % p) * strides[t];
                rem /= p;
            }
            *off = o;
        }
        let mut buf = vec![C64::new(0.0, 0.0); sub];
        let mut digits = vec![0u32; m];
        for base in 0..self.amps.len() {
            self.digits(base, &mut digits);
            if qudits.iter().any(|&q| digits[q] != 0) {
                continue;
            }
            for s in 0..sub {
                buf[s] = self.amps[base + offsets[s]];
            }
            for r in 0..sub {
                let mut acc = C64::new(0.0, 0.0);
                for c in 0..sub {
                    acc += u[(r, c)] * buf[c];
                }
                self.amps[base + offsets[r]] = acc;
            }
        }
    }

    /// Reduced density matrix on `qudits`, in the listed order.
    pub fn reduced_density(&self, qudits: &[usize]) -> DMatrix<C64> {
        let (m, _, _) = self.split_matrix(qudits);
        &m * m.adjoint()
    }

    /// Reshapes into a `d_A × d_B` matrix with rows indexed by `qudits`.
    fn split_matrix(&self, qudits: &[usize]) -> (DMatrix<C64>, usize, usize) {
        let p = self.layout.p() as usize;
        let m = self.layout.qudits();
        let mut in_a = vec![false; m];
        for &q in qudits {
            in_a[q] = true;
        }
        let rest: Vec<usize> = (0..m).filter(|&q| !in_a[q]).collect();
        let da = p.pow(qudits.len() as u32);
        let db = p.pow(rest.len() as u32);
        let mut mat = DMatrix::<C64>::zeros(da, db);
        let mut digits = vec![0u32; m];
        for (idx, &a) in self.amps.iter().enumerate() {
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            self.digits(idx, &mut digits);
            let ia = qudits.iter().fold(0usize, |acc, &q| acc * p + digits[q] as usize);
            let ib = rest.iter().fold(0usize, |acc, &q| acc * p + digits[q] as usize);
            mat[(ia, ib)] = a;
        }
        (mat, da, db)
    }

    /// Schmidt coefficients squared across `qudits : rest`.
    pub fn cut_spectrum(&self, qudits: &[usize]) -> Spectrum {
        let (mat, da, db) = self.split_matrix(qudits);
        let gram = if da <= db { &mat * mat.adjoint() } else { mat.adjoint() * &mat };
        spectrum_of_density(&gram)
    }
}

pub(crate) fn apply_pauli_to(amps: &[C64], p: u32, m: usize, s: &PauliString) -> Vec<C64> {
    let pu = p as usize;
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    let mut digits = vec![0u32; m];
    // Per-qudit tables of target digit and phase.
    let tables: Vec<Vec<(u32, C64)>> =
        (0..m).map(|q| (0..p).map(|j| single_qudit_action(p, s.x[q], s.z[q], j)).collect()).collect();
    for (idx, &a) in amps.iter().enumerate() {
        if a == C64::new(0.0, 0.0) {
            continue;
        }
        let mut rem = idx;
        for q in (0..m).rev() {
            digits[q] = (rem % pu) as u32;
            rem /= pu;
        }
        let mut phase = C64::new(1.0, 0.0);
        let mut target = 0usize;
        for q in 0..m {
            let (t, ph) = tables[q][digits[q] as usize];
            phase *= ph;
            target = target * pu + t as usize;
        }
        out[target] += phase * a;
    }
    out
}

/// Descending eigenvalues above [`SPECTRUM_CUTOFF`].
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.retain(|&v| v > SPECTRUM_CUTOFF);
        values.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
        Spectrum(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Von Neumann entropy in nats.
    pub fn entropy(&self) -> f64 {
        -self.0.iter().map(|&v| v * v.ln()).sum::<f64>()
    }

    /// Spectrum of a tensor product.
    pub fn tensor(&self, other: &Spectrum) -> Spectrum {
        let mut v = Vec::with_capacity(self.len() * other.len());
        for &a in &self.0 {
            for &b in &other.0 {
                v.push(a * b);
            }
        }
        Spectrum::new(v)
    }

    /// Groups values lying within `tol` of their neighbours; returns (value, multiplicity).
    pub fn clusters(&self, tol: f64) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        let mut last = f64::NAN;
        for &v in &self.0 {
            match out.last_mut() {
                Some((_, count)) if (last - v).abs() <= tol => *count += 1,
                _ => out.push((v, 1)),
            }
            last = v;
        }
        out
    }
}

/// Eigenvalues of a Hermitian matrix, as a spectrum.
pub fn spectrum_of_density(rho: &DMatrix<C64>) -> Spectrum {
    if rho.nrows() == 0 {
        return Spectrum(vec![]);
    }
    if rho.nrows() == 1 {
        return Spectrum::new(vec![rho[(0, 0)].re]);
    }
    Spectrum::new(rho.symmetric_eigenvalues().iter().copied().collect())
}

/// Squared Schmidt coefficients of `state` across `cut : rest`.
pub fn schmidt_spectrum(state: &StateVector, cut: PartySubset) -> Spectrum {
    let qudits = state.layout().qudits_of(cut);
    state.cut_spectrum(&qudits)
}

/// True when the spectrum factors as `uniform_d ⊗ residual`: every cluster of
/// equal values has multiplicity divisible by `d`.
pub fn epr_extractable(spectrum: &Spectrum, d: usize, tol: f64) -> bool {
    !spectrum.is_empty() && spectrum.clusters(tol).iter().all(|&(_, mult)| mult % d == 0)
}

/// Fidelity with `Φ_d` reachable by local unitaries alone: `(Σ_{i<d} √λ_i)^2 / d`.
pub fn local_unitary_fidelity(spectrum: &Spectrum, d: usize) -> f64 {
    let s: f64 = spectrum.values().iter().take(d).map(|v| v.sqrt()).sum();
    s * s / d as f64
}

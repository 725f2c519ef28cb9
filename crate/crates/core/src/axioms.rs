//! Modularity axioms with machine-readable diagnostics.
//!
//! [`validate`] runs every check even after a failure, so a single report
//! carries the complete failure profile of a dataset. Each check also
//! records its largest measured deviation, whether or not it passed.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::modular_data::{is_involution_fixing_vacuum, nearest_permutation, s_squared, verlinde_raw, ModularData};
use crate::numerics::{diag, matrix_max_dev, CMatrix, Complex, Tolerance};

pub const S_UNITARY: &str = "s_unitary";
pub const S_SYMMETRIC: &str = "s_symmetric";
pub const T_UNIMODULAR: &str = "t_unimodular";
pub const S_SQUARED_CONJUGATION: &str = "s_squared_conjugation";
pub const MODULAR_RELATION: &str = "modular_relation";
pub const VERLINDE: &str = "verlinde";
pub const POSITIVITY: &str = "positivity";
pub const CONJUGATION_INVARIANCE: &str = "conjugation_invariance";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub check_id: String,
    pub severity: Severity,
    pub indices: Vec<Vec<usize>>,
    pub measured: f64,
    pub message: String,
}

impl Diagnostic {
    pub fn error(check_id: &str, indices: Vec<Vec<usize>>, measured: f64, message: impl Into<String>) -> Self {
        Diagnostic {
            check_id: check_id.to_string(),
            severity: Severity::Error,
            indices,
            measured: measured.max(0.0),
            message: message.into(),
        }
    }

    pub fn warning(check_id: &str, indices: Vec<Vec<usize>>, measured: f64, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Diagnostic::error(check_id, indices, measured, message)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub verdict: Verdict,
    pub diagnostics: Vec<Diagnostic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention_note: Option<String>,
    /// Largest deviation measured by each check that ran.
    pub deviations: BTreeMap<String, f64>,
}

impl Default for AxiomReport {
    fn default() -> Self {
        AxiomReport {
            verdict: Verdict::Pass,
            diagnostics: Vec::new(),
            convention_note: None,
            deviations: BTreeMap::new(),
        }
    }
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn push(&mut self, d: Diagnostic) {
        if d.severity == Severity::Error {
            self.verdict = Verdict::Fail;
        }
        self.diagnostics.push(d);
    }

    pub fn record(&mut self, check_id: &str, measured: f64) {
        let e = self.deviations.entry(check_id.to_string()).or_insert(0.0);
        *e = e.max(measured);
    }

    pub fn merge(&mut self, other: AxiomReport) {
        for d in other.diagnostics {
            self.push(d);
        }
        for (k, v) in other.deviations {
            self.record(&k, v);
        }
        if self.convention_note.is_none() {
            self.convention_note = other.convention_note;
        }
    }

    pub fn max_deviation(&self) -> f64 {
        self.deviations.values().copied().fold(0.0, f64::max)
    }

    pub fn has_error(&self, check_id: &str) -> bool {
        self.diagnostics
            .iter()
            .any(|d| d.severity == Severity::Error && d.check_id == check_id)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Error)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Entries of `m` further than `tol` from `target`, and the max deviation.
fn offending(m: &CMatrix, target: impl Fn(usize, usize) -> Complex, tol: f64) -> (Vec<Vec<usize>>, f64) {
    let mut idx = Vec::new();
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let d = (m[(i, j)] - target(i, j)).norm();
            dev = dev.max(d);
            if d > tol {
                idx.push(vec![i, j]);
            }
        }
    }
    (idx, dev)
}

fn modular_product(s: &CMatrix, t: &[Complex]) -> CMatrix {
    let st = s * diag(t);
    &st * &st * &st
}

pub fn validate(md: &ModularData, pol: &Tolerance) -> AxiomReport {
    let n = md.rank();
    let s = md.s();
    let t = md.t();
    let tol = pol.eq_tol;
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    let mut report = AxiomReport::default();

    // (a) S S^† = 1
    let sst = s * s.adjoint();
    let (idx, dev) = offending(&sst, |i, j| if i == j { one } else { zero }, tol);
    report.record(S_UNITARY, dev);
    if !idx.is_empty() {
        report.push(Diagnostic::error(S_UNITARY, idx, dev, "S is not unitary"));
    }

    // (b) S = S^T
    let st = s.transpose();
    let (idx, dev) = offending(s, |i, j| st[(i, j)], tol);
    report.record(S_SYMMETRIC, dev);
    if !idx.is_empty() {
        report.push(Diagnostic::error(S_SYMMETRIC, idx, dev, "S is not symmetric"));
    }

    // (c) |T_i| = 1
    let devs: Vec<f64> = t.iter().map(|z| (z.norm() - 1.0).abs()).collect();
    let dev = devs.iter().copied().fold(0.0, f64::max);
    report.record(T_UNIMODULAR, dev);
    let idx: Vec<Vec<usize>> = (0..n).filter(|&i| devs[i] > tol).map(|i| vec![i]).collect();
    if !idx.is_empty() {
        report.push(Diagnostic::error(T_UNIMODULAR, idx, dev, "T entry is not a phase"));
    }

    // (d) S² = C, a permutation with C² = 1 and C(0) = 0
    let c = s_squared(md);
    let (perm, dev) = nearest_permutation(&c);
    report.record(S_SQUARED_CONJUGATION, dev);
    let conj = if dev > tol {
        let (idx, _) = offending(&c, |i, j| if perm[i] == j { one } else { zero }, tol);
        report.push(Diagnostic::error(
            S_SQUARED_CONJUGATION,
            idx,
            dev,
            "S² is not a permutation matrix",
        ));
        None
    } else if !is_involution_fixing_vacuum(&perm) {
        report.push(Diagnostic::error(
            S_SQUARED_CONJUGATION,
            perm.iter().enumerate().map(|(i, &j)| vec![i, j]).collect(),
            1.0,
            format!("S² permutation {perm:?} is not an involution fixing 0"),
        ));
        None
    } else {
        Some(perm)
    };

    // (e) (ST)³ = C, no global phase slack
    let m = modular_product(s, t);
    let (idx, dev) = offending(&m, |i, j| c[(i, j)], tol);
    report.record(MODULAR_RELATION, dev);
    if !idx.is_empty() {
        report.push(Diagnostic::error(
            MODULAR_RELATION,
            idx,
            dev,
            "(ST)³ differs from C = S²",
        ));
    }

    // (f) Verlinde integrality and N^0_{i,j} = δ_{j,ī}
    match verlinde_raw(md) {
        Ok(raw) => {
            let mut idx = Vec::new();
            let mut dev: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let v = raw[(i * n + j) * n + k];
                        let nearest = v.re.round().max(0.0);
                        let d = (v - Complex::new(nearest, 0.0)).norm();
                        let d = match (&conj, k) {
                            (Some(p), 0) => d.max((v - Complex::new(f64::from(u8::from(p[i] == j)), 0.0)).norm()),
                            _ => d,
                        };
                        dev = dev.max(d);
                        if d > pol.int_tol {
                            idx.push(vec![i, j, k]);
                        }
                    }
                }
            }
            report.record(VERLINDE, dev);
            if !idx.is_empty() {
                report.push(Diagnostic::error(
                    VERLINDE,
                    idx,
                    dev,
                    "Verlinde sums are not nonnegative integers with N^0_{i,j} = δ_{j,ī}",
                ));
            }
        }
        Err(e) => report.push(Diagnostic::error(VERLINDE, vec![], 1.0, e.to_string())),
    }

    // (g) S_{0,i} > 0 and d_i >= 1
    let s00 = s[(0, 0)].re;
    let mut idx = Vec::new();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        let z = s[(0, i)];
        let d = z.im.abs().max(-z.re).max(1.0 - z.re / s00).max(0.0);
        dev = dev.max(d);
        if d > tol {
            idx.push(vec![i]);
        }
    }
    report.record(POSITIVITY, dev);
    if !idx.is_empty() {
        report.push(Diagnostic::error(
            POSITIVITY,
            idx,
            dev,
            "dimension row must satisfy S_{0,i} > 0 and d_i >= 1",
        ));
    }

    // (h) d_ī = d_i and ω_ī = ω_i
    if let Some(p) = &conj {
        let t0 = t[0];
        let mut idx = Vec::new();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            let j = p[i];
            let dd = ((s[(0, i)] - s[(0, j)]) / s00).norm();
            let dw = (t[i] / t0 - t[j] / t0).norm();
            let d = dd.max(dw);
            dev = dev.max(d);
            if d > tol {
                idx.push(vec![i, j]);
            }
        }
        report.record(CONJUGATION_INVARIANCE, dev);
        if !idx.is_empty() {
            report.push(Diagnostic::error(
                CONJUGATION_INVARIANCE,
                idx,
                dev,
                "dual objects must share dimension and twist",
            ));
        }
    }

    report.convention_note = detect_convention(md, pol);
    report
}

/// Note emitted when `(ST)³ = C` fails but holds after conjugating `S`.
/// The data is never modified.
pub fn detect_convention(md: &ModularData, pol: &Tolerance) -> Option<String> {
    let s = md.s();
    let t = md.t();
    let primary = matrix_max_dev(&modular_product(s, t), &(s * s));
    if primary <= pol.eq_tol {
        return None;
    }
    let sbar: CMatrix = DMatrix::from_fn(s.nrows(), s.ncols(), |i, j| s[(i, j)].conj());
    let conjugated = matrix_max_dev(&modular_product(&sbar, t), &(&sbar * &sbar));
    if conjugated <= pol.eq_tol {
        Some(format!(
            "(ST)³ = C fails (deviation {primary:.3e}) but holds with S replaced by its complex \
             conjugate; the input appears to use the conjugate S convention, \
             in which (S̄T)³ = S̄². Conjugate S before use."
        ))
    } else {
        None
    }
}

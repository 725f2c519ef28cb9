//! Traces of self-braidings from modular data.
//!
//! For simple objects `i` and `k`, `τ_{k,i}` is the trace of the
//! self-braiding of `i` restricted to the channel `k ≺ i × i`. It depends
//! only on modular data:
//!
//! ```text
//! τ_{k,i} = ω_i^{-1} Σ_{r,s} conj(S_{r,k}) S_{s,0} N^i_{r,s} ω_s² / ω_r²
//! ```
//!
//! The vacuum channel gives the Frobenius-Schur indicator `ν_i = ω_i τ_{0,i}`,
//! which also has the closed form `Σ_{r,s} S_{r,0} S_{s,0} N^i_{r,s} ω_r² / ω_s²`.
//! On a channel of multiplicity `N^k_{i,i}` the self-braiding has eigenvalues
//! `±ω_i^{-1} ω_k^{1/2}`, so `t = ω_i ω_k^{-1/2} τ_{k,i}` must be an integer
//! in `[-N, N]` with the parity of `N`, and the eigenvalue multiplicities are
//! `m± = (N ± t) / 2`.

use serde::{Deserialize, Serialize};

use crate::axioms::{validate, AxiomReport, Diagnostic};
use crate::error::{Error, Result};
use crate::modular_data::{derive, DerivedData, ModularData};
use crate::numerics::{as_integer, principal_sqrt, Complex, Tolerance};

pub const TRACE_CONSISTENCY: &str = "trace_consistency";
pub const FS_ROUTES: &str = "fs_routes";
pub const FS_INDICATOR: &str = "fs_indicator";
pub const MULTIPLICITY: &str = "multiplicity";
pub const TRACE_CONJUGATION: &str = "trace_conjugation";
pub const TWIST_TRACE: &str = "twist_trace";
pub const DERIVE: &str = "derive";

/// `tau[k][i] = τ_{k,i}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceTable {
    #[serde(with = "crate::format::pair_table")]
    pub tau: Vec<Vec<Complex>>,
}

impl TraceTable {
    pub fn get(&self, k: usize, i: usize) -> Complex {
        self.tau[k][i]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndicatorVector {
    pub nu: Vec<i8>,
}

/// Eigenvalue multiplicities of the self-braidings, indexed `[k][i]`.
/// `t[k][i] = m_plus - m_minus` is kept so that the labeling under the
/// other square-root branch can be re-derived.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityTable {
    pub m_plus: Vec<Vec<u32>>,
    pub m_minus: Vec<Vec<u32>>,
    pub t: Vec<Vec<i64>>,
}

/// Which square root of `ω_k` labels the `+` eigenvalue.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SqrtBranch {
    #[default]
    Principal,
    Opposite,
}

impl SqrtBranch {
    pub fn sqrt(self, w: Complex, pol: &Tolerance) -> Result<Complex> {
        let r = principal_sqrt(w, pol)?;
        Ok(match self {
            SqrtBranch::Principal => r,
            SqrtBranch::Opposite => -r,
        })
    }
}

/// The double sum for a single entry, evaluated literally.
pub fn trace_entry(md: &ModularData, dd: &DerivedData, k: usize, i: usize) -> Complex {
    let n = md.rank();
    let s = md.s();
    let w = &dd.twists;
    let mut acc = Complex::new(0.0, 0.0);
    for r in 0..n {
        for sidx in 0..n {
            let mult = dd.fusion.get(r, sidx, i);
            if mult == 0 {
                continue;
            }
            acc += s[(r, k)].conj() * s[(sidx, 0)] * f64::from(mult) * (w[sidx] * w[sidx]) / (w[r] * w[r]);
        }
    }
    acc / w[i]
}

fn raw_table(md: &ModularData, dd: &DerivedData) -> Vec<Vec<Complex>> {
    let n = md.rank();
    (0..n)
        .map(|k| (0..n).map(|i| trace_entry(md, dd, k, i)).collect())
        .collect()
}

/// Evaluates every `τ_{k,i}`. Entries on channels with `N^k_{i,i} = 0` must
/// vanish within `eq_tol` and are then set to exactly zero.
pub fn trace_table(md: &ModularData, dd: &DerivedData, pol: &Tolerance) -> Result<TraceTable> {
    let mut tau = raw_table(md, dd);
    for (k, row) in tau.iter_mut().enumerate() {
        for (i, z) in row.iter_mut().enumerate() {
            if dd.fusion.get(i, i, k) == 0 {
                if z.norm() > pol.eq_tol {
                    return Err(Error::InternalInconsistency {
                        k,
                        i,
                        measured: z.norm(),
                    });
                }
                *z = Complex::new(0.0, 0.0);
            }
        }
    }
    Ok(TraceTable { tau })
}

/// `ν_i = ω_i τ_{0,i}`, unrounded.
pub fn fs_from_trace(dd: &DerivedData, tt: &TraceTable) -> Vec<Complex> {
    dd.twists.iter().zip(&tt.tau[0]).map(|(w, t)| w * t).collect()
}

/// `ν_i = Σ_{r,s} S_{r,0} S_{s,0} N^i_{r,s} ω_r² / ω_s²`, unrounded.
pub fn fs_closed_form(md: &ModularData, dd: &DerivedData) -> Vec<Complex> {
    let n = md.rank();
    let s = md.s();
    let w = &dd.twists;
    (0..n)
        .map(|i| {
            let mut acc = Complex::new(0.0, 0.0);
            for r in 0..n {
                for q in 0..n {
                    let mult = dd.fusion.get(r, q, i);
                    if mult != 0 {
                        acc += s[(r, 0)] * s[(q, 0)] * f64::from(mult) * (w[r] * w[r]) / (w[q] * w[q]);
                    }
                }
            }
            acc
        })
        .collect()
}

pub fn fs_indicators(md: &ModularData, dd: &DerivedData, tt: &TraceTable, pol: &Tolerance) -> Result<IndicatorVector> {
    let via_trace = fs_from_trace(dd, tt);
    let closed = fs_closed_form(md, dd);
    let mut nu = Vec::with_capacity(via_trace.len());
    for (i, (a, b)) in via_trace.iter().zip(&closed).enumerate() {
        if (a - b).norm() > pol.eq_tol {
            return Err(Error::FsIndicator {
                index: i,
                reason: format!("routes disagree: ω_i τ_0i = {a}, closed form = {b}"),
            });
        }
        let v = match as_integer(*a, pol) {
            Some(v @ -1..=1) => v as i8,
            _ => {
                return Err(Error::FsIndicator {
                    index: i,
                    reason: format!("value {a} is not in {{-1, 0, +1}}"),
                })
            }
        };
        if (v == 0) == dd.is_self_dual(i) {
            return Err(Error::FsIndicator {
                index: i,
                reason: format!(
                    "ν = {v} but object is {}self-dual",
                    if dd.is_self_dual(i) { "" } else { "not " }
                ),
            });
        }
        nu.push(v);
    }
    Ok(IndicatorVector { nu })
}

/// `t = ω_i ω_k^{-1/2} τ_{k,i}` under the given branch.
pub fn channel_eigen_trace(
    dd: &DerivedData,
    tt: &TraceTable,
    k: usize,
    i: usize,
    branch: SqrtBranch,
    pol: &Tolerance,
) -> Result<Complex> {
    let root = branch.sqrt(dd.twists[k], pol)?;
    Ok(dd.twists[i] / root * tt.get(k, i))
}

/// Checks the four conditions on `t` for one channel and returns the
/// integer value.
fn check_channel(t: Complex, mult: u32, pol: &Tolerance) -> std::result::Result<i64, &'static str> {
    if t.im.abs() > pol.int_tol {
        return Err("not real");
    }
    let v = as_integer(t, pol).ok_or("not an integer")?;
    if v.unsigned_abs() > u64::from(mult) {
        return Err("out of range");
    }
    if (i64::from(mult) - v).rem_euclid(2) != 0 {
        return Err("parity differs from N");
    }
    Ok(v)
}

pub fn eigen_multiplicities(
    md: &ModularData,
    dd: &DerivedData,
    tt: &TraceTable,
    pol: &Tolerance,
) -> Result<MultiplicityTable> {
    eigen_multiplicities_with_branch(md, dd, tt, SqrtBranch::Principal, pol)
}

pub fn eigen_multiplicities_with_branch(
    md: &ModularData,
    dd: &DerivedData,
    tt: &TraceTable,
    branch: SqrtBranch,
    pol: &Tolerance,
) -> Result<MultiplicityTable> {
    let n = md.rank();
    let mut table = MultiplicityTable {
        m_plus: vec![vec![0; n]; n],
        m_minus: vec![vec![0; n]; n],
        t: vec![vec![0; n]; n],
    };
    for k in 0..n {
        for i in 0..n {
            let mult = dd.fusion.get(i, i, k);
            let t = channel_eigen_trace(dd, tt, k, i, branch, pol)?;
            let v = check_channel(t, mult, pol).map_err(|c| Error::Realizability {
                k,
                i,
                condition: c.to_string(),
            })?;
            let mult = i64::from(mult);
            table.m_plus[k][i] = ((mult + v) / 2) as u32;
            table.m_minus[k][i] = ((mult - v) / 2) as u32;
            table.t[k][i] = v;
        }
    }
    Ok(table)
}

/// `|Σ_k d_k τ_{k,i} - d_i ω_i|` for every `i`.
pub fn twist_trace_deviations(dd: &DerivedData, tt: &TraceTable) -> Vec<f64> {
    let n = dd.rank();
    (0..n)
        .map(|i| {
            let lhs: Complex = (0..n).map(|k| tt.get(k, i) * dd.dims[k]).sum();
            (lhs - dd.twists[i] * dd.dims[i]).norm()
        })
        .collect()
}

/// Axiom checks followed by every trace-derived constraint.
pub fn realizability_report(md: &ModularData, pol: &Tolerance) -> AxiomReport {
    realizability_report_with_branch(md, SqrtBranch::Principal, pol)
}

pub fn realizability_report_with_branch(md: &ModularData, branch: SqrtBranch, pol: &Tolerance) -> AxiomReport {
    let mut report = validate(md, pol);
    report.merge(trace_constraints(md, branch, pol));
    report
}

/// The trace-derived constraints alone, without the axiom checks.
pub fn trace_constraints(md: &ModularData, branch: SqrtBranch, pol: &Tolerance) -> AxiomReport {
    let mut report = AxiomReport::default();
    let dd = match derive(md, pol) {
        Ok(dd) => dd,
        Err(e) => {
            report.push(Diagnostic::error(
                DERIVE,
                vec![],
                1.0,
                format!("cannot derive data: {e}"),
            ));
            return report;
        }
    };
    let n = md.rank();
    let raw = TraceTable {
        tau: raw_table(md, &dd),
    };

    // channels with N^k_{i,i} = 0 must vanish; |τ| <= N elsewhere
    let mut idx = Vec::new();
    let mut dev: f64 = 0.0;
    for k in 0..n {
        for i in 0..n {
            let mult = f64::from(dd.fusion.get(i, i, k));
            let d = (raw.get(k, i).norm() - mult).max(0.0);
            dev = dev.max(d);
            if d > pol.eq_tol {
                idx.push(vec![k, i]);
            }
        }
    }
    report.record(TRACE_CONSISTENCY, dev);
    if !idx.is_empty() {
        report.push(Diagnostic::error(
            TRACE_CONSISTENCY,
            idx,
            dev,
            "|τ_{k,i}| exceeds N^k_{i,i} (nonzero trace on an empty channel)",
        ));
    }

    // both indicator routes, values in {0, ±1}, zero exactly off self-dual objects
    let via_trace = fs_from_trace(&dd, &raw);
    let closed = fs_closed_form(md, &dd);
    let mut route_idx = Vec::new();
    let mut route_dev: f64 = 0.0;
    let mut val_idx = Vec::new();
    let mut val_dev: f64 = 0.0;
    for i in 0..n {
        let d = (via_trace[i] - closed[i]).norm();
        route_dev = route_dev.max(d);
        if d > pol.eq_tol {
            route_idx.push(vec![i]);
        }
        let allowed: &[f64] = if dd.is_self_dual(i) { &[-1.0, 1.0] } else { &[0.0] };
        let d = allowed
            .iter()
            .map(|&a| (via_trace[i] - Complex::new(a, 0.0)).norm())
            .fold(f64::INFINITY, f64::min);
        val_dev = val_dev.max(d);
        if d > pol.int_tol {
            val_idx.push(vec![i]);
        }
    }
    report.record(FS_ROUTES, route_dev);
    report.record(FS_INDICATOR, val_dev);
    if !route_idx.is_empty() {
        report.push(Diagnostic::error(
            FS_ROUTES,
            route_idx,
            route_dev,
            "ω_i τ_{0,i} disagrees with the closed-form indicator sum",
        ));
    }
    if !val_idx.is_empty() {
        report.push(Diagnostic::error(
            FS_INDICATOR,
            val_idx,
            val_dev,
            "FS indicator must be ±1 on self-dual objects and 0 otherwise",
        ));
    }

    // t = ω_i ω_k^{-1/2} τ_{k,i}: real, integral, |t| <= N, t ≡ N mod 2
    let mut dev: f64 = 0.0;
    for k in 0..n {
        for i in 0..n {
            let mult = dd.fusion.get(i, i, k);
            let t = match channel_eigen_trace(&dd, &raw, k, i, branch, pol) {
                Ok(t) => t,
                Err(e) => {
                    report.push(Diagnostic::error(MULTIPLICITY, vec![vec![k, i]], 1.0, e.to_string()));
                    continue;
                }
            };
            dev = dev.max((t - Complex::new(t.re.round(), 0.0)).norm());
            if let Err(cond) = check_channel(t, mult, pol) {
                let measured = (t - Complex::new(t.re.round(), 0.0)).norm();
                report.push(Diagnostic::error(
                    MULTIPLICITY,
                    vec![vec![k, i]],
                    measured,
                    format!(
                        "ω_i ω_k^(-1/2) τ_(k,i) = {:.6}{:+.6}i with N = {mult}: {cond}",
                        t.re, t.im
                    ),
                ));
            }
        }
    }
    report.record(MULTIPLICITY, dev);

    // τ_{k,i} = τ_{k̄,ī}
    let mut idx = Vec::new();
    let mut dev: f64 = 0.0;
    for k in 0..n {
        for i in 0..n {
            let d = (raw.get(k, i) - raw.get(dd.conj[k], dd.conj[i])).norm();
            dev = dev.max(d);
            if d > pol.eq_tol {
                idx.push(vec![k, i]);
            }
        }
    }
    report.record(TRACE_CONJUGATION, dev);
    if !idx.is_empty() {
        report.push(Diagnostic::error(
            TRACE_CONJUGATION,
            idx,
            dev,
            "τ_{k,i} differs from τ_{k̄,ī}",
        ));
    }

    let devs = twist_trace_deviations(&dd, &raw);
    let dev = devs.iter().copied().fold(0.0, f64::max);
    report.record(TWIST_TRACE, dev);
    let idx: Vec<Vec<usize>> = (0..n).filter(|&i| devs[i] > pol.eq_tol).map(|i| vec![i]).collect();
    if !idx.is_empty() {
        report.push(Diagnostic::warning(
            TWIST_TRACE,
            idx,
            dev,
            "Σ_k d_k τ_{k,i} differs from d_i ω_i",
        ));
    }
    report
}

/// Everything the `bantay` command shows for a dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BantayTables {
    pub traces: TraceTable,
    pub indicators: IndicatorVector,
    pub multiplicities: MultiplicityTable,
}

pub fn compute_tables(md: &ModularData, pol: &Tolerance) -> Result<(DerivedData, BantayTables)> {
    let dd = derive(md, pol)?;
    let traces = trace_table(md, &dd, pol)?;
    let indicators = fs_indicators(md, &dd, &traces, pol)?;
    let multiplicities = eigen_multiplicities(md, &dd, &traces, pol)?;
    Ok((
        dd,
        BantayTables {
            traces,
            indicators,
            multiplicities,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{approx_eq, root_of_unity};

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    fn trivial() -> ModularData {
        ModularData::from_rows(vec![vec![c(1.0)]], vec![c(1.0)], &Tolerance::default()).unwrap()
    }

    #[test]
    fn trivial_tables() {
        let pol = Tolerance::default();
        let (_, t) = compute_tables(&trivial(), &pol).unwrap();
        assert_eq!(t.traces.tau, vec![vec![c(1.0)]]);
        assert_eq!(t.indicators.nu, vec![1]);
        assert_eq!(t.multiplicities.m_plus, vec![vec![1]]);
        assert_eq!(t.multiplicities.m_minus, vec![vec![0]]);
        assert!(realizability_report(&trivial(), &pol).passed());
    }

    #[test]
    fn branch_flip_negates_t() {
        let pol = Tolerance::default();
        let md = trivial();
        let dd = derive(&md, &pol).unwrap();
        let tt = trace_table(&md, &dd, &pol).unwrap();
        let a = channel_eigen_trace(&dd, &tt, 0, 0, SqrtBranch::Principal, &pol).unwrap();
        let b = channel_eigen_trace(&dd, &tt, 0, 0, SqrtBranch::Opposite, &pol).unwrap();
        assert!(approx_eq(a, -b, &pol));
    }

    #[test]
    fn channel_conditions() {
        let pol = Tolerance::default();
        assert_eq!(check_channel(c(1.0), 1, &pol), Ok(1));
        assert_eq!(check_channel(c(0.0), 0, &pol), Ok(0));
        assert_eq!(check_channel(c(0.0), 2, &pol), Ok(0));
        assert_eq!(check_channel(Complex::new(1.0, 0.1), 1, &pol), Err("not real"));
        assert_eq!(check_channel(c(0.5), 1, &pol), Err("not an integer"));
        assert_eq!(check_channel(c(3.0), 1, &pol), Err("out of range"));
        assert_eq!(check_channel(c(1.0), 2, &pol), Err("parity differs from N"));
    }

    #[test]
    fn semion_indicator_is_minus_one() {
        let pol = Tolerance::default();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = vec![vec![c(h), c(h)], vec![c(h), c(-h)]];
        let t = vec![root_of_unity(-1, 24), root_of_unity(5, 24)];
        let md = ModularData::from_rows(s, t, &pol).unwrap();
        let (_, tables) = compute_tables(&md, &pol).unwrap();
        assert_eq!(tables.indicators.nu, vec![1, -1]);
    }
}

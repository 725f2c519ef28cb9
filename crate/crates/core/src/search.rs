//! Small-rank search for modular data over a given fusion ring.
//!
//! The characters of a commutative fusion ring are the common eigenvectors of
//! its fusion matrices; suitably ordered and phased they form the columns of
//! a candidate S. For each candidate the twists are enumerated over roots of
//! unity, and `T` is fixed up to a cube root by the modular relation. Every
//! surviving pair is run through the axioms and the trace constraints.

use std::cmp::Ordering;
use std::path::Path;

use itertools::Itertools;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::axioms::AxiomReport;
use crate::bantay::realizability_report;
use crate::error::{Error, Result};
use crate::format::{FusionRingFile, ModularDataFile};
use crate::modular_data::{nearest_permutation, verlinde_fusion, FusionTensor, ModularData};
use crate::numerics::{diag, matrix_max_dev, principal_cbrt, root_of_unity, roots_up_to, CMatrix, Complex, Tolerance};

/// A validated commutative, associative fusion ring with unit 0.
#[derive(Clone, Debug, PartialEq)]
pub struct FusionRing {
    pub n: FusionTensor,
    pub conj: Vec<usize>,
}

impl FusionRing {
    pub fn new(n: FusionTensor) -> Result<Self> {
        let r = n.rank();
        let bad = |msg: String| Err(Error::InvalidFusionRing(msg));
        if r == 0 {
            return bad("rank must be positive".into());
        }
        for j in 0..r {
            for k in 0..r {
                let delta = u32::from(j == k);
                if n.get(0, j, k) != delta || n.get(j, 0, k) != delta {
                    return bad(format!("0 is not a unit at ({j},{k})"));
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    if n.get(i, j, k) != n.get(j, i, k) {
                        return bad(format!("not commutative at ({i},{j},{k})"));
                    }
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    for l in 0..r {
                        let lhs: u64 = (0..r).map(|m| n.get(i, j, m) as u64 * n.get(m, k, l) as u64).sum();
                        let rhs: u64 = (0..r).map(|m| n.get(j, k, m) as u64 * n.get(i, m, l) as u64).sum();
                        if lhs != rhs {
                            return bad(format!("not associative at ({i},{j},{k},{l})"));
                        }
                    }
                }
            }
        }
        let mut conj = Vec::with_capacity(r);
        for i in 0..r {
            let duals: Vec<usize> = (0..r).filter(|&j| n.get(i, j, 0) != 0).collect();
            if duals.len() != 1 || n.get(i, duals[0], 0) != 1 {
                return bad(format!("object {i} has no unique dual"));
            }
            conj.push(duals[0]);
        }
        if (0..r).any(|i| conj[conj[i]] != i) {
            return bad("duality is not an involution".into());
        }
        Ok(FusionRing { n, conj })
    }

    pub fn from_file_repr(file: &FusionRingFile) -> Result<Self> {
        let n = FusionTensor::from_nested(&file.n)?;
        if n.rank() != file.rank {
            return Err(Error::InvalidFusionRing(format!(
                "rank {} does not match N of size {}",
                file.rank,
                n.rank()
            )));
        }
        FusionRing::new(n)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        FusionRing::from_file_repr(&serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        FusionRing::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn rank(&self) -> usize {
        self.n.rank()
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub pol: Tolerance,
    /// Largest order of a root of unity tried as a twist.
    pub max_order: u32,
    pub max_rank: usize,
    pub parallel: bool,
    /// Upper bound on twist assignments per S candidate.
    pub max_assignments: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            pol: Tolerance::default(),
            max_order: 16,
            max_rank: 6,
            parallel: true,
            max_assignments: 5_000_000,
        }
    }
}

const EIGEN_ATTEMPTS: usize = 8;

/// Deterministic, irrational-looking coefficients for attempt `a`.
fn coefficient(a: usize, i: usize, imag: bool) -> f64 {
    let x = (a * 131 + i * 17 + usize::from(imag) * 7 + 1) as f64;
    (x * 0.754_877_666).fract() + 0.1
}

/// Unit common eigenvectors of the fusion matrices, phased so `v_0 > 0` and
/// sorted lexicographically by entries.
pub fn characters(fr: &FusionRing, pol: &Tolerance) -> Result<Vec<Vec<Complex>>> {
    let r = fr.rank();
    let ls: Vec<CMatrix> = (0..r).map(|i| fr.n.matrix(i)).collect();
    let i_unit = Complex::new(0.0, 1.0);
    'attempt: for attempt in 0..EIGEN_ATTEMPTS {
        let mut h = CMatrix::zeros(r, r);
        for (i, l) in ls.iter().enumerate().skip(1) {
            let lt = l.adjoint();
            h += (l + &lt) * Complex::from(coefficient(attempt, i, false));
            h += (l - &lt) * (i_unit * coefficient(attempt, i, true));
        }
        let eig = nalgebra::SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..r).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let mut vectors = Vec::with_capacity(r);
        let mut start = 0;
        while start < r {
            let mut end = start + 1;
            while end < r && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] < pol.int_tol {
                end += 1;
            }
            if end - start > 1 {
                let basis = CMatrix::from_columns(
                    &order[start..end]
                        .iter()
                        .map(|&c| eig.eigenvectors.column(c).into_owned())
                        .collect::<Vec<_>>(),
                );
                let degenerate = ls.iter().all(|l| {
                    let restricted = basis.adjoint() * l * &basis;
                    let scalar = restricted[(0, 0)];
                    matrix_max_dev(&restricted, &(CMatrix::identity(end - start, end - start) * scalar)) < pol.int_tol
                });
                if degenerate {
                    return Err(Error::NotTransitive);
                }
                continue 'attempt;
            }
            let col = eig.eigenvectors.column(order[start]);
            let v0 = col[0];
            if v0.norm() < pol.int_tol {
                return Err(Error::NotTransitive);
            }
            let phase = v0.conj() / v0.norm();
            let norm = col.norm();
            vectors.push(col.iter().map(|z| z * phase / norm).collect::<Vec<Complex>>());
            start = end;
        }
        vectors.sort_by(|a, b| lex_cmp(a, b, pol.int_tol));
        return Ok(vectors);
    }
    Err(Error::NotTransitive)
}

fn lex_cmp(a: &[Complex], b: &[Complex], tol: f64) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        for (p, q) in [(x.re, y.re), (x.im, y.im)] {
            if (p - q).abs() > tol {
                return p.total_cmp(&q);
            }
        }
    }
    Ordering::Equal
}

/// Symmetric S matrices with `S_00 > 0` built from the characters of `fr`.
pub fn candidate_s(fr: &FusionRing, config: &SearchConfig) -> Result<Vec<CMatrix>> {
    let r = fr.rank();
    if r > config.max_rank {
        return Err(Error::SearchBound(format!(
            "rank {r} exceeds the bound {}",
            config.max_rank
        )));
    }
    let pol = &config.pol;
    let chars = characters(fr, pol)?;
    let mut out: Vec<CMatrix> = Vec::new();
    for perm in (0..r).permutations(r) {
        let first = &chars[perm[0]];
        let mut ok = true;
        let s = DMatrix::from_fn(r, r, |row, col| {
            let v = &chars[perm[col]];
            let c = first[col] / v[0];
            if ((c.norm() - 1.0).abs()) > pol.int_tol {
                ok = false;
            }
            c * v[row]
        });
        if !ok || s[(0, 0)].re <= 0.0 || matrix_max_dev(&s, &s.transpose()) > pol.int_tol {
            continue;
        }
        if out.iter().all(|prev| matrix_max_dev(prev, &s) > pol.eq_tol) {
            out.push(s);
        }
    }
    Ok(out)
}

/// One T diagonal produced by the twist enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct TCandidate {
    /// Position of this assignment in the enumeration order.
    pub assignment: u64,
    /// Twist of each object as a reduced fraction of a turn, `0 <= p < q`.
    pub twists: Vec<(i64, i64)>,
    /// Which of the three cube roots of unity was applied.
    pub cube_root: usize,
    pub t: Vec<Complex>,
}

#[derive(Clone, Debug, Default)]
pub struct TEnumeration {
    pub candidates: Vec<TCandidate>,
    pub assignments: u64,
    pub skipped: u64,
}

struct TwistSpace {
    roots: Vec<(i64, i64)>,
    /// Orbit representative for each object; `None` for the vacuum.
    orbit_of: Vec<Option<usize>>,
    orbits: usize,
    total: u64,
}

impl TwistSpace {
    fn new(conj: &[usize], max_order: u32, limit: u64) -> Result<Self> {
        let roots = roots_up_to(max_order.max(1));
        let mut orbit_of = vec![None; conj.len()];
        let mut orbits = 0;
        for i in 1..conj.len() {
            if orbit_of[i].is_none() {
                orbit_of[i] = Some(orbits);
                orbit_of[conj[i]] = Some(orbits);
                orbits += 1;
            }
        }
        let total = (0..orbits).try_fold(1u64, |acc, _| acc.checked_mul(roots.len() as u64));
        match total {
            Some(total) if total <= limit => Ok(TwistSpace {
                roots,
                orbit_of,
                orbits,
                total,
            }),
            _ => Err(Error::SearchBound(format!(
                "{} roots over {orbits} orbits exceeds {limit} assignments",
                roots.len()
            ))),
        }
    }

    /// Twists for `index`, the first orbit varying slowest.
    fn assignment(&self, mut index: u64) -> Vec<(i64, i64)> {
        let base = self.roots.len() as u64;
        let mut digits = vec![0usize; self.orbits];
        for d in digits.iter_mut().rev() {
            *d = (index % base) as usize;
            index /= base;
        }
        self.orbit_of
            .iter()
            .map(|o| o.map_or((0, 1), |o| self.roots[digits[o]]))
            .collect()
    }
}

fn conjugation_of(s: &CMatrix) -> Vec<usize> {
    nearest_permutation(&(s * s)).0
}

/// `(ST)^3 = λS^2` with `S` unitary is equivalent to `STS = λ T^{-1} S T^{-1}`;
/// entries are compared with an early exit, row 0 first.
fn modular_scalar(s: &CMatrix, omega: &[Complex], pol: &Tolerance) -> Option<Complex> {
    let n = omega.len();
    let sts = |a: usize, b: usize| -> Complex { (0..n).map(|c| s[(a, c)] * omega[c] * s[(c, b)]).sum() };
    let lambda = sts(0, 0) / s[(0, 0)];
    if (lambda.norm() - 1.0).abs() > pol.eq_tol {
        return None;
    }
    for a in 0..n {
        for b in a..n {
            let rhs = lambda * s[(a, b)] / (omega[a] * omega[b]);
            if (sts(a, b) - rhs).norm() > pol.eq_tol {
                return None;
            }
        }
    }
    Some(lambda)
}

fn t_for_assignment(s: &CMatrix, s2: &CMatrix, twists: &[(i64, i64)], pol: &Tolerance) -> Option<[Vec<Complex>; 3]> {
    let omega: Vec<Complex> = twists.iter().map(|&(p, q)| root_of_unity(p, q)).collect();
    let lambda = modular_scalar(s, &omega, pol)?;
    let st = s * diag(&omega);
    let m = &st * &st * &st;
    if matrix_max_dev(&m, &(s2 * lambda)) > pol.eq_tol {
        return None;
    }
    let base = principal_cbrt(lambda.inv(), pol).ok()?;
    Some([0, 1, 2].map(|z| {
        let scale = base * root_of_unity(z, 3);
        omega.iter().map(|w| w * scale).collect()
    }))
}

fn map_indices<T: Send>(total: u64, parallel: bool, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    if parallel {
        (0..total).into_par_iter().map(f).collect()
    } else {
        (0..total).map(f).collect()
    }
}

/// Every T with `(ST)^3 = S^2` whose normalized twists are roots of unity of
/// order at most `max_order` and respect duality.
pub fn enumerate_t(s: &CMatrix, config: &SearchConfig) -> Result<TEnumeration> {
    let pol = &config.pol;
    let space = TwistSpace::new(&conjugation_of(s), config.max_order, config.max_assignments)?;
    let s2 = s * s;
    let found = map_indices(space.total, config.parallel, |idx| {
        let twists = space.assignment(idx);
        t_for_assignment(s, &s2, &twists, pol).map(|ts| (idx, twists, ts))
    });
    let mut out = TEnumeration {
        assignments: space.total,
        ..Default::default()
    };
    for item in found {
        match item {
            None => out.skipped += 1,
            Some((assignment, twists, ts)) => {
                for (cube_root, t) in ts.into_iter().enumerate() {
                    out.candidates.push(TCandidate {
                        assignment,
                        twists: twists.clone(),
                        cube_root,
                        t,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Provenance {
    pub s_candidate: usize,
    pub assignment: u64,
    /// Normalized twists `T_i/T_0` as `"p/q"` turns.
    pub twists: Vec<String>,
    pub cube_root: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub provenance: Provenance,
    #[serde(rename = "data", serialize_with = "serialize_md")]
    pub md: ModularData,
    pub report: AxiomReport,
}

fn serialize_md<S: serde::Serializer>(md: &ModularData, ser: S) -> std::result::Result<S::Ok, S::Error> {
    md.to_file_repr().serialize(ser)
}

impl SearchResult {
    pub fn file_repr(&self) -> ModularDataFile {
        self.md.to_file_repr()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub rank: usize,
    pub max_order: u32,
    pub s_candidates: usize,
    pub assignments: u64,
    pub skipped: u64,
    pub rejected: u64,
    pub results: Vec<SearchResult>,
}

impl SearchOutcome {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("search outcome serializes")
    }

    /// Number of distinct normalized twist vectors among the results.
    pub fn twist_families(&self) -> usize {
        self.results.iter().map(|r| &r.provenance.twists).unique().count()
    }
}

/// Full search: candidate S, twist enumeration, then the axioms and trace
/// constraints. Results are ordered by provenance and deduplicated.
pub fn search_pipeline(fr: &FusionRing, config: &SearchConfig) -> Result<SearchOutcome> {
    let pol = &config.pol;
    let candidates = candidate_s(fr, config)?;
    let mut outcome = SearchOutcome {
        rank: fr.rank(),
        max_order: config.max_order,
        s_candidates: candidates.len(),
        assignments: 0,
        skipped: 0,
        rejected: 0,
        results: Vec::new(),
    };
    for (s_candidate, s) in candidates.iter().enumerate() {
        let ts = enumerate_t(s, config)?;
        outcome.assignments += ts.assignments;
        outcome.skipped += ts.skipped;
        let checked = map_indices(ts.candidates.len() as u64, config.parallel, |idx| {
            let cand = &ts.candidates[idx as usize];
            let md = ModularData::new(None, s.clone(), cand.t.clone(), pol).ok()?;
            if verlinde_fusion(&md, pol).ok()? != fr.n {
                return None;
            }
            let report = realizability_report(&md, pol);
            report.passed().then(|| SearchResult {
                provenance: Provenance {
                    s_candidate,
                    assignment: cand.assignment,
                    twists: cand.twists.iter().map(|(p, q)| format!("{p}/{q}")).collect(),
                    cube_root: cand.cube_root,
                },
                md,
                report,
            })
        });
        for item in checked {
            match item {
                None => outcome.rejected += 1,
                Some(res) => {
                    if outcome.results.iter().all(|prev| !prev.md.approx_eq(&res.md, pol)) {
                        outcome.results.push(res);
                    }
                }
            }
        }
    }
    outcome.results.sort_by(|a, b| a.provenance.cmp(&b.provenance));
    Ok(outcome)
}

/// Writes `result_000.json`, ... in the modular-data file format.
pub fn write_results(outcome: &SearchOutcome, dir: impl AsRef<Path>) -> Result<Vec<std::path::PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    outcome
        .results
        .iter()
        .enumerate()
        .map(|(idx, res)| {
            let path = dir.join(format!("result_{idx:03}.json"));
            std::fs::write(&path, res.md.to_json_string())?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(name: &str) -> FusionRing {
        let text = std::fs::read_to_string(format!("{}/data/rings/{name}.json", env!("CARGO_MANIFEST_DIR"))).unwrap();
        FusionRing::from_json_str(&text).unwrap()
    }

    #[test]
    fn ring_validation() {
        let mut n = ring("ising").n;
        n.set(1, 2, 1, 0);
        assert!(matches!(FusionRing::new(n), Err(Error::InvalidFusionRing(_))));
        let z3 = ring("z3");
        assert_eq!(z3.conj, vec![0, 2, 1]);
        let non_assoc = FusionTensor::from_fn(2, |i, j, k| match (i, j) {
            (0, _) => u32::from(j == k),
            (_, 0) => u32::from(i == k),
            _ => 2 * u32::from(k == 0),
        });
        assert!(FusionRing::new(non_assoc).is_err());
    }

    #[test]
    fn trivial_ring() {
        let cfg = SearchConfig::default();
        let s = candidate_s(&ring("trivial"), &cfg).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s[0][(0, 0)] - Complex::new(1.0, 0.0)).norm() < 1e-12);
        let ts = enumerate_t(&s[0], &cfg).unwrap();
        assert_eq!(ts.candidates.len(), 3);
        assert_eq!(ts.assignments, 1);
    }

    #[test]
    fn fibonacci_candidates() {
        let cfg = SearchConfig::default();
        assert_eq!(candidate_s(&ring("fibonacci"), &cfg).unwrap().len(), 2);
    }

    #[test]
    fn rank_bound() {
        let cfg = SearchConfig {
            max_rank: 2,
            ..Default::default()
        };
        assert!(matches!(candidate_s(&ring("ising"), &cfg), Err(Error::SearchBound(_))));
    }

    #[test]
    fn assignment_bound() {
        let cfg = SearchConfig {
            max_assignments: 10,
            ..Default::default()
        };
        let s = &candidate_s(&ring("ising"), &cfg).unwrap()[0];
        assert!(matches!(enumerate_t(s, &cfg), Err(Error::SearchBound(_))));
    }
}

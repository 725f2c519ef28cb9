//! Modular data `(S, T)` and the quantities read off from it: quantum
//! dimensions, twists, charge conjugation, Verlinde fusion rules and the
//! total dimension.
//!
//! The vacuum is always index 0. `T` is kept as its diagonal.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{ComplexRepr, ModularDataFile};
use crate::numerics::{as_integer, is_phase, CMatrix, Complex, Tolerance};

#[derive(Clone, Debug, PartialEq)]
pub struct ModularData {
    labels: Vec<String>,
    s: CMatrix,
    t: Vec<Complex>,
}

impl ModularData {
    /// Checks the structural invariants: `S` square of size `rank`, finite
    /// entries, `|T_i| = 1`, and `S[0][0]` real and positive.
    pub fn new(labels: Option<Vec<String>>, s: CMatrix, t: Vec<Complex>, pol: &Tolerance) -> Result<Self> {
        let rank = t.len();
        if rank == 0 {
            return Err(Error::Malformed("rank must be positive".into()));
        }
        if s.nrows() != rank || s.ncols() != rank {
            return Err(Error::Malformed(format!(
                "S is {}x{} but T has {} entries",
                s.nrows(),
                s.ncols(),
                rank
            )));
        }
        if s.iter().any(|z| !z.is_finite()) || t.iter().any(|z| !z.is_finite()) {
            return Err(Error::Malformed("non-finite entry".into()));
        }
        if let Some((i, z)) = t.iter().enumerate().find(|(_, z)| !is_phase(**z, pol)) {
            return Err(Error::NotAPhase(format!("T[{i}] = {z}")));
        }
        let s00 = s[(0, 0)];
        if s00.im.abs() > pol.eq_tol || s00.re <= pol.eq_tol {
            return Err(Error::Malformed(format!(
                "S[0][0] = {s00} must be real and positive (vacuum at index 0)"
            )));
        }
        let labels = match labels {
            Some(l) if l.len() != rank => return Err(Error::Malformed(format!("{} labels for rank {rank}", l.len()))),
            Some(l) => l,
            None => (0..rank).map(|i| i.to_string()).collect(),
        };
        Ok(ModularData { labels, s, t })
    }

    pub fn from_rows(s: Vec<Vec<Complex>>, t: Vec<Complex>, pol: &Tolerance) -> Result<Self> {
        let n = s.len();
        if s.iter().any(|row| row.len() != n) {
            return Err(Error::Malformed("S rows have unequal length".into()));
        }
        let m = DMatrix::from_fn(n, n, |i, j| s[i][j]);
        ModularData::new(None, m, t, pol)
    }

    pub fn rank(&self) -> usize {
        self.t.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn s(&self) -> &CMatrix {
        &self.s
    }

    pub fn t(&self) -> &[Complex] {
        &self.t
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.rank() {
            return Err(Error::Malformed(format!(
                "{} labels for rank {}",
                labels.len(),
                self.rank()
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Same data with `S` replaced by its entrywise complex conjugate.
    pub fn conjugate_s(&self) -> ModularData {
        ModularData {
            labels: self.labels.clone(),
            s: self.s.map(|z| z.conj()),
            t: self.t.clone(),
        }
    }

    /// Entrywise complex conjugate of both `S` and `T`.
    pub fn conjugate(&self) -> ModularData {
        ModularData {
            labels: self.labels.clone(),
            s: self.s.map(|z| z.conj()),
            t: self.t.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn approx_eq(&self, other: &ModularData, pol: &Tolerance) -> bool {
        self.rank() == other.rank()
            && self
                .s
                .iter()
                .zip(other.s.iter())
                .all(|(a, b)| (a - b).norm() <= pol.eq_tol)
            && self.t.iter().zip(&other.t).all(|(a, b)| (a - b).norm() <= pol.eq_tol)
    }

    pub fn from_file_repr(file: &ModularDataFile, pol: &Tolerance) -> Result<Self> {
        let n = file.rank;
        if file.s.len() != n || file.s.iter().any(|row| row.len() != n) || file.t.len() != n {
            return Err(Error::Malformed(format!("declared rank {n} does not match S/T shapes")));
        }
        let mut s = DMatrix::zeros(n, n);
        for (i, row) in file.s.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                s[(i, j)] = z.to_complex()?;
            }
        }
        let t = file.t.iter().map(ComplexRepr::to_complex).collect::<Result<Vec<_>>>()?;
        ModularData::new(file.labels.clone(), s, t, pol)
    }

    pub fn to_file_repr(&self) -> ModularDataFile {
        let n = self.rank();
        ModularDataFile {
            rank: n,
            labels: Some(self.labels.clone()),
            s: (0..n)
                .map(|i| (0..n).map(|j| ComplexRepr::from(self.s[(i, j)])).collect())
                .collect(),
            t: self.t.iter().map(|z| ComplexRepr::from(*z)).collect(),
        }
    }

    pub fn from_json_str(text: &str, pol: &Tolerance) -> Result<Self> {
        let file: ModularDataFile = serde_json::from_str(text)?;
        ModularData::from_file_repr(&file, pol)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_file_repr()).expect("finite data always serializes")
    }

    pub fn load(path: impl AsRef<Path>, pol: &Tolerance) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        ModularData::from_json_str(&text, pol)
    }
}

/// Fusion multiplicities `N^k_{i,j}`, stored densely.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FusionTensor {
    rank: usize,
    data: Vec<u32>,
}

impl FusionTensor {
    pub fn zeros(rank: usize) -> Self {
        FusionTensor {
            rank,
            data: vec![0; rank * rank * rank],
        }
    }

    pub fn from_fn(rank: usize, mut f: impl FnMut(usize, usize, usize) -> u32) -> Self {
        let mut t = FusionTensor::zeros(rank);
        for i in 0..rank {
            for j in 0..rank {
                for k in 0..rank {
                    t.set(i, j, k, f(i, j, k));
                }
            }
        }
        t
    }

    /// `nested[i][j][k] = N^k_{i,j}`.
    pub fn from_nested(nested: &[Vec<Vec<u32>>]) -> Result<Self> {
        let n = nested.len();
        if nested.iter().any(|a| a.len() != n || a.iter().any(|b| b.len() != n)) {
            return Err(Error::InvalidFusionRing(format!("N must be {n}x{n}x{n}")));
        }
        Ok(FusionTensor::from_fn(n, |i, j, k| nested[i][j][k]))
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<u32>>> {
        (0..self.rank)
            .map(|i| {
                (0..self.rank)
                    .map(|j| (0..self.rank).map(|k| self.get(i, j, k)).collect())
                    .collect()
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `N^k_{i,j}`.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> u32 {
        self.data[(i * self.rank + j) * self.rank + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: u32) {
        let r = self.rank;
        self.data[(i * r + j) * r + k] = v;
    }

    /// Left multiplication matrix `(L_i)_{j,k} = N^k_{i,j}`.
    pub fn matrix(&self, i: usize) -> CMatrix {
        DMatrix::from_fn(self.rank, self.rank, |j, k| Complex::new(self.get(i, j, k) as f64, 0.0))
    }

    pub fn max_entry(&self) -> u32 {
        self.data.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedData {
    pub dims: Vec<f64>,
    #[serde(with = "crate::format::pair_vec")]
    pub twists: Vec<Complex>,
    pub conj: Vec<usize>,
    pub fusion: FusionTensor,
    pub total_dim: f64,
}

impl DerivedData {
    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn is_self_dual(&self, i: usize) -> bool {
        self.conj[i] == i
    }
}

/// `d_i = S_{0,i} / S_{0,0}`.
pub fn dims(md: &ModularData, pol: &Tolerance) -> Result<Vec<f64>> {
    let s00 = md.s[(0, 0)];
    (0..md.rank())
        .map(|i| {
            let d = md.s[(0, i)] / s00;
            if d.im.abs() > pol.eq_tol {
                Err(Error::InvalidDimensionRow { index: i, imag: d.im })
            } else {
                Ok(if i == 0 { 1.0 } else { d.re })
            }
        })
        .collect()
}

/// `ω_i = T_i / T_0`, with `ω_0 = 1` exactly.
pub fn twists(md: &ModularData) -> Vec<Complex> {
    let t0 = md.t[0];
    md.t.iter()
        .enumerate()
        .map(|(i, &ti)| if i == 0 { Complex::new(1.0, 0.0) } else { ti / t0 })
        .collect()
}

pub(crate) fn s_squared(md: &ModularData) -> CMatrix {
    &md.s * &md.s
}

/// Reads the permutation `i ↦ ī` off `C = S²`; returns the permutation and
/// the largest deviation of `S²` from the 0/1 pattern.
pub(crate) fn nearest_permutation(c: &CMatrix) -> (Vec<usize>, f64) {
    let n = c.nrows();
    let mut perm = Vec::with_capacity(n);
    let mut dev: f64 = 0.0;
    for i in 0..n {
        let j = (0..n)
            .max_by(|&a, &b| c[(i, a)].norm().total_cmp(&c[(i, b)].norm()))
            .unwrap_or(0);
        perm.push(j);
        for l in 0..n {
            let target = if l == j { 1.0 } else { 0.0 };
            dev = dev.max((c[(i, l)] - Complex::new(target, 0.0)).norm());
        }
    }
    (perm, dev)
}

pub(crate) fn is_involution_fixing_vacuum(perm: &[usize]) -> bool {
    !perm.is_empty() && perm[0] == 0 && perm.iter().enumerate().all(|(i, &j)| j < perm.len() && perm[j] == i)
}

pub fn charge_conjugation(md: &ModularData, pol: &Tolerance) -> Result<Vec<usize>> {
    let (perm, dev) = nearest_permutation(&s_squared(md));
    if dev > pol.eq_tol {
        return Err(Error::NotConjugation(format!(
            "max deviation {dev:e} from a 0/1 matrix"
        )));
    }
    if !is_involution_fixing_vacuum(&perm) {
        return Err(Error::NotConjugation(format!("{perm:?} is not an involution fixing 0")));
    }
    Ok(perm)
}

/// Unrounded Verlinde sums, indexed `[(i * n + j) * n + k]`.
pub(crate) fn verlinde_raw(md: &ModularData) -> Result<Vec<Complex>> {
    let n = md.rank();
    let s = &md.s;
    if let Some(r) = (0..n).find(|&r| s[(0, r)].norm() == 0.0) {
        return Err(Error::Malformed(format!("S[0][{r}] = 0, Verlinde sum undefined")));
    }
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v: Complex = (0..n)
                    .map(|r| s[(i, r)] * s[(j, r)] * s[(k, r)].conj() / s[(0, r)])
                    .sum();
                out.push(v);
            }
        }
    }
    Ok(out)
}

/// `N^k_{i,j} = Σ_r S_{i,r} S_{j,r} conj(S_{k,r}) / S_{0,r}`, rounded.
pub fn verlinde_fusion(md: &ModularData, pol: &Tolerance) -> Result<FusionTensor> {
    let n = md.rank();
    let raw = verlinde_raw(md)?;
    let mut bad = Vec::new();
    let mut out = FusionTensor::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                match as_integer(raw[(i * n + j) * n + k], pol) {
                    Some(v) if v >= 0 => out.set(i, j, k, v as u32),
                    _ => bad.push((i, j, k)),
                }
            }
        }
    }
    if !bad.is_empty() {
        return Err(Error::VerlindeIntegrality { triples: bad });
    }
    Ok(out)
}

pub fn total_dim(md: &ModularData) -> f64 {
    1.0 / md.s[(0, 0)].re
}

pub fn derive(md: &ModularData, pol: &Tolerance) -> Result<DerivedData> {
    let dims = dims(md, pol)?;
    let twists = twists(md);
    let conj = charge_conjugation(md, pol)?;
    let fusion = verlinde_fusion(md, pol)?;
    let n = md.rank();
    let bad: Vec<_> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| fusion.get(i, j, 0) != u32::from(j == conj[i]))
        .map(|(i, j)| (i, j, 0))
        .collect();
    if !bad.is_empty() {
        return Err(Error::VerlindeIntegrality { triples: bad });
    }
    Ok(DerivedData {
        dims,
        twists,
        conj,
        fusion,
        total_dim: total_dim(md),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::approx_eq;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    fn ising() -> ModularData {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = vec![
            vec![c(0.5), c(h), c(0.5)],
            vec![c(h), c(0.0), c(-h)],
            vec![c(0.5), c(-h), c(0.5)],
        ];
        let t0 = crate::numerics::root_of_unity(-1, 48);
        let t = vec![
            t0,
            crate::numerics::root_of_unity(1, 24),
            crate::numerics::root_of_unity(23, 48),
        ];
        ModularData::from_rows(s, t, &Tolerance::default()).unwrap()
    }

    #[test]
    fn trivial_data() {
        let pol = Tolerance::default();
        let md = ModularData::from_rows(vec![vec![c(1.0)]], vec![c(1.0)], &pol).unwrap();
        let dd = derive(&md, &pol).unwrap();
        assert_eq!(dd.dims, vec![1.0]);
        assert_eq!(dd.twists, vec![c(1.0)]);
        assert_eq!(dd.conj, vec![0]);
        assert_eq!(dd.fusion.get(0, 0, 0), 1);
        assert_eq!(dd.total_dim, 1.0);
    }

    #[test]
    fn ising_derivations() {
        let pol = Tolerance::default();
        let dd = derive(&ising(), &pol).unwrap();
        assert!((dd.dims[1] - 2f64.sqrt()).abs() < 1e-12);
        assert!((dd.dims[2] - 1.0).abs() < 1e-12);
        assert!(approx_eq(dd.twists[1], crate::numerics::root_of_unity(1, 16), &pol));
        assert!(approx_eq(dd.twists[2], c(-1.0), &pol));
        assert_eq!(dd.conj, vec![0, 1, 2]);
        assert!((dd.total_dim - 2.0).abs() < 1e-12);
        // σ×σ = 1 + ψ
        assert_eq!(
            (dd.fusion.get(1, 1, 0), dd.fusion.get(1, 1, 2), dd.fusion.get(1, 1, 1)),
            (1, 1, 0)
        );
    }

    #[test]
    fn rejects_structural_errors() {
        let pol = Tolerance::default();
        let err = ModularData::from_rows(vec![vec![c(-1.0)]], vec![c(1.0)], &pol).unwrap_err();
        assert!(matches!(err, Error::Malformed(_)));
        let err = ModularData::from_rows(vec![vec![c(1.0)]], vec![c(2.0)], &pol).unwrap_err();
        assert!(matches!(err, Error::NotAPhase(_)));
        let err = ModularData::from_rows(vec![vec![c(1.0), c(0.0)]], vec![c(1.0)], &pol).unwrap_err();
        assert!(matches!(err, Error::Malformed(_)));
    }

    #[test]
    fn complex_dimension_row_rejected() {
        let pol = Tolerance::default();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = vec![vec![c(h), Complex::new(0.0, h)], vec![Complex::new(0.0, h), c(h)]];
        let md = ModularData::from_rows(s, vec![c(1.0), c(1.0)], &pol).unwrap();
        assert!(matches!(
            dims(&md, &pol),
            Err(Error::InvalidDimensionRow { index: 1, .. })
        ));
    }

    #[test]
    fn non_conjugation_rejected() {
        let pol = Tolerance::default();
        let s = vec![vec![c(0.6), c(0.8)], vec![c(0.8), c(0.6)]];
        let md = ModularData::from_rows(s, vec![c(1.0), c(1.0)], &pol).unwrap();
        assert!(matches!(charge_conjugation(&md, &pol), Err(Error::NotConjugation(_))));
    }

    #[test]
    fn verlinde_integrality_violation_lists_triples() {
        let pol = Tolerance::default();
        // unitary, symmetric, but the dimension ratio is not an integer-fusion ring
        let (a, b) = (0.6, 0.8);
        let s = vec![vec![c(a), c(b)], vec![c(b), c(-a)]];
        let md = ModularData::from_rows(s, vec![c(1.0), c(1.0)], &pol).unwrap();
        match verlinde_fusion(&md, &pol) {
            Err(Error::VerlindeIntegrality { triples }) => assert!(!triples.is_empty()),
            other => panic!("expected integrality violation, got {other:?}"),
        }
    }

    #[test]
    fn file_round_trip_is_exact() {
        let pol = Tolerance::default();
        let md = ising();
        let back = ModularData::from_json_str(&md.to_json_string(), &pol).unwrap();
        assert_eq!(back, md);
    }
}

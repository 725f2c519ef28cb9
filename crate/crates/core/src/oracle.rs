//! Explicit anyon models and the catalog of known modular data.
//!
//! An [`ExplicitModel`] lists the braiding eigenvalue on every one-dimensional
//! fusion channel. For multiplicity-free fusion the trace of a self-braiding
//! over a channel is then just that eigenvalue (or 0 off the fusion rules),
//! which gives a ground truth for the trace table that never touches the
//! modular-data formula.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bantay::trace_entry;
use crate::error::{Error, Result};
use crate::format::{ModelFile, ModularDataFile};
use crate::modular_data::{derive, twists, verlinde_fusion, FusionTensor, ModularData};
use crate::numerics::{matrix_max_dev, Complex, Tolerance};

#[derive(Clone, Debug)]
pub struct ExplicitModel {
    pub name: String,
    pub labels: Vec<String>,
    pub fusion: FusionTensor,
    pub twists: Vec<Complex>,
    /// Braiding eigenvalue on the channel `k ≺ i × j`, keyed `(i, j, k)`.
    pub r_scalars: BTreeMap<(usize, usize, usize), Complex>,
    pub modular_data: ModularData,
}

impl ExplicitModel {
    /// Fusion rules are read off the keys of `r_scalars`. The model is
    /// rejected unless those rules match the Verlinde fusion of the modular
    /// data and every channel satisfies
    /// `r(j,i,k) r(i,j,k) = ω_k / (ω_i ω_j)`.
    pub fn new(
        name: impl Into<String>,
        modular_data: ModularData,
        r_scalars: BTreeMap<(usize, usize, usize), Complex>,
        pol: &Tolerance,
    ) -> Result<Self> {
        let name = name.into();
        let invalid = |reason: String| Error::InvalidModel {
            name: name.clone(),
            reason,
        };
        let n = modular_data.rank();
        if let Some(&(i, j, k)) = r_scalars.keys().find(|&&(i, j, k)| i >= n || j >= n || k >= n) {
            return Err(invalid(format!("channel ({i},{j},{k}) out of range")));
        }
        let fusion = FusionTensor::from_fn(n, |i, j, k| u32::from(r_scalars.contains_key(&(i, j, k))));
        let verlinde = verlinde_fusion(&modular_data, pol)?;
        if verlinde != fusion {
            return Err(invalid(if verlinde.max_entry() > 1 {
                "fusion has multiplicities > 1".into()
            } else {
                "r-scalar channels differ from the Verlinde fusion rules".into()
            }));
        }
        let twists = twists(&modular_data);
        for (&(i, j, k), &r) in &r_scalars {
            if (r.norm() - 1.0).abs() > pol.eq_tol {
                return Err(invalid(format!("r({i},{j},{k}) = {r} is not a phase")));
            }
            let mirror = r_scalars[&(j, i, k)];
            let expected = twists[k] / (twists[i] * twists[j]);
            let dev = (mirror * r - expected).norm();
            if dev > pol.eq_tol {
                return Err(invalid(format!(
                    "monodromy on ({i},{j},{k}) deviates by {dev:e} from ω_k/(ω_i ω_j)"
                )));
            }
        }
        Ok(ExplicitModel {
            name,
            labels: modular_data.labels().to_vec(),
            fusion,
            twists,
            r_scalars,
            modular_data,
        })
    }

    pub fn from_file(name: &str, file: &ModelFile, pol: &Tolerance) -> Result<Self> {
        let md = ModularData::from_file_repr(&file.modular_part(), pol)?;
        let mut r = BTreeMap::new();
        for ([i, j, k], z) in &file.r {
            if r.insert((*i, *j, *k), z.to_complex()?).is_some() {
                return Err(Error::InvalidModel {
                    name: name.to_string(),
                    reason: format!("duplicate channel ({i},{j},{k})"),
                });
            }
        }
        ExplicitModel::new(name, md, r, pol)
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }
}

/// Trace of the self-braiding of `i` over the channel `k ≺ i × i`.
pub fn brute_trace(model: &ExplicitModel, i: usize, k: usize) -> Complex {
    model
        .r_scalars
        .get(&(i, i, k))
        .copied()
        .unwrap_or(Complex::new(0.0, 0.0))
}

/// Pointed model on `Z_n` with quadratic form `q(a) = e^{2πi p a² / m}`,
/// where `m = n` for odd `n` and `m = 2n` for even `n`.
///
/// Fusion is addition mod `n`; `r(a, b, a+b) = e^{2πi p a b / m}` on the
/// representatives `0..n`; `S_{a,b} = n^{-1/2} e^{-2πi·2p·ab/m}`, and `T_0`
/// carries the central charge read off the Gauss sum.
pub fn build_pointed_model(n: usize, p: i64, pol: &Tolerance) -> Result<ExplicitModel> {
    if n == 0 {
        return Err(Error::PointedNotModular { n, p });
    }
    let m = if n.is_multiple_of(2) { 2 * n as i64 } else { n as i64 };
    let phase = |num: i64| crate::numerics::root_of_unity(num, m);
    let omega: Vec<Complex> = (0..n as i64).map(|a| phase(p * a * a)).collect();
    let scale = 1.0 / (n as f64).sqrt();
    let s = DMatrix::from_fn(n, n, |a, b| phase(-2 * p * (a * b) as i64) * scale);

    let sst = &s * s.adjoint();
    if matrix_max_dev(&sst, &DMatrix::identity(n, n)) > pol.eq_tol {
        return Err(Error::PointedNotModular { n, p });
    }
    let gauss: Complex = omega.iter().sum::<Complex>() * scale;
    let t0 = Complex::from_polar(1.0, -gauss.arg() / 3.0);
    let t: Vec<Complex> = omega.iter().map(|w| w * t0).collect();

    let mut r = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            r.insert((a, b, (a + b) % n), phase(p * (a * b) as i64));
        }
    }
    let md = ModularData::new(None, s, t, pol)?;
    ExplicitModel::new(format!("pointed(Z_{n}, p={p})"), md, r, pol)
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub md: ModularData,
    pub notes: &'static str,
}

struct Source {
    name: &'static str,
    json: &'static str,
    notes: &'static str,
}

const CATALOG: &[Source] = &[
    Source {
        name: "trivial",
        json: include_str!("../data/catalog/trivial.json"),
        notes: "rank 1, c = 0",
    },
    Source {
        name: "semion",
        json: include_str!("../data/catalog/semion.json"),
        notes: "pointed Z_2, ω_s = i, c = 1",
    },
    Source {
        name: "semion-bar",
        json: include_str!("../data/catalog/semion-bar.json"),
        notes: "complex conjugate of the semion, ω_s = -i, c = -1",
    },
    Source {
        name: "z3",
        json: include_str!("../data/catalog/z3.json"),
        notes: "pointed Z_3, q(a) = e^{2πi a²/3}, c = 2",
    },
    Source {
        name: "z3-bar",
        json: include_str!("../data/catalog/z3-bar.json"),
        notes: "pointed Z_3, q(a) = e^{4πi a²/3}, c = -2",
    },
    Source {
        name: "fibonacci",
        json: include_str!("../data/catalog/fibonacci.json"),
        notes: "τ×τ = 1+τ, ω_τ = e^{4πi/5}, c = 14/5",
    },
    Source {
        name: "fibonacci-bar",
        json: include_str!("../data/catalog/fibonacci-bar.json"),
        notes: "complex conjugate of Fibonacci, ω_τ = e^{-4πi/5}, c = -14/5",
    },
    Source {
        name: "ising",
        json: include_str!("../data/catalog/ising.json"),
        notes: "σ×σ = 1+ψ, ω_σ = e^{iπ/8}, c = 1/2",
    },
    Source {
        name: "su2-2",
        json: include_str!("../data/catalog/su2-2.json"),
        notes: "Ising fusion rules, ω_σ = e^{3iπ/8}, c = 3/2, ν_σ = -1",
    },
    Source {
        name: "toric-code",
        json: include_str!("../data/catalog/toric-code.json"),
        notes: "Z_2 × Z_2, twists (1, 1, 1, -1), c = 0",
    },
];

const MODEL_FILES: &[(&str, &str)] = &[
    ("fibonacci", include_str!("../data/models/fibonacci.json")),
    ("fibonacci-bar", include_str!("../data/models/fibonacci-bar.json")),
    ("ising", include_str!("../data/models/ising.json")),
    ("su2-2", include_str!("../data/models/su2-2.json")),
    ("toric-code", include_str!("../data/models/toric-code.json")),
];

const POINTED: &[(&str, usize, i64)] = &[
    ("trivial", 1, 0),
    ("semion", 2, 1),
    ("semion-bar", 2, -1),
    ("z3", 3, 1),
    ("z3-bar", 3, 2),
];

pub fn catalog_names() -> Vec<&'static str> {
    CATALOG.iter().map(|s| s.name).collect()
}

/// Every catalog entry. The data is compiled in; a malformed entry is a
/// build defect and panics.
pub fn catalog() -> Vec<CatalogEntry> {
    CATALOG.iter().map(load_entry).collect()
}

fn load_entry(src: &Source) -> CatalogEntry {
    let file: ModularDataFile =
        serde_json::from_str(src.json).unwrap_or_else(|e| panic!("catalog entry {} does not parse: {e}", src.name));
    let md = ModularData::from_file_repr(&file, &Tolerance::default())
        .unwrap_or_else(|e| panic!("catalog entry {} is malformed: {e}", src.name));
    CatalogEntry {
        name: src.name,
        md,
        notes: src.notes,
    }
}

pub fn lookup(name: &str) -> Option<CatalogEntry> {
    CATALOG.iter().find(|s| s.name == name).map(load_entry)
}

pub fn model_names() -> Vec<&'static str> {
    let mut names: Vec<&str> = POINTED
        .iter()
        .map(|p| p.0)
        .chain(MODEL_FILES.iter().map(|m| m.0))
        .collect();
    names.sort_by_key(|n| CATALOG.iter().position(|s| s.name == *n));
    names
}

pub fn model(name: &str, pol: &Tolerance) -> Result<ExplicitModel> {
    if let Some(&(_, n, p)) = POINTED.iter().find(|m| m.0 == name) {
        let mut m = build_pointed_model(n, p, pol)?;
        m.name = name.to_string();
        return Ok(m);
    }
    let (_, json) = MODEL_FILES
        .iter()
        .find(|m| m.0 == name)
        .ok_or_else(|| Error::UnknownName(name.to_string()))?;
    let file: ModelFile = serde_json::from_str(json)?;
    ExplicitModel::from_file(name, &file, pol)
}

pub fn models(pol: &Tolerance) -> Result<Vec<ExplicitModel>> {
    model_names().into_iter().map(|n| model(n, pol)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ChannelComparison {
    pub i: usize,
    pub k: usize,
    #[serde(with = "crate::format::pair")]
    pub brute: Complex,
    #[serde(with = "crate::format::pair")]
    pub formula: Complex,
    pub delta: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleComparison {
    pub model: String,
    pub channels: Vec<ChannelComparison>,
    pub max_delta: f64,
}

/// Definitional trace against the modular-data formula on every `(i, k)`.
pub fn compare(model: &ExplicitModel, pol: &Tolerance) -> Result<OracleComparison> {
    let md = &model.modular_data;
    let dd = derive(md, pol)?;
    let n = md.rank();
    let mut channels = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 0..n {
            let brute = brute_trace(model, i, k);
            let formula = trace_entry(md, &dd, k, i);
            channels.push(ChannelComparison {
                i,
                k,
                brute,
                formula,
                delta: (brute - formula).norm(),
            });
        }
    }
    let max_delta = channels.iter().map(|c| c.delta).fold(0.0, f64::max);
    Ok(OracleComparison {
        model: model.name.clone(),
        channels,
        max_delta,
    })
}

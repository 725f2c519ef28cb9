//! Canonical R-matrices determined by modular data.
//!
//! In suitable bases every R-matrix is diagonal. For distinct objects
//! `i ≠ j` the block on channel `k` is the scalar `(ω_k / (ω_i ω_j))^{1/2}`;
//! for `i = j` it is `ω_i^{-1} ω_k^{1/2} (E⁺ - E⁻)`, where the projection
//! dimensions are the eigenvalue multiplicities `m±_{k,i}`. Projections are
//! stored only through their dimensions, `+` entries first.

use serde::{Deserialize, Serialize};

use crate::axioms::{AxiomReport, Diagnostic};
use crate::bantay::{eigen_multiplicities, realizability_report, trace_table, MultiplicityTable};
use crate::error::{Error, Result};
use crate::modular_data::{derive, DerivedData, ModularData};
use crate::numerics::{principal_sqrt, Complex, Tolerance};

pub const MONODROMY: &str = "monodromy";
pub const OP_INVERSE: &str = "op_inverse";
pub const BLOCK_UNITARY: &str = "block_unitary";
pub const BLOCK_SHAPE: &str = "block_shape";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum BlockForm {
    Scalar {
        #[serde(with = "crate::format::pair")]
        value: Complex,
        size: u32,
    },
    Signed {
        #[serde(with = "crate::format::pair")]
        value: Complex,
        dim_plus: u32,
        dim_minus: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RBlock {
    /// `(i, j, k)`: the block of `R` on `k ≺ i × j`.
    pub channel: [usize; 3],
    #[serde(flatten)]
    pub form: BlockForm,
}

impl RBlock {
    pub fn value(&self) -> Complex {
        match self.form {
            BlockForm::Scalar { value, .. } | BlockForm::Signed { value, .. } => value,
        }
    }

    pub fn size(&self) -> u32 {
        match self.form {
            BlockForm::Scalar { size, .. } => size,
            BlockForm::Signed {
                dim_plus, dim_minus, ..
            } => dim_plus + dim_minus,
        }
    }

    /// The block as the diagonal of its matrix.
    pub fn diagonal(&self) -> Vec<Complex> {
        match self.form {
            BlockForm::Scalar { value, size } => vec![value; size as usize],
            BlockForm::Signed {
                value,
                dim_plus,
                dim_minus,
            } => std::iter::repeat_n(value, dim_plus as usize)
                .chain(std::iter::repeat_n(-value, dim_minus as usize))
                .collect(),
        }
    }

    pub fn trace(&self) -> Complex {
        self.diagonal().into_iter().sum()
    }

    fn with_value(&self, value: Complex) -> RBlock {
        let form = match self.form {
            BlockForm::Scalar { size, .. } => BlockForm::Scalar { value, size },
            BlockForm::Signed {
                dim_plus, dim_minus, ..
            } => BlockForm::Signed {
                value,
                dim_plus,
                dim_minus,
            },
        };
        RBlock {
            channel: self.channel,
            form,
        }
    }
}

/// One block per channel with `N^k_{i,j} > 0`, in `(i, j, k)` order.
pub fn canonical_r(md: &ModularData, dd: &DerivedData, mt: &MultiplicityTable, pol: &Tolerance) -> Result<Vec<RBlock>> {
    let n = md.rank();
    let w = &dd.twists;
    let mut blocks = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mult = dd.fusion.get(i, j, k);
                if mult == 0 {
                    continue;
                }
                let form = if i != j {
                    BlockForm::Scalar {
                        value: principal_sqrt(w[k] / (w[i] * w[j]), pol)?,
                        size: mult,
                    }
                } else {
                    let (dim_plus, dim_minus) = (mt.m_plus[k][i], mt.m_minus[k][i]);
                    if dim_plus + dim_minus != mult {
                        return Err(Error::NotRealizable(format!(
                            "m+ + m- = {} but N^{k}_({i},{i}) = {mult}",
                            dim_plus + dim_minus
                        )));
                    }
                    BlockForm::Signed {
                        value: principal_sqrt(w[k], pol)? / w[i],
                        dim_plus,
                        dim_minus,
                    }
                };
                blocks.push(RBlock {
                    channel: [i, j, k],
                    form,
                });
            }
        }
    }
    Ok(blocks)
}

/// Runs the realizability report first and refuses failing data.
pub fn synthesize(md: &ModularData, pol: &Tolerance) -> Result<(DerivedData, Vec<RBlock>)> {
    let report = realizability_report(md, pol);
    if !report.passed() {
        let ids: Vec<&str> = report.errors().map(|d| d.check_id.as_str()).collect();
        return Err(Error::NotRealizable(format!("failing checks: {}", ids.join(", "))));
    }
    let dd = derive(md, pol)?;
    let tt = trace_table(md, &dd, pol)?;
    let mt = eigen_multiplicities(md, &dd, &tt, pol)?;
    let blocks = canonical_r(md, &dd, &mt, pol)?;
    Ok((dd, blocks))
}

/// The block of the opposite braiding: `R^op_{(i,j,k)} = ω_i ω_j / ω_k · R_{(i,j,k)}`.
pub fn r_op(block: &RBlock, dd: &DerivedData) -> RBlock {
    let [i, j, k] = block.channel;
    let w = &dd.twists;
    block.with_value(w[i] * w[j] / w[k] * block.value())
}

/// Checks `R_{(j,i,k)} R_{(i,j,k)} = ω_k/(ω_i ω_j)` and
/// `R^op_{(j,i,k)} R_{(i,j,k)} = 1` on every channel, plus unitarity.
pub fn monodromy_check(blocks: &[RBlock], dd: &DerivedData, pol: &Tolerance) -> AxiomReport {
    let mut report = AxiomReport::default();
    let w = &dd.twists;
    let one = Complex::new(1.0, 0.0);
    let mut mono_dev: f64 = 0.0;
    let mut inv_dev: f64 = 0.0;
    let mut unit_dev: f64 = 0.0;
    for block in blocks {
        let [i, j, k] = block.channel;
        let diag = block.diagonal();

        let d = diag.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
        unit_dev = unit_dev.max(d);
        if d > pol.eq_tol {
            report.push(Diagnostic::error(
                BLOCK_UNITARY,
                vec![block.channel.to_vec()],
                d,
                "block is not unitary",
            ));
        }

        let Some(mirror) = blocks.iter().find(|b| b.channel == [j, i, k]) else {
            report.push(Diagnostic::error(
                BLOCK_SHAPE,
                vec![block.channel.to_vec()],
                1.0,
                "mirrored channel (j,i,k) is missing",
            ));
            continue;
        };
        let mirror_diag = mirror.diagonal();
        if mirror_diag.len() != diag.len() || diag.len() != dd.fusion.get(i, j, k) as usize {
            report.push(Diagnostic::error(
                BLOCK_SHAPE,
                vec![block.channel.to_vec()],
                1.0,
                "block sizes disagree with N^k_{i,j}",
            ));
            continue;
        }

        let expected = w[k] / (w[i] * w[j]);
        let d = mirror_diag
            .iter()
            .zip(&diag)
            .map(|(a, b)| (a * b - expected).norm())
            .fold(0.0, f64::max);
        mono_dev = mono_dev.max(d);
        if d > pol.eq_tol {
            report.push(Diagnostic::error(
                MONODROMY,
                vec![block.channel.to_vec()],
                d,
                "R_(j,i,k) R_(i,j,k) differs from ω_k/(ω_i ω_j)",
            ));
        }

        let op = r_op(mirror, dd).diagonal();
        let d = op
            .iter()
            .zip(&diag)
            .map(|(a, b)| (a * b - one).norm())
            .fold(0.0, f64::max);
        inv_dev = inv_dev.max(d);
        if d > pol.eq_tol {
            report.push(Diagnostic::error(
                OP_INVERSE,
                vec![block.channel.to_vec()],
                d,
                "R^op_(j,i,k) R_(i,j,k) is not the identity",
            ));
        }
    }
    report.record(MONODROMY, mono_dev);
    report.record(OP_INVERSE, inv_dev);
    report.record(BLOCK_UNITARY, unit_dev);
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_block() {
        let pol = Tolerance::default();
        let md =
            ModularData::from_rows(vec![vec![Complex::new(1.0, 0.0)]], vec![Complex::new(1.0, 0.0)], &pol).unwrap();
        let (dd, blocks) = synthesize(&md, &pol).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(
            blocks[0].form,
            BlockForm::Signed {
                value: Complex::new(1.0, 0.0),
                dim_plus: 1,
                dim_minus: 0
            }
        );
        assert_eq!(r_op(&blocks[0], &dd).value(), Complex::new(1.0, 0.0));
        assert!(monodromy_check(&blocks, &dd, &pol).passed());
    }

    #[test]
    fn signed_block_layout() {
        let b = RBlock {
            channel: [1, 1, 0],
            form: BlockForm::Signed {
                value: Complex::new(0.0, 1.0),
                dim_plus: 2,
                dim_minus: 1,
            },
        };
        assert_eq!(
            b.diagonal(),
            vec![Complex::new(0.0, 1.0), Complex::new(0.0, 1.0), Complex::new(0.0, -1.0)]
        );
        assert_eq!(b.trace(), Complex::new(0.0, 1.0));
        assert_eq!(b.size(), 3);
    }

    #[test]
    fn block_json_shape() {
        let s = RBlock {
            channel: [1, 2, 1],
            form: BlockForm::Scalar {
                value: Complex::new(0.0, 1.0),
                size: 1,
            },
        };
        let v: serde_json::Value = serde_json::to_value(&s).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"channel": [1, 2, 1], "form": "scalar", "value": [0.0, 1.0], "size": 1})
        );
        let g = RBlock {
            channel: [1, 1, 0],
            form: BlockForm::Signed {
                value: Complex::new(1.0, 0.0),
                dim_plus: 1,
                dim_minus: 0,
            },
        };
        let v: serde_json::Value = serde_json::to_value(&g).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"channel": [1, 1, 0], "form": "signed", "value": [1.0, 0.0], "dim_plus": 1, "dim_minus": 0})
        );
        let back: RBlock = serde_json::from_value(v).unwrap();
        assert_eq!(back, g);
    }
}

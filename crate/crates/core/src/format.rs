//! JSON file formats.
//!
//! A complex number is written either as `[re, im]` or, for exact phases,
//! as `{"abs": r, "arg_turns": "p/q"}` meaning `r·e^{2πi·p/q}`.
//!
//! Modular data: `{"rank": n, "labels": [...], "S": [[z, ...], ...], "T": [z, ...]}`
//! with `labels` optional. Explicit models add an `"r"` block
//! `[[[i, j, k], z], ...]`. Fusion rings: `{"rank": n, "N": [[[int]]]}` with
//! `N[i][j][k]` the multiplicity of `k` in `i × j`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{root_of_unity, Complex};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactPhase {
    pub abs: f64,
    pub arg_turns: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexRepr {
    Pair([f64; 2]),
    Exact(ExactPhase),
}

impl ComplexRepr {
    pub fn exact(abs: f64, p: i64, q: i64) -> Self {
        ComplexRepr::Exact(ExactPhase {
            abs,
            arg_turns: format!("{p}/{q}"),
        })
    }

    pub fn to_complex(&self) -> Result<Complex> {
        let z = match self {
            ComplexRepr::Pair([re, im]) => Complex::new(*re, *im),
            ComplexRepr::Exact(e) => {
                let (p, q) = parse_turns(&e.arg_turns)?;
                root_of_unity(p, q) * e.abs
            }
        };
        if !z.is_finite() {
            return Err(Error::Malformed(format!("non-finite complex value {self:?}")));
        }
        Ok(z)
    }
}

impl From<Complex> for ComplexRepr {
    fn from(z: Complex) -> Self {
        ComplexRepr::Pair([z.re, z.im])
    }
}

/// Parses `"p/q"` with integer `p` and positive integer `q`.
pub fn parse_turns(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::Malformed(format!("arg_turns must look like \"p/q\" with q > 0, got {s:?}"));
    let (p, q) = s.split_once('/').ok_or_else(bad)?;
    let p: i64 = p.trim().parse().map_err(|_| bad())?;
    let q: i64 = q.trim().parse().map_err(|_| bad())?;
    if q <= 0 {
        return Err(bad());
    }
    Ok((p, q))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModularDataFile {
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(rename = "S")]
    pub s: Vec<Vec<ComplexRepr>>,
    #[serde(rename = "T")]
    pub t: Vec<ComplexRepr>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(rename = "S")]
    pub s: Vec<Vec<ComplexRepr>>,
    #[serde(rename = "T")]
    pub t: Vec<ComplexRepr>,
    pub r: Vec<([usize; 3], ComplexRepr)>,
}

impl ModelFile {
    pub fn modular_part(&self) -> ModularDataFile {
        ModularDataFile {
            rank: self.rank,
            labels: self.labels.clone(),
            s: self.s.clone(),
            t: self.t.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FusionRingFile {
    pub rank: usize,
    #[serde(rename = "N")]
    pub n: Vec<Vec<Vec<u32>>>,
}

/// Serde adapter writing a complex number as `[re, im]`.
pub mod pair {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex, ser: S) -> std::result::Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Complex, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(de)?;
        Ok(Complex::new(re, im))
    }
}

pub mod pair_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex], ser: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Vec<Complex>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(de)?;
        Ok(pairs.into_iter().map(|[re, im]| Complex::new(re, im)).collect())
    }
}

pub mod pair_table {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<Complex>], ser: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = v.iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect();
        rows.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Vec<Vec<Complex>>, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(de)?;
        Ok(rows
            .into_iter()
            .map(|row| row.into_iter().map(|[re, im]| Complex::new(re, im)).collect())
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_complex_forms() {
        let z: ComplexRepr = serde_json::from_str("[0.5, -0.25]").unwrap();
        assert_eq!(z.to_complex().unwrap(), Complex::new(0.5, -0.25));

        let w: ComplexRepr = serde_json::from_str(r#"{"abs": 2.0, "arg_turns": "1/4"}"#).unwrap();
        assert_eq!(w.to_complex().unwrap(), Complex::new(0.0, 2.0));

        let neg: ComplexRepr = serde_json::from_str(r#"{"abs": 1, "arg_turns": "-7/60"}"#).unwrap();
        let expected = Complex::from_polar(1.0, -std::f64::consts::TAU * 7.0 / 60.0);
        assert!((neg.to_complex().unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_turns() {
        for s in ["1", "1/0", "1/-3", "a/b", "1.5/2"] {
            assert!(parse_turns(s).is_err(), "{s}");
        }
        let bad = r#"{"abs": 1, "arg_turns": "1/2", "extra": 0}"#;
        assert!(serde_json::from_str::<ComplexRepr>(bad).is_err());
    }

    #[test]
    fn rejects_unknown_top_level_keys() {
        let text = r#"{"rank": 1, "S": [[[1,0]]], "T": [[1,0]], "vacuum": 0}"#;
        assert!(serde_json::from_str::<ModularDataFile>(text).is_err());
    }

    #[test]
    fn model_file_r_block() {
        let text = r#"{"rank": 1, "S": [[[1,0]]], "T": [[1,0]], "r": [[[0,0,0], [1,0]]]}"#;
        let m: ModelFile = serde_json::from_str(text).unwrap();
        assert_eq!(m.r.len(), 1);
        assert_eq!(m.r[0].0, [0, 0, 0]);
    }
}

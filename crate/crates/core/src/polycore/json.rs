//! Wire format. Coefficients travel as `"num/den"` strings so no precision
//! is lost.

use serde::{Deserialize, Serialize};

use super::matpoly::MatPoly;
use super::poly::Poly;
use super::rational::parse_rational;
use super::PolyError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub coef: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub d: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatPolyJson {
    pub n: usize,
    pub d: usize,
    #[serde(default)]
    pub symmetric: bool,
    pub entries: Vec<Vec<PolyJson>>,
}

impl From<&Poly> for PolyJson {
    fn from(p: &Poly) -> Self {
        PolyJson {
            d: p.nvars(),
            terms: p
                .terms()
                .map(|(m, c)| TermJson {
                    exp: m.exps().to_vec(),
                    coef: c.to_string(),
                })
                .collect(),
        }
    }
}

impl TryFrom<PolyJson> for Poly {
    type Error = PolyError;

    fn try_from(j: PolyJson) -> Result<Self, PolyError> {
        let terms = j
            .terms
            .into_iter()
            .map(|t| Ok((t.exp, parse_rational(&t.coef)?)))
            .collect::<Result<Vec<_>, PolyError>>()?;
        Poly::from_terms(j.d, terms)
    }
}

impl From<Poly> for PolyJson {
    fn from(p: Poly) -> Self {
        PolyJson::from(&p)
    }
}

impl From<&MatPoly> for MatPolyJson {
    fn from(m: &MatPoly) -> Self {
        MatPolyJson {
            n: m.n(),
            d: m.nvars(),
            symmetric: m.is_symmetric(),
            entries: m
                .rows()
                .iter()
                .map(|r| r.iter().map(PolyJson::from).collect())
                .collect(),
        }
    }
}

impl From<MatPoly> for MatPolyJson {
    fn from(m: MatPoly) -> Self {
        MatPolyJson::from(&m)
    }
}

impl TryFrom<MatPolyJson> for MatPoly {
    type Error = PolyError;

    /// A `symmetric: true` claim is checked against the entries.
    fn try_from(j: MatPolyJson) -> Result<Self, PolyError> {
        if j.entries.len() != j.n {
            return Err(PolyError::Shape(format!(
                "declared n = {} but found {} rows",
                j.n,
                j.entries.len()
            )));
        }
        let rows = j
            .entries
            .into_iter()
            .map(|r| r.into_iter().map(Poly::try_from).collect())
            .collect::<Result<Vec<Vec<Poly>>, PolyError>>()?;
        let m = MatPoly::from_rows(j.d, rows)?;
        if j.symmetric {
            m.require_symmetric()?;
        }
        Ok(m)
    }
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Poly::try_from(PolyJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl Serialize for MatPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatPolyJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        MatPoly::try_from(MatPolyJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

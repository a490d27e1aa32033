use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{MpsError, Result, Series};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub e: Vec<u32>,
    pub num: String,
    pub den: String,
}

/// Wire form of a series: `{"t", "N", "terms": [{"e", "num", "den"}]}`,
/// where `t` is the number of variables and terms are in graded lex order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub t: usize,
    #[serde(rename = "N")]
    pub n: u32,
    pub terms: Vec<TermJson>,
}

impl Series {
    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            t: self.vars,
            n: self.trunc,
            terms: self
                .sorted_terms()
                .into_iter()
                .map(|(e, c)| TermJson {
                    e: e.0.to_vec(),
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("series json is always serialisable")
    }

    pub fn from_json(j: &SeriesJson) -> Result<Series> {
        if j.t == 0 {
            return Err(MpsError::Json("t must be positive".into()));
        }
        let mut terms = Vec::with_capacity(j.terms.len());
        for term in &j.terms {
            let num: BigInt = term
                .num
                .parse()
                .map_err(|_| MpsError::Json(format!("bad numerator {:?}", term.num)))?;
            let den: BigInt = term
                .den
                .parse()
                .map_err(|_| MpsError::Json(format!("bad denominator {:?}", term.den)))?;
            if den == BigInt::from(0) {
                return Err(MpsError::Json("zero denominator".into()));
            }
            terms.push((term.e.clone(), BigRational::new(num, den)));
        }
        Series::from_terms(j.t, j.n, terms)
    }

    pub fn from_json_str(s: &str) -> Result<Series> {
        let j: SeriesJson = serde_json::from_str(s).map_err(|e| MpsError::Json(e.to_string()))?;
        Self::from_json(&j)
    }
}

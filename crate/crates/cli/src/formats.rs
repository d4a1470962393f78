//! JSON shapes shared by the subcommands.
//!
//! Big integers travel as decimal strings, rationals as `"num/den"`.

use std::str::FromStr;

use extkp_core::diffpoly::{DiffPoly, Jet, Monomial};
use extkp_core::pearcey::AsymptoticComparison;
use extkp_core::{LaurentSeries, Rational};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// `"num/den"`, always with an explicit denominator.
pub fn rational_to_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    let bad = || CliError::Format(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub exp: i64,
    pub num: String,
    pub den: String,
}

/// `{"trunc": n, "terms": [{"exp": n, "num": "..", "den": ".."}]}`, terms by
/// descending exponent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub trunc: i64,
    pub terms: Vec<SeriesTerm>,
}

impl From<&LaurentSeries> for SeriesJson {
    fn from(s: &LaurentSeries) -> Self {
        SeriesJson {
            trunc: s.trunc(),
            terms: s
                .terms()
                .rev()
                .map(|(exp, c)| SeriesTerm {
                    exp,
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        }
    }
}

impl SeriesJson {
    pub fn to_series(&self) -> Result<LaurentSeries, CliError> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((t.exp, parse_rational(&format!("{}/{}", t.num, t.den))?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(LaurentSeries::new(terms, self.trunc))
    }
}

/// `{"r": r, "order": K, "a": [a_1..], "d": [d_1..]}`; a side that was not
/// requested is omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffsJson {
    pub r: u32,
    pub order: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d: Option<Vec<String>>,
}

/// One monomial: `{"coeff": "num/den", "vars": [[alpha, k, power], ..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffPolyTerm {
    pub coeff: String,
    pub vars: Vec<[u32; 3]>,
}

pub fn diffpoly_to_json(p: &DiffPoly) -> Vec<DiffPolyTerm> {
    p.terms()
        .rev()
        .map(|(m, c)| DiffPolyTerm {
            coeff: rational_to_string(c),
            vars: m
                .factors()
                .iter()
                .map(|(j, pw)| [j.field, j.order, *pw])
                .collect(),
        })
        .collect()
}

pub fn diffpoly_from_json(terms: &[DiffPolyTerm]) -> Result<DiffPoly, CliError> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        if t.vars.iter().any(|v| v[0] == 0 || v[2] == 0) {
            return Err(CliError::Format(format!(
                "field indices and powers start at 1: {:?}",
                t.vars
            )));
        }
        let m = Monomial::from_factors(t.vars.iter().map(|v| (Jet::new(v[0], v[1]), v[2])));
        out.push((m, parse_rational(&t.coeff)?));
    }
    Ok(DiffPoly::from_terms(out))
}

/// `{"z": [re, im], "value": [re, im], "truncation": K, "gap": g, "bound": b}`
/// followed by diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PearceyJson {
    pub z: [f64; 2],
    pub value: [f64; 2],
    pub truncation: usize,
    pub gap: f64,
    pub bound: f64,
    pub series: [f64; 2],
    pub margin: f64,
    pub error_estimate: f64,
    pub asserted: bool,
    pub pass: bool,
}

impl PearceyJson {
    pub fn new(c: &AsymptoticComparison, asserted: bool) -> Self {
        PearceyJson {
            z: [c.z.re, c.z.im],
            value: [c.value.re, c.value.im],
            truncation: c.terms,
            gap: c.gap,
            bound: c.bound,
            series: [c.truncation.re, c.truncation.im],
            margin: c.bound - c.gap,
            error_estimate: c.error_estimate,
            asserted,
            pass: c.passes(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use extkp_core::q;

    #[test]
    fn rationals_round_trip() {
        assert_eq!(rational_to_string(&q(-5, 24)), "-5/24");
        assert_eq!(rational_to_string(&q(3, 1)), "3/1");
        assert_eq!(parse_rational("-5/24").unwrap(), q(-5, 24));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn series_round_trip() {
        let s = LaurentSeries::new([(0, q(1, 1)), (-3, q(-5, 24))], 5);
        let j = SeriesJson::from(&s);
        let text = serde_json::to_string(&j).unwrap();
        assert_eq!(
            text,
            r#"{"trunc":5,"terms":[{"exp":0,"num":"1","den":"1"},{"exp":-3,"num":"-5","den":"24"}]}"#
        );
        let back: SeriesJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_series().unwrap(), s);
    }

    #[test]
    fn diffpoly_round_trip() {
        let p = &DiffPoly::var(1, 3).scale(&q(1, 12))
            + &(&DiffPoly::var(1, 0) * &DiffPoly::var(1, 1)).scale(&q(1, 2));
        let j = diffpoly_to_json(&p);
        let back = diffpoly_from_json(&j).unwrap();
        assert_eq!(back, p);
        assert!(diffpoly_from_json(&[DiffPolyTerm {
            coeff: "1".into(),
            vars: vec![[0, 0, 1]]
        }])
        .is_err());
    }
}

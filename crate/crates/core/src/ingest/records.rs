//! Raw CSV rows: exposures, capitals and long-form factor observations.

use std::collections::HashSet;
use std::io::Read;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layers::{LayerId, LayerTaxonomy, SignPolicy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExposureRecord {
    pub period: NaiveDate,
    pub from_bank: String,
    pub to_bank: String,
    pub layer: LayerId,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapitalRecord {
    pub period: NaiveDate,
    pub bank: String,
    pub total_capital: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorObservation {
    pub period: NaiveDate,
    pub factor: String,
    pub value: f64,
}

pub fn parse_date(s: &str, line: usize) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
        .map_err(|e| Error::Parse { line, message: format!("invalid date `{s}`: {e}") })
}

fn parse_amount(s: &str, line: usize) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse { line, message: format!("invalid number `{s}`") })?;
    if !v.is_finite() {
        return Err(Error::InvalidAmount { value: v, context: format!("line {line}") });
    }
    Ok(v)
}

/// Reads a headed CSV and yields `(line, fields)` with fields ordered as `columns`.
fn read_columns<R: Read>(reader: R, columns: &[&str]) -> Result<Vec<(usize, Vec<String>)>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let positions = columns
        .iter()
        .map(|c| {
            headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case(c))
                .ok_or_else(|| Error::MissingColumn((*c).to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let fields = positions
            .iter()
            .zip(columns)
            .map(|(&p, c)| {
                rec.get(p)
                    .map(str::to_string)
                    .ok_or_else(|| Error::Parse { line, message: format!("missing field `{c}`") })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((line, fields));
    }
    Ok(rows)
}

/// Parses `period,from_bank,to_bank,layer,amount`. Layer names match the
/// taxonomy case-insensitively.
pub fn parse_exposures<R: Read>(reader: R, taxonomy: &LayerTaxonomy) -> Result<Vec<ExposureRecord>> {
    read_columns(reader, &["period", "from_bank", "to_bank", "layer", "amount"])?
        .into_iter()
        .map(|(line, f)| {
            let period = parse_date(&f[0], line)?;
            let layer = taxonomy.resolve(&f[3])?;
            let amount = parse_amount(&f[4], line)?;
            if f[1].is_empty() || f[2].is_empty() {
                return Err(Error::Parse { line, message: "empty bank identifier".into() });
            }
            if f[1] == f[2] {
                return Err(Error::SelfExposure(f[1].clone()));
            }
            Ok(ExposureRecord { period, from_bank: f[1].clone(), to_bank: f[2].clone(), layer, amount })
        })
        .collect()
}

/// Parses `period,bank,total_capital`; one row per `(period, bank)`.
pub fn parse_capitals<R: Read>(reader: R) -> Result<Vec<CapitalRecord>> {
    let mut seen = HashSet::new();
    read_columns(reader, &["period", "bank", "total_capital"])?
        .into_iter()
        .map(|(line, f)| {
            let period = parse_date(&f[0], line)?;
            let total_capital = parse_amount(&f[2], line)?;
            if !(total_capital > 0.0) {
                return Err(Error::NonPositiveCapital { bank: f[1].clone(), value: total_capital });
            }
            if !seen.insert((period, f[1].clone())) {
                return Err(Error::Parse { line, message: format!("duplicate capital for {} at {period}", f[1]) });
            }
            Ok(CapitalRecord { period, bank: f[1].clone(), total_capital })
        })
        .collect()
}

/// Parses long-form `period,factor_name,value`.
pub fn parse_factors<R: Read>(reader: R) -> Result<Vec<FactorObservation>> {
    read_columns(reader, &["period", "factor_name", "value"])?
        .into_iter()
        .map(|(line, f)| {
            Ok(FactorObservation { period: parse_date(&f[0], line)?, factor: f[1].clone(), value: parse_amount(&f[2], line)? })
        })
        .collect()
}

/// Converts signed amounts to non-negative weights per the layer rules and
/// drops records left with zero exposure.
pub fn apply_sign_policy(records: Vec<ExposureRecord>, policy: &SignPolicy) -> Result<Vec<ExposureRecord>> {
    let mut out = Vec::with_capacity(records.len());
    for mut r in records {
        if let Some(v) = policy.rule_for(&r.layer).apply(r.amount, &r.layer)? {
            r.amount = v;
            out.push(r);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layers::CanonicalLayer;

    const HEADER: &str = "period,from_bank,to_bank,layer,amount\n";

    #[test]
    fn parses_a_row() {
        let recs = parse_exposures(
            format!("{HEADER}2013-06-30,A,B,UNSECURED_LENDING,100.0\n").as_bytes(),
            &LayerTaxonomy::canonical(),
        )
        .unwrap();
        assert_eq!(
            recs,
            vec![ExposureRecord {
                period: NaiveDate::from_ymd_opt(2013, 6, 30).unwrap(),
                from_bank: "A".into(),
                to_bank: "B".into(),
                layer: LayerId::Canonical(CanonicalLayer::UnsecuredLending),
                amount: 100.0,
            }]
        );
    }

    #[test]
    fn rejects_bad_rows() {
        let tax = LayerTaxonomy::canonical();
        let unknown = parse_exposures(format!("{HEADER}2013-06-30,A,B,FOO,1\n").as_bytes(), &tax);
        assert!(matches!(unknown, Err(Error::UnknownLayer(_))));
        assert!(unknown.unwrap_err().to_string().contains("unknown layer"));
        let selfx = parse_exposures(format!("{HEADER}2013-06-30,A,A,SECURED_LENDING,5\n").as_bytes(), &tax);
        assert!(selfx.unwrap_err().to_string().contains("self-exposure"));
        let date = parse_exposures(format!("{HEADER}2013-13-30,A,B,SECURED_LENDING,5\n").as_bytes(), &tax);
        assert!(matches!(date, Err(Error::Parse { .. })));
        let amount = parse_exposures(format!("{HEADER}2013-06-30,A,B,SECURED_LENDING,1,000\n").as_bytes(), &tax);
        assert!(amount.is_err());
        let missing = parse_exposures("period,from_bank,to_bank,amount\n".as_bytes(), &tax);
        assert!(matches!(missing, Err(Error::MissingColumn(c)) if c == "layer"));
    }

    #[test]
    fn layer_names_are_case_insensitive() {
        let recs =
            parse_exposures(format!("{HEADER}2013-06-30,A,B,cds_net_sold,-4\n").as_bytes(), &LayerTaxonomy::canonical())
                .unwrap();
        assert_eq!(recs[0].layer, LayerId::Canonical(CanonicalLayer::CdsNetSold));
    }

    #[test]
    fn sign_policy_examples() {
        let tax = LayerTaxonomy::canonical();
        let csv = format!(
            "{HEADER}2013-06-30,A,B,CDS_NET_SOLD,-40\n2013-06-30,A,B,MARKETABLE_SECURITIES,-10\n2013-06-30,A,B,UNSECURED_LENDING,0\n"
        );
        let recs = apply_sign_policy(parse_exposures(csv.as_bytes(), &tax).unwrap(), &SignPolicy::default()).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].amount, 40.0);
        let neg = parse_exposures(format!("{HEADER}2013-06-30,A,B,UNSECURED_LENDING,-1\n").as_bytes(), &tax).unwrap();
        assert!(matches!(apply_sign_policy(neg, &SignPolicy::default()), Err(Error::NegativeAmount { .. })));
    }

    #[test]
    fn capitals_and_factors() {
        let caps = parse_capitals("period,bank,total_capital\n2013-06-30,A,10\n2013-06-30,B,5.5\n".as_bytes()).unwrap();
        assert_eq!(caps[1].total_capital, 5.5);
        assert!(parse_capitals("period,bank,total_capital\n2013-06-30,A,10\n2013-06-30,A,1\n".as_bytes()).is_err());
        assert!(parse_capitals("period,bank,total_capital\n2013-06-30,A,0\n".as_bytes()).is_err());
        let f = parse_factors("period,factor_name,value\n2013-01-31,DJI,15000.5\n".as_bytes()).unwrap();
        assert_eq!(f[0].factor, "DJI");
    }
}

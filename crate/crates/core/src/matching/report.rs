use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{Classification, MatchError, StrategyCategory};

/// One classified response, flattened for spreadsheet tools.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub participant: String,
    pub question: String,
    pub category: StrategyCategory,
    pub algorithm: Option<String>,
    pub chi2: Option<f64>,
    pub chi2_p: Option<f64>,
    pub rho: Option<f64>,
    pub rho_p: Option<f64>,
}

impl ResponseRecord {
    pub fn new(participant: &str, question: &str, c: &Classification) -> ResponseRecord {
        let b = c.best.as_ref();
        ResponseRecord {
            participant: participant.to_string(),
            question: question.to_string(),
            category: c.category,
            algorithm: b.map(|b| b.algorithm.name().to_string()),
            chi2: b.map(|b| b.chi2),
            chi2_p: b.map(|b| b.chi2_p),
            rho: b.and_then(|b| b.rho),
            rho_p: b.and_then(|b| b.rho_p),
        }
    }
}

/// Writes records as CSV with a header row.
pub fn write_csv<W: Write>(records: &[ResponseRecord], out: W) -> Result<(), MatchError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(|e| MatchError::Csv(e.to_string()))?;
    }
    w.flush().map_err(|e| MatchError::Csv(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_empty_fields() {
        let c = Classification {
            category: StrategyCategory::Other,
            best: None,
            results: vec![],
        };
        let mut buf = Vec::new();
        write_csv(&[ResponseRecord::new("p1", "sort-1-0", &c)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("participant,question,category,algorithm,chi2,chi2_p,rho,rho_p")
        );
        assert_eq!(lines.next(), Some("p1,sort-1-0,Other,,,,,"));
    }
}

//! Run reports and their CSV / JSON encodings.
//!
//! CSV numbers use `{:.16e}` (17 significant digits), which round-trips every
//! finite `f64`; fields that were not computed are left empty.

use std::io::{Read, Write};

use crate::error::{HraError, Result};
use crate::mcs::MCSEstimate;
use crate::pipeline::{Analysis, AnalysisSettings};

pub const CSV_HEADER: [&str; 15] = [
    "case", "m", "n", "beta", "d", "D", "F_lo", "F_hi", "R_lo", "R_hi", "mcs_p", "mcs_ci_lo", "mcs_ci_hi",
    "runtime_ms", "seed",
];

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RunReport {
    pub case: String,
    pub m: usize,
    pub n: usize,
    pub beta: Option<f64>,
    pub d: Option<f64>,
    #[serde(rename = "D")]
    pub big_d: Option<f64>,
    pub f_lo: Option<f64>,
    pub f_hi: Option<f64>,
    pub r_lo: Option<f64>,
    pub r_hi: Option<f64>,
    pub mcs_p: Option<f64>,
    pub mcs_ci_lo: Option<f64>,
    pub mcs_ci_hi: Option<f64>,
    pub runtime_ms: u64,
    pub seed: u64,
    /// JSON-only extras: settings echo, convergence, the σ curve, case
    /// parameters and MCS details.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settings: Option<AnalysisSettings>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub curve: Vec<(f64, f64)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<(String, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mcs: Option<MCSEstimate>,
}

impl RunReport {
    pub fn new(case: impl Into<String>, m: usize, n: usize, seed: u64) -> Self {
        Self {
            case: case.into(),
            m,
            n,
            beta: None,
            d: None,
            big_d: None,
            f_lo: None,
            f_hi: None,
            r_lo: None,
            r_hi: None,
            mcs_p: None,
            mcs_ci_lo: None,
            mcs_ci_hi: None,
            runtime_ms: 0,
            seed,
            settings: None,
            converged: None,
            iterations: None,
            curve: Vec::new(),
            params: Vec::new(),
            mcs: None,
        }
    }

    /// Fills the analysis columns. The failure bounds are computed from the
    /// reliability bounds so that `F_lo + R_hi = 1` and `F_hi + R_lo = 1`
    /// hold in floating point exactly as the integrator reported them.
    pub fn with_analysis(mut self, analysis: &Analysis, settings: &AnalysisSettings) -> Self {
        let iv = &analysis.interval;
        self.r_lo = Some(iv.r_lo);
        self.r_hi = Some(iv.r_hi);
        self.f_lo = Some(iv.f_lo);
        self.f_hi = Some(iv.f_hi);
        if let Some(dp) = &analysis.design_point {
            self.beta = Some(dp.beta);
            self.converged = Some(dp.converged);
            self.iterations = Some(dp.iterations);
        }
        if let Some(r) = &analysis.reduced {
            self.d = Some(r.d);
            self.big_d = Some(r.big_d);
        }
        self.curve = iv.curve.clone();
        self.settings = Some(*settings);
        self
    }

    pub fn with_mcs(mut self, est: &MCSEstimate) -> Self {
        self.mcs_p = Some(est.p_hat);
        self.mcs_ci_lo = Some(est.ci_lo);
        self.mcs_ci_hi = Some(est.ci_hi);
        self.seed = est.seed;
        self.mcs = Some(est.clone());
        self
    }

    fn csv_record(&self) -> Vec<String> {
        let num = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        vec![
            self.case.clone(),
            self.m.to_string(),
            self.n.to_string(),
            num(self.beta),
            num(self.d),
            num(self.big_d),
            num(self.f_lo),
            num(self.f_hi),
            num(self.r_lo),
            num(self.r_hi),
            num(self.mcs_p),
            num(self.mcs_ci_lo),
            num(self.mcs_ci_hi),
            self.runtime_ms.to_string(),
            self.seed.to_string(),
        ]
    }
}

fn csv_err(e: csv::Error) -> HraError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => HraError::Io(io),
        other => HraError::InvalidParameter(format!("csv: {other:?}")),
    }
}

pub fn write_csv<W: Write>(reports: &[RunReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in reports {
        w.write_record(r.csv_record()).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(reports: &[RunReport], mut out: W) -> Result<()> {
    let text = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])
    } else {
        serde_json::to_string_pretty(reports)
    }
    .map_err(|e| HraError::InvalidParameter(format!("json: {e}")))?;
    writeln!(out, "{text}")?;
    Ok(())
}

/// Parses CSV produced by [`write_csv`] back into the CSV columns of
/// [`RunReport`] (JSON-only extras are left empty).
pub fn parse_csv<R: Read>(input: R) -> Result<Vec<RunReport>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(HraError::InvalidParameter(format!("unexpected CSV header {header:?}")));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let opt = |i: usize| -> Result<Option<f64>> {
            let s = field(i);
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse::<f64>().map(Some).map_err(|e| HraError::InvalidParameter(format!("field {}: {e}", CSV_HEADER[i])))
            }
        };
        let int = |i: usize| -> Result<u64> {
            field(i).parse::<u64>().map_err(|e| HraError::InvalidParameter(format!("field {}: {e}", CSV_HEADER[i])))
        };
        let mut r = RunReport::new(field(0), int(1)? as usize, int(2)? as usize, int(14)?);
        r.beta = opt(3)?;
        r.d = opt(4)?;
        r.big_d = opt(5)?;
        r.f_lo = opt(6)?;
        r.f_hi = opt(7)?;
        r.r_lo = opt(8)?;
        r.r_hi = opt(9)?;
        r.mcs_p = opt(10)?;
        r.mcs_ci_lo = opt(11)?;
        r.mcs_ci_hi = opt(12)?;
        r.runtime_ms = int(13)?;
        out.push(r);
    }
    Ok(out)
}

/// `sigma,R_H` rows of a reliability curve.
pub fn write_curve_csv<W: Write>(curve: &[(f64, f64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sigma", "R_H"]).map_err(csv_err)?;
    for (s, r) in curve {
        w.write_record([format!("{s:.16e}"), format!("{r:.16e}")]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> RunReport {
        let mut r = RunReport::new("linear", 5, 5, 7);
        r.beta = Some(10f64.sqrt());
        r.d = Some(3.1622776601683795);
        r.big_d = Some(0.31622776601683794);
        r.r_lo = Some(0.9996);
        r.r_hi = Some(0.99995);
        r.f_lo = Some(1.0 - 0.99995);
        r.f_hi = Some(1.0 - 0.9996);
        r.runtime_ms = 12;
        r
    }

    #[test]
    fn header_and_empty_fields() {
        let mut buf = Vec::new();
        write_csv(&[sample()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        let row = lines.next().unwrap();
        assert!(row.starts_with("linear,5,5,3.1622776601683795e0,"), "{row}");
        assert!(row.contains(",,,,12,7") || row.ends_with(",,,12,7"), "{row}");
    }

    #[test]
    fn round_trip_sample() {
        let mut buf = Vec::new();
        write_csv(&[sample()], &mut buf).unwrap();
        let back = parse_csv(buf.as_slice()).unwrap();
        assert_eq!(back[0].csv_record(), sample().csv_record());
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_bit_exact(vals in proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 10)) {
            let mut r = RunReport::new("x", 1, 2, 3);
            r.beta = Some(vals[0]); r.d = Some(vals[1]); r.big_d = Some(vals[2]);
            r.f_lo = Some(vals[3]); r.f_hi = Some(vals[4]); r.r_lo = Some(vals[5]); r.r_hi = Some(vals[6]);
            r.mcs_p = Some(vals[7]); r.mcs_ci_lo = Some(vals[8]); r.mcs_ci_hi = Some(vals[9]);
            let mut buf = Vec::new();
            write_csv(&[r.clone()], &mut buf).unwrap();
            let back = &parse_csv(buf.as_slice()).unwrap()[0];
            let pairs = [
                (r.beta, back.beta), (r.d, back.d), (r.big_d, back.big_d), (r.f_lo, back.f_lo), (r.f_hi, back.f_hi),
                (r.r_lo, back.r_lo), (r.r_hi, back.r_hi), (r.mcs_p, back.mcs_p), (r.mcs_ci_lo, back.mcs_ci_lo),
                (r.mcs_ci_hi, back.mcs_ci_hi),
            ];
            for (a, b) in pairs {
                prop_assert_eq!(a.unwrap().to_bits(), b.unwrap().to_bits());
            }
        }
    }
}

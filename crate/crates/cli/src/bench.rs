//! Timing harness comparing inversion methods on the same inputs.

use std::time::Instant;

use formal_inverse::inversion::Method;
use formal_inverse::{MapF, PolyMap};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::doc::MapDocument;
use crate::error::CliError;

pub const DEFAULT_METHODS: [Method; 4] = [
    Method::Recurrent,
    Method::Homogeneous,
    Method::AbhyankarGurjar,
    Method::Bcw,
];

#[derive(Clone, Debug)]
pub struct BenchInput {
    pub id: String,
    pub map: MapF,
}

/// One row of the benchmark table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub input_id: String,
    pub method: String,
    pub degree: u32,
    /// Median wall time over the runs.
    pub millis: f64,
    /// Terms in the computed inverse.
    pub terms: usize,
    pub agree_hash: String,
}

#[derive(Clone, Debug, Default)]
pub struct BenchOutcome {
    pub records: Vec<BenchRecord>,
    pub notes: Vec<String>,
}

/// First 16 hex digits of the SHA-256 of the canonical document of `g`.
pub fn agreement_hash(g: &PolyMap) -> String {
    let digest = Sha256::digest(MapDocument::from_map(g).to_line().as_bytes());
    hex::encode(&digest[..8])
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        (xs[k / 2 - 1] + xs[k / 2]) / 2.0
    }
}

/// Times every applicable method on every input at every degree.
///
/// Rows for an (input, degree) pair are only kept once all methods agree on
/// the result; any disagreement aborts with the two hashes and the first
/// differing coefficient.
pub fn bench(
    inputs: &[BenchInput],
    methods: &[Method],
    degrees: &[u32],
    runs: usize,
) -> Result<BenchOutcome, CliError> {
    if runs == 0 {
        return Err(CliError::Input("runs must be at least 1".into()));
    }
    let mut out = BenchOutcome::default();
    for input in inputs {
        for &d in degrees {
            let mut rows: Vec<(BenchRecord, PolyMap)> = Vec::new();
            for &m in methods {
                if let Err(e) = m.applicable(&input.map) {
                    out.notes
                        .push(format!("{}: {} skipped ({e})", input.id, m.name()));
                    continue;
                }
                let mut times = Vec::with_capacity(runs);
                let mut result = None;
                for _ in 0..runs {
                    let start = Instant::now();
                    let g = m.invert(&input.map, d)?;
                    times.push(start.elapsed().as_secs_f64() * 1000.0);
                    result = Some(g);
                }
                let g = result.expect("runs >= 1");
                let record = BenchRecord {
                    input_id: input.id.clone(),
                    method: m.name().to_string(),
                    degree: d,
                    millis: median(times),
                    terms: g.term_count(),
                    agree_hash: agreement_hash(&g),
                };
                rows.push((record, g));
            }
            if let Some((first, g0)) = rows.first() {
                for (r, g) in &rows[1..] {
                    if r.agree_hash != first.agree_hash {
                        let detail = match g0.first_difference(g, d) {
                            Some((i, e, a, b)) => {
                                format!(
                                    "component {}, exponent {:?}: {a} vs {b}",
                                    i + 1,
                                    e.as_slice()
                                )
                            }
                            None => "results differ".into(),
                        };
                        return Err(CliError::Verification(format!(
                            "{} at D = {d}: {} ({}) and {} ({}) disagree at {detail}",
                            input.id, first.method, first.agree_hash, r.method, r.agree_hash
                        )));
                    }
                }
            }
            out.records.extend(rows.into_iter().map(|(r, _)| r));
        }
    }
    Ok(out)
}

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(CsvRow::from(r)).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

#[derive(Serialize)]
struct CsvRow<'a> {
    input_id: &'a str,
    method: &'a str,
    degree: u32,
    millis: String,
    terms: usize,
    agree_hash: &'a str,
}

impl<'a> From<&'a BenchRecord> for CsvRow<'a> {
    fn from(r: &'a BenchRecord) -> Self {
        CsvRow {
            input_id: &r.input_id,
            method: &r.method,
            degree: r.degree,
            millis: format!("{:.3}", r.millis),
            terms: r.terms,
            agree_hash: &r.agree_hash,
        }
    }
}

/// Aligned table followed by the per-degree ranking (fastest first).
pub fn to_table(outcome: &BenchOutcome) -> String {
    let mut s = format!(
        "{:<16} {:<10} {:>6} {:>12} {:>8}  {}\n",
        "input", "method", "D", "millis", "terms", "hash"
    );
    for r in &outcome.records {
        s.push_str(&format!(
            "{:<16} {:<10} {:>6} {:>12.3} {:>8}  {}\n",
            r.input_id, r.method, r.degree, r.millis, r.terms, r.agree_hash
        ));
    }
    let mut keys: Vec<(&str, u32)> = outcome
        .records
        .iter()
        .map(|r| (r.input_id.as_str(), r.degree))
        .collect();
    keys.dedup();
    for (id, d) in keys {
        let mut group: Vec<&BenchRecord> = outcome
            .records
            .iter()
            .filter(|r| r.input_id == id && r.degree == d)
            .collect();
        group.sort_by(|a, b| a.millis.total_cmp(&b.millis));
        let names: Vec<&str> = group.iter().map(|r| r.method.as_str()).collect();
        s.push_str(&format!("ranking {id} D={d}: {}\n", names.join(" < ")));
    }
    for n in &outcome.notes {
        s.push_str(&format!("note: {n}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::preset;

    #[test]
    fn catalan_rows_agree() {
        let inputs = [BenchInput {
            id: "catalan".into(),
            map: preset("catalan", 6).unwrap(),
        }];
        let out = bench(&inputs, &DEFAULT_METHODS, &[4, 6], 1).unwrap();
        assert_eq!(out.records.len(), 8);
        for d in [4, 6] {
            let hashes: Vec<&str> = out
                .records
                .iter()
                .filter(|r| r.degree == d)
                .map(|r| r.agree_hash.as_str())
                .collect();
            assert!(hashes.windows(2).all(|w| w[0] == w[1]));
        }
        let csv = to_csv(&out.records);
        assert!(csv.starts_with("input_id,method,degree,millis,terms,agree_hash\n"));
        assert_eq!(csv.lines().count(), 9);
    }

    #[test]
    fn zero_map_and_skips() {
        let zero = MapF::from_h(PolyMap::zero(2, 4)).unwrap();
        let inputs = [BenchInput {
            id: "zero".into(),
            map: zero,
        }];
        let out = bench(&inputs, &DEFAULT_METHODS, &[4], 1).unwrap();
        assert_eq!(out.records.len(), 3);
        assert_eq!(out.notes.len(), 1);
        assert!(out.records.iter().all(|r| r.terms == 2));
    }

    #[test]
    fn medians() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0]), 2.5);
    }
}

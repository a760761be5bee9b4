//! Long-format group/response data and per-group sufficient statistics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::Scalar;

/// The creatine-kinase serum measurements (rats, sodium dichromate; dose in mg)
/// in long format with columns `Dose` and `CreatKinase`. Ten animals per dose,
/// dose `0` is the control.
pub const CREATINE_KINASE_CSV: &str = include_str!("../data/creatine_kinase.csv");

#[derive(Debug, Clone, PartialEq)]
pub struct Record<T> {
    pub group: String,
    pub response: T,
}

/// Raw observations of a one-way layout with one designated control group.
///
/// Records are kept in input order. Groups are ordered control first, then the
/// remaining labels in order of first appearance; comparison `i` always refers to
/// the `i`-th non-control group in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    records: Vec<Record<T>>,
    groups: Vec<String>,
}

/// Per-group size, mean and unbiased (divisor `n - 1`) sample variance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary<T> {
    pub label: String,
    pub n: usize,
    pub mean: T,
    pub var: T,
}

impl<T: Scalar> GroupSummary<T> {
    pub fn from_values(label: impl Into<String>, values: &[T]) -> Result<Self> {
        let label = label.into();
        let n = values.len();
        if n < 2 {
            return Err(Error::GroupTooSmall { label, n });
        }
        let nn = T::from_count(n);
        let mean = values.iter().copied().sum::<T>() / nn;
        let ss: T = values.iter().map(|&v| (v - mean) * (v - mean)).sum();
        Ok(Self {
            label,
            n,
            mean,
            var: ss / (nn - T::one()),
        })
    }
}

impl<T: Scalar> Dataset<T> {
    /// Builds a dataset from records. `control` defaults to the first-seen label.
    pub fn new(records: Vec<Record<T>>, control: Option<&str>) -> Result<Self> {
        let mut seen: Vec<(String, usize)> = Vec::new();
        for r in &records {
            if !r.response.is_finite() {
                return Err(Error::NonNumeric {
                    line: 0,
                    value: format!("{}", r.response),
                });
            }
            match seen.iter_mut().find(|(l, _)| *l == r.group) {
                Some((_, n)) => *n += 1,
                None => seen.push((r.group.clone(), 1)),
            }
        }
        if seen.len() < 2 {
            return Err(Error::TooFewGroups(seen.len()));
        }
        if let Some((label, n)) = seen.iter().find(|(_, n)| *n < 2) {
            return Err(Error::GroupTooSmall {
                label: label.clone(),
                n: *n,
            });
        }
        let mut groups: Vec<String> = seen.into_iter().map(|(l, _)| l).collect();
        if let Some(c) = control {
            let pos = groups
                .iter()
                .position(|g| g == c)
                .ok_or_else(|| Error::UnknownControl(c.to_string()))?;
            let ctl = groups.remove(pos);
            groups.insert(0, ctl);
        }
        Ok(Self { records, groups })
    }

    /// Builds a dataset from `(label, values)` pairs; the first pair is the control.
    pub fn from_groups<S: AsRef<str>>(groups: &[(S, Vec<T>)]) -> Result<Self> {
        let records = groups
            .iter()
            .flat_map(|(label, values)| {
                values.iter().map(move |&v| Record {
                    group: label.as_ref().to_string(),
                    response: v,
                })
            })
            .collect();
        Self::new(records, None)
    }

    pub fn records(&self) -> &[Record<T>] {
        &self.records
    }

    pub fn control(&self) -> &str {
        &self.groups[0]
    }

    /// Group labels, control first.
    pub fn groups(&self) -> &[String] {
        &self.groups
    }

    /// Number of treatments (groups other than the control).
    pub fn treatments(&self) -> usize {
        self.groups.len() - 1
    }

    /// Responses of each group, in group order.
    pub fn group_values(&self) -> Vec<Vec<T>> {
        let mut out = vec![Vec::new(); self.groups.len()];
        for r in &self.records {
            let g = self.group_index(&r.group);
            out[g].push(r.response);
        }
        out
    }

    fn group_index(&self, label: &str) -> usize {
        self.groups
            .iter()
            .position(|g| g == label)
            .expect("record label belongs to a known group")
    }

    pub fn summarize(&self) -> Vec<GroupSummary<T>> {
        summarize(self)
    }

    /// Returns a copy with every response mapped through `f`.
    pub fn map_responses(&self, f: impl Fn(&str, T) -> T) -> Self {
        Self {
            records: self
                .records
                .iter()
                .map(|r| Record {
                    group: r.group.clone(),
                    response: f(&r.group, r.response),
                })
                .collect(),
            groups: self.groups.clone(),
        }
    }
}

/// Column names of a CSV header row.
pub fn csv_header(text: &str) -> Result<Vec<String>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    Ok(rdr.headers()?.iter().map(str::to_string).collect())
}

/// Parses long-format CSV (header row required) into a dataset.
pub fn parse_dataset<T: Scalar>(
    text: &str,
    group_col: &str,
    response_col: &str,
    control: Option<&str>,
) -> Result<Dataset<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let gi = find(group_col)?;
    let ri = find(response_col)?;

    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let group = row.get(gi).unwrap_or("").to_string();
        let raw = row.get(ri).unwrap_or("");
        let value: f64 = raw.parse().map_err(|_| Error::NonNumeric {
            line,
            value: raw.to_string(),
        })?;
        if !value.is_finite() {
            return Err(Error::NonNumeric {
                line,
                value: raw.to_string(),
            });
        }
        records.push(Record {
            group,
            response: T::lit(value),
        });
    }
    Dataset::new(records, control)
}

/// Per-group summaries, control first, then treatments in first-seen order.
pub fn summarize<T: Scalar>(ds: &Dataset<T>) -> Vec<GroupSummary<T>> {
    ds.group_values()
        .iter()
        .zip(ds.groups())
        .map(|(values, label)| {
            GroupSummary::from_values(label.clone(), values)
                .expect("dataset invariants guarantee n >= 2")
        })
        .collect()
}

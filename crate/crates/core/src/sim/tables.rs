//! The published simulation tables: scenario grids, reported rates and
//! their reproduction.
//!
//! Rate columns follow the method order original (`Du0`, `d1..d3`), sandwich
//! (`DuS`, `S1..S3`), Welch plug-in (`DuH`, `h1..h3`) and Bonferroni-Welch
//! (`W0`, `w1..w3`). Standard deviation and mean columns run control first.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::procedures::Method;

use super::{mc_se, run_scenario, Scenario};

pub const RATE_COLUMNS: [&str; 16] = [
    "Du0", "d1", "d2", "d3", "DuS", "S1", "S2", "S3", "DuH", "h1", "h2", "h3", "W0", "w1", "w2",
    "w3",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableId {
    H0Small,
    H1Balanced,
    H1Unbalanced,
    H0Moderate,
    H1Moderate,
}

impl TableId {
    pub const ALL: [TableId; 5] = [
        TableId::H0Small,
        TableId::H1Balanced,
        TableId::H1Unbalanced,
        TableId::H0Moderate,
        TableId::H1Moderate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TableId::H0Small => "h0_small",
            TableId::H1Balanced => "h1_balanced",
            TableId::H1Unbalanced => "h1_unbalanced",
            TableId::H0Moderate => "h0_moderate",
            TableId::H1Moderate => "h1_moderate",
        }
    }

    /// 5000 runs under H0, 2000 under H1.
    pub fn default_runs(self) -> usize {
        match self {
            TableId::H0Small | TableId::H0Moderate => 5000,
            _ => 2000,
        }
    }

    pub fn rows(self) -> &'static [PublishedRow] {
        match self {
            TableId::H0Small => H0_SMALL,
            TableId::H1Balanced => H1_BALANCED,
            TableId::H1Unbalanced => H1_UNBALANCED,
            TableId::H0Moderate => H0_MODERATE,
            TableId::H1Moderate => H1_MODERATE,
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL
            .into_iter()
            .find(|t| t.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| {
                let known: Vec<&str> = TableId::ALL.iter().map(|t| t.as_str()).collect();
                Error::InvalidArgument(format!(
                    "unknown table `{s}` (expected one of {})",
                    known.join(", ")
                ))
            })
    }
}

/// One published scenario row with its reported rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PublishedRow {
    pub means: [f64; 4],
    /// Control group size.
    pub n0: usize,
    /// Size of each treatment group.
    pub ni: usize,
    pub sds: [f64; 4],
    /// Reported rates in [`RATE_COLUMNS`] order.
    pub reported: [f64; 16],
}

impl PublishedRow {
    pub fn scenario(&self, runs: usize, seed: u64) -> Scenario {
        Scenario::new(
            self.means.to_vec(),
            self.sds.to_vec(),
            vec![self.n0, self.ni, self.ni, self.ni],
            runs,
            seed,
        )
    }
}

const fn row(means: [f64; 4], n0: usize, ni: usize, sds: [f64; 4], reported: [f64; 16]) -> PublishedRow {
    PublishedRow {
        means,
        n0,
        ni,
        sds,
        reported,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub published: PublishedRow,
    /// Simulated rates in [`RATE_COLUMNS`] order.
    pub rates: [f64; 16],
    pub mc_se: [f64; 16],
}

impl TableRow {
    pub fn rate(&self, column: &str) -> Option<f64> {
        RATE_COLUMNS.iter().position(|c| *c == column).map(|i| self.rates[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub id: TableId,
    pub runs: usize,
    pub seed: u64,
    pub rows: Vec<TableRow>,
}

const DESIGN_COLUMNS: [&str; 10] = ["mu1", "mu2", "mu3", "mu4", "n1", "ni", "s1", "s2", "s3", "s4"];

impl TableReport {
    pub fn header() -> Vec<&'static str> {
        DESIGN_COLUMNS.iter().chain(RATE_COLUMNS.iter()).copied().collect()
    }

    fn cells(row: &TableRow, rate: fn(f64) -> String) -> Vec<String> {
        let p = &row.published;
        p.means
            .iter()
            .map(|m| fmt_design(*m))
            .chain([p.n0.to_string(), p.ni.to_string()])
            .chain(p.sds.iter().map(|s| fmt_design(*s)))
            .chain(row.rates.iter().map(|&r| rate(r)))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = Self::header().join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&Self::cells(row, |r| r.to_string()).join(","));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for TableReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({} runs, seed {})", self.id, self.runs, self.seed)?;
        let header = Self::header();
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| Self::cells(r, |x| format!("{x:.4}")))
            .collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|j| body.iter().map(|r| r[j].len()).chain([header[j].len()]).max().unwrap_or(0))
            .collect();
        let line = |cells: Vec<String>| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(f, "{}", line(header.iter().map(|h| h.to_string()).collect()))?;
        for cells in body {
            writeln!(f, "{}", line(cells))?;
        }
        Ok(())
    }
}

fn fmt_design(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        v.to_string()
    }
}

/// Simulates every row of a published table with all four methods, one-sided
/// `less` at alpha 0.05. All rows share `seed`.
pub fn reproduce_table(id: TableId, runs: usize, seed: u64) -> Result<TableReport> {
    let rows = id
        .rows()
        .iter()
        .map(|published| {
            let report = run_scenario(&published.scenario(runs, seed))?;
            let mut rates = [0.0; 16];
            for (m, method) in Method::ALL.into_iter().enumerate() {
                let r = report.rates(method).expect("all methods simulated");
                rates[4 * m] = r.anypairs;
                rates[4 * m + 1..4 * m + 4].copy_from_slice(&r.elementary);
            }
            Ok(TableRow {
                published: *published,
                mc_se: rates.map(|r| mc_se(r, runs)),
                rates,
            })
        })
        .collect::<Result<_>>()?;
    Ok(TableReport {
        id,
        runs,
        seed,
        rows,
    })
}

const H0_SMALL: &[PublishedRow] = &[
    row([5.0, 5.0, 5.0, 5.0], 6, 6, [1.0, 1.0, 1.0, 1.0], [0.049, 0.017, 0.021, 0.022, 0.051, 0.019, 0.020, 0.021, 0.049, 0.018, 0.019, 0.021, 0.043, 0.015, 0.017, 0.018]),
    row([5.0, 5.0, 5.0, 5.0], 6, 6, [1.0, 1.0, 1.0, 4.0], [0.080, 0.000, 0.000, 0.080, 0.062, 0.019, 0.020, 0.027, 0.052, 0.018, 0.019, 0.020, 0.047, 0.016, 0.017, 0.017]),
    row([5.0, 5.0, 5.0, 5.0], 9, 5, [1.0, 1.0, 1.0, 1.0], [0.057, 0.021, 0.022, 0.023, 0.054, 0.019, 0.020, 0.021, 0.054, 0.018, 0.020, 0.022, 0.048, 0.016, 0.018, 0.019]),
    row([5.0, 5.0, 5.0, 5.0], 9, 5, [1.0, 1.0, 1.0, 4.0], [0.102, 0.001, 0.001, 0.101, 0.061, 0.018, 0.018, 0.028, 0.052, 0.016, 0.018, 0.019, 0.048, 0.015, 0.016, 0.018]),
];
const H1_BALANCED: &[PublishedRow] = &[
    row([5.0, 5.0, 5.0, 3.0], 6, 6, [1.0, 1.0, 1.0, 1.0], [0.890, 0.020, 0.017, 0.890, 0.854, 0.019, 0.015, 0.853, 0.846, 0.018, 0.015, 0.845, 0.817, 0.014, 0.012, 0.816]),
    row([5.0, 5.0, 5.0, 3.0], 6, 6, [1.0, 1.0, 1.0, 4.0], [0.354, 0.000, 0.000, 0.354, 0.202, 0.018, 0.017, 0.179, 0.174, 0.018, 0.017, 0.150, 0.164, 0.018, 0.014, 0.142]),
    row([5.0, 5.0, 5.0, 3.0], 6, 6, [1.0, 1.0, 4.0, 1.0], [0.264, 0.000, 0.070, 0.228, 0.839, 0.023, 0.028, 0.836, 0.836, 0.022, 0.020, 0.833, 0.814, 0.020, 0.018, 0.812]),
    row([5.0, 5.0, 5.0, 3.0], 6, 6, [1.0, 4.0, 1.0, 1.0], [0.270, 0.070, 0.001, 0.237, 0.826, 0.027, 0.015, 0.824, 0.821, 0.022, 0.013, 0.818, 0.806, 0.021, 0.011, 0.802]),
    row([5.0, 5.0, 5.0, 3.0], 6, 6, [4.0, 1.0, 1.0, 1.0], [0.366, 0.068, 0.068, 0.366, 0.234, 0.035, 0.035, 0.234, 0.207, 0.031, 0.029, 0.207, 0.130, 0.016, 0.019, 0.130]),
    row([5.0, 5.0, 3.0, 3.0], 6, 6, [1.0, 1.0, 1.0, 1.0], [0.958, 0.017, 0.892, 0.879, 0.930, 0.015, 0.840, 0.835, 0.929, 0.016, 0.837, 0.827, 0.905, 0.012, 0.807, 0.794]),
    row([5.0, 5.0, 3.0, 3.0], 6, 6, [1.0, 1.0, 1.0, 4.0], [0.480, 0.000, 0.238, 0.380, 0.862, 0.022, 0.841, 0.180, 0.851, 0.022, 0.833, 0.141, 0.835, 0.019, 0.818, 0.130]),
    row([5.0, 5.0, 3.0, 3.0], 6, 6, [1.0, 1.0, 4.0, 1.0], [0.464, 0.000, 0.363, 0.224, 0.857, 0.020, 0.168, 0.838, 0.846, 0.019, 0.128, 0.831, 0.829, 0.018, 0.121, 0.811]),
    row([5.0, 5.0, 3.0, 3.0], 6, 6, [1.0, 4.0, 1.0, 1.0], [0.353, 0.076, 0.239, 0.235, 0.932, 0.030, 0.833, 0.827, 0.927, 0.021, 0.822, 0.823, 0.916, 0.018, 0.804, 0.808]),
    row([5.0, 5.0, 3.0, 3.0], 6, 6, [4.0, 1.0, 1.0, 1.0], [0.403, 0.068, 0.353, 0.363, 0.266, 0.031, 0.226, 0.230, 0.230, 0.025, 0.192, 0.198, 0.142, 0.016, 0.121, 0.121]),
    row([5.0, 3.0, 3.0, 3.0], 6, 6, [1.0, 1.0, 1.0, 1.0], [0.984, 0.896, 0.908, 0.893, 0.974, 0.865, 0.858, 0.852, 0.974, 0.857, 0.854, 0.847, 0.960, 0.826, 0.828, 0.818]),
    row([5.0, 3.0, 3.0, 3.0], 6, 6, [1.0, 1.0, 1.0, 4.0], [0.514, 0.258, 0.238, 0.359, 0.938, 0.830, 0.846, 0.182, 0.931, 0.820, 0.839, 0.145, 0.919, 0.801, 0.818, 0.135]),
    row([5.0, 3.0, 3.0, 3.0], 6, 6, [1.0, 1.0, 4.0, 1.0], [0.502, 0.225, 0.355, 0.225, 0.932, 0.824, 0.173, 0.816, 0.927, 0.816, 0.135, 0.811, 0.915, 0.797, 0.128, 0.790]),
    row([5.0, 3.0, 3.0, 3.0], 6, 6, [1.0, 4.0, 1.0, 1.0], [0.532, 0.378, 0.249, 0.235, 0.936, 0.189, 0.829, 0.829, 0.930, 0.146, 0.821, 0.820, 0.917, 0.136, 0.804, 0.803]),
    row([5.0, 3.0, 3.0, 3.0], 6, 6, [4.0, 1.0, 1.0, 1.0], [0.410, 0.355, 0.350, 0.346, 0.282, 0.230, 0.227, 0.230, 0.243, 0.204, 0.193, 0.196, 0.155, 0.126, 0.124, 0.128]),
];
const H1_UNBALANCED: &[PublishedRow] = &[
    row([5.0, 5.0, 5.0, 3.0], 9, 5, [1.0, 1.0, 1.0, 1.0], [0.909, 0.019, 0.018, 0.909, 0.851, 0.021, 0.019, 0.850, 0.828, 0.020, 0.021, 0.827, 0.812, 0.019, 0.015, 0.812]),
    row([5.0, 5.0, 5.0, 3.0], 9, 5, [1.0, 1.0, 1.0, 4.0], [0.430, 0.002, 0.000, 0.430, 0.194, 0.020, 0.012, 0.171, 0.147, 0.019, 0.012, 0.121, 0.139, 0.018, 0.011, 0.114]),
    row([5.0, 5.0, 5.0, 3.0], 9, 5, [1.0, 1.0, 4.0, 1.0], [0.405, 0.002, 0.113, 0.350, 0.844, 0.024, 0.026, 0.839, 0.814, 0.022, 0.019, 0.809, 0.803, 0.021, 0.018, 0.799]),
    row([5.0, 5.0, 5.0, 3.0], 9, 5, [1.0, 4.0, 1.0, 1.0], [0.394, 0.110, 0.002, 0.340, 0.839, 0.034, 0.018, 0.835, 0.811, 0.023, 0.015, 0.807, 0.801, 0.021, 0.015, 0.797]),
    row([5.0, 5.0, 5.0, 3.0], 9, 5, [4.0, 1.0, 1.0, 1.0], [0.234, 0.022, 0.018, 0.234, 0.280, 0.028, 0.028, 0.280, 0.278, 0.028, 0.030, 0.278, 0.200, 0.019, 0.014, 0.200]),
    row([5.0, 5.0, 3.0, 3.0], 9, 5, [1.0, 1.0, 1.0, 1.0], [0.974, 0.019, 0.897, 0.903, 0.960, 0.018, 0.855, 0.850, 0.952, 0.020, 0.830, 0.828, 0.942, 0.016, 0.814, 0.809]),
    row([5.0, 5.0, 3.0, 3.0], 9, 5, [1.0, 1.0, 1.0, 4.0], [0.568, 0.002, 0.333, 0.421, 0.862, 0.020, 0.845, 0.163, 0.834, 0.021, 0.819, 0.108, 0.823, 0.021, 0.808, 0.102]),
    row([5.0, 5.0, 3.0, 3.0], 9, 5, [1.0, 1.0, 4.0, 1.0], [0.568, 0.002, 0.412, 0.342, 0.859, 0.019, 0.160, 0.837, 0.826, 0.018, 0.116, 0.807, 0.818, 0.018, 0.111, 0.800]),
    row([5.0, 5.0, 3.0, 3.0], 9, 5, [1.0, 4.0, 1.0, 1.0], [0.482, 0.117, 0.336, 0.329, 0.952, 0.037, 0.829, 0.833, 0.944, 0.024, 0.797, 0.818, 0.940, 0.021, 0.789, 0.808]),
    row([5.0, 5.0, 3.0, 3.0], 9, 5, [4.0, 1.0, 1.0, 1.0], [0.289, 0.024, 0.244, 0.243, 0.349, 0.030, 0.297, 0.295, 0.351, 0.031, 0.300, 0.296, 0.252, 0.020, 0.210, 0.208]),
    row([5.0, 3.0, 3.0, 3.0], 9, 5, [1.0, 1.0, 1.0, 4.0], [0.623, 0.338, 0.330, 0.415, 0.959, 0.831, 0.844, 0.160, 0.950, 0.807, 0.818, 0.105, 0.947, 0.803, 0.808, 0.103]),
    row([5.0, 3.0, 3.0, 3.0], 9, 5, [1.0, 1.0, 4.0, 1.0], [0.639, 0.358, 0.420, 0.343, 0.966, 0.859, 0.156, 0.848, 0.956, 0.824, 0.102, 0.818, 0.952, 0.814, 0.096, 0.814]),
    row([5.0, 3.0, 3.0, 3.0], 9, 5, [1.0, 4.0, 1.0, 1.0], [0.636, 0.422, 0.331, 0.336, 0.964, 0.163, 0.849, 0.844, 0.950, 0.116, 0.809, 0.817, 0.950, 0.111, 0.802, 0.810]),
    row([5.0, 3.0, 3.0, 3.0], 9, 5, [4.0, 1.0, 1.0, 1.0], [0.310, 0.234, 0.237, 0.235, 0.365, 0.286, 0.291, 0.282, 0.366, 0.289, 0.295, 0.281, 0.272, 0.201, 0.205, 0.203]),
];
const H0_MODERATE: &[PublishedRow] = &[
    row([5.0, 5.0, 5.0, 5.0], 20, 20, [1.0, 1.0, 1.0, 1.0], [0.051, 0.020, 0.020, 0.020, 0.049, 0.018, 0.020, 0.020, 0.052, 0.019, 0.021, 0.020, 0.045, 0.016, 0.019, 0.018]),
    row([5.0, 5.0, 5.0, 5.0], 20, 20, [1.0, 1.0, 1.0, 4.0], [0.064, 0.000, 0.000, 0.064, 0.050, 0.017, 0.019, 0.018, 0.050, 0.017, 0.020, 0.017, 0.046, 0.016, 0.019, 0.015]),
];
const H1_MODERATE: &[PublishedRow] = &[
    row([5.0, 5.0, 4.0, 4.0], 20, 20, [1.0, 1.0, 1.0, 1.0], [0.945, 0.012, 0.845, 0.850, 0.935, 0.011, 0.827, 0.833, 0.938, 0.012, 0.830, 0.837, 0.920, 0.009, 0.807, 0.814]),
    row([5.0, 5.0, 4.0, 4.0], 20, 20, [1.0, 1.0, 1.0, 4.0], [0.381, 0.000, 0.123, 0.319, 0.852, 0.017, 0.841, 0.141, 0.854, 0.018, 0.843, 0.136, 0.843, 0.016, 0.832, 0.126]),
    row([5.0, 5.0, 4.0, 4.0], 20, 20, [1.0, 1.0, 4.0, 1.0], [0.383, 0.000, 0.327, 0.112, 0.852, 0.015, 0.156, 0.834, 0.855, 0.015, 0.146, 0.838, 0.843, 0.015, 0.138, 0.825]),
    row([5.0, 5.0, 4.0, 4.0], 20, 20, [1.0, 4.0, 1.0, 1.0], [0.229, 0.068, 0.122, 0.117, 0.936, 0.023, 0.841, 0.831, 0.937, 0.020, 0.844, 0.834, 0.930, 0.018, 0.832, 0.821]),
    row([5.0, 5.0, 4.0, 4.0], 20, 20, [4.0, 1.0, 1.0, 1.0], [0.380, 0.066, 0.328, 0.335, 0.269, 0.035, 0.227, 0.227, 0.262, 0.035, 0.222, 0.218, 0.165, 0.018, 0.136, 0.130]),
];

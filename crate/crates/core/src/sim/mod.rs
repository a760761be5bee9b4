//! Monte Carlo estimation of familywise error rates and power.
//!
//! Every run draws fresh normal samples for all groups and applies each
//! requested method to the same data. Group `g` of run `r` draws from its own
//! ChaCha8 stream, so results do not depend on the method set or on how runs are
//! scheduled across threads.

mod scenario_file;
mod tables;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::data::GroupSummary;
use crate::error::{Error, Result};
use crate::procedures::{rejections, Alternative, Method, TestSpec};

pub use scenario_file::parse_scenarios;
pub use tables::{reproduce_table, PublishedRow, TableId, TableReport, TableRow};

/// Integration tolerance used inside simulations, where Monte Carlo noise dominates.
pub const SIM_ABS_TOL: f64 = 5e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    /// Group means, control first.
    pub means: Vec<f64>,
    /// Group standard deviations, control first.
    pub sds: Vec<f64>,
    pub ns: Vec<usize>,
    pub alpha: f64,
    pub alternative: Alternative,
    pub runs: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
}

impl Scenario {
    /// All four methods, one-sided `less`, alpha 0.05.
    pub fn new(means: Vec<f64>, sds: Vec<f64>, ns: Vec<usize>, runs: usize, seed: u64) -> Self {
        Self {
            means,
            sds,
            ns,
            alpha: 0.05,
            alternative: Alternative::Less,
            runs,
            seed,
            methods: Method::ALL.to_vec(),
        }
    }

    pub fn treatments(&self) -> usize {
        self.means.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        let g = self.means.len();
        if g < 2 {
            return Err(Error::TooFewGroups(g));
        }
        if self.sds.len() != g || self.ns.len() != g {
            return Err(Error::InvalidArgument(format!(
                "scenario has {g} means, {} sds and {} sizes",
                self.sds.len(),
                self.ns.len()
            )));
        }
        if let Some(s) = self.sds.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "standard deviations must be positive, got {s}"
            )));
        }
        if self.means.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidArgument("means must be finite".into()));
        }
        if let Some((i, &n)) = self.ns.iter().enumerate().find(|(_, &n)| n < 2) {
            return Err(Error::GroupTooSmall {
                label: format!("group {i}"),
                n,
            });
        }
        if self.runs == 0 {
            return Err(Error::InvalidArgument("runs must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument("no methods requested".into()));
        }
        self.spec(Method::Original).validate()
    }

    fn spec(&self, method: Method) -> TestSpec {
        let mut spec = TestSpec::new(method, self.alternative)
            .with_alpha(self.alpha)
            .with_seed(self.seed);
        spec.mvt.abs_tol = SIM_ABS_TOL;
        spec
    }

    /// Group summaries of run `run`.
    pub fn draw(&self, run: usize) -> Vec<GroupSummary<f64>> {
        (0..self.means.len())
            .map(|g| {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(((run as u64) << 16) | g as u64);
                let values: Vec<f64> = (0..self.ns[g])
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        self.means[g] + self.sds[g] * z
                    })
                    .collect();
                GroupSummary::from_values(g.to_string(), &values)
                    .expect("validated group size")
            })
            .collect()
    }
}

/// Rejection rates of one method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodRates {
    pub method: Method,
    /// Runs with at least one rejection: FWER under H0, any-pairs power under H1.
    pub anypairs: f64,
    /// Per-comparison rejection rates.
    pub elementary: Vec<f64>,
    /// Monte Carlo standard error of `anypairs`.
    pub mc_se: f64,
    /// Monte Carlo standard errors of `elementary`.
    pub elementary_se: Vec<f64>,
    pub runs_used: usize,
    /// Runs whose draw made the method undefined (zero variance); counted as non-rejecting.
    pub failed_runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub scenario: Scenario,
    pub methods: Vec<MethodRates>,
}

impl SimReport {
    pub fn rates(&self, method: Method) -> Option<&MethodRates> {
        self.methods.iter().find(|m| m.method == method)
    }
}

/// `sqrt(r (1 - r) / runs)`.
pub fn mc_se(rate: f64, runs: usize) -> f64 {
    (rate * (1.0 - rate) / runs as f64).sqrt()
}

enum Outcome {
    Rejections(Vec<bool>),
    Degenerate,
}

/// Runs the scenario in parallel; identical output for any thread count.
pub fn run_scenario(sc: &Scenario) -> Result<SimReport> {
    sc.validate()?;
    let k = sc.treatments();
    let specs: Vec<TestSpec> = sc.methods.iter().map(|&m| sc.spec(m)).collect();
    let outcomes: Vec<Vec<Outcome>> = (0..sc.runs)
        .into_par_iter()
        .map(|run| {
            let summaries = sc.draw(run);
            specs
                .iter()
                .map(|spec| match rejections(&summaries, spec) {
                    Ok(r) => Ok(Outcome::Rejections(r)),
                    Err(Error::DegenerateVariance(_)) => Ok(Outcome::Degenerate),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let methods = sc
        .methods
        .iter()
        .enumerate()
        .map(|(m, &method)| {
            let mut any = 0usize;
            let mut per = vec![0usize; k];
            let mut failed = 0usize;
            for run in &outcomes {
                match &run[m] {
                    Outcome::Rejections(r) => {
                        any += usize::from(r.iter().any(|&x| x));
                        for (c, &x) in per.iter_mut().zip(r) {
                            *c += usize::from(x);
                        }
                    }
                    Outcome::Degenerate => failed += 1,
                }
            }
            let rate = |c: usize| c as f64 / sc.runs as f64;
            let anypairs = rate(any);
            let elementary: Vec<f64> = per.into_iter().map(rate).collect();
            MethodRates {
                method,
                anypairs,
                mc_se: mc_se(anypairs, sc.runs),
                elementary_se: elementary.iter().map(|&r| mc_se(r, sc.runs)).collect(),
                elementary,
                runs_used: sc.runs,
                failed_runs: failed,
            }
        })
        .collect();
    Ok(SimReport {
        scenario: sc.clone(),
        methods,
    })
}

//! Interpolated chi scale `s(u) = sqrt(chi2_df^-1(u) / df)` for the t integrand.
//!
//! `ln s` is tabulated on a uniform grid in `z = Phi^-1(u)` with exact slopes and
//! evaluated by cubic Hermite interpolation. Tables are cached per df.

use std::sync::{Arc, Mutex, OnceLock};

use super::special::{chi2_quantile, norm_cdf, norm_quantile};
use statrs::function::gamma::ln_gamma;

const NODES: usize = 257;
const Z_MAX: f64 = 8.0;
const CACHE_SIZE: usize = 64;

#[derive(Debug)]
pub(crate) struct RadialTable {
    df: f64,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl RadialTable {
    fn build(df: f64) -> Self {
        let step = 2.0 * Z_MAX / (NODES - 1) as f64;
        let a = 0.5 * df;
        let lg = ln_gamma(a);
        let mut values = Vec::with_capacity(NODES);
        let mut slopes = Vec::with_capacity(NODES);
        for i in 0..NODES {
            let z = -Z_MAX + i as f64 * step;
            let x = chi2_quantile(norm_cdf(z), df);
            let s = (x / df).sqrt();
            // ds/dz = phi(z) / (f_chi2(x) * 2 sqrt(x df))
            let ln_phi = -0.5 * z * z - 0.5 * (2.0 * std::f64::consts::PI).ln();
            let ln_f = (a - 1.0) * (0.5 * x).ln() - 0.5 * x - lg - std::f64::consts::LN_2;
            let slope = (ln_phi - ln_f).exp() / (2.0 * (x * df).sqrt());
            values.push(s.ln());
            slopes.push(if slope.is_finite() { slope / s } else { 0.0 });
        }
        Self {
            df,
            step,
            values,
            slopes,
        }
    }

    /// Cached table for `df`.
    pub(crate) fn get(df: f64) -> Arc<RadialTable> {
        static CACHE: OnceLock<Mutex<Vec<Arc<RadialTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
        if let Some(t) = cache
            .lock()
            .expect("radial cache poisoned")
            .iter()
            .find(|t| t.df.to_bits() == df.to_bits())
        {
            return Arc::clone(t);
        }
        let table = Arc::new(Self::build(df));
        let mut guard = cache.lock().expect("radial cache poisoned");
        if guard.len() >= CACHE_SIZE {
            guard.remove(0);
        }
        guard.push(Arc::clone(&table));
        table
    }

    #[inline]
    pub(crate) fn scale(&self, u: f64) -> f64 {
        let z = norm_quantile(u);
        if !(z > -Z_MAX && z < Z_MAX) {
            return (chi2_quantile(u, self.df) / self.df).sqrt();
        }
        let pos = (z + Z_MAX) / self.step;
        let i = (pos as usize).min(NODES - 2);
        let t = pos - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * self.step, self.slopes[i + 1] * self.step);
        let t2 = t * t;
        let t3 = t2 * t;
        ((2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1)
            .exp()
    }
}

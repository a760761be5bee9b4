//! Scenario files: one scenario per line, either CSV with a header row or
//! whitespace-separated `key=value` pairs.
//!
//! Keys: `mu0..muK`, `sd0..sdK`, `n0..nK` (index 0 is the control), `alpha`,
//! `alternative`, `runs`, `seed`, `methods` (separated by `,`, `;` or `|`).
//! Lines starting with `#` are comments. Defaults: alpha 0.05, alternative
//! `less`, 1000 runs, seed 0, all methods.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::procedures::{Alternative, Method};

use super::Scenario;

const DEFAULT_RUNS: usize = 1000;

/// Parses a scenario file. The outer error means the file as a whole is
/// unusable; each scenario line parses (or fails) on its own.
pub fn parse_scenarios(text: &str) -> Result<Vec<Result<Scenario>>> {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .ok_or_else(|| Error::InvalidArgument("scenario file has no scenarios".into()))?;
    if first.contains('=') {
        Ok(text
            .lines()
            .enumerate()
            .filter(|(_, l)| {
                let l = l.trim();
                !l.is_empty() && !l.starts_with('#')
            })
            .map(|(i, l)| parse_key_value(l).and_then(|f| from_fields(&f, i + 1)))
            .collect())
    } else {
        parse_csv(text)
    }
}

fn parse_key_value(line: &str) -> Result<BTreeMap<String, String>> {
    line.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .map(|(k, v)| (k.trim().to_ascii_lowercase(), v.trim().to_string()))
                .ok_or_else(|| Error::InvalidArgument(format!("expected key=value, got `{tok}`")))
        })
        .collect()
}

fn parse_csv(text: &str) -> Result<Vec<Result<Scenario>>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    Ok(reader
        .records()
        .map(|rec| {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            let fields: BTreeMap<String, String> = header
                .iter()
                .cloned()
                .zip(rec.iter().map(str::to_string))
                .collect();
            from_fields(&fields, line)
        })
        .collect())
}

fn from_fields(fields: &BTreeMap<String, String>, line: usize) -> Result<Scenario> {
    let bad = |msg: String| Error::InvalidArgument(format!("scenario line {line}: {msg}"));
    let number = |key: &str, v: &str| -> Result<f64> {
        v.parse::<f64>()
            .map_err(|_| bad(format!("`{key}` value `{v}` is not a number")))
    };
    let count = |key: &str, v: &str| -> Result<usize> {
        v.parse::<usize>()
            .map_err(|_| bad(format!("`{key}` value `{v}` is not a count")))
    };
    let indexed = |prefix: &str| -> Vec<(String, &String)> {
        (0..)
            .map(|i| format!("{prefix}{i}"))
            .map_while(|k| fields.get(&k).map(|v| (k, v)))
            .collect()
    };

    let means = indexed("mu")
        .into_iter()
        .map(|(k, v)| number(&k, v))
        .collect::<Result<Vec<_>>>()?;
    let sds = indexed("sd")
        .into_iter()
        .map(|(k, v)| number(&k, v))
        .collect::<Result<Vec<_>>>()?;
    let ns = indexed("n")
        .into_iter()
        .map(|(k, v)| count(&k, v))
        .collect::<Result<Vec<_>>>()?;
    if means.is_empty() {
        return Err(bad("no group means (`mu0`, `mu1`, ...)".into()));
    }
    for key in fields.keys() {
        let known = ["alpha", "alternative", "runs", "seed", "methods"].contains(&key.as_str())
            || ["mu", "sd", "n"].iter().any(|p| {
                key.strip_prefix(p)
                    .is_some_and(|rest| rest.parse::<usize>().is_ok())
            });
        if !known {
            return Err(bad(format!("unknown key `{key}`")));
        }
    }

    let runs = fields.get("runs").map_or(Ok(DEFAULT_RUNS), |v| count("runs", v))?;
    let seed = fields.get("seed").map_or(Ok(0), |v| {
        v.parse::<u64>()
            .map_err(|_| bad(format!("`seed` value `{v}` is not a 64-bit unsigned integer")))
    })?;
    let mut sc = Scenario::new(means, sds, ns, runs, seed);
    if let Some(v) = fields.get("alpha") {
        sc.alpha = number("alpha", v)?;
    }
    if let Some(v) = fields.get("alternative") {
        sc.alternative = v.parse::<Alternative>().map_err(|e| bad(e.to_string()))?;
    }
    if let Some(v) = fields.get("methods").filter(|v| !v.is_empty()) {
        sc.methods = v
            .split([',', ';', '|'])
            .map(|m| m.trim().parse::<Method>().map_err(|e| bad(e.to_string())))
            .collect::<Result<_>>()?;
    }
    sc.validate().map_err(|e| bad(e.to_string()))?;
    Ok(sc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_lines() {
        let text = "# H0\nmu0=5 mu1=5 sd0=1 sd1=2 n0=6 n1=6 runs=10 seed=3 methods=original;welch_pi\n\n\
                    mu0=5 mu1=4 sd0=1 sd1=1 n0=9 n1=5 alternative=greater alpha=0.1\n";
        let s = parse_scenarios(text).unwrap();
        assert_eq!(s.len(), 2);
        let a = s[0].as_ref().unwrap();
        assert_eq!(a.means, vec![5.0, 5.0]);
        assert_eq!(a.sds, vec![1.0, 2.0]);
        assert_eq!(a.methods, vec![Method::Original, Method::WelchPi]);
        assert_eq!((a.runs, a.seed), (10, 3));
        let b = s[1].as_ref().unwrap();
        assert_eq!(b.alternative, Alternative::Greater);
        assert_eq!(b.alpha, 0.1);
        assert_eq!(b.runs, DEFAULT_RUNS);
        assert_eq!(b.methods.len(), 4);
    }

    #[test]
    fn csv_with_header() {
        let text = "mu0,mu1,mu2,mu3,sd0,sd1,sd2,sd3,n0,n1,n2,n3,alpha,alternative,runs,seed,methods\n\
                    5,5,5,3,1,1,4,1,6,6,6,6,0.05,less,200,1,original|sandwich\n\
                    5,5,5,5,1,1,1,0,6,6,6,6,0.05,less,200,1,\n";
        let s = parse_scenarios(text).unwrap();
        let a = s[0].as_ref().unwrap();
        assert_eq!(a.means, vec![5.0, 5.0, 5.0, 3.0]);
        assert_eq!(a.ns, vec![6; 4]);
        assert_eq!(a.methods, vec![Method::Original, Method::Sandwich]);
        // zero sd fails on its own line only
        assert!(s[1].is_err());
    }

    #[test]
    fn per_line_errors() {
        let s = parse_scenarios("mu0=5 mu1=x sd0=1 sd1=1 n0=3 n1=3\nmu0=1 mu1=1 sd0=1 sd1=1 n0=3 n1=3 colour=red\n").unwrap();
        assert!(s[0].as_ref().unwrap_err().to_string().contains("mu1"));
        assert!(s[1].as_ref().unwrap_err().to_string().contains("colour"));
        assert!(parse_scenarios("# nothing\n\n").is_err());
    }
}

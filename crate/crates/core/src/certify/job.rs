//! JSON job files for verification runs.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scalar::{QExponent, RicParam};

use super::driver::{theorem7_driver, verify_partitions};
use super::{Certificate, Mode, PartitionSpec, VerifyOptions};

/// A verification job.
///
/// With `q_max` the job is a full claim over `(0, 1] x (0, q_max]`, meshed
/// with `partitions` when given and the defaults otherwise. Without
/// `q_max` only the listed partitions are meshed.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub delta: f64,
    #[serde(default)]
    pub q_max: Option<f64>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub partitions: Option<Vec<PartitionSpec>>,
    #[serde(default = "default_budget")]
    pub refine_budget: u32,
    #[serde(default)]
    pub workers: Option<usize>,
    /// Where the certificate is written.
    #[serde(default)]
    pub output: Option<String>,
}

fn default_budget() -> u32 {
    VerifyOptions::default().refine_budget
}

impl JobConfig {
    /// Parses and validates a job.
    pub fn from_json(s: &str) -> Result<Self> {
        let job: JobConfig = serde_json::from_str(s)?;
        job.validate()?;
        Ok(job)
    }

    pub fn validate(&self) -> Result<()> {
        RicParam::new(self.delta)?;
        if let Some(q) = self.q_max {
            QExponent::new(q)?;
        }
        match &self.partitions {
            Some(parts) => parts.iter().try_for_each(PartitionSpec::validate)?,
            None if self.q_max.is_none() => {
                return Err(Error::invalid("job needs q_max, partitions, or both"));
            }
            None => {}
        }
        if self.workers == Some(0) {
            return Err(Error::invalid("workers must be at least 1"));
        }
        Ok(())
    }

    pub fn options(&self) -> VerifyOptions {
        VerifyOptions { mode: self.mode, refine_budget: self.refine_budget, workers: self.workers }
    }

    pub fn run(&self) -> Result<Certificate> {
        self.run_with(&self.options())
    }

    /// Runs with explicit options, e.g. a worker count overridden on the
    /// command line.
    pub fn run_with(&self, opts: &VerifyOptions) -> Result<Certificate> {
        self.validate()?;
        let delta = RicParam::new(self.delta)?;
        match (self.q_max, &self.partitions) {
            (Some(q), parts) => theorem7_driver(delta, QExponent::new(q)?, opts, parts.clone()),
            (None, Some(parts)) => verify_partitions(parts, delta, opts),
            (None, None) => unreachable!("rejected by validate"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::Verdict;

    #[test]
    fn unknown_keys_rejected() {
        let err = JobConfig::from_json(r#"{"delta": 0.5, "q_max": 0.5, "colour": 1}"#);
        assert!(matches!(err, Err(Error::Json(_))));
        let err = JobConfig::from_json(
            r#"{"delta": 0.5, "partitions": [{"t_lo":0,"t_hi":0.1,"q_lo":0.2,"q_hi":0.3,"t_step":0.1,"q_step":0.1,"x":1}]}"#,
        );
        assert!(matches!(err, Err(Error::Json(_))));
    }

    #[test]
    fn validation() {
        assert!(JobConfig::from_json(r#"{"delta": 1.5, "q_max": 0.5}"#).is_err());
        assert!(JobConfig::from_json(r#"{"delta": 0.5}"#).is_err());
        assert!(JobConfig::from_json(r#"{"delta": 0.5, "q_max": 0.5, "workers": 0}"#).is_err());
        let job = JobConfig::from_json(r#"{"delta": 0.5, "q_max": 0.5, "mode": "interval"}"#).unwrap();
        assert_eq!(job.mode, Mode::Interval);
        assert_eq!(job.refine_budget, 3);
    }

    #[test]
    fn partitions_only_job() {
        let job = JobConfig::from_json(
            r#"{"delta": 0.5, "partitions": [{"t_lo":0.1,"t_hi":0.2,"q_lo":0.3,"q_hi":0.4,"t_step":0.01,"q_step":0.01}]}"#,
        )
        .unwrap();
        let cert = job.run().unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        assert_eq!(cert.cells_checked, 100);
    }
}

//! CSV conventions shared by every sampled certification.

use std::io::{self, Write};

use std::fmt;

/// Outcome of a study or certification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The data could not support a decision (e.g. a fit window too short).
    Inconclusive,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

pub const SAMPLE_HEADER: &str = "alpha,n,t,r,k,value,bound_value,ratio";

/// One sample of a kernel, norm, or inequality certification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRow {
    pub alpha: f64,
    pub n: usize,
    pub t: f64,
    pub r: f64,
    pub k: usize,
    pub value: f64,
    pub bound_value: f64,
    pub ratio: f64,
}

impl SampleRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{:.14e},{},{:.14e},{:.14e},{},{:.14e},{:.14e},{:.14e}",
            self.alpha, self.n, self.t, self.r, self.k, self.value, self.bound_value, self.ratio
        )
    }
}

pub fn write_samples(mut w: impl Write, rows: &[SampleRow]) -> io::Result<()> {
    writeln!(w, "{SAMPLE_HEADER}")?;
    for row in rows {
        writeln!(w, "{}", row.to_csv())?;
    }
    Ok(())
}

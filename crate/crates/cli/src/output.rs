//! CSV emission: a header row, then one row per (parameter point,
//! estimator), floats with 17 significant digits.

use std::io::Write;

use anyhow::Result;

use crate::config::Point;
use crate::stats::Estimate;

pub const HEADER: &str = "kind,p,q,L,M,estimator,value,stderr,samples,effective_samples";

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub kind: String,
    pub point: Point,
    pub estimator: String,
    pub estimate: Estimate,
}

/// `x` with 17 significant digits in scientific notation.
pub fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

impl ResultRow {
    pub fn to_csv(&self) -> String {
        let e = &self.estimate;
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.kind,
            float17(self.point.p),
            float17(self.point.q),
            self.point.l,
            self.point.m,
            self.estimator,
            float17(e.value),
            float17(e.stderr),
            e.samples,
            float17(e.effective)
        )
    }
}

pub fn write_csv(rows: &[ResultRow], mut w: impl Write) -> Result<()> {
    writeln!(w, "{HEADER}")?;
    for r in rows {
        writeln!(w, "{}", r.to_csv())?;
    }
    Ok(())
}

pub fn csv_string(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(float17(0.1), "1.0000000000000001e-1");
        assert_eq!(float17(0.95).parse::<f64>().unwrap(), 0.95);
        let row = ResultRow {
            kind: "rigidity".into(),
            point: Point { p: 0.5, q: 1.0, l: 2, m: 4 },
            estimator: "x_lower".into(),
            estimate: Estimate { value: 0.25, stderr: 0.01, samples: 300, effective: 150.0 },
        };
        let s = csv_string(&[row]);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], HEADER);
        assert_eq!(lines[1].split(',').count(), 10);
        assert!(lines[1].starts_with("rigidity,5.0000000000000000e-1,1.0000000000000000e0,2,4,x_lower,"));
    }
}

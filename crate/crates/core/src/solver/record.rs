use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The state norm reached the stopping level.
    Threshold,
    /// The blow-up functional grew past its configured multiple.
    Blowup,
    /// The step violated the advective CFL guard.
    Cfl,
    /// A non-finite value appeared.
    Divergence,
    /// Reached the final time.
    End,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::Threshold => "threshold",
            StopReason::Blowup => "blowup",
            StopReason::Cfl => "cfl",
            StopReason::Divergence => "divergence",
            StopReason::End => "end",
        })
    }
}

impl FromStr for StopReason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "threshold" => StopReason::Threshold,
            "blowup" => StopReason::Blowup,
            "cfl" => StopReason::Cfl,
            "divergence" => StopReason::Divergence,
            "end" => StopReason::End,
            other => return Err(Error::Format(format!("unknown stop reason `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    /// State-space norm at the configured regularity.
    pub hs_norm: f64,
    /// Lipschitz norm fed to the cut-off.
    pub v_norm: f64,
    pub blowup: f64,
    pub l2: f64,
    /// Mean of the transported component (`η` for SCH2, `θ` otherwise).
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub samples: Vec<Sample>,
    pub stopped: bool,
    pub tau: f64,
    pub reason: StopReason,
}

pub const COLUMNS: [&str; 7] = ["t", "Hs_norm", "V_norm", "blowup", "l2", "mean", "stopped"];

impl TrajectoryRecord {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("a record always holds the initial sample")
    }

    /// Columnar text: `#` metadata, a header row, one row per sample. Floats
    /// use shortest round-trip formatting.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# stop_reason={}", self.reason)?;
        writeln!(w, "# tau={}", self.tau)?;
        writeln!(w, "# stopped={}", self.stopped)?;
        writeln!(w, "{}", COLUMNS.join(","))?;
        let last = self.samples.len().saturating_sub(1);
        for (i, s) in self.samples.iter().enumerate() {
            let flag = u8::from(self.stopped && i == last);
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                s.t, s.hs_norm, s.v_norm, s.blowup, s.l2, s.mean, flag
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut reason = None;
        let mut tau = None;
        let mut stopped = None;
        let mut header = false;
        let mut samples = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Format(e.to_string()))?;
            let at = |msg: String| Error::Format(format!("line {}: {msg}", lineno + 1));
            if let Some(meta) = line.strip_prefix('#') {
                let (k, v) = meta
                    .trim()
                    .split_once('=')
                    .ok_or_else(|| at("malformed metadata".into()))?;
                match k {
                    "stop_reason" => reason = Some(v.parse::<StopReason>()?),
                    "tau" => tau = Some(v.parse::<f64>().map_err(|e| at(e.to_string()))?),
                    "stopped" => stopped = Some(v.parse::<bool>().map_err(|e| at(e.to_string()))?),
                    other => return Err(at(format!("unknown metadata `{other}`"))),
                }
                continue;
            }
            if !header {
                if line != COLUMNS.join(",") {
                    return Err(at(format!("unexpected header `{line}`")));
                }
                header = true;
                continue;
            }
            let v = line
                .split(',')
                .map(str::parse::<f64>)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| at(e.to_string()))?;
            if v.len() != COLUMNS.len() {
                return Err(at(format!("{} columns, expected {}", v.len(), COLUMNS.len())));
            }
            samples.push(Sample {
                t: v[0],
                hs_norm: v[1],
                v_norm: v[2],
                blowup: v[3],
                l2: v[4],
                mean: v[5],
            });
        }
        let missing = |what: &str| Error::Format(format!("missing `{what}`"));
        if samples.is_empty() {
            return Err(missing("samples"));
        }
        Ok(Self {
            samples,
            stopped: stopped.ok_or_else(|| missing("stopped"))?,
            tau: tau.ok_or_else(|| missing("tau"))?,
            reason: reason.ok_or_else(|| missing("stop_reason"))?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let rec = TrajectoryRecord {
            samples: vec![
                Sample {
                    t: 0.0,
                    hs_norm: 1.0 / 3.0,
                    v_norm: 2.0f64.sqrt(),
                    blowup: 1e-300,
                    l2: 0.1,
                    mean: -0.0,
                },
                Sample {
                    t: 0.1,
                    hs_norm: std::f64::consts::PI,
                    v_norm: 1e20,
                    blowup: 5.5,
                    l2: 0.2,
                    mean: 1e-17,
                },
            ],
            stopped: true,
            tau: 0.1,
            reason: StopReason::Threshold,
        };
        let text = rec.to_csv_string();
        let back = TrajectoryRecord::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, rec);
        assert_eq!(back.to_csv_string(), text);
    }

    #[test]
    fn bad_header_reports_line() {
        let text = "# stop_reason=end\n# tau=0\n# stopped=false\nt,x\n";
        let err = TrajectoryRecord::read_csv(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 4"));
    }
}

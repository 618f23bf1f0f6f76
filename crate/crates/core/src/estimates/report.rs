use std::fmt;
use std::io::Write;

/// How a report's fitted exponent is judged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    /// Bounded: growth exponent at most the threshold.
    GrowthAtMost(f64),
    /// Rate check: fitted slope at least the target.
    SlopeAtLeast(f64),
    /// Recorded only; passes whenever every ratio is finite.
    Informational,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Criterion::GrowthAtMost(t) => write!(f, "exponent<={t}"),
            Criterion::SlopeAtLeast(t) => write!(f, "slope>={t}"),
            Criterion::Informational => f.write_str("info"),
        }
    }
}

/// Measured ratios along a sweep (resolutions, inverse mollifier widths or
/// mode numbers) and the least-squares exponent fitted to them.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub id: String,
    pub sweep: Vec<f64>,
    pub ratios: Vec<f64>,
    pub exponent: f64,
    pub criterion: Criterion,
    pub pass: bool,
}

/// Slope of `log₂ ratio` against `log₂ sweep`; ratios are floored at `1e-300`.
pub fn growth_exponent(sweep: &[f64], ratios: &[f64]) -> f64 {
    let xs: Vec<f64> = sweep.iter().map(|v| v.log2()).collect();
    let ys: Vec<f64> = ratios.iter().map(|r| r.max(1e-300).log2()).collect();
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

impl EstimateReport {
    pub fn new(id: impl Into<String>, sweep: Vec<f64>, ratios: Vec<f64>, criterion: Criterion) -> Self {
        let exponent = growth_exponent(&sweep, &ratios);
        let finite = ratios.iter().all(|r| r.is_finite()) && exponent.is_finite();
        let pass = finite
            && match criterion {
                Criterion::GrowthAtMost(t) => exponent <= t,
                Criterion::SlopeAtLeast(t) => exponent >= t,
                Criterion::Informational => true,
            };
        Self {
            id: id.into(),
            sweep,
            ratios,
            exponent,
            criterion,
            pass,
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# id={}", self.id)?;
        writeln!(w, "# exponent={}", self.exponent)?;
        writeln!(w, "# criterion={}", self.criterion)?;
        writeln!(w, "# pass={}", self.pass)?;
        writeln!(w, "sweep,ratio")?;
        for (s, r) in self.sweep.iter().zip(&self.ratios) {
            writeln!(w, "{s},{r}")?;
        }
        Ok(())
    }
}

/// Fixed-width table: id, verdict, exponent, criterion.
pub fn summary_table(reports: &[EstimateReport]) -> String {
    let width = reports.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
    let mut out = format!("{:<width$}  {:<4}  {:>10}  criterion\n", "id", "pass", "exponent");
    for r in reports {
        out.push_str(&format!(
            "{:<width$}  {:<4}  {:>10.4}  {}\n",
            r.id,
            if r.pass { "yes" } else { "no" },
            r.exponent,
            r.criterion
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_known_power_laws() {
        let n = [64.0, 128.0, 256.0, 512.0, 1024.0];
        let flat = [3.0; 5];
        assert!(growth_exponent(&n, &flat).abs() < 1e-15);
        let lin: Vec<f64> = n.iter().map(|v| 0.2 * v).collect();
        assert!((growth_exponent(&n, &lin) - 1.0).abs() < 1e-12);
        let sq: Vec<f64> = n.iter().map(|v| v.powf(-0.5)).collect();
        assert!((growth_exponent(&n, &sq) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn pass_rules() {
        let n = vec![64.0, 128.0, 256.0];
        assert!(EstimateReport::new("a", n.clone(), vec![1.0; 3], Criterion::GrowthAtMost(0.1)).pass);
        assert!(!EstimateReport::new("b", n.clone(), vec![1.0, 2.0, 4.0], Criterion::GrowthAtMost(0.1)).pass);
        assert!(!EstimateReport::new("c", n.clone(), vec![1.0, f64::NAN, 1.0], Criterion::Informational).pass);
        assert!(EstimateReport::new("d", n, vec![1.0, 2.0, 4.0], Criterion::SlopeAtLeast(0.9)).pass);
    }

    #[test]
    fn table_lists_every_report() {
        let n = vec![64.0, 128.0];
        let r = vec![
            EstimateReport::new("first", n.clone(), vec![1.0, 1.0], Criterion::GrowthAtMost(0.1)),
            EstimateReport::new("second", n, vec![1.0, 4.0], Criterion::GrowthAtMost(0.1)),
        ];
        let t = summary_table(&r);
        assert_eq!(t.lines().count(), 3);
        assert!(t.contains("first") && t.contains("no"));
    }
}

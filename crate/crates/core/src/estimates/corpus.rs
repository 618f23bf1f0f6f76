use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::spectral::{Complex64, Grid, SpectralField};

/// Spectral decay class of a corpus field with target regularity `s` in `d`
/// dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Roughness {
    /// `|k|^{-(s+3)}`.
    Smooth,
    /// `|k|^{-(s + d/2 + 0.1)}`: just inside `H^s`.
    Critical,
    /// Flat spectrum on `1 ≤ |k|_∞ ≤ 8`.
    Bandlimited,
    /// Flat spectrum over the whole dealiased band, unit `L²` norm.
    White,
}

pub const BANDLIMITED_MODES: i64 = 8;

impl Roughness {
    pub const STANDARD: [Roughness; 3] = [Roughness::Smooth, Roughness::Critical, Roughness::Bandlimited];

    pub fn name(&self) -> &'static str {
        match self {
            Roughness::Smooth => "smooth",
            Roughness::Critical => "critical",
            Roughness::Bandlimited => "bandlimited",
            Roughness::White => "white",
        }
    }

    /// Coefficient envelope at wavenumber magnitude `r ≥ 1`.
    fn envelope(&self, r: f64, s: f64, dim: usize) -> f64 {
        match self {
            Roughness::Smooth => r.powf(-(s + 3.0)),
            Roughness::Critical => r.powf(-(s + 0.5 * dim as f64 + 0.1)),
            Roughness::Bandlimited | Roughness::White => 1.0,
        }
    }
}

impl fmt::Display for Roughness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Roughness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "smooth" => Roughness::Smooth,
            "critical" => Roughness::Critical,
            "bandlimited" => Roughness::Bandlimited,
            "white" => Roughness::White,
            other => return Err(Error::Parameter(format!("unknown roughness `{other}`"))),
        })
    }
}

/// One corpus member: its roughness class and the seed that fixes its
/// coefficients on every grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusEntry {
    pub roughness: Roughness,
    pub seed: u64,
}

/// `per_level` entries per roughness level, seeds derived from `seed`.
pub fn corpus(levels: &[Roughness], per_level: usize, seed: u64) -> Vec<CorpusEntry> {
    let mut out = Vec::new();
    for (l, &roughness) in levels.iter().enumerate() {
        for i in 0..per_level {
            out.push(CorpusEntry {
                roughness,
                seed: mix(mix(seed, l as u64 + 1), i as u64 + 1),
            });
        }
    }
    out
}

fn mix(a: u64, b: u64) -> u64 {
    // splitmix64 finalizer over a combined word
    let mut z = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl CorpusEntry {
    /// Zero-mean random trigonometric polynomial at regularity `s`, restricted
    /// to the dealiased band of `grid`. Each coefficient depends only on the
    /// entry seed, `salt` and its wavevector, so the field on a finer grid
    /// extends the one on a coarser grid.
    pub fn field(&self, grid: Grid, s: f64, salt: u64) -> SpectralField {
        let top = match self.roughness {
            Roughness::Bandlimited => BANDLIMITED_MODES.min(grid.dealias_max()),
            _ => grid.dealias_max(),
        };
        let dim = grid.dim();
        let base = mix(self.seed, salt);
        let k2_range = if dim == 2 { 0..=top } else { 0..=0 };
        let mut modes = Vec::new();
        for k2 in k2_range {
            for k1 in -top..=top {
                if k2 == 0 && k1 <= 0 {
                    continue;
                }
                let r = ((k1 * k1 + k2 * k2) as f64).sqrt();
                let key = mix(mix(base, k1 as u64), k2 as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(key);
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                modes.push((
                    [k1, k2],
                    Complex64::new(a, b) * (0.5 * self.roughness.envelope(r, s, dim)),
                ));
            }
        }
        let f = SpectralField::from_modes(grid, &modes);
        if self.roughness == Roughness::White {
            let norm = f.inner(&f).sqrt();
            f.scaled(1.0 / norm)
        } else {
            f
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ops::{dealias, is_dealiased};

    #[test]
    fn coarse_field_is_prefix_of_fine_field() {
        for dim in [1, 2] {
            let e = corpus(&[Roughness::Critical], 1, 3)[0];
            let coarse = e.field(Grid::new(dim, 32).unwrap(), 4.0, 0);
            let fine = e.field(Grid::new(dim, 64).unwrap(), 4.0, 0);
            assert!(is_dealiased(&fine));
            let top = Grid::new(dim, 32).unwrap().dealias_max();
            for (i, c) in coarse.coeffs().iter().enumerate() {
                let m = coarse.grid().mode(i);
                let in_band = m.k[0].abs() <= top && m.k[1].abs() <= top;
                if in_band {
                    assert_eq!(*c, fine.coeff(m.k));
                }
            }
            assert_eq!(coarse.mean(), 0.0);
            assert_eq!(dealias(&coarse), coarse);
        }
    }

    #[test]
    fn entries_differ_and_are_reproducible() {
        let c = corpus(&Roughness::STANDARD, 2, 11);
        assert_eq!(c.len(), 6);
        assert_eq!(c, corpus(&Roughness::STANDARD, 2, 11));
        let g = Grid::one_d(64).unwrap();
        assert_ne!(c[0].field(g, 2.0, 0), c[1].field(g, 2.0, 0));
        assert_ne!(c[0].field(g, 2.0, 0), c[0].field(g, 2.0, 1));
    }
}

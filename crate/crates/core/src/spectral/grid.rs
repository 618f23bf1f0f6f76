use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Uniform periodic grid on the torus `(R / 2πZ)^dim`, `dim ∈ {1, 2}`.
///
/// Nodes are `x_j = 2π j / n` along every axis. Two-dimensional samples are
/// stored row-major, flat index `i0 * n + i1` with `i0` running along `x₁`.
/// Two-dimensional spectra are stored the other way round, flat index
/// `j1 * n + j0` for wavevector `(k(j0), k(j1))`, which saves the FFT a
/// transpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    dim: usize,
    n: usize,
}

/// Integer wavevector attached to one spectral slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mode {
    pub k: [i64; 2],
    /// True when any component sits on the Nyquist wavenumber `n/2`.
    pub nyquist: bool,
}

impl Mode {
    pub fn norm_sq(&self) -> f64 {
        (self.k[0] * self.k[0] + self.k[1] * self.k[1]) as f64
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.k == [0, 0]
    }
}

impl Grid {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 4, got {n}"
            )));
        }
        Ok(Self { dim, n })
    }

    pub fn one_d(n: usize) -> Result<Self> {
        Self::new(1, n)
    }

    pub fn two_d(n: usize) -> Result<Self> {
        Self::new(2, n)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of samples, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Signed wavenumber stored at axis index `j`, in `{-n/2+1, …, n/2}`.
    pub fn wavenumber(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j <= n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Largest |k| per axis kept by the 2/3 dealiasing rule (`3|k| < n`).
    pub fn dealias_max(&self) -> i64 {
        (self.n as i64 - 1) / 3
    }

    pub fn mode(&self, idx: usize) -> Mode {
        let half = self.n as i64 / 2;
        let k = match self.dim {
            1 => [self.wavenumber(idx), 0],
            _ => [self.wavenumber(idx % self.n), self.wavenumber(idx / self.n)],
        };
        Mode {
            k,
            nyquist: k[0] == half || (self.dim == 2 && k[1] == half),
        }
    }

    /// Flat index of wavevector `k` (components taken modulo `n`).
    pub fn index_of(&self, k: [i64; 2]) -> usize {
        let n = self.n as i64;
        let wrap = |v: i64| v.rem_euclid(n) as usize;
        match self.dim {
            1 => wrap(k[0]),
            _ => wrap(k[1]) * self.n + wrap(k[0]),
        }
    }

    /// Physical coordinates of flat node index `idx` (unused axes are 0).
    pub fn coords(&self, idx: usize) -> [f64; 2] {
        let h = self.spacing();
        match self.dim {
            1 => [h * idx as f64, 0.0],
            _ => [h * (idx / self.n) as f64, h * (idx % self.n) as f64],
        }
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dim {
            1 => write!(f, "{}", self.n),
            _ => write!(f, "{}x{}", self.n, self.n),
        }
    }
}

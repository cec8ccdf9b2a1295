//! Toeplitz operators with trigonometric-polynomial symbols on the Hardy
//! space of the circle.
//!
//! The Hardy projection `P` keeps the modes `n >= 0`; the Toeplitz operator
//! of a symbol `u` is `T = P u P` and its parametrix is `S = P u^{-1} P`
//! when `u` is invertible on the circle. The remainders `A = 1 - S T` and
//! `B = 1 - T S` are concentrated near the mode boundary: on the full Hardy
//! space
//!
//! `A[i][j] = sum_{l < 0} v_{i-l} c_{l-j}`,
//!
//! with `c`, `v` the Fourier coefficients of `u` and `u^{-1}` — a product of
//! Hankel-type corners whose entries decay geometrically. The corners are
//! computed from that exact formula rather than by multiplying truncated
//! matrices, so the index traces carry no cutoff-boundary artifacts.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Trigonometric polynomial symbol `u(theta) = sum c_m e^{i m theta}` with
/// finite support.
#[derive(Debug, Clone)]
pub struct CircleSymbol {
    coeffs: BTreeMap<i64, Complex64>,
}

impl CircleSymbol {
    pub fn new<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let mut coeffs = BTreeMap::new();
        for (m, c) in pairs {
            if c.norm() > 0.0 {
                *coeffs.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c;
            }
        }
        coeffs.retain(|_, c| c.norm() > 0.0);
        CircleSymbol { coeffs }
    }

    /// The monomial `e^{i m theta}`.
    pub fn monomial(m: i64) -> Self {
        CircleSymbol::new([(m, Complex64::new(1.0, 0.0))])
    }

    /// The constant symbol.
    pub fn constant(c: Complex64) -> Self {
        CircleSymbol::new([(0, c)])
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, m: i64) -> Complex64 {
        self.coeffs.get(&m).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn bandwidth(&self) -> i64 {
        self.coeffs.keys().map(|m| m.abs()).max().unwrap_or(0)
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&m, &c) in &self.coeffs {
            acc += c * Complex64::new(0.0, m as f64 * theta).exp();
        }
        acc
    }

    /// Pointwise product (coefficient convolution).
    pub fn product(&self, other: &CircleSymbol) -> CircleSymbol {
        let mut coeffs: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (&m1, &c1) in &self.coeffs {
            for (&m2, &c2) in &other.coeffs {
                *coeffs.entry(m1 + m2).or_insert(Complex64::new(0.0, 0.0)) += c1 * c2;
            }
        }
        coeffs.retain(|_, c| c.norm() > 1e-300);
        CircleSymbol { coeffs }
    }

    /// Minimum modulus on a fine grid; the invertibility witness.
    pub fn min_modulus(&self, n_grid: usize) -> f64 {
        let mut min = f64::INFINITY;
        for j in 0..n_grid {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n_grid as f64;
            min = min.min(self.eval(theta).norm());
        }
        min
    }

    /// Winding number of the symbol around 0 by summing argument increments.
    pub fn winding_number(&self) -> Result<i64> {
        let n_grid = (4096).max(64 * self.bandwidth() as usize);
        if self.min_modulus(n_grid) < 1e-9 {
            return Err(Error::precondition("winding number needs an invertible symbol"));
        }
        let mut total = 0.0;
        let mut prev = self.eval(0.0);
        for j in 1..=n_grid {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n_grid as f64;
            let cur = self.eval(theta);
            total += (cur / prev).arg();
            prev = cur;
        }
        let w = total / (2.0 * std::f64::consts::PI);
        let rounded = w.round();
        if (w - rounded).abs() > 1e-6 {
            return Err(Error::indeterminate(format!("winding number did not quantize: {w}")));
        }
        Ok(rounded as i64)
    }

    /// Fourier coefficients of `u^{-1}`, computed by sampling and discrete
    /// transform; kept down to `drop_tol`, which is sound because they decay
    /// geometrically for an invertible symbol.
    pub fn inverse_coeffs(&self, drop_tol: f64) -> Result<BTreeMap<i64, Complex64>> {
        let band = self.bandwidth() as usize;
        let n_grid = (4096usize).max(32 * (band + 1)).next_power_of_two();
        if self.min_modulus(n_grid) < 1e-9 {
            return Err(Error::precondition("symbol is not invertible on the circle"));
        }
        let samples: Vec<Complex64> = (0..n_grid)
            .map(|j| {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / n_grid as f64;
                Complex64::new(1.0, 0.0) / self.eval(theta)
            })
            .collect();
        let max_keep = (n_grid / 2 - 1) as i64;
        let mut raw: Vec<(i64, Complex64)> = Vec::new();
        let mut scale = 0.0f64;
        for m in -max_keep..=max_keep {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &s) in samples.iter().enumerate() {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / n_grid as f64;
                acc += s * Complex64::new(0.0, -(m as f64) * theta).exp();
            }
            let v = acc / n_grid as f64;
            scale = scale.max(v.norm());
            raw.push((m, v));
        }
        // keep coefficients above the larger of the requested tolerance and
        // the transform's own rounding floor
        let floor = drop_tol.max(1e-13 * scale);
        let out: BTreeMap<i64, Complex64> =
            raw.into_iter().filter(|(_, v)| v.norm() > floor).collect();
        let edge = out.keys().map(|m| m.abs()).max().unwrap_or(0);
        if edge >= max_keep - 2 {
            return Err(Error::indeterminate(
                "inverse symbol coefficients did not decay inside the sampling band",
            ));
        }
        Ok(out)
    }
}

/// Matrix truncations of `T = P u P` and its parametrix, plus the exact
/// remainder corners of the full Hardy-space operators.
#[derive(Debug, Clone)]
pub struct ToeplitzModel {
    symbol: CircleSymbol,
    inverse: BTreeMap<i64, Complex64>,
    cutoff: usize,
    scale: f64,
}

/// Default mode cutoff for Toeplitz truncations.
pub const DEFAULT_TOEPLITZ_CUTOFF: usize = 512;

/// Numerical keep-tolerance for inverse-symbol coefficients.
const INVERSE_DROP_TOL: f64 = 1e-17;

/// Build the Toeplitz model of an invertible symbol at a mode cutoff.
pub fn toeplitz(symbol: &CircleSymbol, cutoff: usize) -> Result<ToeplitzModel> {
    if symbol.coeffs().is_empty() {
        return Err(Error::precondition("zero symbol is not invertible"));
    }
    let inverse = symbol.inverse_coeffs(INVERSE_DROP_TOL)?;
    let band = symbol.bandwidth() as usize;
    let inv_band = inverse.keys().map(|m| m.abs()).max().unwrap_or(0) as usize;
    if cutoff < 4 * (band + inv_band + 1) {
        return Err(Error::precondition(format!(
            "mode cutoff {cutoff} too small for symbol bands {band}/{inv_band}"
        )));
    }
    Ok(ToeplitzModel { symbol: symbol.clone(), inverse, cutoff, scale: 1.0 })
}

impl ToeplitzModel {
    /// Rescale the trace (type-II weighting); every index scales with it.
    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::precondition("trace scale must be positive and finite"));
        }
        self.scale = scale;
        Ok(self)
    }

    pub fn symbol(&self) -> &CircleSymbol {
        &self.symbol
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn toeplitz_matrix(coeff: &dyn Fn(i64) -> Complex64, rows: usize, cols: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(rows, cols, |i, j| coeff(i as i64 - j as i64))
    }

    /// `M x M` truncation of `T = P u P`.
    pub fn operator(&self) -> DMatrix<Complex64> {
        let c = |m: i64| self.symbol.coeff(m);
        Self::toeplitz_matrix(&c, self.cutoff, self.cutoff)
    }

    /// `M x M` truncation of the parametrix `S = P u^{-1} P`.
    pub fn parametrix(&self) -> DMatrix<Complex64> {
        let v = |m: i64| self.inverse.get(&m).copied().unwrap_or(Complex64::new(0.0, 0.0));
        Self::toeplitz_matrix(&v, self.cutoff, self.cutoff)
    }

    fn inv_band(&self) -> usize {
        self.inverse.keys().map(|m| m.abs()).max().unwrap_or(0) as usize
    }

    /// Exact corners of the full-space remainders `A = 1 - S T` and
    /// `B = 1 - T S`, padded to a common square size.
    pub fn remainder_corners(&self) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
        let band = self.symbol.bandwidth();
        let inv_band = self.inv_band() as i64;
        let size = ((band + inv_band + 2) as usize).max(4);
        let c = |m: i64| self.symbol.coeff(m);
        let v = |m: i64| self.inverse.get(&m).copied().unwrap_or(Complex64::new(0.0, 0.0));
        let mut a = DMatrix::from_element(size, size, Complex64::new(0.0, 0.0));
        let mut b = DMatrix::from_element(size, size, Complex64::new(0.0, 0.0));
        for i in 0..size as i64 {
            for j in 0..size as i64 {
                // A[i][j] = sum_{l<0} v_{i-l} c_{l-j}
                let mut acc = Complex64::new(0.0, 0.0);
                let l_min = (j - band).min(i - inv_band);
                for l in l_min..0 {
                    acc += v(i - l) * c(l - j);
                }
                a[(i as usize, j as usize)] = acc;
                // B[i][j] = sum_{l<0} c_{i-l} v_{l-j}
                let mut acc = Complex64::new(0.0, 0.0);
                let l_min = (i - band).min(j - inv_band);
                for l in l_min..0 {
                    acc += c(i - l) * v(l - j);
                }
                b[(i as usize, j as usize)] = acc;
            }
        }
        (a, b)
    }

    /// Schatten-type norm `(sum s_k^p)^{1/p}` of a remainder corner; used to
    /// witness summability and its stability under enlarging the corner.
    pub fn remainder_norm(&self, p: f64) -> f64 {
        let (a, _) = self.remainder_corners();
        let sv = a.svd(false, false).singular_values;
        sv.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p) * self.scale.powf(1.0 / p)
    }

    /// Kernel dimension of the full-space operator, by SVD of a tall
    /// truncation: columns restricted so the banded operator is exact on
    /// them, which keeps cutoff-boundary null vectors out.
    fn kernel_dim(&self, coeff: &dyn Fn(i64) -> Complex64, band: usize) -> Result<usize> {
        let cols = self.cutoff - band;
        let rows = self.cutoff;
        let rect = Self::toeplitz_matrix(coeff, rows, cols);
        let sv = rect.svd(false, false).singular_values;
        let smax = sv.iter().cloned().fold(0.0f64, f64::max);
        if smax == 0.0 {
            return Ok(cols);
        }
        let threshold = 1e-8 * smax;
        let below: Vec<f64> = sv.iter().cloned().filter(|&s| s < threshold).collect();
        let above_min = sv.iter().cloned().filter(|&s| s >= threshold).fold(f64::INFINITY, f64::min);
        let below_max = below.iter().cloned().fold(0.0f64, f64::max);
        if below_max > 0.0 && above_min / below_max < 1e3 {
            return Err(Error::IllConditioned(format!(
                "singular values cluster at the kernel threshold: {below_max:.3e} below vs {above_min:.3e} above (threshold {threshold:.3e})"
            )));
        }
        Ok(below.len())
    }

    /// Index by kernel counting: `scale * (dim ker T - dim ker T*)`.
    pub fn tau_index(&self) -> Result<f64> {
        let band = (self.symbol.bandwidth() as usize).max(1);
        let c = self.symbol.coeffs().clone();
        let fwd = move |m: i64| c.get(&m).copied().unwrap_or(Complex64::new(0.0, 0.0));
        let c2 = self.symbol.coeffs().clone();
        // T* is the Toeplitz operator of the conjugate-reflected symbol
        let adj = move |m: i64| {
            c2.get(&(-m)).map(|c| c.conj()).unwrap_or(Complex64::new(0.0, 0.0))
        };
        let k_fwd = self.kernel_dim(&fwd, band)?;
        let k_adj = self.kernel_dim(&adj, band)?;
        Ok(self.scale * (k_fwd as f64 - k_adj as f64))
    }

    /// Calderon-formula index `scale * (tr A^n - tr B^n)` from the exact
    /// remainder corners; independent of `n >= 1` for these models.
    pub fn calderon_index(&self, n: u32) -> Result<f64> {
        if n == 0 {
            return Err(Error::precondition("calderon formula needs n >= 1"));
        }
        let (a, b) = self.remainder_corners();
        let mut pa = a.clone();
        let mut pb = b.clone();
        for _ in 1..n {
            pa *= &a;
            pb *= &b;
        }
        let diff: Complex64 = pa.trace() - pb.trace();
        if diff.im.abs() > 1e-9 * (1.0 + diff.re.abs()) {
            return Err(Error::indeterminate(format!(
                "calderon trace has a non-real part: {:.3e}",
                diff.im
            )));
        }
        Ok(self.scale * diff.re)
    }
}

/// Rank of the commutator `[F, u]` on a mode window, `F` the Hardy symmetry
/// (`sign(n)` with `F(0) = +1`). For `u = e^{i k theta}` this is `|k|`,
/// independent of the window.
pub fn sign_commutator_rank(symbol: &CircleSymbol, window: i64) -> usize {
    let dim = (2 * window + 1) as usize;
    let sign = |n: i64| if n >= 0 { 1.0 } else { -1.0 };
    let mut com = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for (row, n_out) in (-window..=window).enumerate() {
        for (&m, &c) in symbol.coeffs() {
            let n_in = n_out - m;
            if n_in.abs() <= window {
                let col = (n_in + window) as usize;
                com[(row, col)] += (sign(n_out) - sign(n_in)) * c;
            }
        }
    }
    let sv = com.svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-10 * smax).count()
}

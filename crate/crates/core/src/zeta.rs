//! Counting functions, spectral dimension, zeta residues, and the
//! regularized-integral formulas that tie them back to the Dixmier trace.
//!
//! For a positive discrete operator with counting function `N(lambda)` the
//! zeta function `zeta(z) = sum w_i lambda_i^z` converges for
//! `Re z < -d`, where `d` is the growth exponent of `N`. A simple pole at
//! the boundary carries the Dixmier trace: if `(x+d) zeta(x) -> A` as
//! `x -> -d` from the left then the trace of `T^{-d}` equals `-A/d`, and the
//! same number is the limit of the Weyl ratio `N(lambda)/lambda^d`.
//!
//! The scaling-function formulas express the same trace through smooth
//! cutoffs: `tau(T f(|D|/lambda^{1/p}))/lambda` tends to `C_p(f)` times the
//! trace of `T|D|^{-p}`, with `C_p(f) = p ∫ f(t) t^{p-1} dt`; the Gaussian
//! specialization is the Weyl heat formula with constant `Gamma(p/2+1)`.

use crate::error::{Error, Result};
use crate::limiting::{omega_limit, LimitEstimate, LimitProcessConfig, LogGrid};
use crate::special::{adaptive_simpson, KahanSum};
use crate::spectrum::{least_squares_slope, Tail, WeightedSpectrum};
use num_complex::Complex64;
use std::sync::Arc;

/// Counting function `N(lambda)` of a positive discrete spectrum.
pub fn counting(spectrum: &WeightedSpectrum, lambda: f64) -> Result<f64> {
    spectrum.counting(lambda)
}

/// Result of the spectral-dimension fit.
#[derive(Debug, Clone, Copy)]
pub struct DimensionEstimate {
    pub d: f64,
    pub residual: f64,
}

/// Growth exponent of the counting function: least-squares slope of
/// `log N(lambda)` against `log lambda` over the top enumerated decades.
pub fn spectral_dimension(spectrum: &WeightedSpectrum) -> Result<DimensionEstimate> {
    if spectrum.is_empty() {
        return Err(Error::precondition("empty spectrum has no dimension"));
    }
    if spectrum.min_value() <= 0.0 {
        return Err(Error::precondition("spectral dimension requires values >= eps > 0"));
    }
    let vmax = spectrum.max_value();
    let vmin = spectrum.min_value().max(1e-300);
    if vmax / vmin < 1e3 {
        return Err(Error::precondition(
            "spectral dimension needs at least 3 decades of enumerated growth",
        ));
    }
    let lo = vmax / 1e3; // top 3 decades
    let n_samples = 96usize;
    let mut xs = Vec::with_capacity(n_samples + 1);
    let mut ys = Vec::with_capacity(n_samples + 1);
    for k in 0..=n_samples {
        let lam = lo * (vmax / lo).powf(k as f64 / n_samples as f64);
        let n = spectrum.counting(lam)?;
        if n > 0.0 {
            xs.push(lam.ln());
            ys.push(n.ln());
        }
    }
    if xs.len() < 16 {
        return Err(Error::indeterminate("too few usable counting samples"));
    }
    let (slope, residual) = least_squares_slope(&xs, &ys);
    let half = xs.len() / 2;
    let (slope_lo, _) = least_squares_slope(&xs[..half], &ys[..half]);
    let (slope_hi, _) = least_squares_slope(&xs[half..], &ys[half..]);
    if (slope_lo - slope_hi).abs() > 0.08 || residual > 0.1 {
        return Err(Error::indeterminate(format!(
            "counting function is not power-like (slopes {slope_lo:.3} vs {slope_hi:.3}, residual {residual:.3})"
        )));
    }
    Ok(DimensionEstimate { d: slope, residual })
}

fn dimension_of(spectrum: &WeightedSpectrum) -> Result<(f64, f64)> {
    match spectrum.tail() {
        Some(Tail::Growth { d, .. }) => Ok((d, 0.0)),
        _ => {
            let est = spectral_dimension(spectrum)?;
            Ok((est.d, est.residual))
        }
    }
}

/// A zeta value together with the uncertainty of its tail correction.
#[derive(Debug, Clone, Copy)]
pub struct ZetaValue {
    pub value: Complex64,
    pub tail_error: f64,
}

/// `zeta(z) = sum w_i lambda_i^z` plus the integral tail correction from the
/// declared counting model. Refuses arguments at or beyond the divergence
/// boundary `Re z = -d`.
pub fn zeta(spectrum: &WeightedSpectrum, z: Complex64) -> Result<ZetaValue> {
    if spectrum.is_empty() {
        return Ok(ZetaValue { value: Complex64::new(0.0, 0.0), tail_error: 0.0 });
    }
    if spectrum.min_value() <= 0.0 {
        return Err(Error::precondition("zeta requires spectrum values >= eps > 0"));
    }
    if matches!(spectrum.tail(), Some(Tail::Decay { .. })) {
        return Err(Error::precondition(
            "zeta is defined for discrete generators, not spectra accumulating at zero",
        ));
    }
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for a in spectrum.atoms() {
        let term = Complex64::from(a.weight) * (z * a.value.ln()).exp();
        re.add(term.re);
        im.add(term.im);
    }
    let enumerated = Complex64::new(re.value(), im.value());
    if let Some(Tail::Growth { c, d }) = spectrum.tail() {
        if z.re >= -d {
            return Err(Error::precondition(format!(
                "zeta diverges for Re(z) >= -{d}; got Re(z) = {}",
                z.re
            )));
        }
        let vmax = spectrum.max_value();
        // ∫_vmax^inf lambda^z dN_model with dN_model = c d lambda^{d-1} dlambda
        let corr = -Complex64::from(c * d) * ((z + d) * vmax.ln()).exp() / (z + d);
        let tail_error = spectrum.tail_misfit().max(0.02) * corr.norm();
        Ok(ZetaValue { value: enumerated + corr, tail_error })
    } else {
        // complete finite spectrum: entire in z
        Ok(ZetaValue { value: enumerated, tail_error: 0.0 })
    }
}

/// Report of the residue extrapolation at the zeta boundary.
#[derive(Debug, Clone)]
pub struct ZetaProfile {
    /// Growth exponent used (declared tail or fitted).
    pub d: f64,
    pub d_residual: f64,
    /// `A = lim (x+d) zeta(x)` as `x -> -d` from the left.
    pub a: f64,
    /// `-A/d`: the Dixmier trace of `T^{-d}`.
    pub trace: f64,
    pub a_error: f64,
    /// Convergence boundary `-d`.
    pub boundary: f64,
    /// Extrapolation path `(epsilon_j, (x_j+d) zeta(x_j))` at `x_j = -d - epsilon_j`.
    pub path: Vec<(f64, f64)>,
    /// Successive diagonal entries of the extrapolation table.
    pub table_diagonal: Vec<f64>,
}

/// Options for the residue extrapolation: a geometric approach path
/// `x_j = -d - margin 2^{-j}` with Richardson acceleration toward the pole.
#[derive(Debug, Clone, Copy)]
pub struct ResidueOptions {
    pub margin: f64,
    pub levels: usize,
}

impl Default for ResidueOptions {
    fn default() -> Self {
        ResidueOptions { margin: 0.5, levels: 8 }
    }
}

/// Estimate the boundary residue `A` and the induced trace `-A/d`.
pub fn residue_to_dixmier(spectrum: &WeightedSpectrum, opts: ResidueOptions) -> Result<ZetaProfile> {
    let (d, d_residual) = dimension_of(spectrum)?;
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::precondition(format!(
            "residue extrapolation needs d in (0, inf), got {d}"
        )));
    }
    if opts.levels < 3 || !(opts.margin > 0.0) {
        return Err(Error::precondition("residue options: need margin > 0 and at least 3 levels"));
    }
    let mut path = Vec::with_capacity(opts.levels);
    let mut tail_err_max: f64 = 0.0;
    for j in 0..opts.levels {
        let eps = opts.margin * 0.5f64.powi(j as i32);
        let zv = zeta(spectrum, Complex64::new(-d - eps, 0.0))?;
        path.push((eps, -eps * zv.value.re));
        tail_err_max = tail_err_max.max(eps * zv.tail_error);
    }
    // Neville extrapolation to eps = 0 on the halving sequence.
    let n = path.len();
    let mut table: Vec<Vec<f64>> = vec![path.iter().map(|p| p.1).collect()];
    for k in 1..n {
        let prev = &table[k - 1];
        let factor = 2f64.powi(k as i32) - 1.0;
        let mut row = Vec::with_capacity(n - k);
        for j in 0..(n - k) {
            row.push(prev[j + 1] + (prev[j + 1] - prev[j]) / factor);
        }
        table.push(row);
    }
    let diagonal: Vec<f64> = (0..n).map(|k| table[k][n - 1 - k]).collect();
    // the most stable consecutive pair on the diagonal wins
    let mut best_idx = 1usize;
    let mut best_gap = f64::INFINITY;
    for k in 1..n {
        let gap = (diagonal[k] - diagonal[k - 1]).abs();
        if gap < best_gap {
            best_gap = gap;
            best_idx = k;
        }
    }
    let a = diagonal[best_idx];
    let a_error = best_gap + tail_err_max;
    if !a.is_finite() || best_gap > 0.05 * a.abs() + 1e-6 {
        return Err(Error::indeterminate(format!(
            "residue extrapolation unstable: diagonal gap {best_gap:.3e} at A = {a:.6e}"
        )));
    }
    Ok(ZetaProfile {
        d,
        d_residual,
        a,
        trace: -a / d,
        a_error,
        boundary: -d,
        path,
        table_diagonal: diagonal,
    })
}

/// Omega-limit of the Weyl ratio `N(lambda)/lambda^d`; agrees with the
/// boundary-residue trace on models with a simple pole.
pub fn weyl_ratio(
    spectrum: &WeightedSpectrum,
    config: Option<&LimitProcessConfig>,
) -> Result<LimitEstimate> {
    let (d, _) = dimension_of(spectrum)?;
    let owned;
    let config = match config {
        Some(c) => c,
        None => {
            owned = LimitProcessConfig {
                grid: LogGrid::new(1.0, spectrum.max_value(), LimitProcessConfig::DEFAULT_PER_DECADE)?,
                cesaro_iterations: LimitProcessConfig::DEFAULT_ITERATIONS,
                window_decades: LimitProcessConfig::DEFAULT_WINDOW_DECADES,
                tolerance: LimitProcessConfig::DEFAULT_TOLERANCE,
            };
            &owned
        }
    };
    let mut samples = Vec::with_capacity(config.grid.len());
    for &lam in config.grid.points() {
        samples.push(spectrum.counting(lam)? / lam.powf(d));
    }
    omega_limit(&config.grid, &samples, config)
}

/// A continuous decaying scaling profile with a declared numerical support:
/// `|f|` is negligible beyond `support`.
#[derive(Clone)]
pub struct ScalingFunction {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    support: f64,
}

impl std::fmt::Debug for ScalingFunction {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "ScalingFunction({}, support {})", self.name, self.support)
    }
}

impl ScalingFunction {
    pub fn from_fn<F>(name: impl Into<String>, f: F, support: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(support > 0.0) || !support.is_finite() {
            return Err(Error::precondition("scaling function support must be finite and positive"));
        }
        Ok(ScalingFunction { name: name.into(), f: Arc::new(f), support })
    }

    /// `f(x) = exp(-x^2)`.
    pub fn gaussian() -> Self {
        ScalingFunction { name: "gaussian".into(), f: Arc::new(|x: f64| (-x * x).exp()), support: 6.5 }
    }

    /// `f(x) = exp(-x)`.
    pub fn exponential() -> Self {
        ScalingFunction { name: "exponential".into(), f: Arc::new(|x: f64| (-x).exp()), support: 40.0 }
    }

    /// Smoothed indicator of `[0, 1]`: identically 1 below `1 - delta`,
    /// quintic smoothstep down to 0 at `1 + delta`.
    pub fn smoothed_indicator(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::precondition("smoothed indicator needs 0 < delta < 1"));
        }
        let f = move |x: f64| -> f64 {
            if x <= 1.0 - delta {
                1.0
            } else if x >= 1.0 + delta {
                0.0
            } else {
                let s = (x - (1.0 - delta)) / (2.0 * delta);
                1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
            }
        };
        Ok(ScalingFunction {
            name: format!("smoothstep[{delta}]"),
            f: Arc::new(f),
            support: 1.0 + delta,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// `C_p(f) = p ∫_0^inf f(t) t^{p-1} dt` by adaptive quadrature; refuses
/// profiles that are not integrable against `t^{p-1}`.
pub fn c_p(f: &ScalingFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::precondition("c_p requires p >= 1"));
    }
    let g = |t: f64| f.eval(t) * t.powf(p - 1.0);
    let value = p * adaptive_simpson(&g, 0.0, f.support(), 1e-12);
    // the declared support must actually exhaust the integral
    let edge = g(f.support()).abs() * f.support();
    if edge > 1e-9 * (value.abs() + 1.0) {
        return Err(Error::precondition(format!(
            "scaling function {} is not integrable against t^{{p-1}} within its declared support",
            f.name()
        )));
    }
    Ok(value)
}

/// Inner sum `sum_i w_i T_i f(lambda_i / scale) extra_i` over the atoms whose
/// argument stays inside the support of `f`.
fn scaled_trace_sum(
    spectrum: &WeightedSpectrum,
    t_diag: Option<&[f64]>,
    f: &ScalingFunction,
    scale: f64,
    extra: Option<&[f64]>,
) -> f64 {
    let atoms = spectrum.atoms();
    let x_cut = f.support() * scale;
    // atoms are sorted by decreasing value; the suffix holds values <= x_cut
    let start = atoms.partition_point(|a| a.value > x_cut);
    let mut acc = KahanSum::new();
    for i in start..atoms.len() {
        let a = atoms[i];
        let mut term = a.weight * f.eval(a.value / scale);
        if let Some(t) = t_diag {
            term *= t[i];
        }
        if let Some(e) = extra {
            term *= e[i];
        }
        acc.add(term);
    }
    acc.value()
}

fn validate_multiplier(t_diag: Option<&[f64]>, n: usize) -> Result<()> {
    if let Some(t) = t_diag {
        if t.len() != n {
            return Err(Error::precondition(
                "diagonal multiplier must align with the spectrum atoms",
            ));
        }
        if t.iter().any(|x| !x.is_finite()) {
            return Err(Error::precondition("unbounded diagonal multiplier entries"));
        }
    }
    Ok(())
}

fn scaling_config(
    spectrum: &WeightedSpectrum,
    f: &ScalingFunction,
    p: f64,
) -> Result<LimitProcessConfig> {
    let lambda_top = (spectrum.max_value() / f.support()).powf(p);
    let min_span = 10f64.powf(LimitProcessConfig::DEFAULT_WINDOW_DECADES + 1.2);
    if lambda_top < min_span {
        return Err(Error::precondition(format!(
            "cutoff too small for the scaling window: lambda range {lambda_top:.3e} < {min_span:.3e}"
        )));
    }
    Ok(LimitProcessConfig {
        grid: LogGrid::new(1.0, lambda_top, 24)?,
        cesaro_iterations: LimitProcessConfig::DEFAULT_ITERATIONS,
        window_decades: LimitProcessConfig::DEFAULT_WINDOW_DECADES,
        tolerance: LimitProcessConfig::DEFAULT_TOLERANCE,
    })
}

/// Omega-limit over `lambda` of `tau(T f(|D|/lambda^{1/p})) / lambda`.
///
/// Equals `C_p(f)` times the Dixmier trace of `T |D|^{-p}` within band.
/// `d_spectrum` is the spectrum of `|D|` (positive part), `t_diag` an
/// optional bounded multiplier aligned with its atoms.
pub fn regularized_integral(
    d_spectrum: &WeightedSpectrum,
    t_diag: Option<&[f64]>,
    f: &ScalingFunction,
    p: f64,
) -> Result<LimitEstimate> {
    if !(p >= 1.0) {
        return Err(Error::precondition("regularized integral requires p >= 1"));
    }
    validate_multiplier(t_diag, d_spectrum.len())?;
    c_p(f, p)?; // refusal path: f must be integrable against t^{p-1}
    let config = scaling_config(d_spectrum, f, p)?;
    let samples: Vec<f64> = config
        .grid
        .points()
        .iter()
        .map(|&lam| scaled_trace_sum(d_spectrum, t_diag, f, lam.powf(1.0 / p), None) / lam)
        .collect();
    omega_limit(&config.grid, &samples, &config)
}

/// Omega-limit of `t^p tau(T e^{-t^2 D^2})` as `t -> 0` (sampled in
/// `s = t^{-p}`); the Weyl formula makes it `Gamma(p/2+1)` times the trace
/// of `T |D|^{-p}`.
pub fn heat_trace_check(
    d_spectrum: &WeightedSpectrum,
    t_diag: Option<&[f64]>,
    p: f64,
) -> Result<LimitEstimate> {
    if !(p >= 1.0) {
        return Err(Error::precondition("heat trace requires p >= 1"));
    }
    validate_multiplier(t_diag, d_spectrum.len())?;
    let gauss = ScalingFunction::gaussian();
    let config = scaling_config(d_spectrum, &gauss, p)?;
    let atoms = d_spectrum.atoms();
    let mut samples = Vec::with_capacity(config.grid.len());
    for &s in config.grid.points() {
        let t = s.powf(-1.0 / p);
        let x_cut = gauss.support() / t;
        let start = atoms.partition_point(|a| a.value > x_cut);
        let mut acc = KahanSum::new();
        for (i, a) in atoms.iter().enumerate().skip(start) {
            let arg = t * a.value;
            let mut term = a.weight * (-arg * arg).exp();
            if let Some(td) = t_diag {
                term *= td[i];
            }
            acc.add(term);
        }
        samples.push(t.powf(p) * acc.value());
    }
    omega_limit(&config.grid, &samples, &config)
}

/// Omega-limit of `tau(T f(|D|/lambda^{1/p}) |D|^{-p}) / log(1+lambda)`,
/// which recovers `f(0)` times the trace of `T |D|^{-p}`.
pub fn mellin_plateau(
    d_spectrum: &WeightedSpectrum,
    t_diag: Option<&[f64]>,
    f: &ScalingFunction,
    p: f64,
) -> Result<LimitEstimate> {
    if !(p >= 1.0) {
        return Err(Error::precondition("mellin plateau requires p >= 1"));
    }
    validate_multiplier(t_diag, d_spectrum.len())?;
    if d_spectrum.min_value() <= 0.0 {
        return Err(Error::precondition("mellin plateau requires an invertible model (values > 0)"));
    }
    if !f.eval(0.0).is_finite() {
        return Err(Error::precondition("scaling function must be finite at 0"));
    }
    if f.eval(f.support()).abs() > 1e-10 * f.eval(0.0).abs().max(1e-12) + 1e-12 {
        return Err(Error::precondition(
            "scaling function does not vanish at infinity within its declared support",
        ));
    }
    let config = scaling_config(d_spectrum, f, p)?;
    let inv_pow: Vec<f64> = d_spectrum.atoms().iter().map(|a| a.value.powf(-p)).collect();
    let samples: Vec<f64> = config
        .grid
        .points()
        .iter()
        .map(|&lam| {
            scaled_trace_sum(d_spectrum, t_diag, f, lam.powf(1.0 / p), Some(&inv_pow))
                / (1.0 + lam).ln()
        })
        .collect();
    omega_limit(&config.grid, &samples, &config)
}

//! Real-valued Fredholm indices and cyclic cocycle pairings.
//!
//! With a trace that takes arbitrary positive real values on projections,
//! the index `tau(ker T) - tau(ker T*)` of a Fredholm element is a real
//! number. Three routes to it are implemented and must agree:
//!
//! - kernel counting through singular-value thresholds (with an explicit
//!   gap requirement: clustering at the threshold is an error, not a guess);
//! - the Calderon formula `tau[(1-ST)^n] - tau[(1-TS)^n]`, independent of
//!   the power `n` once the remainders are summable;
//! - cocycle pairings built from a symmetry `F` with `F^2 = 1`: the odd
//!   pairing against an invertible symbol, and the even pairing against a
//!   projection on a graded model.

use crate::error::{Error, Result};
use crate::limiting::{omega_limit, LimitProcessConfig};
use crate::spectrum::WeightedSpectrum;
use crate::symbols::TrigPoly;
use crate::toeplitz::{CircleSymbol, ToeplitzModel};
use nalgebra::DMatrix;
use num_complex::Complex64;

type CMat = DMatrix<Complex64>;

/// Kernel dimension of a matrix by singular-value thresholding; refuses to
/// answer when singular values cluster at the threshold.
pub fn kernel_dimension(m: &CMat) -> Result<usize> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return Ok(m.ncols());
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    if smax == 0.0 {
        return Ok(m.ncols());
    }
    let threshold = 1e-8 * smax;
    let below: Vec<f64> = sv.iter().cloned().filter(|&s| s < threshold).collect();
    let above_min = sv.iter().cloned().filter(|&s| s >= threshold).fold(f64::INFINITY, f64::min);
    let below_max = below.iter().cloned().fold(0.0f64, f64::max);
    if below_max > 0.0 && above_min / below_max < 1e3 {
        return Err(Error::IllConditioned(format!(
            "singular values cluster at the kernel threshold: {below_max:.3e} below vs {above_min:.3e} above"
        )));
    }
    // rectangular matrices: nullity = cols - rank
    Ok(m.ncols() - (sv.len() - below.len()))
}

/// A Fredholm element with a declared parametrix and summability exponent.
pub enum FredholmPair {
    /// Dense matrices over a weighted matrix algebra with trace `scale * Tr`.
    Matrix { t: CMat, s: CMat, p: f64, scale: f64 },
    /// A Toeplitz model; remainders are computed from the exact full-space
    /// corner formulas.
    Toeplitz { model: ToeplitzModel, p: f64 },
}

impl FredholmPair {
    pub fn matrix(t: CMat, s: CMat, p: f64, scale: f64) -> Result<Self> {
        if t.nrows() != t.ncols() || s.nrows() != s.ncols() || t.nrows() != s.nrows() {
            return Err(Error::precondition("matrix pair must be square and aligned"));
        }
        if !(p >= 1.0) || !(scale > 0.0) {
            return Err(Error::precondition("need p >= 1 and a positive trace scale"));
        }
        Ok(FredholmPair::Matrix { t, s, p, scale })
    }

    pub fn toeplitz(model: ToeplitzModel, p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::precondition("need p >= 1"));
        }
        Ok(FredholmPair::Toeplitz { model, p })
    }

    pub fn summability(&self) -> f64 {
        match self {
            FredholmPair::Matrix { p, .. } => *p,
            FredholmPair::Toeplitz { p, .. } => *p,
        }
    }

    /// Index by kernel counting.
    pub fn tau_index(&self) -> Result<f64> {
        match self {
            FredholmPair::Matrix { t, scale, .. } => {
                let k = kernel_dimension(t)?;
                let k_adj = kernel_dimension(&t.adjoint())?;
                Ok(scale * (k as f64 - k_adj as f64))
            }
            FredholmPair::Toeplitz { model, .. } => model.tau_index(),
        }
    }

    /// Calderon formula `tau[(1-ST)^n] - tau[(1-TS)^n]` for `n >= p`.
    pub fn calderon_index(&self, n: u32) -> Result<f64> {
        if (n as f64) < self.summability() {
            return Err(Error::precondition(format!(
                "calderon power n = {n} below the declared summability p = {}",
                self.summability()
            )));
        }
        match self {
            FredholmPair::Matrix { t, s, scale, .. } => {
                let id = CMat::identity(t.nrows(), t.ncols());
                let a = &id - s * t;
                let b = &id - t * s;
                let mut pa = a.clone();
                let mut pb = b.clone();
                for _ in 1..n {
                    pa *= &a;
                    pb *= &b;
                }
                let diff = pa.trace() - pb.trace();
                if diff.im.abs() > 1e-9 * (1.0 + diff.re.abs()) {
                    return Err(Error::indeterminate(format!(
                        "calderon trace has a non-real part {:.3e}",
                        diff.im
                    )));
                }
                Ok(scale * diff.re)
            }
            FredholmPair::Toeplitz { model, .. } => model.calderon_index(n),
        }
    }
}

/// Convenience: index of a Toeplitz symbol at trace scale `c`, by kernel
/// counting.
pub fn tau_index(model: &ToeplitzModel) -> Result<f64> {
    model.tau_index()
}

/// Graded model carrying a symmetry `F` (`F = F*`, `F^2 = 1`), a grading
/// `gamma` anticommuting with `F`, a trace scale, and a declared summability
/// exponent for the cocycle degree bound.
#[derive(Debug, Clone)]
pub struct EvenModel {
    f: CMat,
    gamma: CMat,
    scale: f64,
    summability: f64,
}

impl EvenModel {
    pub fn new(f: CMat, gamma: CMat, scale: f64, summability: f64) -> Result<Self> {
        let n = f.nrows();
        if gamma.nrows() != n || f.ncols() != n || gamma.ncols() != n {
            return Err(Error::precondition("symmetry and grading must be square and aligned"));
        }
        let id = CMat::identity(n, n);
        if (&f * &f - &id).norm() > 1e-10 || (&f - f.adjoint()).norm() > 1e-10 {
            return Err(Error::precondition("F must satisfy F = F* and F^2 = 1"));
        }
        if (&gamma * &f + &f * &gamma).norm() > 1e-10 {
            return Err(Error::precondition("grading must anticommute with F"));
        }
        Ok(EvenModel { f, gamma, scale, summability })
    }

    /// Even model from the circle symmetry: two copies of the mode window
    /// `-w..=w` with `F = offdiag(F1, F1)` and `gamma = diag(1, -1)`, where
    /// `F1 = sign` with the kernel convention `sign(0) = +1`.
    pub fn doubled_circle(window: i64, scale: f64) -> Result<Self> {
        if window < 1 {
            return Err(Error::precondition("window must contain at least modes -1..=1"));
        }
        let n = (2 * window + 1) as usize;
        let mut f = CMat::zeros(2 * n, 2 * n);
        for (i, mode) in (-window..=window).enumerate() {
            let s = if mode >= 0 { 1.0 } else { -1.0 };
            f[(i, n + i)] = Complex64::new(s, 0.0);
            f[(n + i, i)] = Complex64::new(s, 0.0);
        }
        let mut gamma = CMat::zeros(2 * n, 2 * n);
        for i in 0..n {
            gamma[(i, i)] = Complex64::new(1.0, 0.0);
            gamma[(n + i, n + i)] = Complex64::new(-1.0, 0.0);
        }
        EvenModel::new(f, gamma, scale, 1.0)
    }

    /// Same structure with a declared even summability exponent, for the
    /// minimal-degree cocycle (which needs even `p`).
    pub fn with_summability(mut self, p: f64) -> Self {
        self.summability = p;
        self
    }

    pub fn dim(&self) -> usize {
        self.f.nrows()
    }

    pub fn f(&self) -> &CMat {
        &self.f
    }

    pub fn gamma(&self) -> &CMat {
        &self.gamma
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn summability(&self) -> f64 {
        self.summability
    }

    /// Block projection `diag(p_plus, p_minus)` on the doubled space.
    pub fn block_projection(&self, p_plus: &CMat, p_minus: &CMat) -> CMat {
        let n = self.dim() / 2;
        assert_eq!(p_plus.nrows(), n);
        assert_eq!(p_minus.nrows(), n);
        let mut e = CMat::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                e[(i, j)] = p_plus[(i, j)];
                e[(n + i, n + j)] = p_minus[(i, j)];
            }
        }
        e
    }
}

fn check_projection(e: &CMat) -> Result<()> {
    if (e * e - e).norm() > 1e-10 || (e - &e.adjoint()).norm() > 1e-10 {
        return Err(Error::precondition("e must be a self-adjoint idempotent (within 1e-10)"));
    }
    Ok(())
}

/// Even cocycle pairing `(-1)^k tau(gamma e [F, e]^{2k})`; equals the graded
/// index of `e F e` for every admissible `k`.
pub fn even_pairing(model: &EvenModel, e: &CMat, k: u32) -> Result<f64> {
    if e.nrows() != model.dim() || e.ncols() != model.dim() {
        return Err(Error::precondition("projection must live on the model space"));
    }
    check_projection(e)?;
    if (model.gamma() * e - e * model.gamma()).norm() > 1e-10 {
        return Err(Error::precondition("projection must be even (commute with the grading)"));
    }
    if (k as f64) <= model.summability() / 2.0 {
        return Err(Error::precondition(format!(
            "cocycle degree 2k = {} is not summable for p = {} (need k > p/2)",
            2 * k,
            model.summability()
        )));
    }
    let com = model.f() * e - e * model.f();
    let mut power = CMat::identity(model.dim(), model.dim());
    for _ in 0..(2 * k) {
        power *= &com;
    }
    let tr = (model.gamma() * e * power).trace();
    if tr.im.abs() > 1e-9 * (1.0 + tr.re.abs()) {
        return Err(Error::indeterminate(format!("pairing has a non-real part {:.3e}", tr.im)));
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * model.scale() * tr.re)
}

/// Minimal-degree even cocycle `((-1)^{p/2}/2) tau(gamma F [F, e]^{p+1})`,
/// an alternative evaluator that must agree with [`even_pairing`] on index
/// values; requires the declared summability to be an even integer.
pub fn even_pairing_minimal(model: &EvenModel, e: &CMat) -> Result<f64> {
    let p = model.summability();
    if p.fract() != 0.0 || (p as u32) % 2 != 0 {
        return Err(Error::precondition("minimal cocycle needs an even integer summability"));
    }
    check_projection(e)?;
    let p = p as u32;
    let com = model.f() * e - e * model.f();
    let mut power = CMat::identity(model.dim(), model.dim());
    for _ in 0..(p + 1) {
        power *= &com;
    }
    let tr = (model.gamma() * model.f() * power).trace();
    if tr.im.abs() > 1e-9 * (1.0 + tr.re.abs()) {
        return Err(Error::indeterminate(format!("pairing has a non-real part {:.3e}", tr.im)));
    }
    let sign = if (p / 2) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign / 2.0 * model.scale() * tr.re)
}

/// Graded index of `e F e`: the kernel-count difference of its positive part
/// mapping `e H_+ -> e H_-`, times the trace scale.
pub fn graded_index(model: &EvenModel, e: &CMat) -> Result<f64> {
    check_projection(e)?;
    let n = model.dim();
    let id = CMat::identity(n, n);
    let p_plus = (&id + model.gamma()).scale(0.5);
    let p_minus = (&id - model.gamma()).scale(0.5);
    let efe = e * model.f() * e;
    // orthonormal bases of e H_+ and e H_- via thin SVD of e P_+/-
    let basis = |m: &CMat| -> CMat {
        let svd = m.clone().svd(true, false);
        let u = svd.u.expect("left singular vectors requested");
        let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
        let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10 * smax.max(1e-300)).count();
        u.columns(0, rank).into_owned()
    };
    let b_plus = basis(&(e * &p_plus));
    let b_minus = basis(&(e * &p_minus));
    // the positive part of e F e as a map between the graded pieces
    let t_hat = b_minus.adjoint() * &efe * &b_plus;
    let k = kernel_dimension(&t_hat)?;
    let k_adj = kernel_dimension(&t_hat.adjoint())?;
    Ok(model.scale() * (k as f64 - k_adj as f64))
}

/// The sign symmetry on a window of circle modes, kernel convention
/// `sign(0) = +1`.
fn circle_sign(window: i64) -> CMat {
    let dim = (2 * window + 1) as usize;
    let mut f = CMat::zeros(dim, dim);
    for (i, mode) in (-window..=window).enumerate() {
        f[(i, i)] = Complex64::new(if mode >= 0 { 1.0 } else { -1.0 }, 0.0);
    }
    f
}

/// Multiplication operator of a circle symbol on a mode window.
fn multiplication_matrix(symbol: &CircleSymbol, window: i64) -> CMat {
    let dim = (2 * window + 1) as usize;
    let mut m = CMat::zeros(dim, dim);
    for (row, n_out) in (-window..=window).enumerate() {
        for (&k, &c) in symbol.coeffs() {
            let n_in = n_out - k;
            if n_in.abs() <= window {
                m[(row, (n_in + window) as usize)] += c;
            }
        }
    }
    m
}

/// Odd cocycle pairing
/// `((-1)^{k+1}/2^{2k+1}) tau(u^{-1} [F,u] ([F,u^{-1}] [F,u])^k)`.
///
/// For a trigonometric-polynomial symbol the commutators are finite rank, so
/// every `k >= 0` is admissible and the value is the negative winding number
/// times the trace scale, independently of `k`. The alternating `(-1)^k`
/// comes from flipping the `k` factors `[F,u^{-1}][F,u] = -(u^{-1}[F,u])^2`
/// when the pairing is reduced to the Calderon traces; it is fixed here by
/// requiring agreement with the kernel-counting index at every degree.
pub fn odd_pairing(symbol: &CircleSymbol, k: u32, scale: f64) -> Result<f64> {
    let inv = symbol.inverse_coeffs(1e-17)?;
    let inv_symbol = CircleSymbol::new(inv.into_iter());
    let band = symbol.bandwidth() + inv_symbol.bandwidth();
    let window = (2 * k as i64 + 1) * band + symbol.bandwidth() + 8;
    let u = multiplication_matrix(symbol, window);
    let u_inv = multiplication_matrix(&inv_symbol, window);
    let f = circle_sign(window);
    let com_u = &f * &u - &u * &f;
    let com_u_inv = &f * &u_inv - &u_inv * &f;
    let mut chain = &u_inv * &com_u;
    for _ in 0..k {
        chain = chain * &com_u_inv * &com_u;
    }
    let tr = chain.trace();
    if tr.im.abs() > 1e-9 * (1.0 + tr.re.abs()) {
        return Err(Error::indeterminate(format!("pairing has a non-real part {:.3e}", tr.im)));
    }
    let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
    Ok(sign * scale * tr.re / 2f64.powi(2 * k as i32 + 1))
}

/// Toeplitz index computed on the kernel-doubled space: the Hardy projection
/// is `(1 + F)/2` for the doubled symmetry `F = F1 + V` (no sign convention
/// at the kernel mode), the symbol acts as `u ⊕ 0`, and kernels are counted
/// on a domain kept away from the window edge so the banded operator is
/// exact on it. Must agree with the convention route ([`tau_index`]) — the
/// agreement of the two kernel treatments is itself a check.
pub fn doubled_toeplitz_index(symbol: &CircleSymbol, window: i64, scale: f64) -> Result<f64> {
    let band = symbol.bandwidth();
    if window < 4 * (band + 1) {
        return Err(Error::precondition("window too small for the symbol band"));
    }
    let eigs: Vec<f64> = (-window..=window).map(|n| n as f64).collect();
    let doubled = crate::models::doubling(&eigs);
    let dim = doubled.dim();
    let n_base = doubled.base_dim();
    let f_real = doubled.f();
    let f_mat = CMat::from_fn(dim, dim, |i, j| Complex64::new(f_real[(i, j)], 0.0));
    let id = CMat::identity(dim, dim);
    let p = (&id + &f_mat).scale(0.5);

    let embed = |sym: &CircleSymbol| -> CMat {
        let small = multiplication_matrix(sym, window);
        let mut big = CMat::zeros(dim, dim);
        for i in 0..n_base {
            for j in 0..n_base {
                big[(i, j)] = small[(i, j)];
            }
        }
        big
    };
    let adj_symbol =
        CircleSymbol::new(symbol.coeffs().iter().map(|(&m, &c)| (-m, c.conj())));

    let kernel_on_domain = |op: &CMat| -> Result<usize> {
        // domain: the doubled Hardy range away from the window top edge
        let mut columns: Vec<nalgebra::DVector<Complex64>> = Vec::new();
        let top = (window - band - 1) as usize; // modes 1..=top
        // the (mode 0 + extra copy) direction
        let mut v0 = nalgebra::DVector::zeros(dim);
        v0[(window) as usize] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        v0[n_base] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        columns.push(v0);
        for n in 1..=top {
            let mut v = nalgebra::DVector::zeros(dim);
            v[(window as usize) + n] = Complex64::new(1.0, 0.0);
            columns.push(v);
        }
        let basis = CMat::from_columns(&columns);
        kernel_dimension(&(op * basis))
    };

    let t_op = &p * embed(symbol) * &p;
    let t_adj = &p * embed(&adj_symbol) * &p;
    let k = kernel_on_domain(&t_op)?;
    let k_adj = kernel_on_domain(&t_adj)?;
    Ok(scale * (k as f64 - k_adj as f64))
}

/// Residual of the hypertrace identity `∫(A T) = ∫(T A)` computed through
/// the truncated traces on a diagonal model: `A` enters only through its
/// diagonal part (the mean of the multiplier), so the off-diagonal
/// contributions vanish exactly under the compression and the two
/// independent estimator runs must coincide within bands.
pub fn hypertrace_check(
    d_spectrum: &WeightedSpectrum,
    t_diag: &[f64],
    a: &TrigPoly,
    p: f64,
    config: &LimitProcessConfig,
) -> Result<f64> {
    if t_diag.len() != d_spectrum.len() {
        return Err(Error::precondition("diagonal multiplier must align with the spectrum atoms"));
    }
    let class = d_spectrum.pow(-p)?.classify(1.0)?;
    if !class.l1_inf.is_in() {
        return Err(Error::NotInIdeal {
            ideal: "L^{1,inf}".to_string(),
            detail: "hypertrace check requires |D|^{-p} in the weak trace ideal".to_string(),
        });
    }
    let mean = a.mean();
    if mean.im.abs() > 1e-12 * (1.0 + mean.re.abs()) {
        return Err(Error::precondition("hypertrace check expects a real-valued symbol mean"));
    }
    let inv = d_spectrum.pow(-p)?;
    let atoms = inv.atoms();
    // cumulative sums of the two orderings, kept as separate computations
    let mut cum_at = Vec::with_capacity(atoms.len());
    let mut cum_ta = Vec::with_capacity(atoms.len());
    let mut acc_at = 0.0;
    let mut acc_ta = 0.0;
    for (atom, &ti) in atoms.iter().zip(t_diag.iter().rev()) {
        // note: inv atoms are sorted by decreasing value, i.e. mode order
        // reversed relative to the |D| spectrum
        acc_at += atom.weight * (mean.re * ti) * atom.value;
        acc_ta += atom.weight * (ti * mean.re) * atom.value;
        cum_at.push(acc_at);
        cum_ta.push(acc_ta);
    }
    let partial = |cum: &[f64], threshold: f64| -> f64 {
        let idx = atoms.partition_point(|at| at.value > threshold);
        if idx == 0 {
            0.0
        } else {
            cum[idx - 1]
        }
    };
    let mut f_at = Vec::with_capacity(config.grid.len());
    let mut f_ta = Vec::with_capacity(config.grid.len());
    for &t in config.grid.points() {
        let denom = (1.0 + t).ln();
        f_at.push(partial(&cum_at, 1.0 / t) / denom);
        f_ta.push(partial(&cum_ta, 1.0 / t) / denom);
    }
    let est_at = omega_limit(&config.grid, &f_at, config)?;
    let est_ta = omega_limit(&config.grid, &f_ta, config)?;
    let residual = (est_at.value - est_ta.value).abs();
    if residual > est_at.error_band + est_ta.error_band + 1e-12 {
        return Err(Error::indeterminate(format!(
            "hypertrace residual {residual:.3e} exceeds the combined bands"
        )));
    }
    Ok(residual)
}

/// Evaluate the even cocycle `phi_{2k}` on an argument tuple.
pub fn phi_even(model: &EvenModel, k: u32, args: &[CMat]) -> Result<f64> {
    if args.len() != 2 * k as usize + 1 {
        return Err(Error::precondition(format!(
            "phi_{{2k}} with k = {k} takes {} arguments",
            2 * k + 1
        )));
    }
    let mut m = model.gamma() * &args[0];
    for a in &args[1..] {
        m *= model.f() * a - a * model.f();
    }
    let tr = m.trace();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * model.scale() * tr.re)
}

/// Hochschild coboundary of `phi_{2k}` evaluated on a tuple; vanishes on
/// even arguments because the trace is cyclic.
pub fn hochschild_coboundary_even(model: &EvenModel, k: u32, args: &[CMat]) -> Result<f64> {
    let n = 2 * k as usize + 1; // arity of phi
    if args.len() != n + 1 {
        return Err(Error::precondition(format!(
            "coboundary of phi_{{2k}} with k = {k} takes {} arguments",
            n + 1
        )));
    }
    let mut total = 0.0;
    // terms joining a_j a_{j+1}, signs alternating, plus the wrap term
    for j in 0..n {
        let mut tuple: Vec<CMat> = Vec::with_capacity(n);
        for (i, a) in args.iter().enumerate() {
            if i == j {
                tuple.push(a * &args[j + 1]);
            } else if i == j + 1 {
                continue;
            } else {
                tuple.push(a.clone());
            }
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * phi_even(model, k, &tuple)?;
    }
    let mut tuple: Vec<CMat> = Vec::with_capacity(n);
    tuple.push(args[n].clone() * &args[0]);
    tuple.extend(args[1..n].iter().cloned());
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    total += sign * phi_even(model, k, &tuple)?;
    Ok(total)
}

//! Weighted spectra and generalized singular values.
//!
//! A [`WeightedSpectrum`] is the numerical stand-in for a positive measurable
//! operator relative to a semifinite trace: a finite list of spectral atoms
//! `(value, weight)` where the weight is the trace of the spectral projection
//! at that value (any positive real, not necessarily an integer), plus an
//! optional power-law tail model describing the part of the spectrum that was
//! not enumerated.
//!
//! From the atoms one derives the non-increasing rearrangement `t -> mu_t`,
//! its running integral `sigma_t = ∫_0^t mu_s ds`, the p-norms, and the weak
//! ideal classifications. All of these are exact piecewise computations on
//! the enumerated range; beyond it the declared tail takes over, with an
//! explicit validity horizon and error bounds instead of silent guessing.

use crate::error::{Error, Result};
use crate::special::{gl_integrate, KahanSum};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// How many decades past the enumerated range a tail extrapolation is
/// trusted before queries return [`Error::TailUncertain`].
pub const TAIL_VALIDITY_DECADES: f64 = 3.0;

/// Maximum relative misfit accepted between a declared tail model and the
/// last enumerated decade of the spectrum.
pub const TAIL_CONSISTENCY_RTOL: f64 = 0.25;

/// One spectral atom: an eigenvalue together with the trace of its spectral
/// projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub value: f64,
    pub weight: f64,
}

/// Power-law model for the un-enumerated part of a spectrum.
///
/// The serialized form is the bare pair `{c, d}`; the direction is inferred
/// on load by checking which convention is consistent with the enumerated
/// atoms (see [`WeightedSpectrum::from_wire`]). The parameters are invariant
/// under inversion: the spectrum of `T` and of `T^{-1}` carry the same
/// `(c, d)`, in the growth and decay conventions respectively.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// Counting model `N(lambda) ~ c * lambda^d` for values beyond the
    /// largest enumerated atom (unbounded generators).
    Growth { c: f64, d: f64 },
    /// Mass model `weight{ value >= v } ~ c * v^{-d}` for values below the
    /// smallest enumerated atom (compact-type spectra accumulating at zero).
    Decay { c: f64, d: f64 },
}

impl Tail {
    pub fn growth(c: f64, d: f64) -> Self {
        Tail::Growth { c, d }
    }

    pub fn decay(c: f64, d: f64) -> Self {
        Tail::Decay { c, d }
    }

    pub fn params(&self) -> (f64, f64) {
        match *self {
            Tail::Growth { c, d } | Tail::Decay { c, d } => (c, d),
        }
    }
}

/// Wire format fixed by the external interface:
/// `{ "atoms": [[value, weight], ...], "tail": {"c": c, "d": d} | null }`.
#[derive(Debug, Serialize, Deserialize)]
pub struct WireSpectrum {
    pub atoms: Vec<(f64, f64)>,
    pub tail: Option<WireTail>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WireTail {
    pub c: f64,
    pub d: f64,
}

#[derive(Debug, Clone)]
pub struct WeightedSpectrum {
    /// Sorted by strictly decreasing value; equal values merged.
    atoms: Vec<Atom>,
    /// cum_weight[k] = w_0 + ... + w_k
    cum_weight: Vec<f64>,
    /// cum_trace[k] = w_0 v_0 + ... + w_k v_k
    cum_trace: Vec<f64>,
    tail: Option<Tail>,
    /// Relative misfit of the tail model measured on the last enumerated
    /// decade at construction time.
    tail_misfit: f64,
    note: String,
}

/// Value of `sigma_t` together with the uncertainty contributed by the tail
/// model (zero on the enumerated range).
#[derive(Debug, Clone, Copy)]
pub struct SigmaValue {
    pub value: f64,
    pub tail_error: f64,
}

/// A norm value; `value` is `f64::INFINITY` when the tail exponent implies
/// divergence.
#[derive(Debug, Clone, Copy)]
pub struct NormValue {
    pub value: f64,
    pub error: f64,
}

impl NormValue {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// Tri-state membership verdict. `Indeterminate` is an honest "could not
/// decide", never a silent guess.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
    Indeterminate,
}

impl Membership {
    pub fn is_in(&self) -> bool {
        matches!(self, Membership::In)
    }
}

/// Ideal membership flags plus the statistics that witnessed them.
#[derive(Debug, Clone)]
pub struct IdealClassification {
    pub tau_compact: Membership,
    pub l1: Membership,
    pub l1_inf: Membership,
    /// Membership in the weak-p ideal for the `p` the caller asked about.
    pub lp_inf: Membership,
    pub p: f64,
    /// Decay exponent `d` such that mu_t ~ (c/t)^{1/d}, when known/estimated.
    pub decay_exponent: Option<f64>,
    /// Residual of the slope fit when the exponent was estimated.
    pub slope_residual: Option<f64>,
}

impl IdealClassification {
    /// The inclusion chain L^1 ∩ M ⊂ L^{1,∞} ⊂ L^{1+ε} ∩ M must hold on
    /// every classified input.
    pub fn chain_consistent(&self) -> bool {
        if self.l1 == Membership::In && self.l1_inf == Membership::Out {
            return false;
        }
        if self.p > 1.0 && self.l1_inf == Membership::In && self.lp_inf == Membership::Out {
            return false;
        }
        true
    }
}

fn check_atom(value: f64, weight: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::schema(format!("atom value {value} must be a finite nonnegative real")));
    }
    if !weight.is_finite() || weight <= 0.0 {
        return Err(Error::schema(format!("atom weight {weight} must be a finite positive real")));
    }
    Ok(())
}

impl WeightedSpectrum {
    /// The zero operator: no atoms, everything traces to zero.
    pub fn empty() -> Self {
        WeightedSpectrum {
            atoms: Vec::new(),
            cum_weight: Vec::new(),
            cum_trace: Vec::new(),
            tail: None,
            tail_misfit: 0.0,
            note: String::new(),
        }
    }

    /// Build from `(value, weight)` pairs. Atoms are sorted by decreasing
    /// value and equal values are merged by adding weights, so the
    /// rearrangement is unique.
    pub fn from_atoms<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut raw: Vec<Atom> = Vec::new();
        for (i, (value, weight)) in pairs.into_iter().enumerate() {
            check_atom(value, weight).map_err(|e| match e {
                Error::Schema(msg) => Error::schema(format!("/atoms/{i}: {msg}")),
                other => other,
            })?;
            raw.push(Atom { value, weight });
        }
        raw.sort_unstable_by(|a, b| b.value.total_cmp(&a.value));
        let mut atoms: Vec<Atom> = Vec::with_capacity(raw.len());
        for a in raw {
            match atoms.last_mut() {
                Some(last) if last.value == a.value => last.weight += a.weight,
                _ => atoms.push(a),
            }
        }
        let mut cum_weight = Vec::with_capacity(atoms.len());
        let mut cum_trace = Vec::with_capacity(atoms.len());
        let mut wsum = KahanSum::new();
        let mut tsum = KahanSum::new();
        for a in &atoms {
            wsum.add(a.weight);
            tsum.add(a.weight * a.value);
            cum_weight.push(wsum.value());
            cum_trace.push(tsum.value());
        }
        Ok(WeightedSpectrum {
            atoms,
            cum_weight,
            cum_trace,
            tail: None,
            tail_misfit: 0.0,
            note: String::new(),
        })
    }

    /// Attach a tail model, validating it against the last enumerated decade.
    pub fn with_tail(mut self, tail: Tail) -> Result<Self> {
        let (c, d) = tail.params();
        if !(c > 0.0) || !(d > 0.0) || !c.is_finite() || !d.is_finite() {
            return Err(Error::schema("tail parameters must satisfy c > 0, d > 0".to_string()));
        }
        if self.atoms.is_empty() {
            return Err(Error::precondition("cannot attach a tail to an empty spectrum"));
        }
        let misfit = self.tail_misfit_for(&tail);
        if misfit > TAIL_CONSISTENCY_RTOL {
            return Err(Error::schema(format!(
                "tail model inconsistent with the last enumerated decade (relative misfit {misfit:.3})"
            )));
        }
        self.tail = Some(tail);
        self.tail_misfit = misfit;
        Ok(self)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// Relative misfit of a candidate tail over the last enumerated decade:
    /// the model-weighted aggregate of the deviations, which tolerates the
    /// granularity of step counting near the small end of a short spectrum.
    fn tail_misfit_for(&self, tail: &Tail) -> f64 {
        let n = self.atoms.len();
        if n == 0 {
            return f64::INFINITY;
        }
        let mut deviation = 0.0f64;
        let mut reference = 0.0f64;
        match *tail {
            Tail::Growth { c, d } => {
                // compare N(lambda) = weight{value <= lambda} against c*lambda^d
                // over the largest enumerated decade
                let vmax = self.atoms[0].value;
                let lo = vmax / 10.0;
                for (k, a) in self.atoms.iter().enumerate() {
                    if a.value < lo {
                        break;
                    }
                    let n_here = self.total_weight() - if k == 0 { 0.0 } else { self.cum_weight[k - 1] };
                    let model = c * a.value.powf(d);
                    deviation += (n_here - model).abs();
                    reference += model;
                }
            }
            Tail::Decay { c, d } => {
                // compare weight{value >= v} against c*v^{-d} over the
                // smallest enumerated decade
                let vmin = self.atoms[n - 1].value;
                if vmin <= 0.0 {
                    return f64::INFINITY;
                }
                let hi = vmin * 10.0;
                for k in (0..n).rev() {
                    let v = self.atoms[k].value;
                    if v > hi {
                        break;
                    }
                    let mass = self.cum_weight[k];
                    let model = c * v.powf(-d);
                    deviation += (mass - model).abs();
                    reference += model;
                }
            }
        }
        if reference > 0.0 {
            deviation / reference
        } else {
            f64::INFINITY
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn tail(&self) -> Option<Tail> {
        self.tail
    }

    pub fn tail_misfit(&self) -> f64 {
        self.tail_misfit
    }

    pub fn note(&self) -> &str {
        &self.note
    }

    pub fn cumulative_weights(&self) -> &[f64] {
        &self.cum_weight
    }

    pub fn total_weight(&self) -> f64 {
        self.cum_weight.last().copied().unwrap_or(0.0)
    }

    /// Trace of the enumerated part, `sum w_i v_i`.
    pub fn enumerated_trace(&self) -> f64 {
        self.cum_trace.last().copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        self.atoms.first().map(|a| a.value).unwrap_or(0.0)
    }

    pub fn min_value(&self) -> f64 {
        self.atoms.last().map(|a| a.value).unwrap_or(0.0)
    }

    fn require_not_growth(&self, op: &str) -> Result<()> {
        if matches!(self.tail, Some(Tail::Growth { .. })) {
            return Err(Error::precondition(format!(
                "{op} is undefined for a spectrum with unbounded growth tail"
            )));
        }
        Ok(())
    }

    /// Generalized singular value `mu_t`: the non-increasing rearrangement of
    /// the spectrum against the trace weights, right-continuous in `t`.
    pub fn mu(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::precondition(format!("mu requires t > 0, got {t}")));
        }
        self.require_not_growth("mu")?;
        let idx = self.cum_weight.partition_point(|&c| c <= t);
        if idx < self.atoms.len() {
            return Ok(self.atoms[idx].value);
        }
        match self.tail {
            None => Ok(0.0),
            Some(Tail::Decay { c, d }) => {
                let mass = self.total_weight();
                let bound = (c / t).powf(1.0 / d);
                if t <= mass * 10f64.powf(TAIL_VALIDITY_DECADES) {
                    Ok(bound)
                } else {
                    Err(Error::TailUncertain { at: t, bound })
                }
            }
            Some(Tail::Growth { .. }) => unreachable!(),
        }
    }

    /// `sigma_t = ∫_0^t mu_s ds`, exact piecewise-linear on the enumerated
    /// range, with an additive tail bound beyond it.
    pub fn sigma(&self, t: f64) -> Result<SigmaValue> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::precondition(format!("sigma requires t > 0, got {t}")));
        }
        self.require_not_growth("sigma")?;
        let idx = self.cum_weight.partition_point(|&c| c <= t);
        if idx < self.atoms.len() {
            let (base_w, base_t) = if idx == 0 {
                (0.0, 0.0)
            } else {
                (self.cum_weight[idx - 1], self.cum_trace[idx - 1])
            };
            return Ok(SigmaValue {
                value: base_t + (t - base_w) * self.atoms[idx].value,
                tail_error: 0.0,
            });
        }
        let base = self.enumerated_trace();
        match self.tail {
            None => Ok(SigmaValue { value: base, tail_error: 0.0 }),
            Some(Tail::Decay { c, d }) => {
                let mass = self.total_weight();
                let tail_int = decay_sigma_integral(c, d, mass, t);
                let value = base + tail_int;
                if t <= mass * 10f64.powf(TAIL_VALIDITY_DECADES) {
                    Ok(SigmaValue {
                        value,
                        tail_error: self.tail_misfit.max(0.02) * tail_int,
                    })
                } else {
                    Err(Error::TailUncertain { at: t, bound: value })
                }
            }
            Some(Tail::Growth { .. }) => unreachable!(),
        }
    }

    /// `sigma` on an increasing grid, in one pass over the atoms.
    pub fn sigma_on_grid(&self, grid: &[f64]) -> Result<Vec<SigmaValue>> {
        self.require_not_growth("sigma")?;
        let mut out = Vec::with_capacity(grid.len());
        let mut k = 0usize; // first atom index with cum_weight > t
        let mut prev = 0.0f64;
        for &t in grid {
            if !(t > 0.0) {
                return Err(Error::precondition(format!("sigma grid point {t} must be positive")));
            }
            if t < prev {
                return Err(Error::precondition("sigma grid must be nondecreasing"));
            }
            prev = t;
            while k < self.atoms.len() && self.cum_weight[k] <= t {
                k += 1;
            }
            if k < self.atoms.len() {
                let (base_w, base_t) = if k == 0 {
                    (0.0, 0.0)
                } else {
                    (self.cum_weight[k - 1], self.cum_trace[k - 1])
                };
                out.push(SigmaValue {
                    value: base_t + (t - base_w) * self.atoms[k].value,
                    tail_error: 0.0,
                });
            } else {
                out.push(self.sigma(t)?);
            }
        }
        Ok(out)
    }

    /// Schatten norm `||T||_p = (∫ mu_t^p dt)^{1/p}` with tail correction.
    /// Returns `INFINITY` when the tail exponent implies divergence.
    pub fn norm_p(&self, p: f64) -> Result<NormValue> {
        if !(p >= 1.0) {
            return Err(Error::precondition(format!("norm_p requires p >= 1, got {p}")));
        }
        self.require_not_growth("norm_p")?;
        let mut acc = KahanSum::new();
        for a in &self.atoms {
            acc.add(a.weight * a.value.powf(p));
        }
        let (tail_int, tail_err) = match self.tail {
            None => (0.0, 0.0),
            Some(Tail::Decay { c, d }) => {
                let expo = p / d;
                if expo <= 1.0 {
                    return Ok(NormValue { value: f64::INFINITY, error: 0.0 });
                }
                let mass = self.total_weight();
                let int = c.powf(expo) * mass.powf(1.0 - expo) / (expo - 1.0);
                (int, self.tail_misfit.max(0.02) * int)
            }
            Some(Tail::Growth { .. }) => unreachable!(),
        };
        let total = acc.value() + tail_int;
        let value = total.powf(1.0 / p);
        let error = if total > 0.0 {
            value / p * (tail_err / total)
        } else {
            0.0
        };
        Ok(NormValue { value, error })
    }

    /// `||T||_{1,∞} = sup_t sigma_t / log(1+t)`.
    ///
    /// For a step spectrum the ratio has no interior maxima on the linear
    /// pieces, so the supremum over breakpoints plus the tail limit is exact.
    pub fn norm_1inf(&self) -> Result<NormValue> {
        let class = self.classify(1.0)?;
        match class.l1_inf {
            Membership::In => {}
            Membership::Out => {
                return Err(Error::NotInIdeal {
                    ideal: "L^{1,inf}".to_string(),
                    detail: "sigma_t grows faster than log(1+t)".to_string(),
                })
            }
            Membership::Indeterminate => {
                return Err(Error::indeterminate("weak-L1 membership could not be established"))
            }
        }
        let mut best: f64 = 0.0;
        for k in 0..self.atoms.len() {
            let t = self.cum_weight[k];
            best = best.max(self.cum_trace[k] / (1.0 + t).ln());
        }
        let mut error = 0.0;
        if let Some(Tail::Decay { c, d }) = self.tail {
            if (d - 1.0).abs() < 1e-12 {
                // ratio tends to c monotonically through the tail region
                best = best.max(c);
                error = self.tail_misfit.max(0.02) * c;
            }
            // d < 1: the tail ratio tends to 0, nothing to add
        }
        Ok(NormValue { value: best, error })
    }

    /// Decide the ideal memberships from the declared tail (exact rules) or,
    /// absent a tail, from the fact that a complete finite spectrum is
    /// bounded with finite trace.
    pub fn classify(&self, p: f64) -> Result<IdealClassification> {
        if !(p >= 1.0) {
            return Err(Error::precondition(format!("classify requires p >= 1, got {p}")));
        }
        let class = match self.tail {
            None => IdealClassification {
                tau_compact: Membership::In,
                l1: Membership::In,
                l1_inf: Membership::In,
                lp_inf: Membership::In,
                p,
                decay_exponent: None,
                slope_residual: None,
            },
            Some(Tail::Decay { d, .. }) => IdealClassification {
                tau_compact: Membership::In,
                l1: if d < 1.0 { Membership::In } else { Membership::Out },
                l1_inf: if d <= 1.0 { Membership::In } else { Membership::Out },
                lp_inf: if d <= p { Membership::In } else { Membership::Out },
                p,
                decay_exponent: Some(d),
                slope_residual: None,
            },
            Some(Tail::Growth { .. }) => IdealClassification {
                tau_compact: Membership::Out,
                l1: Membership::Out,
                l1_inf: Membership::Out,
                lp_inf: Membership::Out,
                p,
                decay_exponent: None,
                slope_residual: None,
            },
        };
        debug_assert!(class.chain_consistent());
        Ok(class)
    }

    /// Apply a nondecreasing right-continuous `f` with `f(0) >= 0` to the
    /// values. The rearrangement then satisfies `mu_t(f(T)) = f(mu_t(T))`
    /// away from breakpoints. The tail model does not transform in general
    /// and is dropped.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mapped = WeightedSpectrum::from_atoms(self.atoms.iter().map(|a| (f(a.value), a.weight)))?;
        Ok(mapped.with_note(format!("{} (values mapped)", self.note)))
    }

    /// Scale all values by `|lambda|`. The tail transforms exactly.
    pub fn scale(&self, lambda: f64) -> Result<Self> {
        let l = lambda.abs();
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::precondition("scale factor must be nonzero and finite"));
        }
        let mut s = WeightedSpectrum::from_atoms(self.atoms.iter().map(|a| (a.value * l, a.weight)))?;
        s.tail = self.tail.map(|t| match t {
            Tail::Decay { c, d } => Tail::Decay { c: c * l.powf(d), d },
            Tail::Growth { c, d } => Tail::Growth { c: c * l.powf(-d), d },
        });
        s.tail_misfit = self.tail_misfit;
        Ok(s.with_note(self.note.clone()))
    }

    /// Raise all values to the power `alpha != 0`. The tail transforms
    /// exactly, flipping convention when `alpha < 0`.
    pub fn pow(&self, alpha: f64) -> Result<Self> {
        if alpha == 0.0 || !alpha.is_finite() {
            return Err(Error::precondition("pow exponent must be nonzero and finite"));
        }
        if alpha < 0.0 && self.atoms.iter().any(|a| a.value == 0.0) {
            return Err(Error::precondition(
                "cannot invert a spectrum containing a zero eigenvalue",
            ));
        }
        let mut s =
            WeightedSpectrum::from_atoms(self.atoms.iter().map(|a| (a.value.powf(alpha), a.weight)))?;
        let aa = alpha.abs();
        s.tail = self.tail.map(|t| match (t, alpha > 0.0) {
            (Tail::Growth { c, d }, true) => Tail::Growth { c, d: d / aa },
            (Tail::Growth { c, d }, false) => Tail::Decay { c, d: d / aa },
            (Tail::Decay { c, d }, true) => Tail::Decay { c, d: d / aa },
            (Tail::Decay { c, d }, false) => Tail::Growth { c, d: d / aa },
        });
        s.tail_misfit = self.tail_misfit;
        Ok(s.with_note(format!("{} (pow {alpha})", self.note)))
    }

    /// Direct sum: union of the atom lists (weights add on equal values).
    /// Tails combine when they share a convention; the slower-decaying one
    /// dominates when exponents differ.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        let mut s = WeightedSpectrum::from_atoms(
            self.atoms
                .iter()
                .chain(other.atoms.iter())
                .map(|a| (a.value, a.weight)),
        )?;
        s.tail = match (self.tail, other.tail) {
            (None, t) | (t, None) => t,
            (Some(Tail::Decay { c: c1, d: d1 }), Some(Tail::Decay { c: c2, d: d2 })) => {
                if (d1 - d2).abs() < 1e-12 {
                    Some(Tail::Decay { c: c1 + c2, d: d1 })
                } else if d1 > d2 {
                    Some(Tail::Decay { c: c1, d: d1 })
                } else {
                    Some(Tail::Decay { c: c2, d: d2 })
                }
            }
            (Some(Tail::Growth { c: c1, d: d1 }), Some(Tail::Growth { c: c2, d: d2 })) => {
                if (d1 - d2).abs() < 1e-12 {
                    Some(Tail::Growth { c: c1 + c2, d: d1 })
                } else if d1 > d2 {
                    Some(Tail::Growth { c: c1, d: d1 })
                } else {
                    Some(Tail::Growth { c: c2, d: d2 })
                }
            }
            _ => {
                return Err(Error::precondition(
                    "cannot merge spectra with opposite tail conventions",
                ))
            }
        };
        s.tail_misfit = self.tail_misfit.max(other.tail_misfit);
        Ok(s)
    }

    /// Step model of the product of two commuting positive diagonal operators
    /// paired in rearranged order: the step function `t -> mu_t(S1) mu_t(S2)`
    /// over the common refinement of the weight partitions.
    pub fn rearranged_product(&self, other: &Self) -> Result<Self> {
        self.require_not_growth("rearranged_product")?;
        other.require_not_growth("rearranged_product")?;
        let mut pieces: Vec<(f64, f64)> = Vec::new();
        let (mut i, mut j) = (0usize, 0usize);
        let mut t = 0.0f64;
        while i < self.atoms.len() && j < other.atoms.len() {
            let end = self.cum_weight[i].min(other.cum_weight[j]);
            let width = end - t;
            if width > 0.0 {
                pieces.push((self.atoms[i].value * other.atoms[j].value, width));
            }
            if self.cum_weight[i] <= end {
                i += 1;
            }
            if other.cum_weight[j] <= end {
                j += 1;
            }
            t = end;
        }
        let mut s = WeightedSpectrum::from_atoms(pieces)?;
        s.note = "rearranged product (truncated at the smaller enumerated mass)".to_string();
        Ok(s)
    }

    /// Counting function `N(lambda)`: accumulated weight of atoms `<= lambda`.
    /// Exact on the enumerated range; beyond it the growth tail extrapolates
    /// with continuity at the cutoff.
    pub fn counting(&self, lambda: f64) -> Result<f64> {
        if self.atoms.is_empty() {
            return Ok(0.0);
        }
        if self.min_value() <= 0.0 {
            return Err(Error::precondition(
                "counting requires spectrum values >= eps > 0",
            ));
        }
        if matches!(self.tail, Some(Tail::Decay { .. })) {
            return Err(Error::precondition(
                "counting is undefined for a spectrum accumulating at zero",
            ));
        }
        if !lambda.is_finite() {
            return Err(Error::precondition("counting requires a finite lambda"));
        }
        let vmax = self.max_value();
        if lambda <= vmax {
            // atoms sorted descending: weight{value > lambda} is a prefix sum
            let idx = self.atoms.partition_point(|a| a.value > lambda);
            let above = if idx == 0 { 0.0 } else { self.cum_weight[idx - 1] };
            return Ok(self.total_weight() - above);
        }
        match self.tail {
            None => Err(Error::TailUncertain { at: lambda, bound: self.total_weight() }),
            Some(Tail::Growth { c, d }) => {
                let bound = self.total_weight() + c * (lambda.powf(d) - vmax.powf(d));
                if lambda <= vmax * 10f64.powf(TAIL_VALIDITY_DECADES) {
                    Ok(bound)
                } else {
                    Err(Error::TailUncertain { at: lambda, bound })
                }
            }
            Some(Tail::Decay { .. }) => unreachable!(),
        }
    }

    /// Serialize into the fixed wire format `{atoms, tail}`.
    pub fn to_wire(&self) -> WireSpectrum {
        WireSpectrum {
            atoms: self.atoms.iter().map(|a| (a.value, a.weight)).collect(),
            tail: self.tail.map(|t| {
                let (c, d) = t.params();
                WireTail { c, d }
            }),
        }
    }

    /// Rebuild from the wire format. The tail direction is not part of the
    /// schema; it is inferred by checking which convention is consistent
    /// with the enumerated atoms, and the load fails if neither is.
    pub fn from_wire(wire: WireSpectrum) -> Result<Self> {
        let spectrum = WeightedSpectrum::from_atoms(wire.atoms)?;
        match wire.tail {
            None => Ok(spectrum),
            Some(WireTail { c, d }) => {
                if !(c > 0.0 && d > 0.0) || !c.is_finite() || !d.is_finite() {
                    return Err(Error::schema(
                        "/tail: parameters must satisfy c > 0, d > 0".to_string(),
                    ));
                }
                let growth = Tail::Growth { c, d };
                let decay = Tail::Decay { c, d };
                let m_growth = spectrum.tail_misfit_for(&growth);
                let m_decay = spectrum.tail_misfit_for(&decay);
                if m_growth.min(m_decay) > TAIL_CONSISTENCY_RTOL {
                    return Err(Error::schema(format!(
                        "/tail: model fits neither convention (growth misfit {m_growth:.3}, decay misfit {m_decay:.3})"
                    )));
                }
                let chosen = if m_growth <= m_decay { growth } else { decay };
                spectrum.with_tail(chosen)
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_wire()).expect("wire spectrum serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: WireSpectrum =
            serde_json::from_str(s).map_err(|e| Error::schema(format!("spectrum JSON: {e}")))?;
        WeightedSpectrum::from_wire(wire)
    }

    /// View this spectrum as a singular value function.
    pub fn singular_values(&self) -> SingularValueFunction<'_> {
        SingularValueFunction::Step(self)
    }
}

/// `∫_mass^t (c/s)^{1/d} ds` for a decay tail.
fn decay_sigma_integral(c: f64, d: f64, mass: f64, t: f64) -> f64 {
    let expo = 1.0 / d;
    if (expo - 1.0).abs() < 1e-12 {
        c * (t / mass).ln()
    } else {
        c.powf(expo) * (t.powf(1.0 - expo) - mass.powf(1.0 - expo)) / (1.0 - expo)
    }
}

/// The object every trace formula consumes: a non-increasing right-continuous
/// `t -> mu_t`, either the exact step function of a [`WeightedSpectrum`] or an
/// analytic profile (used by synthetic benchmarks where mu has a closed form).
pub enum SingularValueFunction<'a> {
    Step(&'a WeightedSpectrum),
    Analytic {
        mu: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        /// Decay model `mu_t ~ (c/t)^{1/d}` at infinity, when declared.
        tail: Option<Tail>,
    },
}

impl<'a> SingularValueFunction<'a> {
    pub fn analytic<F>(mu: F, tail: Option<Tail>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        SingularValueFunction::Analytic { mu: Arc::new(mu), tail }
    }

    pub fn mu(&self, t: f64) -> Result<f64> {
        match self {
            SingularValueFunction::Step(s) => s.mu(t),
            SingularValueFunction::Analytic { mu, .. } => {
                if !(t > 0.0) {
                    return Err(Error::precondition(format!("mu requires t > 0, got {t}")));
                }
                Ok(mu(t))
            }
        }
    }

    /// Enumerated mass, when meaningful.
    pub fn mass(&self) -> Option<f64> {
        match self {
            SingularValueFunction::Step(s) => Some(s.total_weight()),
            SingularValueFunction::Analytic { .. } => None,
        }
    }

    /// `sigma` on an increasing grid. Exact for step spectra; high-order
    /// panel quadrature between grid points for analytic profiles.
    pub fn sigma_on_grid(&self, grid: &[f64]) -> Result<Vec<SigmaValue>> {
        match self {
            SingularValueFunction::Step(s) => s.sigma_on_grid(grid),
            SingularValueFunction::Analytic { mu, .. } => {
                let (nodes, weights) = crate::special::gauss_legendre(12);
                let f = |x: f64| mu(x);
                let mut out = Vec::with_capacity(grid.len());
                let mut acc = 0.0;
                let mut prev = 0.0;
                for &t in grid {
                    if !(t > prev) && !(t == prev) {
                        return Err(Error::precondition("sigma grid must be nondecreasing"));
                    }
                    // subdivide wide intervals so the panel rule stays sharp
                    let panels = (((t - prev) / (0.1 * (1.0 + prev))).ceil() as usize).clamp(1, 64);
                    let h = (t - prev) / panels as f64;
                    for k in 0..panels {
                        let a = prev + h * k as f64;
                        acc += gl_integrate(&f, a, a + h, &nodes, &weights);
                    }
                    prev = t;
                    out.push(SigmaValue { value: acc, tail_error: 0.0 });
                }
                Ok(out)
            }
        }
    }

    pub fn classify(&self, p: f64) -> Result<IdealClassification> {
        match self {
            SingularValueFunction::Step(s) => s.classify(p),
            SingularValueFunction::Analytic { mu, tail } => match tail {
                Some(Tail::Decay { d, .. }) => Ok(IdealClassification {
                    tau_compact: Membership::In,
                    l1: if *d < 1.0 { Membership::In } else { Membership::Out },
                    l1_inf: if *d <= 1.0 { Membership::In } else { Membership::Out },
                    lp_inf: if *d <= p { Membership::In } else { Membership::Out },
                    p,
                    decay_exponent: Some(*d),
                    slope_residual: None,
                }),
                Some(Tail::Growth { .. }) => Err(Error::precondition(
                    "analytic mu profiles must decay; growth tails are not meaningful here",
                )),
                None => {
                    // decade-wise sigma statistics over a probe grid: decide
                    // each ideal from whether its normalized ratio stabilizes
                    // or keeps growing, and refuse to guess otherwise
                    let probes: Vec<f64> = (0..=8).map(|k| 10f64.powi(k)).collect();
                    let sigmas = self.sigma_on_grid(&probes)?;
                    let ratio_verdict = |weight: &dyn Fn(f64) -> f64| -> Membership {
                        let ratios: Vec<f64> = probes
                            .iter()
                            .zip(&sigmas)
                            .map(|(&t, s)| s.value / weight(t))
                            .collect();
                        let growth: Vec<f64> = ratios
                            .windows(2)
                            .skip(4)
                            .map(|w| w[1] / w[0] - 1.0)
                            .collect();
                        if growth.iter().all(|g| g.abs() <= 0.03) {
                            Membership::In
                        } else if growth.iter().all(|&g| g >= 0.04) {
                            Membership::Out
                        } else {
                            Membership::Indeterminate
                        }
                    };
                    let l1_inf = ratio_verdict(&|t: f64| (1.0 + t).ln());
                    let lp_inf = if (p - 1.0).abs() < 1e-12 {
                        l1_inf
                    } else {
                        ratio_verdict(&|t: f64| t.powf(1.0 - 1.0 / p))
                    };
                    // trace class iff the decade increments of sigma die out
                    let incs: Vec<f64> =
                        sigmas.windows(2).skip(4).map(|w| w[1].value - w[0].value).collect();
                    let l1 = if incs.windows(2).all(|w| w[1] <= 0.7 * w[0] + 1e-12) {
                        Membership::In
                    } else if incs.windows(2).all(|w| w[1] >= 0.8 * w[0]) {
                        Membership::Out
                    } else {
                        Membership::Indeterminate
                    };
                    let mu_head = mu(probes[0]);
                    let mu_tail = mu(probes[probes.len() - 1]);
                    let tau_compact = if mu_tail <= 1e-2 * mu_head.max(f64::MIN_POSITIVE) {
                        Membership::In
                    } else {
                        Membership::Indeterminate
                    };
                    let class = IdealClassification {
                        tau_compact,
                        l1,
                        l1_inf,
                        lp_inf,
                        p,
                        decay_exponent: None,
                        slope_residual: None,
                    };
                    if !class.chain_consistent() {
                        return Ok(indeterminate_class(p));
                    }
                    Ok(class)
                }
            },
        }
    }
}

fn indeterminate_class(p: f64) -> IdealClassification {
    IdealClassification {
        tau_compact: Membership::Indeterminate,
        l1: Membership::Indeterminate,
        l1_inf: Membership::Indeterminate,
        lp_inf: Membership::Indeterminate,
        p,
        decay_exponent: None,
        slope_residual: None,
    }
}

/// Least-squares slope of `ys` against `xs` plus the rms residual.
pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - xbar) * (x - xbar);
        sxy += (x - xbar) * (y - ybar);
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let mut rss = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let r = y - intercept - slope * x;
        rss += r * r;
    }
    (slope, (rss / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_atoms() -> WeightedSpectrum {
        WeightedSpectrum::from_atoms([(3.0, 1.0), (1.0, 2.0)]).unwrap()
    }

    /// Circle-type spectrum of |D|^{-1}: values 1/n with weight 2 each.
    fn circle_inverse(n: u32) -> WeightedSpectrum {
        WeightedSpectrum::from_atoms((1..=n).map(|k| (1.0 / k as f64, 2.0)))
            .unwrap()
            .with_tail(Tail::decay(2.0, 1.0))
            .unwrap()
    }

    #[test]
    fn mu_rearrangement_definition() {
        let s = two_atoms();
        assert_eq!(s.mu(0.5).unwrap(), 3.0);
        assert_eq!(s.mu(1.0).unwrap(), 1.0); // right-continuous at the breakpoint
        assert_eq!(s.mu(3.1).unwrap(), 0.0); // total weight exhausted, no tail
    }

    #[test]
    fn mu_circle_brute_force() {
        // oracle: brute-force rearrangement of the enumerated eigenvalues
        let n = 50u32;
        let mut eigs: Vec<f64> = (1..=n).flat_map(|k| [1.0 / k as f64; 2]).collect();
        eigs.sort_by(|a, b| b.total_cmp(a));
        let s = circle_inverse(n);
        for &t in &[0.5, 1.9, 2.0, 5.0, 37.3] {
            let oracle = eigs[t as usize]; // value at the first cumulative weight > t
            assert_eq!(s.mu(t).unwrap(), oracle, "t = {t}");
        }
        assert_eq!(s.mu(5.0).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn mu_tail_extrapolation_and_horizon() {
        let s = circle_inverse(100); // mass 200
        // inside the validity horizon: mu_t ~ c/t
        assert_relative_eq!(s.mu(400.0).unwrap(), 2.0 / 400.0, max_relative = 1e-12);
        // beyond it: explicit refusal carrying the bound
        let beyond = 200.0 * 10f64.powf(TAIL_VALIDITY_DECADES) * 1.1;
        match s.mu(beyond) {
            Err(Error::TailUncertain { bound, .. }) => {
                assert!(bound > 0.0);
            }
            other => panic!("expected TailUncertain, got {other:?}"),
        }
    }

    #[test]
    fn sigma_exact_and_harmonic() {
        let s = two_atoms();
        assert_relative_eq!(s.sigma(2.0).unwrap().value, 4.0, max_relative = 1e-14);
        // circle: sigma at t = 2k is twice the k-th harmonic number
        let s = circle_inverse(1000);
        let mut h = 0.0;
        for k in 1..=30 {
            h += 1.0 / k as f64;
            let got = s.sigma(2.0 * k as f64).unwrap().value;
            assert_relative_eq!(got, 2.0 * h, max_relative = 1e-12);
        }
    }

    #[test]
    fn sigma_analytic_closed_form() {
        // mu_t = 1/(1+t): sigma_{e-1} = 1 exactly
        let sv = SingularValueFunction::analytic(|t| 1.0 / (1.0 + t), Some(Tail::decay(1.0, 1.0)));
        let grid = [0.5f64, 1.0, std::f64::consts::E - 1.0, 10.0];
        let sig = sv.sigma_on_grid(&grid).unwrap();
        assert_relative_eq!(sig[2].value, 1.0, max_relative = 1e-12);
        assert_relative_eq!(sig[3].value, 11f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn norm_p_values() {
        let s = WeightedSpectrum::from_atoms([(2.0, 1.0)]).unwrap();
        assert_relative_eq!(s.norm_p(2.0).unwrap().value, 2.0, max_relative = 1e-14);

        // circle |D|^{-1}: ||.||_2 = (2 zeta(2))^{1/2}; oracle = partial sums
        // plus integral tail bound
        let n = 200_000u32;
        let s = circle_inverse(n);
        let mut partial = 0.0;
        for k in 1..=n {
            partial += 2.0 / (k as f64 * k as f64);
        }
        let tail_lo = 2.0 / (n as f64 + 1.0);
        let tail_hi = 2.0 / n as f64;
        let oracle = (partial + 0.5 * (tail_lo + tail_hi)).sqrt();
        let got = s.norm_p(2.0).unwrap();
        assert_relative_eq!(got.value, oracle, max_relative = 1e-9);
        let frozen = (std::f64::consts::PI * std::f64::consts::PI / 3.0).sqrt();
        assert_relative_eq!(got.value, frozen, max_relative = 1e-9);

        // harmonic-type tail with p = 1 diverges
        let s = circle_inverse(100);
        assert!(s.norm_p(1.0).unwrap().value.is_infinite());
    }

    #[test]
    fn norm_1inf_values() {
        // single atom {(1,1)}: sup of sigma/log(1+t) is at the breakpoint t=1
        let s = WeightedSpectrum::from_atoms([(1.0, 1.0)]).unwrap();
        assert_relative_eq!(s.norm_1inf().unwrap().value, 1.0 / 2f64.ln(), max_relative = 1e-14);

        // circle |D|^{-1}: the tail limit 2 dominates every breakpoint ratio
        let s = circle_inverse(5000);
        let got = s.norm_1inf().unwrap();
        assert!(got.value >= 2.0 - 1e-12);
        assert!(got.value <= 2.0 + got.error + 1e-12);
    }

    #[test]
    fn norm_1inf_refuses_outside_the_ideal() {
        // mu ~ t^{-1/2} is not weak trace class
        let s = WeightedSpectrum::from_atoms((1..=4000).map(|k| ((k as f64).powf(-0.5), 1.0)))
            .unwrap()
            .with_tail(Tail::decay(1.0, 2.0))
            .unwrap();
        assert!(matches!(s.norm_1inf(), Err(Error::NotInIdeal { .. })));
    }

    #[test]
    fn classify_cases() {
        // harmonic decay: weak-L1 but not trace class
        let s = circle_inverse(100);
        let c = s.classify(1.0).unwrap();
        assert_eq!(c.l1_inf, Membership::In);
        assert_eq!(c.l1, Membership::Out);
        assert!(c.chain_consistent());

        // mu ~ t^{-1/2}: in L^{2,inf}, not in L^{1,inf}
        let sv = SingularValueFunction::analytic(|t| (1.0 + t).powf(-0.5), Some(Tail::decay(1.0, 2.0)));
        let c = sv.classify(2.0).unwrap();
        assert_eq!(c.lp_inf, Membership::In);
        assert_eq!(c.l1_inf, Membership::Out);

        // analytic without declared tail: decided from sigma statistics
        let sv = SingularValueFunction::analytic(|t| 1.0 / (1.0 + t), None);
        let c = sv.classify(1.0).unwrap();
        assert_eq!(c.l1_inf, Membership::In);
        assert_eq!(c.l1, Membership::Out);

        // slow non-power decay: sigma outgrows the log, decidedly out
        let sv = SingularValueFunction::analytic(|t| 1.0 / (1.0 + (1.0 + t).ln()), None);
        let c = sv.classify(1.0).unwrap();
        assert_eq!(c.l1_inf, Membership::Out);

        // oscillating ratio: reported indeterminate, never guessed
        let sv =
            SingularValueFunction::analytic(|t| (2.0 + (1.0 + t).ln().sin()) / (1.0 + t), None);
        let c = sv.classify(1.0).unwrap();
        assert_eq!(c.l1_inf, Membership::Indeterminate);
    }

    #[test]
    fn map_and_scale_laws() {
        let s = circle_inverse(300);
        let f = |x: f64| x * x; // nondecreasing, f(0) = 0
        let mapped = s.map_values(f).unwrap();
        for &t in &[0.7, 3.3, 10.1, 555.5] {
            assert_relative_eq!(mapped.mu(t).unwrap(), f(s.mu(t).unwrap()), max_relative = 1e-14);
        }
        let scaled = s.scale(-2.5).unwrap();
        for &t in &[0.7, 3.3, 10.1] {
            assert_relative_eq!(scaled.mu(t).unwrap(), 2.5 * s.mu(t).unwrap(), max_relative = 1e-14);
        }
        // scaled tail stays consistent: mu in the tail region
        assert_relative_eq!(scaled.mu(900.0).unwrap(), 2.5 * (2.0 / 900.0), max_relative = 1e-12);
    }

    #[test]
    fn pow_transforms_tail() {
        let s = WeightedSpectrum::from_atoms((1..=500).map(|k| (k as f64, 2.0)))
            .unwrap()
            .with_tail(Tail::growth(2.0, 1.0))
            .unwrap();
        let inv = s.pow(-1.0).unwrap();
        match inv.tail().unwrap() {
            Tail::Decay { c, d } => {
                assert_relative_eq!(c, 2.0, max_relative = 1e-14);
                assert_relative_eq!(d, 1.0, max_relative = 1e-14);
            }
            _ => panic!("expected decay tail"),
        }
        assert_eq!(inv.mu(5.0).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn counting_cases() {
        let s = WeightedSpectrum::from_atoms([(1.0, 2.0), (2.0, 3.0)]).unwrap();
        assert_eq!(s.counting(1.5).unwrap(), 2.0);
        assert_eq!(s.counting(2.0).unwrap(), 5.0);
        // beyond enumeration without a tail: explicit tail-uncertain error
        assert!(matches!(s.counting(5.0), Err(Error::TailUncertain { .. })));

        let s = WeightedSpectrum::from_atoms((1..=100).map(|k| (k as f64, 2.0)))
            .unwrap()
            .with_tail(Tail::growth(2.0, 1.0))
            .unwrap();
        assert_eq!(s.counting(10.5).unwrap(), 20.0);
        assert_relative_eq!(s.counting(500.0).unwrap(), 1000.0, max_relative = 1e-12);
    }

    #[test]
    fn empty_spectrum_is_zero_operator() {
        let s = WeightedSpectrum::empty();
        assert_eq!(s.mu(1.0).unwrap(), 0.0);
        assert_eq!(s.sigma(7.0).unwrap().value, 0.0);
        assert_eq!(s.norm_p(1.0).unwrap().value, 0.0);
        assert_eq!(s.total_weight(), 0.0);
    }

    #[test]
    fn ties_merge_and_sort() {
        let s = WeightedSpectrum::from_atoms([(1.0, 0.5), (2.0, 1.0), (1.0, 1.5)]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.atoms()[0].value, 2.0);
        assert_eq!(s.atoms()[1].weight, 2.0);
    }

    #[test]
    fn wire_round_trip_and_direction_inference() {
        let s = circle_inverse(200);
        let json = s.to_json();
        let back = WeightedSpectrum::from_json(&json).unwrap();
        assert_eq!(back.len(), s.len());
        assert!(matches!(back.tail().unwrap(), Tail::Decay { .. }));
        assert_eq!(back.to_json(), json); // deterministic round-trip

        let g = WeightedSpectrum::from_atoms((1..=200).map(|k| (k as f64, 2.0)))
            .unwrap()
            .with_tail(Tail::growth(2.0, 1.0))
            .unwrap();
        let back = WeightedSpectrum::from_json(&g.to_json()).unwrap();
        assert!(matches!(back.tail().unwrap(), Tail::Growth { .. }));
    }

    #[test]
    fn schema_errors_carry_paths() {
        let err = WeightedSpectrum::from_atoms([(1.0, -1.0)]).unwrap_err();
        assert!(err.to_string().contains("/atoms/0"));
        let err = WeightedSpectrum::from_json(r#"{"atoms": [[1.0, 1.0]], "tail": {"c": -2.0, "d": 1.0}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("/tail"));
    }

    #[test]
    fn inconsistent_tail_rejected() {
        let err = WeightedSpectrum::from_atoms((1..=100).map(|k| (1.0 / k as f64, 2.0)))
            .unwrap()
            .with_tail(Tail::decay(40.0, 1.0))
            .unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
    }

    #[test]
    fn trace_equals_integral_of_rearrangement() {
        // tau(f(T)) = ∫ f(mu_t) dt for increasing f with f(0) = 0
        let s = two_atoms();
        let f = |x: f64| x.powf(1.3);
        let lhs: f64 = s.atoms().iter().map(|a| a.weight * f(a.value)).sum();
        // the step integral: sum over pieces
        let mut rhs = 0.0;
        let mut prev = 0.0;
        for (a, c) in s.atoms().iter().zip(s.cumulative_weights()) {
            rhs += (c - prev) * f(a.value);
            prev = *c;
        }
        assert_relative_eq!(lhs, rhs, max_relative = 1e-14);
    }
}

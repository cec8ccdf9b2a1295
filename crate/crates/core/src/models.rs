//! Verifiable operator models: circle and torus spectra, foliated families
//! with a transverse measure, the kernel-doubling construction, and weighted
//! matrix algebras for property tests.
//!
//! These are the closed-form instances every estimator in the crate is
//! validated against: the circle operator has counting function
//! `N(lambda) = 2 floor(lambda)`, the flat `p`-torus follows the lattice
//! count `N(lambda) ~ vol(B_p) lambda^p`, and transverse weights multiply
//! every trace by the total transverse mass.

use crate::error::{Error, Result};
use crate::spectrum::{Tail, WeightedSpectrum};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// First-order operator on the circle with modes `n` in `[-N, N]` and
/// eigenvalue `n`; the mode `n = 0` is its one-dimensional kernel.
#[derive(Debug, Clone, Copy)]
pub struct CircleDirac {
    n_cut: u32,
}

/// Generator for the circle model.
pub fn circle_dirac(n_cut: u32) -> Result<CircleDirac> {
    if n_cut == 0 {
        return Err(Error::precondition("circle model needs at least one positive mode"));
    }
    Ok(CircleDirac { n_cut })
}

impl CircleDirac {
    pub fn n_cut(&self) -> u32 {
        self.n_cut
    }

    /// Signed eigenvalues of the operator itself, modes `-N..=N`.
    pub fn d_eigenvalues(&self) -> Vec<f64> {
        let n = self.n_cut as i64;
        (-n..=n).map(|k| k as f64).collect()
    }

    /// Spectrum of `|D|` including the kernel atom at 0.
    pub fn abs_spectrum(&self) -> WeightedSpectrum {
        let mut atoms: Vec<(f64, f64)> = (1..=self.n_cut).map(|k| (k as f64, 2.0)).collect();
        atoms.push((0.0, 1.0));
        WeightedSpectrum::from_atoms(atoms)
            .expect("circle atoms are valid")
            .with_note(format!("circle |D| with kernel, {} positive modes", self.n_cut))
    }

    /// Strictly positive part of `|D|`: values `n` with weight 2.
    pub fn abs_positive(&self) -> WeightedSpectrum {
        WeightedSpectrum::from_atoms((1..=self.n_cut).map(|k| (k as f64, 2.0)))
            .expect("circle atoms are valid")
            .with_tail(Tail::growth(2.0, 1.0))
            .expect("counting model N = 2 lambda is consistent")
            .with_note(format!("circle |D| positive part, {} modes", self.n_cut))
    }

    /// `(D^2 + 1)^{1/2}`: the invertible replacement for `|D|` when the
    /// kernel mode matters. The kernel contributes the top value 1.
    pub fn regularized_abs(&self) -> WeightedSpectrum {
        let mut atoms: Vec<(f64, f64)> = (1..=self.n_cut)
            .map(|k| (((k as f64) * (k as f64) + 1.0).sqrt(), 2.0))
            .collect();
        atoms.push((1.0, 1.0));
        WeightedSpectrum::from_atoms(atoms)
            .expect("circle atoms are valid")
            .with_tail(Tail::growth(2.0, 1.0))
            .expect("counting model N = 2 lambda is consistent")
            .with_note(format!("circle (D^2+1)^{{1/2}}, {} positive modes", self.n_cut))
    }

    /// `|D|^{-1}` on the positive part: values `1/n` with weight 2.
    pub fn inverse_abs(&self) -> WeightedSpectrum {
        self.abs_positive().pow(-1.0).expect("positive values invert")
    }

    /// `(D^2 + 1)^{-1/2}` including the kernel contribution.
    pub fn inverse_regularized(&self) -> WeightedSpectrum {
        self.regularized_abs().pow(-1.0).expect("regularized values invert")
    }

    /// Multiplier aligned with the atoms of [`Self::abs_positive`]: atom `i`
    /// carries mode `n = N - i` (values sorted by decreasing eigenvalue).
    pub fn multiplier_on_abs(&self, f: impl Fn(u32) -> f64) -> Vec<f64> {
        (0..self.n_cut).map(|i| f(self.n_cut - i)).collect()
    }

    /// Multiplier aligned with the atoms of [`Self::inverse_abs`]: atom `i`
    /// carries mode `n = i + 1` (values `1/n` sorted decreasingly).
    pub fn multiplier_on_inverse(&self, f: impl Fn(u32) -> f64) -> Vec<f64> {
        (0..self.n_cut).map(|i| f(i + 1)).collect()
    }
}

/// Leaf operator kind for torus models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafKind {
    /// `1 + Laplacian`, eigenvalue `1 + |k|^2`, weight 1 per lattice point.
    Laplacian,
    /// First-order operator, eigenvalue `|k|`, spinor multiplicity
    /// `2^{floor(p/2)}` per lattice point; even (graded) for even `p`.
    Dirac,
}

/// Flat `p`-torus model built from the lattice points `|k| <= R` in `Z^p`.
#[derive(Debug, Clone)]
pub struct TorusModel {
    p: u8,
    kind: LeafKind,
    r_cut: u32,
    /// counts[m] = #{ k in Z^p : |k|^2 = m }, for m <= R^2.
    counts: Vec<u64>,
}

/// Enumerate the lattice and bin by `|k|^2`.
pub fn torus_model(p: u8, kind: LeafKind, r_cut: u32) -> Result<TorusModel> {
    if !(1..=4).contains(&p) {
        return Err(Error::precondition(format!("torus leaf dimension {p} outside 1..=4")));
    }
    if r_cut == 0 {
        return Err(Error::precondition("torus model needs a positive lattice cutoff"));
    }
    let r2 = (r_cut as u64) * (r_cut as u64);
    let mut counts = vec![0u64; (r2 + 1) as usize];
    let r = r_cut as i64;
    match p {
        1 => {
            for k in -r..=r {
                counts[(k * k) as usize] += 1;
            }
        }
        2 => {
            for kx in -r..=r {
                let rem = (r2 as i64) - kx * kx;
                let ky_max = (rem as f64).sqrt() as i64;
                for ky in -ky_max..=ky_max {
                    let m = kx * kx + ky * ky;
                    if m as u64 <= r2 {
                        counts[m as usize] += 1;
                    }
                }
            }
        }
        3 => {
            for kx in -r..=r {
                for ky in -r..=r {
                    let rem = (r2 as i64) - kx * kx - ky * ky;
                    if rem < 0 {
                        continue;
                    }
                    let kz_max = (rem as f64).sqrt() as i64;
                    for kz in -kz_max..=kz_max {
                        let m = kx * kx + ky * ky + kz * kz;
                        if m as u64 <= r2 {
                            counts[m as usize] += 1;
                        }
                    }
                }
            }
        }
        4 => {
            for kx in -r..=r {
                for ky in -r..=r {
                    let rem2 = (r2 as i64) - kx * kx - ky * ky;
                    if rem2 < 0 {
                        continue;
                    }
                    let kz_lim = (rem2 as f64).sqrt() as i64;
                    for kz in -kz_lim..=kz_lim {
                        let rem3 = rem2 - kz * kz;
                        if rem3 < 0 {
                            continue;
                        }
                        let kw_max = (rem3 as f64).sqrt() as i64;
                        for kw in -kw_max..=kw_max {
                            let m = kx * kx + ky * ky + kz * kz + kw * kw;
                            if m as u64 <= r2 {
                                counts[m as usize] += 1;
                            }
                        }
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(TorusModel { p, kind, r_cut, counts })
}

/// Volume of the unit ball in dimension `p`.
pub fn unit_ball_volume(p: u8) -> f64 {
    match p {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        4 => std::f64::consts::PI * std::f64::consts::PI / 2.0,
        _ => panic!("unsupported dimension"),
    }
}

impl TorusModel {
    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn kind(&self) -> LeafKind {
        self.kind
    }

    pub fn r_cut(&self) -> u32 {
        self.r_cut
    }

    /// Spinor multiplicity per lattice point.
    pub fn multiplicity(&self) -> f64 {
        match self.kind {
            LeafKind::Laplacian => 1.0,
            LeafKind::Dirac => 2f64.powi((self.p / 2) as i32),
        }
    }

    /// Graded (even) models: first-order kind on an even-dimensional leaf.
    pub fn is_even(&self) -> bool {
        self.kind == LeafKind::Dirac && self.p % 2 == 0
    }

    pub fn lattice_counts(&self) -> &[u64] {
        &self.counts
    }

    /// Spectrum of the model generator: `1 + |k|^2` for the Laplacian kind,
    /// `|k|` (zero modes dropped) for the first-order kind.
    pub fn generator_spectrum(&self) -> WeightedSpectrum {
        let mult = self.multiplicity();
        match self.kind {
            LeafKind::Laplacian => {
                let atoms = self
                    .counts
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(m, &c)| (1.0 + m as f64, c as f64 * mult));
                WeightedSpectrum::from_atoms(atoms)
                    .expect("torus atoms are valid")
                    .with_tail(Tail::growth(unit_ball_volume(self.p) * mult, self.p as f64 / 2.0))
                    .expect("lattice counting model is consistent")
                    .with_note(format!("torus T^{} (1+Laplacian), |k| <= {}", self.p, self.r_cut))
            }
            LeafKind::Dirac => {
                let atoms = self
                    .counts
                    .iter()
                    .enumerate()
                    .skip(1)
                    .filter(|(_, &c)| c > 0)
                    .map(|(m, &c)| ((m as f64).sqrt(), c as f64 * mult));
                WeightedSpectrum::from_atoms(atoms)
                    .expect("torus atoms are valid")
                    .with_tail(Tail::growth(unit_ball_volume(self.p) * mult, self.p as f64))
                    .expect("lattice counting model is consistent")
                    .with_note(format!(
                        "torus T^{} |D| (kernel modes dropped), |k| <= {}",
                        self.p, self.r_cut
                    ))
            }
        }
    }

    /// `(D^2 + 1)^{1/2}` for the first-order kind: values `sqrt(1 + |k|^2)`
    /// including the kernel modes.
    pub fn regularized_abs(&self) -> WeightedSpectrum {
        let mult = self.multiplicity();
        let atoms = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(m, &c)| ((1.0 + m as f64).sqrt(), c as f64 * mult));
        WeightedSpectrum::from_atoms(atoms)
            .expect("torus atoms are valid")
            .with_tail(Tail::growth(unit_ball_volume(self.p) * mult, self.p as f64))
            .expect("lattice counting model is consistent")
            .with_note(format!("torus T^{} (D^2+1)^{{1/2}}, |k| <= {}", self.p, self.r_cut))
    }
}

/// A family of identical leaves weighted by a discretized transverse
/// measure: the trace is `sum_j lambda_j * Tr(leaf)`.
#[derive(Debug, Clone)]
pub struct FoliatedFamily {
    leaf: WeightedSpectrum,
    lambda: Vec<f64>,
}

/// Build a foliated family from a leaf spectrum and transverse weights.
pub fn foliated_family(leaf: &WeightedSpectrum, lambda: &[f64]) -> Result<FoliatedFamily> {
    if lambda.is_empty() {
        return Err(Error::precondition("transverse measure needs at least one weight"));
    }
    if lambda.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
        return Err(Error::precondition("transverse weights must be positive and finite"));
    }
    Ok(FoliatedFamily { leaf: leaf.clone(), lambda: lambda.to_vec() })
}

impl FoliatedFamily {
    /// Total transverse mass.
    pub fn mass(&self) -> f64 {
        self.lambda.iter().sum()
    }

    pub fn leaf(&self) -> &WeightedSpectrum {
        &self.leaf
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Spectrum with respect to the transverse trace: every leaf weight is
    /// multiplied by the total mass, so the rescaling law
    /// `mu_{mass * s}(family) = mu_s(leaf)` holds exactly.
    pub fn spectrum(&self) -> WeightedSpectrum {
        let m = self.mass();
        let mut s = WeightedSpectrum::from_atoms(
            self.leaf.atoms().iter().map(|a| (a.value, a.weight * m)),
        )
        .expect("scaled weights stay valid");
        if let Some(tail) = self.leaf.tail() {
            let scaled = match tail {
                Tail::Growth { c, d } => Tail::Growth { c: c * m, d },
                Tail::Decay { c, d } => Tail::Decay { c: c * m, d },
            };
            s = s.with_tail(scaled).expect("mass-scaled tail stays consistent");
        }
        s.with_note(format!("foliated family, transverse mass {m}"))
    }
}

/// The doubling that removes a kernel: on `H ⊕ Ker(D)` the symmetry
/// `F = F1 + V` satisfies `F = F*` and `F^2 = 1` exactly, where `F1` is the
/// sign of `D` (zero on the kernel) and `V` swaps the kernel with its extra
/// copy.
#[derive(Debug, Clone)]
pub struct DoubledModel {
    base_dim: usize,
    kernel_dim: usize,
    f1: DMatrix<f64>,
    v: DMatrix<f64>,
}

/// Build the doubled symmetry from the signed eigenvalues of `D`.
pub fn doubling(d_eigenvalues: &[f64]) -> DoubledModel {
    let n = d_eigenvalues.len();
    let kernel: Vec<usize> = (0..n).filter(|&i| d_eigenvalues[i] == 0.0).collect();
    let k = kernel.len();
    let dim = n + k;
    let mut f1 = DMatrix::zeros(dim, dim);
    for (i, &e) in d_eigenvalues.iter().enumerate() {
        f1[(i, i)] = if e > 0.0 {
            1.0
        } else if e < 0.0 {
            -1.0
        } else {
            0.0
        };
    }
    let mut v = DMatrix::zeros(dim, dim);
    for (extra, &i) in kernel.iter().enumerate() {
        v[(i, n + extra)] = 1.0;
        v[(n + extra, i)] = 1.0;
    }
    DoubledModel { base_dim: n, kernel_dim: k, f1, v }
}

impl DoubledModel {
    pub fn dim(&self) -> usize {
        self.base_dim + self.kernel_dim
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_dim
    }

    pub fn f1(&self) -> &DMatrix<f64> {
        &self.f1
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// `F = F1 + V`.
    pub fn f(&self) -> DMatrix<f64> {
        &self.f1 + &self.v
    }

    /// Embed a diagonal algebra element of the base space as `a ⊕ 0`.
    pub fn embed_diagonal(&self, diag: &[f64]) -> DMatrix<f64> {
        assert_eq!(diag.len(), self.base_dim);
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    /// Projection onto `Ker(D)` inside the base space.
    pub fn kernel_projection(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..self.base_dim {
            if self.f1[(i, i)] == 0.0 {
                m[(i, i)] = 1.0;
            }
        }
        m
    }
}

/// Matrix algebra with rescaled trace `tau = scale * Tr`: the simplest
/// semifinite model with non-integer dimensions, used by the property suite.
#[derive(Debug, Clone, Copy)]
pub struct WeightedMatrixAlgebra {
    pub dim: usize,
    pub scale: f64,
}

impl WeightedMatrixAlgebra {
    pub fn new(dim: usize, scale: f64) -> Result<Self> {
        if dim == 0 || !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::precondition("matrix algebra needs dim >= 1 and scale > 0"));
        }
        Ok(WeightedMatrixAlgebra { dim, scale })
    }

    pub fn trace(&self, m: &DMatrix<f64>) -> f64 {
        self.scale * m.trace()
    }

    /// Singular values of `m`, each carrying trace weight `scale`.
    pub fn singular_spectrum(&self, m: &DMatrix<f64>) -> WeightedSpectrum {
        let svd = m.clone().svd(false, false);
        WeightedSpectrum::from_atoms(svd.singular_values.iter().map(|&s| (s.max(0.0), self.scale)))
            .expect("singular values are nonnegative")
    }

    pub fn mu(&self, m: &DMatrix<f64>, t: f64) -> Result<f64> {
        self.singular_spectrum(m).mu(t)
    }

    pub fn sigma(&self, m: &DMatrix<f64>, t: f64) -> Result<f64> {
        Ok(self.singular_spectrum(m).sigma(t)?.value)
    }

    /// Operator norm (largest singular value).
    pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
        m.clone().svd(false, false).singular_values.iter().cloned().fold(0.0, f64::max)
    }
}

/// JSON model descriptor accepted by the batch front end.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelDescriptor {
    /// "circle-dirac" | "torus-laplacian" | "torus-dirac"
    pub kind: String,
    /// Mode cutoff (circle) or lattice radius (torus).
    pub cutoff: f64,
    /// Torus leaf dimension (default 2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u8>,
    /// Transverse weights; when present the emitted spectrum is the foliated
    /// family over the base model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_weights: Option<Vec<f64>>,
    /// Power applied to the base spectrum (e.g. -1 for the inverse).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
    /// Use the invertible `(D^2+1)^{1/2}` in place of `|D|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularized: Option<bool>,
}

impl ModelDescriptor {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::schema(format!("model descriptor: {e}")))
    }

    /// Base generator spectrum for the descriptor (before power/foliation).
    fn base_spectrum(&self) -> Result<WeightedSpectrum> {
        if !(self.cutoff >= 1.0) || !self.cutoff.is_finite() {
            return Err(Error::schema("/cutoff: must be a finite number >= 1".to_string()));
        }
        let cutoff = self.cutoff as u32;
        match self.kind.as_str() {
            "circle-dirac" => {
                let model = circle_dirac(cutoff)?;
                Ok(if self.regularized.unwrap_or(false) {
                    model.regularized_abs()
                } else {
                    model.abs_positive()
                })
            }
            "torus-laplacian" => {
                let model = torus_model(self.p.unwrap_or(2), LeafKind::Laplacian, cutoff)?;
                Ok(model.generator_spectrum())
            }
            "torus-dirac" => {
                let model = torus_model(self.p.unwrap_or(2), LeafKind::Dirac, cutoff)?;
                Ok(if self.regularized.unwrap_or(false) {
                    model.regularized_abs()
                } else {
                    model.generator_spectrum()
                })
            }
            other => Err(Error::schema(format!(
                "/kind: unknown model '{other}' (expected circle-dirac, torus-laplacian, torus-dirac)"
            ))),
        }
    }

    /// Emit the described weighted spectrum.
    pub fn build(&self) -> Result<WeightedSpectrum> {
        let mut s = self.base_spectrum()?;
        if let Some(power) = self.power {
            s = s.pow(power)?;
        }
        if let Some(weights) = &self.lambda_weights {
            s = foliated_family(&s, weights)?.spectrum();
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limiting::{dixmier_trace_of_spectrum, LimitProcessConfig};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn circle_eigenvalues_and_kernel() {
        let m = circle_dirac(2).unwrap();
        assert_eq!(m.d_eigenvalues(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        // kernel mode gives the top value 1 of (D^2+1)^{-1/2}
        let inv = m.inverse_regularized();
        assert_eq!(inv.mu(0.5).unwrap(), 1.0);
    }

    #[test]
    fn circle_inverse_trace_is_two() {
        let m = circle_dirac(100_000).unwrap();
        let inv = m.inverse_regularized();
        let config = LimitProcessConfig::for_spectrum(&inv).unwrap();
        let est = dixmier_trace_of_spectrum(&inv, &config).unwrap();
        assert!(
            (est.value - 2.0).abs() < 0.02 * 2.0,
            "bounded perturbation of |D|^{{-1}} keeps the trace: {}",
            est.value
        );
    }

    #[test]
    fn torus_dimension_one_matches_circle() {
        let t = torus_model(1, LeafKind::Dirac, 50).unwrap();
        let c = circle_dirac(50).unwrap();
        let ts = t.generator_spectrum();
        let cs = c.abs_positive();
        assert_eq!(ts.len(), cs.len());
        for (a, b) in ts.atoms().iter().zip(cs.atoms()) {
            assert_eq!(a.value, b.value);
            assert_eq!(a.weight, b.weight);
        }
    }

    #[test]
    fn torus_counting_matches_gauss_circle() {
        let t = torus_model(2, LeafKind::Laplacian, 200).unwrap();
        let s = t.generator_spectrum();
        // independent oracle: direct count of 1 + |k|^2 <= lambda
        let lam = 20_000.0;
        let mut direct = 0u64;
        for kx in -200i64..=200 {
            for ky in -200i64..=200 {
                if kx * kx + ky * ky <= 40_000 && (1 + kx * kx + ky * ky) as f64 <= lam {
                    direct += 1;
                }
            }
        }
        assert_eq!(s.counting(lam).unwrap(), direct as f64);
        assert_relative_eq!(
            s.counting(lam).unwrap(),
            std::f64::consts::PI * lam,
            max_relative = 0.01
        );
    }

    #[test]
    fn torus_dirac_multiplicities() {
        let t = torus_model(2, LeafKind::Dirac, 100).unwrap();
        assert_eq!(t.multiplicity(), 2.0);
        assert!(t.is_even());
        let s = t.generator_spectrum();
        // N(lambda) ~ mult * pi * lambda^2
        assert_relative_eq!(
            s.counting(90.0).unwrap(),
            2.0 * std::f64::consts::PI * 8100.0,
            max_relative = 0.02
        );
        let t3 = torus_model(3, LeafKind::Dirac, 30).unwrap();
        assert_eq!(t3.multiplicity(), 2.0);
        assert!(!t3.is_even());
        let t4 = torus_model(4, LeafKind::Dirac, 15).unwrap();
        assert_eq!(t4.multiplicity(), 4.0);
        assert!(torus_model(5, LeafKind::Dirac, 5).is_err());
    }

    #[test]
    fn foliated_rescaling_law_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.gen_range(3..40);
            let leaf = WeightedSpectrum::from_atoms(
                (0..n).map(|_| (rng.gen_range(0.01..10.0), rng.gen_range(0.1..3.0))),
            )
            .unwrap();
            let lambda: Vec<f64> = (0..rng.gen_range(1..5)).map(|_| rng.gen_range(0.1..2.0)).collect();
            let fam = foliated_family(&leaf, &lambda).unwrap();
            let mass = fam.mass();
            let spec = fam.spectrum();
            for _ in 0..10 {
                let s = rng.gen_range(0.01..leaf.total_weight() * 0.99);
                assert_eq!(spec.mu(mass * s).unwrap(), leaf.mu(s).unwrap());
            }
        }
    }

    #[test]
    fn foliated_mass_scales_trace() {
        // tau-trace of 1 ⊗ (1+Laplacian)^{-1} over T^2 is mass * pi
        let t = torus_model(2, LeafKind::Laplacian, 400).unwrap();
        let inv = t.generator_spectrum().pow(-1.0).unwrap();
        for mass_target in [1.0, 0.3 + 0.7, 2.5] {
            let lambda = if mass_target == 2.5 { vec![1.0, 1.5] } else { vec![0.3, mass_target - 0.3] };
            let fam = foliated_family(&inv, &lambda).unwrap();
            let spec = fam.spectrum();
            let config = LimitProcessConfig::for_spectrum(&spec).unwrap();
            let est = dixmier_trace_of_spectrum(&spec, &config).unwrap();
            let expect = fam.mass() * std::f64::consts::PI;
            assert!(
                (est.value - expect).abs() < 0.03 * expect,
                "mass {}: got {} expected {expect}",
                fam.mass(),
                est.value
            );
        }
    }

    #[test]
    fn foliated_family_rejects_bad_weights() {
        let leaf = WeightedSpectrum::from_atoms([(1.0, 1.0)]).unwrap();
        assert!(foliated_family(&leaf, &[]).is_err());
        assert!(foliated_family(&leaf, &[0.5, -1.0]).is_err());
    }

    #[test]
    fn doubling_symmetry_exact() {
        let m = circle_dirac(6).unwrap();
        let doubled = doubling(&m.d_eigenvalues());
        assert_eq!(doubled.kernel_dim(), 1);
        let f = doubled.f();
        // F = F^T and F^2 = 1 bit-exactly on the truncation
        assert_eq!(f, f.transpose());
        let f2 = &f * &f;
        let id = DMatrix::<f64>::identity(doubled.dim(), doubled.dim());
        assert_eq!(f2, id);

        // invertible D: V = 0 and F = sign(D)
        let doubled = doubling(&[-2.0, -1.0, 1.0, 2.0]);
        assert_eq!(doubled.kernel_dim(), 0);
        assert_eq!(doubled.v(), &DMatrix::zeros(4, 4));
    }

    #[test]
    fn doubling_rank_identity() {
        // mu_s(aV) = mu_s(a p_D) for diagonal a
        let m = circle_dirac(5).unwrap();
        let doubled = doubling(&m.d_eigenvalues());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let diag: Vec<f64> = (0..doubled.base_dim()).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let a = doubled.embed_diagonal(&diag);
            let av = &a * doubled.v();
            let apd = &a * doubled.kernel_projection();
            let alg = WeightedMatrixAlgebra::new(doubled.dim(), 1.0).unwrap();
            let s1 = alg.singular_spectrum(&av);
            let s2 = alg.singular_spectrum(&apd);
            for &t in &[0.3, 0.9, 1.7, 3.0] {
                assert_relative_eq!(
                    s1.mu(t).unwrap(),
                    s2.mu(t).unwrap(),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn commutator_norm_bound_on_circle() {
        // [D, a] for a trig polynomial a: |[D,a]| <= sum |m| |a_m|
        // (matrix check on a mode window)
        let window = 40i64;
        let coeffs: Vec<(i64, f64)> = vec![(1, 0.7), (-2, 0.4), (3, 0.1)];
        let dim = (2 * window + 1) as usize;
        let mut com = DMatrix::<f64>::zeros(dim, dim);
        for (row, n_out) in (-window..=window).enumerate() {
            for &(m, c) in &coeffs {
                let n_in = n_out - m;
                if n_in.abs() <= window {
                    let col = (n_in + window) as usize;
                    // [D, a]|n> picks up (n+m - n) a_m = m a_m
                    com[(row, col)] += m as f64 * c;
                }
            }
        }
        let norm = WeightedMatrixAlgebra::operator_norm(&com);
        let bound: f64 = coeffs.iter().map(|&(m, c)| m.abs() as f64 * c.abs()).sum();
        assert!(norm <= bound + 1e-10, "norm {norm} exceeds bound {bound}");
        assert!(norm > 0.5 * bound, "bound should be in the right ballpark");
    }

    #[test]
    fn descriptor_round_trip_and_build() {
        let d = ModelDescriptor {
            kind: "circle-dirac".into(),
            cutoff: 1000.0,
            p: None,
            lambda_weights: None,
            power: Some(-1.0),
            regularized: Some(true),
        };
        let s = d.build().unwrap();
        assert_eq!(s.mu(0.5).unwrap(), 1.0);
        let json = serde_json::to_string(&d).unwrap();
        let back = ModelDescriptor::from_json(&json).unwrap();
        assert_eq!(back.kind, "circle-dirac");

        assert!(ModelDescriptor::from_json("{}").is_err());
        let bad = ModelDescriptor {
            kind: "moebius".into(),
            cutoff: 10.0,
            p: None,
            lambda_weights: None,
            power: None,
            regularized: None,
        };
        assert!(matches!(bad.build(), Err(Error::Schema(_))));
    }

    #[test]
    fn weighted_algebra_trace_scale() {
        let alg = WeightedMatrixAlgebra::new(3, 0.5).unwrap();
        let id = DMatrix::<f64>::identity(3, 3);
        assert_relative_eq!(alg.trace(&id), 1.5, max_relative = 1e-14);
        let spec = alg.singular_spectrum(&id);
        assert_eq!(spec.total_weight(), 1.5);
    }
}

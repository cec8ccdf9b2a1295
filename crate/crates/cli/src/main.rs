//! Batch front end: parse model/spectrum/symbol descriptors, run one
//! computation, emit a reproducible table. One computation per invocation;
//! composition happens through files.
//!
//! Exit codes: 0 ok, 2 schema error, 3 indeterminate/non-converged
//! (unless `--allow-indeterminate`), 4 precondition violation.

use clap::{Args, Parser, Subcommand};
use dixmier::error::Error;
use dixmier::index::odd_pairing;
use dixmier::limiting::{dixmier_trace_of_spectrum, LimitEstimate, LimitProcessConfig, LogGrid};
use dixmier::models::ModelDescriptor;
use dixmier::properties::snumber_suite;
use dixmier::spectrum::{Membership, WeightedSpectrum};
use dixmier::symbols::{cosphere_quadrature, foliated_residue, ClassicalSymbol, SymbolEval};
use dixmier::toeplitz::{toeplitz, CircleSymbol};
use dixmier::zeta::{heat_trace_check, residue_to_dixmier, zeta, ResidueOptions};
use num_complex::Complex64;
use serde_json::json;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "dixmier", version, about = "Semifinite spectral computations on model operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generalized singular value mu_t of a spectrum
    Mu {
        #[command(flatten)]
        input: SpectrumInput,
        /// Evaluation point t > 0
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Running integral sigma_t of the singular values
    Sigma {
        #[command(flatten)]
        input: SpectrumInput,
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Ideal membership flags of a spectrum
    Classify {
        #[command(flatten)]
        input: SpectrumInput,
        /// Weak-ideal exponent to test
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Dixmier trace through the limiting process
    Dixmier {
        #[command(flatten)]
        input: SpectrumInput,
        #[command(flatten)]
        estimator: EstimatorOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Zeta values and the boundary residue report
    Zeta {
        #[command(flatten)]
        input: SpectrumInput,
        /// Evaluate zeta at this real part (omit for the residue report)
        #[arg(long, allow_hyphen_values = true)]
        z_re: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        z_im: f64,
        /// Emit the extrapolation path as CSV instead of JSON
        #[arg(long)]
        sweep: bool,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Heat-trace limit t^p tau(T e^{-t^2 D^2})
    Heat {
        #[command(flatten)]
        input: SpectrumInput,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[command(flatten)]
        estimator: EstimatorOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Foliated residue of an order -p symbol (JSON Fourier table)
    Residue {
        /// Symbol JSON (inline or @file)
        #[arg(long)]
        symbol: String,
        /// Transverse weights
        #[arg(long, value_delimiter = ',', default_value = "1.0")]
        lambda: Vec<f64>,
        /// Chart grid points per dimension
        #[arg(long, default_value_t = 16)]
        chart_grid: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Toeplitz index of a circle symbol, three ways
    Index {
        /// Circle symbol JSON, e.g. '{"coeffs":{"1":1}}' or @file
        #[arg(long)]
        symbol: String,
        /// Mode cutoff of the truncation
        #[arg(long, default_value_t = 512)]
        cutoff: usize,
        /// Trace scale (type-II weighting)
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Odd cocycle pairing of a circle symbol at chosen degrees
    Cocycle {
        #[arg(long)]
        symbol: String,
        /// Cocycle degrees k (pairing has 2k+2 arguments)
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        k: Vec<u32>,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Model utilities
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
    /// Seeded singular-number property suite on random matrix models
    Proptest {
        #[arg(long, default_value_t = 20240817)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
}

#[derive(Subcommand)]
enum ModelAction {
    /// Build a model spectrum and write it as a WeightedSpectrum JSON file
    Emit {
        #[command(flatten)]
        input: SpectrumInput,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Where the spectrum comes from: a serialized file or a named model.
#[derive(Args)]
struct SpectrumInput {
    /// WeightedSpectrum JSON file
    #[arg(long, conflicts_with = "model")]
    spectrum: Option<PathBuf>,
    /// Built-in model kind: circle-dirac | torus-laplacian | torus-dirac
    #[arg(long)]
    model: Option<String>,
    /// Mode cutoff (circle) or lattice radius (torus)
    #[arg(long)]
    cutoff: Option<f64>,
    /// Torus leaf dimension
    #[arg(long)]
    p_leaf: Option<u8>,
    /// Power applied to the base spectrum (defaults depend on the command)
    #[arg(long, allow_hyphen_values = true)]
    power: Option<f64>,
    /// Use the invertible (D^2+1)^{1/2} in place of |D|
    #[arg(long)]
    regularized: bool,
    /// Transverse weights for a foliated family
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<f64>>,
}

impl SpectrumInput {
    fn descriptor(&self, default_power: Option<fn(&str, u8) -> f64>) -> Result<ModelDescriptor, Error> {
        let kind = self
            .model
            .clone()
            .ok_or_else(|| Error::schema("either --spectrum or --model is required".to_string()))?;
        let cutoff = self
            .cutoff
            .ok_or_else(|| Error::schema("--cutoff is required with --model".to_string()))?;
        let p = self.p_leaf.unwrap_or(2);
        let power = self.power.or_else(|| default_power.map(|f| f(kind.as_str(), p)));
        Ok(ModelDescriptor {
            kind,
            cutoff,
            p: self.p_leaf,
            lambda_weights: self.lambda.clone(),
            power,
            regularized: Some(self.regularized),
        })
    }

    /// Load the spectrum; `trace_side` picks the natural decaying operand
    /// (e.g. the inverse) when a model is named without an explicit power.
    fn load(&self, trace_side: bool) -> Result<WeightedSpectrum, Error> {
        if let Some(path) = &self.spectrum {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::schema(format!("cannot read {}: {e}", path.display())))?;
            return WeightedSpectrum::from_json(&text);
        }
        let defaults: Option<fn(&str, u8) -> f64> = if trace_side {
            Some(|kind, p| match kind {
                "torus-dirac" => -(p as f64),
                _ => -1.0,
            })
        } else {
            None
        };
        let mut descriptor = self.descriptor(defaults)?;
        if trace_side && descriptor.kind == "circle-dirac" && self.power.is_none() {
            // the invertible replacement is the faithful default here
            descriptor.regularized = Some(true);
        }
        descriptor.build()
    }
}

#[derive(Args)]
struct EstimatorOpts {
    /// Number of logarithmic Cesàro iterations kept for diagnostics
    #[arg(long, default_value_t = 3)]
    cesaro_iters: usize,
    /// Top decades used by the extrapolation window
    #[arg(long, default_value_t = 2.0)]
    window_decades: f64,
    /// Relative convergence tolerance
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Report non-converged estimates with exit code 0
    #[arg(long)]
    allow_indeterminate: bool,
}

impl EstimatorOpts {
    fn config_for(&self, spectrum: &WeightedSpectrum) -> Result<LimitProcessConfig, Error> {
        let mut config = LimitProcessConfig::for_spectrum(spectrum)?;
        config.cesaro_iterations = self.cesaro_iters;
        config.window_decades = self.window_decades;
        config.tolerance = self.tol;
        Ok(config)
    }
}

#[derive(Args)]
struct OutputOpts {
    /// Output format: json | csv
    #[arg(long, default_value = "json")]
    format: String,
    /// Write to a file (atomically) instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputOpts {
    fn emit(&self, content: &str) -> Result<(), Error> {
        match &self.out {
            None => {
                println!("{content}");
                Ok(())
            }
            Some(path) => atomic_write(path, content),
        }
    }
}

fn atomic_write(path: &Path, content: &str) -> Result<(), Error> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or_else(|| Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into())
    ));
    std::fs::write(&tmp, content)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| Error::Precondition(format!("cannot write {}: {e}", path.display())))
}

fn membership_str(m: Membership) -> &'static str {
    match m {
        Membership::In => "in",
        Membership::Out => "out",
        Membership::Indeterminate => "indeterminate",
    }
}

/// Parse a circle symbol from inline JSON or @file:
/// `{"coeffs": {"1": 1, "-2": [0.5, 0.25]}}`.
fn parse_circle_symbol(text: &str) -> Result<CircleSymbol, Error> {
    let raw = read_inline_or_file(text)?;
    let v: serde_json::Value =
        serde_json::from_str(&raw).map_err(|e| Error::schema(format!("symbol JSON: {e}")))?;
    let coeffs = v
        .get("coeffs")
        .and_then(|c| c.as_object())
        .ok_or_else(|| Error::schema("/coeffs: expected an object of mode -> coefficient".to_string()))?;
    let mut pairs = Vec::new();
    for (key, val) in coeffs {
        let m: i64 = key
            .parse()
            .map_err(|_| Error::schema(format!("/coeffs/{key}: mode must be an integer")))?;
        let c = match val {
            serde_json::Value::Number(x) => Complex64::new(x.as_f64().unwrap_or(f64::NAN), 0.0),
            serde_json::Value::Array(arr) if arr.len() == 2 => Complex64::new(
                arr[0].as_f64().unwrap_or(f64::NAN),
                arr[1].as_f64().unwrap_or(f64::NAN),
            ),
            _ => {
                return Err(Error::schema(format!(
                    "/coeffs/{key}: expected a number or [re, im]"
                )))
            }
        };
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::schema(format!("/coeffs/{key}: non-finite coefficient")));
        }
        pairs.push((m, c));
    }
    if pairs.is_empty() {
        return Err(Error::schema("/coeffs: at least one mode is required".to_string()));
    }
    Ok(CircleSymbol::new(pairs))
}

fn read_inline_or_file(text: &str) -> Result<String, Error> {
    if let Some(path) = text.strip_prefix('@') {
        std::fs::read_to_string(path)
            .map_err(|e| Error::schema(format!("cannot read {path}: {e}")))
    } else {
        Ok(text.to_string())
    }
}

fn estimate_json(est: &LimitEstimate) -> serde_json::Value {
    json!({
        "value": est.value,
        "band": est.error_band,
        "converged": est.converged,
        "window": { "start_t": est.diagnostics.window_start_t,
                    "min": est.diagnostics.window_range.0,
                    "max": est.diagnostics.window_range.1 },
    })
}

/// CSV table of the estimator diagnostics: t, f, Mf, M^2 f, ...
fn estimate_csv(grid: &LogGrid, est: &LimitEstimate) -> String {
    let iterates = &est.diagnostics.iterates;
    let mut header = String::from("t,f");
    for k in 1..iterates.len() {
        header.push_str(&format!(",m{k}"));
    }
    let mut out = header + "\n";
    for (j, &t) in grid.points().iter().enumerate() {
        out.push_str(&format!("{t:.10e}"));
        for it in iterates {
            out.push_str(&format!(",{:.10e}", it[j]));
        }
        out.push('\n');
    }
    out
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Schema(_) => 2,
        Error::Indeterminate(_) | Error::IllConditioned(_) => 3,
        Error::Precondition(_) | Error::NotInIdeal { .. } | Error::TailUncertain { .. } => 4,
    }
}

fn finish_estimate(est: &LimitEstimate, allow_indeterminate: bool) -> Result<(), (i32, String)> {
    if !est.converged && !allow_indeterminate {
        return Err((
            3,
            format!(
                "estimate did not converge (value {:.6e}, band {:.3e}); pass --allow-indeterminate to accept",
                est.value, est.error_band
            ),
        ));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), (i32, String)> {
    let fail = |e: Error| (exit_code(&e), e.to_string());
    match cli.command {
        Command::Mu { input, t, output } => {
            let spectrum = input.load(true).map_err(fail)?;
            let mu = spectrum.mu(t).map_err(fail)?;
            output
                .emit(&serde_json::to_string_pretty(&json!({"t": t, "mu": mu})).unwrap())
                .map_err(fail)
        }
        Command::Sigma { input, t, output } => {
            let spectrum = input.load(true).map_err(fail)?;
            let sigma = spectrum.sigma(t).map_err(fail)?;
            output
                .emit(
                    &serde_json::to_string_pretty(
                        &json!({"t": t, "sigma": sigma.value, "tail_error": sigma.tail_error}),
                    )
                    .unwrap(),
                )
                .map_err(fail)
        }
        Command::Classify { input, p, output } => {
            let spectrum = input.load(true).map_err(fail)?;
            let class = spectrum.classify(p).map_err(fail)?;
            output
                .emit(
                    &serde_json::to_string_pretty(&json!({
                        "tau_compact": membership_str(class.tau_compact),
                        "l1": membership_str(class.l1),
                        "l1_inf": membership_str(class.l1_inf),
                        "lp_inf": membership_str(class.lp_inf),
                        "p": class.p,
                        "decay_exponent": class.decay_exponent,
                    }))
                    .unwrap(),
                )
                .map_err(fail)
        }
        Command::Dixmier { input, estimator, output } => {
            let spectrum = input.load(true).map_err(fail)?;
            let config = estimator.config_for(&spectrum).map_err(fail)?;
            let est = dixmier_trace_of_spectrum(&spectrum, &config).map_err(fail)?;
            let rendered = match output.format.as_str() {
                "csv" => estimate_csv(&config.grid, &est),
                "json" => serde_json::to_string_pretty(&json!({
                    "trace": est.value,
                    "band": est.error_band,
                    "converged": est.converged,
                    "estimate": estimate_json(&est),
                }))
                .unwrap(),
                other => return Err((2, format!("unknown format '{other}'"))),
            };
            output.emit(&rendered).map_err(fail)?;
            finish_estimate(&est, estimator.allow_indeterminate)
        }
        Command::Zeta { input, z_re, z_im, sweep, output } => {
            let spectrum = input.load(false).map_err(fail)?;
            if let Some(x) = z_re {
                let zv = zeta(&spectrum, Complex64::new(x, z_im)).map_err(fail)?;
                return output
                    .emit(
                        &serde_json::to_string_pretty(&json!({
                            "z": [x, z_im],
                            "value": [zv.value.re, zv.value.im],
                            "tail_error": zv.tail_error,
                        }))
                        .unwrap(),
                    )
                    .map_err(fail);
            }
            let profile = residue_to_dixmier(&spectrum, ResidueOptions::default()).map_err(fail)?;
            let rendered = if sweep || output.format == "csv" {
                let mut out = String::from("epsilon,boundary_product\n");
                for (eps, g) in &profile.path {
                    out.push_str(&format!("{eps:.10e},{g:.10e}\n"));
                }
                out
            } else {
                serde_json::to_string_pretty(&json!({
                    "d": profile.d,
                    "residual": profile.d_residual,
                    "A": profile.a,
                    "trace": profile.trace,
                    "bands": { "A": profile.a_error },
                    "boundary": profile.boundary,
                }))
                .unwrap()
            };
            output.emit(&rendered).map_err(fail)
        }
        Command::Heat { input, p, estimator, output } => {
            let spectrum = input.load(false).map_err(fail)?;
            let est = heat_trace_check(&spectrum, None, p).map_err(fail)?;
            let rendered = match output.format.as_str() {
                "csv" => {
                    // the heat sweep is indexed by s = t^{-p}
                    let grid = LogGrid::new(1.0, (spectrum.max_value() / 6.5).powf(p), 24)
                        .map_err(fail)?;
                    estimate_csv(&grid, &est)
                }
                _ => serde_json::to_string_pretty(&json!({
                    "p": p,
                    "limit": est.value,
                    "band": est.error_band,
                    "converged": est.converged,
                }))
                .unwrap(),
            };
            output.emit(&rendered).map_err(fail)?;
            finish_estimate(&est, estimator.allow_indeterminate)
        }
        Command::Residue { symbol, lambda, chart_grid, output } => {
            let raw = read_inline_or_file(&symbol).map_err(fail)?;
            let sym = ClassicalSymbol::from_json(&raw).map_err(fail)?;
            let p = sym.leaf_dim();
            let quad = cosphere_quadrature(p, 16).map_err(fail)?;
            let family: Vec<(f64, &dyn SymbolEval)> =
                lambda.iter().map(|&l| (l, &sym as &dyn SymbolEval)).collect();
            let value = foliated_residue(&family, &quad, chart_grid).map_err(fail)?;
            output
                .emit(
                    &serde_json::to_string_pretty(&json!({
                        "residue": value,
                        "leaf_dim": p,
                        "lambda_mass": lambda.iter().sum::<f64>(),
                        "quadrature_exact_degree": quad.exact_degree(),
                    }))
                    .unwrap(),
                )
                .map_err(fail)
        }
        Command::Index { symbol, cutoff, scale, output } => {
            let sym = parse_circle_symbol(&symbol).map_err(fail)?;
            let winding = sym.winding_number().map_err(fail)?;
            let model = toeplitz(&sym, cutoff)
                .and_then(|m| m.with_scale(scale))
                .map_err(fail)?;
            let kernel = model.tau_index().map_err(fail)?;
            let calderon: Vec<f64> = (1..=2)
                .map(|n| model.calderon_index(n))
                .collect::<Result<_, _>>()
                .map_err(fail)?;
            let pairing: Vec<f64> = (0..=1)
                .map(|k| odd_pairing(&sym, k, scale))
                .collect::<Result<_, _>>()
                .map_err(fail)?;
            output
                .emit(
                    &serde_json::to_string_pretty(&json!({
                        "winding": winding,
                        "index_kernel": kernel,
                        "index_calderon": calderon,
                        "pairing": pairing,
                        "scale": scale,
                        "cutoff": cutoff,
                    }))
                    .unwrap(),
                )
                .map_err(fail)
        }
        Command::Cocycle { symbol, k, scale, output } => {
            let sym = parse_circle_symbol(&symbol).map_err(fail)?;
            let values: Vec<serde_json::Value> = k
                .iter()
                .map(|&k| odd_pairing(&sym, k, scale).map(|v| json!({"k": k, "pairing": v})))
                .collect::<Result<_, _>>()
                .map_err(fail)?;
            output
                .emit(&serde_json::to_string_pretty(&json!({"scale": scale, "values": values})).unwrap())
                .map_err(fail)
        }
        Command::Model { action } => match action {
            ModelAction::Emit { input, out } => {
                let spectrum = input.load(false).map_err(fail)?;
                atomic_write(&out, &spectrum.to_json()).map_err(fail)?;
                eprintln!(
                    "wrote {} atoms (mass {:.6e}) to {}",
                    spectrum.len(),
                    spectrum.total_weight(),
                    out.display()
                );
                Ok(())
            }
        },
        Command::Proptest { seed, count } => {
            let report = snumber_suite(seed, count);
            println!("{}", report.summary());
            if report.pass {
                Ok(())
            } else {
                Err((1, "property suite failed".to_string()))
            }
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err((code, msg)) = run(cli) {
        eprintln!("error: {msg}");
        std::process::exit(code);
    }
}

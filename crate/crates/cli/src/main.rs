use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use orlicz_ext::conditions::{
    check_a0, check_a1, check_a1_omega, check_a2, check_ainc_adec, sample_balls, sample_points, t_grid,
    Monotonicity, Perturbation, MAX_BALL_POINTS,
};
use orlicz_ext::domain::{check_eps_delta, check_quasi_convex, domain_radius, sample_pairs};
use orlicz_ext::extension::{extend_phi_with, extension_constants, verify_extension, ExtensionOptions};
use orlicz_ext::phi::{luxemburg_norm, sobolev_terms, CellField, GrowthFunction, PhiSpec};
use orlicz_ext::pipeline::{estimate_bundle, reproduce_example, run_pipeline, PipelineOptions, SCHEMA_VERSION};
use orlicz_ext::scalar::log_space;
use orlicz_ext::sobolev::{
    boundedness_experiment, default_collar_width, default_corpus, g_reduction, weighted_l1, weighted_norm,
    whitney_decompose, ExtensionSetup, Weight,
};
use orlicz_ext::{Error, GridFunction, Point, RasterDomain};

#[derive(Parser)]
#[command(name = "orlicz", version, about = "Generalized Orlicz growth functions, condition audits and extensions")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed of every random sample.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance of inverses and norms.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate, invert, measure or extend a growth function.
    Phi {
        #[command(subcommand)]
        cmd: PhiCmd,
    },
    /// Structural condition audits.
    Conditions {
        #[command(subcommand)]
        cmd: ConditionsCmd,
    },
    /// Domain geometry.
    Domain {
        #[command(subcommand)]
        cmd: DomainCmd,
    },
    /// Sobolev extension.
    Extend {
        #[command(subcommand)]
        cmd: ExtendCmd,
    },
    /// Reruns of worked examples.
    Reproduce {
        #[command(subcommand)]
        cmd: ReproduceCmd,
    },
    /// Gates, growth-function extension, verification and boundedness run.
    Pipeline {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, default_value_t = 3)]
        refinements: usize,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum PhiCmd {
    /// phi(x, t) for each t.
    Eval {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long, num_args = 2, required = true, value_names = ["X1", "X2"], allow_negative_numbers = true)]
        x: Vec<f64>,
        #[arg(long, num_args = 1.., required = true)]
        t: Vec<f64>,
    },
    /// phi^{-1}(x, tau) for each tau.
    Inverse {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long, num_args = 2, required = true, value_names = ["X1", "X2"], allow_negative_numbers = true)]
        x: Vec<f64>,
        #[arg(long, num_args = 1.., required = true)]
        tau: Vec<f64>,
    },
    /// Luxemburg norm of a field, or its first-order Sobolev norm.
    Norm {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        domain: Option<PathBuf>,
        /// 0 for the Lebesgue norm, 1 to add the first derivatives.
        #[arg(long, default_value_t = 0)]
        order: u32,
    },
    /// Extend the growth function from the domain to the plane.
    Extend {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        domain: Option<PathBuf>,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Cond {
    A0,
    A1,
    A1omega,
    A2,
    Ainc,
    Adec,
}

#[derive(Subcommand)]
enum ConditionsCmd {
    Check {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        domain: Option<PathBuf>,
        #[arg(long, value_enum)]
        condition: Cond,
        /// β of the β-type conditions.
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, default_value_t = 1e4)]
        t_max: f64,
        #[arg(long, default_value_t = 64)]
        t_points: usize,
        /// Exponent p or q of (aInc)/(aDec); defaults to the declared one.
        #[arg(long)]
        exponent: Option<f64>,
        /// Constant L of (aInc)/(aDec).
        #[arg(long, default_value_t = 1.0)]
        l: f64,
        /// s of (A2).
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        /// Constant h of (A2).
        #[arg(long, default_value_t = 0.0)]
        h: f64,
    },
}

#[derive(Subcommand)]
enum DomainCmd {
    Analyze {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, default_value_t = 0.4)]
        eps: f64,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        /// K of quasi-convexity; defaults to 1/eps.
        #[arg(long)]
        k: Option<f64>,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum ExtendCmd {
    Sobolev {
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        /// Same as --out.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        weight: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        refinements: usize,
    },
}

#[derive(Subcommand)]
enum ReproduceCmd {
    /// The two-tower domain with (A1) but not (A1)_Omega.
    Example,
}

struct Outcome {
    report: Value,
    pass: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let mut out = cli.global.out.clone();
    let result = run(cli.command, &cli.global, &mut out).and_then(|o| {
        let text = serde_json::to_string_pretty(&o.report)? + "\n";
        match &out {
            Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
            None => print!("{text}"),
        }
        Ok(o.pass)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn with_schema(v: Value) -> Value {
    match v {
        Value::Object(mut m) => {
            m.insert("schema_version".into(), json!(SCHEMA_VERSION));
            Value::Object(m)
        }
        other => json!({ "schema_version": SCHEMA_VERSION, "result": other }),
    }
}

fn point(x: &[f64]) -> Point<f64> {
    match x {
        [a, b] => Point(*a, *b),
        _ => Point(0.0, 0.0),
    }
}

fn load_spec(path: &Path) -> Result<PhiSpec<f64>> {
    PhiSpec::load(path).with_context(|| format!("loading {}", path.display()))
}

fn load_domain(path: &Path) -> Result<RasterDomain<f64>> {
    RasterDomain::load(path).with_context(|| format!("loading {}", path.display()))
}

/// The explicit domain, else the spec's raster.
fn pick_domain(flag: Option<&PathBuf>, spec: &PhiSpec<f64>) -> Result<Arc<RasterDomain<f64>>> {
    match (flag, &spec.domain) {
        (Some(p), _) => Ok(Arc::new(load_domain(p)?)),
        (None, Some(d)) => Ok(d.clone()),
        (None, None) => bail!("a raster domain is needed: pass --domain or set domain_ref in the spec"),
    }
}

/// Reads `nx ny h` plus values onto the cells of `domain`.
fn load_field(path: &Path, domain: &Arc<RasterDomain<f64>>) -> Result<GridFunction<f64>> {
    let f = CellField::load(path, domain.origin()).with_context(|| format!("loading {}", path.display()))?;
    if f.dims() != (domain.nx(), domain.ny()) || (f.h() - domain.h()).abs() > 1e-12 * domain.h() {
        bail!(
            "{}: grid {:?} with h = {} does not match the domain ({} x {}, h = {})",
            path.display(),
            f.dims(),
            f.h(),
            domain.nx(),
            domain.ny(),
            domain.h()
        );
    }
    Ok(GridFunction::from_values(domain.clone(), f.values().to_vec())?)
}

fn precondition(e: Error) -> Result<Outcome> {
    match e {
        Error::Precondition { condition, report } => Ok(Outcome {
            report: json!({ "schema_version": SCHEMA_VERSION, "pass": false, "failed": condition, "report": report }),
            pass: false,
        }),
        other => Err(other.into()),
    }
}

fn run(cmd: Command, g: &Global, out: &mut Option<PathBuf>) -> Result<Outcome> {
    match cmd {
        Command::Phi { cmd } => phi_cmd(cmd, g),
        Command::Conditions { cmd: ConditionsCmd::Check {
            phi, domain, condition, beta, samples, t_max, t_points, exponent, l, s, h,
        } } => {
            let spec = load_spec(&phi)?;
            let d = pick_domain(domain.as_ref(), &spec)?;
            let phi = &spec.phi;
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            let r = match condition {
                Cond::A0 => check_a0(phi, &sample_points(&d, samples, &mut rng), beta)?,
                Cond::A1 => check_a1(phi, &sample_balls(&d, samples, MAX_BALL_POINTS, &mut rng), t_points, beta)?,
                Cond::A1omega => {
                    let pairs = sample_pairs(&d, d.diameter() + d.h(), samples, &mut rng);
                    check_a1_omega(phi, &pairs, &t_grid(t_max, t_points), beta)?
                }
                Cond::A2 => {
                    let pairs = sample_pairs(&d, d.diameter() + d.h(), samples, &mut rng);
                    check_a2(phi, s, &Perturbation::Const(h), beta, &pairs, t_points)?
                }
                Cond::Ainc | Cond::Adec => {
                    let (mode, declared) = match condition {
                        Cond::Ainc => (Monotonicity::Inc, phi.flags().p_lo),
                        _ => (Monotonicity::Dec, phi.flags().q_hi.or(spec.constants.q)),
                    };
                    let Some(e) = exponent.or(declared) else {
                        bail!("pass --exponent: the spec declares none");
                    };
                    let ts = log_space(1e-4, t_max, t_points);
                    check_ainc_adec(phi, e, mode, l, &sample_points(&d, samples, &mut rng), &ts)?
                }
            };
            let pass = r.verdict;
            let mut v = with_schema(serde_json::to_value(&r)?);
            v["seed"] = json!(g.seed);
            Ok(Outcome { report: v, pass })
        }
        Command::Domain { cmd: DomainCmd::Analyze { domain, eps, delta, k, samples } } => {
            let d = load_domain(&domain)?;
            let k = k.unwrap_or(1.0 / eps);
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            let pairs = sample_pairs(&d, delta, samples, &mut rng);
            let ed = check_eps_delta(&d, eps, delta, &pairs);
            let qc = check_quasi_convex(&d, k, delta, &pairs);
            let pass = ed.verdict && qc.verdict;
            Ok(Outcome {
                report: json!({
                    "schema_version": SCHEMA_VERSION,
                    "seed": g.seed,
                    "nx": d.nx(),
                    "ny": d.ny(),
                    "h": d.h(),
                    "inside_cells": d.inside_count(),
                    "components": d.n_components(),
                    "diameter": d.diameter(),
                    "radius": domain_radius(&d),
                    "eps_delta": ed,
                    "quasi_convex": qc,
                    "pass": pass,
                }),
                pass,
            })
        }
        Command::Extend { cmd: ExtendCmd::Sobolev { u, domain, phi, report, weight, refinements } } => {
            if out.is_none() {
                *out = report;
            }
            extend_sobolev(&u, &domain, &phi, weight.as_deref(), refinements, g)
        }
        Command::Reproduce { cmd: ReproduceCmd::Example } => {
            let r = reproduce_example::<f64>(g.seed)?;
            let pass = r.pass;
            Ok(Outcome { report: serde_json::to_value(&r)?, pass })
        }
        Command::Pipeline { phi, domain, refinements, samples } => {
            let spec = load_spec(&phi)?;
            let d = Arc::new(load_domain(&domain)?);
            let opts = PipelineOptions {
                seed: g.seed,
                refinements,
                samples,
                ..PipelineOptions::default()
            };
            let r = run_pipeline(&spec.phi, &spec.constants, d, &opts)?;
            let pass = r.pass;
            let mut v = serde_json::to_value(&r)?;
            v["spec"] = spec.source;
            Ok(Outcome { report: v, pass })
        }
    }
}

fn phi_cmd(cmd: PhiCmd, g: &Global) -> Result<Outcome> {
    match cmd {
        PhiCmd::Eval { phi, x, t } => {
            let spec = load_spec(&phi)?;
            let x = point(&x);
            let rows = t
                .iter()
                .map(|&t| Ok(json!({ "t": t, "phi": spec.phi.eval(x, t)? })))
                .collect::<Result<Vec<_>>>()?;
            Ok(Outcome { report: json!({ "schema_version": SCHEMA_VERSION, "x": [x.0, x.1], "values": rows }), pass: true })
        }
        PhiCmd::Inverse { phi, x, tau } => {
            let spec = load_spec(&phi)?;
            let x = point(&x);
            let rows = tau
                .iter()
                .map(|&s| Ok(json!({ "tau": s, "inverse": spec.phi.inverse(x, s, g.tol)? })))
                .collect::<Result<Vec<_>>>()?;
            Ok(Outcome { report: json!({ "schema_version": SCHEMA_VERSION, "x": [x.0, x.1], "values": rows }), pass: true })
        }
        PhiCmd::Norm { phi, u, domain, order } => {
            let spec = load_spec(&phi)?;
            let d = pick_domain(domain.as_ref(), &spec)?;
            let u = load_field(&u, &d)?;
            let report = if order == 0 {
                json!({ "schema_version": SCHEMA_VERSION, "order": 0, "norm": luxemburg_norm(&spec.phi, &u, g.tol)? })
            } else {
                let terms = sobolev_terms(&spec.phi, &u, order, g.tol, true)?;
                let total: f64 = terms.iter().map(|(_, v)| v).sum();
                let terms: Vec<Value> = terms.iter().map(|(a, v)| json!({ "alpha": a.to_string(), "norm": v })).collect();
                json!({ "schema_version": SCHEMA_VERSION, "order": order, "norm": total, "terms": terms })
            };
            Ok(Outcome { report, pass: true })
        }
        PhiCmd::Extend { phi, domain, samples } => {
            let spec = load_spec(&phi)?;
            let d = pick_domain(domain.as_ref(), &spec)?;
            let options = ExtensionOptions {
                seed: g.seed,
                samples,
                ..ExtensionOptions::default()
            };
            let estimate = match estimate_bundle(&spec.phi, &d, &spec.constants, &options) {
                Ok(e) => e,
                Err(e) => return precondition(e),
            };
            let bundle = estimate.bundle::<f64>()?;
            let psi = match extend_phi_with(&spec.phi, d, &bundle, options) {
                Ok(p) => p,
                Err(e) => return precondition(e),
            };
            let checks = verify_extension(&psi, samples, g.seed ^ 0x7e57)?;
            let pass = checks.iter().all(|r| r.verdict);
            Ok(Outcome {
                report: json!({
                    "schema_version": SCHEMA_VERSION,
                    "seed": g.seed,
                    "spec": spec.source,
                    "constants": estimate,
                    "extension": psi.summary(),
                    "psi_constants": extension_constants(&psi)?,
                    "gates": psi.gates(),
                    "verification": checks,
                    "pass": pass,
                }),
                pass,
            })
        }
    }
}

fn extend_sobolev(
    u: &Path,
    domain: &Path,
    phi: &Path,
    weight: Option<&Path>,
    refinements: usize,
    g: &Global,
) -> Result<Outcome> {
    let spec = load_spec(phi)?;
    let d = Arc::new(load_domain(domain)?);
    let u = load_field(u, &d)?;
    let options = ExtensionOptions {
        seed: g.seed,
        gates: false,
        ..ExtensionOptions::default()
    };
    let estimate = match estimate_bundle(&spec.phi, &d, &spec.constants, &options) {
        Ok(e) => e,
        Err(e) => return precondition(e),
    };
    let bundle = estimate.bundle::<f64>()?;
    let psi = extend_phi_with(&spec.phi, d.clone(), &bundle, options.clone())?;
    let wd = Arc::new(whitney_decompose(d.clone(), default_collar_width(&d))?);
    let setup = ExtensionSetup::new(wd, &spec.phi, &psi)?;
    let r = setup.extend(&u)?;

    let h0 = d.h();
    let hs: Vec<f64> = (0..refinements.max(1)).map(|i| h0 / (1u64 << i) as f64).collect();
    let make = |h: f64| d.refined((h0 / h).round() as usize);
    let b = boundedness_experiment(&default_corpus(), &make, &spec.phi, &bundle, &hs, &options)?;

    let mut pass = b.pass && r.ratio.is_finite();
    let mut report = json!({
        "schema_version": SCHEMA_VERSION,
        "seed": g.seed,
        "constants": estimate,
        "field": { "ratio": r.ratio, "norm_u": r.norm_u, "norm_extended": r.norm_extended },
        "boundedness": b,
    });
    if let Some(w) = weight {
        let wf = CellField::load(w, d.origin()).with_context(|| format!("loading {}", w.display()))?;
        let w = Weight::new(Arc::new(RasterDomain::full(d.origin(), d.h(), d.nx(), d.ny())?), wf.values().to_vec())?;
        let ud = u.clone().with_derivatives(1);
        let mut rows = Vec::new();
        for k in [0u32, 1] {
            let lhs = weighted_norm(&ud, &w, k)?;
            let rhs = weighted_l1(&g_reduction(&ud, k)?, &w)?;
            let ok = (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300);
            pass &= ok;
            rows.push(json!({ "k": k, "sobolev": lhs, "g_l1": rhs, "match": ok }));
        }
        report["weighted"] = Value::Array(rows);
    }
    report["pass"] = json!(pass);
    Ok(Outcome { report, pass })
}

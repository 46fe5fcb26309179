//! `diracspec`: enclosures, eigenvalues and resonances of 1D Dirac operators.
//!
//! Exit status: 0 on success, 2 for rejected input, 3 when a numerical
//! procedure fails (unresolved winding, non-convergent integral).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod figures;
mod output;
mod parse;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use diracspec::birman_schwinger::{det_root_search, resonance_search, NystromOptions, Rect, SearchOptions};
use diracspec::delta_models::{delta_on_disk_boundary, delta_spectrum, DeltaPotential, DeltaRegime};
use diracspec::enclosures::{
    ceps_excluded, fv_excluded, fv_gap_root, imaginary_potential_excluded, l1_excluded, lp_excluded,
    nonrelativistic_disks, theorem1_disks,
};
use diracspec::potentials::{clip_decompose, diagonal_l1_norms, l1_norm, lp_norm, Potential, PotentialSpec};
use diracspec::resonance_regions::{exclusion_curves, in_d_theta, resonance_disks, ResonanceContext};
use diracspec::{Complex64, SpectralError};
use serde::Serialize;
use serde_json::{json, Value};

use output::Table;

#[derive(Parser, Debug, Serialize)]
#[command(name = "diracspec", version, about = "Spectral enclosures for 1D Dirac operators with non-Hermitian potentials")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Emit the data behind a standard plot instead of running a command.
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(1..=3))]
    figure: Option<u8>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum CriterionArg {
    L1,
    Imag,
    Ceps,
    Fv,
    Lp,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Two-disk enclosure of the discrete spectrum.
    Enclose(EncloseArgs),
    /// Test whether a point is excluded from the spectrum.
    Check(CheckArgs),
    /// Eigenvalues in a rectangle by the argument principle.
    Spectrum(SpectrumArgs),
    /// Closed-form spectrum of a point interaction.
    Delta(DeltaArgs),
    /// Resonances as eigenvalues of the dilated operator.
    Resonances(ResonanceArgs),
    /// Spectrum-free interval in the gap from F_V.
    Fv(FvArgs),
    /// Intersections of the resonance disks with the rotated spectrum.
    Curves(CurvesArgs),
}

#[derive(Args, Debug, Serialize)]
struct EncloseArgs {
    /// ‖V‖₁; computed from --potential when absent.
    #[arg(long)]
    v1: Option<f64>,
    #[arg(long)]
    potential: Option<PathBuf>,
    #[arg(long)]
    mass: f64,
    /// Speed of light; shifts the enclosure by −mc².
    #[arg(long)]
    c: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct CheckArgs {
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    #[arg(long)]
    mass: f64,
    #[arg(long, value_enum)]
    criterion: CriterionArg,
    /// ‖V‖₁ for l1, ‖V‖_p for lp; otherwise taken from --potential.
    #[arg(long)]
    v1: Option<f64>,
    #[arg(long)]
    potential: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct NumericArgs {
    #[arg(long, default_value_t = 200)]
    nodes: usize,
    #[arg(long)]
    truncation: Option<f64>,
    /// Largest |det(I + Q_N)| accepted at a root.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args, Debug, Serialize)]
struct SpectrumArgs {
    #[arg(long)]
    potential: PathBuf,
    #[arg(long)]
    mass: f64,
    #[arg(long, allow_hyphen_values = true)]
    region: String,
    #[command(flatten)]
    #[serde(flatten)]
    numeric: NumericArgs,
}

#[derive(Args, Debug, Serialize)]
struct DeltaArgs {
    #[arg(long)]
    kappa: f64,
    #[arg(long, allow_hyphen_values = true)]
    tau: f64,
    #[arg(long)]
    mass: f64,
}

#[derive(Args, Debug, Serialize)]
struct ResonanceArgs {
    #[arg(long)]
    potential: PathBuf,
    #[arg(long)]
    mass: f64,
    #[arg(long)]
    phi: f64,
    #[arg(long, allow_hyphen_values = true)]
    region: String,
    #[command(flatten)]
    #[serde(flatten)]
    numeric: NumericArgs,
}

#[derive(Args, Debug, Serialize)]
struct FvArgs {
    #[arg(long)]
    potential: PathBuf,
    #[arg(long)]
    mass: f64,
    /// Also test this point with the F_V criterion.
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct CurvesArgs {
    #[arg(long)]
    potential: PathBuf,
    #[arg(long)]
    mass: f64,
    /// Largest angle of the sweep, which starts at 0.
    #[arg(long)]
    phi: f64,
    #[arg(long, default_value_t = 61)]
    samples: usize,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<SpectralError> for Failure {
    fn from(e: SpectralError) -> Self {
        Failure { code: if e.is_numerical() { 3 } else { 2 }, message: e.to_string() }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type Outcome = Result<(Value, Option<Table>), Failure>;

fn load(path: &Path) -> Result<(PotentialSpec, Potential), Failure> {
    Ok(PotentialSpec::load(path)?)
}

fn z_arg(s: &str) -> Result<Complex64, Failure> {
    parse::complex(s).map_err(invalid)
}

fn region_arg(s: &str) -> Result<Rect, Failure> {
    parse::region(s).map_err(invalid)
}

fn search_options(n: &NumericArgs) -> Result<SearchOptions, Failure> {
    if !(n.tol > 0.0) {
        return Err(invalid(format!("--tol must be positive, got {}", n.tol)));
    }
    if let Some(l) = n.truncation {
        if !(l > 0.0) {
            return Err(invalid(format!("--truncation must be positive, got {l}")));
        }
    }
    Ok(SearchOptions {
        nystrom: NystromOptions { nodes: n.nodes, truncation: n.truncation, ..Default::default() },
        det_tol: n.tol,
        ..Default::default()
    })
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn disk_table(e: &diracspec::enclosures::EnclosureResult) -> Table {
    let mut t = Table::new(&["center_re", "center_im", "radius"]);
    for d in &e.disks.disks {
        t.push(vec![d.center.re.to_string(), d.center.im.to_string(), d.radius.to_string()]);
    }
    t
}

fn root_table(roots: impl Iterator<Item = (Complex64, f64)>) -> Table {
    let mut t = Table::new(&["re_z", "im_z", "residual"]);
    for (z, r) in roots {
        t.push(vec![z.re.to_string(), z.im.to_string(), r.to_string()]);
    }
    t
}

fn enclose(a: &EncloseArgs) -> Outcome {
    let (v1, spec) = match (a.v1, &a.potential) {
        (Some(v), None) => (v, None),
        (None, Some(p)) => {
            let (spec, v) = load(p)?;
            (l1_norm(&v)?, Some(spec))
        }
        _ => return Err(invalid("enclose needs exactly one of --v1 and --potential")),
    };
    let e = match a.c {
        Some(c) => nonrelativistic_disks(v1, a.mass, c)?,
        None => theorem1_disks(v1, a.mass)?,
    };
    let mut value = serde_json::to_value(&e).expect("serializable");
    value["potential"] = json!(spec);
    let table = disk_table(&e);
    Ok((value, Some(table)))
}

fn check(a: &CheckArgs) -> Outcome {
    let z = z_arg(&a.z)?;
    let m = a.mass;
    let potential = a.potential.as_deref().map(load).transpose()?;
    let need_potential = || {
        potential
            .as_ref()
            .map(|(_, v)| v)
            .ok_or_else(|| invalid(format!("criterion {:?} needs --potential", a.criterion)))
    };
    let verdict = match a.criterion {
        CriterionArg::L1 => {
            let v1 = match a.v1 {
                Some(v) => v,
                None => l1_norm(need_potential()?)?,
            };
            l1_excluded(z, v1, m)?
        }
        CriterionArg::Imag => {
            let (d1, d2) = diagonal_l1_norms(need_potential()?)?;
            imaginary_potential_excluded(z, d1, d2, m)?
        }
        CriterionArg::Ceps => {
            let eps = a.epsilon.ok_or_else(|| invalid("criterion ceps needs --epsilon"))?;
            ceps_excluded(z, &clip_decompose(need_potential()?, eps)?, m)?
        }
        CriterionArg::Fv => fv_excluded(z, need_potential()?, m)?,
        CriterionArg::Lp => {
            let p = a.p.ok_or_else(|| invalid("criterion lp needs --p"))?;
            let vp = match a.v1 {
                Some(v) => v,
                None => lp_norm(need_potential()?, p)?,
            };
            lp_excluded(z, vp, p, m)?
        }
    };
    let mut t = Table::new(&["re_z", "im_z", "excluded", "criterion", "margin"]);
    let crit = serde_json::to_value(verdict.criterion).expect("serializable");
    t.push(vec![
        z.re.to_string(),
        z.im.to_string(),
        verdict.excluded.to_string(),
        crit.as_str().unwrap_or_default().to_string(),
        verdict.margin.to_string(),
    ]);
    Ok((serde_json::to_value(verdict).expect("serializable"), Some(t)))
}

fn spectrum(a: &SpectrumArgs) -> Outcome {
    let (spec, v) = load(&a.potential)?;
    let report = det_root_search(&v, a.mass, region_arg(&a.region)?, &search_options(&a.numeric)?)?;
    let table = root_table(report.eigenvalues.iter().map(|r| (r.z, r.residual)));
    let mut value = serde_json::to_value(&report).expect("serializable");
    value["potential"] = json!(spec);
    Ok((value, Some(table)))
}

fn delta(a: &DeltaArgs) -> Outcome {
    let p = DeltaPotential::new(a.kappa, a.tau, a.mass)?;
    let s = delta_spectrum(&p);
    let mut pairs: Vec<(Complex64, Complex64)> = s.eigenvalues.iter().copied().zip(s.zetas.iter().copied()).collect();
    pairs.sort_by(|x, y| x.0.re.total_cmp(&y.0.re).then(x.0.im.total_cmp(&y.0.im)));
    let residuals: Vec<f64> = pairs
        .iter()
        .map(|(z, _)| p.determinant(*z).map(|d| d.norm()))
        .collect::<Result<_, _>>()?;
    let boundary = if s.regime == DeltaRegime::Subcritical && a.tau > 0.0 && a.tau < std::f64::consts::PI && a.mass > 0.0 {
        Some(delta_on_disk_boundary(&p)?)
    } else {
        None
    };
    let value = json!({
        "eigenvalues": pairs.iter().map(|(z, _)| pair(*z)).collect::<Vec<_>>(),
        "zetas": pairs.iter().map(|(_, w)| pair(*w)).collect::<Vec<_>>(),
        "residuals": residuals,
        "regime": s.regime,
        "double_root": s.double_root,
        "disk_boundary_residual": boundary,
    });
    let table = root_table(pairs.iter().map(|(z, _)| *z).zip(residuals.iter().copied()));
    Ok((value, Some(table)))
}

fn resonances(a: &ResonanceArgs) -> Outcome {
    let (spec, v) = load(&a.potential)?;
    let report = resonance_search(&v, a.mass, a.phi, region_arg(&a.region)?, &search_options(&a.numeric)?)?;
    // The disks only apply to Hermitian potentials with v_θ < 1.
    let disks = ResonanceContext::new(v.clone(), a.mass, a.phi)
        .and_then(|ctx| resonance_disks(&ctx))
        .ok();
    let roots: Vec<Value> = report
        .eigenvalues
        .iter()
        .map(|r| {
            json!({
                "z": pair(r.z),
                "residual": r.residual,
                "in_d_theta": in_d_theta(r.z, a.phi, a.mass),
                "in_disks": disks.as_ref().map(|d| d.contains(r.z)),
            })
        })
        .collect();
    let table = root_table(report.eigenvalues.iter().map(|r| (r.z, r.residual)));
    let mut value = serde_json::to_value(&report).expect("serializable");
    value["potential"] = json!(spec);
    value["resonance_disks"] = json!(disks);
    value["classification"] = Value::Array(roots);
    Ok((value, Some(table)))
}

fn fv(a: &FvArgs) -> Outcome {
    let (spec, v) = load(&a.potential)?;
    let mu0 = fv_gap_root(&v, a.mass)?;
    let interval = mu0.map(|mu| {
        let half = (a.mass * a.mass - mu * mu).sqrt();
        [-half, half]
    });
    let verdict = a.z.as_deref().map(|z| z_arg(z).and_then(|z| Ok(fv_excluded(z, &v, a.mass)?))).transpose()?;
    let mut t = Table::new(&["mu0", "lower", "upper"]);
    if let (Some(mu), Some(iv)) = (mu0, interval) {
        t.push(vec![mu.to_string(), iv[0].to_string(), iv[1].to_string()]);
    }
    Ok((json!({ "potential": spec, "mu0": mu0, "interval": interval, "check": verdict }), Some(t)))
}

fn curves(a: &CurvesArgs) -> Outcome {
    let (spec, v) = load(&a.potential)?;
    if a.samples < 2 {
        return Err(invalid("--samples must be at least 2"));
    }
    let phis: Vec<f64> = (0..a.samples).map(|j| a.phi * j as f64 / (a.samples - 1) as f64).collect();
    let c = exclusion_curves(&v, a.mass, &phis)?;
    let table = Table::from_curves(&c);
    let mut value = serde_json::to_value(&c).expect("serializable");
    value["potential"] = json!(spec);
    Ok((value, Some(table)))
}

fn run(cli: &Cli) -> Result<Vec<u8>, Failure> {
    let (name, (result, table)) = match (&cli.command, cli.figure) {
        (None, Some(n)) => {
            let (v, t) = figures::figure(n)?;
            ("figure", (v, Some(t)))
        }
        (None, None) => return Err(invalid("no command given; see --help")),
        (Some(_), Some(_)) => return Err(invalid("--figure cannot be combined with a command")),
        (Some(cmd), None) => match cmd {
            Command::Enclose(a) => ("enclose", enclose(a)?),
            Command::Check(a) => ("check", check(a)?),
            Command::Spectrum(a) => ("spectrum", spectrum(a)?),
            Command::Delta(a) => ("delta", delta(a)?),
            Command::Resonances(a) => ("resonances", resonances(a)?),
            Command::Fv(a) => ("fv", fv(a)?),
            Command::Curves(a) => ("curves", curves(a)?),
        },
    };
    match cli.format {
        Format::Csv => table.ok_or_else(|| invalid(format!("{name} has no CSV output")))?.to_bytes().map_err(invalid),
        Format::Json => {
            let mut report = json!({
                "tool": "diracspec",
                "version": env!("CARGO_PKG_VERSION"),
                "command": name,
                "config": cli,
            });
            if let (Value::Object(r), Value::Object(extra)) = (&mut report, result) {
                r.extend(extra);
            }
            let mut bytes = serde_json::to_vec_pretty(&report).expect("serializable");
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|b| output::emit(&b, cli.out.as_deref()).map_err(|e| invalid(e.to_string()))) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

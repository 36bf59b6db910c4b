//! Command-line front end: option parsing with an optional JSON config file,
//! validation, dispatch and CSV/JSON emission.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifolds::{ManifoldSpec, SpectralBasis};
use crate::meanfield2d::{meanfield_bound, meanfield_crossing, profile_integrals, residual_from_integrals, MeanFieldProblem, Profile};
use crate::onedim::comparison_table;
use crate::output::{json_document, Cell, CsvWriter};
use crate::principal::{divergence_demo, flow_curves, hyperbolic_estar, nbody_upper_bound, solve_mode, torus_modes, HyperbolicShift, Mode, SearchWindow};
use crate::renorm::{beta, flow, flow_ode, RenormScheme};

#[derive(Debug, Parser)]
#[command(name = "heatbind", version, about = "Heat-kernel renormalized contact interactions on 2D manifolds")]
pub struct Cli {
    /// JSON file with default option values; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Heat kernel K_t(d) on a distance grid, or the truncated spectrum.
    Heat(Options),
    /// Two-body ground-state energy (JSON).
    Twobody(Options),
    /// Principal eigenvalue curves ω_q(E) (CSV).
    Flow(Options),
    /// Running coupling λ_R(γM) (JSON).
    Rg(Options),
    /// Mean-field bound sweep over n, or the residual of a supplied profile.
    Meanfield2d(Options),
    /// Exact / Hartree / mean-field comparison for the 1D gas (CSV).
    Onedim(Options),
    /// n-body upper bound from the two-body energy (CSV).
    NbodyBound(Options),
    /// Hyperbolic bound-state estimate E_* (JSON).
    Hyperbolic(Options),
    /// Logarithmic cutoff dependence of the regularized diagonal term (JSON).
    Divergence(Options),
}

impl Command {
    pub fn options(&self) -> &Options {
        match self {
            Command::Heat(o)
            | Command::Twobody(o)
            | Command::Flow(o)
            | Command::Rg(o)
            | Command::Meanfield2d(o)
            | Command::Onedim(o)
            | Command::NbodyBound(o)
            | Command::Hyperbolic(o)
            | Command::Divergence(o) => o,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Heat(_) => "heat",
            Command::Twobody(_) => "twobody",
            Command::Flow(_) => "flow",
            Command::Rg(_) => "rg",
            Command::Meanfield2d(_) => "meanfield2d",
            Command::Onedim(_) => "onedim",
            Command::NbodyBound(_) => "nbody-bound",
            Command::Hyperbolic(_) => "hyperbolic",
            Command::Divergence(_) => "divergence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ManifoldKind {
    Plane,
    Torus,
    Sphere,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftKind {
    Curvature,
    Printed,
}

/// Every option any command understands. The same names (with `-`) are the
/// keys of the JSON config file.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    #[arg(long)]
    pub manifold: Option<ManifoldKind>,
    /// Torus side length.
    #[arg(long)]
    pub length: Option<f64>,
    /// Sphere or hyperbolic-plane radius.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Two-body binding scale μ².
    #[arg(long)]
    pub mu2: Option<f64>,
    /// Renormalized coupling λ_R at scale --m.
    #[arg(long)]
    pub lambda_r: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub emin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub emax: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Number of torus modes for flow curves.
    #[arg(long)]
    pub modes: Option<usize>,
    /// 1D coupling, or λ_R for `rg`.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Particle numbers, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<u32>>,
    /// Cutoffs ε, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Energy for `divergence` and profile residuals.
    #[arg(long, allow_hyphen_values = true)]
    pub e: Option<f64>,
    /// Heat-kernel time.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub dmax: Option<f64>,
    /// Dump the spectrum up to this eigenvalue instead of kernel values.
    #[arg(long)]
    pub spectrum_cutoff: Option<f64>,
    #[arg(long)]
    pub shift: Option<ShiftKind>,
    /// Aubin constant A (defaults to 0 on the plane and hyperbolic plane).
    #[arg(long)]
    pub aubin: Option<f64>,
    /// Two-column CSV (r, u0) radial profile for the mean-field residual.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Root search window: |E| within μ²/window .. μ²·window.
    #[arg(long)]
    pub window: Option<f64>,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl Options {
    /// Values from `over` replace those in `self` where present.
    fn overlay(&self, over: &Options) -> Result<Options> {
        let mut base = serde_json::to_value(self)?;
        if let (Some(b), serde_json::Value::Object(o)) = (base.as_object_mut(), serde_json::to_value(over)?) {
            for (k, v) in o {
                if !v.is_null() {
                    b.insert(k, v);
                }
            }
        }
        Ok(serde_json::from_value(base)?)
    }
}

/// A validated run: the command, merged options and the typed geometry and
/// scheme where the command uses them.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub options: Options,
    pub manifold: Option<ManifoldSpec>,
    pub scheme: Option<RenormScheme>,
}

/// Parses argv (including the program name) and an optional config file.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Config(vec![e.to_string().trim().to_string()]))?;
    let file_opts = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str::<Options>(&text).map_err(|e| Error::Config(vec![format!("{}: {e}", path.display())]))?
        }
        None => Options::default(),
    };
    let merged = file_opts.overlay(cli.command.options())?;
    let command = with_options(&cli.command, merged.clone());
    validate(command, merged)
}

fn with_options(c: &Command, o: Options) -> Command {
    match c {
        Command::Heat(_) => Command::Heat(o),
        Command::Twobody(_) => Command::Twobody(o),
        Command::Flow(_) => Command::Flow(o),
        Command::Rg(_) => Command::Rg(o),
        Command::Meanfield2d(_) => Command::Meanfield2d(o),
        Command::Onedim(_) => Command::Onedim(o),
        Command::NbodyBound(_) => Command::NbodyBound(o),
        Command::Hyperbolic(_) => Command::Hyperbolic(o),
        Command::Divergence(_) => Command::Divergence(o),
    }
}

fn positive(errs: &mut Vec<String>, name: &str, v: Option<f64>) {
    if let Some(x) = v {
        if !(x > 0.0 && x.is_finite()) {
            errs.push(format!("--{name} must be positive, got {x}"));
        }
    }
}

fn resolve_manifold(o: &Options, errs: &mut Vec<String>, required: bool) -> Option<ManifoldSpec> {
    let kind = match o.manifold {
        Some(k) => k,
        None => {
            if required {
                errs.push("missing --manifold (plane, torus, sphere or hyperbolic)".into());
            }
            return None;
        }
    };
    let need = |errs: &mut Vec<String>, name: &str, v: Option<f64>| {
        if v.is_none() {
            errs.push(format!("--manifold {kind:?} needs --{name}").to_lowercase());
        }
        v
    };
    let stray = |errs: &mut Vec<String>, name: &str, v: Option<f64>| {
        if v.is_some() {
            errs.push(format!("--{name} does not apply to --manifold {}", format!("{kind:?}").to_lowercase()));
        }
    };
    match kind {
        ManifoldKind::Plane => {
            stray(errs, "length", o.length);
            stray(errs, "radius", o.radius);
            Some(ManifoldSpec::Plane)
        }
        ManifoldKind::Torus => {
            stray(errs, "radius", o.radius);
            need(errs, "length", o.length).map(|length| ManifoldSpec::Torus { length })
        }
        ManifoldKind::Sphere => {
            stray(errs, "length", o.length);
            need(errs, "radius", o.radius).map(|radius| ManifoldSpec::Sphere { radius })
        }
        ManifoldKind::Hyperbolic => {
            stray(errs, "length", o.length);
            need(errs, "radius", o.radius).map(|radius| ManifoldSpec::Hyperbolic { radius })
        }
    }
}

fn resolve_scheme(o: &Options, errs: &mut Vec<String>) -> Option<RenormScheme> {
    match (o.mu2, o.lambda_r, o.m) {
        (Some(_), Some(_), _) => {
            errs.push("conflicting schemes: give either --mu2 or --lambda-r with --m, not both".into());
            None
        }
        (Some(mu2), None, None) => Some(RenormScheme::BoundState { mu2 }),
        (Some(_), None, Some(_)) => {
            errs.push("--m only applies together with --lambda-r".into());
            None
        }
        (None, Some(lambda_r), Some(m)) => Some(RenormScheme::Coupling { m, lambda_r }),
        (None, Some(_), None) => {
            errs.push("--lambda-r needs the scale --m".into());
            None
        }
        (None, None, _) => {
            errs.push("missing renormalization scheme: give --mu2, or --lambda-r with --m".into());
            None
        }
    }
}

fn validate(command: Command, o: Options) -> Result<RunConfig> {
    let mut errs = Vec::new();
    for (name, v) in [
        ("length", o.length),
        ("radius", o.radius),
        ("mu2", o.mu2),
        ("lambda-r", o.lambda_r),
        ("m", o.m),
        ("lambda", o.lambda),
        ("gamma", o.gamma),
        ("t", o.t),
        ("spectrum-cutoff", o.spectrum_cutoff),
    ] {
        positive(&mut errs, name, v);
    }
    if let Some(d) = o.dmax {
        if !(d >= 0.0 && d.is_finite()) {
            errs.push(format!("--dmax must be >= 0, got {d}"));
        }
    }
    if let Some(w) = o.window {
        if !(w > 1.0 && w.is_finite()) {
            errs.push(format!("--window must exceed 1, got {w}"));
        }
    }
    if let Some(a) = o.aubin {
        if !(a >= 0.0 && a.is_finite()) {
            errs.push(format!("--aubin must be >= 0, got {a}"));
        }
    }
    if let Some(ns) = &o.n {
        if ns.is_empty() {
            errs.push("--n must list at least one value".into());
        }
        if !ns.windows(2).all(|w| w[0] < w[1]) {
            errs.push("--n values must be strictly increasing".into());
        }
    }
    if let Some(eps) = &o.eps {
        if eps.len() < 2 {
            errs.push("--eps needs at least two cutoffs".into());
        }
        if eps.iter().any(|&x| !(x > 0.0)) {
            errs.push("--eps values must be positive".into());
        }
        if !eps.windows(2).all(|w| w[0] > w[1]) {
            errs.push("--eps values must be strictly decreasing".into());
        }
    }
    let min_n = |errs: &mut Vec<String>, k: u32| {
        if let Some(ns) = &o.n {
            if ns.iter().any(|&n| n < k) {
                errs.push(format!("--n values must be at least {k}"));
            }
        }
    };

    let mut manifold = None;
    let mut scheme = None;
    match &command {
        Command::Heat(_) => {
            manifold = resolve_manifold(&o, &mut errs, true);
            if matches!(o.points, Some(0)) {
                errs.push("--points must be at least 1".into());
            }
            if o.spectrum_cutoff.is_some() && matches!(o.manifold, Some(ManifoldKind::Plane | ManifoldKind::Hyperbolic)) {
                errs.push("--spectrum-cutoff needs a compact manifold (torus or sphere)".into());
            }
        }
        Command::Twobody(_) => {
            manifold = resolve_manifold(&o, &mut errs, true);
            scheme = resolve_scheme(&o, &mut errs);
        }
        Command::Flow(_) => {
            manifold = resolve_manifold(&o, &mut errs, true);
            scheme = resolve_scheme(&o, &mut errs);
            let (lo, hi) = (o.emin.unwrap_or(-10.0), o.emax.unwrap_or(-0.1));
            if !(lo < hi && hi < 0.0) {
                errs.push(format!("need --emin < --emax < 0, got {lo}, {hi}"));
            }
            if o.points.unwrap_or(200) < 2 {
                errs.push("--points must be at least 2".into());
            }
            let modes = o.modes.unwrap_or(1);
            if modes == 0 {
                errs.push("--modes must be at least 1".into());
            }
            if modes > 1 && !matches!(o.manifold, Some(ManifoldKind::Torus)) {
                errs.push("excited modes (--modes > 1) exist only on the torus".into());
            }
        }
        Command::Rg(_) => {
            let lambda = o.lambda.or(o.lambda_r);
            if o.lambda.is_some() && o.lambda_r.is_some() {
                errs.push("give the coupling once, as --lambda or --lambda-r".into());
            }
            if lambda.is_none() {
                errs.push("missing --lambda (the coupling lambda_R)".into());
            }
            if o.gamma.is_none() {
                errs.push("missing --gamma (scale factor)".into());
            }
        }
        Command::Meanfield2d(_) => {
            manifold = resolve_manifold(&o, &mut errs, false).or(Some(ManifoldSpec::Plane));
            if o.mu2.is_none() {
                errs.push("missing --mu2".into());
            }
            scheme = o.mu2.map(|mu2| RenormScheme::BoundState { mu2 });
            if o.profile.is_some() {
                if !matches!(manifold, Some(ManifoldSpec::Plane)) {
                    errs.push("--profile takes a radial profile on the plane".into());
                }
                if o.n.as_ref().is_none_or(|n| n.len() != 1) {
                    errs.push("--profile needs exactly one --n".into());
                }
                if let Some(e) = o.e {
                    if !(e < 0.0) {
                        errs.push(format!("--e must be negative, got {e}"));
                    }
                }
            }
            min_n(&mut errs, 3);
        }
        Command::Onedim(_) => {
            min_n(&mut errs, 2);
        }
        Command::NbodyBound(_) => {
            manifold = resolve_manifold(&o, &mut errs, true);
            if matches!(o.manifold, Some(ManifoldKind::Plane | ManifoldKind::Hyperbolic)) {
                errs.push("nbody-bound needs a compact manifold (torus or sphere)".into());
            }
            scheme = resolve_scheme(&o, &mut errs);
            min_n(&mut errs, 2);
        }
        Command::Hyperbolic(_) => {
            if o.manifold.is_some_and(|k| k != ManifoldKind::Hyperbolic) {
                errs.push("the hyperbolic command only takes --manifold hyperbolic".into());
            }
            if o.radius.is_none() {
                errs.push("missing --radius".into());
            }
            if o.mu2.is_none() {
                errs.push("missing --mu2".into());
            }
            manifold = o.radius.map(|radius| ManifoldSpec::Hyperbolic { radius });
            scheme = o.mu2.map(|mu2| RenormScheme::BoundState { mu2 });
        }
        Command::Divergence(_) => {
            manifold = resolve_manifold(&o, &mut errs, true);
            if matches!(o.manifold, Some(ManifoldKind::Plane | ManifoldKind::Hyperbolic)) {
                errs.push("divergence needs a compact manifold (torus or sphere)".into());
            }
            if let Some(e) = o.e {
                if !(e < 0.0) {
                    errs.push(format!("--e must be negative, got {e}"));
                }
            }
        }
    }
    if errs.is_empty() {
        Ok(RunConfig { command, options: o, manifold, scheme })
    } else {
        Err(Error::Config(errs))
    }
}

fn default_eps() -> Vec<f64> {
    (0..9).map(|k| 10f64.powf(-3.0 - 0.5 * k as f64)).collect()
}

/// Reads a two-column (r, value) CSV with an optional header into a radial
/// profile; the r column must start at 0 and be uniformly spaced.
pub fn read_radial_profile(text: &str) -> Result<Profile> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = (cols.len() == 2).then(|| (cols[0].parse::<f64>(), cols[1].parse::<f64>()));
        match parsed {
            Some((Ok(r), Ok(v))) => rows.push((r, v)),
            _ if i == 0 => continue,
            _ => return Err(Error::Profile(format!("line {}: expected two numeric columns", i + 1))),
        }
    }
    if rows.len() < 3 {
        return Err(Error::Profile("profile needs at least three samples".into()));
    }
    let dr = rows[1].0 - rows[0].0;
    if rows[0].0 != 0.0 || !(dr > 0.0) {
        return Err(Error::Profile("radial samples must start at r = 0 and increase".into()));
    }
    for (i, &(r, _)) in rows.iter().enumerate() {
        if (r - i as f64 * dr).abs() > 1e-9 * dr.max(r) {
            return Err(Error::Profile(format!("radial grid is not uniform at sample {i} (r = {r})")));
        }
    }
    Ok(Profile::Radial { dr, values: rows.into_iter().map(|p| p.1).collect() })
}

#[derive(Serialize)]
struct RgResult {
    lambda_r: f64,
    gamma: f64,
    flowed: f64,
    flowed_ode: f64,
    beta: f64,
}

#[derive(Serialize)]
struct ProfileReport {
    n: u32,
    mu2: f64,
    crossing_energy: f64,
    integrals: crate::meanfield2d::ProfileIntegrals,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<crate::meanfield2d::MeanFieldResidual>,
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<Cell>>) -> Result<String> {
    let mut w = CsvWriter::new(Vec::new(), header)?;
    for r in rows {
        w.row(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()).expect("CSV output is ASCII"))
}

/// Runs a validated configuration and returns the document to emit.
pub fn run(cfg: &RunConfig) -> Result<String> {
    let o = &cfg.options;
    let need_m = || cfg.manifold.ok_or_else(|| Error::Config(vec!["missing manifold".into()]));
    let need_s = || cfg.scheme.ok_or_else(|| Error::Config(vec!["missing scheme".into()]));
    match &cfg.command {
        Command::Heat(_) => {
            let m = need_m()?;
            if let Some(cut) = o.spectrum_cutoff {
                let basis = SpectralBasis::build(&m, cut, o.t.unwrap_or(1.0))?;
                let mut buf = Vec::new();
                basis.write_csv(&mut buf)?;
                return Ok(String::from_utf8(buf).expect("CSV output is ASCII"));
            }
            let t = o.t.unwrap_or(1.0);
            let dmax = o.dmax.unwrap_or(1.0);
            let points = o.points.unwrap_or(50);
            let rows = (0..points)
                .map(|i| {
                    let d = if points == 1 { 0.0 } else { dmax * i as f64 / (points - 1) as f64 };
                    let k = m.heat_kernel(t, d)?;
                    Ok(vec![Cell::F(t), Cell::F(d), Cell::F(k.value)])
                })
                .collect::<Result<Vec<_>>>()?;
            csv(&["t", "d", "kernel"], rows)
        }
        Command::Twobody(_) => {
            let window = SearchWindow { factor: o.window.unwrap_or(SearchWindow::default().factor) };
            let r = solve_mode(&need_m()?, &need_s()?, Mode::GROUND, window)?;
            json_document("twobody", &r)
        }
        Command::Flow(_) => {
            let (lo, hi) = (o.emin.unwrap_or(-10.0), o.emax.unwrap_or(-0.1));
            let points = o.points.unwrap_or(200);
            let grid: Vec<f64> = (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect();
            let curves = flow_curves(&need_m()?, &need_s()?, &grid, &torus_modes(o.modes.unwrap_or(1)))?;
            let rows = curves.iter().flat_map(|c| {
                c.samples.iter().map(move |s| vec![Cell::F(s.e), Cell::F(s.omega), Cell::F(s.domega_de), Cell::S(c.mode.label())])
            });
            csv(&["E", "omega", "domega_dE", "mode"], rows)
        }
        Command::Rg(_) => {
            let lambda_r = o.lambda.or(o.lambda_r).expect("validated");
            let gamma = o.gamma.expect("validated");
            let r = RgResult { lambda_r, gamma, flowed: flow(lambda_r, gamma)?, flowed_ode: flow_ode(lambda_r, gamma)?, beta: beta(lambda_r) };
            json_document("rg", &r)
        }
        Command::Meanfield2d(_) => {
            let m = need_m()?;
            let mu2 = o.mu2.expect("validated");
            if let Some(path) = &o.profile {
                let u0 = read_radial_profile(&fs::read_to_string(path)?)?;
                let n = o.n.as_ref().expect("validated")[0];
                let ints = profile_integrals(&m, &u0, None)?;
                let crossing = meanfield_crossing(&ints, n, mu2)?;
                let residual = o.e.map(|e| residual_from_integrals(&ints, n, mu2, e)).transpose()?;
                return json_document("meanfield2d_profile", &ProfileReport { n, mu2, crossing_energy: crossing, integrals: ints, residual });
            }
            let ns = o.n.clone().unwrap_or_else(|| (1..=20).map(|k| 10 * k).collect());
            let xs = ns
                .iter()
                .map(|&n| Ok(meanfield_bound(&MeanFieldProblem::new(n, mu2, m, o.aubin)?)?.x))
                .collect::<Result<Vec<f64>>>()?;
            let rows = (0..ns.len()).map(|i| {
                let slope = if ns.len() < 2 {
                    Cell::S(String::new())
                } else {
                    let (a, b) = if i == 0 { (0, 1) } else if i == ns.len() - 1 { (i - 1, i) } else { (i - 1, i + 1) };
                    Cell::F((xs[b] - xs[a]) / (ns[b] as f64 - ns[a] as f64))
                };
                vec![Cell::I(ns[i] as i64), Cell::F(xs[i]), slope]
            });
            csv(&["n", "x", "slope"], rows)
        }
        Command::Onedim(_) => {
            let ns = o.n.clone().unwrap_or_else(|| vec![2, 3, 5, 10, 100, 1000]);
            let table = comparison_table(&ns, o.lambda.unwrap_or(1.0))?;
            let opt = |v: Option<f64>| v.map_or(Cell::S(String::new()), Cell::F);
            let rows = table.iter().map(|r| {
                vec![Cell::I(r.n as i64), Cell::F(r.exact), Cell::F(r.hartree), opt(r.meanfield), Cell::F(r.hartree_gap), opt(r.meanfield_gap)]
            });
            csv(&["n", "exact", "hartree", "meanfield", "hartree_gap", "meanfield_gap"], rows)
        }
        Command::NbodyBound(_) => {
            let (m, s) = (need_m()?, need_s()?);
            let ns = o.n.clone().unwrap_or_else(|| vec![2, 3, 5, 10]);
            let rows = ns
                .iter()
                .map(|&n| {
                    let b = nbody_upper_bound(n, &m, &s)?;
                    Ok(vec![Cell::I(n as i64), Cell::F(b.volume), Cell::F(b.e2), Cell::F(b.bound)])
                })
                .collect::<Result<Vec<_>>>()?;
            csv(&["n", "volume", "e2", "bound"], rows)
        }
        Command::Hyperbolic(_) => {
            let shift = match o.shift {
                Some(ShiftKind::Printed) => HyperbolicShift::Printed,
                _ => HyperbolicShift::Curvature,
            };
            json_document("hyperbolic", &hyperbolic_estar(o.radius.expect("validated"), o.mu2.expect("validated"), shift)?)
        }
        Command::Divergence(_) => {
            let fit = divergence_demo(&need_m()?, o.e.unwrap_or(-1.0), &o.eps.clone().unwrap_or_else(default_eps))?;
            json_document("divergence", &fit)
        }
    }
}

/// Exit status for an error: 1 for bad input, 2 for numerical failure.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        1
    } else {
        2
    }
}

/// One-line JSON error record for the diagnostic stream.
pub fn error_record(e: &Error) -> String {
    serde_json::json!({ "kind": e.kind(), "message": e.to_string() }).to_string()
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("HEATBIND_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Config(vec![format!("HEATBIND_THREADS must be a positive integer, got {v:?}")]))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(vec![format!("cannot size the thread pool: {e}")]))?;
    }
    Ok(())
}

fn execute<I, T>(argv: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    configure_threads()?;
    let cfg = parse_config(argv)?;
    let mut doc = run(&cfg)?;
    if !doc.ends_with('\n') {
        doc.push('\n');
    }
    match &cfg.options.output {
        Some(path) => fs::write(path, doc)?,
        None => std::io::stdout().lock().write_all(doc.as_bytes())?,
    }
    Ok(())
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    // Help and version requests are not errors.
    if let Err(e) = Cli::try_parse_from(&argv) {
        if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
            print!("{e}");
            return 0;
        }
    }
    match execute(argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_record(&e));
            exit_code(&e)
        }
    }
}

//! Command-line driver: configuration, dispatch, CSV outputs and run reports.
//!
//! Every command builds a synthetic problem from the configuration (or reads
//! boundary/source data with `--in`), solves it, compares against the
//! analytic oracle and writes `<out>/*.csv` plus `<out>/report.txt`.

use std::f64::consts::PI;
use std::fmt::{self, Display};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, ValueEnum};

use crate::apps::{
    geo_forward, geo_reconstruct, vd_forward, vd_reconstruct, vortex_exact, vortex_mfs,
    PhysicalConstants, VortexMfs, VortexSet,
};
use crate::decomposition::{
    d_inv_convolve_nodes, hardy_hodge_compose, hardy_hodge_decompose_sphere,
    helmholtz_compose, helmholtz_decompose_cap, helmholtz_decompose_sphere, helmholtz_parts,
    DInvPath, HardyHodgeScalars, HelmholtzScalars, ScalarField,
};
use crate::error::{Error, Result};
use crate::geometry::{boundary_frame, BoundaryPoint, SphericalCap, UnitVector, Vec3};
use crate::harmonics::{log_series, sh_eval, synth_field, InnerHarmonicSum, ShCoefficients};
use crate::io::{load_field_csv, parse_field_csv, write_field_csv, CsvField};
use crate::kernels::{fundamental, INV_4PI};
use crate::layers::{
    double_layer, idp_residual, inp_residual, jump_probe, jump_resolution_floor, solve_idp,
    solve_idp_dense, solve_inp, solve_inp_dense, DensitySamples, Potential, Quantity,
};
use crate::mfs::{
    basis_eval, mfs_eval, mfs_fit, BasisMode, DataKind, FitMode, FundamentalSystem, Variant,
    DEFAULT_LAMBDA,
};
use crate::quadrature::{
    build_boundary_grid, build_cap_grid, build_sphere_grid, FieldSamples, QuadratureGrid,
};
use crate::solvers::{
    beltrami_fd, default_scale, dirichlet_solve_cap, evaluate_at, interior_probes, mvp_residual,
    neumann_solve_cap, poisson_solve_cap, poisson_solve_cap_adaptive, Mvp, ProbeRule, Singular,
    SolveReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Selfcheck,
    Poisson,
    Dirichlet,
    Neumann,
    Idp,
    Inp,
    JumpTest,
    Helmholtz,
    HardyHodge,
    VerticalDeflections,
    Geostrophic,
    Vortex,
    MfsFit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Selfcheck => "selfcheck",
            Command::Poisson => "poisson",
            Command::Dirichlet => "dirichlet",
            Command::Neumann => "neumann",
            Command::Idp => "idp",
            Command::Inp => "inp",
            Command::JumpTest => "jump-test",
            Command::Helmholtz => "helmholtz",
            Command::HardyHodge => "hardy-hodge",
            Command::VerticalDeflections => "vertical-deflections",
            Command::Geostrophic => "geostrophic",
            Command::Vortex => "vortex",
            Command::MfsFit => "mfs-fit",
        }
    }
}

impl Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainChoice {
    Sphere,
    Cap,
}

/// Run parameters. Unset options fall back to per-command defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub cap_center_lon: Option<f64>,
    pub cap_center_lat: Option<f64>,
    pub cap_radius: Option<f64>,
    pub nt: Option<usize>,
    pub nphi: Option<usize>,
    pub m: Option<usize>,
    pub j: Option<u32>,
    pub seed: u64,
    pub nmin: Option<usize>,
    pub nmax: Option<usize>,
    pub big_m: Option<usize>,
    pub n_vortices: Option<usize>,
    pub rho_bar: Option<f64>,
    pub lambda: Option<f64>,
    pub constants: PhysicalConstants,
    pub domain: Option<DomainChoice>,
    pub variant: Option<Variant>,
    pub input: Option<PathBuf>,
    pub output: PathBuf,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("{key}: cannot parse '{value}'")))
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{key} must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            cap_center_lon: None,
            cap_center_lat: None,
            cap_radius: None,
            nt: None,
            nphi: None,
            m: None,
            j: None,
            seed: 7,
            nmin: None,
            nmax: None,
            big_m: None,
            n_vortices: None,
            rho_bar: None,
            lambda: None,
            constants: PhysicalConstants::default(),
            domain: None,
            variant: None,
            input: None,
            output: PathBuf::from("sphaerica-out"),
        }
    }

    /// Sets one option by its flag name (without the leading `--`).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "command" => {
                self.command = Command::from_str(value.trim(), false)
                    .map_err(|_| Error::InvalidParameter(format!("unknown command '{value}'")))?
            }
            "cap-center-lon" => self.cap_center_lon = Some(parse(key, value)?),
            "cap-center-lat" => {
                let v: f64 = parse(key, value)?;
                if !(-90.0..=90.0).contains(&v) {
                    return Err(Error::InvalidParameter(format!("{key} out of range: {v}")));
                }
                self.cap_center_lat = Some(v)
            }
            "cap-radius" => self.cap_radius = Some(parse(key, value)?),
            "nt" => self.nt = Some(parse(key, value)?),
            "nphi" => self.nphi = Some(parse(key, value)?),
            "m" => self.m = Some(parse(key, value)?),
            "J" => self.j = Some(parse(key, value)?),
            "seed" => self.seed = parse(key, value)?,
            "nmin" => self.nmin = Some(parse(key, value)?),
            "nmax" => self.nmax = Some(parse(key, value)?),
            "M" => self.big_m = Some(parse(key, value)?),
            "N" => self.n_vortices = Some(parse(key, value)?),
            "rho-bar" => self.rho_bar = Some(positive(key, parse(key, value)?)?),
            "lambda" => {
                let v: f64 = parse(key, value)?;
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::InvalidParameter(format!("lambda must be ≥ 0, got {v}")));
                }
                self.lambda = Some(v)
            }
            "R" => self.constants.radius = positive(key, parse(key, value)?)?,
            "GM" => self.constants.gm = positive(key, parse(key, value)?)?,
            "omega" => self.constants.omega = positive(key, parse(key, value)?)?,
            "G" => self.constants.gravity = positive(key, parse(key, value)?)?,
            "domain" => {
                self.domain = Some(match value.trim() {
                    "sphere" => DomainChoice::Sphere,
                    "cap" => DomainChoice::Cap,
                    v => return Err(Error::InvalidParameter(format!("unknown domain '{v}'"))),
                })
            }
            "variant" => self.variant = Some(value.trim().parse()?),
            "in" => self.input = Some(PathBuf::from(value.trim())),
            "out" => self.output = PathBuf::from(value.trim()),
            k => return Err(Error::InvalidParameter(format!("unknown option '{k}'"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file; `#` starts a comment.
    pub fn apply_config_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("config line {}: expected key = value", i + 1))
            })?;
            self.set(k.trim(), v)
                .map_err(|e| Error::InvalidParameter(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    fn cap(&self, default: (f64, f64, f64)) -> Result<SphericalCap> {
        let lon = self.cap_center_lon.unwrap_or(default.0);
        let lat = self.cap_center_lat.unwrap_or(default.1);
        let rho = self.cap_radius.unwrap_or(default.2);
        SphericalCap::new(UnitVector::from_lon_lat_deg(lon, lat), rho)
    }

    fn grid_size(&self, nt: usize, nphi: usize) -> (usize, usize) {
        (self.nt.unwrap_or(nt), self.nphi.unwrap_or(nphi))
    }

    fn degrees(&self, nmin: usize, nmax: usize) -> Result<(usize, usize)> {
        let (a, b) = (self.nmin.unwrap_or(nmin), self.nmax.unwrap_or(nmax));
        if a > b {
            return Err(Error::InvalidParameter(format!("nmin {a} exceeds nmax {b}")));
        }
        Ok((a, b))
    }
}

/// Flags mirror the [`RunConfig`] keys; values are validated by [`RunConfig::set`].
#[derive(Debug, Parser)]
#[command(name = "sphaerica", version, about = "Potential theory on spherical caps", allow_negative_numbers = true)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// key = value file applied before the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "cap-center-lon")]
    pub cap_center_lon: Option<String>,
    #[arg(long = "cap-center-lat")]
    pub cap_center_lat: Option<String>,
    #[arg(long = "cap-radius")]
    pub cap_radius: Option<String>,
    #[arg(long)]
    pub nt: Option<String>,
    #[arg(long)]
    pub nphi: Option<String>,
    /// Boundary nodes.
    #[arg(long = "m")]
    pub m: Option<String>,
    /// Regularization scale.
    #[arg(long = "J")]
    pub j: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub nmin: Option<String>,
    #[arg(long)]
    pub nmax: Option<String>,
    /// MFS basis size.
    #[arg(long = "M")]
    pub big_m: Option<String>,
    /// Number of vortices.
    #[arg(long = "N")]
    pub n_vortices: Option<String>,
    #[arg(long = "rho-bar")]
    pub rho_bar: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long = "R")]
    pub radius: Option<String>,
    #[arg(long = "GM")]
    pub gm: Option<String>,
    #[arg(long)]
    pub omega: Option<String>,
    #[arg(long = "G")]
    pub gravity: Option<String>,
    /// sphere | cap (helmholtz).
    #[arg(long)]
    pub domain: Option<String>,
    /// gk | gk-normal | gk-mod | inner-harmonic (mfs-fit).
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long = "in")]
    pub input: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig> {
        let mut cfg = RunConfig::new(self.command);
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            cfg.apply_config_text(&text)?;
            cfg.command = self.command;
        }
        let flags = [
            ("cap-center-lon", self.cap_center_lon),
            ("cap-center-lat", self.cap_center_lat),
            ("cap-radius", self.cap_radius),
            ("nt", self.nt),
            ("nphi", self.nphi),
            ("m", self.m),
            ("J", self.j),
            ("seed", self.seed),
            ("nmin", self.nmin),
            ("nmax", self.nmax),
            ("M", self.big_m),
            ("N", self.n_vortices),
            ("rho-bar", self.rho_bar),
            ("lambda", self.lambda),
            ("R", self.radius),
            ("GM", self.gm),
            ("omega", self.omega),
            ("G", self.gravity),
            ("domain", self.domain),
            ("variant", self.variant),
            ("in", self.input),
            ("out", self.out),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        Ok(cfg)
    }
}

/// A named tolerance check: passes when `value ≤ tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value <= self.tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: Command,
    pub entries: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl Report {
    fn new(command: Command) -> Self {
        Report {
            command,
            entries: Vec::new(),
            checks: Vec::new(),
        }
    }

    fn kv(&mut self, key: &str, value: impl Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    fn num(&mut self, key: &str, value: f64) {
        self.kv(key, format!("{value:.6e}"));
    }

    fn check(&mut self, name: &str, value: f64, tol: f64) {
        self.checks.push(Check {
            name: name.to_string(),
            value,
            tol,
        });
    }

    fn solve(&mut self, r: &SolveReport) {
        for (k, v) in &r.params {
            self.kv(k, v);
        }
        self.kv("probes", r.probes.len());
        for (k, v) in [
            ("sup_error", r.sup_error),
            ("l2_error", r.l2_error),
            ("rel_l2_error", r.rel_l2_error),
            ("oracle_sup", r.oracle_sup()),
            ("boundary_residual", r.boundary_residual),
        ] {
            if let Some(v) = v {
                self.num(k, v);
            }
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn render(&self) -> String {
        let mut s = format!("# sphaerica {}\n", self.command);
        for (k, v) in &self.entries {
            s.push_str(&format!("{k} = {v}\n"));
        }
        for c in &self.checks {
            s.push_str(&format!(
                "check {} = {} ({:.3e} <= {:.1e})\n",
                c.name,
                if c.passed() { "PASS" } else { "FAIL" },
                c.value,
                c.tol
            ));
        }
        s
    }
}

/// Report plus the CSV files of one run, in write order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: Report,
    pub fields: Vec<(String, CsvField)>,
}

impl RunOutput {
    fn new(command: Command) -> Self {
        RunOutput {
            report: Report::new(command),
            fields: Vec::new(),
        }
    }

    fn field(&mut self, name: &str, f: CsvField) {
        self.fields.push((name.to_string(), f));
    }

    fn probe_fields(&mut self, r: &SolveReport) -> Result<()> {
        self.field("solution", CsvField::scalar(&r.probes, r.values.clone())?);
        if let Some(e) = r.errors() {
            self.field("error", CsvField::scalar(&r.probes, e)?);
        }
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        for (name, f) in &self.fields {
            write_field_csv(dir.join(format!("{name}.csv")), f)?;
        }
        let path = dir.join("report.txt");
        std::fs::write(&path, self.report.render())
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

/// Exit status for an error: 3 for numerical failures, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SingularSystem(_) | Error::Singularity(_) => 3,
        _ => 2,
    }
}

fn sup_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn oracle(probes: &[UnitVector], f: impl Fn(&UnitVector) -> Result<f64> + Sync + Send) -> Result<Vec<f64>> {
    evaluate_at(probes, f)
}

fn load_on(cfg: &RunConfig, grid: &Arc<QuadratureGrid>) -> Result<Option<FieldSamples>> {
    match &cfg.input {
        Some(p) => Ok(Some(load_field_csv(p)?.to_samples(grid.clone())?)),
        None => Ok(None),
    }
}

/// Boundary data from `--in` or the trace `g` of a seeded inner-harmonic sum.
fn boundary_data<G>(
    cfg: &RunConfig,
    cap: &SphericalCap,
    grid: &Arc<QuadratureGrid>,
    out: &mut RunOutput,
    g: G,
) -> Result<(Vec<f64>, Option<InnerHarmonicSum>)>
where
    G: Fn(&InnerHarmonicSum, &BoundaryPoint) -> Result<f64>,
{
    if let Some(s) = load_on(cfg, grid)? {
        out.report.kv("input", cfg.input.as_ref().unwrap().display());
        return Ok((s.as_scalar()?.to_vec(), None));
    }
    let (a, b) = cfg.degrees(0, 5)?;
    let h = InnerHarmonicSum::random(*cap, cfg.seed, a, b)?;
    out.report.kv("oracle", format!("inner harmonics, degrees {a}..={b}, seed {}", cfg.seed));
    let data = grid
        .frames()
        .iter()
        .map(|p| g(&h, p))
        .collect::<Result<Vec<f64>>>()?;
    Ok((data, Some(h)))
}

fn cap_entries(r: &mut Report, cap: &SphericalCap) {
    let (lon, lat) = cap.center().lon_lat_deg();
    r.kv("cap_center_lon", format!("{lon:.6}"));
    r.kv("cap_center_lat", format!("{lat:.6}"));
    r.kv("cap_radius", cap.radius());
}

/// Runs one command in process.
pub fn execute(cfg: &RunConfig) -> Result<RunOutput> {
    let mut out = RunOutput::new(cfg.command);
    out.report.kv("seed", cfg.seed);
    match cfg.command {
        Command::Selfcheck => selfcheck(&mut out)?,
        Command::Poisson => poisson(cfg, &mut out)?,
        Command::Dirichlet | Command::Neumann | Command::Idp | Command::Inp => {
            boundary_problem(cfg, &mut out)?
        }
        Command::JumpTest => jump_test(cfg, &mut out)?,
        Command::Helmholtz => helmholtz(cfg, &mut out)?,
        Command::HardyHodge => hardy_hodge(cfg, &mut out)?,
        Command::VerticalDeflections | Command::Geostrophic => geodesy(cfg, &mut out)?,
        Command::Vortex => vortex(cfg, &mut out)?,
        Command::MfsFit => mfs_fit_cmd(cfg, &mut out)?,
    }
    Ok(out)
}

/// Executes, writes outputs and returns the exit status.
pub fn run(cfg: &RunConfig) -> i32 {
    match execute(cfg).and_then(|o| o.write(&cfg.output).map(|_| o)) {
        Ok(o) => {
            print!("{}", o.report.render());
            if o.report.all_passed() {
                0
            } else {
                3
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Parses arguments (including the program name), applies
/// `SPHAERICA_THREADS` and runs.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = std::env::var("SPHAERICA_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.into_config() {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn poisson(cfg: &RunConfig, out: &mut RunOutput) -> Result<()> {
    let cap = cfg.cap((0.0, 90.0, 0.5))?;
    let (nt, nphi) = cfg.grid_size(32, 64);
    let grid = Arc::new(build_cap_grid(&cap, nt, nphi)?);
    let j = cfg.j.unwrap_or_else(|| default_scale(&grid));
    cap_entries(&mut out.report, &cap);
    out.report.kv("grid", format!("{nt}x{nphi}"));
    out.report.kv("J", j);
    let (h, spectral) = match load_on(cfg, &grid)? {
        Some(s) => (s, None),
        None => {
            let (a, b) = cfg.degrees(1, 6)?;
            let u = synth_field(cfg.seed, a, b, 2.0)?;
            let h = u.map_degrees(|n| -((n * (n + 1)) as f64));
            out.report.kv("source", format!("laplace-beltrami of degrees {a}..={b}"));
            (FieldSamples::from_fn(grid.clone(), |x| sh_eval(&h, x)), Some(h))
        }
    };
    let xbar = cap.center().neg();
    let probes = interior_probes(&cap, 0.8, 12, 24)?;
    let values = evaluate_at(&probes, |x| {
        let rule = match &spectral {
            Some(c) => Singular::subtracted(j, sh_eval(c, x)),
            None => Singular::regularized(j),
        };
        poisson_solve_cap(&cap, &h, &xbar, x, rule)
    })?;
    if let Some(c) = &spectral {
        let sample: Vec<UnitVector> = probes.iter().step_by(probes.len() / 4).copied().collect();
        let hf = |y: &UnitVector| sh_eval(c, y);
        let adaptive = |x: &UnitVector| {
            poisson_solve_cap_adaptive(&cap, hf, &xbar, x, &grid).unwrap_or(f64::NAN)
        };
        let fd = evaluate_at(&sample, |x| Ok((beltrami_fd(adaptive, x, 1e-3) - hf(x)).abs()))?;
        let fd_max = fd.iter().fold(0.0, |a: f64, &b| a.max(b));
        let ad = evaluate_at(&sample, |x| Ok(adaptive(x)))?;
        let idx: Vec<f64> = probes
            .iter()
            .zip(&values)
            .step_by(probes.len() / 4)
            .map(|(_, v)| *v)
            .collect();
        out.report.num("fd_beltrami_residual", fd_max);
        out.report.num("sample_vs_adaptive", sup_abs(&idx, &ad));
        out.report.check("fd-beltrami", fd_max, 1e-3);
    }
    out.field("source", CsvField::from_samples(&h));
    out.field("solution", CsvField::scalar(&probes, values)?);
    Ok(())
}

fn boundary_problem(cfg: &RunConfig, out: &mut RunOutput) -> Result<()> {
    let cap = cfg.cap((0.0, 90.0, 0.5))?;
    let m = cfg.m.unwrap_or(512);
    let bgrid = Arc::new(build_boundary_grid(&cap, m)?);
    cap_entries(&mut out.report, &cap);
    out.report.kv("m", m);
    let neumann_data = matches!(cfg.command, Command::Neumann | Command::Inp);
    let (data, harm) = boundary_data(cfg, &cap, &bgrid, out, |h, p| {
        if neumann_data {
            Ok(h.grad(&p.eta)?.dot(&p.nu))
        } else {
            h.eval(&p.eta)
        }
    })?;
    let probes = interior_probes(&cap, 0.9, 12, 24)?;
    let mut report = match cfg.command {
        Command::Dirichlet => {
            let f = FieldSamples::scalar(bgrid.clone(), data.clone())?;
            SolveReport::new(probes.clone(), evaluate_at(&probes, |x| dirichlet_solve_cap(&cap, &f, x))?)
        }
        Command::Neumann => {
            let f = FieldSamples::scalar(bgrid.clone(), data.clone())?;
            let mean = match &harm {
                Some(h) => {
                    let (nt, nphi) = cfg.grid_size(32, 64);
                    let g = build_cap_grid(&cap, nt, nphi)?;
                    let v = g.nodes().iter().map(|x| h.eval(x)).collect::<Result<Vec<f64>>>()?;
                    g.sum_weighted(|i, _| v[i]) / (2.0 * PI * cap.radius())
                }
                None => 0.0,
            };
            out.report.num("mean_value", mean);
            SolveReport::new(
                probes.clone(),
                evaluate_at(&probes, |x| neumann_solve_cap(&cap, &f, mean, x))?,
            )
        }
        Command::Idp => {
            let sol = solve_idp(&bgrid, &data)?;
            out.report.num("idp_residual", idp_residual(&sol, &data));
            if m <= 2048 {
                let dense = solve_idp_dense(&bgrid, &data)?;
                let d = sup_abs(sol.density.values(), dense.density.values());
                out.report.num("closed_vs_dense", d);
                out.report.check("idp-closed-vs-dense", d, 1e-7);
            }
            out.field(
                "density",
                CsvField::scalar(bgrid.nodes(), sol.density.values().to_vec())?,
            );
            SolveReport::new(probes.clone(), evaluate_at(&probes, |x| sol.eval(x))?)
        }
        _ => {
            let sol = solve_inp(&bgrid, &data)?;
            out.report.num("inp_residual", inp_residual(&sol, &data));
            if m <= 2048 {
                let dense = solve_inp_dense(&bgrid, &data)?;
                let d = sup_abs(sol.density.values(), dense.density.values());
                out.report.num("fft_vs_dense", d);
                out.report.check("inp-fft-vs-dense", d, 1e-8);
            }
            out.field(
                "density",
                CsvField::scalar(bgrid.nodes(), sol.density.values().to_vec())?,
            );
            let mut values = evaluate_at(&probes, |x| sol.eval(x))?;
            if let Some(h) = &harm {
                let exact = oracle(&probes, |x| h.eval(x))?;
                let offset = values.iter().zip(&exact).map(|(a, b)| a - b).sum::<f64>()
                    / values.len() as f64;
                out.report.num("constant_offset", offset);
                values.iter_mut().for_each(|v| *v -= offset);
            }
            SolveReport::new(probes.clone(), values)
        }
    };
    if let Some(h) = &harm {
        report = report.with_oracle(oracle(&probes, |x| h.eval(x))?);
    }
    out.report.solve(&report);
    out.field("boundary", CsvField::scalar(bgrid.nodes(), data)?);
    out.probe_fields(&report)
}

fn jump_test(cfg: &RunConfig, out: &mut RunOutput) -> Result<()> {
    let cap = cfg.cap((0.0, 90.0, 0.5))?;
    let m = cfg.m.unwrap_or(2048);
    let grid = Arc::new(build_boundary_grid(&cap, m)?);
    cap_entries(&mut out.report, &cap);
    out.report.kv("m", m);
    let q = DensitySamples::from_fn(grid.clone(), |p| {
        1.0 + 0.5 * p.phi.cos() + 0.25 * (2.0 * p.phi).sin()
    })?;
    let floor = jump_resolution_floor(&grid);
    let taus: Vec<f64> = (4..=9)
        .map(|k| 2f64.powi(-k))
        .filter(|&t| t >= floor)
        .collect();
    if taus.len() < 3 {
        return Err(Error::BelowResolution {
            tau: 2f64.powi(-6),
            floor,
        });
    }
    out.report.kv(
        "taus",
        taus.iter().map(|t| format!("{t:e}")).collect::<Vec<_>>().join(" "),
    );
    let node = 0;
    let qv = q.values()[node];
    out.report.num("density_at_node", qv);
    for (name, pot, quant, expected, rel) in [
        ("double-layer-value", Potential::Double, Quantity::Value, -qv, true),
        ("single-layer-normal-derivative", Potential::Single, Quantity::NormalDerivative, qv, true),
        ("single-layer-value", Potential::Single, Quantity::Value, 0.0, false),
    ] {
        let r = jump_probe(pot, quant, &q, node, &taus)?;
        out.report.num(&format!("{name}.jump"), r.jump);
        out.report.num(&format!("{name}.expected"), expected);
        out.report.num(&format!("{name}.observed_order"), r.observed_order);
        if rel {
            out.report.check(name, (r.jump - expected).abs() / expected.abs(), 0.02);
        } else {
            out.report.check(name, r.jump.abs(), 1e-3);
        }
    }
    out.field("density", CsvField::scalar(grid.nodes(), q.values().to_vec())?);
    Ok(())
}

fn spectral_triple(cfg: &RunConfig, nmin: usize, nmax: usize) -> Result<[ShCoefficients; 3]> {
    let (a, b) = cfg.degrees(nmin, nmax)?;
    Ok([
        synth_field(cfg.seed, a, b, 1.0)?,
        synth_field(cfg.seed.wrapping_add(1), a, b, 1.0)?,
        synth_field(cfg.seed.wrapping_add(2), a, b, 1.0)?,
    ])
}

fn scalar_errors(
    out: &mut RunOutput,
    name: &str,
    nodes: &[UnitVector],
    got: &[f64],
    exact: &[f64],
) -> Result<f64> {
    let e = sup_abs(got, exact);
    out.report.num(&format!("{name}_sup_error"), e);
    out.field(name, CsvField::scalar(nodes, got.to_vec())?);
    Ok(e)
}

fn samples_of(f: &ScalarField) -> Result<&[f64]> {
    f.as_samples().ok_or(Error::WrongKind {
        expected: "sampled scalar",
    })
}

/// Removes the quadrature mean over the grid's domain.
fn centred(grid: &QuadratureGrid, v: Vec<f64>) -> Vec<f64> {
    let area: f64 = grid.weights().iter().sum();
    let mean = grid.sum_weighted(|i, _| v[i]) / area;
    v.into_iter().map(|x| x - mean).collect()
}

fn helmholtz(cfg: &RunConfig, out: &mut RunOutput) -> Result<()> {
    let [c1, c2, c3] = spectral_triple(cfg, 1, 4)?;
    let s = HelmholtzScalars::spectral(c1.clone(), c2.clone(), c3.clone());
    let domain = cfg.domain.unwrap_or(DomainChoice::Sphere);
    match domain {
        DomainChoice::Sphere => {
            let (nt, nphi) = cfg.grid_size(32, 64);
            let grid = Arc::new(build_sphere_grid(nt, nphi)?);
            let j = cfg.j.unwrap_or_else(|| default_scale(&grid));
            out.report.kv("domain", "sphere");
            out.report.kv("grid", format!("{nt}x{nphi}"));
            out.report.kv("J", j);
            let vals = grid
                .nodes()
                .iter()
                .map(|x| helmholtz_compose(&s, x))
                .collect::<Result<Vec<Vec3>>>()?;
            let f = FieldSamples::vector(grid.clone(), vals, false)?;
            let d = helmholtz_decompose_sphere(&f, Some(j))?;
            let nodes = grid.nodes();
            let ex = |c| nodes.iter().map(|x| sh_eval(c, x)).collect::<Vec<f64>>();
            let e1 = scalar_errors(out, "f1", nodes, samples_of(&d.f1)?, &ex(&c1))?;
            let e2 = scalar_errors(out, "f2", nodes, samples_of(&d.f2)?, &centred(&grid, ex(&c2)))?;
            let e3 = scalar_errors(out, "f3", nodes, samples_of(&d.f3)?, &centred(&grid, ex(&c3)))?;
            out.report.check("f1", e1, 1e-12);
            out.report.check("f2", e2, 1e-2);
            out.report.check("f3", e3, 1e-2);
            out.field("field", CsvField::from_samples(&f));
        }
        DomainChoice::Cap => {
            let cap = cfg.cap((0.0, 90.0, 0.4))?;
            let (nt, nphi) = cfg.grid_size(48, 96);
            let m = cfg.m.unwrap_or(256);
            let grid = Arc::new(build_cap_grid(&cap, nt, nphi)?);
            let bgrid = Arc::new(build_boundary_grid(&cap, m)?);
            let j = cfg.j.unwrap_or_else(|| default_scale(&grid));
            out.report.kv("domain", "cap");
            cap_entries(&mut out.report, &cap);
            out.report.kv("grid", format!("{nt}x{nphi}"));
            out.report.kv("m", m);
            out.report.kv("J", j);
            let compose = |g: &QuadratureGrid| {
                g.nodes()
                    .iter()
                    .map(|x| helmholtz_compose(&s, x))
                    .collect::<Result<Vec<Vec3>>>()
            };
            let f = FieldSamples::vector(grid.clone(), compose(&grid)?, false)?;
            let bf = compose(&bgrid)?;
            let trace: Vec<f64> = bgrid.nodes().iter().map(|x| sh_eval(&c3, x)).collect();
            let d = helmholtz_decompose_cap(&cap, &f, &bgrid, &bf, Some(&trace), Some(j))?;
            let nodes = grid.nodes();
            let inner = cap.shrunk(0.8);
            let keep: Vec<usize> = (0..nodes.len()).filter(|&i| inner.contains(&nodes[i])).collect();
            let pick = |v: &[f64]| keep.iter().map(|&i| v[i]).collect::<Vec<f64>>();
            let ex = |c| nodes.iter().map(|x| sh_eval(c, x)).collect::<Vec<f64>>();
            let inodes: Vec<UnitVector> = keep.iter().map(|&i| nodes[i]).collect();
            let e1 = scalar_errors(out, "f1", &inodes, &pick(samples_of(&d.f1)?), &pick(&ex(&c1)))?;
            let e2 = scalar_errors(
                out,
                "f2",
                &inodes,
                &pick(samples_of(&d.f2)?),
                &pick(&centred(&grid, ex(&c2))),
            )?;
            let e3 = scalar_errors(out, "f3", &inodes, &pick(samples_of(&d.f3)?), &pick(&ex(&c3)))?;
            out.report.kv("interior_nodes", keep.len());
            out.report.check("f1", e1, 1e-12);
            out.report.check("f2", e2, 1e-2);
            out.report.check("f3", e3, 1e-2);
            out.field("field", CsvField::from_samples(&f));
        }
    }
    Ok(())
}

fn hardy_hodge(cfg: &RunConfig, out: &mut RunOutput) -> Result<()> {
    let [c1, c2, c3] = spectral_triple(cfg, 1, 4)?;
    let h = HardyHodgeScalars {
        f1: ScalarField::Spectral(c1.clone()),
        f2: ScalarField::Spectral(c2.clone()),
        f3: ScalarField::Spectral(c3.clone()),
    };
    let (nt, nphi) = cfg.grid_size(32, 64);
    let grid = Arc::new(build_sphere_grid(nt, nphi)?);
    let j = cfg.j.unwrap_or_else(|| default_scale(&grid));
    out.report.kv("grid", format!("{nt}x{nphi}"));
    out.report.kv("J", j);
    out.report.kv("d_inverse", "convolution");
    let vals = grid
        .nodes()
        .iter()
        .map(|x| hardy_hodge_compose(&h, x))
        .collect::<Result<Vec<Vec3>>>()?;
    let f = FieldSamples::vector(grid.clone(), vals, false)?;
    let d = hardy_hodge_decompose_sphere(&f, Some(j), DInvPath::Convolution)?;
    let nodes = grid.nodes();
    let ex = |c| nodes.iter().map(|x| sh_eval(c, x)).collect::<Vec<f64>>();
    let e1 = scalar_errors(out, "f1", nodes, samples_of(&d.f1)?, &ex(&c1))?;
    let e2 = scalar_errors(out, "f2", nodes, samples_of(&d.f2)?, &ex(&c2))?;
    let e3 = scalar_errors(out, "f3", nodes, samples_of(&d.f3)?, &centred(&grid, ex(&c3)))?;
    out.report.check("f1", e1, 1e-2);
    out.report.check("f2", e2, 1e-2);
    out.report.check("f3", e3, 1e-2);
    out.field("field", CsvField::from_samples(&f));
    Ok(())
}

fn geodesy(cfg: &RunConfig, out: &mut RunOutput) -> Result<()> {
    let vd = cfg.command == Command::VerticalDeflections;
    let cap = cfg.cap(if vd { (-60.0, -15.0, 0.2) } else { (165.0, 40.0, 0.1) })?;
    let (nt, nphi) = cfg.grid_size(120, 240);
    let j = cfg.j.unwrap_or(15);
    let (a, b) = cfg.degrees(3, 25)?;
    let k = cfg.constants;
    let grid = Arc::new(build_cap_grid(&cap, nt, nphi)?);
    cap_entries(&mut out.report, &cap);
    out.report.kv("grid", format!("{nt}x{nphi}"));
    out.report.kv("degrees", format!("{a}..={b}"));
    let c = synth_field(cfg.seed, a, b, 2.0)?;
    let (scalar, field) = if vd {
        vd_forward(&c, &grid, &k)?
    } else {
        geo_forward(&c, &grid, &k)?
    };
    let area: f64 = grid.weights().iter().sum();
    let sv = scalar.as_scalar()?;
    let mean = grid.sum_weighted(|i, _| sv[i]) / area;
    out.report.num("mean", mean);
    let probes = interior_probes(&cap, 0.8, 16, 32)?;
    let input = match load_on(cfg, &grid)? {
        Some(f) => {
            out.report.kv("input", cfg.input.as_ref().unwrap().display());
            FieldSamples::vector(grid.clone(), f.as_vector()?.to_vec(), true)?
        }
        None => field,
    };
    let r = if vd {
        vd_reconstruct(&input, j, mean, &probes, &k)?
    } else {
        geo_reconstruct(&input, j, mean, &probes, &k)?
    };
    let r = r.with_oracle(oracle(&probes, |x| Ok(sh_eval(&c, x)))?);
    out.report.solve(&r);
    if cfg.input.is_none() && j >= 15 {
        out.report.check("rel-l2", r.rel_l2_error.unwrap_or(f64::INFINITY), 0.02);
    }
    out.field(if vd { "deflections" } else { "velocity" }, CsvField::from_samples(&input));
    out.probe_fields(&r)
}

fn vortex(cfg: &RunConfig, out: &mut RunOutput) -> Result<()> {
    let cap = cfg.cap((0.0, 90.0, 0.9))?;
    let k = cfg.constants;
    let n = cfg.n_vortices.unwrap_or(5);
    let v = VortexSet::random(&cap, n, 0.8, cfg.seed)?;
    let mut opts = VortexMfs::new(&cap, cfg.big_m.unwrap_or(200));
    if let Some(rb) = cfg.rho_bar {
        opts.rho_bar = rb;
    }
    opts.lambda = cfg.lambda.unwrap_or(DEFAULT_LAMBDA);
    cap_entries(&mut out.report, &cap);
    out.report.kv("oversampling", opts.oversampling);
    let probes = interior_probes(&cap, 0.8, 16, 32)?;
    let r = vortex_mfs(&cap, &v, opts, &probes, &k)?;
    out.report.solve(&r);
    let rel = r.sup_error.unwrap_or(f64::INFINITY) / r.oracle_sup().unwrap_or(1.0);
    out.report.num("rel_max_error", rel);
    if opts.m >= 200 && cfg.rho_bar.is_none() {
        out.report.check("rel-max", rel, 1e-4);
    }
    out.field("vortices", CsvField::scalar(&v.centers, v.strengths.clone())?);
    out.probe_fields(&r)
}

fn mfs_fit_cmd(cfg: &RunConfig, out: &mut RunOutput) -> Result<()> {
    let cap = cfg.cap((0.0, 90.0, 0.5))?;
    let big_m = cfg.big_m.unwrap_or(100);
    let variant = cfg.variant.unwrap_or(Variant::GkMod);
    let rho_bar = cfg.rho_bar.unwrap_or(cap.radius() + 0.005);
    let m = cfg.m.unwrap_or(4 * big_m);
    let lambda = cfg.lambda.unwrap_or(DEFAULT_LAMBDA);
    let bgrid = Arc::new(build_boundary_grid(&cap, m)?);
    cap_entries(&mut out.report, &cap);
    out.report.kv("variant", format!("{variant:?}"));
    out.report.kv("M", big_m);
    out.report.kv("m", m);
    out.report.kv("rho_bar", rho_bar);
    out.report.kv("lambda", lambda);
    let (data, harm) = boundary_data(cfg, &cap, &bgrid, out, |h, p| h.eval(&p.eta))?;
    let system = FundamentalSystem::on_circle(cap, variant, rho_bar, big_m, true)?;
    let mode = if lambda == 0.0 && m == system.len() {
        FitMode::Interpolation
    } else {
        FitMode::Tikhonov(lambda)
    };
    let fit = mfs_fit(&system, &bgrid, &data, mode, DataKind::Dirichlet)?;
    out.report.num("condition", fit.condition);
    let probes = interior_probes(&cap, 0.8, 12, 24)?;
    let mut r = SolveReport::new(probes.clone(), evaluate_at(&probes, |x| mfs_eval(&fit, x))?);
    r.boundary_residual = Some(fit.residual);
    if let Some(h) = &harm {
        r = r.with_oracle(oracle(&probes, |x| h.eval(x))?);
    }
    out.report.solve(&r);
    out.field(
        "coefficients",
        CsvField::scalar(
            &std::iter::once(cap.center())
                .chain(system.sources().iter().copied())
                .take(fit.coefficients.len())
                .collect::<Vec<_>>(),
            fit.coefficients.clone(),
        )
        .or_else(|_| CsvField::scalar(&[], vec![]))?,
    );
    out.probe_fields(&r)
}

type CheckFn = fn() -> Result<(f64, f64)>;

fn check_antipode() -> Result<(f64, f64)> {
    Ok(((fundamental(-1.0)? - INV_4PI).abs(), 1e-15))
}

fn check_beltrami_fundamental() -> Result<(f64, f64)> {
    let eta = UnitVector::from_xyz(0.2, -0.4, 0.7);
    let mut worst: f64 = 0.0;
    for xi in [UnitVector::from_xyz(-0.5, 0.1, 0.3), UnitVector::from_xyz(0.9, 0.4, -0.2)] {
        let fd = beltrami_fd(|x| fundamental(x.dot(&eta)).unwrap_or(f64::NAN), &xi, 1e-3);
        worst = worst.max((fd + INV_4PI).abs());
    }
    Ok((worst, 1e-5))
}

fn check_trichotomy() -> Result<(f64, f64)> {
    let cap = SphericalCap::new(UnitVector::from_xyz(0.3, 0.1, 0.8), 0.5)?;
    let grid = Arc::new(build_boundary_grid(&cap, 256)?);
    let one = DensitySamples::from_fn(grid, |_| 1.0)?;
    let a = (double_layer(&one, &cap.center())? - 0.75).abs();
    let b = (double_layer(&one, &cap.center().neg())? + 0.25).abs();
    Ok((a.max(b), 1e-10))
}

fn check_mvp() -> Result<(f64, f64)> {
    let cap = SphericalCap::new(UnitVector::from_xyz(-0.2, 0.5, 0.4), 0.3)?;
    let host = SphericalCap::new(cap.center(), 0.8)?;
    let h = InnerHarmonicSum::random(host, 3, 0, 4)?;
    let f = |x: &UnitVector| h.eval(x).unwrap_or(f64::NAN);
    let a = mvp_residual(f, &cap, Mvp::I, ProbeRule::default())?;
    let b = mvp_residual(f, &cap, Mvp::II, ProbeRule::default())?;
    Ok((a.max(b), 1e-9))
}

fn check_dirichlet_constant() -> Result<(f64, f64)> {
    let cap = SphericalCap::new(UnitVector::from_lon_lat_deg(20.0, 35.0), 0.4)?;
    let grid = Arc::new(build_boundary_grid(&cap, 128)?);
    let f = FieldSamples::scalar(grid, vec![1.0; 128])?;
    let x = interior_probes(&cap, 0.7, 2, 4)?;
    let e = x
        .iter()
        .map(|x| dirichlet_solve_cap(&cap, &f, x).map(|v| (v - 1.0).abs()))
        .collect::<Result<Vec<f64>>>()?;
    Ok((e.iter().fold(0.0, |a: f64, &b| a.max(b)), 1e-12))
}

fn check_idp() -> Result<(f64, f64)> {
    let cap = SphericalCap::new(UnitVector::e3(), 0.5)?;
    let grid = Arc::new(build_boundary_grid(&cap, 128)?);
    let f: Vec<f64> = grid.frames().iter().map(|p| 1.0 + p.phi.cos()).collect();
    let a = solve_idp(&grid, &f)?;
    let b = solve_idp_dense(&grid, &f)?;
    Ok((sup_abs(a.density.values(), b.density.values()), 1e-10))
}

fn check_inp() -> Result<(f64, f64)> {
    let cap = SphericalCap::new(UnitVector::e3(), 0.5)?;
    let grid = Arc::new(build_boundary_grid(&cap, 128)?);
    let f: Vec<f64> = grid.frames().iter().map(|p| (2.0 * p.phi).sin()).collect();
    let a = solve_inp(&grid, &f)?;
    let b = solve_inp_dense(&grid, &f)?;
    Ok((sup_abs(a.density.values(), b.density.values()), 1e-10))
}

fn check_d_inverse_of_one() -> Result<(f64, f64)> {
    let grid = Arc::new(build_sphere_grid(16, 32)?);
    let one = FieldSamples::from_fn(grid, |_| 1.0);
    let v = d_inv_convolve_nodes(&one)?;
    Ok((v.iter().fold(0.0, |a: f64, x| a.max((x - 2.0).abs())), 1e-12))
}

fn check_log_series() -> Result<(f64, f64)> {
    let zeta = UnitVector::e3();
    let xi = UnitVector::from_xyz(0.2, 0.1, 0.95);
    let eta = UnitVector::from_xyz(0.9, -0.3, -0.1);
    let exact = xi.one_minus_dot(&eta).ln();
    let mut prev = f64::INFINITY;
    let mut worst: f64 = 0.0;
    for n in [5, 10, 20] {
        let e = (log_series(&xi, &eta, &zeta, 0.5, n)? - exact).abs();
        if !(e < prev) {
            worst = worst.max(1.0);
        }
        prev = e;
    }
    Ok((worst.max(prev), 1e-3))
}

fn check_vortex_boundary() -> Result<(f64, f64)> {
    let cap = SphericalCap::new(UnitVector::e3(), 0.9)?;
    let v = VortexSet::random(&cap, 5, 0.8, 11)?;
    let k = PhysicalConstants::default();
    let mut worst: f64 = 0.0;
    for i in 0..16 {
        let b = boundary_frame(&cap, i as f64 * PI / 8.0);
        let x = UnitVector::new(b.eta.into_vec() - 1e-9 * b.nu);
        worst = worst.max(vortex_exact(&cap, &v, &x, &k)?.abs());
    }
    Ok((worst, 1e-8))
}

fn check_gk_mod() -> Result<(f64, f64)> {
    let cap = SphericalCap::new(UnitVector::e3(), 0.5)?;
    let xbar = UnitVector::from_xyz(0.0, 0.6, -0.8);
    let s = FundamentalSystem::new(cap, Variant::GkMod, vec![xbar], xbar, false)?;
    let x = UnitVector::from_xyz(0.1, 0.2, 0.9);
    Ok((basis_eval(&s, 0, &x, BasisMode::Value)?.abs(), 0.0))
}

fn check_orthogonality() -> Result<(f64, f64)> {
    let c = ShCoefficients::single(2, 2);
    let s = HelmholtzScalars::spectral(c.clone(), c.clone(), c);
    let mut worst: f64 = 0.0;
    for x in [UnitVector::from_xyz(0.3, -0.2, 0.5), UnitVector::from_xyz(-0.7, 0.1, 0.1)] {
        let [o1, o2, o3] = helmholtz_parts(&s, &x)?;
        worst = worst.max(o1.dot(&o2).abs()).max(o1.dot(&o3).abs()).max(o2.dot(&o3).abs());
    }
    Ok((worst, 1e-12))
}

fn check_csv() -> Result<(f64, f64)> {
    let nodes = [UnitVector::from_xyz(0.3, -0.2, 0.5), UnitVector::e3().neg()];
    let f = CsvField::scalar(&nodes, vec![PI, -1e-300])?;
    let text = f.to_csv_string();
    let back = parse_field_csv(&text)?;
    Ok((if back.to_csv_string() == text && back == f { 0.0 } else { 1.0 }, 0.0))
}

pub const SELFCHECKS: &[(&str, CheckFn)] = &[
    ("fundamental-antipode", check_antipode),
    ("fundamental-beltrami", check_beltrami_fundamental),
    ("double-layer-trichotomy", check_trichotomy),
    ("mean-value-properties", check_mvp),
    ("dirichlet-constant", check_dirichlet_constant),
    ("idp-closed-vs-dense", check_idp),
    ("inp-fft-vs-dense", check_inp),
    ("d-inverse-of-one", check_d_inverse_of_one),
    ("log-series-convergence", check_log_series),
    ("vortex-boundary-zero", check_vortex_boundary),
    ("gk-mod-cancellation", check_gk_mod),
    ("helmholtz-pointwise-orthogonality", check_orthogonality),
    ("csv-round-trip", check_csv),
];

fn selfcheck(out: &mut RunOutput) -> Result<()> {
    for (name, f) in SELFCHECKS {
        let (v, tol) = match f() {
            Ok(x) => x,
            Err(e) => {
                out.report.kv(&format!("{name}.error"), e);
                (f64::INFINITY, 0.0)
            }
        };
        out.report.check(name, v, tol);
    }
    Ok(())
}

/// Parses `args` into a [`RunConfig`] without running.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(args)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?
        .into_config()
}

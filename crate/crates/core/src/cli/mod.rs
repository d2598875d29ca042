// Copyright 2026 The fraclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::algebraic::{classify_lambda, AlgebraicNumber, IntPolynomial, LambdaInput, DEFAULT_PRECISION};
use crate::bounds::{
    corollary_bound, gamma_estimate, modified_similarity_dimension, similarity_dimension, thm1_bound,
    BoundInputs, Corollary,
};
use crate::boxcount::{count_curve, estimate_dimension, render_svg, CountSource, CurveOptions};
use crate::exact::Lambda;
use crate::ifs::{load_config, preset, resolve_lambda, PresetName, PresetParams, PresetSystem, WORD_BUDGET};
use crate::overlap::{exact_overlaps, wsp_margin, Mode, FLOAT_TOL};
use crate::separation::{
    monte_carlo_scan, separation_table, sum_set_exact, write_scan_csv, write_separation_csv,
    ScanOptions, DEFAULT_SEED,
};
use crate::sphere::{orbit_counts, sg_attractor, RotationSet};
use crate::{Error, Result};

/// Exit code for usage errors.
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "fraclab", version, about = "Box dimensions of inhomogeneous self-similar sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify λ = 1/θ for an algebraic θ.
    Classify(ClassifyArgs),
    /// Render a system to SVG.
    Render(RenderArgs),
    /// Box counts and a dimension estimate.
    Boxdim(BoxdimArgs),
    /// Upper bounds from the max–min envelope.
    Bounds(BoundsArgs),
    /// Sum-set gaps and separation counts.
    Separation(SeparationArgs),
    /// Exact overlaps between composed maps.
    Overlaps(OverlapArgs),
    /// Weak separation margin.
    Wsp(OverlapArgs),
    /// Rotation orbits on the sphere.
    Sphere(SphereArgs),
    /// Seeded Monte Carlo scan over λ.
    Scan(ScanArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Validate inputs and print the work plan only.
    #[arg(long)]
    dry_run: bool,
    /// Worker threads (default: FRACLAB_THREADS or all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// JSON system configuration.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
struct SystemArgs {
    #[arg(long)]
    preset: Option<String>,
    /// λ as a decimal or a fraction p/q.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Integer polynomial with root θ; λ = 1/θ.
    #[arg(long)]
    lambda_poly: Option<String>,
    #[arg(long)]
    root_index: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    /// Comma separated unit vector.
    #[arg(long)]
    x: Option<String>,
}

impl SystemArgs {
    fn given(&self) -> bool {
        self.preset.is_some()
            || self.lambda.is_some()
            || self.lambda_poly.is_some()
            || self.epsilon.is_some()
            || self.c.is_some()
            || self.x.is_some()
    }

    fn lambda(&self) -> Result<Option<Lambda>> {
        if self.lambda.is_none() && self.lambda_poly.is_none() {
            return Ok(None);
        }
        let poly = self.lambda_poly.as_deref().map(str::parse::<IntPolynomial>).transpose()?;
        resolve_lambda(self.lambda.as_deref(), poly.as_ref(), self.root_index).map(Some)
    }

    fn build(&self, common: &Common) -> Result<(PresetSystem, String)> {
        if let Some(path) = &common.config {
            if self.given() {
                return Err(Error::domain("give either --config or system flags, not both"));
            }
            let system = load_config(path)?.build()?;
            return Ok((system, format!("config {}", path.display())));
        }
        let name: PresetName = self
            .preset
            .as_deref()
            .ok_or_else(|| Error::domain("a system needs --preset or --config"))?
            .parse()?;
        let params = PresetParams {
            lambda: self.lambda()?,
            epsilon: self.epsilon,
            c: self.c,
            rotations: None,
            x: self.x.as_deref().map(parse_vector).transpose()?,
        };
        let system = preset(name, &params)?;
        let mut desc = format!("preset {name}");
        if let Some(l) = &params.lambda {
            desc.push_str(&format!(
                " lambda={:.6} ({})",
                l.value,
                if l.is_exact() { "exact" } else { "float" }
            ));
        }
        Ok((system, desc))
    }
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    common: Common,
    /// Integer polynomial with root θ.
    #[arg(long)]
    poly: Option<String>,
    #[arg(long)]
    root_index: Option<usize>,
    /// A bare decimal λ (cannot be classified).
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    system: SystemArgs,
    /// Sampling mesh exponent.
    #[arg(long, default_value_t = 10)]
    m: u32,
    #[arg(long)]
    svg: PathBuf,
}

#[derive(Args, Debug)]
struct BoxdimArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    system: SystemArgs,
    /// Mesh exponents lo:hi.
    #[arg(long, default_value = "6:15")]
    m: String,
    /// Regression window lo:hi.
    #[arg(long)]
    window: Option<String>,
    /// Rebuild the net at every scale.
    #[arg(long)]
    delta_matching: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    d: Option<u32>,
    /// cor2, cor3 or cor4.
    #[arg(long)]
    corollary: Option<String>,
    /// Scale levels for the modified dimension and γ estimate of a system.
    #[arg(long, default_value_t = 10)]
    k_max: u32,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SeparationArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    lambda_poly: Option<String>,
    #[arg(long)]
    root_index: Option<usize>,
    #[arg(long, default_value_t = 16)]
    n_max: usize,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Deduplicate exactly in Q(λ) and list colliding words.
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OverlapArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long, default_value_t = 8)]
    max_len: usize,
    /// Decide equality in Q(λ).
    #[arg(long)]
    exact: bool,
    /// Float tolerance when not exact.
    #[arg(long, default_value_t = FLOAT_TOL)]
    tol: f64,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SphereArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 6)]
    m: u32,
    #[arg(long, default_value_t = 8)]
    n_max: usize,
    /// Comma separated unit vector.
    #[arg(long, default_value = "1,0,0")]
    x: String,
    /// Use two commuting rotations about one axis.
    #[arg(long)]
    commuting: bool,
    /// Leave out the inverse generators.
    #[arg(long)]
    no_inverses: bool,
    /// Also build the attractor with this contraction.
    #[arg(long)]
    attractor_c: Option<f64>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0.5)]
    lo: f64,
    #[arg(long, default_value_t = 0.668)]
    hi: f64,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 6)]
    n_min: usize,
    #[arg(long, default_value_t = 14)]
    n_max: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Leading samples that also get a box-dimension estimate.
    #[arg(long, default_value_t = 0)]
    boxdim: usize,
    /// Box-dimension window lo:hi.
    #[arg(long, default_value = "8:15")]
    window: String,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn parse_vector(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad vector {s:?}"))))
        .collect()
}

fn parse_range(s: &str) -> Result<(u32, u32)> {
    let bad = || Error::Parse(format!("bad range {s:?}, expected lo:hi"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let lo = a.trim().parse().map_err(|_| bad())?;
    let hi = b.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Opens every output before any compute starts.
fn open_output(path: &Option<PathBuf>, dry_run: bool) -> Result<Option<BufWriter<File>>> {
    match path {
        None => Ok(None),
        Some(p) if dry_run => {
            let parent = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            if !parent.is_dir() {
                return Err(Error::Io(std::io::Error::new(
                    std::io::ErrorKind::NotFound,
                    format!("output directory {} does not exist", parent.display()),
                )));
            }
            Ok(None)
        }
        Some(p) => Ok(Some(BufWriter::new(File::create(p)?))),
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("FRACLAB_THREADS") {
            Ok(v) => Some(
                v.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("FRACLAB_THREADS={v:?} is not a count")))?,
            ),
            Err(_) => None,
        },
    };
    match n {
        Some(0) => Err(Error::domain("thread count must be positive")),
        n => Ok(n),
    }
}

/// Runs the command line with the given arguments (program name first) and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let result = thread_count(common(&cli.command).threads).and_then(|threads| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| Error::domain(format!("thread pool: {e}")))?;
        pool.install(|| dispatch(&cli.command, out, err))
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn common(c: &Command) -> &Common {
    match c {
        Command::Classify(a) => &a.common,
        Command::Render(a) => &a.common,
        Command::Boxdim(a) => &a.common,
        Command::Bounds(a) => &a.common,
        Command::Separation(a) => &a.common,
        Command::Overlaps(a) | Command::Wsp(a) => &a.common,
        Command::Sphere(a) => &a.common,
        Command::Scan(a) => &a.common,
    }
}

fn dispatch(c: &Command, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<()> {
    match c {
        Command::Classify(a) => classify(a, out, err),
        Command::Render(a) => render(a, out),
        Command::Boxdim(a) => boxdim(a, out),
        Command::Bounds(a) => bounds(a, out),
        Command::Separation(a) => separation(a, out, err),
        Command::Overlaps(a) => overlaps(a, out, err),
        Command::Wsp(a) => wsp(a, out, err),
        Command::Sphere(a) => sphere(a, out),
        Command::Scan(a) => scan(a, out),
    }
}

fn classify(a: &ClassifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let input = match (&a.poly, a.lambda) {
        (Some(p), None) => {
            let poly: IntPolynomial = p.parse()?;
            let theta = match a.root_index {
                Some(k) => AlgebraicNumber::new(poly, k, DEFAULT_PRECISION)?,
                None => AlgebraicNumber::largest_real(poly)?,
            };
            LambdaInput::Reciprocal(theta)
        }
        (None, Some(l)) => {
            writeln!(err, "warning: decimal lambda, no algebraic data to classify")?;
            LambdaInput::Real(l)
        }
        _ => return Err(Error::domain("give exactly one of --poly and --lambda")),
    };
    if a.common.dry_run {
        writeln!(out, "plan: classify lambda≈{:.5}", input.value()?)?;
        return Ok(());
    }
    let class = classify_lambda(&input)?;
    writeln!(out, "{class} lambda≈{:.5}", input.value()?)?;
    Ok(())
}

fn render(a: &RenderArgs, out: &mut dyn Write) -> Result<()> {
    let (system, desc) = a.system.build(&a.common)?;
    if a.common.dry_run {
        open_output(&Some(a.svg.clone()), true)?;
        writeln!(out, "plan: render {desc} at mesh 2^-{} to {}", a.m, a.svg.display())?;
        return Ok(());
    }
    let file = open_output(&Some(a.svg.clone()), false)?.expect("svg path");
    let cloud = system.cloud((-(a.m as f64)).exp2())?;
    let (lo, hi) = system.bounding_box();
    let mut file = file;
    render_svg(&cloud, &lo, &hi, &mut file)?;
    file.flush()?;
    writeln!(out, "points={} svg={}", cloud.len(), a.svg.display())?;
    Ok(())
}

fn boxdim(a: &BoxdimArgs, out: &mut dyn Write) -> Result<()> {
    let (system, desc) = a.system.build(&a.common)?;
    let (lo, hi) = parse_range(&a.m)?;
    let ms: Vec<u32> = (lo..=hi).collect();
    let csv = open_output(&a.csv, a.common.dry_run)?;
    if a.common.dry_run {
        writeln!(
            out,
            "plan: boxdim {desc} m={lo}..{hi} {}",
            if a.delta_matching { "net per scale" } else { "single net at the finest scale" }
        )?;
        return Ok(());
    }
    let opts = CurveOptions {
        delta_matching: a.delta_matching,
        ..CurveOptions::default()
    };
    let curve = count_curve(CountSource::System(&system), &ms, &opts)?;
    if let Some(mut w) = csv {
        curve.write_csv(&mut w)?;
        w.flush()?;
    }
    let window = match &a.window {
        Some(w) => parse_range(w)?,
        None => curve
            .default_window()
            .ok_or_else(|| Error::domain("need at least three scales for a fit"))?,
    };
    let est = estimate_dimension(&curve, window)?;
    writeln!(
        out,
        "dim_est≈{:.4} window={}:{}{}",
        est.slope,
        est.window.0,
        est.window.1,
        if curve.truncated { " (truncated by budget)" } else { "" }
    )?;
    Ok(())
}

fn bounds(a: &BoundsArgs, out: &mut dyn Write) -> Result<()> {
    let json = open_output(&a.json, a.common.dry_run)?;
    let mut report = serde_json::Map::new();
    if a.system.given() || a.common.config.is_some() {
        let (system, desc) = a.system.build(&a.common)?;
        let system = system.into_similarity()?;
        if a.common.dry_run {
            writeln!(out, "plan: bounds for {desc} with k_max={}", a.k_max)?;
            return Ok(());
        }
        let s = similarity_dimension(&system.ratios())?;
        let mode = if system.exact().is_some() { Mode::Exact } else { Mode::Float(FLOAT_TOL) };
        let r_min = system.max_ratio().powi(a.k_max as i32);
        let schedule: Vec<f64> = (1..=a.k_max).map(|k| system.max_ratio().powi(k as i32)).collect();
        let star = modified_similarity_dimension(&system, &schedule, mode)?;
        let gamma = gamma_estimate(&system, a.k_max, WORD_BUDGET)?;
        writeln!(
            out,
            "s={s:.6} s_star≈{:.6} (r={r_min:.3e}) gamma_hat≈{:.4}",
            star.s_star, gamma.gamma_hat
        )?;
        report.insert("s".into(), serde_json::json!(s));
        report.insert("modified".into(), serde_json::to_value(&star)?);
        report.insert("gamma".into(), serde_json::to_value(&gamma)?);
    } else {
        let need = |v: Option<f64>, n: &str| v.ok_or_else(|| Error::domain(format!("--{n} is required")));
        let inp = BoundInputs::new(
            need(a.s, "s")?,
            need(a.alpha, "alpha")?,
            need(a.beta, "beta")?,
            need(a.gamma, "gamma")?,
            a.d.ok_or_else(|| Error::domain("--d is required"))?,
        )?;
        let cor = a.corollary.as_deref().map(str::parse::<Corollary>).transpose()?;
        if a.common.dry_run {
            writeln!(out, "plan: max-min envelope for {inp:?}")?;
            return Ok(());
        }
        let r = thm1_bound(&inp)?;
        writeln!(out, "thm1_bound={} x*={}", r.value, r.argmax_x)?;
        report.insert("inputs".into(), serde_json::to_value(inp)?);
        report.insert("thm1".into(), serde_json::to_value(&r)?);
        if let Some(c) = cor {
            let v = corollary_bound(c, &inp)?;
            writeln!(out, "{c}={v}")?;
            report.insert(c.to_string(), serde_json::json!(v));
        }
    }
    if let Some(mut w) = json {
        serde_json::to_writer_pretty(&mut w, &report)?;
        writeln!(w)?;
        w.flush()?;
    }
    Ok(())
}

fn float_warning(err: &mut dyn Write, l: &Lambda) -> Result<()> {
    if !l.is_exact() {
        writeln!(err, "warning: decimal lambda, running in float mode")?;
    }
    Ok(())
}

fn separation(a: &SeparationArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let poly = a.lambda_poly.as_deref().map(str::parse::<IntPolynomial>).transpose()?;
    let l = resolve_lambda(a.lambda.as_deref(), poly.as_ref(), a.root_index)?;
    float_warning(err, &l)?;
    let csv = open_output(&a.csv, a.common.dry_run)?;
    if a.common.dry_run {
        writeln!(out, "plan: separation lambda={:.6} n=1..{} kappa={}", l.value, a.n_max, a.kappa)?;
        return Ok(());
    }
    let rows = separation_table(l.value, a.n_max, a.kappa)?;
    if let Some(mut w) = csv {
        write_separation_csv(&rows, &mut w)?;
        w.flush()?;
    }
    let last = rows.last().ok_or_else(|| Error::domain("n_max must be positive"))?;
    let k_emp = rows.iter().map(|r| r.scaled_gap).fold(f64::INFINITY, f64::min);
    writeln!(
        out,
        "n={} count_A={} scaled_gap={:.6} well_separated={} min_scaled_gap={:.6}",
        last.n, last.distinct, last.scaled_gap, last.well_separated, k_emp
    )?;
    if a.exact {
        let e = sum_set_exact(&l, a.n_max)?;
        writeln!(out, "exact count_A={} collisions={}", e.set.len(), e.collisions.len())?;
        if let Some((u, v)) = e.collisions.first() {
            writeln!(out, "first collision ({u})~({v})")?;
        }
    }
    Ok(())
}

fn overlap_mode(a: &OverlapArgs, system: &PresetSystem, err: &mut dyn Write) -> Result<Mode> {
    let exact = system.as_similarity()?.exact().is_some();
    if a.exact {
        Ok(Mode::Exact)
    } else {
        if !exact {
            writeln!(err, "warning: no algebraic data, running in float mode")?;
        }
        Ok(Mode::Float(a.tol))
    }
}

fn overlaps(a: &OverlapArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let (system, desc) = a.system.build(&a.common)?;
    let mode = overlap_mode(a, &system, err)?;
    let csv = open_output(&a.csv, a.common.dry_run)?;
    if a.common.dry_run {
        writeln!(out, "plan: overlaps {desc} max_len={} mode={mode:?}", a.max_len)?;
        return Ok(());
    }
    let pairs = exact_overlaps(system.as_similarity()?, a.max_len, mode)?;
    if let Some(mut w) = csv {
        writeln!(w, "word_a,word_b,map_distance")?;
        for p in &pairs {
            let word = |v: &[u8]| v.iter().map(|d| d.to_string()).collect::<String>();
            writeln!(w, "{},{},{:.3e}", word(&p.word_a), word(&p.word_b), p.map_distance)?;
        }
        w.flush()?;
    }
    write!(out, "overlaps={}", pairs.len())?;
    if let Some(p) = pairs.first() {
        let word = |v: &[u8]| v.iter().map(|d| d.to_string()).collect::<String>();
        write!(out, " first=({})~({})", word(&p.word_a), word(&p.word_b))?;
    }
    writeln!(out)?;
    Ok(())
}

fn wsp(a: &OverlapArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let (system, desc) = a.system.build(&a.common)?;
    let mode = overlap_mode(a, &system, err)?;
    let csv = open_output(&a.csv, a.common.dry_run)?;
    if a.common.dry_run {
        writeln!(out, "plan: wsp {desc} max_len={} mode={mode:?}", a.max_len)?;
        return Ok(());
    }
    let margin = wsp_margin(system.as_similarity()?, a.max_len, mode)?;
    if let Some(mut w) = csv {
        margin.write_csv(&mut w)?;
        w.flush()?;
    }
    match margin.overall {
        Some(v) => writeln!(out, "wsp_min={v:.6e} pairs={}", margin.pairs)?,
        None => writeln!(out, "wsp_min=none pairs=0")?,
    }
    Ok(())
}

fn sphere(a: &SphereArgs, out: &mut dyn Write) -> Result<()> {
    let rot = match &a.common.config {
        Some(path) => load_config(path)?
            .rotations()?
            .unwrap_or_else(RotationSet::default_pair),
        None if a.commuting => RotationSet::commuting_pair(),
        None => RotationSet::default_pair(),
    };
    let rot = if a.no_inverses { rot.with_inverses(false) } else { rot };
    let x = parse_vector(&a.x)?;
    let csv = open_output(&a.csv, a.common.dry_run)?;
    if a.common.dry_run {
        writeln!(
            out,
            "plan: sphere orbit counts n=0..{} at mesh 2^-{} with {} letters",
            a.n_max,
            a.m,
            rot.alphabet().len()
        )?;
        return Ok(());
    }
    let counts = orbit_counts(&rot, &x, a.n_max, a.m)?;
    if let Some(mut w) = csv {
        counts.write_csv(&mut w)?;
        w.flush()?;
    }
    let list: Vec<String> = counts.counts.iter().map(u64::to_string).collect();
    writeln!(out, "epsilon_hat={:.4} counts={}", counts.epsilon_hat, list.join(","))?;
    if let Some(c) = a.attractor_c {
        let sg = sg_attractor(c, &rot, &x, a.m)?;
        writeln!(
            out,
            "dim_est≈{:.4} target={:.4} alpha={:.4} points={}",
            sg.estimate.slope,
            sg.target,
            sg.alpha,
            sg.cloud.len()
        )?;
    }
    Ok(())
}

fn scan(a: &ScanArgs, out: &mut dyn Write) -> Result<()> {
    let opts = ScanOptions {
        lo: a.lo,
        hi: a.hi,
        samples: a.samples,
        n_min: a.n_min,
        n_max: a.n_max,
        seed: a.seed,
        kappa: a.kappa,
        boxdim_samples: a.boxdim,
        boxdim_window: parse_range(&a.window)?,
    };
    let lambdas = crate::separation::scan_lambdas(&opts)?;
    let csv = open_output(&a.csv, a.common.dry_run)?;
    if a.common.dry_run {
        writeln!(
            out,
            "plan: scan {} samples in [{}, {}] seed={:#x} n={}..{}",
            lambdas.len(),
            a.lo,
            a.hi,
            a.seed,
            a.n_min,
            a.n_max
        )?;
        return Ok(());
    }
    let rows = monte_carlo_scan(&opts)?;
    if let Some(mut w) = csv {
        write_scan_csv(&rows, &mut w)?;
        w.flush()?;
    }
    let passed = rows.iter().filter(|r| r.all_pass).count();
    writeln!(out, "passed={passed}/{}", rows.len())?;
    Ok(())
}

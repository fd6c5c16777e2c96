//! The `matgraph` command line.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cgr::{export_compgraph, import_any, parse_cgr, render_cgr, AnyGraph, CgrDocument, CoeffType};
use crate::codegen::{gen_code_to, Dialect, EmitTarget};
use crate::degopt::{embed_degopt, graph_degopt, graph_horner, graph_monomial, graph_ps, EmbedScheme};
use crate::error::{Error, Result};
use crate::error_analysis::{
    compute_bwd_theta_exp_with, compute_fwd_theta_with, eval_runerr, RunErrMode, ThetaOptions, ThetaResult,
    THETA_CSV_HEADER,
};
use crate::eval::eval_graph_input;
use crate::generators::{graph_denman_beavers, graph_exp_pade_ss, graph_newton_schulz_scaled};
use crate::graph::{compress_graph, ComputationGraph, INPUT_A};
use crate::numerics::{BigReal, Complex, Matrix, Real, Scalar, TruncSeries};
use crate::optimizer::{max_abs, opt_gauss_newton, residual, Discretization, ErrType, GNConfig, LinLsqr, Target};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "matgraph", version, about = "Computational graphs for matrix functions", args_override_self = true)]
pub struct Cli {
    /// File of `key=value` lines; its values override command-line flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a graph from the generator catalogue.
    Generate(GenerateArgs),
    /// Evaluate a graph at a matrix (CSV) or a scalar.
    Eval(EvalArgs),
    /// Fit the coefficients to a target function by Gauss-Newton.
    Optimize(OptimizeArgs),
    /// Backward (or forward) θ bound of an exponential approximant.
    Certify(CertifyArgs),
    /// Emit MATLAB or C source.
    Codegen(CodegenArgs),
    /// Remove dangling, trivial and duplicate nodes.
    Compress(CompressArgs),
    /// Change the coefficient type.
    Convert(ConvertArgs),
    /// Running round-off estimate of a scalar evaluation.
    Runerr(RunerrArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Monomial,
    Horner,
    Ps,
    Degopt,
    DenmanBeavers,
    NewtonSchulz,
    PadeExp,
    TaylorExp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Embed {
    Monomial,
    Horner,
    Ps,
}

impl From<Embed> for EmbedScheme {
    fn from(e: Embed) -> Self {
        match e {
            Embed::Monomial => EmbedScheme::Monomial,
            Embed::Horner => EmbedScheme::Horner,
            Embed::Ps => EmbedScheme::Ps,
        }
    }
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub scheme: Scheme,
    /// Monomial coefficients, lowest degree first.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Vec<f64>,
    #[arg(long, default_value_t = 4)]
    pub iters: usize,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub squarings: usize,
    /// How `degopt` and `taylor-exp` lay out the polynomial.
    #[arg(long, value_enum)]
    pub embed: Option<Embed>,
    /// Coefficient precision in bits; 53 writes binary64.
    #[arg(long, env = "MATGRAPH_PRECISION", default_value_t = 53)]
    pub precision: u32,
    #[arg(long)]
    pub compress: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    pub graph: PathBuf,
    /// CSV file with one matrix row per line; complex entries as `a+bi`.
    #[arg(long, conflicts_with = "scalar")]
    pub matrix: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub scalar: Option<String>,
    /// Id the argument is bound to (defaults to the file's declared input).
    #[arg(long)]
    pub input: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Exp,
    Sqrt1p,
    Series,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ErrArg {
    Abs,
    Rel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LsqArg {
    Real,
    Complex,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value = "exp")]
    pub target: TargetArg,
    /// Coefficients of the target series, one per line (for `--target series`).
    #[arg(long)]
    pub series_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub center_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub center_im: f64,
    #[arg(long, default_value_t = 0.45)]
    pub radius: f64,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long, value_enum, default_value = "rel")]
    pub errtype: ErrArg,
    #[arg(long, default_value_t = 200)]
    pub maxiter: usize,
    #[arg(long, default_value_t = 4e-15)]
    pub stoptol: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1e-15)]
    pub droptol: f64,
    #[arg(long)]
    pub droptol_search: bool,
    #[arg(long)]
    pub backoff: bool,
    #[arg(long, value_enum, default_value = "real")]
    pub linlsqr: LsqArg,
    #[arg(long, env = "MATGRAPH_PRECISION", default_value_t = 256)]
    pub precision: u32,
    #[arg(long)]
    pub perturbation: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Stop when the residual exceeds this multiple of the best so far.
    #[arg(long, default_value_t = 10.0)]
    pub divergence_factor: f64,
    /// Points on the validation circle, evaluated in binary64.
    #[arg(long, default_value_t = 1000)]
    pub validate: usize,
    /// Print one line per iteration.
    #[arg(long)]
    pub verbose: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Writes `<report>.json` and `<report>.csv`.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Store the result in binary64 instead of the working precision.
    #[arg(long)]
    pub float64: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ThetaArg {
    Backward,
    Forward,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    pub graph: PathBuf,
    /// Unit roundoff; defaults to 2^-53.
    #[arg(long)]
    pub u: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub nterms: usize,
    #[arg(long, value_enum, default_value = "backward")]
    pub kind: ThetaArg,
    #[arg(long, env = "MATGRAPH_PRECISION", default_value_t = 1024)]
    pub precision: u32,
    /// Name in the table row (defaults to the file stem).
    #[arg(long)]
    pub name: Option<String>,
    /// Cost column of the table row (defaults to the multiplication count).
    #[arg(long)]
    pub m: Option<usize>,
    /// Append the row to this CSV file, writing the header if it is new.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DialectArg {
    Matlab,
    C,
}

#[derive(Args, Debug)]
pub struct CodegenArgs {
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value = "matlab")]
    pub dialect: DialectArg,
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub fuse: bool,
    /// Output path; the extension is set by the dialect.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CompressArgs {
    pub graph: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ConvertArgs {
    pub graph: PathBuf,
    /// Coefficient type tag, e.g. Float64, BigFloat256, ComplexFloat64.
    #[arg(long)]
    pub to: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Bound,
    Rand,
}

#[derive(Args, Debug)]
pub struct RunerrArgs {
    pub graph: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long)]
    pub input: Option<String>,
    #[arg(long, value_enum, default_value = "bound")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to binary64 machine epsilon.
    #[arg(long)]
    pub u: Option<f64>,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Parse { .. } => EXIT_IO,
        Error::Numerical(_) | Error::Singular(_) | Error::ZeroDivision { .. } | Error::Precondition(_) => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

// `--config` values are appended as flags after the user's arguments so that
// they win (flags override themselves).
fn expand_config(args: Vec<OsString>) -> std::result::Result<Vec<OsString>, String> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = args.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut out = args;
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key=value", ln + 1))?;
        let flag = format!("--{}", k.trim().replace('_', "-"));
        match v.trim() {
            "true" => out.push(flag.into()),
            "false" => {}
            v => {
                out.push(flag.into());
                out.push(v.into());
            }
        }
    }
    Ok(out)
}

/// Parse and run; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_IO;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> Result<()> {
    match cmd {
        Command::Generate(a) => cmd_generate(&a, out),
        Command::Eval(a) => cmd_eval(&a, out),
        Command::Optimize(a) => cmd_optimize(&a, out, err),
        Command::Certify(a) => cmd_certify(&a, out, err),
        Command::Codegen(a) => cmd_codegen(&a, out),
        Command::Compress(a) => cmd_compress(&a, out),
        Command::Convert(a) => cmd_convert(&a, out),
        Command::Runerr(a) => cmd_runerr(&a, out),
    }
}

macro_rules! with_doc {
    ($any:expr, $d:ident => $body:expr) => {
        match $any {
            AnyGraph::F64($d) => $body,
            AnyGraph::C64($d) => $body,
            AnyGraph::Big($d) => $body,
            AnyGraph::CBig($d) => $body,
        }
    };
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Unsupported(msg.into())
}

fn taylor_exp_coeffs<T: Scalar>(degree: usize, prec: u32) -> Vec<T> {
    TruncSeries::<T>::exp_series(degree + 1, prec.max(53)).into_coeffs()
}

fn build<T: Scalar>(a: &GenerateArgs) -> Result<ComputationGraph<T>> {
    let p = a.precision;
    let coeffs = || -> Result<Vec<T>> {
        if a.coeffs.is_empty() {
            return Err(usage("--coeffs is required for this scheme"));
        }
        Ok(a.coeffs.iter().map(|c| T::from_f64_prec(*c, p)).collect())
    };
    let degree = || a.degree.ok_or_else(|| usage("--degree is required for this scheme"));
    let g = match a.scheme {
        Scheme::Monomial => graph_monomial(&coeffs()?)?.0,
        Scheme::Horner => graph_horner(&coeffs()?)?.0,
        Scheme::Ps => graph_ps(&coeffs()?)?.0,
        Scheme::Degopt => {
            let e = a.embed.unwrap_or(Embed::Monomial);
            graph_degopt(&embed_degopt(e.into(), &coeffs()?, p)?)?.0
        }
        Scheme::DenmanBeavers => graph_denman_beavers(a.iters)?.0,
        Scheme::NewtonSchulz => graph_newton_schulz_scaled(a.iters, T::from_f64_prec(a.alpha, p))?.0,
        Scheme::PadeExp => graph_exp_pade_ss(degree()?, a.squarings, p)?.0,
        Scheme::TaylorExp => {
            let c = taylor_exp_coeffs::<T>(degree()?, p);
            match a.embed {
                None | Some(Embed::Monomial) => graph_monomial(&c)?.0,
                Some(Embed::Horner) => graph_horner(&c)?.0,
                Some(Embed::Ps) => graph_ps(&c)?.0,
            }
        }
    };
    let mut g = g;
    if a.compress {
        compress_graph(&mut g);
    }
    Ok(g)
}

fn cmd_generate(a: &GenerateArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let n = if a.precision <= 53 {
        let g = build::<f64>(a)?;
        export_compgraph(&g, &a.out)?;
        g.topo_order().len()
    } else {
        let g = build::<BigReal>(a)?;
        export_compgraph(&g, &a.out)?;
        g.topo_order().len()
    };
    let _ = writeln!(out, "nodes: {n}");
    Ok(())
}

/// Read a CSV matrix; each line is a row, entries real or `a+bi`.
pub fn read_matrix_csv(text: &str) -> Result<Matrix<Complex<f64>>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<Complex<f64>>> = line
            .split(',')
            .map(|t| {
                <Complex<f64> as Scalar>::parse_prec(t.trim(), 53)
                    .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("bad matrix entry {t:?}") })
            })
            .collect();
        rows.push(row?);
    }
    Matrix::from_rows(rows)
}

/// CSV text of a matrix; real entries are printed without an imaginary part
/// when the whole matrix is real.
pub fn write_matrix_csv(m: &Matrix<Complex<f64>>) -> String {
    let real = m.data().iter().all(|z| z.im == 0.0);
    let mut s = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|j| {
                let z = m.get(i, j);
                if real {
                    format!("{:?}", z.re)
                } else {
                    z.to_roundtrip()
                }
            })
            .collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn to_c64<S: Scalar>(m: &Matrix<S>) -> Matrix<Complex<f64>> {
    m.map(|z| {
        let c = z.to_complex();
        Complex::new(c.re.to_f64(), c.im.to_f64())
    })
}

fn eval_doc<T: Scalar>(d: &CgrDocument<T>, x: &Matrix<Complex<f64>>, input: &str) -> Result<Matrix<Complex<f64>>> {
    let prec = d.graph.precision();
    let real = !T::IS_COMPLEX && x.data().iter().all(|z| z.im == 0.0);
    if prec <= 53 {
        if real {
            let g: ComputationGraph<f64> = d.graph.convert(53)?;
            let v = eval_graph_input(&g, &x.map(|z| z.re), input)?;
            Ok(to_c64(&v))
        } else {
            let g: ComputationGraph<Complex<f64>> = d.graph.convert(53)?;
            Ok(eval_graph_input(&g, x, input)?)
        }
    } else if real {
        let g: ComputationGraph<BigReal> = d.graph.convert(prec)?;
        let v = eval_graph_input(&g, &x.map(|z| BigReal::from_f64(z.re, prec)), input)?;
        Ok(to_c64(&v))
    } else {
        let g: ComputationGraph<Complex<BigReal>> = d.graph.convert(prec)?;
        let xm = x.map(|z| Complex::new(BigReal::from_f64(z.re, prec), BigReal::from_f64(z.im, prec)));
        Ok(to_c64(&eval_graph_input(&g, &xm, input)?))
    }
}

fn cmd_eval(a: &EvalArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let any = import_any(&a.graph)?;
    let x = match (&a.matrix, &a.scalar) {
        (Some(p), _) => read_matrix_csv(&std::fs::read_to_string(p)?)?,
        (None, Some(s)) => {
            let z = <Complex<f64> as Scalar>::parse_prec(s, 53).ok_or_else(|| usage(format!("bad scalar {s:?}")))?;
            Matrix::from_vec(1, 1, vec![z])?
        }
        (None, None) => return Err(usage("give --matrix or --scalar")),
    };
    if !x.is_square() {
        return Err(Error::Dimension("the argument must be square".into()));
    }
    let v = with_doc!(&any, d => {
        let input = a.input.clone().unwrap_or_else(|| d.input.clone());
        eval_doc(d, &x, &input)?
    });
    let text = write_matrix_csv(&v);
    match &a.out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    Ok(())
}

fn read_series(path: &Path, prec: u32) -> Result<Vec<Complex<BigReal>>> {
    let text = std::fs::read_to_string(path)?;
    let mut c = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        c.push(
            <Complex<BigReal> as Scalar>::parse_prec(t, prec)
                .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("bad coefficient {t:?}") })?,
        );
    }
    if c.is_empty() {
        return Err(Error::Parse { line: 1, msg: "series file has no coefficients".into() });
    }
    Ok(c)
}

/// Optimize in working precision `T`, then validate in binary64.
fn optimize_in<T>(g: &mut ComputationGraph<T>, a: &OptimizeArgs, target: &Target, err: &mut dyn std::io::Write) -> Result<(crate::optimizer::GNReport, f64)>
where
    T: Scalar<Real = BigReal> + crate::numerics::Embed<Complex<BigReal>>,
{
    let discr = Discretization::<BigReal>::disk(Complex::new(a.center_re, a.center_im), a.radius, a.points, a.precision);
    let cfg = GNConfig {
        errtype: if a.errtype == ErrArg::Rel { ErrType::Rel } else { ErrType::Abs },
        stoptol: a.stoptol,
        maxiter: a.maxiter,
        gamma: a.gamma,
        droptol: a.droptol,
        droptol_search: a.droptol_search,
        linlsqr: if a.linlsqr == LsqArg::Real { LinLsqr::RealSvd } else { LinLsqr::ComplexSvd },
        logger: u8::from(a.verbose),
        perturbation: a.perturbation,
        seed: a.seed,
        backoff: a.backoff,
        divergence_factor: a.divergence_factor,
    };
    let refs = g.free_coeff_refs();
    let rep = opt_gauss_newton(g, target, &discr, &cfg, &refs)?;
    let _ = err.flush();
    let val = if a.validate > 0 {
        let vd = Discretization::<f64>::disk(Complex::new(a.center_re, a.center_im), a.radius, a.validate, 53);
        let g64: ComputationGraph<Complex<f64>> = g.convert(53)?;
        max_abs(&residual(&g64, target, &vd, cfg.errtype)?)
    } else {
        f64::NAN
    };
    Ok((rep, val))
}

fn cmd_optimize(a: &OptimizeArgs, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> Result<()> {
    let any = import_any(&a.graph)?;
    let target = match a.target {
        TargetArg::Exp => Target::Exp,
        TargetArg::Sqrt1p => Target::Sqrt1p,
        TargetArg::Series => {
            let p = a.series_file.as_ref().ok_or_else(|| usage("--target series needs --series-file"))?;
            Target::Series(read_series(p, a.precision)?)
        }
    };
    let p = a.precision;
    let (rep, val, text) = if a.linlsqr == LsqArg::Real {
        let mut g: ComputationGraph<BigReal> = with_doc!(&any, d => d.graph.convert(p)?);
        let (rep, val) = optimize_in(&mut g, a, &target, err)?;
        let text = if a.float64 { render_cgr(&g.convert::<f64>(53)?, &[]) } else { render_cgr(&g, &[]) };
        (rep, val, text)
    } else {
        let mut g: ComputationGraph<Complex<BigReal>> = with_doc!(&any, d => d.graph.convert(p)?);
        let (rep, val) = optimize_in(&mut g, a, &target, err)?;
        let text = if a.float64 { render_cgr(&g.convert::<Complex<f64>>(53)?, &[]) } else { render_cgr(&g, &[]) };
        (rep, val, text)
    };
    std::fs::write(&a.out, text)?;
    if let Some(r) = &a.report {
        std::fs::write(r.with_extension("json"), rep.to_json())?;
        std::fs::write(r.with_extension("csv"), rep.to_csv())?;
    }
    let _ = writeln!(
        out,
        "iterations: {}\ninitial: {:e}\nfinal: {:e}\nconverged: {}\ndiverged: {}\nvalidation: {:e}",
        rep.iterations,
        rep.initial_residual,
        rep.final_residual(),
        rep.converged,
        rep.diverged,
        val
    );
    Ok(())
}

fn certify_doc<T: Scalar>(d: &CgrDocument<T>, a: &CertifyArgs) -> Result<ThetaResult> {
    let opts = ThetaOptions { prec: a.precision, ..Default::default() };
    let u = match a.u {
        Some(u) => BigReal::from_f64(u, a.precision),
        None => BigReal::from_i64_2exp(1, -53, a.precision),
    };
    match a.kind {
        ThetaArg::Backward => compute_bwd_theta_exp_with(&d.graph, &u, a.nterms, &opts),
        ThetaArg::Forward => {
            let f = TruncSeries::<BigReal>::exp_series(a.nterms, a.precision);
            compute_fwd_theta_with(&d.graph, &f, &u, &opts)
        }
    }
}

fn cmd_certify(a: &CertifyArgs, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> Result<()> {
    let any = import_any(&a.graph)?;
    let (res, m) = with_doc!(&any, d => {
        let (mults, ldivs, _) = d.graph.op_counts();
        let m = a.m.unwrap_or(mults + ldivs);
        if a.kind == ThetaArg::Forward && d.graph.has_ldiv() {
            return Err(Error::Unsupported("forward θ of a graph with an LDIV node".into()));
        }
        match certify_doc(d, a) {
            Ok(r) => (Some(r), m),
            // e^{-z} g(z) - 1 does not vanish at 0: no radius is certified
            Err(Error::Precondition(msg)) if msg.contains("constant term") => {
                let _ = writeln!(err, "theta=0: {msg}");
                (None, m)
            }
            Err(e) => return Err(e),
        }
    });
    let name = a.name.clone().unwrap_or_else(|| a.graph.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    let row = match &res {
        Some(r) => {
            if r.zero {
                let _ = writeln!(err, "theta=0: bound exceeds u at the origin");
            }
            if r.capped {
                let _ = writeln!(err, "theta capped at the end of the trusted interval");
            }
            r.csv_row(&name, m)
        }
        None => format!("{},{},0.0,{:e},{}", name, m, a.u.unwrap_or(crate::numerics::U_BINARY64), a.nterms),
    };
    match &a.table {
        Some(p) => {
            let exists = p.exists();
            let mut f = std::fs::OpenOptions::new().create(true).append(true).open(p)?;
            if !exists {
                writeln!(f, "{THETA_CSV_HEADER}")?;
            }
            writeln!(f, "{row}")?;
        }
        None => {
            let _ = writeln!(out, "{THETA_CSV_HEADER}\n{row}");
        }
    }
    Ok(())
}

fn cmd_codegen(a: &CodegenArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let any = import_any(&a.graph)?;
    let dialect = match a.dialect {
        DialectArg::Matlab => Dialect::Matlab,
        DialectArg::C => Dialect::CBlas,
    };
    let name = a
        .name
        .clone()
        .or_else(|| a.out.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .ok_or_else(|| usage("cannot derive a function name; pass --name"))?;
    let mut t = EmitTarget::new(dialect, &name).fused(a.fuse);
    let code = with_doc!(&any, d => {
        t.input = d.input.clone();
        gen_code_to(&d.graph, &t, &a.out)?
    });
    let _ = writeln!(out, "statements: {}\npeak_buffers: {}", code.statements, code.schedule.peak_buffers);
    Ok(())
}

fn cmd_compress(a: &CompressArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let text = std::fs::read_to_string(&a.graph)?;
    let any = crate::cgr::parse_cgr_any(&text)?;
    let (before, after, s) = with_doc!(any, d => {
        let mut g = d.graph.clone();
        let before = g.topo_order().len();
        compress_graph(&mut g);
        (before, g.topo_order().len(), render_cgr(&g, &d.metadata))
    });
    std::fs::write(&a.out, s)?;
    let _ = writeln!(out, "nodes: {before} -> {after}");
    Ok(())
}

fn convert_text<T: Scalar>(text: &str, ct: CoeffType) -> Result<String> {
    let d = parse_cgr::<T>(text)?;
    let p = ct.prec();
    Ok(match (ct.complex, ct.bits) {
        (false, None) => render_cgr(&d.graph.convert::<f64>(p)?, &d.metadata),
        (true, None) => render_cgr(&d.graph.convert::<Complex<f64>>(p)?, &d.metadata),
        (false, Some(_)) => render_cgr(&d.graph.convert::<BigReal>(p)?, &d.metadata),
        (true, Some(_)) => render_cgr(&d.graph.convert::<Complex<BigReal>>(p)?, &d.metadata),
    })
}

fn cmd_convert(a: &ConvertArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let text = std::fs::read_to_string(&a.graph)?;
    let ct = CoeffType::parse(&a.to).map_err(|_| usage(format!("unknown coefficient type {:?}", a.to)))?;
    let src = CoeffType::parse(crate::cgr::parse_cgr_any(&text)?.tag())?;
    let s = match (src.complex, src.bits) {
        (false, None) => convert_text::<f64>(&text, ct)?,
        (true, None) => convert_text::<Complex<f64>>(&text, ct)?,
        (false, Some(_)) => convert_text::<BigReal>(&text, ct)?,
        (true, Some(_)) => convert_text::<Complex<BigReal>>(&text, ct)?,
    };
    std::fs::write(&a.out, s)?;
    let _ = writeln!(out, "written: {}", a.out.display());
    Ok(())
}

fn cmd_runerr(a: &RunerrArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let any = import_any(&a.graph)?;
    let (g, input): (ComputationGraph<f64>, String) = with_doc!(&any, d => (d.graph.convert(53)?, d.input.clone()));
    let input = a.input.clone().unwrap_or(if g.free_inputs().contains(&input) { input } else { INPUT_A.to_string() });
    let mode = match a.mode {
        ModeArg::Bound => RunErrMode::Bound,
        ModeArg::Rand => RunErrMode::Rand { seed: a.seed },
    };
    let u = a.u.unwrap_or(f64::EPSILON);
    let r = eval_runerr(&g, &a.x, &input, mode, &u)?;
    let _ = writeln!(out, "value: {:?}\ndelta: {:e}", r.value, r.delta);
    if r.zero_lincomb {
        let _ = writeln!(out, "warning: a linear combination evaluated to zero");
    }
    Ok(())
}

/// Entry point of the binary.
pub fn main_entry() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

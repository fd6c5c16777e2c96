//! Gauss-Newton fitting of graph coefficients to a target function sampled
//! on the boundary of a disk.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::autodiff::eval_jac;
use crate::error::{Error, Result};
use crate::eval::{eval_graph, Pointwise};
use crate::graph::{CoeffRef, ComputationGraph};
use crate::numerics::svd::PinvFactor;
use crate::numerics::{BigReal, Complex, Embed, Matrix, Real, Scalar};

/// How the sample points were produced.
#[derive(Clone, Debug, PartialEq)]
pub enum DiscrDescriptor {
    Disk { center: (f64, f64), radius: f64, count: usize },
    Explicit,
}

/// Ordered sample points.
#[derive(Clone, Debug)]
pub struct Discretization<R> {
    pub points: Vec<Complex<R>>,
    pub descriptor: DiscrDescriptor,
}

impl<R: Real> Discretization<R> {
    /// `center + r exp(2 pi i k / (n-1))` for `k = 0..n`; the first and last
    /// points coincide.
    pub fn disk(center: Complex<f64>, radius: f64, n: usize, prec: u32) -> Self {
        let pi2 = R::pi(prec).mul_pow2(1);
        let c = Complex::new(R::from_f64_prec(center.re, prec), R::from_f64_prec(center.im, prec));
        let r = R::from_f64_prec(radius, prec);
        let denom = R::from_i64_prec(n.saturating_sub(1).max(1) as i64, prec);
        let points = (0..n)
            .map(|k| {
                let t = pi2.clone() * &R::from_i64_prec(k as i64, prec) / &denom;
                Complex::new(c.re.clone() + &(r.clone() * &t.cos()), c.im.clone() + &(r.clone() * &t.sin()))
            })
            .collect();
        Discretization { points, descriptor: DiscrDescriptor::Disk { center: (center.re, center.im), radius, count: n } }
    }

    pub fn explicit(points: Vec<Complex<R>>) -> Self {
        Discretization { points, descriptor: DiscrDescriptor::Explicit }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Function to approximate.
#[derive(Clone, Debug)]
pub enum Target {
    Exp,
    /// Principal branch of `sqrt(1 + z)`.
    Sqrt1p,
    /// Power series `sum c_j z^j`, truncated at the given coefficients.
    Series(Vec<Complex<BigReal>>),
}

pub fn complex_exp<R: Real>(z: &Complex<R>) -> Complex<R> {
    let m = z.re.exp();
    Complex::new(m.clone() * &z.im.cos(), m * &z.im.sin())
}

/// Principal square root.
pub fn complex_sqrt<R: Real>(z: &Complex<R>) -> Complex<R> {
    let zero = R::from_i64_prec(0, 2);
    let r = z.re.hypot(&z.im);
    let re = ((r.clone() + &z.re).mul_pow2(-1)).sqrt();
    let mut im = ((r - &z.re).mul_pow2(-1)).max_of(zero.clone()).sqrt();
    if z.im < zero {
        im = -im;
    }
    Complex::new(re, im)
}

impl Target {
    pub fn eval<R: Real>(&self, z: &Complex<R>) -> Complex<R> {
        let prec = z.re.prec().max(z.im.prec());
        match self {
            Target::Exp => complex_exp(z),
            Target::Sqrt1p => {
                let one = R::from_i64_prec(1, 2);
                complex_sqrt(&Complex::new(z.re.clone() + &one, z.im.clone()))
            }
            Target::Series(c) => {
                let mut acc = Complex::new(R::from_i64_prec(0, 2), R::from_i64_prec(0, 2));
                for cj in c.iter().rev() {
                    let cj = Complex::new(R::from_big(&cj.re, prec), R::from_big(&cj.im, prec));
                    acc = acc * z + cj;
                }
                acc
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Target::Exp => "exp",
            Target::Sqrt1p => "sqrt1p",
            Target::Series(_) => "series",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrType {
    Abs,
    Rel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinLsqr {
    /// Complex step; needs complex coefficients.
    ComplexSvd,
    /// Stack real and imaginary parts; keeps coefficients real.
    RealSvd,
}

#[derive(Clone, Debug)]
pub struct GNConfig {
    pub errtype: ErrType,
    pub stoptol: f64,
    pub maxiter: usize,
    pub gamma: f64,
    pub droptol: f64,
    /// Try the drop tolerances `droptol * 10^k` up to `1e-2` in every
    /// iteration and keep the step with the smallest `||r||_2`.
    pub droptol_search: bool,
    pub linlsqr: LinLsqr,
    /// 0 is silent; 1 prints one line per iteration to stderr.
    pub logger: u8,
    /// Standard deviation of a one-time Gaussian perturbation of the coefficients.
    pub perturbation: Option<f64>,
    pub seed: u64,
    /// Halve the step length when the residual grows and retry; restore it after a success.
    pub backoff: bool,
    /// Stop when the residual exceeds this multiple of the best one seen.
    pub divergence_factor: f64,
}

impl Default for GNConfig {
    fn default() -> Self {
        GNConfig {
            errtype: ErrType::Rel,
            stoptol: 4e-15,
            maxiter: 200,
            gamma: 1.0,
            droptol: 1e-15,
            droptol_search: false,
            linlsqr: LinLsqr::RealSvd,
            logger: 0,
            perturbation: None,
            seed: 0,
            backoff: false,
            divergence_factor: 10.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GNReport {
    pub iterations: usize,
    /// `max |r_i|` after each iteration.
    pub residual_history: Vec<f64>,
    pub initial_residual: f64,
    pub converged: bool,
    pub diverged: bool,
    /// Set when every singular value was dropped in some step.
    pub zero_step: bool,
}

impl GNReport {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(self.initial_residual)
    }

    /// Iteration, residual pairs; row 0 is the starting point.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("iteration,residual\n");
        s.push_str(&format!("0,{:e}\n", self.initial_residual));
        for (i, r) in self.residual_history.iter().enumerate() {
            s.push_str(&format!("{},{:e}\n", i + 1, r));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "iterations": self.iterations,
            "initial_residual": self.initial_residual,
            "residual_history": self.residual_history,
            "converged": self.converged,
            "diverged": self.diverged,
            "zero_step": self.zero_step,
        })
        .to_string()
    }
}

fn target_values<R: Real>(f: &Target, discr: &Discretization<R>, errtype: ErrType) -> Result<Vec<Complex<R>>> {
    let vals: Vec<Complex<R>> = discr.points.iter().map(|z| f.eval(z)).collect();
    if errtype == ErrType::Rel {
        let zero = R::from_i64_prec(0, 2);
        if let Some(i) = vals.iter().position(|v| v.re == zero && v.im == zero) {
            return Err(Error::Numerical(format!(
                "target vanishes at sample point {i}; use the absolute error instead"
            )));
        }
    }
    Ok(vals)
}

fn scaled_residual<R: Real>(g: &[Complex<R>], f: &[Complex<R>], errtype: ErrType) -> Vec<Complex<R>> {
    g.iter()
        .zip(f)
        .map(|(gv, fv)| {
            let r = gv.clone() - fv.clone();
            match errtype {
                ErrType::Abs => r,
                ErrType::Rel => r / fv.clone(),
            }
        })
        .collect()
}

/// `r_i = g(z_i) - f(z_i)`, divided by `f(z_i)` for the relative error.
pub fn residual<T>(g: &ComputationGraph<T>, f: &Target, discr: &Discretization<<T as Scalar>::Real>, errtype: ErrType) -> Result<Vec<Complex<<T as Scalar>::Real>>>
where
    T: Scalar,
    T: Embed<Complex<<T as Scalar>::Real>>,
    Complex<<T as Scalar>::Real>: Scalar,
{
    let fv = target_values(f, discr, errtype)?;
    let gv = eval_graph(g, &Pointwise(discr.points.clone()))?.0;
    Ok(scaled_residual(&gv, &fv, errtype))
}

fn norm2<R: Real>(r: &[Complex<R>]) -> R {
    let mut acc = R::from_i64_prec(0, 2);
    for v in r {
        acc += v.re.clone() * &v.re;
        acc += v.im.clone() * &v.im;
    }
    acc.sqrt()
}

pub fn max_abs<R: Real>(r: &[Complex<R>]) -> f64 {
    r.iter().map(|v| v.re.hypot(&v.im).to_f64()).fold(0.0, f64::max)
}

/// Factorized least-squares problem of one Gauss-Newton step.
pub struct StepFactor<R> {
    factor: PinvFactor<R>,
    k: usize,
    linlsqr: LinLsqr,
}

impl<R: Real> StepFactor<R>
where
    Complex<R>: Scalar<Real = R>,
{
    pub fn new(j: &Matrix<Complex<R>>, r: &[Complex<R>], linlsqr: LinLsqr) -> Self {
        let (n, k) = (j.rows(), j.cols());
        let mut rhs: Vec<R> = r.iter().map(|v| v.re.clone()).collect();
        rhs.extend(r.iter().map(|v| v.im.clone()));
        let a = match linlsqr {
            LinLsqr::RealSvd => Matrix::from_fn(2 * n, k, |i, c| {
                let v = j.get(i % n, c);
                if i < n { v.re.clone() } else { v.im.clone() }
            }),
            LinLsqr::ComplexSvd => crate::numerics::svd::real_embedding(j),
        };
        StepFactor { factor: PinvFactor::new(&a, &rhs), k, linlsqr }
    }

    /// The step for one drop tolerance, and whether every singular value was dropped.
    pub fn step(&self, droptol: f64) -> (Vec<Complex<R>>, bool) {
        let sol = self.factor.solve(droptol);
        let zero = || R::from_i64_prec(0, 2);
        let d = match self.linlsqr {
            LinLsqr::RealSvd => sol.x.into_iter().map(|x| Complex::new(x, zero())).collect(),
            LinLsqr::ComplexSvd => {
                let (re, im) = sol.x.split_at(self.k);
                re.iter().zip(im).map(|(a, b)| Complex::new(a.clone(), b.clone())).collect()
            }
        };
        (d, sol.rank == 0)
    }
}

/// Step `delta` minimizing `||J delta - r||` through the truncated
/// pseudoinverse. Returns the step (as complex numbers, with zero imaginary
/// parts for the real variant) and whether every singular value was dropped.
pub fn gn_step<R: Real>(j: &Matrix<Complex<R>>, r: &[Complex<R>], linlsqr: LinLsqr, droptol: f64) -> (Vec<Complex<R>>, bool)
where
    Complex<R>: Scalar<Real = R>,
{
    StepFactor::new(j, r, linlsqr).step(droptol)
}

/// Gauss-Newton iteration `c <- c - gamma delta` on the coefficients `refs`
/// until `max |r_i| <= stoptol` or `maxiter` steps. The graph keeps the best
/// coefficients seen if the iteration diverges.
pub fn opt_gauss_newton<T>(
    g: &mut ComputationGraph<T>,
    f: &Target,
    discr: &Discretization<<T as Scalar>::Real>,
    config: &GNConfig,
    refs: &[CoeffRef],
) -> Result<GNReport>
where
    T: Scalar,
    T: Embed<Complex<<T as Scalar>::Real>>,
    Complex<<T as Scalar>::Real>: Scalar<Real = T::Real>,
{
    if refs.is_empty() {
        return Err(Error::Precondition("no coefficients to optimize".into()));
    }
    if !(config.gamma >= 0.0 && config.gamma <= 1.0) || config.droptol < 0.0 {
        return Err(Error::Precondition("need 0 <= gamma <= 1 and droptol >= 0".into()));
    }
    if config.linlsqr == LinLsqr::ComplexSvd && !T::IS_COMPLEX {
        return Err(Error::Precondition("complex steps need a graph with complex coefficients".into()));
    }
    let prec = discr.points.first().map(|z| z.re.prec()).unwrap_or(53);
    if let Some(sd) = config.perturbation {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let normal = Normal::new(0.0, sd).map_err(|e| Error::Precondition(e.to_string()))?;
        for r in refs {
            let c = g.get_coeff(r)?;
            let noise = T::from_f64_prec(normal.sample(&mut rng), prec);
            g.set_coeff(r, c + &noise)?;
        }
    }
    let fv = target_values(f, discr, config.errtype)?;
    let mut report = GNReport::default();
    let mut coeffs = g.get_coeffs(refs)?;
    let mut best = coeffs.clone();
    let gv = eval_graph(g, &Pointwise(discr.points.clone()))?.0;
    let mut res = scaled_residual(&gv, &fv, config.errtype);
    let mut nrm = max_abs(&res);
    report.initial_residual = nrm;
    let mut best_nrm = nrm;
    let mut l2 = norm2(&res);
    let mut jac_cache: Option<Matrix<Complex<T::Real>>> = None;
    let mut gamma = config.gamma;
    let mut droptol_used;
    while nrm > config.stoptol && report.iterations < config.maxiter {
        let jm = match jac_cache.take() {
            Some(j) => j,
            None => {
                let mut jm = eval_jac(g, &discr.points, refs)?.entries;
                if config.errtype == ErrType::Rel {
                    for i in 0..jm.rows() {
                        for k in 0..jm.cols() {
                            let v = jm.get(i, k).clone() / fv[i].clone();
                            jm.set(i, k, v);
                        }
                    }
                }
                jm
            }
        };
        let factor = StepFactor::new(&jm, &res, config.linlsqr);
        let mut tols = vec![config.droptol];
        if config.droptol_search {
            let mut t = config.droptol.max(1e-300) * 10.0;
            while t <= 1.0001e-2 {
                tols.push(t);
                t *= 10.0;
            }
        }
        let gcur = <T::Real as Real>::from_f64_prec(gamma, prec);
        let mut cand: Option<(Vec<T>, Vec<Complex<T::Real>>, f64, T::Real, f64)> = None;
        for &tol in &tols {
            let (delta, dropped) = factor.step(tol);
            report.zero_step |= dropped && tols.len() == 1;
            let mut next = coeffs.clone();
            for (c, d) in next.iter_mut().zip(&delta) {
                let step = Complex::new(d.re.clone() * &gcur, d.im.clone() * &gcur);
                let s = T::from_complex(step).expect("real step for real coefficients");
                *c = c.clone() - s;
            }
            g.set_coeffs(refs, &next)?;
            let gv = match eval_graph(g, &Pointwise(discr.points.clone())) {
                Ok(v) => v.0,
                Err(_) if tols.len() > 1 => continue,
                Err(e) => return Err(e),
            };
            let new_res = scaled_residual(&gv, &fv, config.errtype);
            let new_l2 = norm2(&new_res);
            if cand.as_ref().is_none_or(|c| new_l2 < c.3) {
                let new_nrm = max_abs(&new_res);
                cand = Some((next, new_res, new_nrm, new_l2, tol));
            }
        }
        report.iterations += 1;
        let Some((next, new_res, new_nrm, new_l2, tol)) = cand else {
            g.set_coeffs(refs, &coeffs)?;
            report.diverged = true;
            break;
        };
        droptol_used = tol;
        let worse = !(new_l2 < l2);
        if worse && config.droptol_search {
            g.set_coeffs(refs, &coeffs)?;
            report.residual_history.push(nrm);
            log(config, report.iterations, nrm, gamma, droptol_used);
            break;
        }
        if worse && config.backoff && gamma > config.gamma / 1024.0 {
            g.set_coeffs(refs, &coeffs)?;
            jac_cache = Some(jm);
            gamma /= 2.0;
            report.residual_history.push(nrm);
            log(config, report.iterations, nrm, gamma, droptol_used);
            continue;
        }
        gamma = config.gamma;
        g.set_coeffs(refs, &next)?;
        coeffs = next;
        res = new_res;
        nrm = new_nrm;
        l2 = new_l2;
        report.residual_history.push(nrm);
        log(config, report.iterations, nrm, gamma, droptol_used);
        if nrm < best_nrm {
            best_nrm = nrm;
            best = coeffs.clone();
        }
        if !nrm.is_finite() || nrm > config.divergence_factor * best_nrm {
            g.set_coeffs(refs, &best)?;
            report.diverged = true;
            return Ok(report);
        }
    }
    if best_nrm < nrm {
        g.set_coeffs(refs, &best)?;
    }
    report.converged = best_nrm.min(nrm) <= config.stoptol;
    Ok(report)
}

fn log(config: &GNConfig, it: usize, nrm: f64, gamma: f64, droptol: f64) {
    if config.logger > 0 {
        eprintln!("iter {it:4}  max|r| = {nrm:.6e}  gamma = {gamma}  droptol = {droptol:e}");
    }
}

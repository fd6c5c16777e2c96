//! Accuracy certificates: forward and backward θ bounds for approximants of the
//! exponential, and first-order running round-off bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{eval_all_nodes, eval_graph, GraphValue};
use crate::graph::{ComputationGraph, OpKind, INPUT_A, INPUT_I};
use crate::numerics::{BigReal, Complex, Embed, Real, Scalar, TruncSeries};

pub use crate::numerics::DEFAULT_THETA_PREC as THETA_PREC;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ThetaKind {
    Forward,
    Backward,
}

/// Knobs of the θ search.
#[derive(Clone, Debug)]
pub struct ThetaOptions {
    pub prec: u32,
    /// First grid point of the scan for a sign change.
    pub scan_start: f64,
    /// Ratio between consecutive scan points.
    pub scan_ratio: f64,
    /// Hard upper end of the search interval.
    pub max_theta: f64,
    /// The scan stops where the last retained series term exceeds
    /// `tail_tol * u`; beyond that the truncation is not trusted.
    pub tail_tol: f64,
    /// Bisection stops at this relative bracket width.
    pub rel_width: f64,
}

impl Default for ThetaOptions {
    fn default() -> Self {
        ThetaOptions {
            prec: THETA_PREC,
            scan_start: 2f64.powi(-20),
            scan_ratio: 2f64.powf(1.0 / 16.0),
            max_theta: 1e3,
            tail_tol: 1e-6,
            rel_width: 1e-30,
        }
    }
}

/// A certified radius together with the data needed to re-check it.
#[derive(Clone, Debug)]
pub struct ThetaResult {
    pub theta: BigReal,
    pub kind: ThetaKind,
    pub nterms: usize,
    pub u: BigReal,
    /// Absolute coefficients of the bound function: `sum c_j t^j` (forward)
    /// or `sum c_j t^(j-1)` (backward).
    pub bound_coeffs: Vec<BigReal>,
    /// The bound already exceeds `u` at zero.
    pub zero: bool,
    /// No crossing before the end of the trusted search interval.
    pub capped: bool,
}

impl ThetaResult {
    pub fn theta_f64(&self) -> f64 {
        self.theta.to_f64()
    }

    /// Value of the bound function at `t`.
    pub fn bound_at(&self, t: &BigReal) -> BigReal {
        bound_value(&self.bound_coeffs, self.kind, t)
    }

    /// Checks that θ passes and θ(1+1e-6) fails. A capped or zero result
    /// only has to pass at θ.
    pub fn verify(&self) -> bool {
        if self.zero {
            return self.theta.is_zero();
        }
        let prec = self.theta.prec();
        if self.bound_at(&self.theta) > self.u {
            return false;
        }
        if self.capped {
            return true;
        }
        let bumped = &self.theta * &BigReal::parse("1.000001", prec).unwrap();
        self.bound_at(&bumped) > self.u
    }

    /// `name,m,theta,u,nterms` row.
    pub fn csv_row(&self, name: &str, m: usize) -> String {
        format!(
            "{},{},{},{:e},{}",
            name,
            m,
            self.theta.to_string_digits(17),
            self.u.to_f64(),
            self.nterms
        )
    }
}

pub const THETA_CSV_HEADER: &str = "graph,m,theta,u,nterms";

/// CSV table of θ results, one row per `(name, m, result)`.
pub fn theta_table(rows: &[(String, usize, ThetaResult)]) -> String {
    let mut s = String::from(THETA_CSV_HEADER);
    s.push('\n');
    for (name, m, r) in rows {
        s.push_str(&r.csv_row(name, *m));
        s.push('\n');
    }
    s
}

fn bound_value(c: &[BigReal], kind: ThetaKind, t: &BigReal) -> BigReal {
    // Horner on the absolute coefficients; the backward form drops one power.
    let (skip, prec) = match kind {
        ThetaKind::Forward => (0, t.prec()),
        ThetaKind::Backward => (1, t.prec()),
    };
    let mut acc = BigReal::zero_with_prec(prec);
    for cj in c.iter().skip(skip).rev() {
        acc = acc * t + cj;
    }
    acc
}

// Highest trusted argument: the last two retained terms stay below tail_tol*u.
fn truncation_radius(c: &[BigReal], kind: ThetaKind, u: &BigReal, opts: &ThetaOptions) -> f64 {
    let n = c.len();
    let lim = u.to_f64() * opts.tail_tol;
    let mut r = opts.max_theta;
    for j in n.saturating_sub(2)..n {
        let p = match kind {
            ThetaKind::Forward => j as f64,
            ThetaKind::Backward => j as f64 - 1.0,
        };
        let cj = c[j].to_f64();
        if cj > 0.0 && p > 0.0 {
            r = r.min((lim / cj).powf(1.0 / p));
        }
    }
    r
}

// Scan geometrically for the first point where the bound exceeds u, then
// bisect the bracket.
fn search(c: Vec<BigReal>, kind: ThetaKind, u: BigReal, nterms: usize, opts: &ThetaOptions) -> Result<ThetaResult> {
    let prec = opts.prec;
    let big = |x: f64| BigReal::from_f64(x, prec);
    let zero = BigReal::zero_with_prec(prec);
    let passes = |t: &BigReal| bound_value(&c, kind, t) <= u;
    let base = |theta: BigReal, zero: bool, capped: bool| ThetaResult {
        theta,
        kind,
        nterms,
        u: u.clone(),
        bound_coeffs: c.clone(),
        zero,
        capped,
    };
    // value at 0: c_0 for the forward bound, c_1 for the backward one
    let at0 = match kind {
        ThetaKind::Forward => c[0].clone(),
        ThetaKind::Backward => c.get(1).cloned().unwrap_or_else(|| zero.clone()),
    };
    if at0 > u {
        return Ok(base(zero, true, false));
    }
    let radius = truncation_radius(&c, kind, &u, opts);
    let mut lo = zero.clone();
    let mut t = opts.scan_start.min(radius);
    let hi;
    loop {
        let bt = big(t);
        if !passes(&bt) {
            hi = bt;
            break;
        }
        lo = bt;
        if t >= radius {
            return Ok(base(lo, false, true));
        }
        t = (t * opts.scan_ratio).min(radius);
    }
    let mut hi = hi;
    let width = big(opts.rel_width);
    let half = big(0.5);
    for _ in 0..10_000 {
        let gap = &hi - &lo;
        if gap <= &width * &hi {
            break;
        }
        let mid = (&lo + &hi) * &half;
        if passes(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(base(lo, false, false))
}

fn series_of<S>(g: &ComputationGraph<S>, nterms: usize, prec: u32) -> Result<TruncSeries<S>>
where
    S: Scalar<Real = BigReal> + Embed<S>,
    TruncSeries<S>: GraphValue<Scalar = S>,
{
    let z = TruncSeries::<S>::variable(nterms, prec);
    eval_graph(g, &z)
}

fn abs_coeffs<S: Scalar<Real = BigReal>>(s: &TruncSeries<S>) -> Vec<BigReal> {
    s.coeffs().iter().map(|c| c.modulus()).collect()
}

/// Largest θ with `E(θ) = sum |g_j - f_j| θ^j <= u`, where `f_series` holds
/// the target's Taylor coefficients. The graph must be a polynomial of degree
/// below `f_series.nterms()`.
pub fn compute_fwd_theta<T>(g: &ComputationGraph<T>, f_series: &TruncSeries<BigReal>, u: &BigReal) -> Result<ThetaResult>
where
    T: Scalar,
{
    compute_fwd_theta_with(g, f_series, u, &ThetaOptions::default())
}

pub fn compute_fwd_theta_with<T>(
    g: &ComputationGraph<T>,
    f_series: &TruncSeries<BigReal>,
    u: &BigReal,
    opts: &ThetaOptions,
) -> Result<ThetaResult>
where
    T: Scalar,
{
    if g.has_ldiv() {
        return Err(Error::Unsupported("forward θ of a graph with an LDIV node".into()));
    }
    let n = f_series.nterms();
    let prec = opts.prec;
    let gc: ComputationGraph<Complex<BigReal>> = g.convert(prec)?;
    let p = series_of(&gc, n + 1, prec)?;
    if !p.coeffs()[n].is_zero() {
        return Err(Error::Precondition(format!(
            "graph degree reaches the series truncation ({n} terms)"
        )));
    }
    let c: Vec<BigReal> = (0..n)
        .map(|j| {
            let fj = Complex::new(f_series.coeffs()[j].round_to(prec), BigReal::zero_with_prec(prec));
            (p.coeffs()[j].clone() - &fj).modulus()
        })
        .collect();
    search(c, ThetaKind::Forward, u.round_to(prec), n, opts)
}

/// Backward-error θ for an approximant `g` of the exponential: the largest θ
/// with `sum_j |δ_j| θ^(j-1) <= u`, where `sum δ_j z^j = log(e^{-z} g(z))`.
///
/// The series is truncated at `nterms`. LDIV nodes are allowed as long as
/// every divisor has a nonzero constant term.
pub fn compute_bwd_theta_exp<T: Scalar>(g: &ComputationGraph<T>, u: &BigReal, nterms: usize) -> Result<ThetaResult> {
    compute_bwd_theta_exp_with(g, u, nterms, &ThetaOptions::default())
}

pub fn compute_bwd_theta_exp_with<T: Scalar>(
    g: &ComputationGraph<T>,
    u: &BigReal,
    nterms: usize,
    opts: &ThetaOptions,
) -> Result<ThetaResult> {
    if nterms < 3 {
        return Err(Error::Precondition("need at least 3 series terms".into()));
    }
    let c = if T::IS_COMPLEX {
        bwd_coeffs::<Complex<BigReal>, T>(g, u, nterms, opts.prec)?
    } else {
        bwd_coeffs::<BigReal, T>(g, u, nterms, opts.prec)?
    };
    search(c, ThetaKind::Backward, u.round_to(opts.prec), nterms, opts)
}

fn bwd_coeffs<S, T>(g: &ComputationGraph<T>, u: &BigReal, nterms: usize, prec: u32) -> Result<Vec<BigReal>>
where
    T: Scalar,
    S: Scalar<Real = BigReal> + Embed<S>,
    TruncSeries<S>: GraphValue<Scalar = S>,
{
    let gc: ComputationGraph<S> = g.convert(prec)?;
    let p = series_of(&gc, nterms, prec).map_err(|e| match e {
        Error::Singular(m) => Error::Precondition(format!("series of the graph: {m}")),
        e => e,
    })?;
    let em: Vec<S> = TruncSeries::<S>::exp_series(nterms, prec)
        .into_coeffs()
        .into_iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 1 { -c } else { c })
        .collect();
    let one = S::from_f64_prec(1.0, prec);
    let mut r = TruncSeries::new(em).mul(&p)?.into_coeffs();
    r[0] = r[0].clone() - &one;
    let tol = u * &BigReal::from_i64(nterms as i64, prec);
    if r[0].modulus() > tol {
        return Err(Error::Precondition(format!(
            "constant term of e^(-z) g(z) - 1 is {:.3e}, above u*nterms",
            r[0].modulus().to_f64()
        )));
    }
    // the log composition needs an exactly vanishing constant term
    r[0] = S::zero();
    let phi = TruncSeries::compose(&TruncSeries::<S>::log1p_series(nterms, prec), &TruncSeries::new(r))?;
    Ok(abs_coeffs(&phi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunErrMode {
    /// First-order worst-case bound.
    Bound,
    /// Linearized signed propagation with `η ~ U[-u, u]` per node.
    Rand { seed: u64 },
}

#[derive(Clone, Debug)]
pub struct RunErr<T: Scalar> {
    /// Computed value of the first output.
    pub value: T,
    /// Relative error estimate of the output.
    pub delta: T::Real,
    /// A linear combination evaluated to exactly zero on the way.
    pub zero_lincomb: bool,
}

/// Default `u` of the running-error analysis: machine epsilon of binary64.
pub fn runerr_default_u() -> f64 {
    f64::EPSILON
}

/// Running round-off analysis of the scalar evaluation at `x`.
///
/// `Bound` propagates `Δ = (|α||Zl|Δl + |β||Zr|Δr)/|Z| + 2u` for linear
/// combinations and `Δl + Δr + u` for products and solves. `Rand` propagates
/// the signed linearized errors with one uniform `η` per node and returns the
/// modulus at the output.
pub fn eval_runerr<T>(g: &ComputationGraph<T>, x: &T, input: &str, mode: RunErrMode, u: &T::Real) -> Result<RunErr<T>>
where
    T: Scalar + GraphValue<Scalar = T> + Embed<T>,
{
    let out = g.outputs().first().ok_or_else(|| Error::Precondition("graph has no outputs".into()))?.clone();
    let vals = eval_all_nodes(g, x, input)?;
    let prec = x.prec();
    let zero_r = T::Real::from_i64_prec(0, 2);
    let two = T::Real::from_i64_prec(2, 2);
    let mut rng = match mode {
        RunErrMode::Rand { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        RunErrMode::Bound => None,
    };
    let uf = u.to_f64();
    let eta = |rng: &mut Option<ChaCha8Rng>| -> T {
        let r = rng.as_mut().unwrap();
        T::from_f64_prec(r.random_range(-1.0..=1.0) * uf, prec)
    };
    let mut bound: std::collections::HashMap<&str, T::Real> = Default::default();
    let mut signed: std::collections::HashMap<&str, T> = Default::default();
    let mut zero_lincomb = false;
    let leaf = |id: &str| id == INPUT_I || id == input;
    for id in &vals.order {
        let n = g.node(id).unwrap();
        let (l, r) = (n.parents.0.as_str(), n.parents.1.as_str());
        let zi = vals.values[id.as_str()].clone();
        match rng {
            None => {
                let get = |p: &str| if leaf(p) { zero_r.clone() } else { bound[p].clone() };
                let d = match n.op {
                    OpKind::Lincomb => {
                        let (a, b) = n.coeffs.as_ref().unwrap();
                        let zl = vals.get(l, input).unwrap();
                        let zr = vals.get(r, input).unwrap();
                        let num = a.modulus() * &zl.modulus() * &get(l) + &(b.modulus() * &zr.modulus() * &get(r));
                        let den = zi.modulus();
                        let base = if den == zero_r {
                            zero_lincomb = true;
                            if num == zero_r {
                                zero_r.clone()
                            } else {
                                T::Real::from_f64_prec(f64::INFINITY, prec)
                            }
                        } else {
                            num / &den
                        };
                        base + &(two.clone() * u)
                    }
                    OpKind::Mult | OpKind::Ldiv => get(l) + &get(r) + u,
                };
                bound.insert(id.as_str(), d);
            }
            Some(_) => {
                let get = |p: &str| if leaf(p) { T::zero() } else { signed[p].clone() };
                let e = eta(&mut rng);
                let d = match n.op {
                    OpKind::Lincomb => {
                        let (a, b) = n.coeffs.as_ref().unwrap();
                        let zl = vals.get(l, input).unwrap();
                        let zr = vals.get(r, input).unwrap();
                        let num = a.clone() * zl * &get(l) + &(b.clone() * zr * &get(r));
                        if zi.is_zero() {
                            zero_lincomb = true;
                            if num.is_zero() {
                                T::zero() - &e
                            } else {
                                T::from_f64_prec(f64::INFINITY, prec)
                            }
                        } else {
                            num / &zi - &e
                        }
                    }
                    OpKind::Mult => get(l) + &get(r) - &e,
                    OpKind::Ldiv => get(r) - &get(l) - &e,
                };
                signed.insert(id.as_str(), d);
            }
        }
    }
    let value = vals.get(&out, input).unwrap().clone();
    let delta = if leaf(&out) {
        zero_r
    } else if rng.is_some() {
        signed[out.as_str()].modulus()
    } else {
        bound[out.as_str()].clone()
    };
    Ok(RunErr { value, delta, zero_lincomb })
}

/// [`eval_runerr`] with the argument bound to `A`.
pub fn eval_runerr_default<T>(g: &ComputationGraph<T>, x: &T, mode: RunErrMode) -> Result<RunErr<T>>
where
    T: Scalar + GraphValue<Scalar = T> + Embed<T>,
{
    let u = T::Real::from_f64_prec(runerr_default_u(), x.prec());
    eval_runerr(g, x, INPUT_A, mode, &u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degopt::{embed_degopt, graph_degopt, EmbedScheme};
    use crate::generators::graph_exp_pade_ss;

    fn u53() -> BigReal {
        BigReal::from_i64_2exp(1, -53, THETA_PREC)
    }

    fn taylor(d: usize) -> ComputationGraph<f64> {
        let c: Vec<f64> = (0..=d).map(|k| 1.0 / (1..=k).product::<usize>() as f64).collect();
        crate::degopt::graph_monomial(&c).unwrap().0
    }

    fn taylor_big(d: usize) -> ComputationGraph<BigReal> {
        let mut c = vec![BigReal::from_i64(1, THETA_PREC)];
        for k in 1..=d {
            let next = &c[k - 1] / &BigReal::from_i64(k as i64, THETA_PREC);
            c.push(next);
        }
        crate::degopt::graph_monomial(&c).unwrap().0
    }

    fn goldberg() -> ComputationGraph<f64> {
        let mut g = ComputationGraph::new();
        g.add_lincomb("y", 1.0, "I", 1.0, "x").unwrap();
        g.add_lincomb("z", 1.0, "I", 0.5, "x").unwrap();
        g.add_mult("y2", "y", "y").unwrap();
        g.add_mult("z2", "z", "z").unwrap();
        g.add_lincomb("out", 1.0, "y2", -1.0, "z2").unwrap();
        g.add_output("out").unwrap();
        g
    }

    #[test]
    fn fwd_theta_taylor5_matches_partial_sum_bisection() {
        let f = TruncSeries::<BigReal>::exp_series(30, THETA_PREC);
        let r = compute_fwd_theta(&taylor_big(5), &f, &u53()).unwrap();
        assert!(r.verify() && !r.capped && !r.zero);
        // oracle: bisection in binary64 on the tail sum_{j=6}^{29} t^j/j!
        let tail = |t: f64| (6..30).map(|j| t.powi(j) / (1..=j).map(|k| k as f64).product::<f64>()).sum::<f64>();
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if tail(m) <= 2f64.powi(-53) {
                lo = m
            } else {
                hi = m
            }
        }
        assert!((r.theta_f64() - lo).abs() < 1e-12 * lo, "{} vs {lo}", r.theta_f64());
    }

    #[test]
    fn fwd_theta_exact_is_capped() {
        let f = TruncSeries::<BigReal>::new(
            TruncSeries::<BigReal>::exp_series(6, 53).into_coeffs().into_iter().chain((0..4).map(|_| BigReal::from_i64(0, 53))).collect(),
        );
        let r = compute_fwd_theta(&taylor(5), &f, &u53()).unwrap();
        assert!(r.capped && r.verify());
    }

    #[test]
    fn fwd_theta_constant_offset() {
        let f = TruncSeries::<BigReal>::exp_series(30, THETA_PREC);
        // shift the constant by u/2 and by 2u through a fresh node
        let shifted = |c: f64| {
            let mut g = taylor(5);
            let out = g.outputs()[0].clone();
            g.add_lincomb("S", 1.0, &out, c, "I").unwrap();
            g.set_outputs(&["S"]).unwrap();
            g
        };
        let g = shifted(2f64.powi(-54));
        let r = compute_fwd_theta(&g, &f, &u53()).unwrap();
        assert!(r.theta_f64() > 0.0 && r.verify());
        let g2 = shifted(2f64.powi(-52));
        let r2 = compute_fwd_theta(&g2, &f, &u53()).unwrap();
        assert!(r2.zero && r2.theta.is_zero());
    }

    #[test]
    fn bwd_theta_degree2_matches_direct_oracle() {
        let r = compute_bwd_theta_exp(&taylor(2), &u53(), 100).unwrap();
        assert!(r.verify());
        // oracle: |log(e^{t}(1 - t + t^2/2))| / t at 256 bits, bisection
        let p = 256;
        let f = |t: &BigReal| {
            let one = BigReal::from_i64(1, p);
            let half = BigReal::from_f64(0.5, p);
            let q = &(&one - t) + &(&(t * t) * &half);
            let v = (&t.exp() * &q).ln();
            &v.abs() / t
        };
        let u = BigReal::from_i64_2exp(1, -53, p);
        let (mut lo, mut hi) = (BigReal::from_f64(1e-12, p), BigReal::from_f64(1e-3, p));
        for _ in 0..300 {
            let m = &(&lo + &hi) * &BigReal::from_f64(0.5, p);
            if f(&m) <= u {
                lo = m
            } else {
                hi = m
            }
        }
        let rel = (r.theta_f64() - lo.to_f64()).abs() / lo.to_f64();
        assert!(rel < 1e-6, "{} vs {}", r.theta_f64(), lo.to_f64());
    }

    #[test]
    fn bwd_theta_pade_row() {
        for (m, s, want) in [(5, 0, 0.25), (7, 0, 0.95), (13, 0, 5.4)] {
            let (g, _) = graph_exp_pade_ss::<BigReal>(m, s, THETA_PREC).unwrap();
            let r = compute_bwd_theta_exp(&g, &u53(), 100).unwrap();
            assert!(r.verify());
            assert!((r.theta_f64() - want).abs() < 0.05, "{m}: {}", r.theta_f64());
        }
    }

    #[test]
    fn bwd_theta_binary64_coefficients_shrink_theta() {
        // rounding the coefficients to binary64 perturbs the low-order terms
        let (g, _) = graph_exp_pade_ss::<f64>(13, 0, 53).unwrap();
        let r = compute_bwd_theta_exp(&g, &u53(), 100).unwrap();
        assert!(r.verify() && r.theta_f64() < 5.0);
    }

    #[test]
    fn bwd_theta_nterms_invariance() {
        let g = taylor_big(8);
        let a = compute_bwd_theta_exp(&g, &u53(), 100).unwrap().theta_f64();
        let b = compute_bwd_theta_exp(&g, &u53(), 150).unwrap().theta_f64();
        assert!((a - b).abs() <= 1e-8 * a);
    }

    #[test]
    fn bwd_theta_rejects_wrong_constant() {
        let mut g = taylor(4);
        let out = g.outputs()[0].clone();
        g.add_lincomb("S", 1.0, &out, 1e-3, "I").unwrap();
        g.set_outputs(&["S"]).unwrap();
        assert!(matches!(compute_bwd_theta_exp(&g, &u53(), 50), Err(Error::Precondition(_))));
    }

    #[test]
    fn bwd_theta_csv() {
        let de = embed_degopt::<f64>(EmbedScheme::Monomial, &[1.0, 1.0, 0.5], 53).unwrap();
        let (g, _) = graph_degopt(&de).unwrap();
        let r = compute_bwd_theta_exp(&g, &u53(), 40).unwrap();
        let t = theta_table(&[("t2".into(), 2, r)]);
        assert!(t.starts_with("graph,m,theta,u,nterms\nt2,2,"));
        assert!(t.trim_end().ends_with(",40"));
    }

    #[test]
    fn goldberg_bound() {
        let g = goldberg();
        let x = 2f64.powi(-27);
        let r = eval_runerr(&g, &x, "x", RunErrMode::Bound, &f64::EPSILON).unwrap();
        assert_eq!(r.value, 7.450580596923828e-9);
        assert!((r.delta - 2.98023227651711409e-7).abs() < 1e-15, "{}", r.delta);
    }

    #[test]
    fn goldberg_rand_range() {
        let g = goldberg();
        let x = 2f64.powi(-27);
        let mut v: Vec<f64> = (0..100)
            .map(|s| eval_runerr(&g, &x, "x", RunErrMode::Rand { seed: s }, &f64::EPSILON).unwrap().delta)
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(v.iter().all(|d| (1e-10..1e-6).contains(d)));
        assert!((1e-9..5e-8).contains(&v[50]), "{}", v[50]);
    }

    #[test]
    fn single_mult_is_u() {
        let mut g = ComputationGraph::<f64>::new();
        g.add_mult("P", "A", "A").unwrap();
        g.add_output("P").unwrap();
        let r = eval_runerr_default(&g, &0.3, RunErrMode::Bound).unwrap();
        assert_eq!(r.delta, f64::EPSILON);
    }

    #[test]
    fn zero_lincomb_flagged() {
        let mut g = ComputationGraph::<f64>::new();
        g.add_mult("P", "A", "A").unwrap();
        g.add_lincomb("Z", 1.0, "P", -1.0, "P").unwrap();
        g.add_output("Z").unwrap();
        let r = eval_runerr_default(&g, &0.3, RunErrMode::Bound).unwrap();
        assert!(r.zero_lincomb && r.delta.is_infinite());
    }

    #[test]
    fn bound_monotone_in_u() {
        let g = goldberg();
        let x = 0.3;
        let a = eval_runerr(&g, &x, "x", RunErrMode::Bound, &1e-16).unwrap().delta;
        let b = eval_runerr(&g, &x, "x", RunErrMode::Bound, &2e-16).unwrap().delta;
        assert!(b >= 2.0 * a * (1.0 - 1e-12));
    }
}

//! Graphs of classical iterations and rational approximants.

use crate::degopt::{big_to, pade_exp_coeffs};
use crate::error::{Error, Result};
use crate::graph::{CoeffRef, ComputationGraph, INPUT_A, INPUT_I};
use crate::numerics::{Real, Scalar};

fn lincomb_refs<T: Scalar>(g: &ComputationGraph<T>) -> Vec<CoeffRef> {
    g.all_coeff_refs()
}

/// Denman-Beavers square root: `X_{k+1} = (X_k + Y_k^{-1})/2`,
/// `Y_{k+1} = (Y_k + X_k^{-1})/2` with `X_0 = A`, `Y_0 = I`. The output is
/// `X{iters+1}`; the first step is free of inverses since `Y_0 = I`.
pub fn graph_denman_beavers<T: Scalar>(iters: usize) -> Result<(ComputationGraph<T>, Vec<CoeffRef>)> {
    if iters == 0 {
        return Err(Error::Precondition("Denman-Beavers needs at least one iteration".into()));
    }
    let half = T::from_f64_prec(0.5, 53);
    let mut g = ComputationGraph::new();
    g.add_ldiv("Xinv0", INPUT_A, INPUT_I)?;
    g.add_lincomb("X1", half.clone(), INPUT_A, half.clone(), INPUT_I)?;
    g.add_lincomb("Y1", half.clone(), INPUT_I, half.clone(), "Xinv0")?;
    for k in 1..=iters {
        let (x, y) = (format!("X{k}"), format!("Y{k}"));
        let yinv = format!("Yinv{k}");
        g.add_ldiv(&yinv, &y, INPUT_I)?;
        g.add_lincomb(&format!("X{}", k + 1), half.clone(), &x, half.clone(), &yinv)?;
        if k < iters {
            let xinv = format!("Xinv{k}");
            g.add_ldiv(&xinv, &x, INPUT_I)?;
            g.add_lincomb(&format!("Y{}", k + 1), half.clone(), &y, half.clone(), &xinv)?;
        }
    }
    g.set_outputs(&[&format!("X{}", iters + 1)])?;
    let refs = lincomb_refs(&g);
    Ok((g, refs))
}

/// Newton-Schulz inverse iteration `X_{k+1} = X_k (2I - A X_k)` from `X_0 = A`.
pub fn graph_newton_schulz<T: Scalar>(iters: usize) -> Result<(ComputationGraph<T>, Vec<CoeffRef>)> {
    newton_schulz(iters, None)
}

/// Newton-Schulz from `X_0 = alpha A`.
pub fn graph_newton_schulz_scaled<T: Scalar>(
    iters: usize,
    alpha: T,
) -> Result<(ComputationGraph<T>, Vec<CoeffRef>)> {
    newton_schulz(iters, Some(alpha))
}

fn newton_schulz<T: Scalar>(iters: usize, alpha: Option<T>) -> Result<(ComputationGraph<T>, Vec<CoeffRef>)> {
    if iters == 0 {
        return Err(Error::Precondition("Newton-Schulz needs at least one iteration".into()));
    }
    let mut g = ComputationGraph::new();
    let mut x = match alpha {
        Some(a) => {
            g.add_lincomb("X0", a, INPUT_A, T::zero(), INPUT_I)?;
            "X0".to_string()
        }
        None => INPUT_A.to_string(),
    };
    let two = T::from_f64_prec(2.0, 53);
    for k in 0..iters {
        g.add_mult(&format!("AX{k}"), INPUT_A, &x)?;
        g.add_lincomb(&format!("R{k}"), two.clone(), INPUT_I, -T::one(), &format!("AX{k}"))?;
        let next = format!("X{}", k + 1);
        g.add_mult(&next, &x, &format!("R{k}"))?;
        x = next;
    }
    g.set_outputs(&[&x])?;
    let refs = lincomb_refs(&g);
    Ok((g, refs))
}

/// Bounds on the 1-norm up to which the Padé approximant of each degree is
/// used without squaring.
pub const PADE_THETA: [(usize, f64); 5] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068),
    (13, 5.371920351148152),
];

/// Padé degree and number of squarings for a matrix with `norm_bound >= ||A||_1`.
pub fn pade_ss_params(norm_bound: f64) -> (usize, usize) {
    for (m, t) in PADE_THETA {
        if norm_bound <= t {
            return (m, 0);
        }
    }
    let t13 = PADE_THETA[4].1;
    let s = (norm_bound / t13).log2().ceil().max(0.0) as usize;
    (13, s)
}

/// Scaling and squaring with a diagonal Padé approximant:
/// `r_m(2^{-s} A)^{2^s}` with `r_m = (V - U)^{-1}(V + U)`, `U` odd and `V` even.
/// Coefficients are created at `prec` bits.
pub fn graph_exp_pade_ss<T: Scalar>(
    degree: usize,
    squarings: usize,
    prec: u32,
) -> Result<(ComputationGraph<T>, Vec<CoeffRef>)> {
    if !PADE_THETA.iter().any(|(m, _)| *m == degree) {
        return Err(Error::Precondition(format!("Padé degree {degree} not in {{3,5,7,9,13}}")));
    }
    let b: Vec<T> = pade_exp_coeffs(degree, prec).iter().map(|x| big_to(x, prec)).collect();
    let mut g = ComputationGraph::new();
    let a = if squarings > 0 {
        let sc = T::from_real(<T::Real as Real>::from_i64_prec(1, 2).mul_pow2(-(squarings as i64)));
        g.add_lincomb("As", sc, INPUT_A, T::zero(), INPUT_I)?;
        "As"
    } else {
        INPUT_A
    };
    g.add_mult("A2", a, a)?;
    let pow = |k: usize| if k == 0 { INPUT_I.to_string() } else { format!("A{k}") };
    if degree >= 5 {
        g.add_mult("A4", "A2", "A2")?;
    }
    if degree >= 7 {
        g.add_mult("A6", "A4", "A2")?;
    }
    if degree == 9 {
        g.add_mult("A8", "A6", "A2")?;
    }
    if degree == 13 {
        let terms = |js: &[usize], shift: usize| -> (Vec<T>, Vec<String>) {
            js.iter().map(|&j| (b[j].clone(), pow(j - shift))).unzip()
        };
        let (c, p) = terms(&[13, 11, 9], 7);
        add_sum_owned(&mut g, "Uw", &c, &p)?;
        g.add_mult("Uz", "A6", "Uw")?;
        let (mut c, mut p) = terms(&[7, 5, 3, 1], 1);
        c.insert(0, T::one());
        p.insert(0, "Uz".into());
        add_sum_owned(&mut g, "Us", &c, &p)?;
        g.add_mult("U", a, "Us")?;
        let (c, p) = terms(&[12, 10, 8], 6);
        add_sum_owned(&mut g, "Vw", &c, &p)?;
        g.add_mult("Vz", "A6", "Vw")?;
        let (mut c, mut p) = terms(&[6, 4, 2, 0], 0);
        c.insert(0, T::one());
        p.insert(0, "Vz".into());
        add_sum_owned(&mut g, "V", &c, &p)?;
    } else {
        let (c, p): (Vec<T>, Vec<String>) = (1..=degree).step_by(2).map(|j| (b[j].clone(), pow(j - 1))).unzip();
        add_sum_owned(&mut g, "Us", &c, &p)?;
        g.add_mult("U", a, "Us")?;
        let (c, p): (Vec<T>, Vec<String>) = (0..=degree).step_by(2).map(|j| (b[j].clone(), pow(j))).unzip();
        add_sum_owned(&mut g, "V", &c, &p)?;
    }
    g.add_lincomb("Num", T::one(), "V", T::one(), "U")?;
    g.add_lincomb("Den", T::one(), "V", -T::one(), "U")?;
    g.add_ldiv("R0", "Den", "Num")?;
    for k in 1..=squarings {
        g.add_mult(&format!("R{k}"), &format!("R{}", k - 1), &format!("R{}", k - 1))?;
    }
    g.set_outputs(&[&format!("R{squarings}")])?;
    let refs = lincomb_refs(&g);
    Ok((g, refs))
}

fn add_sum_owned<T: Scalar>(g: &mut ComputationGraph<T>, id: &str, c: &[T], p: &[String]) -> Result<()> {
    let p: Vec<&str> = p.iter().map(|s| s.as_str()).collect();
    g.add_sum(id, c, &p)
}

/// `q(A)^{-1} p(A)` from two single-output LDIV-free graphs.
pub fn graph_rational<T: Scalar>(p: &ComputationGraph<T>, q: &ComputationGraph<T>) -> Result<ComputationGraph<T>> {
    for (name, h) in [("numerator", p), ("denominator", q)] {
        if h.outputs().len() != 1 {
            return Err(Error::Precondition(format!("{name} graph must have exactly one output")));
        }
        if h.has_ldiv() {
            return Err(Error::Precondition(format!("{name} graph contains an LDIV node")));
        }
    }
    let mut g = p.merge(q);
    let (po, qo) = (g.outputs()[0].clone(), g.outputs()[1].clone());
    let mut id = "R".to_string();
    while g.contains(&id) {
        id.push('_');
    }
    g.add_ldiv(&id, &qo, &po)?;
    g.set_outputs(&[&id])?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degopt::graph_monomial;
    use crate::eval::eval_graph;
    use crate::numerics::Matrix;

    #[test]
    fn denman_beavers_example() {
        let (g, refs) = graph_denman_beavers::<f64>(4).unwrap();
        assert_eq!(g.topo_order().len(), 17);
        assert_eq!(refs.len(), 18);
        let a = Matrix::from_rows(vec![vec![0.5, 0.2], vec![0.3, 0.5]]).unwrap();
        let x = eval_graph(&g, &a).unwrap();
        let want = [[0.684065, 0.146185], [0.219277, 0.684065]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((x.get(i, j) - want[i][j]).abs() < 5e-7);
            }
        }
        let i2: Matrix<f64> = Matrix::identity(2);
        assert_eq!(eval_graph(&g, &i2).unwrap(), i2);
    }

    #[test]
    fn newton_schulz_scalar() {
        let (g, _) = graph_newton_schulz::<f64>(8).unwrap();
        assert!((eval_graph(&g, &0.9).unwrap() - 1.0 / 0.9).abs() < 1e-12);
        assert_eq!(eval_graph(&g, &1.0).unwrap(), 1.0);
        let (g, _) = graph_newton_schulz_scaled::<f64>(30, 0.5).unwrap();
        assert!((eval_graph(&g, &1.5).unwrap() - 1.0 / 1.5).abs() < 1e-14);
    }

    #[test]
    fn pade_params() {
        assert_eq!(pade_ss_params(0.01), (3, 0));
        assert_eq!(pade_ss_params(0.9), (7, 0));
        assert_eq!(pade_ss_params(5.0), (13, 0));
        assert_eq!(pade_ss_params(10.0), (13, 1));
        assert_eq!(pade_ss_params(100.0), (13, 5));
    }

    #[test]
    fn pade_exp_scalar() {
        for &(m, _) in &PADE_THETA {
            let (g, _) = graph_exp_pade_ss::<f64>(m, 3, 53).unwrap();
            assert!((eval_graph(&g, &0.05).unwrap() - 0.05f64.exp()).abs() < 1e-15, "{m}");
            assert_eq!(eval_graph(&g, &0.0).unwrap(), 1.0);
        }
        let (g, _) = graph_exp_pade_ss::<f64>(13, 1, 53).unwrap();
        assert!((eval_graph(&g, &-3.0).unwrap() - (-3.0f64).exp()).abs() < 1e-15);
        assert_eq!(g.op_counts().1, 1);
    }

    #[test]
    fn rational() {
        let (p, _) = graph_monomial(&[0.0, 1.0]).unwrap();
        let (q, _) = graph_monomial(&[1.0, 1.0]).unwrap();
        let r = graph_rational(&p, &q).unwrap();
        assert_eq!(eval_graph(&r, &1.0).unwrap(), 0.5);
        let (q, _) = graph_monomial(&[2.0]).unwrap();
        let r = graph_rational(&p, &q).unwrap();
        assert_eq!(eval_graph(&r, &3.0).unwrap(), 1.5);
    }
}

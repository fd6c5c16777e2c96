//! Oracles and fixtures shared by the integration tests. Nothing here calls
//! into the code paths it is used to check.
#![allow(dead_code)]

use std::collections::HashMap;
use std::path::Path;
use std::process::Command;

use matgraph::degopt::graph_ps;
use matgraph::eval::eval_all_nodes;
use matgraph::numerics::{BigReal, Matrix, Real};
use matgraph::{ComputationGraph, Pointwise};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn randn(r: &mut ChaCha8Rng, n: usize, scale: f64) -> Matrix<f64> {
    Matrix::from_fn(n, n, |_, _| r.sample::<f64, _>(StandardNormal) * scale)
}

pub fn factorials(n: usize) -> Vec<f64> {
    let mut c = vec![1.0];
    for k in 1..n {
        let v = c[k - 1] / k as f64;
        c.push(v);
    }
    c
}

/// `exp(A)` by Taylor summation at `prec` bits until the terms vanish.
pub fn exp_taylor_big(a: &Matrix<f64>, prec: u32) -> Matrix<f64> {
    let n = a.rows();
    let ab = a.map(|x| BigReal::from_f64(*x, prec));
    let mut term: Matrix<BigReal> = Matrix::identity(n).map(|x: &BigReal| Real::round_to(x, prec));
    let mut sum = term.clone();
    let eps = BigReal::from_i64_2exp(1, -(prec as i64) - 8, prec);
    for k in 1..10_000 {
        let inv = &BigReal::from_i64(1, prec) / &BigReal::from_i64(k, prec);
        term = term.matmul(&ab).unwrap().scale(&inv);
        sum = Matrix::lincomb(&BigReal::from_i64(1, prec), &sum, &BigReal::from_i64(1, prec), &term).unwrap();
        if term.max_abs() < eps {
            break;
        }
    }
    sum.map(|x| x.to_f64())
}

/// Spectral norm of a real matrix by power iteration on `M^T M`.
pub fn norm2_power(m: &Matrix<f64>) -> f64 {
    let n = m.cols();
    let mtm = m.transpose().matmul(m).unwrap();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut lam = 0.0;
    for _ in 0..2000 {
        let mut w = vec![0.0; n];
        for (i, wi) in w.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                *wi += mtm.get(i, j) * vj;
            }
        }
        let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nw == 0.0 {
            return 0.0;
        }
        let new = nw;
        v = w.into_iter().map(|x| x / nw).collect();
        if (new - lam).abs() <= 1e-15 * new {
            lam = new;
            break;
        }
        lam = new;
    }
    lam.sqrt()
}

/// Cosine Taylor polynomial of degree 18 in Paterson–Stockmeyer form on `A2tmp = A*A`.
pub fn cosine_graph() -> ComputationGraph<f64> {
    let c: Vec<f64> = (0..10)
        .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / (1..=2 * k).map(|j| j as f64).product::<f64>())
        .collect();
    let (mut g, _) = graph_ps(&c).unwrap();
    g.rename_node("A", "A2tmp").unwrap();
    g.add_mult("A2tmp", "A", "A").unwrap();
    g
}

/// Random graph with `n` operation nodes on the input `A`. About one node in
/// eight repeats an earlier definition or is a trivial combination, so that
/// compression has work to do. Solves use a divisor of the form `I + c X`.
pub fn random_graph(r: &mut ChaCha8Rng, n: usize, allow_ldiv: bool) -> ComputationGraph<f64> {
    let mut g = ComputationGraph::new();
    let mut pool: Vec<String> = vec!["A".into(), "I".into()];
    let mut defs: Vec<(u8, String, String, f64, f64)> = Vec::new();
    let mut k = 0;
    let fresh = |k: &mut usize| {
        *k += 1;
        format!("N{k}")
    };
    for _ in 0..n {
        let pick = |r: &mut ChaCha8Rng, pool: &[String]| pool[r.random_range(0..pool.len())].clone();
        let id = fresh(&mut k);
        let roll: f64 = r.random();
        if roll < 0.12 && !defs.is_empty() {
            let (op, l, rr, a, b) = defs[r.random_range(0..defs.len())].clone();
            match op {
                0 => g.add_lincomb(&id, a, &l, b, &rr).unwrap(),
                1 => g.add_mult(&id, &l, &rr).unwrap(),
                _ => g.add_ldiv(&id, &l, &rr).unwrap(),
            }
        } else if roll < 0.18 {
            let p = pick(r, &pool);
            g.add_lincomb(&id, 1.0, &p, 0.0, "I").unwrap();
            defs.push((0, p, "I".into(), 1.0, 0.0));
        } else if roll < 0.6 {
            let (l, rr) = (pick(r, &pool), pick(r, &pool));
            let (a, b) = (r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
            g.add_lincomb(&id, a, &l, b, &rr).unwrap();
            defs.push((0, l, rr, a, b));
        } else if roll < 0.88 || !allow_ldiv {
            let (l, rr) = (pick(r, &pool), pick(r, &pool));
            g.add_mult(&id, &l, &rr).unwrap();
            defs.push((1, l, rr, 0.0, 0.0));
        } else {
            let x = pick(r, &pool);
            let c = r.random_range(-0.3..0.3);
            let d = fresh(&mut k);
            g.add_lincomb(&d, 1.0, "I", c, &x).unwrap();
            pool.push(d.clone());
            let rr = pick(r, &pool);
            g.add_ldiv(&id, &d, &rr).unwrap();
            defs.push((2, d, rr, 0.0, 0.0));
        }
        pool.push(id);
    }
    let last = pool.last().unwrap().clone();
    g.add_output(&last).unwrap();
    g
}

/// True when every node value at `points` stays in `[lo, hi]` in modulus
/// (used to reject graphs whose values explode or whose solves are near singular).
pub fn tame_at(g: &ComputationGraph<f64>, points: &[f64], lo: f64, hi: f64) -> bool {
    let Ok(v) = eval_all_nodes(g, &Pointwise(points.to_vec()), "A") else { return false };
    v.values.values().all(|p| p.0.iter().all(|x| f64::is_finite(*x) && x.abs() <= hi))
        && v.order.iter().all(|id| match g.operation(id) {
            Some(matgraph::OpKind::Ldiv) => {
                let (l, _) = g.parents(id).unwrap();
                v.get(l, "A").unwrap().0.iter().all(|x| x.abs() >= lo)
            }
            _ => true,
        })
}

/// Evaluate a function written in the MATLAB subset the code generator
/// emits: `X = c1*P + c2*Q;`, `X = P * Q;`, `X = P \ Q;`, `coeffK = v;`,
/// `X = Y;` and the prologue lines.
pub fn run_matlab_subset(src: &str, a: &Matrix<f64>) -> Matrix<f64> {
    let n = a.rows();
    let mut env: HashMap<String, Matrix<f64>> = HashMap::new();
    let mut scal: HashMap<String, f64> = HashMap::new();
    let mut lines = src.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().unwrap();
    let arg = header.split('(').nth(1).unwrap().trim_end_matches(')').to_string();
    env.insert(arg, a.clone());
    let operand = |env: &HashMap<String, Matrix<f64>>, t: &str| -> Matrix<f64> {
        env.get(t.trim()).unwrap_or_else(|| panic!("undefined {t:?}")).clone()
    };
    for l in lines {
        if l == "end" {
            break;
        }
        let l = l.strip_suffix(';').unwrap_or_else(|| panic!("no semicolon: {l:?}"));
        let (lhs, rhs) = l.split_once('=').unwrap();
        let (lhs, rhs) = (lhs.trim(), rhs.trim());
        if rhs == "size(A,1)" || rhs.starts_with("size(") {
            scal.insert(lhs.into(), n as f64);
        } else if rhs.starts_with("eye(") {
            env.insert(lhs.into(), Matrix::identity(n));
        } else if let Ok(v) = rhs.parse::<f64>() {
            scal.insert(lhs.into(), v);
        } else if let Some((p, q)) = rhs.split_once(" * ") {
            let v = operand(&env, p).matmul(&operand(&env, q)).unwrap();
            env.insert(lhs.into(), v);
        } else if let Some((p, q)) = rhs.split_once(" \\ ") {
            let v = operand(&env, p).lu_solve(&operand(&env, q)).unwrap();
            env.insert(lhs.into(), v);
        } else if rhs.contains('*') {
            let mut acc = Matrix::<f64>::zeros(n, n);
            for term in rhs.split(" + ") {
                let (c, x) = term.split_once('*').unwrap();
                let c = *scal.get(c.trim()).unwrap_or_else(|| panic!("undefined {c:?}"));
                acc = Matrix::lincomb(&1.0, &acc, &c, &operand(&env, x)).unwrap();
            }
            env.insert(lhs.into(), acc);
        } else {
            let v = operand(&env, rhs);
            env.insert(lhs.into(), v);
        }
    }
    env.remove("output").expect("no output assigned")
}

/// Compile the emitted C next to a driver and evaluate at `a`; `None` when
/// no C compiler or LAPACK is available.
pub fn run_emitted_c(dir: &Path, stem: &str, fname: &str, a: &Matrix<f64>) -> Option<Matrix<f64>> {
    let n = a.rows();
    let driver = format!(
        "#include <stdio.h>\n#include <stdlib.h>\n#include \"{stem}.h\"\n\
         int main(void) {{\n  int n; if (scanf(\"%d\", &n) != 1) return 9;\n\
           double *A = malloc(sizeof(double)*n*n), *O = malloc(sizeof(double)*n*n);\n\
           for (int k = 0; k < n*n; k++) if (scanf(\"%lf\", &A[k]) != 1) return 9;\n\
           int rc = {fname}(n, A, O);\n  if (rc) return 10 + rc;\n\
           for (int k = 0; k < n*n; k++) printf(\"%.17g\\n\", O[k]);\n  return 0;\n}}\n"
    );
    std::fs::write(dir.join("driver.c"), driver).unwrap();
    let exe = dir.join(format!("{stem}_bin"));
    let st = Command::new("cc")
        .current_dir(dir)
        .args(["-O1", "-o"])
        .arg(&exe)
        .args(["driver.c", &format!("{stem}.c"), "-llapack", "-lblas", "-lm"])
        .status()
        .ok()?;
    if !st.success() {
        return None;
    }
    // column-major input
    let mut input = format!("{n}\n");
    for j in 0..n {
        for i in 0..n {
            input.push_str(&format!("{:e}\n", a.get(i, j)));
        }
    }
    let mut child = Command::new(&exe)
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .ok()?;
    use std::io::Write;
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    let out = child.wait_with_output().ok()?;
    assert!(out.status.success(), "emitted program failed: {:?}", out.status);
    let v: Vec<f64> = String::from_utf8(out.stdout).unwrap().lines().map(|l| l.parse().unwrap()).collect();
    Some(Matrix::from_fn(n, n, |i, j| v[j * n + i]))
}

pub fn max_rel_dev(x: &Matrix<f64>, r: &Matrix<f64>) -> f64 {
    let scale = r.max_abs();
    x.sub(r).unwrap().max_abs() / scale
}

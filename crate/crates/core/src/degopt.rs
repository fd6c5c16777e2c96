//! Degree-optimal polynomial form.
//!
//! With `B_1 = I`, `B_2 = A` and for `k = 1..m`
//! `B_{k+2} = (sum_j HA[k][j] B_j) * (sum_j HB[k][j] B_j)`, the represented
//! function is `sum_j y[j] B_j`. Row `k` (1-based) has `k + 1` entries. A row
//! may instead use a left solve, `B_{k+2} = (sum HA B)^{-1} (sum HB B)`.

use crate::error::{Error, Result};
use crate::eval::eval_graph_poly;
use crate::graph::{CoeffRef, ComputationGraph, OpKind, INPUT_A, INPUT_I};
use crate::numerics::{BigReal, Complex, Real, Scalar};

/// Outer operation of a degree-optimal row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowOp {
    Mult,
    Ldiv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Degopt<T> {
    ha: Vec<Vec<T>>,
    hb: Vec<Vec<T>>,
    y: Vec<T>,
    ops: Vec<RowOp>,
}

impl<T: Scalar> Degopt<T> {
    /// Build from row lists. Row `k` (0-based) may be given with more than
    /// `k + 2` entries (e.g. as a full `m x (m+1)` matrix) if the extra entries are zero.
    pub fn new(ha: Vec<Vec<T>>, hb: Vec<Vec<T>>, y: Vec<T>) -> Result<Self> {
        let m = ha.len();
        Self::with_ops(ha, hb, y, vec![RowOp::Mult; m])
    }

    /// Every row uses a left solve.
    pub fn new_ldiv(ha: Vec<Vec<T>>, hb: Vec<Vec<T>>, y: Vec<T>) -> Result<Self> {
        let m = ha.len();
        Self::with_ops(ha, hb, y, vec![RowOp::Ldiv; m])
    }

    pub fn with_ops(ha: Vec<Vec<T>>, hb: Vec<Vec<T>>, y: Vec<T>, ops: Vec<RowOp>) -> Result<Self> {
        let m = ha.len();
        if m == 0 {
            return Err(Error::Precondition("degree-optimal form needs at least one row".into()));
        }
        if hb.len() != m || ops.len() != m {
            return Err(Error::Dimension(format!(
                "HA has {m} rows, HB {} rows, {} row operations",
                hb.len(),
                ops.len()
            )));
        }
        if y.len() != m + 2 {
            return Err(Error::Dimension(format!("y has length {}, expected {}", y.len(), m + 2)));
        }
        let trim = |rows: Vec<Vec<T>>, name: &str| -> Result<Vec<Vec<T>>> {
            rows.into_iter()
                .enumerate()
                .map(|(k, mut r)| {
                    let len = k + 2;
                    if r.len() < len {
                        return Err(Error::Dimension(format!(
                            "{name} row {} has {} entries, expected {len}",
                            k + 1,
                            r.len()
                        )));
                    }
                    if r[len..].iter().any(|x| !x.is_zero()) {
                        return Err(Error::Precondition(format!(
                            "{name} row {} has nonzero entries beyond column {len}",
                            k + 1
                        )));
                    }
                    r.truncate(len);
                    Ok(r)
                })
                .collect()
        };
        Ok(Degopt { ha: trim(ha, "HA")?, hb: trim(hb, "HB")?, y, ops })
    }

    /// Number of rows (products).
    pub fn m(&self) -> usize {
        self.ha.len()
    }

    pub fn ha(&self) -> &[Vec<T>] {
        &self.ha
    }

    pub fn hb(&self) -> &[Vec<T>] {
        &self.hb
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn ops(&self) -> &[RowOp] {
        &self.ops
    }

    pub fn has_ldiv(&self) -> bool {
        self.ops.contains(&RowOp::Ldiv)
    }

    /// `(m+2)^2 - 2`.
    pub fn num_params(&self) -> usize {
        (self.m() + 2) * (self.m() + 2) - 2
    }

    /// `HA` padded to a full `m x (m+1)` matrix.
    pub fn ha_full(&self) -> Vec<Vec<T>> {
        pad(&self.ha)
    }

    pub fn hb_full(&self) -> Vec<Vec<T>> {
        pad(&self.hb)
    }
}

fn pad<T: Scalar>(rows: &[Vec<T>]) -> Vec<Vec<T>> {
    let w = rows.len() + 1;
    rows.iter()
        .map(|r| {
            let mut r = r.clone();
            r.resize(w, T::zero());
            r
        })
        .collect()
}

fn basis_name(j: usize) -> String {
    match j {
        1 => INPUT_I.to_string(),
        2 => INPUT_A.to_string(),
        _ => format!("B{j}"),
    }
}

// Adds `id = sum coeffs[k] * parents[k]` and returns the refs of the coefficients in order.
fn add_sum_refs<T: Scalar>(
    g: &mut ComputationGraph<T>,
    id: &str,
    coeffs: &[T],
    parents: &[String],
) -> Result<Vec<CoeffRef>> {
    let p: Vec<&str> = parents.iter().map(|s| s.as_str()).collect();
    g.add_sum(id, coeffs, &p)?;
    let n = coeffs.len();
    let name = |k: usize| if k == n { id.to_string() } else { format!("{id}_sum{k}") };
    let mut refs = vec![CoeffRef::new(name(2), 1), CoeffRef::new(name(2), 2)];
    for k in 3..=n {
        refs.push(CoeffRef::new(name(k), 2));
    }
    Ok(refs)
}

/// Graph of a degree-optimal form. Row sums are `Ba{i}`/`Bb{i}` (with partial
/// sums `Ba{i}_sum{k}`), products `B{i}`, and the output `T`. The returned
/// references list every coefficient: HA row-major, HB row-major, then y.
pub fn graph_degopt<T: Scalar>(d: &Degopt<T>) -> Result<(ComputationGraph<T>, Vec<CoeffRef>)> {
    let mut g = ComputationGraph::new();
    let mut refs_a = Vec::new();
    let mut refs_b = Vec::new();
    for k in 0..d.m() {
        let i = k + 3;
        let parents: Vec<String> = (1..=k + 2).map(basis_name).collect();
        refs_a.extend(add_sum_refs(&mut g, &format!("Ba{i}"), &d.ha[k], &parents)?);
        refs_b.extend(add_sum_refs(&mut g, &format!("Bb{i}"), &d.hb[k], &parents)?);
        let op = match d.ops[k] {
            RowOp::Mult => OpKind::Mult,
            RowOp::Ldiv => OpKind::Ldiv,
        };
        g.add_node(&basis_name(i), op, (&format!("Ba{i}"), &format!("Bb{i}")), None)?;
    }
    let parents: Vec<String> = (1..=d.m() + 2).map(basis_name).collect();
    let refs_y = add_sum_refs(&mut g, "T", &d.y, &parents)?;
    g.set_outputs(&["T"])?;
    let mut refs = refs_a;
    refs.extend(refs_b);
    refs.extend(refs_y);
    Ok((g, refs))
}

fn unit<T: Scalar>(len: usize, pos: usize) -> Vec<T> {
    (0..len).map(|j| if j == pos { T::one() } else { T::zero() }).collect()
}

/// Monomial evaluation: `P2 = c0 I + c1 A`, `A{k} = A{k-1} A`,
/// `P{k+1} = P{k} + c_k A{k}`. References are in coefficient order.
pub fn graph_monomial<T: Scalar>(c: &[T]) -> Result<(ComputationGraph<T>, Vec<CoeffRef>)> {
    let mut g = ComputationGraph::new();
    match c.len() {
        0 => return Err(Error::CoeffArity("at least one coefficient is required".into())),
        1 => {
            g.add_lincomb("P1", c[0].clone(), INPUT_I, T::zero(), INPUT_A)?;
            g.set_outputs(&["P1"])?;
            return Ok((g, vec![CoeffRef::new("P1", 1)]));
        }
        _ => {}
    }
    g.add_lincomb("P2", c[0].clone(), INPUT_I, c[1].clone(), INPUT_A)?;
    let mut refs = vec![CoeffRef::new("P2", 1), CoeffRef::new("P2", 2)];
    for k in 2..c.len() {
        let prev_pow = if k == 2 { INPUT_A.to_string() } else { format!("A{}", k - 1) };
        g.add_mult(&format!("A{k}"), &prev_pow, INPUT_A)?;
        g.add_lincomb(&format!("P{}", k + 1), T::one(), &format!("P{k}"), c[k].clone(), &format!("A{k}"))?;
        refs.push(CoeffRef::new(format!("P{}", k + 1), 2));
    }
    g.set_outputs(&[&format!("P{}", c.len())])?;
    Ok((g, refs))
}

/// Horner evaluation: `Q{d-1} = c_{d-1} I + c_d A`, `M{k} = Q{k} A`,
/// `Q{k-1} = c_{k-1} I + M{k}`, output `Q0`.
pub fn graph_horner<T: Scalar>(c: &[T]) -> Result<(ComputationGraph<T>, Vec<CoeffRef>)> {
    let mut g = ComputationGraph::new();
    let d = match c.len() {
        0 => return Err(Error::CoeffArity("at least one coefficient is required".into())),
        1 => {
            g.add_lincomb("Q0", c[0].clone(), INPUT_I, T::zero(), INPUT_A)?;
            g.set_outputs(&["Q0"])?;
            return Ok((g, vec![CoeffRef::new("Q0", 1)]));
        }
        n => n - 1,
    };
    let mut refs = vec![CoeffRef::new(format!("Q{}", d - 1), 2), CoeffRef::new(format!("Q{}", d - 1), 1)];
    g.add_lincomb(&format!("Q{}", d - 1), c[d - 1].clone(), INPUT_I, c[d].clone(), INPUT_A)?;
    for k in (1..d).rev() {
        g.add_mult(&format!("M{k}"), &format!("Q{k}"), INPUT_A)?;
        g.add_lincomb(&format!("Q{}", k - 1), c[k - 1].clone(), INPUT_I, T::one(), &format!("M{k}"))?;
        refs.push(CoeffRef::new(format!("Q{}", k - 1), 1));
    }
    refs.reverse();
    g.set_outputs(&["Q0"])?;
    Ok((g, refs))
}

/// Multiplications used by Paterson-Stockmeyer with block size `s` for degree `d`.
pub fn ps_mults(d: usize, s: usize) -> usize {
    let (q, r) = (d / s, d % s);
    (s - 1) + q - usize::from(r == 0)
}

/// Block size for Paterson-Stockmeyer: a value minimizing the number of
/// multiplications, preferring `ceil(sqrt(d))` when it is minimal and
/// otherwise the smallest minimizer.
pub fn ps_block_size(d: usize) -> usize {
    if d < 2 {
        return 1;
    }
    let best = (2..=d).map(|s| ps_mults(d, s)).min().unwrap();
    let c = (d as f64).sqrt().ceil() as usize;
    if ps_mults(d, c) == best {
        return c;
    }
    (2..=d).find(|&s| ps_mults(d, s) == best).unwrap()
}

/// Paterson-Stockmeyer evaluation. Powers `A2..A{s}`, block sums
/// `B_j_1 = c_{js} I + c_{js+1} A`, `B_j_k = B_j_{k-1} + c_{js+k} A{k}`, and the
/// Horner recursion in `A^s`: `C_j = P_{j+1} A{s}`, `P_j = C_j + B_j_{last}`.
pub fn graph_ps<T: Scalar>(c: &[T]) -> Result<(ComputationGraph<T>, Vec<CoeffRef>)> {
    if c.len() < 3 {
        return graph_monomial(c);
    }
    let d = c.len() - 1;
    let s = ps_block_size(d);
    let mut g = ComputationGraph::new();
    let mut refs: Vec<Option<CoeffRef>> = vec![None; c.len()];
    let pow = |k: usize| if k == 1 { INPUT_A.to_string() } else { format!("A{k}") };
    for k in 2..=s {
        g.add_mult(&pow(k), &pow(k - 1), INPUT_A)?;
    }
    let (q, r) = (d / s, d % s);
    // the top coefficient is absorbed into block q-1 when d is a multiple of s
    let top = if r == 0 { q - 1 } else { q };
    let mut block_out = Vec::new();
    for j in 0..=top {
        let lo = j * s;
        let hi = (lo + s - 1).min(d);
        let second = if lo + 1 <= d { c[lo + 1].clone() } else { T::zero() };
        let b1 = format!("B_{j}_1");
        g.add_lincomb(&b1, c[lo].clone(), INPUT_I, second, INPUT_A)?;
        refs[lo] = Some(CoeffRef::new(&b1, 1));
        if lo < d {
            refs[lo + 1] = Some(CoeffRef::new(&b1, 2));
        }
        let mut last = b1;
        for k in 2..=hi.saturating_sub(lo) {
            let name = format!("B_{j}_{k}");
            g.add_lincomb(&name, T::one(), &last, c[lo + k].clone(), &pow(k))?;
            refs[lo + k] = Some(CoeffRef::new(&name, 2));
            last = name;
        }
        if j == top && r == 0 {
            let name = format!("B_{j}_{s}");
            g.add_lincomb(&name, T::one(), &last, c[d].clone(), &pow(s))?;
            refs[d] = Some(CoeffRef::new(&name, 2));
            last = name;
        }
        block_out.push(last);
    }
    let mut acc = block_out[top].clone();
    for j in (0..top).rev() {
        let cj = format!("C{j}");
        g.add_mult(&cj, &acc, &pow(s))?;
        let pj = format!("P{j}");
        g.add_lincomb(&pj, T::one(), &cj, T::one(), &block_out[j])?;
        acc = pj;
    }
    g.set_outputs(&[&acc])?;
    Ok((g, refs.into_iter().map(|r| r.unwrap()).collect()))
}

/// Classical schemes that can be written in degree-optimal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbedScheme {
    Monomial,
    Horner,
    Ps,
    /// Diagonal Padé approximant of the exponential with scaling and squaring.
    NativeExp { degree: usize, squarings: usize },
    /// `X_{k+1} = X_k (2I - A X_k)`, `X_0 = A`.
    NewtonSchulz { iters: usize },
}

/// Degree-optimal form reproducing a classical scheme. Polynomial schemes take
/// the monomial coefficients `c`; the others ignore `c` and create their
/// constants at `prec` bits.
pub fn embed_degopt<T: Scalar>(scheme: EmbedScheme, c: &[T], prec: u32) -> Result<Degopt<T>> {
    match scheme {
        EmbedScheme::Monomial => embed_monomial(c),
        EmbedScheme::Horner => embed_horner(c),
        EmbedScheme::Ps => embed_ps(c),
        EmbedScheme::NativeExp { degree, squarings } => embed_exp_pade(degree, squarings, prec),
        EmbedScheme::NewtonSchulz { iters } => embed_newton_schulz(iters, prec),
    }
}

// Degree <= 1: one dummy product with zero weight.
fn embed_low<T: Scalar>(c: &[T]) -> Result<Degopt<T>> {
    if c.is_empty() {
        return Err(Error::CoeffArity("at least one coefficient is required".into()));
    }
    let y = vec![c[0].clone(), c.get(1).cloned().unwrap_or_else(T::zero), T::zero()];
    Degopt::new(vec![unit(2, 1)], vec![unit(2, 1)], y)
}

fn embed_monomial<T: Scalar>(c: &[T]) -> Result<Degopt<T>> {
    if c.len() < 3 {
        return embed_low(c);
    }
    let m = c.len() - 2;
    let ha = (0..m).map(|k| unit(k + 2, k + 1)).collect();
    let hb = (0..m).map(|k| unit(k + 2, 1)).collect();
    Degopt::new(ha, hb, c.to_vec())
}

fn embed_horner<T: Scalar>(c: &[T]) -> Result<Degopt<T>> {
    if c.len() < 3 {
        return embed_low(c);
    }
    let d = c.len() - 1;
    let m = d - 1;
    let mut ha = Vec::new();
    for k in 0..m {
        let mut row = vec![T::zero(); k + 2];
        if k == 0 {
            row[0] = c[d - 1].clone();
            row[1] = c[d].clone();
        } else {
            row[0] = c[d - 1 - k].clone();
            row[k + 1] = T::one();
        }
        ha.push(row);
    }
    let hb = (0..m).map(|k| unit(k + 2, 1)).collect();
    let mut y = vec![T::zero(); m + 2];
    y[0] = c[0].clone();
    y[m + 1] = T::one();
    Degopt::new(ha, hb, y)
}

fn embed_ps<T: Scalar>(c: &[T]) -> Result<Degopt<T>> {
    if c.len() < 3 {
        return embed_low(c);
    }
    let d = c.len() - 1;
    let s = ps_block_size(d);
    let (q, r) = (d / s, d % s);
    let top = if r == 0 { q - 1 } else { q };
    let mut ha: Vec<Vec<T>> = Vec::new();
    let mut hb: Vec<Vec<T>> = Vec::new();
    // B_{k+1} = A^k for k = 2..s
    for k in 0..s - 1 {
        ha.push(unit(k + 2, k + 1));
        hb.push(unit(k + 2, 1));
    }
    // block j as a combination of I, A, .., A^{s-1} (and A^s for the absorbed top term)
    let block = |j: usize, len: usize| -> Vec<T> {
        let mut row = vec![T::zero(); len];
        for i in 0..s {
            let idx = j * s + i;
            if idx <= d {
                row[i] = c[idx].clone();
            }
        }
        if j == top && r == 0 {
            row[s] = c[d].clone();
        }
        row
    };
    let pos_as = s; // index of A^s among the basis (0-based), B_{s+1}
    for (n, j) in (1..=top).rev().enumerate() {
        let k = ha.len();
        ha.push(unit(k + 2, pos_as));
        let mut row = block(j, k + 2);
        if n > 0 {
            row[k + 1] = T::one();
        }
        hb.push(row);
    }
    let m = ha.len();
    let mut y = block(0, m + 2);
    if top > 0 {
        y[m + 1] = T::one();
    }
    Degopt::new(ha, hb, y)
}

/// Exact diagonal Padé coefficients `b_j = (2m-j)! m! / ((2m)! j! (m-j)!)` of the exponential.
pub fn pade_exp_coeffs(m: usize, prec: u32) -> Vec<BigReal> {
    assert!(m <= 13, "Padé degree above 13 overflows the exact integer path");
    let fact = |n: usize| -> u128 { (1..=n as u128).product::<u128>().max(1) };
    (0..=m)
        .map(|j| {
            let mut num = fact(2 * m - j) * fact(m);
            let mut den = fact(2 * m) * fact(j) * fact(m - j);
            let g = gcd(num, den);
            num /= g;
            den /= g;
            BigReal::from_u128(num).round_to(prec.max(128)) / BigReal::from_u128(den).round_to(prec.max(128))
        })
        .map(|b| b.round_to(prec))
        .collect()
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn big_to<T: Scalar>(b: &BigReal, prec: u32) -> T {
    T::from_real(<T::Real as Real>::from_big(b, prec))
}

fn embed_exp_pade<T: Scalar>(degree: usize, squarings: usize, prec: u32) -> Result<Degopt<T>> {
    if ![3, 5, 7, 9, 13].contains(&degree) {
        return Err(Error::Precondition(format!("Padé degree {degree} not in {{3,5,7,9,13}}")));
    }
    let b: Vec<T> = pade_exp_coeffs(degree, prec).iter().map(|x| big_to(x, prec)).collect();
    let scale = T::from_real(<T::Real as Real>::from_i64_prec(1, 2).mul_pow2(-(squarings as i64)));
    let mut ha: Vec<Vec<T>> = Vec::new();
    let mut hb: Vec<Vec<T>> = Vec::new();
    let mut ops = Vec::new();
    // basis positions (0-based): 0 = I, 1 = A
    let push = |ha: &mut Vec<Vec<T>>, hb: &mut Vec<Vec<T>>, ops: &mut Vec<RowOp>, a: Vec<(usize, T)>, bb: Vec<(usize, T)>, op| {
        let len = ha.len() + 2;
        let mut ra = vec![T::zero(); len];
        let mut rb = vec![T::zero(); len];
        for (i, v) in a {
            ra[i] = ra[i].clone() + &v;
        }
        for (i, v) in bb {
            rb[i] = rb[i].clone() + &v;
        }
        ha.push(ra);
        hb.push(rb);
        ops.push(op);
        len
    };
    // even powers of the scaled argument; entry k holds the basis index of A_s^{2k}
    let mut even = vec![0usize];
    let sc = |k: usize| -> T {
        // scale^k applied to coefficient of A^k
        let mut v = T::one();
        for _ in 0..k {
            v = v * &scale;
        }
        v
    };
    let npow = if degree == 13 { 3 } else { (degree - 1) / 2 };
    for k in 1..=npow {
        let idx = if k == 1 {
            push(&mut ha, &mut hb, &mut ops, vec![(1, T::one())], vec![(1, T::one())], RowOp::Mult)
        } else {
            push(&mut ha, &mut hb, &mut ops, vec![(even[k - 1], T::one())], vec![(even[1], T::one())], RowOp::Mult)
        };
        even.push(idx);
    }
    // coefficient of A^j (scaled) on the basis
    let term = |j: usize, bj: &T| -> (usize, T, usize) {
        // returns (basis index, coefficient, odd flag)
        (even[j / 2], bj.clone() * &sc(j), j % 2)
    };
    let (u_idx, v_terms): (usize, Vec<(usize, T)>) = if degree == 13 {
        // U = A [A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I]
        let w1 = push(
            &mut ha,
            &mut hb,
            &mut ops,
            vec![(even[3], T::one())],
            [13, 11, 9].iter().map(|&j| { let (i, v, _) = term(j - 7, &b[j]); (i, v * &sc(7)) }).collect(),
            RowOp::Mult,
        );
        let mut inner: Vec<(usize, T)> = vec![(w1, T::one())];
        for j in [7, 5, 3, 1] {
            let (i, v, _) = term(j - 1, &b[j]);
            inner.push((i, v * &sc(1)));
        }
        let u = push(&mut ha, &mut hb, &mut ops, vec![(1, T::one())], inner, RowOp::Mult);
        // V = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
        let z1 = push(
            &mut ha,
            &mut hb,
            &mut ops,
            vec![(even[3], T::one())],
            [12, 10, 8].iter().map(|&j| { let (i, v, _) = term(j - 6, &b[j]); (i, v * &sc(6)) }).collect(),
            RowOp::Mult,
        );
        let mut v: Vec<(usize, T)> = vec![(z1, T::one())];
        for j in [6, 4, 2, 0] {
            let (i, c, _) = term(j, &b[j]);
            v.push((i, c));
        }
        (u, v)
    } else {
        let inner: Vec<(usize, T)> = (0..=degree)
            .filter(|j| j % 2 == 1)
            .map(|j| { let (i, v, _) = term(j - 1, &b[j]); (i, v * &sc(1)) })
            .collect();
        let u = push(&mut ha, &mut hb, &mut ops, vec![(1, T::one())], inner, RowOp::Mult);
        let v = (0..=degree).filter(|j| j % 2 == 0).map(|j| { let (i, c, _) = term(j, &b[j]); (i, c) }).collect();
        (u, v)
    };
    let mut den = v_terms.clone();
    den.push((u_idx, -T::one()));
    let mut num = v_terms;
    num.push((u_idx, T::one()));
    let mut last = push(&mut ha, &mut hb, &mut ops, den, num, RowOp::Ldiv);
    for _ in 0..squarings {
        last = push(&mut ha, &mut hb, &mut ops, vec![(last, T::one())], vec![(last, T::one())], RowOp::Mult);
    }
    let m = ha.len();
    let y = unit(m + 2, last);
    Degopt::with_ops(ha, hb, y, ops)
}

fn embed_newton_schulz<T: Scalar>(iters: usize, prec: u32) -> Result<Degopt<T>> {
    if iters == 0 {
        return Err(Error::Precondition("at least one Newton-Schulz iteration is required".into()));
    }
    let two = T::from_f64_prec(2.0, prec);
    let mut ha = Vec::new();
    let mut hb = Vec::new();
    let mut x = 1usize; // basis index of X_k
    for _ in 0..iters {
        let k = ha.len();
        // B = X_k A
        ha.push(unit(k + 2, x));
        hb.push(unit(k + 2, 1));
        let ax = k + 2;
        // X_{k+1} = X_k (2I - A X_k)
        let k = ha.len();
        ha.push(unit(k + 2, x));
        let mut row = vec![T::zero(); k + 2];
        row[0] = two.clone();
        row[ax] = -T::one();
        hb.push(row);
        x = k + 2;
    }
    let m = ha.len();
    Degopt::new(ha, hb, unit(m + 2, x))
}

/// Coefficients of the level-one `y_{1s}` scheme:
/// `y_0 = A^s (c_1 A + ... + c_s A^s)`,
/// `y_1 = (y_0 + d_1 A + ... + d_s A^s)(y_0 + e_2 A^2 + ... + e_s A^s) + e_0 y_0 + f_0 I + ... + f_s A^s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Yks<T> {
    pub s: usize,
    /// `c_1..c_s`
    pub c: Vec<T>,
    /// `d_1..d_s`
    pub d: Vec<T>,
    /// `e_2..e_s`
    pub e: Vec<T>,
    pub e0: T,
    /// `f_0..f_s`
    pub f: Vec<T>,
}

/// Degree-optimal form of a `y_{1s}` scheme; `s + 1` multiplications.
pub fn yks_to_degopt<T: Scalar>(p: &Yks<T>) -> Result<Degopt<T>> {
    let s = p.s;
    if s < 2 || p.c.len() != s || p.d.len() != s || p.e.len() != s - 1 || p.f.len() != s + 1 {
        return Err(Error::CoeffArity(format!(
            "malformed y_ks coefficients for s = {s}: need {s} c, {s} d, {} e, {} f",
            s.saturating_sub(1),
            s + 1
        )));
    }
    let mut ha: Vec<Vec<T>> = Vec::new();
    let mut hb: Vec<Vec<T>> = Vec::new();
    // powers A^2..A^s at basis positions 2..s (0-based)
    for k in 0..s - 1 {
        ha.push(unit(k + 2, k + 1));
        hb.push(unit(k + 2, 1));
    }
    // y_0
    let k = ha.len();
    ha.push(unit(k + 2, s));
    let mut row = vec![T::zero(); k + 2];
    for i in 1..=s {
        row[i] = p.c[i - 1].clone();
    }
    hb.push(row);
    let y0 = k + 2;
    let k = ha.len();
    let mut ra = vec![T::zero(); k + 2];
    let mut rb = vec![T::zero(); k + 2];
    for i in 1..=s {
        ra[i] = p.d[i - 1].clone();
    }
    for i in 2..=s {
        rb[i] = p.e[i - 2].clone();
    }
    ra[y0] = T::one();
    rb[y0] = T::one();
    ha.push(ra);
    hb.push(rb);
    let m = ha.len();
    let mut y = vec![T::zero(); m + 2];
    for i in 0..=s {
        y[i] = p.f[i].clone();
    }
    y[y0] = p.e0.clone();
    y[m + 1] = T::one();
    Degopt::new(ha, hb, y)
}

/// Degree of the represented polynomial. Coefficients are expanded at no less
/// than 256 bits and those below `2^{-p/2}` (relative to the largest) count as zero.
pub fn degopt_degree<T: Scalar>(d: &Degopt<T>) -> Result<usize> {
    if d.has_ldiv() {
        return Err(Error::Unsupported("degree of a degree-optimal form with left solves".into()));
    }
    let (g, _) = graph_degopt(d)?;
    let p = g.precision().max(256);
    let gb = g.convert::<Complex<BigReal>>(p)?;
    let coeffs = eval_graph_poly(&gb)?;
    let mags: Vec<BigReal> = coeffs.iter().map(|c| c.modulus()).collect();
    let mut scale = BigReal::from_i64(1, p);
    for m in &mags {
        if *m > scale {
            scale = m.clone();
        }
    }
    let tol = scale * &BigReal::from_i64(1, p).mul_pow2(-(p as i64) / 2);
    Ok(mags.iter().rposition(|m| *m > tol).unwrap_or(0))
}

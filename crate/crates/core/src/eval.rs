//! Evaluation of a graph on scalars, pointwise vectors, matrices, polynomials
//! and truncated power series.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{ComputationGraph, OpKind, INPUT_A, INPUT_I};
use crate::numerics::{BigReal, Complex, Embed, Matrix, Poly, Scalar, TruncSeries};

/// A value the graph operations can act on.
pub trait GraphValue: Clone {
    type Scalar: Scalar;
    /// The identity of the same shape.
    fn identity_like(&self) -> Self;
    fn lincomb(a: &Self::Scalar, x: &Self, b: &Self::Scalar, y: &Self) -> Result<Self>;
    fn mul(x: &Self, y: &Self) -> Result<Self>;
    /// `x^{-1} * y`.
    fn ldiv(x: &Self, y: &Self) -> Result<Self>;
}

macro_rules! scalar_value {
    ($t:ty) => {
        impl GraphValue for $t {
            type Scalar = $t;
            fn identity_like(&self) -> Self {
                <$t as Scalar>::one()
            }
            fn lincomb(a: &$t, x: &$t, b: &$t, y: &$t) -> Result<$t> {
                Ok(a.clone() * x + &(b.clone() * y))
            }
            fn mul(x: &$t, y: &$t) -> Result<$t> {
                Ok(x.clone() * y)
            }
            fn ldiv(x: &$t, y: &$t) -> Result<$t> {
                if Scalar::is_zero(x) {
                    return Err(Error::ZeroDivision { index: 0, value: format!("{x:?}") });
                }
                Ok(y.clone() / x)
            }
        }
    };
}

scalar_value!(f64);
scalar_value!(BigReal);
scalar_value!(Complex<f64>);
scalar_value!(Complex<BigReal>);

/// A vector of independent scalar evaluations, combined elementwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Pointwise<S>(pub Vec<S>);

impl<S: Scalar> GraphValue for Pointwise<S> {
    type Scalar = S;
    fn identity_like(&self) -> Self {
        Pointwise(vec![S::one(); self.0.len()])
    }
    fn lincomb(a: &S, x: &Self, b: &S, y: &Self) -> Result<Self> {
        same_len(x, y)?;
        Ok(Pointwise(x.0.iter().zip(&y.0).map(|(p, q)| a.clone() * p + &(b.clone() * q)).collect()))
    }
    fn mul(x: &Self, y: &Self) -> Result<Self> {
        same_len(x, y)?;
        Ok(Pointwise(x.0.iter().zip(&y.0).map(|(p, q)| p.clone() * q).collect()))
    }
    fn ldiv(x: &Self, y: &Self) -> Result<Self> {
        same_len(x, y)?;
        let mut out = Vec::with_capacity(x.0.len());
        for (i, (p, q)) in x.0.iter().zip(&y.0).enumerate() {
            if p.is_zero() {
                return Err(Error::ZeroDivision { index: i, value: format!("{p:?}") });
            }
            out.push(q.clone() / p);
        }
        Ok(Pointwise(out))
    }
}

fn same_len<S>(x: &Pointwise<S>, y: &Pointwise<S>) -> Result<()> {
    if x.0.len() != y.0.len() {
        return Err(Error::Dimension(format!("vectors of length {} and {}", x.0.len(), y.0.len())));
    }
    Ok(())
}

impl<S: Scalar> GraphValue for Matrix<S> {
    type Scalar = S;
    fn identity_like(&self) -> Self {
        Matrix::identity(self.rows())
    }
    fn lincomb(a: &S, x: &Self, b: &S, y: &Self) -> Result<Self> {
        Matrix::lincomb(a, x, b, y)
    }
    fn mul(x: &Self, y: &Self) -> Result<Self> {
        x.matmul(y)
    }
    fn ldiv(x: &Self, y: &Self) -> Result<Self> {
        x.lu_solve(y)
    }
}

impl<S: Scalar> GraphValue for Poly<S> {
    type Scalar = S;
    fn identity_like(&self) -> Self {
        Poly::new(vec![S::one()])
    }
    fn lincomb(a: &S, x: &Self, b: &S, y: &Self) -> Result<Self> {
        Ok(Poly::lincomb(a, x, b, y))
    }
    fn mul(x: &Self, y: &Self) -> Result<Self> {
        Ok(x.mul(y))
    }
    fn ldiv(x: &Self, y: &Self) -> Result<Self> {
        x.ldiv(y)
    }
}

impl<S: Scalar> GraphValue for TruncSeries<S> {
    type Scalar = S;
    fn identity_like(&self) -> Self {
        TruncSeries::constant(S::one(), self.nterms())
    }
    fn lincomb(a: &S, x: &Self, b: &S, y: &Self) -> Result<Self> {
        TruncSeries::lincomb(a, x, b, y)
    }
    fn mul(x: &Self, y: &Self) -> Result<Self> {
        x.mul(y)
    }
    fn ldiv(x: &Self, y: &Self) -> Result<Self> {
        x.ldiv(y)
    }
}

/// Evaluation settings.
#[derive(Clone, Debug)]
pub struct EvalOptions {
    /// Id bound to the argument.
    pub input: String,
    /// Drop intermediate values after their last use.
    pub reuse_memory: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { input: INPUT_A.to_string(), reuse_memory: true }
    }
}

impl EvalOptions {
    pub fn with_input(input: &str) -> Self {
        EvalOptions { input: input.to_string(), ..Default::default() }
    }
}

/// Values of every node needed for the outputs, in topological order.
pub struct NodeValues<V> {
    pub order: Vec<String>,
    pub values: HashMap<String, V>,
    pub input: V,
    pub identity: V,
}

impl<V: Clone> NodeValues<V> {
    pub fn get<'a>(&'a self, id: &str, input_id: &str) -> Option<&'a V> {
        if id == INPUT_I {
            Some(&self.identity)
        } else if id == input_id {
            Some(&self.input)
        } else {
            self.values.get(id)
        }
    }
}

fn embed_pair<T: Embed<S>, S: Scalar>(c: &(T, T)) -> (S, S) {
    (c.0.embed(), c.1.embed())
}

/// Evaluate every output. The argument is bound to `opts.input`.
pub fn eval_graph_with<T, V>(g: &ComputationGraph<T>, x: &V, opts: &EvalOptions) -> Result<Vec<V>>
where
    V: GraphValue,
    T: Embed<V::Scalar>,
{
    if g.outputs().is_empty() {
        return Err(Error::Precondition("graph has no outputs".into()));
    }
    g.validate(&opts.input)?;
    let order = g.topo_order();
    let pos: HashMap<&str, usize> = order.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut last_use: HashMap<&str, usize> = HashMap::new();
    if opts.reuse_memory {
        for (i, id) in order.iter().enumerate() {
            let n = g.node(id).unwrap();
            for p in n.parent_list() {
                if pos.contains_key(p) {
                    last_use.insert(p, i);
                }
            }
        }
        for o in g.outputs() {
            last_use.insert(o.as_str(), usize::MAX);
        }
    }
    let ident = x.identity_like();
    let mut vals: HashMap<&str, V> = HashMap::new();
    for (i, id) in order.iter().enumerate() {
        let n = g.node(id).unwrap();
        let get = |p: &str| -> &V {
            if p == INPUT_I {
                &ident
            } else if p == opts.input {
                x
            } else {
                &vals[p]
            }
        };
        let (l, r) = (get(&n.parents.0), get(&n.parents.1));
        let v = match n.op {
            OpKind::Lincomb => {
                let (a, b) = embed_pair::<T, V::Scalar>(n.coeffs.as_ref().unwrap());
                V::lincomb(&a, l, &b, r)?
            }
            OpKind::Mult => V::mul(l, r)?,
            OpKind::Ldiv => V::ldiv(l, r)?,
        };
        if opts.reuse_memory {
            for p in n.parent_list() {
                if last_use.get(p) == Some(&i) {
                    vals.remove(p);
                }
            }
        }
        vals.insert(id, v);
    }
    g.outputs()
        .iter()
        .map(|o| {
            if o == INPUT_I {
                Ok(ident.clone())
            } else if *o == opts.input {
                Ok(x.clone())
            } else {
                vals.get(o.as_str()).cloned().ok_or_else(|| Error::UnknownNode(o.clone()))
            }
        })
        .collect()
}

/// Evaluate the first output with the argument bound to `A`.
pub fn eval_graph<T, V>(g: &ComputationGraph<T>, x: &V) -> Result<V>
where
    V: GraphValue,
    T: Embed<V::Scalar>,
{
    Ok(eval_graph_with(g, x, &EvalOptions::default())?.swap_remove(0))
}

/// Evaluate the first output with the argument bound to `input`.
pub fn eval_graph_input<T, V>(g: &ComputationGraph<T>, x: &V, input: &str) -> Result<V>
where
    V: GraphValue,
    T: Embed<V::Scalar>,
{
    Ok(eval_graph_with(g, x, &EvalOptions::with_input(input))?.swap_remove(0))
}

/// Keep the value of every node (used by derivative and error propagation).
pub fn eval_all_nodes<T, V>(g: &ComputationGraph<T>, x: &V, input: &str) -> Result<NodeValues<V>>
where
    V: GraphValue,
    T: Embed<V::Scalar>,
{
    g.validate(input)?;
    let order = g.topo_order();
    let ident = x.identity_like();
    let mut values: HashMap<String, V> = HashMap::new();
    for id in &order {
        let n = g.node(id).unwrap();
        let get = |p: &str| -> &V {
            if p == INPUT_I {
                &ident
            } else if p == input {
                x
            } else {
                &values[p]
            }
        };
        let (l, r) = (get(&n.parents.0), get(&n.parents.1));
        let v = match n.op {
            OpKind::Lincomb => {
                let (a, b) = embed_pair::<T, V::Scalar>(n.coeffs.as_ref().unwrap());
                V::lincomb(&a, l, &b, r)?
            }
            OpKind::Mult => V::mul(l, r)?,
            OpKind::Ldiv => V::ldiv(l, r)?,
        };
        values.insert(id.clone(), v);
    }
    Ok(NodeValues { order, values, input: x.clone(), identity: ident })
}

/// Monomial coefficients (ascending) of the polynomial computed by the first
/// output. Graphs with an LDIV node are rejected.
pub fn eval_graph_poly<T: Scalar>(g: &ComputationGraph<T>) -> Result<Vec<T>> {
    if g.has_ldiv() {
        return Err(Error::Unsupported("polynomial evaluation of a graph with an LDIV node".into()));
    }
    let x = Poly::<T>::x(g.precision());
    Ok(eval_graph(g, &x)?.into_coeffs())
}

use super::Scalar;
use crate::error::{Error, Result};

/// Polynomial with coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        let mut p = Poly { coeffs };
        if p.coeffs.is_empty() {
            p.coeffs.push(S::zero());
        }
        p
    }

    /// The monomial `x`.
    pub fn x(prec: u32) -> Self {
        Poly { coeffs: vec![S::zero(), S::from_f64_prec(1.0, prec)] }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    /// Largest index with a nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    /// Coefficient list without trailing zeros (at least one entry).
    pub fn trimmed(&self) -> Vec<S> {
        self.coeffs[..=self.degree()].to_vec()
    }

    pub fn lincomb(a: &S, x: &Self, b: &S, y: &Self) -> Self {
        let n = x.coeffs.len().max(y.coeffs.len());
        let z = S::zero();
        Poly {
            coeffs: (0..n)
                .map(|k| {
                    let p = x.coeffs.get(k).unwrap_or(&z);
                    let q = y.coeffs.get(k).unwrap_or(&z);
                    a.clone() * p + &(b.clone() * q)
                })
                .collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = vec![S::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + &(a.clone() * b);
            }
        }
        Poly { coeffs: out }
    }

    pub fn ldiv(&self, _: &Self) -> Result<Self> {
        Err(Error::Unsupported("polynomial evaluation of a graph with an LDIV node".into()))
    }

    pub fn eval(&self, x: &S) -> S {
        let mut acc = self.coeffs.last().unwrap().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * x + c;
        }
        acc
    }
}

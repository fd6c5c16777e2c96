use super::{Real, Scalar};
use crate::error::{Error, Result};

/// Power series truncated to a fixed number of terms, `c_0 + c_1 z + ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> TruncSeries<S> {
    /// Series with the given coefficients; `nterms = coeffs.len()`.
    pub fn new(coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one term");
        TruncSeries { coeffs }
    }

    pub fn zeros(nterms: usize) -> Self {
        Self::new(vec![S::zero(); nterms])
    }

    pub fn constant(c: S, nterms: usize) -> Self {
        let mut s = Self::zeros(nterms);
        s.coeffs[0] = c;
        s
    }

    /// The series of the identity map `z`.
    pub fn variable(nterms: usize, prec: u32) -> Self {
        let mut s = Self::zeros(nterms);
        if nterms > 1 {
            s.coeffs[1] = S::from_f64_prec(1.0, prec);
        }
        s
    }

    pub fn nterms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.nterms() != o.nterms() {
            return Err(Error::Dimension(format!(
                "series lengths differ: {} vs {}",
                self.nterms(),
                o.nterms()
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(Self::new(self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() + b).collect()))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(Self::new(self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() - b).collect()))
    }

    pub fn scale(&self, a: &S) -> Self {
        Self::new(self.coeffs.iter().map(|c| a.clone() * c).collect())
    }

    /// `a*self + b*o`.
    pub fn lincomb(a: &S, x: &Self, b: &S, y: &Self) -> Result<Self> {
        x.check(y)?;
        Ok(Self::new(
            x.coeffs.iter().zip(&y.coeffs).map(|(p, q)| a.clone() * p + &(b.clone() * q)).collect(),
        ))
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let n = self.nterms();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = S::zero();
            for j in 0..=k {
                if self.coeffs[j].is_zero() || o.coeffs[k - j].is_zero() {
                    continue;
                }
                acc = acc + &(self.coeffs[j].clone() * &o.coeffs[k - j]);
            }
            out.push(acc);
        }
        Ok(Self::new(out))
    }

    /// `self^{-1} * o`; the constant term of `self` must be nonzero.
    pub fn ldiv(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let d0 = &self.coeffs[0];
        if d0.is_zero() {
            return Err(Error::Singular("series divisor has zero constant term".into()));
        }
        let n = self.nterms();
        let mut q: Vec<S> = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = o.coeffs[k].clone();
            for j in 1..=k {
                if self.coeffs[j].is_zero() {
                    continue;
                }
                acc = acc - &(self.coeffs[j].clone() * &q[k - j]);
            }
            q.push(acc / d0);
        }
        Ok(Self::new(q))
    }

    /// `outer(inner(z))`; the inner series must have zero constant term.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        outer.check(inner)?;
        if !inner.coeffs[0].is_zero() {
            return Err(Error::Precondition(
                "inner series of a composition must have zero constant term".into(),
            ));
        }
        let n = outer.nterms();
        let mut acc = Self::constant(outer.coeffs[n - 1].clone(), n);
        for k in (0..n - 1).rev() {
            acc = acc.mul(inner)?;
            acc.coeffs[0] = acc.coeffs[0].clone() + &outer.coeffs[k];
        }
        Ok(acc)
    }

    /// Truncated exponential series `sum z^k/k!` at the given precision.
    pub fn exp_series(nterms: usize, prec: u32) -> Self {
        let mut c = Vec::with_capacity(nterms);
        let mut term = <S::Real as Real>::from_i64_prec(1, prec);
        for k in 0..nterms {
            if k > 0 {
                term = term / &<S::Real as Real>::from_i64_prec(k as i64, prec);
            }
            c.push(S::from_real(term.clone()));
        }
        Self::new(c)
    }

    /// Truncated series of `log(1+z)`.
    pub fn log1p_series(nterms: usize, prec: u32) -> Self {
        let mut c = vec![S::zero()];
        for k in 1..nterms {
            let v = <S::Real as Real>::from_i64_prec(1, prec) / &<S::Real as Real>::from_i64_prec(k as i64, prec);
            c.push(S::from_real(if k % 2 == 1 { v } else { -v }));
        }
        Self::new(c)
    }

    /// Evaluate the truncated series at a point.
    pub fn eval(&self, z: &S) -> S {
        let n = self.nterms();
        let mut acc = self.coeffs[n - 1].clone();
        for k in (0..n - 1).rev() {
            acc = acc * z + &self.coeffs[k];
        }
        acc
    }
}

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex;
use num_traits::Num;

use super::BigReal;

/// Real floating-point field: binary64 or multiple precision.
pub trait Real:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Num
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + AddAssign
    + for<'a> AddAssign<&'a Self>
    + SubAssign
    + for<'a> SubAssign<&'a Self>
    + MulAssign
    + for<'a> MulAssign<&'a Self>
{
    fn prec(&self) -> u32;
    fn from_f64_prec(x: f64, prec: u32) -> Self;
    fn from_i64_prec(x: i64, prec: u32) -> Self;
    fn to_f64(&self) -> f64;
    fn to_big(&self) -> BigReal;
    fn from_big(b: &BigReal, prec: u32) -> Self;
    fn round_to(&self, prec: u32) -> Self;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn atan2(&self, x: &Self) -> Self;
    fn hypot(&self, y: &Self) -> Self;
    fn pi(prec: u32) -> Self;
    fn mul_pow2(&self, k: i64) -> Self;
    fn is_finite(&self) -> bool;
    fn parse_prec(s: &str, prec: u32) -> Option<Self>;
    /// String that parses back to the same value at the same precision.
    fn to_roundtrip(&self) -> String;
    /// Name of the type in graph files, e.g. `Float64` or `BigFloat256`.
    fn type_tag(prec: u32) -> String;
    /// Fixed precision of the type, if any.
    fn fixed_prec() -> Option<u32>;

    /// `2^-prec`.
    fn unit_roundoff(prec: u32) -> Self {
        Self::from_i64_prec(1, 2).mul_pow2(-(prec as i64)).round_to(prec.max(2))
    }

    fn max_of(self, o: Self) -> Self {
        if o > self {
            o
        } else {
            self
        }
    }
}

impl Real for f64 {
    fn prec(&self) -> u32 {
        53
    }
    fn from_f64_prec(x: f64, _: u32) -> Self {
        x
    }
    fn from_i64_prec(x: i64, _: u32) -> Self {
        x as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_big(&self) -> BigReal {
        BigReal::from_f64(*self, 53)
    }
    fn from_big(b: &BigReal, _: u32) -> Self {
        b.to_f64()
    }
    fn round_to(&self, _: u32) -> Self {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn atan2(&self, x: &Self) -> Self {
        f64::atan2(*self, *x)
    }
    fn hypot(&self, y: &Self) -> Self {
        f64::hypot(*self, *y)
    }
    fn pi(_: u32) -> Self {
        std::f64::consts::PI
    }
    fn mul_pow2(&self, k: i64) -> Self {
        self * 2f64.powi(k as i32)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn parse_prec(s: &str, _: u32) -> Option<Self> {
        let t = s.trim();
        if t.contains("0x") {
            return BigReal::parse(t, 53).map(|b| b.to_f64());
        }
        t.parse().ok()
    }
    fn to_roundtrip(&self) -> String {
        format!("{self:?}")
    }
    fn type_tag(_: u32) -> String {
        "Float64".into()
    }
    fn fixed_prec() -> Option<u32> {
        Some(53)
    }
    fn unit_roundoff(prec: u32) -> Self {
        2f64.powi(-(prec.min(1074) as i32))
    }
}

impl Real for BigReal {
    fn prec(&self) -> u32 {
        BigReal::prec(self)
    }
    fn from_f64_prec(x: f64, prec: u32) -> Self {
        BigReal::from_f64(x, prec)
    }
    fn from_i64_prec(x: i64, prec: u32) -> Self {
        BigReal::from_i64(x, prec)
    }
    fn to_f64(&self) -> f64 {
        BigReal::to_f64(self)
    }
    fn to_big(&self) -> BigReal {
        self.clone()
    }
    fn from_big(b: &BigReal, prec: u32) -> Self {
        b.round_to(prec)
    }
    fn round_to(&self, prec: u32) -> Self {
        BigReal::round_to(self, prec)
    }
    fn abs(&self) -> Self {
        BigReal::abs(self)
    }
    fn sqrt(&self) -> Self {
        BigReal::sqrt(self)
    }
    fn exp(&self) -> Self {
        BigReal::exp(self)
    }
    fn ln(&self) -> Self {
        BigReal::ln(self)
    }
    fn sin(&self) -> Self {
        BigReal::sin(self)
    }
    fn cos(&self) -> Self {
        BigReal::cos(self)
    }
    fn atan2(&self, x: &Self) -> Self {
        BigReal::atan2(self, x)
    }
    fn hypot(&self, y: &Self) -> Self {
        BigReal::hypot(self, y)
    }
    fn pi(prec: u32) -> Self {
        BigReal::pi(prec)
    }
    fn mul_pow2(&self, k: i64) -> Self {
        BigReal::mul_pow2(self, k)
    }
    fn is_finite(&self) -> bool {
        BigReal::is_finite(self)
    }
    fn parse_prec(s: &str, prec: u32) -> Option<Self> {
        BigReal::parse(s, prec)
    }
    fn to_roundtrip(&self) -> String {
        self.to_roundtrip_string()
    }
    fn type_tag(prec: u32) -> String {
        format!("BigFloat{prec}")
    }
    fn fixed_prec() -> Option<u32> {
        None
    }
}

/// Coefficient and value scalar: a real type or its complex extension.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    type Real: Real;
    const IS_COMPLEX: bool;

    fn from_real(r: Self::Real) -> Self;
    fn to_complex(&self) -> Complex<Self::Real>;
    /// `None` when the target is real and the imaginary part is nonzero.
    fn from_complex(c: Complex<Self::Real>) -> Option<Self>;
    fn re(&self) -> Self::Real;
    fn im(&self) -> Self::Real;
    fn modulus(&self) -> Self::Real;
    fn conj(&self) -> Self;
    fn prec(&self) -> u32;
    fn round_to(&self, prec: u32) -> Self;
    fn is_zero(&self) -> bool;
    fn type_tag(prec: u32) -> String;

    fn from_f64_prec(x: f64, prec: u32) -> Self {
        Self::from_real(Self::Real::from_f64_prec(x, prec))
    }
    /// Exact zero, carrying few bits.
    fn zero() -> Self {
        Self::from_real(Self::Real::from_i64_prec(0, 2))
    }
    /// Exact one, carrying few bits.
    fn one() -> Self {
        Self::from_real(Self::Real::from_i64_prec(1, 2))
    }
    fn is_one(&self) -> bool {
        self == &Self::one()
    }
    fn is_finite(&self) -> bool {
        self.re().is_finite() && self.im().is_finite()
    }
    fn to_roundtrip(&self) -> String {
        let re = self.re();
        if !Self::IS_COMPLEX {
            return re.to_roundtrip();
        }
        let im = self.im();
        let zero = Self::Real::from_i64_prec(0, 2);
        if im < zero {
            format!("{}-{}i", re.to_roundtrip(), (-im).to_roundtrip())
        } else {
            format!("{}+{}i", re.to_roundtrip(), im.to_roundtrip())
        }
    }
    fn parse_prec(s: &str, prec: u32) -> Option<Self> {
        let (re, im) = parse_complex_parts(s)?;
        let re = Self::Real::parse_prec(re, prec)?;
        let im = match im {
            Some(t) => Self::Real::parse_prec(&t, prec)?,
            None => Self::Real::from_i64_prec(0, 2),
        };
        Self::from_complex(Complex::new(re, im))
    }
}

// Splits "a+bi", "a-bi", "bi" or "a" into the textual real and imaginary parts.
fn parse_complex_parts(s: &str) -> Option<(&str, Option<String>)> {
    let t = s.trim();
    let body = match t.strip_suffix("im").or_else(|| t.strip_suffix('i')) {
        Some(b) => b,
        None => return Some((t, None)),
    };
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        let c = bytes[k];
        if (c == b'+' || c == b'-') && !matches!(bytes[k - 1], b'e' | b'E' | b'p' | b'P') {
            split = Some(k);
            break;
        }
    }
    match split {
        Some(k) => {
            let re = body[..k].trim();
            let mut im = body[k..].replace(' ', "");
            if im == "+" || im == "-" {
                im.push('1');
            }
            if let Some(rest) = im.strip_prefix("+-") {
                im = format!("-{rest}");
            } else if let Some(rest) = im.strip_prefix('+') {
                im = rest.to_string();
            }
            Some((re, Some(im)))
        }
        None => {
            let im = if body.is_empty() { "1".to_string() } else { body.to_string() };
            Some(("0", Some(im)))
        }
    }
}

macro_rules! real_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            type Real = $t;
            const IS_COMPLEX: bool = false;
            fn from_real(r: $t) -> Self {
                r
            }
            fn to_complex(&self) -> Complex<$t> {
                Complex::new(self.clone(), <$t as Real>::from_i64_prec(0, 2))
            }
            fn from_complex(c: Complex<$t>) -> Option<Self> {
                if num_traits::Zero::is_zero(&c.im) {
                    Some(c.re)
                } else {
                    None
                }
            }
            fn re(&self) -> $t {
                self.clone()
            }
            fn im(&self) -> $t {
                <$t as Real>::from_i64_prec(0, 2)
            }
            fn modulus(&self) -> $t {
                Real::abs(self)
            }
            fn conj(&self) -> Self {
                self.clone()
            }
            fn prec(&self) -> u32 {
                Real::prec(self)
            }
            fn round_to(&self, prec: u32) -> Self {
                Real::round_to(self, prec)
            }
            fn is_zero(&self) -> bool {
                num_traits::Zero::is_zero(self)
            }
            fn type_tag(prec: u32) -> String {
                <$t as Real>::type_tag(prec)
            }
        }

        impl Scalar for Complex<$t> {
            type Real = $t;
            const IS_COMPLEX: bool = true;
            fn from_real(r: $t) -> Self {
                Complex::new(r, <$t as Real>::from_i64_prec(0, 2))
            }
            fn to_complex(&self) -> Complex<$t> {
                self.clone()
            }
            fn from_complex(c: Complex<$t>) -> Option<Self> {
                Some(c)
            }
            fn re(&self) -> $t {
                self.re.clone()
            }
            fn im(&self) -> $t {
                self.im.clone()
            }
            fn modulus(&self) -> $t {
                Real::hypot(&self.re, &self.im)
            }
            fn conj(&self) -> Self {
                Complex::new(self.re.clone(), -self.im.clone())
            }
            fn prec(&self) -> u32 {
                Real::prec(&self.re).max(Real::prec(&self.im))
            }
            fn round_to(&self, prec: u32) -> Self {
                Complex::new(Real::round_to(&self.re, prec), Real::round_to(&self.im, prec))
            }
            fn is_zero(&self) -> bool {
                num_traits::Zero::is_zero(&self.re) && num_traits::Zero::is_zero(&self.im)
            }
            fn type_tag(prec: u32) -> String {
                format!("Complex{}", <$t as Real>::type_tag(prec))
            }
        }
    };
}

real_scalar!(f64);
real_scalar!(BigReal);

/// Lossless (or precision-increasing) embedding of one scalar type into another.
pub trait Embed<S: Scalar>: Scalar {
    fn embed(&self) -> S;
}

impl<T: Scalar> Embed<T> for T {
    fn embed(&self) -> T {
        self.clone()
    }
}

impl Embed<Complex<f64>> for f64 {
    fn embed(&self) -> Complex<f64> {
        Complex::new(*self, 0.0)
    }
}

impl Embed<Complex<BigReal>> for BigReal {
    fn embed(&self) -> Complex<BigReal> {
        Scalar::from_real(self.clone())
    }
}

impl Embed<BigReal> for f64 {
    fn embed(&self) -> BigReal {
        BigReal::from_f64(*self, 53)
    }
}

impl Embed<Complex<BigReal>> for f64 {
    fn embed(&self) -> Complex<BigReal> {
        Scalar::from_real(BigReal::from_f64(*self, 53))
    }
}

impl Embed<Complex<BigReal>> for Complex<f64> {
    fn embed(&self) -> Complex<BigReal> {
        Complex::new(BigReal::from_f64(self.re, 53), BigReal::from_f64(self.im, 53))
    }
}

/// Convert between scalar types, rounding to `prec` bits. Fails when a complex
/// value with nonzero imaginary part is converted to a real type.
pub fn convert_scalar<A: Scalar, B: Scalar>(a: &A, prec: u32) -> Option<B> {
    let re = B::Real::from_big(&a.re().to_big(), prec);
    let im = B::Real::from_big(&a.im().to_big(), prec);
    B::from_complex(Complex::new(re, im))
}

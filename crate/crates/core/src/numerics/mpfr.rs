//! Arbitrary-precision binary floating point backed by the system MPFR library.
//!
//! Every value carries its own precision. Binary operations round to the larger
//! precision of the two operands, so exact small constants (created with few
//! bits) never degrade a high-precision computation.

use std::cmp::Ordering;
use std::ffi::{CStr, CString};
use std::fmt;
use std::mem::MaybeUninit;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};
use std::os::raw::{c_char, c_int, c_long};

#[repr(C)]
struct RawMpfr {
    prec: c_long,
    sign: c_int,
    exp: c_long,
    d: *mut u64,
}

const RNDN: c_int = 0;
const RNDZ: c_int = 1;

/// Smallest precision used for exact constants such as 0 and 1.
pub const MIN_PREC: u32 = 2;

#[link(name = "mpfr")]
#[link(name = "gmp")]
extern "C" {
    fn mpfr_init2(x: *mut RawMpfr, prec: c_long);
    fn mpfr_clear(x: *mut RawMpfr);
    fn mpfr_set(rop: *mut RawMpfr, op: *const RawMpfr, rnd: c_int) -> c_int;
    fn mpfr_set_d(rop: *mut RawMpfr, op: f64, rnd: c_int) -> c_int;
    fn mpfr_set_si(rop: *mut RawMpfr, op: c_long, rnd: c_int) -> c_int;
    fn mpfr_set_si_2exp(rop: *mut RawMpfr, op: c_long, e: c_long, rnd: c_int) -> c_int;
    fn mpfr_set_str(rop: *mut RawMpfr, s: *const c_char, base: c_int, rnd: c_int) -> c_int;
    fn mpfr_get_d(op: *const RawMpfr, rnd: c_int) -> f64;
    fn mpfr_get_str(
        s: *mut c_char,
        e: *mut c_long,
        base: c_int,
        n: usize,
        op: *const RawMpfr,
        rnd: c_int,
    ) -> *mut c_char;
    fn mpfr_free_str(s: *mut c_char);
    fn mpfr_get_exp(op: *const RawMpfr) -> c_long;
    fn mpfr_add(rop: *mut RawMpfr, a: *const RawMpfr, b: *const RawMpfr, rnd: c_int) -> c_int;
    fn mpfr_sub(rop: *mut RawMpfr, a: *const RawMpfr, b: *const RawMpfr, rnd: c_int) -> c_int;
    fn mpfr_mul(rop: *mut RawMpfr, a: *const RawMpfr, b: *const RawMpfr, rnd: c_int) -> c_int;
    fn mpfr_div(rop: *mut RawMpfr, a: *const RawMpfr, b: *const RawMpfr, rnd: c_int) -> c_int;
    fn mpfr_fmod(rop: *mut RawMpfr, a: *const RawMpfr, b: *const RawMpfr, rnd: c_int) -> c_int;
    fn mpfr_sqrt(rop: *mut RawMpfr, op: *const RawMpfr, rnd: c_int) -> c_int;
    fn mpfr_exp(rop: *mut RawMpfr, op: *const RawMpfr, rnd: c_int) -> c_int;
    fn mpfr_log(rop: *mut RawMpfr, op: *const RawMpfr, rnd: c_int) -> c_int;
    fn mpfr_log1p(rop: *mut RawMpfr, op: *const RawMpfr, rnd: c_int) -> c_int;
    fn mpfr_sin(rop: *mut RawMpfr, op: *const RawMpfr, rnd: c_int) -> c_int;
    fn mpfr_cos(rop: *mut RawMpfr, op: *const RawMpfr, rnd: c_int) -> c_int;
    fn mpfr_atan2(rop: *mut RawMpfr, y: *const RawMpfr, x: *const RawMpfr, rnd: c_int) -> c_int;
    fn mpfr_hypot(rop: *mut RawMpfr, x: *const RawMpfr, y: *const RawMpfr, rnd: c_int) -> c_int;
    fn mpfr_abs(rop: *mut RawMpfr, op: *const RawMpfr, rnd: c_int) -> c_int;
    fn mpfr_neg(rop: *mut RawMpfr, op: *const RawMpfr, rnd: c_int) -> c_int;
    fn mpfr_const_pi(rop: *mut RawMpfr, rnd: c_int) -> c_int;
    fn mpfr_mul_2si(rop: *mut RawMpfr, op: *const RawMpfr, e: c_long, rnd: c_int) -> c_int;
    fn mpfr_cmp(a: *const RawMpfr, b: *const RawMpfr) -> c_int;
    fn mpfr_sgn(op: *const RawMpfr) -> c_int;
    fn mpfr_zero_p(op: *const RawMpfr) -> c_int;
    fn mpfr_nan_p(op: *const RawMpfr) -> c_int;
    fn mpfr_number_p(op: *const RawMpfr) -> c_int;
}

/// A multiple-precision real number.
pub struct BigReal {
    raw: RawMpfr,
}

// The limb pointer is owned exclusively by this value and only mutated through
// `&mut self`, so sharing across threads is sound.
unsafe impl Send for BigReal {}
unsafe impl Sync for BigReal {}

impl BigReal {
    fn alloc(prec: u32) -> Self {
        let prec = prec.max(MIN_PREC);
        let mut raw = MaybeUninit::<RawMpfr>::uninit();
        unsafe {
            mpfr_init2(raw.as_mut_ptr(), prec as c_long);
            BigReal { raw: raw.assume_init() }
        }
    }

    fn ptr(&self) -> *const RawMpfr {
        &self.raw
    }

    fn mptr(&mut self) -> *mut RawMpfr {
        &mut self.raw
    }

    /// Zero with the given precision.
    pub fn zero_with_prec(prec: u32) -> Self {
        Self::from_i64(0, prec)
    }

    /// The value `x` rounded to `prec` bits.
    pub fn from_f64(x: f64, prec: u32) -> Self {
        let mut r = Self::alloc(prec);
        unsafe { mpfr_set_d(r.mptr(), x, RNDN) };
        r
    }

    pub fn from_i64(x: i64, prec: u32) -> Self {
        let mut r = Self::alloc(prec);
        unsafe { mpfr_set_si(r.mptr(), x as c_long, RNDN) };
        r
    }

    /// `m * 2^e`, rounded to `prec` bits.
    pub fn from_i64_2exp(m: i64, e: i64, prec: u32) -> Self {
        let mut r = Self::alloc(prec);
        unsafe { mpfr_set_si_2exp(r.mptr(), m as c_long, e as c_long, RNDN) };
        r
    }

    /// Exact conversion of an unsigned 128-bit integer.
    pub fn from_u128(x: u128) -> Self {
        let bits = (128 - x.leading_zeros()).max(MIN_PREC);
        // 63-bit chunks so each piece fits an i64
        let mask = (1u128 << 63) - 1;
        let chunks = [(x >> 126) as i64, ((x >> 63) & mask) as i64, (x & mask) as i64];
        let mut acc = Self::zero_with_prec(bits);
        for c in chunks {
            let shifted = acc.mul_pow2(63);
            let mut sum = Self::alloc(bits);
            let piece = Self::from_i64(c, 64);
            unsafe { mpfr_add(sum.mptr(), shifted.ptr(), piece.ptr(), RNDN) };
            acc = sum;
        }
        acc
    }

    /// Parse a decimal, or `0x`-prefixed hexadecimal, literal.
    pub fn parse(s: &str, prec: u32) -> Option<Self> {
        let t = s.trim();
        if t.is_empty() {
            return None;
        }
        let c = CString::new(t).ok()?;
        let mut r = Self::alloc(prec);
        let rc = unsafe { mpfr_set_str(r.mptr(), c.as_ptr(), 0, RNDN) };
        if rc != 0 {
            return None;
        }
        Some(r)
    }

    pub fn prec(&self) -> u32 {
        self.raw.prec as u32
    }

    /// Round to `prec` bits.
    pub fn round_to(&self, prec: u32) -> Self {
        let mut r = Self::alloc(prec);
        unsafe { mpfr_set(r.mptr(), self.ptr(), RNDN) };
        r
    }

    pub fn to_f64(&self) -> f64 {
        unsafe { mpfr_get_d(self.ptr(), RNDN) }
    }

    pub fn is_zero(&self) -> bool {
        unsafe { mpfr_zero_p(self.ptr()) != 0 }
    }

    pub fn is_nan(&self) -> bool {
        unsafe { mpfr_nan_p(self.ptr()) != 0 }
    }

    pub fn is_finite(&self) -> bool {
        unsafe { mpfr_number_p(self.ptr()) != 0 }
    }

    pub fn signum_i(&self) -> i32 {
        unsafe { mpfr_sgn(self.ptr()) as i32 }
    }

    /// Binary exponent `e` with `self = m * 2^e`, `0.5 <= |m| < 1`. Zero gives `i64::MIN`.
    pub fn exponent(&self) -> i64 {
        if !self.is_finite() || self.is_zero() {
            return i64::MIN;
        }
        unsafe { mpfr_get_exp(self.ptr()) as i64 }
    }

    fn unary(&self, f: unsafe extern "C" fn(*mut RawMpfr, *const RawMpfr, c_int) -> c_int) -> Self {
        let mut r = Self::alloc(self.prec());
        unsafe { f(r.mptr(), self.ptr(), RNDN) };
        r
    }

    fn binary(
        &self,
        o: &Self,
        f: unsafe extern "C" fn(*mut RawMpfr, *const RawMpfr, *const RawMpfr, c_int) -> c_int,
    ) -> Self {
        let mut r = Self::alloc(self.prec().max(o.prec()));
        unsafe { f(r.mptr(), self.ptr(), o.ptr(), RNDN) };
        r
    }

    // In place when the left operand already has enough bits.
    fn binary_assign(
        &mut self,
        o: &Self,
        f: unsafe extern "C" fn(*mut RawMpfr, *const RawMpfr, *const RawMpfr, c_int) -> c_int,
    ) {
        if self.prec() >= o.prec() {
            let p = self.mptr();
            unsafe { f(p, p, o.ptr(), RNDN) };
        } else {
            *self = self.binary(o, f);
        }
    }

    pub fn abs(&self) -> Self {
        self.unary(mpfr_abs)
    }
    pub fn sqrt(&self) -> Self {
        self.unary(mpfr_sqrt)
    }
    pub fn exp(&self) -> Self {
        self.unary(mpfr_exp)
    }
    pub fn ln(&self) -> Self {
        self.unary(mpfr_log)
    }
    pub fn ln_1p(&self) -> Self {
        self.unary(mpfr_log1p)
    }
    pub fn sin(&self) -> Self {
        self.unary(mpfr_sin)
    }
    pub fn cos(&self) -> Self {
        self.unary(mpfr_cos)
    }
    pub fn atan2(&self, x: &Self) -> Self {
        self.binary(x, mpfr_atan2)
    }
    pub fn hypot(&self, y: &Self) -> Self {
        self.binary(y, mpfr_hypot)
    }

    pub fn pi(prec: u32) -> Self {
        let mut r = Self::alloc(prec);
        unsafe { mpfr_const_pi(r.mptr(), RNDN) };
        r
    }

    /// `self * 2^k`, exact.
    pub fn mul_pow2(&self, k: i64) -> Self {
        let mut r = Self::alloc(self.prec());
        unsafe { mpfr_mul_2si(r.mptr(), self.ptr(), k as c_long, RNDN) };
        r
    }

    /// Decimal digits needed so that parsing the string back at the same
    /// precision reproduces the value exactly.
    pub fn roundtrip_digits(prec: u32) -> usize {
        1 + ((prec as f64) * std::f64::consts::LOG10_2).ceil() as usize
    }

    /// Scientific decimal representation with `digits` significant digits.
    pub fn to_string_digits(&self, digits: usize) -> String {
        if self.is_nan() {
            return "NaN".into();
        }
        if !self.is_finite() {
            return if self.signum_i() < 0 { "-Inf".into() } else { "Inf".into() };
        }
        if self.is_zero() {
            return "0.0".into();
        }
        let mut e: c_long = 0;
        let s = unsafe {
            let p = mpfr_get_str(std::ptr::null_mut(), &mut e, 10, digits.max(2), self.ptr(), RNDN);
            let out = CStr::from_ptr(p).to_string_lossy().into_owned();
            mpfr_free_str(p);
            out
        };
        let (sign, mant) = match s.strip_prefix('-') {
            Some(m) => ("-", m),
            None => ("", s.as_str()),
        };
        let mant = mant.trim_end_matches('0');
        let mant = if mant.is_empty() { "0" } else { mant };
        let (lead, rest) = mant.split_at(1);
        let rest = if rest.is_empty() { "0" } else { rest };
        format!("{sign}{lead}.{rest}e{}", e - 1)
    }

    /// Representation that parses back to the identical value.
    pub fn to_roundtrip_string(&self) -> String {
        self.to_string_digits(Self::roundtrip_digits(self.prec()))
    }

    /// Truncate toward zero modulo `o` (C `fmod` semantics).
    pub fn fmod(&self, o: &Self) -> Self {
        self.binary(o, mpfr_fmod)
    }

    /// Value rounded toward zero to `prec` bits.
    pub fn round_toward_zero(&self, prec: u32) -> Self {
        let mut r = Self::alloc(prec);
        unsafe { mpfr_set(r.mptr(), self.ptr(), RNDZ) };
        r
    }
}

impl Drop for BigReal {
    fn drop(&mut self) {
        unsafe { mpfr_clear(self.mptr()) }
    }
}

impl Clone for BigReal {
    fn clone(&self) -> Self {
        self.round_to(self.prec())
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_roundtrip_string())
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{}", self.to_string_digits(p + 1)),
            None => write!(f, "{}", self.to_roundtrip_string()),
        }
    }
}

impl PartialEq for BigReal {
    fn eq(&self, o: &Self) -> bool {
        !self.is_nan() && !o.is_nan() && unsafe { mpfr_cmp(self.ptr(), o.ptr()) == 0 }
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        if self.is_nan() || o.is_nan() {
            return None;
        }
        let c = unsafe { mpfr_cmp(self.ptr(), o.ptr()) };
        Some(c.cmp(&0))
    }
}

macro_rules! bin_ops {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $f:ident) => {
        impl $tr for BigReal {
            type Output = BigReal;
            fn $m(mut self, o: BigReal) -> BigReal {
                self.binary_assign(&o, $f);
                self
            }
        }
        impl<'a> $tr<&'a BigReal> for BigReal {
            type Output = BigReal;
            fn $m(mut self, o: &'a BigReal) -> BigReal {
                self.binary_assign(o, $f);
                self
            }
        }
        impl<'a, 'b> $tr<&'b BigReal> for &'a BigReal {
            type Output = BigReal;
            fn $m(self, o: &'b BigReal) -> BigReal {
                self.binary(o, $f)
            }
        }
        impl $atr for BigReal {
            fn $am(&mut self, o: BigReal) {
                self.binary_assign(&o, $f);
            }
        }
        impl<'a> $atr<&'a BigReal> for BigReal {
            fn $am(&mut self, o: &'a BigReal) {
                self.binary_assign(o, $f);
            }
        }
    };
}

bin_ops!(Add, add, AddAssign, add_assign, mpfr_add);
bin_ops!(Sub, sub, SubAssign, sub_assign, mpfr_sub);
bin_ops!(Mul, mul, MulAssign, mul_assign, mpfr_mul);
bin_ops!(Div, div, DivAssign, div_assign, mpfr_div);

impl Rem for BigReal {
    type Output = BigReal;
    fn rem(self, o: BigReal) -> BigReal {
        self.fmod(&o)
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(mut self) -> BigReal {
        let p = self.mptr();
        unsafe { mpfr_neg(p, p, RNDN) };
        self
    }
}

impl<'a> Neg for &'a BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        self.unary(mpfr_neg)
    }
}

impl num_traits::Zero for BigReal {
    fn zero() -> Self {
        BigReal::from_i64(0, MIN_PREC)
    }
    fn is_zero(&self) -> bool {
        BigReal::is_zero(self)
    }
}

impl num_traits::One for BigReal {
    fn one() -> Self {
        BigReal::from_i64(1, MIN_PREC)
    }
}

impl num_traits::Num for BigReal {
    type FromStrRadixErr = ();
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, ()> {
        if radix != 10 {
            return Err(());
        }
        BigReal::parse(s, 53).ok_or(())
    }
}

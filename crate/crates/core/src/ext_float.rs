//! `ExtF64`: an `f64` significand paired with a 64-bit binary exponent.
//!
//! The significand carries the usual 53 bits of precision; the exponent range
//! is roughly `2^(±2^40)`. Transcendental functions whose arguments stay in a
//! moderate range (trigonometry, hyperbolics) are evaluated through `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::num::FpCategory;
use std::ops::{
    Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign,
};

use num_traits::{Float, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};

use crate::scalar::Scalar;

const EXP_LIMIT: i64 = 1 << 40;
const LN2_HI: f64 = 6.931_471_803_691_238_164_90e-01;
const LN2_LO: f64 = 1.908_214_929_270_587_700_02e-10;

/// Extended-exponent real number `mant * 2^exp`.
///
/// Finite non-zero values keep `0.5 <= |mant| < 1`; zero and non-finite values
/// store `exp = 0`.
#[derive(Clone, Copy)]
pub struct ExtF64 {
    mant: f64,
    exp: i64,
}

fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i64;
    if raw == 0 {
        let (m, e) = frexp(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (m, raw - 1022)
}

fn ldexp(mut m: f64, e: i64) -> f64 {
    let mut e = e.clamp(-2200, 2200);
    while e > 1000 {
        m *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        m *= 2f64.powi(-1000);
        e += 1000;
    }
    m * 2f64.powi(e as i32)
}

impl ExtF64 {
    /// Builds `m * 2^e`, normalizing the significand.
    pub fn from_parts(m: f64, e: i64) -> Self {
        if m == 0.0 || !m.is_finite() {
            return ExtF64 { mant: m, exp: 0 };
        }
        let (fm, fe) = frexp(m);
        let e = e.saturating_add(fe);
        if e > EXP_LIMIT {
            ExtF64 { mant: f64::INFINITY.copysign(m), exp: 0 }
        } else if e < -EXP_LIMIT {
            ExtF64 { mant: 0.0f64.copysign(m), exp: 0 }
        } else {
            ExtF64 { mant: fm, exp: e }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        Self::from_parts(x, 0)
    }

    /// Nearest `f64`; underflows to zero and overflows to infinity.
    pub fn to_float(self) -> f64 {
        if self.exp == 0 {
            self.mant
        } else {
            ldexp(self.mant, self.exp)
        }
    }

    /// Significand in `[0.5, 1)` (or zero / non-finite).
    pub fn mantissa(self) -> f64 {
        self.mant
    }

    /// Binary exponent.
    pub fn exponent(self) -> i64 {
        self.exp
    }

    /// `log2(|self|)` as an `f64`, exact in the exponent part.
    pub fn log2_abs(self) -> f64 {
        self.mant.abs().log2() + self.exp as f64
    }

    fn is_zero_val(self) -> bool {
        self.mant == 0.0
    }

    /// `2^y` for an `f64` exponent of any magnitude.
    fn exp2_f64(y: f64) -> Self {
        if y.is_nan() {
            return Self::from_f64(f64::NAN);
        }
        if y > EXP_LIMIT as f64 {
            return Self::from_f64(f64::INFINITY);
        }
        if y < -(EXP_LIMIT as f64) {
            return Self::from_f64(0.0);
        }
        let k = y.floor();
        Self::from_parts((y - k).exp2(), k as i64)
    }

    /// `|self|^y` for positive finite `self`.
    fn pow_positive(self, y: f64) -> Self {
        // split the product so the integer exponent contributes without
        // being rounded together with the significand's logarithm
        let e = self.exp as f64;
        let ye = y * e;
        let k = ye.floor();
        let frac = ye - k;
        let t = frac + y * self.mant.abs().log2();
        let k2 = t.floor();
        let total = k + k2;
        if total > EXP_LIMIT as f64 {
            return Self::from_f64(f64::INFINITY);
        }
        if total < -(EXP_LIMIT as f64) {
            return Self::from_f64(0.0);
        }
        Self::from_parts((t - k2).exp2(), total as i64)
    }

    fn via_f64(self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_f64(f(self.to_float()))
    }
}

impl Default for ExtF64 {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<f64> for ExtF64 {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl fmt::Debug for ExtF64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtF64({} * 2^{})", self.mant, self.exp)
    }
}

fn decimal_parts(x: ExtF64) -> (f64, i64) {
    let l = x.log2_abs() * std::f64::consts::LOG10_2;
    let d = l.floor();
    let mut m = 10f64.powf(l - d);
    let mut d = d as i64;
    if m >= 10.0 {
        m /= 10.0;
        d += 1;
    }
    (m.copysign(x.mant), d)
}

impl fmt::Display for ExtF64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_float();
        if self.is_zero_val() || !self.mant.is_finite() || (v != 0.0 && v.is_finite() && v.abs() > 1e-300) {
            return fmt::Display::fmt(&v, f);
        }
        let (m, d) = decimal_parts(*self);
        match f.precision() {
            Some(p) => write!(f, "{:.*}e{}", p, m, d),
            None => write!(f, "{}e{}", m, d),
        }
    }
}

impl fmt::LowerExp for ExtF64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_float();
        if self.is_zero_val() || !self.mant.is_finite() || (v != 0.0 && v.is_finite() && v.abs() > 1e-300) {
            return fmt::LowerExp::fmt(&v, f);
        }
        let (m, d) = decimal_parts(*self);
        match f.precision() {
            Some(p) => write!(f, "{:.*}e{}", p, m, d),
            None => write!(f, "{}e{}", m, d),
        }
    }
}

impl PartialEq for ExtF64 {
    fn eq(&self, other: &Self) -> bool {
        if self.mant.is_nan() || other.mant.is_nan() {
            return false;
        }
        if self.is_zero_val() && other.is_zero_val() {
            return true;
        }
        self.mant == other.mant && self.exp == other.exp
    }
}

impl PartialOrd for ExtF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.mant.is_nan() || other.mant.is_nan() {
            return None;
        }
        let sign = |x: &ExtF64| -> i8 {
            if x.mant > 0.0 {
                1
            } else if x.mant < 0.0 {
                -1
            } else {
                0
            }
        };
        let (sa, sb) = (sign(self), sign(other));
        if sa != sb {
            return Some(sa.cmp(&sb));
        }
        if sa == 0 {
            return Some(Ordering::Equal);
        }
        // same sign, both non-zero
        let key = |x: &ExtF64| -> (bool, i64, f64) {
            if x.mant.is_infinite() {
                (true, 0, 0.0)
            } else {
                (false, x.exp, x.mant.abs())
            }
        };
        let (ka, kb) = (key(self), key(other));
        let mag = ka
            .0
            .cmp(&kb.0)
            .then(ka.1.cmp(&kb.1))
            .then(ka.2.partial_cmp(&kb.2).unwrap_or(Ordering::Equal));
        Some(if sa > 0 { mag } else { mag.reverse() })
    }
}

impl Neg for ExtF64 {
    type Output = Self;
    fn neg(self) -> Self {
        ExtF64 { mant: -self.mant, exp: self.exp }
    }
}

impl Add for ExtF64 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if !self.mant.is_finite() || !rhs.mant.is_finite() {
            return Self::from_f64(self.to_float() + rhs.to_float());
        }
        if self.is_zero_val() {
            return if rhs.is_zero_val() { Self::from_f64(self.mant + rhs.mant) } else { rhs };
        }
        if rhs.is_zero_val() {
            return self;
        }
        let (big, small) = if self.exp >= rhs.exp { (self, rhs) } else { (rhs, self) };
        let d = big.exp - small.exp;
        if d > 64 {
            return big;
        }
        Self::from_parts(big.mant + ldexp(small.mant, -d), big.exp)
    }
}

impl Sub for ExtF64 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for ExtF64 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_parts(self.mant * rhs.mant, self.exp + rhs.exp)
    }
}

impl Div for ExtF64 {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self::from_parts(self.mant / rhs.mant, self.exp - rhs.exp)
    }
}

impl Rem for ExtF64 {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        if rhs.is_zero_val() || !self.mant.is_finite() {
            return Self::nan();
        }
        if !rhs.mant.is_finite() {
            return self;
        }
        let q = (self / rhs).trunc();
        self - q * rhs
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for ExtF64 {
            fn $m(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    };
}
assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);
assign_op!(RemAssign, rem_assign, %);

impl Sum for ExtF64 {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a ExtF64> for ExtF64 {
    fn sum<I: Iterator<Item = &'a Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + *b)
    }
}

impl Product for ExtF64 {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |a, b| a * b)
    }
}

impl Zero for ExtF64 {
    fn zero() -> Self {
        ExtF64 { mant: 0.0, exp: 0 }
    }
    fn is_zero(&self) -> bool {
        self.is_zero_val()
    }
}

impl One for ExtF64 {
    fn one() -> Self {
        ExtF64 { mant: 0.5, exp: 1 }
    }
}

impl Num for ExtF64 {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        // only decimal input is meaningful here
        let _ = radix;
        s.parse::<f64>().map(Self::from_f64)
    }
}

impl ToPrimitive for ExtF64 {
    fn to_i64(&self) -> Option<i64> {
        self.to_float().to_i64()
    }
    fn to_u64(&self) -> Option<u64> {
        self.to_float().to_u64()
    }
    fn to_f64(&self) -> Option<f64> {
        Some(ExtF64::to_float(*self))
    }
}

impl FromPrimitive for ExtF64 {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Self::from_f64(n as f64))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(Self::from_f64(n as f64))
    }
    fn from_f64(n: f64) -> Option<Self> {
        Some(ExtF64::from_f64(n))
    }
}

impl NumCast for ExtF64 {
    fn from<N: ToPrimitive>(n: N) -> Option<Self> {
        n.to_f64().map(ExtF64::from_f64)
    }
}

impl Float for ExtF64 {
    fn nan() -> Self {
        Self::from_f64(f64::NAN)
    }
    fn infinity() -> Self {
        Self::from_f64(f64::INFINITY)
    }
    fn neg_infinity() -> Self {
        Self::from_f64(f64::NEG_INFINITY)
    }
    fn neg_zero() -> Self {
        ExtF64 { mant: -0.0, exp: 0 }
    }
    fn min_value() -> Self {
        -Self::max_value()
    }
    fn min_positive_value() -> Self {
        ExtF64 { mant: 0.5, exp: -EXP_LIMIT }
    }
    fn max_value() -> Self {
        ExtF64 { mant: 1.0 - f64::EPSILON / 2.0, exp: EXP_LIMIT }
    }
    fn epsilon() -> Self {
        Self::from_f64(f64::EPSILON)
    }
    fn is_nan(self) -> bool {
        self.mant.is_nan()
    }
    fn is_infinite(self) -> bool {
        self.mant.is_infinite()
    }
    fn is_finite(self) -> bool {
        self.mant.is_finite()
    }
    fn is_normal(self) -> bool {
        self.mant.is_finite() && self.mant != 0.0
    }
    fn classify(self) -> FpCategory {
        if self.mant.is_nan() {
            FpCategory::Nan
        } else if self.mant.is_infinite() {
            FpCategory::Infinite
        } else if self.mant == 0.0 {
            FpCategory::Zero
        } else {
            FpCategory::Normal
        }
    }
    fn floor(self) -> Self {
        if !self.is_normal() || self.exp >= 53 {
            return self;
        }
        if self.exp < -1000 {
            return if self.mant < 0.0 { -Self::one() } else { Self::zero() };
        }
        self.via_f64(f64::floor)
    }
    fn ceil(self) -> Self {
        if !self.is_normal() || self.exp >= 53 {
            return self;
        }
        if self.exp < -1000 {
            return if self.mant > 0.0 { Self::one() } else { Self::neg_zero() };
        }
        self.via_f64(f64::ceil)
    }
    fn round(self) -> Self {
        if !self.is_normal() || self.exp >= 53 {
            return self;
        }
        if self.exp < -1000 {
            return Self::zero();
        }
        self.via_f64(f64::round)
    }
    fn trunc(self) -> Self {
        if !self.is_normal() || self.exp >= 53 {
            return self;
        }
        if self.exp < -1000 {
            return Self::zero();
        }
        self.via_f64(f64::trunc)
    }
    fn fract(self) -> Self {
        self - self.trunc()
    }
    fn abs(self) -> Self {
        ExtF64 { mant: self.mant.abs(), exp: self.exp }
    }
    fn signum(self) -> Self {
        Self::from_f64(self.mant.signum())
    }
    fn is_sign_positive(self) -> bool {
        self.mant.is_sign_positive()
    }
    fn is_sign_negative(self) -> bool {
        self.mant.is_sign_negative()
    }
    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }
    fn recip(self) -> Self {
        Self::one() / self
    }
    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { self.recip() } else { self };
        let mut k = n.unsigned_abs();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base *= base;
            k >>= 1;
        }
        acc
    }
    fn powf(self, y: Self) -> Self {
        let yf = y.to_float();
        if self.mant.is_nan() || yf.is_nan() {
            return Self::nan();
        }
        if yf == 0.0 {
            return Self::one();
        }
        if self.is_zero_val() {
            return if yf > 0.0 { Self::zero() } else { Self::infinity() };
        }
        if self.mant.is_infinite() {
            return self.via_f64(|v| v.powf(yf));
        }
        if self.mant < 0.0 {
            if yf.fract() != 0.0 {
                return Self::nan();
            }
            let r = self.abs().pow_positive(yf);
            let odd = (yf % 2.0).abs() == 1.0;
            return if odd { -r } else { r };
        }
        self.pow_positive(yf)
    }
    fn sqrt(self) -> Self {
        if self.mant < 0.0 {
            return Self::nan();
        }
        if !self.is_normal() {
            return self.via_f64(f64::sqrt);
        }
        if self.exp % 2 == 0 {
            Self::from_parts(self.mant.sqrt(), self.exp / 2)
        } else {
            Self::from_parts((2.0 * self.mant).sqrt(), (self.exp - 1) / 2)
        }
    }
    fn exp(self) -> Self {
        let x = self.to_float();
        if x.is_nan() {
            return Self::nan();
        }
        if x.abs() < 700.0 {
            return Self::from_f64(x.exp());
        }
        let kf = (x / std::f64::consts::LN_2).round();
        if kf > EXP_LIMIT as f64 {
            return Self::infinity();
        }
        if kf < -(EXP_LIMIT as f64) {
            return Self::zero();
        }
        let r = (x - kf * LN2_HI) - kf * LN2_LO;
        Self::from_parts(r.exp(), kf as i64)
    }
    fn exp2(self) -> Self {
        Self::exp2_f64(self.to_float())
    }
    fn ln(self) -> Self {
        if self.mant < 0.0 || self.mant.is_nan() {
            return Self::nan();
        }
        if self.is_zero_val() {
            return Self::neg_infinity();
        }
        if self.mant.is_infinite() {
            return self;
        }
        Self::from_f64(self.mant.ln() + self.exp as f64 * std::f64::consts::LN_2)
    }
    fn log(self, base: Self) -> Self {
        self.ln() / base.ln()
    }
    fn log2(self) -> Self {
        if self.mant <= 0.0 || !self.mant.is_finite() {
            return self.ln() / Self::from_f64(std::f64::consts::LN_2);
        }
        Self::from_f64(self.log2_abs())
    }
    fn log10(self) -> Self {
        self.log2() * Self::from_f64(std::f64::consts::LOG10_2)
    }
    fn max(self, other: Self) -> Self {
        if self.is_nan() {
            return other;
        }
        if other.is_nan() {
            return self;
        }
        if self >= other {
            self
        } else {
            other
        }
    }
    fn min(self, other: Self) -> Self {
        if self.is_nan() {
            return other;
        }
        if other.is_nan() {
            return self;
        }
        if self <= other {
            self
        } else {
            other
        }
    }
    fn abs_sub(self, other: Self) -> Self {
        (self - other).max(Self::zero())
    }
    fn cbrt(self) -> Self {
        let r = self.abs().powf(Self::from_f64(1.0 / 3.0));
        if self.mant < 0.0 {
            -r
        } else {
            r
        }
    }
    fn hypot(self, other: Self) -> Self {
        (self * self + other * other).sqrt()
    }
    fn sin(self) -> Self {
        self.via_f64(f64::sin)
    }
    fn cos(self) -> Self {
        self.via_f64(f64::cos)
    }
    fn tan(self) -> Self {
        self.via_f64(f64::tan)
    }
    fn asin(self) -> Self {
        self.via_f64(f64::asin)
    }
    fn acos(self) -> Self {
        self.via_f64(f64::acos)
    }
    fn atan(self) -> Self {
        self.via_f64(f64::atan)
    }
    fn atan2(self, other: Self) -> Self {
        Self::from_f64(self.to_float().atan2(other.to_float()))
    }
    fn sin_cos(self) -> (Self, Self) {
        (self.sin(), self.cos())
    }
    fn exp_m1(self) -> Self {
        let x = self.to_float();
        if x.abs() < 1.0 {
            if x == 0.0 {
                // below f64 range: exp(x) - 1 = x to full precision
                return self;
            }
            Self::from_f64(x.exp_m1())
        } else {
            self.exp() - Self::one()
        }
    }
    fn ln_1p(self) -> Self {
        if self.exp > 60 {
            return (self + Self::one()).ln();
        }
        let x = self.to_float();
        if x == 0.0 {
            return self;
        }
        Self::from_f64(x.ln_1p())
    }
    fn sinh(self) -> Self {
        self.via_f64(f64::sinh)
    }
    fn cosh(self) -> Self {
        self.via_f64(f64::cosh)
    }
    fn tanh(self) -> Self {
        self.via_f64(f64::tanh)
    }
    fn asinh(self) -> Self {
        self.via_f64(f64::asinh)
    }
    fn acosh(self) -> Self {
        self.via_f64(f64::acosh)
    }
    fn atanh(self) -> Self {
        self.via_f64(f64::atanh)
    }
    fn integer_decode(self) -> (u64, i16, i8) {
        // lossy: exponent clamped to the i16 range
        let sign: i8 = if self.mant.is_sign_negative() { -1 } else { 1 };
        if !self.is_normal() {
            return self.mant.integer_decode();
        }
        let m = (self.mant.abs() * 2f64.powi(53)) as u64;
        let e = (self.exp - 53).clamp(i16::MIN as i64, i16::MAX as i64) as i16;
        (m, e, sign)
    }
    fn to_degrees(self) -> Self {
        self * Self::from_f64(180.0 / std::f64::consts::PI)
    }
    fn to_radians(self) -> Self {
        self * Self::from_f64(std::f64::consts::PI / 180.0)
    }
}

impl Scalar for ExtF64 {
    #[inline]
    fn of(x: f64) -> Self {
        ExtF64::from_f64(x)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_float()
    }
}

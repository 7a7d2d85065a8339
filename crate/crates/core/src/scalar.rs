//! Scalar backends and exact-argument complex exponentials.
//!
//! Every phase in the invariant formulas has the shape `exp(πi·k/m)` with
//! integers `k, m`. The argument is reduced modulo 2 and folded into
//! `[0, π/4]` in integer arithmetic, so the only rounding happens in the final
//! `sin`/`cos` call of the chosen backend.

use std::fmt::{self, Debug, Display};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, Num, NumAssign, One, ToPrimitive, Zero};
use twofloat::TwoFloat;

use crate::Rational;

/// Real scalar usable by every evaluator in the crate.
///
/// Only ring operations, `sqrt` and sine/cosine on `[0, π/4]` are needed:
/// all transcendental arguments are reduced exactly before they reach the
/// backend.
pub trait Real:
    Copy
    + Num
    + NumAssign
    + Neg<Output = Self>
    + PartialOrd
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Short backend name recorded in result metadata.
    const NAME: &'static str;

    fn pi() -> Self;

    fn sqrt(self) -> Self;

    /// `(sin x, cos x)` for `0 ≤ x ≤ π/4`.
    fn sin_cos_reduced(self) -> (Self, Self);

    /// Unit roundoff of the backend.
    fn epsilon() -> Self;

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self } else { self };
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

    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite literal")
    }

    fn from_int(x: i128) -> Self {
        // two f64 halves keep backends with wider mantissas exact up to ~2^106
        let hi = (x >> 53) as f64 * 9007199254740992.0;
        let lo = (x & ((1i128 << 53) - 1)) as f64;
        Self::lit(hi) + Self::lit(lo)
    }

    fn from_rational(q: Rational) -> Self {
        Self::from_int(*q.numer() as i128) / Self::from_int(*q.denom() as i128)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! native_real {
    ($t:ty, $name:expr) => {
        impl Real for $t {
            const NAME: &'static str = $name;

            fn pi() -> Self {
                <$t as num_traits::FloatConst>::PI()
            }

            fn sqrt(self) -> Self {
                Float::sqrt(self)
            }

            fn sin_cos_reduced(self) -> (Self, Self) {
                Float::sin_cos(self)
            }

            fn epsilon() -> Self {
                <$t>::EPSILON
            }

            fn abs(self) -> Self {
                Float::abs(self)
            }
        }
    };
}

native_real!(f32, "single");
native_real!(f64, "double");

/// Double-double real (about 32 significant digits) on top of [`TwoFloat`].
///
/// Addition, multiplication and `sqrt` come straight from `twofloat`.
/// Division is refined by one Newton step and sine/cosine use a Taylor
/// series, because the upstream versions are only accurate to about `1e-17`.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct DoubleDouble(pub TwoFloat);

impl DoubleDouble {
    /// Rebuild from the two components returned by [`hi`](Self::hi) and [`lo`](Self::lo).
    pub fn from_parts(hi: f64, lo: f64) -> Self {
        Self(TwoFloat::new_add(hi, lo))
    }

    pub fn hi(self) -> f64 {
        self.0.hi()
    }

    pub fn lo(self) -> f64 {
        self.0.lo()
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self(TwoFloat::from(x))
    }
}

impl DoubleDouble {
    /// Decimal digits of `|self|` as `(digits, exponent)` with `digits[0] ≠ 0`.
    fn decimal_digits(self, n: usize) -> (Vec<u8>, i32) {
        let ten = Self::from(10.0);
        let mut x = <Self as Real>::abs(self);
        let mut e = x.hi().log10().floor() as i32;
        x = if e >= 0 {
            x / Real::powi(ten, e)
        } else {
            x * Real::powi(ten, -e)
        };
        if x.hi() >= 10.0 {
            x /= ten;
            e += 1;
        } else if x.hi() < 1.0 {
            x *= ten;
            e -= 1;
        }
        // one guard digit; digits may leave [0, 9] by rounding and are fixed by carries
        let mut d: Vec<i64> = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            let mut k = x.hi().floor();
            if k == x.hi() && x.lo() < 0.0 {
                k -= 1.0;
            }
            d.push(k as i64);
            x = (x - Self::from(k)) * ten;
        }
        let guard = d.pop().unwrap_or(0);
        if guard >= 5 {
            *d.last_mut().unwrap() += 1;
        }
        for i in (1..d.len()).rev() {
            let carry = d[i].div_euclid(10);
            d[i] -= 10 * carry;
            d[i - 1] += carry;
        }
        if d[0] >= 10 {
            d.insert(0, d[0] / 10);
            d[1] %= 10;
            d.pop();
            e += 1;
        }
        (d.into_iter().map(|v| v as u8).collect(), e)
    }
}

/// Scientific notation with 32 significant digits, or `precision + 1` when a
/// precision is given.
impl Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.hi();
        if !v.is_finite() {
            return Display::fmt(&v, f);
        }
        if v == 0.0 {
            return f.write_str(if v.is_sign_negative() { "-0" } else { "0" });
        }
        let n = f.precision().map_or(32, |p| p + 1);
        let (digits, e) = self.decimal_digits(n);
        let mut s = String::with_capacity(n + 8);
        if v < 0.0 {
            s.push('-');
        }
        s.push((b'0' + digits[0]) as char);
        let mut rest: String = digits[1..].iter().map(|&d| (b'0' + d) as char).collect();
        if f.precision().is_none() {
            rest.truncate(rest.trim_end_matches('0').len());
        }
        if !rest.is_empty() {
            s.push('.');
            s.push_str(&rest);
        }
        s.push_str(&format!("e{e}"));
        match f.width() {
            Some(w) => write!(f, "{s:>w$}"),
            None => f.write_str(&s),
        }
    }
}

macro_rules! forward_op {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl $tr for DoubleDouble {
            type Output = Self;
            fn $m(self, o: Self) -> Self {
                Self($tr::$m(self.0, o.0))
            }
        }
        impl $atr for DoubleDouble {
            fn $am(&mut self, o: Self) {
                *self = $tr::$m(*self, o);
            }
        }
    };
}

forward_op!(Add, add, AddAssign, add_assign);
forward_op!(Sub, sub, SubAssign, sub_assign);
forward_op!(Mul, mul, MulAssign, mul_assign);
forward_op!(Rem, rem, RemAssign, rem_assign);

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.0 / o.0;
        let resid = self.0 - q * o.0;
        Self(q + resid / o.0.hi())
    }
}

impl DivAssign for DoubleDouble {
    fn div_assign(&mut self, o: Self) {
        *self = *self / o;
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self(TwoFloat::from(0.0))
    }
    fn is_zero(&self) -> bool {
        self.0.hi() == 0.0 && self.0.lo() == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self(TwoFloat::from(1.0))
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = <f64 as Num>::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        <f64 as Num>::from_str_radix(s, radix).map(Self::from)
    }
}

impl FromPrimitive for DoubleDouble {
    fn from_i64(n: i64) -> Option<Self> {
        Some(<Self as Real>::from_int(n as i128))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(<Self as Real>::from_int(n as i128))
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(Self::from(x))
    }
}

impl ToPrimitive for DoubleDouble {
    fn to_i64(&self) -> Option<i64> {
        (self.0.hi() as i64).checked_add(self.0.lo() as i64)
    }
    fn to_u64(&self) -> Option<u64> {
        self.to_i64().and_then(|x| u64::try_from(x).ok())
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.0.hi() + self.0.lo())
    }
}

impl Real for DoubleDouble {
    const NAME: &'static str = "high";

    fn pi() -> Self {
        Self(twofloat::consts::PI)
    }

    fn sqrt(self) -> Self {
        Self(self.0.sqrt())
    }

    fn sin_cos_reduced(self) -> (Self, Self) {
        let x2 = self * self;
        let mut sin = self;
        let mut cos = Self::one();
        let mut ts = self;
        let mut tc = Self::one();
        // |x| ≤ π/4: the 2k-th term is below 1e-36 once k reaches 15
        for k in 1..=16i64 {
            ts = -ts * x2 / Self::from_int(((2 * k) * (2 * k + 1)) as i128);
            tc = -tc * x2 / Self::from_int(((2 * k - 1) * (2 * k)) as i128);
            sin += ts;
            cos += tc;
        }
        (sin, cos)
    }

    fn epsilon() -> Self {
        Self::from(1e-32)
    }

    fn lit(x: f64) -> Self {
        Self::from(x)
    }
}

/// `exp(πi·num/den)` with the argument reduced exactly.
pub fn cis_pi<T: Real>(num: i128, den: i128) -> Complex<T> {
    assert!(den != 0, "phase denominator must be nonzero");
    let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
    // x = m/den in [0, 2)
    let m = num.rem_euclid(2 * den);
    // quadrant q and remainder f = f_num / (2 den) in [0, 1/2)
    let q = (2 * m) / den;
    let f_num = 2 * m - q * den;
    let two_den = 2 * den;
    let (c, s) = if 2 * f_num <= den {
        let (s, c) = (T::pi() * T::from_int(f_num) / T::from_int(two_den)).sin_cos_reduced();
        (c, s)
    } else {
        (T::pi() * T::from_int(den - f_num) / T::from_int(two_den)).sin_cos_reduced()
    };
    match q {
        0 => Complex::new(c, s),
        1 => Complex::new(-s, c),
        2 => Complex::new(-c, -s),
        _ => Complex::new(s, -c),
    }
}

/// `exp(πi·q)` for an exact rational `q`.
pub fn cis_pi_rat<T: Real>(q: Rational) -> Complex<T> {
    cis_pi(*q.numer() as i128, *q.denom() as i128)
}

/// `i^k`, exact.
pub fn i_pow<T: Real>(k: i64) -> Complex<T> {
    match k.rem_euclid(4) {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

/// `sin(π·num/den)` through the exact reduction of [`cis_pi`].
pub fn sin_pi<T: Real>(num: i128, den: i128) -> T {
    cis_pi::<T>(num, den).im
}

/// Neumaier-compensated real accumulator.
#[derive(Clone, Copy, Debug)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }
}

impl<T: Real> CompensatedSum<T> {
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

/// Compensated accumulator for complex terms (independent real/imaginary lanes).
#[derive(Clone, Copy, Debug)]
pub struct ComplexSum<T> {
    re: CompensatedSum<T>,
    im: CompensatedSum<T>,
}

impl<T: Real> Default for ComplexSum<T> {
    fn default() -> Self {
        Self {
            re: CompensatedSum::default(),
            im: CompensatedSum::default(),
        }
    }
}

impl<T: Real> ComplexSum<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&self) -> Complex<T> {
        Complex::new(self.re.value(), self.im.value())
    }
}

impl<T: Real> AddAssign<Complex<T>> for ComplexSum<T> {
    fn add_assign(&mut self, z: Complex<T>) {
        self.re.add(z.re);
        self.im.add(z.im);
    }
}

impl<T: Real> Add<Complex<T>> for ComplexSum<T> {
    type Output = Self;

    fn add(mut self, z: Complex<T>) -> Self {
        self += z;
        self
    }
}

impl<T: Real> std::iter::Sum<Complex<T>> for ComplexSum<T> {
    fn sum<I: Iterator<Item = Complex<T>>>(iter: I) -> Self {
        iter.fold(Self::default(), |acc, z| acc + z)
    }
}

/// Sum complex terms with compensation.
pub fn csum<T: Real, I: IntoIterator<Item = Complex<T>>>(terms: I) -> Complex<T> {
    terms.into_iter().sum::<ComplexSum<T>>().value()
}

/// Convert a complex value between backends.
pub fn to_c64<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.as_f64(), z.im.as_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex<f64>, b: Complex<f64>) -> bool {
        (a - b).norm() < 1e-13
    }

    #[test]
    fn cis_pi_matches_std_exp() {
        for den in 1..40i128 {
            for num in -90..90i128 {
                let expect = Complex::new(0.0, std::f64::consts::PI * num as f64 / den as f64).exp();
                assert!(close(cis_pi::<f64>(num, den), expect), "{num}/{den}");
            }
        }
    }

    #[test]
    fn cis_pi_is_exact_on_quarter_turns() {
        assert_eq!(cis_pi::<f64>(1, 2), Complex::new(0.0, 1.0));
        assert_eq!(cis_pi::<f64>(-1, 1), Complex::new(-1.0, 0.0));
        assert_eq!(cis_pi::<f64>(6, 4), Complex::new(0.0, -1.0));
        assert_eq!(cis_pi::<f64>(1000000002, 1), Complex::new(1.0, 0.0));
    }

    #[test]
    fn negative_denominator_is_normalized() {
        assert!(close(cis_pi::<f64>(1, -3), cis_pi::<f64>(-1, 3)));
    }

    #[test]
    fn high_precision_phases() {
        // sin(π/6) = 1/2 and cos(π/3)=1/2 to double-double precision
        let z = cis_pi::<DoubleDouble>(1, 6);
        assert!((z.im - DoubleDouble::from(0.5)).abs() < DoubleDouble::from(1e-30));
        let w = cis_pi::<DoubleDouble>(1, 3);
        assert!((w.re - DoubleDouble::from(0.5)).abs() < DoubleDouble::from(1e-30));
        // |z| = 1 at an awkward angle
        let u = cis_pi::<DoubleDouble>(7, 19);
        let n = u.re * u.re + u.im * u.im - DoubleDouble::from(1.0);
        assert!(n.abs() < DoubleDouble::from(1e-30));
    }

    #[test]
    fn double_double_division_is_full_precision() {
        let one = DoubleDouble::one();
        let three = DoubleDouble::from(3.0);
        assert!(((one / three) * three - one).abs() < DoubleDouble::from(1e-31));
        let z = DoubleDouble::from(7.0) / DoubleDouble::from(19.0);
        assert!((z * DoubleDouble::from(19.0) - DoubleDouble::from(7.0)).abs() < DoubleDouble::from(1e-30));
        let r = DoubleDouble::from_rational(Rational::new(1, 10));
        assert!((r * DoubleDouble::from(10.0) - one).abs() < DoubleDouble::from(1e-31));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::<f64>::default();
        s.add(1e16);
        for _ in 0..10 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 10.0);
    }

    #[test]
    fn from_int_handles_wide_values() {
        let x = (1i128 << 80) + 12345;
        let y = DoubleDouble::from_int(x);
        let back = y.hi() as i128 + y.lo() as i128;
        assert_eq!(back, x);
        assert_eq!(f64::from_int(-7), -7.0);
    }

    #[test]
    fn double_double_prints_all_digits() {
        let third = DoubleDouble::from(1.0) / DoubleDouble::from(3.0);
        assert_eq!(third.to_string(), "3.3333333333333333333333333333333e-1");
        assert_eq!(format!("{:.4}", -third), "-3.3333e-1");
        assert_eq!(DoubleDouble::from(2.5e10).to_string(), "2.5e10");
        assert_eq!(format!("{:.2}", DoubleDouble::from(9.999)), "1.00e1");
        assert_eq!(DoubleDouble::from(0.0).to_string(), "0");
        let root2 = Real::sqrt(DoubleDouble::from(2.0));
        assert!(
            root2.to_string().starts_with("1.41421356237309504880168872420"),
            "{root2}"
        );
        let tiny = DoubleDouble::from_parts(1e-300, 1e-317);
        assert!(tiny.to_string().ends_with("e-300"));
    }
}

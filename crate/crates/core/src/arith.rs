//! Integer number theory: Dedekind sums, the Rademacher Φ function,
//! negative continued fractions and words in the generators of SL(2,Z).

use std::fmt;
use std::ops::{Mul, Neg};

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} and {1} are not coprime")]
    NotCoprime(i64, i64),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("matrix [[{0},{1}],[{2},{3}]] does not have determinant 1")]
    NotUnimodular(i64, i64, i64, i64),
}

/// Sign with `sign(0) = 0`.
pub fn sign(x: i64) -> i64 {
    x.signum()
}

/// Sign of a rational with `sign(0) = 0`.
pub fn sign_q(x: Rational) -> i64 {
    x.numer().signum()
}

/// An integer matrix `[[a, b], [c, d]]` with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SL2Z {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl SL2Z {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, ArithError> {
        if a as i128 * d as i128 - b as i128 * c as i128 != 1 {
            return Err(ArithError::NotUnimodular(a, b, c, d));
        }
        Ok(Self { a, b, c, d })
    }

    pub const fn identity() -> Self {
        Self { a: 1, b: 0, c: 0, d: 1 }
    }

    /// `Ξ = [[0,-1],[1,0]]`.
    pub const fn xi() -> Self {
        Self {
            a: 0,
            b: -1,
            c: 1,
            d: 0,
        }
    }

    /// `Θⁿ = [[1,n],[0,1]]`.
    pub const fn theta(n: i64) -> Self {
        Self { a: 1, b: n, c: 0, d: 1 }
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(), |acc, _| acc * *self)
    }
}

impl Mul for SL2Z {
    type Output = SL2Z;
    fn mul(self, o: SL2Z) -> SL2Z {
        SL2Z {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

impl Neg for SL2Z {
    type Output = SL2Z;
    fn neg(self) -> SL2Z {
        SL2Z {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }
}

impl fmt::Display for SL2Z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

/// Terms `(m₁, …, m_t)` of `B^C = Θ^{m_t}Ξ ⋯ Θ^{m₁}Ξ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ContinuedFraction {
    pub terms: Vec<i64>,
}

/// The sequences `a_k, b_k, c_k, d_k`, `k = 0..=t`, with `B_k^C = [[a_k,b_k],[c_k,d_k]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BSequences {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub c: Vec<i64>,
    pub d: Vec<i64>,
}

impl ContinuedFraction {
    pub fn new(terms: Vec<i64>) -> Self {
        Self { terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sum(&self) -> i64 {
        self.terms.iter().sum()
    }

    pub fn sequences(&self) -> BSequences {
        let mut s = BSequences {
            a: vec![1],
            b: vec![0],
            c: vec![0],
            d: vec![1],
        };
        for &m in &self.terms {
            let (a0, b0, c0, d0) = (
                *s.a.last().unwrap(),
                *s.b.last().unwrap(),
                *s.c.last().unwrap(),
                *s.d.last().unwrap(),
            );
            s.a.push(m * a0 - c0);
            s.c.push(a0);
            s.b.push(m * b0 - d0);
            s.d.push(b0);
        }
        s
    }

    /// `B^C` from the recurrences.
    pub fn b_matrix(&self) -> SL2Z {
        let s = self.sequences();
        let t = self.len();
        SL2Z {
            a: s.a[t],
            b: s.b[t],
            c: s.c[t],
            d: s.d[t],
        }
    }

    /// `B^C` as the literal product of generator matrices.
    pub fn word_product(&self) -> SL2Z {
        self.terms
            .iter()
            .fold(SL2Z::identity(), |acc, &m| SL2Z::theta(m) * SL2Z::xi() * acc)
    }

    /// `m_t − 1/(m_{t−1} − ⋯ − 1/m₁)`, or `None` if an inner level is zero.
    pub fn evaluate(&self) -> Option<Rational> {
        let mut iter = self.terms.iter();
        let mut x = Rational::from_integer(*iter.next()?);
        for &m in iter {
            if *x.numer() == 0 {
                return None;
            }
            x = Rational::from_integer(m) - x.recip();
        }
        Some(x)
    }

    /// True when every `a_k`, `k = 1..=t`, is nonzero.
    pub fn pivots_nonzero(&self) -> bool {
        self.sequences().a[1..].iter().all(|&x| x != 0)
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, m) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, ")")
    }
}

/// `s(s, q) = (1/4|q|) Σ_{j=1}^{|q|-1} cot(πj/q) cot(πsj/q)`, exactly.
///
/// Evaluated by the reciprocity law along the Euclidean algorithm.
pub fn dedekind_sum(s: i64, q: i64) -> Result<Rational, ArithError> {
    if q == 0 {
        return Err(ArithError::ZeroDenominator);
    }
    if s.gcd(&q) != 1 {
        return Err(ArithError::NotCoprime(s, q));
    }
    let mut k = q.abs();
    let mut h = s.rem_euclid(k);
    let mut sign = 1i64;
    let mut acc = Rational::from_integer(0);
    // s(h,k) + s(k,h) = (h/k + k/h + 1/(hk))/12 − 1/4
    while k > 1 {
        let (hh, kk) = (h as i128, k as i128);
        let num = hh * hh + kk * kk + 1 - 3 * hh * kk;
        let den = 12 * hh * kk;
        let g = num.gcd(&den);
        acc += Rational::new((num / g) as i64, (den / g) as i64) * sign;
        sign = -sign;
        let next = k.rem_euclid(h);
        k = h;
        h = next;
    }
    Ok(acc)
}

/// Rademacher's `Φ` of `[[p, r], [q, s]]`.
pub fn rademacher_phi(u: &SL2Z) -> Rational {
    let (p, r, q, s) = (u.a, u.b, u.c, u.d);
    if q == 0 {
        Rational::new(r, s)
    } else {
        let ded = dedekind_sum(s, q.abs()).expect("entries of an SL(2,Z) matrix are coprime");
        Rational::new(p + s, q) - ded * (12 * sign(q))
    }
}

/// Expansion strategy for negative continued fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CfStrategy {
    /// Ceiling steps (Hirzebruch–Jung); the canonical choice.
    #[default]
    Ceiling,
    /// Nearest-integer steps; a second valid expansion.
    Nearest,
}

/// Negative continued fraction of `alpha/beta` with the canonical strategy.
pub fn cf_expand(alpha: i64, beta: i64) -> Result<ContinuedFraction, ArithError> {
    cf_expand_with(alpha, beta, CfStrategy::Ceiling)
}

pub fn cf_expand_with(alpha: i64, beta: i64, strategy: CfStrategy) -> Result<ContinuedFraction, ArithError> {
    if beta == 0 {
        return Err(ArithError::ZeroDenominator);
    }
    if alpha.gcd(&beta) != 1 {
        return Err(ArithError::NotCoprime(alpha, beta));
    }
    let mut x = Rational::new(alpha, beta);
    let mut out = Vec::new();
    loop {
        let m = match strategy {
            CfStrategy::Ceiling => x.ceil(),
            CfStrategy::Nearest => x.round(),
        };
        out.push(m.to_integer());
        if m == x {
            break;
        }
        x = (m - x).recip();
    }
    out.reverse();
    let cf = ContinuedFraction::new(out);
    debug_assert_eq!(cf.evaluate(), Some(Rational::new(alpha, beta)));
    Ok(cf)
}

/// A continued fraction `C'` with `B^{C'} = v` exactly.
pub fn cf_for_matrix(v: &SL2Z) -> ContinuedFraction {
    let (base, k) = if v.c == 0 {
        // v = ±Θ^k, and B^{(0,k)} = −Θ^k
        (Vec::new(), v.a * v.b)
    } else {
        let c0 = cf_expand(v.a, v.c).expect("entries of an SL(2,Z) matrix are coprime");
        let bm = c0.b_matrix();
        let s = if bm.c == v.c { 1 } else { -1 };
        let rem = s * v.d - bm.d;
        debug_assert_eq!(rem % bm.c, 0);
        (c0.terms, rem / bm.c)
    };
    let mut terms = if k != 0 || base.is_empty() {
        vec![0, k]
    } else {
        Vec::new()
    };
    terms.extend(base);
    let mut cf = ContinuedFraction::new(terms);
    if cf.b_matrix() != *v {
        cf.terms.extend([0, 0]);
    }
    debug_assert_eq!(cf.b_matrix(), *v);
    cf
}

/// `U = ε · B^C · Θⁿ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub eps: i64,
    pub cf: ContinuedFraction,
    pub n: i64,
}

impl Decomposition {
    pub fn reconstruct(&self) -> SL2Z {
        let m = self.cf.b_matrix() * SL2Z::theta(self.n);
        if self.eps == 1 {
            m
        } else {
            -m
        }
    }
}

/// Write `U = ε B^C Θⁿ`; when `a ≠ 0` every pivot `a_k` is nonzero.
///
/// For `c = 0` the word is empty and `U = ±Θⁿ`; for `a = 0` it is `C = (0)`.
pub fn decompose_sl2z(u: &SL2Z) -> Decomposition {
    decompose_sl2z_with(u, CfStrategy::Ceiling)
}

/// As [`decompose_sl2z`], expanding `a/c` with the given strategy.
pub fn decompose_sl2z_with(u: &SL2Z, strategy: CfStrategy) -> Decomposition {
    let dec = if u.c == 0 {
        Decomposition {
            eps: u.a,
            cf: ContinuedFraction::new(Vec::new()),
            n: u.a * u.b,
        }
    } else if u.a == 0 {
        Decomposition {
            eps: u.c,
            cf: ContinuedFraction::new(vec![0]),
            n: u.c * u.d,
        }
    } else {
        let cf = cf_expand_with(u.a, u.c, strategy).expect("entries of an SL(2,Z) matrix are coprime");
        let v = cf.b_matrix();
        let eps = if v.a == u.a { 1 } else { -1 };
        let rem = eps * u.b - v.b;
        debug_assert_eq!(rem % v.a, 0);
        Decomposition { eps, cf, n: rem / v.a }
    };
    assert_eq!(dec.reconstruct(), *u, "decomposition failed to reconstruct {u}");
    dec
}

/// `β*` with `ββ* ≡ 1 (mod α)` and `0 ≤ β* < α`.
pub fn mod_inverse(beta: i64, alpha: i64) -> Result<i64, ArithError> {
    if alpha <= 0 {
        return Err(ArithError::ZeroDenominator);
    }
    if alpha == 1 {
        return Ok(0);
    }
    let e = beta.rem_euclid(alpha).extended_gcd(&alpha);
    if e.gcd != 1 {
        return Err(ArithError::NotCoprime(beta, alpha));
    }
    Ok(e.x.rem_euclid(alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn dedekind_examples() {
        assert_eq!(dedekind_sum(5, 1).unwrap(), q(0, 1));
        assert_eq!(dedekind_sum(5, -1).unwrap(), q(0, 1));
        assert_eq!(dedekind_sum(1, 2).unwrap(), q(0, 1));
        assert_eq!(dedekind_sum(1, 3).unwrap(), q(1, 18));
        assert_eq!(dedekind_sum(2, 3).unwrap(), q(-1, 18));
        assert_eq!(dedekind_sum(2, 4), Err(ArithError::NotCoprime(2, 4)));
        assert_eq!(dedekind_sum(1, 0), Err(ArithError::ZeroDenominator));
    }

    #[test]
    fn dedekind_closed_form_for_unit_numerator() {
        // s(1,k) = (k-1)(k-2)/(12k)
        for k in 1..60 {
            assert_eq!(dedekind_sum(1, k).unwrap(), q((k - 1) * (k - 2), 12 * k));
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(rademacher_phi(&SL2Z::theta(1)), q(1, 1));
        assert_eq!(rademacher_phi(&SL2Z::xi()), q(0, 1));
        assert_eq!(rademacher_phi(&SL2Z::new(1, 0, 1, 1).unwrap()), q(2, 1));
    }

    #[test]
    fn cf_expand_examples() {
        assert_eq!(cf_expand(5, 2).unwrap().terms, vec![2, 3]);
        assert_eq!(cf_expand(4, 1).unwrap().terms, vec![4]);
        assert_eq!(cf_expand(-3, 1).unwrap().terms, vec![-3]);
        assert_eq!(cf_expand(7, 3).unwrap().terms, vec![2, 2, 3]);
        assert_eq!(cf_expand(1, 0), Err(ArithError::ZeroDenominator));
        assert_eq!(cf_expand(4, 6), Err(ArithError::NotCoprime(4, 6)));
        let near = cf_expand_with(7, 3, CfStrategy::Nearest).unwrap();
        assert_eq!(near.evaluate(), Some(q(7, 3)));
        assert_ne!(near, cf_expand(7, 3).unwrap());
    }

    #[test]
    fn cf_for_matrix_examples() {
        assert_eq!(cf_for_matrix(&SL2Z::xi()).terms, vec![0]);
        assert_eq!(cf_for_matrix(&SL2Z::new(-2, -1, 1, 0).unwrap()).terms, vec![-2]);
        assert_eq!(cf_for_matrix(&SL2Z::new(2, 1, -1, 0).unwrap()).terms, vec![-2, 0, 0]);
        for v in [SL2Z::identity(), SL2Z::theta(3), -SL2Z::theta(-2), -SL2Z::identity()] {
            assert_eq!(cf_for_matrix(&v).b_matrix(), v);
        }
    }

    #[test]
    fn decompose_examples() {
        let u = SL2Z::xi() * SL2Z::theta(5);
        let d = decompose_sl2z(&u);
        assert_eq!((d.eps, d.cf.terms.clone(), d.n), (1, vec![0], 5));
        let d = decompose_sl2z(&SL2Z::theta(3));
        assert!(d.cf.is_empty());
        assert_eq!((d.eps, d.n), (1, 3));
        let u = SL2Z::new(2, 1, 1, 1).unwrap();
        let d = decompose_sl2z(&u);
        assert!(d.cf.pivots_nonzero());
        assert_eq!(d.reconstruct(), u);
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(1, 5).unwrap(), 1);
        assert_eq!(mod_inverse(2, 5).unwrap(), 3);
        assert_eq!(mod_inverse(3, 4).unwrap(), 3);
        assert_eq!(mod_inverse(-1, 5).unwrap(), 4);
        assert_eq!(mod_inverse(7, 1).unwrap(), 0);
        assert_eq!(mod_inverse(2, 4), Err(ArithError::NotCoprime(2, 4)));
    }

    #[test]
    fn b_sequences_match_word_product() {
        let cf = ContinuedFraction::new(vec![2, -1, 0, 3]);
        assert_eq!(cf.b_matrix(), cf.word_product());
        let s = cf.sequences();
        assert_eq!(s.a.len(), 5);
        assert_eq!(s.c[3], s.a[2]);
    }

    #[test]
    fn not_unimodular() {
        assert!(matches!(SL2Z::new(1, 1, 1, 1), Err(ArithError::NotUnimodular(..))));
    }
}

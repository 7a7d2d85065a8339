//! The Reshetikhin–Turaev invariant `τ_r(M)` of a Seifert fibered space.
//!
//! Two independent evaluations are provided: [`tau_matrix_form`] contracts
//! products of `S` and `T` over the index set, and [`tau_closed_form`] sums
//! Weyl orbits and root-lattice cosets per exceptional fiber. Lens spaces
//! have three more routes in [`tau_lens`].

use std::collections::HashMap;

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{
    cf_expand, cf_expand_with, decompose_sl2z, dedekind_sum, mod_inverse, rademacher_phi, sign, sign_q, ArithError,
    CfStrategy, ContinuedFraction, SL2Z,
};
use crate::lie::{LieError, WeightVec};
use crate::modular::{ModularData, ModularError};
use crate::rep::gen_xi;
use crate::scalar::{cis_pi, cis_pi_rat, i_pow, sin_pi, to_c64, ComplexSum, Real};
use crate::seifert::{Orientation, SeifertPresentation};
use crate::Rational;

/// Default cap on the number of phase evaluations in [`tau_closed_form`].
pub const DEFAULT_TERM_BUDGET: u128 = 1_000_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error(transparent)]
    Modular(#[from] ModularError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("a sign ε_λ is required for the self-dual weight {0} (a_ε·g is odd)")]
    MissingSignTable(WeightVec),
    #[error("the asymptotic lens formula needs p ≠ 0")]
    PZeroForAsymp,
    #[error("L({0},{1}): p and q must be coprime")]
    LensNotCoprime(i64, i64),
    #[error("closed form needs {needed} terms, over the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
}

impl From<LieError> for InvariantError {
    fn from(e: LieError) -> Self {
        InvariantError::Modular(ModularError::Lie(e))
    }
}

/// Signs `ε_λ = ±1` on self-dual weights, needed when `a_ε·g` is odd.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfDualSignTable(HashMap<WeightVec, i8>);

impl SelfDualSignTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// The same sign on every self-dual weight of `md`.
    pub fn uniform<T: Real>(md: &ModularData<T>, sign: i8) -> Self {
        assert!(sign == 1 || sign == -1);
        let mut t = Self::new();
        for i in (0..md.len()).filter(|&i| md.dual_index(i) == i) {
            t.insert(md.index_set()[i].clone(), sign);
        }
        t
    }

    pub fn insert(&mut self, lambda: WeightVec, sign: i8) {
        assert!(sign == 1 || sign == -1, "ε_λ must be ±1");
        self.0.insert(lambda, sign);
    }

    pub fn get(&self, lambda: &WeightVec) -> Option<i8> {
        self.0.get(lambda).copied()
    }
}

/// `b_λ·ε_λ^{a_ε g}` for every index, failing on a missing sign.
fn weight_factors<T: Real>(
    md: &ModularData<T>,
    m: &SeifertPresentation,
    signs: Option<&SelfDualSignTable>,
) -> Result<Vec<i64>, InvariantError> {
    let odd = m.a_eps_g() % 2 != 0;
    (0..md.len())
        .map(|j| {
            let self_dual = md.dual_index(j) == j;
            if m.epsilon == Orientation::N && !self_dual {
                return Ok(0);
            }
            if !odd {
                return Ok(1);
            }
            let lam = &md.index_set()[j];
            signs
                .and_then(|t| t.get(lam))
                .map(i64::from)
                .ok_or_else(|| InvariantError::MissingSignTable(lam.clone()))
        })
        .collect()
}

fn twist_pow<T: Real>(md: &ModularData<T>, k: i64) -> Vec<Complex<T>> {
    (0..md.len()).map(|i| cis_pi_rat(md.twist_exponent(i) * k)).collect()
}

/// Matrix form evaluation with the given continued-fraction strategy.
pub fn tau_matrix_form<T: Real>(
    md: &ModularData<T>,
    m: &SeifertPresentation,
    signs: Option<&SelfDualSignTable>,
    strategy: CfStrategy,
) -> Result<Complex<T>, InvariantError> {
    let factors = weight_factors(md, m, signs)?;
    let n = m.n() as i64;
    let aeg = m.a_eps_g();
    let s = md.s_matrix();
    let rho = md.rho_index();

    let mut sigma = Rational::from_integer((m.epsilon.a() - 1) * sign_q(m.euler()));
    let mut mtot = 0i64;
    let mut vecs = Vec::with_capacity(m.fibers.len());
    for &(alpha, beta) in &m.fibers {
        let cf = cf_expand_with(alpha, beta, strategy)?;
        mtot += cf.len() as i64;
        sigma += Rational::from_integer(sign(alpha * beta))
            + (Rational::from_integer(cf.sum()) - rademacher_phi(&cf.b_matrix())) / 3;
        let mut v = s.column(rho);
        for &t in &cf.terms {
            let tw = twist_pow(md, t);
            let tv: Vec<Complex<T>> = v.iter().zip(&tw).map(|(a, b)| *a * *b).collect();
            v = s.mul_vec(&tv);
        }
        vecs.push(v);
    }

    let b_twist = m.b.map(|b| twist_pow(md, -b));
    let mut acc = ComplexSum::new();
    for (j, &f) in factors.iter().enumerate() {
        if f == 0 {
            continue;
        }
        let mut term = Complex::new(
            T::from_int(f as i128) * md.qdim(j).powi((2 - n - aeg) as i32),
            T::zero(),
        );
        if let Some(bt) = &b_twist {
            term *= bt[j];
        }
        for v in &vecs {
            term *= v[j];
        }
        acc += term;
    }
    let d = md.rank();
    let pref = md.omega_pow(-sigma * 3) * d.powi((aeg - 2 - mtot) as i32);
    Ok(pref * acc.value())
}

/// Number of phase evaluations [`tau_closed_form`] performs.
pub fn closed_form_cost<T: Real>(md: &ModularData<T>, m: &SeifertPresentation) -> Result<u128, InvariantError> {
    let rs = md.root_system();
    let w = rs.weyl_order();
    let l = rs.rank() as u32;
    let per: u128 = m
        .fibers
        .iter()
        .map(|&(a, _)| w.saturating_mul((a as u128).saturating_pow(l)))
        .fold(0u128, |x, y| x.saturating_add(y));
    Ok((md.len() as u128).saturating_mul(per.max(1)))
}

/// Lattice-sum evaluation, factorized over the exceptional fibers.
///
/// The outer sum over the index set runs in parallel; terms are collected in
/// index order and summed sequentially, so the result does not depend on the
/// number of worker threads.
pub fn tau_closed_form<T: Real>(
    md: &ModularData<T>,
    m: &SeifertPresentation,
    signs: Option<&SelfDualSignTable>,
    budget: u128,
) -> Result<Complex<T>, InvariantError> {
    let needed = closed_form_cost(md, m)?;
    if needed > budget {
        return Err(InvariantError::BudgetExceeded { needed, budget });
    }
    let factors = weight_factors(md, m, signs)?;
    let rs = md.root_system();
    let weyl = rs.weyl_elements()?;
    let r = md.level();
    let nd = rs.det_cartan();
    let l = rs.rank() as i64;
    let npos = rs.num_pos_roots() as i64;
    let n = m.n() as i64;
    let aeg = m.a_eps_g();
    let ae = m.epsilon.a();
    let e = m.euler();
    let se = sign_q(e);
    let rr = md.rho_norm();

    let mut ded = Rational::zero();
    let mut a_prod = 1i64;
    struct Fiber {
        alpha: i64,
        beta_star: i64,
        cosets: Vec<WeightVec>,
    }
    let mut fibers = Vec::new();
    for &(alpha, beta) in &m.fibers {
        ded += dedekind_sum(beta, alpha)?;
        a_prod *= alpha;
        let beta_star = if alpha > 1 { mod_inverse(beta, alpha)? } else { 0 };
        fibers.push(Fiber {
            alpha,
            beta_star,
            cosets: rs.coset_reps_root_lattice(alpha)?,
        });
    }
    let wrho: Vec<(WeightVec, i64)> = weyl.iter().map(|w| (w.apply(rs.rho()), w.det_sign())).collect();

    let pref = cis_pi_rat::<T>(rr / r * (Rational::from_integer(3 * (ae - 1) * se) - e - ded * 12))
        * i_pow::<T>(n * npos)
        * T::from_int(r as i128).sqrt().powi((l * (aeg - 2)) as i32)
        / (T::from_int(2).powi((npos * (n + aeg - 2)) as i32)
            * rs.vol_root_lattice::<T>().powi((2 - aeg) as i32)
            * T::from_int(a_prod as i128).sqrt().powi(l as i32))
        * cis_pi_rat::<T>(rr * (3 * (1 - ae) * se) / rs.dual_coxeter());

    let index = md.index_set();
    let terms: Vec<Complex<T>> = (0..md.len())
        .into_par_iter()
        .map(|k| {
            if factors[k] == 0 {
                return Complex::zero();
            }
            let lam = &index[k];
            let mut sp = T::one();
            for a in rs.positive_roots() {
                sp *= sin_pi::<T>(rs.pair_with_root(lam, a) as i128, r as i128);
            }
            let mut term = Complex::new(
                T::from_int(factors[k] as i128) * sp.powi((2 - n - aeg) as i32),
                T::zero(),
            ) * cis_pi_rat::<T>(e * rs.norm_sq(lam) / r);
            for f in &fibers {
                let den = r as i128 * f.alpha as i128 * nd as i128;
                let mut acc = ComplexSum::new();
                for (wr, det) in &wrho {
                    let mut inner = ComplexSum::new();
                    for nu in &f.cosets {
                        let a = rs.inner_scaled(nu, nu) as i128;
                        let b = rs.inner_scaled(wr, nu) as i128;
                        let c = rs.inner_scaled(lam, &(&nu.scale(r) + wr)) as i128;
                        let num = -(f.beta_star as i128) * r as i128 * (r as i128 * a + 2 * b) - 2 * c;
                        inner += cis_pi::<T>(num, den);
                    }
                    acc += inner.value() * T::from_int(*det as i128);
                }
                term *= acc.value();
            }
            term
        })
        .collect();
    let z: ComplexSum<T> = terms.into_iter().sum();
    Ok(pref * z.value())
}

/// Routes for lens spaces `L(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LensMethod {
    /// Iterated `T^a S` along the continued fraction of `−p/q`.
    ContinuedFraction,
    /// `ω^{Φ(U)} R(U)_{ρρ}` with `U = [[q, b], [p, d]]`.
    Representation,
    /// Weyl-orbit and coset sum with `|p|^l` terms per Weyl element.
    LatticeSum,
}

fn check_lens(p: i64, q: i64) -> Result<(), InvariantError> {
    if num_integer::gcd(p, q) != 1 {
        return Err(InvariantError::LensNotCoprime(p, q));
    }
    Ok(())
}

/// The matrix `[[q, b], [p, d]] ∈ SL(2,Z)` used for `L(p, q)`.
pub fn lens_matrix(p: i64, q: i64) -> Result<SL2Z, InvariantError> {
    check_lens(p, q)?;
    if p == 0 {
        return Ok(SL2Z::new(q, 0, 0, q)?);
    }
    let m = p.abs();
    let d = mod_inverse(q.rem_euclid(m), m)?;
    let b = (q as i128 * d as i128 - 1) / p as i128;
    Ok(SL2Z::new(q, b as i64, p, d)?)
}

pub fn tau_lens<T: Real>(
    md: &ModularData<T>,
    p: i64,
    q: i64,
    method: LensMethod,
) -> Result<Complex<T>, InvariantError> {
    check_lens(p, q)?;
    match method {
        LensMethod::ContinuedFraction => lens_by_cf(md, p, q),
        LensMethod::Representation => lens_by_rep(md, p, q),
        LensMethod::LatticeSum => lens_by_lattice_sum(md, p, q),
    }
}

fn lens_by_cf<T: Real>(md: &ModularData<T>, p: i64, q: i64) -> Result<Complex<T>, InvariantError> {
    let (cp, m) = if q == 0 {
        (ContinuedFraction::new(vec![0, 0]), 3)
    } else {
        let c = cf_expand(-p, q)?;
        let k = c.len() as i32 + 1;
        (c, k)
    };
    let mut terms = cp.terms.clone();
    terms.push(0);
    let c = ContinuedFraction::new(terms);
    let sigma = (Rational::from_integer(cp.sum()) - rademacher_phi(&c.b_matrix())) / 3;
    let s = md.s_matrix();
    let mut v = vec![Complex::zero(); md.len()];
    v[md.rho_index()] = Complex::one();
    for &a in &c.terms {
        v = s.mul_vec(&v);
        for (z, t) in v.iter_mut().zip(twist_pow(md, a)) {
            *z *= t;
        }
    }
    Ok(md.omega_pow(-sigma * 3) * md.rank().powi(-m) * v[md.rho_index()])
}

fn lens_by_rep<T: Real>(md: &ModularData<T>, p: i64, q: i64) -> Result<Complex<T>, InvariantError> {
    let u = lens_matrix(p, q)?;
    let dec = decompose_sl2z(&u);
    let xi = gen_xi(md);
    let theta = |k: i64| -> Vec<Complex<T>> { (0..md.len()).map(|i| cis_pi_rat(md.theta_exponent(i) * k)).collect() };
    let mul_diag = |v: &mut Vec<Complex<T>>, d: Vec<Complex<T>>| {
        for (z, t) in v.iter_mut().zip(d) {
            *z *= t;
        }
    };
    let mut v = vec![Complex::zero(); md.len()];
    v[md.rho_index()] = Complex::one();
    mul_diag(&mut v, theta(dec.n));
    for &t in &dec.cf.terms {
        v = xi.mul_vec(&v);
        mul_diag(&mut v, theta(t));
    }
    if dec.eps == -1 {
        v = xi.mul_vec(&xi.mul_vec(&v));
    }
    Ok(md.omega_pow(rademacher_phi(&u)) * v[md.rho_index()])
}

fn lens_by_lattice_sum<T: Real>(md: &ModularData<T>, p: i64, q: i64) -> Result<Complex<T>, InvariantError> {
    if p == 0 {
        return Err(InvariantError::PZeroForAsymp);
    }
    let rs = md.root_system();
    let weyl = rs.weyl_elements()?;
    let r = md.level();
    let nd = rs.det_cartan();
    let l = rs.rank() as i32;
    let npos = rs.num_pos_roots() as i64;
    let sp = sign(p);
    let rho = rs.rho();
    let pref = i_pow::<T>(sp * npos) / T::from_int((r * p.abs()) as i128).sqrt().powi(l) / rs.vol_root_lattice::<T>()
        * cis_pi_rat::<T>(dedekind_sum(q, p.abs())? * md.rho_norm() * (12 * sp) / r);
    let cosets = rs.coset_reps_root_lattice(p)?;
    let mut acc = ComplexSum::new();
    for w in weyl {
        let wr = w.apply(rho);
        let shift = &rho.scale(q) - &wr;
        let inner: ComplexSum<T> = cosets
            .iter()
            .map(|nu| {
                let num =
                    q as i128 * r as i128 * rs.inner_scaled(nu, nu) as i128 + 2 * rs.inner_scaled(nu, &shift) as i128;
                cis_pi::<T>(num, p as i128 * nd as i128)
            })
            .sum();
        let outer = cis_pi::<T>(
            -2 * rs.inner_scaled(rho, &wr) as i128,
            p as i128 * r as i128 * nd as i128,
        );
        acc += outer * inner.value() * T::from_int(w.det_sign() as i128);
    }
    Ok(pref * acc.value())
}

/// Evaluation route recorded in an [`InvariantResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Matrix,
    Closed,
    LensCf,
    LensRep,
    LensLatticeSum,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Matrix => "matrix",
            Method::Closed => "closed",
            Method::LensCf => "lens-cf",
            Method::LensRep => "lens-rep",
            Method::LensLatticeSum => "lens-lattice-sum",
        }
    }
}

/// A computed invariant with the metadata needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantResult {
    pub algebra: String,
    pub level: i64,
    pub manifold: String,
    pub method: Method,
    pub precision: String,
    /// `[re, im]`.
    pub value: [f64; 2],
    /// Real and imaginary parts printed at full backend precision.
    pub digits: [String; 2],
}

impl InvariantResult {
    pub fn new<T: Real>(md: &ModularData<T>, manifold: String, method: Method, value: Complex<T>) -> Self {
        let z = to_c64(value);
        Self {
            algebra: md.root_system().name(),
            level: md.level(),
            manifold,
            method,
            precision: T::NAME.to_string(),
            value: [z.re, z.im],
            digits: [value.re.to_string(), value.im.to_string()],
        }
    }

    pub fn value(&self) -> Complex<f64> {
        Complex::new(self.value[0], self.value[1])
    }
}

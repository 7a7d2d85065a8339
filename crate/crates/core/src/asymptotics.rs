//! Large-`r` expansion of lens space invariants.
//!
//! The lattice-sum formula for `τ_r(L(p,q))` is a finite sum over Weyl
//! elements `w` and cosets `ν ∈ Λ^R/pΛ^R`. Grouping its terms by the
//! Chern–Simons phase `q|ν|²/(2p) mod 1` and expanding the remaining
//! `r`-dependence `exp(πi·x_w/r)` in `1/r` gives
//!
//! ```text
//! τ_r ≈ Σ_j e^{2πi r α_j} r^{d_j} Σ_{m ≤ N} a_{j,m} r^{-m},   d_j = -l/2.
//! ```

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{dedekind_sum, sign, ArithError};
use crate::invariants::{tau_lens, InvariantError, LensMethod};
use crate::lie::{LieError, RootSystem};
use crate::modular::ModularData;
use crate::scalar::{cis_pi, cis_pi_rat, i_pow, to_c64, ComplexSum, Real};
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AsymptoticsError {
    #[error("the lens expansion needs p ≠ 0")]
    PZero,
    #[error("L({0},{1}): p and q must be coprime")]
    NotCoprime(i64, i64),
    #[error("degenerate data for slope fit: {0}")]
    DegenerateData(String),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

fn frac(x: Rational) -> Rational {
    x - x.floor()
}

fn check(p: i64, q: i64) -> Result<(), AsymptoticsError> {
    if p == 0 {
        return Err(AsymptoticsError::PZero);
    }
    if p.gcd(&q) != 1 {
        return Err(AsymptoticsError::NotCoprime(p, q));
    }
    Ok(())
}

/// `{ q|ν|²/(2p) mod 1 : ν ∈ Λ^R/pΛ^R }`.
pub fn cs_phase_set(rs: &RootSystem, p: i64, q: i64) -> Result<BTreeSet<Rational>, AsymptoticsError> {
    check(p, q)?;
    let nd = rs.det_cartan();
    Ok(rs
        .coset_reps_root_lattice(p)?
        .iter()
        .map(|nu| frac(Rational::new(q * rs.inner_scaled(nu, nu), 2 * p * nd)))
        .collect())
}

/// One Chern–Simons phase with its exact term data and Taylor coefficients.
#[derive(Debug, Clone)]
pub struct ExpansionTerm<T> {
    /// `α_j ∈ [0, 1)`.
    pub alpha: Rational,
    /// Growth exponent `d_j`.
    pub d: Rational,
    /// `a_{j,0}, …, a_{j,N}`; `a_{j,0}` is the leading coefficient `b_j`.
    pub coefficients: Vec<Complex<T>>,
    /// `x ↦ Σ weight` with the group equal to `Σ weight·exp(πi·x/r)`.
    exact: BTreeMap<Rational, Complex<T>>,
}

impl<T: Real> ExpansionTerm<T> {
    pub fn b(&self) -> Complex<T> {
        self.coefficients[0]
    }

    /// `c_m = a_{j,m}/b_j`, or `None` when `b_j` vanishes.
    pub fn c(&self, m: usize) -> Option<Complex<T>> {
        let b = self.b();
        let tiny = T::epsilon() * T::lit(1e3) * self.scale();
        if b.norm_sqr().sqrt() <= tiny {
            None
        } else {
            Some(self.coefficients[m] / b)
        }
    }

    fn scale(&self) -> T {
        let mut s = T::zero();
        for z in self.exact.values() {
            s += z.norm_sqr().sqrt();
        }
        s.max_one()
    }

    /// `r^{-d} e^{-2πirα}` times this group's exact contribution at `r`.
    fn exact_sum(&self, r: i64) -> Complex<T> {
        self.exact
            .iter()
            .map(|(x, w)| *w * cis_pi_rat::<T>(*x / r))
            .sum::<ComplexSum<T>>()
            .value()
    }
}

trait MaxOne {
    fn max_one(self) -> Self;
}

impl<T: Real> MaxOne for T {
    fn max_one(self) -> Self {
        if self < T::one() {
            T::one()
        } else {
            self
        }
    }
}

#[derive(Debug, Clone)]
pub struct AsymptoticExpansion<T> {
    pub p: i64,
    pub q: i64,
    pub rank: usize,
    pub order: usize,
    /// Sorted by `α`.
    pub terms: Vec<ExpansionTerm<T>>,
}

/// Expansion of `τ_r(L(p,q))` to order `N` in `1/r`.
pub fn lens_expansion<T: Real>(
    rs: &RootSystem,
    p: i64,
    q: i64,
    order: usize,
) -> Result<AsymptoticExpansion<T>, AsymptoticsError> {
    check(p, q)?;
    let weyl = rs.weyl_elements()?;
    let nd = rs.det_cartan();
    let l = rs.rank();
    let npos = rs.num_pos_roots() as i64;
    let sp = sign(p);
    let rho = rs.rho();
    let rho_norm = rs.norm_sq(rho);
    let ded = dedekind_sum(q, p.abs())?;
    let constant =
        i_pow::<T>(sp * npos) / (T::from_int(p.abs() as i128).sqrt().powi(l as i32) * rs.vol_root_lattice::<T>());

    let mut groups: BTreeMap<Rational, BTreeMap<Rational, Complex<T>>> = BTreeMap::new();
    let cosets = rs.coset_reps_root_lattice(p)?;
    for nu in &cosets {
        let alpha = frac(Rational::new(q * rs.inner_scaled(nu, nu), 2 * p * nd));
        let g = groups.entry(alpha).or_default();
        for w in weyl {
            let wr = w.apply(rho);
            let shift = &rho.scale(q) - &wr;
            let f = cis_pi::<T>(2 * rs.inner_scaled(nu, &shift) as i128, p as i128 * nd as i128)
                * T::from_int(w.det_sign() as i128);
            let x = rho_norm * (12 * sp) * ded - Rational::new(2 * rs.inner_scaled(rho, &wr), p * nd);
            *g.entry(x).or_insert_with(Complex::zero) += f * constant;
        }
    }

    let pi = T::pi();
    let terms = groups
        .into_iter()
        .map(|(alpha, exact)| {
            let mut coefficients = vec![Complex::zero(); order + 1];
            for (x, w) in &exact {
                // (πi x)^m / m!
                let z = Complex::new(T::zero(), pi * T::from_rational(*x));
                let mut t = Complex::<T>::one();
                for (m, c) in coefficients.iter_mut().enumerate() {
                    if m > 0 {
                        t = t * z / T::from_int(m as i128);
                    }
                    *c += *w * t;
                }
            }
            ExpansionTerm {
                alpha,
                d: Rational::new(-(l as i64), 2),
                coefficients,
                exact,
            }
        })
        .collect();
    Ok(AsymptoticExpansion {
        p,
        q,
        rank: l,
        order,
        terms,
    })
}

impl<T: Real> AsymptoticExpansion<T> {
    pub fn phases(&self) -> BTreeSet<Rational> {
        self.terms.iter().map(|t| t.alpha).collect()
    }

    fn r_power(&self, r: i64) -> T {
        T::one() / T::from_int(r as i128).sqrt().powi(self.rank as i32)
    }

    /// The un-truncated regrouped sum; equal to `τ_r` for every `r`.
    pub fn evaluate_exact(&self, r: i64) -> Complex<T> {
        let s: ComplexSum<T> = self
            .terms
            .iter()
            .map(|t| cis_pi_rat::<T>(t.alpha * 2 * r) * t.exact_sum(r))
            .sum();
        s.value() * self.r_power(r)
    }

    /// Partial sum keeping `r^{-m}` for `m ≤ n`.
    pub fn evaluate_truncated(&self, r: i64, n: usize) -> Complex<T> {
        assert!(n <= self.order, "truncation order above the computed order");
        let inv_r = T::one() / T::from_int(r as i128);
        let s: ComplexSum<T> = self
            .terms
            .iter()
            .map(|t| {
                let mut acc = ComplexSum::new();
                let mut pw = T::one();
                for a in &t.coefficients[..=n] {
                    acc += *a * pw;
                    pw *= inv_r;
                }
                cis_pi_rat::<T>(t.alpha * 2 * r) * acc.value()
            })
            .sum();
        s.value() * self.r_power(r)
    }

    /// Common period in `r` of the phases `e^{2πirα_j}`.
    pub fn period(&self) -> i64 {
        self.terms.iter().fold(1, |acc, t| acc.lcm(t.alpha.denom()))
    }

    pub fn summary(&self) -> ExpansionSummary {
        ExpansionSummary {
            p: self.p,
            q: self.q,
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let c = |z: Complex<T>| {
                        let z = to_c64(z);
                        [z.re, z.im]
                    };
                    TermSummary {
                        alpha: t.alpha.to_string(),
                        d: t.d.to_string(),
                        b: c(t.b()),
                        b_abs: to_c64(t.b()).norm(),
                        b_arg: to_c64(t.b()).arg(),
                        c_m: (1..=self.order).map(|m| t.c(m).map(c)).collect(),
                    }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TermSummary {
    pub alpha: String,
    pub d: String,
    pub b: [f64; 2],
    pub b_abs: f64,
    pub b_arg: f64,
    pub c_m: Vec<Option<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpansionSummary {
    pub p: i64,
    pub q: i64,
    pub order: usize,
    pub terms: Vec<TermSummary>,
}

/// Least-squares line through `(log r, log |residual|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub points: usize,
}

pub fn slope_fit(values: &[(f64, f64)]) -> Result<SlopeFit, AsymptoticsError> {
    if values.len() < 5 {
        return Err(AsymptoticsError::DegenerateData(format!(
            "{} points, need at least 5",
            values.len()
        )));
    }
    if let Some(&(r, v)) = values
        .iter()
        .find(|(r, v)| !(*r > 0.0 && v.abs() > 0.0 && v.is_finite()))
    {
        return Err(AsymptoticsError::DegenerateData(format!(
            "unusable point r={r}, residual={v}"
        )));
    }
    let pts: Vec<(f64, f64)> = values.iter().map(|(r, v)| (r.ln(), v.abs().ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(AsymptoticsError::DegenerateData("all r values coincide".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = (sse / (n - 2.0) / sxx).sqrt();
    Ok(SlopeFit {
        slope,
        stderr,
        intercept,
        points: pts.len(),
    })
}

/// One row of a residual sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResidualRow {
    pub r: i64,
    pub exact: [f64; 2],
    pub truncated: [f64; 2],
    pub residual: f64,
    /// Whether the residual sits at the rounding floor of the backend.
    pub at_floor: bool,
}

/// Truncation residuals `|τ_r − partial sum|` and their decay rates.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub order: usize,
    pub rows: Vec<ResidualRow>,
    /// Fit over every residual above the rounding floor.
    pub pooled: Option<SlopeFit>,
    /// Fits per class `r mod period`; `None` where the class has fewer than
    /// five residuals above the floor.
    pub per_class: Vec<(i64, Option<SlopeFit>)>,
    /// Largest per-class slope.
    pub worst_slope: Option<f64>,
}

/// Compare the order-`n` partial sums against `τ_r` from [`tau_lens`] for each `r`.
pub fn residual_sweep<T: Real>(
    rs: &std::sync::Arc<RootSystem>,
    exp: &AsymptoticExpansion<T>,
    n: usize,
    levels: &[i64],
) -> Result<ResidualReport, AsymptoticsError> {
    let rows: Vec<ResidualRow> = levels
        .par_iter()
        .map(|&r| -> Result<ResidualRow, AsymptoticsError> {
            let md = ModularData::<T>::new(rs.clone(), r).map_err(InvariantError::from)?;
            let exact = tau_lens(&md, exp.p, exp.q, LensMethod::LatticeSum)?;
            let trunc = exp.evaluate_truncated(r, n);
            let d = exact - trunc;
            let residual = d.norm_sqr().sqrt();
            let floor = T::epsilon() * T::lit(1e4) * exact.norm_sqr().sqrt().max_one();
            let (e, t) = (to_c64(exact), to_c64(trunc));
            Ok(ResidualRow {
                r,
                exact: [e.re, e.im],
                truncated: [t.re, t.im],
                residual: residual.as_f64(),
                at_floor: residual <= floor,
            })
        })
        .collect::<Result<_, _>>()?;
    let usable = |it: &mut dyn Iterator<Item = &ResidualRow>| -> Vec<(f64, f64)> {
        it.filter(|row| !row.at_floor)
            .map(|row| (row.r as f64, row.residual))
            .collect()
    };
    let pooled = slope_fit(&usable(&mut rows.iter())).ok();
    let period = exp.period();
    let per_class: Vec<(i64, Option<SlopeFit>)> = (0..period)
        .map(|c| {
            let pts = usable(&mut rows.iter().filter(|row| row.r.rem_euclid(period) == c));
            (c, slope_fit(&pts).ok())
        })
        .collect();
    let worst_slope = per_class
        .iter()
        .filter_map(|(_, f)| f.map(|f| f.slope))
        .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.max(s))));
    Ok(ResidualReport {
        order: n,
        rows,
        pooled,
        per_class,
        worst_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::Family;
    use std::sync::Arc;

    fn a(l: usize) -> Arc<RootSystem> {
        Arc::new(RootSystem::new(Family::A, l).unwrap())
    }

    #[test]
    fn phase_sets() {
        let want: BTreeSet<Rational> = [Rational::zero(), Rational::new(1, 2)].into_iter().collect();
        assert_eq!(cs_phase_set(&a(1), 2, 1).unwrap(), want);
        assert_eq!(cs_phase_set(&a(1), 1, 5).unwrap().len(), 1);
        assert_eq!(cs_phase_set(&a(1), 0, 1), Err(AsymptoticsError::PZero));
    }

    #[test]
    fn grouped_sum_is_exact() {
        for (l, p, q) in [(1, 3, 1), (1, 5, 2), (2, 3, 1), (1, -5, 2)] {
            let rs = a(l);
            let e = lens_expansion::<f64>(&rs, p, q, 2).unwrap();
            assert_eq!(e.phases(), cs_phase_set(&rs, p, q).unwrap());
            for r in [5, 17, 40] {
                let md = ModularData::<f64>::new(rs.clone(), r).unwrap();
                let t = tau_lens(&md, p, q, LensMethod::LatticeSum).unwrap();
                assert!((e.evaluate_exact(r) - t).norm() < 1e-11, "l={l} L({p},{q}) r={r}");
            }
        }
    }

    #[test]
    fn sphere_leading_coefficient_vanishes() {
        let e = lens_expansion::<f64>(&a(1), 1, 0, 2).unwrap();
        assert_eq!(e.terms.len(), 1);
        assert!(e.terms[0].b().norm() < 1e-14);
        assert!(e.terms[0].c(1).is_none());
        // D^{-1} = √2·π·r^{-3/2}(1 − π²/6·r^{-2} + …)
        let a1 = e.terms[0].coefficients[1];
        assert!(
            (a1 - Complex::new(2f64.sqrt() * std::f64::consts::PI, 0.0)).norm() < 1e-12,
            "{a1}"
        );
    }

    #[test]
    fn slope_fit_synthetic() {
        let pts: Vec<(f64, f64)> = (10..60).map(|r| (r as f64, 3.0 / (r as f64).powi(2))).collect();
        let f = slope_fit(&pts).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-6 && f.stderr < 1e-6);
        assert!(matches!(slope_fit(&pts[..4]), Err(AsymptoticsError::DegenerateData(_))));
        let mut bad = pts.clone();
        bad[2].1 = 0.0;
        assert!(matches!(slope_fit(&bad), Err(AsymptoticsError::DegenerateData(_))));
    }
}

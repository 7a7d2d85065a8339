//! Quantum-group modular data at level `r`.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::lie::{LieError, RootSystem, WeightVec};
use crate::rep::IndexedMatrix;
use crate::scalar::{cis_pi, cis_pi_rat, csum, i_pow, sin_pi, to_c64, Real};
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModularError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("weight {0} is not in the alcove interior at level {1}")]
    IndexOutOfAlcove(WeightVec, i64),
}

/// Index set, rank, twists, dimensions and generator data at level `r`.
#[derive(Debug)]
pub struct ModularData<T> {
    rs: Arc<RootSystem>,
    r: i64,
    index: Arc<[WeightVec]>,
    position: HashMap<WeightVec, usize>,
    rho_index: usize,
    /// `det(cartan)·|λ|²` per index.
    norms_scaled: Vec<i64>,
    rho_norm: Rational,
    dual: Vec<usize>,
    rank_d: T,
    qdims: Vec<T>,
    /// `i^{|Δ₊|} r^{-l/2} / vol(Λ^R)`.
    xi_prefactor: Complex<T>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModularSummary {
    pub algebra: String,
    pub level: i64,
    pub index_set: Vec<WeightVec>,
    pub rank_d: f64,
    pub omega: [f64; 2],
    pub central_charge: String,
    pub qdims: Vec<f64>,
    pub twists: Vec<[f64; 2]>,
    pub dual: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_matrix: Option<Vec<[f64; 2]>>,
}

impl<T: Real> ModularData<T> {
    pub fn new(rs: Arc<RootSystem>, r: i64) -> Result<Self, ModularError> {
        let index: Arc<[WeightVec]> = rs.alcove_weights(r)?.into();
        let position: HashMap<WeightVec, usize> = index.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let rho_index = position[rs.rho()];
        let norms_scaled = index.iter().map(|w| rs.inner_scaled(w, w)).collect();
        let rho_norm = rs.norm_sq(rs.rho());
        let dual = index.iter().map(|w| position[&rs.dual_weight(w)]).collect();
        let l = rs.rank() as i32;
        let r_half_l = T::from_int(r as i128).sqrt().powi(l);
        let vol = rs.vol_root_lattice::<T>();
        let sine_product = |w: &WeightVec| -> T {
            rs.positive_roots().iter().fold(T::one(), |acc, a| {
                acc * T::lit(2.0) * sin_pi::<T>(rs.pair_with_root(w, a) as i128, r as i128)
            })
        };
        let rank_d = r_half_l * vol / sine_product(rs.rho());
        let qdims = index
            .iter()
            .map(|w| rank_d / (r_half_l * vol) * sine_product(w))
            .collect();
        let xi_prefactor = i_pow::<T>(rs.num_pos_roots() as i64) / (r_half_l * vol);
        Ok(Self {
            rs,
            r,
            index,
            position,
            rho_index,
            norms_scaled,
            rho_norm,
            dual,
            rank_d,
            qdims,
            xi_prefactor,
        })
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn root_system_arc(&self) -> Arc<RootSystem> {
        self.rs.clone()
    }

    pub fn level(&self) -> i64 {
        self.r
    }

    pub fn index_set(&self) -> &[WeightVec] {
        &self.index
    }

    pub fn index_arc(&self) -> Arc<[WeightVec]> {
        self.index.clone()
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn position(&self, w: &WeightVec) -> Result<usize, ModularError> {
        self.position
            .get(w)
            .copied()
            .ok_or_else(|| ModularError::IndexOutOfAlcove(w.clone(), self.r))
    }

    pub fn rho_index(&self) -> usize {
        self.rho_index
    }

    pub fn dual_index(&self, i: usize) -> usize {
        self.dual[i]
    }

    pub fn norm_scaled(&self, i: usize) -> i64 {
        self.norms_scaled[i]
    }

    /// `|ρ|²`.
    pub fn rho_norm(&self) -> Rational {
        self.rho_norm
    }

    pub fn rank(&self) -> T {
        self.rank_d
    }

    pub fn qdim(&self, i: usize) -> T {
        self.qdims[i]
    }

    pub fn qdim_of(&self, w: &WeightVec) -> Result<T, ModularError> {
        Ok(self.qdims[self.position(w)?])
    }

    pub fn qdims(&self) -> &[T] {
        &self.qdims
    }

    /// Central charge `(r − h)·dim g / r`.
    pub fn central_charge(&self) -> Rational {
        let h = self.rs.dual_coxeter();
        Rational::new((self.r - h) * self.rs.dim_g() as i64, self.r)
    }

    /// Exponent `e` with `ω^x = exp(πi·x·e)`, namely `|ρ|²(1/h − 1/r)`.
    pub fn omega_exponent(&self) -> Rational {
        self.rho_norm * (Rational::new(1, self.rs.dual_coxeter()) - Rational::new(1, self.r))
    }

    pub fn omega(&self) -> Complex<T> {
        self.omega_pow(Rational::from_integer(1))
    }

    /// `ω^x` for rational `x`, taken as `exp(πi·x·|ρ|²(1/h − 1/r))`.
    pub fn omega_pow(&self, x: Rational) -> Complex<T> {
        cis_pi_rat(x * self.omega_exponent())
    }

    /// `(|λ|² − |ρ|²)/r` so that `v_λ = exp(πi··)`.
    pub fn twist_exponent(&self, i: usize) -> Rational {
        Rational::new(self.norms_scaled[i], self.rs.det_cartan() * self.r) - self.rho_norm / self.r
    }

    pub fn twist(&self, i: usize) -> Complex<T> {
        cis_pi_rat(self.twist_exponent(i))
    }

    /// `|λ|²/r − |ρ|²/h`, the exponent of `R(Θ)_{λλ}`.
    pub fn theta_exponent(&self, i: usize) -> Rational {
        Rational::new(self.norms_scaled[i], self.rs.det_cartan() * self.r) - self.rho_norm / self.rs.dual_coxeter()
    }

    /// `i^{|Δ₊|} r^{-l/2} / vol(Λ^R)`.
    pub fn xi_prefactor(&self) -> Complex<T> {
        self.xi_prefactor
    }

    /// `R(Ξ)_{λμ}` for arbitrary weights (used on the closed alcove as well).
    pub fn xi_entry_weights(&self, lambda: &WeightVec, mu: &WeightVec) -> Complex<T> {
        let weyl = self.rs.weyl_elements().expect("Weyl group enumerable");
        let den = (self.r * self.rs.det_cartan()) as i128;
        let sum = csum(weyl.iter().map(|w| {
            let ph = cis_pi::<T>(-2 * self.rs.inner_scaled(&w.apply(lambda), mu) as i128, den);
            if w.det_sign() == 1 {
                ph
            } else {
                -ph
            }
        }));
        self.xi_prefactor * sum
    }

    /// `R(Ξ)` on an arbitrary ordered list of weights.
    pub fn xi_on(&self, weights: Arc<[WeightVec]>) -> IndexedMatrix<T> {
        let weyl = self.rs.weyl_elements().expect("Weyl group enumerable");
        let n = weights.len();
        let images: Vec<Vec<(WeightVec, bool)>> = weights
            .iter()
            .map(|x| weyl.iter().map(|w| (w.apply(x), w.det_sign() == 1)).collect())
            .collect();
        let den = (self.r * self.rs.det_cartan()) as i128;
        let data: Vec<Complex<T>> = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / n, k % n);
                let sum = csum(images[i].iter().map(|(wl, even)| {
                    let ph = cis_pi::<T>(-2 * self.rs.inner_scaled(wl, &weights[j]) as i128, den);
                    if *even {
                        ph
                    } else {
                        -ph
                    }
                }));
                self.xi_prefactor * sum
            })
            .collect();
        IndexedMatrix::from_data(weights, data)
    }

    /// `S = D·R(Ξ)`.
    pub fn s_matrix(&self) -> IndexedMatrix<T> {
        self.xi_on(self.index.clone())
            .scale(Complex::new(self.rank_d, T::zero()))
    }

    /// `T = ω·R(Θ)`, diagonal with entries `v_λ`.
    pub fn t_matrix(&self) -> IndexedMatrix<T> {
        IndexedMatrix::diagonal(self.index.clone(), (0..self.len()).map(|i| self.twist(i)).collect())
    }

    /// `Δ = Σ v_i^{-1} dim(i)²`.
    pub fn delta(&self) -> Complex<T> {
        csum((0..self.len()).map(|i| {
            let d = self.qdims[i];
            self.twist(i).conj() * (d * d)
        }))
    }

    pub fn summary(&self, with_matrices: bool) -> ModularSummary {
        let c = |z: Complex<T>| {
            let z = to_c64(z);
            [z.re, z.im]
        };
        let (s_matrix, t_matrix) = if with_matrices {
            let s = self.s_matrix();
            let n = self.len();
            (
                Some((0..n).map(|i| (0..n).map(|j| c(s.get(i, j))).collect()).collect()),
                Some((0..n).map(|i| c(self.twist(i))).collect()),
            )
        } else {
            (None, None)
        };
        ModularSummary {
            algebra: self.rs.name(),
            level: self.r,
            index_set: self.index.to_vec(),
            rank_d: self.rank_d.as_f64(),
            omega: c(self.omega()),
            central_charge: self.central_charge().to_string(),
            qdims: self.qdims.iter().map(|d| d.as_f64()).collect(),
            twists: (0..self.len()).map(|i| c(self.twist(i))).collect(),
            dual: self.dual.clone(),
            s_matrix,
            t_matrix,
        }
    }
}

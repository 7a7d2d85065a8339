//! Simply-laced root data in fundamental-weight coordinates.
//!
//! Every lattice vector is an integer vector of coefficients on the
//! fundamental weights; the simple roots are the columns of the Cartan matrix
//! and the inner product is the inverse Cartan matrix. Inner products are
//! therefore rationals with denominator dividing `det(cartan)`, and the
//! evaluators work with the integer `det(cartan)·⟨x, y⟩`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;
use crate::Rational;

/// Default cap on explicit Weyl group enumeration.
pub const DEFAULT_WEYL_CAP: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("unsupported root system {0}{1}: only simply-laced A_l (l>=1), D_l (l>=4), E6, E7, E8")]
    UnsupportedType(Family, usize),
    #[error("Weyl group of order {order} exceeds the enumeration cap {cap}")]
    WeylGroupTooLarge { order: u128, cap: u128 },
    #[error("level r = {r} is below the dual Coxeter number {h}")]
    LevelTooSmall { r: i64, h: i64 },
    #[error("modulus must be nonzero")]
    ZeroModulus,
    #[error("weight {0} has the wrong rank (expected {1})")]
    RankMismatch(WeightVec, usize),
    #[error("cannot parse algebra name {0:?}")]
    BadAlgebraName(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Integer coordinates on the fundamental weights.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVec(pub Vec<i64>);

impl WeightVec {
    pub fn zero(rank: usize) -> Self {
        Self(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn scale(&self, k: i64) -> Self {
        Self(self.0.iter().map(|x| x * k).collect())
    }
}

impl From<Vec<i64>> for WeightVec {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

impl fmt::Display for WeightVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl Add for &WeightVec {
    type Output = WeightVec;
    fn add(self, o: &WeightVec) -> WeightVec {
        WeightVec(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &WeightVec {
    type Output = WeightVec;
    fn sub(self, o: &WeightVec) -> WeightVec {
        WeightVec(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &WeightVec {
    type Output = WeightVec;
    fn neg(self) -> WeightVec {
        WeightVec(self.0.iter().map(|a| -a).collect())
    }
}

impl Mul<&WeightVec> for i64 {
    type Output = WeightVec;
    fn mul(self, v: &WeightVec) -> WeightVec {
        v.scale(self)
    }
}

/// A Weyl group element acting on weight coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeylElement {
    rank: usize,
    /// Row-major integer matrix.
    matrix: Vec<i64>,
    det_sign: i64,
    length: usize,
}

impl WeylElement {
    fn identity(rank: usize) -> Self {
        let mut matrix = vec![0; rank * rank];
        for i in 0..rank {
            matrix[i * rank + i] = 1;
        }
        Self {
            rank,
            matrix,
            det_sign: 1,
            length: 0,
        }
    }

    pub fn matrix(&self) -> &[i64] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.matrix[i * self.rank + j]
    }

    pub fn det_sign(&self) -> i64 {
        self.det_sign
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn apply(&self, v: &WeightVec) -> WeightVec {
        let n = self.rank;
        WeightVec(
            (0..n)
                .map(|i| (0..n).map(|j| self.matrix[i * n + j] * v.0[j]).sum())
                .collect(),
        )
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let n = self.rank;
        let mut matrix = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                matrix[i * n + j] = (0..n).map(|k| self.matrix[i * n + k] * other.matrix[k * n + j]).sum();
            }
        }
        WeylElement {
            rank: n,
            matrix,
            det_sign: self.det_sign * other.det_sign,
            length: self.length + other.length,
        }
    }
}

/// Complete root datum of a simply-laced simple Lie algebra.
#[derive(Debug)]
pub struct RootSystem {
    family: Family,
    rank: usize,
    cartan: Vec<Vec<i64>>,
    det_cartan: i64,
    /// `det_cartan · cartan⁻¹`, an integer matrix.
    gram_scaled: Vec<Vec<i64>>,
    simple_roots: Vec<WeightVec>,
    positive_roots: Vec<WeightVec>,
    highest_root: WeightVec,
    /// Coefficients of the highest root on the simple roots.
    marks: Vec<i64>,
    rho: WeightVec,
    dual_coxeter: i64,
    /// Matrix of `-w₀`, i.e. the charge conjugation on weights.
    neg_longest: WeylElement,
    weyl: OnceLock<Vec<WeylElement>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RootSystemSummary {
    pub name: String,
    pub family: Family,
    pub rank: usize,
    pub cartan: Vec<Vec<i64>>,
    pub gram_weights: Vec<Vec<String>>,
    pub simple_roots: Vec<WeightVec>,
    pub positive_roots: Vec<WeightVec>,
    pub highest_root: WeightVec,
    pub rho: WeightVec,
    pub rho_norm_sq: String,
    pub dual_coxeter: i64,
    pub num_pos_roots: usize,
    pub weyl_order: String,
    pub det_cartan: i64,
    pub vol_root_lattice: f64,
    pub vol_weight_lattice: f64,
    pub dim_g: usize,
}

fn cartan_matrix(family: Family, rank: usize) -> Result<Vec<Vec<i64>>, LieError> {
    let edges: Vec<(usize, usize)> = match (family, rank) {
        (Family::A, l) if l >= 1 => (0..l - 1).map(|i| (i, i + 1)).collect(),
        (Family::D, l) if l >= 4 => {
            let mut e: Vec<_> = (0..l - 2).map(|i| (i, i + 1)).collect();
            e.push((l - 3, l - 1));
            e
        }
        // Bourbaki labels: chain 1-3-4-5-6-7-8 with node 2 on node 4.
        (Family::E, l @ 6..=8) => {
            let mut e = vec![(0, 2), (2, 3), (1, 3)];
            e.extend((3..l - 1).map(|i| (i, i + 1)));
            e
        }
        _ => return Err(LieError::UnsupportedType(family, rank)),
    };
    let mut a = vec![vec![0i64; rank]; rank];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (i, j) in edges {
        a[i][j] = -1;
        a[j][i] = -1;
    }
    Ok(a)
}

/// Determinant and `det·A⁻¹` of an integer matrix by exact rational elimination.
fn det_and_adjugate(a: &[Vec<i64>]) -> (i64, Vec<Vec<i64>>) {
    let n = a.len();
    let zero = Rational::from_integer(0);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Rational> = row.iter().map(|&x| Rational::from_integer(x)).collect();
            r.extend((0..n).map(|j| Rational::from_integer((i == j) as i64)));
            r
        })
        .collect();
    let mut det = Rational::from_integer(1);
    for k in 0..n {
        let p = (k..n).find(|&i| m[i][k] != zero).expect("nonsingular matrix");
        if p != k {
            m.swap(k, p);
            det = -det;
        }
        let pivot = m[k][k];
        det *= pivot;
        for x in m[k].iter_mut() {
            *x /= pivot;
        }
        let pivot_row = m[k].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != k && row[k] != zero {
                let f = row[k];
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
            }
        }
    }
    assert!(det.is_integer());
    let adj = m
        .iter()
        .map(|row| {
            row[n..]
                .iter()
                .map(|q| {
                    let v = *q * det;
                    assert!(v.is_integer());
                    v.to_integer()
                })
                .collect()
        })
        .collect();
    (det.to_integer(), adj)
}

impl RootSystem {
    /// Build the root datum of type `family_rank`.
    pub fn new(family: Family, rank: usize) -> Result<Self, LieError> {
        let cartan = cartan_matrix(family, rank)?;
        let (det_cartan, gram_scaled) = det_and_adjugate(&cartan);
        let l = rank;
        let simple_roots: Vec<WeightVec> = (0..l)
            .map(|i| WeightVec((0..l).map(|j| cartan[j][i]).collect()))
            .collect();

        // Positive roots in root coordinates, grown by height: for simply-laced
        // types β + α_i is a root exactly when ⟨β, α_i⟩ = -1.
        let pair = |beta: &[i64], i: usize| -> i64 { (0..l).map(|j| cartan[i][j] * beta[j]).sum() };
        let mut pos_root_coords: Vec<Vec<i64>> = (0..l)
            .map(|i| {
                let mut e = vec![0; l];
                e[i] = 1;
                e
            })
            .collect();
        let mut seen: HashMap<Vec<i64>, ()> = pos_root_coords.iter().map(|v| (v.clone(), ())).collect();
        let mut frontier = pos_root_coords.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for beta in &frontier {
                for i in 0..l {
                    if pair(beta, i) == -1 {
                        let mut b = beta.clone();
                        b[i] += 1;
                        if seen.insert(b.clone(), ()).is_none() {
                            next.push(b.clone());
                            pos_root_coords.push(b);
                        }
                    }
                }
            }
            frontier = next;
        }
        pos_root_coords.sort_by_key(|b| (b.iter().sum::<i64>(), b.clone()));
        let to_weight = |b: &[i64]| WeightVec((0..l).map(|i| pair(b, i)).collect());
        let positive_roots: Vec<WeightVec> = pos_root_coords.iter().map(|b| to_weight(b)).collect();
        let marks = pos_root_coords.last().cloned().expect("nonempty root system");
        let highest_root = positive_roots.last().cloned().unwrap();
        let rho = WeightVec(vec![1; l]);
        let dual_coxeter = marks.iter().sum::<i64>() + 1;

        let mut rs = RootSystem {
            family,
            rank,
            cartan,
            det_cartan,
            gram_scaled,
            simple_roots,
            positive_roots,
            highest_root,
            marks,
            rho,
            dual_coxeter,
            neg_longest: WeylElement::identity(rank),
            weyl: OnceLock::new(),
        };
        rs.neg_longest = rs.compute_neg_longest();
        Ok(rs)
    }

    /// Parse names like `A1`, `D4`, `E8`.
    pub fn from_name(name: &str) -> Result<Self, LieError> {
        let bad = || LieError::BadAlgebraName(name.to_string());
        let name = name.trim();
        let mut chars = name.chars();
        let fam = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('E') => Family::E,
            Some('F') => Family::F,
            Some('G') => Family::G,
            _ => return Err(bad()),
        };
        let rank: usize = chars.as_str().parse().map_err(|_| bad())?;
        RootSystem::new(fam, rank)
    }

    fn reflection(&self, i: usize) -> WeylElement {
        // s_i(λ) = λ - λ_i α_i
        let l = self.rank;
        let mut e = WeylElement::identity(l);
        for row in 0..l {
            e.matrix[row * l + i] -= self.cartan[row][i];
        }
        e.det_sign = -1;
        e.length = 1;
        e
    }

    fn compute_neg_longest(&self) -> WeylElement {
        // Walk ρ to -ρ by simple reflections; the product is w₀.
        let l = self.rank;
        let mut w = WeylElement::identity(l);
        let mut x = self.rho.clone();
        while let Some(i) = (0..l).find(|&i| x.0[i] > 0) {
            let s = self.reflection(i);
            x = s.apply(&x);
            w = s.compose(&w);
        }
        let mut neg = w;
        for v in neg.matrix.iter_mut() {
            *v = -*v;
        }
        neg
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn name(&self) -> String {
        format!("{}{}", self.family, self.rank)
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn det_cartan(&self) -> i64 {
        self.det_cartan
    }

    /// Inner products of fundamental weights: the inverse Cartan matrix.
    pub fn gram_weights(&self) -> Vec<Vec<Rational>> {
        self.gram_scaled
            .iter()
            .map(|row| row.iter().map(|&x| Rational::new(x, self.det_cartan)).collect())
            .collect()
    }

    pub fn simple_roots(&self) -> &[WeightVec] {
        &self.simple_roots
    }

    pub fn positive_roots(&self) -> &[WeightVec] {
        &self.positive_roots
    }

    pub fn num_pos_roots(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn highest_root(&self) -> &WeightVec {
        &self.highest_root
    }

    pub fn rho(&self) -> &WeightVec {
        &self.rho
    }

    pub fn dual_coxeter(&self) -> i64 {
        self.dual_coxeter
    }

    pub fn dim_g(&self) -> usize {
        self.rank + 2 * self.num_pos_roots()
    }

    /// `vol(Λ^R) = sqrt(det cartan)`.
    pub fn vol_root_lattice<T: Real>(&self) -> T {
        T::from_int(self.det_cartan as i128).sqrt()
    }

    /// `vol(Λ^W) = 1 / vol(Λ^R)`.
    pub fn vol_weight_lattice<T: Real>(&self) -> T {
        T::one() / self.vol_root_lattice::<T>()
    }

    /// `det(cartan)·⟨x, y⟩`, an integer.
    pub fn inner_scaled(&self, x: &WeightVec, y: &WeightVec) -> i64 {
        let mut s = 0;
        for (i, row) in self.gram_scaled.iter().enumerate() {
            if x.0[i] == 0 {
                continue;
            }
            let t: i64 = row.iter().zip(&y.0).map(|(g, b)| g * b).sum();
            s += x.0[i] * t;
        }
        s
    }

    pub fn inner(&self, x: &WeightVec, y: &WeightVec) -> Rational {
        Rational::new(self.inner_scaled(x, y), self.det_cartan)
    }

    pub fn norm_sq(&self, x: &WeightVec) -> Rational {
        self.inner(x, x)
    }

    /// `⟨λ, α⟩` for a root `α` is an integer; for simple roots it is the coordinate.
    pub fn pair_with_root(&self, lambda: &WeightVec, root: &WeightVec) -> i64 {
        let r = self.inner(lambda, root);
        debug_assert!(r.is_integer());
        r.to_integer()
    }

    /// Membership in the root lattice: `cartan⁻¹ · v` integral.
    pub fn in_root_lattice(&self, v: &WeightVec) -> bool {
        self.gram_scaled.iter().all(|row| {
            let s: i64 = row.iter().zip(&v.0).map(|(g, x)| g * x).sum();
            s % self.det_cartan == 0
        })
    }

    /// Order of the Weyl group from the standard product formulas.
    pub fn weyl_order(&self) -> u128 {
        let fact = |n: usize| (1..=n as u128).product::<u128>();
        match (self.family, self.rank) {
            (Family::A, l) => fact(l + 1),
            (Family::D, l) => (1u128 << (l - 1)) * fact(l),
            (Family::E, 6) => 51_840,
            (Family::E, 7) => 2_903_040,
            (Family::E, 8) => 696_729_600,
            _ => unreachable!("only simply-laced types are constructed"),
        }
    }

    /// All Weyl group elements with the default enumeration cap; cached.
    pub fn weyl_elements(&self) -> Result<&[WeylElement], LieError> {
        self.weyl_elements_capped(DEFAULT_WEYL_CAP)
    }

    /// All Weyl group elements, refusing groups larger than `cap`.
    ///
    /// Breadth-first closure over simple reflections from the identity, so the
    /// identity comes first and `length` is the minimal word length.
    pub fn weyl_elements_capped(&self, cap: u128) -> Result<&[WeylElement], LieError> {
        if let Some(w) = self.weyl.get() {
            return Ok(w);
        }
        let order = self.weyl_order();
        if order > cap {
            return Err(LieError::WeylGroupTooLarge { order, cap });
        }
        let gens: Vec<WeylElement> = (0..self.rank).map(|i| self.reflection(i)).collect();
        let id = WeylElement::identity(self.rank);
        let mut index: HashMap<Vec<i64>, ()> = HashMap::new();
        index.insert(id.matrix.clone(), ());
        let mut out = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(w) = queue.pop_front() {
            for g in &gens {
                let next = g.compose(&w);
                if index.insert(next.matrix.clone(), ()).is_none() {
                    out.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        let _ = self.weyl.set(out);
        Ok(self.weyl.get().unwrap())
    }

    /// `⟨λ, α₀⟩`.
    pub fn level_of(&self, lambda: &WeightVec) -> i64 {
        self.marks.iter().zip(&lambda.0).map(|(m, x)| m * x).sum()
    }

    /// Interior alcove points `{λ : ⟨λ,α_i⟩ > 0, ⟨λ,α₀⟩ < r}` in lexicographic order.
    pub fn alcove_weights(&self, r: i64) -> Result<Vec<WeightVec>, LieError> {
        if r < self.dual_coxeter {
            return Err(LieError::LevelTooSmall {
                r,
                h: self.dual_coxeter,
            });
        }
        let mut out = Vec::new();
        let mut cur = vec![0i64; self.rank];
        self.enumerate_alcove(0, r - 1, 1, &mut cur, &mut out);
        Ok(out)
    }

    /// Closed alcove points `{λ : ⟨λ,α_i⟩ ≥ 0, ⟨λ,α₀⟩ ≤ r}` in lexicographic order.
    pub fn closed_alcove_weights(&self, r: i64) -> Vec<WeightVec> {
        let mut out = Vec::new();
        let mut cur = vec![0i64; self.rank];
        self.enumerate_alcove(0, r, 0, &mut cur, &mut out);
        out
    }

    fn enumerate_alcove(&self, i: usize, budget: i64, min: i64, cur: &mut Vec<i64>, out: &mut Vec<WeightVec>) {
        if i == self.rank {
            out.push(WeightVec(cur.clone()));
            return;
        }
        // the remaining coordinates need at least `min` each
        let rest: i64 = self.marks[i + 1..].iter().sum::<i64>() * min;
        let mut x = min;
        while self.marks[i] * x + rest <= budget {
            cur[i] = x;
            self.enumerate_alcove(i + 1, budget - self.marks[i] * x, min, cur, out);
            x += 1;
        }
    }

    /// Representatives `Σ nᵢαᵢ`, `0 ≤ nᵢ < |c|`, of `Λ^R / cΛ^R`.
    pub fn coset_reps_root_lattice(&self, c: i64) -> Result<Vec<WeightVec>, LieError> {
        if c == 0 {
            return Err(LieError::ZeroModulus);
        }
        let m = c.unsigned_abs() as i64;
        let l = self.rank;
        let total = (m as usize).pow(l as u32);
        let mut out = Vec::with_capacity(total);
        let mut n = vec![0i64; l];
        for _ in 0..total {
            let v: Vec<i64> = (0..l).map(|i| (0..l).map(|j| self.cartan[i][j] * n[j]).sum()).collect();
            out.push(WeightVec(v));
            for d in (0..l).rev() {
                n[d] += 1;
                if n[d] < m {
                    break;
                }
                n[d] = 0;
            }
        }
        Ok(out)
    }

    /// `λ* = -w₀(λ - ρ) + ρ`, which equals `-w₀ λ` because `w₀ρ = -ρ`.
    pub fn dual_weight(&self, lambda: &WeightVec) -> WeightVec {
        self.neg_longest.apply(lambda)
    }

    pub fn summary(&self) -> RootSystemSummary {
        RootSystemSummary {
            name: self.name(),
            family: self.family,
            rank: self.rank,
            cartan: self.cartan.clone(),
            gram_weights: self
                .gram_weights()
                .iter()
                .map(|row| row.iter().map(|q| q.to_string()).collect())
                .collect(),
            simple_roots: self.simple_roots.clone(),
            positive_roots: self.positive_roots.clone(),
            highest_root: self.highest_root.clone(),
            rho: self.rho.clone(),
            rho_norm_sq: self.norm_sq(&self.rho).to_string(),
            dual_coxeter: self.dual_coxeter,
            num_pos_roots: self.num_pos_roots(),
            weyl_order: self.weyl_order().to_string(),
            det_cartan: self.det_cartan,
            vol_root_lattice: self.vol_root_lattice::<f64>(),
            vol_weight_lattice: self.vol_weight_lattice::<f64>(),
            dim_g: self.dim_g(),
        }
    }
}

impl FromStr for RootSystem {
    type Err = LieError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RootSystem::from_name(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(f: Family, l: usize) -> RootSystem {
        RootSystem::new(f, l).unwrap()
    }

    #[test]
    fn a1_data() {
        let a1 = rs(Family::A, 1);
        assert_eq!(a1.rank(), 1);
        assert_eq!(a1.num_pos_roots(), 1);
        assert_eq!(a1.dual_coxeter(), 2);
        assert_eq!(a1.rho(), &WeightVec(vec![1]));
        assert_eq!(a1.det_cartan(), 2);
        assert_eq!(a1.inner(&WeightVec(vec![1]), &WeightVec(vec![1])), Rational::new(1, 2));
        assert_eq!(a1.norm_sq(&a1.simple_roots()[0]), Rational::from_integer(2));
    }

    #[test]
    fn a2_highest_root() {
        let a2 = rs(Family::A, 2);
        assert_eq!(a2.num_pos_roots(), 3);
        assert_eq!(a2.dual_coxeter(), 3);
        assert_eq!(a2.highest_root(), &WeightVec(vec![1, 1]));
        let sum = &a2.simple_roots()[0] + &a2.simple_roots()[1];
        assert_eq!(&sum, a2.highest_root());
    }

    #[test]
    fn d4_counts() {
        let d4 = rs(Family::D, 4);
        assert_eq!(d4.num_pos_roots(), 12);
        assert_eq!(d4.dual_coxeter(), 6);
        assert_eq!(d4.weyl_elements().unwrap().len(), 192);
    }

    #[test]
    fn positive_root_counts_and_coxeter_numbers() {
        for l in 1..=6 {
            let a = rs(Family::A, l);
            assert_eq!(a.num_pos_roots(), l * (l + 1) / 2);
            assert_eq!(a.dual_coxeter(), l as i64 + 1);
        }
        for l in 4..=7 {
            let d = rs(Family::D, l);
            assert_eq!(d.num_pos_roots(), l * (l - 1));
            assert_eq!(d.dual_coxeter(), 2 * l as i64 - 2);
        }
        let e8 = rs(Family::E, 8);
        assert_eq!(e8.num_pos_roots(), 120);
        assert_eq!(e8.dual_coxeter(), 30);
        assert_eq!(e8.det_cartan(), 1);
        assert_eq!(rs(Family::E, 6).dual_coxeter(), 12);
        assert_eq!(rs(Family::E, 7).dual_coxeter(), 18);
    }

    #[test]
    fn unsupported_types_are_rejected() {
        for (f, l) in [
            (Family::B, 3),
            (Family::C, 2),
            (Family::G, 2),
            (Family::F, 4),
            (Family::D, 3),
            (Family::E, 5),
            (Family::A, 0),
        ] {
            assert_eq!(RootSystem::new(f, l).unwrap_err(), LieError::UnsupportedType(f, l));
        }
    }

    #[test]
    fn weyl_group_sizes() {
        let a1 = rs(Family::A, 1);
        let w = a1.weyl_elements().unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w[0].matrix(), &[1]);
        assert_eq!(w[1].matrix(), &[-1]);
        let a2 = rs(Family::A, 2);
        let w = a2.weyl_elements().unwrap();
        assert_eq!(w.len(), 6);
        assert_eq!(w.iter().filter(|e| e.det_sign() == 1).count(), 3);
        assert_eq!(rs(Family::A, 3).weyl_elements().unwrap().len(), 24);
    }

    #[test]
    fn weyl_cap_is_enforced() {
        let e8 = rs(Family::E, 8);
        let err = e8.weyl_elements().unwrap_err();
        assert_eq!(
            err,
            LieError::WeylGroupTooLarge {
                order: 696_729_600,
                cap: DEFAULT_WEYL_CAP
            }
        );
        assert!(err.to_string().contains("1000000"));
        let a3 = rs(Family::A, 3);
        assert!(a3.weyl_elements_capped(10).is_err());
    }

    #[test]
    fn alcove_examples() {
        let a1 = rs(Family::A, 1);
        let al = a1.alcove_weights(5).unwrap();
        assert_eq!(al, (1..=4).map(|m| WeightVec(vec![m])).collect::<Vec<_>>());
        assert_eq!(a1.alcove_weights(2).unwrap(), vec![WeightVec(vec![1])]);
        let a2 = rs(Family::A, 2);
        assert_eq!(
            a2.alcove_weights(4).unwrap(),
            vec![WeightVec(vec![1, 1]), WeightVec(vec![1, 2]), WeightVec(vec![2, 1])]
        );
        assert_eq!(
            a1.alcove_weights(1).unwrap_err(),
            LieError::LevelTooSmall { r: 1, h: 2 }
        );
        assert_eq!(a2.closed_alcove_weights(1).len(), 3);
    }

    #[test]
    fn coset_examples() {
        let a1 = rs(Family::A, 1);
        assert_eq!(
            a1.coset_reps_root_lattice(2).unwrap(),
            vec![WeightVec(vec![0]), WeightVec(vec![2])]
        );
        assert_eq!(
            a1.coset_reps_root_lattice(-2).unwrap(),
            vec![WeightVec(vec![0]), WeightVec(vec![2])]
        );
        assert_eq!(rs(Family::A, 2).coset_reps_root_lattice(3).unwrap().len(), 9);
        assert_eq!(a1.coset_reps_root_lattice(0).unwrap_err(), LieError::ZeroModulus);
    }

    #[test]
    fn dual_weight_examples() {
        let a1 = rs(Family::A, 1);
        assert_eq!(a1.dual_weight(&WeightVec(vec![3])), WeightVec(vec![3]));
        let a2 = rs(Family::A, 2);
        assert_eq!(a2.dual_weight(&WeightVec(vec![1, 2])), WeightVec(vec![2, 1]));
        for (f, l) in [
            (Family::A, 4),
            (Family::D, 4),
            (Family::D, 5),
            (Family::E, 6),
            (Family::E, 8),
        ] {
            let r = rs(f, l);
            assert_eq!(&r.dual_weight(r.rho()), r.rho());
        }
        // D5 swaps the two spinor nodes, E6 flips the diagram
        let d5 = rs(Family::D, 5);
        assert_eq!(
            d5.dual_weight(&WeightVec(vec![0, 0, 0, 1, 0])),
            WeightVec(vec![0, 0, 0, 0, 1])
        );
        let e6 = rs(Family::E, 6);
        assert_eq!(
            e6.dual_weight(&WeightVec(vec![1, 0, 0, 0, 0, 0])),
            WeightVec(vec![0, 0, 0, 0, 0, 1])
        );
    }

    #[test]
    fn structural_identities() {
        for (f, l) in [
            (Family::A, 1),
            (Family::A, 2),
            (Family::A, 5),
            (Family::D, 4),
            (Family::D, 6),
            (Family::E, 6),
            (Family::E, 7),
            (Family::E, 8),
        ] {
            let r = rs(f, l);
            // gram × cartan = identity
            let g = r.gram_weights();
            for i in 0..l {
                for j in 0..l {
                    let s: Rational = (0..l).map(|k| g[i][k] * Rational::from_integer(r.cartan()[k][j])).sum();
                    assert_eq!(s, Rational::from_integer((i == j) as i64));
                }
            }
            for a in r.positive_roots() {
                assert_eq!(r.norm_sq(a), Rational::from_integer(2));
            }
            assert_eq!(
                r.inner(r.rho(), r.highest_root()),
                Rational::from_integer(r.dual_coxeter() - 1)
            );
            // strange formula |ρ|²/h = dim g / 12
            assert_eq!(
                r.norm_sq(r.rho()),
                Rational::new(r.dual_coxeter() * r.dim_g() as i64, 12)
            );
            let ratio = r.vol_root_lattice::<f64>() / r.vol_weight_lattice::<f64>();
            assert!((ratio - r.det_cartan() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn root_lattice_membership() {
        let a2 = rs(Family::A, 2);
        assert!(a2.in_root_lattice(&WeightVec(vec![2, -1])));
        assert!(!a2.in_root_lattice(&WeightVec(vec![1, 0])));
        assert!(a2.in_root_lattice(&WeightVec(vec![1, 1])));
    }

    #[test]
    fn parse_names() {
        assert_eq!(RootSystem::from_name("a2").unwrap().name(), "A2");
        assert_eq!(RootSystem::from_name("E8").unwrap().rank(), 8);
        assert!(matches!(RootSystem::from_name("X3"), Err(LieError::BadAlgebraName(_))));
        assert!(matches!(
            RootSystem::from_name("B3"),
            Err(LieError::UnsupportedType(Family::B, 3))
        ));
    }
}

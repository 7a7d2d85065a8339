//! Lattice Gauss sums and their reciprocity formula.
//!
//! A lattice `Λ` is given by the Gram matrix `G` of a basis. Vectors of `V`
//! are stored in that basis; `Λ*` is spanned by the columns of `G⁻¹`, and a
//! dual vector is stored by its coordinates on the dual basis (`x* = Gx`).

use num_complex::Complex;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::scalar::{cis_pi_rat, ComplexSum, Real};
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GaussError {
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("B is singular")]
    SingularB,
    #[error("B does not preserve the dual lattice: entry ({0},{1}) of its dual-basis matrix is {2}")]
    NonIntegralB(usize, usize, Rational),
}

type Mat = Vec<Vec<Rational>>;

fn q0() -> Rational {
    Rational::zero()
}

fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { q0() }).collect())
        .collect()
}

fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (n, m, k) = (a.len(), b[0].len(), b.len());
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect())
        .collect()
}

fn matvec(a: &Mat, v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| *x * *y).sum())
        .collect()
}

fn quad(a: &Mat, x: &[Rational], y: &[Rational]) -> Rational {
    x.iter().zip(matvec(a, y)).map(|(p, q)| *p * q).sum()
}

/// Determinant and inverse (if any) by Gauss–Jordan elimination.
fn det_inverse(a: &Mat) -> (Rational, Option<Mat>) {
    let n = a.len();
    let mut m: Mat = a
        .iter()
        .zip(identity(n))
        .map(|(row, e)| row.iter().cloned().chain(e).collect())
        .collect();
    let mut det = Rational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return (q0(), None);
        };
        if p != k {
            m.swap(k, p);
            det = -det;
        }
        let pivot = m[k][k];
        det *= pivot;
        for x in m[k].iter_mut() {
            *x /= pivot;
        }
        let pr = m[k].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != k && !row[k].is_zero() {
                let f = row[k];
                for (x, p) in row.iter_mut().zip(&pr) {
                    *x -= f * *p;
                }
            }
        }
    }
    (det, Some(m.into_iter().map(|row| row[n..].to_vec()).collect()))
}

/// Coefficients `c_0..c_n` of `det(xI − A)` by Faddeev–LeVerrier.
fn char_poly(a: &Mat) -> Vec<Rational> {
    let n = a.len();
    let mut c = vec![q0(); n + 1];
    c[n] = Rational::one();
    let mut mk = vec![vec![q0(); n]; n];
    for k in 1..=n {
        let mut next = matmul(a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += c[n - k + 1];
        }
        mk = next;
        let am = matmul(a, &mk);
        let tr: Rational = (0..n).map(|i| am[i][i]).sum();
        c[n - k] = -tr / Rational::from_integer(k as i64);
    }
    c
}

fn sign_changes(coeffs: impl Iterator<Item = Rational>) -> i64 {
    let signs: Vec<i64> = coeffs.map(|x| x.numer().signum()).filter(|&s| s != 0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count() as i64
}

/// Signature of a matrix with real spectrum, exactly, by Descartes' rule.
fn signature(a: &Mat) -> i64 {
    let c = char_poly(a);
    let pos = sign_changes(c.iter().cloned());
    let neg = sign_changes(c.iter().enumerate().map(|(k, x)| if k % 2 == 1 { -*x } else { *x }));
    pos - neg
}

fn is_int(x: &Rational) -> bool {
    x.is_integer()
}

/// Quadratic form `(1/2)·xᵀKx` integral on `Zⁿ` for symmetric `K`.
fn half_form_integral(k: &Mat) -> bool {
    let n = k.len();
    (0..n).all(|i| is_int(&(k[i][i] / Rational::from_integer(2))) && (0..i).all(|j| is_int(&k[i][j])))
}

/// Smith normal form `L·A·R = diag(d)`; returns `(d, L⁻¹)`.
fn smith_normal_form(a: &[Vec<i64>]) -> (Vec<i64>, Vec<Vec<i64>>) {
    let n = a.len();
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut linv: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect();
    for k in 0..n {
        // smallest nonzero entry of the trailing block moves to (k,k)
        while let Some((pi, pj)) = (k..n)
            .flat_map(|i| (k..n).map(move |j| (i, j)))
            .filter(|&(i, j)| m[i][j] != 0)
            .min_by_key(|&(i, j)| m[i][j].abs())
        {
            m.swap(k, pi);
            for row in linv.iter_mut() {
                row.swap(k, pi);
            }
            for row in m.iter_mut() {
                row.swap(k, pj);
            }
            let p = m[k][k];
            let mut done = true;
            for i in k + 1..n {
                let f = m[i][k] / p;
                if f != 0 {
                    for j in 0..n {
                        m[i][j] -= f * m[k][j];
                    }
                    // row_i -= f row_k  ⇒  col_k(L⁻¹) += f col_i(L⁻¹)
                    for row in linv.iter_mut() {
                        row[k] += f * row[i];
                    }
                }
                done &= m[i][k] == 0;
            }
            for j in k + 1..n {
                let f = m[k][j] / p;
                if f != 0 {
                    for row in m.iter_mut() {
                        row[j] -= f * row[k];
                    }
                }
                done &= m[k][j] == 0;
            }
            if done {
                // enforce divisibility of the remaining block
                if let Some(i) = (k + 1..n).find(|&i| (k + 1..n).any(|j| m[i][j] % p != 0)) {
                    for j in 0..n {
                        m[k][j] += m[i][j];
                    }
                    // row_k += row_i  ⇒  col_i(L⁻¹) -= col_k(L⁻¹)
                    for row in linv.iter_mut() {
                        row[i] -= row[k];
                    }
                    continue;
                }
                break;
            }
        }
    }
    let d = (0..n).map(|i| m[i][i].abs() as i64).collect();
    let linv = linv
        .into_iter()
        .map(|r| r.into_iter().map(|x| x as i64).collect())
        .collect();
    (d, linv)
}

/// Representatives of `Zⁿ / A·Zⁿ` for a nonsingular integer matrix `A`.
pub fn quotient_reps(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let (d, linv) = smith_normal_form(a);
    let total: i64 = d.iter().product();
    let mut out = Vec::with_capacity(total as usize);
    let mut y = vec![0i64; n];
    for _ in 0..total {
        out.push((0..n).map(|i| (0..n).map(|j| linv[i][j] * y[j]).sum()).collect());
        for k in (0..n).rev() {
            y[k] += 1;
            if y[k] < d[k] {
                break;
            }
            y[k] = 0;
        }
    }
    out
}

/// Data of one instance of the reciprocity formula.
#[derive(Debug, Clone)]
pub struct GaussSumSpec {
    gram: Mat,
    r: i64,
    b: Mat,
    psi: Vec<Rational>,
}

impl GaussSumSpec {
    /// Validate every integrality condition exactly.
    ///
    /// A negative `r` is rewritten as `(|r|, −B)`; both sides of the formula
    /// are unchanged by that substitution.
    pub fn new(gram: Mat, r: i64, b: Mat, psi: Vec<Rational>) -> Result<Self, GaussError> {
        let n = gram.len();
        let bad = |s: &str| Err(GaussError::PreconditionViolation(s.to_string()));
        if n == 0
            || gram.iter().any(|row| row.len() != n)
            || b.len() != n
            || b.iter().any(|row| row.len() != n)
            || psi.len() != n
        {
            return bad("dimensions of Gram matrix, B and ψ disagree");
        }
        if r == 0 {
            return bad("r must be nonzero");
        }
        if (0..n).any(|i| (0..i).any(|j| gram[i][j] != gram[j][i])) {
            return bad("Gram matrix is not symmetric");
        }
        // positive definite: leading minors
        for k in 1..=n {
            let minor: Mat = gram[..k].iter().map(|row| row[..k].to_vec()).collect();
            if det_inverse(&minor).0 <= q0() {
                return bad("Gram matrix is not positive definite");
            }
        }
        let (b, r) = if r < 0 {
            (b.iter().map(|row| row.iter().map(|x| -*x).collect()).collect(), -r)
        } else {
            (b, r)
        };
        let (det_b, b_inv) = det_inverse(&b);
        if b_inv.is_none() || det_b.is_zero() {
            return Err(GaussError::SingularB);
        }
        let ginv = det_inverse(&gram).1.expect("positive definite");
        let gb = matmul(&gram, &b);
        if (0..n).any(|i| (0..i).any(|j| gb[i][j] != gb[j][i])) {
            return bad("B is not self-adjoint");
        }
        let rq = Rational::from_integer(r);
        let scale =
            |m: &Mat, s: Rational| -> Mat { m.iter().map(|row| row.iter().map(|x| *x * s).collect()).collect() };
        if !half_form_integral(&scale(&gb, rq)) {
            return bad("(1/2)<λ, Brλ> not integral on Λ");
        }
        if !gb.iter().flatten().all(is_int) {
            return bad("<λ, Bη> not integral on Λ");
        }
        if !matvec(&gram, &psi).iter().all(|x| is_int(&(*x * rq))) {
            return bad("r<λ, ψ> not integral on Λ");
        }
        let b_ginv = matmul(&b, &ginv);
        if !half_form_integral(&scale(&b_ginv, rq)) {
            return bad("(1/2)<μ, Brμ> not integral on Λ*");
        }
        if !ginv.iter().flatten().all(|x| is_int(&(*x * rq))) {
            return bad("<μ, rξ> not integral on Λ*");
        }
        if !psi.iter().all(|x| is_int(&(*x * rq))) {
            return bad("r<μ, ψ> not integral on Λ*");
        }
        let spec = Self { gram, r, b, psi };
        spec.dual_matrix()?;
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn level(&self) -> i64 {
        self.r
    }

    /// Matrix of `B` on the dual basis, `G·M·G⁻¹`, required integral.
    fn dual_matrix(&self) -> Result<Vec<Vec<i64>>, GaussError> {
        let ginv = det_inverse(&self.gram).1.expect("positive definite");
        let m = matmul(&matmul(&self.gram, &self.b), &ginv);
        m.iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, x)| {
                        if x.is_integer() {
                            Ok(x.to_integer())
                        } else {
                            Err(GaussError::NonIntegralB(i, j, *x))
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Dual-basis coordinates of representatives of `Λ*/BΛ*`.
    pub fn dual_coset_reps(&self) -> Result<Vec<Vec<i64>>, GaussError> {
        Ok(quotient_reps(&self.dual_matrix()?))
    }

    fn vol_dual<T: Real>(&self) -> T {
        let det = det_inverse(&self.gram).0;
        T::from_int(*det.denom() as i128).sqrt() / T::from_int(*det.numer() as i128).sqrt()
    }

    /// `vol(Λ*) Σ_{λ∈Λ/rΛ} exp(πi⟨λ,Bλ⟩/r) exp(2πi⟨λ,ψ⟩)`.
    pub fn lhs<T: Real>(&self) -> Complex<T> {
        self.lhs_shifted(&vec![0; self.dim()])
    }

    /// The left side summed over the representatives `λ + r·shift`.
    pub fn lhs_shifted<T: Real>(&self, shift: &[i64]) -> Complex<T> {
        let n = self.dim();
        let gb = matmul(&self.gram, &self.b);
        let gpsi = matvec(&self.gram, &self.psi);
        let r = self.r;
        let mut lam = vec![0i64; n];
        let mut acc = ComplexSum::new();
        for _ in 0..(r as usize).pow(n as u32) {
            let x: Vec<Rational> = lam
                .iter()
                .zip(shift)
                .map(|(a, s)| Rational::from_integer(a + r * s))
                .collect();
            let arg = quad(&gb, &x, &x) / r + x.iter().zip(&gpsi).map(|(a, b)| *a * *b).sum::<Rational>() * 2;
            acc += cis_pi_rat::<T>(reduce_mod2(arg));
            for k in (0..n).rev() {
                lam[k] += 1;
                if lam[k] < r {
                    break;
                }
                lam[k] = 0;
            }
        }
        acc.value() * self.vol_dual::<T>()
    }

    /// `exp(πi·sig(B)/4) |det B|^{-1/2} r^{l/2} Σ_{μ∈Λ*/BΛ*} exp(−πir⟨μ+ψ, B⁻¹(μ+ψ)⟩)`.
    ///
    /// This is the principal branch of `(det(B/i))^{-1/2}`.
    pub fn rhs<T: Real>(&self) -> Complex<T> {
        let n = self.dim();
        let (det_b, b_inv) = det_inverse(&self.b);
        let b_inv = b_inv.expect("validated nonsingular");
        let ginv = det_inverse(&self.gram).1.expect("positive definite");
        // ⟨x, B⁻¹x⟩ = x*ᵀ M⁻¹ G⁻¹ x* for dual coordinates x*
        let form = matmul(&b_inv, &ginv);
        let gpsi = matvec(&self.gram, &self.psi);
        let reps = self.dual_coset_reps().expect("validated");
        let mut acc = ComplexSum::new();
        for mu in &reps {
            let x: Vec<Rational> = mu
                .iter()
                .zip(&gpsi)
                .map(|(m, p)| Rational::from_integer(*m) + *p)
                .collect();
            let arg = -quad(&form, &x, &x) * self.r;
            acc += cis_pi_rat::<T>(reduce_mod2(arg));
        }
        let sig = signature(&self.b);
        let abs_det = det_b.abs();
        let mag = T::from_int(*abs_det.denom() as i128).sqrt() / T::from_int(*abs_det.numer() as i128).sqrt()
            * T::from_int(self.r as i128).sqrt().powi(n as i32);
        acc.value() * cis_pi_rat::<T>(Rational::new(sig, 4)) * mag
    }
}

fn reduce_mod2(x: Rational) -> Rational {
    let two_d = 2 * *x.denom();
    Rational::new(x.numer().rem_euclid(two_d), *x.denom())
}

/// Spec for a scalar `B = m·I` on a lattice with Gram matrix `gram`.
pub fn scalar_spec(gram: &[Vec<i64>], r: i64, m: i64, psi: Vec<Rational>) -> Result<GaussSumSpec, GaussError> {
    let n = gram.len();
    let g = gram
        .iter()
        .map(|row| row.iter().map(|&x| Rational::from_integer(x)).collect())
        .collect();
    let b = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Rational::from_integer(if i == j { m } else { 0 }))
                .collect()
        })
        .collect();
    GaussSumSpec::new(g, r, b, psi)
}

//! Property suites behind `seifert-rt verify`.

use std::sync::Arc;

use clap::ValueEnum;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use seifert_rt::asymptotics::{lens_expansion, residual_sweep};
use seifert_rt::gauss::GaussSumSpec;
use seifert_rt::invariants::{tau_closed_form, tau_lens, tau_matrix_form, LensMethod, DEFAULT_TERM_BUDGET};
use seifert_rt::rep::{gen_theta, gen_xi, IndexedMatrix};
use seifert_rt::scalar::to_c64;
use seifert_rt::{CfStrategy, DoubleDouble, ModularData, Rational, RootSystem, SeifertPresentation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Relations,
    Reciprocity,
    Oracle,
    Asymptotics,
    All,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

pub struct Options {
    /// Algebras with their levels.
    pub targets: Vec<(Arc<RootSystem>, Vec<i64>)>,
    pub seed: u64,
    pub trials: usize,
}

impl Options {
    pub fn desk_scale() -> Vec<(Arc<RootSystem>, Vec<i64>)> {
        vec![
            (Arc::new(RootSystem::from_name("A1").unwrap()), (2..=8).collect()),
            (Arc::new(RootSystem::from_name("A2").unwrap()), (3..=5).collect()),
        ]
    }
}

type C = Complex<f64>;

struct Tally {
    suite: &'static str,
    name: String,
    cases: usize,
    max_error: f64,
    tolerance: f64,
}

impl Tally {
    fn new(suite: &'static str, name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            suite,
            name: name.into(),
            cases: 0,
            max_error: 0.0,
            tolerance,
        }
    }

    fn record(&mut self, err: f64) {
        self.cases += 1;
        if err.is_nan() || err > self.max_error {
            self.max_error = err;
        }
    }

    fn finish(self) -> Check {
        Check {
            suite: self.suite,
            name: self.name,
            cases: self.cases,
            passed: self.cases > 0 && self.max_error <= self.tolerance,
            max_error: self.max_error,
            tolerance: self.tolerance,
        }
    }
}

/// Relative difference; two near-zero doubles count as equal only when the
/// double-double recomputation confirms both vanish.
fn relative(x: C, y: C, high: impl FnOnce() -> (C, C)) -> f64 {
    if x.norm() <= 1e-12 && y.norm() <= 1e-12 {
        let (a, b) = high();
        return if a.norm() <= 1e-25 && b.norm() <= 1e-25 {
            0.0
        } else {
            1.0
        };
    }
    (x - y).norm() / x.norm().max(y.norm())
}

fn relations(opts: &Options) -> Vec<Check> {
    let tol = 1e-9;
    let mut t: Vec<Tally> = [
        "ΔD⁻¹ = ω⁻³",
        "D² = Σ dim²",
        "R(Ξ)⁴ = 1",
        "(R(Ξ)R(Θ))³ = R(Ξ)²",
        "R(Ξ)² = charge conjugation",
        "S symmetric",
        "T diagonal and unitary",
    ]
    .into_iter()
    .map(|n| Tally::new("relations", n, tol))
    .collect();
    for (rs, levels) in &opts.targets {
        for &r in levels {
            let m = ModularData::<f64>::new(rs.clone(), r).expect("validated level");
            let d = m.rank();
            t[0].record((m.delta() / d - m.omega().powi(-3)).norm());
            let sum: f64 = m.qdims().iter().map(|x| x * x).sum();
            t[1].record((d * d - sum).abs() / (d * d));
            let xi = gen_xi(&m);
            let xi2 = xi.matmul(&xi);
            t[2].record(xi2.matmul(&xi2).max_abs_diff(&IndexedMatrix::identity(m.index_arc())));
            let xt = xi.matmul(&gen_theta(&m));
            t[3].record(xt.matmul(&xt).matmul(&xt).max_abs_diff(&xi2));
            let n = m.len();
            let conj = (0..n * n)
                .map(|k| {
                    if m.dual_index(k / n) == k % n {
                        C::new(1.0, 0.0)
                    } else {
                        C::new(0.0, 0.0)
                    }
                })
                .collect();
            t[4].record(xi2.max_abs_diff(&IndexedMatrix::from_data(m.index_arc(), conj)));
            let s = m.s_matrix();
            t[5].record(s.max_abs_diff(&s.transpose()));
            let tm = m.t_matrix();
            let unit = (0..n).map(|i| (tm.get(i, i).norm() - 1.0).abs()).fold(0.0, f64::max);
            t[6].record(if tm.is_diagonal(1e-15) { unit } else { 1.0 });
        }
    }
    t.into_iter().map(Tally::finish).collect()
}

fn reciprocity(opts: &Options) -> Vec<Check> {
    let lattices: [&[&[i64]]; 5] = [
        &[&[1]],
        &[&[1, 0], &[0, 1]],
        &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]],
        &[&[2]],
        &[&[2, -1], &[-1, 2]],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut t = Tally::new("reciprocity", "lhs = rhs on random scalar specs", 1e-9);
    let mut tries = 0;
    while t.cases < opts.trials && tries < 1000 * opts.trials.max(1) {
        tries += 1;
        let g = lattices[rng.gen_range(0..lattices.len())];
        let n = g.len();
        let r: i64 = rng.gen_range(1..=8);
        let c: i64 = rng.gen_range(-6..=6);
        if c == 0 {
            continue;
        }
        let psi: Vec<Rational> = (0..n).map(|_| Rational::new(rng.gen_range(0..r), r)).collect();
        let gram = g
            .iter()
            .map(|row| row.iter().map(|&x| Rational::from_integer(x)).collect())
            .collect();
        let b = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Rational::from_integer(if i == j { c } else { 0 }))
                    .collect()
            })
            .collect();
        if let Ok(s) = GaussSumSpec::new(gram, r, b, psi) {
            let high = || (to_c64(s.lhs::<DoubleDouble>()), to_c64(s.rhs::<DoubleDouble>()));
            t.record(relative(s.lhs::<f64>(), s.rhs::<f64>(), high));
        }
    }
    vec![t.finish()]
}

const ORACLE_MANIFOLDS: [&str; 5] = [
    "o;0|-1",
    "o;0|0",
    "o;0|-1;(2,1),(3,1),(5,1)",
    "o;1|-2;(3,2)",
    "n;2|0;(2,1),(3,1)",
];

fn oracle(opts: &Options) -> Vec<Check> {
    let mut dual = Tally::new("oracle", "closed form = matrix form", 1e-8);
    let mut lens = Tally::new("oracle", "lens routes agree", 1e-8);
    let mut mans: Vec<SeifertPresentation> = ORACLE_MANIFOLDS.iter().map(|s| s.parse().unwrap()).collect();
    for (p, q) in [(3, 1), (5, 2), (7, 3)] {
        mans.push(SeifertPresentation::lens(p, q).unwrap());
    }
    for (rs, levels) in &opts.targets {
        for &r in levels {
            let m = ModularData::<f64>::new(rs.clone(), r).expect("validated level");
            let high_md = || ModularData::<DoubleDouble>::new(rs.clone(), r).expect("validated level");
            for x in &mans {
                let u = tau_matrix_form(&m, x, None, CfStrategy::Ceiling).unwrap();
                let v = tau_closed_form(&m, x, None, DEFAULT_TERM_BUDGET).unwrap();
                dual.record(relative(u, v, || {
                    let h = high_md();
                    (
                        to_c64(tau_matrix_form(&h, x, None, CfStrategy::Ceiling).unwrap()),
                        to_c64(tau_closed_form(&h, x, None, DEFAULT_TERM_BUDGET).unwrap()),
                    )
                }));
            }
            for (p, q) in [(3, 1), (5, 2), (7, 3), (4, -1)] {
                let base = tau_lens(&m, p, q, LensMethod::ContinuedFraction).unwrap();
                for k in [LensMethod::Representation, LensMethod::LatticeSum] {
                    let other = tau_lens(&m, p, q, k).unwrap();
                    lens.record(relative(base, other, || {
                        let h = high_md();
                        (
                            to_c64(tau_lens(&h, p, q, LensMethod::ContinuedFraction).unwrap()),
                            to_c64(tau_lens(&h, p, q, k).unwrap()),
                        )
                    }));
                }
            }
        }
    }
    vec![dual.finish(), lens.finish()]
}

fn asymptotics() -> Vec<Check> {
    let rs = Arc::new(RootSystem::from_name("A1").unwrap());
    let levels: Vec<i64> = (20..=200).collect();
    let mut out = Vec::new();
    for (p, q) in [(3, 1), (5, 2)] {
        let exp = lens_expansion::<DoubleDouble>(&rs, p, q, 2).expect("p ≠ 0");
        let mut exact = Tally::new("asymptotics", format!("L({p},{q}) regrouped sum = τ_r"), 1e-10);
        for &r in levels.iter().step_by(10) {
            let m = ModularData::<DoubleDouble>::new(rs.clone(), r).unwrap();
            let t = tau_lens(&m, p, q, LensMethod::LatticeSum).unwrap();
            exact.record(to_c64(exp.evaluate_exact(r) - t).norm());
        }
        out.push(exact.finish());
        for n in 0..=2 {
            let bound = -0.5 - n as f64 - 0.7;
            let rep = residual_sweep(&rs, &exp, n, &levels).unwrap();
            let worst = rep.worst_slope.unwrap_or(f64::INFINITY);
            out.push(Check {
                suite: "asymptotics",
                name: format!("L({p},{q}) order {n} residual slope ≤ {bound}"),
                cases: rep.per_class.len(),
                max_error: worst,
                tolerance: bound,
                passed: worst <= bound,
            });
        }
    }
    out
}

pub fn run(suite: Suite, opts: &Options) -> Report {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Relations | Suite::All) {
        checks.extend(relations(opts));
    }
    if matches!(suite, Suite::Reciprocity | Suite::All) {
        checks.extend(reciprocity(opts));
    }
    if matches!(suite, Suite::Oracle | Suite::All) {
        checks.extend(oracle(opts));
    }
    if matches!(suite, Suite::Asymptotics | Suite::All) {
        checks.extend(asymptotics());
    }
    Report {
        suite,
        seed: opts.seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

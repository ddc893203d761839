//! Poisson structures on `R^n`, their Hamiltonian derivations, and the
//! prolonged A-bracket on the lifted class, with the sampled identity
//! suites (skew-symmetry, Leibniz, Jacobi, commutator, compatibility).

use std::sync::Arc;

use rand::Rng;

use crate::algebra::{WeilAlgebra, WeilElement};
use crate::expr::Expr;
use crate::lift::{extend_derivation, LiftedFunction, VectorFieldA, VectorFieldBase};
use crate::report::CheckReport;
use crate::sample::{random_lifted, random_near_point, random_polynomial, rng_from_seed};
use crate::Error;

/// A bivector `pi^{ij}` of expressions with `pi^{ij} = -pi^{ji}`; only the
/// upper triangle is stored.
#[derive(Debug, Clone)]
pub struct PoissonStructure {
    pub dim: usize,
    /// `upper[i][j - i - 1] = pi^{i+1, j+1}` for `i < j` (0-based rows).
    upper: Vec<Vec<Expr>>,
    /// Sampled base Jacobi verdict; a failing structure is representable
    /// (warning, not error) so negative tests can exercise the suites.
    pub jacobi_ok: bool,
}

impl PoissonStructure {
    /// Build from the upper triangle, row by row: `upper[i]` holds
    /// `pi^{i+1, j+1}` for `j = i+1 .. n`. The base Jacobi identity is
    /// checked by sampling and recorded in `jacobi_ok`.
    pub fn new(dim: usize, upper: Vec<Vec<Expr>>) -> Result<PoissonStructure, Error> {
        if upper.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: upper.len(),
            });
        }
        for (i, row) in upper.iter().enumerate() {
            if row.len() != dim - i - 1 {
                return Err(Error::DimensionMismatch {
                    expected: dim - i - 1,
                    got: row.len(),
                });
            }
        }
        let mut p = PoissonStructure {
            dim,
            upper,
            jacobi_ok: true,
        };
        p.jacobi_ok = p.base_jacobi_defect(20, 0xBA5E).map_or(false, |d| d <= 1e-6);
        Ok(p)
    }

    /// Canonical structure on `R^{2k}` in adjacent Darboux pairs:
    /// `{x_{2i+1}, x_{2i+2}} = 1`.
    pub fn canonical(pairs: usize) -> PoissonStructure {
        let dim = 2 * pairs;
        let mut upper = vec![Vec::new(); dim];
        for i in 0..dim {
            for j in i + 1..dim {
                upper[i].push(if j == i + 1 && i % 2 == 0 {
                    Expr::Const(1.0)
                } else {
                    Expr::Const(0.0)
                });
            }
        }
        PoissonStructure::new(dim, upper).unwrap()
    }

    /// The `so(3)^*` Lie-Poisson structure on `R^3`:
    /// `{x1,x2} = x3`, `{x2,x3} = x1`, `{x3,x1} = x2`.
    pub fn so3() -> PoissonStructure {
        PoissonStructure::new(
            3,
            vec![
                vec![Expr::Var(3), Expr::neg(Expr::Var(2))],
                vec![Expr::Var(1)],
                vec![],
            ],
        )
        .unwrap()
    }

    /// `pi^{ij}` with the sign resolved, 1-based indices.
    pub fn entry(&self, i: usize, j: usize) -> Expr {
        if i == j {
            Expr::Const(0.0)
        } else if i < j {
            self.upper[i - 1][j - i - 1].clone()
        } else {
            Expr::neg(self.upper[j - 1][i - j - 1].clone())
        }
    }

    /// `{f, g} = sum_{i,j} pi^{ij} d_i f d_j g` as an expression.
    pub fn bracket_base(&self, f: &Expr, g: &Expr) -> Expr {
        let mut acc = Expr::Const(0.0);
        for i in 1..=self.dim {
            let fi = f.partial(i);
            if fi == Expr::Const(0.0) {
                continue;
            }
            for j in 1..=self.dim {
                if i == j {
                    continue;
                }
                acc = Expr::add(
                    acc,
                    Expr::mul(self.entry(i, j), Expr::mul(fi.clone(), g.partial(j))),
                );
            }
        }
        acc
    }

    /// The Hamiltonian derivation `ad(f): g -> {f, g}` as a base field with
    /// components `ad(f)^j = sum_i pi^{ij} d_i f`.
    pub fn hamiltonian_derivation(&self, f: &Expr) -> VectorFieldBase {
        let components = (1..=self.dim)
            .map(|j| {
                let mut acc = Expr::Const(0.0);
                for i in 1..=self.dim {
                    if i == j {
                        continue;
                    }
                    acc = Expr::add(acc, Expr::mul(self.entry(i, j), f.partial(i)));
                }
                acc
            })
            .collect();
        VectorFieldBase::new(components)
    }

    /// Max sampled defect of the base Jacobi identity
    /// `sum_l pi^{il} d_l pi^{jk} + cyclic = 0` over coordinate triples.
    pub fn base_jacobi_defect(&self, samples: usize, seed: u64) -> Result<f64, Error> {
        let n = self.dim;
        let mut rng = rng_from_seed(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for i in 1..=n {
                for j in i + 1..=n {
                    for k in j + 1..=n {
                        let mut total = 0.0;
                        for l in 1..=n {
                            total += self.entry(i, l).eval_real(&x)?
                                * self.entry(j, k).partial(l).eval_real(&x)?;
                            total += self.entry(j, l).eval_real(&x)?
                                * self.entry(k, i).partial(l).eval_real(&x)?;
                            total += self.entry(k, l).eval_real(&x)?
                                * self.entry(i, j).partial(l).eval_real(&x)?;
                        }
                        worst = worst.max(total.abs());
                    }
                }
            }
        }
        Ok(worst)
    }

    /// The field `tau_phi` on `M^A`, assembled from its coordinate actions
    /// `tau_phi(x_j) = sum_t a_t ({g_t, x_j})^A`.
    pub fn tau(
        &self,
        algebra: &Arc<WeilAlgebra>,
        phi: &LiftedFunction,
    ) -> Result<VectorFieldA, Error> {
        if !algebra.same_as(&phi.algebra) {
            return Err(Error::AlgebraMismatch);
        }
        let n = self.dim;
        let components = (1..=n)
            .map(|j| {
                let terms = phi
                    .terms
                    .iter()
                    .map(|(a, g)| (a.clone(), self.bracket_base(g, &Expr::Var(j))))
                    .collect();
                LiftedFunction {
                    algebra: Arc::clone(algebra),
                    dim: n,
                    terms,
                }
            })
            .collect();
        VectorFieldA::new(algebra, components)
    }

    /// The A-bracket by the closed-form term rule:
    /// `{a f^A, b g^A}_A = (ab) ({f,g})^A`, extended A-bilinearly.
    pub fn a_bracket(
        &self,
        phi: &LiftedFunction,
        psi: &LiftedFunction,
    ) -> Result<LiftedFunction, Error> {
        if !phi.algebra.same_as(&psi.algebra) {
            return Err(Error::AlgebraMismatch);
        }
        let mut terms = Vec::with_capacity(phi.terms.len() * psi.terms.len());
        for (a, f) in &phi.terms {
            for (b, g) in &psi.terms {
                terms.push((a.mul(b)?, self.bracket_base(f, g)));
            }
        }
        Ok(LiftedFunction {
            algebra: Arc::clone(&phi.algebra),
            dim: phi.dim,
            terms,
        })
    }

    /// The independent route: `tau~_phi(psi)` via the derivation extension.
    pub fn a_bracket_via_tau(
        &self,
        algebra: &Arc<WeilAlgebra>,
        phi: &LiftedFunction,
        psi: &LiftedFunction,
    ) -> Result<LiftedFunction, Error> {
        extend_derivation(&self.tau(algebra, phi)?, psi)
    }
}

fn defect(e: Result<WeilElement, Error>) -> Result<f64, Error> {
    e.map(|v| v.max_abs())
}

/// Sampled skew-symmetry: `{phi,psi}_A + {psi,phi}_A = 0`.
pub fn check_skew(
    p: &PoissonStructure,
    algebra: &Arc<WeilAlgebra>,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<CheckReport, Error> {
    let mut rng = rng_from_seed(seed);
    let n = p.dim;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let phi = random_lifted(algebra, n, &mut rng);
        let psi = random_lifted(algebra, n, &mut rng);
        let xi = random_near_point(algebra, n, &mut rng);
        let sum = p.a_bracket(&phi, &psi)?.add(&p.a_bracket(&psi, &phi)?)?;
        worst = worst.max(defect(sum.eval(&xi))?);
    }
    Ok(CheckReport::new("skew", &algebra.spec.to_string(), n, samples, worst, tol))
}

/// Sampled Leibniz rule: `{phi, psi1 psi2}_A = {phi,psi1}_A psi2 + psi1 {phi,psi2}_A`.
pub fn check_leibniz(
    p: &PoissonStructure,
    algebra: &Arc<WeilAlgebra>,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<CheckReport, Error> {
    let mut rng = rng_from_seed(seed);
    let n = p.dim;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let phi = random_lifted(algebra, n, &mut rng);
        let psi1 = random_lifted(algebra, n, &mut rng);
        let psi2 = random_lifted(algebra, n, &mut rng);
        let xi = random_near_point(algebra, n, &mut rng);
        let lhs = p.a_bracket(&phi, &psi1.mul(&psi2)?)?;
        let rhs = p
            .a_bracket(&phi, &psi1)?
            .mul(&psi2)?
            .add(&psi1.mul(&p.a_bracket(&phi, &psi2)?)?)?;
        worst = worst.max(defect(lhs.sub(&rhs)?.eval(&xi))?);
    }
    Ok(CheckReport::new("leibniz", &algebra.spec.to_string(), n, samples, worst, tol))
}

/// Sampled Jacobi identity: `{phi,{psi,chi}_A}_A + cyclic = 0`.
pub fn check_jacobi(
    p: &PoissonStructure,
    algebra: &Arc<WeilAlgebra>,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<CheckReport, Error> {
    let mut rng = rng_from_seed(seed);
    let n = p.dim;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let phi = random_lifted(algebra, n, &mut rng);
        let psi = random_lifted(algebra, n, &mut rng);
        let chi = random_lifted(algebra, n, &mut rng);
        let xi = random_near_point(algebra, n, &mut rng);
        let total = p
            .a_bracket(&phi, &p.a_bracket(&psi, &chi)?)?
            .add(&p.a_bracket(&psi, &p.a_bracket(&chi, &phi)?)?)?
            .add(&p.a_bracket(&chi, &p.a_bracket(&phi, &psi)?)?)?;
        worst = worst.max(defect(total.eval(&xi))?);
    }
    Ok(CheckReport::new("jacobi", &algebra.spec.to_string(), n, samples, worst, tol))
}

/// Sampled commutator identity: `[tau~_phi, tau~_psi] = tau~_{{phi,psi}_A}`.
pub fn check_commutator(
    p: &PoissonStructure,
    algebra: &Arc<WeilAlgebra>,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<CheckReport, Error> {
    let mut rng = rng_from_seed(seed);
    let n = p.dim;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let phi = random_lifted(algebra, n, &mut rng);
        let psi = random_lifted(algebra, n, &mut rng);
        let chi = random_lifted(algebra, n, &mut rng);
        let xi = random_near_point(algebra, n, &mut rng);
        let lhs = p
            .a_bracket_via_tau(algebra, &phi, &p.a_bracket_via_tau(algebra, &psi, &chi)?)?
            .sub(&p.a_bracket_via_tau(algebra, &psi, &p.a_bracket_via_tau(algebra, &phi, &chi)?)?)?;
        let rhs = p.a_bracket_via_tau(algebra, &p.a_bracket(&phi, &psi)?, &chi)?;
        worst = worst.max(defect(lhs.sub(&rhs)?.eval(&xi))?);
    }
    Ok(CheckReport::new("commutator", &algebra.spec.to_string(), n, samples, worst, tol))
}

/// Sampled compatibility of prolongation: `{f^A, g^A}_A = ({f,g})^A`, with
/// the left side also cross-checked through the `tau~` route.
pub fn check_compat(
    p: &PoissonStructure,
    algebra: &Arc<WeilAlgebra>,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<CheckReport, Error> {
    let mut rng = rng_from_seed(seed);
    let n = p.dim;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let f = random_polynomial(n, 3, &mut rng);
        let g = random_polynomial(n, 3, &mut rng);
        let xi = random_near_point(algebra, n, &mut rng);
        let lf = LiftedFunction::lift(algebra, n, f.clone());
        let lg = LiftedFunction::lift(algebra, n, g.clone());
        let lifted_bracket = LiftedFunction::lift(algebra, n, p.bracket_base(&f, &g));
        let term_rule = p.a_bracket(&lf, &lg)?;
        let tau_rule = p.a_bracket_via_tau(algebra, &lf, &lg)?;
        worst = worst.max(defect(term_rule.sub(&lifted_bracket)?.eval(&xi))?);
        worst = worst.max(defect(tau_rule.sub(&lifted_bracket)?.eval(&xi))?);
    }
    Ok(CheckReport::new("compat", &algebra.spec.to_string(), n, samples, worst, tol))
}

//! Symplectic structures on `R^{2n}`, lifted Hamiltonian vector fields
//! through local-algebra linear solves, the `Omega^A`-bracket and its
//! agreement with the prolonged Poisson bracket, and the scalar-form
//! nondegeneracy criterion.

use std::sync::Arc;

use rand::Rng;

use crate::algebra::{
    invert_real_matrix, matrix_rank, solve_linear_local, LinearForm, WeilAlgebra, WeilElement,
};
use crate::expr::{Expr, NearPoint};
use crate::lift::{LiftedFunction, VectorFieldA, VectorFieldBase};
use crate::poisson::PoissonStructure;
use crate::report::CheckReport;
use crate::sample::{random_lifted, random_near_point, random_polynomial, rng_from_seed};
use crate::Error;

/// A skew nondegenerate 2-form `Omega_{ij}` of expressions on `R^{2n}`;
/// only the upper triangle is stored.
#[derive(Debug, Clone)]
pub struct SymplecticStructure {
    pub dim: usize,
    upper: Vec<Vec<Expr>>,
    /// Sampled verdict of `d Omega = 0` at construction.
    pub closed: bool,
}

impl SymplecticStructure {
    pub fn new(dim: usize, upper: Vec<Vec<Expr>>) -> Result<SymplecticStructure, Error> {
        if dim % 2 != 0 {
            return Err(Error::DimensionMismatch { expected: dim + 1, got: dim });
        }
        if upper.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: upper.len() });
        }
        for (i, row) in upper.iter().enumerate() {
            if row.len() != dim - i - 1 {
                return Err(Error::DimensionMismatch {
                    expected: dim - i - 1,
                    got: row.len(),
                });
            }
        }
        let mut s = SymplecticStructure {
            dim,
            upper,
            closed: true,
        };
        s.closed = s.closedness_defect(20, 0xC105ED).map_or(false, |d| d <= 1e-8);
        Ok(s)
    }

    /// Darboux shape on `R^{2k}` in adjacent pairs:
    /// `Omega = dx1 ^ dx2 + dx3 ^ dx4 + ...`.
    pub fn canonical(pairs: usize) -> SymplecticStructure {
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
        SymplecticStructure::new(dim, upper).unwrap()
    }

    /// `Omega_{ij}` with the sign resolved, 1-based indices.
    pub fn entry(&self, i: usize, j: usize) -> Expr {
        if i == j {
            Expr::Const(0.0)
        } else if i < j {
            self.upper[i - 1][j - i - 1].clone()
        } else {
            Expr::neg(self.upper[j - 1][i - j - 1].clone())
        }
    }

    /// Rescale the whole form by a nonzero constant.
    pub fn scaled(&self, c: f64) -> SymplecticStructure {
        let upper = self
            .upper
            .iter()
            .map(|row| row.iter().map(|e| Expr::mul(Expr::Const(c), e.clone())).collect())
            .collect();
        SymplecticStructure::new(self.dim, upper).unwrap()
    }

    /// Max sampled defect of `d_i Omega_{jk} + d_j Omega_{ki} + d_k Omega_{ij}`.
    pub fn closedness_defect(&self, samples: usize, seed: u64) -> Result<f64, Error> {
        let n = self.dim;
        let mut rng = rng_from_seed(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for i in 1..=n {
                for j in i + 1..=n {
                    for k in j + 1..=n {
                        let total = self.entry(j, k).partial(i).eval_real(&x)?
                            + self.entry(k, i).partial(j).eval_real(&x)?
                            + self.entry(i, j).partial(k).eval_real(&x)?;
                        worst = worst.max(total.abs());
                    }
                }
            }
        }
        Ok(worst)
    }

    /// The matrix evaluated at a real point, full skew layout.
    pub fn matrix_at(&self, x: &[f64]) -> Result<Vec<Vec<f64>>, Error> {
        let n = self.dim;
        let mut m = vec![vec![0.0; n]; n];
        for i in 1..=n {
            for j in 1..=n {
                m[i - 1][j - 1] = self.entry(i, j).eval_real(x)?;
            }
        }
        Ok(m)
    }

    /// Constant coefficient matrix, when every entry is a literal constant.
    pub fn constant_matrix(&self) -> Option<Vec<Vec<f64>>> {
        let n = self.dim;
        let mut m = vec![vec![0.0; n]; n];
        for i in 1..=n {
            for j in 1..=n {
                match self.entry(i, j) {
                    Expr::Const(c) => m[i - 1][j - 1] = c,
                    Expr::Neg(inner) => match *inner {
                        Expr::Const(c) => m[i - 1][j - 1] = -c,
                        _ => return None,
                    },
                    _ => return None,
                }
            }
        }
        Some(m)
    }

    /// Nondegeneracy witnessed by sampling: the evaluated matrix is
    /// invertible at `samples` random points. Never a proof.
    pub fn nondegenerate_witness(&self, samples: usize, seed: u64) -> Result<bool, Error> {
        let mut rng = rng_from_seed(seed);
        for _ in 0..samples {
            let x: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if invert_real_matrix(&self.matrix_at(&x)?).is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The Poisson structure with bivector `pi = Omega^{-1}`, symbolic for
    /// constant coefficients. This is the structure whose brackets the
    /// `Omega^A` side must reproduce.
    pub fn induced_poisson(&self) -> Result<PoissonStructure, Error> {
        let m = self.constant_matrix().ok_or(Error::NonConstantCoefficients)?;
        let inv = invert_real_matrix(&m).ok_or(Error::DegenerateAt)?;
        let n = self.dim;
        let upper = (0..n)
            .map(|i| (i + 1..n).map(|j| Expr::Const(inv[i][j])).collect())
            .collect();
        PoissonStructure::new(n, upper)
    }

    /// Pointwise bivector `Omega(x)^{-1}` with a condition guard.
    pub fn induced_bivector_at(&self, x: &[f64]) -> Result<Vec<Vec<f64>>, Error> {
        let m = self.matrix_at(x)?;
        let inv = invert_real_matrix(&m).ok_or(Error::DegenerateAt)?;
        let norm = |a: &[Vec<f64>]| {
            a.iter()
                .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0f64, f64::max)
        };
        if norm(&m) * norm(&inv) > 1e12 {
            return Err(Error::DegenerateAt);
        }
        Ok(inv)
    }

    /// The base Hamiltonian field `X_f` with `(i_{X_f} Omega)_j = d_j f`,
    /// i.e. `sum_i X^i Omega_{ij} = d_j f`; symbolic, constant
    /// coefficients only.
    pub fn hamiltonian_field_base(&self, f: &Expr) -> Result<VectorFieldBase, Error> {
        let m = self.constant_matrix().ok_or(Error::NonConstantCoefficients)?;
        let inv = invert_real_matrix(&m).ok_or(Error::DegenerateAt)?;
        let n = self.dim;
        // X = (Omega^T)^{-1} grad f = (Omega^{-1})^T grad f
        let components = (0..n)
            .map(|i| {
                let mut acc = Expr::Const(0.0);
                for j in 0..n {
                    acc = Expr::add(acc, Expr::mul(Expr::Const(inv[j][i]), f.partial(j + 1)));
                }
                acc
            })
            .collect();
        Ok(VectorFieldBase::new(components))
    }

    /// Pointwise numeric base Hamiltonian field for non-constant forms.
    pub fn hamiltonian_field_base_at(&self, f: &Expr, x: &[f64]) -> Result<Vec<f64>, Error> {
        let inv = self.induced_bivector_at(x)?;
        let n = self.dim;
        let grad: Vec<f64> = (1..=n).map(|j| f.partial(j).eval_real(x)).collect::<Result<_, _>>()?;
        Ok((0..n)
            .map(|i| (0..n).map(|j| inv[j][i] * grad[j]).sum())
            .collect())
    }

    /// The lifted matrix `Omega^A(xi)` with entries in the algebra.
    pub fn lifted_matrix_at(
        &self,
        algebra: &Arc<WeilAlgebra>,
        xi: &NearPoint,
    ) -> Result<Vec<Vec<WeilElement>>, Error> {
        let n = self.dim;
        let mut m = Vec::with_capacity(n);
        for i in 1..=n {
            let mut row = Vec::with_capacity(n);
            for j in 1..=n {
                let _ = algebra;
                row.push(self.entry(i, j).eval_weil(xi)?);
            }
            m.push(row);
        }
        Ok(m)
    }
}

/// The Hamiltonian field of a lifted-class function, defined by
/// `i_{X_phi} Omega^A = d^A phi` and realized by per-point solves of
/// `Omega^A(xi)^T X(xi) = (d^A phi)(xi)` over the algebra.
pub struct LiftedHamiltonianField {
    pub structure: SymplecticStructure,
    pub algebra: Arc<WeilAlgebra>,
    pub phi: LiftedFunction,
}

impl LiftedHamiltonianField {
    pub fn new(
        structure: &SymplecticStructure,
        algebra: &Arc<WeilAlgebra>,
        phi: &LiftedFunction,
    ) -> LiftedHamiltonianField {
        LiftedHamiltonianField {
            structure: structure.clone(),
            algebra: Arc::clone(algebra),
            phi: phi.clone(),
        }
    }

    /// Coefficients of `d^A phi` at a near point.
    fn gradient_at(&self, xi: &NearPoint) -> Result<Vec<WeilElement>, Error> {
        (1..=self.structure.dim)
            .map(|j| self.phi.partial(j).eval(xi))
            .collect()
    }

    /// Component values at a near point through the local solver.
    pub fn components_at(&self, xi: &NearPoint) -> Result<Vec<WeilElement>, Error> {
        let omega = self.structure.lifted_matrix_at(&self.algebra, xi)?;
        let n = self.structure.dim;
        // transpose: the contraction convention puts X in the first slot
        let mut mt = vec![Vec::with_capacity(n); n];
        for (_i, row) in omega.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                mt[j].push(e.clone());
            }
        }
        let b = self.gradient_at(xi)?;
        solve_linear_local(&mt, &b).map_err(|e| match e {
            Error::SingularAugmentation => Error::DegenerateAt,
            other => other,
        })
    }

    /// Symbolic fast path for constant-coefficient forms: components as
    /// lifted-class functions.
    pub fn as_vector_field(&self) -> Result<VectorFieldA, Error> {
        let m = self
            .structure
            .constant_matrix()
            .ok_or(Error::NonConstantCoefficients)?;
        let inv = invert_real_matrix(&m).ok_or(Error::DegenerateAt)?;
        let n = self.structure.dim;
        let components = (0..n)
            .map(|i| {
                let mut acc = LiftedFunction::zero(&self.algebra, n);
                for j in 0..n {
                    acc = acc.add(&self.phi.partial(j + 1).scale(inv[j][i]))?;
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>, Error>>()?;
        VectorFieldA::new(&self.algebra, components)
    }

    /// Derivation action at a point: `X~_phi(psi)(xi)`.
    pub fn apply_at(&self, psi: &LiftedFunction, xi: &NearPoint) -> Result<WeilElement, Error> {
        let comps = self.components_at(xi)?;
        let mut acc = self.algebra.zero();
        for (b, g) in &psi.terms {
            let mut inner = self.algebra.zero();
            for (j, x) in comps.iter().enumerate() {
                inner = inner.add(&x.mul(&g.partial(j + 1).eval_weil(xi)?)?)?;
            }
            acc = acc.add(&b.mul(&inner)?)?;
        }
        Ok(acc)
    }
}

/// `{phi, psi}_{Omega^A}` at a near point by the primary route
/// `-Omega^A(X_phi, X_psi)`.
pub fn bracket_omega_at(
    s: &SymplecticStructure,
    algebra: &Arc<WeilAlgebra>,
    phi: &LiftedFunction,
    psi: &LiftedFunction,
    xi: &NearPoint,
) -> Result<WeilElement, Error> {
    let xphi = LiftedHamiltonianField::new(s, algebra, phi).components_at(xi)?;
    let xpsi = LiftedHamiltonianField::new(s, algebra, psi).components_at(xi)?;
    let omega = s.lifted_matrix_at(algebra, xi)?;
    let n = s.dim;
    let mut acc = algebra.zero();
    for i in 0..n {
        for j in 0..n {
            acc = acc.add(&xphi[i].mul(&omega[i][j])?.mul(&xpsi[j])?)?;
        }
    }
    Ok(acc.neg())
}

/// The alternate route `X~_phi(psi)` at a near point; must agree with
/// [`bracket_omega_at`].
pub fn bracket_omega_tilde_at(
    s: &SymplecticStructure,
    algebra: &Arc<WeilAlgebra>,
    phi: &LiftedFunction,
    psi: &LiftedFunction,
    xi: &NearPoint,
) -> Result<WeilElement, Error> {
    LiftedHamiltonianField::new(s, algebra, phi).apply_at(psi, xi)
}

/// Sampled check of `X_{f^A} = (X_f)^A` for random base functions.
pub fn check_hamiltonian_lift(
    s: &SymplecticStructure,
    algebra: &Arc<WeilAlgebra>,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<CheckReport, Error> {
    let mut rng = rng_from_seed(seed);
    let n = s.dim;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let f = random_polynomial(n, 3, &mut rng);
        let xi = random_near_point(algebra, n, &mut rng);
        let lifted = LiftedHamiltonianField::new(
            s,
            algebra,
            &LiftedFunction::lift(algebra, n, f.clone()),
        )
        .components_at(&xi)?;
        let base = s.hamiltonian_field_base(&f)?;
        for (i, got) in lifted.iter().enumerate() {
            let want = base.components[i].eval_weil(&xi)?;
            worst = worst.max(got.sub(&want)?.max_abs());
        }
    }
    Ok(CheckReport::new("hamlift", &algebra.spec.to_string(), n, samples, worst, tol))
}

/// Sampled coincidence of the two A-Poisson structures: the
/// `Omega^A`-bracket against the prolonged bracket of the induced Poisson
/// structure, with the two `Omega^A` routes also compared to each other.
pub fn check_coincidence(
    s: &SymplecticStructure,
    algebra: &Arc<WeilAlgebra>,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<CheckReport, Error> {
    let mut rng = rng_from_seed(seed);
    let n = s.dim;
    let induced = s.induced_poisson()?;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let phi = random_lifted(algebra, n, &mut rng);
        let psi = random_lifted(algebra, n, &mut rng);
        let xi = random_near_point(algebra, n, &mut rng);
        let omega_route = bracket_omega_at(s, algebra, &phi, &psi, &xi)?;
        let tilde_route = bracket_omega_tilde_at(s, algebra, &phi, &psi, &xi)?;
        let poisson_route = induced.a_bracket(&phi, &psi)?.eval(&xi)?;
        worst = worst.max(omega_route.sub(&poisson_route)?.max_abs());
        worst = worst.max(omega_route.sub(&tilde_route)?.max_abs());
    }
    Ok(CheckReport::new("coincide", &algebra.spec.to_string(), n, samples, worst, tol))
}

/// Verdict of the scalar-form test with the evidence from both routes.
#[derive(Debug, Clone)]
pub struct ScalarFormVerdict {
    /// Route (a): `dim ann(m) = 1` and `psi[ann(m)] != 0`.
    pub predicate_symplectic: bool,
    /// Route (b): the assembled real bilinear form has full rank at every
    /// sampled near point.
    pub rank_symplectic: bool,
    pub ann_dim: usize,
    pub full_rank: usize,
    pub observed_min_rank: usize,
}

impl ScalarFormVerdict {
    pub fn agree(&self) -> bool {
        self.predicate_symplectic == self.rank_symplectic
    }
}

/// Decide whether `psi ∘ Omega^A` is symplectic, by two independent
/// computations that must agree: the annihilator predicate and the rank of
/// the real `2n·r` bilinear form at sampled near points.
pub fn scalar_form_test(
    s: &SymplecticStructure,
    algebra: &Arc<WeilAlgebra>,
    psi: &LinearForm,
    point_samples: usize,
    seed: u64,
) -> Result<ScalarFormVerdict, Error> {
    let ann = algebra.annihilator_of_m();
    let ann_nonzero = ann
        .iter()
        .map(|a| psi.eval(a))
        .collect::<Result<Vec<f64>, Error>>()?
        .iter()
        .any(|v| v.abs() > 1e-9);
    let predicate = ann.len() == 1 && ann_nonzero;

    let n = s.dim;
    let r = algebra.dim;
    let full = n * r;
    let mut rng = rng_from_seed(seed);
    let mut min_rank = full;
    for _ in 0..point_samples {
        let xi = random_near_point(algebra, n, &mut rng);
        let omega = s.lifted_matrix_at(algebra, &xi)?;
        // B[(i,alpha),(j,beta)] = psi(Omega_ij(xi) * e_alpha * e_beta)
        let mut b = vec![vec![0.0; full]; full];
        for i in 0..n {
            for j in 0..n {
                for alpha in 0..r {
                    for beta in 0..r {
                        let prod = omega[i][j]
                            .mul(&algebra.basis_element(alpha))?
                            .mul(&algebra.basis_element(beta))?;
                        b[i * r + alpha][j * r + beta] = psi.eval(&prod)?;
                    }
                }
            }
        }
        min_rank = min_rank.min(matrix_rank(&b, 1e-9));
    }

    Ok(ScalarFormVerdict {
        predicate_symplectic: predicate,
        rank_symplectic: min_rank == full,
        ann_dim: ann.len(),
        full_rank: full,
        observed_min_rank: min_rank,
    })
}

//! Prolongation machinery: the computational subclass of `C^inf(M^A, A)`
//! (finite sums `sum a · f^A`), lifted vector fields and A-valued forms,
//! the unique A-linear derivation extension, the cohomology operator `d^A`,
//! and interior products.

use std::sync::Arc;

use crate::algebra::{WeilAlgebra, WeilElement};
use crate::expr::{Expr, NearPoint};
use crate::Error;

/// An element of the computational class: `phi = sum_t a_t · f_t^A` with
/// `a_t` in the algebra and `f_t` an expression on `R^n`.
///
/// Term lists stay unnormalized; equality is by sampled evaluation.
#[derive(Debug, Clone)]
pub struct LiftedFunction {
    pub algebra: Arc<WeilAlgebra>,
    pub dim: usize,
    pub terms: Vec<(WeilElement, Expr)>,
}

impl LiftedFunction {
    /// The lift `f^A` as a single unit-coefficient term.
    pub fn lift(algebra: &Arc<WeilAlgebra>, dim: usize, f: Expr) -> LiftedFunction {
        LiftedFunction {
            algebra: Arc::clone(algebra),
            dim,
            terms: vec![(algebra.unit(), f)],
        }
    }

    pub fn zero(algebra: &Arc<WeilAlgebra>, dim: usize) -> LiftedFunction {
        LiftedFunction {
            algebra: Arc::clone(algebra),
            dim,
            terms: Vec::new(),
        }
    }

    /// A constant: `a · 1^A`.
    pub fn constant(algebra: &Arc<WeilAlgebra>, dim: usize, a: WeilElement) -> LiftedFunction {
        LiftedFunction {
            algebra: Arc::clone(algebra),
            dim,
            terms: vec![(a, Expr::Const(1.0))],
        }
    }

    pub fn eval(&self, xi: &NearPoint) -> Result<WeilElement, Error> {
        if !self.algebra.same_as(&xi.algebra) {
            return Err(Error::AlgebraMismatch);
        }
        let mut acc = self.algebra.zero();
        for (a, f) in &self.terms {
            acc = acc.add(&a.mul(&f.eval_weil(xi)?)?)?;
        }
        Ok(acc)
    }

    pub fn add(&self, other: &LiftedFunction) -> Result<LiftedFunction, Error> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(LiftedFunction {
            algebra: Arc::clone(&self.algebra),
            dim: self.dim,
            terms,
        })
    }

    pub fn sub(&self, other: &LiftedFunction) -> Result<LiftedFunction, Error> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LiftedFunction {
        self.scale(-1.0)
    }

    pub fn scale(&self, c: f64) -> LiftedFunction {
        LiftedFunction {
            algebra: Arc::clone(&self.algebra),
            dim: self.dim,
            terms: self.terms.iter().map(|(a, f)| (a.scale(c), f.clone())).collect(),
        }
    }

    /// A-scalar multiplication, exact at term level.
    pub fn scale_a(&self, a: &WeilElement) -> Result<LiftedFunction, Error> {
        let terms = self
            .terms
            .iter()
            .map(|(b, f)| Ok((a.mul(b)?, f.clone())))
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(LiftedFunction {
            algebra: Arc::clone(&self.algebra),
            dim: self.dim,
            terms,
        })
    }

    /// Pointwise product: `(sum a f^A)(sum b g^A) = sum (ab)(fg)^A`.
    pub fn mul(&self, other: &LiftedFunction) -> Result<LiftedFunction, Error> {
        self.check(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, f) in &self.terms {
            for (b, g) in &other.terms {
                terms.push((a.mul(b)?, Expr::mul(f.clone(), g.clone())));
            }
        }
        Ok(LiftedFunction {
            algebra: Arc::clone(&self.algebra),
            dim: self.dim,
            terms,
        })
    }

    /// Termwise formal partial: `sum a (d_i f)^A`.
    pub fn partial(&self, i: usize) -> LiftedFunction {
        LiftedFunction {
            algebra: Arc::clone(&self.algebra),
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(a, f)| (a.clone(), f.partial(i)))
                .collect(),
        }
    }

    fn check(&self, other: &LiftedFunction) -> Result<(), Error> {
        if !self.algebra.same_as(&other.algebra) {
            return Err(Error::AlgebraMismatch);
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}

/// Real-scalar view of one algebra component of a lifted function:
/// `xi -> a_alpha^*(phi(xi))`.
pub struct ComponentView {
    func: LiftedFunction,
    alpha: usize,
}

impl ComponentView {
    pub fn eval(&self, xi: &NearPoint) -> Result<f64, Error> {
        Ok(self.func.eval(xi)?.coeffs[self.alpha])
    }
}

/// Extract the `alpha`-th dual-basis component of a lifted function.
pub fn component_extract(phi: &LiftedFunction, alpha: usize) -> Result<ComponentView, Error> {
    if alpha >= phi.algebra.dim {
        return Err(Error::IndexOutOfRange {
            index: alpha,
            len: phi.algebra.dim,
        });
    }
    Ok(ComponentView {
        func: phi.clone(),
        alpha,
    })
}

/// A vector field on the base `R^n`: `theta = sum theta^i d/dx_i`.
#[derive(Debug, Clone)]
pub struct VectorFieldBase {
    pub components: Vec<Expr>,
}

impl VectorFieldBase {
    pub fn new(components: Vec<Expr>) -> VectorFieldBase {
        VectorFieldBase { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// Derivation action `theta(f) = sum theta^i d_i f`.
    pub fn apply(&self, f: &Expr) -> Expr {
        let mut acc = Expr::Const(0.0);
        for (i, c) in self.components.iter().enumerate() {
            acc = Expr::add(acc, Expr::mul(c.clone(), f.partial(i + 1)));
        }
        acc
    }

    /// Lie bracket of base fields, componentwise symbolic.
    pub fn bracket(&self, other: &VectorFieldBase) -> VectorFieldBase {
        let n = self.dim();
        let components = (0..n)
            .map(|i| {
                Expr::sub(
                    self.apply(&other.components[i]),
                    other.apply(&self.components[i]),
                )
            })
            .collect();
        VectorFieldBase { components }
    }
}

/// A vector field on `M^A` with components in the computational class,
/// acting on base functions by `X(f) = sum X^i (d_i f)^A`.
#[derive(Debug, Clone)]
pub struct VectorFieldA {
    pub algebra: Arc<WeilAlgebra>,
    pub dim: usize,
    pub components: Vec<LiftedFunction>,
}

impl VectorFieldA {
    pub fn new(
        algebra: &Arc<WeilAlgebra>,
        components: Vec<LiftedFunction>,
    ) -> Result<VectorFieldA, Error> {
        let dim = components.len();
        for c in &components {
            if !algebra.same_as(&c.algebra) {
                return Err(Error::AlgebraMismatch);
            }
        }
        Ok(VectorFieldA {
            algebra: Arc::clone(algebra),
            dim,
            components,
        })
    }

    pub fn apply(&self, f: &Expr) -> Result<LiftedFunction, Error> {
        let mut acc = LiftedFunction::zero(&self.algebra, self.dim);
        for (i, x) in self.components.iter().enumerate() {
            let lifted = LiftedFunction::lift(&self.algebra, self.dim, f.partial(i + 1));
            acc = acc.add(&x.mul(&lifted)?)?;
        }
        Ok(acc)
    }

    /// Component values at a near point.
    pub fn eval(&self, xi: &NearPoint) -> Result<Vec<WeilElement>, Error> {
        self.components.iter().map(|c| c.eval(xi)).collect()
    }

    pub fn add(&self, other: &VectorFieldA) -> Result<VectorFieldA, Error> {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>, _>>()?;
        VectorFieldA::new(&self.algebra, components)
    }

    pub fn neg(&self) -> VectorFieldA {
        VectorFieldA {
            algebra: Arc::clone(&self.algebra),
            dim: self.dim,
            components: self.components.iter().map(|c| c.neg()).collect(),
        }
    }

    /// Multiply by a lifted function (module structure).
    pub fn scale_fn(&self, phi: &LiftedFunction) -> Result<VectorFieldA, Error> {
        let components = self
            .components
            .iter()
            .map(|c| phi.mul(c))
            .collect::<Result<Vec<_>, _>>()?;
        VectorFieldA::new(&self.algebra, components)
    }
}

/// The prolongation `theta^A`: lift every component.
pub fn lift_vector_field(
    algebra: &Arc<WeilAlgebra>,
    theta: &VectorFieldBase,
) -> Result<VectorFieldA, Error> {
    let n = theta.dim();
    let components = theta
        .components
        .iter()
        .map(|c| LiftedFunction::lift(algebra, n, c.clone()))
        .collect();
    VectorFieldA::new(algebra, components)
}

/// The unique A-linear derivation extension applied on the class:
/// `X~(sum a f^A) = sum a · X(f)`.
pub fn extend_derivation(x: &VectorFieldA, phi: &LiftedFunction) -> Result<LiftedFunction, Error> {
    if !x.algebra.same_as(&phi.algebra) {
        return Err(Error::AlgebraMismatch);
    }
    if x.dim != phi.dim {
        return Err(Error::DimensionMismatch {
            expected: x.dim,
            got: phi.dim,
        });
    }
    let mut acc = LiftedFunction::zero(&x.algebra, x.dim);
    for (a, f) in &phi.terms {
        acc = acc.add(&x.apply(f)?.scale_a(a)?)?;
    }
    Ok(acc)
}

/// Bracket of fields via the derivation extension:
/// `[X,Y]^i = X~(Y^i) - Y~(X^i)`.
pub fn bracket_fields(x: &VectorFieldA, y: &VectorFieldA) -> Result<VectorFieldA, Error> {
    let components = (0..x.dim)
        .map(|i| extend_derivation(x, &y.components[i])?.sub(&extend_derivation(y, &x.components[i])?))
        .collect::<Result<Vec<_>, _>>()?;
    VectorFieldA::new(&x.algebra, components)
}

/// All strictly increasing `p`-subsets of `0..n` in lexicographic order.
pub fn increasing_indices(n: usize, p: usize) -> Vec<Vec<usize>> {
    if p == 0 {
        return vec![vec![]];
    }
    if p > n {
        return vec![];
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..p).collect();
    loop {
        out.push(idx.clone());
        // next combination
        let mut i = p;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - p {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..p {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// A differential A-form of degree `p` with coefficients in the
/// computational class, stored over strictly increasing multi-indices.
#[derive(Debug, Clone)]
pub struct FormA {
    pub algebra: Arc<WeilAlgebra>,
    pub dim: usize,
    pub degree: usize,
    /// Parallel to `increasing_indices(dim, degree)`.
    pub coeffs: Vec<LiftedFunction>,
}

impl FormA {
    pub fn new(
        algebra: &Arc<WeilAlgebra>,
        dim: usize,
        degree: usize,
        coeffs: Vec<LiftedFunction>,
    ) -> Result<FormA, Error> {
        let expected = increasing_indices(dim, degree).len();
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: coeffs.len(),
            });
        }
        Ok(FormA {
            algebra: Arc::clone(algebra),
            dim,
            degree,
            coeffs,
        })
    }

    /// Degree-0 form wrapping a lifted function.
    pub fn scalar(phi: LiftedFunction) -> FormA {
        FormA {
            algebra: Arc::clone(&phi.algebra),
            dim: phi.dim,
            degree: 0,
            coeffs: vec![phi],
        }
    }

    pub fn coefficient(&self, index: &[usize]) -> Option<&LiftedFunction> {
        increasing_indices(self.dim, self.degree)
            .iter()
            .position(|i| i == index)
            .map(|pos| &self.coeffs[pos])
    }

    /// The form applied to `p` fields, kept symbolic in the class:
    /// `eta(X_1..X_p) = sum_I eta_I det(X_k^{i_l})`.
    pub fn apply_symbolic(&self, fields: &[VectorFieldA]) -> Result<LiftedFunction, Error> {
        if fields.len() != self.degree {
            return Err(Error::DimensionMismatch {
                expected: self.degree,
                got: fields.len(),
            });
        }
        let mut acc = LiftedFunction::zero(&self.algebra, self.dim);
        let indices = increasing_indices(self.dim, self.degree);
        for (pos, idx) in indices.iter().enumerate() {
            let det = lifted_determinant(&self.algebra, self.dim, fields, idx)?;
            acc = acc.add(&self.coeffs[pos].mul(&det)?)?;
        }
        Ok(acc)
    }

    /// Evaluate on fields at a near point.
    pub fn apply_at(&self, fields: &[VectorFieldA], xi: &NearPoint) -> Result<WeilElement, Error> {
        self.apply_symbolic(fields)?.eval(xi)
    }

    pub fn add(&self, other: &FormA) -> Result<FormA, Error> {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>, _>>()?;
        FormA::new(&self.algebra, self.dim, self.degree, coeffs)
    }

    pub fn sub(&self, other: &FormA) -> Result<FormA, Error> {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>, _>>()?;
        FormA::new(&self.algebra, self.dim, self.degree, coeffs)
    }
}

/// `det(X_k^{i_l})` over lifted-function entries, by permutation expansion.
fn lifted_determinant(
    algebra: &Arc<WeilAlgebra>,
    dim: usize,
    fields: &[VectorFieldA],
    idx: &[usize],
) -> Result<LiftedFunction, Error> {
    let p = idx.len();
    if p == 0 {
        return Ok(LiftedFunction::constant(algebra, dim, algebra.unit()));
    }
    let mut acc = LiftedFunction::zero(algebra, dim);
    let mut perm: Vec<usize> = (0..p).collect();
    loop {
        let sign = permutation_sign(&perm);
        let mut prod = LiftedFunction::constant(algebra, dim, algebra.unit());
        for (k, &pk) in perm.iter().enumerate() {
            prod = prod.mul(&fields[k].components[idx[pk]])?;
        }
        acc = acc.add(&prod.scale(sign))?;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(acc)
}

fn permutation_sign(perm: &[usize]) -> f64 {
    let mut inv = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Lift a base `p`-form given by its coefficients over increasing indices
/// (parallel to `increasing_indices(dim, p)`).
pub fn lift_form(
    algebra: &Arc<WeilAlgebra>,
    dim: usize,
    degree: usize,
    coeffs: &[Expr],
) -> Result<FormA, Error> {
    let lifted = coeffs
        .iter()
        .map(|c| LiftedFunction::lift(algebra, dim, c.clone()))
        .collect();
    FormA::new(algebra, dim, degree, lifted)
}

/// The cohomology operator on the computational class, coefficientwise:
/// `(d^A eta)_K = sum_l (-1)^l d_{k_l} eta_{K minus k_l}` with the termwise
/// formal partial on lifted-function coefficients.
pub fn d_a(eta: &FormA) -> Result<FormA, Error> {
    let n = eta.dim;
    let p = eta.degree;
    let out_indices = increasing_indices(n, p + 1);
    let in_indices = increasing_indices(n, p);
    let mut coeffs = Vec::with_capacity(out_indices.len());
    for k_idx in &out_indices {
        let mut acc = LiftedFunction::zero(&eta.algebra, n);
        for (l, &kl) in k_idx.iter().enumerate() {
            let rest: Vec<usize> = k_idx
                .iter()
                .copied()
                .filter(|&x| x != kl)
                .collect();
            let pos = in_indices.iter().position(|i| *i == rest).unwrap();
            let term = eta.coeffs[pos].partial(kl + 1);
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            acc = acc.add(&term.scale(sign))?;
        }
        coeffs.push(acc);
    }
    FormA::new(&eta.algebra, n, p + 1, coeffs)
}

/// The alternating-sum (Palais) formula evaluated directly at a near point,
/// kept as an independent check against [`d_a`].
pub fn d_a_palais_oracle(
    eta: &FormA,
    fields: &[VectorFieldA],
    xi: &NearPoint,
) -> Result<WeilElement, Error> {
    let p = eta.degree;
    if fields.len() != p + 1 {
        return Err(Error::DimensionMismatch {
            expected: p + 1,
            got: fields.len(),
        });
    }
    let mut acc = eta.algebra.zero();
    for i in 0..=p {
        let rest: Vec<VectorFieldA> = fields
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, f)| f.clone())
            .collect();
        let inner = eta.apply_symbolic(&rest)?;
        let derived = extend_derivation(&fields[i], &inner)?;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc = acc.add(&derived.eval(xi)?.scale(sign))?;
    }
    for i in 0..=p {
        for j in i + 1..=p {
            let bracket = bracket_fields(&fields[i], &fields[j])?;
            let mut args = vec![bracket];
            for (k, f) in fields.iter().enumerate() {
                if k != i && k != j {
                    args.push(f.clone());
                }
            }
            let val = eta.apply_at(&args, xi)?;
            // (-1)^{i+j} with 1-based indices in the displayed formula
            let sign = if (i + j) % 2 == 0 { -1.0 } else { 1.0 };
            acc = acc.add(&val.scale(sign))?;
        }
    }
    Ok(acc)
}

/// Contraction in the first slot:
/// `(i_X eta)(Y_2..Y_p) = eta(X, Y_2, .., Y_p)`.
pub fn interior_product(x: &VectorFieldA, eta: &FormA) -> Result<FormA, Error> {
    if eta.degree == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    let n = eta.dim;
    let p = eta.degree;
    let out_indices = increasing_indices(n, p - 1);
    let in_indices = increasing_indices(n, p);
    let mut coeffs = Vec::with_capacity(out_indices.len());
    for j_idx in &out_indices {
        let mut acc = LiftedFunction::zero(&eta.algebra, n);
        for i in 0..n {
            if j_idx.contains(&i) {
                continue;
            }
            let mut full = j_idx.clone();
            let pos_in_sorted = full.iter().filter(|&&x| x < i).count();
            full.insert(pos_in_sorted, i);
            let pos = in_indices.iter().position(|k| *k == full).unwrap();
            let sign = if pos_in_sorted % 2 == 0 { 1.0 } else { -1.0 };
            acc = acc.add(&x.components[i].mul(&eta.coeffs[pos])?.scale(sign))?;
        }
        coeffs.push(acc);
    }
    FormA::new(&eta.algebra, n, p - 1, coeffs)
}

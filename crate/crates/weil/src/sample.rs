//! Seedable random inputs for the identity suites: low-degree polynomial
//! expressions, near points with coordinates in `[-1,1]`, and lifted-class
//! functions with 2-4 terms.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::algebra::{WeilAlgebra, WeilElement};
use crate::expr::{Expr, NearPoint};
use crate::lift::LiftedFunction;

/// The master PRNG for a suite run.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random polynomial in `n` variables of total degree at most `max_degree`,
/// as a sum of 1..=4 monomials with coefficients in `[-1,1]`.
pub fn random_polynomial<R: Rng>(n: usize, max_degree: u32, rng: &mut R) -> Expr {
    let monomials = rng.gen_range(1..=4);
    let mut acc = Expr::Const(0.0);
    for _ in 0..monomials {
        let mut term = Expr::Const(rng.gen_range(-1.0..1.0));
        let mut budget = max_degree;
        for i in 1..=n {
            if budget == 0 {
                break;
            }
            let d = rng.gen_range(0..=budget);
            budget -= d;
            if d > 0 {
                term = Expr::mul(term, Expr::pow(Expr::Var(i), d as i32));
            }
        }
        acc = Expr::add(acc, term);
    }
    acc
}

pub fn random_element<R: Rng>(algebra: &Arc<WeilAlgebra>, rng: &mut R) -> WeilElement {
    algebra
        .element((0..algebra.dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .unwrap()
}

/// A near point with base coordinates and nilpotent coefficients uniform in
/// `[-1,1]`.
pub fn random_near_point<R: Rng>(algebra: &Arc<WeilAlgebra>, n: usize, rng: &mut R) -> NearPoint {
    let coords = (0..n).map(|_| random_element(algebra, rng)).collect();
    NearPoint::new(algebra, coords).unwrap()
}

/// A random lifted-class function: 2-4 terms of random algebra coefficients
/// on random polynomials of degree at most 3.
pub fn random_lifted<R: Rng>(algebra: &Arc<WeilAlgebra>, n: usize, rng: &mut R) -> LiftedFunction {
    let terms = (0..rng.gen_range(2..=4))
        .map(|_| (random_element(algebra, rng), random_polynomial(n, 3, rng)))
        .collect();
    LiftedFunction {
        algebra: Arc::clone(algebra),
        dim: n,
        terms,
    }
}

//! Acceptance matrix: one test per criterion, each printing a single
//! summary line on success. Algebras: the dual numbers D, the order-3 jet
//! algebra, the first-order square quotient in two variables, and the
//! bi-dual tensor square. Structures: canonical symplectic on R^2 and
//! R^4, and the so(3)* Lie-Poisson structure on R^3.

use std::sync::Arc;

use rand::Rng;

use weil::algebra::{AlgebraSpec, LinearForm, WeilAlgebra};
use weil::expr::{parse, Expr, NearPoint};
use weil::lift::{
    d_a, d_a_palais_oracle, lift_form, lift_vector_field, LiftedFunction, VectorFieldBase,
};
use weil::poisson::{
    check_commutator, check_jacobi, check_leibniz, check_skew, PoissonStructure,
};
use weil::sample::{random_near_point, random_polynomial, rng_from_seed};
use weil::symplectic::{
    check_coincidence, check_hamiltonian_lift, scalar_form_test, SymplecticStructure,
};

fn matrix_algebras() -> Vec<Arc<WeilAlgebra>> {
    [
        AlgebraSpec::TruncatedPowers { orders: vec![2] },
        AlgebraSpec::TruncatedPowers { orders: vec![3] },
        AlgebraSpec::PowerIdeal { vars: 2, degree: 2 },
        AlgebraSpec::TruncatedPowers { orders: vec![2, 2] },
    ]
    .into_iter()
    .map(|s| WeilAlgebra::build(s).unwrap())
    .collect()
}

fn matrix_poisson() -> Vec<PoissonStructure> {
    vec![
        PoissonStructure::canonical(1),
        PoissonStructure::canonical(2),
        PoissonStructure::so3(),
    ]
}

/// Random expression safe on all of R^n: polynomial, possibly composed
/// with sin, cos or exp.
fn random_smooth<R: Rng>(n: usize, rng: &mut R) -> Expr {
    let p = random_polynomial(n, 3, rng);
    match rng.gen_range(0..4u8) {
        0 => p,
        1 => Expr::call(weil::expr::Primitive::Sin, p),
        2 => Expr::call(weil::expr::Primitive::Cos, p),
        _ => {
            // tame the argument so exp stays well-scaled
            Expr::call(weil::expr::Primitive::Exp, Expr::mul(Expr::constant(0.25), p))
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / f64::max(1.0, b.abs())
}

#[test]
fn criterion_01_algebra_invariants() {
    let expected = [(2usize, 1u32, 1usize), (3, 2, 1), (3, 1, 2), (4, 2, 1)];
    for (a, (dim, height, ann)) in matrix_algebras().iter().zip(expected) {
        assert_eq!(a.dim, dim, "{}", a.spec);
        assert_eq!(a.height, height, "{}", a.spec);
        assert_eq!(a.ann_basis.len(), ann, "{}", a.spec);
        // associativity of the structure table, exhaustive and exact
        for i in 0..a.dim {
            for j in 0..a.dim {
                for k in 0..a.dim {
                    let left = a
                        .basis_element(i)
                        .mul(&a.basis_element(j))
                        .unwrap()
                        .mul(&a.basis_element(k))
                        .unwrap();
                    let right = a
                        .basis_element(i)
                        .mul(&a.basis_element(j).mul(&a.basis_element(k)).unwrap())
                        .unwrap();
                    assert_eq!(left.coeffs, right.coeffs, "{} e{i} e{j} e{k}", a.spec);
                }
            }
        }
    }
    println!("ACCEPT 01 algebra-invariants exact PASS");
}

#[test]
fn criterion_02_forward_ad() {
    let d = WeilAlgebra::build(AlgebraSpec::TruncatedPowers { orders: vec![2] }).unwrap();
    let mut rng = rng_from_seed(0xAD);
    let n = 2;
    let mut worst_fd: f64 = 0.0;
    let mut worst_sym: f64 = 0.0;
    for _ in 0..10 {
        let f = random_smooth(n, &mut rng);
        for _ in 0..10 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let dir = rng.gen_range(0..n);
            // seed coordinate `dir` with x + eps
            let coords = (0..n)
                .map(|i| {
                    d.element(vec![x[i], if i == dir { 1.0 } else { 0.0 }]).unwrap()
                })
                .collect();
            let xi = NearPoint::new(&d, coords).unwrap();
            let eps = f.eval_weil(&xi).unwrap().coeffs[1];

            let h = 1e-5;
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[dir] += h;
            xm[dir] -= h;
            let fd = (f.eval_real(&xp).unwrap() - f.eval_real(&xm).unwrap()) / (2.0 * h);
            worst_fd = worst_fd.max(rel(eps, fd));

            let sym = f.partial(dir + 1).eval_real(&x).unwrap();
            worst_sym = worst_sym.max(rel(eps, sym));
        }
    }
    assert!(worst_fd <= 1e-6, "finite differences defect {worst_fd}");
    assert!(worst_sym <= 1e-9, "symbolic defect {worst_sym}");
    println!(
        "ACCEPT 02 forward-ad fd_defect={worst_fd:e} sym_defect={worst_sym:e} PASS"
    );
}

#[test]
fn criterion_03_taylor_exactness() {
    let jet4 = WeilAlgebra::build(AlgebraSpec::TruncatedPowers { orders: vec![4] }).unwrap();
    let cases = [
        parse("x1^3 - 2*x1 + 1", 1).unwrap(),
        parse("exp(x1)", 1).unwrap(),
        parse("sin(2*x1) + cos(x1)", 1).unwrap(),
        parse("exp(x1)*sin(x1) + x1^2", 1).unwrap(),
    ];
    let mut rng = rng_from_seed(0x7A9);
    let mut worst: f64 = 0.0;
    for f in &cases {
        for _ in 0..10 {
            let c = rng.gen_range(-1.0..1.0);
            let xi = NearPoint::new(
                &jet4,
                vec![jet4.element(vec![c, 1.0, 0.0, 0.0]).unwrap()],
            )
            .unwrap();
            let coeffs = f.eval_weil(&xi).unwrap().coeffs;
            let mut g = f.clone();
            let mut factorial = 1.0;
            for k in 0..=3usize {
                if k > 0 {
                    g = g.partial(1);
                    factorial *= k as f64;
                }
                let want = g.eval_real(&[c]).unwrap() / factorial;
                worst = worst.max(rel(coeffs[k], want));
            }
        }
    }
    assert!(worst <= 1e-8, "taylor defect {worst}");
    println!("ACCEPT 03 taylor-exactness max_defect={worst:e} PASS");
}

#[test]
fn criterion_04_compatibility_of_lifts() {
    let mut worst: f64 = 0.0;
    for p in matrix_poisson() {
        for a in matrix_algebras() {
            let n = p.dim;
            let mut rng = rng_from_seed(0xC0117A7 ^ n as u64 ^ a.dim as u64);
            for _ in 0..50 {
                let f = random_polynomial(n, 3, &mut rng);
                let g = random_polynomial(n, 3, &mut rng);
                let xi = random_near_point(&a, n, &mut rng);
                let left = p
                    .a_bracket(
                        &LiftedFunction::lift(&a, n, f.clone()),
                        &LiftedFunction::lift(&a, n, g.clone()),
                    )
                    .unwrap()
                    .eval(&xi)
                    .unwrap();
                let right = p.bracket_base(&f, &g).eval_weil(&xi).unwrap();
                worst = worst.max(left.sub(&right).unwrap().max_abs());
            }
        }
    }
    assert!(worst <= 1e-9, "compatibility defect {worst}");
    println!("ACCEPT 04 lift-compatibility max_defect={worst:e} PASS");
}

#[test]
fn criterion_05_a_poisson_axioms() {
    let mut worst: f64 = 0.0;
    for p in matrix_poisson() {
        for a in matrix_algebras() {
            let seed = 0xA71 ^ (p.dim as u64) << 8 ^ a.dim as u64;
            for r in [
                check_skew(&p, &a, 50, 1e-8, seed).unwrap(),
                check_leibniz(&p, &a, 50, 1e-8, seed).unwrap(),
                check_jacobi(&p, &a, 50, 1e-8, seed).unwrap(),
                check_commutator(&p, &a, 50, 1e-8, seed).unwrap(),
            ] {
                assert!(r.pass, "{r}");
                worst = worst.max(r.max_defect);
            }
        }
    }
    println!("ACCEPT 05 a-poisson-axioms max_defect={worst:e} PASS");
}

#[test]
fn criterion_06_hamiltonian_lift() {
    let mut worst: f64 = 0.0;
    for pairs in [1usize, 2] {
        let s = SymplecticStructure::canonical(pairs);
        for a in matrix_algebras() {
            let r = check_hamiltonian_lift(&s, &a, 20, 1e-9, 0x11A3 + pairs as u64).unwrap();
            assert!(r.pass, "{r}");
            worst = worst.max(r.max_defect);
        }
    }
    println!("ACCEPT 06 hamiltonian-lift max_defect={worst:e} PASS");
}

#[test]
fn criterion_07_coincidence() {
    let mut worst: f64 = 0.0;
    for pairs in [1usize, 2] {
        let s = SymplecticStructure::canonical(pairs);
        for a in matrix_algebras() {
            let r = check_coincidence(&s, &a, 50, 1e-8, 0xC01 + pairs as u64).unwrap();
            assert!(r.pass, "{r}");
            worst = worst.max(r.max_defect);
        }
    }
    println!("ACCEPT 07 coincidence max_defect={worst:e} PASS");
}

#[test]
fn criterion_08_nondegeneracy_iff() {
    let s = SymplecticStructure::canonical(1);
    let mut rng = rng_from_seed(0x9D);
    for a in matrix_algebras() {
        let duals = a.dual_basis();
        let random = LinearForm::new(
            &a,
            (0..a.dim).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        )
        .unwrap();
        let forms = [duals[a.dim - 1].clone(), duals[0].clone(), random];
        for (which, psi) in forms.iter().enumerate() {
            let v = scalar_form_test(&s, &a, psi, 3, 0x8E + which as u64).unwrap();
            assert!(v.agree(), "{} form {which}: {v:?}", a.spec);
            if matches!(a.spec, AlgebraSpec::PowerIdeal { .. }) {
                assert!(!v.predicate_symplectic, "{} must be degenerate for every form", a.spec);
            }
        }
        // dual numbers with the eps-form are symplectic
        if a.dim == 2 {
            let eps = LinearForm::new(&a, vec![0.0, 1.0]).unwrap();
            let v = scalar_form_test(&s, &a, &eps, 3, 0x8E).unwrap();
            assert!(v.predicate_symplectic && v.rank_symplectic);
        }
    }
    println!("ACCEPT 08 nondegeneracy-iff all-paths-agree PASS");
}

#[test]
fn criterion_09_exterior_derivative_coherence() {
    let n = 3;
    let mut worst: f64 = 0.0;
    // base exterior derivative of a p-form given by coefficients over
    // increasing index tuples
    fn base_d(n: usize, p: usize, coeffs: &[Expr]) -> Vec<Expr> {
        let from = weil::lift::increasing_indices(n, p);
        let to = weil::lift::increasing_indices(n, p + 1);
        to.iter()
            .map(|key| {
                let mut acc = Expr::constant(0.0);
                for (l, &kl) in key.iter().enumerate() {
                    let rest: Vec<usize> =
                        key.iter().enumerate().filter(|&(m, _)| m != l).map(|(_, &v)| v).collect();
                    let pos = from.iter().position(|t| *t == rest).unwrap();
                    let term = coeffs[pos].partial(kl + 1);
                    acc = if l % 2 == 0 {
                        Expr::add(acc, term)
                    } else {
                        Expr::sub(acc, term)
                    };
                }
                acc
            })
            .collect()
    }

    for a in matrix_algebras() {
        let mut rng = rng_from_seed(0xDA ^ a.dim as u64);
        let coord_fields: Vec<_> = (0..n)
            .map(|i| {
                let mut comps = vec![Expr::constant(0.0); n];
                comps[i] = Expr::constant(1.0);
                lift_vector_field(&a, &VectorFieldBase::new(comps)).unwrap()
            })
            .collect();
        for degree in 0..=2usize {
            let count = weil::lift::increasing_indices(n, degree).len();
            let base: Vec<Expr> = (0..count).map(|_| random_polynomial(n, 3, &mut rng)).collect();
            let omega = lift_form(&a, n, degree, &base).unwrap();
            let d_omega = d_a(&omega).unwrap();

            // d^A(omega^A) = (d omega)^A on coefficients
            let lifted_base_d = lift_form(&a, n, degree + 1, &base_d(n, degree, &base)).unwrap();
            let diff = d_omega.sub(&lifted_base_d).unwrap();
            for _ in 0..10 {
                let xi = random_near_point(&a, n, &mut rng);
                for c in &diff.coeffs {
                    worst = worst.max(c.eval(&xi).unwrap().max_abs());
                }
                // alternating-sum oracle on lifted coordinate fields
                for key in weil::lift::increasing_indices(n, degree + 1) {
                    let fields: Vec<_> = key.iter().map(|&i| coord_fields[i].clone()).collect();
                    let direct = d_omega.apply_at(&fields, &xi).unwrap();
                    let oracle = d_a_palais_oracle(&omega, &fields, &xi).unwrap();
                    worst = worst.max(direct.sub(&oracle).unwrap().max_abs());
                }
            }
        }

        // a closed 1-form stays closed after lifting
        let closed = lift_form(
            &a,
            n,
            1,
            &[parse("x2", n).unwrap(), parse("x1", n).unwrap(), parse("1", n).unwrap()],
        )
        .unwrap();
        let d_closed = d_a(&closed).unwrap();
        for _ in 0..5 {
            let xi = random_near_point(&a, n, &mut rng);
            for c in &d_closed.coeffs {
                worst = worst.max(c.eval(&xi).unwrap().max_abs());
            }
        }
    }
    assert!(worst <= 1e-9, "exterior derivative defect {worst}");
    println!("ACCEPT 09 exterior-derivative-coherence max_defect={worst:e} PASS");
}

#[test]
fn criterion_10_negative_control() {
    // canonical bivector on R^4 with x3 added to the (1,2) entry: base
    // Jacobi breaks, and the prolonged suite must catch it
    let mut upper = vec![Vec::new(); 4];
    for i in 0..4usize {
        for j in i + 1..4 {
            let mut e = if j == i + 1 && i % 2 == 0 {
                Expr::constant(1.0)
            } else {
                Expr::constant(0.0)
            };
            if i == 0 && j == 1 {
                e = Expr::add(e, Expr::var(3));
            }
            upper[i].push(e);
        }
    }
    let broken = PoissonStructure::new(4, upper).unwrap();
    assert!(!broken.jacobi_ok, "construction must flag the base Jacobi failure");
    let d = WeilAlgebra::build(AlgebraSpec::TruncatedPowers { orders: vec![2] }).unwrap();
    let r = check_jacobi(&broken, &d, 50, 1e-8, 0xBAD).unwrap();
    assert!(!r.pass, "suite failed to catch the broken structure: {r}");
    assert!(r.max_defect > 1e-3, "defect too small to be convincing: {r}");
    println!(
        "ACCEPT 10 negative-control jacobi_defect={:e} FAIL-detected PASS",
        r.max_defect
    );
}

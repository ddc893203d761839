//! Finite-dimensional local algebras `R[T1..Ts]/I` for a monomial ideal `I`,
//! together with element arithmetic and the structural invariants (height,
//! annihilator of the maximal ideal) the bracket machinery relies on.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, TOL_INVERT};

/// Hard cap on the number of basis monomials.
pub const DIM_CAP: usize = 1024;

/// How to present the quotient `R[T1..Ts]/I`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlgebraSpec {
    /// `R[T1..Ts]/(T1^k1, .., Ts^ks)`, each `k_i >= 1`.
    TruncatedPowers { orders: Vec<u32> },
    /// `R[T1..Ts]/(T1,..,Ts)^k`: kill every monomial of total degree `k`.
    PowerIdeal { vars: usize, degree: u32 },
    /// Quotient by the monomial ideal generated by the given exponent vectors.
    MonomialIdeal { vars: usize, generators: Vec<Vec<u32>> },
}

impl AlgebraSpec {
    pub fn vars(&self) -> usize {
        match self {
            AlgebraSpec::TruncatedPowers { orders } => orders.len(),
            AlgebraSpec::PowerIdeal { vars, .. } => *vars,
            AlgebraSpec::MonomialIdeal { vars, .. } => *vars,
        }
    }

    /// Ideal generators as exponent vectors.
    fn generators(&self) -> Vec<Vec<u32>> {
        match self {
            AlgebraSpec::TruncatedPowers { orders } => {
                let s = orders.len();
                orders
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| {
                        let mut g = vec![0u32; s];
                        g[i] = k;
                        g
                    })
                    .collect()
            }
            AlgebraSpec::PowerIdeal { vars, degree } => {
                monomials_of_degree(*vars, *degree)
            }
            AlgebraSpec::MonomialIdeal { generators, .. } => generators.clone(),
        }
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn var_list(s: usize) -> String {
            (1..=s).map(|i| format!("T{i}")).collect::<Vec<_>>().join(",")
        }
        match self {
            AlgebraSpec::TruncatedPowers { orders } if orders.is_empty() => write!(f, "R"),
            AlgebraSpec::TruncatedPowers { orders } => {
                let gens = orders
                    .iter()
                    .enumerate()
                    .map(|(i, k)| {
                        if *k == 1 {
                            format!("T{}", i + 1)
                        } else {
                            format!("T{}^{}", i + 1, k)
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(",");
                write!(f, "R[{}]/({})", var_list(orders.len()), gens)
            }
            AlgebraSpec::PowerIdeal { vars, degree } => {
                write!(f, "R[{}]/({})^{}", var_list(*vars), var_list(*vars), degree)
            }
            AlgebraSpec::MonomialIdeal { vars, generators } => {
                let gens = generators
                    .iter()
                    .map(|g| {
                        let m: Vec<String> = g
                            .iter()
                            .enumerate()
                            .filter(|(_, e)| **e > 0)
                            .map(|(i, e)| {
                                if *e == 1 {
                                    format!("T{}", i + 1)
                                } else {
                                    format!("T{}^{}", i + 1, e)
                                }
                            })
                            .collect();
                        if m.is_empty() { "1".to_string() } else { m.join("*") }
                    })
                    .collect::<Vec<_>>()
                    .join(",");
                write!(f, "R[{}]/({})", var_list(*vars), gens)
            }
        }
    }
}

impl std::str::FromStr for AlgebraSpec {
    type Err = Error;

    /// Accepts `R`, `R[T1,..,Ts]/(T1^k1,..,Ts^ks)` (an omitted exponent
    /// means 1) and `R[T1,..,Ts]/(T1,..,Ts)^k`; whitespace-insensitive,
    /// variables must appear as T1..Ts in order.
    fn from_str(s: &str) -> Result<AlgebraSpec, Error> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |msg: &str| Error::Syntax { pos: 0, msg: msg.to_string() };
        if compact == "R" {
            return Ok(AlgebraSpec::TruncatedPowers { orders: Vec::new() });
        }
        let rest = compact
            .strip_prefix("R[")
            .ok_or_else(|| err("expected `R` or `R[`"))?;
        let (vars_part, rest) = rest
            .split_once("]/(")
            .ok_or_else(|| err("expected `]/(` after variable list"))?;
        let vars: Vec<&str> = vars_part.split(',').collect();
        for (i, v) in vars.iter().enumerate() {
            if *v != format!("T{}", i + 1) {
                return Err(err("variables must be T1..Ts in order"));
            }
        }
        let s_count = vars.len();
        let parse_u32 = |t: &str| -> Result<u32, Error> {
            let k: u32 = t.parse().map_err(|_| err("expected positive integer"))?;
            if k == 0 {
                return Err(err("exponent must be positive"));
            }
            Ok(k)
        };
        if let Some(inner) = rest.strip_suffix(')') {
            // per-variable powers: T1^k1,..,Ts^ks
            let gens: Vec<&str> = inner.split(',').collect();
            if gens.len() != s_count {
                return Err(err("one generator per variable required"));
            }
            let mut orders = Vec::with_capacity(s_count);
            for (i, g) in gens.iter().enumerate() {
                let (name, k) = match g.split_once('^') {
                    Some((name, exp)) => (name, parse_u32(exp)?),
                    None => (*g, 1),
                };
                if name != format!("T{}", i + 1) {
                    return Err(err("generators must be T1^k1..Ts^ks in order"));
                }
                orders.push(k);
            }
            Ok(AlgebraSpec::TruncatedPowers { orders })
        } else if let Some((inner, exp)) = rest.split_once(")^") {
            // power of the full ideal: (T1,..,Ts)^k
            let gens: Vec<&str> = inner.split(',').collect();
            if gens.len() != s_count {
                return Err(err("ideal must list every variable"));
            }
            for (i, g) in gens.iter().enumerate() {
                if *g != format!("T{}", i + 1) {
                    return Err(err("ideal variables must be T1..Ts in order"));
                }
            }
            Ok(AlgebraSpec::PowerIdeal { vars: s_count, degree: parse_u32(exp)? })
        } else {
            Err(err("expected `)` or `)^k` closing the ideal"))
        }
    }
}

/// All exponent vectors over `vars` variables with total degree exactly `deg`.
fn monomials_of_degree(vars: usize, deg: u32) -> Vec<Vec<u32>> {
    if vars == 0 {
        return if deg == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for d in 0..=deg {
        for mut rest in monomials_of_degree(vars - 1, deg - d) {
            let mut m = vec![d];
            m.append(&mut rest);
            out.push(m);
        }
    }
    out
}

fn divides(g: &[u32], m: &[u32]) -> bool {
    g.iter().zip(m).all(|(a, b)| a <= b)
}

/// A finite-dimensional local algebra with a monomial basis.
///
/// `basis[0]` is always the unit monomial. Products of basis monomials are
/// either another basis monomial or fall into the ideal, so each table cell
/// is `Some(index)` or `None` (annihilated).
#[derive(Debug)]
pub struct WeilAlgebra {
    pub spec: AlgebraSpec,
    /// Basis monomials as exponent vectors, sorted by (total degree, lex).
    pub basis: Vec<Vec<u32>>,
    pub dim: usize,
    /// `structure[i * dim + j]`: index of `basis[i] * basis[j]`, or `None`.
    structure: Vec<Option<usize>>,
    pub height: u32,
    /// Indices of basis monomials spanning `ann(m)`.
    pub ann_basis: Vec<usize>,
}

impl PartialEq for WeilAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis
    }
}

impl WeilAlgebra {
    /// Build the quotient algebra: enumerate surviving monomials, fill the
    /// multiplication table, and compute height and `ann(m)`.
    pub fn build(spec: AlgebraSpec) -> Result<Arc<WeilAlgebra>, Error> {
        let s = spec.vars();
        let generators = spec.generators();

        // Finite dimension needs a pure power of every variable in the ideal.
        let mut bound = vec![0u32; s];
        for i in 0..s {
            let pure = generators
                .iter()
                .filter(|g| g.iter().enumerate().all(|(j, &e)| j == i || e == 0))
                .map(|g| g[i])
                .min();
            match pure {
                Some(d) => bound[i] = d,
                None => return Err(Error::InfiniteDimensional(i + 1)),
            }
        }

        // Enumerate exponent vectors below the pure-power box, keep those
        // not divisible by any generator.
        let mut basis: Vec<Vec<u32>> = Vec::new();
        let mut cursor = vec![0u32; s];
        loop {
            if !generators.iter().any(|g| divides(g, &cursor)) {
                basis.push(cursor.clone());
                if basis.len() > DIM_CAP {
                    return Err(Error::DimensionCap(basis.len(), DIM_CAP));
                }
            }
            // odometer over the box [0, bound_i)
            let mut i = 0;
            loop {
                if i == s {
                    break;
                }
                cursor[i] += 1;
                if cursor[i] < bound[i].max(1) {
                    break;
                }
                cursor[i] = 0;
                i += 1;
            }
            if i == s {
                break;
            }
        }
        basis.sort_by_key(|m| (m.iter().sum::<u32>(), m.clone()));
        debug_assert!(basis[0].iter().all(|&e| e == 0));

        let dim = basis.len();
        let height = basis.iter().map(|m| m.iter().sum::<u32>()).max().unwrap_or(0);

        let index_of = |m: &[u32]| basis.iter().position(|b| b == m);
        let mut structure = vec![None; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let prod: Vec<u32> = basis[i].iter().zip(&basis[j]).map(|(a, b)| a + b).collect();
                if !generators.iter().any(|g| divides(g, &prod)) {
                    structure[i * dim + j] = index_of(&prod);
                    debug_assert!(structure[i * dim + j].is_some());
                }
            }
        }

        let ann_basis = annihilator_indices(dim, &structure);

        Ok(Arc::new(WeilAlgebra {
            spec,
            basis,
            dim,
            structure,
            height,
            ann_basis,
        }))
    }

    /// Product of basis monomials `i` and `j`, if it survives the quotient.
    pub fn table(&self, i: usize, j: usize) -> Option<usize> {
        self.structure[i * self.dim + j]
    }

    pub fn same_as(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || self.basis == other.basis
    }

    pub fn zero(self: &Arc<Self>) -> WeilElement {
        WeilElement {
            algebra: Arc::clone(self),
            coeffs: vec![0.0; self.dim],
        }
    }

    pub fn unit(self: &Arc<Self>) -> WeilElement {
        self.scalar(1.0)
    }

    pub fn scalar(self: &Arc<Self>, c: f64) -> WeilElement {
        let mut coeffs = vec![0.0; self.dim];
        coeffs[0] = c;
        WeilElement {
            algebra: Arc::clone(self),
            coeffs,
        }
    }

    /// The element with coefficient 1 on `basis[alpha]`.
    pub fn basis_element(self: &Arc<Self>, alpha: usize) -> WeilElement {
        let mut coeffs = vec![0.0; self.dim];
        coeffs[alpha] = 1.0;
        WeilElement {
            algebra: Arc::clone(self),
            coeffs,
        }
    }

    pub fn element(self: &Arc<Self>, coeffs: Vec<f64>) -> Result<WeilElement, Error> {
        if coeffs.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: coeffs.len(),
            });
        }
        Ok(WeilElement {
            algebra: Arc::clone(self),
            coeffs,
        })
    }

    /// Basis of `ann(m) = {a : a·x = 0 for all x in m}` as elements.
    pub fn annihilator_of_m(self: &Arc<Self>) -> Vec<WeilElement> {
        self.ann_basis.iter().map(|&i| self.basis_element(i)).collect()
    }

    /// The `r` coordinate forms of the fixed monomial basis.
    pub fn dual_basis(self: &Arc<Self>) -> Vec<LinearForm> {
        (0..self.dim)
            .map(|alpha| {
                let mut coeffs = vec![0.0; self.dim];
                coeffs[alpha] = 1.0;
                LinearForm {
                    algebra: Arc::clone(self),
                    coeffs,
                }
            })
            .collect()
    }

    pub fn monomial_name(&self, alpha: usize) -> String {
        let m = &self.basis[alpha];
        if m.iter().all(|&e| e == 0) {
            return "1".to_string();
        }
        m.iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, e)| {
                if *e == 1 {
                    format!("T{}", i + 1)
                } else {
                    format!("T{}^{}", i + 1, e)
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Kernel of `a -> (a * e_beta)_{beta in m-basis}` by Gaussian elimination.
///
/// The assembled matrix has integer entries (0/1), so the elimination is
/// exact; the tolerance only guards against a non-integral future table.
fn annihilator_indices(dim: usize, structure: &[Option<usize>]) -> Vec<usize> {
    let m_basis: Vec<usize> = (1..dim).collect();
    if m_basis.is_empty() {
        // m = (0): everything annihilates it.
        return (0..dim).collect();
    }
    // Rows: (beta, product-direction); columns: candidate a-coefficients.
    let rows = m_basis.len() * dim;
    let mut mat = vec![vec![0.0f64; dim]; rows];
    for (bi, &beta) in m_basis.iter().enumerate() {
        for alpha in 0..dim {
            if let Some(gamma) = structure[alpha * dim + beta] {
                mat[bi * dim + gamma][alpha] += 1.0;
            }
        }
    }
    let kernel = kernel_basis(&mut mat, dim, 1e-12);
    // For a monomial table the kernel is spanned by coordinate vectors.
    let mut idx: Vec<usize> = kernel
        .iter()
        .map(|v| {
            let mut best = 0;
            for (i, c) in v.iter().enumerate() {
                if c.abs() > v[best].abs() {
                    best = i;
                }
            }
            best
        })
        .collect();
    idx.sort_unstable();
    idx.dedup();
    idx
}

/// Basis of the null space of `mat` (rows x cols), destructive.
fn kernel_basis(mat: &mut [Vec<f64>], cols: usize, tol: f64) -> Vec<Vec<f64>> {
    let rows = mat.len();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        // partial pivot
        let mut p = r;
        for i in r..rows {
            if mat[i][c].abs() > mat[p][c].abs() {
                p = i;
            }
        }
        if r >= rows || mat[p][c].abs() <= tol {
            continue;
        }
        mat.swap(r, p);
        let piv = mat[r][c];
        for x in mat[r].iter_mut() {
            *x /= piv;
        }
        for i in 0..rows {
            if i != r && mat[i][c].abs() > 0.0 {
                let f = mat[i][c];
                for c2 in 0..cols {
                    mat[i][c2] -= f * mat[r][c2];
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0.0; cols];
            v[fc] = 1.0;
            for (ri, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -mat[ri][fc];
            }
            v
        })
        .collect()
}

/// An element of a Weil algebra: a coefficient vector over the monomial basis.
#[derive(Debug, Clone)]
pub struct WeilElement {
    pub algebra: Arc<WeilAlgebra>,
    pub coeffs: Vec<f64>,
}

impl WeilElement {
    /// The real part: projection along the `R + m` split.
    pub fn augmentation(&self) -> f64 {
        self.coeffs[0]
    }

    /// The `m`-part: the element minus its augmentation.
    pub fn nilpotent_part(&self) -> WeilElement {
        let mut out = self.clone();
        out.coeffs[0] = 0.0;
        out
    }

    pub fn add(&self, other: &WeilElement) -> Result<WeilElement, Error> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(WeilElement {
            algebra: Arc::clone(&self.algebra),
            coeffs,
        })
    }

    pub fn sub(&self, other: &WeilElement) -> Result<WeilElement, Error> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(WeilElement {
            algebra: Arc::clone(&self.algebra),
            coeffs,
        })
    }

    pub fn scale(&self, c: f64) -> WeilElement {
        WeilElement {
            algebra: Arc::clone(&self.algebra),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn neg(&self) -> WeilElement {
        self.scale(-1.0)
    }

    /// Bilinear product through the structure table.
    pub fn mul(&self, other: &WeilElement) -> Result<WeilElement, Error> {
        self.check(other)?;
        let dim = self.algebra.dim;
        let mut coeffs = vec![0.0; dim];
        for i in 0..dim {
            let a = self.coeffs[i];
            if a == 0.0 {
                continue;
            }
            for j in 0..dim {
                let b = other.coeffs[j];
                if b == 0.0 {
                    continue;
                }
                if let Some(k) = self.algebra.table(i, j) {
                    coeffs[k] += a * b;
                }
            }
        }
        Ok(WeilElement {
            algebra: Arc::clone(&self.algebra),
            coeffs,
        })
    }

    /// Multiplicative inverse by the finite Neumann series
    /// `(1/c) * sum_{j<=h} (-n/c)^j` for `x = c + n`.
    pub fn invert(&self) -> Result<WeilElement, Error> {
        let c = self.augmentation();
        if c.abs() < TOL_INVERT {
            return Err(Error::NotInvertible);
        }
        let n = self.nilpotent_part().scale(-1.0 / c);
        let mut acc = self.algebra.unit();
        let mut pow = self.algebra.unit();
        for _ in 0..self.algebra.height {
            pow = pow.mul(&n)?;
            acc = acc.add(&pow)?;
        }
        Ok(acc.scale(1.0 / c))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    fn check(&self, other: &WeilElement) -> Result<(), Error> {
        if self.algebra.same_as(&other.algebra) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }
}

impl fmt::Display for WeilElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (alpha, c) in self.coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if alpha == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{}", self.algebra.monomial_name(alpha))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// An R-linear form on the algebra in the fixed monomial basis.
#[derive(Debug, Clone)]
pub struct LinearForm {
    pub algebra: Arc<WeilAlgebra>,
    pub coeffs: Vec<f64>,
}

impl LinearForm {
    pub fn new(algebra: &Arc<WeilAlgebra>, coeffs: Vec<f64>) -> Result<LinearForm, Error> {
        if coeffs.len() != algebra.dim {
            return Err(Error::DimensionMismatch {
                expected: algebra.dim,
                got: coeffs.len(),
            });
        }
        Ok(LinearForm {
            algebra: Arc::clone(algebra),
            coeffs,
        })
    }

    pub fn eval(&self, x: &WeilElement) -> Result<f64, Error> {
        if !self.algebra.same_as(&x.algebra) {
            return Err(Error::AlgebraMismatch);
        }
        Ok(self.coeffs.iter().zip(&x.coeffs).map(|(a, b)| a * b).sum())
    }
}

/// Solve `M x = b` over the algebra by splitting `M = M0 + N` with `M0` the
/// real augmentation and `N` entrywise nilpotent, iterating
/// `x <- M0^{-1}(b - N x)` exactly `h + 1` times.
pub fn solve_linear_local(
    m: &[Vec<WeilElement>],
    b: &[WeilElement],
) -> Result<Vec<WeilElement>, Error> {
    let n = b.len();
    if m.len() != n || m.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: m.len() });
    }
    let algebra = Arc::clone(&b[0].algebra);

    let m0: Vec<Vec<f64>> = m
        .iter()
        .map(|row| row.iter().map(|e| e.augmentation()).collect())
        .collect();
    let lu = LuFactors::new(&m0).ok_or(Error::SingularAugmentation)?;

    let nil: Vec<Vec<WeilElement>> = m
        .iter()
        .map(|row| row.iter().map(|e| e.nilpotent_part()).collect())
        .collect();

    let mut x: Vec<WeilElement> = vec![algebra.zero(); n];
    for _ in 0..=algebra.height {
        // rhs = b - N x
        let mut rhs = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = b[i].clone();
            for j in 0..n {
                acc = acc.sub(&nil[i][j].mul(&x[j])?)?;
            }
            rhs.push(acc);
        }
        x = lu.solve_elementwise(&rhs, &algebra);
    }
    Ok(x)
}

/// Plain LU with partial pivoting over f64, applied coefficientwise to
/// vectors of algebra elements.
struct LuFactors {
    n: usize,
    lu: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl LuFactors {
    fn new(a: &[Vec<f64>]) -> Option<LuFactors> {
        let n = a.len();
        let mut lu: Vec<Vec<f64>> = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            for i in k + 1..n {
                if lu[i][k].abs() > lu[p][k].abs() {
                    p = i;
                }
            }
            if lu[p][k].abs() < 1e-300 {
                return None;
            }
            lu.swap(k, p);
            perm.swap(k, p);
            for i in k + 1..n {
                let f = lu[i][k] / lu[k][k];
                lu[i][k] = f;
                for j in k + 1..n {
                    lu[i][j] -= f * lu[k][j];
                }
            }
        }
        Some(LuFactors { n, lu, perm })
    }

    fn solve_real(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 1..n {
            for j in 0..i {
                y[i] -= self.lu[i][j] * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] -= self.lu[i][j] * y[j];
            }
            y[i] /= self.lu[i][i];
        }
        y
    }

    fn solve_elementwise(&self, b: &[WeilElement], algebra: &Arc<WeilAlgebra>) -> Vec<WeilElement> {
        let dim = algebra.dim;
        let mut out: Vec<WeilElement> = vec![algebra.zero(); self.n];
        for alpha in 0..dim {
            let col: Vec<f64> = b.iter().map(|e| e.coeffs[alpha]).collect();
            let sol = self.solve_real(&col);
            for (i, v) in sol.into_iter().enumerate() {
                out[i].coeffs[alpha] = v;
            }
        }
        out
    }
}

/// Invert a constant real matrix; shared by the symplectic module.
pub(crate) fn invert_real_matrix(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let lu = LuFactors::new(a)?;
    let mut inv = vec![vec![0.0; n]; n];
    for c in 0..n {
        let mut e = vec![0.0; n];
        e[c] = 1.0;
        let col = lu.solve_real(&e);
        for r in 0..n {
            inv[r][c] = col[r];
        }
    }
    Some(inv)
}

/// Rank of a real matrix by row elimination with the given pivot tolerance.
pub(crate) fn matrix_rank(a: &[Vec<f64>], tol: f64) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut rank = 0;
    for c in 0..cols {
        let mut p = rank;
        for i in rank..rows {
            if m[i][c].abs() > m[p][c].abs() {
                p = i;
            }
        }
        if rank >= rows || m[p][c].abs() <= tol {
            continue;
        }
        m.swap(rank, p);
        for i in rank + 1..rows {
            let f = m[i][c] / m[rank][c];
            for c2 in c..cols {
                m[i][c2] -= f * m[rank][c2];
            }
        }
        rank += 1;
    }
    rank
}

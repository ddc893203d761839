//! A small symbolic language for smooth functions on `R^n`: parsing, formal
//! partial derivatives, and evaluation over the reals or over any Weil
//! algebra. Weil evaluation of a variable carrying a nilpotent part is the
//! lift `f^A`; restricted to dual numbers it reproduces forward-mode AD.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::algebra::{WeilAlgebra, WeilElement};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primitive {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

impl Primitive {
    fn name(self) -> &'static str {
        match self {
            Primitive::Exp => "exp",
            Primitive::Log => "log",
            Primitive::Sin => "sin",
            Primitive::Cos => "cos",
            Primitive::Sqrt => "sqrt",
        }
    }

    fn from_name(s: &str) -> Option<Primitive> {
        match s {
            "exp" => Some(Primitive::Exp),
            "log" => Some(Primitive::Log),
            "sin" => Some(Primitive::Sin),
            "cos" => Some(Primitive::Cos),
            "sqrt" => Some(Primitive::Sqrt),
            _ => None,
        }
    }

    fn eval(self, x: f64) -> Result<f64, Error> {
        match self {
            Primitive::Exp => Ok(x.exp()),
            Primitive::Log => {
                if x <= 0.0 {
                    Err(Error::Domain(format!("log of non-positive value {x}")))
                } else {
                    Ok(x.ln())
                }
            }
            Primitive::Sin => Ok(x.sin()),
            Primitive::Cos => Ok(x.cos()),
            Primitive::Sqrt => {
                if x < 0.0 {
                    Err(Error::Domain(format!("sqrt of negative value {x}")))
                } else {
                    Ok(x.sqrt())
                }
            }
        }
    }

    /// k-th derivative at `c`, for the truncated Taylor evaluation.
    fn derivative_at(self, k: u32, c: f64) -> Result<f64, Error> {
        match self {
            Primitive::Exp => Ok(c.exp()),
            Primitive::Log => {
                if c <= 0.0 {
                    return Err(Error::Domain(format!("log not smooth at {c}")));
                }
                if k == 0 {
                    Ok(c.ln())
                } else {
                    // (-1)^{k-1} (k-1)! / c^k
                    let mut v = 1.0;
                    for j in 1..k {
                        v *= j as f64;
                    }
                    let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
                    Ok(sign * v / c.powi(k as i32))
                }
            }
            Primitive::Sin => Ok(match k % 4 {
                0 => c.sin(),
                1 => c.cos(),
                2 => -c.sin(),
                _ => -c.cos(),
            }),
            Primitive::Cos => Ok(match k % 4 {
                0 => c.cos(),
                1 => -c.sin(),
                2 => -c.cos(),
                _ => c.sin(),
            }),
            Primitive::Sqrt => {
                if c <= 0.0 && k > 0 {
                    return Err(Error::Domain(format!("sqrt not smooth at {c}")));
                }
                if c < 0.0 {
                    return Err(Error::Domain(format!("sqrt of negative value {c}")));
                }
                // (1/2)(1/2 - 1)...(1/2 - k + 1) c^{1/2 - k}
                let mut coef = 1.0;
                for j in 0..k {
                    coef *= 0.5 - j as f64;
                }
                Ok(coef * c.powf(0.5 - k as f64))
            }
        }
    }
}

/// Expression tree for a smooth function of `x1..xn`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// 1-based variable index.
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Neg(Box<Expr>),
    Call(Primitive, Box<Expr>),
}

impl Expr {
    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    // Smart constructors fold literal zeros and ones so formal derivatives
    // stay readable; nothing more.
    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
            (Expr::Const(c), b) if c == 0.0 => b,
            (a, Expr::Const(c)) if c == 0.0 => a,
            (a, b) => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
            (a, Expr::Const(c)) if c == 0.0 => a,
            (Expr::Const(c), b) if c == 0.0 => Expr::neg(b),
            (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
            (Expr::Const(c), _) | (_, Expr::Const(c)) if c == 0.0 => Expr::Const(0.0),
            (Expr::Const(c), b) if c == 1.0 => b,
            (a, Expr::Const(c)) if c == 1.0 => a,
            (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(c), b) if c == 0.0 && b != Expr::Const(0.0) => Expr::Const(0.0),
            (a, Expr::Const(c)) if c == 1.0 => a,
            (a, b) => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            a => Expr::Neg(Box::new(a)),
        }
    }

    pub fn pow(a: Expr, k: i32) -> Expr {
        match (a, k) {
            (_, 0) => Expr::Const(1.0),
            (a, 1) => a,
            (Expr::Const(c), k) => Expr::Const(c.powi(k)),
            (a, k) => Expr::Pow(Box::new(a), k),
        }
    }

    pub fn call(p: Primitive, a: Expr) -> Expr {
        Expr::Call(p, Box::new(a))
    }

    /// Largest variable index appearing in the tree (0 if none).
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => *i,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
            Expr::Pow(a, _) | Expr::Neg(a) | Expr::Call(_, a) => a.max_var(),
        }
    }

    /// Formal partial derivative with respect to `x_i` (1-based).
    pub fn partial(&self, i: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var(j) => Expr::Const(if *j == i { 1.0 } else { 0.0 }),
            Expr::Add(a, b) => Expr::add(a.partial(i), b.partial(i)),
            Expr::Sub(a, b) => Expr::sub(a.partial(i), b.partial(i)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.partial(i), (**b).clone()),
                Expr::mul((**a).clone(), b.partial(i)),
            ),
            Expr::Div(a, b) => Expr::div(
                Expr::sub(
                    Expr::mul(a.partial(i), (**b).clone()),
                    Expr::mul((**a).clone(), b.partial(i)),
                ),
                Expr::pow((**b).clone(), 2),
            ),
            Expr::Pow(a, k) => Expr::mul(
                Expr::mul(Expr::Const(*k as f64), Expr::pow((**a).clone(), k - 1)),
                a.partial(i),
            ),
            Expr::Neg(a) => Expr::neg(a.partial(i)),
            Expr::Call(p, a) => {
                let outer = match p {
                    Primitive::Exp => Expr::call(Primitive::Exp, (**a).clone()),
                    Primitive::Log => Expr::div(Expr::Const(1.0), (**a).clone()),
                    Primitive::Sin => Expr::call(Primitive::Cos, (**a).clone()),
                    Primitive::Cos => Expr::neg(Expr::call(Primitive::Sin, (**a).clone())),
                    Primitive::Sqrt => Expr::div(
                        Expr::Const(0.5),
                        Expr::call(Primitive::Sqrt, (**a).clone()),
                    ),
                };
                Expr::mul(outer, a.partial(i))
            }
        }
    }

    /// Evaluate at a real point; `x` is 0-indexed by variable.
    pub fn eval_real(&self, x: &[f64]) -> Result<f64, Error> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var(i) => x
                .get(i - 1)
                .copied()
                .ok_or(Error::VariableOutOfRange { index: *i, dim: x.len() }),
            Expr::Add(a, b) => Ok(a.eval_real(x)? + b.eval_real(x)?),
            Expr::Sub(a, b) => Ok(a.eval_real(x)? - b.eval_real(x)?),
            Expr::Mul(a, b) => Ok(a.eval_real(x)? * b.eval_real(x)?),
            Expr::Div(a, b) => {
                let d = b.eval_real(x)?;
                if d == 0.0 {
                    return Err(Error::Domain("division by zero".to_string()));
                }
                Ok(a.eval_real(x)? / d)
            }
            Expr::Pow(a, k) => {
                let v = a.eval_real(x)?;
                if *k < 0 && v == 0.0 {
                    return Err(Error::Domain("zero raised to negative power".to_string()));
                }
                Ok(v.powi(*k))
            }
            Expr::Neg(a) => Ok(-a.eval_real(x)?),
            Expr::Call(p, a) => p.eval(a.eval_real(x)?),
        }
    }

    /// Evaluate over a Weil algebra at a near point: this is `f^A(xi)`.
    ///
    /// Arithmetic nodes use algebra operations; a primitive applied to
    /// `c + nu` (`nu` nilpotent) is the exactly truncated Taylor sum
    /// `sum_{k<=h} g^(k)(c) nu^k / k!`.
    pub fn eval_weil(&self, xi: &NearPoint) -> Result<WeilElement, Error> {
        let alg = &xi.algebra;
        match self {
            Expr::Const(c) => Ok(alg.scalar(*c)),
            Expr::Var(i) => xi
                .coords
                .get(i - 1)
                .cloned()
                .ok_or(Error::VariableOutOfRange { index: *i, dim: xi.coords.len() }),
            Expr::Add(a, b) => a.eval_weil(xi)?.add(&b.eval_weil(xi)?),
            Expr::Sub(a, b) => a.eval_weil(xi)?.sub(&b.eval_weil(xi)?),
            Expr::Mul(a, b) => a.eval_weil(xi)?.mul(&b.eval_weil(xi)?),
            Expr::Div(a, b) => {
                let d = b.eval_weil(xi)?;
                if d.augmentation() == 0.0 {
                    return Err(Error::Domain("division by zero at base point".to_string()));
                }
                a.eval_weil(xi)?.mul(&d.invert()?)
            }
            Expr::Pow(a, k) => {
                let v = a.eval_weil(xi)?;
                let (base, k) = if *k < 0 {
                    if v.augmentation() == 0.0 {
                        return Err(Error::Domain(
                            "zero raised to negative power at base point".to_string(),
                        ));
                    }
                    (v.invert()?, (-k) as u32)
                } else {
                    (v, *k as u32)
                };
                let mut acc = alg.unit();
                for _ in 0..k {
                    acc = acc.mul(&base)?;
                }
                Ok(acc)
            }
            Expr::Neg(a) => Ok(a.eval_weil(xi)?.neg()),
            Expr::Call(p, a) => {
                let v = a.eval_weil(xi)?;
                let c = v.augmentation();
                let nu = v.nilpotent_part();
                let mut acc = alg.scalar(p.derivative_at(0, c)?);
                let mut nu_pow = alg.unit();
                let mut fact = 1.0;
                for k in 1..=alg.height {
                    nu_pow = nu_pow.mul(&nu)?;
                    if nu_pow.max_abs() == 0.0 {
                        break;
                    }
                    fact *= k as f64;
                    acc = acc.add(&nu_pow.scale(p.derivative_at(k, c)? / fact))?;
                }
                Ok(acc)
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Precedence-aware printer; output reparses to the same tree shape.
        fn prec(e: &Expr) -> u8 {
            match e {
                Expr::Add(..) | Expr::Sub(..) => 1,
                Expr::Mul(..) | Expr::Div(..) => 2,
                Expr::Neg(..) => 3,
                Expr::Pow(..) => 4,
                _ => 5,
            }
        }
        fn wrap(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
            if prec(e) < min {
                write!(f, "(")?;
                go(f, e)?;
                write!(f, ")")
            } else {
                go(f, e)
            }
        }
        fn go(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
            match e {
                Expr::Const(c) => {
                    if *c < 0.0 {
                        write!(f, "({c})")
                    } else {
                        write!(f, "{c}")
                    }
                }
                Expr::Var(i) => write!(f, "x{i}"),
                Expr::Add(a, b) => {
                    wrap(f, a, 1)?;
                    write!(f, "+")?;
                    wrap(f, b, 2)
                }
                Expr::Sub(a, b) => {
                    wrap(f, a, 1)?;
                    write!(f, "-")?;
                    wrap(f, b, 2)
                }
                Expr::Mul(a, b) => {
                    wrap(f, a, 2)?;
                    write!(f, "*")?;
                    wrap(f, b, 3)
                }
                Expr::Div(a, b) => {
                    wrap(f, a, 2)?;
                    write!(f, "/")?;
                    wrap(f, b, 3)
                }
                Expr::Pow(a, k) => {
                    wrap(f, a, 5)?;
                    if *k < 0 {
                        write!(f, "^({k})")
                    } else {
                        write!(f, "^{k}")
                    }
                }
                Expr::Neg(a) => {
                    write!(f, "-")?;
                    wrap(f, a, 3)
                }
                Expr::Call(p, a) => {
                    write!(f, "{}(", p.name())?;
                    go(f, a)?;
                    write!(f, ")")
                }
            }
        }
        go(f, self)
    }
}

/// A point of `A^n` with prescribed real parts: the coordinates of a near
/// point of its base.
#[derive(Debug, Clone)]
pub struct NearPoint {
    pub algebra: Arc<WeilAlgebra>,
    pub coords: Vec<WeilElement>,
}

impl NearPoint {
    pub fn new(algebra: &Arc<WeilAlgebra>, coords: Vec<WeilElement>) -> Result<NearPoint, Error> {
        for c in &coords {
            if !algebra.same_as(&c.algebra) {
                return Err(Error::AlgebraMismatch);
            }
        }
        Ok(NearPoint {
            algebra: Arc::clone(algebra),
            coords,
        })
    }

    /// The real point below this near point.
    pub fn base(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.augmentation()).collect()
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

/// Parse `source` as an expression over `x1..xn`.
///
/// Grammar: `expr := term (('+'|'-') term)*; term := factor (('*'|'/')
/// factor)*; factor := base ('^' int)?; base := number | ident | '(' expr ')'
/// | '-' base | func '(' expr ')'`.
pub fn parse(source: &str, n: usize) -> Result<Expr, Error> {
    let mut p = Parser {
        src: source.as_bytes(),
        pos: 0,
        n,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, Error> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat(b'-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, Error> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                acc = Expr::Div(Box::new(acc), Box::new(self.factor()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, Error> {
        let base = self.base()?;
        if self.eat(b'^') {
            let k = self.int_exponent()?;
            Ok(Expr::Pow(Box::new(base), k))
        } else {
            Ok(base)
        }
    }

    fn int_exponent(&mut self) -> Result<i32, Error> {
        let paren = self.eat(b'(');
        let neg = self.eat(b'-');
        let start = self.pos;
        while self.peek().map_or(false, |c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected integer exponent"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let mut k: i32 = text
            .parse()
            .map_err(|_| self.err("integer exponent out of range"))?;
        if neg {
            k = -k;
        }
        self.skip_ws();
        if paren && !self.eat(b')') {
            return Err(self.err("expected `)` after exponent"));
        }
        Ok(k)
    }

    fn base(&mut self) -> Result<Expr, Error> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.base()?)));
        }
        if self.eat(b'(') {
            let e = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)`"));
            }
            return Ok(e);
        }
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(self.err("expected number, identifier or `(`")),
        }
    }

    fn number(&mut self) -> Result<Expr, Error> {
        let start = self.pos;
        while self.peek().map_or(false, |c| c.is_ascii_digit() || c == b'.') {
            self.pos += 1;
        }
        if self.peek() == Some(b'e') || self.peek() == Some(b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.peek() == Some(b'+') || self.peek() == Some(b'-') {
                self.pos += 1;
            }
            if self.peek().map_or(false, |c| c.is_ascii_digit()) {
                while self.peek().map_or(false, |c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let v: f64 = text.parse().map_err(|_| Error::Syntax {
            pos: start,
            msg: format!("bad number `{text}`"),
        })?;
        self.skip_ws();
        Ok(Expr::Const(v))
    }

    fn ident(&mut self) -> Result<Expr, Error> {
        let start = self.pos;
        while self
            .peek()
            .map_or(false, |c| c.is_ascii_alphanumeric() || c == b'_')
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
        self.skip_ws();
        if let Some(rest) = text.strip_prefix('x') {
            if let Ok(i) = rest.parse::<usize>() {
                if i == 0 || i > self.n {
                    return Err(Error::VariableOutOfRange { index: i, dim: self.n });
                }
                return Ok(Expr::Var(i));
            }
        }
        if let Some(p) = Primitive::from_name(&text) {
            if !self.eat(b'(') {
                return Err(self.err("expected `(` after function name"));
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)`"));
            }
            return Ok(Expr::Call(p, Box::new(arg)));
        }
        Err(Error::UnknownIdentifier(text))
    }
}

// ---------------------------------------------------------------------------
// Numeric identity testing
// ---------------------------------------------------------------------------

/// Sampled equality of two expressions on `[-1,1]^n`, resampling on domain
/// errors with at most 10x oversampling.
pub fn expr_equal_numeric<R: Rng>(
    f: &Expr,
    g: &Expr,
    n: usize,
    samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<bool, Error> {
    let mut done = 0;
    let mut attempts = 0;
    while done < samples {
        if attempts >= samples * 10 {
            return Err(Error::SamplingExhausted);
        }
        attempts += 1;
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (fv, gv) = match (f.eval_real(&x), g.eval_real(&x)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        if (fv - gv).abs() > tol * (1.0 + fv.abs()) {
            return Ok(false);
        }
        done += 1;
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AlgebraSpec, WeilAlgebra};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn dual() -> Arc<WeilAlgebra> {
        WeilAlgebra::build(AlgebraSpec::TruncatedPowers { orders: vec![2] }).unwrap()
    }

    #[test]
    fn parse_sum_of_squares() {
        let e = parse("x1^2 + x2^2", 2).unwrap();
        assert_eq!(
            e,
            Expr::Add(
                Box::new(Expr::Pow(Box::new(Expr::Var(1)), 2)),
                Box::new(Expr::Pow(Box::new(Expr::Var(2)), 2)),
            )
        );
    }

    #[test]
    fn parse_call_product() {
        let e = parse("sin(x1)*exp(x2)", 2).unwrap();
        assert_eq!(
            e,
            Expr::Mul(
                Box::new(Expr::Call(Primitive::Sin, Box::new(Expr::Var(1)))),
                Box::new(Expr::Call(Primitive::Exp, Box::new(Expr::Var(2)))),
            )
        );
    }

    #[test]
    fn parse_out_of_range_variable() {
        assert!(matches!(
            parse("x3", 2),
            Err(Error::VariableOutOfRange { index: 3, dim: 2 })
        ));
    }

    #[test]
    fn parse_reports_position() {
        match parse("x1 + ", 2) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn parse_unknown_identifier() {
        assert!(matches!(parse("tan(x1)", 1), Err(Error::UnknownIdentifier(_))));
    }

    #[test]
    fn precedence_and_associativity() {
        // unary minus is part of `base`, so it binds tighter than ^
        let e = parse("-x1^2", 1).unwrap();
        assert_eq!(e, Expr::Pow(Box::new(Expr::Neg(Box::new(Expr::Var(1)))), 2));
        assert_eq!(e.eval_real(&[3.0]).unwrap(), 9.0);
        // left-associative subtraction
        let e = parse("1 - 2 - 3", 1).unwrap();
        assert_eq!(e.eval_real(&[0.0]).unwrap(), -4.0);
        let e = parse("8 / 2 / 2", 1).unwrap();
        assert_eq!(e.eval_real(&[0.0]).unwrap(), 2.0);
    }

    #[test]
    fn print_reparse_roundtrip() {
        let sources = [
            "x1^2 + x2^2",
            "sin(x1)*exp(x2) - 3.5/x2",
            "-(x1 + x2)^3 * sqrt(x2)",
            "1e-3 * x1 - log(x2)/x1^(-2)",
        ];
        for s in sources {
            let e = parse(s, 2).unwrap();
            let e2 = parse(&e.to_string(), 2).unwrap();
            assert_eq!(e, e2, "roundtrip of `{s}` via `{e}`");
        }
    }

    #[test]
    fn eval_real_basics() {
        assert_eq!(parse("x1+x2", 2).unwrap().eval_real(&[1.0, 2.0]).unwrap(), 3.0);
        assert_eq!(parse("sqrt(x1)", 1).unwrap().eval_real(&[4.0]).unwrap(), 2.0);
        assert!(matches!(
            parse("1/x1", 1).unwrap().eval_real(&[0.0]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            parse("log(x1)", 1).unwrap().eval_real(&[-1.0]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn partial_product_rule() {
        let f = parse("x1^2 * x2", 2).unwrap();
        let df = f.partial(1);
        let expect = parse("2*x1*x2", 2).unwrap();
        let mut rng = StdRng::seed_from_u64(1);
        assert!(expr_equal_numeric(&df, &expect, 2, 50, 1e-12, &mut rng).unwrap());
        // derivative with respect to an absent variable is 0
        assert_eq!(parse("sin(x1)", 2).unwrap().partial(2), Expr::Const(0.0));
    }

    #[test]
    fn partial_vs_finite_differences() {
        let f = parse("exp(x1^2)", 1).unwrap();
        let df = f.partial(1);
        let mut rng = StdRng::seed_from_u64(2);
        for _ in 0..10 {
            let x = rng.gen_range(-1.0..1.0);
            let h = 1e-5;
            let fd = (f.eval_real(&[x + h]).unwrap() - f.eval_real(&[x - h]).unwrap()) / (2.0 * h);
            let sym = df.eval_real(&[x]).unwrap();
            assert!((fd - sym).abs() <= 1e-6 * (1.0 + sym.abs()));
        }
    }

    #[test]
    fn eval_weil_square_dual() {
        let d = dual();
        let xi = NearPoint::new(&d, vec![d.element(vec![3.0, 1.0]).unwrap()]).unwrap();
        let v = parse("x1^2", 1).unwrap().eval_weil(&xi).unwrap();
        assert_eq!(v.coeffs, vec![9.0, 6.0]);
    }

    #[test]
    fn eval_weil_exp_jet() {
        let a = WeilAlgebra::build(AlgebraSpec::TruncatedPowers { orders: vec![3] }).unwrap();
        let xi = NearPoint::new(&a, vec![a.basis_element(1)]).unwrap();
        let v = parse("exp(x1)", 1).unwrap().eval_weil(&xi).unwrap();
        assert_eq!(v.coeffs, vec![1.0, 1.0, 0.5]);
    }

    #[test]
    fn eval_weil_is_ring_morphism_on_polynomials() {
        let a = WeilAlgebra::build(AlgebraSpec::TruncatedPowers { orders: vec![2, 2] }).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        let f = parse("x1^2*x2 - x2^3 + 2*x1", 2).unwrap();
        let g = parse("x1*x2 + x1^3", 2).unwrap();
        let fg = Expr::mul(f.clone(), g.clone());
        let sum = Expr::add(f.clone(), g.clone());
        for _ in 0..20 {
            let coords: Vec<WeilElement> = (0..2)
                .map(|_| {
                    a.element((0..a.dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
                        .unwrap()
                })
                .collect();
            let xi = NearPoint::new(&a, coords).unwrap();
            let lhs = fg.eval_weil(&xi).unwrap();
            let rhs = f.eval_weil(&xi).unwrap().mul(&g.eval_weil(&xi).unwrap()).unwrap();
            assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-12);
            let lhs = sum.eval_weil(&xi).unwrap();
            let rhs = f.eval_weil(&xi).unwrap().add(&g.eval_weil(&xi).unwrap()).unwrap();
            assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-12);
        }
    }

    #[test]
    fn augmentation_naturality() {
        let a = WeilAlgebra::build(AlgebraSpec::PowerIdeal { vars: 2, degree: 2 }).unwrap();
        let mut rng = StdRng::seed_from_u64(4);
        let exprs = ["exp(x1)*sin(x2)", "x1^3 - x2/(2 + x1^2)", "sqrt(4 + x1)"];
        for src in exprs {
            let f = parse(src, 2).unwrap();
            for _ in 0..10 {
                let coords: Vec<WeilElement> = (0..2)
                    .map(|_| {
                        a.element((0..a.dim).map(|_| rng.gen_range(-0.5..0.5)).collect())
                            .unwrap()
                    })
                    .collect();
                let xi = NearPoint::new(&a, coords).unwrap();
                let v = f.eval_weil(&xi).unwrap();
                let base = f.eval_real(&xi.base()).unwrap();
                assert!((v.augmentation() - base).abs() <= 1e-9 * (1.0 + base.abs()));
            }
        }
    }

    #[test]
    fn dual_number_derivative() {
        let d = dual();
        let mut rng = StdRng::seed_from_u64(5);
        let exprs = ["exp(x1)*x2", "sin(x1*x2)", "x1/(2 + x2^2)", "sqrt(3 + x1)"];
        for src in exprs {
            let f = parse(src, 2).unwrap();
            for i in 1..=2usize {
                for _ in 0..5 {
                    let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let coords: Vec<WeilElement> = (0..2)
                        .map(|j| {
                            let eps = if j + 1 == i { 1.0 } else { 0.0 };
                            d.element(vec![x[j], eps]).unwrap()
                        })
                        .collect();
                    let xi = NearPoint::new(&d, coords).unwrap();
                    let v = f.eval_weil(&xi).unwrap();
                    let expect = f.partial(i).eval_real(&x).unwrap();
                    assert!(
                        (v.coeffs[1] - expect).abs() <= 1e-9 * (1.0 + expect.abs()),
                        "{src} d/dx{i}"
                    );
                }
            }
        }
    }

    #[test]
    fn taylor_coefficients_match_repeated_partials() {
        let a = WeilAlgebra::build(AlgebraSpec::TruncatedPowers { orders: vec![4] }).unwrap();
        let exprs = ["exp(x1)", "sin(x1)", "x1^3 + 2*x1", "log(2 + x1)"];
        let x0 = 0.3;
        for src in exprs {
            let f = parse(src, 1).unwrap();
            let mut coord = a.scalar(x0);
            coord.coeffs[1] = 1.0;
            let xi = NearPoint::new(&a, vec![coord]).unwrap();
            let v = f.eval_weil(&xi).unwrap();
            let mut df = f.clone();
            let mut fact = 1.0;
            for k in 0..=3usize {
                if k > 0 {
                    df = df.partial(1);
                    fact *= k as f64;
                }
                let expect = df.eval_real(&[x0]).unwrap() / fact;
                assert!(
                    (v.coeffs[k] - expect).abs() <= 1e-12 * (1.0 + expect.abs()),
                    "{src} T^{k}"
                );
            }
        }
    }

    #[test]
    fn equality_sampler() {
        let mut rng = StdRng::seed_from_u64(6);
        let a = parse("(x1+x2)^2", 2).unwrap();
        let b = parse("x1^2 + 2*x1*x2 + x2^2", 2).unwrap();
        assert!(expr_equal_numeric(&a, &b, 2, 100, 1e-10, &mut rng).unwrap());

        let c = parse("x1", 2).unwrap();
        let d = parse("x2", 2).unwrap();
        assert!(!expr_equal_numeric(&c, &d, 2, 100, 1e-10, &mut rng).unwrap());

        let s = parse("sin(x1)^2 + cos(x1)^2", 1).unwrap();
        let one = parse("1", 1).unwrap();
        assert!(expr_equal_numeric(&s, &one, 1, 100, 1e-10, &mut rng).unwrap());
    }

    #[test]
    fn sampling_exhausted_on_always_bad_domain() {
        let mut rng = StdRng::seed_from_u64(7);
        let f = parse("log(-2 + x1)", 1).unwrap(); // never valid on [-1,1]
        let g = parse("x1", 1).unwrap();
        assert!(matches!(
            expr_equal_numeric(&f, &g, 1, 10, 1e-9, &mut rng),
            Err(Error::SamplingExhausted)
        ));
    }
}

//! Manifest-driven front end: define an algebra and bracket structures in
//! a JSON file, then lift functions, take brackets, and run the identity
//! check suites from the command line.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::{Deserialize, Serialize};

use weil::algebra::{AlgebraSpec, LinearForm, WeilAlgebra, WeilElement};
use weil::expr::{parse, Expr, NearPoint};
use weil::lift::LiftedFunction;
use weil::poisson::{
    check_commutator, check_compat, check_jacobi, check_leibniz, check_skew, PoissonStructure,
};
use weil::report::CheckReport;
use weil::sample::rng_from_seed;
use weil::symplectic::{
    check_coincidence, check_hamiltonian_lift, scalar_form_test, SymplecticStructure,
};

#[derive(Debug, Deserialize)]
struct Manifest {
    algebra: String,
    dimension: usize,
    #[serde(default)]
    functions: BTreeMap<String, String>,
    #[serde(default)]
    poisson: Option<Vec<Vec<String>>>,
    #[serde(default)]
    symplectic: Option<Vec<Vec<String>>>,
    #[serde(default)]
    points: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    seed: u64,
    tol: Option<f64>,
    samples: Option<usize>,
}

#[derive(Parser)]
#[command(name = "weil", about = "Weil algebra arithmetic, lifts and bracket checks")]
struct Cli {
    /// Path to the JSON manifest.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Also write the reports as JSON to this path.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Override the manifest tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Override the manifest seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the manifest sample count.
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print dimension, basis, height and annihilator of the algebra.
    AlgebraInfo,
    /// Evaluate a named function at a near point given as a JSON list of
    /// per-coordinate coefficient vectors.
    Lift { function: String, point: String },
    /// Bracket two named functions under the manifest structure.
    Bracket { f: String, g: String },
    /// Run a check suite.
    Check { suite: Suite },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Skew,
    Leibniz,
    Jacobi,
    Commutator,
    Compat,
    Coincide,
    Hamlift,
    Nondegen,
    All,
}

/// Anything that stops the run, with the exit code it maps to:
/// 2 for usage and parse problems, 1 for a failed check or numeric error.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }
    fn runtime(message: impl Into<String>) -> Failure {
        Failure { code: 1, message: message.into() }
    }
}

impl From<weil::Error> for Failure {
    fn from(e: weil::Error) -> Failure {
        Failure::runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

struct Setup {
    manifest: Manifest,
    algebra: Arc<WeilAlgebra>,
    tol: f64,
    seed: u64,
    samples: usize,
}

fn load_setup(cli: &Cli) -> Result<Setup, Failure> {
    let path = cli
        .manifest
        .as_ref()
        .ok_or_else(|| Failure::usage("--manifest <path> is required"))?;
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("manifest: {e}")))?;
    let spec: AlgebraSpec = manifest
        .algebra
        .parse()
        .map_err(|e: weil::Error| Failure::usage(format!("algebra spec: {e}")))?;
    let algebra = WeilAlgebra::build(spec)
        .map_err(|e| Failure::usage(format!("algebra: {e}")))?;
    let tol = cli.tol.or(manifest.tol).unwrap_or(1e-8);
    let seed = cli.seed.unwrap_or(manifest.seed);
    let samples = cli.samples.or(manifest.samples).unwrap_or(50);
    Ok(Setup { manifest, algebra, tol, seed, samples })
}

impl Setup {
    fn function(&self, name: &str) -> Result<Expr, Failure> {
        let src = self
            .manifest
            .functions
            .get(name)
            .ok_or_else(|| Failure::usage(format!("no function named `{name}` in manifest")))?;
        parse(src, self.manifest.dimension)
            .map_err(|e| Failure::usage(format!("function `{name}`: {e}")))
    }

    /// Upper-triangle matrix of parsed entries; accepts either a full
    /// square matrix (lower triangle ignored) or ragged upper-triangle rows.
    fn structure_entries(&self, rows: &[Vec<String>], what: &str) -> Result<Vec<Vec<Expr>>, Failure> {
        let n = self.manifest.dimension;
        if rows.len() != n {
            return Err(Failure::usage(format!("{what}: expected {n} rows")));
        }
        let mut upper = Vec::with_capacity(n);
        for (i, row) in rows.iter().enumerate() {
            let strip = if row.len() == n {
                &row[i + 1..]
            } else if row.len() == n - i - 1 {
                &row[..]
            } else {
                return Err(Failure::usage(format!(
                    "{what}: row {} must have {} or {} entries",
                    i + 1,
                    n,
                    n - i - 1
                )));
            };
            let parsed = strip
                .iter()
                .map(|s| parse(s, n))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::usage(format!("{what}: {e}")))?;
            upper.push(parsed);
        }
        Ok(upper)
    }

    fn poisson(&self) -> Result<Option<PoissonStructure>, Failure> {
        match &self.manifest.poisson {
            None => Ok(None),
            Some(rows) => {
                let upper = self.structure_entries(rows, "poisson")?;
                let p = PoissonStructure::new(self.manifest.dimension, upper)
                    .map_err(|e| Failure::usage(format!("poisson: {e}")))?;
                Ok(Some(p))
            }
        }
    }

    fn symplectic(&self) -> Result<Option<SymplecticStructure>, Failure> {
        match &self.manifest.symplectic {
            None => Ok(None),
            Some(rows) => {
                let upper = self.structure_entries(rows, "symplectic")?;
                let s = SymplecticStructure::new(self.manifest.dimension, upper)
                    .map_err(|e| Failure::usage(format!("symplectic: {e}")))?;
                Ok(Some(s))
            }
        }
    }

    /// Manifest points embedded as near points with zero nilpotent parts.
    fn near_points(&self) -> Result<Vec<NearPoint>, Failure> {
        let n = self.manifest.dimension;
        let r = self.algebra.dim;
        let mut out = Vec::new();
        for p in self.manifest.points.iter().flatten() {
            if p.len() != n {
                return Err(Failure::usage(format!("point {p:?}: expected {n} coordinates")));
            }
            let coords = p
                .iter()
                .map(|&x| {
                    let mut c = vec![0.0; r];
                    c[0] = x;
                    self.algebra.element(c)
                })
                .collect::<Result<Vec<_>, _>>()?;
            out.push(NearPoint::new(&self.algebra, coords)?);
        }
        Ok(out)
    }
}

fn run() -> Result<u8, Failure> {
    let cli = Cli::parse();
    let setup = load_setup(&cli)?;
    match &cli.command {
        Command::AlgebraInfo => cmd_algebra_info(&cli, &setup),
        Command::Lift { function, point } => cmd_lift(&cli, &setup, function, point),
        Command::Bracket { f, g } => cmd_bracket(&cli, &setup, f, g),
        Command::Check { suite } => cmd_check(&cli, &setup, *suite),
    }
}

#[derive(Serialize)]
struct AlgebraInfo {
    algebra: String,
    dimension: usize,
    height: u32,
    basis: Vec<String>,
    ann_dimension: usize,
    ann_basis: Vec<String>,
}

fn cmd_algebra_info(cli: &Cli, setup: &Setup) -> Result<u8, Failure> {
    let a = &setup.algebra;
    let basis: Vec<String> = (0..a.dim).map(|i| a.monomial_name(i)).collect();
    let ann: Vec<String> = a.ann_basis.iter().map(|&i| a.monomial_name(i)).collect();
    let info = AlgebraInfo {
        algebra: a.spec.to_string(),
        dimension: a.dim,
        height: a.height,
        basis,
        ann_dimension: a.ann_basis.len(),
        ann_basis: ann,
    };
    println!("algebra {}", info.algebra);
    println!("dimension {}", info.dimension);
    println!("height {}", info.height);
    println!("basis {}", info.basis.join(", "));
    println!("ann(m) dimension {}", info.ann_dimension);
    println!("ann(m) basis {}", info.ann_basis.join(", "));
    write_json(cli, &info)?;
    Ok(0)
}

fn cmd_lift(cli: &Cli, setup: &Setup, function: &str, point: &str) -> Result<u8, Failure> {
    let f = setup.function(function)?;
    let coords_raw: Vec<Vec<f64>> = serde_json::from_str(point)
        .map_err(|e| Failure::usage(format!("near point: {e}")))?;
    if coords_raw.len() != setup.manifest.dimension {
        return Err(Failure::usage(format!(
            "near point: expected {} coordinate vectors",
            setup.manifest.dimension
        )));
    }
    let coords = coords_raw
        .into_iter()
        .map(|c| setup.algebra.element(c))
        .collect::<Result<Vec<WeilElement>, _>>()
        .map_err(|e| Failure::usage(format!("near point: {e}")))?;
    let xi = NearPoint::new(&setup.algebra, coords)?;
    let value = f.eval_weil(&xi)?;
    println!("{value}");
    println!("{}", serde_json::to_string(&value.coeffs).unwrap());
    write_json(cli, &value.coeffs)?;
    Ok(0)
}

fn cmd_bracket(cli: &Cli, setup: &Setup, f: &str, g: &str) -> Result<u8, Failure> {
    let fe = setup.function(f)?;
    let ge = setup.function(g)?;
    let p = match setup.poisson()? {
        Some(p) => p,
        None => setup
            .symplectic()?
            .ok_or_else(|| Failure::usage("bracket needs a poisson or symplectic structure"))?
            .induced_poisson()
            .map_err(|e| Failure::usage(format!("symplectic: {e}")))?,
    };
    let base = p.bracket_base(&fe, &ge);
    println!("{{{f}, {g}}} = {base}");
    let n = setup.manifest.dimension;
    let lifted = p.a_bracket(
        &LiftedFunction::lift(&setup.algebra, n, fe),
        &LiftedFunction::lift(&setup.algebra, n, ge),
    )?;
    let mut values = Vec::new();
    for xi in setup.near_points()? {
        let v = lifted.eval(&xi)?;
        println!("at {:?}: {v}", xi.base());
        values.push(v.coeffs.clone());
    }
    write_json(cli, &values)?;
    Ok(0)
}

#[derive(Serialize)]
struct NondegenLine {
    form: String,
    predicate_symplectic: bool,
    rank_symplectic: bool,
    agree: bool,
}

#[derive(Serialize, Default)]
struct CheckOutput {
    reports: Vec<CheckReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    nondegen: Vec<NondegenLine>,
}

fn cmd_check(cli: &Cli, setup: &Setup, suite: Suite) -> Result<u8, Failure> {
    let poisson = setup.poisson()?;
    let symplectic = setup.symplectic()?;
    let all = suite == Suite::All;
    let mut out = CheckOutput::default();

    let need_poisson = |p: &Option<PoissonStructure>| {
        p.clone()
            .ok_or_else(|| Failure::usage("this suite needs a poisson structure in the manifest"))
    };
    let need_symplectic = |s: &Option<SymplecticStructure>| {
        s.clone()
            .ok_or_else(|| Failure::usage("this suite needs a symplectic structure in the manifest"))
    };

    // For `all`, a constant symplectic form also supplies the Poisson side.
    let poisson_for_all = match (&poisson, &symplectic) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(s)) => s.induced_poisson().ok(),
        (None, None) => None,
    };
    if all && poisson_for_all.is_none() && symplectic.is_none() {
        return Err(Failure::usage("check all needs a poisson or symplectic structure"));
    }

    let a = &setup.algebra;
    let (tol, seed, samples) = (setup.tol, setup.seed, setup.samples);

    type PoissonCheck = fn(&PoissonStructure, &Arc<WeilAlgebra>, usize, f64, u64) -> Result<CheckReport, weil::Error>;
    let poisson_suites: [(Suite, PoissonCheck); 5] = [
        (Suite::Skew, check_skew),
        (Suite::Leibniz, check_leibniz),
        (Suite::Jacobi, check_jacobi),
        (Suite::Commutator, check_commutator),
        (Suite::Compat, check_compat),
    ];
    for (which, f) in poisson_suites {
        if suite == which {
            out.reports.push(f(&need_poisson(&poisson)?, a, samples, tol, seed)?);
        } else if all {
            if let Some(p) = &poisson_for_all {
                out.reports.push(f(p, a, samples, tol, seed)?);
            }
        }
    }

    if suite == Suite::Hamlift || (all && symplectic.is_some()) {
        let s = need_symplectic(&symplectic)?;
        out.reports.push(check_hamiltonian_lift(&s, a, samples, tol, seed)?);
    }
    if suite == Suite::Coincide || (all && symplectic.is_some()) {
        let s = need_symplectic(&symplectic)?;
        out.reports.push(check_coincidence(&s, a, samples, tol, seed)?);
    }
    if suite == Suite::Nondegen || (all && symplectic.is_some()) {
        let s = need_symplectic(&symplectic)?;
        out.nondegen = run_nondegen(setup, &s)?;
        let disagreements = out.nondegen.iter().filter(|l| !l.agree).count();
        out.reports.push(CheckReport::new(
            "nondegen",
            &a.spec.to_string(),
            setup.manifest.dimension,
            out.nondegen.len(),
            disagreements as f64,
            0.0,
        ));
    }

    for line in &out.nondegen {
        println!(
            "nondegen form={} predicate={} rank={} agree={}",
            line.form,
            verdict(line.predicate_symplectic),
            verdict(line.rank_symplectic),
            line.agree
        );
    }
    for r in &out.reports {
        println!("{r}");
    }
    write_json(cli, &out)?;
    Ok(if out.reports.iter().all(|r| r.pass) { 0 } else { 1 })
}

fn verdict(symplectic: bool) -> &'static str {
    if symplectic {
        "symplectic"
    } else {
        "degenerate"
    }
}

/// The three scalar forms of the nondegeneracy suite: the top-degree dual
/// form, the augmentation form, and a seeded random form.
fn run_nondegen(setup: &Setup, s: &SymplecticStructure) -> Result<Vec<NondegenLine>, Failure> {
    let a = &setup.algebra;
    let duals = a.dual_basis();
    let mut rng = rng_from_seed(setup.seed ^ 0x5CA1A);
    let random = LinearForm::new(
        a,
        (0..a.dim).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    )?;
    let forms: [(&str, LinearForm); 3] = [
        ("top", duals[a.dim - 1].clone()),
        ("augmentation", duals[0].clone()),
        ("random", random),
    ];
    let mut lines = Vec::new();
    for (name, psi) in forms {
        let v = scalar_form_test(s, a, &psi, 3, setup.seed)?;
        lines.push(NondegenLine {
            form: name.to_string(),
            predicate_symplectic: v.predicate_symplectic,
            rank_symplectic: v.rank_symplectic,
            agree: v.agree(),
        });
    }
    Ok(lines)
}

fn write_json<T: Serialize>(cli: &Cli, value: &T) -> Result<(), Failure> {
    if let Some(path) = &cli.json {
        let text = serde_json::to_string_pretty(value).unwrap();
        fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

use std::path::PathBuf;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use bidisc_core::colligation::{
    model_colligation, strip_monomial, strip_monomial_rational, strip_monomial_rational_z2, strip_monomial_z2,
    Colligation,
};
use bidisc_core::factor::{
    certificate_grid, compose_colligations, condition_4_report, factor_rational, separability_test, split_colligation,
    weak_converse_check,
};
use bidisc_core::function::{series_of, Ambient, Evaluable2, PointGrid};
use bidisc_core::json::matrix_to_rows;
use bidisc_core::kernels::{
    agler_kernels_of, dbr_reconstruct_disc, dbr_test_ball, dbr_test_disc, dbr_test_nf, dbr_test_polydisc,
    verify_agler_decomposition, SampledKernel,
};
use bidisc_core::numlin::{classify, fro, CMatrix};
use bidisc_core::toeplitz::{
    certify_inner, isometry_defect, phi_blocks_from_colligation, proof_diagnostics, toeplitz_truncate, InnerVerdict,
};

use crate::input::{classify_value, wrong, Inputs, Object};
use crate::report::{CliError, Outcome, EXIT_FAIL};

pub type CmdResult = Result<Outcome, CliError>;

/// Toeplitz defects up to this multiple of `tol` count as a pass.
const TOEPLITZ_SLACK: f64 = 10.0;
const DIAGNOSTIC_LAGS: usize = 8;

pub struct Context<'a> {
    pub tol: f64,
    pub grid: Option<PointGrid>,
    pub inputs: Inputs<'a>,
}

impl Context<'_> {
    fn grid_or(&self, ambient: Ambient, count: usize, seed: u64) -> PointGrid {
        self.grid.clone().unwrap_or_else(|| PointGrid::random(ambient, count, seed))
    }
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// Turns refusals into failing outcomes that keep the evidence gathered so far.
fn refusal(e: CliError, evidence: Value) -> CmdResult {
    if e.exit_code() == EXIT_FAIL {
        let mut evidence = evidence;
        evidence["error"] = json!({ "name": e.name, "message": e.message });
        Ok(Outcome { verdict: e.verdict(), pass: false, evidence })
    } else {
        Err(e)
    }
}

fn attempt<T: Serialize, E: Into<CliError>>(r: Result<T, E>) -> Value {
    match r {
        Ok(v) => serde_json::to_value(v).unwrap_or(Value::Null),
        Err(e) => {
            let e: CliError = e.into();
            json!({ "error": e.name, "message": e.message })
        }
    }
}

fn evaluate(obj: &Object, z: &[Complex64]) -> Result<Complex64, CliError> {
    let two = || -> Result<[Complex64; 2], CliError> {
        <[Complex64; 2]>::try_from(z).map_err(|_| CliError::schema(format!("expected 2 coordinates, got {}", z.len())))
    };
    match obj {
        Object::Colligation(v) => Ok(v.transfer(z)?),
        Object::Rational(f) => Ok(f.eval(two()?)?),
        Object::Series(s) => Ok(s.eval(two()?)?),
        Object::Blaschke(b) => match z {
            [w] => Ok(b.eval(*w)),
            _ => Err(CliError::schema(format!("a Blaschke product takes 1 coordinate, got {}", z.len()))),
        },
        other => Err(CliError::schema(format!("cannot evaluate a {}", other.kind()))),
    }
}

fn variables(obj: &Object) -> usize {
    match obj {
        Object::Colligation(v) => v.nvars(),
        Object::Blaschke(_) | Object::Theta(_) => 1,
        _ => 2,
    }
}

pub fn eval(ctx: &mut Context, input: &PathBuf, point: Option<&str>, seed: u64) -> CmdResult {
    let obj = ctx.inputs.object(input)?;
    let points: Vec<Vec<Complex64>> = match point {
        Some(p) => vec![serde_json::from_str(p).map_err(|e| CliError::parse(format!("--point: {e}")))?],
        None => {
            let ambient = match variables(&obj) {
                1 => Ambient::Disc,
                2 => Ambient::Bidisc,
                n => Ambient::Polydisc(n),
            };
            ctx.grid_or(ambient, 40, seed).points().to_vec()
        }
    };
    let values = match &obj {
        Object::Theta(th) => {
            let at = |z: &Vec<Complex64>| match z.as_slice() {
                [w] => Ok(matrix_to_rows(&th.eval(*w)?)),
                _ => Err(CliError::schema(format!("a Theta realization takes 1 coordinate, got {}", z.len()))),
            };
            serde_json::to_value(points.iter().map(at).collect::<Result<Vec<_>, CliError>>()?)?
        }
        _ => serde_json::to_value(points.iter().map(|z| evaluate(&obj, z)).collect::<Result<Vec<_>, _>>()?)?,
    };
    Outcome::new("evaluated", true, json!({ "kind": obj.kind(), "points": points, "values": values }))
}

fn class_name(v: &CMatrix, tol: f64) -> &'static str {
    let c = classify(v, tol);
    if c.unitary {
        "unitary"
    } else if c.isometry {
        "isometric"
    } else if c.coisometry {
        "co-isometric"
    } else if c.contraction {
        "contractive"
    } else {
        "not contractive"
    }
}

pub fn classify_cmd(ctx: &mut Context, input: &PathBuf) -> CmdResult {
    let v = ctx.inputs.colligation(input)?;
    let block = v.block();
    let n = block.nrows();
    let structure = if v.nvars() == 2 { Some(v.structure_report(ctx.tol)?) } else { None };
    let evidence = json!({
        "classification": classify(&block, ctx.tol),
        "isometry_defect": fro(&(block.adjoint() * &block - CMatrix::identity(n, n))),
        "coisometry_defect": fro(&(&block * block.adjoint() - CMatrix::identity(n, n))),
        "partition": v.partition(),
        "structure": structure,
    });
    Outcome::new(class_name(&block, ctx.tol), true, evidence)
}

pub fn inner_check(ctx: &mut Context, input: &PathBuf) -> CmdResult {
    let v = ctx.inputs.colligation(input)?;
    let report = certify_inner(&v, ctx.tol)?;
    Outcome::new(report.verdict.as_str(), report.verdict == InnerVerdict::Certified, &report)
}

pub fn toeplitz_check(ctx: &mut Context, input: &PathBuf, order: usize, window: usize) -> CmdResult {
    let obj = ctx.inputs.object(input)?;
    let (truncation, diagnostics) = match &obj {
        Object::Colligation(v) => {
            if v.structure_report(ctx.tol)?.lower_left_zero {
                let d = attempt(proof_diagnostics(v, DIAGNOSTIC_LAGS, ctx.tol));
                (phi_blocks_from_colligation(v, order, ctx.tol)?, d)
            } else {
                (
                    toeplitz_truncate(&v.taylor_2d(order.saturating_sub(1), order.saturating_sub(1))?, order)?,
                    Value::Null,
                )
            }
        }
        Object::Rational(f) => {
            (toeplitz_truncate(&series_of(f, order.saturating_sub(1), order.saturating_sub(1))?, order)?, Value::Null)
        }
        Object::Series(s) => (toeplitz_truncate(s, order)?, Value::Null),
        other => return Err(wrong(input, "colligation, rational function or power series", other)),
    };
    let defect = isometry_defect(&truncation, window)?;
    let threshold = TOEPLITZ_SLACK * ctx.tol;
    let evidence = json!({
        "order": order,
        "window": window,
        "isometry_defect": defect,
        "threshold": threshold,
        "diagnostics": diagnostics,
    });
    Outcome::new(pass_fail(defect <= threshold), defect <= threshold, evidence)
}

pub fn agler_kernels(ctx: &mut Context, input: &PathBuf, seed: u64) -> CmdResult {
    let v = ctx.inputs.colligation(input)?;
    let grid = ctx.grid_or(Ambient::Bidisc, 40, seed);
    let (k1, k2) = agler_kernels_of(&v, &grid, ctx.tol)?;
    let check = verify_agler_decomposition(&v, &k1, &k2, ctx.tol)?;
    Outcome::new(pass_fail(check.pass), check.pass, json!({ "check": check, "k1": k1, "k2": k2 }))
}

pub fn agler_verify(ctx: &mut Context, function: &PathBuf, kernels: &[PathBuf]) -> CmdResult {
    let phi = ctx.inputs.object(function)?;
    let (k1, k2): (SampledKernel, SampledKernel) = match kernels {
        [report] => {
            let value = ctx.inputs.value(report)?;
            let pick = |k: &str| {
                value
                    .get("evidence")
                    .and_then(|e| e.get(k))
                    .cloned()
                    .ok_or_else(|| CliError::schema(format!("{}: no evidence.{k}", report.display())))
            };
            let k1 = match classify_value(pick("k1")?, report)? {
                Object::Kernel(k) => k,
                other => return Err(wrong(report, "sampled kernel", &other)),
            };
            let k2 = match classify_value(pick("k2")?, report)? {
                Object::Kernel(k) => k,
                other => return Err(wrong(report, "sampled kernel", &other)),
            };
            (k1, k2)
        }
        [a, b] => (ctx.inputs.kernel(a)?, ctx.inputs.kernel(b)?),
        _ => return Err(CliError::parse("agler-verify takes two kernel files or one agler-kernels report")),
    };
    let phi: &dyn Evaluable2 = match &phi {
        Object::Colligation(v) => v,
        Object::Rational(f) => f,
        Object::Series(s) => s,
        other => return Err(wrong(function, "two-variable function", other)),
    };
    let check = verify_agler_decomposition(phi, &k1, &k2, ctx.tol)?;
    Outcome::new(pass_fail(check.pass), check.pass, &check)
}

/// A sampled kernel, or `K_Theta` on the grid for a Theta realization.
fn disc_kernel(ctx: &mut Context, input: &PathBuf, seed: u64) -> Result<SampledKernel, CliError> {
    match ctx.inputs.object(input)? {
        Object::Kernel(k) => Ok(k),
        Object::Theta(th) => Ok(th.kernel(&ctx.grid_or(Ambient::Disc, 12, seed))?),
        other => Err(wrong(input, "sampled kernel or Theta realization", &other)),
    }
}

pub fn dbr_check(ctx: &mut Context, kernel: &PathBuf, seed: u64) -> CmdResult {
    let k = disc_kernel(ctx, kernel, seed)?;
    let r = dbr_test_disc(&k, ctx.tol)?;
    Outcome::new(if r.is_dbr { "dbr" } else { "not dbr" }, r.is_dbr, &r)
}

pub fn dbr_nf_check(ctx: &mut Context, kernel: &PathBuf, seed: u64) -> CmdResult {
    let k = disc_kernel(ctx, kernel, seed)?;
    let r = dbr_test_nf(&k, ctx.tol)?;
    Outcome::new(pass_fail(r.pass()), r.pass(), &r)
}

pub fn dbr_reconstruct(ctx: &mut Context, kernel: &PathBuf, seed: u64) -> CmdResult {
    let k = disc_kernel(ctx, kernel, seed)?;
    let r = dbr_reconstruct_disc(&k, ctx.tol)?;
    Outcome::new("reconstructed", true, &r)
}

pub fn dbr_polydisc(ctx: &mut Context, kernel: &PathBuf, components: &[PathBuf]) -> CmdResult {
    let k = ctx.inputs.kernel(kernel)?;
    let parts = components.iter().map(|p| ctx.inputs.kernel(p)).collect::<Result<Vec<_>, _>>()?;
    let r = dbr_test_polydisc(&k, &parts, ctx.tol)?;
    Outcome::new(pass_fail(r.pass), r.pass, &r)
}

pub fn dbr_ball(ctx: &mut Context, kernel: &PathBuf) -> CmdResult {
    let k = ctx.inputs.kernel(kernel)?;
    let r = dbr_test_ball(&k, ctx.tol)?;
    Outcome::new(if r.is_dbr { "dbr" } else { "not dbr" }, r.is_dbr, &r)
}

fn factor_colligation(v: &Colligation, tol: f64) -> CmdResult {
    let mut evidence = json!({
        "condition_4": condition_4_report(v, tol)?,
        "separability": attempt(separability_test(v, &certificate_grid(), tol)),
        "weak_converse": Value::Null,
    });
    if classify(&v.block(), tol).unitary {
        evidence["weak_converse"] = attempt(weak_converse_check(v, tol).map(|mut r| {
            r.split = None;
            r
        }));
    }
    match split_colligation(v, tol) {
        Ok(split) => {
            evidence["split"] = serde_json::to_value(&split)?;
            Outcome::new("factored", true, evidence)
        }
        Err(e) => refusal(e.into(), evidence),
    }
}

pub fn factor(ctx: &mut Context, input: &PathBuf) -> CmdResult {
    match ctx.inputs.object(input)? {
        Object::Colligation(v) => factor_colligation(&v, ctx.tol),
        Object::Rational(f) => {
            let r = factor_rational(&f, ctx.tol)?;
            let verdict = match &r.reason {
                None => "factored".to_string(),
                Some(reason) => format!("NotSeparable: {reason}"),
            };
            Outcome::new(verdict, r.separable, &r)
        }
        other => Err(wrong(input, "colligation or rational function", &other)),
    }
}

pub fn compose(ctx: &mut Context, first: &PathBuf, second: &PathBuf) -> CmdResult {
    let v1 = ctx.inputs.colligation(first)?;
    let v2 = ctx.inputs.colligation(second)?;
    let v = compose_colligations(&v1, &v2, ctx.tol)?;
    let class = class_name(&v.block(), ctx.tol);
    Outcome::new("composed", true, json!({ "class": class, "colligation": v }))
}

pub fn split(ctx: &mut Context, input: &PathBuf) -> CmdResult {
    let v = ctx.inputs.colligation(input)?;
    let r = split_colligation(&v, ctx.tol)?;
    Outcome::new("split", true, &r)
}

pub fn model(ctx: &mut Context, input: &PathBuf) -> CmdResult {
    let b = match ctx.inputs.object(input)? {
        Object::Blaschke(b) => b,
        other => return Err(wrong(input, "Blaschke product", &other)),
    };
    let v = model_colligation(&b)?;
    let block = v.block();
    let n = block.nrows();
    let unitary = classify(&block, ctx.tol).unitary;
    let evidence = json!({
        "colligation": v,
        "unitary_defect": fro(&(block.adjoint() * &block - CMatrix::identity(n, n))),
    });
    Outcome::new(if unitary { "unitary" } else { "not unitary" }, unitary, evidence)
}

pub fn strip(ctx: &mut Context, input: &PathBuf, variable: u8, order: usize) -> CmdResult {
    let series_strip = |s| if variable == 1 { strip_monomial(s, ctx.tol) } else { strip_monomial_z2(s, ctx.tol) };
    let (p, evidence) = match ctx.inputs.object(input)? {
        Object::Rational(f) => {
            let r = if variable == 1 { strip_monomial_rational(&f)? } else { strip_monomial_rational_z2(&f)? };
            (r.p, serde_json::to_value(&r)?)
        }
        Object::Series(s) => {
            let r = series_strip(&s)?;
            (r.p, serde_json::to_value(&r)?)
        }
        Object::Colligation(v) => {
            let r = series_strip(&v.taylor_2d(order, order)?)?;
            (r.p, serde_json::to_value(&r)?)
        }
        other => return Err(wrong(input, "rational function, power series or colligation", &other)),
    };
    Outcome::new(format!("z{variable}^{p}"), true, evidence)
}

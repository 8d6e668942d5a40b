use std::path::PathBuf;

use clap::Args;
use refyoung_core::hs::{hs_chain_check, hs_reverse_check, HsInstance, HsReport};
use refyoung_core::matrix::read_matrix_file;
use refyoung_core::operator::{
    liao_wu_baseline_check, op_chain_check, op_heinz_check, op_reverse_check, OperatorChainReport, OrderedPairInstance,
};
use refyoung_core::scalar::{
    baseline_bounds, chain_y1, chain_y3, chain_y5, dyadic_equality, heinz_chain, heinz_reverse, reverse_y2, reverse_y4,
    reverse_y6, ChainResult, DYADIC_EQUALITY_TOL,
};
use refyoung_core::{Error, InequalityReport, Reading, ScalarPair, SpdMatrix, Tolerance, Weight};
use serde::Serialize;

use crate::output::{emit, opt, render, TableRow};
use crate::{Failure, Opts};

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Scalar instance `a b nu n`; nu may be a fraction `p/q`.
    #[arg(num_args = 4, value_names = ["A", "B", "NU", "N"])]
    pub scalar: Vec<String>,

    /// Fixture for the matrix A.
    #[arg(long, requires = "b_matrix", conflicts_with = "scalar")]
    pub a_matrix: Option<PathBuf>,

    /// Fixture for the matrix B.
    #[arg(long, requires = "a_matrix")]
    pub b_matrix: Option<PathBuf>,

    /// Fixture for X; adds the Hilbert-Schmidt rows.
    #[arg(long, requires = "a_matrix")]
    pub x_matrix: Option<PathBuf>,

    /// Weight for matrix mode.
    #[arg(long, default_value = "1/2")]
    pub nu: String,

    /// Refinement depth for matrix mode.
    #[arg(long, default_value_t = 1)]
    pub depth: usize,
}

/// One evaluated inequality. Scalar and Hilbert-Schmidt rows carry values;
/// operator rows carry the least eigenvalue of each difference as its slack.
#[derive(Clone, Debug, Serialize)]
pub struct EvalRow {
    pub bound: String,
    pub n: usize,
    pub lower: Option<f64>,
    pub middle: Option<f64>,
    pub upper: Option<f64>,
    pub slack_lower: Option<f64>,
    pub slack_upper: Option<f64>,
    pub pass: bool,
}

impl TableRow for EvalRow {
    const HEADERS: &'static [&'static str] = &[
        "bound",
        "n",
        "lower",
        "middle",
        "upper",
        "slack lower",
        "slack upper",
        "pass",
    ];

    fn cells(&self) -> Vec<String> {
        vec![
            self.bound.clone(),
            self.n.to_string(),
            opt(self.lower),
            opt(self.middle),
            opt(self.upper),
            opt(self.slack_lower),
            opt(self.slack_upper),
            if self.pass { "yes" } else { "NO" }.to_string(),
        ]
    }
}

impl EvalRow {
    fn chain(bound: &str, n: usize, c: &ChainResult, tol: Tolerance) -> Self {
        let (lo, hi) = c.check(tol);
        Self {
            bound: bound.into(),
            n,
            lower: Some(c.lower),
            middle: Some(c.middle),
            upper: Some(c.upper),
            slack_lower: Some(lo.slack),
            slack_upper: Some(hi.slack),
            pass: lo.pass && hi.pass,
        }
    }

    /// `middle <= upper` only.
    fn upper(bound: &str, n: usize, r: &InequalityReport) -> Self {
        Self {
            bound: bound.into(),
            n,
            lower: None,
            middle: Some(r.lhs),
            upper: Some(r.rhs),
            slack_lower: None,
            slack_upper: Some(r.slack),
            pass: r.pass,
        }
    }

    /// `lower <= middle` only.
    fn lower(bound: &str, n: usize, r: &InequalityReport) -> Self {
        Self {
            bound: bound.into(),
            n,
            lower: Some(r.lhs),
            middle: Some(r.rhs),
            upper: None,
            slack_lower: Some(r.slack),
            slack_upper: None,
            pass: r.pass,
        }
    }

    fn operator(bound: &str, rep: &OperatorChainReport) -> Self {
        Self {
            bound: bound.into(),
            n: rep.n,
            lower: None,
            middle: None,
            upper: None,
            slack_lower: rep.lambda_min_left,
            slack_upper: rep.lambda_min_right.or(rep.lambda_min_reverse),
            pass: rep.pass,
        }
    }

    fn hs(bound: &str, rep: &HsReport) -> Self {
        let (slack_lower, slack_upper) = match rep.values.lower {
            Some(_) => (Some(rep.reports[0].slack), Some(rep.reports[1].slack)),
            None => (None, Some(rep.reports[0].slack)),
        };
        Self {
            bound: bound.into(),
            n: rep.t,
            lower: rep.values.lower,
            middle: Some(rep.values.middle),
            upper: Some(rep.values.upper),
            slack_lower,
            slack_upper,
            pass: rep.pass,
        }
    }
}

/// Baselines bounding the arithmetic mean from above.
const UPPER_BASELINES: [&str; 3] = ["kantorovich_reverse", "kantorovich_reverse_max", "liao_wu_upper"];

/// Every scalar row for one instance.
pub fn scalar_rows(
    p: ScalarPair,
    w: Weight,
    n: usize,
    tol: Tolerance,
    reading: Reading,
) -> refyoung_core::Result<Vec<EvalRow>> {
    let mut rows = vec![
        EvalRow::chain("y1 chain", n, &chain_y1(p, w, n)?, tol),
        EvalRow::upper("y2 reverse", n, &reverse_y2(p, w, n, tol)?),
        EvalRow::chain("y3 chain", n, &chain_y3(p, w, n)?, tol),
        EvalRow::upper("y4 reverse", n, &reverse_y4(p, w, n, tol)?),
        EvalRow::chain("y5 chain", n, &chain_y5(p, w, n)?, tol),
        EvalRow::upper("y6 reverse", n, &reverse_y6(p, w, n, tol, reading)?),
        EvalRow::chain("heinz chain", n, &heinz_chain(p, w, n)?, tol),
        EvalRow::upper("heinz reverse", n, &heinz_reverse(p, w, n, tol)?),
    ];
    for c in baseline_bounds(p, w)?.check(tol) {
        let name = format!("baseline {}", c.name);
        rows.push(if UPPER_BASELINES.contains(&c.name) {
            EvalRow::upper(&name, 0, &c.report)
        } else {
            EvalRow::lower(&name, 0, &c.report)
        });
    }
    if let (Some(frac), Some(t)) = (w.exact(), w.dyadic_exponent()) {
        if t >= 2 && n == t as usize - 1 {
            let eq = dyadic_equality(p, frac.numerator(), t, DYADIC_EQUALITY_TOL)?;
            rows.push(EvalRow {
                bound: "equality (dyadic)".into(),
                n,
                lower: Some(eq.lower),
                middle: Some(eq.middle),
                upper: Some(eq.upper),
                slack_lower: None,
                slack_upper: Some(eq.spread),
                pass: eq.pass,
            });
        }
    }
    Ok(rows)
}

fn parse_f64(name: &str, s: &str) -> Result<f64, Failure> {
    s.trim()
        .parse()
        .map_err(|e| Failure::Usage(format!("bad {name} {s:?}: {e}")))
}

pub fn run(opts: &Opts, args: &EvalArgs) -> Result<(), Failure> {
    let tol = opts.tolerance();
    let rows = if let [a, b, nu, n] = args.scalar.as_slice() {
        let p = ScalarPair::new(parse_f64("a", a)?, parse_f64("b", b)?)?;
        let w: Weight = nu.parse()?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|e| Failure::Usage(format!("bad depth {n:?}: {e}")))?;
        if n == 0 {
            return Err(Failure::Usage("depth must be at least 1".into()));
        }
        scalar_rows(p, w, opts.depth(n), tol, opts.reading())?
    } else if let (Some(a), Some(b)) = (&args.a_matrix, &args.b_matrix) {
        matrix_rows(opts, args, a, b)?
    } else {
        return Err(Failure::Usage("give `a b nu n` or --a-matrix and --b-matrix".into()));
    };
    emit(&render(&rows, opts.format)?, opts.out.as_deref())?;
    if rows.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Failure::Violated)
    }
}

fn matrix_rows(opts: &Opts, args: &EvalArgs, a: &PathBuf, b: &PathBuf) -> Result<Vec<EvalRow>, Failure> {
    let tol = opts.tolerance();
    let reading = opts.reading();
    let w: Weight = args.nu.parse()?;
    if args.depth == 0 {
        return Err(Failure::Usage("--depth must be at least 1".into()));
    }
    let n = opts.depth(args.depth);
    let a = SpdMatrix::from_matrix(read_matrix_file(a)?)?;
    let b = SpdMatrix::from_matrix(read_matrix_file(b)?)?;
    let x = args.x_matrix.as_ref().map(read_matrix_file).transpose()?;
    let mut rows = Vec::new();
    match OrderedPairInstance::new(a.clone(), b.clone()) {
        Ok(inst) => {
            rows.push(EvalRow::operator(
                "operator chain",
                &op_chain_check(&inst, w, n, tol, reading)?,
            ));
            rows.push(EvalRow::operator(
                "operator reverse",
                &op_reverse_check(&inst, w, n, tol, reading)?,
            ));
            rows.push(EvalRow::operator(
                "operator heinz",
                &op_heinz_check(&inst, w, n, tol, reading)?,
            ));
            rows.push(EvalRow::operator(
                "operator liao_wu",
                &liao_wu_baseline_check(&inst, w, tol, reading)?,
            ));
        }
        Err(e @ Error::Hypothesis(_)) if x.is_some() => {
            log::warn!("operator rows skipped: {e}");
        }
        Err(e) => return Err(e.into()),
    }
    if let Some(x) = x {
        let inst = HsInstance::new(a, b, x)?;
        let sign = opts.sign();
        rows.push(EvalRow::hs("hs chain", &hs_chain_check(&inst, w, n, tol, sign)?));
        rows.push(EvalRow::hs(
            "hs reverse",
            &hs_reverse_check(&inst, w, n, tol, sign, reading)?,
        ));
    }
    Ok(rows)
}

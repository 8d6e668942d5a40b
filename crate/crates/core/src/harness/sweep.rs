//! Slack sweeps over generated instances.

use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::cases::{gen_scalar_cases, hs_instance_from, instance_rng, ordered_pair_from, CaseSpec, ScalarCase};
use super::oracle::highprec_all;
use crate::error::Result;
use crate::hs::{hs_chain_check, hs_reverse_check, HsInstance, HsReport};
use crate::matrix::{Matrix, SpdMatrix};
use crate::operator::{
    liao_wu_baseline_check, op_chain_check, op_heinz_check, op_reverse_check, OperatorChainReport, OrderedPairInstance,
};
use crate::report::{InequalityReport, Reading, Tolerance};
use crate::scalar::{
    baseline_bounds, chain_y1, chain_y3, chain_y5, dyadic_equality, heinz_chain, heinz_reverse, reverse_y2, reverse_y4,
    reverse_y6, ScalarPair, DYADIC_EQUALITY_TOL,
};
use crate::weight::Weight;

/// Stream offsets separating the instance families.
const OPERATOR_STREAM: u64 = 1 << 40;
const HS_STREAM: u64 = 2 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum InequalityId {
    #[serde(rename = "y1L")]
    Y1L,
    #[serde(rename = "y1R")]
    Y1R,
    #[serde(rename = "y2")]
    Y2,
    #[serde(rename = "y3L")]
    Y3L,
    #[serde(rename = "y3R")]
    Y3R,
    #[serde(rename = "y4")]
    Y4,
    #[serde(rename = "y5L")]
    Y5L,
    #[serde(rename = "y5R")]
    Y5R,
    #[serde(rename = "y6")]
    Y6,
    #[serde(rename = "heinz")]
    Heinz,
    #[serde(rename = "heinz_rev")]
    HeinzRev,
    #[serde(rename = "op_chain")]
    OpChain,
    #[serde(rename = "op_rev")]
    OpRev,
    #[serde(rename = "op_heinz")]
    OpHeinz,
    #[serde(rename = "hs_chain")]
    HsChain,
    #[serde(rename = "hs_rev")]
    HsRev,
    #[serde(rename = "baselines")]
    Baselines,
    #[serde(rename = "y1_dyadic")]
    Y1Dyadic,
    #[serde(rename = "oracle")]
    Oracle,
}

impl InequalityId {
    pub const ALL: [InequalityId; 19] = [
        Self::Y1L,
        Self::Y1R,
        Self::Y2,
        Self::Y3L,
        Self::Y3R,
        Self::Y4,
        Self::Y5L,
        Self::Y5R,
        Self::Y6,
        Self::Heinz,
        Self::HeinzRev,
        Self::OpChain,
        Self::OpRev,
        Self::OpHeinz,
        Self::HsChain,
        Self::HsRev,
        Self::Baselines,
        Self::Y1Dyadic,
        Self::Oracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Y1L => "y1L",
            Self::Y1R => "y1R",
            Self::Y2 => "y2",
            Self::Y3L => "y3L",
            Self::Y3R => "y3R",
            Self::Y4 => "y4",
            Self::Y5L => "y5L",
            Self::Y5R => "y5R",
            Self::Y6 => "y6",
            Self::Heinz => "heinz",
            Self::HeinzRev => "heinz_rev",
            Self::OpChain => "op_chain",
            Self::OpRev => "op_rev",
            Self::OpHeinz => "op_heinz",
            Self::HsChain => "hs_chain",
            Self::HsRev => "hs_rev",
            Self::Baselines => "baselines",
            Self::Y1Dyadic => "y1_dyadic",
            Self::Oracle => "oracle",
        }
    }
}

impl std::fmt::Display for InequalityId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One evaluated inequality. `pass` holds iff `slack >= −threshold`.
///
/// For scalar inequalities `slack` is `rhs − lhs` and `scale` is
/// `max(|lhs|, |rhs|)`; for Loewner checks `slack` is `λ_min` of the
/// difference and `scale` the largest absolute entry of the operands.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlackRecord {
    pub instance: u64,
    pub inequality: InequalityId,
    pub detail: String,
    pub slack: f64,
    pub scale: f64,
    pub threshold: f64,
    pub pass: bool,
    pub error: Option<String>,
}

impl SlackRecord {
    pub fn relative_slack(&self) -> f64 {
        if self.scale > 0.0 {
            self.slack / self.scale
        } else {
            self.slack
        }
    }

    fn from_report(instance: u64, id: InequalityId, detail: impl Into<String>, r: &InequalityReport) -> Self {
        Self {
            instance,
            inequality: id,
            detail: detail.into(),
            slack: r.slack,
            scale: r.lhs.abs().max(r.rhs.abs()),
            threshold: r.threshold,
            pass: r.pass,
            error: None,
        }
    }

    fn failed(instance: u64, id: InequalityId, detail: impl Into<String>, err: &crate::Error) -> Self {
        Self {
            instance,
            inequality: id,
            detail: detail.into(),
            slack: f64::NAN,
            scale: 0.0,
            threshold: 0.0,
            pass: false,
            error: Some(err.to_string()),
        }
    }
}

fn push_result<T>(
    out: &mut Vec<SlackRecord>,
    instance: u64,
    id: InequalityId,
    detail: &str,
    r: Result<T>,
    f: impl FnOnce(&mut Vec<SlackRecord>, T),
) {
    match r {
        Ok(v) => f(out, v),
        Err(e) => out.push(SlackRecord::failed(instance, id, detail, &e)),
    }
}

fn case_detail(c: &ScalarCase) -> String {
    format!("a={} b={} nu={} n={}", c.a, c.b, c.weight, c.n)
}

fn rel_err(x: f64, reference: f64) -> f64 {
    if x == reference {
        0.0
    } else {
        (x - reference).abs() / reference.abs()
    }
}

/// Largest relative disagreement between double precision and the oracle,
/// with the name of the worst quantity.
pub fn oracle_disagreement(p: ScalarPair, w: Weight, n: usize, reading: Reading) -> Result<(f64, &'static str)> {
    let tol = Tolerance::default();
    let o = highprec_all(p.a(), p.b(), w.nu(), n)?;
    let y1 = chain_y1(p, w, n)?;
    let y3 = chain_y3(p, w, n)?;
    let y5 = chain_y5(p, w, n)?;
    let hz = heinz_chain(p, w, n)?;
    let mut pairs = vec![
        ("y1.lower", y1.lower, o.y1[0]),
        ("y1.middle", y1.middle, o.y1[1]),
        ("y1.upper", y1.upper, o.y1[2]),
        ("y2.rhs", reverse_y2(p, w, n, tol)?.rhs, o.y2_rhs),
        ("y3.lower", y3.lower, o.y3[0]),
        ("y3.middle", y3.middle, o.y3[1]),
        ("y3.upper", y3.upper, o.y3[2]),
        ("y4.rhs", reverse_y4(p, w, n, tol)?.rhs, o.y4_rhs),
        ("y5.lower", y5.lower, o.y5[0]),
        ("y5.middle", y5.middle, o.y5[1]),
        ("y5.upper", y5.upper, o.y5[2]),
        ("heinz.lower", hz.lower, o.heinz[0]),
        ("heinz.middle", hz.middle, o.heinz[1]),
        ("heinz.upper", hz.upper, o.heinz[2]),
        ("heinz_rev.rhs", heinz_reverse(p, w, n, tol)?.rhs, o.heinz_rev_rhs),
    ];
    if reading == Reading::Proof {
        pairs.push(("y6.rhs", reverse_y6(p, w, n, tol, reading)?.rhs, o.y6_rhs));
    }
    Ok(pairs
        .into_iter()
        .map(|(name, x, r)| (rel_err(x, r), name))
        .fold((0.0, "none"), |acc, v| if v.0 > acc.0 { v } else { acc }))
}

fn scalar_records(c: &ScalarCase, spec: &CaseSpec, with_oracle: bool) -> Vec<SlackRecord> {
    use InequalityId as I;
    let mut out = Vec::new();
    let id = c.id;
    let tol = spec.tol;
    let detail = case_detail(c);
    let p = match ScalarPair::new(c.a, c.b) {
        Ok(p) => p,
        Err(e) => {
            out.push(SlackRecord::failed(id, I::Y1L, &detail, &e));
            return out;
        }
    };
    let w = c.weight;
    let n = c.n;
    let chain = |out: &mut Vec<SlackRecord>, l: I, r: I, res: Result<crate::ChainResult>| {
        push_result(out, id, l, &detail, res, |out, ch| {
            let (lo, hi) = ch.check(tol);
            if l == r {
                out.push(SlackRecord::from_report(id, l, format!("left {detail}"), &lo));
                out.push(SlackRecord::from_report(id, r, format!("right {detail}"), &hi));
            } else {
                out.push(SlackRecord::from_report(id, l, &detail, &lo));
                out.push(SlackRecord::from_report(id, r, &detail, &hi));
            }
        })
    };
    let single = |out: &mut Vec<SlackRecord>, i: I, res: Result<InequalityReport>| {
        push_result(out, id, i, &detail, res, |out, r| {
            out.push(SlackRecord::from_report(id, i, &detail, &r))
        })
    };
    chain(&mut out, I::Y1L, I::Y1R, chain_y1(p, w, n));
    single(&mut out, I::Y2, reverse_y2(p, w, n, tol));
    chain(&mut out, I::Y3L, I::Y3R, chain_y3(p, w, n));
    single(&mut out, I::Y4, reverse_y4(p, w, n, tol));
    chain(&mut out, I::Y5L, I::Y5R, chain_y5(p, w, n));
    single(&mut out, I::Y6, reverse_y6(p, w, n, tol, spec.reading));
    chain(&mut out, I::Heinz, I::Heinz, heinz_chain(p, w, n));
    single(&mut out, I::HeinzRev, heinz_reverse(p, w, n, tol));
    push_result(&mut out, id, I::Baselines, &detail, baseline_bounds(p, w), |out, b| {
        for check in b.check(tol) {
            out.push(SlackRecord::from_report(
                id,
                I::Baselines,
                format!("{} {detail}", check.name),
                &check.report,
            ));
        }
    });
    if let (Some(frac), Some(t)) = (w.exact(), w.dyadic_exponent()) {
        if t >= 2 && n == t as usize - 1 {
            push_result(
                &mut out,
                id,
                I::Y1Dyadic,
                &detail,
                dyadic_equality(p, frac.numerator(), t, DYADIC_EQUALITY_TOL),
                |out, e| {
                    out.push(SlackRecord {
                        instance: id,
                        inequality: I::Y1Dyadic,
                        detail: detail.clone(),
                        slack: -e.spread,
                        scale: e.upper.abs(),
                        threshold: e.threshold,
                        pass: e.pass,
                        error: None,
                    })
                },
            );
        }
    }
    if with_oracle {
        push_result(
            &mut out,
            id,
            I::Oracle,
            &detail,
            oracle_disagreement(p, w, n, spec.reading),
            |out, (err, name)| {
                out.push(SlackRecord {
                    instance: id,
                    inequality: I::Oracle,
                    detail: format!("worst {name} {detail}"),
                    slack: -err,
                    scale: 1.0,
                    threshold: spec.oracle_tol,
                    pass: err <= spec.oracle_tol,
                    error: None,
                })
            },
        );
    }
    out
}

fn loewner_record(
    instance: u64,
    id: InequalityId,
    detail: String,
    side: &crate::operator::SideReport,
    tol: Tolerance,
) -> SlackRecord {
    let l = &side.loewner;
    SlackRecord {
        instance,
        inequality: id,
        detail,
        slack: l.lambda_min,
        scale: l.scale,
        threshold: tol.threshold(l.scale, l.scale),
        pass: l.pass,
        error: None,
    }
}

fn operator_records(
    instance: u64,
    inst: &OrderedPairInstance,
    w: Weight,
    n: usize,
    spec: &CaseSpec,
) -> Vec<SlackRecord> {
    use InequalityId as I;
    let tol = spec.tol;
    let detail = format!("dim={} h={} nu={} n={}", inst.dim(), inst.h(), w, n);
    let mut out = Vec::new();
    let mut add = |id: I, res: Result<OperatorChainReport>, prefix: &str| {
        push_result(&mut out, instance, id, &detail, res, |out, rep| {
            for (side, s) in rep.sides() {
                let label = if prefix.is_empty() {
                    side.to_string()
                } else {
                    format!("{prefix}_{side}")
                };
                out.push(loewner_record(instance, id, format!("{label} {detail}"), s, tol));
            }
        })
    };
    add(I::OpChain, op_chain_check(inst, w, n, tol, spec.reading), "");
    add(I::OpRev, op_reverse_check(inst, w, n, tol, spec.reading), "");
    add(I::OpHeinz, op_heinz_check(inst, w, n, tol, spec.reading), "");
    add(
        I::Baselines,
        liao_wu_baseline_check(inst, w, tol, spec.reading),
        "liao_wu",
    );
    out
}

fn hs_records(instance: u64, inst: &HsInstance, w: Weight, t: usize, spec: &CaseSpec) -> Vec<SlackRecord> {
    use InequalityId as I;
    let tol = spec.tol;
    let detail = format!("dim={} nu={} t={} sign={:?}", inst.dim(), w, t, spec.hs_sign).to_lowercase();
    let mut out = Vec::new();
    let mut add = |id: I, res: Result<HsReport>| {
        push_result(&mut out, instance, id, &detail, res, |out, rep| {
            let sides: &[&str] = if rep.reports.len() == 2 {
                &["left", "right"]
            } else {
                &["reverse"]
            };
            for (side, r) in sides.iter().zip(&rep.reports) {
                out.push(SlackRecord::from_report(instance, id, format!("{side} {detail}"), r));
            }
        })
    };
    add(I::HsChain, hs_chain_check(inst, w, t, tol, spec.hs_sign));
    add(I::HsRev, hs_reverse_check(inst, w, t, tol, spec.hs_sign, spec.reading));
    out
}

enum MatrixJob {
    Operator {
        id: u64,
        dim: usize,
        gap: f64,
        nu: f64,
        n: usize,
        stream: u64,
    },
    Hs {
        id: u64,
        dim: usize,
        nu: f64,
        t: usize,
        stream: u64,
    },
    FixedOperator {
        id: u64,
        a: Vec<f64>,
        b: Vec<f64>,
        nu: f64,
        n: usize,
    },
    IdentityHs {
        id: u64,
        dim: usize,
        nu: f64,
        t: usize,
    },
}

fn run_matrix_job(job: &MatrixJob, spec: &CaseSpec) -> Vec<SlackRecord> {
    let w = |nu: f64| Weight::new(nu).expect("validated weight");
    match *job {
        MatrixJob::Operator {
            id,
            dim,
            gap,
            nu,
            n,
            stream,
        } => {
            let mut rng = instance_rng(spec.seed, stream);
            match ordered_pair_from(&mut rng, dim, gap) {
                Ok(inst) => operator_records(id, &inst, w(nu), n, spec),
                Err(e) => vec![SlackRecord::failed(
                    id,
                    InequalityId::OpChain,
                    format!("dim={dim} gap={gap}"),
                    &e,
                )],
            }
        }
        MatrixJob::Hs { id, dim, nu, t, stream } => {
            let mut rng = instance_rng(spec.seed, stream);
            match hs_instance_from(&mut rng, dim) {
                Ok(inst) => hs_records(id, &inst, w(nu), t, spec),
                Err(e) => vec![SlackRecord::failed(id, InequalityId::HsChain, format!("dim={dim}"), &e)],
            }
        }
        MatrixJob::FixedOperator {
            id,
            ref a,
            ref b,
            nu,
            n,
        } => {
            let inst = SpdMatrix::from_diag(a)
                .and_then(|a| Ok((a, SpdMatrix::from_diag(b)?)))
                .and_then(|(a, b)| OrderedPairInstance::new(a, b));
            match inst {
                Ok(inst) => operator_records(id, &inst, w(nu), n, spec),
                Err(e) => vec![SlackRecord::failed(id, InequalityId::OpChain, "fixed", &e)],
            }
        }
        MatrixJob::IdentityHs { id, dim, nu, t } => {
            match HsInstance::new(
                SpdMatrix::identity(dim),
                SpdMatrix::identity(dim),
                Matrix::identity(dim),
            ) {
                Ok(inst) => hs_records(id, &inst, w(nu), t, spec),
                Err(e) => vec![SlackRecord::failed(id, InequalityId::HsChain, "identity", &e)],
            }
        }
    }
}

fn matrix_jobs(spec: &CaseSpec, first_id: u64) -> Vec<MatrixJob> {
    let mut jobs = vec![
        MatrixJob::FixedOperator {
            id: first_id,
            a: vec![1.0; 3],
            b: vec![4.0; 3],
            nu: 0.3,
            n: 2,
        },
        MatrixJob::FixedOperator {
            id: first_id + 1,
            a: vec![2.0; 2],
            b: vec![2.0; 2],
            nu: 0.3,
            n: 2,
        },
        MatrixJob::FixedOperator {
            id: first_id + 2,
            a: vec![1.0, 2.0],
            b: vec![4.0, 9.0],
            nu: 0.25,
            n: 1,
        },
        MatrixJob::IdentityHs {
            id: first_id + 3,
            dim: 3,
            nu: 0.5,
            t: 1,
        },
    ];
    let mut id = first_id + jobs.len() as u64;
    for i in 0..spec.matrix_count as u64 {
        let mut rng = instance_rng(spec.seed, OPERATOR_STREAM + 2 * i);
        let dim = spec.dims[rng.gen_range(0..spec.dims.len())];
        let gap = spec.gaps[rng.gen_range(0..spec.gaps.len())];
        let nu = spec.matrix_nu_set[rng.gen_range(0..spec.matrix_nu_set.len())];
        let n = spec.matrix_n_set[rng.gen_range(0..spec.matrix_n_set.len())];
        jobs.push(MatrixJob::Operator {
            id,
            dim,
            gap,
            nu,
            n,
            stream: OPERATOR_STREAM + 2 * i + 1,
        });
        id += 1;
    }
    for i in 0..spec.matrix_count as u64 {
        let mut rng = instance_rng(spec.seed, HS_STREAM + 2 * i);
        let dim = spec.dims[rng.gen_range(0..spec.dims.len())];
        let nu = spec.matrix_nu_set[rng.gen_range(0..spec.matrix_nu_set.len())];
        let t = spec.hs_t_set[rng.gen_range(0..spec.hs_t_set.len())];
        jobs.push(MatrixJob::Hs {
            id,
            dim,
            nu,
            t,
            stream: HS_STREAM + 2 * i + 1,
        });
        id += 1;
    }
    jobs
}

/// Aggregate statistics of one inequality id.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdSummary {
    pub inequality: InequalityId,
    pub records: usize,
    pub failures: usize,
    pub errors: usize,
    pub min_relative_slack: f64,
    pub mean_relative_slack: f64,
}

/// How the lower bound of the root chain moves with the depth, over the
/// random scalar instances with `ν ∈ (0, 1)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MonotonicityCount {
    pub cases: usize,
    pub nondecreasing: usize,
    pub nonincreasing: usize,
    pub neither: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub seed: u64,
    pub scalar_cases: usize,
    pub matrix_cases: usize,
    pub records: usize,
    pub failures: usize,
    pub by_inequality: Vec<IdSummary>,
    /// Ids of the enumeration with no record.
    pub missing: Vec<InequalityId>,
    pub y1_lower_monotonicity: MonotonicityCount,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub records: Vec<SlackRecord>,
    pub summary: SweepSummary,
}

const MONOTONE_DEPTH: usize = 8;

fn lower_monotonicity(cases: &[ScalarCase]) -> MonotonicityCount {
    let classes: Vec<Option<(bool, bool)>> = cases
        .par_iter()
        .filter(|c| !c.forced && !c.weight.is_endpoint())
        .map(|c| {
            let p = ScalarPair::new(c.a, c.b).ok()?;
            let lows: Vec<f64> = (1..=MONOTONE_DEPTH)
                .map(|n| chain_y1(p, c.weight, n).map(|ch| ch.lower))
                .collect::<Result<_>>()
                .ok()?;
            let up = lows.windows(2).all(|w| w[1] >= w[0]);
            let down = lows.windows(2).all(|w| w[1] <= w[0]);
            Some((up, down))
        })
        .collect();
    let mut m = MonotonicityCount::default();
    for (up, down) in classes.into_iter().flatten() {
        m.cases += 1;
        m.nondecreasing += up as usize;
        m.nonincreasing += down as usize;
        m.neither += (!up && !down) as usize;
    }
    m
}

fn summarize(
    spec: &CaseSpec,
    records: &[SlackRecord],
    scalar_cases: usize,
    matrix_cases: usize,
    mono: MonotonicityCount,
) -> SweepSummary {
    let mut groups: BTreeMap<InequalityId, Vec<&SlackRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.inequality).or_default().push(r);
    }
    let by_inequality = groups
        .iter()
        .map(|(&id, rs)| {
            let finite: Vec<f64> = rs
                .iter()
                .filter(|r| r.error.is_none())
                .map(|r| r.relative_slack())
                .collect();
            IdSummary {
                inequality: id,
                records: rs.len(),
                failures: rs.iter().filter(|r| !r.pass).count(),
                errors: rs.iter().filter(|r| r.error.is_some()).count(),
                min_relative_slack: finite.iter().copied().fold(f64::INFINITY, f64::min),
                mean_relative_slack: if finite.is_empty() {
                    0.0
                } else {
                    finite.iter().sum::<f64>() / finite.len() as f64
                },
            }
        })
        .collect();
    let missing = InequalityId::ALL
        .iter()
        .copied()
        .filter(|id| !groups.contains_key(id))
        .collect();
    let failures = records.iter().filter(|r| !r.pass).count();
    SweepSummary {
        seed: spec.seed,
        scalar_cases,
        matrix_cases,
        records: records.len(),
        failures,
        by_inequality,
        missing,
        y1_lower_monotonicity: mono,
        pass: failures == 0,
    }
}

/// Runs every inequality on the generated instances. Evaluation fans out
/// over threads; records come back sorted by instance id, then in a fixed
/// per-instance order.
pub fn slack_sweep(spec: &CaseSpec) -> Result<SweepReport> {
    let cases = gen_scalar_cases(spec)?;
    let scalar: Vec<Vec<SlackRecord>> = cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| scalar_records(c, spec, i < spec.oracle_count))
        .collect();
    let first_matrix = cases.len() as u64;
    let jobs = matrix_jobs(spec, first_matrix);
    let matrix: Vec<Vec<SlackRecord>> = jobs.par_iter().map(|j| run_matrix_job(j, spec)).collect();
    let mono = lower_monotonicity(&cases);
    let mut records: Vec<SlackRecord> = scalar.into_iter().chain(matrix).flatten().collect();
    records.sort_by_key(|r| r.instance);
    let summary = summarize(spec, &records, cases.len(), jobs.len(), mono);
    Ok(SweepReport { records, summary })
}

/// One JSON object per line.
pub fn write_jsonl(records: &[SlackRecord], mut out: impl Write) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_csv(records: &[SlackRecord], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

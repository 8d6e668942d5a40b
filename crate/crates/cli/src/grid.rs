use clap::Args;
use refyoung_core::scalar::{baseline_bounds, chain_y1, reverse_y2};
use refyoung_core::{ScalarPair, Tolerance, Weight};
use serde::Serialize;

use crate::output::{emit, render, sig12, TableRow};
use crate::{Failure, Opts};

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Weights: comma-separated values (decimals or `p/q`) or `start:stop:step` ranges.
    #[arg(long, default_value = "0.1:0.9:0.1", allow_hyphen_values = true)]
    pub nu: String,

    /// Ratios b/a: values or ranges as for --nu.
    #[arg(long, default_value = "2,10,100", allow_hyphen_values = true)]
    pub h: String,

    /// Depths: values or `start:stop[:step]` ranges.
    #[arg(long, default_value = "1:5", allow_hyphen_values = true)]
    pub n: String,

    /// The first argument of every pair; b = a·h.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
}

/// One grid point. Slacks are `middle − lower` and `upper − middle`;
/// tightness compares the refined lower bound for `a∇b` with a baseline
/// (negative when the refinement is tighter).
#[derive(Clone, Debug, Serialize)]
pub struct GridRow {
    pub nu: f64,
    pub h: f64,
    pub n: usize,
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
    pub slack_lower: f64,
    pub slack_upper: f64,
    pub reverse: f64,
    pub slack_reverse: f64,
    pub kantorovich_lower: f64,
    pub liao_wu_lower: f64,
    pub tightness_kantorovich: f64,
    pub tightness_liao_wu: f64,
    pub pass: bool,
}

impl TableRow for GridRow {
    const HEADERS: &'static [&'static str] = &[
        "nu",
        "h",
        "n",
        "lower",
        "middle",
        "upper",
        "slack lower",
        "slack upper",
        "reverse",
        "tight vs kant",
        "tight vs liao-wu",
        "pass",
    ];

    fn cells(&self) -> Vec<String> {
        vec![
            sig12(self.nu),
            sig12(self.h),
            self.n.to_string(),
            sig12(self.lower),
            sig12(self.middle),
            sig12(self.upper),
            sig12(self.slack_lower),
            sig12(self.slack_upper),
            sig12(self.reverse),
            sig12(self.tightness_kantorovich),
            sig12(self.tightness_liao_wu),
            if self.pass { "yes" } else { "NO" }.to_string(),
        ]
    }
}

/// Splits a comma-separated axis into items, expanding `start:stop[:step]`.
/// Range points are `start + i·step`, rounded to the decimals written in
/// the range so that `0.1:0.9:0.1` yields exactly the literals `0.1, …, 0.9`.
fn expand_axis(name: &str, spec: &str) -> Result<Vec<String>, Failure> {
    let bad = |msg: String| Failure::Usage(format!("--{name}: {msg}"));
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').map(str::trim).collect();
        match parts.as_slice() {
            [single] => out.push((*single).to_string()),
            [start, stop] | [start, stop, _] => {
                let step = parts.get(2).copied().unwrap_or("1");
                let decimals = parts
                    .iter()
                    .map(|p| p.split_once('.').map_or(0, |(_, f)| f.len()))
                    .max()
                    .unwrap_or(0);
                let parse = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("bad range bound {s:?}: {e}")));
                let (lo, hi, st) = (parse(start)?, parse(stop)?, parse(step)?);
                if !(st > 0.0 && st.is_finite() && lo.is_finite() && hi.is_finite()) {
                    return Err(bad(format!("bad range {item:?}")));
                }
                if hi < lo {
                    continue;
                }
                let count = ((hi - lo) / st + 1e-9).floor() as usize + 1;
                for i in 0..count {
                    out.push(format!("{:.*}", decimals, lo + i as f64 * st));
                }
            }
            _ => return Err(bad(format!("bad item {item:?}"))),
        }
    }
    Ok(out)
}

pub fn grid_rows(
    a: f64,
    nus: &[Weight],
    hs: &[f64],
    ns: &[usize],
    tol: Tolerance,
) -> refyoung_core::Result<Vec<GridRow>> {
    let mut rows = Vec::with_capacity(nus.len() * hs.len() * ns.len());
    for &w in nus {
        for &h in hs {
            let p = ScalarPair::new(a, a * h)?;
            let base = baseline_bounds(p, w)?;
            for &n in ns {
                let chain = chain_y1(p, w, n)?;
                let (lo, hi) = chain.check(tol);
                let rev = reverse_y2(p, w, n, tol)?;
                let refined_slack = chain.middle - chain.lower;
                rows.push(GridRow {
                    nu: w.nu(),
                    h,
                    n,
                    lower: chain.lower,
                    middle: chain.middle,
                    upper: chain.upper,
                    slack_lower: lo.slack,
                    slack_upper: hi.slack,
                    reverse: rev.rhs,
                    slack_reverse: rev.slack,
                    kantorovich_lower: base.kantorovich_lower,
                    liao_wu_lower: base.liao_wu_lower,
                    tightness_kantorovich: refined_slack - (base.arith - base.kantorovich_lower),
                    tightness_liao_wu: refined_slack - (base.arith - base.liao_wu_lower),
                    pass: lo.pass && hi.pass && rev.pass,
                });
            }
        }
    }
    Ok(rows)
}

pub fn run(opts: &Opts, args: &SweepArgs) -> Result<(), Failure> {
    let nus = expand_axis("nu", &args.nu)?
        .iter()
        .map(|s| s.parse::<Weight>())
        .collect::<Result<Vec<_>, _>>()?;
    let hs = expand_axis("h", &args.h)?
        .iter()
        .map(|s| {
            s.parse::<f64>()
                .map_err(|e| Failure::Usage(format!("--h: bad value {s:?}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let ns = expand_axis("n", &args.n)?
        .iter()
        .map(|s| match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(Failure::Usage(format!("--n: bad depth {s:?}"))),
            Ok(n) => Ok(opts.depth(n)),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if nus.is_empty() || hs.is_empty() || ns.is_empty() {
        return Err(Failure::Usage("empty grid".into()));
    }
    if !(args.a > 0.0 && args.a.is_finite()) {
        return Err(Failure::Usage(format!("--a must be positive, got {}", args.a)));
    }
    let rows = grid_rows(args.a, &nus, &hs, &ns, opts.tolerance())?;
    emit(&render(&rows, opts.format)?, opts.out.as_deref())?;
    if rows.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Failure::Violated)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_range_hits_literals() {
        let v = expand_axis("nu", "0.1:0.9:0.1").unwrap();
        assert_eq!(v.len(), 9);
        assert_eq!(v[2], "0.3");
        assert_eq!(v[8], "0.9");
    }

    #[test]
    fn mixed_items() {
        assert_eq!(expand_axis("n", "1:3,7").unwrap(), ["1", "2", "3", "7"]);
        assert_eq!(expand_axis("nu", "1/4, 0.5").unwrap(), ["1/4", "0.5"]);
    }

    #[test]
    fn reversed_range_is_empty() {
        assert!(expand_axis("h", "5:1").unwrap().is_empty());
        assert!(expand_axis("h", "1:5:0").is_err());
    }
}

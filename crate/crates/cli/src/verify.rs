use std::fs::File;
use std::io::BufWriter;

use clap::Args;
use refyoung_core::harness::{slack_sweep, write_csv, write_jsonl, CaseSpec, SweepReport};

use crate::output::{emit, sig12, table};
use crate::{Failure, Format, Opts};

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Random scalar instances.
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,

    /// Random instances per matrix family (operator and Hilbert-Schmidt).
    #[arg(long, default_value_t = 100)]
    pub matrix_count: usize,

    /// Scalar instances also compared with the extended-precision oracle.
    #[arg(long, default_value_t = 1000)]
    pub oracle_count: usize,
}

/// Failures listed in the summary.
const SHOWN_FAILURES: usize = 20;

pub fn run(opts: &Opts, args: &VerifyArgs) -> Result<(), Failure> {
    let defaults = CaseSpec::default();
    let spec = CaseSpec {
        seed: opts.seed,
        count: args.count,
        matrix_count: args.matrix_count,
        oracle_count: args.oracle_count,
        n_set: defaults.n_set.iter().map(|&n| opts.depth(n)).collect(),
        matrix_n_set: defaults.matrix_n_set.iter().map(|&n| opts.depth(n)).collect(),
        hs_t_set: defaults.hs_t_set.iter().map(|&n| opts.depth(n)).collect(),
        tol: opts.tolerance(),
        hs_sign: opts.sign(),
        reading: opts.reading(),
        ..defaults
    };
    let report = slack_sweep(&spec)?;
    if let Some(path) = &opts.out {
        let file = BufWriter::new(File::create(path)?);
        match opts.format {
            Format::Csv => write_csv(&report.records, file)?,
            Format::Json | Format::Table => write_jsonl(&report.records, file)?,
        }
    }
    let text = match opts.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.summary).map_err(refyoung_core::Error::from)?;
            s.push('\n');
            s
        }
        Format::Csv => summary_csv(&report)?,
        Format::Table => summary_table(&report),
    };
    emit(text.as_bytes(), None)?;
    if report.summary.pass {
        Ok(())
    } else {
        Err(Failure::Violated)
    }
}

fn summary_csv(report: &SweepReport) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for s in &report.summary.by_inequality {
        w.serialize(s).map_err(refyoung_core::Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Numeric(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn summary_table(report: &SweepReport) -> String {
    let s = &report.summary;
    let mut out = format!(
        "seed {}: {} scalar cases, {} matrix cases, {} records\n\n",
        s.seed, s.scalar_cases, s.matrix_cases, s.records
    );
    let rows: Vec<Vec<String>> = s
        .by_inequality
        .iter()
        .map(|i| {
            vec![
                i.inequality.to_string(),
                i.records.to_string(),
                i.failures.to_string(),
                sig12(i.min_relative_slack),
                sig12(i.mean_relative_slack),
            ]
        })
        .collect();
    out.push_str(&table(
        &["inequality", "records", "failures", "min rel slack", "mean rel slack"],
        &rows,
    ));
    if !s.missing.is_empty() {
        let names: Vec<String> = s.missing.iter().map(ToString::to_string).collect();
        out.push_str(&format!("\nnot exercised: {}\n", names.join(", ")));
    }
    let m = &s.y1_lower_monotonicity;
    out.push_str(&format!(
        "\ny1 lower bound over n = 1..8: {} nondecreasing, {} nonincreasing, {} neither (of {})\n",
        m.nondecreasing, m.nonincreasing, m.neither, m.cases
    ));
    let failing: Vec<_> = report.records.iter().filter(|r| !r.pass).collect();
    if !failing.is_empty() {
        out.push_str(&format!("\n{} failing records", failing.len()));
        if failing.len() > SHOWN_FAILURES {
            out.push_str(&format!(" (first {SHOWN_FAILURES})"));
        }
        out.push_str(":\n");
        for r in failing.iter().take(SHOWN_FAILURES) {
            match &r.error {
                Some(e) => out.push_str(&format!(
                    "  {} #{} {}: error: {e}\n",
                    r.inequality, r.instance, r.detail
                )),
                None => out.push_str(&format!(
                    "  {} #{} {}: slack {} below -{}\n",
                    r.inequality,
                    r.instance,
                    r.detail,
                    sig12(r.slack),
                    sig12(r.threshold)
                )),
            }
        }
    }
    out.push_str(if s.pass { "\nPASS\n" } else { "\nFAIL\n" });
    out
}

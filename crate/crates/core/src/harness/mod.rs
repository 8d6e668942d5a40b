//! Instance generation, the extended-precision oracle and slack sweeps.

mod cases;
mod oracle;
mod sweep;

pub use cases::{
    forced_scalar_cases, gen_ordered_pair, gen_scalar_cases, gen_spd, random_orthogonal, CaseSpec, NuSet, ScalarCase,
};
pub use oracle::{highprec_all, highprec_chain_oracle, OracleValues, ORACLE_PRECISION};
pub use sweep::{
    oracle_disagreement, slack_sweep, write_csv, write_jsonl, IdSummary, InequalityId, MonotonicityCount, SlackRecord,
    SweepReport, SweepSummary,
};

//! Scenario configuration, Monte-Carlo orchestration and result files.

mod output;
mod scenario;
mod sim;
mod study;

pub use output::{
    emit_results, read_ber_csv, write_ber_csv, write_fraction_csv, write_rank_csv,
    write_scenario_json, BerRow, BER_HEADER, FRACTION_HEADER,
};
pub use scenario::{parse_snr_range, snr_range, Scenario, SubspaceMode};
pub use sim::{
    block_rng, run_block, sweep, sweep_blocks, sweep_with_threads, BerPoint, BlockOutcome,
    SimResult,
};
pub use study::{fraction_study, interference_block, measure_ranks, rank_study, RankCase, RankSummary};

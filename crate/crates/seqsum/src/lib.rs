//! File formats, benchmarking and the command-line front-end for
//! [`seqsum_core`].

use seqsum_core::coreflow::mine_coreflow;
use seqsum_core::sententree::{mine_sententree, SentenTreeConfig};
use seqsum_core::summary::Technique;
use seqsum_core::synopsis::{mine_synopsis, SynopsisParams};
use seqsum_core::{Dataset, MinSupport, MiningError, Summary};

pub mod bench;
pub mod cli;
pub mod insights;
pub mod io;
pub mod summary_json;

/// Runs `technique` at `granularity`: a minimum-support fraction for
/// CoreFlow and SentenTree, λ for Sequence Synopsis.
pub fn mine(technique: Technique, data: &Dataset, granularity: f64) -> Result<Summary, MiningError> {
    match technique {
        Technique::CoreFlow => mine_coreflow(data, MinSupport::new(granularity)?),
        Technique::SentenTree => mine_sententree(data, MinSupport::new(granularity)?, SentenTreeConfig::default()),
        Technique::Synopsis => mine_synopsis(data, &SynopsisParams::new(granularity, data)?),
    }
}

pub(crate) fn xml_escape(s: &str) -> String {
    seqsum_core::render::escape_xml(s).into_owned()
}

use serde::{Deserialize, Serialize};

/// Resource caps shared by the evaluation, oracle and enumeration routines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Formula-node evaluations allowed in one Boolean evaluation.
    pub eval_cap: u64,
    /// Search nodes allowed in one oracle call.
    pub oracle_nodes: u64,
    /// Largest subset size examined by conservativity checks; `None` is exhaustive.
    pub max_subset: Option<usize>,
    /// Largest closure universe for enumerated consistency properties.
    pub universe_limit: usize,
    /// Largest domain a mixing completion may produce.
    pub completion_cap: usize,
    /// Largest closure universe for pipelines that enumerate types rather than subsets.
    #[serde(default = "default_closure_limit")]
    pub closure_limit: usize,
}

fn default_closure_limit() -> usize {
    512
}

impl Default for Budget {
    fn default() -> Self {
        Budget { eval_cap: 1_000_000, oracle_nodes: 200_000, max_subset: None, universe_limit: 16, completion_cap: 4096, closure_limit: 512 }
    }
}

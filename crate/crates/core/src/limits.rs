/// Hard caps shared by the enumeration, counting and sublattice searches.
/// Exceeding any of them is reported as [`crate::Error::Capacity`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of lattice vectors a single enumeration may produce.
    pub max_vectors: usize,
    /// Maximum number of vectors inside one generalized-theta ball.
    pub gts_max_candidates: usize,
    /// Maximum number of subsets visited while counting one series.
    pub gts_max_subsets: u64,
    /// Candidate vectors allowed in a densest-sublattice search before the
    /// short-list fallback is used.
    pub dsp_max_candidates: usize,
    /// Size of the short list (antipodal representatives) used by the fallback.
    pub dsp_shortlist: usize,
    /// Whether the short-list fallback may be used at all.
    pub dsp_allow_shortlist: bool,
}

pub const MAX_VECTORS_ENV: &str = "LATHETA_MAX_VECTORS";

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_vectors: 5_000_000,
            gts_max_candidates: 20_000,
            gts_max_subsets: 1_000_000_000,
            dsp_max_candidates: 50_000,
            dsp_shortlist: 2_000,
            dsp_allow_shortlist: true,
        }
    }
}

impl Limits {
    /// Defaults, with `LATHETA_MAX_VECTORS` applied when set to a positive integer.
    pub fn from_env() -> Self {
        let mut limits = Self::default();
        if let Some(cap) = std::env::var(MAX_VECTORS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v > 0)
        {
            limits.max_vectors = cap;
        }
        limits
    }
}

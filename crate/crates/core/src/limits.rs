//! Size caps shared by the exponential searches and the homology code.

/// Environment variable overriding every element cap.
pub const MAX_ELEMENTS_ENV: &str = "PIRCONLAB_MAX_ELEMENTS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest poset handed to the isomorphism and SPM searches or to homology.
    pub max_elements: usize,
    /// Largest Coxeter group that will be enumerated.
    pub max_group_order: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_elements: 64,
            max_group_order: 5040,
        }
    }
}

impl Limits {
    /// Defaults, with `max_elements` taken from [`MAX_ELEMENTS_ENV`] when it parses.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Some(cap) = std::env::var(MAX_ELEMENTS_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            limits.max_elements = cap;
        }
        limits
    }
}

use serde::{Deserialize, Serialize};

/// Hard caps on the enumerations. Exceeding one is reported as
/// [`Error::Capacity`](crate::Error::Capacity), never truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_group_order: usize,
    pub max_normal_subgroups: usize,
    pub max_congruences: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_group_order: 200_000,
            max_normal_subgroups: 20_000,
            max_congruences: 100_000,
        }
    }
}

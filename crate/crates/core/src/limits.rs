use std::sync::OnceLock;

/// Global size caps, read once from the environment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest group stored as a multiplication table.
    pub order: usize,
    /// Largest number of coordinates of a single cochain group.
    pub cochain: usize,
}

pub const DEFAULT_ORDER_CAP: usize = 360;
pub const DEFAULT_COCHAIN_CAP: usize = 20_000;
pub const ORDER_CAP_VAR: &str = "PROFINITY_ORDER_CAP";
pub const SIZE_CAP_VAR: &str = "PROFINITY_SIZE_CAP";

impl Default for Caps {
    fn default() -> Self {
        Caps { order: DEFAULT_ORDER_CAP, cochain: DEFAULT_COCHAIN_CAP }
    }
}

impl Caps {
    pub fn from_env() -> Self {
        let read = |k: &str, d: usize| std::env::var(k).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(d);
        Caps { order: read(ORDER_CAP_VAR, DEFAULT_ORDER_CAP), cochain: read(SIZE_CAP_VAR, DEFAULT_COCHAIN_CAP) }
    }
}

pub fn caps() -> Caps {
    static CAPS: OnceLock<Caps> = OnceLock::new();
    *CAPS.get_or_init(Caps::from_env)
}

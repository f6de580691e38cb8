// Runtime switch for mutations embedded with `mutation_active` guards.
//
// MUTFORGE_ACTIVE holds a comma-separated list of active mutant names. It is
// read once per process; an unset variable leaves every mutant inactive.

use std::sync::OnceLock;

pub const ACTIVE_VAR: &str = "MUTFORGE_ACTIVE";

/// Whether `name` is an element of the comma-separated `list`.
pub fn is_active_in(list: &str, name: &str) -> bool {
    !name.is_empty() && list.split(',').any(|n| n == name)
}

pub fn mutation_active(name: &str) -> bool {
    static ACTIVE: OnceLock<String> = OnceLock::new();
    let list = ACTIVE.get_or_init(|| std::env::var(ACTIVE_VAR).unwrap_or_default());
    is_active_in(list, name)
}

//! Scenarios shipped with the binary.

/// `(name, TOML text)` for every bundled scenario.
pub const BUNDLED: &[(&str, &str)] = &[
    ("fig2-rows", include_str!("../scenarios/fig2-rows.toml")),
    ("fig7-grid", include_str!("../scenarios/fig7-grid.toml")),
    ("table1-spacing", include_str!("../scenarios/table1-spacing.toml")),
    ("table1-aperture", include_str!("../scenarios/table1-aperture.toml")),
    ("table1-distance", include_str!("../scenarios/table1-distance.toml")),
    ("table2-spacing", include_str!("../scenarios/table2-spacing.toml")),
    ("table2-aperture", include_str!("../scenarios/table2-aperture.toml")),
];

pub fn find(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

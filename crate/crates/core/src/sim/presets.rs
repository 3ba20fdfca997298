//! Shipped scenario files.

const PRESETS: &[(&str, &str)] = &[
    ("symmetric", include_str!("../../presets/symmetric.json")),
    (
        "symmetric_elements",
        include_str!("../../presets/symmetric_elements.json"),
    ),
    ("asymmetric", include_str!("../../presets/asymmetric.json")),
    (
        "asymmetric_intensity",
        include_str!("../../presets/asymmetric_intensity.json"),
    ),
];

/// Names of all presets.
pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(name, _)| *name).collect()
}

/// JSON text of a preset.
pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::ScenarioConfig;

    #[test]
    fn every_preset_validates() {
        for name in preset_names() {
            ScenarioConfig::load(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(preset("nope").is_none());
    }
}

use crate::error::{Error, Result};

use super::config::{parse_config, RunConfig};

const PRESETS: [(&str, &str); 9] = [
    ("fig2a", include_str!("../../presets/fig2a.toml")),
    ("fig2b", include_str!("../../presets/fig2b.toml")),
    ("fig2c", include_str!("../../presets/fig2c.toml")),
    ("fig2d", include_str!("../../presets/fig2d.toml")),
    ("fig4a", include_str!("../../presets/fig4a.toml")),
    ("fig4b", include_str!("../../presets/fig4b.toml")),
    ("fig4c", include_str!("../../presets/fig4c.toml")),
    ("fig4d", include_str!("../../presets/fig4d.toml")),
    ("fig4-alt-theta", include_str!("../../presets/fig4-alt-theta.toml")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn preset_text(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}

pub fn preset(name: &str) -> Result<RunConfig> {
    parse_config(preset_text(name)?)
}

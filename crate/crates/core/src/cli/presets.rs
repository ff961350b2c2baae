//! Bundled figure presets.

use crate::error::{Error, Result};
use crate::model::SystemConfig;

pub const PRESET_NAMES: [&str; 8] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"];

fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig2" => include_str!("../../presets/fig2.json"),
        "fig3" => include_str!("../../presets/fig3.json"),
        "fig4" => include_str!("../../presets/fig4.json"),
        "fig5" => include_str!("../../presets/fig5.json"),
        "fig6" => include_str!("../../presets/fig6.json"),
        "fig7" => include_str!("../../presets/fig7.json"),
        "fig8" => include_str!("../../presets/fig8.json"),
        "fig9" => include_str!("../../presets/fig9.json"),
        _ => return None,
    })
}

/// Parsed, validated preset config.
pub fn preset(name: &str) -> Result<SystemConfig> {
    let text = source(name).ok_or_else(|| Error::UnknownFigure(name.to_string()))?;
    SystemConfig::from_json_str(text)
}

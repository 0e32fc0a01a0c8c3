//! Built-in triangulation presets.
//!
//! `fig8` is Thurston's two-tetrahedron triangulation of the figure-eight
//! knot complement. `x4`..`x7` are the twist-knot triangulations; their
//! gluing tables were reconstructed once from the published edge equations
//! and are pinned by golden tests on the derived matrices.
//!
//! `FAMEDKIT_PRESET_DIR` overrides the search path: `<dir>/<name>.tri` wins
//! over the embedded copy.

use crate::tri::{parse_triangulation, OrderedTriangulation, TriError};

const FIG8: &str = include_str!("../presets/fig8.tri");
const X4: &str = include_str!("../presets/x4.tri");
const X5: &str = include_str!("../presets/x5.tri");
const X6: &str = include_str!("../presets/x6.tri");
const X7: &str = include_str!("../presets/x7.tri");

pub fn names() -> &'static [&'static str] {
    &["fig8", "x4", "x5", "x6", "x7"]
}

pub fn source(name: &str) -> Option<&'static str> {
    match name {
        "fig8" => Some(FIG8),
        "x4" => Some(X4),
        "x5" => Some(X5),
        "x6" => Some(X6),
        "x7" => Some(X7),
        _ => None,
    }
}

/// Load a preset by name, honoring `FAMEDKIT_PRESET_DIR`.
pub fn load(name: &str) -> Result<OrderedTriangulation, TriError> {
    if let Ok(dir) = std::env::var("FAMEDKIT_PRESET_DIR") {
        let path = std::path::Path::new(&dir).join(format!("{name}.tri"));
        if let Ok(text) = std::fs::read_to_string(&path) {
            return parse_triangulation(&text);
        }
    }
    let src = source(name).ok_or_else(|| TriError::MissingCurve {
        name: format!("preset {name}"),
    })?;
    parse_triangulation(src)
}

/// Resolve an input that is either a preset name or a path to a `.tri` file.
pub fn load_path_or_preset(input: &str) -> Result<OrderedTriangulation, String> {
    if source(input).is_some() || std::env::var("FAMEDKIT_PRESET_DIR").is_ok() {
        if let Ok(t) = load(input) {
            return Ok(t);
        }
    }
    let text = std::fs::read_to_string(input).map_err(|e| format!("{input}: {e}"))?;
    parse_triangulation(&text).map_err(|e| e.to_string())
}

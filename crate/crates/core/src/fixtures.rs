//! Built-in reference configurations.
//!
//! | name | kernel | potential | n |
//! |------|--------|-----------|---|
//! | F1 | `b = 1` | `V = -0.3` | 128 |
//! | F2 | `b = 1` | `-1` on `[0, 1/2)` | 256 |
//! | F3 | Gaussian, sigma 0.2 | `-0.5` on `[0, 1/4)` | 128 |
//! | F4 | `1 + 0.5 sin(2 pi z)` | `V = -0.3` | 128 |

use std::path::Path;

use crate::config::{parse_config, RunConfig};
use crate::error::{Error, Result};

pub const NAMES: [&str; 4] = ["F1", "F2", "F3", "F4"];

const SOURCES: [&str; 4] = [
    include_str!("../fixtures/F1.json"),
    include_str!("../fixtures/F2.json"),
    include_str!("../fixtures/F3.json"),
    include_str!("../fixtures/F4.json"),
];

/// JSON source of a fixture by bare name (`"F2"`).
pub fn source(name: &str) -> Option<&'static str> {
    NAMES.iter().position(|n| *n == name).map(|i| SOURCES[i])
}

/// Matches `F2`, `fixtures/F2` or `fixtures/F2.json`.
pub fn lookup(path: &Path) -> Option<&'static str> {
    let stem = path.file_stem()?.to_str()?;
    if path.extension().is_some_and(|e| e != "json") {
        return None;
    }
    let parent = path.parent().map(|p| p.as_os_str().to_string_lossy().into_owned());
    match parent.as_deref() {
        None | Some("") | Some("fixtures") => source(stem),
        Some(p) if p.ends_with("/fixtures") => source(stem),
        _ => None,
    }
}

pub fn config(name: &str) -> Result<RunConfig> {
    let text = source(name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown fixture {name:?}")))?;
    parse_config(text, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_parse() {
        for name in NAMES {
            let c = config(name).unwrap();
            crate::config::Problem::build(&c).unwrap();
        }
    }

    #[test]
    fn lookup_forms() {
        for p in ["F2", "fixtures/F2", "fixtures/F2.json", "/x/fixtures/F2.json"] {
            assert!(lookup(Path::new(p)).is_some(), "{p}");
        }
        for p in ["F9", "other/F2.json", "fixtures/F2.toml"] {
            assert!(lookup(Path::new(p)).is_none(), "{p}");
        }
    }
}

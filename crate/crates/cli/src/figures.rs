//! Configurations bundled with the binary, one per reproduced figure.

pub struct Figure {
    pub key: &'static str,
    pub config: &'static str,
}

macro_rules! figure {
    ($key:literal, $file:literal) => {
        Figure {
            key: $key,
            config: include_str!(concat!("../configs/", $file, ".json")),
        }
    };
}

pub const FIGURES: &[Figure] = &[
    figure!("fig06", "fig06_two_barriers"),
    figure!("fig07", "fig07_4_barriers"),
    figure!("fig08", "fig08_8_barriers"),
    figure!("fig09", "fig09_16_barriers"),
    figure!("fig10", "fig10_32_barriers_marked"),
    figure!("fig11", "fig11_32_barriers"),
    figure!("fig12", "fig12_banding"),
    figure!("fig13", "fig13_bgc"),
];

/// Looks a figure up by its short key (`fig13`) or full name (`fig13_bgc`).
pub fn find(name: &str) -> Option<&'static Figure> {
    FIGURES
        .iter()
        .find(|f| f.key == name || f.config.contains(&format!("\"name\": \"{name}\"")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use bgcsp_core::ExperimentConfig;

    #[test]
    fn bundled_configs_are_canonical() {
        for f in FIGURES {
            let c = ExperimentConfig::from_json(f.config).unwrap();
            assert!(c.name.starts_with(f.key));
            assert_eq!(c.to_canonical_json(), f.config, "{} is not in canonical form", f.key);
        }
    }

    #[test]
    fn lookup() {
        assert_eq!(find("fig11").unwrap().key, "fig11");
        assert_eq!(find("fig06_two_barriers").unwrap().key, "fig06");
        assert!(find("fig99").is_none());
    }
}

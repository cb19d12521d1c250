//! Simulation parameters and the key=value run-configuration format.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Which spatial feature index scores a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpatialFeature {
    Edge,
    Corner,
    Mad,
    Variance,
}

/// Denoising applied before relevance scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseFilter {
    None,
    Median3,
}

/// What the renderer emits for a region with srs=0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SrsZeroPolicy {
    Zero,
    Hold,
}

/// When the temporal reference frame advances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceUpdate {
    /// Plain frame differencing: the reference is always the previous frame.
    EveryFrame,
    /// The reference for a region is frozen until that region fires.
    OnEvent,
}

macro_rules! str_enum {
    ($ty:ty { $($name:literal => $variant:expr),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($name => Ok($variant),)+
                    other => Err(format!(
                        "unknown value '{other}' (expected one of: {})",
                        [$($name),+].join(", ")
                    )),
                }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let s = match self {
                    $(x if *x == $variant => $name,)+
                    _ => unreachable!(),
                };
                f.write_str(s)
            }
        }
    };
}

str_enum!(SpatialFeature {
    "edge" => SpatialFeature::Edge,
    "corner" => SpatialFeature::Corner,
    "mad" => SpatialFeature::Mad,
    "variance" => SpatialFeature::Variance,
});

str_enum!(NoiseFilter {
    "none" => NoiseFilter::None,
    "median3" => NoiseFilter::Median3,
});

str_enum!(SrsZeroPolicy {
    "zero" => SrsZeroPolicy::Zero,
    "hold" => SrsZeroPolicy::Hold,
});

str_enum!(ReferenceUpdate {
    "every_frame" => ReferenceUpdate::EveryFrame,
    "on_event" => ReferenceUpdate::OnEvent,
});

/// All environment parameters of one simulator run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Region side length N in pixels.
    pub region_size: usize,
    pub spatial_feature: SpatialFeature,
    /// Spatial threshold θs: a point count for edge/corner, intensity units
    /// for mad/variance. A region is spatially relevant when score >= θs.
    pub spatial_threshold: f64,
    /// Per-pixel intensity delta δ: a pixel counts as changed when
    /// |cur - ref| >= δ.
    pub temporal_pixel_delta: u8,
    /// Temporal threshold θt: a region is temporally relevant when its
    /// changed-pixel count >= θt.
    pub temporal_threshold: usize,
    pub noise_filter: NoiseFilter,
    pub srs_zero_policy: SrsZeroPolicy,
    pub reference_update: ReferenceUpdate,
    /// Edge detector: a pixel is an edge point when |Gx|+|Gy| >= this.
    pub edge_gradient_threshold: u32,
    /// Harris detector constant k.
    pub corner_k: f64,
    /// Harris detector: a pixel is a corner point when R >= this.
    pub corner_response_threshold: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            region_size: 8,
            spatial_feature: SpatialFeature::Mad,
            spatial_threshold: 3.0,
            temporal_pixel_delta: 2,
            temporal_threshold: 1,
            noise_filter: NoiseFilter::Median3,
            srs_zero_policy: SrsZeroPolicy::Zero,
            reference_update: ReferenceUpdate::EveryFrame,
            edge_gradient_threshold: 100,
            corner_k: 0.04,
            corner_response_threshold: 1e6,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.region_size < 1 {
            return Err(SimError::InvalidConfig("region_size must be >= 1".into()));
        }
        if !self.spatial_threshold.is_finite() || self.spatial_threshold < 0.0 {
            return Err(SimError::InvalidConfig(
                "spatial_threshold must be finite and >= 0".into(),
            ));
        }
        if !self.corner_k.is_finite() || !self.corner_response_threshold.is_finite() {
            return Err(SimError::InvalidConfig(
                "corner parameters must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Apply one `key=value` override. Keys are the field names.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn parse<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String>
        where
            T::Err: fmt::Display,
        {
            value
                .parse()
                .map_err(|e| format!("bad value for {key}: {e}"))
        }
        match key {
            "region_size" => self.region_size = parse(key, value)?,
            "spatial_feature" => self.spatial_feature = parse(key, value)?,
            "spatial_threshold" => self.spatial_threshold = parse(key, value)?,
            "temporal_pixel_delta" => self.temporal_pixel_delta = parse(key, value)?,
            "temporal_threshold" => self.temporal_threshold = parse(key, value)?,
            "noise_filter" => self.noise_filter = parse(key, value)?,
            "srs_zero_policy" => self.srs_zero_policy = parse(key, value)?,
            "reference_update" => self.reference_update = parse(key, value)?,
            "edge_gradient_threshold" => self.edge_gradient_threshold = parse(key, value)?,
            "corner_k" => self.corner_k = parse(key, value)?,
            "corner_response_threshold" => self.corner_response_threshold = parse(key, value)?,
            other => return Err(format!("unknown configuration key '{other}'")),
        }
        Ok(())
    }

    /// Apply a whole key=value file. Blank lines and `#` comments are skipped.
    pub fn apply_file(&mut self, path: &std::path::Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::io(path.display().to_string(), e))?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                SimError::InvalidConfig(format!(
                    "{}:{}: expected key=value, got '{line}'",
                    path.display(),
                    i + 1
                ))
            })?;
            self.apply_kv(key.trim(), value.trim()).map_err(|e| {
                SimError::InvalidConfig(format!("{}:{}: {e}", path.display(), i + 1))
            })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn enum_round_trip_via_str() {
        for f in [
            SpatialFeature::Edge,
            SpatialFeature::Corner,
            SpatialFeature::Mad,
            SpatialFeature::Variance,
        ] {
            assert_eq!(f.to_string().parse::<SpatialFeature>().unwrap(), f);
        }
        assert_eq!(
            "every_frame".parse::<ReferenceUpdate>().unwrap(),
            ReferenceUpdate::EveryFrame
        );
        assert!("sobel".parse::<SpatialFeature>().is_err());
    }

    #[test]
    fn kv_overrides_fields() {
        let mut cfg = SimConfig::default();
        cfg.apply_kv("region_size", "16").unwrap();
        cfg.apply_kv("spatial_feature", "edge").unwrap();
        cfg.apply_kv("spatial_threshold", "5").unwrap();
        assert_eq!(cfg.region_size, 16);
        assert_eq!(cfg.spatial_feature, SpatialFeature::Edge);
        assert_eq!(cfg.spatial_threshold, 5.0);
        assert!(cfg.apply_kv("nope", "1").is_err());
        assert!(cfg.apply_kv("region_size", "x").is_err());
    }

    #[test]
    fn config_file_parsing() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# run setup").unwrap();
        writeln!(file, "region_size = 4").unwrap();
        writeln!(file).unwrap();
        writeln!(file, "noise_filter=none").unwrap();
        let mut cfg = SimConfig::default();
        cfg.apply_file(file.path()).unwrap();
        assert_eq!(cfg.region_size, 4);
        assert_eq!(cfg.noise_filter, NoiseFilter::None);
    }

    #[test]
    fn config_file_bad_line_reports_position() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "region_size: 4").unwrap();
        let mut cfg = SimConfig::default();
        let err = cfg.apply_file(file.path()).unwrap_err().to_string();
        assert!(err.contains(":1:"), "{err}");
    }

    #[test]
    fn validate_rejects_zero_region() {
        let cfg = SimConfig {
            region_size: 0,
            ..SimConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn validate_rejects_negative_threshold() {
        let cfg = SimConfig {
            spatial_threshold: -1.0,
            ..SimConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}

//! The JSON configuration space and per-scene sampling.
//!
//! A [`GenerationConfig`] is the single input to the pipeline: image
//! properties, environment ranges, object attributes, and validation
//! thresholds. [`sample_scene_spec`] draws one point from that space as a
//! [`SceneSpec`], a pure function of `(config.seed, scene_index)` so scenes
//! can be generated in any order or in parallel with identical output.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::render::texture::Texture;
use crate::util;

/// One of the four primitive object classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Cube,
    Sphere,
    Cone,
    Cylinder,
}

impl Shape {
    pub const ALL: [Shape; 4] = [Shape::Cube, Shape::Sphere, Shape::Cone, Shape::Cylinder];

    /// Lower-case noun used in question text ("cube", "sphere", ...).
    pub fn noun(&self) -> &'static str {
        match self {
            Shape::Cube => "cube",
            Shape::Sphere => "sphere",
            Shape::Cone => "cone",
            Shape::Cylinder => "cylinder",
        }
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.noun())
    }
}

/// Spatial region relative to the table. `ALL` is the canonical order used
/// for binning, verbose ground-truth breakdowns, and sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Zone {
    OnTable,
    UnderTable,
    LeftOfTable,
    RightOfTable,
    FrontOfTable,
}

impl Zone {
    pub const ALL: [Zone; 5] = [
        Zone::OnTable,
        Zone::UnderTable,
        Zone::LeftOfTable,
        Zone::RightOfTable,
        Zone::FrontOfTable,
    ];

    /// Phrase used inside question text ("on the table", ...).
    pub fn question_phrase(&self) -> &'static str {
        match self {
            Zone::OnTable => "on the table",
            Zone::UnderTable => "under the table",
            Zone::LeftOfTable => "to the left of the table",
            Zone::RightOfTable => "to the right of the table",
            Zone::FrontOfTable => "in front of the table",
        }
    }

    /// Canonical sentence opener for verbose ground truths.
    pub fn verbose_phrase(&self) -> &'static str {
        match self {
            Zone::OnTable => "On top of the table",
            Zone::UnderTable => "On the ground under the table",
            Zone::LeftOfTable => "On the ground to the left of the table",
            Zone::RightOfTable => "On the ground to the right of the table",
            Zone::FrontOfTable => "On the ground in front of the table",
        }
    }
}

impl std::fmt::Display for Zone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Zone::OnTable => "on_table",
            Zone::UnderTable => "under_table",
            Zone::LeftOfTable => "left_of_table",
            Zone::RightOfTable => "right_of_table",
            Zone::FrontOfTable => "front_of_table",
        };
        f.write_str(s)
    }
}

/// A named sRGB color from the object palette.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaletteColor {
    pub name: String,
    pub rgb: [u8; 3],
}

/// Closed real interval `[low, high]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealRange {
    pub low: f64,
    pub high: f64,
}

impl RealRange {
    pub fn contains(&self, v: f64) -> bool {
        v >= self.low && v <= self.high
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        if self.low == self.high {
            self.low
        } else {
            rng.gen_range(self.low..=self.high)
        }
    }

    fn validate(&self, field: &str) -> Result<(), ConfigError> {
        if !(self.low.is_finite() && self.high.is_finite()) {
            return Err(ConfigError::invalid(field, "range bounds must be finite"));
        }
        if self.low <= 0.0 {
            return Err(ConfigError::invalid(field, "range low bound must be > 0"));
        }
        if self.low > self.high {
            return Err(ConfigError::invalid(field, "range low bound exceeds high bound"));
        }
        Ok(())
    }
}

/// Closed integer interval `[low, high]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountRange {
    pub low: u32,
    pub high: u32,
}

impl CountRange {
    pub fn contains(&self, v: u32) -> bool {
        v >= self.low && v <= self.high
    }

    pub fn sample(&self, rng: &mut impl Rng) -> u32 {
        rng.gen_range(self.low..=self.high)
    }
}

/// Output image properties.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageSettings {
    pub width: u32,
    pub height: u32,
    pub samples_per_pixel: u32,
    pub cameras_per_scene: u32,
}

/// Environmental factors: lighting, room size, and surface textures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSettings {
    pub light_strength: RealRange,
    pub room_dims: RoomDims,
    pub floor_texture_palette: Vec<String>,
    pub wall_texture_palette: Vec<String>,
}

/// Per-axis room dimension ranges, in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomDims {
    pub x: RealRange,
    pub y: RealRange,
    pub z: RealRange,
}

/// Placement likelihood per zone. Probabilities must sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoneProbabilities {
    pub on_table: f64,
    pub under: f64,
    pub left: f64,
    pub right: f64,
    pub front: f64,
}

impl ZoneProbabilities {
    /// `(zone, probability)` pairs in canonical zone order.
    pub fn entries(&self) -> [(Zone, f64); 5] {
        [
            (Zone::OnTable, self.on_table),
            (Zone::UnderTable, self.under),
            (Zone::LeftOfTable, self.left),
            (Zone::RightOfTable, self.right),
            (Zone::FrontOfTable, self.front),
        ]
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Zone {
        let u: f64 = rng.gen_range(0.0..1.0);
        let mut acc = 0.0;
        for (zone, p) in self.entries() {
            acc += p;
            if u < acc {
                return zone;
            }
        }
        // Rounding can leave `u` past the accumulated sum by a hair.
        Zone::FrontOfTable
    }
}

/// Per-shape size ranges (characteristic footprint diameter, meters).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeRanges {
    pub cube: RealRange,
    pub sphere: RealRange,
    pub cone: RealRange,
    pub cylinder: RealRange,
}

impl SizeRanges {
    pub fn range_for(&self, shape: Shape) -> RealRange {
        match shape {
            Shape::Cube => self.cube,
            Shape::Sphere => self.sphere,
            Shape::Cone => self.cone,
            Shape::Cylinder => self.cylinder,
        }
    }
}

/// Object-level attributes of the configuration space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSettings {
    pub count_range: CountRange,
    pub size_range_per_shape: SizeRanges,
    pub zone_probabilities: ZoneProbabilities,
    pub color_palette: Vec<PaletteColor>,
}

/// Contrast-validation thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationSettings {
    pub delta_e_threshold: f64,
    pub dilation_radius: u32,
    pub max_retries: u32,
    /// Minimum total instance-map pixels an object must own across all views;
    /// scenes below this are rejected and resampled.
    #[serde(default = "default_min_visible_pixels")]
    pub min_visible_pixels: u32,
}

fn default_min_visible_pixels() -> u32 {
    25
}

/// The full sampled parameter space driving every downstream stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationConfig {
    pub image: ImageSettings,
    pub environment: EnvironmentSettings,
    pub objects: ObjectSettings,
    pub validation: ValidationSettings,
    pub seed: u64,
}

/// Errors from parsing or validating a configuration document.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config field `{field}`: {message}")]
    Invalid { field: String, message: String },
}

impl ConfigError {
    fn invalid(field: &str, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

/// Parses and validates a JSON configuration document.
///
/// The schema is strict: unknown keys are rejected so config typos surface
/// immediately rather than silently falling back to defaults.
pub fn parse_config(text: &str) -> Result<GenerationConfig, ConfigError> {
    let config: GenerationConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

impl GenerationConfig {
    /// The shipped default configuration (full resolution, 5 cameras).
    pub fn builtin_default() -> GenerationConfig {
        parse_config(DEFAULT_CONFIG_JSON).expect("embedded default config is valid")
    }

    /// A down-scaled preset (128x72, 1 spp, 2 cameras) for fast runs and CI.
    pub fn builtin_toy() -> GenerationConfig {
        parse_config(TOY_CONFIG_JSON).expect("embedded toy config is valid")
    }

    /// Checks every config invariant, naming the offending field on failure.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let img = &self.image;
        if img.width < 64 || img.height < 64 {
            return Err(ConfigError::invalid(
                "image.width/height",
                "image dimensions must be at least 64x64",
            ));
        }
        if img.samples_per_pixel < 1 {
            return Err(ConfigError::invalid(
                "image.samples_per_pixel",
                "must be at least 1",
            ));
        }
        if img.cameras_per_scene < 1 {
            return Err(ConfigError::invalid(
                "image.cameras_per_scene",
                "must be at least 1",
            ));
        }

        self.environment
            .light_strength
            .validate("environment.light_strength")?;
        self.environment.room_dims.x.validate("environment.room_dims.x")?;
        self.environment.room_dims.y.validate("environment.room_dims.y")?;
        self.environment.room_dims.z.validate("environment.room_dims.z")?;
        for (field, palette) in [
            (
                "environment.floor_texture_palette",
                &self.environment.floor_texture_palette,
            ),
            (
                "environment.wall_texture_palette",
                &self.environment.wall_texture_palette,
            ),
        ] {
            if palette.is_empty() {
                return Err(ConfigError::invalid(field, "texture palette is empty"));
            }
            for id in palette {
                Texture::parse(id)
                    .map_err(|e| ConfigError::invalid(field, format!("`{id}`: {e}")))?;
            }
        }

        let obj = &self.objects;
        if obj.count_range.low > obj.count_range.high {
            return Err(ConfigError::invalid(
                "objects.count_range",
                "low bound exceeds high bound",
            ));
        }
        for shape in Shape::ALL {
            obj.size_range_per_shape
                .range_for(shape)
                .validate(&format!("objects.size_range_per_shape.{shape}"))?;
        }
        let mut sum = 0.0;
        for (zone, p) in obj.zone_probabilities.entries() {
            if !(p >= 0.0) {
                return Err(ConfigError::invalid(
                    "objects.zone_probabilities",
                    format!("probability for {zone} must be >= 0"),
                ));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ConfigError::invalid(
                "objects.zone_probabilities",
                format!("probabilities sum to {sum}, expected 1.0"),
            ));
        }
        if obj.color_palette.len() < 2 {
            return Err(ConfigError::invalid(
                "objects.color_palette",
                "palette needs at least 2 entries",
            ));
        }

        let val = &self.validation;
        if !(val.delta_e_threshold > 0.0) {
            return Err(ConfigError::invalid(
                "validation.delta_e_threshold",
                "must be > 0",
            ));
        }
        if val.max_retries < 1 {
            return Err(ConfigError::invalid("validation.max_retries", "must be at least 1"));
        }
        Ok(())
    }
}

/// One object drawn from the configuration space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub shape: Shape,
    pub color: PaletteColor,
    pub size: f64,
    pub zone: Zone,
}

/// One sampled point of the configuration space: everything scene
/// construction needs, plus a derived RNG stream for downstream draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub scene_id: String,
    pub object_specs: Vec<ObjectSpec>,
    pub room_dims: [f64; 3],
    pub light_strength: f64,
    pub floor_texture: String,
    pub wall_texture: String,
    pub camera_count: u32,
    pub rng_stream: u64,
}

/// Samples scene `scene_index` from the configuration space.
///
/// Deterministic in `(config.seed, scene_index)`; each scene owns an
/// independent RNG stream so generation order and parallelism do not matter.
pub fn sample_scene_spec(config: &GenerationConfig, scene_index: u64) -> SceneSpec {
    let rng_stream = util::derive_stream(config.seed, scene_index);
    let mut rng = util::stream_rng(config.seed, scene_index);

    let count = config.objects.count_range.sample(&mut rng);
    let palette = &config.objects.color_palette;
    let object_specs = (0..count)
        .map(|_| {
            let shape = Shape::ALL[rng.gen_range(0..Shape::ALL.len())];
            let color = palette[rng.gen_range(0..palette.len())].clone();
            let size = config.objects.size_range_per_shape.range_for(shape).sample(&mut rng);
            let zone = config.objects.zone_probabilities.sample(&mut rng);
            ObjectSpec { shape, color, size, zone }
        })
        .collect();

    let dims = &config.environment.room_dims;
    let room_dims = [
        dims.x.sample(&mut rng),
        dims.y.sample(&mut rng),
        dims.z.sample(&mut rng),
    ];
    let light_strength = config.environment.light_strength.sample(&mut rng);
    let floor = &config.environment.floor_texture_palette;
    let floor_texture = floor[rng.gen_range(0..floor.len())].clone();
    let walls = &config.environment.wall_texture_palette;
    let wall_texture = walls[rng.gen_range(0..walls.len())].clone();

    SceneSpec {
        scene_id: format!("scene_{scene_index:05}"),
        object_specs,
        room_dims,
        light_strength,
        floor_texture,
        wall_texture,
        camera_count: config.image.cameras_per_scene,
        rng_stream,
    }
}

/// SHA-256 of the raw config text, hex-encoded; recorded in manifest
/// provenance so a dataset can be traced back to its exact configuration.
pub fn config_digest(text: &str) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Raw JSON of the shipped default configuration.
pub const DEFAULT_CONFIG_JSON: &str = include_str!("../configs/default.json");
/// Raw JSON of the toy preset (128x72, 1 spp, 2 cameras).
pub const TOY_CONFIG_JSON: &str = include_str!("../configs/toy.json");

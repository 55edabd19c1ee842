//! Object/background contrast validation in CIELAB.
//!
//! For every rendered view and every visible object, the object's pixels are
//! isolated through the segmentation map and dilated to pick up neighboring
//! background pixels; the mean colors of both regions are compared as a
//! CIE76 color difference. Objects below the configured threshold trigger a
//! random material reassignment and re-render, repeated up to `max_retries`
//! before the scene is rejected outright.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::GenerationConfig;
use crate::render::texture::Texture;
use crate::render::{render_scene_all_views, RenderError, RenderOutput};
use crate::scene::{SceneGraph, TABLE_COLORS};
use crate::util;

/// A color in CIELAB (D65 white point, 2 degree observer).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabColor {
    #[serde(rename = "L")]
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

/// Converts an 8-bit sRGB triple to CIELAB.
///
/// Standard chain: gamma expansion, linear RGB to XYZ (D65), XYZ to Lab.
pub fn srgb_to_lab(c: [u8; 3]) -> LabColor {
    let r = crate::render::srgb_byte_to_linear(c[0]);
    let g = crate::render::srgb_byte_to_linear(c[1]);
    let b = crate::render::srgb_byte_to_linear(c[2]);

    let x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    let y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    let z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;

    // D65 reference white.
    let (xn, yn, zn) = (0.95047, 1.0, 1.08883);
    let f = |t: f64| {
        let delta3 = (6.0f64 / 29.0).powi(3);
        if t > delta3 {
            t.cbrt()
        } else {
            t / (3.0 * (6.0f64 / 29.0).powi(2)) + 4.0 / 29.0
        }
    };
    let (fx, fy, fz) = (f(x / xn), f(y / yn), f(z / zn));
    LabColor {
        l: 116.0 * fy - 16.0,
        a: 500.0 * (fx - fy),
        b: 200.0 * (fy - fz),
    }
}

/// CIE76 color difference: Euclidean distance in Lab.
pub fn delta_e(a: &LabColor, b: &LabColor) -> f64 {
    let dl = a.l - b.l;
    let da = a.a - b.a;
    let db = a.b - b.b;
    (dl * dl + da * da + db * db).sqrt()
}

/// Whether a measured difference clears the threshold.
pub fn passes(delta_e: f64, threshold: f64) -> bool {
    delta_e >= threshold
}

#[derive(Debug, Error)]
pub enum ContrastError {
    #[error("object {object_id} in view {camera_index} has no background ring to compare against")]
    DegenerateRegion { object_id: u32, camera_index: usize },
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("scene {scene_id} rejected: contrast still failing after {retries} material reassignments")]
    Rejected { scene_id: String, retries: u32 },
}

/// Dilates a binary mask with a square structuring element of side
/// `2*radius + 1` (Chebyshev distance), via separable horizontal and
/// vertical passes.
pub fn dilate_mask(mask: &[bool], width: usize, height: usize, radius: usize) -> Vec<bool> {
    assert_eq!(mask.len(), width * height);
    let mut horizontal = vec![false; mask.len()];
    let mut prefix = vec![0u32; width + 1];
    for y in 0..height {
        let row = &mask[y * width..(y + 1) * width];
        for x in 0..width {
            prefix[x + 1] = prefix[x] + u32::from(row[x]);
        }
        let out = &mut horizontal[y * width..(y + 1) * width];
        for x in 0..width {
            let lo = x.saturating_sub(radius);
            let hi = (x + radius + 1).min(width);
            out[x] = prefix[hi] > prefix[lo];
        }
    }

    let mut dilated = vec![false; mask.len()];
    let mut col_prefix = vec![0u32; height + 1];
    for x in 0..width {
        for y in 0..height {
            col_prefix[y + 1] = col_prefix[y] + u32::from(horizontal[y * width + x]);
        }
        for y in 0..height {
            let lo = y.saturating_sub(radius);
            let hi = (y + radius + 1).min(height);
            dilated[y * width + x] = col_prefix[hi] > col_prefix[lo];
        }
    }
    dilated
}

/// Mean object and background colors and their difference, for one object
/// in one view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContrastMeasurement {
    pub object_lab: LabColor,
    pub background_lab: LabColor,
    pub delta_e: f64,
}

/// Measures an object's contrast against its dilated background ring.
///
/// The ring is the dilation of the object mask minus the mask itself,
/// restricted to true background pixels (instance id 0) so another object
/// cannot lend contrast. Returns `Ok(None)` when the object owns no pixels
/// in this view (not visible here: skipped rather than failed).
pub fn object_contrast(
    output: &RenderOutput,
    object_id: u32,
    dilation_radius: u32,
) -> Result<Option<ContrastMeasurement>, ContrastError> {
    let width = output.width as usize;
    let height = output.height as usize;
    let id = object_id as u16;
    let mask: Vec<bool> = output.instances.iter().map(|&v| v == id).collect();
    if !mask.iter().any(|&m| m) {
        return Ok(None);
    }

    let dilated = dilate_mask(&mask, width, height, dilation_radius as usize);
    let mut object_sum = [0.0f64; 3];
    let mut object_n = 0u64;
    let mut ring_sum = [0.0f64; 3];
    let mut ring_n = 0u64;
    for i in 0..mask.len() {
        let in_ring = dilated[i] && !mask[i] && output.instances[i] == 0;
        if !(mask[i] || in_ring) {
            continue;
        }
        let (x, y) = ((i % width) as u32, (i / width) as u32);
        let lab = srgb_to_lab(output.rgb_at(x, y));
        if mask[i] {
            object_sum[0] += lab.l;
            object_sum[1] += lab.a;
            object_sum[2] += lab.b;
            object_n += 1;
        } else {
            ring_sum[0] += lab.l;
            ring_sum[1] += lab.a;
            ring_sum[2] += lab.b;
            ring_n += 1;
        }
    }
    if ring_n == 0 {
        return Err(ContrastError::DegenerateRegion {
            object_id,
            camera_index: output.camera_index,
        });
    }

    let object_lab = LabColor {
        l: object_sum[0] / object_n as f64,
        a: object_sum[1] / object_n as f64,
        b: object_sum[2] / object_n as f64,
    };
    let background_lab = LabColor {
        l: ring_sum[0] / ring_n as f64,
        a: ring_sum[1] / ring_n as f64,
        b: ring_sum[2] / ring_n as f64,
    };
    let de = delta_e(&object_lab, &background_lab);
    Ok(Some(ContrastMeasurement { object_lab, background_lab, delta_e: de }))
}

/// One `(object, view)` contrast check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastEntry {
    pub object_id: u32,
    pub camera_index: usize,
    pub object_lab: LabColor,
    pub background_lab: LabColor,
    pub delta_e: f64,
    pub pass: bool,
}

/// The validation outcome for a scene, serialized to `validation.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastReport {
    pub threshold: f64,
    pub retries_used: u32,
    pub overall_pass: bool,
    pub entries: Vec<ContrastEntry>,
}

/// Measures every visible `(object, view)` pair against the threshold.
pub fn validate_scene(
    scene: &SceneGraph,
    outputs: &[RenderOutput],
    threshold: f64,
    dilation_radius: u32,
) -> Result<ContrastReport, ContrastError> {
    let mut entries = Vec::new();
    for output in outputs {
        for obj in &scene.objects {
            if let Some(m) = object_contrast(output, obj.object_id, dilation_radius)? {
                entries.push(ContrastEntry {
                    object_id: obj.object_id,
                    camera_index: output.camera_index,
                    object_lab: m.object_lab,
                    background_lab: m.background_lab,
                    delta_e: m.delta_e,
                    pass: passes(m.delta_e, threshold),
                });
            }
        }
    }
    let overall_pass = entries.iter().all(|e| e.pass);
    Ok(ContrastReport { threshold, retries_used: 0, overall_pass, entries })
}

/// Randomly reassigns every material: object colors, floor and wall
/// textures, and the table tone. Counts, shapes, zones, and positions are
/// untouched, so only the per-color ground-truth breakdown can change.
fn reassign_materials(scene: &mut SceneGraph, config: &GenerationConfig, rng: &mut ChaCha8Rng) {
    let floor_palette = &config.environment.floor_texture_palette;
    scene.floor_texture = floor_palette[rng.gen_range(0..floor_palette.len())].clone();
    let wall_palette = &config.environment.wall_texture_palette;
    scene.wall_texture = wall_palette[rng.gen_range(0..wall_palette.len())].clone();
    let (table_name, table_rgb) = TABLE_COLORS[rng.gen_range(0..TABLE_COLORS.len())];
    scene.table_color = crate::config::PaletteColor {
        name: table_name.to_string(),
        rgb: table_rgb,
    };

    let floor_names: Vec<String> = Texture::parse(&scene.floor_texture)
        .map(|t| t.color_names().iter().map(|s| s.to_string()).collect())
        .unwrap_or_default();
    let palette = &config.objects.color_palette;
    for obj in &mut scene.objects {
        let mut color = palette[rng.gen_range(0..palette.len())].clone();
        // Avoid handing an object the floor's own color name.
        for _ in 0..16 {
            if !floor_names.iter().any(|n| *n == color.name) {
                break;
            }
            color = palette[rng.gen_range(0..palette.len())].clone();
        }
        obj.color = color;
    }
}

/// A scene that cleared validation, with its final renders and report.
#[derive(Debug)]
pub struct ValidatedScene {
    pub scene: SceneGraph,
    pub outputs: Vec<RenderOutput>,
    pub report: ContrastReport,
}

/// Runs the validation loop: measure, reassign materials and re-render on
/// failure, up to `max_retries` times; rejects the scene after that.
///
/// Geometry never changes, so instance maps (and therefore counts and
/// visibility) are identical across repair iterations.
pub fn validate_and_repair(
    scene: SceneGraph,
    outputs: Vec<RenderOutput>,
    config: &GenerationConfig,
) -> Result<ValidatedScene, ContrastError> {
    let threshold = config.validation.delta_e_threshold;
    let radius = config.validation.dilation_radius;
    let mut scene = scene;
    let mut outputs = outputs;
    let mut report = validate_scene(&scene, &outputs, threshold, radius)?;
    let mut retries = 0u32;
    while !report.overall_pass {
        if retries >= config.validation.max_retries {
            return Err(ContrastError::Rejected { scene_id: scene.scene_id.clone(), retries });
        }
        retries += 1;
        let mut rng = util::stream_rng(
            scene.rng_stream,
            util::SALT_REPAIR.wrapping_add(u64::from(retries)),
        );
        reassign_materials(&mut scene, config, &mut rng);
        outputs = render_scene_all_views(&scene, &config.image)?;
        report = validate_scene(&scene, &outputs, threshold, radius)?;
    }
    report.retries_used = retries;
    Ok(ValidatedScene { scene, outputs, report })
}

//! Scene construction: turns a [`SceneSpec`] into a concrete [`SceneGraph`]
//! with room, table, lights, cameras, and bin-placed objects, plus the
//! [`SceneMetadata`] counts that every ground truth derives from.
//!
//! Placement follows a bin-partition scheme: within each zone the zone's
//! x-extent is divided into one equal bin per object and each object is
//! placed uniformly inside its own bin (after a random permutation of bin
//! assignments), so footprints within a zone can never overlap. Zones
//! occupy disjoint regions around the table, separated in depth or height,
//! which keeps cross-zone interpenetration impossible as well.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ObjectSpec, PaletteColor, SceneSpec, Shape, Zone};
use crate::util;

/// Tabletop half extents and height, meters. The table is always centered
/// in the room with its feet on the floor.
pub const TABLE_HALF_X: f64 = 1.1;
pub const TABLE_HALF_Y: f64 = 0.55;
pub const TABLE_TOP: f64 = 0.75;
pub const TABLE_SLAB_THICKNESS: f64 = 0.06;
pub const TABLE_LEG_HALF: f64 = 0.035;

const ZONE_GAP: f64 = 0.10;
const SIDE_BAND_WIDTH: f64 = 0.70;
const FRONT_BAND_DEPTH: f64 = 0.80;
const ON_TABLE_Y_INSET: f64 = 0.05;
const UNDER_X_INSET: f64 = 0.20;
const UNDER_Y_INSET: f64 = 0.19;

/// Fraction of a bin an object footprint may fill.
const BIN_FILL: f64 = 0.9;
/// Below this footprint, placement gives up instead of shrinking further.
const MIN_PLACEABLE_SIZE: f64 = 0.05;

const CAMERA_FOV_DEG: f64 = 55.0;
const CAMERA_AZIMUTH_SPAN_DEG: f64 = 70.0;
const CAMERA_AZIMUTH_JITTER_DEG: f64 = 3.0;
const CAMERA_ELEVATION_DEG: (f64, f64) = (12.0, 24.0);
const CAMERA_ROOM_MARGIN: f64 = 0.45;
const LOOK_AT_HEIGHT: f64 = 0.55;

/// Axis-aligned box, `min` to `max`, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn contains(&self, p: [f64; 3]) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    pub fn center(&self) -> [f64; 3] {
        [
            (self.min[0] + self.max[0]) / 2.0,
            (self.min[1] + self.max[1]) / 2.0,
            (self.min[2] + self.max[2]) / 2.0,
        ]
    }
}

/// A point light with a scalar strength (arbitrary radiometric units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Light {
    pub position: [f64; 3],
    pub strength: f64,
}

/// A pinhole camera looking at the table center region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Camera {
    pub position: [f64; 3],
    pub look_at: [f64; 3],
    pub fov_deg: f64,
    pub up: [f64; 3],
}

/// A placed object instance. `object_id` starts at 1; 0 is reserved for the
/// background (room and table) in segmentation maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub object_id: u32,
    pub shape: Shape,
    pub color: PaletteColor,
    pub size: f64,
    pub zone: Zone,
    /// Base center of the object: z is the tabletop height for `on_table`,
    /// ground level for every other zone.
    pub position: [f64; 3],
    pub bin_index: u32,
    /// Rotation about the vertical axis, radians (nonzero only for cubes).
    pub yaw: f64,
}

impl SceneObject {
    /// Height of the object above its base point.
    pub fn height(&self) -> f64 {
        shape_height(self.shape, self.size)
    }
}

/// Vertical extent of a shape with the given footprint size.
pub fn shape_height(shape: Shape, size: f64) -> f64 {
    match shape {
        // Cube edges are size/sqrt(2) so any yaw keeps the footprint <= size.
        Shape::Cube => size / std::f64::consts::SQRT_2,
        Shape::Sphere => size,
        Shape::Cone => 1.4 * size,
        Shape::Cylinder => 1.3 * size,
    }
}

/// The concrete scene: single source of truth for all counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneGraph {
    pub scene_id: String,
    pub room: Aabb,
    pub table: Aabb,
    pub table_color: PaletteColor,
    pub lights: Vec<Light>,
    pub cameras: Vec<Camera>,
    pub objects: Vec<SceneObject>,
    pub floor_texture: String,
    pub wall_texture: String,
    pub rng_stream: u64,
}

/// Wood and neutral tones the table is drawn from (and re-drawn from during
/// contrast repair).
pub const TABLE_COLORS: &[(&str, [u8; 3])] = &[
    ("walnut", [90, 60, 40]),
    ("oak", [160, 120, 70]),
    ("mahogany", [110, 50, 40]),
    ("charcoal", [70, 70, 75]),
];

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("zone {zone} cannot fit {count} objects: bins would be {bin_width:.3} m wide")]
    ZoneOverCapacity { zone: Zone, count: usize, bin_width: f64 },
    #[error("room {dims:?} is too small for the table layout and camera arc")]
    RoomTooSmall { dims: [f64; 3] },
}

/// The horizontal region a zone occupies: x extent is divided into bins,
/// y band is sampled uniformly, z is fixed by the zone.
#[derive(Debug, Clone, Copy)]
pub struct ZoneRegion {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub z: f64,
}

/// Region layout around a table bounding box.
pub fn zone_region(table: &Aabb, zone: Zone) -> ZoneRegion {
    let (tx0, tx1) = (table.min[0], table.max[0]);
    let (ty0, ty1) = (table.min[1], table.max[1]);
    let top = table.max[2];
    match zone {
        Zone::OnTable => ZoneRegion {
            x: (tx0, tx1),
            y: (ty0 + ON_TABLE_Y_INSET, ty1 - ON_TABLE_Y_INSET),
            z: top,
        },
        Zone::UnderTable => ZoneRegion {
            x: (tx0 + UNDER_X_INSET, tx1 - UNDER_X_INSET),
            y: (ty0 + UNDER_Y_INSET, ty1 - UNDER_Y_INSET),
            z: 0.0,
        },
        Zone::LeftOfTable => ZoneRegion {
            x: (tx0 - ZONE_GAP - SIDE_BAND_WIDTH, tx0 - ZONE_GAP),
            y: (ty0, ty1),
            z: 0.0,
        },
        Zone::RightOfTable => ZoneRegion {
            x: (tx1 + ZONE_GAP, tx1 + ZONE_GAP + SIDE_BAND_WIDTH),
            y: (ty0, ty1),
            z: 0.0,
        },
        Zone::FrontOfTable => ZoneRegion {
            x: (tx0, tx1),
            y: (ty0 - ZONE_GAP - FRONT_BAND_DEPTH, ty0 - ZONE_GAP),
            z: 0.0,
        },
    }
}

/// One placement produced by [`place_objects`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub position: [f64; 3],
    pub bin_index: u32,
    /// Final size; may be smaller than the sampled size when the bin could
    /// not fit the original footprint.
    pub size: f64,
}

/// Places each zone group into equal x-bins of its zone region.
///
/// Within a zone of `n` objects the zone x-extent splits into `n` equal
/// bins; bin assignments are randomly permuted and each object's position
/// is uniform inside its own bin (footprint fully contained). Oversized
/// objects are re-drawn to fit their bin; a zone whose bins fall below the
/// minimum placeable size is an error and the caller resamples the spec.
pub fn place_objects(
    table: &Aabb,
    zone_groups: &BTreeMap<Zone, Vec<ObjectSpec>>,
    rng: &mut ChaCha8Rng,
) -> Result<BTreeMap<Zone, Vec<Placement>>, SceneError> {
    let table_clearance = table.max[2] - table.min[2] - TABLE_SLAB_THICKNESS;
    let mut placed = BTreeMap::new();
    for zone in Zone::ALL {
        let Some(group) = zone_groups.get(&zone) else { continue };
        if group.is_empty() {
            continue;
        }
        let region = zone_region(table, zone);
        let n = group.len();
        let extent = region.x.1 - region.x.0;
        let bin_width = extent / n as f64;
        let band_depth = region.y.1 - region.y.0;
        let max_footprint = BIN_FILL * bin_width.min(band_depth);
        if max_footprint < MIN_PLACEABLE_SIZE {
            return Err(SceneError::ZoneOverCapacity { zone, count: n, bin_width });
        }

        let mut bins: Vec<u32> = (0..n as u32).collect();
        bins.shuffle(rng);

        let mut placements = Vec::with_capacity(n);
        for (j, spec) in group.iter().enumerate() {
            let mut limit = max_footprint;
            if zone == Zone::UnderTable {
                // Keep the object below the slab with a little headroom.
                let height_ratio = shape_height(spec.shape, 1.0);
                limit = limit.min((table_clearance - 0.02) / height_ratio);
            }
            if limit < MIN_PLACEABLE_SIZE {
                return Err(SceneError::ZoneOverCapacity { zone, count: n, bin_width });
            }
            let size = if spec.size <= limit {
                spec.size
            } else {
                rng.gen_range(limit * 0.7..=limit)
            };

            let bin = bins[j];
            let bin_lo = region.x.0 + f64::from(bin) * bin_width;
            let bin_hi = bin_lo + bin_width;
            let x = rng.gen_range(bin_lo + size / 2.0..=bin_hi - size / 2.0);
            let y = rng.gen_range(region.y.0 + size / 2.0..=region.y.1 - size / 2.0);
            placements.push(Placement { position: [x, y, region.z], bin_index: bin, size });
        }
        placed.insert(zone, placements);
    }
    Ok(placed)
}

/// Builds the concrete scene for a spec. Deterministic in `spec.rng_stream`.
pub fn build_scene(spec: &SceneSpec) -> Result<SceneGraph, SceneError> {
    let mut rng = util::stream_rng(spec.rng_stream, util::SALT_SCENE_BUILD);

    let [dx, dy, dz] = spec.room_dims;
    let room = Aabb {
        min: [-dx / 2.0, -dy / 2.0, 0.0],
        max: [dx / 2.0, dy / 2.0, dz],
    };
    let table = Aabb {
        min: [-TABLE_HALF_X, -TABLE_HALF_Y, 0.0],
        max: [TABLE_HALF_X, TABLE_HALF_Y, TABLE_TOP],
    };
    let camera_radius = dx.min(dy) / 2.0 - CAMERA_ROOM_MARGIN;
    let scene_half_x = TABLE_HALF_X + ZONE_GAP + SIDE_BAND_WIDTH;
    if camera_radius < scene_half_x + 0.6 || dz < 2.2 || dy / 2.0 < TABLE_HALF_Y + ZONE_GAP + FRONT_BAND_DEPTH + 0.3 {
        return Err(SceneError::RoomTooSmall { dims: spec.room_dims });
    }

    // Group object specs by zone, remembering their original order so that
    // object ids stay aligned with the spec.
    let mut groups: BTreeMap<Zone, Vec<ObjectSpec>> = BTreeMap::new();
    let mut group_members: BTreeMap<Zone, Vec<usize>> = BTreeMap::new();
    for (idx, obj) in spec.object_specs.iter().enumerate() {
        groups.entry(obj.zone).or_default().push(obj.clone());
        group_members.entry(obj.zone).or_default().push(idx);
    }
    let placements = place_objects(&table, &groups, &mut rng)?;

    let mut objects: Vec<Option<SceneObject>> = vec![None; spec.object_specs.len()];
    for (zone, placed) in &placements {
        let members = &group_members[zone];
        for (placement, &idx) in placed.iter().zip(members) {
            let spec_obj = &spec.object_specs[idx];
            objects[idx] = Some(SceneObject {
                object_id: idx as u32 + 1,
                shape: spec_obj.shape,
                color: spec_obj.color.clone(),
                size: placement.size,
                zone: *zone,
                position: placement.position,
                bin_index: placement.bin_index,
                yaw: 0.0,
            });
        }
    }
    let mut objects: Vec<SceneObject> = objects.into_iter().map(|o| o.expect("all objects placed")).collect();
    for obj in &mut objects {
        if obj.shape == Shape::Cube {
            obj.yaw = rng.gen_range(0.0..std::f64::consts::TAU);
        }
    }

    let (table_name, table_rgb) = TABLE_COLORS[rng.gen_range(0..TABLE_COLORS.len())];
    let table_color = PaletteColor { name: table_name.to_string(), rgb: table_rgb };

    let light_jitter_x = rng.gen_range(-0.4..=0.4);
    let light_jitter_y = rng.gen_range(-0.4..=0.4);
    let lights = vec![Light {
        position: [light_jitter_x, light_jitter_y, dz - 0.25],
        strength: spec.light_strength,
    }];

    let look_at = [0.0, 0.0, LOOK_AT_HEIGHT];
    let n_cams = spec.camera_count.max(1);
    let mut cameras = Vec::with_capacity(n_cams as usize);
    for i in 0..n_cams {
        let span = CAMERA_AZIMUTH_SPAN_DEG;
        let base_az = if n_cams == 1 {
            0.0
        } else {
            -span / 2.0 + f64::from(i) * span / f64::from(n_cams - 1)
        };
        let az = (base_az + rng.gen_range(-CAMERA_AZIMUTH_JITTER_DEG..=CAMERA_AZIMUTH_JITTER_DEG)).to_radians();
        let elev = rng.gen_range(CAMERA_ELEVATION_DEG.0..=CAMERA_ELEVATION_DEG.1).to_radians();
        let position = [
            look_at[0] + camera_radius * az.sin() * elev.cos(),
            look_at[1] - camera_radius * az.cos() * elev.cos(),
            look_at[2] + camera_radius * elev.sin(),
        ];
        cameras.push(Camera {
            position,
            look_at,
            fov_deg: CAMERA_FOV_DEG,
            up: [0.0, 0.0, 1.0],
        });
    }

    Ok(SceneGraph {
        scene_id: spec.scene_id.clone(),
        room,
        table,
        table_color,
        lights,
        cameras,
        objects,
        floor_texture: spec.floor_texture.clone(),
        wall_texture: spec.wall_texture.clone(),
        rng_stream: spec.rng_stream,
    })
}

/// Exhaustive counts over a scene's objects, with every marginal breakdown.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SceneMetadata {
    pub total: u32,
    pub by_shape: BTreeMap<Shape, u32>,
    pub by_color: BTreeMap<String, u32>,
    pub by_zone: BTreeMap<Zone, u32>,
    pub by_combo: BTreeMap<(Shape, String, Zone), u32>,
}

impl SceneMetadata {
    /// Count of objects matching all given constraints (None = wildcard).
    pub fn count_matching(&self, shape: Option<Shape>, color: Option<&str>, zone: Option<Zone>) -> u32 {
        self.by_combo
            .iter()
            .filter(|((s, c, z), _)| {
                shape.map_or(true, |q| *s == q)
                    && color.map_or(true, |q| c == q)
                    && zone.map_or(true, |q| *z == q)
            })
            .map(|(_, n)| n)
            .sum()
    }

    /// Per-zone counts (canonical order) under a shape/color constraint.
    pub fn zone_breakdown(&self, shape: Option<Shape>, color: Option<&str>) -> Vec<(Zone, u32)> {
        Zone::ALL
            .iter()
            .map(|&zone| (zone, self.count_matching(shape, color, Some(zone))))
            .collect()
    }

    /// Shapes present in the scene.
    pub fn shapes_present(&self) -> Vec<Shape> {
        self.by_shape.iter().filter(|(_, &n)| n > 0).map(|(&s, _)| s).collect()
    }

    /// Colors present in the scene.
    pub fn colors_present(&self) -> Vec<String> {
        self.by_color.iter().filter(|(_, &n)| n > 0).map(|(c, _)| c.clone()).collect()
    }

    /// Zones holding at least one object.
    pub fn zones_present(&self) -> Vec<Zone> {
        self.by_zone.iter().filter(|(_, &n)| n > 0).map(|(&z, _)| z).collect()
    }
}

/// Counts scene objects by exact enumeration.
pub fn derive_metadata(scene: &SceneGraph) -> SceneMetadata {
    let mut meta = SceneMetadata::default();
    for obj in &scene.objects {
        meta.total += 1;
        *meta.by_shape.entry(obj.shape).or_insert(0) += 1;
        *meta.by_color.entry(obj.color.name.clone()).or_insert(0) += 1;
        *meta.by_zone.entry(obj.zone).or_insert(0) += 1;
        *meta
            .by_combo
            .entry((obj.shape, obj.color.name.clone(), obj.zone))
            .or_insert(0) += 1;
    }
    meta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{sample_scene_spec, GenerationConfig};
    use rand_chacha::rand_core::SeedableRng;

    fn toy_spec(index: u64) -> SceneSpec {
        sample_scene_spec(&GenerationConfig::builtin_toy(), index)
    }

    fn standard_table() -> Aabb {
        Aabb {
            min: [-TABLE_HALF_X, -TABLE_HALF_Y, 0.0],
            max: [TABLE_HALF_X, TABLE_HALF_Y, TABLE_TOP],
        }
    }

    #[test]
    fn empty_spec_builds_empty_scene() {
        let mut spec = toy_spec(0);
        spec.object_specs.clear();
        let scene = build_scene(&spec).unwrap();
        assert!(scene.objects.is_empty());
        assert!(scene.table.max[0] < scene.room.max[0]);
        assert!(scene.table.max[1] < scene.room.max[1]);
        assert!(scene.table.max[2] < scene.room.max[2]);
    }

    #[test]
    fn build_is_deterministic() {
        let spec = toy_spec(1);
        assert_eq!(build_scene(&spec).unwrap(), build_scene(&spec).unwrap());
    }

    #[test]
    fn placement_example_four_bins_over_table_extent() {
        // Table x-extent [0, 2]: four on-table objects get bins of width 0.5
        // and each x lands inside its own bin.
        let table = Aabb { min: [0.0, -0.55, 0.0], max: [2.0, 0.55, 0.75] };
        let spec = ObjectSpec {
            shape: Shape::Sphere,
            color: PaletteColor { name: "red".into(), rgb: [220, 50, 47] },
            size: 0.2,
            zone: Zone::OnTable,
        };
        let mut groups = BTreeMap::new();
        groups.insert(Zone::OnTable, vec![spec.clone(), spec.clone(), spec.clone(), spec]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let placed = place_objects(&table, &groups, &mut rng).unwrap();
        let placements = &placed[&Zone::OnTable];
        assert_eq!(placements.len(), 4);
        let mut seen = std::collections::BTreeSet::new();
        for p in placements {
            assert!(seen.insert(p.bin_index), "duplicate bin {}", p.bin_index);
            let lo = 0.5 * f64::from(p.bin_index);
            let hi = lo + 0.5;
            assert!(p.position[0] >= lo && p.position[0] < hi, "x {} outside bin", p.position[0]);
        }
    }

    #[test]
    fn single_object_bin_spans_whole_extent() {
        let table = standard_table();
        let spec = ObjectSpec {
            shape: Shape::Cube,
            color: PaletteColor { name: "blue".into(), rgb: [38, 110, 215] },
            size: 0.2,
            zone: Zone::FrontOfTable,
        };
        let mut groups = BTreeMap::new();
        groups.insert(Zone::FrontOfTable, vec![spec]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let placed = place_objects(&table, &groups, &mut rng).unwrap();
        let p = &placed[&Zone::FrontOfTable][0];
        assert_eq!(p.bin_index, 0);
        let region = zone_region(&table, Zone::FrontOfTable);
        assert!(p.position[0] >= region.x.0 && p.position[0] <= region.x.1);
    }

    #[test]
    fn zone_over_capacity_errors() {
        let table = standard_table();
        let spec = ObjectSpec {
            shape: Shape::Sphere,
            color: PaletteColor { name: "red".into(), rgb: [220, 50, 47] },
            size: 0.2,
            zone: Zone::LeftOfTable,
        };
        // 14 objects in a 0.7 m band: bins of 0.05 m are below the minimum.
        let mut groups = BTreeMap::new();
        groups.insert(Zone::LeftOfTable, vec![spec; 14]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let err = place_objects(&table, &groups, &mut rng).unwrap_err();
        assert!(matches!(err, SceneError::ZoneOverCapacity { zone: Zone::LeftOfTable, .. }));
    }

    #[test]
    fn built_scenes_satisfy_placement_invariants() {
        let mut total_placements = 0usize;
        for index in 0..1500 {
            let spec = toy_spec(index);
            let scene = match build_scene(&spec) {
                Ok(s) => s,
                Err(SceneError::ZoneOverCapacity { .. }) => continue,
                Err(e) => panic!("unexpected error: {e}"),
            };
            assert_eq!(scene.objects.len(), spec.object_specs.len());

            let mut per_zone_bins: BTreeMap<Zone, Vec<u32>> = BTreeMap::new();
            let mut per_zone_counts: BTreeMap<Zone, usize> = BTreeMap::new();
            for obj in &scene.objects {
                per_zone_bins.entry(obj.zone).or_default().push(obj.bin_index);
                *per_zone_counts.entry(obj.zone).or_insert(0) += 1;
            }
            for (zone, mut bins) in per_zone_bins {
                let before = bins.len();
                bins.sort_unstable();
                bins.dedup();
                assert_eq!(bins.len(), before, "duplicate bin in zone {zone}");
            }

            for obj in &scene.objects {
                let region = zone_region(&scene.table, obj.zone);
                let n = per_zone_counts[&obj.zone] as f64;
                let bin_width = (region.x.1 - region.x.0) / n;
                let bin_lo = region.x.0 + f64::from(obj.bin_index) * bin_width;
                let bin_hi = bin_lo + bin_width;
                // Footprint stays inside the bin: no horizontal overlap possible.
                assert!(obj.position[0] - obj.size / 2.0 >= bin_lo - 1e-12);
                assert!(obj.position[0] + obj.size / 2.0 <= bin_hi + 1e-12);
                assert!(obj.position[1] >= region.y.0 && obj.position[1] <= region.y.1);
                let expected_z = if obj.zone == Zone::OnTable { scene.table.max[2] } else { 0.0 };
                assert_eq!(obj.position[2], expected_z);
                total_placements += 1;
            }

            for cam in &scene.cameras {
                assert!(!scene.table.contains(cam.position), "camera inside table bbox");
                assert!(scene.room.contains(cam.position), "camera outside room");
                assert!(cam.fov_deg > 10.0 && cam.fov_deg < 120.0);
                let center = scene.table.center();
                let d = (0..3).map(|i| (cam.look_at[i] - center[i]).abs()).fold(0.0, f64::max);
                assert!(d < 1.0, "camera look_at too far from table center");
            }
        }
        assert!(total_placements >= 10_000, "want >= 10k placements, got {total_placements}");
    }

    #[test]
    fn metadata_counts_cone_breakdown() {
        let mut spec = toy_spec(2);
        let cone = |zone: Zone| ObjectSpec {
            shape: Shape::Cone,
            color: PaletteColor { name: "green".into(), rgb: [64, 160, 70] },
            size: 0.2,
            zone,
        };
        spec.object_specs = vec![
            cone(Zone::OnTable),
            cone(Zone::OnTable),
            cone(Zone::RightOfTable),
            cone(Zone::RightOfTable),
            cone(Zone::RightOfTable),
            cone(Zone::FrontOfTable),
        ];
        let scene = build_scene(&spec).unwrap();
        let meta = derive_metadata(&scene);
        assert_eq!(meta.by_shape[&Shape::Cone], 6);
        assert_eq!(meta.count_matching(Some(Shape::Cone), None, Some(Zone::OnTable)), 2);
        assert_eq!(meta.count_matching(Some(Shape::Cone), None, Some(Zone::RightOfTable)), 3);
        assert_eq!(meta.count_matching(Some(Shape::Cone), None, Some(Zone::FrontOfTable)), 1);
    }

    #[test]
    fn empty_scene_has_zero_counts() {
        let mut spec = toy_spec(3);
        spec.object_specs.clear();
        let meta = derive_metadata(&build_scene(&spec).unwrap());
        assert_eq!(meta.total, 0);
        assert_eq!(meta.count_matching(None, None, None), 0);
    }

    #[test]
    fn metadata_matches_brute_force_recount() {
        for index in 0..100 {
            let spec = toy_spec(index);
            let Ok(scene) = build_scene(&spec) else { continue };
            let meta = derive_metadata(&scene);

            let recount = |f: &dyn Fn(&SceneObject) -> bool| {
                scene.objects.iter().filter(|o| f(o)).count() as u32
            };
            assert_eq!(meta.total, scene.objects.len() as u32);
            for shape in Shape::ALL {
                assert_eq!(
                    *meta.by_shape.get(&shape).unwrap_or(&0),
                    recount(&|o| o.shape == shape)
                );
            }
            for zone in Zone::ALL {
                assert_eq!(
                    *meta.by_zone.get(&zone).unwrap_or(&0),
                    recount(&|o| o.zone == zone)
                );
            }
            // Marginalization consistency.
            let shape_sum: u32 = meta.by_shape.values().sum();
            let zone_sum: u32 = meta.by_zone.values().sum();
            let color_sum: u32 = meta.by_color.values().sum();
            let combo_sum: u32 = meta.by_combo.values().sum();
            assert_eq!(shape_sum, meta.total);
            assert_eq!(zone_sum, meta.total);
            assert_eq!(color_sum, meta.total);
            assert_eq!(combo_sum, meta.total);
        }
    }

    #[test]
    fn scene_graph_round_trips_through_json() {
        let spec = toy_spec(5);
        let scene = build_scene(&spec).unwrap();
        let text = serde_json::to_string(&scene).unwrap();
        let back: SceneGraph = serde_json::from_str(&text).unwrap();
        assert_eq!(scene, back);
    }
}

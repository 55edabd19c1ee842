//! Direct-lighting ray tracer producing paired RGB images and per-pixel
//! instance segmentation maps.
//!
//! Shading is textured Lambertian with point-light direct illumination,
//! hard shadows, and a constant ambient floor; no global illumination.
//! The instance map is decoupled from anti-aliasing: it always comes from a
//! single deterministic ray through the pixel center, so segmentation does
//! not depend on the sampling rate. Rendering is deterministic for a fixed
//! scene across runs and thread counts.

pub mod geom;
pub mod texture;

use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ImageSettings, Shape};
use crate::scene::{shape_height, SceneGraph, SceneObject, TABLE_LEG_HALF, TABLE_SLAB_THICKNESS};
use crate::util;
use geom::{vec3, Ray, RoomFace, RoomShell, Shape3d, Vec3};
use texture::{Texture, TextureError};

const AMBIENT: f64 = 0.25;
const SHADOW_EPS: f64 = 1e-6;
const T_MIN: f64 = 1e-9;
const RENDER_SALT: u64 = 0x5ce9_e010;
const CEILING_ALBEDO: [f64; 3] = [0.85, 0.85, 0.85];

/// One rendered view: RGB pixels plus the instance id of the nearest object
/// under each pixel center (0 = background, room, and table).
#[derive(Debug, Clone, PartialEq)]
pub struct RenderOutput {
    pub width: u32,
    pub height: u32,
    /// Row-major sRGB triples, `3 * width * height` bytes.
    pub rgb: Vec<u8>,
    /// Row-major object ids, `width * height` entries.
    pub instances: Vec<u16>,
    pub camera_index: usize,
}

impl RenderOutput {
    pub fn rgb_at(&self, x: u32, y: u32) -> [u8; 3] {
        let i = 3 * (y as usize * self.width as usize + x as usize);
        [self.rgb[i], self.rgb[i + 1], self.rgb[i + 2]]
    }

    pub fn instance_at(&self, x: u32, y: u32) -> u16 {
        self.instances[y as usize * self.width as usize + x as usize]
    }
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("texture error: {0}")]
    Texture(#[from] TextureError),
    #[error("failed to write image `{path}`: {source}")]
    Write {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("failed to read image `{path}`: {source}")]
    Read {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("camera index {index} out of range ({count} cameras)")]
    CameraIndex { index: usize, count: usize },
}

/// sRGB channel byte to linear intensity.
pub(crate) fn srgb_byte_to_linear(c: u8) -> f64 {
    let v = f64::from(c) / 255.0;
    if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

fn linear_to_srgb_byte(v: f64) -> u8 {
    let v = v.clamp(0.0, 1.0);
    let s = if v <= 0.0031308 {
        v * 12.92
    } else {
        1.055 * v.powf(1.0 / 2.4) - 0.055
    };
    (s * 255.0).round() as u8
}

fn srgb_to_linear_rgb(c: [u8; 3]) -> [f64; 3] {
    [
        srgb_byte_to_linear(c[0]),
        srgb_byte_to_linear(c[1]),
        srgb_byte_to_linear(c[2]),
    ]
}

struct Prim {
    shape: Shape3d,
    albedo: [f64; 3],
    instance: u16,
}

struct RenderScene {
    room: RoomShell,
    floor: Texture,
    wall: Texture,
    prims: Vec<Prim>,
    lights: Vec<(Vec3, f64)>,
}

/// Geometry of an object as an analytic primitive.
pub fn object_shape(obj: &SceneObject) -> Shape3d {
    let base = Vec3::from_array(obj.position);
    let r = obj.size / 2.0;
    let h = shape_height(obj.shape, obj.size);
    match obj.shape {
        Shape::Sphere => Shape3d::Sphere { center: base + vec3(0.0, 0.0, r), radius: r },
        Shape::Cube => Shape3d::Cuboid {
            center: base + vec3(0.0, 0.0, h / 2.0),
            half: vec3(h / 2.0, h / 2.0, h / 2.0),
            yaw: obj.yaw,
        },
        Shape::Cone => Shape3d::Cone { base, radius: r, height: h },
        Shape::Cylinder => Shape3d::Cylinder { base, radius: r, height: h },
    }
}

/// The table's slab and four legs as analytic primitives.
pub fn table_prims(scene: &SceneGraph) -> Vec<Shape3d> {
    let t = &scene.table;
    let top = t.max[2];
    let slab_center = vec3(
        (t.min[0] + t.max[0]) / 2.0,
        (t.min[1] + t.max[1]) / 2.0,
        top - TABLE_SLAB_THICKNESS / 2.0,
    );
    let mut parts = vec![Shape3d::Cuboid {
        center: slab_center,
        half: vec3(
            (t.max[0] - t.min[0]) / 2.0,
            (t.max[1] - t.min[1]) / 2.0,
            TABLE_SLAB_THICKNESS / 2.0,
        ),
        yaw: 0.0,
    }];
    let leg_height = top - TABLE_SLAB_THICKNESS;
    let inset = 0.02 + TABLE_LEG_HALF;
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            parts.push(Shape3d::Cuboid {
                center: vec3(
                    sx * (t.max[0] - inset),
                    sy * (t.max[1] - inset),
                    leg_height / 2.0,
                ),
                half: vec3(TABLE_LEG_HALF, TABLE_LEG_HALF, leg_height / 2.0),
                yaw: 0.0,
            });
        }
    }
    parts
}

fn build_render_scene(scene: &SceneGraph) -> Result<RenderScene, RenderError> {
    let floor = Texture::parse(&scene.floor_texture)?;
    let wall = Texture::parse(&scene.wall_texture)?;
    let table_albedo = srgb_to_linear_rgb(scene.table_color.rgb);

    let mut prims = Vec::new();
    for shape in table_prims(scene) {
        prims.push(Prim { shape, albedo: table_albedo, instance: 0 });
    }
    for obj in &scene.objects {
        prims.push(Prim {
            shape: object_shape(obj),
            albedo: srgb_to_linear_rgb(obj.color.rgb),
            instance: obj.object_id as u16,
        });
    }

    Ok(RenderScene {
        room: RoomShell {
            min: Vec3::from_array(scene.room.min),
            max: Vec3::from_array(scene.room.max),
        },
        floor,
        wall,
        prims,
        lights: scene
            .lights
            .iter()
            .map(|l| (Vec3::from_array(l.position), l.strength))
            .collect(),
    })
}

struct HitInfo {
    point: Vec3,
    normal: Vec3,
    albedo: [f64; 3],
    instance: u16,
}

impl RenderScene {
    fn nearest_hit(&self, ray: &Ray) -> Option<HitInfo> {
        let mut best: Option<(f64, usize)> = None;
        let mut t_max = f64::INFINITY;
        for (i, prim) in self.prims.iter().enumerate() {
            if let Some(hit) = prim.shape.intersect(ray, T_MIN, t_max) {
                t_max = hit.t;
                best = Some((hit.t, i));
            }
        }

        if let Some((_, i)) = best {
            let prim = &self.prims[i];
            let hit = prim.shape.intersect(ray, T_MIN, f64::INFINITY).expect("hit reproducible");
            return Some(HitInfo {
                point: ray.at(hit.t),
                normal: hit.normal,
                albedo: prim.albedo,
                instance: prim.instance,
            });
        }

        let (hit, face) = self.room.intersect(ray, T_MIN, f64::INFINITY)?;
        let point = ray.at(hit.t);
        let albedo = match face {
            RoomFace::Floor => srgb_to_linear_rgb(self.floor.sample(point.x, point.y)),
            RoomFace::Ceiling => CEILING_ALBEDO,
            RoomFace::Wall => {
                // Pick planar coordinates along the wall.
                let u = if hit.normal.x.abs() > 0.5 { point.y } else { point.x };
                srgb_to_linear_rgb(self.wall.sample(u, point.z))
            }
        };
        Some(HitInfo { point, normal: hit.normal, albedo, instance: 0 })
    }

    fn occluded(&self, from: Vec3, to_light: Vec3) -> bool {
        let delta = to_light - from;
        let dist = delta.length();
        let ray = Ray::new(from, delta / dist);
        self.prims
            .iter()
            .any(|p| p.shape.intersect(&ray, SHADOW_EPS, dist - SHADOW_EPS).is_some())
    }

    fn shade(&self, hit: &HitInfo) -> [f64; 3] {
        let mut light_sum = AMBIENT;
        for &(pos, strength) in &self.lights {
            let to_light = pos - hit.point;
            let dist2 = to_light.dot(to_light);
            let cos = hit.normal.dot(to_light / dist2.sqrt());
            if cos <= 0.0 {
                continue;
            }
            let origin = hit.point + hit.normal * SHADOW_EPS;
            if !self.occluded(origin, pos) {
                light_sum += strength * cos / dist2;
            }
        }
        [
            hit.albedo[0] * light_sum,
            hit.albedo[1] * light_sum,
            hit.albedo[2] * light_sum,
        ]
    }
}

struct CameraFrame {
    origin: Vec3,
    forward: Vec3,
    right: Vec3,
    up: Vec3,
    tan_half: f64,
    aspect: f64,
}

impl CameraFrame {
    fn new(cam: &crate::scene::Camera, width: u32, height: u32) -> CameraFrame {
        let origin = Vec3::from_array(cam.position);
        let forward = (Vec3::from_array(cam.look_at) - origin).normalized();
        let right = forward.cross(Vec3::from_array(cam.up)).normalized();
        let up = right.cross(forward);
        CameraFrame {
            origin,
            forward,
            right,
            up,
            tan_half: (cam.fov_deg.to_radians() / 2.0).tan(),
            aspect: f64::from(width) / f64::from(height),
        }
    }

    fn ray(&self, px: u32, py: u32, jx: f64, jy: f64, width: u32, height: u32) -> Ray {
        let ndc_x = (f64::from(px) + jx) / f64::from(width) * 2.0 - 1.0;
        let ndc_y = 1.0 - (f64::from(py) + jy) / f64::from(height) * 2.0;
        let dir = self.forward
            + self.right * (ndc_x * self.tan_half * self.aspect)
            + self.up * (ndc_y * self.tan_half);
        Ray::new(self.origin, dir.normalized())
    }
}

/// Renders one camera view.
///
/// Deterministic in `(scene, camera_index, settings)`; per-pixel work is
/// independent of every other pixel, so the row-parallel loop yields
/// identical buffers for any thread count.
pub fn render(
    scene: &SceneGraph,
    camera_index: usize,
    settings: &ImageSettings,
) -> Result<RenderOutput, RenderError> {
    if camera_index >= scene.cameras.len() {
        return Err(RenderError::CameraIndex { index: camera_index, count: scene.cameras.len() });
    }
    let rscene = build_render_scene(scene)?;
    let frame = CameraFrame::new(&scene.cameras[camera_index], settings.width, settings.height);
    let (width, height) = (settings.width, settings.height);
    let spp = settings.samples_per_pixel.max(1);
    let row_seed = util::derive_stream(scene.rng_stream, RENDER_SALT.wrapping_add(camera_index as u64));

    let mut rgb = vec![0u8; (width * height * 3) as usize];
    let mut instances = vec![0u16; (width * height) as usize];

    rgb.par_chunks_mut(3 * width as usize)
        .zip(instances.par_chunks_mut(width as usize))
        .enumerate()
        .for_each(|(y, (rgb_row, inst_row))| {
            let y = y as u32;
            for x in 0..width {
                let mut rng = ChaCha8Rng::seed_from_u64(util::splitmix64(
                    row_seed ^ (u64::from(y) * u64::from(width) + u64::from(x)),
                ));
                let mut acc = [0.0f64; 3];
                for _ in 0..spp {
                    let jx: f64 = rng.gen();
                    let jy: f64 = rng.gen();
                    let ray = frame.ray(x, y, jx, jy, width, height);
                    if let Some(hit) = rscene.nearest_hit(&ray) {
                        let c = rscene.shade(&hit);
                        acc[0] += c[0];
                        acc[1] += c[1];
                        acc[2] += c[2];
                    }
                }
                let inv = 1.0 / f64::from(spp);
                let i = 3 * x as usize;
                rgb_row[i] = linear_to_srgb_byte(acc[0] * inv);
                rgb_row[i + 1] = linear_to_srgb_byte(acc[1] * inv);
                rgb_row[i + 2] = linear_to_srgb_byte(acc[2] * inv);

                // Instance id from the deterministic center ray, decoupled
                // from the anti-aliasing sample count.
                let center = frame.ray(x, y, 0.5, 0.5, width, height);
                inst_row[x as usize] = rscene.nearest_hit(&center).map_or(0, |h| h.instance);
            }
        });

    Ok(RenderOutput { width, height, rgb, instances, camera_index })
}

/// Renders every camera of the scene, in camera order.
pub fn render_scene_all_views(
    scene: &SceneGraph,
    settings: &ImageSettings,
) -> Result<Vec<RenderOutput>, RenderError> {
    (0..scene.cameras.len()).map(|i| render(scene, i, settings)).collect()
}

/// Total instance-map pixels owned by each object across all views.
/// Index 0 of the result corresponds to object id 1.
pub fn visible_pixel_counts(outputs: &[RenderOutput], object_count: usize) -> Vec<u64> {
    let mut counts = vec![0u64; object_count];
    for out in outputs {
        for &id in &out.instances {
            if id > 0 && (id as usize) <= object_count {
                counts[id as usize - 1] += 1;
            }
        }
    }
    counts
}

/// The segmentation-map path that sits alongside an RGB image path:
/// `view0.png` -> `view0.seg.png`.
pub fn seg_path_for(rgb_path: &Path) -> PathBuf {
    let stem = rgb_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    rgb_path.with_file_name(format!("{stem}.seg.png"))
}

/// Writes the RGB buffer as an 8-bit PNG at `path` and the instance map as a
/// 16-bit grayscale PNG alongside it.
pub fn write_png(output: &RenderOutput, path: &Path) -> Result<(), RenderError> {
    image::save_buffer(
        path,
        &output.rgb,
        output.width,
        output.height,
        image::ColorType::Rgb8,
    )
    .map_err(|source| RenderError::Write { path: path.to_path_buf(), source })?;

    let seg = image::ImageBuffer::<image::Luma<u16>, Vec<u16>>::from_raw(
        output.width,
        output.height,
        output.instances.clone(),
    )
    .expect("instance buffer matches dimensions");
    let seg_path = seg_path_for(path);
    image::DynamicImage::ImageLuma16(seg)
        .save(&seg_path)
        .map_err(|source| RenderError::Write { path: seg_path.clone(), source })?;
    Ok(())
}

/// Decodes an RGB PNG back into `(width, height, pixels)`.
pub fn read_png_rgb(path: &Path) -> Result<(u32, u32, Vec<u8>), RenderError> {
    let img = image::open(path)
        .map_err(|source| RenderError::Read { path: path.to_path_buf(), source })?
        .to_rgb8();
    Ok((img.width(), img.height(), img.into_raw()))
}

/// Decodes a 16-bit grayscale segmentation PNG.
pub fn read_png_seg(path: &Path) -> Result<(u32, u32, Vec<u16>), RenderError> {
    let img = image::open(path)
        .map_err(|source| RenderError::Read { path: path.to_path_buf(), source })?
        .to_luma16();
    Ok((img.width(), img.height(), img.into_raw()))
}

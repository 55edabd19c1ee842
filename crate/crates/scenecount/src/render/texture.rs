//! Built-in procedural textures for floors and walls.
//!
//! Texture ids are strings like `"solid:cream"`, `"checker:gray/white"`,
//! `"stripes:tan/brown"`, or `"noise:gray/slate"`, naming colors from a fixed
//! built-in table. Evaluation is a pure function of `(texture, point)`.

use thiserror::Error;

use crate::util::splitmix64;

/// Named sRGB colors usable in texture ids.
pub const NAMED_COLORS: &[(&str, [u8; 3])] = &[
    ("white", [245, 245, 245]),
    ("black", [35, 35, 35]),
    ("gray", [128, 128, 128]),
    ("lightgray", [200, 200, 200]),
    ("slate", [95, 105, 120]),
    ("charcoal", [70, 70, 75]),
    ("red", [205, 60, 50]),
    ("green", [80, 150, 80]),
    ("blue", [70, 110, 190]),
    ("yellow", [230, 200, 80]),
    ("orange", [235, 145, 60]),
    ("purple", [140, 90, 180]),
    ("teal", [60, 140, 140]),
    ("navy", [45, 60, 110]),
    ("brown", [125, 85, 60]),
    ("tan", [200, 165, 120]),
    ("beige", [222, 205, 175]),
    ("cream", [240, 230, 205]),
    ("olive", [128, 125, 70]),
];

pub fn named_color(name: &str) -> Option<[u8; 3]> {
    NAMED_COLORS.iter().find(|(n, _)| *n == name).map(|(_, c)| *c)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TextureError {
    #[error("unknown texture kind `{0}` (expected solid, checker, stripes, or noise)")]
    UnknownKind(String),
    #[error("unknown color name `{0}`")]
    UnknownColor(String),
    #[error("malformed texture id `{0}` (expected kind:color or kind:colorA/colorB)")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TextureKind {
    Solid,
    Checker,
    Stripes,
    Noise,
}

const CHECKER_CELL: f64 = 0.5;
const STRIPE_WIDTH: f64 = 0.35;
const NOISE_SCALE: f64 = 0.8;

/// A parsed, evaluatable texture.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Texture {
    kind: TextureKind,
    names: (String, String),
    colors: ([u8; 3], [u8; 3]),
}

impl Texture {
    /// Parses a texture id, rejecting unknown kinds and color names.
    pub fn parse(id: &str) -> Result<Texture, TextureError> {
        let (kind_str, colors_str) = id.split_once(':').ok_or_else(|| TextureError::Malformed(id.into()))?;
        let kind = match kind_str {
            "solid" => TextureKind::Solid,
            "checker" => TextureKind::Checker,
            "stripes" => TextureKind::Stripes,
            "noise" => TextureKind::Noise,
            other => return Err(TextureError::UnknownKind(other.into())),
        };
        let (name_a, name_b) = match (kind, colors_str.split_once('/')) {
            (TextureKind::Solid, None) => (colors_str, colors_str),
            (TextureKind::Solid, Some(_)) => return Err(TextureError::Malformed(id.into())),
            (_, Some((a, b))) => (a, b),
            (_, None) => return Err(TextureError::Malformed(id.into())),
        };
        let a = named_color(name_a).ok_or_else(|| TextureError::UnknownColor(name_a.into()))?;
        let b = named_color(name_b).ok_or_else(|| TextureError::UnknownColor(name_b.into()))?;
        Ok(Texture {
            kind,
            names: (name_a.to_string(), name_b.to_string()),
            colors: (a, b),
        })
    }

    /// Color names this texture uses (one entry for solids).
    pub fn color_names(&self) -> Vec<&str> {
        if self.names.0 == self.names.1 {
            vec![&self.names.0]
        } else {
            vec![&self.names.0, &self.names.1]
        }
    }

    /// Evaluates the texture at a surface point `(u, v)` in meters.
    pub fn sample(&self, u: f64, v: f64) -> [u8; 3] {
        let (a, b) = self.colors;
        match self.kind {
            TextureKind::Solid => a,
            TextureKind::Checker => {
                let parity = ((u / CHECKER_CELL).floor() + (v / CHECKER_CELL).floor()) as i64;
                if parity.rem_euclid(2) == 0 {
                    a
                } else {
                    b
                }
            }
            TextureKind::Stripes => {
                let band = (u / STRIPE_WIDTH).floor() as i64;
                if band.rem_euclid(2) == 0 {
                    a
                } else {
                    b
                }
            }
            TextureKind::Noise => {
                let n = value_noise(u / NOISE_SCALE, v / NOISE_SCALE, self.noise_seed());
                lerp_rgb(a, b, n)
            }
        }
    }

    fn noise_seed(&self) -> u64 {
        let mut seed = 0x7e97_0001u64;
        for byte in self.names.0.bytes().chain(self.names.1.bytes()) {
            seed = splitmix64(seed ^ u64::from(byte));
        }
        seed
    }
}

/// Evaluates the texture named by `texture_id` at `(u, v)`.
pub fn procedural_texture(texture_id: &str, u: f64, v: f64) -> Result<[u8; 3], TextureError> {
    Ok(Texture::parse(texture_id)?.sample(u, v))
}

fn lerp_rgb(a: [u8; 3], b: [u8; 3], t: f64) -> [u8; 3] {
    let mut out = [0u8; 3];
    for i in 0..3 {
        let v = f64::from(a[i]) + (f64::from(b[i]) - f64::from(a[i])) * t;
        out[i] = v.round().clamp(0.0, 255.0) as u8;
    }
    out
}

fn lattice(ix: i64, iy: i64, seed: u64) -> f64 {
    let h = splitmix64(seed ^ (ix as u64).wrapping_mul(0x9e37_79b9) ^ (iy as u64).rotate_left(32));
    (h >> 11) as f64 / (1u64 << 53) as f64
}

fn smooth(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

/// Bilinear value noise in [0, 1], deterministic in `(x, y, seed)`.
fn value_noise(x: f64, y: f64, seed: u64) -> f64 {
    let ix = x.floor() as i64;
    let iy = y.floor() as i64;
    let fx = x - x.floor();
    let fy = y - y.floor();
    let v00 = lattice(ix, iy, seed);
    let v10 = lattice(ix + 1, iy, seed);
    let v01 = lattice(ix, iy + 1, seed);
    let v11 = lattice(ix + 1, iy + 1, seed);
    let sx = smooth(fx);
    let sy = smooth(fy);
    let a = v00 + (v10 - v00) * sx;
    let b = v01 + (v11 - v01) * sx;
    a + (b - a) * sy
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solid_returns_its_color() {
        let beige = named_color("beige").unwrap();
        assert_eq!(procedural_texture("solid:beige", 0.3, -2.7).unwrap(), beige);
        assert_eq!(procedural_texture("solid:beige", 100.0, 5.0).unwrap(), beige);
    }

    #[test]
    fn checker_alternates_by_parity() {
        // Cell size 0.5 m: (0.25, 0.25) and (0.75, 0.25) are adjacent cells.
        let a = procedural_texture("checker:white/black", 0.25, 0.25).unwrap();
        let b = procedural_texture("checker:white/black", 0.75, 0.25).unwrap();
        assert_eq!(a, named_color("white").unwrap());
        assert_eq!(b, named_color("black").unwrap());
        // Diagonal neighbor is back to the first color.
        let c = procedural_texture("checker:white/black", 0.75, 0.75).unwrap();
        assert_eq!(c, a);
    }

    #[test]
    fn noise_is_deterministic() {
        let a = procedural_texture("noise:gray/slate", 1.234, -5.678).unwrap();
        let b = procedural_texture("noise:gray/slate", 1.234, -5.678).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_ids_are_rejected() {
        assert_eq!(
            Texture::parse("plaid:red/blue"),
            Err(TextureError::UnknownKind("plaid".into()))
        );
        assert_eq!(
            Texture::parse("solid:chartreuse"),
            Err(TextureError::UnknownColor("chartreuse".into()))
        );
        assert!(matches!(Texture::parse("checker"), Err(TextureError::Malformed(_))));
        assert!(matches!(Texture::parse("checker:red"), Err(TextureError::Malformed(_))));
    }

    #[test]
    fn stripes_alternate_only_along_u() {
        let a = procedural_texture("stripes:tan/brown", 0.1, 0.0).unwrap();
        let b = procedural_texture("stripes:tan/brown", 0.1, 9.9).unwrap();
        assert_eq!(a, b);
        let c = procedural_texture("stripes:tan/brown", 0.1 + STRIPE_WIDTH, 0.0).unwrap();
        assert_ne!(a, c);
    }
}

//! Deterministic synthetic vessel scenes with exact ground truth.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{EvalError, GroundTruth};
use crate::cutcost::GrayImage;
use crate::vessel::VesselMask;

/// Material surface shape across the vessel, as a function of the
/// horizontal position. Vertical positions are fractions of the interior
/// height measured from the top (0.6 puts the boundary at 60% depth).
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Flat {
        level: f64,
    },
    /// Meniscus-like bowl: at `level` on the walls, `depth` deeper in the
    /// center of the vessel.
    Parabolic {
        level: f64,
        depth: f64,
    },
    /// Absolute boundary row per interior column.
    Explicit(Vec<u32>),
}

/// Speckled stratum inside the material, emulating strongly textured
/// solids: one band of pixels drawn per pixel between a bright and a
/// dark value around the material base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Texture {
    /// Intensity swing around the material base (clamped to 0..=255).
    pub amplitude: f64,
    /// Band position as a fraction of the vessel height; must lie below
    /// the boundary profile.
    pub depth: f64,
    /// Probability of the bright draw.
    pub bright_fraction: f64,
}

impl Texture {
    pub fn new(amplitude: f64) -> Self {
        Self {
            amplitude,
            depth: 0.75,
            bright_fraction: 0.7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub width: usize,
    pub height: usize,
    /// Inset of the contour ring from the image border.
    pub margin: usize,
    pub profile: Profile,
    pub material_intensity: f64,
    pub air_intensity: f64,
    pub background_intensity: f64,
    /// Standard deviation of additive Gaussian intensity noise.
    pub noise_sigma: f64,
    pub texture: Option<Texture>,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            margin: 4,
            profile: Profile::Flat { level: 0.6 },
            material_intensity: 40.0,
            air_intensity: 200.0,
            background_intensity: 8.0,
            noise_sigma: 0.0,
            texture: None,
            seed: 0,
        }
    }
}

/// One generated scene: the rendered image, the binary contour image,
/// the exact boundary and the vessel mask the contour fills to.
#[derive(Debug, Clone)]
pub struct SynthScene {
    pub image: GrayImage,
    pub contour: GrayImage,
    pub ground_truth: GroundTruth,
    pub mask: VesselMask,
}

/// Interior geometry implied by a spec: inclusive column and row ranges.
fn interior_extent(spec: &SynthSpec) -> Result<(usize, usize, usize, usize), EvalError> {
    let m = spec.margin;
    if spec.width < 2 * m + 5 || spec.height < 2 * m + 5 {
        return Err(EvalError::InvalidProfile(format!(
            "image {}x{} too small for margin {m}",
            spec.width, spec.height
        )));
    }
    Ok((m + 1, spec.width - m - 2, m + 1, spec.height - m - 2))
}

fn profile_rows(spec: &SynthSpec) -> Result<Vec<u32>, EvalError> {
    let (x0, x1, y0, y1) = interior_extent(spec)?;
    let cols = x1 - x0 + 1;
    let h = (y1 - y0) as f64;
    let at_depth = |depth: f64| y0 as f64 + depth * h;
    let rows: Vec<u32> = match &spec.profile {
        Profile::Flat { level } => {
            let row = at_depth(*level).round() as u32;
            vec![row; cols]
        }
        Profile::Parabolic { level, depth } => (0..cols)
            .map(|i| {
                let t = if cols > 1 {
                    i as f64 / (cols - 1) as f64
                } else {
                    0.5
                };
                let bowl = 4.0 * t * (1.0 - t);
                (at_depth(*level) + depth * h * bowl).round() as u32
            })
            .collect(),
        Profile::Explicit(rows) => {
            if rows.len() != cols {
                return Err(EvalError::InvalidProfile(format!(
                    "profile has {} columns, interior has {cols}",
                    rows.len()
                )));
            }
            rows.clone()
        }
    };
    for &row in &rows {
        if (row as usize) < y0 || (row as usize) > y1 {
            return Err(EvalError::InvalidProfile(format!(
                "boundary row {row} outside interior rows {y0}..={y1}"
            )));
        }
    }
    Ok(rows)
}

/// Render a synthetic vessel scene. Deterministic for a given spec.
pub fn synthesize(spec: &SynthSpec) -> Result<SynthScene, EvalError> {
    let (x0, x1, y0, y1) = interior_extent(spec)?;
    let rows = profile_rows(spec)?;
    let (w, h) = (spec.width, spec.height);
    let m = spec.margin;

    let band_row = match spec.texture {
        Some(texture) => {
            let row = (y0 as f64 + texture.depth * (y1 - y0) as f64).round() as usize;
            let deepest = rows.iter().copied().max().unwrap_or(0) as usize;
            if row <= deepest || row > y1 {
                return Err(EvalError::InvalidProfile(format!(
                    "texture band row {row} must lie below the boundary (deepest {deepest})"
                )));
            }
            Some(row)
        }
        None => None,
    };

    let mut contour = GrayImage::new(w, h);
    for x in m..w - m {
        contour.set(x, m, 255.0);
        contour.set(x, h - m - 1, 255.0);
    }
    for y in m..h - m {
        contour.set(m, y, 255.0);
        contour.set(w - m - 1, y, 255.0);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = if spec.noise_sigma > 0.0 {
        Some(Normal::new(0.0, spec.noise_sigma).expect("finite sigma"))
    } else {
        None
    };

    let mut image = GrayImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let interior = (x0..=x1).contains(&x) && (y0..=y1).contains(&y);
            let mut value = if interior {
                let boundary = rows[x - x0] as usize;
                if y >= boundary {
                    let mut v = spec.material_intensity;
                    if let Some(texture) = spec.texture {
                        if Some(y) == band_row {
                            v += if rng.random_bool(texture.bright_fraction) {
                                texture.amplitude
                            } else {
                                -texture.amplitude
                            };
                        }
                    }
                    v
                } else {
                    spec.air_intensity
                }
            } else {
                spec.background_intensity
            };
            if let Some(noise) = &noise {
                value += noise.sample(&mut rng);
            }
            image.set(x, y, value.clamp(0.0, 255.0));
        }
    }

    let mut gt = vec![None; w];
    for (i, &row) in rows.iter().enumerate() {
        gt[x0 + i] = Some(row);
    }

    let mask = VesselMask::from_contour(&contour).expect("generated ring is closed");
    Ok(SynthScene {
        image,
        contour,
        ground_truth: GroundTruth::from_rows(gt),
        mask,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_free_flat_scene_has_single_step_per_column() {
        let spec = SynthSpec {
            profile: Profile::Flat { level: 0.5 },
            ..SynthSpec::new(40, 60)
        };
        let scene = synthesize(&spec).unwrap();
        let (top, bottom) = scene.mask.vessel_rows();
        for x in 0..40 {
            let Some(boundary) = scene.ground_truth.row(x) else {
                continue;
            };
            for y in top..=bottom {
                let v = scene.image.get(x, y);
                let expect = if y >= boundary as usize { 40.0 } else { 200.0 };
                assert_eq!(v, expect, "pixel ({x},{y})");
            }
        }
    }

    #[test]
    fn parabolic_ground_truth_matches_profile() {
        let spec = SynthSpec {
            profile: Profile::Parabolic {
                level: 0.4,
                depth: 0.2,
            },
            ..SynthSpec::new(50, 70)
        };
        let scene = synthesize(&spec).unwrap();
        let (top, bottom) = scene.mask.vessel_rows();
        let h = (bottom - top) as f64;
        let defined: Vec<usize> = (0..50)
            .filter(|&x| scene.ground_truth.row(x).is_some())
            .collect();
        let first = *defined.first().unwrap();
        let last = *defined.last().unwrap();
        let edge = scene.ground_truth.row(first).unwrap();
        assert_eq!(scene.ground_truth.row(last).unwrap(), edge);
        let mid = defined[defined.len() / 2];
        let center = scene.ground_truth.row(mid).unwrap();
        let expect_edge = (top as f64 + 0.4 * h).round() as u32;
        assert_eq!(edge, expect_edge);
        assert!(center > edge, "bowl should be deeper in the center");
        assert!((center as f64 - (top as f64 + 0.6 * h)).abs() <= 1.0);
    }

    #[test]
    fn same_seed_reproduces_the_scene() {
        let spec = SynthSpec {
            noise_sigma: 12.0,
            texture: Some(Texture::new(70.0)),
            seed: 42,
            ..SynthSpec::new(30, 40)
        };
        let a = synthesize(&spec).unwrap();
        let b = synthesize(&spec).unwrap();
        assert_eq!(a.image, b.image);
        assert_eq!(a.contour, b.contour);
        assert_eq!(a.ground_truth.rows(), b.ground_truth.rows());
    }

    #[test]
    fn different_seed_changes_noise() {
        let base = SynthSpec {
            noise_sigma: 12.0,
            ..SynthSpec::new(30, 40)
        };
        let a = synthesize(&base).unwrap();
        let b = synthesize(&SynthSpec { seed: 1, ..base }).unwrap();
        assert_ne!(a.image, b.image);
    }

    #[test]
    fn out_of_interior_profile_is_rejected() {
        let spec = SynthSpec {
            profile: Profile::Explicit(vec![0; 40 - 2 * 4 - 2]),
            ..SynthSpec::new(40, 60)
        };
        assert!(matches!(
            synthesize(&spec),
            Err(EvalError::InvalidProfile(_))
        ));
    }

    #[test]
    fn texture_speckles_one_band_inside_the_material() {
        let spec = SynthSpec {
            material_intensity: 80.0,
            air_intensity: 190.0,
            texture: Some(Texture::new(175.0)),
            profile: Profile::Flat { level: 0.45 },
            ..SynthSpec::new(40, 60)
        };
        let scene = synthesize(&spec).unwrap();
        let (top, bottom) = scene.mask.vessel_rows();
        let band = (top as f64 + 0.75 * (bottom - top) as f64).round() as usize;
        let mut saw_bright = false;
        let mut saw_dark = false;
        for x in 0..40 {
            let Some(boundary) = scene.ground_truth.row(x) else {
                continue;
            };
            assert!(band > boundary as usize, "band must sit in the material");
            for y in top..=bottom {
                let v = scene.image.get(x, y);
                if y == band {
                    assert!(v == 255.0 || v == 0.0, "band speckle at ({x},{y}): {v}");
                    saw_bright |= v == 255.0;
                    saw_dark |= v == 0.0;
                } else if y >= boundary as usize {
                    assert_eq!(v, 80.0, "material base at ({x},{y})");
                } else {
                    assert_eq!(v, 190.0, "air must stay clean at ({x},{y})");
                }
            }
        }
        assert!(saw_bright && saw_dark, "speckle should hit both levels");
    }

    #[test]
    fn texture_band_must_sit_below_the_boundary() {
        let spec = SynthSpec {
            profile: Profile::Flat { level: 0.8 },
            texture: Some(Texture::new(100.0)),
            ..SynthSpec::new(40, 60)
        };
        assert!(matches!(
            synthesize(&spec),
            Err(EvalError::InvalidProfile(_))
        ));
    }
}

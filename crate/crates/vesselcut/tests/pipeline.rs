//! Cross-module behavior on synthetic suites.

use vesselcut::cutcost::CostParams;
use vesselcut::evalbench::{detection_score, synth};
use vesselcut::segment::{extract_boundary, render_overlay, segment};

fn detection_rate(noise_sigma: f64, count: usize) -> f64 {
    let mut detected = 0;
    for i in 0..count {
        let spec = synth::SynthSpec {
            profile: synth::Profile::Flat {
                level: 0.35 + 0.02 * (i % 10) as f64,
            },
            noise_sigma,
            seed: 7000 + i as u64,
            ..synth::SynthSpec::new(100, 130)
        };
        let scene = synth::synthesize(&spec).unwrap();
        let labeling = segment(&scene.image, &scene.mask, &CostParams::default()).unwrap();
        let curve = extract_boundary(&labeling, &scene.mask);
        let score = detection_score(&curve, &scene.ground_truth, &scene.mask, 0.05).unwrap();
        detected += score.detected as usize;
    }
    detected as f64 / count as f64
}

/// Detection rate does not improve as intensity noise grows.
#[test]
fn detection_rate_is_monotone_in_noise() {
    let levels = [0.0, 10.0, 30.0, 60.0];
    let rates: Vec<f64> = levels.iter().map(|&n| detection_rate(n, 20)).collect();
    for pair in rates.windows(2) {
        assert!(
            pair[1] <= pair[0] + 1e-12,
            "rate increased with noise: {rates:?}"
        );
    }
    assert_eq!(rates[0], 1.0, "clean synthetics must all be detected");
}

/// The overlay paints the boundary red exactly where the curve says.
#[test]
fn overlay_marks_boundary_pixels_red() {
    let scene = synth::synthesize(&synth::SynthSpec::new(60, 80)).unwrap();
    let labeling = segment(&scene.image, &scene.mask, &CostParams::default()).unwrap();
    let curve = extract_boundary(&labeling, &scene.mask);

    let base = image::DynamicImage::ImageRgb8(image::RgbImage::from_pixel(
        60,
        80,
        image::Rgb([10, 10, 10]),
    ));
    let overlay = render_overlay(&base, &curve);
    let mut red = 0;
    for (x, row) in curve.rows().iter().enumerate() {
        if let Some(y) = *row {
            assert_eq!(overlay.get_pixel(x as u32, y).0, [255, 0, 0]);
            red += 1;
        }
    }
    assert!(red > 0, "expected at least one boundary pixel");
}

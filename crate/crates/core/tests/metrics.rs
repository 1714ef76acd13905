mod oracles;

use epf_core::metrics::{
    contrast_ratio, delta_brightness, delta_color, edge_map, full_report, gcf, smooth_mask, so_ratio,
    AttributeReport,
};
use epf_core::raster::{lab_to_srgb, srgb_to_lab};
use epf_core::{ImageF, PixelMask};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn identity_pair() {
    for seed in 0..5 {
        let i = oracles::step_image(32, 24, 3, seed);
        let r = full_report(&i, &i).unwrap();
        assert_eq!(r, AttributeReport::identity(), "seed {seed}");
    }
}

#[test]
fn constant_output() {
    let i = oracles::random_image(30, 20, 3, 4);
    let j = ImageF::filled(30, 20, 3, 0.5).unwrap();
    let r = full_report(&i, &j).unwrap();
    assert_eq!(r.so, 0.0);
    assert_eq!(r.contrast_ratio, 0.0);
    // Gray has zero chroma, so the shift is the mean chroma of I.
    let chroma: f64 = (0..20)
        .flat_map(|y| (0..30).map(move |x| (x, y)))
        .map(|(x, y)| {
            let lab = oracles::lab([i.get(x, y, 0), i.get(x, y, 1), i.get(x, y, 2)]);
            lab[1].hypot(lab[2])
        })
        .sum::<f64>()
        / 600.0;
    assert!(close(r.delta_c, chroma, 1e-9), "{} vs {chroma}", r.delta_c);
}

#[test]
fn so_matches_two_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let i = oracles::random_image(8, 8, 3, 1);
    let j = oracles::random_image(8, 8, 3, 2);
    let mask = PixelMask::from_fn(8, 8, |_, _| rng.gen_bool(0.5));
    assert!(close(so_ratio(&i, &j, Some(&mask)).unwrap(), oracles::so(&i, &j, Some(&mask)), 1e-12));
    assert!(close(so_ratio(&i, &j, None).unwrap(), oracles::so(&i, &j, None), 1e-12));
}

#[test]
fn smooth_and_edge_partition() {
    for seed in 0..6 {
        let i = oracles::step_image(40, 30, 3, seed);
        let j = oracles::random_image(40, 30, 3, seed + 100);
        let smooth = smooth_mask(&i);
        let edge = smooth.complement();
        assert_eq!(smooth.count() + edge.count(), 40 * 30);
        assert!(smooth.bits().iter().zip(edge.bits()).all(|(a, b)| a != b));

        // Weighted by their denominators the parts add up to the whole.
        let den = |m: Option<&PixelMask>| {
            let g = oracles::gradient(&i);
            (0..30)
                .flat_map(|y| (0..40).map(move |x| (x, y)))
                .filter(|&(x, y)| m.is_none_or(|m| m.get(x, y)))
                .map(|(x, y)| g[y][x])
                .sum::<f64>()
        };
        let r = full_report(&i, &j).unwrap();
        let parts = r.so_smooth * den(Some(&smooth)) + r.so_edge * den(Some(&edge));
        assert!(close(parts, r.so * den(None), 1e-9), "seed {seed}");
    }
}

#[test]
fn masks_depend_only_on_original() {
    let i = oracles::step_image(36, 28, 3, 3);
    let smooth = smooth_mask(&i);
    for seed in 0..4 {
        let j = oracles::random_image(36, 28, 3, seed);
        let r = full_report(&i, &j).unwrap();
        assert_eq!(r, AttributeReport::with_mask(&i, &j, &smooth).unwrap());
        assert!(close(r.so_smooth, oracles::so(&i, &j, Some(&smooth)), 1e-12));
    }
}

#[test]
fn color_shifts_match_naive_loops() {
    for seed in 0..8 {
        let i = oracles::random_image(17, 13, 3, seed);
        let j = oracles::random_image(17, 13, 3, seed + 50);
        assert!(close(delta_brightness(&i, &j).unwrap(), oracles::delta_l(&i, &j), 1e-10));
        assert!(close(delta_color(&i, &j).unwrap(), oracles::delta_c(&i, &j), 1e-10));
    }
    // No pixel bright enough: the ratio is defined as 1.
    let black = ImageF::filled(5, 5, 3, 0.0).unwrap();
    let other = oracles::random_image(5, 5, 3, 1);
    assert_eq!(delta_brightness(&black, &other).unwrap(), 1.0);
}

#[test]
fn gcf_matches_naive_pyramid() {
    for (seed, (w, h)) in [(64, 48), (37, 23), (2, 2), (5, 300), (129, 65)].into_iter().enumerate() {
        let i = oracles::random_image(w, h, 3, seed as u64);
        let got = gcf(&i).unwrap();
        assert!(close(got, oracles::gcf(&i), 1e-10), "{w}x{h}: {got} vs {}", oracles::gcf(&i));
    }
    let i = oracles::step_image(50, 40, 3, 1);
    let j = oracles::random_image(50, 40, 3, 2);
    assert!(close(contrast_ratio(&i, &j).unwrap(), oracles::gcf(&j) / oracles::gcf(&i), 1e-10));
}

#[test]
fn saliency_is_bounded() {
    for seed in 0..50 {
        let (w, h) = (8 + (seed as usize * 7) % 40, 8 + (seed as usize * 11) % 30);
        let img = if seed % 2 == 0 {
            oracles::random_image(w, h, 3, seed)
        } else {
            oracles::step_image(w, h, 3, seed)
        };
        let e = edge_map(&img);
        assert!(e.saliency.iter().all(|s| (0.0..=1.0).contains(s)), "seed {seed}");
        assert!(e.saliency.contains(&1.0), "seed {seed}");
    }
}

#[test]
fn step_mask_keeps_away_from_edge() {
    let (w, h, c) = (60, 30, 30);
    let img = ImageF::from_fn(w, h, 3, |x, _, _| if x < c { 0.2 } else { 0.8 }).unwrap();
    let m = smooth_mask(&img);
    for y in 0..h {
        for x in 0..w {
            let d = (x as isize - c as isize).abs();
            if d <= 5 {
                assert!(!m.get(x, y), "({x},{y}) next to the step is smooth");
            }
            if d >= 10 {
                assert!(m.get(x, y), "({x},{y}) far from the step is not smooth");
            }
        }
    }
}

proptest! {
    #[test]
    fn lab_round_trip(r in 0.0f64..=1.0, g in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let lab = srgb_to_lab([r, g, b]);
        let back = lab_to_srgb(lab);
        for (x, y) in back.iter().zip([r, g, b]) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
        let want = oracles::lab([r, g, b]);
        for (x, y) in lab.iter().zip(want) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }
}

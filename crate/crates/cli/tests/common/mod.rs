#![allow(dead_code)]

pub mod reference;

use std::path::{Path, PathBuf};

pub const SIZE: u32 = 64;
pub const DISK_RADIUS: f64 = 10.0;
pub const MASK_RADIUS: f64 = 14.0;
pub const REGEN_VAR: &str = "REGIONXFER_REGEN_GOLDEN";

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

pub fn fixture(name: &str) -> PathBuf {
    fixtures_dir().join(name)
}

fn dist_to_center(x: u32, y: u32) -> f64 {
    let c = SIZE as f64 / 2.0;
    ((x as f64 - c).powi(2) + (y as f64 - c).powi(2)).sqrt()
}

fn to_byte(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

/// Dark reddish disk on a bright backdrop with a gentle horizontal ramp.
pub fn content_scene() -> image::RgbImage {
    image::RgbImage::from_fn(SIZE, SIZE, |x, y| {
        let t = x as f64 / (SIZE - 1) as f64;
        let rgb = if dist_to_center(x, y) <= DISK_RADIUS {
            [0.18, 0.10 + 0.05 * t, 0.08]
        } else {
            [0.90 - 0.15 * t, 0.85, 0.70 + 0.10 * t]
        };
        image::Rgb(rgb.map(to_byte))
    })
}

/// 8-pixel checkerboard of two colors.
pub fn style_checkerboard() -> image::RgbImage {
    image::RgbImage::from_fn(SIZE, SIZE, |x, y| {
        if (x / 8 + y / 8) % 2 == 0 {
            image::Rgb([230, 60, 30])
        } else {
            image::Rgb([25, 80, 200])
        }
    })
}

/// Over-sized disk mask around the dark disk.
pub fn disk_mask() -> image::GrayImage {
    image::GrayImage::from_fn(SIZE, SIZE, |x, y| {
        image::Luma([if dist_to_center(x, y) <= MASK_RADIUS { 255 } else { 0 }])
    })
}

pub fn write_fixtures() {
    std::fs::create_dir_all(fixtures_dir()).unwrap();
    content_scene().save(fixture("content.png")).unwrap();
    style_checkerboard().save(fixture("style.png")).unwrap();
    disk_mask().save(fixture("mask.png")).unwrap();
}

pub fn regen_requested() -> bool {
    std::env::var_os(REGEN_VAR).is_some_and(|v| v == "1")
}

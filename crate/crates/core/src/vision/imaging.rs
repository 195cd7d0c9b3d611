use std::io::Cursor;
use std::path::{Path, PathBuf};
use std::process::Command;

use image::imageops::{self, FilterType};
use image::{ImageFormat, Rgba, RgbaImage};

use super::VisionError;
use crate::diag::Diagnostic;
use crate::ui_model::BoundingBox;

pub const STANDARD_SIZE: u32 = 128;
pub const STROKE_PX: u32 = 3;
pub const RED: Rgba<u8> = Rgba([255, 0, 0, 255]);

pub fn decode_image(bytes: &[u8]) -> Result<RgbaImage, VisionError> {
    image::load_from_memory(bytes)
        .map(|img| img.to_rgba8())
        .map_err(|e| VisionError::Decode(e.to_string()))
}

pub fn load_image(path: &Path) -> Result<RgbaImage, VisionError> {
    decode_image(&std::fs::read(path)?)
}

pub fn encode_png(img: &RgbaImage) -> Result<Vec<u8>, VisionError> {
    let mut buf = Cursor::new(Vec::new());
    img.write_to(&mut buf, ImageFormat::Png)
        .map_err(|e| VisionError::Encode(e.to_string()))?;
    Ok(buf.into_inner())
}

/// Exact pixel crop. Boxes reaching past the image edge are clamped.
pub fn crop_icon(screenshot: &RgbaImage, bounds: BoundingBox) -> Result<(RgbaImage, Option<Diagnostic>), VisionError> {
    let (w, h) = screenshot.dimensions();
    let right = bounds.right.min(w);
    let bottom = bounds.bottom.min(h);
    if bounds.left >= right || bounds.top >= bottom {
        return Err(VisionError::EmptyCrop);
    }
    let diag = (right != bounds.right || bottom != bounds.bottom).then(|| {
        Diagnostic::new(
            "crop",
            format!(
                "bounds [{}, {}, {}, {}] exceed {w}x{h} image; clamped to [{}, {}, {right}, {bottom}]",
                bounds.left, bounds.top, bounds.right, bounds.bottom, bounds.left, bounds.top
            ),
        )
    });
    let crop = imageops::crop_imm(screenshot, bounds.left, bounds.top, right - bounds.left, bottom - bounds.top).to_image();
    Ok((crop, diag))
}

/// External super-resolution engine.
pub trait Upscaler: Send + Sync {
    fn upscale(&self, img: &RgbaImage) -> Result<RgbaImage, VisionError>;
}

/// Runs an external program with `{input}` / `{output}` placeholders in its
/// arguments, e.g. `realesrgan-ncnn-vulkan -i {input} -o {output}`.
#[derive(Debug, Clone)]
pub struct CommandUpscaler {
    pub program: String,
    pub args: Vec<String>,
}

impl Upscaler for CommandUpscaler {
    fn upscale(&self, img: &RgbaImage) -> Result<RgbaImage, VisionError> {
        let dir = std::env::temp_dir().join(format!("altgen-sr-{}-{:?}", std::process::id(), std::thread::current().id()));
        std::fs::create_dir_all(&dir)?;
        let input: PathBuf = dir.join("in.png");
        let output: PathBuf = dir.join("out.png");
        std::fs::write(&input, encode_png(img)?)?;
        let args: Vec<String> = self
            .args
            .iter()
            .map(|a| {
                a.replace("{input}", &input.to_string_lossy())
                    .replace("{output}", &output.to_string_lossy())
            })
            .collect();
        let status = Command::new(&self.program)
            .args(&args)
            .status()
            .map_err(|e| VisionError::Engine(format!("{}: {e}", self.program)))?;
        if !status.success() {
            return Err(VisionError::Engine(format!("{} exited with {status}", self.program)));
        }
        let result = load_image(&output);
        let _ = std::fs::remove_dir_all(&dir);
        result
    }
}

fn corner_consensus(img: &RgbaImage) -> Rgba<u8> {
    let (w, h) = img.dimensions();
    let corners = [
        *img.get_pixel(0, 0),
        *img.get_pixel(w - 1, 0),
        *img.get_pixel(0, h - 1),
        *img.get_pixel(w - 1, h - 1),
    ];
    if corners.iter().all(|c| *c == corners[0]) {
        corners[0]
    } else {
        Rgba([0, 0, 0, 0])
    }
}

/// Aspect-preserving fit into a `size`×`size` canvas, centred, padded with the
/// corner colour (or transparent when the corners disagree).
fn fit_square(img: &RgbaImage, size: u32) -> RgbaImage {
    let (w, h) = img.dimensions();
    if w == size && h == size {
        return img.clone();
    }
    let long = w.max(h) as f64;
    let nw = ((w as f64 * size as f64 / long).round() as u32).clamp(1, size);
    let nh = ((h as f64 * size as f64 / long).round() as u32).clamp(1, size);
    let resized = imageops::resize(img, nw, nh, FilterType::Lanczos3);
    let mut canvas = RgbaImage::from_pixel(size, size, corner_consensus(img));
    imageops::replace(&mut canvas, &resized, ((size - nw) / 2) as i64, ((size - nh) / 2) as i64);
    canvas
}

/// Bring an icon to 128×128, optionally through an external upscaler first.
pub fn standardize(icon: &RgbaImage, upscaler: Option<&dyn Upscaler>) -> Result<(RgbaImage, Option<Diagnostic>), VisionError> {
    if icon.width() == 0 || icon.height() == 0 {
        return Err(VisionError::EmptyImage);
    }
    let mut diag = None;
    let source = match upscaler {
        Some(engine) => match engine.upscale(icon) {
            Ok(up) if up.width() > 0 && up.height() > 0 => up,
            Ok(_) => {
                diag = Some(Diagnostic::new("standardize", "upscaler returned an empty image; using built-in resize"));
                icon.clone()
            }
            Err(e) => {
                diag = Some(Diagnostic::new("standardize", format!("upscaler failed ({e}); using built-in resize")));
                icon.clone()
            }
        },
        None => icon.clone(),
    };
    Ok((fit_square(&source, STANDARD_SIZE), diag))
}

/// Draw a pure-red 3 px frame just inside `bounds` (relative to `container`).
pub fn mark_bbox(container: &RgbaImage, bounds: BoundingBox) -> RgbaImage {
    let mut out = container.clone();
    let right = bounds.right.min(out.width());
    let bottom = bounds.bottom.min(out.height());
    for y in bounds.top..bottom {
        for x in bounds.left..right {
            let on_frame = x < bounds.left + STROKE_PX
                || x + STROKE_PX >= bounds.right
                || y < bounds.top + STROKE_PX
                || y + STROKE_PX >= bounds.bottom;
            if on_frame {
                out.put_pixel(x, y, RED);
            }
        }
    }
    out
}

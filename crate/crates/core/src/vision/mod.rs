//! Icon image preparation and the OCR adapter.

mod imaging;
mod ocr;

pub use imaging::{
    crop_icon, decode_image, encode_png, load_image, mark_bbox, standardize, CommandUpscaler, Upscaler, RED,
    STANDARD_SIZE, STROKE_PX,
};
pub use ocr::{
    ocr_in_icon_text, BoundedOcr, CommandOcr, FixtureOcr, HttpOcr, OcrEngine, OcrLine, OcrOptions,
    DEFAULT_MIN_CONFIDENCE,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VisionError {
    #[error("image decode failed: {0}")]
    Decode(String),
    #[error("image encode failed: {0}")]
    Encode(String),
    #[error("crop box lies outside the image")]
    EmptyCrop,
    #[error("empty image")]
    EmptyImage,
    #[error("external engine failed: {0}")]
    Engine(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

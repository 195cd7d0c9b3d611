use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;
use std::time::Duration;

use base64::Engine as _;
use image::RgbaImage;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{encode_png, VisionError};
use crate::diag::Diagnostic;
use crate::sync::Semaphore;

pub const DEFAULT_MIN_CONFIDENCE: f64 = 0.4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcrLine {
    pub text: String,
    pub confidence: f64,
}

/// Anything that turns PNG bytes into recognised text lines.
pub trait OcrEngine: Send + Sync {
    fn recognize(&self, png: &[u8]) -> Result<Vec<OcrLine>, VisionError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OcrOptions {
    pub min_confidence: f64,
    /// Run OCR on the 128×128 standardized icon rather than the raw crop.
    pub on_standardized: bool,
    pub max_concurrency: usize,
}

impl Default for OcrOptions {
    fn default() -> Self {
        Self {
            min_confidence: DEFAULT_MIN_CONFIDENCE,
            on_standardized: true,
            max_concurrency: 4,
        }
    }
}

/// In-icon text: confident lines only, trimmed, de-duplicated ignoring case.
/// Engine failures degrade to an empty list plus a diagnostic.
pub fn ocr_in_icon_text(icon: &RgbaImage, engine: &dyn OcrEngine, min_confidence: f64) -> (Vec<String>, Option<Diagnostic>) {
    let png = match encode_png(icon) {
        Ok(p) => p,
        Err(e) => return (Vec::new(), Some(Diagnostic::new("ocr", e.to_string()))),
    };
    let lines = match engine.recognize(&png) {
        Ok(lines) => lines,
        Err(e) => return (Vec::new(), Some(Diagnostic::new("ocr", format!("engine unavailable: {e}")))),
    };
    let mut seen = HashSet::new();
    let texts = lines
        .into_iter()
        .filter(|l| l.confidence >= min_confidence)
        .map(|l| l.text.trim().to_owned())
        .filter(|t| !t.is_empty())
        .filter(|t| seen.insert(t.to_lowercase()))
        .collect();
    (texts, None)
}

fn parse_lines(body: &[u8]) -> Result<Vec<OcrLine>, VisionError> {
    let lines: Vec<OcrLine> =
        serde_json::from_slice(body).map_err(|e| VisionError::Engine(format!("bad OCR response: {e}")))?;
    Ok(lines
        .into_iter()
        .map(|l| OcrLine {
            confidence: l.confidence.clamp(0.0, 1.0),
            ..l
        })
        .collect())
}

/// Canned answers keyed by the SHA-256 of the PNG bytes; unknown images have no text.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FixtureOcr {
    pub by_sha256: HashMap<String, Vec<OcrLine>>,
}

impl FixtureOcr {
    pub fn key(png: &[u8]) -> String {
        hex::encode(Sha256::digest(png))
    }

    pub fn insert(&mut self, png: &[u8], lines: Vec<OcrLine>) {
        self.by_sha256.insert(Self::key(png), lines);
    }
}

impl OcrEngine for FixtureOcr {
    fn recognize(&self, png: &[u8]) -> Result<Vec<OcrLine>, VisionError> {
        Ok(self.by_sha256.get(&Self::key(png)).cloned().unwrap_or_default())
    }
}

/// Long-lived OCR subprocess speaking JSON lines: one
/// `{"png_base64": "..."}` request per line in, one JSON array of
/// `{text, confidence}` per line out.
pub struct CommandOcr {
    io: Mutex<(Child, ChildStdin, BufReader<ChildStdout>)>,
}

impl CommandOcr {
    pub fn spawn(program: &str, args: &[String]) -> Result<Self, VisionError> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| VisionError::Engine(format!("{program}: {e}")))?;
        let stdin = child.stdin.take().ok_or_else(|| VisionError::Engine("no stdin".into()))?;
        let stdout = child.stdout.take().ok_or_else(|| VisionError::Engine("no stdout".into()))?;
        Ok(Self {
            io: Mutex::new((child, stdin, BufReader::new(stdout))),
        })
    }
}

impl OcrEngine for CommandOcr {
    fn recognize(&self, png: &[u8]) -> Result<Vec<OcrLine>, VisionError> {
        let mut guard = self.io.lock().map_err(|_| VisionError::Engine("ocr process poisoned".into()))?;
        let (_, stdin, stdout) = &mut *guard;
        let request = serde_json::json!({ "png_base64": base64::engine::general_purpose::STANDARD.encode(png) });
        writeln!(stdin, "{request}").map_err(|e| VisionError::Engine(e.to_string()))?;
        stdin.flush().map_err(|e| VisionError::Engine(e.to_string()))?;
        let mut line = String::new();
        let n = stdout.read_line(&mut line).map_err(|e| VisionError::Engine(e.to_string()))?;
        if n == 0 {
            return Err(VisionError::Engine("ocr process closed its output".into()));
        }
        parse_lines(line.trim_end().as_bytes())
    }
}

impl Drop for CommandOcr {
    fn drop(&mut self) {
        if let Ok(mut guard) = self.io.lock() {
            let _ = guard.0.kill();
            let _ = guard.0.wait();
        }
    }
}

/// POSTs `image/png` bytes to an endpoint answering with a JSON array of lines.
pub struct HttpOcr {
    url: String,
    client: reqwest::blocking::Client,
}

impl HttpOcr {
    pub fn new(url: impl Into<String>, timeout: Duration) -> Result<Self, VisionError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| VisionError::Engine(e.to_string()))?;
        Ok(Self { url: url.into(), client })
    }
}

impl OcrEngine for HttpOcr {
    fn recognize(&self, png: &[u8]) -> Result<Vec<OcrLine>, VisionError> {
        let resp = self
            .client
            .post(&self.url)
            .header("content-type", "image/png")
            .body(png.to_vec())
            .send()
            .map_err(|e| VisionError::Engine(e.to_string()))?;
        if !resp.status().is_success() {
            return Err(VisionError::Engine(format!("ocr endpoint returned {}", resp.status())));
        }
        let body = resp.bytes().map_err(|e| VisionError::Engine(e.to_string()))?;
        parse_lines(&body)
    }
}

/// Caps concurrent requests into the wrapped engine.
pub struct BoundedOcr<E> {
    inner: E,
    permits: Semaphore,
}

impl<E: OcrEngine> BoundedOcr<E> {
    pub fn new(inner: E, max_in_flight: usize) -> Self {
        Self {
            inner,
            permits: Semaphore::new(max_in_flight),
        }
    }
}

impl<E: OcrEngine> OcrEngine for BoundedOcr<E> {
    fn recognize(&self, png: &[u8]) -> Result<Vec<OcrLine>, VisionError> {
        let _permit = self.permits.acquire();
        self.inner.recognize(png)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::Rgba;

    struct Scripted(Vec<OcrLine>);
    impl OcrEngine for Scripted {
        fn recognize(&self, _: &[u8]) -> Result<Vec<OcrLine>, VisionError> {
            Ok(self.0.clone())
        }
    }

    struct Down;
    impl OcrEngine for Down {
        fn recognize(&self, _: &[u8]) -> Result<Vec<OcrLine>, VisionError> {
            Err(VisionError::Engine("connection refused".into()))
        }
    }

    fn line(t: &str, c: f64) -> OcrLine {
        OcrLine { text: t.into(), confidence: c }
    }

    fn icon() -> RgbaImage {
        RgbaImage::from_pixel(8, 8, Rgba([0, 0, 0, 255]))
    }

    #[test]
    fn filters_trims_dedupes() {
        let engine = Scripted(vec![
            line(" Live ", 0.93),
            line("live", 0.8),
            line("x", 0.2),
            line("   ", 0.99),
            line("NOW", 0.4),
        ]);
        let (texts, diag) = ocr_in_icon_text(&icon(), &engine, DEFAULT_MIN_CONFIDENCE);
        assert_eq!(texts, vec!["Live", "NOW"]);
        assert!(diag.is_none());
    }

    #[test]
    fn fixture_engine_keys_on_image() {
        let live = RgbaImage::from_pixel(8, 8, Rgba([255, 0, 0, 255]));
        let quote = RgbaImage::from_pixel(8, 8, Rgba([0, 0, 255, 255]));
        let mut fx = FixtureOcr::default();
        fx.insert(&encode_png(&live).unwrap(), vec![line("Live", 0.98)]);
        fx.insert(&encode_png(&quote).unwrap(), vec![line("Quote", 0.91)]);
        assert_eq!(ocr_in_icon_text(&live, &fx, 0.4).0, vec!["Live"]);
        assert_eq!(ocr_in_icon_text(&quote, &fx, 0.4).0, vec!["Quote"]);
        assert!(ocr_in_icon_text(&icon(), &fx, 0.4).0.is_empty());
    }

    #[test]
    fn unavailable_engine_degrades() {
        let (texts, diag) = ocr_in_icon_text(&icon(), &Down, 0.4);
        assert!(texts.is_empty());
        assert!(diag.unwrap().message.contains("unavailable"));
    }

    #[test]
    fn command_engine_round_trip() {
        if Command::new("python3").arg("--version").output().is_err() {
            return;
        }
        let script = r#"
import sys, json
for raw in sys.stdin:
    req = json.loads(raw)
    n = len(req["png_base64"])
    print(json.dumps([{"text": "Quote", "confidence": 0.9}, {"text": str(n > 0), "confidence": 1.5}]), flush=True)
"#;
        let engine = CommandOcr::spawn("python3", &["-c".to_owned(), script.to_owned()]).unwrap();
        let bounded = BoundedOcr::new(engine, 2);
        let (texts, _) = ocr_in_icon_text(&icon(), &bounded, 0.4);
        assert_eq!(texts, vec!["Quote", "True"]);
        let again = bounded.recognize(b"png").unwrap();
        assert_eq!(again[1].confidence, 1.0);
    }
}

#![allow(dead_code)]

pub mod cases;
pub mod corpus;
pub mod oracles;
pub mod xmlgen;

use std::path::{Path, PathBuf};

use altgen::cli::{MockFixture, MockServer, Runtime, ToolConfig};
use altgen::genai::RetryPolicy;
use altgen::ui_model::{GenerationMode, ImageScope, ModelVariant};
use image::{Rgba, RgbaImage};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixtures().join(name)).unwrap()
}

pub fn write_png(path: &Path, size: u32, color: [u8; 4]) {
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    RgbaImage::from_pixel(size, size, Rgba(color)).save(path).unwrap();
}

/// Temporary Android project: `res/layout/<name>.xml` for each layout and a
/// `res/drawable/<name>.png` for each drawable.
pub fn project(layouts: &[(&str, &str)], drawables: &[&str]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for (name, xml) in layouts {
        let p = dir.path().join("res/layout").join(format!("{name}.xml"));
        std::fs::create_dir_all(p.parent().unwrap()).unwrap();
        std::fs::write(p, xml).unwrap();
    }
    for (i, name) in drawables.iter().enumerate() {
        let shade = (40 * i as u8).wrapping_add(30);
        write_png(&dir.path().join("res/drawable").join(format!("{name}.png")), 24, [shade, 90, 200, 255]);
    }
    dir
}

pub fn mode_config(mode: GenerationMode) -> ToolConfig {
    let mut cfg = ToolConfig::default();
    cfg.generation.mode = mode.variant;
    cfg.generation.image_scope = mode.image_scope;
    cfg.backend.retry = RetryPolicy {
        max_attempts: 1,
        initial_backoff_ms: 1,
        max_backoff_ms: 1,
    };
    cfg
}

/// Runtime answering from `fixture` on an ephemeral local port.
pub fn mock_runtime(fixture: MockFixture, config: ToolConfig) -> Runtime {
    let server = MockServer::start(fixture, "127.0.0.1:0").unwrap();
    let mut config = config;
    config.backend.endpoint = server.endpoint();
    let mut rt = Runtime::build(config, None).unwrap();
    rt.mock = Some(server);
    rt
}

pub fn requests(rt: &Runtime) -> usize {
    rt.mock.as_ref().unwrap().requests().len()
}

pub const TEXTT: GenerationMode = GenerationMode {
    variant: ModelVariant::TextT,
    image_scope: ImageScope::Icon,
};

pub const NS: &str = r#"xmlns:android="http://schemas.android.com/apk/res/android""#;

pub fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!((actual - expected).abs() <= tol, "{what}: {actual} vs {expected} (tol {tol})");
}

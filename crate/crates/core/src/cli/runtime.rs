use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use super::config::ToolConfig;
use super::mock::{MockFixture, MockServer};
use super::CliError;
use crate::dataset::ClassMap;
use crate::genai::{DiskCache, LlmClient, PromptBuilder};
use crate::metrics::SynonymTable;
use crate::pipeline::Pipeline;
use crate::vision::{BoundedOcr, CommandOcr, CommandUpscaler, FixtureOcr, HttpOcr, OcrEngine};

/// A configured pipeline plus the mock server backing it, if any.
pub struct Runtime {
    pub config: ToolConfig,
    pub pipeline: Arc<Pipeline>,
    pub mock: Option<MockServer>,
}

fn ocr_engine(config: &ToolConfig) -> Result<Option<Arc<dyn OcrEngine>>, CliError> {
    let o = &config.ocr;
    let limit = o.max_concurrency;
    if let Some((program, args)) = o.command.split_first() {
        let engine = CommandOcr::spawn(program, args).map_err(|e| CliError::Setup(format!("ocr: {e}")))?;
        return Ok(Some(Arc::new(BoundedOcr::new(engine, limit))));
    }
    if let Some(url) = &o.url {
        let engine = HttpOcr::new(url.clone(), Duration::from_secs(o.timeout_secs)).map_err(|e| CliError::Setup(format!("ocr: {e}")))?;
        return Ok(Some(Arc::new(BoundedOcr::new(engine, limit))));
    }
    if let Some(path) = &o.fixture {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let fixture: FixtureOcr = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        return Ok(Some(Arc::new(fixture)));
    }
    Ok(None)
}

impl Runtime {
    /// Wire config, optional mock fixture and cache directory into a pipeline.
    pub fn build(mut config: ToolConfig, mock_fixture: Option<&Path>) -> Result<Self, CliError> {
        let mock = match mock_fixture {
            Some(path) => {
                let fixture = MockFixture::load(path).map_err(CliError::Usage)?;
                let server = MockServer::start(fixture, "127.0.0.1:0").map_err(CliError::Setup)?;
                config.backend.endpoint = server.endpoint();
                Some(server)
            }
            None => None,
        };
        let client = LlmClient::from_config(&config.backend).map_err(|e| CliError::Setup(e.to_string()))?;
        let builder = PromptBuilder {
            templates: config.templates().map_err(|e| CliError::Usage(e.to_string()))?,
            allow_unlabeled: config.generation.allow_unlabeled,
        };
        let mut pipeline = Pipeline::new(client, builder);
        if let Some(dir) = &config.cache_dir {
            pipeline = pipeline.with_cache(Arc::new(DiskCache::new(dir)));
        }
        if let Some(engine) = ocr_engine(&config)? {
            pipeline = pipeline.with_ocr(engine, config.ocr.options());
        }
        if let Some((program, args)) = config.upscaler.command.split_first() {
            pipeline = pipeline.with_upscaler(Arc::new(CommandUpscaler {
                program: program.clone(),
                args: args.to_vec(),
            }));
        }
        Ok(Self {
            config,
            pipeline: Arc::new(pipeline),
            mock,
        })
    }

    pub fn workers(&self) -> usize {
        self.config.backend.max_in_flight
    }

    pub fn classes(&self) -> Result<ClassMap, CliError> {
        match &self.config.data.class_table {
            Some(p) => ClassMap::load(p).map_err(|e| CliError::Usage(e.to_string())),
            None => Ok(ClassMap::builtin()),
        }
    }

    pub fn synonyms(&self) -> Result<SynonymTable, CliError> {
        match &self.config.data.synonyms {
            Some(p) => SynonymTable::load(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
            None => Ok(SynonymTable::default()),
        }
    }
}

//! On-save annotation: watcher events feed one in-order worker with a
//! backoff queue for backend outages.

use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use std::sync::mpsc::{self, RecvTimeoutError, Sender};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use super::annotate::{generate_for, project_root_for, write_outcomes, AnnotateOptions, IconOutcome, IconStatus};
use super::config::WatchConfig;
use super::CliError;
use crate::extract::IconCandidate;
use crate::layout::{watch_layouts, ParsedLayout, WatchEvent, WatchHandle, WatchOptions};
use crate::pipeline::Pipeline;

/// One processed watcher event.
#[derive(Debug, Clone)]
pub struct WatchRecord {
    pub outcome: IconOutcome,
    pub attempts: u32,
    pub latency: Duration,
}

#[derive(Debug, Clone, Default)]
pub struct WatchLog {
    pub records: Vec<WatchRecord>,
    pub diagnostics: Vec<(PathBuf, String)>,
}

impl WatchLog {
    pub fn injections(&self) -> usize {
        self.records.iter().filter(|r| r.outcome.status == IconStatus::Annotated).count()
    }
}

struct Job {
    file: PathBuf,
    layout: Box<ParsedLayout>,
    candidate: IconCandidate,
    seen: Instant,
    attempts: u32,
    not_before: Instant,
}

#[allow(clippy::large_enum_variant)]
enum Msg {
    Event(WatchEvent, Instant),
    Stop,
}

pub struct WatchSession {
    handle: Option<WatchHandle>,
    tx: Sender<Msg>,
    worker: Option<JoinHandle<()>>,
    log: Arc<Mutex<WatchLog>>,
}

struct Worker {
    pipeline: Arc<Pipeline>,
    options: AnnotateOptions,
    config: WatchConfig,
    retries: VecDeque<Job>,
    log: Arc<Mutex<WatchLog>>,
}

impl Worker {
    fn record(&self, job: &Job, outcome: IconOutcome) {
        let latency = job.seen.elapsed();
        match &outcome.status {
            IconStatus::Annotated | IconStatus::WouldAnnotate => log::info!(
                "{} {:?}: \"{}\" in {} ms",
                job.file.display(),
                job.candidate.path,
                outcome.alt_text.as_deref().unwrap_or_default(),
                latency.as_millis()
            ),
            IconStatus::Skipped(why) => log::info!("{} {:?}: skipped ({why})", job.file.display(), job.candidate.path),
            IconStatus::Failed(why) => log::warn!("{} {:?}: failed ({why})", job.file.display(), job.candidate.path),
        }
        self.log.lock().unwrap_or_else(|e| e.into_inner()).records.push(WatchRecord {
            outcome,
            attempts: job.attempts,
            latency,
        });
    }

    fn run(&mut self, mut job: Job) {
        job.attempts += 1;
        let out = generate_for(&job.file, &job.layout, &job.candidate, &project_root_for(&job.file), &self.pipeline, &self.options);
        if let IconStatus::Failed(why) = &out.status {
            if job.attempts < self.config.retry_attempts {
                let backoff = self.config.retry_backoff_ms.saturating_mul(1 << (job.attempts - 1).min(16));
                log::warn!("{} {:?}: {why}; retry {} in {backoff} ms", job.file.display(), job.candidate.path, job.attempts);
                job.not_before = Instant::now() + Duration::from_millis(backoff);
                self.retries.push_back(job);
            } else {
                self.record(&job, out);
            }
            return;
        }
        let mut pairs = [(job.candidate.clone(), out)];
        if let Err(e) = write_outcomes(&job.file, &mut pairs, &self.options) {
            pairs[0].1.status = IconStatus::Failed(e.to_string());
        }
        let [(_, out)] = pairs;
        self.record(&job, out);
    }

    fn handle(&mut self, event: WatchEvent, seen: Instant) {
        match event {
            WatchEvent::NewIcon { file, layout, candidate } => {
                let job = Job {
                    file,
                    layout,
                    candidate,
                    seen,
                    attempts: 0,
                    not_before: seen,
                };
                self.run(job);
            }
            WatchEvent::Diagnostic { file, message } => {
                log::warn!("{}: {message}", file.display());
                self.log.lock().unwrap_or_else(|e| e.into_inner()).diagnostics.push((file, message));
            }
        }
    }

    fn run_due_retries(&mut self) {
        let now = Instant::now();
        let (due, waiting): (VecDeque<Job>, VecDeque<Job>) = self.retries.drain(..).partition(|j| j.not_before <= now);
        self.retries = waiting;
        for job in due {
            self.run(job);
        }
    }

    fn next_timeout(&self) -> Duration {
        self.retries
            .iter()
            .map(|j| j.not_before.saturating_duration_since(Instant::now()))
            .min()
            .unwrap_or(Duration::from_millis(250))
    }

    /// On shutdown, retries still waiting get one final attempt.
    fn flush(&mut self) {
        let config_attempts = self.config.retry_attempts;
        self.config.retry_attempts = 0;
        for job in std::mem::take(&mut self.retries) {
            self.run(job);
        }
        self.config.retry_attempts = config_attempts;
    }
}

impl WatchSession {
    /// Watch `dir` and annotate each icon added to a layout under it.
    pub fn start(dir: &Path, pipeline: Arc<Pipeline>, options: AnnotateOptions, config: &WatchConfig) -> Result<Self, CliError> {
        if !dir.is_dir() {
            return Err(CliError::Usage(format!("{} is not a directory", dir.display())));
        }
        let root = dir.canonicalize().map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let log = Arc::new(Mutex::new(WatchLog::default()));
        let (tx, rx) = mpsc::channel::<Msg>();
        let mut worker = Worker {
            pipeline,
            options,
            config: config.clone(),
            retries: VecDeque::new(),
            log: log.clone(),
        };
        let worker = std::thread::Builder::new()
            .name("altgen-annotate".into())
            .spawn(move || loop {
                match rx.recv_timeout(worker.next_timeout()) {
                    Ok(Msg::Event(event, seen)) => worker.handle(event, seen),
                    Ok(Msg::Stop) | Err(RecvTimeoutError::Disconnected) => {
                        worker.flush();
                        break;
                    }
                    Err(RecvTimeoutError::Timeout) => {}
                }
                worker.run_due_retries();
            })
            .map_err(|e| CliError::Setup(e.to_string()))?;
        let events = tx.clone();
        let watch_options = WatchOptions {
            debounce: Duration::from_millis(config.debounce_ms),
            annotate_on_first_sight: config.annotate_on_first_sight,
            activity_hint: None,
        };
        let handle = watch_layouts(&root, watch_options, move |event| {
            let _ = events.send(Msg::Event(event, Instant::now()));
        })
        .map_err(|e| CliError::Setup(e.to_string()))?;
        Ok(Self {
            handle: Some(handle),
            tx,
            worker: Some(worker),
            log,
        })
    }

    pub fn log(&self) -> WatchLog {
        self.log.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Stop the watcher, finish queued work and return everything processed.
    pub fn stop(mut self) -> WatchLog {
        self.shutdown();
        self.log()
    }

    fn shutdown(&mut self) {
        if let Some(h) = self.handle.take() {
            h.stop();
        }
        let _ = self.tx.send(Msg::Stop);
        if let Some(w) = self.worker.take() {
            let _ = w.join();
        }
    }
}

impl Drop for WatchSession {
    fn drop(&mut self) {
        self.shutdown();
    }
}

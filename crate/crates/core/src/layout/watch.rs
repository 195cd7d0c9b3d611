use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::mpsc::{self, RecvTimeoutError, Sender};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use notify::{EventKind, RecursiveMode, Watcher};

use super::{parse_layout, LayoutError, ParsedLayout};
use crate::extract::{detect_icons, diff_new_icons, IconCandidate};
use crate::ui_model::Screen;

#[derive(Debug, Clone)]
pub struct WatchOptions {
    pub debounce: Duration,
    /// Report every icon of a file the first time it is seen.
    pub annotate_on_first_sight: bool,
    pub activity_hint: Option<String>,
}

impl Default for WatchOptions {
    fn default() -> Self {
        Self {
            debounce: Duration::from_millis(300),
            annotate_on_first_sight: false,
            activity_hint: None,
        }
    }
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum WatchEvent {
    NewIcon {
        file: PathBuf,
        layout: Box<ParsedLayout>,
        candidate: IconCandidate,
    },
    Diagnostic {
        file: PathBuf,
        message: String,
    },
}

enum Msg {
    Fs(notify::Result<notify::Event>),
    Stop,
}

pub struct WatchHandle {
    tx: Sender<Msg>,
    worker: Option<JoinHandle<()>>,
    _watcher: notify::RecommendedWatcher,
}

impl WatchHandle {
    /// Stop watching and wait for the worker to drain.
    pub fn stop(mut self) {
        self.shutdown();
    }

    fn shutdown(&mut self) {
        let _ = self.tx.send(Msg::Stop);
        if let Some(worker) = self.worker.take() {
            let _ = worker.join();
        }
    }
}

impl Drop for WatchHandle {
    fn drop(&mut self) {
        self.shutdown();
    }
}

/// True for `.../res/layout*/NAME.xml`.
pub fn is_layout_path(path: &Path) -> bool {
    if path.extension().and_then(|e| e.to_str()) != Some("xml") {
        return false;
    }
    let Some(dir) = path.parent() else { return false };
    let dir_ok = dir
        .file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| n.starts_with("layout"));
    let res_ok = dir
        .parent()
        .and_then(|p| p.file_name())
        .and_then(|n| n.to_str())
        .is_some_and(|n| n == "res");
    dir_ok && res_ok
}

struct WatchState<F> {
    options: WatchOptions,
    known: HashMap<PathBuf, Screen>,
    pending: HashMap<PathBuf, Instant>,
    callback: F,
}

impl<F: FnMut(WatchEvent)> WatchState<F> {
    fn parse(&self, file: &Path) -> Result<Option<ParsedLayout>, LayoutError> {
        let bytes = match std::fs::read(file) {
            Ok(b) => b,
            // deleted or mid-write; the next event gets another chance
            Err(_) => return Ok(None),
        };
        let stem = file.file_stem().and_then(|s| s.to_str()).unwrap_or("layout");
        parse_layout(&bytes, stem, self.options.activity_hint.as_deref()).map(Some)
    }

    fn process(&mut self, file: PathBuf) {
        let layout = match self.parse(&file) {
            Ok(Some(l)) => l,
            Ok(None) => {
                if !file.exists() {
                    self.known.remove(&file);
                }
                return;
            }
            Err(e) => {
                (self.callback)(WatchEvent::Diagnostic {
                    file,
                    message: e.to_string(),
                });
                return;
            }
        };
        let fresh = match self.known.get(&file) {
            Some(previous) => diff_new_icons(previous, &layout.screen),
            None if self.options.annotate_on_first_sight => detect_icons(&layout.screen),
            None => Vec::new(),
        };
        self.known.insert(file.clone(), layout.screen.clone());
        for candidate in fresh {
            (self.callback)(WatchEvent::NewIcon {
                file: file.clone(),
                layout: Box::new(layout.clone()),
                candidate,
            });
        }
    }

    fn schedule(&mut self, event: notify::Event) {
        if !matches!(event.kind, EventKind::Create(_) | EventKind::Modify(_) | EventKind::Any) {
            return;
        }
        let due = Instant::now() + self.options.debounce;
        for path in event.paths {
            if is_layout_path(&path) {
                self.pending.insert(path, due);
            }
        }
    }

    fn flush_due(&mut self, now: Instant) {
        let mut due: Vec<PathBuf> = self
            .pending
            .iter()
            .filter(|(_, &at)| at <= now)
            .map(|(p, _)| p.clone())
            .collect();
        due.sort();
        for path in due {
            self.pending.remove(&path);
            self.process(path);
        }
    }
}

/// Watch `dir` recursively for layout edits and report newly added icons.
///
/// The callback runs on the watcher's worker thread, strictly in event order.
pub fn watch_layouts<F>(dir: &Path, options: WatchOptions, callback: F) -> Result<WatchHandle, LayoutError>
where
    F: FnMut(WatchEvent) + Send + 'static,
{
    let io_err = |e: &dyn std::fmt::Display| LayoutError::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    };
    let root = dir.canonicalize().map_err(|e| io_err(&e))?;
    let (tx, rx) = mpsc::channel::<Msg>();
    let fs_tx = tx.clone();
    let mut watcher = notify::recommended_watcher(move |res| {
        let _ = fs_tx.send(Msg::Fs(res));
    })
    .map_err(|e| io_err(&e))?;
    watcher.watch(&root, RecursiveMode::Recursive).map_err(|e| io_err(&e))?;

    let mut state = WatchState {
        options,
        known: HashMap::new(),
        pending: HashMap::new(),
        callback,
    };
    let mut initial: Vec<PathBuf> = walkdir::WalkDir::new(&root)
        .into_iter()
        .filter_map(Result::ok)
        .map(|e| e.into_path())
        .filter(|p| is_layout_path(p))
        .collect();
    initial.sort();

    let worker = std::thread::Builder::new()
        .name("altgen-watch".into())
        .spawn(move || {
            for file in initial {
                state.process(file);
            }
            loop {
                let now = Instant::now();
                let timeout = state
                    .pending
                    .values()
                    .min()
                    .map(|&at| at.saturating_duration_since(now))
                    .unwrap_or(Duration::from_millis(250));
                match rx.recv_timeout(timeout) {
                    Ok(Msg::Fs(Ok(event))) => state.schedule(event),
                    Ok(Msg::Fs(Err(e))) => log::warn!("watch error: {e}"),
                    Ok(Msg::Stop) | Err(RecvTimeoutError::Disconnected) => break,
                    Err(RecvTimeoutError::Timeout) => {}
                }
                state.flush_due(Instant::now());
            }
        })
        .map_err(|e| io_err(&e))?;

    Ok(WatchHandle {
        tx,
        worker: Some(worker),
        _watcher: watcher,
    })
}

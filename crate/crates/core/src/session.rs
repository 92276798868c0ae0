//! Per-learner state: the entity counter, the diagnosis cache and the
//! attempt history.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, MutexGuard, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{Context, Diagnosis, Verdict};
use crate::term::EntitySource;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attempt {
    pub exercise_id: String,
    pub text: String,
    pub verdict: Verdict,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

#[derive(Clone, Debug)]
pub(crate) struct Stored {
    pub diagnosis: Diagnosis,
    pub context: Option<Arc<Context>>,
}

#[derive(Debug)]
pub struct Session {
    id: String,
    entities: EntitySource,
    next_diagnosis: AtomicU64,
    cache: RwLock<HashMap<String, Stored>>,
    history: Mutex<Vec<Attempt>>,
    writer: Mutex<()>,
}

impl Session {
    pub fn new(id: impl Into<String>) -> Session {
        Session {
            id: id.into(),
            entities: EntitySource::new(),
            next_diagnosis: AtomicU64::new(1),
            cache: RwLock::new(HashMap::new()),
            history: Mutex::new(Vec::new()),
            writer: Mutex::new(()),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn entities(&self) -> &EntitySource {
        &self.entities
    }

    /// Held for the duration of a diagnose or why call so that one
    /// session's entity ids and cache change in request order.
    pub(crate) fn serialize_writes(&self) -> MutexGuard<'_, ()> {
        self.writer.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub(crate) fn fresh_diagnosis_id(&self) -> String {
        format!("d{}", self.next_diagnosis.fetch_add(1, Ordering::SeqCst))
    }

    pub(crate) fn store(&self, diagnosis: Diagnosis, context: Option<Arc<Context>>) {
        let mut cache = self.cache.write().unwrap_or_else(|e| e.into_inner());
        cache.insert(diagnosis.id.clone(), Stored { diagnosis, context });
    }

    pub(crate) fn stored(&self, id: &str) -> Option<Stored> {
        self.cache.read().unwrap_or_else(|e| e.into_inner()).get(id).cloned()
    }

    /// Record `child` under `parent`'s children, keyed by `literal`, and
    /// under the ancestors' copies too so that a cached root shows the
    /// whole tree.
    pub(crate) fn attach_child(&self, parent: &str, literal: &str, child: &Diagnosis) {
        let mut cache = self.cache.write().unwrap_or_else(|e| e.into_inner());
        let mut path = vec![(parent.to_string(), literal.to_string())];
        let mut current = parent.to_string();
        while let Some(up) = cache.get(&current).and_then(|s| s.diagnosis.parent.clone()) {
            let key = cache[&up].diagnosis.children.iter().find(|(_, c)| c.id == current).map(|(k, _)| k.clone());
            match key {
                Some(k) => path.push((up.clone(), k)),
                None => break,
            }
            current = up;
        }
        // path runs from the parent up to the root; patch each copy
        for depth in 0..path.len() {
            let (holder, _) = &path[depth];
            let Some(stored) = cache.get_mut(holder) else { continue };
            let keys: Vec<&str> = path[1..=depth].iter().rev().map(|(_, k)| k.as_str()).collect();
            if let Some(node) = descend(&mut stored.diagnosis, &keys) {
                node.children.insert(literal.to_string(), child.clone());
            }
        }
    }

    pub fn diagnosis(&self, id: &str) -> Option<Diagnosis> {
        self.stored(id).map(|s| s.diagnosis)
    }

    pub fn record(&self, exercise_id: &str, text: &str, verdict: Verdict) {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let attempt = Attempt { exercise_id: exercise_id.to_string(), text: text.to_string(), verdict, timestamp };
        self.history.lock().unwrap_or_else(|e| e.into_inner()).push(attempt);
    }

    pub fn history(&self) -> Vec<Attempt> {
        self.history.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }
}

fn descend<'a>(node: &'a mut Diagnosis, keys: &[&str]) -> Option<&'a mut Diagnosis> {
    match keys.split_first() {
        None => Some(node),
        Some((k, rest)) => descend(node.children.get_mut(*k)?, rest),
    }
}

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use epf_core::metrics::AttributeReport;
use epf_core::{ImageF, MatchResult};
use rand::Rng;

/// Cache key: filter id and level in thousandths.
pub type CacheKey = (String, u32);

/// Rounds a level in `[0, 1]` to the cache resolution of 1e-3.
pub fn level_key(level: f64) -> u32 {
    (level * 1000.0).round() as u32
}

/// The image key used in `/api/image/{session}/{key}` URLs.
pub fn image_key(key: &CacheKey) -> String {
    format!("{}-{}", key.0, key.1)
}

/// A computed match. Entries never change once inserted.
#[derive(Debug)]
pub struct Entry {
    pub result: MatchResult,
    pub report: AttributeReport,
    pub png: Vec<u8>,
}

#[derive(Default)]
struct Cache {
    entries: HashMap<CacheKey, (Arc<Entry>, u64)>,
    tick: u64,
}

/// An uploaded image with its computed matches.
pub struct Session {
    pub id: String,
    pub image: Arc<ImageF>,
    /// Factor applied to the upload to fit the size cap.
    pub scale: f64,
    pub created: Instant,
    max_entries: usize,
    cache: Mutex<Cache>,
}

impl Session {
    fn new(id: String, image: ImageF, scale: f64, max_entries: usize) -> Self {
        Self {
            id,
            image: Arc::new(image),
            scale,
            created: Instant::now(),
            max_entries,
            cache: Mutex::new(Cache::default()),
        }
    }

    pub fn get(&self, key: &CacheKey) -> Option<Arc<Entry>> {
        let mut cache = self.cache.lock().expect("cache lock");
        cache.tick += 1;
        let tick = cache.tick;
        cache.entries.get_mut(key).map(|(e, used)| {
            *used = tick;
            Arc::clone(e)
        })
    }

    /// Inserts `entry` unless the key is already present, and returns the
    /// stored entry. Concurrent computations of one key thus share the
    /// first result.
    pub fn insert(&self, key: CacheKey, entry: Entry) -> Arc<Entry> {
        let mut cache = self.cache.lock().expect("cache lock");
        cache.tick += 1;
        let tick = cache.tick;
        if let Some((e, used)) = cache.entries.get_mut(&key) {
            *used = tick;
            return Arc::clone(e);
        }
        if cache.entries.len() >= self.max_entries {
            if let Some(oldest) = cache.entries.iter().min_by_key(|(_, (_, used))| *used).map(|(k, _)| k.clone()) {
                log::info!("session {}: evicting cached match {}", self.id, image_key(&oldest));
                cache.entries.remove(&oldest);
            }
        }
        let entry = Arc::new(entry);
        cache.entries.insert(key, (Arc::clone(&entry), tick));
        entry
    }

    /// Looks up a cached entry by its image key.
    pub fn get_by_image_key(&self, image_key_str: &str) -> Option<Arc<Entry>> {
        let (filter, level) = image_key_str.rsplit_once('-')?;
        self.get(&(filter.to_string(), level.parse().ok()?))
    }

    pub fn cached_entries(&self) -> usize {
        self.cache.lock().expect("cache lock").entries.len()
    }
}

#[derive(Clone, Debug)]
pub struct SessionLimits {
    pub max_sessions: usize,
    pub idle_timeout: Duration,
    pub max_cache_entries: usize,
    /// Evict the least recently used session when the table is full;
    /// otherwise reject new sessions.
    pub evict: bool,
}

struct Slot {
    session: Arc<Session>,
    last_used: Instant,
}

/// All live sessions.
pub struct SessionTable {
    limits: SessionLimits,
    slots: Mutex<HashMap<String, Slot>>,
}

/// The table is full and eviction is disabled.
#[derive(Debug)]
pub struct TableFull;

impl SessionTable {
    pub fn new(limits: SessionLimits) -> Self {
        Self {
            limits,
            slots: Mutex::new(HashMap::new()),
        }
    }

    pub fn limits(&self) -> &SessionLimits {
        &self.limits
    }

    pub fn create(&self, image: ImageF, scale: f64) -> Result<Arc<Session>, TableFull> {
        let now = Instant::now();
        let mut slots = self.slots.lock().expect("session lock");
        let idle = self.limits.idle_timeout;
        slots.retain(|id, slot| {
            let keep = now.duration_since(slot.last_used) < idle;
            if !keep {
                log::info!("session {id} expired");
            }
            keep
        });
        if slots.len() >= self.limits.max_sessions {
            if !self.limits.evict {
                return Err(TableFull);
            }
            if let Some(oldest) = slots.iter().min_by_key(|(_, s)| s.last_used).map(|(id, _)| id.clone()) {
                log::info!("evicting least recently used session {oldest}");
                slots.remove(&oldest);
            }
        }
        let id = loop {
            let id = format!("{:032x}", rand::thread_rng().gen::<u128>());
            if !slots.contains_key(&id) {
                break id;
            }
        };
        let session = Arc::new(Session::new(id.clone(), image, scale, self.limits.max_cache_entries));
        slots.insert(
            id,
            Slot {
                session: Arc::clone(&session),
                last_used: now,
            },
        );
        Ok(session)
    }

    /// Returns a live session and marks it used.
    pub fn get(&self, id: &str) -> Option<Arc<Session>> {
        let now = Instant::now();
        let mut slots = self.slots.lock().expect("session lock");
        let expired = slots
            .get(id)
            .is_some_and(|s| now.duration_since(s.last_used) >= self.limits.idle_timeout);
        if expired {
            log::info!("session {id} expired");
            slots.remove(id);
            return None;
        }
        slots.get_mut(id).map(|s| {
            s.last_used = now;
            Arc::clone(&s.session)
        })
    }

    pub fn len(&self) -> usize {
        self.slots.lock().expect("session lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

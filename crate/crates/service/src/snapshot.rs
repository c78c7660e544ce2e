use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, RwLock};

use anyhow::{bail, Context, Result};
use gridiron_core::insights::{format_insights, parse_insights, PlayerInsight};
use gridiron_core::roster::{format_roster, parse_roster, PlayerBio};

use crate::artifacts::{read_text, INSIGHTS, ROSTER};

/// Immutable bundle the service answers from. The version is a content hash
/// so two snapshots built from the same artifacts share it.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub version: String,
    pub roster: Vec<PlayerBio>,
    insights: BTreeMap<(String, u32), PlayerInsight>,
}

fn content_version(parts: &[&str]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for b in part.bytes().chain([0u8]) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    format!("snap-{h:016x}")
}

impl Snapshot {
    pub fn new(roster: Vec<PlayerBio>, insights: Vec<PlayerInsight>) -> Result<Snapshot> {
        let known: BTreeMap<&str, ()> = roster.iter().map(|b| (b.player_id.as_str(), ())).collect();
        for i in &insights {
            if !known.contains_key(i.player_id.as_str()) {
                bail!("insight for {} who is not on the roster", i.player_id);
            }
            i.validate()?;
        }
        let version = content_version(&[&format_roster(&roster)?, &format_insights(&insights)?]);
        let insights = insights.into_iter().map(|i| ((i.player_id.clone(), i.week), i)).collect();
        Ok(Snapshot { version, roster, insights })
    }

    /// Reads the roster and insight file from a snapshot directory.
    pub fn load(dir: &Path) -> Result<Snapshot> {
        let roster = parse_roster(&read_text(&dir.join(ROSTER))?).context("parsing snapshot roster")?;
        let insights = parse_insights(&read_text(&dir.join(INSIGHTS))?).context("parsing snapshot insights")?;
        Snapshot::new(roster, insights)
    }

    pub fn player(&self, id: &str) -> Option<&PlayerBio> {
        self.roster.iter().find(|b| b.player_id == id)
    }

    pub fn insight(&self, id: &str, week: u32) -> Option<&PlayerInsight> {
        self.insights.get(&(id.to_string(), week))
    }

    pub fn weeks(&self) -> Vec<u32> {
        let mut w: Vec<u32> = self.insights.keys().map(|(_, w)| *w).collect();
        w.sort_unstable();
        w.dedup();
        w
    }
}

/// Current snapshot behind an atomic reference swap. Readers clone the
/// `Arc` once per request and never see a later publication mid-request.
#[derive(Debug)]
pub struct SnapshotHandle {
    current: RwLock<Arc<Snapshot>>,
}

impl SnapshotHandle {
    pub fn new(snapshot: Snapshot) -> SnapshotHandle {
        SnapshotHandle {
            current: RwLock::new(Arc::new(snapshot)),
        }
    }

    pub fn current(&self) -> Arc<Snapshot> {
        self.current.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    pub fn publish(&self, snapshot: Snapshot) {
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(snapshot);
    }
}

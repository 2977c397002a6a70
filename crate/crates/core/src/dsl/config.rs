use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dsl::ast::Adverb;

/// Window lengths, in days, for adverbs of reasonableness.
///
/// Serialized as a map from the adverb phrase to its window, e.g.
/// `{"promptly": 1, "as soon as reasonably practicable": 2}`. Adverbs
/// missing from the map keep their default.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, i64>", into = "BTreeMap<String, i64>")]
pub struct ReasonablenessConfig {
    windows: BTreeMap<Adverb, u32>,
}

impl Default for ReasonablenessConfig {
    fn default() -> Self {
        let windows = Adverb::ALL
            .iter()
            .map(|a| {
                let w = match a {
                    Adverb::Promptly | Adverb::Timely => 1,
                    Adverb::AsSoonAsReasonablyPracticable | Adverb::AsSoonAsPracticable => 2,
                };
                (*a, w)
            })
            .collect();
        ReasonablenessConfig { windows }
    }
}

impl ReasonablenessConfig {
    pub fn window(&self, adverb: Adverb) -> u32 {
        self.windows[&adverb]
    }

    pub fn with_window(mut self, adverb: Adverb, days: u32) -> Self {
        self.windows.insert(adverb, days);
        self
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }
}

impl TryFrom<BTreeMap<String, i64>> for ReasonablenessConfig {
    type Error = String;

    fn try_from(raw: BTreeMap<String, i64>) -> Result<Self, String> {
        let mut cfg = ReasonablenessConfig::default();
        for (word, days) in raw {
            let key = word.trim().to_ascii_lowercase();
            let adverb = Adverb::ALL
                .into_iter()
                .find(|a| a.phrase() == key)
                .ok_or_else(|| format!("unknown adverb {word:?}"))?;
            let days = u32::try_from(days).map_err(|_| format!("window for {word:?} must be between 0 and {}", u32::MAX))?;
            cfg.windows.insert(adverb, days);
        }
        Ok(cfg)
    }
}

impl From<ReasonablenessConfig> for BTreeMap<String, i64> {
    fn from(cfg: ReasonablenessConfig) -> Self {
        cfg.windows
            .into_iter()
            .map(|(a, w)| (a.phrase().to_string(), w as i64))
            .collect()
    }
}

//! Luby-scaled restart thresholds.

/// The Luby sequence 1, 1, 2, 1, 1, 2, 4, 1, 1, 2, … indexed from 0.
pub fn luby(index: u64) -> u64 {
    let mut size = 1u64;
    let mut exponent = 0u32;
    while size < index + 1 {
        exponent += 1;
        size = 2 * size + 1;
    }
    let mut i = index;
    while size - 1 != i {
        size = (size - 1) / 2;
        exponent -= 1;
        i %= size;
    }
    1 << exponent
}

/// Conflict thresholds `base · luby(k)` for the k-th restart. The counters
/// persist across solver calls so that repeated short calls still progress
/// through the sequence.
#[derive(Debug, Clone)]
pub struct RestartSchedule {
    base: Option<u64>,
    restarts: u64,
    conflicts_since: u64,
}

impl RestartSchedule {
    /// `None` disables restarts.
    pub fn new(base: Option<u64>) -> Self {
        RestartSchedule {
            base: base.filter(|&b| b > 0),
            restarts: 0,
            conflicts_since: 0,
        }
    }

    pub fn is_enabled(&self) -> bool {
        self.base.is_some()
    }

    pub fn threshold(&self) -> Option<u64> {
        self.base.map(|b| b.saturating_mul(luby(self.restarts)))
    }

    pub fn on_conflict(&mut self) {
        self.conflicts_since += 1;
    }

    pub fn is_due(&self) -> bool {
        self.threshold().is_some_and(|t| self.conflicts_since >= t)
    }

    pub fn restarted(&mut self) {
        self.restarts += 1;
        self.conflicts_since = 0;
    }

    pub fn restarts(&self) -> u64 {
        self.restarts
    }
}

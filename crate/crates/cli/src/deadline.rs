use std::time::{Duration, Instant};

use greenroute_core::exact::SearchBudget;

/// Wall-clock budget for the exact search.
#[derive(Debug, Clone, Copy)]
pub struct Deadline {
    start: Instant,
    limit: Duration,
}

impl Deadline {
    pub fn after(limit: Duration) -> Self {
        Self { start: Instant::now(), limit }
    }

    pub fn seconds(secs: f64) -> Self {
        Self::after(Duration::from_secs_f64(secs.max(0.0)))
    }
}

impl SearchBudget for Deadline {
    fn exhausted(&mut self, _: u64) -> bool {
        self.start.elapsed() >= self.limit
    }
}

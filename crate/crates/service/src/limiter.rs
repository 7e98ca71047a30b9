//! Per-key token bucket driven by an injected clock.

use std::collections::HashMap;

use chrono::{DateTime, Utc};

/// Token amounts are kept in units of 1/60000 token so that refill per
/// millisecond is exactly `per_minute` units.
const UNITS_PER_TOKEN: u64 = 60_000;

#[derive(Debug, Clone, Copy)]
struct Bucket {
    units: u64,
    updated: DateTime<Utc>,
}

#[derive(Debug)]
pub struct RateLimiter {
    per_minute: u64,
    buckets: HashMap<String, Bucket>,
}

impl RateLimiter {
    /// Allows `per_minute` requests per key per minute, with bursts up to the same number.
    pub fn per_minute(per_minute: u32) -> Self {
        Self {
            per_minute: per_minute as u64,
            buckets: HashMap::new(),
        }
    }

    /// Takes one token for `key`; `Err` carries whole seconds until one is available.
    pub fn check(&mut self, key: &str, now: DateTime<Utc>) -> Result<(), u64> {
        let capacity = self.per_minute * UNITS_PER_TOKEN;
        let bucket = self.buckets.entry(key.to_owned()).or_insert(Bucket {
            units: capacity,
            updated: now,
        });
        let elapsed_ms = (now - bucket.updated).num_milliseconds().max(0) as u64;
        bucket.units = bucket
            .units
            .saturating_add(elapsed_ms.saturating_mul(self.per_minute))
            .min(capacity);
        bucket.updated = now;
        if bucket.units >= UNITS_PER_TOKEN {
            bucket.units -= UNITS_PER_TOKEN;
            Ok(())
        } else if self.per_minute == 0 {
            Err(u64::MAX)
        } else {
            let missing_ms = (UNITS_PER_TOKEN - bucket.units).div_ceil(self.per_minute);
            Err(missing_ms.div_ceil(1000))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::Duration;

    #[test]
    fn ten_per_minute() {
        let t = DateTime::UNIX_EPOCH;
        let mut l = RateLimiter::per_minute(10);
        for _ in 0..10 {
            assert!(l.check("V1", t).is_ok());
        }
        assert_eq!(l.check("V1", t), Err(6));
        assert!(l.check("V2", t).is_ok(), "buckets are per key");
        assert!(l.check("V1", t + Duration::seconds(5)).is_err());
        assert!(l.check("V1", t + Duration::seconds(6)).is_ok());
        assert!(l.check("V1", t + Duration::seconds(7)).is_err());
        let later = t + Duration::minutes(10);
        for _ in 0..10 {
            assert!(l.check("V1", later).is_ok());
        }
        assert!(l.check("V1", later).is_err());
    }
}

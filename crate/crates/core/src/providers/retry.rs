use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{ProviderError, Result, TransportError};

/// Exponential backoff for transient transport failures.
///
/// Attempt `i` (0-based) that fails transiently is followed by a sleep of
/// `base_delay_ms * factor^i` milliseconds, up to `max_attempts` attempts in total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay_ms: u64,
    pub factor: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 5,
            base_delay_ms: 1000,
            factor: 2.0,
        }
    }
}

impl RetryPolicy {
    pub fn delay_after(&self, attempt: u32) -> Duration {
        let ms = self.base_delay_ms as f64 * self.factor.powi(attempt as i32);
        Duration::from_millis(ms.round() as u64)
    }

    pub fn run<T>(&self, mut op: impl FnMut() -> std::result::Result<T, TransportError>) -> Result<T> {
        let attempts = self.max_attempts.max(1);
        let mut last = (None, String::new());
        for attempt in 0..attempts {
            match op() {
                Ok(v) => return Ok(v),
                Err(TransportError::Fatal { status, message }) => {
                    return Err(ProviderError::Request { status, message })
                }
                Err(TransportError::Transient { status, message }) => {
                    log::warn!("transient provider failure (attempt {}/{attempts}): {message}", attempt + 1);
                    last = (status, message);
                    if attempt + 1 < attempts {
                        std::thread::sleep(self.delay_after(attempt));
                    }
                }
            }
        }
        Err(ProviderError::RetriesExhausted {
            attempts,
            status: last.0,
            message: last.1,
        })
    }
}

/// Token bucket with a burst of one: at most `rate` acquisitions per second.
///
/// Callers reserve a slot under the lock and sleep outside it, so
/// concurrent callers queue up in arrival order.
#[derive(Debug)]
pub struct RateLimiter {
    rate: f64,
    state: Mutex<Bucket>,
}

#[derive(Debug)]
struct Bucket {
    tokens: f64,
    last: Instant,
}

impl RateLimiter {
    pub fn new(requests_per_second: f64) -> Self {
        assert!(requests_per_second > 0.0, "rate must be positive");
        RateLimiter {
            rate: requests_per_second,
            state: Mutex::new(Bucket {
                tokens: 1.0,
                last: Instant::now(),
            }),
        }
    }

    /// Reserves one token and returns how long the caller must wait for it.
    pub fn reserve(&self) -> Duration {
        let mut b = self.state.lock().expect("rate limiter lock");
        let now = Instant::now();
        let elapsed = now.duration_since(b.last).as_secs_f64();
        b.tokens = (b.tokens + elapsed * self.rate).min(1.0);
        b.last = now;
        b.tokens -= 1.0;
        if b.tokens >= 0.0 {
            Duration::ZERO
        } else {
            Duration::from_secs_f64(-b.tokens / self.rate)
        }
    }

    pub fn acquire(&self) {
        let wait = self.reserve();
        if !wait.is_zero() {
            std::thread::sleep(wait);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_backoff_schedule() {
        let p = RetryPolicy::default();
        let delays: Vec<u64> = (0..4).map(|i| p.delay_after(i).as_millis() as u64).collect();
        assert_eq!(delays, vec![1000, 2000, 4000, 8000]);
        assert_eq!(p.max_attempts, 5);
    }

    #[test]
    fn limiter_spaces_reservations() {
        let l = RateLimiter::new(10.0);
        assert_eq!(l.reserve(), Duration::ZERO);
        let second = l.reserve();
        let third = l.reserve();
        assert!(second > Duration::from_millis(80) && second <= Duration::from_millis(100), "{second:?}");
        assert!(third > Duration::from_millis(180) && third <= Duration::from_millis(200), "{third:?}");
    }
}

//! Request pacing: a sliding-window request log (at most `rpm` starts in
//! any 60 s window) plus a counting semaphore for in-flight requests.

use std::collections::VecDeque;
use std::sync::{Arc, Condvar, Mutex};
use std::time::{Duration, Instant};

pub trait Clock: Send + Sync {
    /// Time since an arbitrary fixed origin.
    fn now(&self) -> Duration;
    fn sleep(&self, d: Duration);
}

pub struct SystemClock {
    origin: Instant,
}

impl Default for SystemClock {
    fn default() -> Self {
        Self { origin: Instant::now() }
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }

    fn sleep(&self, d: Duration) {
        std::thread::sleep(d);
    }
}

/// Test clock: sleeping advances time instantly.
#[derive(Default)]
pub struct ManualClock {
    now: Mutex<Duration>,
}

impl ManualClock {
    pub fn advance(&self, d: Duration) {
        *self.now.lock().expect("clock lock") += d;
    }
}

impl Clock for ManualClock {
    fn now(&self) -> Duration {
        *self.now.lock().expect("clock lock")
    }

    fn sleep(&self, d: Duration) {
        self.advance(d);
    }
}

pub struct RateLimiter {
    limit: usize,
    window: Duration,
    log: Mutex<VecDeque<Duration>>,
    clock: Arc<dyn Clock>,
}

impl RateLimiter {
    pub fn per_minute(rpm: u32, clock: Arc<dyn Clock>) -> Self {
        Self::new(rpm as usize, Duration::from_secs(60), clock)
    }

    pub fn new(limit: usize, window: Duration, clock: Arc<dyn Clock>) -> Self {
        Self {
            limit: limit.max(1),
            window,
            log: Mutex::new(VecDeque::new()),
            clock,
        }
    }

    /// Blocks until a request may start, then records its start time.
    pub fn acquire(&self) -> Duration {
        loop {
            let wait = {
                let mut log = self.log.lock().expect("limiter lock");
                let now = self.clock.now();
                while log.front().is_some_and(|&t| now.saturating_sub(t) >= self.window) {
                    log.pop_front();
                }
                if log.len() < self.limit {
                    log.push_back(now);
                    return now;
                }
                (log[0] + self.window).saturating_sub(now)
            };
            self.clock.sleep(wait.max(Duration::from_millis(1)));
        }
    }
}

pub struct Semaphore {
    available: Mutex<usize>,
    cv: Condvar,
}

pub struct Permit<'a> {
    sem: &'a Semaphore,
}

impl Semaphore {
    pub fn new(permits: usize) -> Self {
        Self {
            available: Mutex::new(permits.max(1)),
            cv: Condvar::new(),
        }
    }

    pub fn acquire(&self) -> Permit<'_> {
        let mut n = self.available.lock().expect("semaphore lock");
        while *n == 0 {
            n = self.cv.wait(n).expect("semaphore lock");
        }
        *n -= 1;
        Permit { sem: self }
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.sem.available.lock().expect("semaphore lock") += 1;
        self.sem.cv.notify_one();
    }
}

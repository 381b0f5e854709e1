//! Peak memory measurement.
//!
//! Two sources are available. [`TrackingAllocator`] counts live heap bytes
//! when a binary installs it as its global allocator, which gives exact,
//! resettable per-stage peaks. Otherwise the process high-water mark from
//! `/proc/self/status` is used, which is only as precise as the kernel's
//! accounting and can only be reset on Linux.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicUsize, Ordering};

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

/// System allocator wrapper that tracks live and peak heap bytes.
///
/// ```ignore
/// #[global_allocator]
/// static ALLOC: recomp::pipeline::TrackingAllocator = recomp::pipeline::TrackingAllocator;
/// ```
pub struct TrackingAllocator;

#[inline]
fn grow(n: usize) {
    let now = CURRENT.fetch_add(n, Ordering::Relaxed) + n;
    PEAK.fetch_max(now, Ordering::Relaxed);
}

unsafe impl GlobalAlloc for TrackingAllocator {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            grow(layout.size());
        }
        p
    }

    unsafe fn alloc_zeroed(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc_zeroed(layout);
        if !p.is_null() {
            grow(layout.size());
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = System.realloc(ptr, layout, new_size);
        if !p.is_null() {
            if new_size >= layout.size() {
                grow(new_size - layout.size());
            } else {
                CURRENT.fetch_sub(layout.size() - new_size, Ordering::Relaxed);
            }
        }
        p
    }
}

/// Whether heap tracking is live in this process, i.e. the allocator is
/// installed and has served a request.
pub fn heap_tracking_active() -> bool {
    if PEAK.load(Ordering::Relaxed) > 0 {
        return true;
    }
    // Force one allocation through whatever allocator is installed.
    let probe = std::hint::black_box(vec![0u8; 64]);
    drop(probe);
    PEAK.load(Ordering::Relaxed) > 0
}

pub fn current_heap_bytes() -> usize {
    CURRENT.load(Ordering::Relaxed)
}

fn read_status_kib(field: &str) -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with(field))?;
    line[field.len()..].trim().trim_end_matches("kB").trim().parse().ok()
}

/// Resident-set high-water mark in bytes, if the platform reports it.
pub fn peak_rss_bytes() -> Option<u64> {
    read_status_kib("VmHWM:").map(|k| k * 1024)
}

pub fn current_rss_bytes() -> Option<u64> {
    read_status_kib("VmRSS:").map(|k| k * 1024)
}

fn reset_rss_peak() -> bool {
    std::fs::write("/proc/self/clear_refs", "5").is_ok()
}

/// Peak memory over one measured region.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MemorySample {
    /// Peak live heap bytes, when the tracking allocator is installed.
    pub peak_heap: Option<u64>,
    /// Resident-set high-water mark; `None` where unsupported or when it
    /// could not be reset at the start of the region.
    pub peak_rss: Option<u64>,
}

impl MemorySample {
    /// Best available figure: heap peak, else RSS peak, else 0.
    pub fn best(&self) -> u64 {
        self.peak_heap.or(self.peak_rss).unwrap_or(0)
    }
}

/// Measures peak memory between `start` and `finish`. Regions must not
/// overlap or run concurrently.
#[derive(Debug)]
pub struct MemoryProbe {
    heap: bool,
    rss_reset: bool,
}

impl MemoryProbe {
    pub fn start() -> Self {
        let heap = heap_tracking_active();
        if heap {
            PEAK.store(CURRENT.load(Ordering::Relaxed), Ordering::Relaxed);
        }
        MemoryProbe { heap, rss_reset: reset_rss_peak() }
    }

    pub fn finish(self) -> MemorySample {
        MemorySample {
            peak_heap: self.heap.then(|| PEAK.load(Ordering::Relaxed) as u64),
            peak_rss: if self.rss_reset { peak_rss_bytes() } else { None },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probe_without_tracking_allocator() {
        // The unit-test binary uses the system allocator.
        let p = MemoryProbe::start();
        let v = vec![1u8; 1 << 20];
        std::hint::black_box(&v);
        let s = p.finish();
        assert_eq!(s.peak_heap, None);
        if let Some(rss) = s.peak_rss {
            assert!(rss > 0);
        }
    }
}

use std::collections::HashMap;
use std::marker::PhantomData;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("worker count must be at least 1")]
    ZeroWorkers,
    #[error("chunk size must be at least 1")]
    ZeroChunkSize,
    #[error("digit width must be between 1 and 8 bits, got {0}")]
    DigitBits(u32),
}

/// Worker count and chunk geometry. None of these settings change results,
/// only how the work is spread.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecutorConfig {
    pub workers: usize,
    /// Elements per chunk in [`chunked_radix_sort`](super::chunked_radix_sort).
    pub chunk_size: usize,
    /// Bucket digit width for the chunk offset table (`r = 2^digit_bits`).
    pub digit_bits: u32,
}

impl ExecutorConfig {
    pub const DEFAULT_CHUNK_SIZE: usize = 1 << 15;
    pub const DEFAULT_DIGIT_BITS: u32 = 4;

    pub fn new(workers: usize, chunk_size: usize) -> Result<Self, ConfigError> {
        Self::with_digit_bits(workers, chunk_size, Self::DEFAULT_DIGIT_BITS)
    }

    pub fn with_digit_bits(workers: usize, chunk_size: usize, digit_bits: u32) -> Result<Self, ConfigError> {
        if workers == 0 {
            return Err(ConfigError::ZeroWorkers);
        }
        if chunk_size == 0 {
            return Err(ConfigError::ZeroChunkSize);
        }
        if !(1..=8).contains(&digit_bits) {
            return Err(ConfigError::DigitBits(digit_bits));
        }
        Ok(ExecutorConfig {
            workers,
            chunk_size,
            digit_bits,
        })
    }

    pub fn serial() -> Self {
        ExecutorConfig {
            workers: 1,
            ..Self::default()
        }
    }
}

impl Default for ExecutorConfig {
    fn default() -> Self {
        ExecutorConfig {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            chunk_size: Self::DEFAULT_CHUNK_SIZE,
            digit_bits: Self::DEFAULT_DIGIT_BITS,
        }
    }
}

// Pools are expensive to spin up and the benchmarks create many executors
// with the same worker count.
fn pool_for(workers: usize) -> Arc<ThreadPool> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS.get_or_init(Default::default).lock().unwrap();
    pools
        .entry(workers)
        .or_insert_with(|| {
            Arc::new(
                ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .thread_name(move |i| format!("dualcut-{workers}-{i}"))
                    .build()
                    .expect("failed to start worker pool"),
            )
        })
        .clone()
}

/// Runs phases either inline (one worker) or on a dedicated pool.
#[derive(Clone)]
pub struct Executor {
    cfg: ExecutorConfig,
    pool: Option<Arc<ThreadPool>>,
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Executor").field("cfg", &self.cfg).finish()
    }
}

// Below this many elements a phase is not worth handing to the pool.
const MIN_PARALLEL: usize = 1 << 12;

impl Executor {
    pub fn new(cfg: ExecutorConfig) -> Self {
        let pool = (cfg.workers > 1).then(|| pool_for(cfg.workers));
        Executor { cfg, pool }
    }

    pub fn serial() -> Self {
        Executor::new(ExecutorConfig::serial())
    }

    pub fn config(&self) -> &ExecutorConfig {
        &self.cfg
    }

    pub fn workers(&self) -> usize {
        self.cfg.workers
    }

    fn grain(&self, n: usize) -> usize {
        (n / (self.cfg.workers * 4)).max(MIN_PARALLEL / 4)
    }

    /// One phase over an index space: `f(i, &mut out[i])` for every `i`.
    pub fn phase<T, F>(&self, out: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize, &mut T) + Sync + Send,
    {
        match &self.pool {
            Some(pool) if out.len() >= MIN_PARALLEL => {
                let grain = self.grain(out.len());
                pool.install(|| {
                    out.par_iter_mut()
                        .with_min_len(grain)
                        .enumerate()
                        .for_each(|(i, x)| f(i, x))
                });
            }
            _ => out.iter_mut().enumerate().for_each(|(i, x)| f(i, x)),
        }
    }

    /// One phase over fixed-size chunks: `f(chunk_index, chunk)`. The last
    /// chunk may be short.
    pub fn chunks<T, F>(&self, data: &mut [T], size: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        let size = size.max(1);
        match &self.pool {
            Some(pool) if data.len() >= MIN_PARALLEL && data.len() > size => {
                let per_task = (self.grain(data.len()) / size).max(1);
                pool.install(|| {
                    data.par_chunks_mut(size)
                        .with_min_len(per_task)
                        .enumerate()
                        .for_each(|(i, c)| f(i, c))
                });
            }
            _ => data.chunks_mut(size).enumerate().for_each(|(i, c)| f(i, c)),
        }
    }

    /// One phase over `0..n` for side effects only (scatters).
    pub fn for_each<F>(&self, n: usize, f: F)
    where
        F: Fn(usize) + Sync + Send,
    {
        match &self.pool {
            Some(pool) if n >= MIN_PARALLEL => {
                let grain = self.grain(n);
                pool.install(|| (0..n).into_par_iter().with_min_len(grain).for_each(f));
            }
            _ => (0..n).for_each(f),
        }
    }

    /// Runs independent tasks, one per item.
    pub fn tasks<I, F>(&self, items: Vec<I>, f: F)
    where
        I: Send,
        F: Fn(I) + Sync + Send,
    {
        match &self.pool {
            Some(pool) if items.len() > 1 => pool.install(|| items.into_par_iter().for_each(f)),
            _ => items.into_iter().for_each(f),
        }
    }

    /// Parallel "every adjacent pair satisfies `pred`" check.
    pub fn all_adjacent<T, F>(&self, data: &[T], pred: F) -> bool
    where
        T: Sync,
        F: Fn(&T, &T) -> bool + Sync + Send,
    {
        match &self.pool {
            Some(pool) if data.len() >= MIN_PARALLEL => {
                let grain = self.grain(data.len());
                pool.install(|| data.par_windows(2).with_min_len(grain).all(|w| pred(&w[0], &w[1])))
            }
            _ => data.windows(2).all(|w| pred(&w[0], &w[1])),
        }
    }
}

/// Shared write handle for scatter phases where every index is written at
/// most once.
pub(crate) struct ScatterTarget<'a, T> {
    ptr: *mut T,
    len: usize,
    _slice: PhantomData<&'a mut [T]>,
}

unsafe impl<T: Send> Send for ScatterTarget<'_, T> {}
unsafe impl<T: Send> Sync for ScatterTarget<'_, T> {}

impl<'a, T> ScatterTarget<'a, T> {
    pub(crate) fn new(slice: &'a mut [T]) -> Self {
        ScatterTarget {
            ptr: slice.as_mut_ptr(),
            len: slice.len(),
            _slice: PhantomData,
        }
    }

    /// # Safety
    ///
    /// No two calls during the target's lifetime may use the same `index`,
    /// and the backing slice must not be accessed otherwise meanwhile.
    pub(crate) unsafe fn write(&self, index: usize, value: T) {
        assert!(index < self.len, "scatter index {index} out of bounds {}", self.len);
        self.ptr.add(index).write(value);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert_eq!(ExecutorConfig::new(0, 4), Err(ConfigError::ZeroWorkers));
        assert_eq!(ExecutorConfig::new(2, 0), Err(ConfigError::ZeroChunkSize));
        assert_eq!(ExecutorConfig::with_digit_bits(2, 4, 9), Err(ConfigError::DigitBits(9)));
        assert_eq!(ExecutorConfig::with_digit_bits(2, 4, 0), Err(ConfigError::DigitBits(0)));
        assert!(ExecutorConfig::with_digit_bits(2, 4, 8).is_ok());
        assert!(ExecutorConfig::default().workers >= 1);
    }

    #[test]
    fn phase_and_chunks_cover_everything() {
        for workers in [1, 3, 8] {
            let ex = Executor::new(ExecutorConfig::new(workers, 16).unwrap());
            let mut v = vec![0usize; 10_000];
            ex.phase(&mut v, |i, x| *x = i * 2);
            assert!(v.iter().enumerate().all(|(i, &x)| x == i * 2));
            ex.chunks(&mut v, 7, |c, chunk| chunk.iter_mut().for_each(|x| *x = c));
            assert!(v.iter().enumerate().all(|(i, &x)| x == i / 7));
            assert!(ex.all_adjacent(&v, |a, b| a <= b));
            v[5000] = 0;
            assert!(!ex.all_adjacent(&v, |a, b| a <= b));
        }
    }
}

use thiserror::Error;

use super::Executor;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScanError {
    #[error("prefix sum total {total} does not fit in 32 bits")]
    Overflow { total: u64 },
}

/// Exclusive prefix sum: `out[0] = 0`, `out[i] = values[0] + … + values[i-1]`.
///
/// Runs as a balanced-tree scan: `log2(n)` up-sweep phases build partial
/// sums, the root is cleared, and `log2(n)` down-sweep phases push prefixes
/// back to the leaves. Each phase touches disjoint pairs, so the phases are
/// the only synchronisation points. Sums are carried in 64 bits and the call
/// fails if the overall total exceeds `u32::MAX`.
///
/// ```
/// use dualcut::parallel::{exclusive_scan, Executor};
///
/// let out = exclusive_scan(&[3, 1, 7, 0], &Executor::serial()).unwrap();
/// assert_eq!(out, vec![0, 3, 4, 11]);
/// ```
pub fn exclusive_scan(values: &[u32], exec: &Executor) -> Result<Vec<u32>, ScanError> {
    if values.is_empty() {
        return Ok(Vec::new());
    }
    let mut buf = vec![0u64; values.len().next_power_of_two()];
    exec.phase(&mut buf[..values.len()], |i, x| *x = values[i] as u64);
    let total = tree_scan(&mut buf, exec);
    if total > u32::MAX as u64 {
        return Err(ScanError::Overflow { total });
    }
    let mut out = vec![0u32; values.len()];
    exec.phase(&mut out, |i, x| *x = buf[i] as u32);
    Ok(out)
}

/// In-place exclusive scan of a power-of-two length buffer; returns the total.
pub(crate) fn tree_scan(buf: &mut [u64], exec: &Executor) -> u64 {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    if n == 1 {
        let total = buf[0];
        buf[0] = 0;
        return total;
    }
    // up-sweep: each 2s-block folds its left half total into its last slot
    let mut stride = 1;
    while stride < n {
        exec.chunks(buf, 2 * stride, |_, c| c[2 * stride - 1] += c[stride - 1]);
        stride *= 2;
    }
    let total = buf[n - 1];
    buf[n - 1] = 0;
    // down-sweep
    stride = n / 2;
    while stride >= 1 {
        exec.chunks(buf, 2 * stride, |_, c| {
            let left = c[stride - 1];
            c[stride - 1] = c[2 * stride - 1];
            c[2 * stride - 1] += left;
        });
        stride /= 2;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parallel::ExecutorConfig;
    use proptest::prelude::*;

    fn sequential_oracle(v: &[u32]) -> Vec<u32> {
        let mut acc = 0u32;
        v.iter()
            .map(|&x| {
                let out = acc;
                acc += x;
                out
            })
            .collect()
    }

    fn executors() -> Vec<Executor> {
        [1, 2, 4, 8]
            .into_iter()
            .map(|w| Executor::new(ExecutorConfig::new(w, 64).unwrap()))
            .collect()
    }

    #[test]
    fn examples() {
        let ex = Executor::serial();
        assert_eq!(exclusive_scan(&[3, 1, 7, 0], &ex).unwrap(), vec![0, 3, 4, 11]);
        assert_eq!(exclusive_scan(&[], &ex).unwrap(), Vec::<u32>::new());
        let ones = vec![1u32; 1024];
        let want: Vec<u32> = (0..1024).collect();
        for ex in executors() {
            assert_eq!(exclusive_scan(&ones, &ex).unwrap(), want);
        }
        assert_eq!(exclusive_scan(&[9], &ex).unwrap(), vec![0]);
    }

    #[test]
    fn overflow_is_reported() {
        let ex = Executor::serial();
        assert_eq!(
            exclusive_scan(&[u32::MAX, 1], &ex),
            Err(ScanError::Overflow {
                total: u32::MAX as u64 + 1
            })
        );
        assert!(exclusive_scan(&[u32::MAX, 0], &ex).is_ok());
    }

    #[test]
    fn large_matches_oracle_for_all_worker_counts() {
        let v: Vec<u32> = (0..100_003u32).map(|i| i.wrapping_mul(2654435761) % 97).collect();
        let want = sequential_oracle(&v);
        for ex in executors() {
            assert_eq!(exclusive_scan(&v, &ex).unwrap(), want);
        }
    }

    proptest! {
        #[test]
        fn matches_oracle(v in prop::collection::vec(0u32..1000, 0..600)) {
            prop_assert_eq!(exclusive_scan(&v, &Executor::serial()).unwrap(), sequential_oracle(&v));
        }

        #[test]
        fn linearity(pairs in prop::collection::vec((0u32..1000, 0u32..1000), 0..600)) {
            let ex = Executor::serial();
            let a: Vec<u32> = pairs.iter().map(|p| p.0).collect();
            let b: Vec<u32> = pairs.iter().map(|p| p.1).collect();
            let ab: Vec<u32> = pairs.iter().map(|p| p.0 + p.1).collect();
            let sa = exclusive_scan(&a, &ex).unwrap();
            let sb = exclusive_scan(&b, &ex).unwrap();
            let sab = exclusive_scan(&ab, &ex).unwrap();
            for i in 0..ab.len() {
                prop_assert_eq!(sab[i], sa[i] + sb[i]);
            }
        }
    }
}

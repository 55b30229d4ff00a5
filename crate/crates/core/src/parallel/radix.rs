use super::executor::ScatterTarget;
use super::scan::{exclusive_scan, tree_scan};
use super::{Executor, KeyArray, Rec};

/// Stable partition on one key bit: every key whose `bit` is 0 ends up before
/// every key whose `bit` is 1, and each class keeps its input order.
///
/// ```
/// use dualcut::parallel::{split_by_bit, Executor, KeyArray};
///
/// let out = split_by_bit(&KeyArray::new(vec![5, 2, 7, 4]), 0, &Executor::serial());
/// assert_eq!(out.keys, vec![2, 4, 5, 7]);
/// ```
///
/// Panics if `bit >= 32`.
pub fn split_by_bit(arr: &KeyArray, bit: u32, exec: &Executor) -> KeyArray {
    assert!(bit < 32, "bit index {bit} out of range");
    let src = arr.to_records();
    let mut dst = vec![Rec::default(); src.len()];
    split_records(&src, &mut dst, bit, exec, &mut Vec::new());
    KeyArray::from_records(&dst, arr.payload.is_some())
}

// Elements per block in the blocked form of the zero-bit scan.
const SPLIT_BLOCK: usize = 2048;

/// The split dataflow:
///
/// ```text
/// b[i] = (key[i] >> bit) & 1
/// e[i] = 1 - b[i]
/// f    = exclusive_scan(e)
/// tof  = e[n-1] + f[n-1]            // number of zero-bit keys
/// t[i] = i - f[i] + tof
/// d[i] = b[i] ? t[i] : f[i]
/// dst[d[i]] = src[i]
/// ```
///
/// The scan of `e` is blocked: one phase counts the zero bits of every
/// block, a tree scan over those counts gives each block its `f` at the
/// block start, and the scatter phase carries `f` through the block with a
/// running count. Same `d`, far less memory traffic than a scan over `n`
/// flags.
///
/// `flags` is scratch space reused across calls. Returns `tof`.
pub(crate) fn split_records(src: &[Rec], dst: &mut [Rec], bit: u32, exec: &Executor, flags: &mut Vec<u64>) -> usize {
    let n = src.len();
    debug_assert_eq!(n, dst.len());
    if n == 0 {
        return 0;
    }
    let blocks = n.div_ceil(SPLIT_BLOCK);
    flags.clear();
    flags.resize(blocks.next_power_of_two(), 0);
    let block = |b: usize| &src[b * SPLIT_BLOCK..((b + 1) * SPLIT_BLOCK).min(n)];
    exec.phase(&mut flags[..blocks], |b, e| {
        *e = block(b).iter().map(|r| 1 - ((r.key >> bit) & 1) as u64).sum()
    });
    let tof = tree_scan(flags, exec) as usize;

    let f = &flags[..blocks];
    let target = ScatterTarget::new(dst);
    exec.tasks((0..blocks).collect(), |b| {
        let mut f_i = f[b] as usize;
        for (j, r) in block(b).iter().enumerate() {
            let i = b * SPLIT_BLOCK + j;
            let zero = (r.key >> bit) & 1 == 0;
            let d = if zero { f_i } else { i - f_i + tof };
            // SAFETY: d is a permutation of 0..n: zero-bit keys land on their
            // distinct exclusive ranks f[i] < tof, one-bit keys on tof + (their
            // rank among one-bit keys).
            unsafe { target.write(d, *r) };
            f_i += zero as usize;
        }
    });
    tof
}

/// LSD radix sort, one split per key bit.
///
/// Bits on which every key agrees are skipped (their split is the identity)
/// and the sort stops as soon as a pass leaves the keys in order. Stable, so
/// a payload of input indices comes out ascending within each key.
///
/// ```
/// use dualcut::parallel::{radix_sort, Executor, KeyArray};
///
/// let keys = vec![170, 45, 75, 90, 2, 24, 802, 66];
/// let out = radix_sort(&KeyArray::new(keys), &Executor::serial());
/// assert_eq!(out.keys, vec![2, 24, 45, 66, 75, 90, 170, 802]);
/// ```
pub fn radix_sort(arr: &KeyArray, exec: &Executor) -> KeyArray {
    let mut recs = arr.to_records();
    lsd_sort(&mut recs, exec);
    KeyArray::from_records(&recs, arr.payload.is_some())
}

pub(crate) fn lsd_sort(data: &mut [Rec], exec: &Executor) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    let first = data[0].key;
    let varying = data.iter().fold(0u32, |acc, r| acc | (r.key ^ first));
    let mut tmp = vec![Rec::default(); n];
    let mut flags = Vec::new();
    // true while the current order lives in `data`
    let mut in_data = true;
    for bit in 0..32 {
        if (varying >> bit) & 1 == 0 {
            continue;
        }
        let sorted = if in_data {
            split_records(data, &mut tmp, bit, exec, &mut flags);
            exec.all_adjacent(&tmp, |a, b| a.key <= b.key)
        } else {
            split_records(&tmp, data, bit, exec, &mut flags);
            exec.all_adjacent(data, |a, b| a.key <= b.key)
        };
        in_data = !in_data;
        if sorted {
            break;
        }
    }
    if !in_data {
        data.copy_from_slice(&tmp);
    }
}

/// LSD sort by 8-bit digits. Each pass is four phases over fixed-size
/// chunks: per-chunk digit histograms, a column-major (digit, chunk) table,
/// an exclusive scan of the table, and a stable scatter where every chunk
/// writes its elements from its own offsets. Digits on which all keys agree
/// are skipped.
pub(crate) fn digit_sort(mut src: Vec<Rec>, exec: &Executor) -> Vec<Rec> {
    const BITS: u32 = 8;
    const RADIX: usize = 1 << BITS;
    let n = src.len();
    if n <= 1 {
        return src;
    }
    let first = src[0].key;
    let varying = src.iter().fold(0u32, |acc, r| acc | (r.key ^ first));
    let chunk_size = exec.config().chunk_size.max(RADIX).min(n);
    let chunks = n.div_ceil(chunk_size);
    let mut dst = vec![Rec::default(); n];
    let mut hist = vec![0u32; chunks * RADIX];
    let mut table = vec![0u32; chunks * RADIX];

    for shift in (0..32).step_by(BITS as usize) {
        if (varying >> shift) & (RADIX as u32 - 1) == 0 {
            continue;
        }
        let digit = |k: u32| ((k >> shift) as usize) & (RADIX - 1);
        {
            let src = &src;
            exec.chunks(&mut hist, RADIX, |c, row| {
                row.fill(0);
                let lo = c * chunk_size;
                for r in &src[lo..(lo + chunk_size).min(n)] {
                    row[digit(r.key)] += 1;
                }
            });
        }
        exec.phase(&mut table, |j, x| *x = hist[(j % chunks) * RADIX + j / chunks]);
        let offsets = exclusive_scan(&table, exec).expect("n fits in 32 bits");
        {
            let target = ScatterTarget::new(&mut dst);
            let (src, offsets) = (&src, &offsets);
            exec.tasks((0..chunks).collect(), |c| {
                let mut cursor = [0usize; RADIX];
                for (d, cur) in cursor.iter_mut().enumerate() {
                    *cur = offsets[d * chunks + c] as usize;
                }
                let lo = c * chunk_size;
                for r in &src[lo..(lo + chunk_size).min(n)] {
                    let d = digit(r.key);
                    // SAFETY: each (digit, chunk) cell owns the disjoint range
                    // [offset, offset + count) and the cursor walks it once.
                    unsafe { target.write(cursor[d], *r) };
                    cursor[d] += 1;
                }
            });
        }
        std::mem::swap(&mut src, &mut dst);
    }
    src
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parallel::ExecutorConfig;
    use proptest::prelude::*;

    // stable partition by filtering twice
    fn partition_oracle(arr: &KeyArray, bit: u32) -> KeyArray {
        let idx: Vec<usize> = (0..arr.len())
            .filter(|&i| (arr.keys[i] >> bit) & 1 == 0)
            .chain((0..arr.len()).filter(|&i| (arr.keys[i] >> bit) & 1 == 1))
            .collect();
        KeyArray {
            keys: idx.iter().map(|&i| arr.keys[i]).collect(),
            payload: arr.payload.as_ref().map(|p| idx.iter().map(|&i| p[i]).collect()),
        }
    }

    fn stable_sort_oracle(arr: &KeyArray) -> KeyArray {
        let mut idx: Vec<usize> = (0..arr.len()).collect();
        idx.sort_by_key(|&i| arr.keys[i]);
        KeyArray {
            keys: idx.iter().map(|&i| arr.keys[i]).collect(),
            payload: arr.payload.as_ref().map(|p| idx.iter().map(|&i| p[i]).collect()),
        }
    }

    #[test]
    fn split_examples() {
        let ex = Executor::serial();
        assert_eq!(
            split_by_bit(&KeyArray::new(vec![5, 2, 7, 4]), 0, &ex).keys,
            vec![2, 4, 5, 7]
        );

        let out = split_by_bit(&KeyArray::indexed(vec![1, 1, 0, 0]), 0, &ex);
        assert_eq!(out.keys, vec![0, 0, 1, 1]);
        assert_eq!(out.payload.unwrap(), vec![2, 3, 0, 1]);

        let arr = KeyArray::indexed(vec![6, 3, 6, 2]);
        let out = split_by_bit(&arr, 1, &ex);
        assert_eq!(out, partition_oracle(&arr, 1));
        // 6, 3, 6 and 2 all have bit 1 set; nothing moves
        assert_eq!(out.keys, vec![6, 3, 6, 2]);

        assert!(split_by_bit(&KeyArray::new(vec![]), 5, &ex).is_empty());
    }

    #[test]
    fn split_count_matches_tof() {
        let keys: Vec<u32> = (0..5000u32).map(|i| i.wrapping_mul(2246822519)).collect();
        let src: Vec<Rec> = keys.iter().map(|&key| Rec { key, val: 0 }).collect();
        let mut dst = vec![Rec::default(); src.len()];
        for bit in [0, 7, 31] {
            let tof = split_records(&src, &mut dst, bit, &Executor::serial(), &mut Vec::new());
            let zeros = keys.iter().filter(|&&k| (k >> bit) & 1 == 0).count();
            assert_eq!(tof, zeros);
        }
    }

    #[test]
    fn radix_examples() {
        let ex = Executor::serial();
        let arr = KeyArray::new(vec![170, 45, 75, 90, 2, 24, 802, 66]);
        assert_eq!(radix_sort(&arr, &ex).keys, vec![2, 24, 45, 66, 75, 90, 170, 802]);
        assert!(radix_sort(&KeyArray::new(vec![]), &ex).is_empty());
        assert_eq!(
            radix_sort(&KeyArray::new(vec![u32::MAX, 0, u32::MAX - 1]), &ex).keys,
            vec![0, u32::MAX - 1, u32::MAX]
        );
    }

    #[test]
    fn workers_agree() {
        let keys: Vec<u32> = (0..70_000u32).map(|i| i.wrapping_mul(2654435761) >> 7).collect();
        let arr = KeyArray::indexed(keys);
        let want = stable_sort_oracle(&arr);
        for w in [1, 2, 4, 8] {
            let ex = Executor::new(ExecutorConfig::new(w, 1024).unwrap());
            assert_eq!(radix_sort(&arr, &ex), want);
            assert_eq!(split_by_bit(&arr, 3, &ex), partition_oracle(&arr, 3));
        }
    }

    proptest! {
        #[test]
        fn split_is_stable_partition(keys in prop::collection::vec(any::<u32>(), 0..300), bit in 0u32..32) {
            let arr = KeyArray::indexed(keys);
            prop_assert_eq!(split_by_bit(&arr, bit, &Executor::serial()), partition_oracle(&arr, bit));
        }

        #[test]
        fn digit_sort_matches_stable_oracle(keys in prop::collection::vec(any::<u32>(), 0..2000), small in any::<bool>(), chunk in 1usize..600) {
            let keys: Vec<u32> = if small { keys.into_iter().map(|k| k % 300).collect() } else { keys };
            let arr = KeyArray::indexed(keys);
            let ex = Executor::new(ExecutorConfig::new(1, chunk).unwrap());
            let got = KeyArray::from_records(&digit_sort(arr.to_records(), &ex), true);
            prop_assert_eq!(got, stable_sort_oracle(&arr));
        }

        #[test]
        fn radix_matches_stable_oracle(keys in prop::collection::vec(0u32..64, 0..400)) {
            let arr = KeyArray::indexed(keys);
            prop_assert_eq!(radix_sort(&arr, &Executor::serial()), stable_sort_oracle(&arr));
        }
    }
}

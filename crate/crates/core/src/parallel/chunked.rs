use super::executor::ScatterTarget;
use super::radix::lsd_sort;
use super::scan::exclusive_scan;
use super::{Executor, KeyArray, Rec};

/// Chunked radix sort. Same contract as [`radix_sort`](super::radix_sort):
/// ascending keys, stable, identical output for every executor setting.
///
/// The input is cut into `chunk_size` pieces and then:
///
/// 1. every chunk is sorted on its own with split passes (chunks run in
///    parallel, each one on a single worker);
/// 2. each chunk counts its keys per bucket of the leading significant digit
///    (`2^digit_bits` buckets) and the counts are laid out column-major,
///    bucket by bucket, one column entry per chunk;
/// 3. an exclusive scan of that table gives every (bucket, chunk) pair its
///    global output offset;
/// 4. elements are scattered to those offsets. Bucket `b` now holds one
///    sorted run per chunk, in chunk order;
/// 5. runs inside each bucket are merged pairwise, level by level, until one
///    run per bucket remains. Merges prefer the left run on ties, which keeps
///    the sort stable.
///
/// ```
/// use dualcut::parallel::{chunked_radix_sort, Executor, ExecutorConfig, KeyArray};
///
/// let ex = Executor::new(ExecutorConfig::new(2, 4).unwrap());
/// let out = chunked_radix_sort(&KeyArray::new(vec![170, 45, 75, 90, 2, 24, 802, 66]), &ex);
/// assert_eq!(out.keys, vec![2, 24, 45, 66, 75, 90, 170, 802]);
/// ```
pub fn chunked_radix_sort(arr: &KeyArray, exec: &Executor) -> KeyArray {
    let out = sort_records_chunked(arr.to_records(), exec);
    KeyArray::from_records(&out, arr.payload.is_some())
}

#[derive(Debug, Clone, Copy)]
struct Run {
    start: usize,
    len: usize,
    bucket: usize,
}

pub(crate) fn sort_records_chunked(mut recs: Vec<Rec>, exec: &Executor) -> Vec<Rec> {
    let n = recs.len();
    if n <= 1 {
        return recs;
    }
    let cfg = *exec.config();
    let chunk_size = cfg.chunk_size.min(n);
    let chunks = n.div_ceil(chunk_size);

    // 1. chunk-local sorts
    let local = Executor::serial();
    exec.chunks(&mut recs, chunk_size, |_, chunk| lsd_sort(chunk, &local));

    // 2. bucket counts on the leading digit
    let or_all = recs.iter().fold(0u32, |acc, r| acc | r.key);
    let high_bit = 32 - or_all.leading_zeros();
    let shift = high_bit.saturating_sub(cfg.digit_bits);
    let radix = 1usize << cfg.digit_bits;
    let bucket_of = |key: u32| (key >> shift) as usize;

    let mut row_counts = vec![0u32; chunks * radix];
    {
        let recs = &recs;
        exec.chunks(&mut row_counts, radix, |c, row| {
            let lo = c * chunk_size;
            let hi = (lo + chunk_size).min(n);
            for r in &recs[lo..hi] {
                row[bucket_of(r.key)] += 1;
            }
        });
    }
    let mut table = vec![0u32; chunks * radix];
    exec.phase(&mut table, |j, x| {
        let (bucket, chunk) = (j / chunks, j % chunks);
        *x = row_counts[chunk * radix + bucket];
    });

    // 3. global offsets
    let offsets = exclusive_scan(&table, exec).expect("counts sum to n, which fits in 32 bits");

    // 4. scatter
    let mut scattered = vec![Rec::default(); n];
    {
        let target = ScatterTarget::new(&mut scattered);
        let recs = &recs;
        let (offsets, row_counts) = (&offsets, &row_counts);
        exec.tasks((0..chunks).collect(), |c| {
            let lo = c * chunk_size;
            let hi = (lo + chunk_size).min(n);
            let mut local_start = 0usize;
            let mut current = usize::MAX;
            for (j, r) in recs[lo..hi].iter().enumerate() {
                let b = bucket_of(r.key);
                if b != current {
                    // buckets are contiguous and ascending within a sorted chunk
                    local_start = (0..b).map(|x| row_counts[c * radix + x] as usize).sum();
                    current = b;
                }
                let dest = offsets[b * chunks + c] as usize + (j - local_start);
                // SAFETY: (bucket, chunk) cells own disjoint output ranges
                // [offset, offset + count) and each element has a distinct
                // rank within its cell.
                unsafe { target.write(dest, *r) };
            }
        });
    }
    drop(recs);

    // 5. pairwise merges within buckets
    let mut runs: Vec<Run> = (0..radix * chunks)
        .filter(|&j| table[j] > 0)
        .map(|j| Run {
            start: offsets[j] as usize,
            len: table[j] as usize,
            bucket: j / chunks,
        })
        .collect();
    let mut src = scattered;
    let mut dst = vec![Rec::default(); n];
    while runs.windows(2).any(|w| w[0].bucket == w[1].bucket) {
        let mut next = Vec::with_capacity(runs.len() / 2 + 1);
        // (left run, optional right run) pairs in array order
        let mut segments = Vec::with_capacity(runs.len() / 2 + 1);
        let mut i = 0;
        while i < runs.len() {
            let a = runs[i];
            if i + 1 < runs.len() && runs[i + 1].bucket == a.bucket {
                let b = runs[i + 1];
                segments.push((a.start, a.len, b.len));
                next.push(Run {
                    start: a.start,
                    len: a.len + b.len,
                    bucket: a.bucket,
                });
                i += 2;
            } else {
                segments.push((a.start, a.len, 0));
                next.push(a);
                i += 1;
            }
        }
        let mut work = Vec::with_capacity(segments.len());
        let mut rest: &mut [Rec] = &mut dst;
        let mut consumed = 0;
        for &(start, left, right) in &segments {
            debug_assert_eq!(start, consumed);
            let (head, tail) = std::mem::take(&mut rest).split_at_mut(left + right);
            work.push((
                &src[start..start + left],
                &src[start + left..start + left + right],
                head,
            ));
            rest = tail;
            consumed += left + right;
        }
        exec.tasks(work, |(a, b, out)| merge_into(a, b, out));
        std::mem::swap(&mut src, &mut dst);
        runs = next;
    }
    src
}

fn merge_into(a: &[Rec], b: &[Rec], out: &mut [Rec]) {
    let (mut i, mut j) = (0, 0);
    for slot in out.iter_mut() {
        if j >= b.len() || (i < a.len() && a[i].key <= b[j].key) {
            *slot = a[i];
            i += 1;
        } else {
            *slot = b[j];
            j += 1;
        }
    }
}

const SNAP: f64 = 1e-9;

/// Ceiling of a nonnegative value, treating values within `SNAP` above an
/// integer as that integer.
pub(crate) fn ceil_tolerant(x: f64) -> usize {
    if x <= 0.0 {
        return 0;
    }
    let floor = x as usize;
    if x - (floor as f64) <= SNAP {
        floor
    } else {
        floor + 1
    }
}

/// Positions of a greedy left-to-right subsequence match of `pattern`
/// inside `seq`, or `None` if `pattern` is not a subsequence.
pub(crate) fn greedy_match<T: PartialEq>(pattern: &[T], seq: &[T]) -> Option<alloc::vec::Vec<usize>> {
    let mut out = alloc::vec::Vec::with_capacity(pattern.len());
    let mut pos = 0;
    for p in pattern {
        let offset = seq[pos..].iter().position(|e| e == p)?;
        out.push(pos + offset);
        pos += offset + 1;
    }
    Some(out)
}

pub(crate) fn is_subsequence<T: PartialEq>(pattern: &[T], seq: &[T]) -> bool {
    let mut it = seq.iter();
    pattern.iter().all(|p| it.any(|e| e == p))
}

//! Ratcliff/Obershelp "gestalt" sequence similarity.

use num_rational::Ratio;

/// A maximal run where `a[a_start..a_start+len] == b[b_start..b_start+len]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchBlock {
    pub a_start: usize,
    pub b_start: usize,
    pub len: usize,
}

/// Longest common block inside `a[alo..ahi]` × `b[blo..bhi]`.
///
/// Among equally long blocks the one starting earliest in `a` wins, then the
/// one starting earliest in `b`.
pub fn longest_match<T: PartialEq>(a: &[T], b: &[T], alo: usize, ahi: usize, blo: usize, bhi: usize) -> MatchBlock {
    let mut best = MatchBlock { a_start: alo, b_start: blo, len: 0 };
    // run[j] = length of the common suffix ending at a[i-1], b[j-1]
    let width = bhi - blo;
    let mut prev = vec![0usize; width + 1];
    let mut cur = vec![0usize; width + 1];
    for i in alo..ahi {
        for j in blo..bhi {
            let k = j - blo + 1;
            cur[k] = if a[i] == b[j] { prev[k - 1] + 1 } else { 0 };
            let len = cur[k];
            if len > best.len {
                best = MatchBlock { a_start: i + 1 - len, b_start: j + 1 - len, len };
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}

/// All matching blocks, found by recursing left and right of each longest match.
pub fn matching_blocks<T: PartialEq>(a: &[T], b: &[T]) -> Vec<MatchBlock> {
    let mut blocks = Vec::new();
    let mut stack = vec![(0, a.len(), 0, b.len())];
    while let Some((alo, ahi, blo, bhi)) = stack.pop() {
        if alo >= ahi || blo >= bhi {
            continue;
        }
        let m = longest_match(a, b, alo, ahi, blo, bhi);
        if m.len == 0 {
            continue;
        }
        blocks.push(m);
        stack.push((alo, m.a_start, blo, m.b_start));
        stack.push((m.a_start + m.len, ahi, m.b_start + m.len, bhi));
    }
    blocks.sort_by_key(|m| (m.a_start, m.b_start));
    blocks
}

/// Gestalt ratio `2M / T`, exact. Two empty sequences compare as 1.
pub fn similarity_ratio<T: PartialEq>(a: &[T], b: &[T]) -> Ratio<u64> {
    let total = (a.len() + b.len()) as u64;
    if total == 0 {
        return Ratio::from_integer(1);
    }
    let matched: usize = matching_blocks(a, b).iter().map(|m| m.len).sum();
    Ratio::new(2 * matched as u64, total)
}

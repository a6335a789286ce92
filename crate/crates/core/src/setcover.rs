//! Minimum set cover over small ground sets.

/// Largest ground set handled by the exact solver.
pub const EXACT_LIMIT: usize = 24;

/// Growable bitset over `0..len`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Bits {
    words: Vec<u64>,
}

impl Bits {
    pub(crate) fn new(len: usize) -> Self {
        Bits {
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub(crate) fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub(crate) fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub(crate) fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub(crate) fn is_subset(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    fn count_outside(&self, covered: &Bits) -> usize {
        self.words
            .iter()
            .zip(&covered.words)
            .map(|(a, b)| (a & !b).count_ones() as usize)
            .sum()
    }

    fn union_with(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub(crate) fn low_u32(&self) -> u32 {
        self.words.first().copied().unwrap_or(0) as u32
    }
}

/// Drops duplicate and strictly dominated sets. Returns kept indices in input order.
pub(crate) fn prune_dominated(sets: &[Bits]) -> Vec<usize> {
    let mut keep = Vec::new();
    'outer: for (i, s) in sets.iter().enumerate() {
        if s.is_empty() {
            continue;
        }
        for (j, t) in sets.iter().enumerate() {
            if i == j || !s.is_subset(t) {
                continue;
            }
            // equal sets: keep the first occurrence only
            if t.is_subset(s) && j > i {
                continue;
            }
            continue 'outer;
        }
        keep.push(i);
    }
    keep
}

/// Exact minimum cover of `0..n` (n <= `EXACT_LIMIT`) by `sets`.
///
/// Branches on the lowest uncovered element over the sets containing it,
/// memoizing the optimum per covered subset. Returns chosen indices, or
/// `None` if some element lies in no set.
pub(crate) fn exact_cover(n: usize, sets: &[u32]) -> Option<Vec<usize>> {
    assert!(n <= EXACT_LIMIT, "exact cover limited to {EXACT_LIMIT} elements");
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, &s) in sets.iter().enumerate() {
        for (b, list) in containing.iter_mut().enumerate() {
            if s >> b & 1 == 1 {
                list.push(idx);
            }
        }
    }
    if containing.iter().any(Vec::is_empty) {
        return None;
    }
    // larger sets first finds good solutions early; the optimum is unaffected
    for list in &mut containing {
        list.sort_by_key(|&i| (std::cmp::Reverse(sets[i].count_ones()), i));
    }
    const UNKNOWN: u8 = u8::MAX;
    let mut memo = vec![UNKNOWN; 1usize << n];
    fn solve(mask: u32, full: u32, sets: &[u32], containing: &[Vec<usize>], memo: &mut [u8]) -> u8 {
        if mask == full {
            return 0;
        }
        let cached = memo[mask as usize];
        if cached != u8::MAX {
            return cached;
        }
        let b = (!mask).trailing_zeros() as usize;
        let mut best = u8::MAX - 1;
        for &i in &containing[b] {
            let next = mask | sets[i];
            best = best.min(1 + solve(next, full, sets, containing, memo));
        }
        memo[mask as usize] = best;
        best
    }
    solve(0, full, sets, &containing, &mut memo);
    let mut chosen = Vec::new();
    let mut mask = 0u32;
    while mask != full {
        let b = (!mask).trailing_zeros() as usize;
        let target = memo[mask as usize];
        let pick = containing[b]
            .iter()
            .copied()
            .filter(|&i| 1 + solve(mask | sets[i], full, sets, &containing, &mut memo) == target)
            .min()
            .expect("memo is consistent");
        chosen.push(pick);
        mask |= sets[pick];
    }
    Some(chosen)
}

/// Greedy cover: repeatedly takes the set covering the most uncovered
/// elements, lowest index on ties. `Err` carries the uncoverable elements.
pub(crate) fn greedy_cover(n: usize, sets: &[Bits]) -> Result<Vec<usize>, Vec<usize>> {
    let mut reachable = Bits::new(n);
    for s in sets {
        reachable.union_with(s);
    }
    let missing: Vec<usize> = (0..n).filter(|&i| !reachable.contains(i)).collect();
    if !missing.is_empty() {
        return Err(missing);
    }
    let mut covered = Bits::new(n);
    let mut chosen = Vec::new();
    while covered.count() < n {
        let (best, _) = sets
            .iter()
            .enumerate()
            .map(|(i, s)| (i, s.count_outside(&covered)))
            .fold((usize::MAX, 0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        covered.union_with(&sets[best]);
        chosen.push(best);
    }
    Ok(chosen)
}

/// Maximal cliques of a graph on `n <= 64` vertices given as adjacency masks.
pub(crate) fn maximal_cliques(adj: &[u64]) -> Vec<u64> {
    fn expand(r: u64, mut p: u64, mut x: u64, adj: &[u64], out: &mut Vec<u64>) {
        if p == 0 && x == 0 {
            out.push(r);
            return;
        }
        let pivot = (p | x).trailing_zeros() as usize;
        let mut candidates = p & !adj[pivot];
        while candidates != 0 {
            let v = candidates.trailing_zeros() as usize;
            let bit = 1u64 << v;
            expand(r | bit, p & adj[v], x & adj[v], adj, out);
            p &= !bit;
            x |= bit;
            candidates &= !bit;
        }
    }
    let n = adj.len();
    assert!(n <= 64);
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut out = Vec::new();
    if n > 0 {
        expand(0, all, 0, adj, &mut out);
    }
    out.sort_unstable();
    out
}

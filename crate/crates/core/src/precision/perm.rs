//! Lexicographic permutation stepping and unranking.

/// Rearranges `items` into the next lexicographic permutation. Returns
/// `false` and leaves `items` sorted ascending once the last one is passed.
pub fn next_permutation<T: Ord>(items: &mut [T]) -> bool {
    let Some(pivot) = items.windows(2).rposition(|w| w[0] < w[1]) else {
        items.reverse();
        return false;
    };
    let swap = items
        .iter()
        .rposition(|x| *x > items[pivot])
        .expect("a larger element exists");
    items.swap(pivot, swap);
    items[pivot + 1..].reverse();
    true
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// The `rank`-th lexicographic permutation of the ascending `sorted`.
pub fn unrank<T: Clone>(sorted: &[T], mut rank: u64) -> Vec<T> {
    let mut pool: Vec<T> = sorted.to_vec();
    let mut out = Vec::with_capacity(pool.len());
    for k in (0..sorted.len()).rev() {
        let f = factorial(k);
        let i = (rank / f) as usize;
        rank %= f;
        out.push(pool.remove(i));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stepping_visits_all_in_order() {
        let mut v = vec![1, 2, 3, 4];
        let mut seen = vec![v.clone()];
        while next_permutation(&mut v) {
            seen.push(v.clone());
        }
        assert_eq!(seen.len(), 24);
        assert_eq!(v, vec![1, 2, 3, 4]);
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(seen, sorted);
        for (rank, p) in seen.iter().enumerate() {
            assert_eq!(&unrank(&[1, 2, 3, 4], rank as u64), p);
        }
    }

    #[test]
    fn trivial_sizes() {
        let mut empty: Vec<u8> = vec![];
        assert!(!next_permutation(&mut empty));
        let mut one = vec![7];
        assert!(!next_permutation(&mut one));
        assert_eq!(factorial(0), 1);
        assert_eq!(factorial(8), 40320);
    }
}

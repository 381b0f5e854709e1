//! Suffix array by prefix doubling with radix passes, and Kasai's LCP array.

/// Suffix array of `text`: starting positions in lexicographic order.
pub fn suffix_array(text: &[u8]) -> Vec<u32> {
    let n = text.len();
    assert!(n < u32::MAX as usize, "text too long for 32-bit suffix array");
    if n == 0 {
        return Vec::new();
    }
    let mut sa: Vec<u32> = (0..n as u32).collect();
    sa.sort_unstable_by_key(|&i| text[i as usize]);
    let mut rank: Vec<u32> = vec![0; n];
    let mut classes = 0u32;
    for j in 0..n {
        if j > 0 && text[sa[j] as usize] != text[sa[j - 1] as usize] {
            classes += 1;
        }
        rank[sa[j] as usize] = classes;
    }
    let mut classes = classes as usize + 1;

    let mut tmp: Vec<u32> = vec![0; n];
    let mut count: Vec<usize> = Vec::new();
    let mut next_rank: Vec<u32> = vec![0; n];
    let mut k = 1usize;
    while classes < n {
        // Order by second key: suffixes without a partner k ahead come first.
        let mut p = 0;
        for i in n - k..n {
            tmp[p] = i as u32;
            p += 1;
        }
        for &s in &sa {
            if s as usize >= k {
                tmp[p] = s - k as u32;
                p += 1;
            }
        }
        // Stable counting sort by first key.
        count.clear();
        count.resize(classes + 1, 0);
        for &r in &rank {
            count[r as usize + 1] += 1;
        }
        for c in 1..=classes {
            count[c] += count[c - 1];
        }
        for &s in &tmp {
            let r = rank[s as usize] as usize;
            sa[count[r]] = s;
            count[r] += 1;
        }
        let key = |i: u32| {
            let i = i as usize;
            let second = if i + k < n { rank[i + k] as i64 } else { -1 };
            (rank[i], second)
        };
        let mut c = 0u32;
        next_rank[sa[0] as usize] = 0;
        for j in 1..n {
            if key(sa[j]) != key(sa[j - 1]) {
                c += 1;
            }
            next_rank[sa[j] as usize] = c;
        }
        std::mem::swap(&mut rank, &mut next_rank);
        classes = c as usize + 1;
        k *= 2;
    }
    sa
}

/// `lcp[r]` = longest common prefix of suffixes `sa[r-1]` and `sa[r]`; `lcp[0] = 0`.
pub fn lcp_array(text: &[u8], sa: &[u32]) -> Vec<u32> {
    let n = text.len();
    let mut rank = vec![0u32; n];
    for (r, &s) in sa.iter().enumerate() {
        rank[s as usize] = r as u32;
    }
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        let r = rank[i] as usize;
        if r == 0 {
            h = 0;
            continue;
        }
        let j = sa[r - 1] as usize;
        while i + h < n && j + h < n && text[i + h] == text[j + h] {
            h += 1;
        }
        lcp[r] = h as u32;
        h = h.saturating_sub(1);
    }
    lcp
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(text: &[u8]) -> Vec<u32> {
        let mut sa: Vec<u32> = (0..text.len() as u32).collect();
        sa.sort_by(|&a, &b| text[a as usize..].cmp(&text[b as usize..]));
        sa
    }

    #[test]
    fn banana() {
        assert_eq!(suffix_array(b"banana"), vec![5, 3, 1, 0, 4, 2]);
        assert_eq!(lcp_array(b"banana", &[5, 3, 1, 0, 4, 2]), vec![0, 1, 3, 0, 0, 2]);
    }

    proptest! {
        #[test]
        fn matches_naive_sort(text in proptest::collection::vec(0u8..3, 0..200)) {
            let sa = suffix_array(&text);
            prop_assert_eq!(&sa, &naive(&text));
            let lcp = lcp_array(&text, &sa);
            for r in 1..sa.len() {
                let (a, b) = (&text[sa[r - 1] as usize..], &text[sa[r] as usize..]);
                let l = a.iter().zip(b).take_while(|(x, y)| x == y).count();
                prop_assert_eq!(lcp[r] as usize, l);
            }
        }
    }
}

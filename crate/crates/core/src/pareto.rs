//! Deterministic Pareto filters (all coordinates maximized).

use std::collections::BTreeMap;

/// Order-preserving key for a nonnegative float.
fn key(v: f64) -> u64 {
    if v == 0.0 {
        0
    } else {
        v.to_bits()
    }
}

/// Indices of the nondominated points among `(r1, r2)` pairs, returned in
/// ascending `r1`. Among identical points the lowest index survives.
pub fn pareto_2d(points: &[(f64, f64)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[b]
            .0
            .total_cmp(&points[a].0)
            .then(points[b].1.total_cmp(&points[a].1))
            .then(a.cmp(&b))
    });
    let mut keep = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for i in order {
        if points[i].1 > best {
            best = points[i].1;
            keep.push(i);
        }
    }
    keep.reverse();
    keep
}

/// Indices of the nondominated points among `(r0, r1, r2)` triples with
/// nonnegative coordinates, in descending `r0` (ties by descending `r1`).
/// Among identical points the lowest index survives.
pub fn pareto_3d(points: &[[f64; 3]]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        let (p, q) = (&points[a], &points[b]);
        q[0].total_cmp(&p[0])
            .then(q[1].total_cmp(&p[1]))
            .then(q[2].total_cmp(&p[2]))
            .then(a.cmp(&b))
    });
    // staircase over (r1, r2) of the points kept so far: r2 strictly
    // decreases as r1 increases
    let mut stair: BTreeMap<u64, f64> = BTreeMap::new();
    let mut keep = Vec::new();
    for i in order {
        let [_, r1, r2] = points[i];
        let k1 = key(r1);
        if let Some((_, &above)) = stair.range(k1..).next() {
            if above >= r2 {
                continue;
            }
        }
        let dominated: Vec<u64> = stair
            .range(..=k1)
            .rev()
            .take_while(|(_, &v)| v <= r2)
            .map(|(&k, _)| k)
            .collect();
        for k in dominated {
            stair.remove(&k);
        }
        stair.insert(k1, r2);
        keep.push(i);
    }
    keep
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dominates2(a: (f64, f64), b: (f64, f64)) -> bool {
        a.0 >= b.0 && a.1 >= b.1 && (a.0 > b.0 || a.1 > b.1)
    }

    fn dominates3(a: &[f64; 3], b: &[f64; 3]) -> bool {
        a.iter().zip(b).all(|(x, y)| x >= y) && a.iter().zip(b).any(|(x, y)| x > y)
    }

    #[test]
    fn small_examples() {
        let pts = [(0.0, 1.0), (1.0, 0.0), (0.5, 0.5), (0.4, 0.4), (0.5, 0.5)];
        assert_eq!(pareto_2d(&pts), vec![0, 2, 1]);
        let pts = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.5, 0.5, 0.0], [0.5, 0.4, 0.0], [0.5, 0.5, 0.0]];
        let mut k = pareto_3d(&pts);
        k.sort_unstable();
        assert_eq!(k, vec![0, 1, 2]);
    }

    proptest! {
        #[test]
        fn filter_2d_matches_brute_force(pts in prop::collection::vec((0u8..6, 0u8..6), 0..40)) {
            let pts: Vec<(f64, f64)> = pts.into_iter().map(|(a, b)| (a as f64, b as f64)).collect();
            let kept = pareto_2d(&pts);
            for (i, p) in pts.iter().enumerate() {
                let dominated = pts.iter().any(|q| dominates2(*q, *p));
                let first_copy = pts.iter().position(|q| q == p) == Some(i);
                prop_assert_eq!(kept.contains(&i), !dominated && first_copy);
            }
        }

        #[test]
        fn filter_3d_matches_brute_force(pts in prop::collection::vec((0u8..5, 0u8..5, 0u8..5), 0..60)) {
            let pts: Vec<[f64; 3]> = pts.into_iter().map(|(a, b, c)| [a as f64, b as f64, c as f64]).collect();
            let kept = pareto_3d(&pts);
            for (i, p) in pts.iter().enumerate() {
                let dominated = pts.iter().any(|q| dominates3(q, p));
                let first_copy = pts.iter().position(|q| q == p) == Some(i);
                prop_assert_eq!(kept.contains(&i), !dominated && first_copy);
            }
        }
    }
}

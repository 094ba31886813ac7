//! Lattices on the probability simplex used by the grid searches.

/// All pmfs on `k` symbols whose entries are multiples of `1/divisions`,
/// in lexicographic order of the integer compositions.
pub(crate) fn lattice(k: usize, divisions: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut counts = vec![0usize; k];
    compose(&mut counts, 0, divisions, &mut |c| {
        out.push(c.iter().map(|&n| n as f64 / divisions as f64).collect())
    });
    out
}

fn compose(counts: &mut [usize], at: usize, left: usize, emit: &mut impl FnMut(&[usize])) {
    if at + 1 == counts.len() {
        counts[at] = left;
        emit(counts);
        return;
    }
    for n in (0..=left).rev() {
        counts[at] = n;
        compose(counts, at + 1, left - n, emit);
    }
}

/// Number of lattice points, C(divisions + k − 1, k − 1).
pub(crate) fn lattice_size(k: usize, divisions: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 1..k as u128 {
        acc = acc * (divisions as u128 + i) / i;
    }
    acc
}

/// Points `center + pitch·offsets` with every free coordinate offset in
/// `-reach..=reach`; the last coordinate absorbs the remainder. Points
/// leaving the simplex are dropped.
pub(crate) fn neighborhood(center: &[f64], pitch: f64, reach: i64) -> Vec<Vec<f64>> {
    let k = center.len();
    if k == 1 {
        return vec![vec![1.0]];
    }
    let free = k - 1;
    let span = (2 * reach + 1) as usize;
    let total = span.pow(free as u32);
    let mut out = Vec::with_capacity(total);
    'points: for code in 0..total {
        let mut c = code;
        let mut p = Vec::with_capacity(k);
        let mut mass = 0.0;
        for i in 0..free {
            let off = (c % span) as i64 - reach;
            c /= span;
            let v = center[i] + pitch * off as f64;
            if v < -1e-12 || v > 1.0 + 1e-12 {
                continue 'points;
            }
            let v = v.clamp(0.0, 1.0);
            mass += v;
            p.push(v);
        }
        let last = 1.0 - mass;
        if last < -1e-12 {
            continue;
        }
        p.push(last.max(0.0));
        out.push(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_counts_match_binomial() {
        for (k, d) in [(1, 5), (2, 64), (3, 20), (4, 20), (4, 64)] {
            assert_eq!(lattice(k, d).len() as u128, lattice_size(k, d));
        }
        assert_eq!(lattice_size(4, 20), 1771);
    }

    #[test]
    fn lattice_points_are_pmfs() {
        for p in lattice(3, 7) {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&x| x >= 0.0));
        }
        assert_eq!(
            lattice(2, 2),
            vec![vec![1.0, 0.0], vec![0.5, 0.5], vec![0.0, 1.0]]
        );
    }

    #[test]
    fn neighborhood_stays_on_simplex_and_contains_center() {
        let c = [0.25, 0.0, 0.75];
        let pts = neighborhood(&c, 0.01, 3);
        assert!(pts
            .iter()
            .any(|p| p.iter().zip(&c).all(|(a, b)| (a - b).abs() < 1e-12)));
        for p in &pts {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&x| x >= 0.0));
        }
        // second coordinate sits on the boundary, so only 4 of 7 offsets survive
        assert_eq!(pts.len(), 7 * 4);
    }
}

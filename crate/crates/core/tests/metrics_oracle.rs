//! Exhaustive agreement check of ARI and NMI against independent
//! reference implementations, over every pair of partitions of small
//! sets.
//!
//! The references deliberately take different routes than the library:
//! ARI from raw pair counting over element pairs (no contingency
//! binomials), NMI from the joint histogram accumulated element by
//! element.

use phasewalk_core::metrics::{ari, nmi};

/// All set partitions of `{0..n}` as label vectors in restricted-growth
/// form.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; n];
    fn recurse(current: &mut Vec<usize>, index: usize, max_used: usize, out: &mut Vec<Vec<usize>>) {
        if index == current.len() {
            out.push(current.clone());
            return;
        }
        for label in 0..=max_used + 1 {
            current[index] = label;
            recurse(current, index + 1, max_used.max(label), out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    current[0] = 0;
    recurse(&mut current, 1, 0, &mut out);
    out
}

/// Pair-counting ARI: classify every element pair as together/apart in
/// each labeling, then `2(ad - bc) / ((a+b)(b+d) + (a+c)(c+d))`.
fn ari_pair_counting(x: &[usize], y: &[usize]) -> f64 {
    let n = x.len();
    let (mut a, mut b, mut c, mut d) = (0f64, 0f64, 0f64, 0f64);
    for i in 0..n {
        for j in (i + 1)..n {
            let same_x = x[i] == x[j];
            let same_y = y[i] == y[j];
            match (same_x, same_y) {
                (true, true) => a += 1.0,
                (true, false) => b += 1.0,
                (false, true) => c += 1.0,
                (false, false) => d += 1.0,
            }
        }
    }
    let denominator = (a + b) * (b + d) + (a + c) * (c + d);
    if denominator == 0.0 {
        // No discordant mass possible: identical trivial partitions.
        return 1.0;
    }
    2.0 * (a * d - b * c) / denominator
}

/// NMI from the joint histogram with arithmetic-mean normalization.
fn nmi_histogram(x: &[usize], y: &[usize]) -> f64 {
    let n = x.len() as f64;
    let mut joint = std::collections::HashMap::<(usize, usize), f64>::new();
    let mut px = std::collections::HashMap::<usize, f64>::new();
    let mut py = std::collections::HashMap::<usize, f64>::new();
    for (&a, &b) in x.iter().zip(y) {
        *joint.entry((a, b)).or_insert(0.0) += 1.0 / n;
        *px.entry(a).or_insert(0.0) += 1.0 / n;
        *py.entry(b).or_insert(0.0) += 1.0 / n;
    }
    let hx: f64 = px.values().map(|p| -p * p.ln()).sum();
    let hy: f64 = py.values().map(|p| -p * p.ln()).sum();
    if hx <= 0.0 && hy <= 0.0 {
        return 1.0;
    }
    let mut mi = 0.0;
    for (&(a, b), &p) in &joint {
        mi += p * (p / (px[&a] * py[&b])).ln();
    }
    (mi / (0.5 * (hx + hy))).clamp(0.0, 1.0)
}

#[test]
fn ari_and_nmi_match_oracles_on_all_partition_pairs_up_to_six() {
    for n in 2..=6 {
        let parts = partitions(n);
        for x in &parts {
            for y in &parts {
                let reference_ari = ari_pair_counting(x, y);
                let reference_nmi = nmi_histogram(x, y);
                let got_ari = ari(x, y).unwrap();
                let got_nmi = nmi(x, y).unwrap();
                assert!(
                    (got_ari - reference_ari).abs() <= 1e-12,
                    "ARI mismatch on {x:?} vs {y:?}: {got_ari} vs {reference_ari}"
                );
                assert!(
                    (got_nmi - reference_nmi).abs() <= 1e-12,
                    "NMI mismatch on {x:?} vs {y:?}: {got_nmi} vs {reference_nmi}"
                );
            }
        }
    }
}

#[test]
fn partition_counts_are_bell_numbers() {
    assert_eq!(partitions(2).len(), 2);
    assert_eq!(partitions(3).len(), 5);
    assert_eq!(partitions(4).len(), 15);
    assert_eq!(partitions(5).len(), 52);
    assert_eq!(partitions(6).len(), 203);
}

#[test]
fn frozen_reference_values() {
    assert_eq!(ari(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap(), 1.0);
    assert!((ari(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap() - (-0.5)).abs() <= 1e-12);
    assert!(ari(&[0, 0, 1, 1], &[0, 0, 0, 0]).unwrap().abs() <= 1e-12);
    assert!((nmi(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap()).abs() <= 1e-12);
}

//! Exhaustive catalogue of small connected graphs, one representative per
//! isomorphism class. Scans and monotonicity sweeps run over this corpus;
//! the counts per order (1, 2, 6, 21, 112 for orders 2..=6) are a fixed
//! point any regression would move.

use std::collections::BTreeSet;

use chromadist_core::graph::Graph;

/// All vertex pairs of an n-vertex graph, lowest endpoint first.
fn vertex_pairs(n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            out.push((u, v));
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current: Vec<u32> = (0..n as u32).collect();
    heap_permute(&mut current, n, &mut out);
    out
}

fn heap_permute(current: &mut Vec<u32>, k: usize, out: &mut Vec<Vec<u32>>) {
    if k <= 1 {
        out.push(current.clone());
        return;
    }
    for i in 0..k {
        heap_permute(current, k - 1, out);
        if k.is_multiple_of(2) {
            current.swap(i, k - 1);
        } else {
            current.swap(0, k - 1);
        }
    }
}

/// True when every vertex is covered and the edge set is connected.
fn spans_and_connects(mask: u32, pairs: &[(u32, u32)], n: u32) -> bool {
    let mut adjacency = vec![Vec::new(); n as usize];
    for (i, &(u, v)) in pairs.iter().enumerate() {
        if mask & (1 << i) != 0 {
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
    }
    if adjacency.iter().any(Vec::is_empty) {
        return false;
    }
    let mut seen = vec![false; n as usize];
    let mut stack = vec![0u32];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &adjacency[v as usize] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}

/// Least edge mask over all relabellings: the isomorphism-class key.
fn canonical_mask(mask: u32, bit_maps: &[Vec<u32>]) -> u32 {
    let mut best = u32::MAX;
    for map in bit_maps {
        let mut relabelled = 0u32;
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros();
            relabelled |= 1 << map[i as usize];
            bits &= bits - 1;
        }
        best = best.min(relabelled);
    }
    best
}

/// Every connected graph on 2..=max_n vertices up to isomorphism, smaller
/// orders first, canonically relabelled. Order 1 has no edges and so no
/// colouring question; it is left out.
pub fn small_connected_corpus(max_n: u32) -> Vec<Graph> {
    assert!(
        (2..=6).contains(&max_n),
        "corpus enumeration is sized for orders 2..=6"
    );
    let mut out = Vec::new();
    for n in 2..=max_n {
        let pairs = vertex_pairs(n);
        let mut pair_index = vec![vec![0u32; n as usize]; n as usize];
        for (i, &(u, v)) in pairs.iter().enumerate() {
            pair_index[u as usize][v as usize] = i as u32;
            pair_index[v as usize][u as usize] = i as u32;
        }
        // Each permutation becomes a map from edge bit to edge bit.
        let bit_maps: Vec<Vec<u32>> = permutations(n as usize)
            .iter()
            .map(|perm| {
                pairs
                    .iter()
                    .map(|&(u, v)| {
                        let (a, b) = (perm[u as usize], perm[v as usize]);
                        pair_index[a as usize][b as usize]
                    })
                    .collect()
            })
            .collect();

        let mut classes = BTreeSet::new();
        for mask in 1u32..(1 << pairs.len()) {
            if spans_and_connects(mask, &pairs, n) {
                classes.insert(canonical_mask(mask, &bit_maps));
            }
        }
        for mask in classes {
            let edges: Vec<(u32, u32)> = pairs
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask & (1 << i) != 0)
                .map(|(_, &pair)| pair)
                .collect();
            out.push(
                Graph::from_edges_with_n(n, &edges)
                    .expect("masks over distinct pairs describe simple graphs"),
            );
        }
    }
    out
}

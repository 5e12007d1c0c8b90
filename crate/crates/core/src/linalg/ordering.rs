use std::collections::VecDeque;

/// Reverse Cuthill–McKee ordering of an undirected graph given as adjacency
/// lists. Returns `perm` with `perm[new] = old`. Each connected component is
/// started from a pseudo-peripheral vertex; ties break on vertex index, so
/// the result is deterministic.
pub fn reverse_cuthill_mckee(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let n = adjacency.len();
    let degree: Vec<usize> = adjacency.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut seeds: Vec<usize> = (0..n).collect();
    seeds.sort_by_key(|&v| (degree[v], v));
    for &seed in &seeds {
        if visited[seed] {
            continue;
        }
        let root = pseudo_peripheral(adjacency, seed);
        let mut queue = VecDeque::from([root]);
        visited[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adjacency[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            next.dedup();
            for w in next {
                if !visited[w] {
                    visited[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(adjacency: &[Vec<usize>], root: usize) -> (usize, Vec<usize>) {
    let mut level = vec![usize::MAX; adjacency.len()];
    level[root] = 0;
    let mut queue = VecDeque::from([root]);
    let mut last_level = vec![root];
    let mut depth = 0;
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v] {
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                if level[w] > depth {
                    depth = level[w];
                    last_level.clear();
                }
                if level[w] == depth {
                    last_level.push(w);
                }
                queue.push_back(w);
            }
        }
    }
    (depth, last_level)
}

fn pseudo_peripheral(adjacency: &[Vec<usize>], start: usize) -> usize {
    let mut root = start;
    let (mut depth, mut frontier) = bfs_levels(adjacency, root);
    for _ in 0..8 {
        let candidate = *frontier
            .iter()
            .min_by_key(|&&v| (adjacency[v].len(), v))
            .expect("frontier contains at least the root");
        let (d, f) = bfs_levels(adjacency, candidate);
        if d <= depth {
            break;
        }
        root = candidate;
        depth = d;
        frontier = f;
    }
    root
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph_bandwidth_is_one() {
        // Path 0-3-1-4-2 labelled out of order.
        let edges = [(0, 3), (3, 1), (1, 4), (4, 2)];
        let mut adj = vec![Vec::new(); 5];
        for (a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let perm = reverse_cuthill_mckee(&adj);
        let mut inv = [0; 5];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        for (a, b) in edges {
            assert_eq!((inv[a] as isize - inv[b] as isize).abs(), 1);
        }
    }

    #[test]
    fn covers_disconnected_components() {
        let adj = vec![vec![1], vec![0], vec![], vec![4], vec![3]];
        let mut perm = reverse_cuthill_mckee(&adj);
        perm.sort();
        assert_eq!(perm, vec![0, 1, 2, 3, 4]);
    }
}

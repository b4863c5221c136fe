//! Seeded instance generation.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Instance, Lightpath, Link, Network, Request};
use crate::rng;

/// Random connected topology where every edge is a pair of opposite links.
///
/// `edges_per_node` is the number of undirected edges divided by the node
/// count, so the result has `2 * round(edges_per_node * node_count)` links.
/// A random spanning tree guarantees strong connectivity; the remaining edges
/// are drawn uniformly from the unused node pairs. No parallel links are
/// produced.
pub fn synth_topology(node_count: usize, edges_per_node: f64, seed: u64) -> Result<Network> {
    let edges = (edges_per_node * node_count as f64).round();
    let max_edges = node_count * node_count.saturating_sub(1) / 2;
    if !edges.is_finite() || edges < 0.0 || node_count < 2 || (edges as usize) < node_count - 1 || edges as usize > max_edges {
        return Err(Error::InfeasibleDensity { nodes: node_count, links: 2 * edges.max(0.0) as usize });
    }
    let edges = edges as usize;
    let mut rng = rng::stream(seed, rng::TOPOLOGY, 0);

    let mut order: Vec<usize> = (0..node_count).collect();
    order.shuffle(&mut rng);
    let mut chosen = BTreeSet::new();
    let mut list = Vec::with_capacity(edges);
    for i in 1..node_count {
        let (u, v) = (order[i], order[rng.gen_range(0..i)]);
        chosen.insert((u.min(v), u.max(v)));
        list.push((u, v));
    }
    let mut spare: Vec<(usize, usize)> = (0..node_count)
        .flat_map(|u| (u + 1..node_count).map(move |v| (u, v)))
        .filter(|pair| !chosen.contains(pair))
        .collect();
    spare.shuffle(&mut rng);
    list.extend(spare.into_iter().take(edges - list.len()));

    let links = list.iter().flat_map(|&(u, v)| [Link { tail: u, head: v }, Link { tail: v, head: u }]).collect();
    Network::new(node_count, links)
}

/// Fewest-link path from `from` to `to` avoiding the given links and nodes.
/// Ties resolve towards lower link ids, explored breadth first.
fn shortest_path(
    network: &Network,
    out_links: &[Vec<usize>],
    from: usize,
    to: usize,
    banned_links: &BTreeSet<usize>,
    banned_nodes: &[bool],
) -> Option<Vec<usize>> {
    let mut parent: Vec<Option<usize>> = vec![None; network.node_count()];
    let mut seen = vec![false; network.node_count()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(node) = queue.pop_front() {
        if node == to {
            break;
        }
        for &link in &out_links[node] {
            let head = network.link(link).head;
            if seen[head] || banned_nodes[head] || banned_links.contains(&link) {
                continue;
            }
            seen[head] = true;
            parent[head] = Some(link);
            queue.push_back(head);
        }
    }
    if !seen[to] {
        return None;
    }
    let mut path = Vec::new();
    let mut at = to;
    while at != from {
        let link = parent[at].expect("reached nodes have parents");
        path.push(link);
        at = network.link(link).tail;
    }
    path.reverse();
    Some(path)
}

/// Up to `k` loop-free paths from `source` to `target` in order of increasing
/// link count, ties broken by link-id sequence. Parallel links yield distinct paths.
pub fn k_shortest_paths(network: &Network, source: usize, target: usize, k: usize) -> Vec<Vec<usize>> {
    let out_links = network.out_links();
    let no_nodes = vec![false; network.node_count()];
    let Some(first) = shortest_path(network, &out_links, source, target, &BTreeSet::new(), &no_nodes) else {
        return Vec::new();
    };
    let mut accepted = vec![first];
    let mut candidates: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    while accepted.len() < k {
        let previous = accepted.last().expect("non-empty").clone();
        let mut nodes = vec![source];
        nodes.extend(previous.iter().map(|&l| network.link(l).head));
        for spur in 0..previous.len() {
            let root = &previous[..spur];
            let banned_links: BTreeSet<usize> =
                accepted.iter().filter(|p| p.len() > spur && &p[..spur] == root).map(|p| p[spur]).collect();
            let mut banned_nodes = vec![false; network.node_count()];
            for &node in &nodes[..spur] {
                banned_nodes[node] = true;
            }
            if let Some(tail) = shortest_path(network, &out_links, nodes[spur], target, &banned_links, &banned_nodes) {
                let mut path = root.to_vec();
                path.extend(tail);
                if !accepted.contains(&path) {
                    candidates.insert((path.len(), path));
                }
            }
        }
        match candidates.pop_first() {
            Some((_, path)) => accepted.push(path),
            None => break,
        }
    }
    accepted
}

/// An instance plus the requests whose path pool was smaller than requested.
#[derive(Clone, Debug)]
pub struct Generated {
    pub instance: Instance,
    pub short_pools: Vec<usize>,
}

/// Random requests on `topology`.
///
/// Distinct ordered node pairs are drawn without replacement, skipping pairs
/// with no path. For each request the `4 * paths_per_kind` shortest simple
/// paths form a pool from which `paths_per_kind` working and, independently,
/// `paths_per_kind` protection paths are sampled. Each sampled path becomes
/// one lightpath per wavelength.
pub fn generate(
    topology: &Network,
    wavelengths: usize,
    request_count: usize,
    paths_per_kind: usize,
    seed: u64,
) -> Result<Generated> {
    if wavelengths == 0 || paths_per_kind == 0 {
        return Err(Error::InvalidConfig("wavelengths and paths per kind must be positive".into()));
    }
    let n = topology.node_count();
    let mut rng = rng::stream(seed, rng::GENERATE, 0);
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|s| (0..n).filter(move |&t| t != s).map(move |t| (s, t))).collect();
    pairs.shuffle(&mut rng);

    let mut requests = Vec::with_capacity(request_count);
    let mut short_pools = Vec::new();
    let mut routable = 0;
    for (source, destination) in pairs {
        if requests.len() == request_count {
            break;
        }
        let pool = k_shortest_paths(topology, source, destination, 4 * paths_per_kind);
        if pool.is_empty() {
            continue;
        }
        routable += 1;
        if pool.len() < paths_per_kind {
            short_pools.push(requests.len());
        }
        let take = paths_per_kind.min(pool.len());
        let lightpaths = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Lightpath> {
            index::sample(rng, pool.len(), take)
                .into_iter()
                .flat_map(|i| (0..wavelengths).map(move |wl| (i, wl)))
                .map(|(i, wl)| Lightpath::new(pool[i].clone(), wl))
                .collect()
        };
        let working = lightpaths(&mut rng);
        let protection = lightpaths(&mut rng);
        requests.push(Request { source, destination, working, protection });
    }
    if requests.len() < request_count {
        return Err(Error::NotEnoughPairs { wanted: request_count, found: routable });
    }
    let instance = Instance::new(topology.clone(), wavelengths, requests)?;
    Ok(Generated { instance, short_pools })
}

/// Bounds for [`random_small_instance`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmallInstanceParams {
    pub max_vars: usize,
    pub max_requests: usize,
    pub max_nodes: usize,
    pub max_wavelengths: usize,
}

impl Default for SmallInstanceParams {
    fn default() -> Self {
        Self { max_vars: 14, max_requests: 4, max_nodes: 6, max_wavelengths: 2 }
    }
}

/// A small, densely conflicting instance for exhaustive checks.
///
/// Requests pick arbitrary subsets of the lightpaths on their short paths, so
/// overlapping working/protection choices, repeated paths on several
/// wavelengths and requests with an empty side all occur.
pub fn random_small_instance(params: &SmallInstanceParams, seed: u64) -> Instance {
    let mut rng = rng::stream(seed, rng::SMALL_INSTANCE, 0);
    let nodes = rng.gen_range(3..=params.max_nodes.max(3));
    let max_edges = nodes * (nodes - 1) / 2;
    let edges = rng.gen_range(nodes - 1..=max_edges);
    let topology = synth_topology(nodes, edges as f64 / nodes as f64, rng.gen()).expect("edge count within range");
    let wavelengths = rng.gen_range(1..=params.max_wavelengths.max(1));

    let mut pairs: Vec<(usize, usize)> =
        (0..nodes).flat_map(|s| (0..nodes).filter(move |&t| t != s).map(move |t| (s, t))).collect();
    pairs.shuffle(&mut rng);
    let request_count = rng.gen_range(1..=params.max_requests.max(1));
    let mut budget = params.max_vars;
    let mut requests = Vec::new();
    for &(source, destination) in pairs.iter().take(request_count) {
        let pool = k_shortest_paths(&topology, source, destination, 4);
        let all: Vec<Lightpath> =
            pool.iter().flat_map(|p| (0..wavelengths).map(move |wl| Lightpath::new(p.clone(), wl))).collect();
        let pick = |rng: &mut rand_chacha::ChaCha8Rng, budget: &mut usize| -> Vec<Lightpath> {
            let wanted = if rng.gen_bool(0.1) { 0 } else { rng.gen_range(1..=3) };
            let count = wanted.min(all.len()).min(*budget);
            *budget -= count;
            index::sample(rng, all.len(), count).into_iter().map(|i| all[i].clone()).collect()
        };
        let working = pick(&mut rng, &mut budget);
        let protection = pick(&mut rng, &mut budget);
        requests.push(Request { source, destination, working, protection });
    }
    Instance::new(topology, wavelengths, requests).expect("generated lightpaths follow the topology")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reachable_from(network: &Network, start: usize) -> Vec<bool> {
        let mut seen = vec![false; network.node_count()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            for l in network.links() {
                if l.tail == u && !seen[l.head] {
                    seen[l.head] = true;
                    stack.push(l.head);
                }
            }
        }
        seen
    }

    #[test]
    fn eon_shape() {
        let net = synth_topology(19, 2.05, 7).unwrap();
        assert_eq!(net.link_count(), 78);
        assert_eq!(net.node_count(), 19);
    }

    #[test]
    fn two_node_cycle() {
        let net = synth_topology(2, 0.5, 0).unwrap();
        let mut links: Vec<_> = net.links().iter().map(|l| (l.tail, l.head)).collect();
        links.sort_unstable();
        assert_eq!(links, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn infeasible_density() {
        assert!(matches!(synth_topology(4, 0.25, 0), Err(Error::InfeasibleDensity { .. })));
        assert!(matches!(synth_topology(4, 2.0, 0), Err(Error::InfeasibleDensity { .. })));
    }

    #[test]
    fn strongly_connected_and_symmetric() {
        for seed in 0..50 {
            let nodes = 3 + (seed as usize % 15);
            let net = synth_topology(nodes, 1.0, seed).unwrap();
            for start in 0..nodes {
                assert!(reachable_from(&net, start).iter().all(|&r| r), "seed {seed}");
            }
            let set: BTreeSet<_> = net.links().iter().map(|l| (l.tail, l.head)).collect();
            assert!(set.iter().all(|&(u, v)| set.contains(&(v, u))));
            assert_eq!(set.len(), net.link_count());
        }
    }

    #[test]
    fn table_scale_variable_counts() {
        let net = synth_topology(19, 2.05, 1).unwrap();
        let g = generate(&net, 5, 60, 4, 3).unwrap();
        assert!(g.short_pools.is_empty());
        assert_eq!(g.instance.var_count(), 2400);
        let g = generate(&net, 15, 100, 2, 3).unwrap();
        assert_eq!(g.instance.var_count(), 6000);
    }

    #[test]
    fn single_link_topology() {
        let net = synth_topology(2, 0.5, 0).unwrap();
        let g = generate(&net, 3, 1, 1, 0).unwrap();
        let r = &g.instance.requests()[0];
        assert_eq!(r.working.len(), 3);
        assert_eq!(r.protection.len(), 3);
        assert!(g.short_pools.is_empty());
    }

    #[test]
    fn short_pool_is_flagged() {
        let net = synth_topology(2, 0.5, 0).unwrap();
        let g = generate(&net, 1, 1, 2, 0).unwrap();
        assert_eq!(g.short_pools, vec![0]);
        assert_eq!(g.instance.requests()[0].working.len(), 1);
    }

    #[test]
    fn too_many_requests() {
        let net = synth_topology(2, 0.5, 0).unwrap();
        assert!(matches!(generate(&net, 1, 3, 1, 0), Err(Error::NotEnoughPairs { wanted: 3, found: 2 })));
    }

    #[test]
    fn generation_is_deterministic() {
        let net = synth_topology(10, 1.5, 4).unwrap();
        assert_eq!(net, synth_topology(10, 1.5, 4).unwrap());
        let a = generate(&net, 3, 12, 2, 9).unwrap().instance;
        let b = generate(&net, 3, 12, 2, 9).unwrap().instance;
        assert_eq!(a.to_json_string(), b.to_json_string());
        assert_ne!(a.to_json_string(), generate(&net, 3, 12, 2, 10).unwrap().instance.to_json_string());
    }

    #[test]
    fn k_shortest_on_square() {
        // 0 -> 1 -> 3, 0 -> 2 -> 3, plus a direct 0 -> 3 link.
        let links = [(0, 1), (1, 3), (0, 2), (2, 3), (0, 3)].map(|(tail, head)| Link { tail, head }).to_vec();
        let net = Network::new(4, links).unwrap();
        let paths = k_shortest_paths(&net, 0, 3, 5);
        assert_eq!(paths, vec![vec![4], vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn k_shortest_parallel_links() {
        let links = [(0, 1), (0, 1), (1, 2)].map(|(tail, head)| Link { tail, head }).to_vec();
        let net = Network::new(3, links).unwrap();
        assert_eq!(k_shortest_paths(&net, 0, 2, 4), vec![vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn k_shortest_paths_are_simple_and_sorted() {
        let net = synth_topology(9, 2.0, 11).unwrap();
        let paths = k_shortest_paths(&net, 0, 5, 12);
        assert_eq!(paths.len(), 12);
        for w in paths.windows(2) {
            assert!(w[0].len() <= w[1].len());
        }
        for p in &paths {
            let mut nodes = vec![0];
            nodes.extend(p.iter().map(|&l| net.link(l).head));
            let distinct: BTreeSet<_> = nodes.iter().collect();
            assert_eq!(distinct.len(), nodes.len());
        }
        let distinct: BTreeSet<_> = paths.iter().collect();
        assert_eq!(distinct.len(), paths.len());
    }

    #[test]
    fn small_instances_respect_bounds() {
        for seed in 0..200 {
            let inst = random_small_instance(&SmallInstanceParams::default(), seed);
            assert!(inst.var_count() <= 14);
            assert!(inst.request_count() >= 1);
        }
    }
}

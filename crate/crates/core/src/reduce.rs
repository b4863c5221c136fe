//! Builds a problem instance from an undirected graph so that the largest
//! number of simultaneously grantable requests equals the size of the
//! graph's maximum stable set.
//!
//! Every graph node becomes a request with one two-link working and one
//! two-link protection lightpath, all on wavelength 0 and initially disjoint.
//! Each graph edge `{u, v}` produces four conflicting lightpath pairs: both
//! working/protection cross pairs, the working pair and the protection pair.
//! For each pair, in ascending variable order, the smaller variable is the
//! host: its last link `x -> t` is replaced by `x -> n -> t` for a fresh node
//! `n`, and the other lightpath is rerouted from its penultimate node `y`
//! through `y -> x -> n -> m -> t'` with another fresh node `m`. The two
//! lightpaths then share exactly the link `x -> n`.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::conflicts::{build_conflict_sets, build_strong_groups};
use crate::error::{Error, Result};
use crate::instance::{Instance, Lightpath, Link, Network, Request};
use crate::oracle::branch_and_bound;
use crate::report::SolveReport;
use crate::weights::Weights;

/// Simple undirected graph. Edges are stored as `(low, high)`, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MssGraph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    nodes: usize,
    edges: Vec<[usize; 2]>,
}

impl MssGraph {
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) references a missing node")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on node {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Self { node_count, edges: seen.into_iter().collect() })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        Self::new(file.nodes, file.edges.into_iter().map(|[u, v]| (u, v)))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> String {
        let file = GraphFile { nodes: self.node_count, edges: self.edges.iter().map(|&(u, v)| [u, v]).collect() };
        serde_json::to_string_pretty(&file).expect("graph serializes")
    }

    /// Conflicting variable pairs produced for each edge, in processing order.
    /// Variable `2u` is the working and `2u + 1` the protection lightpath of request `u`.
    pub fn conflict_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::with_capacity(4 * self.edges.len());
        for &(u, v) in &self.edges {
            let (wu, pu, wv, pv) = (2 * u, 2 * u + 1, 2 * v, 2 * v + 1);
            for (a, b) in [(wu, pv), (wv, pu), (wu, wv), (pu, pv)] {
                pairs.push((a.min(b), a.max(b)));
            }
        }
        pairs.sort_unstable();
        pairs
    }
}

/// Node sequences of every lightpath plus creation order of every link.
struct Routes {
    paths: Vec<Vec<usize>>,
    next_node: usize,
    link_order: HashMap<(usize, usize), usize>,
}

impl Routes {
    fn fresh_node(&mut self) -> usize {
        self.next_node += 1;
        self.next_node - 1
    }

    fn register(&mut self, var: usize) {
        for w in self.paths[var].windows(2) {
            let next = self.link_order.len();
            self.link_order.entry((w[0], w[1])).or_insert(next);
        }
    }

    fn share(&mut self, host: usize, guest: usize) {
        let host_len = self.paths[host].len();
        let junction = self.paths[host][host_len - 2];
        let host_end = self.paths[host][host_len - 1];
        let shared_head = self.fresh_node();
        self.paths[host].insert(host_len - 1, shared_head);
        debug_assert_eq!(self.paths[host].last(), Some(&host_end));

        let guest_end = self.paths[guest].pop().expect("guest has a destination");
        let detour = self.fresh_node();
        self.paths[guest].extend([junction, shared_head, detour, guest_end]);
        self.register(host);
        self.register(guest);
    }
}

/// Builds the reduced instance. Request `u` corresponds to graph node `u`.
pub fn mss_to_rwap(graph: &MssGraph) -> Instance {
    let n = graph.node_count();
    let mut routes = Routes { paths: Vec::with_capacity(2 * n), next_node: 4 * n, link_order: HashMap::new() };
    for u in 0..n {
        let (source, destination, via_working, via_protection) = (4 * u, 4 * u + 1, 4 * u + 2, 4 * u + 3);
        routes.paths.push(vec![source, via_working, destination]);
        routes.paths.push(vec![source, via_protection, destination]);
    }
    for var in 0..2 * n {
        routes.register(var);
    }
    for (host, guest) in graph.conflict_pairs() {
        routes.share(host, guest);
    }

    let used: BTreeSet<(usize, usize)> =
        routes.paths.iter().flat_map(|p| p.windows(2).map(|w| (w[0], w[1]))).collect();
    let mut links: Vec<(usize, usize)> = used.into_iter().collect();
    links.sort_by_key(|pair| routes.link_order[pair]);
    let link_id: HashMap<(usize, usize), usize> = links.iter().enumerate().map(|(id, &pair)| (pair, id)).collect();
    let lightpath = |nodes: &[usize]| Lightpath::new(nodes.windows(2).map(|w| link_id[&(w[0], w[1])]).collect(), 0);

    let requests = (0..n)
        .map(|u| Request {
            source: 4 * u,
            destination: 4 * u + 1,
            working: vec![lightpath(&routes.paths[2 * u])],
            protection: vec![lightpath(&routes.paths[2 * u + 1])],
        })
        .collect();
    let network = Network::new(routes.next_node, links.into_iter().map(|(tail, head)| Link { tail, head }).collect())
        .expect("reduction creates no self-loops");
    Instance::new(network, 1, requests).expect("reduction routes are contiguous")
}

/// Maximises the number of granted requests alone (`alpha = 0`, `beta = 1`)
/// with the exact branch-and-bound.
pub fn max_requests_only(instance: &Instance) -> Result<SolveReport> {
    branch_and_bound(instance, &build_strong_groups(instance), &Weights::explicit(0, 1), None)
}

/// Conflicting pairs of the reduced instance, recomputed from its lightpaths.
pub fn reduced_conflict_pairs(instance: &Instance) -> BTreeSet<(usize, usize)> {
    build_conflict_sets(instance).pair_set(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conflicts::{C2Tuple, SameKindTuple};
    use crate::instance::Kind;

    fn path_graph() -> MssGraph {
        MssGraph::new(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn path_graph_conflict_sets() {
        let inst = mss_to_rwap(&path_graph());
        assert_eq!(inst.request_count(), 3);
        let sets = build_conflict_sets(&inst);
        assert!(sets.c1.is_empty());
        let c2 = |request, other| C2Tuple { request, other, working: 0, protection: 0 };
        assert_eq!(sets.c2, vec![c2(0, 1), c2(1, 0), c2(1, 2), c2(2, 1)]);
        let same = |first, second| SameKindTuple { first, second, index_first: 0, index_second: 0 };
        assert_eq!(sets.c3, vec![same(0, 1), same(1, 2)]);
        assert_eq!(sets.c4, vec![same(0, 1), same(1, 2)]);
    }

    #[test]
    fn every_conflict_pair_shares_one_link() {
        let graph = MssGraph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)]).unwrap();
        let inst = mss_to_rwap(&graph);
        for (a, b) in graph.conflict_pairs() {
            let la = inst.sorted_links(a);
            let shared = inst.sorted_links(b).iter().filter(|l| la.binary_search(l).is_ok()).count();
            assert_eq!(shared, 1, "pair ({a}, {b})");
        }
        assert_eq!(reduced_conflict_pairs(&inst), graph.conflict_pairs().into_iter().collect());
        for v in 0..inst.var_count() {
            assert_eq!(inst.lightpath(v).wavelength, 0);
        }
    }

    #[test]
    fn first_rewire_matches_walkthrough() {
        // Host w0 = s0 u0 t0 gains a node; guest w1 detours through it.
        let graph = MssGraph::new(2, [(0, 1)]).unwrap();
        let inst = mss_to_rwap(&graph);
        let nodes = |var: usize| {
            let links = &inst.lightpath(var).links;
            let mut seq = vec![inst.network().link(links[0]).tail];
            seq.extend(links.iter().map(|&l| inst.network().link(l).head));
            seq
        };
        let w0 = inst.var_index(0, Kind::Working, 0).unwrap();
        let w1 = inst.var_index(1, Kind::Working, 0).unwrap();
        let host = nodes(w0);
        assert_eq!(host.first(), Some(&0));
        assert_eq!(host.last(), Some(&1));
        let guest = nodes(w1);
        assert_eq!(guest.first(), Some(&4));
        assert_eq!(guest.last(), Some(&5));
        assert_eq!(guest[2], 2, "guest enters the host at its original middle node");
    }

    #[test]
    fn edgeless_graph_grants_everything() {
        let inst = mss_to_rwap(&MssGraph::new(4, []).unwrap());
        assert_eq!(max_requests_only(&inst).unwrap().granted.len(), 4);
    }

    #[test]
    fn path_graph_grants_two() {
        let report = max_requests_only(&mss_to_rwap(&path_graph())).unwrap();
        assert_eq!(report.granted, vec![0, 2]);
    }

    #[test]
    fn complete_graph_grants_one() {
        let k4 = MssGraph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(max_requests_only(&mss_to_rwap(&k4)).unwrap().granted.len(), 1);
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(MssGraph::new(2, [(0, 0)]).is_err());
        assert!(MssGraph::new(2, [(0, 1), (1, 0)]).is_err());
        assert!(MssGraph::new(2, [(0, 2)]).is_err());
    }

    #[test]
    fn graph_json_round_trip() {
        let g = path_graph();
        assert_eq!(MssGraph::from_json_str(&g.to_json_string()).unwrap(), g);
    }
}

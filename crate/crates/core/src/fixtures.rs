//! Small hand-built instances shared by tests, examples and the CLI.

use crate::instance::{Instance, Kind, Lightpath, Link, Network, Request, Solution};

const S1: usize = 0;
const S2: usize = 1;
const A: usize = 2;
const B: usize = 3;
const C: usize = 4;
const T1: usize = 5;
const T2: usize = 6;

const RED: usize = 0;
const GREEN: usize = 1;

/// Two requests on a seven-node network with two wavelengths.
///
/// Request 0 runs from `s1` to `t1` with three working lightpaths and one
/// protection lightpath; request 1 runs from `s2` to `t2` with one working and
/// two protection lightpaths. Every undirected edge is a pair of opposite links.
/// The conflict sets are exactly `C1 = {(0,1,0)}`, `C3 = {(0,1,2,0)}`,
/// `C4 = {(0,1,0,1)}` and `C2 = {}`; the optimum grants both requests with
/// four links each.
pub fn figure_one() -> Instance {
    let edges = [
        (S1, A),
        (S1, C),
        (S1, S2),
        (A, C),
        (A, T1),
        (S2, B),
        (S2, C),
        (C, T1),
        (C, T2),
        (T1, T2),
        (B, T2),
        (C, B),
    ];
    let mut links = Vec::new();
    for &(u, v) in &edges {
        links.push(Link { tail: u, head: v });
        links.push(Link { tail: v, head: u });
    }
    let network = Network::new(7, links).expect("figure network is valid");
    let path = |nodes: &[usize], wavelength: usize| {
        let ids = nodes
            .windows(2)
            .map(|w| {
                network
                    .links()
                    .iter()
                    .position(|l| l.tail == w[0] && l.head == w[1])
                    .expect("edge exists")
            })
            .collect();
        Lightpath::new(ids, wavelength)
    };
    let requests = vec![
        Request {
            source: S1,
            destination: T1,
            working: vec![
                path(&[S1, A, T1], RED),
                path(&[S1, A, C, T1], GREEN),
                path(&[S1, S2, B, T2, T1], RED),
            ],
            protection: vec![path(&[S1, C, T1], GREEN)],
        },
        Request {
            source: S2,
            destination: T2,
            working: vec![path(&[S2, B, T2], RED)],
            protection: vec![path(&[S2, C, T2], RED), path(&[S2, S1, C, T2], GREEN)],
        },
    ];
    Instance::new(network.clone(), 2, requests).expect("figure instance is valid")
}

/// The optimal solution of [`figure_one`]: both requests on their first
/// working and first protection lightpath.
pub fn figure_one_solution(instance: &Instance) -> Solution {
    let mut sol = Solution::zeros(instance.var_count());
    for r in 0..2 {
        sol.set(instance.var_index(r, Kind::Working, 0).unwrap(), true);
        sol.set(instance.var_index(r, Kind::Protection, 0).unwrap(), true);
    }
    sol
}

/// `count` requests on separate node pairs, each with one working and one
/// protection lightpath of the given lengths. Nothing conflicts.
pub fn independent_requests(count: usize, working_len: usize, protection_len: usize) -> Instance {
    let mut links = Vec::new();
    let mut requests = Vec::new();
    let mut next_node = 0;
    for _ in 0..count {
        let source = next_node;
        let destination = next_node + 1;
        next_node += 2;
        let mut route = |len: usize, next_node: &mut usize| {
            let mut ids = Vec::new();
            let mut at = source;
            for step in 0..len {
                let to = if step + 1 == len {
                    destination
                } else {
                    *next_node += 1;
                    *next_node - 1
                };
                ids.push(links.len());
                links.push(Link { tail: at, head: to });
                at = to;
            }
            ids
        };
        let working = route(working_len, &mut next_node);
        let protection = route(protection_len, &mut next_node);
        requests.push(Request {
            source,
            destination,
            working: vec![Lightpath::new(working, 0)],
            protection: vec![Lightpath::new(protection, 0)],
        });
    }
    let network = Network::new(next_node, links).expect("independent network is valid");
    Instance::new(network, 1, requests).expect("independent instance is valid")
}

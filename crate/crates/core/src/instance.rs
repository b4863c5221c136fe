//! Networks, requests, lightpaths and binary solutions.
//!
//! An [`Instance`] owns a directed multigraph, a wavelength count and a list
//! of requests. Every working and protection lightpath of every request is one
//! binary decision variable. Variables are numbered request by request, with
//! the working block before the protection block and lightpaths in their
//! local order inside each block.

use std::fmt;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::conflicts::ConflictSets;
use crate::error::{Error, Result};

/// A directed link between two nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Link {
    pub tail: usize,
    pub head: usize,
}

/// Directed multigraph with dense node and link ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    node_count: usize,
    links: Vec<Link>,
}

impl Network {
    pub fn new(node_count: usize, links: Vec<Link>) -> Result<Self> {
        for (id, link) in links.iter().enumerate() {
            if link.tail >= node_count || link.head >= node_count {
                return Err(Error::InvalidInstance(format!(
                    "link {id} ({} -> {}) references a node outside 0..{node_count}",
                    link.tail, link.head
                )));
            }
            if link.tail == link.head {
                return Err(Error::InvalidInstance(format!("link {id} is a self-loop on node {}", link.tail)));
            }
        }
        Ok(Self { node_count, links })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: usize) -> Link {
        self.links[id]
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// Outgoing link ids per node, in link-id order.
    /// Reads `{nodes, links: [[tail, head], ...]}`. Other keys are ignored,
    /// so an instance file also works as a topology file.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: TopologyFile = serde_json::from_str(text)?;
        Self::new(file.nodes, file.links.into_iter().map(|[tail, head]| Link { tail, head }).collect())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> String {
        let file = TopologyFile { nodes: self.node_count, links: self.links.iter().map(|l| [l.tail, l.head]).collect() };
        serde_json::to_string_pretty(&file).expect("topology serializes")
    }

    pub fn out_links(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.node_count];
        for (id, link) in self.links.iter().enumerate() {
            out[link.tail].push(id);
        }
        out
    }
}

/// A path through the network on a fixed wavelength.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lightpath {
    pub links: Vec<usize>,
    pub wavelength: usize,
}

impl Lightpath {
    pub fn new(links: Vec<usize>, wavelength: usize) -> Self {
        Self { links, wavelength }
    }

    /// Number of links on the path.
    pub fn length(&self) -> i64 {
        self.links.len() as i64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Working,
    Protection,
}

/// Location of a variable inside the request list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarRef {
    pub request: usize,
    pub kind: Kind,
    pub index: usize,
}

/// A connection request. Its id is its position in the instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Request {
    pub source: usize,
    pub destination: usize,
    pub working: Vec<Lightpath>,
    pub protection: Vec<Lightpath>,
}

impl Request {
    /// A request can only be granted when it has at least one lightpath of each kind.
    pub fn is_grantable(&self) -> bool {
        !self.working.is_empty() && !self.protection.is_empty()
    }

    pub fn lightpaths(&self, kind: Kind) -> &[Lightpath] {
        match kind {
            Kind::Working => &self.working,
            Kind::Protection => &self.protection,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    network: Network,
    wavelength_count: usize,
    requests: Vec<Request>,
    vars: Vec<VarRef>,
    offsets: Vec<usize>,
    lengths: Vec<i64>,
    sorted_links: Vec<Vec<usize>>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.network == other.network
            && self.wavelength_count == other.wavelength_count
            && self.requests == other.requests
    }
}

impl Eq for Instance {}

impl Instance {
    /// Validates the requests against the network and builds the variable index.
    pub fn new(network: Network, wavelength_count: usize, requests: Vec<Request>) -> Result<Self> {
        for (r, request) in requests.iter().enumerate() {
            for node in [request.source, request.destination] {
                if node >= network.node_count() {
                    return Err(Error::InvalidInstance(format!("request {r} endpoint {node} is not a node")));
                }
            }
            if request.source == request.destination {
                return Err(Error::InvalidInstance(format!("request {r} has identical source and destination")));
            }
            for kind in [Kind::Working, Kind::Protection] {
                for (i, path) in request.lightpaths(kind).iter().enumerate() {
                    check_lightpath(&network, wavelength_count, request, path)
                        .map_err(|msg| Error::InvalidInstance(format!("request {r} {kind} lightpath {i}: {msg}")))?;
                }
            }
        }

        let mut vars = Vec::new();
        let mut offsets = Vec::with_capacity(requests.len() + 1);
        for (r, request) in requests.iter().enumerate() {
            offsets.push(vars.len());
            for kind in [Kind::Working, Kind::Protection] {
                for index in 0..request.lightpaths(kind).len() {
                    vars.push(VarRef { request: r, kind, index });
                }
            }
        }
        offsets.push(vars.len());

        let lengths = vars
            .iter()
            .map(|v| requests[v.request].lightpaths(v.kind)[v.index].length())
            .collect();
        let sorted_links = vars
            .iter()
            .map(|v| {
                let mut links = requests[v.request].lightpaths(v.kind)[v.index].links.clone();
                links.sort_unstable();
                links
            })
            .collect();

        Ok(Self { network, wavelength_count, requests, vars, offsets, lengths, sorted_links })
    }

    /// An instance with no nodes, links or requests.
    pub fn empty() -> Self {
        Self::new(Network::new(0, Vec::new()).expect("empty network is valid"), 0, Vec::new())
            .expect("empty instance is valid")
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn wavelength_count(&self) -> usize {
        self.wavelength_count
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn request_count(&self) -> usize {
        self.requests.len()
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn var(&self, var: usize) -> VarRef {
        self.vars[var]
    }

    pub fn vars(&self) -> &[VarRef] {
        &self.vars
    }

    pub fn var_index(&self, request: usize, kind: Kind, index: usize) -> Option<usize> {
        let req = self.requests.get(request)?;
        if index >= req.lightpaths(kind).len() {
            return None;
        }
        Some(match kind {
            Kind::Working => self.offsets[request] + index,
            Kind::Protection => self.offsets[request] + req.working.len() + index,
        })
    }

    /// Variable indices of the working lightpaths of `request`.
    pub fn working_vars(&self, request: usize) -> Range<usize> {
        let start = self.offsets[request];
        start..start + self.requests[request].working.len()
    }

    /// Variable indices of the protection lightpaths of `request`.
    pub fn protection_vars(&self, request: usize) -> Range<usize> {
        let start = self.offsets[request] + self.requests[request].working.len();
        start..self.offsets[request + 1]
    }

    pub fn lightpath(&self, var: usize) -> &Lightpath {
        let v = self.vars[var];
        &self.requests[v.request].lightpaths(v.kind)[v.index]
    }

    pub fn length(&self, var: usize) -> i64 {
        self.lengths[var]
    }

    /// Link ids of the lightpath behind `var`, sorted ascending.
    pub fn sorted_links(&self, var: usize) -> &[usize] {
        &self.sorted_links[var]
    }

    /// Stable variable name, `x_r<request>_w<index>` or `y_r<request>_p<index>`.
    pub fn var_name(&self, var: usize) -> String {
        let v = self.vars[var];
        match v.kind {
            Kind::Working => format!("x_r{}_w{}", v.request, v.index),
            Kind::Protection => format!("y_r{}_p{}", v.request, v.index),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        file.into_instance()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&InstanceFile::from_instance(self)).expect("instance serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::io::write_atomic(path, self.to_json_string().as_bytes())
    }

    fn check_len(&self, solution: &Solution) -> Result<()> {
        if solution.len() != self.var_count() {
            return Err(Error::Dimension { expected: self.var_count(), got: solution.len() });
        }
        Ok(())
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Working => "working",
            Kind::Protection => "protection",
        })
    }
}

fn check_lightpath(
    network: &Network,
    wavelength_count: usize,
    request: &Request,
    path: &Lightpath,
) -> std::result::Result<(), String> {
    if path.links.is_empty() {
        return Err("empty link list".into());
    }
    if path.wavelength >= wavelength_count {
        return Err(format!("wavelength {} outside 0..{wavelength_count}", path.wavelength));
    }
    let mut at = request.source;
    for &id in &path.links {
        let link = network.links().get(id).ok_or_else(|| format!("unknown link {id}"))?;
        if link.tail != at {
            return Err(format!("link {id} starts at {} but the path is at node {at}", link.tail));
        }
        at = link.head;
    }
    if at != request.destination {
        return Err(format!("path ends at node {at}, not at destination {}", request.destination));
    }
    Ok(())
}

/// One bit per variable, in variable-index order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Solution {
    bits: Vec<bool>,
}

impl Solution {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![false; len] }
    }

    /// Low bit of `mask` is variable 0.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        Self { bits: (0..len).map(|i| mask >> i & 1 == 1).collect() }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, var: usize) -> bool {
        self.bits[var]
    }

    pub fn set(&mut self, var: usize, value: bool) {
        self.bits[var] = value;
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn to_bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn from_bit_string(text: &str) -> Result<Self> {
        text.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::BitString(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

/// Total number of links used by the selected lightpaths.
pub fn f_alpha(instance: &Instance, solution: &Solution) -> Result<i64> {
    instance.check_len(solution)?;
    Ok(solution.ones().map(|v| instance.length(v)).sum())
}

/// Number of selected working lightpaths.
pub fn f_beta(instance: &Instance, solution: &Solution) -> Result<i64> {
    instance.check_len(solution)?;
    Ok(solution.ones().filter(|&v| instance.var(v).kind == Kind::Working).count() as i64)
}

/// `alpha * f_alpha - beta * f_beta`.
pub fn ip_objective(instance: &Instance, solution: &Solution, alpha: i64, beta: i64) -> Result<i64> {
    Ok(alpha * f_alpha(instance, solution)? - beta * f_beta(instance, solution)?)
}

/// Requests with at least one selected working lightpath.
pub fn granted_requests(instance: &Instance, solution: &Solution) -> Result<Vec<usize>> {
    instance.check_len(solution)?;
    Ok((0..instance.request_count())
        .filter(|&r| instance.working_vars(r).any(|v| solution.get(v)))
        .collect())
}

/// A single violated constraint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Violation {
    /// Selected working and protection counts differ.
    Balance { request: usize, working: usize, protection: usize },
    /// More than one working lightpath selected.
    MultipleWorking { request: usize, count: usize },
    /// Working and protection of one request share a link.
    C1 { request: usize, working: usize, protection: usize },
    /// Working of one request and protection of another share a link and wavelength.
    C2 { request: usize, other: usize, working: usize, protection: usize },
    /// Two working lightpaths share a link and wavelength.
    C3 { first: usize, second: usize, working_first: usize, working_second: usize },
    /// Two protection lightpaths share a link and wavelength.
    C4 { first: usize, second: usize, protection_first: usize, protection_second: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Balance { request, working, protection } => {
                write!(f, "request {request}: {working} working but {protection} protection selected")
            }
            Violation::MultipleWorking { request, count } => write!(f, "request {request}: {count} working selected"),
            Violation::C1 { request, working, protection } => {
                write!(f, "C1 request {request}: working {working} overlaps protection {protection}")
            }
            Violation::C2 { request, other, working, protection } => write!(
                f,
                "C2 working {working} of request {request} shares a link and wavelength with protection {protection} of request {other}"
            ),
            Violation::C3 { first, second, working_first, working_second } => write!(
                f,
                "C3 working {working_first} of request {first} and working {working_second} of request {second}"
            ),
            Violation::C4 { first, second, protection_first, protection_second } => write!(
                f,
                "C4 protection {protection_first} of request {first} and protection {protection_second} of request {second}"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every constraint and reports all violations.
pub fn verify_feasible(instance: &Instance, conflicts: &ConflictSets, solution: &Solution) -> Result<Verdict> {
    instance.check_len(solution)?;
    let mut violations = Vec::new();
    let set = |r: usize, kind: Kind, i: usize| solution.get(instance.var_index(r, kind, i).expect("tuple in range"));

    for r in 0..instance.request_count() {
        let working = instance.working_vars(r).filter(|&v| solution.get(v)).count();
        let protection = instance.protection_vars(r).filter(|&v| solution.get(v)).count();
        if working != protection {
            violations.push(Violation::Balance { request: r, working, protection });
        }
        if working > 1 {
            violations.push(Violation::MultipleWorking { request: r, count: working });
        }
    }
    for t in &conflicts.c1 {
        if set(t.request, Kind::Working, t.working) && set(t.request, Kind::Protection, t.protection) {
            violations.push(Violation::C1 { request: t.request, working: t.working, protection: t.protection });
        }
    }
    for t in &conflicts.c2 {
        if set(t.request, Kind::Working, t.working) && set(t.other, Kind::Protection, t.protection) {
            violations.push(Violation::C2 {
                request: t.request,
                other: t.other,
                working: t.working,
                protection: t.protection,
            });
        }
    }
    for t in &conflicts.c3 {
        if set(t.first, Kind::Working, t.index_first) && set(t.second, Kind::Working, t.index_second) {
            violations.push(Violation::C3 {
                first: t.first,
                second: t.second,
                working_first: t.index_first,
                working_second: t.index_second,
            });
        }
    }
    for t in &conflicts.c4 {
        if set(t.first, Kind::Protection, t.index_first) && set(t.second, Kind::Protection, t.index_second) {
            violations.push(Violation::C4 {
                first: t.first,
                second: t.second,
                protection_first: t.index_first,
                protection_second: t.index_second,
            });
        }
    }
    Ok(Verdict { violations })
}

#[derive(Serialize, Deserialize)]
struct LightpathFile {
    links: Vec<usize>,
    wavelength: usize,
}

#[derive(Serialize, Deserialize)]
struct RequestFile {
    source: usize,
    dest: usize,
    #[serde(default)]
    working: Vec<LightpathFile>,
    #[serde(default)]
    protection: Vec<LightpathFile>,
}

#[derive(Serialize, Deserialize)]
struct TopologyFile {
    nodes: usize,
    links: Vec<[usize; 2]>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    nodes: usize,
    links: Vec<[usize; 2]>,
    wavelengths: usize,
    requests: Vec<RequestFile>,
}

impl InstanceFile {
    fn into_instance(self) -> Result<Instance> {
        let links = self.links.into_iter().map(|[tail, head]| Link { tail, head }).collect();
        let network = Network::new(self.nodes, links)?;
        let convert = |paths: Vec<LightpathFile>| -> Vec<Lightpath> {
            paths.into_iter().map(|p| Lightpath::new(p.links, p.wavelength)).collect()
        };
        let requests = self
            .requests
            .into_iter()
            .map(|r| Request {
                source: r.source,
                destination: r.dest,
                working: convert(r.working),
                protection: convert(r.protection),
            })
            .collect();
        Instance::new(network, self.wavelengths, requests)
    }

    fn from_instance(instance: &Instance) -> Self {
        let convert = |paths: &[Lightpath]| -> Vec<LightpathFile> {
            paths.iter().map(|p| LightpathFile { links: p.links.clone(), wavelength: p.wavelength }).collect()
        };
        Self {
            nodes: instance.network.node_count(),
            links: instance.network.links().iter().map(|l| [l.tail, l.head]).collect(),
            wavelengths: instance.wavelength_count,
            requests: instance
                .requests
                .iter()
                .map(|r| RequestFile {
                    source: r.source,
                    dest: r.destination,
                    working: convert(&r.working),
                    protection: convert(&r.protection),
                })
                .collect(),
        }
    }
}

/// On-disk form of a solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub bits: String,
    pub granted: Vec<usize>,
    pub objective: i64,
    pub f_alpha: i64,
    pub f_beta: i64,
}

impl SolutionFile {
    pub fn describe(instance: &Instance, solution: &Solution, alpha: i64, beta: i64) -> Result<Self> {
        Ok(Self {
            bits: solution.to_bit_string(),
            granted: granted_requests(instance, solution)?,
            objective: ip_objective(instance, solution, alpha, beta)?,
            f_alpha: f_alpha(instance, solution)?,
            f_beta: f_beta(instance, solution)?,
        })
    }

    pub fn solution(&self) -> Result<Solution> {
        Solution::from_bit_string(&self.bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conflicts::build_conflict_sets;
    use crate::fixtures::{figure_one, figure_one_solution};
    use crate::weights::tight_example;

    #[test]
    fn figure_one_objectives() {
        let inst = figure_one();
        let sol = figure_one_solution(&inst);
        assert_eq!(f_alpha(&inst, &sol).unwrap(), 8);
        assert_eq!(f_beta(&inst, &sol).unwrap(), 2);
        assert_eq!(ip_objective(&inst, &sol, 1, 11).unwrap(), -14);
        assert_eq!(granted_requests(&inst, &sol).unwrap(), vec![0, 1]);
    }

    #[test]
    fn zero_solution_evaluates_to_zero() {
        let inst = figure_one();
        let zero = Solution::zeros(inst.var_count());
        assert_eq!(f_alpha(&inst, &zero).unwrap(), 0);
        assert_eq!(f_beta(&inst, &zero).unwrap(), 0);
        assert_eq!(ip_objective(&inst, &zero, 1, 11).unwrap(), 0);
        let conflicts = build_conflict_sets(&inst);
        assert!(verify_feasible(&inst, &conflicts, &zero).unwrap().is_feasible());
    }

    #[test]
    fn protection_only_counts_no_grant() {
        let inst = figure_one();
        let mut sol = Solution::zeros(inst.var_count());
        sol.set(inst.var_index(0, Kind::Protection, 0).unwrap(), true);
        assert_eq!(f_beta(&inst, &sol).unwrap(), 0);
    }

    #[test]
    fn tight_grant_ties_empty_at_beta_five() {
        let inst = tight_example(2, 3).unwrap();
        let grant = Solution::new(vec![true, true]);
        assert_eq!(ip_objective(&inst, &grant, 1, 5).unwrap(), 0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let inst = figure_one();
        let err = f_alpha(&inst, &Solution::zeros(3)).unwrap_err();
        assert!(matches!(err, Error::Dimension { expected: 7, got: 3 }));
    }

    #[test]
    fn figure_one_verdicts() {
        let inst = figure_one();
        let conflicts = build_conflict_sets(&inst);
        let sol = figure_one_solution(&inst);
        assert!(verify_feasible(&inst, &conflicts, &sol).unwrap().is_feasible());

        let mut bad = Solution::zeros(inst.var_count());
        bad.set(inst.var_index(0, Kind::Working, 1).unwrap(), true);
        bad.set(inst.var_index(0, Kind::Protection, 0).unwrap(), true);
        let verdict = verify_feasible(&inst, &conflicts, &bad).unwrap();
        assert_eq!(verdict.violations, vec![Violation::C1 { request: 0, working: 1, protection: 0 }]);
    }

    #[test]
    fn rejects_discontiguous_paths() {
        let network = Network::new(3, vec![Link { tail: 0, head: 1 }, Link { tail: 2, head: 1 }]).unwrap();
        let request = Request {
            source: 0,
            destination: 1,
            working: vec![Lightpath::new(vec![1], 0)],
            protection: vec![],
        };
        assert!(matches!(Instance::new(network, 1, vec![request]), Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn rejects_out_of_range_wavelength() {
        let network = Network::new(2, vec![Link { tail: 0, head: 1 }]).unwrap();
        let request = Request {
            source: 0,
            destination: 1,
            working: vec![Lightpath::new(vec![0], 2)],
            protection: vec![],
        };
        assert!(Instance::new(network, 2, vec![request]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let inst = figure_one();
        let back = Instance::from_json_str(&inst.to_json_string()).unwrap();
        assert_eq!(inst, back);
        assert_eq!(back.var_count(), 7);
    }

    #[test]
    fn bit_string_round_trip() {
        let sol = Solution::new(vec![true, false, false, true]);
        assert_eq!(sol.to_bit_string(), "1001");
        assert_eq!(Solution::from_bit_string("1001").unwrap(), sol);
        assert!(Solution::from_bit_string("10x").is_err());
    }

    #[test]
    fn var_order_is_request_then_kind_then_index() {
        let inst = figure_one();
        let order: Vec<_> = inst.vars().iter().map(|v| (v.request, v.kind, v.index)).collect();
        let mut sorted = order.clone();
        sorted.sort();
        assert_eq!(order, sorted);
        for (i, v) in inst.vars().iter().enumerate() {
            assert_eq!(inst.var_index(v.request, v.kind, v.index), Some(i));
        }
        assert_eq!(inst.var_name(0), "x_r0_w0");
        assert_eq!(inst.var_name(3), "y_r0_p0");
    }
}

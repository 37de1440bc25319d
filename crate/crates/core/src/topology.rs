//! Domain-wise topology, service placement, and the BIS registry.
//!
//! A *BIS* (basic information of synchronization) is one synchronizable
//! scalar: either the delay of a directed inter-domain gateway link or the
//! server delay of one service installation. The registry assigns every BIS
//! a stable index; that ordering defines the layout of the staleness state,
//! the action vector, and every controller's believed-value vector.

use crate::error::{Error, Result};
use crate::seeds::SimRng;
use rand::seq::SliceRandom;
use rand::Rng;

/// Attempts before degree-sequence realization gives up.
const STUB_MATCH_ATTEMPTS: usize = 10_000;

/// Directed graph over domains. Inter-domain links always come in
/// bidirectional pairs, and the graph is connected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainGraph {
    domain_count: usize,
    edges: Vec<(usize, usize)>,
}

impl DomainGraph {
    /// Builds and validates a graph from an explicit directed edge list.
    pub fn from_edges(domain_count: usize, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        if domain_count == 0 {
            return Err(Error::MalformedEdgeList("zero domains".into()));
        }
        edges.sort_unstable();
        for window in edges.windows(2) {
            if window[0] == window[1] {
                return Err(Error::MalformedEdgeList(format!(
                    "duplicate edge ({}, {})",
                    window[0].0, window[0].1
                )));
            }
        }
        for &(src, dst) in &edges {
            if src == dst {
                return Err(Error::MalformedEdgeList(format!("self-loop at {src}")));
            }
            if src >= domain_count || dst >= domain_count {
                return Err(Error::MalformedEdgeList(format!(
                    "edge ({src}, {dst}) out of range for {domain_count} domains"
                )));
            }
            if edges.binary_search(&(dst, src)).is_err() {
                return Err(Error::MalformedEdgeList(format!(
                    "edge ({src}, {dst}) has no reverse"
                )));
            }
        }
        let graph = Self { domain_count, edges };
        if !graph.is_connected() {
            return Err(Error::MalformedEdgeList("graph is disconnected".into()));
        }
        Ok(graph)
    }

    pub fn domain_count(&self) -> usize {
        self.domain_count
    }

    /// Directed edges, sorted ascending by (src, dst).
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn out_degree(&self, domain: usize) -> usize {
        self.edges.iter().filter(|&&(s, _)| s == domain).count()
    }

    fn is_connected(&self) -> bool {
        // Edges come in pairs, so directed reachability from 0 suffices.
        let mut seen = vec![false; self.domain_count];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(s, d) in &self.edges {
                if s == u && !seen[d] {
                    seen[d] = true;
                    stack.push(d);
                }
            }
        }
        seen.into_iter().all(|v| v)
    }
}

/// How the domain graph is specified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologySpec {
    /// Explicit directed edge list; must contain both directions of each link.
    Edges(Vec<(usize, usize)>),
    /// Undirected degree per domain; realized by stub matching and then
    /// expanded into bidirectional pairs.
    DegreeSequence(Vec<usize>),
}

/// Builds the domain graph from either an edge list or a degree sequence.
///
/// Degree-sequence mode pairs stubs uniformly at random and rejects
/// realizations with self-loops, parallel edges, or a disconnected result,
/// resampling until success or the attempt cap.
pub fn build_topology(
    domain_count: usize,
    spec: &TopologySpec,
    rng: &mut SimRng,
) -> Result<DomainGraph> {
    match spec {
        TopologySpec::Edges(edges) => DomainGraph::from_edges(domain_count, edges.clone()),
        TopologySpec::DegreeSequence(degrees) => {
            realize_degree_sequence(domain_count, degrees, rng)
        }
    }
}

fn realize_degree_sequence(
    domain_count: usize,
    degrees: &[usize],
    rng: &mut SimRng,
) -> Result<DomainGraph> {
    if degrees.len() != domain_count {
        return Err(Error::InfeasibleDegreeSequence(format!(
            "{} degrees given for {domain_count} domains",
            degrees.len()
        )));
    }
    let total: usize = degrees.iter().sum();
    if total % 2 != 0 {
        return Err(Error::InfeasibleDegreeSequence("odd degree sum".into()));
    }
    if domain_count > 1 && total < 2 * (domain_count - 1) {
        return Err(Error::InfeasibleDegreeSequence(
            "too few stubs to connect all domains".into(),
        ));
    }
    if degrees.iter().any(|&d| d >= domain_count) && domain_count > 1 {
        return Err(Error::InfeasibleDegreeSequence(
            "degree exceeds possible neighbour count".into(),
        ));
    }
    if domain_count == 1 {
        return if total == 0 {
            DomainGraph::from_edges(1, Vec::new())
        } else {
            Err(Error::InfeasibleDegreeSequence(
                "single domain cannot have neighbours".into(),
            ))
        };
    }

    let mut stubs = Vec::with_capacity(total);
    for (domain, &deg) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat(domain).take(deg));
    }

    'attempt: for _ in 0..STUB_MATCH_ATTEMPTS {
        stubs.shuffle(rng);
        let mut undirected = Vec::with_capacity(total / 2);
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if a == b {
                continue 'attempt;
            }
            undirected.push((a, b));
        }
        undirected.sort_unstable();
        if undirected.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let mut directed = Vec::with_capacity(total);
        for &(a, b) in &undirected {
            directed.push((a, b));
            directed.push((b, a));
        }
        if let Ok(graph) = DomainGraph::from_edges(domain_count, directed) {
            return Ok(graph);
        }
    }
    Err(Error::InfeasibleDegreeSequence(format!(
        "no simple connected realization found in {STUB_MATCH_ATTEMPTS} attempts"
    )))
}

/// Where each service is installed: sorted (service, domain) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServicePlacement {
    service_count: usize,
    installs: Vec<(usize, usize)>,
}

impl ServicePlacement {
    pub fn new(service_count: usize, mut installs: Vec<(usize, usize)>) -> Result<Self> {
        installs.sort_unstable();
        if installs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(
                "duplicate service installation in one domain".into(),
            ));
        }
        if installs.iter().any(|&(s, _)| s >= service_count) {
            return Err(Error::InvalidArgument("install for unknown service".into()));
        }
        Ok(Self { service_count, installs })
    }

    pub fn service_count(&self) -> usize {
        self.service_count
    }

    /// Sorted (service, domain) pairs.
    pub fn installs(&self) -> &[(usize, usize)] {
        &self.installs
    }

    /// Domains hosting `service`, ascending.
    pub fn domains_of(&self, service: usize) -> impl Iterator<Item = usize> + '_ {
        self.installs
            .iter()
            .filter(move |&&(s, _)| s == service)
            .map(|&(_, d)| d)
    }
}

/// Samples service installations.
///
/// Each install draws its domain in two stages: first the favored group with
/// probability `favored_prob` (otherwise the rest), then uniformly within the
/// chosen group among domains this service does not already occupy. An
/// exhausted group falls back to the other, so `copies == domain_count`
/// always fills every domain.
pub fn place_services(
    graph: &DomainGraph,
    service_count: usize,
    copies: usize,
    favored_domains: &[usize],
    favored_prob: f64,
    rng: &mut SimRng,
) -> Result<ServicePlacement> {
    let m = graph.domain_count();
    if copies == 0 || copies > m {
        return Err(Error::InvalidArgument(format!(
            "copies {copies} not in 1..={m}"
        )));
    }
    if !(0.0..=1.0).contains(&favored_prob) {
        return Err(Error::InvalidArgument("favored_prob outside [0, 1]".into()));
    }
    if favored_domains.iter().any(|&d| d >= m) {
        return Err(Error::InvalidArgument("favored domain out of range".into()));
    }
    let mut favored: Vec<usize> = favored_domains.to_vec();
    favored.sort_unstable();
    favored.dedup();
    let other: Vec<usize> = (0..m).filter(|d| !favored.contains(d)).collect();

    let mut installs = Vec::with_capacity(service_count * copies);
    for service in 0..service_count {
        let mut taken: Vec<usize> = Vec::with_capacity(copies);
        while taken.len() < copies {
            let pick_favored = rng.random::<f64>() < favored_prob;
            let first = if pick_favored { &favored } else { &other };
            let second = if pick_favored { &other } else { &favored };
            let pool: Vec<usize> = first
                .iter()
                .copied()
                .filter(|d| !taken.contains(d))
                .collect();
            let pool = if pool.is_empty() {
                second
                    .iter()
                    .copied()
                    .filter(|d| !taken.contains(d))
                    .collect()
            } else {
                pool
            };
            let domain = pool[rng.random_range(0..pool.len())];
            taken.push(domain);
            installs.push((service, domain));
        }
    }
    ServicePlacement::new(service_count, installs)
}

/// One synchronizable item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BisEntry {
    /// Delay of the directed gateway link src -> dst.
    GatewayDelay { src: usize, dst: usize },
    /// Server delay of `service` installed in `domain`.
    ServerDelay { service: usize, domain: usize },
}

impl BisEntry {
    /// Domain whose controller observes this item directly.
    pub fn origin_domain(&self) -> usize {
        match *self {
            BisEntry::GatewayDelay { src, .. } => src,
            BisEntry::ServerDelay { domain, .. } => domain,
        }
    }
}

/// Canonical indexing of all synchronizable items: gateway entries first in
/// edge order, then server entries in install order. The same
/// (graph, placement) pair always yields the same indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisRegistry {
    entries: Vec<BisEntry>,
    gateway_count: usize,
}

/// Builds the registry for a graph and placement.
pub fn enumerate_bises(graph: &DomainGraph, placement: &ServicePlacement) -> BisRegistry {
    let mut entries = Vec::with_capacity(graph.edges().len() + placement.installs().len());
    for &(src, dst) in graph.edges() {
        entries.push(BisEntry::GatewayDelay { src, dst });
    }
    for &(service, domain) in placement.installs() {
        entries.push(BisEntry::ServerDelay { service, domain });
    }
    BisRegistry {
        gateway_count: graph.edges().len(),
        entries,
    }
}

impl BisRegistry {
    /// Total number of BISes (edges plus installs).
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn gateway_count(&self) -> usize {
        self.gateway_count
    }

    pub fn entry(&self, index: usize) -> BisEntry {
        self.entries[index]
    }

    pub fn entries(&self) -> &[BisEntry] {
        &self.entries
    }

    pub fn origin_domain(&self, index: usize) -> usize {
        self.entries[index].origin_domain()
    }

    /// Index of a gateway entry, if the edge exists.
    pub fn gateway_index(&self, src: usize, dst: usize) -> Option<usize> {
        self.entries[..self.gateway_count]
            .binary_search(&BisEntry::GatewayDelay { src, dst })
            .ok()
    }

    /// Index of a server entry, if the installation exists.
    pub fn server_index(&self, service: usize, domain: usize) -> Option<usize> {
        self.entries[self.gateway_count..]
            .binary_search(&BisEntry::ServerDelay { service, domain })
            .ok()
            .map(|i| i + self.gateway_count)
    }

    pub fn index_of(&self, entry: BisEntry) -> Option<usize> {
        match entry {
            BisEntry::GatewayDelay { src, dst } => self.gateway_index(src, dst),
            BisEntry::ServerDelay { service, domain } => self.server_index(service, domain),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::{stream_rng, SimRng};
    use rand::SeedableRng;

    fn rng(seed: u64) -> SimRng {
        stream_rng(seed, 99)
    }

    /// Two domains joined by one bidirectional pair.
    fn two_domain_graph() -> DomainGraph {
        DomainGraph::from_edges(2, vec![(0, 1), (1, 0)]).unwrap()
    }

    #[test]
    fn explicit_two_domain_edge_list() {
        let g = two_domain_graph();
        assert_eq!(g.domain_count(), 2);
        assert_eq!(g.edges(), &[(0, 1), (1, 0)]);
    }

    #[test]
    fn single_domain_no_edges() {
        let g = DomainGraph::from_edges(1, Vec::new()).unwrap();
        assert_eq!(g.domain_count(), 1);
        assert!(g.edges().is_empty());
    }

    #[test]
    fn degree_sequence_triangle() {
        // [2,2,2] on three vertices admits exactly one simple connected
        // realization, so every seed must produce the triangle.
        for seed in 0..20 {
            let g = build_topology(3, &TopologySpec::DegreeSequence(vec![2, 2, 2]), &mut rng(seed))
                .unwrap();
            assert_eq!(
                g.edges(),
                &[(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]
            );
        }
    }

    #[test]
    fn degree_sequence_is_realized_exactly() {
        let degrees = vec![3, 2, 2, 2, 2, 1, 1, 1];
        let g = build_topology(
            8,
            &TopologySpec::DegreeSequence(degrees.clone()),
            &mut rng(5),
        )
        .unwrap();
        for (domain, &want) in degrees.iter().enumerate() {
            assert_eq!(g.out_degree(domain), want, "domain {domain}");
        }
    }

    #[test]
    fn every_edge_has_its_reverse() {
        let g = build_topology(
            8,
            &TopologySpec::DegreeSequence(vec![3, 2, 2, 2, 2, 1, 1, 1]),
            &mut rng(11),
        )
        .unwrap();
        for &(s, d) in g.edges() {
            assert!(g.edges().contains(&(d, s)), "missing reverse of ({s}, {d})");
        }
    }

    #[test]
    fn malformed_edge_lists_rejected() {
        assert!(matches!(
            DomainGraph::from_edges(2, vec![(0, 0)]),
            Err(Error::MalformedEdgeList(_))
        ));
        assert!(matches!(
            DomainGraph::from_edges(2, vec![(0, 1)]),
            Err(Error::MalformedEdgeList(_))
        ));
        assert!(matches!(
            DomainGraph::from_edges(4, vec![(0, 1), (1, 0), (2, 3), (3, 2)]),
            Err(Error::MalformedEdgeList(_))
        ));
    }

    #[test]
    fn infeasible_degree_sequences_rejected() {
        assert!(matches!(
            build_topology(3, &TopologySpec::DegreeSequence(vec![1, 1, 1]), &mut rng(0)),
            Err(Error::InfeasibleDegreeSequence(_))
        ));
        // Even sum, but the isolated vertex can never connect.
        assert!(matches!(
            build_topology(3, &TopologySpec::DegreeSequence(vec![2, 2, 0]), &mut rng(0)),
            Err(Error::InfeasibleDegreeSequence(_))
        ));
    }

    #[test]
    fn placement_has_copies_in_distinct_domains() {
        let degrees = vec![3, 2, 2, 2, 2, 1, 1, 1];
        let g = build_topology(8, &TopologySpec::DegreeSequence(degrees), &mut rng(3)).unwrap();
        let p = place_services(&g, 10, 2, &[0, 1, 2, 3], 0.7, &mut rng(4)).unwrap();
        assert_eq!(p.installs().len(), 20);
        for service in 0..10 {
            let domains: Vec<usize> = p.domains_of(service).collect();
            assert_eq!(domains.len(), 2);
            assert_ne!(domains[0], domains[1]);
        }
    }

    #[test]
    fn full_copies_cover_every_domain() {
        let g = two_domain_graph();
        // favored_prob 1.0 on a single favored domain still fills both.
        let p = place_services(&g, 3, 2, &[0], 1.0, &mut rng(8)).unwrap();
        for service in 0..3 {
            let domains: Vec<usize> = p.domains_of(service).collect();
            assert_eq!(domains, vec![0, 1]);
        }
    }

    #[test]
    fn fully_favored_group_takes_all_installs() {
        let degrees = vec![3, 2, 2, 2, 2, 1, 1, 1];
        let g = build_topology(8, &TopologySpec::DegreeSequence(degrees), &mut rng(3)).unwrap();
        let favored = [2, 4, 5, 7];
        for seed in 0..1000 {
            let p = place_services(&g, 4, 2, &favored, 1.0, &mut rng(seed)).unwrap();
            for &(_, domain) in p.installs() {
                assert!(favored.contains(&domain), "seed {seed} left the group");
            }
        }
    }

    #[test]
    fn registry_counts_match_fig_example() {
        // Two domains, service 0 installed in both, service 1 only in domain 0.
        let g = two_domain_graph();
        let p = ServicePlacement::new(2, vec![(0, 0), (0, 1), (1, 0)]).unwrap();
        let r = enumerate_bises(&g, &p);
        assert_eq!(r.len(), 5);
        assert_eq!(r.gateway_count(), 2);
        assert_eq!(r.entry(0), BisEntry::GatewayDelay { src: 0, dst: 1 });
        assert_eq!(r.entry(1), BisEntry::GatewayDelay { src: 1, dst: 0 });
        assert_eq!(r.entry(3), BisEntry::ServerDelay { service: 0, domain: 1 });
    }

    #[test]
    fn registry_minimal_case() {
        let g = DomainGraph::from_edges(1, Vec::new()).unwrap();
        let p = ServicePlacement::new(1, vec![(0, 0)]).unwrap();
        let r = enumerate_bises(&g, &p);
        assert_eq!(r.len(), 1);
        assert_eq!(r.entry(0), BisEntry::ServerDelay { service: 0, domain: 0 });
    }

    #[test]
    fn registry_size_for_eight_domain_scenario() {
        let degrees = vec![3, 2, 2, 2, 2, 1, 1, 1];
        let g = build_topology(8, &TopologySpec::DegreeSequence(degrees), &mut rng(7)).unwrap();
        assert_eq!(g.edges().len(), 14);
        let p = place_services(&g, 10, 2, &[0, 1, 2, 3], 0.7, &mut rng(9)).unwrap();
        let r = enumerate_bises(&g, &p);
        assert_eq!(r.len(), 34);
    }

    #[test]
    fn registry_indexing_round_trips() {
        let degrees = vec![3, 2, 2, 2, 2, 1, 1, 1];
        let g = build_topology(8, &TopologySpec::DegreeSequence(degrees), &mut rng(13)).unwrap();
        let p = place_services(&g, 10, 2, &[0, 1, 2, 3], 0.7, &mut rng(14)).unwrap();
        let r = enumerate_bises(&g, &p);
        for i in 0..r.len() {
            assert_eq!(r.index_of(r.entry(i)), Some(i));
        }
        assert_eq!(r.index_of(BisEntry::GatewayDelay { src: 7, dst: 7 }), None);
    }

    #[test]
    fn build_is_deterministic_per_seed() {
        let spec = TopologySpec::DegreeSequence(vec![3, 2, 2, 2, 2, 1, 1, 1]);
        let a = build_topology(8, &spec, &mut rng(21)).unwrap();
        let b = build_topology(8, &spec, &mut rng(21)).unwrap();
        assert_eq!(a, b);
        let mut r = rng(22);
        let p1 = place_services(&a, 10, 2, &[0, 1, 2, 3], 0.7, &mut r).unwrap();
        let mut r = rng(22);
        let p2 = place_services(&a, 10, 2, &[0, 1, 2, 3], 0.7, &mut r).unwrap();
        assert_eq!(p1, p2);
    }
}

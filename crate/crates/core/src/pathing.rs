//! Service path construction and latency evaluation.
//!
//! A request's path is chosen by its origin controller alone, from that
//! controller's believed values: the cheapest gateway route to each
//! installation of the requested service plus the believed server delay
//! there, minimized over installations (anycast). The true latency of the
//! chosen path is then the same sum re-costed with ground-truth values; the
//! path itself is never re-optimized.

use crate::dynamics::{ServiceRequest, TrueNetworkState};
use crate::error::{Error, Result};
use crate::topology::{BisRegistry, DomainGraph, ServicePlacement};
use crate::views::ControllerView;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Neighbour lists with each edge's BIS index, for weight lookups.
#[derive(Debug, Clone)]
pub struct DomainAdjacency {
    adj: Vec<Vec<(usize, usize)>>,
}

impl DomainAdjacency {
    pub fn new(graph: &DomainGraph, registry: &BisRegistry) -> Self {
        let mut adj = vec![Vec::new(); graph.domain_count()];
        for &(src, dst) in graph.edges() {
            let bis = registry
                .gateway_index(src, dst)
                .expect("registry built from the same graph");
            adj[src].push((dst, bis));
        }
        Self { adj }
    }

    pub fn domain_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbours(&self, domain: usize) -> &[(usize, usize)] {
        &self.adj[domain]
    }

    fn edge_bis(&self, src: usize, dst: usize) -> Option<usize> {
        self.adj[src].iter().find(|&&(d, _)| d == dst).map(|&(_, bis)| bis)
    }
}

/// A constructed path: the domain sequence from the request origin to the
/// chosen installation, and what the origin controller believed it costs.
#[derive(Debug, Clone, PartialEq)]
pub struct ServicePath {
    pub request: ServiceRequest,
    pub domain_sequence: Vec<usize>,
    pub chosen_install: (usize, usize),
    pub estimated_latency: f64,
}

struct HeapEntry {
    dist: f64,
    domain: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on (dist, domain); index breaks ties deterministically.
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.domain.cmp(&self.domain))
    }
}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest gateway delays under `view`'s believed values.
/// Returns per-domain distances and predecessors.
fn shortest_paths(
    adjacency: &DomainAdjacency,
    view: &ControllerView,
    src: usize,
) -> (Vec<f64>, Vec<Option<usize>>) {
    let m = adjacency.domain_count();
    let mut dist = vec![f64::INFINITY; m];
    let mut prev: Vec<Option<usize>> = vec![None; m];
    let mut settled = vec![false; m];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(HeapEntry { dist: 0.0, domain: src });
    while let Some(HeapEntry { dist: d, domain: u }) = heap.pop() {
        if settled[u] {
            continue;
        }
        settled[u] = true;
        for &(v, bis) in adjacency.neighbours(u) {
            let candidate = d + view.believed(bis);
            if candidate < dist[v] {
                dist[v] = candidate;
                prev[v] = Some(u);
                heap.push(HeapEntry { dist: candidate, domain: v });
            }
        }
    }
    (dist, prev)
}

fn reconstruct(prev: &[Option<usize>], src: usize, dst: usize) -> Vec<usize> {
    let mut sequence = vec![dst];
    let mut at = dst;
    while at != src {
        at = prev[at].expect("predecessor chain reaches the source");
        sequence.push(at);
    }
    sequence.reverse();
    sequence
}

/// Minimum accumulated gateway delay from `src` to `dst` under the view,
/// with the realizing domain sequence. Intra-domain transit costs nothing:
/// `src == dst` yields `(0, [src])`.
pub fn min_gateway_delay(
    adjacency: &DomainAdjacency,
    view: &ControllerView,
    src: usize,
    dst: usize,
) -> Result<(f64, Vec<usize>)> {
    let (dist, prev) = shortest_paths(adjacency, view, src);
    if dist[dst].is_infinite() {
        return Err(Error::Unreachable { src, dst });
    }
    Ok((dist[dst], reconstruct(&prev, src, dst)))
}

/// Chooses the anycast service path the origin controller believes cheapest:
/// gateway delay to the installation's domain plus the believed server delay,
/// minimized over installations. Cost ties break toward the lower domain.
pub fn construct_service_path(
    adjacency: &DomainAdjacency,
    registry: &BisRegistry,
    placement: &ServicePlacement,
    view: &ControllerView,
    request: &ServiceRequest,
) -> Result<ServicePath> {
    let (dist, prev) = shortest_paths(adjacency, view, request.origin_domain);
    let mut best: Option<(f64, usize)> = None;
    for domain in placement.domains_of(request.service_id) {
        if dist[domain].is_infinite() {
            continue;
        }
        let server_bis = registry
            .server_index(request.service_id, domain)
            .expect("placement and registry agree");
        let cost = dist[domain] + view.believed(server_bis);
        let better = match best {
            None => true,
            Some((best_cost, best_domain)) => {
                cost < best_cost || (cost == best_cost && domain < best_domain)
            }
        };
        if better {
            best = Some((cost, domain));
        }
    }
    let (estimated_latency, domain) =
        best.ok_or(Error::ServiceUnavailable(request.service_id))?;
    Ok(ServicePath {
        request: *request,
        domain_sequence: reconstruct(&prev, request.origin_domain, domain),
        chosen_install: (request.service_id, domain),
        estimated_latency,
    })
}

/// Re-costs a fixed path with ground-truth values.
pub fn evaluate_true_latency(
    adjacency: &DomainAdjacency,
    registry: &BisRegistry,
    path: &ServicePath,
    truth: &TrueNetworkState,
) -> f64 {
    let mut latency = 0.0;
    for hop in path.domain_sequence.windows(2) {
        let bis = adjacency
            .edge_bis(hop[0], hop[1])
            .expect("path follows graph edges");
        latency += truth.values[bis];
    }
    let (service, domain) = path.chosen_install;
    let server_bis = registry
        .server_index(service, domain)
        .expect("path ends at an installation");
    latency + truth.values[server_bis]
}

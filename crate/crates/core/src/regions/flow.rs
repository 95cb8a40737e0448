//! Flow polytopes over directed acyclic networks.
//!
//! A vertex routes every origin-destination demand along a single path; the
//! region is the convex hull of those routings, expressed in link flows. The
//! oracle is an all-pairs shortest-path computation in topological order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use super::{check_cost_dim, Region, Vertex, VertexKey, ZERO_TOL};
use crate::error::{invalid, Error, Result};
use crate::vector::DenseVector;

#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub id: usize,
    pub from: usize,
    pub to: usize,
    pub free_flow_time: f64,
    pub capacity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Demand {
    pub origin: usize,
    pub dest: usize,
    pub amount: f64,
}

/// A directed acyclic network with links indexed `0..M`.
#[derive(Debug, Clone)]
pub struct DagNetwork {
    num_nodes: usize,
    links: Vec<Link>,
    out_links: Vec<Vec<usize>>,
    topo_order: Vec<usize>,
    topo_rank: Vec<usize>,
}

impl DagNetwork {
    /// Validates link ids (a permutation of `0..M`), endpoints and acyclicity.
    pub fn new(num_nodes: usize, mut links: Vec<Link>) -> Result<Self> {
        if num_nodes == 0 {
            return Err(invalid("network needs at least one node"));
        }
        links.sort_by_key(|l| l.id);
        for (i, l) in links.iter().enumerate() {
            if l.id != i {
                return Err(invalid(format!(
                    "link ids must be exactly 0..{}, found {}",
                    links.len(),
                    l.id
                )));
            }
            if l.from >= num_nodes || l.to >= num_nodes {
                return Err(invalid(format!("link {} references an unknown node", l.id)));
            }
            if l.from == l.to {
                return Err(Error::CycleDetected);
            }
            if !(l.free_flow_time >= 0.0 && l.free_flow_time.is_finite()) {
                return Err(invalid(format!("link {} has invalid free-flow time", l.id)));
            }
            if !(l.capacity > 0.0 && l.capacity.is_finite()) {
                return Err(invalid(format!("link {} has non-positive capacity", l.id)));
            }
        }
        let mut out_links = vec![Vec::new(); num_nodes];
        let mut indegree = vec![0usize; num_nodes];
        for l in &links {
            out_links[l.from].push(l.id);
            indegree[l.to] += 1;
        }
        // Kahn's algorithm, smallest ready node first.
        let mut ready: std::collections::BTreeSet<usize> =
            (0..num_nodes).filter(|&v| indegree[v] == 0).collect();
        let mut topo_order = Vec::with_capacity(num_nodes);
        while let Some(v) = ready.pop_first() {
            topo_order.push(v);
            for &a in &out_links[v] {
                let w = links[a].to;
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        if topo_order.len() != num_nodes {
            return Err(Error::CycleDetected);
        }
        let mut topo_rank = vec![0; num_nodes];
        for (r, &v) in topo_order.iter().enumerate() {
            topo_rank[v] = r;
        }
        Ok(Self {
            num_nodes,
            links,
            out_links,
            topo_order,
            topo_rank,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// Nodes reachable from `origin` (excluding itself), in increasing order.
    pub fn reachable_from(&self, origin: usize) -> Vec<usize> {
        let mut seen = vec![false; self.num_nodes];
        let mut queue = VecDeque::from([origin]);
        seen[origin] = true;
        while let Some(v) = queue.pop_front() {
            for &a in &self.out_links[v] {
                let w = self.links[a].to;
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        (0..self.num_nodes)
            .filter(|&v| v != origin && seen[v])
            .collect()
    }

    /// Longest path measured in links.
    pub fn longest_path_links(&self) -> usize {
        let mut depth = vec![0usize; self.num_nodes];
        for &v in &self.topo_order {
            for &a in &self.out_links[v] {
                let w = self.links[a].to;
                depth[w] = depth[w].max(depth[v] + 1);
            }
        }
        depth.into_iter().max().unwrap_or(0)
    }

    /// Best path from `origin` to every node under `weight`, minimizing when
    /// `maximize` is false. Links failing `allowed` are skipped. Ties go to
    /// the lexicographically smallest node sequence, then link sequence.
    fn best_paths(
        &self,
        origin: usize,
        weight: &[f64],
        maximize: bool,
        allowed: &dyn Fn(usize) -> bool,
    ) -> Vec<Option<(f64, Vec<usize>)>> {
        let mut best: Vec<Option<(f64, Vec<usize>)>> = vec![None; self.num_nodes];
        best[origin] = Some((0.0, Vec::new()));
        for &v in &self.topo_order[self.topo_rank[origin]..] {
            let Some((dist_v, path_v)) = best[v].clone() else {
                continue;
            };
            for &a in &self.out_links[v] {
                if !allowed(a) {
                    continue;
                }
                let w = self.links[a].to;
                let cand = dist_v + weight[a];
                let replace = match &best[w] {
                    None => true,
                    Some((dist_w, path_w)) => {
                        let better = if maximize {
                            cand > *dist_w
                        } else {
                            cand < *dist_w
                        };
                        better
                            || (cand == *dist_w && {
                                let mut p = path_v.clone();
                                p.push(a);
                                self.compare_paths(&p, path_w) == Ordering::Less
                            })
                    }
                };
                if replace {
                    let mut p = path_v.clone();
                    p.push(a);
                    best[w] = Some((cand, p));
                }
            }
        }
        best
    }

    fn compare_paths(&self, a: &[usize], b: &[usize]) -> Ordering {
        let nodes = |p: &[usize]| p.iter().map(|&l| self.links[l].to).collect::<Vec<_>>();
        nodes(a).cmp(&nodes(b)).then_with(|| a.cmp(b))
    }

    /// Serializes in the plain-text network format.
    pub fn to_text(&self, demands: &[Demand]) -> String {
        let mut out = format!("nodes {} links {}\n", self.num_nodes, self.links.len());
        for l in &self.links {
            let _ = writeln!(
                out,
                "link {} {} {} {} {}",
                l.id, l.from, l.to, l.free_flow_time, l.capacity
            );
        }
        for d in demands {
            let _ = writeln!(out, "demand {} {} {}", d.origin, d.dest, d.amount);
        }
        out
    }

    /// Parses the plain-text network format:
    ///
    /// ```text
    /// nodes <N> links <M>
    /// link <id> <from> <to> <free_flow_time> <capacity>   (M lines)
    /// demand <origin> <dest> <amount>
    /// ```
    ///
    /// Tokens are whitespace-separated; `#` starts a comment.
    pub fn parse(text: &str) -> Result<(Self, Vec<Demand>)> {
        let mut header: Option<(usize, usize)> = None;
        let mut links = Vec::new();
        let mut demands = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let num = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|_| err(format!("expected a number, found `{s}`")))
            };
            let int = |s: &str| -> Result<usize> {
                s.parse::<usize>()
                    .map_err(|_| err(format!("expected an integer, found `{s}`")))
            };
            match toks[0] {
                "nodes" => {
                    if toks.len() != 4 || toks[2] != "links" {
                        return Err(err("expected `nodes <N> links <M>`".into()));
                    }
                    if header.is_some() {
                        return Err(err("duplicate header".into()));
                    }
                    header = Some((int(toks[1])?, int(toks[3])?));
                }
                "link" => {
                    if header.is_none() {
                        return Err(err("link before header".into()));
                    }
                    if toks.len() != 6 {
                        return Err(err(
                            "expected `link <id> <from> <to> <free_flow_time> <capacity>`".into(),
                        ));
                    }
                    links.push(Link {
                        id: int(toks[1])?,
                        from: int(toks[2])?,
                        to: int(toks[3])?,
                        free_flow_time: num(toks[4])?,
                        capacity: num(toks[5])?,
                    });
                }
                "demand" => {
                    if toks.len() != 4 {
                        return Err(err("expected `demand <origin> <dest> <amount>`".into()));
                    }
                    let amount = num(toks[3])?;
                    if !(amount >= 0.0) {
                        return Err(err("demand must be nonnegative".into()));
                    }
                    demands.push(Demand {
                        origin: int(toks[1])?,
                        dest: int(toks[2])?,
                        amount,
                    });
                }
                other => return Err(err(format!("unknown record `{other}`"))),
            }
        }
        let (n, m) = header.ok_or(Error::Parse {
            line: 0,
            message: "missing `nodes <N> links <M>` header".into(),
        })?;
        if links.len() != m {
            return Err(Error::Parse {
                line: 0,
                message: format!("header declares {m} links, found {}", links.len()),
            });
        }
        let net = Self::new(n, links)?;
        for d in &demands {
            if d.origin >= n || d.dest >= n {
                return Err(invalid(format!(
                    "demand {} -> {} references an unknown node",
                    d.origin, d.dest
                )));
            }
        }
        Ok((net, demands))
    }
}

/// Link-flow polytope: every demand routed on some path, flows aggregated.
#[derive(Debug, Clone)]
pub struct DagFlowRegion {
    network: DagNetwork,
    demands: Vec<Demand>,
    /// Demand indices grouped by origin.
    by_origin: BTreeMap<usize, Vec<usize>>,
    net_supply: Vec<f64>,
    diameter: f64,
}

impl DagFlowRegion {
    /// Builds the region, checking that every demand is routable.
    pub fn new(network: DagNetwork, demands: Vec<Demand>) -> Result<Self> {
        if demands.is_empty() {
            return Err(invalid("flow region needs at least one demand"));
        }
        let mut by_origin: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut net_supply = vec![0.0; network.num_nodes()];
        for (i, d) in demands.iter().enumerate() {
            if d.origin >= network.num_nodes() || d.dest >= network.num_nodes() {
                return Err(invalid("demand references an unknown node"));
            }
            if d.origin == d.dest {
                return Err(invalid("demand origin equals destination"));
            }
            by_origin.entry(d.origin).or_default().push(i);
            net_supply[d.origin] += d.amount;
            net_supply[d.dest] -= d.amount;
        }
        for (&o, idx) in &by_origin {
            let reach = network.reachable_from(o);
            for &i in idx {
                if reach.binary_search(&demands[i].dest).is_err() {
                    return Err(Error::Disconnected {
                        origin: o,
                        dest: demands[i].dest,
                    });
                }
            }
        }
        let total: f64 = demands.iter().map(|d| d.amount).sum();
        let diameter =
            std::f64::consts::SQRT_2 * total * (network.longest_path_links().max(1) as f64).sqrt();
        Ok(Self {
            network,
            demands,
            by_origin,
            net_supply,
            diameter: diameter.max(f64::MIN_POSITIVE),
        })
    }

    pub fn network(&self) -> &DagNetwork {
        &self.network
    }

    pub fn demands(&self) -> &[Demand] {
        &self.demands
    }

    /// Maximum violation of flow conservation at any node.
    pub fn conservation_violation(&self, x: &DenseVector) -> f64 {
        let mut balance = self.net_supply.clone();
        for l in self.network.links() {
            balance[l.from] -= x[l.id];
            balance[l.to] += x[l.id];
        }
        balance.iter().map(|b| b.abs()).fold(0.0, f64::max)
    }

    fn route(
        &self,
        weight: &[f64],
        maximize: bool,
        allowed: &dyn Fn(usize) -> bool,
    ) -> Result<Vertex> {
        let mut flow = vec![0.0; self.network.num_links()];
        let mut chosen: Vec<Option<Vec<usize>>> = vec![None; self.demands.len()];
        for (&origin, idx) in &self.by_origin {
            let tree = self.network.best_paths(origin, weight, maximize, allowed);
            for &i in idx {
                let d = &self.demands[i];
                let (_, path) = tree[d.dest].as_ref().ok_or(if maximize {
                    Error::Infeasible(format!("no supported path from {} to {}", d.origin, d.dest))
                } else {
                    Error::Disconnected {
                        origin: d.origin,
                        dest: d.dest,
                    }
                })?;
                for &a in path {
                    flow[a] += d.amount;
                }
                chosen[i] = Some(path.clone());
            }
        }
        let mut key = Vec::new();
        for path in chosen.into_iter().flatten() {
            for a in path {
                key.extend_from_slice(&(a as u32).to_le_bytes());
            }
            key.extend_from_slice(&u32::MAX.to_le_bytes());
        }
        Ok(Vertex::dense(
            VertexKey::Encoded(key),
            DenseVector::from_vec_unchecked(flow),
        ))
    }
}

impl Region for DagFlowRegion {
    fn dim(&self) -> usize {
        self.network.num_links()
    }

    /// Routes each demand on a shortest path under `c` (all-or-nothing).
    fn lmo(&self, c: &DenseVector) -> Result<Vertex> {
        check_cost_dim(self.dim(), c)?;
        self.route(c.as_slice(), false, &|_| true)
    }

    /// Nonnegativity plus node balance. For a single demand this is exact;
    /// with several demands it is the aggregate-conservation relaxation.
    fn contains(&self, x: &DenseVector, tol: f64) -> bool {
        x.dim() == self.dim()
            && x.iter().all(|&v| v >= -tol)
            && self.conservation_violation(x) <= tol
    }

    fn diameter_bound(&self) -> f64 {
        self.diameter
    }

    fn supports_away(&self) -> bool {
        true
    }

    fn supports_dicg(&self) -> bool {
        self.demands.len() == 1
    }

    /// Maximum-gradient path restricted to links carrying flow.
    fn dicg_away_vertex(&self, x: &DenseVector, gradient: &DenseVector) -> Result<Vertex> {
        check_cost_dim(self.dim(), x)?;
        check_cost_dim(self.dim(), gradient)?;
        if !self.supports_dicg() {
            return Err(Error::Unsupported(
                "masked away oracle needs a single demand".into(),
            ));
        }
        self.route(gradient.as_slice(), true, &|a| x[a] > ZERO_TOL)
    }

    fn name(&self) -> &str {
        "dag_flow"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::dv;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn link(id: usize, from: usize, to: usize) -> Link {
        Link {
            id,
            from,
            to,
            free_flow_time: 1.0,
            capacity: 1.0,
        }
    }

    fn parallel() -> DagFlowRegion {
        let net = DagNetwork::new(2, vec![link(0, 0, 1), link(1, 0, 1)]).unwrap();
        DagFlowRegion::new(
            net,
            vec![Demand {
                origin: 0,
                dest: 1,
                amount: 1.0,
            }],
        )
        .unwrap()
    }

    fn chain(amount: f64) -> DagFlowRegion {
        // s=0, m=1, t=2; links s→m, m→t, s→t.
        let net = DagNetwork::new(3, vec![link(0, 0, 1), link(1, 1, 2), link(2, 0, 2)]).unwrap();
        DagFlowRegion::new(
            net,
            vec![Demand {
                origin: 0,
                dest: 2,
                amount,
            }],
        )
        .unwrap()
    }

    #[test]
    fn parallel_links() {
        let r = parallel();
        assert_eq!(
            r.lmo(&dv(&[1.0, 2.0])).unwrap().into_point(),
            dv(&[1.0, 0.0])
        );
        assert_eq!(
            r.lmo(&dv(&[1.0, 1.0])).unwrap().into_point(),
            dv(&[1.0, 0.0])
        );
        assert_eq!(
            r.lmo(&dv(&[2.0, 1.0])).unwrap().into_point(),
            dv(&[0.0, 1.0])
        );
    }

    #[test]
    fn chain_prefers_two_hop_route() {
        let r = chain(2.0);
        let v = r.lmo(&dv(&[1.0, 1.0, 3.0])).unwrap();
        assert_eq!(v.into_point(), dv(&[2.0, 2.0, 0.0]));
    }

    #[test]
    fn masked_away_uses_supported_links() {
        let r = chain(1.0);
        let v = r
            .dicg_away_vertex(&dv(&[1.0, 1.0, 0.0]), &dv(&[1.0, 1.0, 3.0]))
            .unwrap();
        assert_eq!(v.into_point(), dv(&[1.0, 1.0, 0.0]));
        let err = r.dicg_away_vertex(&dv(&[0.0, 0.0, 0.0]), &dv(&[1.0, 1.0, 3.0]));
        assert!(matches!(err, Err(Error::Infeasible(_))));
    }

    #[test]
    fn detects_cycles_and_disconnection() {
        let cyc = DagNetwork::new(2, vec![link(0, 0, 1), link(1, 1, 0)]);
        assert!(matches!(cyc, Err(Error::CycleDetected)));
        let net = DagNetwork::new(3, vec![link(0, 0, 1)]).unwrap();
        let r = DagFlowRegion::new(
            net,
            vec![Demand {
                origin: 0,
                dest: 2,
                amount: 1.0,
            }],
        );
        assert!(matches!(r, Err(Error::Disconnected { origin: 0, dest: 2 })));
    }

    #[test]
    fn parse_roundtrip_and_errors() {
        let text = "# toy\nnodes 3 links 3\nlink 0 0 1 1.5 2\nlink 2 0 2 3 1 # direct\nlink 1 1 2 1 2\ndemand 0 2 0.75\n";
        let (net, demands) = DagNetwork::parse(text).unwrap();
        assert_eq!(net.num_links(), 3);
        assert_eq!(net.links()[2].to, 2);
        assert_eq!(
            demands,
            vec![Demand {
                origin: 0,
                dest: 2,
                amount: 0.75
            }]
        );
        let (again, d2) = DagNetwork::parse(&net.to_text(&demands)).unwrap();
        assert_eq!(again.links(), net.links());
        assert_eq!(d2, demands);

        assert!(matches!(
            DagNetwork::parse("nodes 2 links 1\nlink 0 0 1 x 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(DagNetwork::parse("link 0 0 1 1 1\n").is_err());
        assert!(DagNetwork::parse("nodes 2 links 2\nlink 0 0 1 1 1\n").is_err());
        assert!(DagNetwork::parse("nodes 2 links 1\nlink 0 0 1 1 1\nbogus\n").is_err());
    }

    fn all_paths(net: &DagNetwork, from: usize, to: usize) -> Vec<Vec<usize>> {
        if from == to {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for &a in &net.out_links[from] {
            for mut rest in all_paths(net, net.links[a].to, to) {
                rest.insert(0, a);
                out.push(rest);
            }
        }
        out
    }

    #[test]
    fn lmo_matches_path_enumeration_on_random_dags() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let n = rng.random_range(3..=12);
            let mut links = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.random_bool(0.35) {
                        links.push(Link {
                            id: links.len(),
                            from: u,
                            to: v,
                            free_flow_time: 1.0,
                            capacity: 1.0,
                        });
                    }
                }
            }
            if links.is_empty() {
                continue;
            }
            let net = DagNetwork::new(n, links).unwrap();
            let mut demands = Vec::new();
            for o in 0..n {
                for d in net.reachable_from(o) {
                    if rng.random_bool(0.5) {
                        demands.push(Demand {
                            origin: o,
                            dest: d,
                            amount: rng.random_range(0.0..1.0),
                        });
                    }
                }
            }
            if demands.is_empty() {
                continue;
            }
            let region = DagFlowRegion::new(net.clone(), demands.clone()).unwrap();
            let cost = DenseVector::new(
                (0..net.num_links())
                    .map(|_| rng.random_range(-1.0..2.0))
                    .collect(),
            )
            .unwrap();
            let v = region.lmo(&cost).unwrap();
            let brute: f64 = demands
                .iter()
                .map(|d| {
                    d.amount
                        * all_paths(&net, d.origin, d.dest)
                            .iter()
                            .map(|p| p.iter().map(|&a| cost[a]).sum::<f64>())
                            .fold(f64::INFINITY, f64::min)
                })
                .sum();
            assert!(
                (v.dot(&cost) - brute).abs() < 1e-9,
                "{} vs {}",
                v.dot(&cost),
                brute
            );
            assert!(region.contains(&v.point(), 1e-9));
        }
    }
}

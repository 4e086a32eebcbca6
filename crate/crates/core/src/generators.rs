//! Instance factories: the worked examples, seeded random families, and the
//! Set Cover / Vertex Cover reductions used as hardness generators.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{AgentId, HrInstance, Market, ProgramId, SmfqInstance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid set cover instance: {0}")]
    InvalidSetCover(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
}

fn names(prefix: &str, range: std::ops::RangeInclusive<usize>) -> Vec<String> {
    range.map(|i| format!("{prefix}{i}")).collect()
}

fn build_smfq(
    agents: Vec<String>,
    programs: Vec<String>,
    agent_prefs: Vec<Vec<usize>>,
    program_prefs: Vec<Vec<usize>>,
    costs: Vec<i64>,
) -> SmfqInstance {
    let market = Market::from_indices(
        agents,
        programs,
        agent_prefs
            .into_iter()
            .map(|l| l.into_iter().map(ProgramId).collect())
            .collect(),
        program_prefs
            .into_iter()
            .map(|l| l.into_iter().map(AgentId).collect())
            .collect(),
    )
    .expect("generated market is valid");
    SmfqInstance::new(market, costs).expect("generated instance is valid")
}

/// The five-agent, two-program example: `(G, H)` where G carries quotas
/// (2, 1) and H carries costs (1, 2). Both share the same preferences.
pub fn fig1() -> (HrInstance, SmfqInstance) {
    let agents = [
        ("a1", vec!["p1", "p2"]),
        ("a2", vec!["p2", "p1"]),
        ("a3", vec!["p2", "p1"]),
        ("a4", vec!["p2", "p1"]),
        ("a5", vec!["p2"]),
    ];
    let p1 = vec!["a2", "a4", "a1", "a3"];
    let p2 = vec!["a1", "a2", "a5", "a3", "a4"];
    let g = HrInstance::from_names(
        &agents,
        &[("p1", 1, 2, p1.clone()), ("p2", 2, 1, p2.clone())],
    )
    .expect("fig1 G is valid");
    let h = SmfqInstance::from_names(&agents, &[("p1", 1, p1), ("p2", 2, p2)])
        .expect("fig1 H is valid");
    (g, h)
}

/// Family on which the per-agent minimum-cost lower bound is off by
/// exactly `ℓ_p = n`: lower bound 1, optimum `n`.
pub fn fig2(n: usize) -> Result<SmfqInstance, GeneratorError> {
    if n < 2 {
        return Err(GeneratorError::InvalidParameter(format!(
            "fig2 needs n >= 2, got {n}"
        )));
    }
    // programs: 0 = p0 (cost 0), 1 = p1 (cost 1), 2 = p2 (cost n)
    let mut agent_prefs = vec![vec![1, 0]; n - 1];
    agent_prefs.push(vec![1, 2]);
    let program_prefs = vec![(0..n - 1).collect(), (0..n).collect(), vec![n - 1]];
    Ok(build_smfq(
        names("a", 1..=n),
        names("p", 0..=2),
        agent_prefs,
        program_prefs,
        vec![0, 1, n as i64],
    ))
}

fn check_example_params(n: usize, alpha: i64) -> Result<(), GeneratorError> {
    if n < 3 || alpha < 3 {
        return Err(GeneratorError::InvalidParameter(format!(
            "examples need n >= 3 and alpha >= 3, got n={n}, alpha={alpha}"
        )));
    }
    Ok(())
}

/// Instance where promotion beats restriction to minimum-cost programs.
pub fn example1(n: usize, alpha: i64) -> Result<SmfqInstance, GeneratorError> {
    check_example_params(n, alpha)?;
    let mut agent_prefs = vec![vec![1, 0]; n - 1];
    agent_prefs.push(vec![1]);
    let program_prefs = vec![(0..n - 1).collect(), (0..n).rev().collect()];
    Ok(build_smfq(
        names("a", 1..=n),
        names("p", 1..=2),
        agent_prefs,
        program_prefs,
        vec![1, alpha],
    ))
}

/// Instance where restriction to minimum-cost programs beats promotion.
pub fn example2(n: usize, alpha: i64) -> Result<SmfqInstance, GeneratorError> {
    check_example_params(n, alpha)?;
    let mut agent_prefs = vec![vec![1, 2, 0]; n - 2];
    agent_prefs.push(vec![1]);
    agent_prefs.push(vec![2]);
    let firsts: Vec<usize> = (0..n - 2).collect();
    let mut p2 = vec![n - 2];
    p2.extend(&firsts);
    let mut p3 = firsts.clone();
    p3.push(n - 1);
    Ok(build_smfq(
        names("a", 1..=n),
        names("p", 1..=3),
        agent_prefs,
        vec![firsts, p2, p3],
        vec![1, 2, alpha],
    ))
}

/// Set Cover where every element occurs in exactly `f` sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetCoverInstance {
    sets: Vec<Vec<usize>>,
    num_elements: usize,
    f: usize,
    target: Option<usize>,
}

impl SetCoverInstance {
    /// `sets[i]` lists the (0-based) elements of set `i`.
    pub fn new(
        sets: Vec<Vec<usize>>,
        num_elements: usize,
        f: usize,
    ) -> Result<Self, GeneratorError> {
        if f < 2 {
            return Err(GeneratorError::InvalidSetCover(format!(
                "f must be >= 2, got {f}"
            )));
        }
        let mut occurrences = vec![0usize; num_elements];
        for (i, set) in sets.iter().enumerate() {
            let mut seen = vec![false; num_elements];
            for &e in set {
                if e >= num_elements {
                    return Err(GeneratorError::InvalidSetCover(format!(
                        "set {i} contains element {e} outside 0..{num_elements}"
                    )));
                }
                if std::mem::replace(&mut seen[e], true) {
                    return Err(GeneratorError::InvalidSetCover(format!(
                        "set {i} lists element {e} twice"
                    )));
                }
                occurrences[e] += 1;
            }
        }
        if let Some(e) = occurrences.iter().position(|&c| c != f) {
            return Err(GeneratorError::InvalidSetCover(format!(
                "element {e} occurs in {} sets, expected {f}",
                occurrences[e]
            )));
        }
        Ok(SetCoverInstance {
            sets,
            num_elements,
            f,
            target: None,
        })
    }

    pub fn with_target(mut self, k: usize) -> Self {
        self.target = Some(k);
        self
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn occurrence(&self) -> usize {
        self.f
    }

    pub fn target(&self) -> Option<usize> {
        self.target
    }

    /// Indices of the sets containing element `e`, ascending.
    pub fn sets_containing(&self, e: usize) -> Vec<usize> {
        (0..self.sets.len())
            .filter(|&i| self.sets[i].contains(&e))
            .collect()
    }
}

/// Reduces Set Cover to MINSUM: `m + n` agents, `m + f − 1` programs, every
/// agent list of length `f`, costs in {0, 1}, and a master list on both
/// sides. The optimum equals `n + τ` for minimum cover size `τ`.
///
/// Agents are `s1..sm` (set-agents) then `e1..en` (element-agents);
/// programs are `q1..qm` (set-programs), `p`, then `r1..r{f-2}`.
pub fn reduce_set_cover(sc: &SetCoverInstance) -> SmfqInstance {
    let m = sc.num_sets();
    let n = sc.num_elements();
    let f = sc.occurrence();
    let hub = m;
    let pad = |t: usize| m + 1 + t;

    let mut agent_prefs = Vec::with_capacity(m + n);
    for i in 0..m {
        let mut list = vec![i, hub];
        list.extend((0..f - 2).map(pad));
        agent_prefs.push(list);
    }
    for e in 0..n {
        agent_prefs.push(sc.sets_containing(e));
    }

    let mut program_prefs = Vec::with_capacity(m + f - 1);
    for (i, set) in sc.sets().iter().enumerate() {
        let mut members: Vec<usize> = set.iter().map(|&e| m + e).collect();
        members.sort_unstable();
        let mut list = vec![i];
        list.extend(members);
        program_prefs.push(list);
    }
    for _ in 0..f - 1 {
        program_prefs.push((0..m).collect());
    }

    let mut programs = names("q", 1..=m);
    programs.push("p".to_owned());
    programs.extend((1..=f - 2).map(|t| format!("r{t}")));
    let mut costs = vec![1; m];
    costs.push(0);
    costs.extend(std::iter::repeat_n(1, f - 2));

    let mut agents = names("s", 1..=m);
    agents.extend((1..=n).map(|j| format!("e{j}")));
    build_smfq(agents, programs, agent_prefs, program_prefs, costs)
}

/// A simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphInstance {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl GraphInstance {
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self, GeneratorError> {
        let mut seen = std::collections::HashSet::new();
        let mut normalized = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= num_vertices || v >= num_vertices {
                return Err(GeneratorError::InvalidGraph(format!(
                    "edge ({u}, {v}) outside 0..{num_vertices}"
                )));
            }
            if u == v {
                return Err(GeneratorError::InvalidGraph(format!("self-loop at {u}")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(GeneratorError::InvalidGraph(format!(
                    "repeated edge ({u}, {v})"
                )));
            }
            normalized.push(e);
        }
        Ok(GraphInstance {
            num_vertices,
            edges: normalized,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Edges with endpoints ordered `(min, max)`, in input order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// Reduces Vertex Cover to MINSUM with three distinct costs {0, 3, 2n}:
/// `m + mn` agents and `2n + 1` programs.
///
/// Agents are `v{i}_{t}` (m copies per vertex, vertex-major) then `e1..em`;
/// programs are `x1..xn` (cost 3), `y1..yn` (cost 2n), then `p` (cost 0).
pub fn reduce_vertex_cover(g: &GraphInstance) -> SmfqInstance {
    let n = g.num_vertices();
    let m = g.edges().len();
    let vertex_agent = |i: usize, t: usize| i * m + t;
    let edge_agent = |j: usize| n * m + j;
    let low = |i: usize| i;
    let high = |i: usize| n + i;
    let hub = 2 * n;

    let mut agents = Vec::with_capacity(m + m * n);
    let mut agent_prefs = Vec::with_capacity(m + m * n);
    for i in 0..n {
        for t in 0..m {
            agents.push(format!("v{}_{}", i + 1, t + 1));
            agent_prefs.push(vec![low(i), high(i), hub]);
        }
    }
    for (j, &(u, v)) in g.edges().iter().enumerate() {
        agents.push(format!("e{}", j + 1));
        agent_prefs.push(vec![high(u), high(v)]);
    }

    let mut program_prefs = vec![Vec::new(); 2 * n + 1];
    for i in 0..n {
        let copies: Vec<usize> = (0..m).map(|t| vertex_agent(i, t)).collect();
        program_prefs[low(i)] = copies.clone();
        let mut list = copies;
        list.extend(
            g.edges()
                .iter()
                .enumerate()
                .filter(|(_, &(u, v))| u == i || v == i)
                .map(|(j, _)| edge_agent(j)),
        );
        program_prefs[high(i)] = list;
    }
    program_prefs[hub] = (0..n * m).collect();

    let mut programs = names("x", 1..=n);
    programs.extend(names("y", 1..=n));
    programs.push("p".to_owned());
    let mut costs = vec![3; n];
    costs.extend(std::iter::repeat_n(2 * n as i64, n));
    costs.push(0);
    build_smfq(agents, programs, agent_prefs, program_prefs, costs)
}

/// Parameters shared by the random families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomParams {
    pub agents: usize,
    pub programs: usize,
    pub list_len: usize,
    pub cost_max: u64,
    pub seed: u64,
}

impl RandomParams {
    fn check(&self) -> Result<(), GeneratorError> {
        if self.programs == 0 || self.list_len == 0 {
            return Err(GeneratorError::InvalidParameter(
                "programs and list_len must be positive".into(),
            ));
        }
        Ok(())
    }
}

struct RawMarket {
    agent_prefs: Vec<Vec<usize>>,
    program_prefs: Vec<Vec<usize>>,
    costs: Vec<i64>,
}

fn random_raw(params: &RandomParams, master: bool, rng: &mut ChaCha8Rng) -> RawMarket {
    let RandomParams {
        agents: na,
        programs: nb,
        list_len,
        cost_max,
        ..
    } = *params;
    let len = list_len.min(nb);

    // Master orders: position of each agent / program in the global ranking.
    let mut agent_pos: Vec<usize> = (0..na).collect();
    let mut program_pos: Vec<usize> = (0..nb).collect();
    if master {
        agent_pos.shuffle(rng);
        program_pos.shuffle(rng);
    }

    let mut agent_prefs = Vec::with_capacity(na);
    for _ in 0..na {
        let mut list = index::sample(rng, nb, len).into_vec();
        if master {
            list.sort_by_key(|&p| program_pos[p]);
        }
        agent_prefs.push(list);
    }
    let mut program_prefs = vec![Vec::new(); nb];
    for (a, list) in agent_prefs.iter().enumerate() {
        for &p in list {
            program_prefs[p].push(a);
        }
    }
    for list in &mut program_prefs {
        if master {
            list.sort_by_key(|&a| agent_pos[a]);
        } else {
            list.shuffle(rng);
        }
    }
    let costs = (0..nb)
        .map(|_| rng.gen_range(0..=cost_max) as i64)
        .collect();
    RawMarket {
        agent_prefs,
        program_prefs,
        costs,
    }
}

/// Seeded random SMFQ instance with uniform costs in `[0, cost_max]`.
pub fn random(params: &RandomParams) -> Result<SmfqInstance, GeneratorError> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let raw = random_raw(params, false, &mut rng);
    Ok(build_smfq(
        names("a", 1..=params.agents),
        names("p", 1..=params.programs),
        raw.agent_prefs,
        raw.program_prefs,
        raw.costs,
    ))
}

/// As [`random`], but every list is a sub-order of one global agent order
/// and one global program order.
pub fn master_list(params: &RandomParams) -> Result<SmfqInstance, GeneratorError> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let raw = random_raw(params, true, &mut rng);
    Ok(build_smfq(
        names("a", 1..=params.agents),
        names("p", 1..=params.programs),
        raw.agent_prefs,
        raw.program_prefs,
        raw.costs,
    ))
}

/// Seeded random HR instance with quotas uniform in `[1, max_quota]`.
pub fn random_hr(params: &RandomParams, max_quota: u32) -> Result<HrInstance, GeneratorError> {
    params.check()?;
    if max_quota == 0 {
        return Err(GeneratorError::InvalidParameter(
            "max_quota must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let raw = random_raw(params, false, &mut rng);
    let quotas = (0..params.programs)
        .map(|_| rng.gen_range(1..=max_quota) as i64)
        .collect();
    let market = Market::from_indices(
        names("a", 1..=params.agents),
        names("p", 1..=params.programs),
        raw.agent_prefs
            .into_iter()
            .map(|l| l.into_iter().map(ProgramId).collect())
            .collect(),
        raw.program_prefs
            .into_iter()
            .map(|l| l.into_iter().map(AgentId).collect())
            .collect(),
    )
    .expect("generated market is valid");
    Ok(HrInstance::new(market, quotas, raw.costs).expect("generated instance is valid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_subsequence<T: PartialEq>(sub: &[T], of: &[T]) -> bool {
        let mut it = of.iter();
        sub.iter().all(|x| it.any(|y| y == x))
    }

    /// Two lists are order-consistent when their common items appear in
    /// the same relative order.
    fn order_consistent<T: PartialEq + Copy>(x: &[T], y: &[T]) -> bool {
        let cx: Vec<T> = x.iter().copied().filter(|v| y.contains(v)).collect();
        let cy: Vec<T> = y.iter().copied().filter(|v| x.contains(v)).collect();
        cx == cy
    }

    #[test]
    fn fig1_shares_preferences() {
        let (g, h) = fig1();
        assert_eq!(g.market(), h.market());
        assert_eq!(g.quotas(), &[2, 1]);
        assert_eq!(h.costs(), &[1, 2]);
    }

    #[test]
    fn fig2_shape() {
        for n in 2..8 {
            let inst = fig2(n).unwrap();
            assert_eq!(inst.market().max_program_list_len(), n);
            assert_eq!(inst.costs(), &[0, 1, n as u64]);
        }
        assert!(fig2(1).is_err());
    }

    #[test]
    fn example_shapes() {
        let e1 = example1(5, 100).unwrap();
        assert_eq!(e1.market().num_agents(), 5);
        assert_eq!(e1.costs(), &[1, 100]);
        let e2 = example2(5, 100).unwrap();
        assert_eq!(e2.costs(), &[1, 2, 100]);
        assert_eq!(e2.market().agent_prefs(AgentId(3)), &[ProgramId(1)]);
        assert_eq!(e2.market().agent_prefs(AgentId(4)), &[ProgramId(2)]);
        assert!(example1(2, 100).is_err());
        assert!(example2(5, 2).is_err());
    }

    #[test]
    fn set_cover_reduction_shape() {
        let sc = SetCoverInstance::new(vec![vec![0], vec![0, 1], vec![1]], 2, 2).unwrap();
        let h = reduce_set_cover(&sc);
        let mk = h.market();
        assert_eq!(mk.num_agents(), 3 + 2);
        assert_eq!(mk.num_programs(), 3 + 2 - 1);
        assert!(mk.agents().all(|a| mk.agent_prefs(a).len() == 2));

        let sc3 =
            SetCoverInstance::new(vec![vec![0, 1], vec![0], vec![0, 1], vec![1]], 2, 3).unwrap();
        let h3 = reduce_set_cover(&sc3);
        let mk3 = h3.market();
        assert_eq!(mk3.num_programs(), 4 + 3 - 1);
        assert!(mk3.agents().all(|a| mk3.agent_prefs(a).len() == 3));
        let mut distinct: Vec<u64> = h3.costs().to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        assert_eq!(distinct, vec![0, 1]);
    }

    #[test]
    fn set_cover_reduction_has_master_lists() {
        let sc =
            SetCoverInstance::new(vec![vec![0, 2], vec![0, 1], vec![1, 2], vec![]], 3, 2).unwrap();
        let h = reduce_set_cover(&sc);
        let mk = h.market();
        let agent_master: Vec<AgentId> = mk.agents().collect();
        let program_master: Vec<ProgramId> = mk.programs().collect();
        assert!(mk
            .agents()
            .all(|a| is_subsequence(mk.agent_prefs(a), &program_master)));
        assert!(mk
            .programs()
            .all(|p| is_subsequence(mk.program_prefs(p), &agent_master)));
    }

    #[test]
    fn set_cover_validation() {
        assert!(SetCoverInstance::new(vec![vec![0]], 1, 2).is_err());
        assert!(SetCoverInstance::new(vec![vec![0], vec![0]], 1, 1).is_err());
        assert!(SetCoverInstance::new(vec![vec![0, 0], vec![]], 1, 2).is_err());
    }

    #[test]
    fn vertex_cover_reduction_shape() {
        let g = GraphInstance::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let h = reduce_vertex_cover(&g);
        assert_eq!(h.market().num_agents(), 3 + 3 * 3);
        assert_eq!(h.market().num_programs(), 2 * 3 + 1);
        let mut distinct: Vec<u64> = h.costs().to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        assert_eq!(distinct, vec![0, 3, 6]);
        assert!(GraphInstance::new(2, vec![(0, 0)]).is_err());
        assert!(GraphInstance::new(2, vec![(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn random_is_seed_deterministic() {
        let params = RandomParams {
            agents: 6,
            programs: 4,
            list_len: 3,
            cost_max: 9,
            seed: 42,
        };
        assert_eq!(random(&params).unwrap(), random(&params).unwrap());
        let other = RandomParams { seed: 43, ..params };
        assert_ne!(random(&params).unwrap(), random(&other).unwrap());
        let complete = random(&RandomParams {
            list_len: 4,
            ..params
        })
        .unwrap();
        let mk = complete.market();
        assert!(mk.agents().all(|a| mk.agent_prefs(a).len() == 4));
        assert!(complete.costs().iter().all(|&c| c <= 9));
    }

    #[test]
    fn master_list_is_order_consistent() {
        for seed in 0..20 {
            let inst = master_list(&RandomParams {
                agents: 6,
                programs: 5,
                list_len: 3,
                cost_max: 5,
                seed,
            })
            .unwrap();
            let mk = inst.market();
            for a in mk.agents() {
                for b in mk.agents() {
                    assert!(order_consistent(mk.agent_prefs(a), mk.agent_prefs(b)));
                }
            }
            for p in mk.programs() {
                for q in mk.programs() {
                    assert!(order_consistent(mk.program_prefs(p), mk.program_prefs(q)));
                }
            }
        }
    }

    #[test]
    fn order_consistency_oracle_sanity() {
        assert!(order_consistent(&[1, 2, 3], &[1, 3]));
        assert!(!order_consistent(&[1, 2, 3], &[3, 1]));
        assert!(is_subsequence(&[1, 3], &[1, 2, 3]));
        assert!(!is_subsequence(&[3, 1], &[1, 2, 3]));
    }

    #[test]
    fn random_hr_quotas_in_range() {
        let hr = random_hr(
            &RandomParams {
                agents: 6,
                programs: 3,
                list_len: 2,
                cost_max: 3,
                seed: 7,
            },
            2,
        )
        .unwrap();
        assert!(hr.quotas().iter().all(|&q| (1..=2).contains(&q)));
    }
}

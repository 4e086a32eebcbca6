//! Exact MINSUM by enumerating one cost per agent.
//!
//! For every tuple `⟨c¹, …, c^|A|⟩` with `cⁱ` drawn from the distinct costs
//! on agent `aᵢ`'s list, keep only the edges `(aᵢ, p)` with `c(p) = cⁱ`,
//! then repeatedly delete edges that would be envied: if `aᵢ`'s best
//! surviving program is `p`, no program `p' >_{aᵢ} p` may hold an agent
//! that `p'` ranks below `aᵢ`. A tuple survives when no agent is isolated,
//! and then matching every agent to its best surviving program is
//! envy-free. The optimum's own tuple always survives with its edges
//! intact, so the cheapest surviving candidate is optimal. Running time is
//! `O(k^|A| · poly(|E|))` where `k` bounds the distinct costs per agent.

use rayon::prelude::*;

use crate::error::SolveError;
use crate::model::{is_envy_free, AgentId, Budget, Matching, ProgramId, SmfqInstance, SolveReport};

/// The deduplicated costs on each agent's list, ascending.
pub fn distinct_costs_per_agent(instance: &SmfqInstance) -> Vec<Vec<u64>> {
    let market = instance.market();
    market
        .agents()
        .map(|a| {
            let mut costs: Vec<u64> = market
                .agent_prefs(a)
                .iter()
                .map(|&p| instance.cost(p))
                .collect();
            costs.sort_unstable();
            costs.dedup();
            costs
        })
        .collect()
}

/// `k`: the largest number of distinct costs on any one agent's list.
pub fn max_distinct_costs(instance: &SmfqInstance) -> usize {
    distinct_costs_per_agent(instance)
        .iter()
        .map(Vec::len)
        .max()
        .unwrap_or(0)
}

/// One cost per agent, each taken from that agent's own list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CostTuple(Vec<u64>);

impl CostTuple {
    /// Checks that `choice[i]` is a cost appearing on agent `i`'s list.
    pub fn new(instance: &SmfqInstance, choice: Vec<u64>) -> Option<Self> {
        let market = instance.market();
        let valid = choice.len() == market.num_agents()
            && market.agents().all(|a| {
                market
                    .agent_prefs(a)
                    .iter()
                    .any(|&p| instance.cost(p) == choice[a.0])
            });
        valid.then_some(CostTuple(choice))
    }

    /// Each agent's cost of its first-choice program.
    pub fn top_choice(instance: &SmfqInstance) -> Self {
        let market = instance.market();
        CostTuple(
            market
                .agents()
                .map(|a| instance.cost(market.agent_prefs(a)[0]))
                .collect(),
        )
    }

    pub fn costs(&self) -> &[u64] {
        &self.0
    }
}

/// Surviving edges, tracked per agent in its preference order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrunedGraph {
    // alive[a][r]: edge between a and its r-th choice
    alive: Vec<Vec<bool>>,
    degree: Vec<usize>,
}

impl PrunedGraph {
    pub fn degree(&self, a: AgentId) -> usize {
        self.degree[a.0]
    }

    pub fn contains(&self, instance: &SmfqInstance, a: AgentId, p: ProgramId) -> bool {
        instance
            .market()
            .agent_rank(a, p)
            .is_some_and(|r| self.alive[a.0][r])
    }

    /// `a`'s most preferred surviving program.
    pub fn top(&self, instance: &SmfqInstance, a: AgentId) -> Option<ProgramId> {
        self.alive[a.0]
            .iter()
            .position(|&x| x)
            .map(|r| instance.market().agent_prefs(a)[r])
    }

    /// Surviving edges ordered by agent, then by the agent's preference.
    pub fn edges(&self, instance: &SmfqInstance) -> Vec<(AgentId, ProgramId)> {
        let market = instance.market();
        market
            .agents()
            .flat_map(|a| {
                market
                    .agent_prefs(a)
                    .iter()
                    .zip(&self.alive[a.0])
                    .filter(|(_, &alive)| alive)
                    .map(move |(&p, _)| (a, p))
            })
            .collect()
    }

    /// Every agent at its top surviving program; `None` if some agent is
    /// isolated.
    pub fn top_choice_matching(&self, instance: &SmfqInstance) -> Option<Matching> {
        instance
            .market()
            .agents()
            .map(|a| self.top(instance, a).map(Some))
            .collect::<Option<Vec<_>>>()
            .map(Matching::from_assignment)
    }
}

/// The subgraph with exactly the edges `(aᵢ, p)` where `c(p) = choice[i]`.
pub fn build_tuple_subgraph(instance: &SmfqInstance, tuple: &CostTuple) -> PrunedGraph {
    let market = instance.market();
    let alive: Vec<Vec<bool>> = market
        .agents()
        .map(|a| {
            market
                .agent_prefs(a)
                .iter()
                .map(|&p| instance.cost(p) == tuple.0[a.0])
                .collect()
        })
        .collect();
    let degree = alive
        .iter()
        .map(|l| l.iter().filter(|&&x| x).count())
        .collect();
    PrunedGraph { alive, degree }
}

/// Pruning isolated this agent, so the tuple admits no A-perfect envy-free
/// matching.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IsolatedAgent(pub AgentId);

/// Envy pruning to a fixed point, scanning agents in input order.
pub fn prune(instance: &SmfqInstance, graph: PrunedGraph) -> Result<PrunedGraph, IsolatedAgent> {
    let order: Vec<AgentId> = instance.market().agents().collect();
    prune_with_order(instance, graph, &order)
}

/// Envy pruning with agents scanned in `order` on every pass. Stops at the
/// first agent whose degree drops to zero.
pub fn prune_with_order(
    instance: &SmfqInstance,
    mut graph: PrunedGraph,
    order: &[AgentId],
) -> Result<PrunedGraph, IsolatedAgent> {
    let market = instance.market();
    if let Some(a) = market.agents().find(|&a| graph.degree[a.0] == 0) {
        return Err(IsolatedAgent(a));
    }
    loop {
        let mut changed = false;
        for &ai in order {
            let top = graph.alive[ai.0]
                .iter()
                .position(|&x| x)
                .expect("isolation is reported as soon as it happens");
            for &better in &market.agent_prefs(ai)[..top] {
                let rank = market.program_rank(better, ai).expect("mutual lists");
                for &below in &market.program_prefs(better)[rank + 1..] {
                    let r = market.agent_rank(below, better).expect("mutual lists");
                    if graph.alive[below.0][r] {
                        graph.alive[below.0][r] = false;
                        graph.degree[below.0] -= 1;
                        changed = true;
                        if graph.degree[below.0] == 0 {
                            return Err(IsolatedAgent(below));
                        }
                    }
                }
            }
        }
        if !changed {
            return Ok(graph);
        }
    }
}

/// Candidate matching for one tuple, if the tuple survives pruning.
pub fn evaluate_tuple(instance: &SmfqInstance, tuple: &CostTuple) -> Option<Matching> {
    let graph = prune(instance, build_tuple_subgraph(instance, tuple)).ok()?;
    graph.top_choice_matching(instance)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ExactOptions {
    pub budget: Budget,
    /// Worker threads for tuple evaluation; `None` or 1 is sequential.
    pub jobs: Option<usize>,
}

/// Mixed-radix view of the tuple space; agent 0 is the most significant
/// digit, so index order is lexicographic order.
struct TupleSpace {
    costs: Vec<Vec<u64>>,
    total: u128,
}

impl TupleSpace {
    fn new(instance: &SmfqInstance) -> Self {
        let costs = distinct_costs_per_agent(instance);
        let total = costs
            .iter()
            .try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128))
            .unwrap_or(u128::MAX);
        TupleSpace { costs, total }
    }

    fn tuple(&self, mut index: u64) -> CostTuple {
        let mut choice = vec![0; self.costs.len()];
        for (slot, costs) in choice.iter_mut().zip(&self.costs).rev() {
            let radix = costs.len() as u64;
            *slot = costs[(index % radix) as usize];
            index /= radix;
        }
        CostTuple(choice)
    }
}

fn candidate(
    instance: &SmfqInstance,
    space: &TupleSpace,
    index: u64,
) -> Option<Result<(u64, u64, Matching), SolveError>> {
    let tuple = space.tuple(index);
    let m = evaluate_tuple(instance, &tuple)?;
    if !m.is_a_perfect() || !is_envy_free(instance.market(), &m) {
        return Some(Err(SolveError::InvariantViolated(format!(
            "tuple {:?} produced a matching that is not A-perfect and envy-free",
            tuple.costs()
        ))));
    }
    Some(Ok((instance.total_cost(&m), index, m)))
}

/// Minimum total-cost A-perfect envy-free matching. Among equal-cost
/// candidates the lexicographically first tuple wins, with or without
/// worker threads.
pub fn solve_minsum_exact(
    instance: &SmfqInstance,
    options: ExactOptions,
) -> Result<SolveReport, SolveError> {
    let space = TupleSpace::new(instance);
    options.budget.check(space.total)?;
    let total = space.total as u64;

    let best = match options.jobs {
        Some(jobs) if jobs > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| SolveError::InvariantViolated(format!("thread pool: {e}")))?;
            pool.install(|| {
                (0..total)
                    .into_par_iter()
                    .filter_map(|i| candidate(instance, &space, i))
                    .try_reduce_with(|x, y| Ok(if (y.0, y.1) < (x.0, x.1) { y } else { x }))
            })
            .transpose()?
        }
        _ => {
            let mut best: Option<(u64, u64, Matching)> = None;
            for i in 0..total {
                if let Some(c) = candidate(instance, &space, i) {
                    let c = c?;
                    if best.as_ref().is_none_or(|b| c.0 < b.0) {
                        best = Some(c);
                    }
                }
            }
            best
        }
    };
    let (_, _, matching) = best.ok_or_else(|| {
        SolveError::InvariantViolated("the top-choice cost tuple did not survive pruning".into())
    })?;
    Ok(SolveReport::total_cost(instance, matching, "exact", true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{fig1, fig2, random, RandomParams};
    use proptest::prelude::*;

    fn tuple(instance: &SmfqInstance, c: &[u64]) -> CostTuple {
        CostTuple::new(instance, c.to_vec()).expect("valid tuple")
    }

    fn edge_names(instance: &SmfqInstance, g: &PrunedGraph) -> Vec<(String, String)> {
        let mk = instance.market();
        g.edges(instance)
            .into_iter()
            .map(|(a, p)| (mk.agent_name(a).to_owned(), mk.program_name(p).to_owned()))
            .collect()
    }

    fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
        v.iter()
            .map(|(a, p)| (a.to_string(), p.to_string()))
            .collect()
    }

    #[test]
    fn distinct_costs() {
        let (_, h) = fig1();
        let d = distinct_costs_per_agent(&h);
        assert_eq!(d[..4], vec![vec![1, 2]; 4][..]);
        assert_eq!(d[4], vec![2]);
        assert_eq!(max_distinct_costs(&h), 2);

        let f = fig2(4).unwrap();
        let d = distinct_costs_per_agent(&f);
        assert!(d[..3].iter().all(|c| c == &vec![0, 1]));
        assert_eq!(d[3], vec![1, 4]);
    }

    #[test]
    fn tuple_subgraphs() {
        let (_, h) = fig1();
        let g = build_tuple_subgraph(&h, &tuple(&h, &[1, 2, 2, 2, 2]));
        assert_eq!(
            edge_names(&h, &g),
            pairs(&[
                ("a1", "p1"),
                ("a2", "p2"),
                ("a3", "p2"),
                ("a4", "p2"),
                ("a5", "p2")
            ])
        );
        let g = build_tuple_subgraph(&h, &tuple(&h, &[2, 1, 1, 1, 2]));
        assert_eq!(
            edge_names(&h, &g),
            pairs(&[
                ("a1", "p2"),
                ("a2", "p1"),
                ("a3", "p1"),
                ("a4", "p1"),
                ("a5", "p2")
            ])
        );
        assert!(CostTuple::new(&h, vec![1, 1, 1, 1, 1]).is_none());
    }

    #[test]
    fn top_choice_tuple_prunes_nothing() {
        let (_, h) = fig1();
        let g = build_tuple_subgraph(&h, &CostTuple::top_choice(&h));
        assert_eq!(prune(&h, g.clone()).unwrap(), g);
    }

    #[test]
    fn fig1_pruning_isolates_a5() {
        let (_, h) = fig1();
        let g = build_tuple_subgraph(&h, &tuple(&h, &[1, 1, 1, 1, 2]));
        let err = prune(&h, g).unwrap_err();
        assert_eq!(h.market().agent_name(err.0), "a5");
    }

    #[test]
    fn fig1_pruning_survivor() {
        let (_, h) = fig1();
        let g = build_tuple_subgraph(&h, &tuple(&h, &[1, 2, 1, 1, 2]));
        let g = prune(&h, g).unwrap();
        let m = g.top_choice_matching(&h).unwrap();
        let expected = Matching::from_named_pairs(
            h.market(),
            &[
                ("a1", "p1"),
                ("a2", "p2"),
                ("a3", "p1"),
                ("a4", "p1"),
                ("a5", "p2"),
            ],
        )
        .unwrap();
        assert_eq!(m, expected);
    }

    #[test]
    fn fig1_and_fig2_optima() {
        let (_, h) = fig1();
        assert_eq!(
            solve_minsum_exact(&h, ExactOptions::default())
                .unwrap()
                .objective,
            7
        );
        let f = fig2(5).unwrap();
        assert_eq!(
            solve_minsum_exact(&f, ExactOptions::default())
                .unwrap()
                .objective,
            5
        );
    }

    #[test]
    fn single_agent_takes_cheapest_most_preferred() {
        let inst = SmfqInstance::from_names(
            &[("a", vec!["p1", "p2", "p3"])],
            &[
                ("p1", 4, vec!["a"]),
                ("p2", 1, vec!["a"]),
                ("p3", 1, vec!["a"]),
            ],
        )
        .unwrap();
        let r = solve_minsum_exact(&inst, ExactOptions::default()).unwrap();
        assert_eq!(r.objective, 1);
        assert_eq!(r.matching.get(AgentId(0)), Some(ProgramId(1)));
    }

    #[test]
    fn budget_guard() {
        let (_, h) = fig1();
        let tight = ExactOptions {
            budget: Budget::new(15),
            jobs: None,
        };
        assert!(matches!(
            solve_minsum_exact(&h, tight),
            Err(SolveError::BudgetExceeded {
                required: 16,
                budget: 15
            })
        ));
        let forced = ExactOptions {
            budget: Budget {
                limit: 15,
                force: true,
            },
            jobs: None,
        };
        assert_eq!(solve_minsum_exact(&h, forced).unwrap().objective, 7);
    }

    #[test]
    fn empty_instance() {
        let inst = SmfqInstance::from_names::<&str>(&[], &[]).unwrap();
        let r = solve_minsum_exact(&inst, ExactOptions::default()).unwrap();
        assert_eq!(r.objective, 0);
        assert_eq!(r.matching.num_agents(), 0);
    }

    proptest! {
        #[test]
        fn parallel_matches_sequential(seed in 0u64..2_000) {
            let inst = random(&RandomParams { agents: 6, programs: 5, list_len: 4, cost_max: 4, seed }).unwrap();
            let seq = solve_minsum_exact(&inst, ExactOptions::default()).unwrap();
            let par = solve_minsum_exact(&inst, ExactOptions { jobs: Some(3), ..Default::default() }).unwrap();
            prop_assert_eq!(seq, par);
        }

        #[test]
        fn top_choice_tuple_always_survives(seed in 0u64..2_000) {
            let inst = random(&RandomParams { agents: 6, programs: 5, list_len: 4, cost_max: 4, seed }).unwrap();
            prop_assert!(evaluate_tuple(&inst, &CostTuple::top_choice(&inst)).is_some());
        }

        #[test]
        fn reverse_order_same_objective(seed in 0u64..2_000) {
            let inst = random(&RandomParams { agents: 6, programs: 4, list_len: 3, cost_max: 3, seed }).unwrap();
            let forward: Vec<AgentId> = inst.market().agents().collect();
            let backward: Vec<AgentId> = inst.market().agents().rev().collect();
            let space = TupleSpace::new(&inst);
            let best = |order: &[AgentId]| {
                (0..space.total as u64)
                    .filter_map(|i| {
                        let t = space.tuple(i);
                        let g = prune_with_order(&inst, build_tuple_subgraph(&inst, &t), order).ok()?;
                        g.top_choice_matching(&inst).map(|m| inst.total_cost(&m))
                    })
                    .min()
            };
            prop_assert_eq!(best(&forward), best(&backward));
        }
    }
}

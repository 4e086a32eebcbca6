//! Approximations for MINSUM.
//!
//! Both `ℓ_p`-approximations start from `p*_a`, the cheapest program on
//! each agent's list (ties to the agent's more preferred one), whose sum
//! lower-bounds the optimum. Neither dominates the other.

use crate::error::SolveError;
use crate::minmax::solve_minmax;
use crate::model::{is_envy_free, AgentId, Matching, ProgramId, SmfqInstance, SolveReport};

/// Per-agent minimum-cost programs plus the list-length parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinCostChoice {
    pub program: Vec<ProgramId>,
    pub ell_p: usize,
    pub ell_a: usize,
}

impl MinCostChoice {
    pub fn new(instance: &SmfqInstance) -> Self {
        let market = instance.market();
        MinCostChoice {
            program: market
                .agents()
                .map(|a| min_cost_program(instance, a))
                .collect(),
            ell_p: market.max_program_list_len(),
            ell_a: market.max_agent_list_len(),
        }
    }
}

/// `p*_a`: cheapest program on `a`'s list, most preferred among ties.
pub fn min_cost_program(instance: &SmfqInstance, a: AgentId) -> ProgramId {
    let list = instance.market().agent_prefs(a);
    // min_by_key keeps the first minimum, i.e. the most preferred.
    *list
        .iter()
        .min_by_key(|&&p| instance.cost(p))
        .expect("validated agents have non-empty lists")
}

/// `Σ_a c(p*_a)`, a lower bound on the MINSUM optimum.
pub fn lower_bound_sum(instance: &SmfqInstance) -> u64 {
    instance
        .market()
        .agents()
        .map(|a| instance.cost(min_cost_program(instance, a)))
        .sum()
}

/// Start with every agent at `p*_a`, then visit programs in input order;
/// at program `p`, walk `p`'s list from the bottom and promote any agent
/// that prefers `p` to its current program and outranks someone `p`
/// already holds. Agents only ever move up their own lists.
pub fn approx_promote(instance: &SmfqInstance) -> Result<SolveReport, SolveError> {
    let market = instance.market();
    let choice = MinCostChoice::new(instance);
    let mut m = Matching::from_assignment(choice.program.iter().map(|&p| Some(p)).collect());

    // Rank (in p's list) of the least preferred agent p holds.
    let mut worst: Vec<Option<usize>> = vec![None; market.num_programs()];
    for (a, p) in m.pairs() {
        let r = market.program_rank(p, a).expect("mutual lists");
        worst[p.0] = Some(worst[p.0].map_or(r, |w| w.max(r)));
    }

    for p in market.programs() {
        for (rank, &a) in market.program_prefs(p).iter().enumerate().rev() {
            let current = m.get(a);
            let outranks_someone = worst[p.0].is_some_and(|w| rank < w);
            if outranks_someone && market.agent_prefers(a, p, current) {
                let old = current.expect("every agent starts matched");
                if market.agent_rank(a, p) >= market.agent_rank(a, old) {
                    return Err(SolveError::InvariantViolated(format!(
                        "agent {} would move down its list",
                        market.agent_name(a)
                    )));
                }
                m.assign(a, p);
                // `a` outranks the current worst at p, so the worst is unchanged.
                worst[old.0] = m
                    .pairs()
                    .filter(|&(_, q)| q == old)
                    .filter_map(|(b, _)| market.program_rank(old, b))
                    .max();
            }
        }
    }

    if let Some(p) = m
        .pairs()
        .map(|(_, p)| p)
        .find(|p| !choice.program.contains(p))
    {
        return Err(SolveError::InvariantViolated(format!(
            "program {} is used but is nobody's minimum-cost program",
            market.program_name(p)
        )));
    }
    finish(instance, m, "promote")
}

/// Restrict every agent to `B' = {p*_a}` and give it its favourite member
/// of `B'`.
pub fn approx_restrict(instance: &SmfqInstance) -> Result<SolveReport, SolveError> {
    let market = instance.market();
    let choice = MinCostChoice::new(instance);
    let mut in_b_prime = vec![false; market.num_programs()];
    for p in &choice.program {
        in_b_prime[p.0] = true;
    }
    let m = Matching::from_assignment(
        market
            .agents()
            .map(|a| {
                market
                    .agent_prefs(a)
                    .iter()
                    .copied()
                    .find(|p| in_b_prime[p.0])
            })
            .collect(),
    );
    finish(instance, m, "restrict")
}

/// The MINMAX optimum, scored by total cost: a `|B|`-approximation.
pub fn approx_via_minmax(instance: &SmfqInstance) -> Result<SolveReport, SolveError> {
    let m = solve_minmax(instance)?.matching;
    Ok(SolveReport::total_cost(instance, m, "minmax", false))
}

fn finish(
    instance: &SmfqInstance,
    m: Matching,
    method: &'static str,
) -> Result<SolveReport, SolveError> {
    if !m.is_a_perfect() || !is_envy_free(instance.market(), &m) {
        return Err(SolveError::InvariantViolated(format!(
            "{method} produced a matching that is not A-perfect and envy-free"
        )));
    }
    Ok(SolveReport::total_cost(instance, m, method, false))
}

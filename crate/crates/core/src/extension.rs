//! Two-round matching: a round-1 stable matching under rigid quotas, then a
//! round-2 stable extension that may exceed quotas to place more agents.
//!
//! The pruned graph `G_M` keeps an edge `(a, p)` for unmatched `a` unless
//! `p` ranks `a` below `Barrier(p)`, the best matched agent that would
//! rather be at `p`. Agents left with an edge are exactly the ones some
//! stable extension can place.

use crate::error::SolveError;
use crate::minmax::solve_minmax;
use crate::minsum::{solve_minsum_exact, ExactOptions};
use crate::model::{
    check_hr_stable, AgentId, HrInstance, Matching, ProgramId, SmfqInstance, SubMarket,
};

/// Most preferred (by `p`) agent matched in `m1` that prefers `p` to its
/// current partner.
pub fn barrier(round1: &HrInstance, m1: &Matching, p: ProgramId) -> Option<AgentId> {
    let market = round1.market();
    market.program_prefs(p).iter().copied().find(|&a| {
        m1.get(a)
            .is_some_and(|cur| market.agent_prefers(a, p, Some(cur)))
    })
}

/// Everything round 2 needs: unmatched agents, barriers and `G_M`.
#[derive(Clone, Debug)]
pub struct ExtensionContext {
    round1: HrInstance,
    m1: Matching,
    unmatched: Vec<AgentId>,
    barriers: Vec<Option<AgentId>>,
    // g_m[a]: surviving programs of unmatched agent a, in a's order
    g_m: Vec<Vec<ProgramId>>,
    matchable: Vec<AgentId>,
}

impl ExtensionContext {
    pub fn round1(&self) -> &HrInstance {
        &self.round1
    }

    pub fn m1(&self) -> &Matching {
        &self.m1
    }

    /// `A_u`: agents unmatched in round 1.
    pub fn unmatched(&self) -> &[AgentId] {
        &self.unmatched
    }

    pub fn barrier(&self, p: ProgramId) -> Option<AgentId> {
        self.barriers[p.0]
    }

    /// `A_u(M)`: unmatched agents with at least one edge in `G_M`.
    pub fn matchable(&self) -> &[AgentId] {
        &self.matchable
    }

    /// `A_u \ A_u(M)`: agents no stable extension can place.
    pub fn unextendable(&self) -> Vec<AgentId> {
        self.unmatched
            .iter()
            .copied()
            .filter(|a| !self.matchable.contains(a))
            .collect()
    }

    /// `G_M` edges, by agent index then agent preference.
    pub fn edges(&self) -> Vec<(AgentId, ProgramId)> {
        self.unmatched
            .iter()
            .flat_map(|&a| self.g_m[a.0].iter().map(move |&p| (a, p)))
            .collect()
    }

    pub fn has_edge(&self, a: AgentId, p: ProgramId) -> bool {
        self.g_m[a.0].contains(&p)
    }

    /// `G_M` as a standalone market over `A_u(M)` and the programs it
    /// touches, preserving round-1 relative order on both sides.
    pub fn submarket(&self) -> SubMarket {
        let market = self.round1.market();
        let programs: Vec<ProgramId> = market
            .programs()
            .filter(|&p| self.matchable.iter().any(|&a| self.has_edge(a, p)))
            .collect();
        market.restrict(&self.matchable, &programs, |a, p| self.has_edge(a, p))
    }

    fn sub_instance(&self, sub: &SubMarket, costs: &[u64]) -> Result<SmfqInstance, SolveError> {
        let costs = sub
            .program_origin
            .iter()
            .map(|p| costs[p.0] as i64)
            .collect();
        Ok(SmfqInstance::new(sub.market.clone(), costs)?)
    }

    fn merge(&self, sub: &SubMarket, m2: &Matching) -> Extension {
        let mut merged = self.m1.clone();
        for (a, p) in m2.pairs() {
            merged.assign(sub.agent_origin[a.0], sub.program_origin[p.0]);
        }
        Extension::new(&self.round1, &self.m1, merged)
    }
}

/// Runs the barrier pruning on a stable round-1 matching.
pub fn compute_extendable(
    round1: &HrInstance,
    m1: &Matching,
) -> Result<ExtensionContext, SolveError> {
    let check = check_hr_stable(round1, m1)?;
    if let Some(&(a, p)) = check.blocking_pairs.first() {
        let market = round1.market();
        return Err(SolveError::NotStable(format!(
            "({}, {}) blocks",
            market.agent_name(a),
            market.program_name(p)
        )));
    }
    let market = round1.market();
    let barriers: Vec<Option<AgentId>> =
        market.programs().map(|p| barrier(round1, m1, p)).collect();
    let unmatched = m1.unmatched();
    let mut g_m = vec![Vec::new(); market.num_agents()];
    for &a in &unmatched {
        g_m[a.0] = market
            .agent_prefs(a)
            .iter()
            .copied()
            .filter(|&p| match barriers[p.0] {
                Some(b) => !market.program_prefers(p, b, a),
                None => true,
            })
            .collect();
    }
    let matchable = unmatched
        .iter()
        .copied()
        .filter(|a| !g_m[a.0].is_empty())
        .collect();
    Ok(ExtensionContext {
        round1: round1.clone(),
        m1: m1.clone(),
        unmatched,
        barriers,
        g_m,
        matchable,
    })
}

/// A round-2 matching containing the round-1 matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub m2: Matching,
    /// Roster growth of each program over round 1.
    pub deviation: Vec<u64>,
    pub d_star: u64,
}

impl Extension {
    fn new(round1: &HrInstance, m1: &Matching, m2: Matching) -> Self {
        let n = round1.market().num_programs();
        let before = m1.roster_sizes(n);
        let deviation: Vec<u64> = m2
            .roster_sizes(n)
            .into_iter()
            .zip(before)
            .map(|(after, before)| after.saturating_sub(before) as u64)
            .collect();
        let d_star = deviation.iter().copied().max().unwrap_or(0);
        Extension {
            m2,
            deviation,
            d_star,
        }
    }

    /// Pairs present in `m2` but not in `m1`.
    pub fn added<'a>(
        &'a self,
        m1: &'a Matching,
    ) -> impl Iterator<Item = (AgentId, ProgramId)> + 'a {
        self.m2.pairs().filter(move |&(a, _)| m1.get(a).is_none())
    }

    /// Round-2 cost of the newly added pairs.
    pub fn added_cost(&self, m1: &Matching, costs: &[u64]) -> u64 {
        self.added(m1).map(|(_, p)| costs[p.0]).sum()
    }
}

/// Every matchable agent at its top program in `G_M`.
pub fn largest_extension(ctx: &ExtensionContext) -> Extension {
    let mut m2 = ctx.m1.clone();
    for &a in &ctx.matchable {
        m2.assign(a, ctx.g_m[a.0][0]);
    }
    Extension::new(&ctx.round1, &ctx.m1, m2)
}

/// Extension placing all of `A_u(M)` that minimises the largest roster
/// growth: MINMAX on `G_M` with unit costs.
pub fn min_deviation_extension(ctx: &ExtensionContext) -> Result<Extension, SolveError> {
    let sub = ctx.submarket();
    let unit = vec![1; ctx.round1.market().num_programs()];
    let instance = ctx.sub_instance(&sub, &unit)?;
    let report = solve_minmax(&instance)?;
    Ok(ctx.merge(&sub, &report.matching))
}

/// Extension placing all of `A_u(M)` with minimum total round-2 cost:
/// exact MINSUM on `G_M`. Returns the extension and its round-2 cost.
pub fn min_cost_extension(
    ctx: &ExtensionContext,
    round2_costs: &[u64],
    options: ExactOptions,
) -> Result<(Extension, u64), SolveError> {
    let n = ctx.round1.market().num_programs();
    if round2_costs.len() != n {
        return Err(crate::error::ValidationError::LengthMismatch {
            what: "round-2 costs",
            expected: n,
            found: round2_costs.len(),
        }
        .into());
    }
    let sub = ctx.submarket();
    let instance = ctx.sub_instance(&sub, round2_costs)?;
    let report = solve_minsum_exact(&instance, options)?;
    let ext = ctx.merge(&sub, &report.matching);
    let cost = ext.added_cost(&ctx.m1, round2_costs);
    Ok((ext, cost))
}

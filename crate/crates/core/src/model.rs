//! Domain types shared by every solver: the two-sided preference structure,
//! SMFQ and HR instances, matchings, stability checks and cost evaluation.
//!
//! Agents and programs are addressed by dense indices ([`AgentId`],
//! [`ProgramId`]) in input order; names are kept only for I/O.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{MatchingError, ValidationError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProgramId(pub usize);

impl AgentId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl ProgramId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

const UNRANKED: u32 = u32::MAX;

/// Agents, programs and their strict, mutually consistent preference lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Market {
    agents: Vec<String>,
    programs: Vec<String>,
    agent_prefs: Vec<Vec<ProgramId>>,
    program_prefs: Vec<Vec<AgentId>>,
    // agent_rank[a * |B| + p], program_rank[p * |A| + a]
    agent_rank: Vec<u32>,
    program_rank: Vec<u32>,
}

impl Market {
    /// Builds a market from named preference lists, resolving every name.
    pub fn from_names<S: AsRef<str>>(
        agents: &[(S, Vec<S>)],
        programs: &[(S, Vec<S>)],
    ) -> Result<Self, ValidationError> {
        let agent_names: Vec<String> = agents.iter().map(|(n, _)| n.as_ref().to_owned()).collect();
        let program_names: Vec<String> = programs
            .iter()
            .map(|(n, _)| n.as_ref().to_owned())
            .collect();
        let agent_index = index_names(&agent_names)?;
        let program_index = index_names(&program_names)?;
        if let Some(dup) = agent_names
            .iter()
            .find(|n| program_index.contains_key(n.as_str()))
        {
            return Err(ValidationError::DuplicateIdentifier(dup.clone()));
        }

        let mut agent_prefs = Vec::with_capacity(agents.len());
        for (name, list) in agents {
            let resolved = list
                .iter()
                .map(|p| {
                    program_index
                        .get(p.as_ref())
                        .map(|&i| ProgramId(i))
                        .ok_or_else(|| ValidationError::UnknownIdentifier {
                            owner: name.as_ref().to_owned(),
                            item: p.as_ref().to_owned(),
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            agent_prefs.push(resolved);
        }
        let mut program_prefs = Vec::with_capacity(programs.len());
        for (name, list) in programs {
            let resolved = list
                .iter()
                .map(|a| {
                    agent_index
                        .get(a.as_ref())
                        .map(|&i| AgentId(i))
                        .ok_or_else(|| ValidationError::UnknownIdentifier {
                            owner: name.as_ref().to_owned(),
                            item: a.as_ref().to_owned(),
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            program_prefs.push(resolved);
        }
        Self::from_indices(agent_names, program_names, agent_prefs, program_prefs)
    }

    /// Builds a market from index-based preference lists.
    pub fn from_indices(
        agents: Vec<String>,
        programs: Vec<String>,
        agent_prefs: Vec<Vec<ProgramId>>,
        program_prefs: Vec<Vec<AgentId>>,
    ) -> Result<Self, ValidationError> {
        if agent_prefs.len() != agents.len() {
            return Err(ValidationError::LengthMismatch {
                what: "agent preference lists",
                expected: agents.len(),
                found: agent_prefs.len(),
            });
        }
        if program_prefs.len() != programs.len() {
            return Err(ValidationError::LengthMismatch {
                what: "program preference lists",
                expected: programs.len(),
                found: program_prefs.len(),
            });
        }
        index_names(&agents)?;
        index_names(&programs)?;
        let (na, nb) = (agents.len(), programs.len());
        for (a, list) in agent_prefs.iter().enumerate() {
            if let Some(p) = list.iter().find(|p| p.0 >= nb) {
                return Err(ValidationError::UnknownIdentifier {
                    owner: agents[a].clone(),
                    item: format!("program #{}", p.0),
                });
            }
        }
        for (p, list) in program_prefs.iter().enumerate() {
            if let Some(a) = list.iter().find(|a| a.0 >= na) {
                return Err(ValidationError::UnknownIdentifier {
                    owner: programs[p].clone(),
                    item: format!("agent #{}", a.0),
                });
            }
        }

        let mut agent_rank = vec![UNRANKED; na * nb];
        let mut program_rank = vec![UNRANKED; nb * na];
        let mut agent_dup = None;
        for (a, list) in agent_prefs.iter().enumerate() {
            for (r, p) in list.iter().enumerate() {
                let slot = &mut agent_rank[a * nb + p.0];
                if *slot != UNRANKED {
                    agent_dup.get_or_insert((a, p.0));
                    continue;
                }
                *slot = r as u32;
            }
        }
        let mut program_dup = None;
        for (p, list) in program_prefs.iter().enumerate() {
            for (r, a) in list.iter().enumerate() {
                let slot = &mut program_rank[p * na + a.0];
                if *slot != UNRANKED {
                    program_dup.get_or_insert((p, a.0));
                    continue;
                }
                *slot = r as u32;
            }
        }

        // Mutual acceptability, scanned in agent order then program order.
        for a in 0..na {
            for p in 0..nb {
                let listed_by_agent = agent_rank[a * nb + p] != UNRANKED;
                let listed_by_program = program_rank[p * na + a] != UNRANKED;
                if listed_by_agent != listed_by_program {
                    return Err(ValidationError::NonMutualEdge {
                        agent: agents[a].clone(),
                        program: programs[p].clone(),
                    });
                }
            }
        }
        if let Some((a, p)) = agent_dup {
            return Err(ValidationError::DuplicateInList {
                owner: agents[a].clone(),
                item: programs[p].clone(),
            });
        }
        if let Some((p, a)) = program_dup {
            return Err(ValidationError::DuplicateInList {
                owner: programs[p].clone(),
                item: agents[a].clone(),
            });
        }

        Ok(Market {
            agents,
            programs,
            agent_prefs,
            program_prefs,
            agent_rank,
            program_rank,
        })
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn num_programs(&self) -> usize {
        self.programs.len()
    }

    pub fn agents(&self) -> impl DoubleEndedIterator<Item = AgentId> + ExactSizeIterator {
        (0..self.agents.len()).map(AgentId)
    }

    pub fn programs(&self) -> impl DoubleEndedIterator<Item = ProgramId> + ExactSizeIterator {
        (0..self.programs.len()).map(ProgramId)
    }

    pub fn agent_name(&self, a: AgentId) -> &str {
        &self.agents[a.0]
    }

    pub fn program_name(&self, p: ProgramId) -> &str {
        &self.programs[p.0]
    }

    pub fn agent_names(&self) -> &[String] {
        &self.agents
    }

    pub fn program_names(&self) -> &[String] {
        &self.programs
    }

    pub fn agent_by_name(&self, name: &str) -> Option<AgentId> {
        self.agents.iter().position(|n| n == name).map(AgentId)
    }

    pub fn program_by_name(&self, name: &str) -> Option<ProgramId> {
        self.programs.iter().position(|n| n == name).map(ProgramId)
    }

    /// Agent `a`'s acceptable programs, most preferred first.
    pub fn agent_prefs(&self, a: AgentId) -> &[ProgramId] {
        &self.agent_prefs[a.0]
    }

    /// Program `p`'s acceptable agents, most preferred first.
    pub fn program_prefs(&self, p: ProgramId) -> &[AgentId] {
        &self.program_prefs[p.0]
    }

    /// Position of `p` in `a`'s list (0 = top), or `None` if unacceptable.
    #[inline]
    pub fn agent_rank(&self, a: AgentId, p: ProgramId) -> Option<usize> {
        match self.agent_rank[a.0 * self.programs.len() + p.0] {
            UNRANKED => None,
            r => Some(r as usize),
        }
    }

    /// Position of `a` in `p`'s list (0 = top), or `None` if unacceptable.
    #[inline]
    pub fn program_rank(&self, p: ProgramId, a: AgentId) -> Option<usize> {
        match self.program_rank[p.0 * self.agents.len() + a.0] {
            UNRANKED => None,
            r => Some(r as usize),
        }
    }

    pub fn is_edge(&self, a: AgentId, p: ProgramId) -> bool {
        self.agent_rank(a, p).is_some()
    }

    /// Whether `a` strictly prefers `p` to `current`; any acceptable
    /// program beats being unmatched.
    #[inline]
    pub fn agent_prefers(&self, a: AgentId, p: ProgramId, current: Option<ProgramId>) -> bool {
        match (self.agent_rank(a, p), current) {
            (None, _) => false,
            (Some(_), None) => true,
            (Some(rp), Some(c)) => match self.agent_rank(a, c) {
                Some(rc) => rp < rc,
                None => true,
            },
        }
    }

    /// Whether `p` strictly prefers `a` to `other`.
    #[inline]
    pub fn program_prefers(&self, p: ProgramId, a: AgentId, other: AgentId) -> bool {
        match (self.program_rank(p, a), self.program_rank(p, other)) {
            (Some(ra), Some(ro)) => ra < ro,
            (Some(_), None) => true,
            _ => false,
        }
    }

    pub fn num_edges(&self) -> usize {
        self.agent_prefs.iter().map(Vec::len).sum()
    }

    /// Longest program preference list (`ℓ_p`).
    pub fn max_program_list_len(&self) -> usize {
        self.program_prefs.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Longest agent preference list (`ℓ_a`).
    pub fn max_agent_list_len(&self) -> usize {
        self.agent_prefs.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Checks that `m` has one slot per agent and only uses acceptable edges.
    pub fn check_matching(&self, m: &Matching) -> Result<(), MatchingError> {
        if m.num_agents() != self.num_agents() {
            return Err(MatchingError::WrongAgentCount {
                expected: self.num_agents(),
                found: m.num_agents(),
            });
        }
        for (a, p) in m.pairs() {
            if p.0 >= self.num_programs() || !self.is_edge(a, p) {
                return Err(MatchingError::NotAcceptable {
                    agent: self.agent_name(a).to_owned(),
                    program: self
                        .programs
                        .get(p.0)
                        .cloned()
                        .unwrap_or_else(|| format!("#{}", p.0)),
                });
            }
        }
        Ok(())
    }

    /// Restricts the market to the given agents and programs (in the given
    /// order), keeping only edges accepted by `keep`. Relative order of
    /// every preference list is preserved.
    pub fn restrict(
        &self,
        agents: &[AgentId],
        programs: &[ProgramId],
        mut keep: impl FnMut(AgentId, ProgramId) -> bool,
    ) -> SubMarket {
        let mut agent_new = vec![None; self.num_agents()];
        for (i, a) in agents.iter().enumerate() {
            agent_new[a.0] = Some(AgentId(i));
        }
        let mut program_new = vec![None; self.num_programs()];
        for (i, p) in programs.iter().enumerate() {
            program_new[p.0] = Some(ProgramId(i));
        }
        let mut kept = HashSet::new();
        for &a in agents {
            for &p in self.agent_prefs(a) {
                if program_new[p.0].is_some() && keep(a, p) {
                    kept.insert((a, p));
                }
            }
        }
        let agent_prefs = agents
            .iter()
            .map(|&a| {
                self.agent_prefs(a)
                    .iter()
                    .filter(|&&p| kept.contains(&(a, p)))
                    .map(|p| program_new[p.0].unwrap())
                    .collect()
            })
            .collect();
        let program_prefs = programs
            .iter()
            .map(|&p| {
                self.program_prefs(p)
                    .iter()
                    .filter(|&&a| kept.contains(&(a, p)))
                    .map(|a| agent_new[a.0].unwrap())
                    .collect()
            })
            .collect();
        let market = Market::from_indices(
            agents.iter().map(|&a| self.agents[a.0].clone()).collect(),
            programs
                .iter()
                .map(|&p| self.programs[p.0].clone())
                .collect(),
            agent_prefs,
            program_prefs,
        )
        .expect("restriction of a valid market is valid");
        SubMarket {
            market,
            agent_origin: agents.to_vec(),
            program_origin: programs.to_vec(),
        }
    }
}

fn index_names(names: &[String]) -> Result<HashMap<&str, usize>, ValidationError> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.as_str(), i).is_some() {
            return Err(ValidationError::DuplicateIdentifier(n.clone()));
        }
    }
    Ok(index)
}

/// A restricted market together with the indices it came from.
#[derive(Clone, Debug)]
pub struct SubMarket {
    pub market: Market,
    pub agent_origin: Vec<AgentId>,
    pub program_origin: Vec<ProgramId>,
}

impl SubMarket {
    /// Translates a matching over the sub-market back into the parent's
    /// index space (`parent_agents` slots, unlisted agents unmatched).
    pub fn lift(&self, m: &Matching, parent_agents: usize) -> Matching {
        let mut out = Matching::empty(parent_agents);
        for (a, p) in m.pairs() {
            out.assign(self.agent_origin[a.0], self.program_origin[p.0]);
        }
        out
    }
}

fn check_costs(market: &Market, costs: &[i64]) -> Result<Vec<u64>, ValidationError> {
    if costs.len() != market.num_programs() {
        return Err(ValidationError::LengthMismatch {
            what: "program costs",
            expected: market.num_programs(),
            found: costs.len(),
        });
    }
    costs
        .iter()
        .enumerate()
        .map(|(p, &c)| {
            u64::try_from(c).map_err(|_| ValidationError::NegativeCost {
                program: market.programs[p].clone(),
                cost: c,
            })
        })
        .collect()
}

/// An instance with flexible quotas: programs carry costs, not capacities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmfqInstance {
    market: Market,
    costs: Vec<u64>,
}

impl SmfqInstance {
    pub fn new(market: Market, costs: Vec<i64>) -> Result<Self, ValidationError> {
        if let Some(a) = market.agents().find(|&a| market.agent_prefs(a).is_empty()) {
            return Err(ValidationError::EmptyAgentList(
                market.agent_name(a).to_owned(),
            ));
        }
        let costs = check_costs(&market, &costs)?;
        Ok(SmfqInstance { market, costs })
    }

    /// `programs` entries are `(name, cost, preference list)`.
    pub fn from_names<S: AsRef<str>>(
        agents: &[(S, Vec<S>)],
        programs: &[(S, i64, Vec<S>)],
    ) -> Result<Self, ValidationError> {
        let lists: Vec<(&str, Vec<&str>)> = programs
            .iter()
            .map(|(n, _, l)| (n.as_ref(), l.iter().map(AsRef::as_ref).collect()))
            .collect();
        let agents: Vec<(&str, Vec<&str>)> = agents
            .iter()
            .map(|(n, l)| (n.as_ref(), l.iter().map(AsRef::as_ref).collect()))
            .collect();
        let market = Market::from_names(&agents, &lists)?;
        Self::new(market, programs.iter().map(|(_, c, _)| *c).collect())
    }

    pub fn market(&self) -> &Market {
        &self.market
    }

    pub fn costs(&self) -> &[u64] {
        &self.costs
    }

    pub fn cost(&self, p: ProgramId) -> u64 {
        self.costs[p.0]
    }

    /// Largest program cost (`c*`), 0 when there are no programs.
    pub fn max_program_cost(&self) -> u64 {
        self.costs.iter().copied().max().unwrap_or(0)
    }

    pub fn total_cost(&self, m: &Matching) -> u64 {
        total_cost(&self.costs, m)
    }

    pub fn max_cost(&self, m: &Matching) -> u64 {
        max_cost(&self.costs, m)
    }

    /// Every agent at its first choice: always A-perfect and envy-free.
    pub fn top_choice_matching(&self) -> Matching {
        top_choice_matching(&self.market)
    }
}

/// A classical hospitals/residents instance with rigid upper quotas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HrInstance {
    market: Market,
    quotas: Vec<u32>,
    costs: Vec<u64>,
}

impl HrInstance {
    pub fn new(market: Market, quotas: Vec<i64>, costs: Vec<i64>) -> Result<Self, ValidationError> {
        if quotas.len() != market.num_programs() {
            return Err(ValidationError::LengthMismatch {
                what: "program quotas",
                expected: market.num_programs(),
                found: quotas.len(),
            });
        }
        let costs = check_costs(&market, &costs)?;
        let quotas = quotas
            .iter()
            .enumerate()
            .map(|(p, &q)| match u32::try_from(q) {
                Ok(q) if q >= 1 => Ok(q),
                _ => Err(ValidationError::ZeroQuota {
                    program: market.programs[p].clone(),
                    quota: q,
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HrInstance {
            market,
            quotas,
            costs,
        })
    }

    /// `programs` entries are `(name, cost, quota, preference list)`.
    pub fn from_names<S: AsRef<str>>(
        agents: &[(S, Vec<S>)],
        programs: &[(S, i64, i64, Vec<S>)],
    ) -> Result<Self, ValidationError> {
        let lists: Vec<(&str, Vec<&str>)> = programs
            .iter()
            .map(|(n, _, _, l)| (n.as_ref(), l.iter().map(AsRef::as_ref).collect()))
            .collect();
        let agents: Vec<(&str, Vec<&str>)> = agents
            .iter()
            .map(|(n, l)| (n.as_ref(), l.iter().map(AsRef::as_ref).collect()))
            .collect();
        let market = Market::from_names(&agents, &lists)?;
        Self::new(
            market,
            programs.iter().map(|(_, _, q, _)| *q).collect(),
            programs.iter().map(|(_, c, _, _)| *c).collect(),
        )
    }

    pub fn market(&self) -> &Market {
        &self.market
    }

    pub fn quotas(&self) -> &[u32] {
        &self.quotas
    }

    pub fn quota(&self, p: ProgramId) -> u32 {
        self.quotas[p.0]
    }

    pub fn costs(&self) -> &[u64] {
        &self.costs
    }

    /// Drops the quotas, keeping preferences and costs.
    pub fn to_smfq(&self) -> Result<SmfqInstance, ValidationError> {
        SmfqInstance::new(
            self.market.clone(),
            self.costs.iter().map(|&c| c as i64).collect(),
        )
    }

    /// Checks acceptability and that no roster exceeds its quota.
    pub fn check_matching(&self, m: &Matching) -> Result<(), MatchingError> {
        self.market.check_matching(m)?;
        for (p, size) in m
            .roster_sizes(self.market.num_programs())
            .into_iter()
            .enumerate()
        {
            if size > self.quotas[p] as usize {
                return Err(MatchingError::QuotaViolated {
                    program: self.market.programs[p].clone(),
                    size,
                    quota: self.quotas[p],
                });
            }
        }
        Ok(())
    }
}

/// A partial map from agents to programs; rosters are derived on demand.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    assignment: Vec<Option<ProgramId>>,
}

impl Matching {
    pub fn empty(num_agents: usize) -> Self {
        Matching {
            assignment: vec![None; num_agents],
        }
    }

    pub fn from_assignment(assignment: Vec<Option<ProgramId>>) -> Self {
        Matching { assignment }
    }

    /// Builds a matching from `(agent, program)` name pairs.
    pub fn from_named_pairs(
        market: &Market,
        pairs: &[(&str, &str)],
    ) -> Result<Self, MatchingError> {
        let mut m = Matching::empty(market.num_agents());
        for &(a, p) in pairs {
            let aid = market
                .agent_by_name(a)
                .ok_or_else(|| MatchingError::UnknownAgent(a.to_owned()))?;
            let pid = market
                .program_by_name(p)
                .ok_or_else(|| MatchingError::UnknownProgram(p.to_owned()))?;
            if m.get(aid).is_some() {
                return Err(MatchingError::DuplicateAgent(a.to_owned()));
            }
            m.assign(aid, pid);
        }
        market.check_matching(&m)?;
        Ok(m)
    }

    pub fn num_agents(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[Option<ProgramId>] {
        &self.assignment
    }

    #[inline]
    pub fn get(&self, a: AgentId) -> Option<ProgramId> {
        self.assignment[a.0]
    }

    pub fn assign(&mut self, a: AgentId, p: ProgramId) {
        self.assignment[a.0] = Some(p);
    }

    pub fn unassign(&mut self, a: AgentId) {
        self.assignment[a.0] = None;
    }

    /// Number of matched agents.
    pub fn size(&self) -> usize {
        self.assignment.iter().filter(|p| p.is_some()).count()
    }

    /// Every agent assigned.
    pub fn is_a_perfect(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (AgentId, ProgramId)> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(a, p)| p.map(|p| (AgentId(a), p)))
    }

    pub fn unmatched(&self) -> Vec<AgentId> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_none())
            .map(|(a, _)| AgentId(a))
            .collect()
    }

    /// Agents assigned to `p`, in agent index order.
    pub fn roster(&self, p: ProgramId) -> Vec<AgentId> {
        self.pairs()
            .filter(|&(_, q)| q == p)
            .map(|(a, _)| a)
            .collect()
    }

    pub fn roster_sizes(&self, num_programs: usize) -> Vec<usize> {
        let mut sizes = vec![0; num_programs];
        for (_, p) in self.pairs() {
            sizes[p.0] += 1;
        }
        sizes
    }

    pub fn rosters(&self, num_programs: usize) -> Vec<Vec<AgentId>> {
        let mut rosters = vec![Vec::new(); num_programs];
        for (a, p) in self.pairs() {
            rosters[p.0].push(a);
        }
        rosters
    }

    /// Whether every pair of `self` also appears in `other`.
    pub fn is_subset_of(&self, other: &Matching) -> bool {
        self.pairs().all(|(a, p)| other.get(a) == Some(p))
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (a, p)) in self.pairs().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({}, {})", a.0, p.0)?;
        }
        f.write_str("}")
    }
}

/// Outcome of a stability scan: every blocking pair, ordered by
/// (agent index, program index).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct StabilityCheck {
    pub blocking_pairs: Vec<(AgentId, ProgramId)>,
}

impl StabilityCheck {
    pub fn is_stable(&self) -> bool {
        self.blocking_pairs.is_empty()
    }
}

/// Envy pairs: `a` prefers `p` to its assignment (or is unmatched) and
/// `p` holds some agent it ranks below `a`.
pub fn check_envy_free(market: &Market, m: &Matching) -> StabilityCheck {
    // Rank of the least-preferred agent currently held by each program.
    let mut worst = vec![None::<usize>; market.num_programs()];
    for (a, p) in m.pairs() {
        if let Some(r) = market.program_rank(p, a) {
            worst[p.0] = Some(worst[p.0].map_or(r, |w: usize| w.max(r)));
        }
    }
    let mut blocking = Vec::new();
    for a in market.agents() {
        let current = m.get(a);
        let mut found: Vec<ProgramId> = market
            .agent_prefs(a)
            .iter()
            .copied()
            .filter(|&p| Some(p) != current && market.agent_prefers(a, p, current))
            .filter(|&p| match (worst[p.0], market.program_rank(p, a)) {
                (Some(w), Some(r)) => r < w,
                _ => false,
            })
            .collect();
        found.sort_unstable();
        blocking.extend(found.into_iter().map(|p| (a, p)));
    }
    StabilityCheck {
        blocking_pairs: blocking,
    }
}

pub fn is_envy_free(market: &Market, m: &Matching) -> bool {
    check_envy_free(market, m).is_stable()
}

/// Classical blocking pairs: as envy pairs, but an under-subscribed
/// program also blocks with any agent preferring it.
pub fn check_hr_stable(hr: &HrInstance, m: &Matching) -> Result<StabilityCheck, MatchingError> {
    hr.check_matching(m)?;
    let market = hr.market();
    let sizes = m.roster_sizes(market.num_programs());
    let mut worst = vec![None::<usize>; market.num_programs()];
    for (a, p) in m.pairs() {
        let r = market.program_rank(p, a).expect("checked acceptable");
        worst[p.0] = Some(worst[p.0].map_or(r, |w: usize| w.max(r)));
    }
    let mut blocking = Vec::new();
    for a in market.agents() {
        let current = m.get(a);
        let mut found: Vec<ProgramId> = market
            .agent_prefs(a)
            .iter()
            .copied()
            .filter(|&p| Some(p) != current && market.agent_prefers(a, p, current))
            .filter(|&p| {
                sizes[p.0] < hr.quota(p) as usize
                    || matches!(
                        (worst[p.0], market.program_rank(p, a)),
                        (Some(w), Some(r)) if r < w
                    )
            })
            .collect();
        found.sort_unstable();
        blocking.extend(found.into_iter().map(|p| (a, p)));
    }
    Ok(StabilityCheck {
        blocking_pairs: blocking,
    })
}

pub fn is_hr_stable(hr: &HrInstance, m: &Matching) -> Result<bool, MatchingError> {
    Ok(check_hr_stable(hr, m)?.is_stable())
}

/// `Σ_p |roster(p)| · cost(p)`.
pub fn total_cost(costs: &[u64], m: &Matching) -> u64 {
    m.pairs().map(|(_, p)| costs[p.0]).sum()
}

/// `max_p |roster(p)| · cost(p)`, 0 for the empty matching.
pub fn max_cost(costs: &[u64], m: &Matching) -> u64 {
    m.roster_sizes(costs.len())
        .into_iter()
        .zip(costs)
        .map(|(n, &c)| n as u64 * c)
        .max()
        .unwrap_or(0)
}

pub fn top_choice_matching(market: &Market) -> Matching {
    Matching::from_assignment(
        market
            .agents()
            .map(|a| market.agent_prefs(a).first().copied())
            .collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObjectiveKind {
    TotalCost,
    MaxCost,
    MaxDeviation,
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectiveKind::TotalCost => "total_cost",
            ObjectiveKind::MaxCost => "max_cost",
            ObjectiveKind::MaxDeviation => "max_deviation",
        })
    }
}

/// A solver's answer. `objective` is always recomputed from `matching`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub matching: Matching,
    pub objective: u64,
    pub objective_kind: ObjectiveKind,
    pub method: &'static str,
    pub certified_optimal: bool,
}

impl SolveReport {
    pub fn total_cost(
        instance: &SmfqInstance,
        matching: Matching,
        method: &'static str,
        certified_optimal: bool,
    ) -> Self {
        SolveReport {
            objective: instance.total_cost(&matching),
            matching,
            objective_kind: ObjectiveKind::TotalCost,
            method,
            certified_optimal,
        }
    }

    pub fn max_cost(
        instance: &SmfqInstance,
        matching: Matching,
        method: &'static str,
        certified_optimal: bool,
    ) -> Self {
        SolveReport {
            objective: instance.max_cost(&matching),
            matching,
            objective_kind: ObjectiveKind::MaxCost,
            method,
            certified_optimal,
        }
    }
}

/// Upper bound on the number of candidates an exponential routine may visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub limit: u64,
    pub force: bool,
}

impl Budget {
    pub const DEFAULT_LIMIT: u64 = 10_000_000;

    pub fn new(limit: u64) -> Self {
        Budget {
            limit,
            force: false,
        }
    }

    pub fn unlimited() -> Self {
        Budget {
            limit: u64::MAX,
            force: true,
        }
    }

    pub fn check(&self, required: u128) -> Result<(), crate::SolveError> {
        if self.force || required <= self.limit as u128 {
            Ok(())
        } else {
            Err(crate::SolveError::BudgetExceeded {
                required,
                budget: self.limit,
            })
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Self::DEFAULT_LIMIT)
    }
}

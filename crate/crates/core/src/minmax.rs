//! Exact MINMAX: binary search on a cost threshold `t`, deciding each probe
//! with one run of deferred acceptance on the quota instance `G_t`.
//!
//! Feasibility is monotone in `t`, and by the rural hospitals theorem the
//! agent-optimal stable matching of `G_t` is A-perfect exactly when some
//! stable matching of `G_t` is.

use crate::error::SolveError;
use crate::hr::gale_shapley;
use crate::model::{HrInstance, Matching, ProgramId, SmfqInstance, SolveReport, SubMarket};

/// `G_t`: the instance with quota `⌊t / c(p)⌋` per program. Cost-0 programs
/// get quota `|A|`; programs whose quota would be 0 are dropped with their
/// edges.
#[derive(Clone, Debug)]
pub struct ThresholdInstance {
    threshold: u64,
    c_star: u64,
    hr: HrInstance,
    restriction: SubMarket,
}

impl ThresholdInstance {
    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    /// Largest program cost of the base instance.
    pub fn c_star(&self) -> u64 {
        self.c_star
    }

    pub fn hr(&self) -> &HrInstance {
        &self.hr
    }

    /// Base-instance program behind each program of [`Self::hr`].
    pub fn program_origin(&self) -> &[ProgramId] {
        &self.restriction.program_origin
    }

    /// Maps a matching of `G_t` back onto the base instance.
    pub fn lift(&self, m: &Matching) -> Matching {
        self.restriction.lift(m, m.num_agents())
    }
}

pub fn build_quota_instance(instance: &SmfqInstance, t: u64) -> ThresholdInstance {
    let market = instance.market();
    let unbounded = market.num_agents().max(1) as u64;
    let quota_of = |p: ProgramId| match instance.cost(p) {
        0 => unbounded,
        c => t / c,
    };
    let kept: Vec<ProgramId> = market.programs().filter(|&p| quota_of(p) > 0).collect();
    let agents: Vec<_> = market.agents().collect();
    let restriction = market.restrict(&agents, &kept, |_, _| true);
    let quotas = kept
        .iter()
        .map(|&p| quota_of(p).min(u32::MAX as u64) as i64)
        .collect();
    let costs = kept.iter().map(|&p| instance.cost(p) as i64).collect();
    let hr = HrInstance::new(restriction.market.clone(), quotas, costs)
        .expect("threshold quotas are positive");
    ThresholdInstance {
        threshold: t,
        c_star: instance.max_program_cost(),
        hr,
        restriction,
    }
}

/// The agent-optimal stable matching of `G_t`, lifted to the base
/// instance, if it is A-perfect.
pub fn probe(instance: &SmfqInstance, t: u64) -> Option<Matching> {
    let g_t = build_quota_instance(instance, t);
    let m = gale_shapley(g_t.hr());
    m.is_a_perfect().then(|| g_t.lift(&m))
}

pub fn feasible_at(instance: &SmfqInstance, t: u64) -> bool {
    probe(instance, t).is_some()
}

/// Upper end of the search range, `|A| · c*`, which is always feasible.
pub fn search_upper_bound(instance: &SmfqInstance) -> u64 {
    (instance.market().num_agents() as u64).saturating_mul(instance.max_program_cost())
}

/// Minimal feasible threshold `t*` and the agent-optimal stable matching of
/// `G_{t*}`. The matching is A-perfect, envy-free, and its max cost is `t*`.
pub fn solve_minmax(instance: &SmfqInstance) -> Result<SolveReport, SolveError> {
    let upper = search_upper_bound(instance);
    let mut best = probe(instance, upper).ok_or_else(|| {
        SolveError::InvariantViolated(format!("threshold {upper} = |A|·c* is infeasible"))
    })?;
    let (mut lo, mut hi) = (0u64, upper);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match probe(instance, mid) {
            Some(m) => {
                hi = mid;
                best = m;
            }
            None => lo = mid + 1,
        }
    }
    let report = SolveReport::max_cost(instance, best, "minmax", true);
    if report.objective != hi {
        return Err(SolveError::InvariantViolated(format!(
            "matching at threshold {hi} has max cost {}",
            report.objective
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{fig1, random, RandomParams};
    use crate::model::is_envy_free;
    use proptest::prelude::*;

    fn quota_by_name(g: &ThresholdInstance, name: &str) -> Option<u32> {
        g.hr()
            .market()
            .program_by_name(name)
            .map(|p| g.hr().quota(p))
    }

    #[test]
    fn fig1_quota_instances() {
        let (_, h) = fig1();
        let g4 = build_quota_instance(&h, 4);
        assert_eq!(quota_by_name(&g4, "p1"), Some(4));
        assert_eq!(quota_by_name(&g4, "p2"), Some(2));
        let g1 = build_quota_instance(&h, 1);
        assert_eq!(quota_by_name(&g1, "p1"), Some(1));
        assert_eq!(quota_by_name(&g1, "p2"), None);
        assert_eq!(g1.c_star(), 2);
    }

    #[test]
    fn zero_cost_program_is_unbounded() {
        let agents: Vec<(String, Vec<String>)> = (1..=7)
            .map(|i| (format!("a{i}"), vec!["p".to_owned()]))
            .collect();
        let list: Vec<String> = agents.iter().map(|(n, _)| n.clone()).collect();
        let inst = SmfqInstance::from_names(&agents, &[("p".to_owned(), 0, list)]).unwrap();
        for t in [0, 3, 100] {
            assert_eq!(quota_by_name(&build_quota_instance(&inst, t), "p"), Some(7));
        }
    }

    #[test]
    fn fig1_feasibility_and_optimum() {
        let (_, h) = fig1();
        assert!(feasible_at(&h, 4));
        assert!(!feasible_at(&h, 3));
        assert!(feasible_at(&h, search_upper_bound(&h)));
        let report = solve_minmax(&h).unwrap();
        assert_eq!(report.objective, 4);
        let n_prime = Matching::from_named_pairs(
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
        assert_eq!(report.matching, n_prime);
        assert!(report.certified_optimal);
    }

    #[test]
    fn single_assignment() {
        let inst = SmfqInstance::from_names(&[("a", vec!["p"])], &[("p", 5, vec!["a"])]).unwrap();
        assert_eq!(solve_minmax(&inst).unwrap().objective, 5);
    }

    proptest! {
        #[test]
        fn binary_search_matches_full_sweep(seed in 0u64..5_000) {
            let inst = random(&RandomParams { agents: 6, programs: 4, list_len: 3, cost_max: 6, seed }).unwrap();
            let upper = search_upper_bound(&inst);
            let sweep: Vec<bool> = (0..=upper).map(|t| feasible_at(&inst, t)).collect();
            let first = sweep.iter().position(|&f| f).unwrap() as u64;
            // monotone: everything after the first feasible threshold is feasible
            prop_assert!(sweep[first as usize..].iter().all(|&f| f));
            let report = solve_minmax(&inst).unwrap();
            prop_assert_eq!(report.objective, first);
            prop_assert!(report.matching.is_a_perfect());
            prop_assert!(is_envy_free(inst.market(), &report.matching));
            if first > 0 {
                prop_assert!(!feasible_at(&inst, first - 1));
            }
        }
    }
}

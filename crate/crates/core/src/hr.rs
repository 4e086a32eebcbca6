//! Agent-proposing deferred acceptance for instances with rigid quotas.

use std::collections::{BinaryHeap, VecDeque};

use crate::model::{AgentId, HrInstance, Matching};

/// The agent-optimal stable matching, proposing in input order.
pub fn gale_shapley(hr: &HrInstance) -> Matching {
    let order: Vec<AgentId> = hr.market().agents().collect();
    gale_shapley_with_order(hr, &order)
}

/// Deferred acceptance with free agents queued in `order`. The result does
/// not depend on the order; it is exposed so tests can check that.
pub fn gale_shapley_with_order(hr: &HrInstance, order: &[AgentId]) -> Matching {
    let market = hr.market();
    let mut next = vec![0usize; market.num_agents()];
    // Per program: max-heap of (rank, agent), so the worst held agent is on top.
    let mut held: Vec<BinaryHeap<(usize, AgentId)>> = (0..market.num_programs())
        .map(|_| BinaryHeap::new())
        .collect();
    let mut free: VecDeque<AgentId> = order.iter().copied().collect();

    while let Some(a) = free.pop_front() {
        let Some(&p) = market.agent_prefs(a).get(next[a.0]) else {
            continue;
        };
        next[a.0] += 1;
        let rank = market.program_rank(p, a).expect("mutual lists");
        let slot = &mut held[p.0];
        if slot.len() < hr.quota(p) as usize {
            slot.push((rank, a));
        } else if slot.peek().is_some_and(|&(worst, _)| worst > rank) {
            let (_, evicted) = slot.pop().expect("non-empty");
            slot.push((rank, a));
            free.push_back(evicted);
        } else {
            free.push_back(a);
        }
    }

    let mut m = Matching::empty(market.num_agents());
    for (p, slot) in held.into_iter().enumerate() {
        for (_, a) in slot {
            m.assign(a, crate::model::ProgramId(p));
        }
    }
    m
}

/// Agents left unassigned by `m`, in index order. By the rural hospitals
/// theorem this set is the same for every stable matching.
pub fn unmatched_agents(hr: &HrInstance, m: &Matching) -> Vec<AgentId> {
    debug_assert_eq!(m.num_agents(), hr.market().num_agents());
    m.unmatched()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{fig1, random_hr, RandomParams};
    use crate::model::{is_hr_stable, top_choice_matching, Market};
    use proptest::prelude::*;

    #[test]
    fn fig1_agent_optimal() {
        let (g, _) = fig1();
        let m = gale_shapley(&g);
        let expected =
            Matching::from_named_pairs(g.market(), &[("a1", "p1"), ("a2", "p2"), ("a4", "p1")])
                .unwrap();
        assert_eq!(m, expected);
        let names: Vec<_> = unmatched_agents(&g, &m)
            .into_iter()
            .map(|a| g.market().agent_name(a).to_owned())
            .collect();
        assert_eq!(names, vec!["a3", "a5"]);
    }

    #[test]
    fn large_quotas_give_top_choices() {
        let market = Market::from_names(
            &[
                ("a1", vec!["p1", "p2"]),
                ("a2", vec!["p2", "p1"]),
                ("a3", vec!["p1"]),
            ],
            &[("p1", vec!["a3", "a1", "a2"]), ("p2", vec!["a1", "a2"])],
        )
        .unwrap();
        let hr = HrInstance::new(market.clone(), vec![3, 3], vec![0, 0]).unwrap();
        assert_eq!(gale_shapley(&hr), top_choice_matching(&market));
    }

    #[test]
    fn complete_lists_with_enough_room_match_everyone() {
        let market = Market::from_names(
            &[
                ("a1", vec!["p1", "p2"]),
                ("a2", vec!["p1", "p2"]),
                ("a3", vec!["p1", "p2"]),
            ],
            &[
                ("p1", vec!["a3", "a2", "a1"]),
                ("p2", vec!["a1", "a2", "a3"]),
            ],
        )
        .unwrap();
        let hr = HrInstance::new(market, vec![1, 2], vec![0, 0]).unwrap();
        let m = gale_shapley(&hr);
        assert!(unmatched_agents(&hr, &m).is_empty());
        assert!(is_hr_stable(&hr, &m).unwrap());
    }

    proptest! {
        #[test]
        fn stable_and_order_independent(seed in 0u64..10_000, perm_seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let hr = random_hr(&RandomParams { agents: 7, programs: 4, list_len: 3, cost_max: 0, seed }, 2).unwrap();
            let m = gale_shapley(&hr);
            prop_assert!(is_hr_stable(&hr, &m).unwrap());
            let mut order: Vec<AgentId> = hr.market().agents().collect();
            order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(perm_seed));
            prop_assert_eq!(gale_shapley_with_order(&hr, &order), m);
        }
    }
}

//! Brute-force ground truth for desk-scale instances: every per-agent
//! assignment vector is generated and checked directly.

use crate::error::SolveError;
use crate::model::{
    is_envy_free, is_hr_stable, Budget, HrInstance, Market, Matching, ProgramId, SmfqInstance,
    SolveReport,
};

/// Counts through all digit vectors `d` with `d[i] < radices[i]`, last
/// position fastest.
struct Odometer {
    radices: Vec<usize>,
    digits: Vec<usize>,
    done: bool,
}

impl Odometer {
    fn new(radices: Vec<usize>) -> Self {
        let done = radices.contains(&0);
        Odometer {
            digits: vec![0; radices.len()],
            radices,
            done,
        }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.digits.clone();
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.radices[i] {
                break;
            }
            self.digits[i] = 0;
        }
        Some(out)
    }
}

fn space_size(radices: &[usize]) -> u128 {
    radices
        .iter()
        .try_fold(1u128, |acc, &r| acc.checked_mul(r as u128))
        .unwrap_or(u128::MAX)
}

/// All A-perfect envy-free matchings, in lexicographic order of the
/// per-agent choice indices (agent 0 most significant).
pub fn enumerate_a_perfect_stable(
    instance: &SmfqInstance,
    budget: Budget,
) -> Result<impl Iterator<Item = Matching> + '_, SolveError> {
    let market = instance.market();
    let radices: Vec<usize> = market
        .agents()
        .map(|a| market.agent_prefs(a).len())
        .collect();
    budget.check(space_size(&radices))?;
    Ok(Odometer::new(radices)
        .map(move |digits| assignment(market, &digits))
        .filter(move |m| is_envy_free(market, m)))
}

/// All quota-respecting stable matchings of an HR instance. Each agent's
/// choices are its list followed by "unmatched".
pub fn enumerate_hr_stable(
    hr: &HrInstance,
    budget: Budget,
) -> Result<impl Iterator<Item = Matching> + '_, SolveError> {
    let market = hr.market();
    let radices: Vec<usize> = market
        .agents()
        .map(|a| market.agent_prefs(a).len() + 1)
        .collect();
    budget.check(space_size(&radices))?;
    Ok(Odometer::new(radices)
        .map(move |digits| assignment(market, &digits))
        .filter(move |m| is_hr_stable(hr, m).unwrap_or(false)))
}

fn assignment(market: &Market, digits: &[usize]) -> Matching {
    Matching::from_assignment(
        market
            .agents()
            .zip(digits)
            .map(|(a, &d)| market.agent_prefs(a).get(d).copied())
            .collect::<Vec<Option<ProgramId>>>(),
    )
}

fn best_by(
    instance: &SmfqInstance,
    budget: Budget,
    score: impl Fn(&Matching) -> u64,
) -> Result<Matching, SolveError> {
    let mut best: Option<(u64, Matching)> = None;
    for m in enumerate_a_perfect_stable(instance, budget)? {
        let s = score(&m);
        if best.as_ref().is_none_or(|(b, _)| s < *b) {
            best = Some((s, m));
        }
    }
    best.map(|(_, m)| m).ok_or_else(|| {
        SolveError::InvariantViolated("no A-perfect envy-free matching was enumerated".into())
    })
}

/// Minimum total cost by exhaustive search.
pub fn oracle_minsum(instance: &SmfqInstance, budget: Budget) -> Result<SolveReport, SolveError> {
    let m = best_by(instance, budget, |m| instance.total_cost(m))?;
    Ok(SolveReport::total_cost(instance, m, "oracle", true))
}

/// Minimum max cost by exhaustive search.
pub fn oracle_minmax(instance: &SmfqInstance, budget: Budget) -> Result<SolveReport, SolveError> {
    let m = best_by(instance, budget, |m| instance.max_cost(m))?;
    Ok(SolveReport::max_cost(instance, m, "oracle", true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{example2, fig1, fig2};
    use crate::model::AgentId;

    #[test]
    fn odometer_order() {
        let all: Vec<_> = Odometer::new(vec![2, 3]).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[5], vec![1, 2]);
        assert_eq!(Odometer::new(vec![]).count(), 1);
        assert_eq!(Odometer::new(vec![2, 0]).count(), 0);
    }

    #[test]
    fn fig1_stream() {
        let (_, h) = fig1();
        let all: Vec<_> = enumerate_a_perfect_stable(&h, Budget::default())
            .unwrap()
            .collect();
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
        assert!(all.contains(&n_prime));
        assert!(all.contains(&h.top_choice_matching()));
        assert_eq!(oracle_minsum(&h, Budget::default()).unwrap().objective, 7);
        assert_eq!(oracle_minmax(&h, Budget::default()).unwrap().objective, 4);
        let mut sorted = all.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
    }

    #[test]
    fn single_agent_two_programs() {
        let inst = SmfqInstance::from_names(
            &[("a", vec!["q1", "q2"])],
            &[("q1", 3, vec!["a"]), ("q2", 1, vec!["a"])],
        )
        .unwrap();
        let all: Vec<_> = enumerate_a_perfect_stable(&inst, Budget::default())
            .unwrap()
            .collect();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].get(AgentId(0)), Some(ProgramId(0)));
        assert_eq!(
            oracle_minmax(&inst, Budget::default()).unwrap().objective,
            1
        );
    }

    #[test]
    fn fig2_contains_both_optima() {
        let inst = fig2(3).unwrap();
        let all: Vec<_> = enumerate_a_perfect_stable(&inst, Budget::default())
            .unwrap()
            .collect();
        let mk = inst.market();
        let opt1 =
            Matching::from_named_pairs(mk, &[("a1", "p0"), ("a2", "p0"), ("a3", "p2")]).unwrap();
        let opt2 =
            Matching::from_named_pairs(mk, &[("a1", "p1"), ("a2", "p1"), ("a3", "p1")]).unwrap();
        assert!(all.contains(&opt1) && all.contains(&opt2));
        assert_eq!(
            oracle_minsum(&fig2(4).unwrap(), Budget::default())
                .unwrap()
                .objective,
            4
        );
    }

    #[test]
    fn example2_optimum() {
        let inst = example2(5, 100).unwrap();
        assert_eq!(
            oracle_minsum(&inst, Budget::default()).unwrap().objective,
            108
        );
    }

    #[test]
    fn hr_enumeration() {
        let (g, _) = fig1();
        let all: Vec<_> = enumerate_hr_stable(&g, Budget::default())
            .unwrap()
            .collect();
        let n = Matching::from_named_pairs(g.market(), &[("a1", "p1"), ("a2", "p2"), ("a4", "p1")])
            .unwrap();
        assert!(all.contains(&n));
        let unmatched = all[0].unmatched();
        assert!(all.iter().all(|m| m.unmatched() == unmatched));

        let disjoint = HrInstance::from_names(
            &[("a", vec!["q1"]), ("b", vec!["q2"])],
            &[("q1", 0, 2, vec!["a"]), ("q2", 0, 2, vec!["b"])],
        )
        .unwrap();
        assert_eq!(
            enumerate_hr_stable(&disjoint, Budget::default())
                .unwrap()
                .count(),
            1
        );
    }

    #[test]
    fn budget_guard() {
        let (_, h) = fig1();
        // 2·2·2·2·1 = 16 assignments
        assert!(matches!(
            enumerate_a_perfect_stable(&h, Budget::new(15)).map(|_| ()),
            Err(SolveError::BudgetExceeded { required: 16, .. })
        ));
        let forced = Budget {
            limit: 1,
            force: true,
        };
        assert_eq!(oracle_minsum(&h, forced).unwrap().objective, 7);
    }
}

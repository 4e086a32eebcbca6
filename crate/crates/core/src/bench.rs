//! Seeded sweeps that run every solver against the oracle and count
//! violations. The acceptance suite and `flexq bench` share these.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::approx::{approx_promote, approx_restrict, approx_via_minmax, lower_bound_sum};
use crate::error::SolveError;
use crate::extension::compute_extendable;
use crate::generators::{random, random_hr, RandomParams};
use crate::hr::gale_shapley;
use crate::minmax::solve_minmax;
use crate::minsum::{solve_minsum_exact, ExactOptions};
use crate::model::{is_envy_free, Budget, HrInstance, SmfqInstance, SolveReport};
use crate::oracle::{enumerate_hr_stable, oracle_minmax, oracle_minsum};

pub const SMALL_MAX_AGENTS: usize = 6;
pub const SMALL_MAX_PROGRAMS: usize = 5;
pub const SMALL_MAX_LIST: usize = 4;
pub const SMALL_MAX_COST: u64 = 9;
pub const HR_MAX_AGENTS: usize = 6;
pub const HR_MAX_PROGRAMS: usize = 4;
pub const HR_MAX_LIST: usize = 3;
pub const HR_MAX_QUOTA: u32 = 2;

/// Instance shape for `seed` in the small suite.
pub fn small_params(seed: u64) -> RandomParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let programs = rng.gen_range(1..=SMALL_MAX_PROGRAMS);
    RandomParams {
        agents: rng.gen_range(1..=SMALL_MAX_AGENTS),
        programs,
        list_len: rng.gen_range(1..=SMALL_MAX_LIST.min(programs)),
        cost_max: SMALL_MAX_COST,
        seed,
    }
}

pub fn small_instance(seed: u64) -> SmfqInstance {
    random(&small_params(seed)).expect("small parameters are valid")
}

pub fn hr_params(seed: u64) -> RandomParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let programs = rng.gen_range(1..=HR_MAX_PROGRAMS);
    RandomParams {
        agents: rng.gen_range(1..=HR_MAX_AGENTS),
        programs,
        list_len: rng.gen_range(1..=HR_MAX_LIST.min(programs)),
        cost_max: 0,
        seed,
    }
}

pub fn hr_instance(seed: u64) -> HrInstance {
    random_hr(&hr_params(seed), HR_MAX_QUOTA).expect("hr parameters are valid")
}

/// Objectives of every solver on one small instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallCase {
    pub seed: u64,
    pub agents: usize,
    pub programs: usize,
    pub ell_p: usize,
    pub lower_bound: u64,
    pub oracle_sum: u64,
    pub exact: u64,
    pub promote: u64,
    pub restrict: u64,
    pub via_minmax: u64,
    pub oracle_max: u64,
    pub minmax: u64,
    pub violations: Vec<String>,
}

fn feasible(instance: &SmfqInstance, r: &SolveReport, violations: &mut Vec<String>) {
    if !r.matching.is_a_perfect() {
        violations.push(format!("{} output is not A-perfect", r.method));
    }
    if !is_envy_free(instance.market(), &r.matching) {
        violations.push(format!("{} output is not envy-free", r.method));
    }
}

pub fn run_small_case(seed: u64) -> Result<SmallCase, SolveError> {
    let inst = small_instance(seed);
    let market = inst.market();
    let budget = Budget::default();
    let oracle_sum = oracle_minsum(&inst, budget)?;
    let oracle_max = oracle_minmax(&inst, budget)?;
    let exact = solve_minsum_exact(&inst, ExactOptions::default())?;
    let promote = approx_promote(&inst)?;
    let restrict = approx_restrict(&inst)?;
    let via_minmax = approx_via_minmax(&inst)?;
    let minmax = solve_minmax(&inst)?;

    let mut violations = Vec::new();
    for r in [&exact, &promote, &restrict, &via_minmax, &minmax] {
        feasible(&inst, r, &mut violations);
    }
    if exact.objective != oracle_sum.objective {
        violations.push(format!(
            "exact {} != oracle {}",
            exact.objective, oracle_sum.objective
        ));
    }
    if minmax.objective != oracle_max.objective {
        violations.push(format!(
            "minmax {} != oracle {}",
            minmax.objective, oracle_max.objective
        ));
    }
    let ell_p = market.max_program_list_len();
    let lower_bound = lower_bound_sum(&inst);
    for r in [&promote, &restrict] {
        if r.objective > ell_p as u64 * lower_bound {
            violations.push(format!(
                "{} {} > ell_p * lb = {}",
                r.method,
                r.objective,
                ell_p as u64 * lower_bound
            ));
        }
    }
    let b_bound = market.num_programs() as u64 * oracle_sum.objective;
    if via_minmax.objective > b_bound {
        violations.push(format!(
            "minmax-based {} > |B| * opt = {b_bound}",
            via_minmax.objective
        ));
    }

    Ok(SmallCase {
        seed,
        agents: market.num_agents(),
        programs: market.num_programs(),
        ell_p,
        lower_bound,
        oracle_sum: oracle_sum.objective,
        exact: exact.objective,
        promote: promote.objective,
        restrict: restrict.objective,
        via_minmax: via_minmax.objective,
        oracle_max: oracle_max.objective,
        minmax: minmax.objective,
        violations,
    })
}

/// Seeds `0..seeds`.
pub fn run_small(seeds: u64) -> Result<Vec<SmallCase>, SolveError> {
    (0..seeds).map(run_small_case).collect()
}

fn ratio(value: u64, opt: u64) -> String {
    match (value, opt) {
        (0, 0) => "1.000".into(),
        (_, 0) => "inf".into(),
        _ => format!("{:.3}", value as f64 / opt as f64),
    }
}

pub fn small_table(cases: &[SmallCase]) -> String {
    let mut out = String::from(
        "seed\t|A|\t|B|\tell_p\tlb\topt_sum\texact\tpromote\tr_prom\trestrict\tr_rest\tvia_mm\tr_mm\topt_max\tminmax\tviolations\n",
    );
    for c in cases {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            c.seed,
            c.agents,
            c.programs,
            c.ell_p,
            c.lower_bound,
            c.oracle_sum,
            c.exact,
            c.promote,
            ratio(c.promote, c.oracle_sum),
            c.restrict,
            ratio(c.restrict, c.oracle_sum),
            c.via_minmax,
            ratio(c.via_minmax, c.oracle_sum),
            c.oracle_max,
            c.minmax,
            c.violations.len(),
        );
    }
    let total: usize = cases.iter().map(|c| c.violations.len()).sum();
    let worst = |f: fn(&SmallCase) -> u64| {
        cases
            .iter()
            .filter(|c| c.oracle_sum > 0)
            .map(|c| f(c) as f64 / c.oracle_sum as f64)
            .fold(1.0f64, f64::max)
    };
    let _ = writeln!(out, "# instances={}", cases.len());
    let _ = writeln!(out, "# worst_ratio_promote={:.3}", worst(|c| c.promote));
    let _ = writeln!(out, "# worst_ratio_restrict={:.3}", worst(|c| c.restrict));
    let _ = writeln!(out, "# worst_ratio_minmax={:.3}", worst(|c| c.via_minmax));
    let _ = writeln!(out, "# violations={total}");
    for c in cases {
        for v in &c.violations {
            let _ = writeln!(out, "# seed {}: {v}", c.seed);
        }
    }
    out
}

/// Containment check on one HR instance: every agent that some
/// stable matching can extend is also extendable from the agent-optimal
/// matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HrCase {
    pub seed: u64,
    pub agents: usize,
    pub stable_matchings: usize,
    pub matchable: usize,
    pub violations: Vec<String>,
}

pub fn run_hr_case(seed: u64) -> Result<HrCase, SolveError> {
    let hr = hr_instance(seed);
    let market = hr.market();
    let m = gale_shapley(&hr);
    let reference = compute_extendable(&hr, &m)?;
    let mut violations = Vec::new();
    let mut count = 0;
    for other in enumerate_hr_stable(&hr, Budget::default())? {
        count += 1;
        let ctx = compute_extendable(&hr, &other)?;
        for &a in ctx.matchable() {
            if !reference.matchable().contains(&a) {
                violations.push(format!(
                    "{} is matchable from {} but not from the agent-optimal matching",
                    market.agent_name(a),
                    other
                ));
            }
        }
    }
    if count == 0 {
        violations.push("oracle found no stable matching".into());
    }
    Ok(HrCase {
        seed,
        agents: market.num_agents(),
        stable_matchings: count,
        matchable: reference.matchable().len(),
        violations,
    })
}

pub fn run_hr(seeds: u64) -> Result<Vec<HrCase>, SolveError> {
    (0..seeds).map(run_hr_case).collect()
}

pub fn hr_table(cases: &[HrCase]) -> String {
    let mut out = String::from("seed\t|A|\tstable\tmatchable\tviolations\n");
    for c in cases {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            c.seed,
            c.agents,
            c.stable_matchings,
            c.matchable,
            c.violations.len()
        );
    }
    let total: usize = cases.iter().map(|c| c.violations.len()).sum();
    let _ = writeln!(out, "# instances={}", cases.len());
    let _ = writeln!(out, "# violations={total}");
    for c in cases {
        for v in &c.violations {
            let _ = writeln!(out, "# seed {}: {v}", c.seed);
        }
    }
    out
}

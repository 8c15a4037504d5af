mod common;

use std::collections::BTreeSet;

use num_bigint::BigUint;
use patch_impact::classifier::{eq_check, Pair};
use patch_impact::enumcount::{enumerate, Case};
use patch_impact::formula::{range_vector_constraint, Assignment, BvVar, RangePair, Role};
use patch_impact::minilang::{load, parse, pretty_print, IntSort, Signedness};
use patch_impact::oracle::Oracle;
use patch_impact::rangesearch::{divide_range, halve, prioritized_divide_range, quantify, Method, Regions};
use patch_impact::report::{analyze, load_pair, AnalysisConfig};
use patch_impact::summarizer::{eval_concrete, summarize};
use proptest::prelude::*;

use common::{random_pair, Prog};

const SOLVER_CASES: u32 = 12;

fn loaded(p: &Prog, name: &str) -> patch_impact::minilang::TypedFunction {
    load(&p.render(name)).unwrap()
}

fn solver_pair(a: &Prog, b: &Prog) -> Pair {
    Pair::new(summarize(&loaded(a, "original"), 64).unwrap(), summarize(&loaded(b, "patched"), 64).unwrap()).unwrap()
}

fn env(vars: &[BvVar], p: &Prog, point: &[i64]) -> Assignment {
    vars.iter().zip(point).map(|(v, &x)| (v.name.clone(), p.sort.bits(x))).collect()
}

fn i128_point(point: &[i64]) -> Vec<i128> {
    point.iter().map(|&v| v as i128).collect()
}

fn range_strategy() -> impl Strategy<Value = (IntSort, RangePair)> {
    (prop_oneof![Just(8u32), Just(16), Just(32), Just(64)], any::<bool>(), any::<u64>(), any::<u64>()).prop_map(
        |(w, signed, a, b)| {
            let sort = IntSort::new(w, if signed { Signedness::Signed } else { Signedness::Unsigned }).unwrap();
            let span = sort.max_value() - sort.min_value() + 1;
            let pick = |r: u64| sort.min_value() + (r as i128).rem_euclid(span);
            let (lo, hi) = (pick(a).min(pick(b)), pick(a).max(pick(b)));
            (sort, RangePair::new(sort, lo, hi).unwrap())
        },
    )
}

fn volume(b: &[RangePair]) -> u128 {
    b.iter().map(|p| p.size()).product()
}

fn boxes_overlap(a: &[RangePair], b: &[RangePair]) -> bool {
    a.iter().zip(b).all(|(p, q)| p.min <= q.max && q.min <= p.max)
}

proptest! {
    #[test]
    fn halves_partition_the_range((_sort, p) in range_strategy()) {
        let parts = halve(p);
        prop_assert!(!parts.is_empty() && parts.len() <= 2);
        prop_assert_eq!(parts[0].min, p.min);
        prop_assert_eq!(parts.last().unwrap().max, p.max);
        for w in parts.windows(2) {
            prop_assert_eq!(w[0].max + 1, w[1].min);
        }
        prop_assert_eq!(parts.iter().map(|q| q.size()).sum::<u128>(), p.size());
    }

    #[test]
    fn divided_boxes_partition_the_box(a in range_strategy(), b in range_strategy()) {
        let parent = [a.1, b.1];
        let children = divide_range(&parent);
        prop_assert_eq!(children.iter().map(|c| volume(c)).sum::<u128>(), volume(&parent));
        for (i, c) in children.iter().enumerate() {
            for (p, q) in c.iter().zip(&parent) {
                prop_assert!(q.min <= p.min && p.max <= q.max);
            }
            for d in &children[i + 1..] {
                prop_assert!(!boxes_overlap(c, d));
            }
        }
    }

    #[test]
    fn prioritized_division_shrinks_toward_zero((_sort, p) in range_strategy()) {
        match prioritized_divide_range(p) {
            Ok(q) => {
                prop_assert!(p.min <= q.min && q.max <= p.max);
                if p.min >= 1 {
                    prop_assert_eq!(q.min, p.min);
                    prop_assert_eq!(q.max, p.max.div_euclid(2) + p.max.rem_euclid(2));
                } else {
                    prop_assert!(p.max <= -1);
                    prop_assert_eq!(q.max, p.max);
                    prop_assert_eq!(q.min, p.min.div_euclid(2) + p.min.rem_euclid(2));
                }
            }
            Err(_) => {
                let ceil_half = |v: i128| v.div_euclid(2) + v.rem_euclid(2);
                let straddles = p.min <= 0 && p.max >= 0;
                let empty = (p.min >= 1 && ceil_half(p.max) < p.min) || (p.max <= -1 && ceil_half(p.min) > p.max);
                prop_assert!(straddles || empty);
            }
        }
    }

    #[test]
    fn pretty_printing_round_trips(seed in any::<u64>()) {
        let (a, b) = random_pair(seed);
        for (p, name) in [(a, "original"), (b, "patched")] {
            let ast = parse(&p.render(name)).unwrap();
            let again = parse(&pretty_print(&ast)).unwrap();
            prop_assert_eq!(again, ast);
        }
    }

    #[test]
    fn concrete_evaluation_matches_native_semantics(seed in any::<u64>()) {
        let (p, _) = random_pair(seed);
        let f = loaded(&p, "f");
        for point in p.inputs() {
            let got = eval_concrete(&f, &i128_point(&point), 64).unwrap();
            prop_assert_eq!(got.to_i128(), p.eval(&point) as i128, "input {:?}", point);
        }
    }

    #[test]
    fn summaries_are_exact_at_width_8(seed in any::<u64>()) {
        let (p, _) = random_pair(seed);
        let s = summarize(&loaded(&p, "f"), 64).unwrap();
        let decls = s.decls();
        let inputs: Vec<BvVar> = decls.iter().filter(|v| v.role == Role::Input).cloned().collect();
        let out = decls.iter().find(|v| v.role == Role::Output).unwrap().clone();
        let formula = s.formula();
        for point in p.inputs() {
            let mut env = env(&inputs, &p, &point);
            let want = p.sort.bits(p.eval(&point));
            prop_assert_eq!(s.eval(&env), Some(want));
            env.insert(out.name.clone(), want);
            prop_assert_eq!(formula.eval_with(&env), Some(true));
            env.insert(out.name.clone(), (want + 1) & 0xff);
            prop_assert_eq!(formula.eval_with(&env), Some(false));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(SOLVER_CASES))]

    #[test]
    fn classification_is_symmetric(seed in any::<u64>()) {
        let (a, b) = random_pair(seed);
        let oracle = Oracle::new(common::solver(true)).unwrap();
        let forward = eq_check(&solver_pair(&a, &b), &oracle).unwrap().kind;
        let backward = eq_check(&solver_pair(&b, &a), &oracle).unwrap().kind;
        prop_assert_eq!(forward, backward);
    }

    #[test]
    fn search_respects_query_ceilings(seed in any::<u64>()) {
        let (a, b) = random_pair(seed);
        let pair = solver_pair(&a, &b);
        let oracle = Oracle::new(common::solver(true)).unwrap();
        let n = pair.inputs().len() as u32;
        let width = 8u32;
        for m in [Method::Relational, Method::Iterative, Method::Priority] {
            let q = quantify(&pair, &oracle, m, None).unwrap();
            let l = q.limit;
            let pairs: u64 = match m {
                Method::Relational => (0..=l).map(|d| 1u64 << (n * d)).sum(),
                Method::Iterative => u64::from(n) << (l + 1),
                // halving steps plus one expansion probe per bit
                _ => u64::from(n * (2 * width + width + 1)),
            };
            prop_assert!(q.solver_calls <= 2 * pairs, "{} used {} queries, cap {}", m, q.solver_calls, 2 * pairs);
        }
    }

    #[test]
    fn certified_regions_recheck_and_agree(seed in any::<u64>()) {
        let (a, b) = random_pair(seed);
        let pair = solver_pair(&a, &b);
        let oracle = Oracle::new(common::solver(true)).unwrap();
        let inputs = pair.inputs();
        for m in [Method::Relational, Method::Combined] {
            let q = quantify(&pair, &oracle, m, None).unwrap();
            let boxes: Vec<(Vec<RangePair>, &Vec<u64>)> = match &q.regions {
                Regions::Set(s) => s.boxes.iter().map(|b| (b.region.clone(), &b.certificates)).collect(),
                Regions::List(l) => l.vars.iter().enumerate().flat_map(|(n, cs)| {
                    cs.iter().map(move |c| {
                        let mut r: Vec<RangePair> = inputs.iter().map(|v| RangePair::full(v.sort)).collect();
                        r[n] = c.region;
                        (r, &c.certificates)
                    })
                }).collect(),
            };
            for (region, certs) in boxes {
                prop_assert!(!certs.is_empty());
                let range = range_vector_constraint(inputs, &region);
                prop_assert!(oracle.is_sat(pair.decls(), &pair.differ_within(&range)).unwrap().is_unsat());
                for point in a.inputs() {
                    if region.iter().zip(&point).all(|(r, &v)| r.contains(v as i128)) {
                        prop_assert_eq!(a.eval(&point), b.eval(&point), "{:?} in {:?}", point, region);
                    }
                }
            }
        }
    }

    #[test]
    fn enumerated_models_are_distinct_and_revalidate(seed in any::<u64>()) {
        let (a, b) = random_pair(seed);
        let pair = solver_pair(&a, &b);
        let oracle = Oracle::new(common::solver(true)).unwrap();
        let r = enumerate(&pair, &oracle, Some(400)).unwrap();
        let eq: BTreeSet<_> = r.eq_inputs.iter().cloned().collect();
        let neq: BTreeSet<_> = r.neq_inputs.iter().cloned().collect();
        prop_assert_eq!(eq.len(), r.eq_inputs.len());
        prop_assert_eq!(neq.len(), r.neq_inputs.len());
        prop_assert!(eq.is_disjoint(&neq));
        let native = |m: &Vec<i128>| {
            let point: Vec<i64> = m.iter().map(|&v| v as i64).collect();
            a.eval(&point) == b.eval(&point)
        };
        prop_assert!(r.eq_inputs.iter().all(native));
        prop_assert!(!r.neq_inputs.iter().any(native));
        match r.case {
            Case::Case1 => prop_assert_eq!(r.exact_eq_count, Some(BigUint::from(eq.len()))),
            Case::Case2 => prop_assert_eq!(r.exact_eq_count, Some(&r.domain_size - neq.len())),
            Case::Case3 => prop_assert_eq!(r.eq_count_lower_bound, BigUint::from(eq.len())),
        }
    }

    #[test]
    fn percentages_sum_to_one_hundred(seed in any::<u64>()) {
        let (a, b) = random_pair(seed);
        let loaded = load_pair(&a.render("original"), &b.render("patched")).unwrap();
        let cfg = AnalysisConfig { solver: common::solver(true), stable: true, ..AnalysisConfig::default() };
        let r = analyze("pair", ("a", "b"), &loaded, &cfg).unwrap().report;
        let frac = |p: &patch_impact::report::Percent| {
            num_rational::BigRational::new(p.numerator.parse().unwrap(), p.denominator.parse().unwrap())
        };
        let sum = frac(&r.eq_percent_lower_bound) + frac(&r.impact_percent_upper_bound);
        prop_assert_eq!(sum, num_rational::BigRational::from_integer(100.into()));
        let eq: f64 = r.eq_percent_lower_bound.display.parse().unwrap();
        let impact: f64 = r.impact_percent_upper_bound.display.parse().unwrap();
        prop_assert!((eq + impact - 100.0).abs() < 1e-9);
    }
}

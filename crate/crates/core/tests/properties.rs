use fsdim::arithmetic::multiply_mod1;
use fsdim::entropy::{distribution, normalized_entropy, restricted_entropy, sliding_counts_chunked, Mode};
use fsdim::gambler::Gambler;
use fsdim::measures::{partition_entropy, pushforward_integer, AnalyticMeasure};
use fsdim::weyl::{limit_report, weyl_partial_average, Schedule, Verdict};
use fsdim::SymbolSequence;
use proptest::prelude::*;

fn digits(base: u32, len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0..base as u8, len)
}

fn gambler() -> impl Strategy<Value = Gambler> {
    (1usize..=6).prop_flat_map(|k| {
        (
            prop::collection::vec([0..k, 0..k], k),
            prop::collection::vec(0.0f64..=1.0, k),
            0..k,
            0.1f64..4.0,
        )
            .prop_map(|(delta, beta, q0, c0)| Gambler::new(delta, beta, q0, c0).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chunked_counts_do_not_depend_on_chunking(d in digits(3, 10..400), l in 1usize..5, chunk in 1usize..64) {
        prop_assume!(d.len() >= l);
        let whole = sliding_counts_chunked(&d, 3, l, d.len()).unwrap();
        prop_assert_eq!(sliding_counts_chunked(&d, 3, l, chunk).unwrap(), whole);
    }

    #[test]
    fn restricted_entropy_sandwich(d in digits(2, 64..600), l in 1usize..9) {
        let x = SymbolSequence::from_digits(2, d.clone()).unwrap();
        for mode in [Mode::Sliding, Mode::Disjoint] {
            let dist = distribution(&x, d.len(), l, mode).unwrap();
            let (h, ht) = (normalized_entropy(&dist), restricted_entropy(&dist));
            prop_assert!(ht <= h + 1e-15);
            prop_assert!(h <= ht + 2.0 / l as f64);
        }
    }

    #[test]
    fn entropy_invariant_under_symbol_relabelling(d in digits(3, 30..300), l in 1usize..4) {
        let perm = [2u8, 0, 1];
        let x = SymbolSequence::from_digits(3, d.clone()).unwrap();
        let y = SymbolSequence::from_digits(3, d.iter().map(|&c| perm[c as usize]).collect()).unwrap();
        let hx = normalized_entropy(&distribution(&x, d.len(), l, Mode::Sliding).unwrap());
        let hy = normalized_entropy(&distribution(&y, d.len(), l, Mode::Sliding).unwrap());
        prop_assert!((hx - hy).abs() < 1e-12);
    }

    #[test]
    fn weyl_conjugate_symmetry(d in digits(2, 80..300), k in 1i64..50) {
        let x = SymbolSequence::from_digits(2, d.clone()).unwrap();
        let n = d.len() - 64;
        let a = weyl_partial_average(&x, k, n, 64).unwrap();
        let b = weyl_partial_average(&x, -k, n, 64).unwrap();
        prop_assert!((a.value - b.value.conj()).norm() < 1e-12);
        prop_assert!(a.value.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn certified_digits_stable_under_extension(d in digits(2, 1..40), period in digits(2, 1..6), m in 1u64..40) {
        let x = SymbolSequence::eventually_periodic(2, d, period).unwrap();
        let short = multiply_mod1(&x, m, 30).unwrap();
        let long = multiply_mod1(&x, m, 60).unwrap();
        let c = short.certified_count.min(long.certified_count);
        prop_assert_eq!(&short.certified()[..c], &long.certified()[..c]);
    }

    #[test]
    fn multiplication_composes(d in digits(2, 200..260), m1 in 1u64..12, m2 in 1u64..12) {
        let x = SymbolSequence::from_digits(2, d).unwrap();
        let step = multiply_mod1(&x, m1, 120).unwrap().to_sequence().unwrap();
        let twice = multiply_mod1(&step, m2, 100).unwrap();
        let once = multiply_mod1(&x, m1 * m2, 100).unwrap();
        prop_assert_eq!(twice.certified(), once.certified());
    }

    #[test]
    fn sgale_identity(g in gambler(), s in 0.0f64..2.0, w in digits(2, 0..12)) {
        let d = g.capital(s, &w);
        let mut w0 = w.clone();
        w0.push(0);
        let mut w1 = w;
        w1.push(1);
        let rhs = (-s).exp2() * (g.capital(s, &w0) + g.capital(s, &w1));
        prop_assert!((d - rhs).abs() <= 1e-12 * d.max(1.0));
    }

    #[test]
    fn capital_monotone_in_s(g in gambler(), s in 0.0f64..1.5, ds in 0.0f64..0.5, w in digits(2, 0..30)) {
        prop_assert!(g.log2_capital(s, &w) <= g.log2_capital(s + ds, &w));
    }

    #[test]
    fn limit_report_recovers_convergent_limit(limit in -1.0f64..1.0, amp in 0.0f64..1.0) {
        let series: Vec<(usize, f64)> = (1..=40).map(|i| (i * 100, limit + amp / (i * i * i) as f64)).collect();
        let cps = series.iter().map(|p| p.0).collect();
        let report = limit_report(&series, &[Schedule::new("all", cps)], 1e-3).unwrap();
        let v = &report.schedules[0];
        prop_assert_eq!(v.verdict, Verdict::Converged);
        prop_assert!((v.limit.unwrap() - limit).abs() <= 1e-3);
    }

    #[test]
    fn pushforward_entropy_sandwich(p in 0.05f64..0.95, m in 2u32..6, n in 1usize..8) {
        let mu = AnalyticMeasure::binary_bernoulli(p).unwrap();
        let push = pushforward_integer(&mu, m).unwrap();
        let h_push = partition_entropy(&push, 2, n).unwrap();
        let h_mu = partition_entropy(&mu, 2, n).unwrap();
        // f_m is at most m-to-one on dyadic intervals, up to boundary splitting
        let slack = ((m + 1) as f64).ln() + 2.0 * (m as f64).ln();
        prop_assert!(h_push <= h_mu + slack + 1e-9);
        prop_assert!(h_mu <= h_push + slack + 1e-9);
    }
}

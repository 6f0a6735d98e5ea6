use famcorr::engine::{correlation_measure, cross_correlation_measure};
use famcorr::extremal::{
    digit_construction, exhaustive_min, gram_certificate, odd_min_bounds, pigeonhole_certificate,
    rank_inequality_check, ScaledMatrix, SearchOptions, SubsetStrategy,
};
use famcorr::oracle::cross_correlation_sum;
use famcorr::randstat::sample_family;

#[test]
fn digit_construction_sandwich() {
    for s in [2, 4, 8, 16] {
        for n in [8, 16] {
            let g = digit_construction(n, s).unwrap();
            assert!(g.is_injective());
            let phi = cross_correlation_measure(&g, 3).unwrap().value;
            let b = odd_min_bounds(n, s, 1).unwrap();
            assert!(
                b.lower <= phi && phi <= b.upper,
                "S={s} N={n}: {phi} vs {b:?}"
            );
        }
    }
}

#[test]
fn exhaustive_minima_respect_the_sequence_bound() {
    for (n, s, order) in [
        (4, 1, 2),
        (6, 1, 2),
        (8, 1, 2),
        (5, 2, 2),
        (6, 1, 4),
        (4, 3, 2),
    ] {
        let found = exhaustive_min(n, s, order, &SearchOptions::default()).unwrap();
        let k = order / 2;
        let bound = ((n / (2 * k + 1)) as f64 / 2.0).sqrt();
        assert!(found.min_value as f64 > bound, "N={n} S={s} order={order}");
        assert!(found.argmin.is_injective());
        let row_min = found
            .argmin
            .rows()
            .iter()
            .map(|r| correlation_measure(r, order).unwrap().value)
            .max()
            .unwrap();
        assert!(row_min <= found.min_value);
    }
}

#[test]
fn pruning_never_cuts_an_optimum() {
    for (n, s, order) in [(5, 2, 3), (6, 2, 3), (4, 3, 3), (6, 1, 3)] {
        let pruned = exhaustive_min(n, s, order, &SearchOptions::default()).unwrap();
        let full = exhaustive_min(
            n,
            s,
            order,
            &SearchOptions {
                prune: false,
                ..SearchOptions::default()
            },
        )
        .unwrap();
        assert_eq!(pruned.min_value, full.min_value);
        assert_eq!(pruned.optima, full.optima);
        assert_eq!(pruned.argmin, full.argmin);
        assert!(pruned.nodes <= full.nodes);
    }
}

#[test]
fn worker_count_does_not_change_the_search() {
    let run = |w| {
        exhaustive_min(
            6,
            2,
            3,
            &SearchOptions {
                workers: Some(w),
                ..SearchOptions::default()
            },
        )
        .unwrap()
    };
    let one = run(1);
    for w in [2, 8] {
        let other = run(w);
        assert_eq!(
            (one.min_value, one.optima, &one.argmin, &one.witness),
            (other.min_value, other.optima, &other.argmin, &other.witness)
        );
    }
}

#[test]
fn certificates_are_sound() {
    for index in 0..25 {
        let g = sample_family(24, 6, 2024, index).unwrap();
        let phi4 = cross_correlation_measure(&g, 4).unwrap().value;
        let phi5 = cross_correlation_measure(&g, 5).unwrap().value;
        let prefix = pigeonhole_certificate(&g, 2).unwrap();
        assert!(prefix.implied_bound() <= phi5);
        for strategy in [SubsetStrategy::Distinct, SubsetStrategy::DisjointShifted] {
            let cert = gram_certificate(&g, 2, strategy, 32).unwrap();
            let w = &cert.witness;
            let sum = cross_correlation_sum(&g, &w.pattern, w.window.0, w.window.1).unwrap();
            assert_eq!(sum.unsigned_abs(), cert.implied_bound());
            assert!(cert.implied_bound() <= phi4);
            let m = ScaledMatrix::new(cert.gram.clone(), cert.vector_len as u64).unwrap();
            let report = rank_inequality_check(&m).unwrap();
            assert!(report.basic.holds);
            assert!(report.logarithmic.is_none_or(|l| l.holds));
        }
    }
}

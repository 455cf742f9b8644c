use lquasi::{LeftQuasigroup, Limits};
use lquasi_cli::enumerate;
use lquasi_cli::format::StructureFile;
use lquasi_cli::report;
use proptest::prelude::*;

fn left_quasigroup(max: usize) -> impl Strategy<Value = LeftQuasigroup> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(Just((0..n).collect::<Vec<usize>>()).prop_shuffle(), n)
            .prop_map(|rows| LeftQuasigroup::validate(&rows).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip(q in left_quasigroup(7), named in any::<bool>()) {
        let mut file = StructureFile::from_algebra(&q);
        if named {
            file = file.named("sample");
        }
        let text = file.emit_text();
        let again = StructureFile::parse(&text).unwrap();
        prop_assert_eq!(&again, &file);
        prop_assert_eq!(again.emit_text(), text);
        prop_assert_eq!(again.to_algebra(false).unwrap(), q);
    }

    #[test]
    fn json_round_trip(q in left_quasigroup(7)) {
        let file = StructureFile::from_algebra(&q);
        let again = StructureFile::parse(&file.emit_json()).unwrap();
        prop_assert_eq!(again.emit_json(), file.emit_json());
    }

    #[test]
    fn transposition_is_an_involution(q in left_quasigroup(6)) {
        let t = LeftQuasigroup::transposed_rows(&q.rows());
        prop_assert_eq!(LeftQuasigroup::transposed_rows(&t), q.rows());
    }

    #[test]
    fn report_json_round_trip(q in left_quasigroup(4)) {
        let r = report::build(&q, None, &Limits::default()).unwrap();
        let text = report::to_json(&r);
        let back = report::from_json(&text).unwrap();
        prop_assert_eq!(report::to_json(&back), text);
        prop_assert_eq!(back, r);
    }

    #[test]
    fn canonical_form_is_invariant(q in left_quasigroup(4), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let n = q.order();
        let mut sigma: Vec<usize> = (0..n).collect();
        sigma.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let mut rows = vec![vec![0; n]; n];
        for x in 0..n {
            for y in 0..n {
                rows[sigma[x]][sigma[y]] = sigma[q.op(x, y)];
            }
        }
        let p = LeftQuasigroup::validate(&rows).unwrap();
        prop_assert_eq!(enumerate::canonical_form(&p), enumerate::canonical_form(&q));
    }
}

#[test]
fn enumeration_counts() {
    for (n, expected) in [(1, 1), (2, 4), (3, 216)] {
        assert_eq!(enumerate::enumerate(n, enumerate::Filter::NONE, false).unwrap().len(), expected);
        assert_eq!(enumerate::raw_count(n), expected as u128);
    }
    for (n, expected) in [(1usize, 1usize), (2, 1), (3, 8)] {
        let idem = enumerate::Filter {
            idempotent: true,
            ..enumerate::Filter::NONE
        };
        let factorial: usize = (1..n).product();
        assert_eq!(factorial.pow(n as u32), expected);
        assert_eq!(enumerate::enumerate(n, idem, false).unwrap().len(), expected);
    }
}

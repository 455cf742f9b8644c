use lquasi::commut;
use lquasi::congr;
use lquasi::displ::{Displacement, Lattices};
use lquasi::perm;
use lquasi::{LeftQuasigroup, Limits, Partition};
use proptest::prelude::*;

fn left_quasigroup(max: usize) -> impl Strategy<Value = LeftQuasigroup> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(Just((0..n).collect::<Vec<usize>>()).prop_shuffle(), n)
            .prop_map(|rows| LeftQuasigroup::validate(&rows).unwrap())
    })
}

fn rack(max: usize) -> impl Strategy<Value = LeftQuasigroup> {
    left_quasigroup(max).prop_filter("rack", |q| q.is_rack())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_chain(q in left_quasigroup(4)) {
        let d = Displacement::new(&q, &Limits::default()).unwrap();
        let lat = Lattices::compute(&d).unwrap();
        for (i, alpha) in lat.congruences.iter().enumerate() {
            let (low, high) = (&lat.dis_low[i], &lat.dis_high[i]);
            prop_assert!(perm::is_subgroup(low, high));
            prop_assert!(low.orbits().leq(&high.orbits()));
            prop_assert!(high.orbits().leq(alpha));
            prop_assert!(alpha.leq(&d.cayley_eq(low)));
            prop_assert!(d.cayley_eq(low).leq(&d.cayley_eq(high)));
        }
    }

    #[test]
    fn orbit_adjunction(q in left_quasigroup(4)) {
        let d = Displacement::new(&q, &Limits::default()).unwrap();
        let lat = Lattices::compute(&d).unwrap();
        prop_assert_eq!(lat.orbit_adjunction_violation(), None);
        for (n, orb) in lat.admissibles.iter().zip(&lat.orb) {
            prop_assert!(congr::is_congruence(&q, orb));
            prop_assert!(perm::is_subgroup(n, &d.dis_sup_alpha(orb).unwrap()));
        }
    }

    #[test]
    fn dis_is_normal(q in left_quasigroup(5)) {
        let d = Displacement::new(&q, &Limits::default()).unwrap();
        prop_assert!(perm::is_normal_in(d.dis(), d.lmlt()));
        prop_assert_eq!(d.dis().order() == 1, congr::cayley_kernel(&q).is_total());
    }

    #[test]
    fn congruences_form_a_lattice(q in left_quasigroup(4)) {
        let cons = congr::all_congruences(&q, &Limits::default()).unwrap();
        for a in &cons {
            for b in &cons {
                prop_assert!(cons.contains(&a.meet(b)));
                prop_assert!(cons.contains(&a.join(b)));
            }
        }
    }

    #[test]
    fn quotients_are_left_quasigroups(q in left_quasigroup(4)) {
        for alpha in congr::all_congruences(&q, &Limits::default()).unwrap() {
            let quot = q.quotient(&alpha).unwrap();
            prop_assert_eq!(quot.algebra.order(), alpha.block_count());
            for x in 0..q.order() {
                for y in 0..q.order() {
                    prop_assert_eq!(quot.block_of[q.op(x, y)], quot.algebra.op(quot.block_of[x], quot.block_of[y]));
                }
            }
        }
    }

    #[test]
    fn center_is_central(q in left_quasigroup(3)) {
        let zeta = commut::center(&q, &Limits::default()).unwrap();
        prop_assert!(commut::is_central_congruence(&q, &zeta));
        let zero = Partition::discrete(q.order());
        let one = Partition::total(q.order());
        prop_assert_eq!(commut::commutator(&q, &zeta, &one, &Limits::default()).unwrap(), zero);
    }

    #[test]
    fn rack_cayley_relation_is_a_congruence(q in rack(4)) {
        let d = Displacement::new(&q, &Limits::default()).unwrap();
        let lat = Lattices::compute(&d).unwrap();
        for cay in &lat.cay {
            prop_assert!(congr::is_congruence(&q, cay));
        }
    }
}

#[test]
fn named_structures() {
    let lim = Limits::default();
    let p2 = LeftQuasigroup::projection(2);
    let d = Displacement::new(&p2, &lim).unwrap();
    let lat = Lattices::compute(&d).unwrap();
    assert_eq!(lat.admissibles.len(), 1);
    assert!(!lat.cdos(&d).unwrap());
    assert!(congr::cayley_kernel(&p2).is_total());

    let shift = LeftQuasigroup::from_fn(2, |_, y| (y + 1) % 2).unwrap();
    let d = Displacement::new(&shift, &lim).unwrap();
    assert!(d.dis().is_trivial());
    assert_eq!(congr::all_congruences(&shift, &lim).unwrap().len(), 2);

    let r3 = LeftQuasigroup::dihedral(3);
    let d = Displacement::new(&r3, &lim).unwrap();
    let lat = Lattices::compute(&d).unwrap();
    assert_eq!(lat.congruences.len(), 2);
    let orders: Vec<usize> = lat.admissibles.iter().map(|n| n.order()).collect();
    assert_eq!(orders, vec![1, 3]);
    assert!(lat.cdos(&d).unwrap() && lat.cdsg(&d).unwrap() && lat.sharp());
}

#[test]
fn fixed_point_beside_dihedral_three() {
    let rows = vec![vec![0, 1, 2, 3], vec![0, 1, 3, 2], vec![0, 3, 2, 1], vec![0, 2, 1, 3]];
    let q = LeftQuasigroup::validate(&rows).unwrap();
    assert!(q.is_rack() && q.is_idempotent());
    let g = lquasi::displ::full_report(&q, &Limits::default()).unwrap();
    assert!(g.flags.cdsg);
    assert!(!g.flags.cdos && !g.flags.sharp);
    let middle = Partition::parse(4, "0|1,2,3").unwrap();
    let quot = q.quotient(&middle).unwrap().algebra;
    assert_eq!(quot, LeftQuasigroup::projection(2));
    assert!(!lquasi::displ::is_cdsg(&quot, &Limits::default()).unwrap());
}

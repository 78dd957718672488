//! Property tests over random lattice shapes, degrees and field data.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use decem::forms::DiscreteForm;
use decem::lattice::{shift, CellIndex, CellSignature, Chain, LatticeTopology};

fn lattice() -> impl Strategy<Value = LatticeTopology> {
    prop_oneof![
        (1usize..=5, 1usize..=5)
            .prop_map(|(a, b)| LatticeTopology::periodic(&[a, b]).unwrap()),
        (1usize..=4, 1usize..=4, 1usize..=4)
            .prop_map(|(a, b, c)| LatticeTopology::periodic(&[a, b, c]).unwrap()),
    ]
}

fn int_form(topo: &LatticeTopology, degree: usize, seed: u64) -> DiscreteForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DiscreteForm::random_integer(topo, degree, &mut rng, 9)
}

proptest! {
    #[test]
    fn boundary_squares_to_zero(topo in lattice(), seed in any::<u64>()) {
        let dim = topo.dimension();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for degree in 2..=dim {
            let sigs = CellSignature::all_of_degree(dim, degree);
            let mut chain = Chain::zero(degree);
            for _ in 0..8 {
                use rand::Rng;
                let sig = sigs[rng.gen_range(0..sigs.len())];
                let coords: Vec<i64> = topo
                    .extents()
                    .iter()
                    .map(|&n| rng.gen_range(0..n as i64))
                    .collect();
                chain.add_term(
                    sig,
                    CellIndex::new(&coords, &topo).unwrap(),
                    rng.gen_range(-3..=3) as f64,
                );
            }
            prop_assert!(chain.boundary(&topo).boundary(&topo).is_zero());
        }
    }

    #[test]
    fn coboundary_squares_to_zero(topo in lattice(), seed in any::<u64>(), degree_pick in any::<usize>()) {
        let degree = degree_pick % topo.dimension();
        let f = int_form(&topo, degree, seed);
        prop_assert!(f.coboundary().coboundary().is_zero());
    }

    #[test]
    fn forward_and_backward_shifts_invert(topo in lattice(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let coords: Vec<i64> = topo
            .extents()
            .iter()
            .map(|&n| rng.gen_range(0..n as i64))
            .collect();
        let idx = CellIndex::new(&coords, &topo).unwrap();
        for axis in 0..topo.dimension() {
            let forward = shift(&idx, axis, 1, &topo).unwrap();
            let back = shift(&forward, axis, -1, &topo).unwrap();
            prop_assert_eq!(&back, &idx);
        }
    }

    #[test]
    fn shift_is_a_bijection_per_axis(topo in lattice()) {
        for axis in 0..topo.dimension() {
            let mut seen = vec![false; topo.cell_count()];
            for ix in topo.cells() {
                let j = topo.neighbor(ix, axis, 1).unwrap();
                prop_assert!(!seen[j]);
                seen[j] = true;
            }
            prop_assert!(seen.into_iter().all(|s| s));
        }
    }

    #[test]
    fn star_roundtrips(topo in lattice(), seed in any::<u64>(), degree_pick in any::<usize>()) {
        let degree = degree_pick % (topo.dimension() + 1);
        let f = int_form(&topo, degree, seed);
        prop_assert_eq!(f.star().star_inverse(), f.clone());
        prop_assert_eq!(f.star_inverse().star(), f);
    }

    #[test]
    fn leibniz_holds(topo in lattice(), seed in any::<u64>(), picks in (any::<usize>(), any::<usize>())) {
        let dim = topo.dimension();
        let r = picks.0 % dim;
        let q = picks.1 % (dim - r);
        let omega = int_form(&topo, r, seed);
        let phi = int_form(&topo, q, seed.wrapping_add(1));
        let lhs = omega.cup(&phi).unwrap().coboundary();
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        let mut rhs = omega.coboundary().cup(&phi).unwrap();
        rhs.axpy(sign, &omega.cup(&phi.coboundary()).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn payload_roundtrip(topo in lattice(), seed in any::<u64>(), degree_pick in any::<usize>()) {
        let degree = degree_pick % (topo.dimension() + 1);
        let f = int_form(&topo, degree, seed);
        let json = serde_json::to_string(&f.to_payload()).unwrap();
        let payload: decem::forms::FormPayload = serde_json::from_str(&json).unwrap();
        let back = DiscreteForm::from_payload(&payload).unwrap();
        prop_assert_eq!(back, f);
    }
}

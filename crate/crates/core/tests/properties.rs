mod common;

use chamberlain::problem::{parse, serialize};
use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn double_description_round_trip((dim, gens) in cone_input()) {
        prop_assert_eq!(dd_round_trip(dim, &gens), Ok(()));
    }

    #[test]
    fn smith_and_kernel_contracts(rows in matrix_input()) {
        prop_assert_eq!(snf_contracts(&rows), Ok(()));
    }

    #[test]
    fn membership_certificates_verify(
        (theta, s) in (1usize..=3).prop_flat_map(|d| (
            prop::collection::vec(-3i64..=3, d),
            prop::collection::vec(prop::collection::vec(-3i64..=3, d), 0..=5),
        ))
    ) {
        prop_assert_eq!(membership_certificate(&theta, &s), Ok(()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn semistability_is_constant_on_chambers(weights in weight_system()) {
        prop_assert_eq!(chamber_coherence(&weights).map(|_| ()), Ok(()));
    }

    #[test]
    fn problem_files_round_trip(
        weights in prop::collection::vec(prop::collection::vec(-5i64..=5, 2), 1..=5),
        chi in prop::collection::vec(0i64..=1, 5),
        theta in prop::collection::vec(-4i64..=4, 2),
        seed in 0u64..1000,
        big in any::<bool>(),
    ) {
        let mut text = format!("theta = [{}, {}]\n[group]\nfree_rank = 2\ntorsion = [4]\n", theta[0], theta[1]);
        for (i, w) in weights.iter().enumerate() {
            let first = if big && i == 0 { "\"123456789012345678901234567890\"".to_string() } else { w[0].to_string() };
            text.push_str(&format!(
                "[[coordinate]]\nname = \"c{i}\"\nweight = [{first}, {}]\ntorsion = [{}]\nchi = {}\n",
                w[1], i % 4, chi[i]
            ));
        }
        text.push_str(&format!("[options]\nside = \"-K\"\nseed = {seed}\nformat = \"text\"\n"));
        let p = parse(&text).unwrap().problem;
        let again = parse(&serialize(&p).unwrap()).unwrap().problem;
        prop_assert_eq!(p, again);
    }
}

#[test]
fn weighted_projective_ranks() {
    let tuples = weight_tuples(12);
    assert!(tuples.len() > 2000);
    for a in tuples {
        assert_eq!(weighted_projective_rank(&a), Ok(()));
    }
}

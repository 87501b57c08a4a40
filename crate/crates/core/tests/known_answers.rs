use streamlab_core::kat;

#[test]
fn every_generator_matches_its_reference_vectors() {
    let sets = kat::load_all();
    assert_eq!(sets.len(), 9);
    for set in &sets {
        for check in kat::verify(set).unwrap() {
            assert!(check.passed(), "{} [{}] first mismatch at {:?}", check.set, check.label, check.first_mismatch);
            assert_eq!(check.compared, 1000);
        }
    }
}

#[test]
fn studied_generators_have_three_seedings() {
    for name in ["splitmix64", "xoshiro256pp", "xoshiro256ss", "xoshiro1024ss", "mrg32k3a", "philox4x32", "pcg32", "mt19937"] {
        let set = kat::load(name).unwrap();
        assert_eq!(set.seedings.len(), 3, "{name}");
    }
}

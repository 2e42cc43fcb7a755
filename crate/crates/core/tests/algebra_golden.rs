use cpn_core::algebra::{reduce_third_variation, NValue, ReductionInputs};

fn check(file: &str, n: NValue, inputs: ReductionInputs) {
    let path = format!("{}/tests/golden/{file}", env!("CARGO_MANIFEST_DIR"));
    let expected = std::fs::read_to_string(&path).unwrap();
    let got = reduce_third_variation(n, &inputs).unwrap().canonical_text();
    assert_eq!(got, expected, "{path}");
}

#[test]
fn shortened_symbolic() {
    check(
        "third_variation_shortened_symbolic.txt",
        NValue::Symbolic,
        ReductionInputs::shortened(),
    );
}

#[test]
fn shortened_n4() {
    check(
        "third_variation_shortened_n4.txt",
        NValue::Fixed(4),
        ReductionInputs::shortened(),
    );
}

#[test]
fn derived_symbolic() {
    check(
        "third_variation_derived_symbolic.txt",
        NValue::Symbolic,
        ReductionInputs::derived(),
    );
}

#[test]
fn derived_n4() {
    check(
        "third_variation_derived_n4.txt",
        NValue::Fixed(4),
        ReductionInputs::derived(),
    );
}

use kgw_cli::report::{parse_record, Record};
use proptest::prelude::*;

fn key() -> impl Strategy<Value = String> {
    "[A-Za-z0-9_.-]{1,12}"
}

fn value() -> impl Strategy<Value = String> {
    prop_oneof![
        "[ -~]{0,20}",
        any::<String>(),
        prop::collection::vec(
            prop::sample::select(vec![
                '"', '\\', '=', ' ', '\n', '\t', '\r', '\u{0}', 'Ω', 'x'
            ]),
            0..10
        )
        .prop_map(|cs| cs.into_iter().collect()),
    ]
}

fn witness() -> impl Strategy<Value = Record> {
    (key(), prop::collection::vec((key(), value()), 0..6))
        .prop_map(|(tag, fields)| Record { tag, fields })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn witnesses_round_trip(w in witness()) {
        let line = w.to_string();
        prop_assert!(!line.contains('\n'));
        prop_assert_eq!(parse_record(&line).unwrap(), w);
    }
}

mod common;

use altgen::layout::{inject_alt_text, LayoutError};
use common::xmlgen::{check_injection, injection_case};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn inject_then_remove_is_identity((root, prolog, pick, alt) in injection_case()) {
        prop_assert_eq!(check_injection(&root, prolog, &pick, &alt), Ok(()));
    }
}

#[test]
fn bad_path_reports_depth() {
    let xml = format!("<LinearLayout {}><ImageButton/></LinearLayout>", common::NS);
    match inject_alt_text(xml.as_bytes(), &[0, 3], "x") {
        Err(LayoutError::BadPath { depth, .. }) => assert_eq!(depth, 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn malformed_xml_is_a_parse_error() {
    let err = inject_alt_text(b"<LinearLayout><ImageButton></LinearLayout>", &[0], "x").unwrap_err();
    assert!(matches!(err, LayoutError::Parse { .. }), "{err:?}");
}

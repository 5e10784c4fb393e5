use catalyst_core::data::{parse_libsvm, Dataset, ParseErrorKind, SparseRow};
use proptest::prelude::*;

fn parse(s: &str) -> Dataset {
    parse_libsvm(s.as_bytes(), None).unwrap()
}

#[test]
fn format_examples() {
    let d = parse("+1 1:0.5 3:-2");
    assert_eq!((d.len(), d.n_features), (1, 3));
    assert_eq!(d.rows[0], SparseRow { indices: vec![0, 2], values: vec![0.5, -2.0] });

    let d = parse("+1 1:1\n\n-1 2:3\n");
    assert_eq!(d.len(), 2);

    let err = parse_libsvm("1 2:abc".as_bytes(), None).unwrap_err();
    assert_eq!((err.line, err.token.as_str(), err.kind), (1, "2:abc", ParseErrorKind::BadToken));

    let err = parse_libsvm("1 1:1\n\n7 1:1\n".as_bytes(), None).unwrap_err();
    assert_eq!((err.line, err.kind), (3, ParseErrorKind::LabelSet));

    let err = parse_libsvm("1 3:1 2:1".as_bytes(), None).unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::NonIncreasingIndex);
    assert_eq!(parse_libsvm("".as_bytes(), None).unwrap_err().kind, ParseErrorKind::Empty);
    assert_eq!(parse("0 1:1\n1 1:2").labels, vec![-1.0, 1.0]);
    assert_eq!(parse("2 1:1\n1 1:2").labels, vec![1.0, -1.0]);
}

fn dataset() -> impl Strategy<Value = Dataset> {
    (1usize..12, 1usize..15).prop_flat_map(|(p, n)| {
        let row = (
            prop::collection::btree_set(0..p, 0..=p),
            prop::collection::vec(-1e6f64..1e6, p),
            any::<bool>(),
        );
        prop::collection::vec(row, n).prop_map(move |rows| {
            let mut data = Dataset { n_features: p, rows: Vec::new(), labels: Vec::new() };
            for (idx, vals, label) in rows {
                let indices: Vec<usize> = idx.into_iter().collect();
                let values = indices.iter().map(|&j| vals[j]).collect();
                data.rows.push(SparseRow { indices, values });
                data.labels.push(if label { 1.0 } else { -1.0 });
            }
            data
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn round_trip(data in dataset()) {
        let text = data.to_libsvm();
        let parsed = parse_libsvm(text.as_bytes(), Some(data.n_features)).unwrap();
        prop_assert_eq!(&parsed, &data);
        let again = parse_libsvm(parsed.to_libsvm().as_bytes(), Some(data.n_features)).unwrap();
        prop_assert_eq!(again, parsed);
    }
}

use qgtorsion::fixtures::{all_fixtures, check_fixture, load_fixture, Provenance, Quantity};
use qgtorsion::Error;

#[test]
fn solver_suite_reproduces_every_fixture() {
    let mut notes = Vec::new();
    for f in all_fixtures().unwrap() {
        for c in check_fixture(&f).unwrap() {
            assert!(c.pass, "{c:?}");
            if let Some(d) = c.discrepancy {
                notes.push(format!("{}: {d}", f.name));
            }
        }
    }
    for n in &notes {
        println!("discrepancy {n}");
    }
    assert_eq!(notes.len(), 3);
}

#[test]
fn discrepant_values_are_derived() {
    for f in all_fixtures().unwrap() {
        for e in &f.expectations {
            if e.printed.is_some() {
                assert!(
                    matches!(e.provenance, Provenance::Derived { .. }),
                    "{}",
                    f.name
                );
                assert!(e.note.is_some() || f.expectations.iter().any(|x| x.note.is_some()));
            }
        }
    }
}

#[test]
fn named_examples() {
    let f = load_fixture("unfold-limit").unwrap();
    assert!(
        matches!(f.expectations[0].quantity, Quantity::Rigidity { value, .. } if value == 5.0 / 6.0)
    );
    let f = load_fixture("signed-path-zero-sum").unwrap();
    let strengths: Vec<f64> = f.graph.strengths().collect();
    assert_eq!(strengths, [1.0, -2.0, 1.0]);
    assert!(matches!(
        load_fixture("missing"),
        Err(Error::UnknownFixture(_))
    ));
}

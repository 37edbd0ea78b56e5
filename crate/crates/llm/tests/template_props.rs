use groundfact_llm::{binding_digest, Bindings, TemplateName};
use proptest::prelude::*;

fn value() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9 .,'-]{0,40}"
}

proptest! {
    #[test]
    fn rendering_fills_every_placeholder(values in proptest::collection::vec(value(), 2), pick in 0usize..12) {
        let t = TemplateName::ALL[pick].template();
        let bindings: Bindings = t
            .placeholders()
            .into_iter()
            .zip(values.iter().cycle())
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect();
        let out = t.render(&bindings).unwrap();
        for name in t.placeholders() {
            let needle = format!("{{{{{name}}}}}");
            prop_assert!(!out.contains(&needle));
        }
        for v in bindings.values() {
            prop_assert!(out.contains(v.as_str()));
        }
    }

    #[test]
    fn digest_ignores_insertion_order(a in value(), b in value()) {
        let mut one = Bindings::new();
        one.insert("claim".into(), a.clone());
        one.insert("source".into(), b.clone());
        let mut two = Bindings::new();
        two.insert("source".into(), b);
        two.insert("claim".into(), a);
        prop_assert_eq!(binding_digest(&one), binding_digest(&two));
        prop_assert_eq!(binding_digest(&one).len(), 16);
    }

    #[test]
    fn digest_separates_keys_from_values(a in "[a-z]{1,5}", b in "[a-z]{1,5}") {
        let mut one = Bindings::new();
        one.insert("x".into(), format!("{a}{b}"));
        let mut two = Bindings::new();
        two.insert(format!("x{a}"), b);
        prop_assert_ne!(binding_digest(&one), binding_digest(&two));
    }
}

#[test]
fn dropping_any_binding_is_reported() {
    for name in TemplateName::ALL {
        let t = name.template();
        for missing in t.placeholders() {
            let bindings: Bindings = t
                .placeholders()
                .into_iter()
                .filter(|p| *p != missing)
                .map(|p| (p.to_string(), "v".to_string()))
                .collect();
            assert_eq!(t.render(&bindings).unwrap_err(), missing);
        }
    }
}

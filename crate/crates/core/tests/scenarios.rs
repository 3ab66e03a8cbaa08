use ctxkit_core::scenario::*;
use ctxkit_core::Error;

fn s(v: &[&str], e: &[&[&str]]) -> Scenario {
    Scenario::new(v.to_vec(), e.iter().map(|x| x.to_vec()).collect()).unwrap()
}

#[test]
fn constructor_examples() {
    let t = triangle_scenario();
    assert_eq!((t.num_vertices(), t.num_edges()), (6, 3));
    s(&["a", "b"], &[&["a", "b"]]);
    let err = Scenario::new(vec!["a", "b", "c"], vec![vec!["a", "b"]]).unwrap_err();
    assert!(matches!(err, Error::UncoveredVertex(v) if v == "c"));
}

#[test]
fn triangle_non_orthogonality() {
    let t = triangle_scenario();
    let g = t.non_orthogonality_graph();
    let ix = |n: &str| t.vertex_index(n).unwrap();
    assert!(g.adjacent(ix("v2"), ix("v4")));
    assert!(!g.adjacent(ix("v1"), ix("v3")));
    // v1 shares an edge with v2, v3, v5, v6; only v4 is not co-measurable
    let n1: Vec<usize> = (0..6).filter(|&j| g.adjacent(ix("v1"), j)).collect();
    assert_eq!(n1, vec![ix("v4")]);
    assert_eq!(g.edges().len(), 6);
}

#[test]
fn small_no_graphs() {
    let one = s(&["a", "b", "c"], &[&["a", "b", "c"]]);
    assert!(one.non_orthogonality_graph().edges().is_empty());
    assert_eq!(one.exclusivity_graph().edges().len(), 3);
    let two = s(&["a", "b", "c", "d"], &[&["a", "b"], &["c", "d"]]);
    let g = two.non_orthogonality_graph();
    assert_eq!(g.edges(), vec![(0, 2), (0, 3), (1, 2), (1, 3)]);
}

#[test]
fn kcbs_yes_outcomes_form_pentagon() {
    let k = kcbs_scenario();
    let ex = k.exclusivity_graph().induced(&[0, 1, 2, 3, 4]);
    let e = ex.edges();
    assert_eq!(e.len(), 5);
    for i in 0..5 {
        assert!(ex.adjacent(i, (i + 1) % 5));
        assert!(!ex.adjacent(i, (i + 2) % 5));
    }
}

#[test]
fn fr_product_of_bits() {
    let b = bell_scenario(1, 2, 2).unwrap();
    assert_eq!((b.num_vertices(), b.num_edges()), (4, 2));
    let p = foulis_randall_product(&b, &b);
    assert_eq!((p.num_vertices(), p.num_edges()), (16, 12));
    let b2 = bell_scenario(2, 2, 2).unwrap();
    assert_eq!((b2.num_vertices(), b2.num_edges()), (16, 12));
    assert!(isomorphic(&bell_scenario(1, 1, 3).unwrap(), &s(&["x", "y", "z"], &[&["x", "y", "z"]])));
    // the simultaneous product has only the 4 product edges
    assert_eq!(simultaneous_product(&b, &b).num_edges(), 4);
}

#[test]
fn product_with_trivial_scenario_is_isomorphic() {
    let unit = s(&["o"], &[&["o"]]);
    for x in [triangle_scenario(), bell_scenario(1, 2, 2).unwrap(), s(&["a", "b", "c"], &[&["a", "b"], &["b", "c"]])] {
        let p = foulis_randall_product(&x, &unit);
        assert_eq!(p.num_vertices(), x.num_vertices());
        assert!(isomorphic(&p, &x));
        let q = foulis_randall_product(&unit, &x);
        assert!(isomorphic(&q, &x));
    }
}

#[test]
fn json_roundtrip() {
    let t = triangle_scenario();
    let j = serde_json::to_string(&t).unwrap();
    assert!(j.starts_with("{\"vertices\":[\"v1\""));
    let back: Scenario = serde_json::from_str(&j).unwrap();
    assert_eq!(back, t);
    let bad = r#"{"vertices":["a","b"],"edges":[["a"]]}"#;
    assert!(serde_json::from_str::<Scenario>(bad).is_err());
}

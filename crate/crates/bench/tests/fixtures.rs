use morrey_bench::{exponents, models};

#[test]
fn fixtures_cover_all_curvature_classes() {
    let ms = models(2);
    assert_eq!(ms.len(), 3);
    assert!(ms[0].is_euclidean());
    assert!(ms[1].curvature_class().is_cartan_hadamard());
    assert!(ms[2].is_compact());
    assert!(ms.iter().all(|m| m.n() == exponents().n()));
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tropical_theta::discrete::{dhar_reduce, is_effective_oracle, is_reduced_exhaustive, to_unit_model, UnitModel};
use tropical_theta::orientation::{moderator, theta_characteristics, Orientation, Sign};
use tropical_theta::samples;
use tropical_theta::theta::{compute_kappa, effective_class_test};
use tropical_theta::{Divisor, Jacobian, MetricGraph, Point};

/// Random curves whose unit model has at most `max_nodes` nodes.
fn small_models(seed: u64, count: usize, max_nodes: usize) -> Vec<MetricGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let g = samples::random_curve(&mut rng, 3, 2);
        let (m, _) = to_unit_model(&g, &Divisor::new(), &[]).unwrap();
        if m.num_nodes() <= max_nodes {
            out.push(g);
        }
    }
    out
}

fn random_chips<R: Rng>(rng: &mut R, n: usize) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(-3..=3)).collect()
}

fn random_firings<R: Rng>(rng: &mut R, model: &UnitModel, chips: &mut [i64]) {
    for _ in 0..rng.gen_range(1..=4) {
        let set: Vec<bool> = (0..model.num_nodes()).map(|_| rng.gen_bool(0.5)).collect();
        model.fire_set(chips, &set, rng.gen_range(1..=2));
    }
}

#[test]
fn reduced_forms_satisfy_dhar_criterion() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for g in small_models(1, 30, 12) {
        let (model, _) = to_unit_model(&g, &Divisor::new(), &[]).unwrap();
        for _ in 0..5 {
            let chips = random_chips(&mut rng, model.num_nodes());
            let q = rng.gen_range(0..model.num_nodes());
            let r = dhar_reduce(&model, &chips, q);
            assert!(is_reduced_exhaustive(&model, &r, q), "{chips:?} -> {r:?}");
            assert_eq!(UnitModel::degree_of(&r), UnitModel::degree_of(&chips));
            assert_eq!(dhar_reduce(&model, &r, q), r, "idempotent");
        }
    }
}

#[test]
fn reduction_is_class_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for g in small_models(2, 20, 16) {
        let (model, _) = to_unit_model(&g, &Divisor::new(), &[]).unwrap();
        for _ in 0..5 {
            let chips = random_chips(&mut rng, model.num_nodes());
            let mut moved = chips.clone();
            random_firings(&mut rng, &model, &mut moved);
            let q = rng.gen_range(0..model.num_nodes());
            assert_eq!(dhar_reduce(&model, &chips, q), dhar_reduce(&model, &moved, q));
        }
    }
}

#[test]
fn unit_model_preserves_genus() {
    for g in small_models(3, 20, 40) {
        let (m, _) = to_unit_model(&g, &Divisor::new(), &[]).unwrap();
        let links: i64 = (0..m.num_nodes()).map(|v| m.degree(v)).sum::<i64>() / 2;
        let scale = tropical_theta::Rational::from_integer(m.scale().clone());
        let loops = g
            .edges()
            .iter()
            .filter(|e| e.is_loop() && &e.length * &scale == tropical_theta::scalar::rat(1))
            .count();
        // unit loops vanish from the multigraph and each one carried a cycle
        assert_eq!(links + 1 + loops as i64 - m.num_nodes() as i64, g.genus() as i64);
    }
}

#[test]
fn basepoint_moderator_is_reduced() {
    let mut curves: Vec<MetricGraph> = samples::reference_curves().into_iter().map(|(_, g)| g).collect();
    curves.extend(small_models(4, 10, 60));
    for g in curves {
        let q = g.basepoint().clone();
        let k = moderator(&g, std::slice::from_ref(&q), Sign::Minus).unwrap();
        let (model, chips) = to_unit_model(&g, &k, std::slice::from_ref(&q)).unwrap();
        let node = model.node_of(&q).unwrap();
        assert_eq!(dhar_reduce(&model, &chips, node), chips);
        assert_eq!(chips[node], -1);
    }
}

/// Both the `K⁻` and the `K⁺` representative of every characteristic give
/// the same verdict as the theta test.
#[test]
fn oracle_agrees_on_both_representatives() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut curves: Vec<MetricGraph> = samples::reference_curves().into_iter().map(|(_, g)| g).collect();
    curves.extend((0..8).map(|_| samples::random_curve(&mut rng, 3, 4)));
    for g in curves {
        let jac = Jacobian::new(&g);
        let kappa = compute_kappa(&jac).unwrap();
        let (rows, _) = theta_characteristics(&jac, &kappa).unwrap();
        let q = samples::random_point(&mut rng, &g, 4);
        for r in rows {
            assert_eq!(is_effective_oracle(&g, &r.divisor, &q).unwrap(), r.effective);
            let plus = if r.bits.iter().all(|&b| b == 0) {
                moderator(&g, std::slice::from_ref(g.basepoint()), Sign::Plus).unwrap()
            } else {
                let gamma = tropical_theta::orientation::gamma_support(&r.bits, jac.form().basis(), &g);
                Orientation::for_gamma(&g, &gamma).unwrap().divisor(Sign::Plus)
            };
            let class = jac.abel_jacobi(&plus);
            let theta_says = effective_class_test(&jac, &class, &kappa).unwrap();
            assert_eq!(is_effective_oracle(&g, &plus, &q).unwrap(), theta_says);
        }
    }
}

#[test]
fn negative_degree_short_circuits() {
    let g = samples::theta_unit();
    let d = Divisor::point(Point::Vertex(0)).scaled(-1);
    assert!(!is_effective_oracle(&g, &d, &Point::Vertex(1)).unwrap());
}

use shplace_core::channel::{
    associate_users, channel_gain, outage_closed_form, outage_monte_carlo, AssociationMode,
};
use shplace_core::rng::seeded;
use shplace_core::scene::nearest_index;
use shplace_core::{ChannelParams, Point2D, Scene, SceneParams};

#[test]
fn mean_gain_follows_path_loss() {
    let params = ChannelParams::default();
    let origin = Point2D::new(0.0, 0.0);
    let mut rng = seeded(1);
    let mut mean_power = |d: f64| {
        let to = Point2D::new(d, 0.0);
        (0..100_000).map(|_| channel_gain(&origin, &to, &params, &mut rng).unwrap().norm_sqr()).sum::<f64>()
            / 100_000.0
    };
    let near = mean_power(0.1);
    let far = mean_power(0.2);
    assert!((near / far - 8.0).abs() / 8.0 < 0.05, "ratio {}", near / far);
    // β₀ at 1 m, distances in km.
    assert!((near / (1e-6 / 100.0f64.powi(3)) - 1.0).abs() < 0.02);
}

#[test]
fn expectation_association_is_nearest_errh() {
    let params = ChannelParams::default();
    for seed in 0..5 {
        let scene = Scene::sample(&SceneParams::default(), &mut seeded(seed)).unwrap();
        let result = associate_users(&scene, &params, AssociationMode::Expectation, &mut seeded(99)).unwrap();
        for (u, &r) in scene.users.iter().zip(&result.assignment) {
            assert_eq!(r, nearest_index(&scene.errhs, u));
        }
        assert_eq!(result.loads.iter().sum::<usize>(), scene.n_users());
    }
}

#[test]
fn instantaneous_loads_sum_to_users() {
    let scene = Scene::sample(&SceneParams::default(), &mut seeded(3)).unwrap();
    let r = associate_users(&scene, &ChannelParams::default(), AssociationMode::Instantaneous, &mut seeded(4))
        .unwrap();
    assert_eq!(r.loads.iter().sum::<usize>(), scene.n_users());
    // Fading moves some users off their nearest eRRH.
    let moved = scene.users.iter().zip(&r.assignment).filter(|(u, &a)| a != nearest_index(&scene.errhs, u)).count();
    assert!(moved > 0);
}

#[test]
fn outage_worked_example() {
    // SH 1 km from the user, interferers at 2 km and 3 km.
    let params = ChannelParams::default();
    let user = Point2D::new(0.0, 0.0);
    let sh = Point2D::new(1.0, 0.0);
    let errhs = [Point2D::new(0.0, 2.0), Point2D::new(-3.0, 0.0)];
    let g = params.gamma_bar;
    let expected = 1.0 - 1.0 / ((1.0 + g / 8.0) * (1.0 + g / 27.0));
    let closed = outage_closed_form(&sh, &user, &errhs, &params).unwrap();
    assert!((closed - expected).abs() < 1e-12);
    let mc = outage_monte_carlo(&sh, &user, &errhs, &params, 1_000_000, &mut seeded(8)).unwrap();
    assert!((mc - closed).abs() < 0.002, "{mc} vs {closed}");
}

#[test]
fn outage_limits() {
    let params = ChannelParams::default();
    let user = Point2D::new(2.0, 2.0);
    let errhs = [Point2D::new(3.0, 2.0), Point2D::new(2.0, 4.0)];
    let near = outage_closed_form(&Point2D::new(2.0, 2.0001), &user, &errhs, &params).unwrap();
    let far = outage_closed_form(&Point2D::new(2000.0, 2.0), &user, &errhs, &params).unwrap();
    assert!(near < 1e-9);
    assert!(far > 1.0 - 1e-6);
    assert!(outage_closed_form(&user, &user, &errhs, &params).is_err());
}

use orthwalk::counting::{verify_prediction, VerifyOptions};
use orthwalk::models;

fn check(model: orthwalk::WalkModel, n_max: usize, alpha: f64) {
    let v = verify_prediction(&model, &VerifyOptions { n_max, ..VerifyOptions::default() }).unwrap();
    assert_eq!(v.predicted_alpha, Some(alpha));
    assert_eq!(v.pass, Some(true), "{v:#?}");
}

#[test]
fn planar_simple_walk() {
    check(models::simple_walk(2), 400, 3.0);
}

#[test]
fn planar_tandem() {
    check(models::tandem(2), 400, 4.0);
}

#[test]
fn spatial_simple_walk() {
    check(models::simple_walk(3), 300, 4.5);
}

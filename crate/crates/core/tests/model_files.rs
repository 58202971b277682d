use std::path::PathBuf;

use orthwalk::{models, parse_model, WalkModel};

fn load(name: &str) -> WalkModel {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models").join(format!("{name}.toml"));
    parse_model(&std::fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn shipped_models_match_the_library() {
    let cases = [
        ("simple_walk_1d", models::simple_walk(1)),
        ("simple_walk_2d", models::simple_walk(2)),
        ("simple_walk_3d", models::simple_walk(3)),
        ("tandem_2d", models::tandem(2)),
        ("tandem_3d", models::tandem(3)),
        ("two_fifths_rotation", models::two_fifths_rotation()),
        ("minus_third_covariance", models::minus_third_covariance()),
        ("identity_covariance", models::identity_covariance()),
        ("skew_4d", models::skew_4d()),
        ("a4_chamber_4d", models::a4_chamber_4d()),
    ];
    for (name, model) in cases {
        assert_eq!(load(name), model, "{name}");
    }
}

#[test]
fn serialization_round_trips() {
    for m in models::small_step_models() {
        assert_eq!(parse_model(&m.to_toml_string()).unwrap(), m);
    }
}

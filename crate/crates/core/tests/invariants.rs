use sbt_lab::analysis::check_r_bounds;
use sbt_lab::geometry::spec::{CenterlineSpec, FrameSpec, RadiusSpec, StretchSpec};
use sbt_lab::geometry::GeometrySpec;

fn presets() -> Vec<(&'static str, CenterlineSpec)> {
    vec![
        ("straight", CenterlineSpec::Straight { direction: [0.0, 0.0, 1.0] }),
        ("circular-arc", CenterlineSpec::CircularArc { radius: 2.0 }),
        ("helix", CenterlineSpec::Helix { radius: 0.5, pitch: 1.5 }),
        ("spline", CenterlineSpec::Spline { nodes: vec![[-1.4, 0.0, 0.0], [-0.5, 0.3, 0.0], [0.5, -0.3, 0.1], [1.4, 0.0, 0.0]] }),
    ]
}

#[test]
fn r_bounds_hold_at_1e5_samples_on_every_preset() {
    for (name, centerline) in presets() {
        for radius in ["prolate", "hemispherical-cap"] {
            let spec = GeometrySpec {
                centerline: centerline.clone(),
                radius: RadiusSpec { kind: radius.into(), epsilon: 0.02 },
                stretch: StretchSpec::Uniform,
                frame: FrameSpec::default(),
            };
            let body = spec.build().unwrap_or_else(|e| panic!("{name}/{radius}: {e}"));
            let r = check_r_bounds(&body, 100_000, 42);
            assert!(r.upper_pass, "{name}/{radius}: upper bound exceeded by {:e}", r.max_upper_excess);
            assert!(r.lower_constant >= 0.5 * r.c_gamma.min(1.0), "{name}/{radius}: lower constant {} vs c_gamma {}", r.lower_constant, r.c_gamma);
        }
    }
}

use proptest::prelude::*;
use rfharvest::config::{ScenarioConfig, Sweep, SCHEMA_VERSION};
use rfharvest::harvester::{Dataset, Spacing};
use rfharvest::Error;

#[test]
fn empty_object_is_default() {
    assert_eq!(ScenarioConfig::from_json("{}").unwrap(), ScenarioConfig::default());
}

#[test]
fn default_round_trips() {
    let cfg = ScenarioConfig::default();
    assert_eq!(ScenarioConfig::from_json(&cfg.to_json()).unwrap(), cfg);
}

#[test]
fn partial_sections_keep_defaults() {
    let cfg = ScenarioConfig::from_json(r#"{"link": {"distance_m": 7.5}, "charging": {"capacitance_uf": 20}}"#).unwrap();
    assert_eq!(cfg.link.distance_m, 7.5);
    assert_eq!(cfg.link.transmit_power_mw, ScenarioConfig::default().link.transmit_power_mw);
    assert!((cfg.charging.spec.threshold_mw() - 0.648).abs() < 1e-12);
}

#[test]
fn rejects_bad_input() {
    for text in [
        r#"{"link": {"distance": 3}}"#,
        r#"{"schema_version": 99}"#,
        r#"{"link": {"distance_m": 0.1}}"#,
        r#"{"channel": {"nakagami_m": 0.2}}"#,
        r#"{"numerics": {"mc_trials": 0}}"#,
        r#"{"link": {"distance_sweep_m": {"start": 5, "stop": 1, "count": 0, "scale": "linear"}}}"#,
        r#"{"harvester": {"dataset": "rectenna-z"}}"#,
        "not json",
    ] {
        match ScenarioConfig::from_json(text) {
            Err(Error::Config(_)) => {}
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn sweeps_expand() {
    assert_eq!(Sweep::linear(1.0, 3.0, 3).values(), vec![1.0, 2.0, 3.0]);
    let v = Sweep::log(1e-4, 1e-1, 4).values();
    for (a, b) in v.iter().zip([1e-4, 1e-3, 1e-2, 1e-1]) {
        assert!((a / b - 1.0).abs() < 1e-12);
    }
    assert_eq!(Sweep::single(2.0).values(), vec![2.0]);
    let mut cfg = ScenarioConfig::default();
    cfg.link.distance_sweep_m = Some(Sweep::linear(2.0, 4.0, 5));
    assert_eq!(cfg.distances().len(), 5);
    cfg.link.distance_sweep_m = None;
    assert_eq!(cfg.distances(), vec![cfg.link.distance_m]);
    assert_eq!(SCHEMA_VERSION, cfg.schema_version);
}

fn arb_config() -> impl Strategy<Value = ScenarioConfig> {
    (
        1.0f64..5000.0,
        1.0f64..50.0,
        1.5f64..4.0,
        0.5f64..20.0,
        prop_oneof![Just(Dataset::RectennaA), Just(Dataset::ModuleB)],
        prop_oneof![Just(Spacing::UniformDb), Just(Spacing::UniformLinear)],
        1usize..2000,
        (0.1f64..100.0, 0.5f64..5.0, 1.0f64..200.0),
        (1e-6f64..1.0, any::<u64>(), 1u64..1_000_000),
        proptest::option::of((1.0f64..5.0, 5.0f64..50.0, 1usize..20)),
    )
        .prop_map(|(p_t, d, nu, m, ds, spacing, segs, (c, v, tp), (pc, seed, trials), sweep)| {
            let mut cfg = ScenarioConfig::default();
            cfg.link.transmit_power_mw = p_t;
            cfg.link.distance_m = d;
            cfg.link.path_loss_exponent = nu;
            cfg.link.distance_sweep_m = sweep.map(|(a, b, n)| Sweep::linear(a, b, n));
            cfg.channel.nakagami_m = m;
            cfg.harvester.dataset = ds;
            cfg.harvester.spacing = spacing;
            cfg.harvester.segments = segs;
            cfg.charging.spec.capacitance_uf = c;
            cfg.charging.spec.voltage_v = v;
            cfg.charging.spec.packet_duration_ms = tp;
            cfg.rfid.scenario.consumption_mw = pc;
            cfg.numerics.seed = seed;
            cfg.numerics.mc_trials = trials;
            cfg
        })
}

proptest! {
    #[test]
    fn json_round_trip(cfg in arb_config()) {
        let back = ScenarioConfig::from_json(&cfg.to_json()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

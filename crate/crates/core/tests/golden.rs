use netiv::graph_model::{GraphonSpec, SparsityRate};
use netiv::outcome::{true_effects_oracle, OracleConfig, OutcomeModel};

#[test]
fn sbm_oracle_is_frozen() {
    let cfg = OracleConfig::new(200, 200, 20240601);
    let e = true_effects_oracle(&GraphonSpec::Sbm3, SparsityRate::power(-0.5).unwrap(), &OutcomeModel::exogenous(), &cfg)
        .unwrap();
    assert_eq!(e.de, 1.0);
    assert_eq!(e.se, 0.5);
    assert!((e.toe - (e.de + e.ie)).abs() < 1e-15);
    assert!((e.ie - GOLDEN_IE).abs() < 1e-12, "ie {}", e.ie);
}

const GOLDEN_IE: f64 = 0.06348639419608172;

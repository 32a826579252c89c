// A single simulation stepped event by event, then a small paired campaign
// written out as CSV.

use eon_dpp::campaign::{run_campaign, summarize, write_outputs, CampaignSpec};
use eon_dpp::sim::{gabriel_source, resolve_network, Algorithm, GammaMode, SimConfig, Simulation, StepOutcome};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut config = SimConfig::new(gabriel_source(12, 5), 32);
    config.gamma = GammaMode::Units(3);
    config.horizon_days = 40.0;
    config.warmup_days = 10.0;
    config.record_timing = false;
    let (net, _) = resolve_network(&config.network, config.omega)?;
    let mut sim = Simulation::new(config, net)?;
    println!("lambda {:.3} per day, mean hops {:.3}", sim.lambda(), sim.alpha());

    let mut blocked = 0;
    while let Some(step) = sim.step()? {
        if let StepOutcome::Arrival { accepted: false, .. } = step {
            blocked += 1;
        }
        sim.check_conservation()?;
    }
    let stats = sim.run_to_end()?;
    println!("{blocked} demands blocked in all, bbp after warm-up {:.4}, utilization {:.4}", stats.bbp, stats.mean_utilization);

    let spec = CampaignSpec {
        vertices: vec![12],
        omegas: vec![32],
        gammas: vec![GammaMode::Units(3)],
        loads: vec![0.5, 1.0],
        algorithms: vec![Algorithm::Exact, Algorithm::EdgeExclusion],
        samples: 3,
        horizon_days: 40.0,
        warmup_days: 10.0,
        record_timing: false,
        ..CampaignSpec::default()
    };
    let outcome = run_campaign(&spec)?;
    for s in summarize(&outcome.records) {
        println!("load {} {:<14} bbp {:.4} (rse {:.3})", s.load, s.algorithm.name(), s.bbp_mean, s.bbp_rse);
    }
    let dir = std::env::temp_dir().join("eon-dpp-traffic-example");
    write_outputs(&dir, &outcome)?;
    println!("csv files in {}", dir.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

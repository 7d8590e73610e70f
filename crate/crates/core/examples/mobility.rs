// Random-waypoint mobility: one UE at 60 km/h for 20 s, sampled every second.
//
//     cargo run --example mobility

use chosim::config::Config;
use chosim::rng::{self, purpose};
use chosim::scenario::{bounding_region, build_layout, step_random_waypoint, UeKinematics};

fn run_example() -> chosim::Result<()> {
    let mut cfg = Config::default();
    cfg.scenario.ue_speed_kmh = 60.0;
    let cells = build_layout(&cfg.scenario, cfg.radio.n_beams)?;
    let region = bounding_region(&cells, cfg.scenario.margin())?;
    let mut r = rng::stream(cfg.scenario.seed, 0, purpose::MOBILITY);
    let mut ue = UeKinematics::spawn(&region, cfg.scenario.speed_mps(), &mut r);
    let dt = cfg.scenario.time_step_ms as f64 / 1000.0;
    let mut travelled = 0.0;
    println!("  t_s      x       y   waypoint");
    for step in 0..=2000 {
        if step % 100 == 0 {
            println!(
                "{:>5.1} {:>7.1} {:>7.1}  ({:.0}, {:.0})",
                step as f64 * dt,
                ue.position.x,
                ue.position.y,
                ue.waypoint.x,
                ue.waypoint.y
            );
        }
        let next = step_random_waypoint(ue, &region, dt, &mut r);
        travelled += ue.position.distance(next.position);
        ue = next;
    }
    println!("travelled {travelled:.1} m (speed x time = {:.1} m)", cfg.scenario.speed_mps() * 20.01);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

// Channel building blocks: UMi pathloss and LOS probability over distance,
// the beam pattern of one cell, and a correlated shadowing trace along a
// straight walk.
//
//     cargo run --example channel

use chosim::config::Config;
use chosim::radio::{beam_gain, los_probability, pathloss_umi, rsrp, sinr, update_shadowing, BeamPattern, LinkState};
use chosim::rng::{self, purpose};
use chosim::scenario::Point;

fn run_example() -> chosim::Result<()> {
    let cfg = Config::default();
    let fc = cfg.scenario.carrier_ghz;

    println!("d_m   PL_LOS  PL_NLOS  P(LOS)");
    for d in [10.0, 36.0, 50.0, 100.0, 200.0, 400.0] {
        println!(
            "{:>4} {:>7.2} {:>8.2} {:>7.3}",
            d,
            pathloss_umi(d, fc, true)?,
            pathloss_umi(d, fc, false)?,
            los_probability(d)
        );
    }

    let pattern = BeamPattern::from_config(&cfg.radio, cfg.scenario.sectors_per_site);
    println!("\nbeam pointing (deg): {:?}", pattern.pointing);
    println!("offset  gain_beam0");
    for off in [0.0, 6.5, 13.0, 26.0, 60.0, 180.0] {
        println!("{:>6} {:>10.2}", off, beam_gain(&pattern, 0, off)?);
    }

    // walk 100 m in 1 m steps away from a site, NLOS shadowing
    let mut r = rng::stream(7, 0, purpose::LINK_BASE);
    let site = Point::new(0.0, 0.0);
    let mut link = LinkState { los: false, shadowing_db: 0.0, last_update_position: Point::new(20.0, 0.0), los_anchor: Point::new(20.0, 0.0) };
    let mut trace = Vec::new();
    for i in 1..=100 {
        let pos = Point::new(20.0 + i as f64, 0.0);
        link = update_shadowing(link, pos, cfg.radio.shadow_sigma_nlos_db, cfg.radio.shadow_decorr_nlos_m, &mut r);
        trace.push(link.shadowing_db);
    }
    let every10: Vec<String> = trace.iter().step_by(10).map(|s| format!("{s:.1}")).collect();
    println!("\nNLOS shadowing every 10 m: {}", every10.join(" "));

    let pl = pathloss_umi(site.distance(Point::new(100.0, 0.0)), fc, true)?;
    let s = rsrp(cfg.scenario.tx_power_dbm, pl, 0.0, pattern.max_gain);
    let noise = cfg.radio.noise_dbm();
    println!("\nLOS at 100 m on boresight: RSRP {s:.2} dBm, SNR {:.2} dB, SINR with a -73 dBm interferer {:.2} dB", s - noise, sinr(s, &[-73.0], noise));
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

// Builds the 7-site, 21-cell layout and prints every cell with its
// boresight and reference point, plus the region UEs move in.
//
//     cargo run --example layout

use chosim::config::Config;
use chosim::scenario::{bounding_region, build_layout};

fn run_example() -> chosim::Result<()> {
    let cfg = Config::default();
    let cells = build_layout(&cfg.scenario, cfg.radio.n_beams)?;
    println!("cell site  site_x   site_y  boresight  ref_x    ref_y");
    for c in &cells {
        println!(
            "{:>4} {:>4} {:>7.1} {:>8.1} {:>9.0} {:>7.1} {:>8.1}",
            c.cell_id, c.site_id, c.site_position.x, c.site_position.y, c.boresight_azimuth, c.reference_point.x, c.reference_point.y
        );
    }
    let region = bounding_region(&cells, cfg.scenario.margin())?;
    println!(
        "UE region: x [{:.1}, {:.1}] y [{:.1}, {:.1}] ({:.0} x {:.0} m)",
        region.min.x,
        region.max.x,
        region.min.y,
        region.max.y,
        region.width(),
        region.height()
    );
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

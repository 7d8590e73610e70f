// Beam consolidation and L3 filtering of a cell RSRP that drops by 20 dB.
//
//     cargo run --example measurement_filter

use chosim::measure::{consolidate_beams, l3_filter, FilterState};

fn run_example() -> chosim::Result<()> {
    let beams = [-77.0, -80.0, -95.0, -112.0];
    println!("beams {beams:?}");
    for n in [1, 2, 3] {
        println!("  consolidated over best {n}: {:.2} dBm", consolidate_beams(&beams, -110.0, n)?);
    }

    println!("\ntick  sample   k=0     k=4     k=8");
    let mut filters = [FilterState::new(0.0), FilterState::new(4.0), FilterState::new(8.0)];
    for tick in 0..12 {
        let sample = if tick < 4 { -70.0 } else { -90.0 };
        for f in filters.iter_mut() {
            *f = l3_filter(*f, sample);
        }
        println!("{:>4} {:>7.1} {:>7.2} {:>7.2} {:>7.2}", tick, sample, filters[0].value, filters[1].value, filters[2].value);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

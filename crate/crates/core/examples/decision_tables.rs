//! Print the final and interim action tables for a rate partition.
//!
//! cargo run --example decision_tables -- [lrv] [tv]

use basket_subgroup::decision::{build_partition, map_final, map_interim};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<f64>());
    let lrv = args.next().transpose()?.unwrap_or(0.1);
    let tv = args.next().transpose()?.unwrap_or(0.3);
    let p = build_partition(lrv, tv, None)?;
    println!(
        "LRV {lrv}, TV {tv}: grain {}, K = {}, k1 = {}, k2 = {}",
        p.epsilon,
        p.n_intervals(),
        p.k1,
        p.k2
    );

    // One representative index per zone is enough to show the structure.
    let reps = [("low", p.k1), ("mid", p.k2), ("high", p.n_intervals())];
    for (title, interim) in [("final", false), ("interim", true)] {
        println!("\n{title} actions; rows a+, columns a- / a");
        print!("{:>6}", "");
        for (am, _) in reps {
            for (a, _) in reps {
                print!(" {:>9}", format!("{am}/{a}"));
            }
        }
        println!();
        for (ap_name, ap) in reps {
            print!("{ap_name:>6}");
            for (_, am) in reps {
                for (_, a) in reps {
                    let cell = if interim {
                        map_interim(a, ap, am, &p).map(|x| x.to_string())
                    } else {
                        map_final(a, ap, am, &p).map(|x| x.to_string())
                    };
                    print!(" {:>9}", cell.unwrap_or_else(|_| "-".into()));
                }
            }
            println!();
        }
    }
    Ok(())
}

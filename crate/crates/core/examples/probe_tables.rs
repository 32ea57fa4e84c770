use anharmonic::*;
use rug::Rational;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("susy0");
    let ctx = PrecisionContext::new(80).unwrap();

    match which {
        "susy0" | "susy1" => {
            let s = if which == "susy0" { ParitySector::Even } else { ParitySector::Odd };
            let pot = PolynomialPotential::susy_minus();
            for d in [0usize, 1] {
                let t0 = Instant::now();
                let search = RootSearch::default();
                let seqs = hankel::track_sequences(&pot, s, 30, d, &search, &ctx).unwrap();
                let dt = t0.elapsed();
                println!("== susy s={} d={} ({} seqs) in {:.1?}", s.s(), d, seqs.len(), dt);
                for q in hankel::dedupe_converged(&seqs, &ctx) {
                    println!("  {}  err={:e}  dims {}..{} len {}",
                        fmt::to_decimal_sig(&q.converged, 21), q.error_estimate, q.first_dim(), q.last_dim(), q.len());
                }
            }
        }
        "quartic" => {
            for s in [ParitySector::Even, ParitySector::Odd] {
                let pot = PolynomialPotential::quartic();
                for d in [0usize, 1] {
                    let t0 = Instant::now();
                    let search = RootSearch::new(Rational::from(-1), Rational::from(25), Rational::from((1,20))).unwrap();
                    let seqs = hankel::track_sequences(&pot, s, 30, d, &search, &ctx).unwrap();
                    let dt = t0.elapsed();
                    println!("== quartic s={} d={} ({} seqs) in {:.1?}", s.s(), d, seqs.len(), dt);
                    for q in hankel::dedupe_converged(&seqs, &ctx) {
                        println!("  {}  err={:e}  dims {}..{} len {}",
                            fmt::to_decimal_sig(&q.converged, 21), q.error_estimate, q.first_dim(), q.last_dim(), q.len());
                    }
                }
            }
        }
        _ => eprintln!("unknown probe"),
    }
}

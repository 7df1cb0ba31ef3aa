//! Maximal-length codes, their autocorrelation, and a noiseless
//! spread/despread round trip.

use overlay_ber::signal::{decide, despread};
use overlay_ber::{generate_m_sequence, spread, CodeMode, DataBits, DsssParams};

fn main() {
    // x^5 + x^3 + 1: taps on stages 5 and 3.
    let code = generate_m_sequence(5, &[5, 3], 0b00001).expect("primitive taps");
    let chips: String = code.chips().iter().map(|&c| if c > 0 { '+' } else { '-' }).collect();
    println!("period {} : {chips}", code.period());
    println!("chip sum {}", code.chip_sum());
    let acf: Vec<i64> = (0..8).map(|lag| code.periodic_autocorrelation(lag)).collect();
    println!("autocorrelation lags 0..8: {acf:?}");

    match generate_m_sequence(5, &[5, 4, 3, 2], 1) {
        Ok(_) => println!("x^5+x^4+x^3+x^2+1 is maximal"),
        Err(e) => println!("x^5+x^4+x^3+x^2+1 rejected: {e}"),
    }

    // Short code: every bit reuses the same 31 chips.
    let params = DsssParams::new(10e6, 31, 1.0, 97.75e6).unwrap();
    let bits = DataBits::new(vec![1, -1, -1, 1, 1, -1]).unwrap();
    let tx = spread(&bits, &code, &params, CodeMode::Short).unwrap();
    let rx: Vec<f64> = tx.iter().map(|&c| f64::from(c)).collect();
    let z = despread(&rx, &code, &params, CodeMode::Short).unwrap();
    println!("correlator outputs {z:?}");
    assert_eq!(decide(&z), bits);
    println!("recovered {:?}", decide(&z).as_slice());
}

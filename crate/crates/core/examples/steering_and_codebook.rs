//! Steering vectors and the cosine-uniform analog codebook.
//!
//! Run: cargo run --release --example steering_and_codebook

use coordbeam::{build_codebook, steering_vector, ArraySide};

fn main() {
    let n = 16;
    let cb = build_codebook(8, n, ArraySide::Bs);
    println!("{} beams, {} antennas", cb.len(), cb.antennas);
    for (q, (angle, c)) in cb.grid_angles.iter().zip(cb.grid_cosines()).enumerate() {
        println!("beam {q}: {:6.2} deg  cos = {c:+.4}", angle.to_degrees());
    }

    // inner products between beams vanish when the cosine spacing hits a null
    let gains: Vec<String> = (0..cb.len())
        .map(|q| format!("{:.3}", cb.beams[0].inner(&cb.beams[q]).norm_sqr()))
        .collect();
    println!("|<b0, bq>|^2: {}", gains.join(" "));

    let a = steering_vector(1.2, n);
    let power: f64 = a.as_slice().iter().map(|z| z.norm_sqr()).sum();
    println!("steering vector at 1.2 rad has norm^2 {power:.12}");
    println!("nearest beam to 1.2 rad: {}", cb.nearest(1.2));
}

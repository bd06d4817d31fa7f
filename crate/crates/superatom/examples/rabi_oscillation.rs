//! Collective Rabi oscillation between the ground state and the singly
//! excited Rydberg level, and the pi-pulse time used for deterministic
//! superatom preparation.
//!
//! Run with: cargo run --example rabi_oscillation

use superatom::model::{pi_pulse_duration, rabi_population, RabiParams};
use superatom::reference;

fn main() {
    let omega = reference::RABI_OMEGA_RAD_PER_S;
    // The oscillation contrast is the peak in-fiber retrieval efficiency.
    let params = RabiParams::new(omega, 0.0, reference::IN_FIBER_PEAK).unwrap();

    let t_pi = pi_pulse_duration(omega).unwrap();
    println!("collective Rabi frequency: 2*pi*2.9 MHz");
    println!("pi-pulse time: {:.2} ns", t_pi * 1e9);

    println!("\n t (ns)   in-fiber retrieval");
    for i in 0..=24 {
        let t = i as f64 * 20e-9;
        let population = rabi_population(t, &params).unwrap();
        let bar = "#".repeat((population * 80.0).round() as usize);
        println!("{:7.1}   {:.4} {}", t * 1e9, population, bar);
    }

    // A damped envelope reproduces the decaying contrast seen on long scans.
    let damped = RabiParams::new(omega, 4e5, reference::IN_FIBER_PEAK).unwrap();
    let late = 5.0 * t_pi;
    println!(
        "\nwith damping 4e5 /s the population at {:.0} ns drops to {:.4} (undamped {:.4})",
        late * 1e9,
        rabi_population(late, &damped).unwrap(),
        rabi_population(late, &params).unwrap(),
    );
}

pub mod coulomb;
pub mod gamma;
pub mod kummer;

pub use coulomb::{
    coulomb_distortion, distortion_argument, kummer, kummer_complex, kummer_with, phi, regular_component, sommerfeld,
    CoulombFactor, CoulombJet, SommerfeldParameter,
};
pub use kummer::{KummerSettings, Method};

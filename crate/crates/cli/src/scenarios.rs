//! Scenario templates shipped with the binary.

pub struct Bundled {
    pub name: &'static str,
    pub text: &'static str,
}

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        &[$(Bundled { name: $name, text: include_str!(concat!("../scenarios/", $name, ".toml")) }),*]
    };
}

pub const BUNDLED: &[Bundled] = bundled![
    "whitney_demo",
    "whitney_plane",
    "ladder_certify",
    "cz_identities",
    "telescoping",
    "hilbert_sparse",
    "circle_maximal",
    "parabola_decay",
    "parabola_improving",
    "converse_identity",
    "converse_hilbert",
    "sharpness_sweep",
    "weights_demo",
];

pub fn find(name: &str) -> Option<&'static Bundled> {
    BUNDLED.iter().find(|b| b.name == name)
}

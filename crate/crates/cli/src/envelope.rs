//! Report envelope. Every command's output carries the tool version, the
//! fully resolved configuration and (where randomness is involved) the
//! seed, so identical (version, config, seed) triples reproduce the bytes.

use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
struct Envelope<C: Serialize, R: Serialize> {
    version: &'static str,
    command: &'static str,
    config: C,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    report: R,
}

/// Pretty JSON envelope with a trailing newline. `seed` is omitted for
/// fully deterministic commands rather than invented.
pub fn render_json<C: Serialize, R: Serialize>(
    command: &'static str,
    config: C,
    seed: Option<u64>,
    report: R,
) -> String {
    let envelope = Envelope {
        version: VERSION,
        command,
        config,
        seed,
        report,
    };
    let mut text =
        serde_json::to_string_pretty(&envelope).expect("reports only hold serialisable values");
    text.push('\n');
    text
}

/// Comment lines that open every CSV report; the config is one JSON object.
pub fn csv_preamble<C: Serialize>(command: &str, config: &C, seed: Option<u64>) -> String {
    let config_json = serde_json::to_string(config).expect("configs only hold serialisable values");
    let mut text = format!("# version={VERSION}\n# command={command}\n# config={config_json}\n");
    if let Some(seed) = seed {
        text.push_str(&format!("# seed={seed}\n"));
    }
    text
}

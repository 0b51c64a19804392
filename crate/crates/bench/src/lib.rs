//! Fixture builders for the benchmarks.

use figforge_core::kb::KbRecord;
use figforge_core::{route_all, BlockStyle, ConnectorKind, ConnectorStyle, Rect, RouterConfig, Scene};

/// `cols` x `rows` blocks on a lattice with elbow connectors to the right
/// and downward neighbours, routed.
pub fn lattice(cols: usize, rows: usize) -> Scene {
    let mut s = Scene::default();
    let mut ids = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let rect = Rect::from_inches(0.4 + c as f64 * 1.6, 0.4 + r as f64 * 1.1, 1.0, 0.6);
            ids.push(s.add_block(rect, &format!("B{r}{c}"), BlockStyle::default()).unwrap());
        }
    }
    for r in 0..rows {
        for c in 0..cols {
            let k = r * cols + c;
            if c + 1 < cols {
                s.add_connector(&ids[k], &ids[k + 1], ConnectorKind::Elbow, ConnectorStyle::default()).unwrap();
            }
            if r + 1 < rows && (r + c) % 2 == 0 {
                s.add_connector(&ids[k], &ids[k + cols], ConnectorKind::Elbow, ConnectorStyle::default()).unwrap();
            }
        }
    }
    route_all(&s, &RouterConfig::default())
}

/// Synthetic records over a small vocabulary.
pub fn records(n: usize) -> Vec<KbRecord> {
    const WORDS: [&str; 12] = [
        "encoder", "decoder", "graph", "retrieval", "policy", "camera", "loss", "token", "attention", "layer", "robot", "fusion",
    ];
    (0..n)
        .map(|i| KbRecord {
            id: format!("r{i:05}"),
            figure_ref: format!("fig{i}"),
            caption: format!("{} {} {}", WORDS[i % 12], WORDS[(i / 12) % 12], WORDS[(i * 7) % 12]),
            description: format!("{} feeds {} through {}", WORDS[(i * 5) % 12], WORDS[(i * 3) % 12], WORDS[(i / 3) % 12]),
            venue: String::new(),
        })
        .collect()
}

//! A small randomized campaign over every certificate kind, written as CSV.

use oentropy::bounds::BoundKind;
use oentropy::campaign::{run_campaign, summary_json, write_csv, CampaignConfig};

fn main() -> oentropy::Result<()> {
    let config = CampaignConfig::from_toml(
        r#"
        seed = 2024
        trials = 50
        dims = [2, 3, 4]
        outcome_counts = [1, 2, 4, 8]
        bound_kinds = ["afw", "naive", "concavity", "conditional", "set_distance", "restricted"]
        "#,
    )?;
    assert_eq!(config.bound_kinds.len(), 6);
    let outcome = run_campaign(&config, 4)?;
    println!("{}", serde_json::to_string_pretty(&summary_json(&config, &outcome))?);
    for kind in &config.bound_kinds {
        let slacks: Vec<f64> = outcome.rows.iter().filter(|r| r.kind == *kind).map(|r| r.slack).collect();
        let min = slacks.iter().copied().fold(f64::INFINITY, f64::min);
        println!("{:>13}: {} rows, smallest slack {min:.3e}", kind.name(), slacks.len());
    }
    let mut head = Vec::new();
    write_csv(&outcome.rows[..4], &mut head)?;
    print!("{}", String::from_utf8_lossy(&head));
    assert!(BoundKind::parse("set-distance").is_some());
    Ok(())
}

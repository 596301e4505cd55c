//! Writes and reads back the artifact formats: a coefficient CSV and an expansion JSON
//! envelope carrying the run configuration.

use polyanalytic::corpus::CorpusFunction;
use polyanalytic::expansion::{build_blocks, certify_norms, BlockExpansion, NormGrid};
use polyanalytic::io::{read_coefficients_csv, read_json, write_coefficients_csv, write_json, ExpansionDoc, RunConfig};

fn main() -> polyanalytic::Result<()> {
    let id = "geometric:r=0.5,N=2,Q=32";
    let table = CorpusFunction::parse(id)?.table();
    let config = RunConfig::new("example").with("corpus", id);

    let mut csv = Vec::new();
    write_coefficients_csv(&mut csv, &table, &config)?;
    println!("{}", String::from_utf8_lossy(&csv).lines().take(5).collect::<Vec<_>>().join("\n"));
    assert_eq!(read_coefficients_csv(csv.as_slice())?, table);

    let exp = certify_norms(&build_blocks(&table, 1.0)?, 0.25, NormGrid::default())?;
    let mut json = Vec::new();
    write_json(&mut json, "expansion", &config, &ExpansionDoc::from(&exp))?;
    let back = BlockExpansion::try_from(read_json::<ExpansionDoc>(json.as_slice(), "expansion")?.data)?;
    println!("expansion JSON: {} bytes, round trip exact: {}", json.len(), back == exp);
    Ok(())
}

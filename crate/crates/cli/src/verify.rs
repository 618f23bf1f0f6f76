use anyhow::Result;

use saltflow::estimates::{run_estimate, summary_table, EstimateReport, ESTIMATE_IDS};

use crate::config::ExperimentSpec;
use crate::output::{write_file, write_manifest};

#[derive(Debug)]
pub struct VerifyOutput {
    pub reports: Vec<EstimateReport>,
    pub table: String,
}

impl VerifyOutput {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

/// Selected ids with `all` expanded, first occurrence kept.
pub fn selected_ids(spec: &ExperimentSpec) -> Vec<&'static str> {
    let mut ids: Vec<&'static str> = Vec::new();
    for name in &spec.verify.estimates {
        let add: Vec<&'static str> = if name == "all" {
            ESTIMATE_IDS.to_vec()
        } else {
            ESTIMATE_IDS.iter().copied().filter(|i| i == name).collect()
        };
        for id in add {
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
    }
    ids
}

/// Runs the selected checks, writing one `<id>.csv` per report under
/// `verify/` and the summary table.
pub fn cmd_verify(spec: &ExperimentSpec) -> Result<VerifyOutput> {
    spec.check_command()?;
    let dir = spec.out.join("verify");
    std::fs::create_dir_all(&dir)?;
    write_manifest(spec)?;
    let mut reports = Vec::new();
    for id in selected_ids(spec) {
        reports.extend(run_estimate(id, &spec.verify.lab)?);
    }
    for r in &reports {
        let mut buf = Vec::new();
        r.write_csv(&mut buf)?;
        write_file(&dir.join(format!("{}.csv", r.id)), &String::from_utf8(buf)?)?;
    }
    let table = summary_table(&reports);
    write_file(&spec.out.join("verify_summary.txt"), &table)?;
    Ok(VerifyOutput { reports, table })
}

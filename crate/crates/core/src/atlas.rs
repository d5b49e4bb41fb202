//! Registry of singularities accumulated over integration campaigns.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{AtlasError, StepError};
use crate::integrator::{integrate_path, IntegrationOptions, PathSolution, PathSpec, StepRecord};
use crate::locator::{merge_estimates, nearest, MergeSummary, Singularity, SingularityEstimate};
use crate::taylor::OdeSystem;

/// Which problem a campaign integrated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub label: String,
    #[serde(with = "crate::complex_pair")]
    pub t0: Complex64,
    #[serde(with = "crate::complex_pair::vec")]
    pub y0: Vec<Complex64>,
}

/// One integration run along one path, kept for provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub id: String,
    pub problem: ProblemSpec,
    pub path: PathSpec,
    pub options: IntegrationOptions,
    #[serde(default)]
    pub records: Vec<StepRecord>,
}

impl Campaign {
    pub fn new(
        id: impl Into<String>,
        problem: ProblemSpec,
        path: PathSpec,
        options: IntegrationOptions,
        solution: &PathSolution,
    ) -> Self {
        Self {
            id: id.into(),
            problem,
            path,
            options,
            records: solution.records.clone(),
        }
    }
}

/// Outcome of [`run_campaign`]. A failed integration still yields the
/// records and estimates computed before the failure.
#[derive(Debug, Clone)]
pub struct CampaignRun {
    pub campaign: Campaign,
    pub estimates: Vec<SingularityEstimate>,
    pub failure: Option<StepError>,
}

/// Integrates `path` from the problem's initial data and packages the result
/// as a campaign, keeping partial results on failure.
pub fn run_campaign(
    id: impl Into<String>,
    sys: &dyn OdeSystem,
    problem: ProblemSpec,
    path: PathSpec,
    options: IntegrationOptions,
) -> CampaignRun {
    let (solution, failure) = match integrate_path(sys, &problem.y0, &path, &options) {
        Ok(s) => (s, None),
        Err(f) => (f.partial, Some(f.error)),
    };
    let campaign = Campaign::new(id, problem, path, options, &solution);
    CampaignRun {
        campaign,
        estimates: solution.estimates,
        failure,
    }
}

pub type IngestSummary = MergeSummary;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnmatchedEstimate {
    #[serde(with = "crate::complex_pair")]
    pub location: Complex64,
    pub step: usize,
    /// Distance to the nearest registry entry; infinite for an empty atlas.
    #[serde(with = "crate::complex_pair::lossy_f64")]
    pub distance: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    /// Accepted estimates within `merge_tol` of a registry entry.
    pub matched: usize,
    /// Distinct registry entries hit by matched estimates.
    pub matched_entries: usize,
    pub unmatched: Vec<UnmatchedEstimate>,
    /// Largest nearest-entry distance over all accepted estimates.
    #[serde(with = "crate::complex_pair::lossy_f64")]
    pub max_distance: f64,
}

impl AuditReport {
    /// Unmatched estimates farther than `limit` from every entry.
    pub fn unmatched_beyond(&self, limit: f64) -> usize {
        self.unmatched
            .iter()
            .filter(|u| u.distance.is_nan() || u.distance > limit)
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atlas {
    pub merge_tol: f64,
    singularities: Vec<Singularity>,
    campaigns: Vec<Campaign>,
}

impl Default for Atlas {
    fn default() -> Self {
        Self::new(crate::locator::DEFAULT_MERGE_TOL)
    }
}

impl Atlas {
    pub fn new(merge_tol: f64) -> Self {
        Self {
            merge_tol,
            singularities: Vec::new(),
            campaigns: Vec::new(),
        }
    }

    /// Entries ordered by real part, then imaginary part.
    pub fn singularities(&self) -> &[Singularity] {
        &self.singularities
    }

    pub fn confirmed(&self) -> impl Iterator<Item = &Singularity> {
        self.singularities.iter().filter(|s| s.confirmed)
    }

    pub fn campaigns(&self) -> &[Campaign] {
        &self.campaigns
    }

    pub fn is_empty(&self) -> bool {
        self.singularities.is_empty()
    }

    pub fn len(&self) -> usize {
        self.singularities.len()
    }

    /// Confirmed entries on the real axis (within `merge_tol`) strictly
    /// between `lo` and `hi`, sorted.
    pub fn real_poles_between(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut poles: Vec<f64> = self
            .confirmed()
            .filter(|s| s.location.im.abs() <= self.merge_tol && s.location.re > lo && s.location.re < hi)
            .map(|s| s.location.re)
            .collect();
        poles.sort_by(f64::total_cmp);
        poles
    }

    /// Merges the campaign's accepted estimates into the registry and stores
    /// the campaign. `estimates[i]` is taken to come from step `i`.
    pub fn ingest(
        &mut self,
        campaign: Campaign,
        estimates: &[SingularityEstimate],
    ) -> Result<IngestSummary, AtlasError> {
        if self.campaigns.iter().any(|c| c.id == campaign.id) {
            return Err(AtlasError::DuplicateCampaign(campaign.id));
        }
        let summary = merge_estimates(&mut self.singularities, estimates, self.merge_tol, Some(&campaign.id));
        self.sort();
        log::info!(
            "campaign {}: {} new, {} merged, {} rejected",
            campaign.id,
            summary.new,
            summary.merged,
            summary.rejected
        );
        self.campaigns.push(campaign);
        Ok(summary)
    }

    fn sort(&mut self) {
        self.singularities.sort_by(|a, b| {
            a.location
                .re
                .total_cmp(&b.location.re)
                .then(a.location.im.total_cmp(&b.location.im))
        });
    }

    /// Matches each accepted estimate against the nearest registry entry.
    pub fn audit_reproducibility(&self, estimates: &[SingularityEstimate]) -> AuditReport {
        let mut report = AuditReport::default();
        let mut hit = vec![false; self.singularities.len()];
        for (step, e) in estimates.iter().enumerate().filter(|(_, e)| e.accepted) {
            let (index, distance) = nearest(&self.singularities, e.location)
                .map(|(i, d)| (Some(i), d))
                .unwrap_or((None, f64::INFINITY));
            report.max_distance = report.max_distance.max(distance);
            match index {
                Some(i) if distance < self.merge_tol => {
                    report.matched += 1;
                    hit[i] = true;
                }
                _ => report.unmatched.push(UnmatchedEstimate {
                    location: e.location,
                    step,
                    distance,
                }),
            }
        }
        report.matched_entries = hit.iter().filter(|h| **h).count();
        report
    }

    /// CSV view: `re,im,order,confidence,support_count,confirmed`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), AtlasError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["re", "im", "order", "confidence", "support_count", "confirmed"])?;
        for s in &self.singularities {
            w.write_record([
                s.location.re.to_string(),
                s.location.im.to_string(),
                s.order.to_string(),
                s.confidence.to_string(),
                s.support_count.to_string(),
                s.confirmed.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<(), AtlasError> {
        serde_json::to_writer_pretty(writer, self)?;
        Ok(())
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Self, AtlasError> {
        let mut atlas: Atlas = serde_json::from_reader(reader)?;
        atlas.sort();
        Ok(atlas)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), AtlasError> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_json(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, AtlasError> {
        Self::read_json(BufReader::new(File::open(path)?))
    }

    pub fn export_csv(&self, path: impl AsRef<Path>) -> Result<(), AtlasError> {
        self.write_csv(BufWriter::new(File::create(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn est(z: Complex64) -> SingularityEstimate {
        SingularityEstimate {
            location: z,
            order_s: c(2.0, 0.0),
            residual: 1e-13,
            confidence: 13.0 / 16.0,
            step_point: c(0.0, 0.0),
            accepted: true,
        }
    }

    fn campaign(id: &str) -> Campaign {
        Campaign {
            id: id.into(),
            problem: ProblemSpec {
                label: "painleve1".into(),
                t0: c(0.0, 0.0),
                y0: vec![c(0.5, 0.0), c(0.9, 0.0)],
            },
            path: PathSpec::new(vec![c(0.0, 0.0), c(1.0, 0.3)]).unwrap(),
            options: IntegrationOptions::default(),
            records: Vec::new(),
        }
    }

    fn three_poles() -> Vec<SingularityEstimate> {
        vec![est(c(3.1480, 1.3306)), est(c(1.3486, 0.0)), est(c(3.1480, -1.3306))]
    }

    #[test]
    fn reingesting_only_merges() {
        let mut atlas = Atlas::default();
        let first = atlas.ingest(campaign("a"), &three_poles()).unwrap();
        assert_eq!(first.new, 3);
        let again = atlas.ingest(campaign("b"), &three_poles()).unwrap();
        assert_eq!(
            again,
            MergeSummary {
                new: 0,
                merged: 3,
                rejected: 0
            }
        );
        assert!(atlas
            .singularities()
            .iter()
            .all(|s| s.support_count == 2 && s.confirmed));
    }

    #[test]
    fn rejected_only_campaign_adds_nothing() {
        let mut atlas = Atlas::default();
        let mut e = est(c(1.0, 1.0));
        e.accepted = false;
        let s = atlas.ingest(campaign("a"), &[e]).unwrap();
        assert_eq!((s.new, s.rejected), (0, 1));
        assert!(atlas.is_empty());
    }

    #[test]
    fn duplicate_campaign_id_is_an_error() {
        let mut atlas = Atlas::default();
        atlas.ingest(campaign("a"), &[]).unwrap();
        assert!(matches!(
            atlas.ingest(campaign("a"), &[]),
            Err(AtlasError::DuplicateCampaign(_))
        ));
    }

    #[test]
    fn audit_against_empty_atlas() {
        let report = Atlas::default().audit_reproducibility(&three_poles());
        assert_eq!(report.matched, 0);
        assert_eq!(report.unmatched.len(), 3);
        assert_eq!(report.max_distance, f64::INFINITY);
    }

    #[test]
    fn audit_of_identical_estimates() {
        let mut atlas = Atlas::default();
        atlas.ingest(campaign("a"), &three_poles()).unwrap();
        let report = atlas.audit_reproducibility(&three_poles());
        assert_eq!(report.matched, 3);
        assert_eq!(report.matched_entries, 3);
        assert_eq!(report.max_distance, 0.0);
        assert!(report.unmatched.is_empty());
    }

    #[test]
    fn csv_rows_sorted_by_real_part() {
        let mut atlas = Atlas::default();
        atlas.ingest(campaign("a"), &three_poles()).unwrap();
        let mut buf = Vec::new();
        atlas.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "re,im,order,confidence,support_count,confirmed");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("1.3486,0,"));
        assert!(lines[2].starts_with("3.148,-1.3306,"));
        assert!(lines[3].starts_with("3.148,1.3306,"));
    }

    #[test]
    fn empty_atlas_csv_is_header_only() {
        let mut buf = Vec::new();
        Atlas::default().write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "re,im,order,confidence,support_count,confirmed\n"
        );
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut atlas = Atlas::default();
        let odd = [est(c(0.1 + 0.2, 1.0 / 3.0)), est(c(std::f64::consts::PI, -1e-300))];
        atlas.ingest(campaign("a"), &odd).unwrap();
        let mut buf = Vec::new();
        atlas.write_json(&mut buf).unwrap();
        let back = Atlas::read_json(buf.as_slice()).unwrap();
        assert_eq!(back, atlas);
        for (a, b) in back.singularities().iter().zip(atlas.singularities()) {
            assert_eq!(a.location.re.to_bits(), b.location.re.to_bits());
            assert_eq!(a.location.im.to_bits(), b.location.im.to_bits());
            assert_eq!(a.confidence.to_bits(), b.confidence.to_bits());
        }
    }

    #[test]
    fn real_poles_are_filtered() {
        let mut atlas = Atlas::default();
        atlas.ingest(campaign("a"), &three_poles()).unwrap();
        atlas.ingest(campaign("b"), &three_poles()).unwrap();
        assert_eq!(atlas.real_poles_between(0.0, 20.0), vec![1.3486]);
        assert!(atlas.real_poles_between(2.0, 20.0).is_empty());
    }
}

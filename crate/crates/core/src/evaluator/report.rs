use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};

use super::assemble::TestSet;
use crate::corpus::DatasetName;
use crate::html::escape;
use crate::metrics::{Confusion, Metrics};
use crate::olbi::RuleId;
use crate::trainer::{label_for_score, ClassifierArtifact, Prediction};
use crate::Label;

/// One row of the cross-evaluation: a dataset's classifier, or the reason
/// it could not be loaded.
#[derive(Debug)]
pub struct ModelUnderTest {
    pub dataset: DatasetName,
    pub artifact: Result<ClassifierArtifact, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub rule: RuleId,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table4Row {
    pub dataset: DatasetName,
    pub model: Option<String>,
    pub epochs: Option<u32>,
    /// Per-text metrics, one cell per rule; empty when `error` is set.
    pub cells: Vec<Cell>,
    /// Supplementary per-respondent majority-vote metrics.
    pub respondent_cells: Vec<Cell>,
    pub error: Option<String>,
}

impl Table4Row {
    pub fn cell(&self, rule: RuleId) -> Option<&Cell> {
        self.cells.iter().find(|c| c.rule == rule)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table4Report {
    pub rules: Vec<RuleId>,
    pub rows: Vec<Table4Row>,
    pub texts: usize,
    pub respondents: usize,
}

/// A respondent is predicted burnout when at least half of their texts
/// are; their true label is the inventory label.
pub fn respondent_majority(test: &TestSet, predictions: &[Prediction], rule: RuleId) -> Metrics {
    let mut votes: BTreeMap<&str, (usize, usize, Label)> = BTreeMap::new();
    for (text, p) in test.texts.iter().zip(predictions) {
        let label = text.label(rule).expect("rule assembled");
        let entry = votes.entry(text.respondent_id.as_str()).or_insert((0, 0, label));
        entry.0 += usize::from(p.label.is_burnout());
        entry.1 += 1;
    }
    let mut confusion = Confusion::default();
    for (burnout, total, label) in votes.values() {
        confusion.add(label_for_score(*burnout as f64 / *total as f64), *label);
    }
    confusion.metrics()
}

fn evaluate_row(model: &ModelUnderTest, test: &TestSet) -> Table4Row {
    let mut row = Table4Row {
        dataset: model.dataset,
        model: None,
        epochs: None,
        cells: Vec::new(),
        respondent_cells: Vec::new(),
        error: None,
    };
    let artifact = match &model.artifact {
        Ok(a) => a,
        Err(e) => {
            row.error = Some(e.clone());
            return row;
        }
    };
    row.model = Some(artifact.metadata.base_model_id.clone());
    row.epochs = Some(artifact.metadata.train_config.epochs);
    let texts: Vec<&str> = test.texts.iter().map(|t| t.text.as_str()).collect();
    let predictions = match artifact.predict_batch(&texts) {
        Ok(p) => p,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    for &rule in &test.rules {
        let mut confusion = Confusion::default();
        for (p, label) in predictions.iter().zip(test.labels(rule)) {
            confusion.add(p.label, label);
        }
        row.cells.push(Cell {
            rule,
            metrics: confusion.metrics(),
        });
        row.respondent_cells.push(Cell {
            rule,
            metrics: respondent_majority(test, &predictions, rule),
        });
    }
    row
}

/// Evaluates every model on every rule. Rows are computed in parallel and
/// returned in input order.
pub fn cross_evaluate(models: &[ModelUnderTest], test: &TestSet) -> Table4Report {
    let rows = std::thread::scope(|scope| {
        let handles: Vec<_> = models
            .iter()
            .map(|m| scope.spawn(move || evaluate_row(m, test)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("evaluation thread panicked"))
            .collect()
    });
    Table4Report {
        rules: test.rules.clone(),
        rows,
        texts: test.texts.len(),
        respondents: test.respondents.iter().filter(|r| r.texts > 0).count(),
    }
}

fn f1_cell(cell: Option<&Cell>) -> String {
    match cell {
        Some(c) if c.metrics.f1_undefined => format!("{:.3}*", c.metrics.f1),
        Some(c) => format!("{:.3}", c.metrics.f1),
        None => "—".to_string(),
    }
}

impl Table4Report {
    pub fn is_complete(&self) -> bool {
        self.rows.iter().all(|r| r.error.is_none())
    }

    pub fn row(&self, dataset: DatasetName) -> Option<&Table4Row> {
        self.rows.iter().find(|r| r.dataset == dataset)
    }

    pub fn cell_count(&self) -> usize {
        self.rows.iter().map(|r| r.cells.len()).sum()
    }

    fn render_grid(&self, out: &mut String, respondent_view: bool) {
        let _ = write!(out, "{:<20}{:<56}{:>7}", "Model", "Dataset", "Epochs");
        for rule in &self.rules {
            let _ = write!(out, "{:>26}", format!("F1 {}", rule.heading()));
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(
                out,
                "{:<20}{:<56}{:>7}",
                row.model.as_deref().unwrap_or("—"),
                row.dataset.description(),
                row.epochs.map_or("—".to_string(), |e| e.to_string())
            );
            let cells = if respondent_view { &row.respondent_cells } else { &row.cells };
            for rule in &self.rules {
                let _ = write!(out, "{:>26}", f1_cell(cells.iter().find(|c| c.rule == *rule)));
            }
            out.push('\n');
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        self.render_grid(&mut out, false);
        let _ = writeln!(out, "({} texts from {} respondents)", self.texts, self.respondents);
        if self.rows.iter().flat_map(|r| &r.cells).any(|c| c.metrics.f1_undefined) {
            out.push_str("* no positive labels or predictions; F1 set to 0\n");
        }
        for row in &self.rows {
            if let Some(e) = &row.error {
                let _ = writeln!(out, "missing: {} classifier: {e}", row.dataset);
            }
        }
        out.push_str("\nSupplementary view, per respondent (majority vote over their texts):\n");
        self.render_grid(&mut out, true);
        out
    }

    pub fn render_html(&self) -> String {
        let mut out = String::from("<table class=\"f1-scores\">\n<thead><tr><th>Model</th><th>Dataset</th><th>Epochs</th>");
        for rule in &self.rules {
            let _ = write!(out, "<th>F1 {}</th>", escape(rule.heading()));
        }
        out.push_str("</tr></thead>\n<tbody>\n");
        for row in &self.rows {
            let _ = write!(
                out,
                "<tr><td>{}</td><td>{}</td><td>{}</td>",
                escape(row.model.as_deref().unwrap_or("—")),
                escape(row.dataset.description()),
                row.epochs.map_or("—".to_string(), |e| e.to_string())
            );
            for rule in &self.rules {
                match row.cell(*rule) {
                    Some(c) => {
                        let m = &c.metrics.confusion;
                        let _ = write!(
                            out,
                            "<td title=\"tp {} fp {} fn {} tn {}\">{}</td>",
                            m.tp,
                            m.fp,
                            m.fn_,
                            m.tn,
                            f1_cell(Some(c))
                        );
                    }
                    None => out.push_str("<td class=\"gap\">—</td>"),
                }
            }
            out.push_str("</tr>\n");
        }
        out.push_str("</tbody>\n</table>\n");
        out
    }

    /// Long format: one line per (model, rule) with the full confusion
    /// matrix. Missing models appear with an `error` and empty metrics.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "dataset", "model", "epochs", "cutoff", "view", "f1", "precision", "recall", "accuracy", "tp", "fp",
            "fn", "tn", "f1_undefined", "error",
        ])?;
        for row in &self.rows {
            let model = row.model.clone().unwrap_or_default();
            let epochs = row.epochs.map(|e| e.to_string()).unwrap_or_default();
            if let Some(e) = &row.error {
                for rule in &self.rules {
                    let mut rec = vec![row.dataset.as_str().to_string(), model.clone(), epochs.clone()];
                    rec.push(rule.name().to_string());
                    rec.push("text".into());
                    rec.extend(std::iter::repeat(String::new()).take(9));
                    rec.push(e.clone());
                    w.write_record(&rec)?;
                }
                continue;
            }
            for (view, cells) in [("text", &row.cells), ("respondent", &row.respondent_cells)] {
                for c in cells {
                    let m = &c.metrics;
                    w.write_record([
                        row.dataset.as_str().to_string(),
                        model.clone(),
                        epochs.clone(),
                        c.rule.name().to_string(),
                        view.to_string(),
                        format!("{:.6}", m.f1),
                        format!("{:.6}", m.precision),
                        format!("{:.6}", m.recall),
                        format!("{:.6}", m.accuracy),
                        m.confusion.tp.to_string(),
                        m.confusion.fp.to_string(),
                        m.confusion.fn_.to_string(),
                        m.confusion.tn.to_string(),
                        m.f1_undefined.to_string(),
                        String::new(),
                    ])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

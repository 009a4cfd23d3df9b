use std::io::Write;
use std::path::Path;

use plotters::prelude::*;
use serde::{Deserialize, Serialize};

use super::TrainError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimelinePoint {
    pub step: usize,
    pub epoch: f64,
    pub training_loss: f64,
    pub eval_loss: f64,
    pub eval_f1: f64,
    pub eval_accuracy: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsTimeline {
    points: Vec<TimelinePoint>,
}

impl MetricsTimeline {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a point; steps must be strictly increasing.
    pub fn push(&mut self, point: TimelinePoint) {
        if let Some(last) = self.points.last() {
            assert!(point.step > last.step, "timeline steps must increase");
        }
        self.points.push(point);
    }

    pub fn points(&self) -> &[TimelinePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Option<&TimelinePoint> {
        self.points.last()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        for p in &self.points {
            w.serialize(p)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self, TrainError> {
        let mut r = csv::Reader::from_path(path).map_err(|e| TrainError::Format(format!("{}: {e}", path.display())))?;
        let points = r
            .deserialize()
            .collect::<Result<Vec<TimelinePoint>, _>>()
            .map_err(|e| TrainError::Format(format!("{}: {e}", path.display())))?;
        Ok(Self { points })
    }

    /// Three stacked panels: losses, F1 and accuracy against the step.
    pub fn render_svg(&self, title: &str) -> Result<String, TrainError> {
        let mut svg = String::new();
        {
            let root = SVGBackend::with_string(&mut svg, (720, 900)).into_drawing_area();
            let plot = || -> Result<(), Box<dyn std::error::Error + '_>> {
                root.fill(&WHITE)?;
                let root = root.titled(title, ("sans-serif", 22))?;
                let panels = root.split_evenly((3, 1));
                let max_step = self.points.last().map_or(1, |p| p.step).max(1) as f64;
                let max_loss = self
                    .points
                    .iter()
                    .flat_map(|p| [p.training_loss, p.eval_loss])
                    .fold(0.0f64, f64::max)
                    .max(1e-3)
                    * 1.1;

                let series: [(&str, f64, Vec<(&str, RGBColor, Box<dyn Fn(&TimelinePoint) -> f64>)>); 3] = [
                    (
                        "loss",
                        max_loss,
                        vec![
                            ("training loss", BLUE, Box::new(|p: &TimelinePoint| p.training_loss)),
                            ("eval loss", RED, Box::new(|p: &TimelinePoint| p.eval_loss)),
                        ],
                    ),
                    ("f1", 1.0, vec![("eval f1", GREEN, Box::new(|p: &TimelinePoint| p.eval_f1))]),
                    (
                        "accuracy",
                        1.0,
                        vec![("eval accuracy", MAGENTA, Box::new(|p: &TimelinePoint| p.eval_accuracy))],
                    ),
                ];
                for (area, (name, y_max, lines)) in panels.iter().zip(series) {
                    let mut chart = ChartBuilder::on(area)
                        .caption(name, ("sans-serif", 16))
                        .margin(10)
                        .x_label_area_size(30)
                        .y_label_area_size(45)
                        .build_cartesian_2d(0.0..max_step, 0.0..y_max)?;
                    chart.configure_mesh().x_desc("step").draw()?;
                    for (label, color, value) in lines {
                        chart
                            .draw_series(LineSeries::new(
                                self.points.iter().map(|p| (p.step as f64, value(p))),
                                color,
                            ))?
                            .label(label)
                            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 15, y)], color));
                    }
                    chart
                        .configure_series_labels()
                        .background_style(WHITE.mix(0.8))
                        .border_style(BLACK)
                        .draw()?;
                }
                root.present()?;
                Ok(())
            };
            plot().map_err(|e| TrainError::Format(format!("rendering curves: {e}")))?;
        }
        Ok(svg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> MetricsTimeline {
        let mut t = MetricsTimeline::new();
        for step in 1..=4 {
            t.push(TimelinePoint {
                step: step * 10,
                epoch: step as f64 / 2.0,
                training_loss: 0.7 / step as f64,
                eval_loss: 0.8 / step as f64,
                eval_f1: 0.5 + 0.1 * step as f64,
                eval_accuracy: 0.55 + 0.1 * step as f64,
            });
        }
        t
    }

    #[test]
    fn csv_round_trip() {
        let t = sample();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("timeline.csv");
        t.write_csv(std::fs::File::create(&path).unwrap()).unwrap();
        let header = std::fs::read_to_string(&path).unwrap();
        assert!(header.starts_with("step,epoch,training_loss,eval_loss,eval_f1,eval_accuracy\n"));
        assert_eq!(MetricsTimeline::read_csv(&path).unwrap(), t);
    }

    #[test]
    fn renders_svg_deterministically() {
        let t = sample();
        let a = t.render_svg("demo").unwrap();
        assert!(a.starts_with("<svg"));
        assert!(a.contains("eval f1"));
        assert_eq!(a, t.render_svg("demo").unwrap());
    }

    #[test]
    #[should_panic(expected = "increase")]
    fn rejects_non_increasing_steps() {
        let mut t = sample();
        t.push(t.points()[0]);
    }
}

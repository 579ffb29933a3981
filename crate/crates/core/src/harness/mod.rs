//! Scenario configuration, execution and figure recipes.

mod config;
mod figures;
mod run;
mod table;

pub use config::{
    validate_config, Format, Method, OutputSettings, RateGrid, ScanAxis, ScenarioConfig, SdeSettings, Spacing,
    SpectrumSettings, SCAN_PARAMETERS,
};
pub use figures::{figure_scenarios, reproduce_figure, FigureId, FigureOutput, Manifest};
pub use run::{point_params, run_scenario};
pub use table::{Column, PointResult, ResultTable, Series, SCHEMA_VERSION};

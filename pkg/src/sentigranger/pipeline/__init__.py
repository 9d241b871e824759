from .report import (
    SCHEMA_VERSION,
    CausalityReport,
    OosSummary,
    OutputFormat,
    ReportRow,
    narrative_verdict,
    parse_json_report,
    render_report,
    report_from_dict,
    report_to_dict,
)
from .run import RunConfig, Segment, oos_compare, run_pipeline
from .synthetic import gen_synthetic, write_pair

__all__ = [
    "SCHEMA_VERSION", "CausalityReport", "OosSummary", "OutputFormat", "ReportRow",
    "RunConfig", "Segment", "gen_synthetic", "narrative_verdict", "oos_compare",
    "parse_json_report", "render_report", "report_from_dict", "report_to_dict",
    "run_pipeline", "write_pair",
]

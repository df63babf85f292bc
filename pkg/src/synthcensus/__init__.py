"""Census-like synthetic microdata from declarative descriptors and weight tables."""

from synthcensus.engine import build_plan, catalog_from_fixtures, draw_categorical, generate_dataset, generate_record
from synthcensus.export import CsvLayout, export_csv
from synthcensus.fidelity import chi_square, empirical_distribution, fidelity_report, tv_distance
from synthcensus.fixtures import load_fixtures
from synthcensus.rng import RandomStream
from synthcensus.schema import evaluate_script, parse_descriptor, parse_script
from synthcensus.weights import age_bucket, build_distribution, load_grouped, parse_weight_table

__version__ = "0.1.0"

__all__ = [
    "CsvLayout",
    "RandomStream",
    "age_bucket",
    "build_distribution",
    "build_plan",
    "catalog_from_fixtures",
    "chi_square",
    "draw_categorical",
    "empirical_distribution",
    "evaluate_script",
    "export_csv",
    "fidelity_report",
    "generate_dataset",
    "generate_record",
    "load_fixtures",
    "load_grouped",
    "parse_descriptor",
    "parse_script",
    "parse_weight_table",
    "tv_distance",
]

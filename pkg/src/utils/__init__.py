"""
Utility functions package
"""
from .data_manager import load_json_config, save_json, write_csv, check_writable, dumps, to_jsonable
from .logger import configure_logging
from .parallel import ordered_map
from .stepping import DenseRun, integrate_dense

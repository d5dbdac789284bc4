"""File formats, run configuration, manifests and image export."""

from .arrays import (ArrayFormatError, BadHeaderError, BadMagicError, LengthMismatchError,
                     UnknownDtypeError, decode_array, encode_array, read_array, write_array)
from .config import (OUTPUT_ROOT_ENV, ConfigError, RunConfig, default_config_text,
                     load_config, parse_config, to_toml)
from .manifest import MANIFEST_NAME, write_manifest
from .png import export_png, to_uint8
from .results import (LOSS_HEADER, METRICS_HEADER, write_json, write_loss_log,
                      write_metrics_csv, write_sweep)

__all__ = [
    "ArrayFormatError",
    "BadHeaderError",
    "BadMagicError",
    "ConfigError",
    "LOSS_HEADER",
    "LengthMismatchError",
    "MANIFEST_NAME",
    "METRICS_HEADER",
    "OUTPUT_ROOT_ENV",
    "RunConfig",
    "UnknownDtypeError",
    "decode_array",
    "default_config_text",
    "encode_array",
    "export_png",
    "load_config",
    "parse_config",
    "read_array",
    "to_toml",
    "to_uint8",
    "write_array",
    "write_json",
    "write_loss_log",
    "write_manifest",
    "write_metrics_csv",
    "write_sweep",
]

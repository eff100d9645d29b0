"""DAL module - sole interface to volume, weights and dataset files."""

from cdiforge.dal.reports import read_rows_csv, write_json, write_rows_csv, write_series_csv
from cdiforge.dal.store import DatasetStore, load_json, manifest_bytes
from cdiforge.dal.volume_codec import decode_volume, encode_volume, read_volume, write_volume
from cdiforge.dal.weights_codec import (
    decode_weights,
    encode_weights,
    load_network,
    read_weights,
    save_network,
    write_weights,
)

__all__ = [
    "DatasetStore",
    "decode_volume",
    "decode_weights",
    "encode_volume",
    "encode_weights",
    "load_json",
    "load_network",
    "manifest_bytes",
    "read_rows_csv",
    "read_volume",
    "read_weights",
    "save_network",
    "write_json",
    "write_rows_csv",
    "write_series_csv",
    "write_volume",
    "write_weights",
]

"""Map relational schemas to PropBank rolesets.

Thin Python surface over the C++ core: frame index queries, DDL analysis,
mapping file handling, the resumable mapping pipeline and the MCP servers.
"""

from ._ddlpb import (
    Error,
    FrameIndex,
    FsServer,
    IoError,
    LoadError,
    NotFoundError,
    ParseError,
    PropBankServer,
    Schema,
    ValidationError,
    PROTOCOL_VERSION,
    __version__,
    baseline_verbs,
    canonical_ddl,
    classify_mapping_file,
    coordinate,
    deserialize_mapping,
    map_table,
    parse_ddl,
    run,
    serialize_mapping,
    table_context,
)

__all__ = [
    "Error",
    "FrameIndex",
    "FsServer",
    "IoError",
    "LoadError",
    "NotFoundError",
    "ParseError",
    "PropBankServer",
    "Schema",
    "ValidationError",
    "PROTOCOL_VERSION",
    "baseline_verbs",
    "canonical_ddl",
    "classify_mapping_file",
    "coordinate",
    "deserialize_mapping",
    "map_table",
    "parse_ddl",
    "run",
    "serialize_mapping",
    "table_context",
]

"""Constants for the gk3shift package."""

DOMAIN = "gk3shift"

# Separator between a split vertex (or edge) and its class index, e.g. "v#2".
NAME_SEPARATOR = "#"

EXIT_YES = 0
EXIT_NO = 1
EXIT_UNSUPPORTED = 2
EXIT_INPUT_ERROR = 3

INPUT_FORMATS = [
    "json",
    "matrix",
]

LOG_LEVELS = [
    "critical",
    "error",
    "warning",
    "info",
    "debug",
]

DEFAULT_LOG_LEVEL = "info"
DEFAULT_MAX_DEPTH = 4
DEFAULT_MAX_VERTICES = 8
DEFAULT_MAX_CLASSES = 2
DEFAULT_CANON_VERTEX_LIMIT = 10
DEFAULT_CANON_PERMUTATION_LIMIT = 362880  # 9!
DEFAULT_WITNESS_ENTRY_MAX = 2
DEFAULT_WITNESS_LAG_MAX = 2
DEFAULT_WITNESS_CANDIDATE_LIMIT = 1_000_000
DEFAULT_MAX_LEVEL = 64

CACHE_VERSION = 2

SEED_ENV_VAR = "SFT_SEED"

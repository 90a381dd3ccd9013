from .design import (
    CODE_TEMPLATE_VERSION,
    DESIGN_TEMPLATE_VERSION,
    GenerationError,
    TextGenerator,
    code_role,
    design_role,
)
from .filters import (
    DEFAULT_INTEREST_THRESHOLD,
    ApprovalQueue,
    FilterResult,
    filter_instance,
)
from .pool import PoolInstance, SamplePool, load_seed_instances
from .prototypes import (
    CorpusError,
    Prototype,
    PrototypeSource,
    fetch_prototype,
    load_prototypes,
    parse_corpus_file,
    write_corpus_file,
)
from .split import SplitError, TrainingSample, read_dataset, split_samples, write_dataset
from .tags import TAGS, InterestVector, tag_interest

__all__ = [
    "GenerationError", "TextGenerator", "code_role", "design_role",
    "DESIGN_TEMPLATE_VERSION", "CODE_TEMPLATE_VERSION",
    "ApprovalQueue", "FilterResult", "filter_instance", "DEFAULT_INTEREST_THRESHOLD",
    "PoolInstance", "SamplePool", "load_seed_instances",
    "CorpusError", "Prototype", "PrototypeSource", "fetch_prototype",
    "load_prototypes", "parse_corpus_file", "write_corpus_file",
    "SplitError", "TrainingSample", "read_dataset", "split_samples", "write_dataset",
    "TAGS", "InterestVector", "tag_interest",
]

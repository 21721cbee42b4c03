from .context import SceneBundle, SceneContext
from .describe import Description, describe, describe_all
from .difficulty import DifficultyError, count_hops, reasoning_difficulty
from .generator import (
    GenerationResult,
    QAParams,
    build_qa_params,
    check_templates,
    generate_dataset,
    instantiate_question,
)
from .supervision import SUPERVISION_LEVELS, emit_supervision

__all__ = [
    "Description",
    "DifficultyError",
    "GenerationResult",
    "QAParams",
    "SUPERVISION_LEVELS",
    "SceneBundle",
    "SceneContext",
    "build_qa_params",
    "check_templates",
    "count_hops",
    "describe",
    "describe_all",
    "emit_supervision",
    "generate_dataset",
    "instantiate_question",
    "reasoning_difficulty",
]

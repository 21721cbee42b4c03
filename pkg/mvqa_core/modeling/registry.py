from mvqa_core.utils.registry import Registry

QUESTION_FAMILIES = Registry("QUESTION_FAMILIES")
ENDPOINT_PROVIDERS = Registry("ENDPOINT_PROVIDERS")

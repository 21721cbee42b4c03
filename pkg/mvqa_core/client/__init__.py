from .endpoint import (
    EndpointAuthError,
    EndpointError,
    ModelEndpoint,
    TransientEndpointError,
    build_endpoint,
)
from .prompts import DIRECT, PROMPT_MODES, THINKING
from .providers import ChatRequest, HttpProvider, MockProvider, build_provider

__all__ = [
    "ChatRequest",
    "DIRECT",
    "EndpointAuthError",
    "EndpointError",
    "HttpProvider",
    "MockProvider",
    "ModelEndpoint",
    "PROMPT_MODES",
    "THINKING",
    "TransientEndpointError",
    "build_endpoint",
    "build_provider",
]

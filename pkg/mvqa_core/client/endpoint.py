import os
from dataclasses import dataclass

from mvqa_core.utils.logger import register_secret


class EndpointError(RuntimeError):
    """Permanent request failure; the question gets a missing-prediction record."""


class TransientEndpointError(EndpointError):
    """Rate limiting, server errors and timeouts; retried with backoff."""

    def __init__(self, message, status=None):
        super(TransientEndpointError, self).__init__(message)
        self.status = status


class EndpointAuthError(EndpointError):
    pass


@dataclass(frozen=True)
class ModelEndpoint:
    name: str
    base_url: str = ""
    model_name: str = ""
    api_key_env: str = ""
    timeout: float = 120.0
    max_retries: int = 4
    max_concurrency: int = 4
    provider: str = "http"
    fixture: str = ""
    max_tokens: int = 1024

    def __post_init__(self):
        if self.max_concurrency < 1:
            raise ValueError("{}: max_concurrency must be >= 1, got {}".format(
                self.name, self.max_concurrency))
        if self.max_retries < 0:
            raise ValueError("{}: max_retries must be >= 0".format(self.name))

    def api_key(self):
        """The secret from the named environment variable, registered for
        redaction before anything can log it."""
        if not self.api_key_env:
            return None
        key = os.environ.get(self.api_key_env)
        register_secret(key)
        return key

    def to_dict(self):
        # only the variable name is ever serialized
        return {
            "name": self.name,
            "base_url": self.base_url,
            "model_name": self.model_name,
            "api_key_env": self.api_key_env,
            "timeout": self.timeout,
            "max_retries": self.max_retries,
            "max_concurrency": self.max_concurrency,
            "provider": self.provider,
        }


def build_endpoint(cfg, name=None, mock_fixture=None):
    """Endpoint from a catalog preset (``name``), a mock fixture, or the
    ``ENDPOINT`` section of the config, in that order of precedence."""
    from mvqa_core.config.paths_catalog import EndpointCatalog

    e = cfg.ENDPOINT
    base = dict(
        name=e.NAME,
        base_url=e.BASE_URL,
        model_name=e.MODEL,
        api_key_env=e.API_KEY_ENV,
        timeout=e.TIMEOUT,
        max_retries=e.MAX_RETRIES,
        max_concurrency=e.MAX_CONCURRENCY,
        max_tokens=e.MAX_TOKENS,
    )
    if mock_fixture:
        base.update(name="mock", provider="mock", fixture=mock_fixture)
    elif name:
        base.update(EndpointCatalog.get(name))
    return ModelEndpoint(**base)

import logging
import os
import sys

_SECRETS = set()
_REDACTED = "***"


def register_secret(value):
    """Mark a value that must never appear in any log record."""
    if value:
        _SECRETS.add(str(value))


def redact(text):
    text = str(text)
    for secret in _SECRETS:
        if secret in text:
            text = text.replace(secret, _REDACTED)
    return text


class SecretFilter(logging.Filter):
    def filter(self, record):
        if _SECRETS:
            record.msg = redact(record.getMessage())
            record.args = ()
        return True


def setup_logger(name, save_dir, distributed_rank=0, filename="log.txt"):
    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG)
    # worker processes only log through the main one
    if distributed_rank > 0:
        return logger
    for handler in list(logger.handlers):
        if getattr(handler, "_mvqa_handler", False):
            logger.removeHandler(handler)
            handler.close()

    formatter = logging.Formatter("%(asctime)s %(name)s %(levelname)s: %(message)s")
    ch = logging.StreamHandler(stream=sys.stdout)
    ch.setLevel(logging.INFO)
    ch.setFormatter(formatter)
    ch.addFilter(SecretFilter())
    ch._mvqa_handler = True
    logger.addHandler(ch)

    if save_dir:
        fh = logging.FileHandler(os.path.join(save_dir, filename))
        fh.setLevel(logging.DEBUG)
        fh.setFormatter(formatter)
        fh.addFilter(SecretFilter())
        fh._mvqa_handler = True
        logger.addHandler(fh)

    return logger

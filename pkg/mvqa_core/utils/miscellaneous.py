import hashlib
import logging
import os


def mkdir(path):
    if path:
        os.makedirs(path, exist_ok=True)


def save_config(cfg, path):
    logger = logging.getLogger("mvqa_core.config")
    with open(path, "w") as f:
        f.write(cfg.dump())
    logger.info("Saving resolved config to {}".format(path))


def sha256_hex(data):
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()

"""Centralized catalog of bundled data and endpoint presets."""

import os


class DemoCatalog(object):
    DATA_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "..", "configs"))
    SPLITS = {
        "demo": {
            "assets": "assets/demo_manifest.json",
            "themes": "themes",
            "templates": "templates",
            "targets": "targets/demo.json",
        },
        "full_split": {
            "assets": "assets/demo_manifest.json",
            "themes": "themes",
            "templates": "templates",
            "targets": "targets/full_split.json",
        },
        "train_split": {
            "assets": "assets/demo_manifest.json",
            "themes": "themes",
            "templates": "templates",
            "targets": "targets/train_split.json",
        },
    }

    @staticmethod
    def get(name):
        if name in DemoCatalog.SPLITS:
            attrs = DemoCatalog.SPLITS[name]
            return {k: os.path.join(DemoCatalog.DATA_DIR, v) for k, v in attrs.items()}
        raise RuntimeError("Demo data not available: {}".format(name))

    @staticmethod
    def resolve(cfg, name="demo"):
        """``cfg.PATHS`` with empty entries filled from the bundled split."""
        bundled = DemoCatalog.get(name)
        return {
            "assets": cfg.PATHS.ASSETS or bundled["assets"],
            "themes": cfg.PATHS.THEMES or bundled["themes"],
            "templates": cfg.PATHS.TEMPLATES or bundled["templates"],
            "targets": cfg.PATHS.TARGETS or bundled["targets"],
        }


class EndpointCatalog(object):
    FIXTURE_DIR = os.path.join(DemoCatalog.DATA_DIR, "mock")
    ENDPOINTS = {
        "llama-cpp-local": {
            "base_url": "http://localhost:8080/v1",
            "model_name": "local",
            "api_key_env": "",
        },
        "openai": {
            "base_url": "https://api.openai.com/v1",
            "model_name": "gpt-4o",
            "api_key_env": "OPENAI_API_KEY",
        },
        "mock-echo": {"provider": "mock", "fixture": "echo.json"},
        "mock-garbage": {"provider": "mock", "fixture": "garbage.json"},
        "mock-faults": {"provider": "mock", "fixture": "faults.json"},
        "mock-osd-tag": {"provider": "mock", "fixture": "osd_tag.json"},
    }

    @staticmethod
    def get(name):
        if name in EndpointCatalog.ENDPOINTS:
            attrs = dict(EndpointCatalog.ENDPOINTS[name], name=name)
            if attrs.get("fixture"):
                attrs["fixture"] = os.path.join(EndpointCatalog.FIXTURE_DIR, attrs["fixture"])
            return attrs
        raise RuntimeError("Endpoint not present in the catalog: {}".format(name))

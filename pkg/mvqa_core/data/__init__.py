from .asset_library import load_asset_library, verify_tag_library
from .templates import load_targets, load_templates
from .themes import load_theme, load_themes

__all__ = [
    "load_asset_library",
    "load_targets",
    "load_templates",
    "load_theme",
    "load_themes",
    "verify_tag_library",
]

import os

# tests/env_tests -> repository root
REPO_ROOT = os.path.dirname(os.path.dirname(os.path.dirname(os.path.realpath(__file__))))


def get_config_root_path():
    ''' Path to the bundled configs and demo data '''
    return os.path.join(REPO_ROOT, "configs")

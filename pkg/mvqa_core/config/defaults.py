from yacs.config import CfgNode as CN


# -----------------------------------------------------------------------------
# Config definition
# -----------------------------------------------------------------------------
# Every stage reads its parameters from this tree. A run merges a YAML file
# and trailing KEY VALUE overrides on top, freezes it, and writes the result
# to <output dir>/<command>.config.yaml so the run can be replayed exactly.

_C = CN()

# Global seed; every random stream is derived from it
_C.SEED = 42
# Worker threads for scene, view and question parallelism (output does not
# depend on this)
_C.JOBS = 1
_C.OUTPUT_DIR = "."

# -----------------------------------------------------------------------------
# Inputs; empty entries fall back to the bundled demo data (DemoCatalog)
# -----------------------------------------------------------------------------
_C.PATHS = CN()
# Bundled split the empty entries below are taken from
_C.PATHS.SPLIT = "demo"
_C.PATHS.ASSETS = ""
_C.PATHS.THEMES = ""
_C.PATHS.TEMPLATES = ""
_C.PATHS.TARGETS = ""

# -----------------------------------------------------------------------------
# Scene synthesis
# -----------------------------------------------------------------------------
_C.SCENE = CN()
# Scenes generated per theme
_C.SCENE.COUNT = 20
# Split tag; splits other than "eval" get prefixed scene ids and their own seed stream
_C.SCENE.SPLIT = "eval"
# Placement proposals per object before the theme is declared unsatisfiable
_C.SCENE.MAX_ATTEMPTS = 1000
# Footprint overlap area (m^2) below which two objects do not collide
_C.SCENE.OVERLAP_TOLERANCE = 1e-4

# -----------------------------------------------------------------------------
# Views and per-view metadata
# -----------------------------------------------------------------------------
_C.RENDER = CN()
# Views spec: compact "Class:count[:coverage[:fov]],..." or a JSON file
_C.RENDER.VIEWS = "Drone:1,BirdsEye:1,Egocentric:1,Surveillance:1"
# (width, height) in pixels
_C.RENDER.IMAGE_SIZE = (1024, 768)
# Occlusion rays per (object, view)
_C.RENDER.N_RAYS = 1024
_C.RENDER.WRITE_INSTANCE_MAPS = True
_C.RENDER.WRITE_DEPTH_MAPS = False
_C.RENDER.WRITE_RELATIONS = True

# -----------------------------------------------------------------------------
# Spatial relations
# -----------------------------------------------------------------------------
_C.RELATIONS = CN()
# Cosine components with |value| < EPSILON are treated as zero
_C.RELATIONS.EPSILON = 0.1
# Vertical gap (m) still counted as resting on
_C.RELATIONS.CONTACT_GAP = 0.01
# Footprint overlap, as a fraction of the smaller footprint, needed for On
_C.RELATIONS.CONTACT_OVERLAP_FRAC = 0.25
# Pixel and depth margins below which camera-centric pairs get no label
_C.RELATIONS.PIXEL_DEADZONE = 1.0
_C.RELATIONS.DEPTH_DEADZONE = 0.01
# "depth" or "image_rows"
_C.RELATIONS.CAMERA_FRONT_MODE = "depth"

# -----------------------------------------------------------------------------
# Question generation
# -----------------------------------------------------------------------------
_C.QA = CN()
# D = hops + LOG_SCALE * log2(number of key objects)
_C.QA.LOG_SCALE = 1.0
# An MCQ is rejected when its correct position is this many questions ahead
# of the least used position
_C.QA.POSITION_SLACK = 1
# Largest share of the counting target any single answer value may take
_C.QA.COUNT_MAX_SHARE = 0.4
# 0 omits supervision (evaluation splits), 1..4 selects the trace level
_C.QA.SUPERVISION_LEVEL = 0
# Passes over (scene, template) before giving up on the targets
_C.QA.ROUNDS = 40
# Tags a referring expression may combine
_C.QA.MAX_TAGS = 2
# Re-derive every accepted answer with the independent checker
_C.QA.VERIFY = True

# -----------------------------------------------------------------------------
# Evaluation
# -----------------------------------------------------------------------------
_C.EVAL = CN()
_C.EVAL.TRIALS = 10000
_C.EVAL.REASONING_BINS = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 10.0, 14.0]
_C.EVAL.VISIBILITY_BINS = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]

# -----------------------------------------------------------------------------
# Model endpoint
# -----------------------------------------------------------------------------
_C.ENDPOINT = CN()
_C.ENDPOINT.NAME = "default"
_C.ENDPOINT.BASE_URL = ""
_C.ENDPOINT.MODEL = ""
# Name of the environment variable holding the API key; the key itself is
# never part of the config
_C.ENDPOINT.API_KEY_ENV = "MVQA_API_KEY"
_C.ENDPOINT.TIMEOUT = 120.0
_C.ENDPOINT.MAX_RETRIES = 4
_C.ENDPOINT.MAX_CONCURRENCY = 4
_C.ENDPOINT.MAX_TOKENS = 1024
# "thinking" or "direct"
_C.ENDPOINT.MODE = "thinking"

# -----------------------------------------------------------------------------
# Misc options
# -----------------------------------------------------------------------------
_C.PATHS_CATALOG = "mvqa_core.config.paths_catalog"

import platform

import cv2
import numpy as np
import torch
import torchvision


def collect_env_info():
    rows = [
        ("Python", platform.python_version()),
        ("Platform", platform.platform()),
        ("numpy", np.__version__),
        ("torch", torch.__version__),
        ("torchvision", torchvision.__version__),
        ("opencv", cv2.__version__),
    ]
    return "\n".join("{:<12}: {}".format(k, v) for k, v in rows)

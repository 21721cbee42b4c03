#!/usr/bin/env python

from setuptools import find_packages
from setuptools import setup


requirements = [
    "torch",
    "torchvision",
    "yacs",
    "tqdm",
    "opencv-python",
    "numpy",
    "requests",
    "shapely",
]


setup(
    name="mvqa",
    version="0.1",
    description="multi-view spatial reasoning question generation and benchmarking",
    packages=find_packages(exclude=("configs", "tests",)),
    install_requires=requirements,
    entry_points={"console_scripts": ["mvqa=mvqa_core.cli:main"]},
    include_package_data=True,
)

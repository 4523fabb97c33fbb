"""
gsdkit - harmonize the ground sample distance of aerial tree segmentation
datasets, drive external enhancement models and score cross-domain IoU.
"""
import ast
import re
import sys

from setuptools import find_packages, setup


def get_install_requires():
    install_requires = [
        "numpy",
        "pandas>=1.1",
        "matplotlib",
        "seaborn",
        "Pillow",
    ]

    if sys.version_info.minor < 7:
        install_requires.append("dataclasses")
    return install_requires


def get_version_string():
    global version
    with open("gsdkit/__init__.py", "rb") as f:
        version_line = re.search(
            r"__version__\s+=\s+(.*)", f.read().decode("utf-8")
        ).group(1)
        return str(ast.literal_eval(version_line))


setup(
    name="gsdkit",
    version=get_version_string(),
    license="MIT",
    url="",
    description="GSD harmonization toolkit for aerial segmentation datasets",
    long_description=__doc__,
    keywords="remote-sensing aerial segmentation super-resolution gsd iou",
    include_package_data=True,
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=get_install_requires(),
    entry_points={
        "console_scripts": [
            "gsdkit = gsdkit.cli:main",
        ],
    },
    python_requires=">=3.7",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Operating System :: POSIX :: Linux",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.7",
        "Topic :: Scientific/Engineering :: Image Processing",
        "Topic :: Scientific/Engineering :: GIS",
        "Programming Language :: Python :: Implementation :: CPython",
        "License :: OSI Approved :: MIT License",
        "Natural Language :: English",
    ],

)

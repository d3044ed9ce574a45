#!/usr/bin/env python
"""
trustcheck is a model checker for beliefs and trust in autonomous stochastic multi-agent systems.
Agents carry goals and intentions, observe the system partially and reason about each other's
pro-attitudes; trustcheck decides formulas about belief, competence trust and disposition trust.

Install with pip:

    pip install .
"""

from pathlib import Path

from setuptools import find_packages, setup

this_directory = Path(__file__).parent
long_description = (this_directory / "README.md").read_text()

version = "0.1.0dev0"

setup(
    name="trustcheck",
    version=version,
    description="trustcheck, a probabilistic model checker for belief and trust in multi-agent systems",
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="MIT",
    python_requires=">=3.10",
    packages=find_packages(exclude=["tests", "tests.*"]),
    package_data={"": ["config/*.yaml", "config/*.json"]},
    # Read requirements.txt
    install_requires=[x.strip() for x in open("requirements.txt").readlines()],
    extras_require={"dev": ["ruff", "mypy", "editorconfig-checker"]},
    entry_points={
        "console_scripts": [
            "trustcheck=trustcheck.cli:app",
        ],
    },
    zip_safe=False,
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: POSIX :: Linux",
        "Programming Language :: Python",
        "Topic :: Scientific/Engineering",
        "Topic :: Software Development :: Quality Assurance",
    ],
)

"""Package setup configuration."""

from setuptools import find_packages, setup

setup(
    name="mgssp_toolkit",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*"]),
    py_modules=["main"],
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "python-dotenv>=1.0.0",
        "marshmallow>=3.20.0,<4.0.0",
    ],
    entry_points={
        "console_scripts": [
            "mgssp-bench=main:main",
        ],
    },
)

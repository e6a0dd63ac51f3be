import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

eigen = os.environ.get("EIGEN3_INCLUDE_DIR", "/usr/include/eigen3")

ext = Pybind11Extension(
    "cascade_risk._core",
    sorted(
        [
            "python/bindings.cpp",
            "src/graph.cpp",
            "src/stats.cpp",
            "src/risk.cpp",
            "src/simulator.cpp",
            "src/scenario.cpp",
        ]
    ),
    include_dirs=["include", "vendor", eigen],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})

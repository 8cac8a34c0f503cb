""" Point generation, file formats, benchmarking and rendering """

from .generators import GENERATORS, generate_points
from .runner import ALGORITHMS, DEFAULT_ALGORITHMS, BenchConfig, build_net, run_bench
from .render import render_svg

"""
tnsd: a workbench for total neighbour-sum-distinguishing colourings of sparse graphs
"""
__version__ = "1.0.0"

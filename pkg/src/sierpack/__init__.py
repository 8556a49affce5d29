"""Packing colorings of Sierpinski-type graphs.

Modules: graph_core (graphs, BFS, embeddings, file formats), sierpinski
(graph families), packing (verifier and exact solver), certify (tiling
certificates and bound sequences), search (stochastic block search),
cli (command line front end).
"""

__version__ = "0.1.0"

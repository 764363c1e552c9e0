'''Board geometry: graph construction, operators, topology, tracks.'''

from .graph import GeomGraph, GraphError
from .topology import Topology, build_topology
from .tracks import Track, build_tracks

__all__ = ['GeomGraph', 'GraphError', 'Topology', 'build_topology',
           'Track', 'build_tracks']

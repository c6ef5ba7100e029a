"""KRSS knowledge bases with a tableau reasoner, rules, geospatial checks and
a wind-energy ontology corpus."""
from .loader import Loaded, load_files, load_text
from .model.kb import KnowledgeBase
from .query.engine import QueryEngine
from .reasoner.tableau import Reasoner

__version__ = "0.1.0"

__all__ = ["KnowledgeBase", "Loaded", "QueryEngine", "Reasoner", "load_files", "load_text"]

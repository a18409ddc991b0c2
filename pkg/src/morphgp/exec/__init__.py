from .backend import NAME, available_engines, engine
from .compiler import Compiled, compile_expr

__all__ = ["engine", "NAME", "available_engines", "Compiled", "compile_expr"]

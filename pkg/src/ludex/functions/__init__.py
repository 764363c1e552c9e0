'''Rule functions compiled to plain callables over a Context.'''

from .base import (CompileCtx, CompileError, as_tag, compile_player,
                   role_predicate)
from .ints import compile_int
from .regions import compile_region
from .bools import compile_bool
from .arrays import compile_intarray

__all__ = ['CompileCtx', 'CompileError', 'as_tag', 'compile_player',
           'role_predicate', 'compile_int', 'compile_region', 'compile_bool',
           'compile_intarray']

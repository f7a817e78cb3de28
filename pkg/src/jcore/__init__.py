"""jcore: a class-based imperative core language and its analysis toolchain.

Parsing and desugaring, class tables with the derived static relations, a
type checker, a definitional interpreter with fuel-approximated method
meanings, an ownership-confinement decision procedure and dynamic monitor, a
static safety analysis, and an equivalence / simulation test harness over
pairs of owner-class implementations.
"""

from .ast import ClassDecl, MethodDecl
from .classtable import ClassTable, Designations, WellFormednessError, build_class_table
from .desugar import desugar, parse_and_desugar
from .parser import ParseError, parse
from .typecheck import TypeCheckError, check_command, check_table, type_of_expr
from .interp import Bottom, Location, Runtime, collect, fresh, run
from .confine import ConfinementViolation, Partition, confine_heap, confined_store, check_hext, run_with_monitor, to_dot
from .safety import SafetyReport, safe_command, safe_expr, safe_table
from .equivalence import EquivVerdict, canonical_bijection, check_comparable, client_equiv
from .coupling import BUILTIN_COUPLINGS, BasicCoupling, check_island_shape, induced_heap_coupling, test_simulation

__version__ = "0.1.0"

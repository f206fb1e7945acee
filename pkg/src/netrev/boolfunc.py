"""Canonical Boolean functions over named variables.

A function is stored as a truth table packed into a single int: with support
variables ``(v0, ..., v_{n-1})`` sorted lexicographically, bit ``i`` of the
table is the function value under the assignment whose j-th bit gives the
value of ``v_j``.  The support is always minimal (a variable the function
does not depend on is dropped), so two functions are semantically equal
exactly when their ``(support, table)`` pairs are equal.

Table manipulation is done with whole-int shift/mask operations so that even
20-variable cones (1M-entry tables) stay fast.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .errors import ExpressionError, SupportLimitError

# Functions wider than this are refused rather than degraded; analyses that
# need more must raise their own limit explicitly.
DEFAULT_VAR_LIMIT = 24

_mask_cache: dict[tuple[int, int], int] = {}


def _ones(nbits: int) -> int:
    return (1 << nbits) - 1


def _periodic_mask(offset: int, width: int, period: int, total: int) -> int:
    """Int with ones on [offset+k*period, offset+k*period+width) below total."""
    key = (offset, width, period, total)
    cached = _mask_cache.get(key)
    if cached is not None:
        return cached
    block = _ones(width) << offset
    size = period
    while size < total:
        block |= block << size
        size <<= 1
    block &= _ones(total)
    _mask_cache[key] = block
    return block


def _var_pattern(pos: int, nvars: int) -> int:
    """Truth table of the bare variable at bit position ``pos``."""
    return _periodic_mask(1 << pos, 1 << pos, 1 << (pos + 1), 1 << nvars)


def _spread_blocks(table: int, nbits: int, size: int) -> int:
    """Move block j (of ``size`` bits) from offset j*size to 2*j*size."""
    levels = []
    c = size
    while c < nbits:
        levels.append(c)
        c <<= 1
    total = 2 * nbits
    for c in reversed(levels):
        keep = _periodic_mask(0, c, 4 * c, total)
        move = _periodic_mask(2 * c, c, 4 * c, total)
        table = (table & keep) | ((table << c) & move)
    return table


def _compress_blocks(table: int, nbits_out: int, size: int) -> int:
    """Inverse of :func:`_spread_blocks`: gather blocks at 2*j*size offsets."""
    total = 2 * nbits_out
    c = size
    while c < nbits_out:
        keep = _periodic_mask(0, c, 4 * c, total)
        move = _periodic_mask(2 * c, c, 4 * c, total)
        table = (table & keep) | ((table & move) >> c)
        c <<= 1
    return table & _ones(nbits_out)


def _insert_var(table: int, nvars: int, pos: int) -> int:
    """Expand an ``nvars`` table with a fresh (ignored) variable at ``pos``."""
    nbits = 1 << nvars
    if pos == nvars:
        return table | (table << nbits)
    block = 1 << pos
    spread = _spread_blocks(table, nbits, block)
    return spread | (spread << block)


def _restrict_var(table: int, nvars: int, pos: int, value: int) -> int:
    """Cofactor table: keep entries whose bit ``pos`` equals ``value``."""
    block = 1 << pos
    if value:
        table >>= block
    if pos == nvars - 1:
        return table & _ones(1 << (nvars - 1))
    return _compress_blocks(table, 1 << (nvars - 1), block)


class BooleanFunction:
    """Immutable canonical Boolean function over named variables."""

    __slots__ = ("support", "table")

    def __init__(self, support: tuple[str, ...], table: int, *, _trusted: bool = False):
        if not _trusted:
            support = tuple(support)
            if list(support) != sorted(set(support)):
                raise ValueError("support must be sorted and unique; use from_truth_table")
            support, table = _reduce(support, table)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "table", table)

    def __setattr__(self, name, value):
        raise AttributeError("BooleanFunction is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def constant(value: int) -> "BooleanFunction":
        return _TRUE if value else _FALSE

    @staticmethod
    def variable(name: str) -> "BooleanFunction":
        return BooleanFunction((name,), 0b10, _trusted=True)

    @staticmethod
    def from_truth_table(var_order: Sequence[str], bits: Sequence[int]) -> "BooleanFunction":
        """Build from an explicit table; index i follows var_order[0] = LSB."""
        n = len(var_order)
        if len(set(var_order)) != n:
            raise ValueError("duplicate variable in var_order")
        if len(bits) != 1 << n:
            raise ValueError(f"table needs {1 << n} entries, got {len(bits)}")
        table = 0
        for i, bit in enumerate(bits):
            if bit:
                table |= 1 << i
        return _from_ordered(tuple(var_order), table)

    # -- queries -----------------------------------------------------------

    def is_constant(self) -> bool:
        return not self.support

    def evaluate(self, assignment: Mapping[str, int]) -> int:
        """Value under a total assignment over the support (extras ignored)."""
        index = 0
        for pos, var in enumerate(self.support):
            try:
                value = assignment[var]
            except KeyError:
                raise ValueError(f"assignment is missing variable {var!r}") from None
            if value:
                index |= 1 << pos
        return (self.table >> index) & 1

    def truth_table(self, var_order: Sequence[str] | None = None) -> list[int]:
        """Table as a bit list over ``var_order`` (default: the support)."""
        if var_order is None:
            var_order = self.support
        order = tuple(var_order)
        missing = set(self.support) - set(order)
        if missing:
            raise ValueError(f"var_order is missing support variables {sorted(missing)}")
        if len(set(order)) != len(order):
            raise ValueError("duplicate variable in var_order")
        n = len(order)
        if order == self.support:
            table = self.table
        else:
            table = 0
            for i in range(1 << n):
                if self.evaluate({v: (i >> j) & 1 for j, v in enumerate(order)}):
                    table |= 1 << i
        return [(table >> i) & 1 for i in range(1 << n)]

    def cofactor(self, var: str, value: int) -> "BooleanFunction":
        if var not in self.support:
            return self
        pos = self.support.index(var)
        table = _restrict_var(self.table, len(self.support), pos, 1 if value else 0)
        rest = self.support[:pos] + self.support[pos + 1:]
        return BooleanFunction(rest, table)

    def substitute(self, var: str, replacement: "BooleanFunction") -> "BooleanFunction":
        """Compose: replace ``var`` by ``replacement`` (single-var safe)."""
        if var not in self.support:
            return self
        return ite(replacement, self.cofactor(var, 1), self.cofactor(var, 0))

    def compose(self, mapping: Mapping[str, "BooleanFunction"]) -> "BooleanFunction":
        """Simultaneous substitution of several variables, capture-safe."""
        placeholders: list[tuple[str, BooleanFunction]] = []
        result = self
        for i, var in enumerate(self.support):
            if var in mapping:
                ph = f"\x00{i}"  # NUL prefix cannot collide with real signal names
                placeholders.append((ph, mapping[var]))
                result = result.substitute(var, BooleanFunction.variable(ph))
        for ph, fn in placeholders:
            result = result.substitute(ph, fn)
        return result

    def rename(self, mapping: Mapping[str, str]) -> "BooleanFunction":
        """Rename support variables; target names must not collide."""
        new_order = tuple(mapping.get(v, v) for v in self.support)
        if len(set(new_order)) != len(new_order):
            raise ValueError("variable renaming collides")
        return _from_ordered(new_order, self.table)

    def to_expr(self) -> str:
        """Render as a sum-of-products expression (canonical minterm order)."""
        if not self.support:
            return "1" if self.table & 1 else "0"
        terms = []
        for i in range(1 << len(self.support)):
            if (self.table >> i) & 1:
                lits = []
                for pos, var in enumerate(self.support):
                    lits.append(var if (i >> pos) & 1 else f"!{var}")
                terms.append(" & ".join(lits) if len(lits) == 1 else "(" + " & ".join(lits) + ")")
        return " | ".join(terms) if terms else "0"

    # -- operators ---------------------------------------------------------

    def __invert__(self) -> "BooleanFunction":
        nbits = 1 << len(self.support)
        return BooleanFunction(self.support, self.table ^ _ones(nbits), _trusted=True)

    def __and__(self, other: "BooleanFunction") -> "BooleanFunction":
        return _binary(self, other, lambda a, b: a & b)

    def __or__(self, other: "BooleanFunction") -> "BooleanFunction":
        return _binary(self, other, lambda a, b: a | b)

    def __xor__(self, other: "BooleanFunction") -> "BooleanFunction":
        return _binary(self, other, lambda a, b: a ^ b)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.support == other.support and self.table == other.table

    def __hash__(self) -> int:
        return hash((self.support, self.table))

    def __repr__(self) -> str:
        return f"BooleanFunction({self.to_expr()!r})"


_FALSE = BooleanFunction((), 0, _trusted=True)
_TRUE = BooleanFunction((), 1, _trusted=True)


def _reduce(support: tuple[str, ...], table: int) -> tuple[tuple[str, ...], int]:
    """Drop fictitious variables; assumes support already sorted."""
    n = len(support)
    keep = []
    for pos in range(n):
        block = 1 << pos
        pattern = _var_pattern(pos, n)
        full = _ones(1 << n)
        if ((table >> block) ^ table) & ~pattern & full:
            keep.append(pos)
    if len(keep) == n:
        return support, table & _ones(1 << n)
    for pos in range(n - 1, -1, -1):
        if pos not in keep:
            table = _restrict_var(table, n, pos, 0)
            n -= 1
    return tuple(support[p] for p in keep), table


def _from_ordered(order: tuple[str, ...], table: int) -> BooleanFunction:
    """Canonicalize a table whose variables are in arbitrary order."""
    if order == tuple(sorted(order)):
        return BooleanFunction(order, table)
    # Sort by repeatedly swapping adjacent variables (tables stay exact).
    order_list = list(order)
    n = len(order_list)
    for i in range(n):
        for j in range(n - 1 - i):
            if order_list[j] > order_list[j + 1]:
                table = _swap_adjacent(table, n, j)
                order_list[j], order_list[j + 1] = order_list[j + 1], order_list[j]
    return BooleanFunction(tuple(order_list), table)


def _swap_adjacent(table: int, nvars: int, pos: int) -> int:
    """Exchange the variables at bit positions pos and pos+1."""
    total = 1 << nvars
    block = 1 << pos
    stay = _periodic_mask(0, block, 4 * block, total) | _periodic_mask(3 * block, block, 4 * block, total)
    up = _periodic_mask(block, block, 4 * block, total)
    down = _periodic_mask(2 * block, block, 4 * block, total)
    return (table & stay) | ((table & up) << block) | ((table & down) >> block)


def _binary(f: BooleanFunction, g: BooleanFunction, op) -> BooleanFunction:
    if f.support == g.support:
        merged = f.support
        ft, gt = f.table, g.table
    else:
        merged = tuple(sorted(set(f.support) | set(g.support)))
        if len(merged) > DEFAULT_VAR_LIMIT:
            raise SupportLimitError(
                f"operation would produce a function of {len(merged)} variables "
                f"(limit {DEFAULT_VAR_LIMIT})"
            )
        ft = _expand(f, merged)
        gt = _expand(g, merged)
    table = op(ft, gt) & _ones(1 << len(merged))
    return BooleanFunction(merged, table)


def _expand(f: BooleanFunction, merged: tuple[str, ...]) -> int:
    table = f.table
    have = set(f.support)
    n = len(f.support)
    for pos, var in enumerate(merged):
        if var not in have:
            table = _insert_var(table, n, pos)
            n += 1
    return table


def ite(cond: BooleanFunction, then: BooleanFunction, other: BooleanFunction) -> BooleanFunction:
    return (cond & then) | (~cond & other)


def packed_table(fn: BooleanFunction, var_order: Sequence[str]) -> int:
    """Truth table of ``fn`` as a packed int over an explicit variable order.

    Bit i of the result is the value under the assignment where bit j of i
    gives ``var_order[j]``.  Every support variable must appear in the order.
    """
    order = tuple(var_order)
    missing = set(fn.support) - set(order)
    if missing:
        raise ValueError(f"var_order is missing support variables {sorted(missing)}")
    # Placeholder names sort in positional order, so the canonical table of
    # the renamed function is already the requested layout.
    mapping = {v: f"\x01{i:05d}" for i, v in enumerate(order)}
    renamed = fn.rename({v: mapping[v] for v in fn.support})
    return _expand(renamed, tuple(mapping[v] for v in order))


# -- expression parsing ----------------------------------------------------
#
# Grammar (loosest binding first):   or   ::= xor  { "|" xor }
#                                    xor  ::= and  { "^" and }
#                                    and  ::= unary { "&" unary }
#                                    unary::= "!" unary | atom
#                                    atom ::= "0" | "1" | ident | "(" or ")"

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789")


class _ExprParser:
    def __init__(self, text: str, allowed_vars: Iterable[str] | None):
        self.text = text
        self.pos = 0
        self.allowed = None if allowed_vars is None else set(allowed_vars)

    def parse(self) -> BooleanFunction:
        result = self._or()
        self._skip_ws()
        if self.pos != len(self.text):
            raise ExpressionError(f"unexpected {self.text[self.pos]!r}", self.pos)
        return result

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _or(self) -> BooleanFunction:
        result = self._xor()
        while self._peek() == "|":
            self.pos += 1
            result = result | self._xor()
        return result

    def _xor(self) -> BooleanFunction:
        result = self._and()
        while self._peek() == "^":
            self.pos += 1
            result = result ^ self._and()
        return result

    def _and(self) -> BooleanFunction:
        result = self._unary()
        while self._peek() == "&":
            self.pos += 1
            result = result & self._unary()
        return result

    def _unary(self) -> BooleanFunction:
        if self._peek() == "!":
            self.pos += 1
            return ~self._unary()
        return self._atom()

    def _atom(self) -> BooleanFunction:
        ch = self._peek()
        if ch == "(":
            self.pos += 1
            inner = self._or()
            if self._peek() != ")":
                raise ExpressionError("expected ')'", self.pos)
            self.pos += 1
            return inner
        if ch in ("0", "1"):
            self.pos += 1
            return BooleanFunction.constant(int(ch))
        if ch in _IDENT_START:
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos] in _IDENT_CONT:
                self.pos += 1
            name = self.text[start:self.pos]
            if self.allowed is not None and name not in self.allowed:
                raise ExpressionError(f"unknown variable {name!r}", start)
            return BooleanFunction.variable(name)
        if ch == "":
            raise ExpressionError("unexpected end of expression", self.pos)
        raise ExpressionError(f"unexpected {ch!r}", self.pos)


def parse_expression(expr: str, allowed_vars: Iterable[str] | None = None) -> BooleanFunction:
    """Parse ``! & ^ |`` expressions over constants 0/1 and named variables.

    ``allowed_vars`` restricts the variable namespace; ``None`` accepts any
    identifier.
    """
    return _ExprParser(expr, allowed_vars).parse()

"""Propositional foundation: variables, literals, labeled clauses, and an
assumption-based satisfiability procedure.

A ``Formula`` owns its variables and clauses and can be solved repeatedly
under different assumption sets without rebuilding.  ``solve`` returns either
``Sat`` with a total model or ``Unsat`` with a core: a subset of the given
assumptions that already suffices for unsatisfiability.  Clauses may carry a
selector variable (stored internally as the implication ``~selector OR
literals``) together with an English label and a category tag, which is what
lets callers switch constraints on and off per solve and read conflicts back
as named constraints.

The decision procedure is conflict-driven clause learning with two-watched
literal propagation, activity-based decisions (ties broken by lowest
variable id), phase saving, and assumptions handled as a decision prefix.
Everything is deterministic: no randomness, no restarts.
"""

from __future__ import annotations

from dataclasses import dataclass
from heapq import heapify, heappop, heappush
from typing import Iterable, Iterator, Optional, Sequence, TextIO, Union

VarId = int


class ClauseError(ValueError):
    """Base class for clause construction errors."""


class EmptyClauseError(ClauseError):
    """Raised when an empty clause is added; represent falsum differently."""


class TautologyError(ClauseError):
    """Raised when a clause contains a variable in both polarities."""


@dataclass(frozen=True)
class Literal:
    """A variable with a polarity. Negation is an involution."""

    var: VarId
    positive: bool = True

    def __invert__(self) -> "Literal":
        return Literal(self.var, not self.positive)

    def __repr__(self) -> str:
        return f"{'' if self.positive else '~'}x{self.var}"


def lit(var: VarId, positive: bool = True) -> Literal:
    return Literal(var, positive)


@dataclass
class Clause:
    """Handle for a stored clause.

    ``literals`` is the original clause content; if ``selector`` is set the
    stored form is ``~selector OR literals`` so that assuming the selector
    activates the clause.
    """

    literals: tuple[Literal, ...]
    label: Optional[str] = None
    category: Optional[str] = None
    selector: Optional[VarId] = None
    index: int = -1


class Model:
    """Total assignment over all allocated variables at solve time."""

    __slots__ = ("_values",)

    def __init__(self, values: list[int]):
        self._values = values

    def __getitem__(self, var: VarId) -> bool:
        v = self._values[var]
        if v == 0:
            raise KeyError(f"variable {var} is unassigned in model")
        return v > 0

    def value(self, literal: Literal) -> bool:
        truth = self[literal.var]
        return truth if literal.positive else not truth

    def true_vars(self) -> Iterator[VarId]:
        vals = self._values
        return (v for v in range(1, len(vals)) if vals[v] > 0)

    def num_vars(self) -> int:
        return len(self._values) - 1


@dataclass(frozen=True)
class Sat:
    model: Model


@dataclass(frozen=True)
class Unsat:
    core: tuple[Literal, ...]


SolveResult = Union[Sat, Unsat]

# Internal literal encoding: positive x -> 2x, negative x -> 2x+1.
_UNDEF = 0


def _enc(literal: Literal) -> int:
    return literal.var << 1 | (0 if literal.positive else 1)


def _dec(enc: int) -> Literal:
    return Literal(enc >> 1, not (enc & 1))


class _IClause(list):
    """Internal clause: a list of encoded literals plus bookkeeping flags."""

    __slots__ = ("learnt", "removed")

    def __init__(self, lits: Iterable[int], learnt: bool = False):
        super().__init__(lits)
        self.learnt = learnt
        self.removed = False


class Formula:
    """A CNF formula with an incremental, assumption-aware solver attached."""

    def __init__(self) -> None:
        self.clauses: list[Clause] = []
        self._num_vars = 0
        # Indexed by var (1-based); index 0 unused.
        self._assign: list[int] = [0]  # 0 unassigned, 1 true, -1 false
        self._level: list[int] = [0]
        self._reason: list[Optional[_IClause]] = [None]
        self._phase: list[bool] = [False]
        self._activity: list[float] = [0.0]
        self._seen: bytearray = bytearray(1)
        self._assumed: bytearray = bytearray(1)
        # Indexed by encoded literal.
        self._watches: list[list[_IClause]] = [[], []]
        self._trail: list[int] = []
        self._trail_lim: list[int] = []
        self._qhead = 0
        self._stored: list[_IClause] = []
        self._learnts: list[_IClause] = []
        self._var_inc = 1.0
        self._heap: list[tuple[float, int]] = []
        self._cursor = 1
        self._unsat0 = False
        self._reduce_ceiling = 6000
        self.stats = {"decisions": 0, "conflicts": 0, "propagations": 0, "solves": 0}

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @property
    def num_vars(self) -> int:
        return self._num_vars

    def new_var(self, phase_hint: bool = False) -> VarId:
        """Allocate a fresh variable; ids are dense starting at 1."""
        self._num_vars += 1
        self._assign.append(0)
        self._level.append(0)
        self._reason.append(None)
        self._phase.append(phase_hint)
        self._activity.append(0.0)
        self._seen.append(0)
        self._assumed.append(0)
        self._watches.append([])
        self._watches.append([])
        return self._num_vars

    def add_clause(
        self,
        literals: Sequence[Literal],
        label: Optional[str] = None,
        category: Optional[str] = None,
        selector: Optional[VarId] = None,
    ) -> Clause:
        """Store a clause after de-duplication; reject empty and tautological ones."""
        if not literals:
            raise EmptyClauseError("empty clause")
        dedup: dict[int, Literal] = {}
        by_var: dict[VarId, bool] = {}
        for l in literals:
            if not 1 <= l.var <= self._num_vars:
                raise ClauseError(f"unallocated variable {l.var}")
            if l.var in by_var and by_var[l.var] != l.positive:
                raise TautologyError(f"variable {l.var} occurs in both polarities")
            by_var[l.var] = l.positive
            dedup.setdefault(_enc(l), l)
        lits = tuple(dedup.values())
        if selector is not None:
            if not 1 <= selector <= self._num_vars:
                raise ClauseError(f"unallocated selector {selector}")
            if selector in by_var:
                raise ClauseError("selector must not occur in its own clause")
        handle = Clause(lits, label=label, category=category, selector=selector,
                        index=len(self.clauses))
        self.clauses.append(handle)
        stored = [_enc(Literal(selector, False))] if selector is not None else []
        stored.extend(_enc(l) for l in lits)
        self._attach(_IClause(stored))
        return handle

    def _attach(self, c: _IClause) -> None:
        """Attach a clause, honoring any existing top-level assignments."""
        assign = self._assign
        # Partition: non-false literals first so watches start valid.
        free: list[int] = []
        false: list[int] = []
        for l in c:
            va = assign[l >> 1]
            if va == 0 or (va > 0) == (not l & 1):
                free.append(l)
            else:
                false.append(l)
        c[:] = free + false
        if c.learnt:
            self._learnts.append(c)
        else:
            self._stored.append(c)
        if not free:
            self._unsat0 = True
            return
        if len(free) == 1:
            # Unit under the current top level: enqueue for the next propagate.
            l0 = c[0]
            if assign[l0 >> 1] == 0:
                self._assign_lit(l0, c)
            if len(c) >= 2:
                self._watches[c[0]].append(c)
                self._watches[c[1]].append(c)
            return
        self._watches[c[0]].append(c)
        self._watches[c[1]].append(c)

    # ------------------------------------------------------------------
    # Solving
    # ------------------------------------------------------------------

    def solve(self, assumptions: Sequence[Literal] = ()) -> SolveResult:
        """Decide satisfiability under the given assumption literals.

        Returns ``Sat`` with a total model, or ``Unsat`` with a core drawn
        from ``assumptions``. Complete and deterministic.
        """
        self.stats["solves"] += 1
        if self._unsat0:
            return Unsat(())
        assumps = [_enc(a) for a in assumptions]
        for a in assumps:
            self._assumed[a >> 1] = 1
        try:
            return self._search(assumps)
        finally:
            self._cancel_until(0)
            for a in assumps:
                self._assumed[a >> 1] = 0

    def _search(self, assumps: list[int]) -> SolveResult:
        n_assumps = len(assumps)
        assign = self._assign
        conflicts_before_reduce = self._reduce_ceiling
        while True:
            confl = self._propagate()
            if confl is not None:
                self.stats["conflicts"] += 1
                if not self._trail_lim:
                    self._unsat0 = True
                    return Unsat(())
                if len(self._trail_lim) <= n_assumps:
                    return Unsat(self._final_core_from_clause(confl))
                learnt, bj = self._analyze(confl)
                self._cancel_until(bj)
                ic = _IClause(learnt, learnt=True)
                self._attach_learnt(ic)
                conflicts_before_reduce -= 1
                if conflicts_before_reduce <= 0:
                    self._reduce_learnts()
                    self._reduce_ceiling = int(self._reduce_ceiling * 1.3)
                    conflicts_before_reduce = self._reduce_ceiling
                continue
            # Re-establish the assumption prefix (one decision level each).
            dl = len(self._trail_lim)
            if dl < n_assumps:
                conflict_lit = None
                while dl < n_assumps:
                    a = assumps[dl]
                    v = a >> 1
                    val = assign[v]
                    self._trail_lim.append(len(self._trail))
                    dl += 1
                    if val == 0:
                        self._assign_lit(a, None)
                    elif (val > 0) != (not a & 1):
                        conflict_lit = a
                        break
                if conflict_lit is not None:
                    return Unsat(self._final_core_from_lit(conflict_lit))
                continue
            v = self._decide_var()
            if v == 0:
                model = Model(list(assign))
                return Sat(model)
            self.stats["decisions"] += 1
            self._trail_lim.append(len(self._trail))
            self._assign_lit(v << 1 | (0 if self._phase[v] else 1), None)

    def _assign_lit(self, enc: int, reason: Optional[_IClause]) -> None:
        v = enc >> 1
        self._assign[v] = -1 if enc & 1 else 1
        self._level[v] = len(self._trail_lim)
        self._reason[v] = reason
        self._trail.append(enc)

    def _propagate(self) -> Optional[_IClause]:
        trail = self._trail
        assign = self._assign
        watches = self._watches
        props = 0
        confl: Optional[_IClause] = None
        while self._qhead < len(trail):
            p = trail[self._qhead]
            self._qhead += 1
            props += 1
            falsed = p ^ 1
            ws = watches[falsed]
            i = j = 0
            nws = len(ws)
            while i < nws:
                c = ws[i]
                i += 1
                if c.removed:
                    continue
                if c[0] == falsed:
                    c[0] = c[1]
                    c[1] = falsed
                first = c[0]
                v0 = assign[first >> 1]
                if v0 != 0 and (v0 > 0) == (not first & 1):
                    ws[j] = c
                    j += 1
                    continue
                found = False
                for k in range(2, len(c)):
                    lk = c[k]
                    vk = assign[lk >> 1]
                    if vk == 0 or (vk > 0) == (not lk & 1):
                        c[1] = lk
                        c[k] = falsed
                        watches[lk].append(c)
                        found = True
                        break
                if found:
                    continue
                ws[j] = c
                j += 1
                if v0 == 0:
                    self._assign_lit(first, c)
                else:
                    while i < nws:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    confl = c
                    break
            del ws[j:]
            if confl is not None:
                break
        self.stats["propagations"] += props
        return confl

    def _analyze(self, confl: _IClause) -> tuple[list[int], int]:
        """First-UIP conflict analysis; returns (learnt clause, backjump level)."""
        seen = self._seen
        level = self._level
        reason = self._reason
        trail = self._trail
        cur_level = len(self._trail_lim)
        learnt: list[int] = []
        to_clear: list[int] = []
        counter = 0
        p = -1
        idx = len(trail)
        c: Optional[_IClause] = confl
        while True:
            assert c is not None
            for k in range(1 if p != -1 else 0, len(c)):
                q = c[k]
                v = q >> 1
                lv = level[v]
                if not seen[v] and lv > 0:
                    seen[v] = 1
                    to_clear.append(v)
                    self._bump(v)
                    if lv >= cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while True:
                idx -= 1
                p = trail[idx]
                if seen[p >> 1]:
                    break
            counter -= 1
            if counter == 0:
                break
            c = reason[p >> 1]
        learnt.insert(0, p ^ 1)
        for v in to_clear:
            seen[v] = 0
        if len(learnt) == 1:
            bj = 0
        else:
            # Move a max-level literal into the second watch position.
            mi = max(range(1, len(learnt)), key=lambda k: level[learnt[k] >> 1])
            learnt[1], learnt[mi] = learnt[mi], learnt[1]
            bj = level[learnt[1] >> 1]
        self._var_inc /= 0.95
        if self._var_inc > 1e100:
            scale = 1e-100
            self._activity = [a * scale for a in self._activity]
            self._var_inc *= scale
            self._heap = [(-self._activity[v], v) for _, v in self._heap
                          if self._assign[v] == 0]
            heapify(self._heap)
        return learnt, bj

    def _attach_learnt(self, c: _IClause) -> None:
        self._learnts.append(c)
        if len(c) >= 2:
            self._watches[c[0]].append(c)
            self._watches[c[1]].append(c)
        self._assign_lit(c[0], c)

    def _bump(self, v: int) -> None:
        act = self._activity[v] + self._var_inc
        self._activity[v] = act
        if self._assign[v] == 0:
            heappush(self._heap, (-act, v))

    def _decide_var(self) -> int:
        heap = self._heap
        assign = self._assign
        activity = self._activity
        if len(heap) > 2 * self._num_vars + 10000:
            heap = self._heap = [(-activity[v], v) for v in range(1, self._num_vars + 1)
                                 if assign[v] == 0 and activity[v] > 0.0]
            heapify(heap)
        while heap:
            negact, v = heap[0]
            if assign[v] == 0 and -negact == activity[v]:
                heappop(heap)
                return v
            heappop(heap)
        cursor = self._cursor
        n = self._num_vars
        while cursor <= n and assign[cursor] != 0:
            cursor += 1
        self._cursor = cursor
        return cursor if cursor <= n else 0

    def _cancel_until(self, level: int) -> None:
        if len(self._trail_lim) <= level:
            return
        assign = self._assign
        phase = self._phase
        assumed = self._assumed
        activity = self._activity
        bound = self._trail_lim[level]
        for k in range(len(self._trail) - 1, bound - 1, -1):
            enc = self._trail[k]
            v = enc >> 1
            if not assumed[v]:
                phase[v] = not enc & 1
            assign[v] = 0
            self._reason[v] = None
            if activity[v] > 0.0:
                heappush(self._heap, (-activity[v], v))
            elif v < self._cursor:
                self._cursor = v
        del self._trail[bound:]
        del self._trail_lim[level:]
        self._qhead = min(self._qhead, len(self._trail))

    def _final_core_from_clause(self, confl: _IClause) -> tuple[Literal, ...]:
        return self._final_core(list(confl))

    def _final_core_from_lit(self, failed: int) -> tuple[Literal, ...]:
        # ``failed`` is an assumption found false; its negation holds, so the
        # walk starts from the false occurrence and the failed literal itself
        # joins the core.
        return self._final_core([failed], extra=failed)

    def _final_core(self, start: list[int], extra: Optional[int] = None) -> tuple[Literal, ...]:
        """Collect the assumptions reachable through reasons of a conflict."""
        seen = self._seen
        level = self._level
        reason = self._reason
        core: list[int] = [] if extra is None else [extra]
        stack = list(start)
        touched: list[int] = []
        while stack:
            q = stack.pop()
            v = q >> 1
            if seen[v] or level[v] == 0:
                continue
            seen[v] = 1
            touched.append(v)
            r = reason[v]
            if r is None:
                core.append(q ^ 1)  # decision here means assumption
            else:
                stack.extend(l for l in r if (l >> 1) != v)
        for v in touched:
            seen[v] = 0
        return tuple(_dec(e) for e in dict.fromkeys(core))

    def _reduce_learnts(self) -> None:
        """Drop the older half of long learnt clauses; keep short and locked ones."""
        reason = self._reason
        learnts = self._learnts
        candidates = [c for c in learnts
                      if len(c) > 3 and reason[c[0] >> 1] is not c]
        drop = set(map(id, candidates[: len(candidates) // 2]))
        if not drop:
            return
        kept: list[_IClause] = []
        for c in learnts:
            if id(c) in drop:
                c.removed = True
            else:
                kept.append(c)
        self._learnts = kept
        for ws in self._watches:
            ws[:] = [c for c in ws if not c.removed]

    # ------------------------------------------------------------------
    # Export
    # ------------------------------------------------------------------

    def export_dimacs(self, out: TextIO) -> None:
        """Write the stored clauses in DIMACS CNF, labels as comment lines."""
        stored = [c for c in self._stored if not c.removed]
        out.write(f"p cnf {self._num_vars} {len(stored)}\n")
        for handle in self.clauses:
            if handle.selector is not None and handle.label is not None:
                cat = handle.category or "-"
                out.write(f"c label {handle.selector} {cat} {handle.label}\n")
        for c in stored:
            ints = ((l >> 1) if not l & 1 else -(l >> 1) for l in c)
            out.write(" ".join(map(str, ints)) + " 0\n")

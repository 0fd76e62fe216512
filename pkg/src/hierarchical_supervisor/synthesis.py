"""Controllability, observability and normality; supremal sublanguage synthesis.

All `sup_*` results are trimmed and minimized. An empty supremum is returned
as the empty automaton (one unmarked state), never as an error.
"""

from __future__ import annotations

import logging
from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass

from hierarchical_supervisor.automaton import Automaton, Word
from hierarchical_supervisor.errors import AlphabetMismatch, FixpointDivergence, NotPrefixClosed, NotSublanguage
from hierarchical_supervisor.language import (
    accessible,
    build_reachable,
    closed,
    combine,
    concat_sigma_star,
    determinize,
    empty_automaton,
    equivalent,
    included,
    minimize,
    prefix_closure,
    trim,
)
from hierarchical_supervisor.projection import ProjectionContext, inverse_project, parallel, project
from hierarchical_supervisor.verdict import CheckResult

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpecPlantPair:
    """Specification K and plant G over a shared projection context."""

    spec: Automaton
    plant: Automaton
    ctx: ProjectionContext

    def __post_init__(self) -> None:
        if not self.spec.alphabet.event_set <= self.plant.alphabet.event_set:
            raise AlphabetMismatch(
                self.spec.alphabet.events, self.plant.alphabet.events, reason="spec events must be plant events"
            )

    def lifted(self) -> Automaton:
        """K ∥ G trimmed: the specification as a sublanguage of L_m(G)."""
        return trim(parallel([self.spec, self.plant]))


def _require_same_alphabet(k: Automaton, g: Automaton) -> None:
    if k.alphabet.event_set != g.alphabet.event_set:
        raise AlphabetMismatch(k.alphabet.events, g.alphabet.events, reason="lift the specification first")


def _require_sublanguage(k: Automaton, g: Automaton, *, operand: str = "specification") -> None:
    result = included(k, g)
    if not result:
        raise NotSublanguage(result.counterexample[0], operand=operand)


def _require_prefix_closed(a: Automaton, *, operand: str) -> None:
    result = included(prefix_closure(a), a)
    if not result:
        raise NotPrefixClosed(result.counterexample[0], operand=operand)


def _finish(a: Automaton) -> Automaton:
    t = trim(a)
    if not t.marked:
        return empty_automaton(a.alphabet)
    return minimize(t)


def _iteration_guard(k: Automaton, g: Automaton) -> int:
    return 4 * (k.num_states + 1) * (g.num_states + 1)


# --- checks -----------------------------------------------------------------


def check_controllability(k: Automaton, g: Automaton, sigma_uc: Iterable[str]) -> CheckResult:
    """Decide closure(K)Σ_uc ∩ L(G) ⊆ closure(K).

    A failure carries the shortest s ∈ closure(K) and the uncontrollable event u
    with su ∈ L(G) \\ closure(K).
    """
    _require_same_alphabet(k, g)
    uncontrollable = sorted(set(sigma_uc))
    kbar = prefix_closure(k)
    if not kbar.marked:
        return CheckResult.ok()
    dk = determinize(kbar, complete=False)
    dg = determinize(g, complete=False)
    events = sorted(k.alphabet.events)
    start = (dk.initial, dg.initial)
    seen = {start}
    queue: deque[tuple[tuple[str, str], Word]] = deque([(start, ())])
    while queue:
        (x, y), word = queue.popleft()
        for u in uncontrollable:
            if dg.step(y, u) is not None and dk.step(x, u) is None:
                return CheckResult.failed(word, event=u)
        for event in events:
            x2, y2 = dk.step(x, event), dg.step(y, event)
            if x2 is None or y2 is None or (x2, y2) in seen:
                continue
            seen.add((x2, y2))
            queue.append(((x2, y2), word + (event,)))
    return CheckResult.ok()


def check_observability(k: Automaton, g: Automaton, ctx: ProjectionContext) -> CheckResult:
    """Decide observability of K with respect to L(G), P and Σ_c.

    Searches pairs s, s' ∈ closure(K) ∩ L(G) with P(s) = P(s') for a
    controllable e with se ∈ closure(K), s'e ∈ L(G) and s'e ∉ closure(K).
    A failure carries `(s, s')` and `e`.
    """
    _require_same_alphabet(k, g)
    kbar = prefix_closure(k)
    if not kbar.marked:
        return CheckResult.ok()
    dk = determinize(kbar, complete=False)
    dg = determinize(g, complete=False)
    controllable = sorted(ctx.sigma_c)
    events = sorted(k.alphabet.events)

    def joint(x: str, y: str, event: str) -> tuple[str, str] | None:
        x2, y2 = dk.step(x, event), dg.step(y, event)
        return None if x2 is None or y2 is None else (x2, y2)

    start = (dk.initial, dg.initial, dk.initial, dg.initial)
    parent: dict[tuple[str, str, str, str], tuple[tuple[str, str, str, str], str, str] | None] = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        x, y, x2, y2 = node
        for e in controllable:
            if dk.step(x, e) is not None and dg.step(y2, e) is not None and dk.step(x2, e) is None:
                left: list[str] = []
                right: list[str] = []
                link = parent[node]
                cursor = node
                while link is not None:
                    cursor, side, event = link
                    if side in ("L", "J"):
                        left.append(event)
                    if side in ("R", "J"):
                        right.append(event)
                    link = parent[cursor]
                return CheckResult.failed(tuple(reversed(left)), tuple(reversed(right)), event=e)
        for event in events:
            one, two = joint(x, y, event), joint(x2, y2, event)
            if event in ctx.sigma_o:
                moves = [((*one, *two), "J")] if one is not None and two is not None else []
            else:
                moves = []
                if one is not None:
                    moves.append(((*one, x2, y2), "L"))
                if two is not None:
                    moves.append(((x, y, *two), "R"))
            for nxt, side in moves:
                if nxt not in parent:
                    parent[nxt] = (node, side, event)
                    queue.append(nxt)
    return CheckResult.ok()


def check_normality(k: Automaton, g: Automaton, ctx: ProjectionContext) -> CheckResult:
    """Decide closure(K) = P⁻¹P(closure(K)) ∩ L(G); a failure carries the shortest offending string."""
    _require_same_alphabet(k, g)
    kbar = prefix_closure(k)
    lg = closed(g)
    observed = project(kbar, ctx.sigma_o & k.alphabet.event_set)
    rhs = combine("intersection", inverse_project(observed, k.alphabet), lg)
    result = included(rhs, kbar)
    if not result:
        return result
    return included(kbar, lg)


# --- suprema ----------------------------------------------------------------


def _sup_normal_formula(b: Automaton, m: Automaton, ctx: ProjectionContext) -> Automaton:
    """B − P⁻¹P(M − B)Σ* for prefix-closed B ⊆ M."""
    missing = combine("difference", m, b)
    if not missing.marked:
        return b
    observed = project(missing, ctx.sigma_o & b.alphabet.event_set)
    forbidden = concat_sigma_star(inverse_project(observed, b.alphabet))
    return combine("difference", b, forbidden)


def sup_normal_closed(b: Automaton, m: Automaton, ctx: ProjectionContext) -> Automaton:
    """Supremal normal sublanguage of prefix-closed L_m(b) ⊆ L_m(m) with respect to P.

    Raises:
        NotPrefixClosed: `b` or `m` does not mark a prefix-closed language.
        NotSublanguage: L_m(b) ⊄ L_m(m).
    """
    _require_same_alphabet(b, m)
    _require_prefix_closed(b, operand="B")
    _require_prefix_closed(m, operand="M")
    _require_sublanguage(b, m, operand="B")
    return _finish(_sup_normal_formula(trim(b), trim(m), ctx))


def sup_normal_marked(k: Automaton, g: Automaton, ctx: ProjectionContext) -> Automaton:
    """Largest S ⊆ L_m(k) whose closure is normal with respect to L(g) and P.

    Iterates K_{i+1} = K_i ∩ supN(closure(K_i), L(g)) until the language is stable.

    Raises:
        NotSublanguage: L_m(k) ⊄ L_m(g).
        FixpointDivergence: the iteration guard was exceeded.
    """
    _require_same_alphabet(k, g)
    _require_sublanguage(k, g)
    lg = closed(g)
    guard = _iteration_guard(k, g)
    current = _finish(k)
    for iteration in range(1, guard + 1):
        if not current.marked:
            logger.debug("sup_normal_marked: empty after %d iterations", iteration)
            return current
        closure = prefix_closure(current)
        nxt = _finish(combine("intersection", current, _sup_normal_formula(closure, lg, ctx)))
        if equivalent(nxt, current):
            logger.debug("sup_normal_marked: fixpoint after %d iterations", iteration)
            return nxt
        current = nxt
    raise FixpointDivergence("sup_normal_marked", guard)


def sup_controllable(k: Automaton, g: Automaton, sigma_uc: Iterable[str]) -> Automaton:
    """Supremal controllable sublanguage of L_m(k) with respect to L(g) and Σ_uc.

    Raises:
        NotSublanguage: L_m(k) ⊄ L_m(g).
    """
    _require_same_alphabet(k, g)
    _require_sublanguage(k, g)
    uc_set = frozenset(sigma_uc)
    uncontrollable = [e for e in g.alphabet.events if e in uc_set]
    tk = trim(k)
    if not tk.marked:
        return empty_automaton(k.alphabet)
    dk = determinize(tk, complete=False)
    dg = determinize(g, complete=False)
    events = k.alphabet.events

    def successors(node: tuple[str, str]) -> Iterable[tuple[str, tuple[str, str]]]:
        x, y = node
        for event in events:
            x2, y2 = dk.step(x, event), dg.step(y, event)
            if x2 is not None and y2 is not None:
                yield event, (x2, y2)

    product, names = build_reachable(
        k.alphabet, (dk.initial, dg.initial), successors, lambda n: n[0] in dk.marked and n[1] in dg.marked
    )
    plant_state = {name: key[1] for key, name in names.items()}
    predecessors: dict[str, set[str]] = {}
    for source, _, target in product.transitions:
        predecessors.setdefault(target, set()).add(source)

    alive = set(product.states)
    iterations = 0
    while True:
        iterations += 1
        bad = {
            state
            for state in alive
            for u in uncontrollable
            if dg.step(plant_state[state], u) is not None and product.step(state, u) not in alive
        }
        alive -= bad
        coreachable = {s for s in product.marked if s in alive}
        queue = deque(coreachable)
        while queue:
            state = queue.popleft()
            for source in predecessors.get(state, ()):
                if source in alive and source not in coreachable:
                    coreachable.add(source)
                    queue.append(source)
        blocking = alive - coreachable
        alive = coreachable
        if product.initial not in alive:
            logger.debug("sup_controllable: empty after %d iterations", iterations)
            return empty_automaton(k.alphabet)
        if not bad and not blocking:
            break
    logger.debug("sup_controllable: %d of %d states kept after %d iterations", len(alive), product.num_states, iterations)
    kept = Automaton.build(
        (s for s in product.states if s in alive),
        product.alphabet,
        (t for t in product.transitions if t[0] in alive and t[2] in alive),
        product.initial,
        product.marked & alive,
    )
    return _finish(kept)


def sup_con_normal(k: Automaton, g: Automaton, ctx: ProjectionContext) -> Automaton:
    """Supremal controllable and normal sublanguage of L_m(k) with respect to L(g).

    Alternates `sup_controllable` and `sup_normal_marked` until the language is stable.
    """
    _require_same_alphabet(k, g)
    _require_sublanguage(k, g)
    guard = _iteration_guard(k, g)
    current = _finish(k)
    for iteration in range(1, guard + 1):
        nxt = sup_normal_marked(sup_controllable(current, g, ctx.sigma_uc), g, ctx)
        if equivalent(nxt, current):
            logger.debug("sup_con_normal: fixpoint after %d rounds", iteration)
            return nxt
        current = nxt
    raise FixpointDivergence("sup_con_normal", guard)


def closed_loop(sup: Automaton, g: Automaton) -> Automaton:
    """Plant under supervision: the supervisor lifted to g's alphabet, composed with g."""
    return minimize(accessible(parallel([inverse_project(sup, g.alphabet), g])))

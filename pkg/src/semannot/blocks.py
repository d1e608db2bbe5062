"""Semantic-block delimitation, substitution-block validation, and the
forward-chaining rule engine that materializes derived relations.

Rule files use a bracketed pattern syntax::

    @prefix MEGA: <http://example.org/mega#>
    # ops attached to an outgoing flow
    [Operation_to_DataObject:
      (?OP rdf:type MEGA:Operation)
      (?DO MEGA:attachesTo ?SF)
      ->
      (?OP SANS:SBR_Operation_to_DataObject ?DO)
    ]

Terms are variables ``?X``, prefixed names ``NS:Local`` (prefix declared by
an ``@prefix`` line; ``rdf:``/``rdfs:`` are reserved), self-qualified names
``&NS;Local``, or bare identifiers kept verbatim.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import InvariantViolation, RuleSyntaxError
from .kstore import BinaryRelation, Graph, RDF_TYPE, qualify
from .model import DERIVED, ModelRelation, RelationGraph

Triple = tuple[str, str, str]


# --- semantic blocks -------------------------------------------------------


class SelectorMode:
    ALL = "all"
    WHITELIST = "predicate-whitelist"
    DEPTH = "depth-bounded"


@dataclass(frozen=True)
class Selector:
    """User-chosen admission policy applied while a block is delimited."""

    mode: str = SelectorMode.ALL
    allowed_predicates: frozenset[str] = frozenset()
    max_depth: int | None = None

    def __post_init__(self) -> None:
        if self.mode not in (SelectorMode.ALL, SelectorMode.WHITELIST, SelectorMode.DEPTH):
            raise InvariantViolation("selector mode", f"unknown mode {self.mode!r}")
        if self.mode == SelectorMode.WHITELIST and not self.allowed_predicates:
            raise InvariantViolation(
                "whitelist mode requires non-empty predicate set", "no predicates given"
            )
        if self.mode == SelectorMode.DEPTH:
            if self.max_depth is None or self.max_depth < 0:
                raise InvariantViolation(
                    "depth-bounded mode requires a non-negative depth", repr(self.max_depth)
                )

    @classmethod
    def everything(cls) -> "Selector":
        return cls()

    @classmethod
    def whitelist(cls, predicates: Iterable[str]) -> "Selector":
        return cls(mode=SelectorMode.WHITELIST, allowed_predicates=frozenset(predicates))

    @classmethod
    def depth_bounded(cls, max_depth: int) -> "Selector":
        return cls(mode=SelectorMode.DEPTH, max_depth=max_depth)

    def admits(self, predicate: str) -> bool:
        if self.mode == SelectorMode.WHITELIST:
            return predicate in self.allowed_predicates
        return True

    @property
    def depth_limit(self) -> int | None:
        return self.max_depth if self.mode == SelectorMode.DEPTH else None


@dataclass(frozen=True)
class SemanticBlock:
    """A main concept plus everything reachable from it along admitted
    relations; the unit in which domain semantics is expressed."""

    main: str
    entities: frozenset[str]
    triples: frozenset[Triple]

    def validate(self) -> None:
        if self.main not in self.entities:
            raise InvariantViolation("mainConcept in entities", self.main)
        for s, p, o in self.triples:
            if s not in self.entities or o not in self.entities:
                raise InvariantViolation(
                    "relation endpoints in entities", f"({s}, {p}, {o})"
                )
        reached = {self.main}
        out: dict[str, list[str]] = defaultdict(list)
        for s, _, o in self.triples:
            out[s].append(o)
        frontier = [self.main]
        while frontier:
            node = frontier.pop()
            for nxt in out[node]:
                if nxt not in reached:
                    reached.add(nxt)
                    frontier.append(nxt)
        unreachable = self.entities - reached
        if unreachable:
            raise InvariantViolation(
                "every entity attainable from mainConcept", ", ".join(sorted(unreachable))
            )

    def to_json_dict(self) -> dict:
        return {
            "main": self.main,
            "entities": sorted(self.entities),
            "triples": sorted(list(t) for t in self.triples),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SemanticBlock":
        block = cls(
            main=doc["main"],
            entities=frozenset(doc["entities"]),
            triples=frozenset((s, p, o) for s, p, o in doc["triples"]),
        )
        block.validate()
        return block


def delimit_sb(g: Graph, main: str, sel: Selector = Selector()) -> SemanticBlock:
    """Least fixpoint of the layered forward construction: layer 0 is the
    main concept, layer n+1 the out-neighbours of layer n along admitted
    relations, stopping at the selector's depth bound."""
    g.entity(main)
    entities = {main}
    frontier = {main}
    depth = 0
    limit = sel.depth_limit
    while frontier and (limit is None or depth < limit):
        nxt: set[str] = set()
        for node in frontier:
            for r in g.out_relations(node):
                if sel.admits(r.predicate) and r.range not in entities:
                    nxt.add(r.range)
        entities |= nxt
        frontier = nxt
        depth += 1
    triples = frozenset(
        r.as_triple()
        for r in g.relations
        if sel.admits(r.predicate) and r.domain in entities and r.range in entities
    )
    block = SemanticBlock(main=main, entities=frozenset(entities), triples=triples)
    block.validate()
    return block


# --- substitution blocks ---------------------------------------------------

STRICT = "strict"
SYMMETRIC = "symmetric"


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    condition: str | None = None
    witness: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def validate_sbr(
    g: Graph,
    left: str,
    right: str,
    interior: Iterable[str],
    rels: Iterable[BinaryRelation],
    mode: str = SYMMETRIC,
) -> ValidationResult:
    """Check the three delimitation conditions for a block standing in as a
    relation between ``left`` and ``right``:

    C1: neither endpoint is inside the block.
    C2: every interior entity has a relation in ``rels`` to another interior
        entity — as its domain in ``strict`` mode, in either direction in
        ``symmetric`` mode.
    C3: every relation in ``rels`` stays inside interior ∪ {left, right}.
    """
    if mode not in (STRICT, SYMMETRIC):
        raise ValueError(f"mode must be strict or symmetric, got {mode!r}")
    interior_set = set(interior)
    rel_list = sorted(rels, key=lambda r: (r.domain, r.predicate, r.range, r.id))
    for entity_id in sorted(interior_set | {left, right}):
        g.entity(entity_id)
    for r in rel_list:
        g.entity(r.domain)
        g.entity(r.range)

    for endpoint in (left, right):
        if endpoint in interior_set:
            return ValidationResult(False, "C1", endpoint)

    for a_k in sorted(interior_set):
        attached = any(r.domain == a_k and r.range in interior_set for r in rel_list)
        if mode == SYMMETRIC and not attached:
            attached = any(r.range == a_k and r.domain in interior_set for r in rel_list)
        if not attached:
            return ValidationResult(False, "C2", a_k)

    allowed = interior_set | {left, right}
    for r in rel_list:
        if r.domain not in allowed or r.range not in allowed:
            return ValidationResult(False, "C3", f"({r.domain}, {r.predicate}, {r.range})")

    return ValidationResult(True)


@dataclass(frozen=True)
class SubstitutionBlock:
    """A delimited subgraph between two endpoints that substitutes for its
    contents as a single derived relation."""

    left: str
    right: str
    interior: frozenset[str]
    relations: tuple[BinaryRelation, ...]
    derived_predicate: str


def make_substitution_block(
    g: Graph,
    left: str,
    right: str,
    interior: Iterable[str],
    rels: Iterable[BinaryRelation],
    derived_predicate: str,
    mode: str = SYMMETRIC,
) -> SubstitutionBlock:
    interior_set = frozenset(interior)
    rel_tuple = tuple(sorted(rels, key=lambda r: (r.domain, r.predicate, r.range, r.id)))
    result = validate_sbr(g, left, right, interior_set, rel_tuple, mode=mode)
    if not result:
        raise InvariantViolation(
            f"SBR condition {result.condition}", f"witness {result.witness}"
        )
    return SubstitutionBlock(
        left=left,
        right=right,
        interior=interior_set,
        relations=rel_tuple,
        derived_predicate=derived_predicate,
    )


# --- rules -----------------------------------------------------------------

VARIABLE_PREFIX = "?"


def is_variable(term: str) -> bool:
    return term.startswith(VARIABLE_PREFIX)


Pattern = tuple[str, str, str]


@dataclass(frozen=True)
class Rule:
    name: str
    antecedents: tuple[Pattern, ...]
    consequent: Pattern

    def variables(self) -> frozenset[str]:
        return frozenset(t for pat in self.antecedents for t in pat if is_variable(t))


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.rules)

    @property
    def derived_predicates(self) -> frozenset[str]:
        return frozenset(r.consequent[1] for r in self.rules)

    def get(self, name: str) -> Rule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    def merged_with(self, other: "RuleSet") -> "RuleSet":
        duplicate = set(self.names) & set(other.names)
        if duplicate:
            raise RuleSyntaxError(f"duplicate rule names: {', '.join(sorted(duplicate))}")
        return RuleSet(self.rules + other.rules)


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<atprefix>@prefix\b)
  | (?P<uri><[^>\n]*>)
  | (?P<lbrack>\[) | (?P<rbrack>\])
  | (?P<lparen>\() | (?P<rparen>\))
  | (?P<arrow>->)
  | (?P<colon>:)
  | (?P<qualified>&[A-Za-z_][\w.-]*;[\w.-]+)
  | (?P<var>\?[\w.-]+)
  | (?P<name>[\w.-]+)
""",
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str, source: str | None) -> list[_Token]:
    tokens: list[_Token] = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise RuleSyntaxError(
                f"unexpected character {text[pos]!r} at column {col}", source=source, line=line
            )
        kind = m.lastgroup or ""
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    return tokens


class _Parser:
    RESERVED_TERM_PREFIXES = {"rdf", "rdfs"}

    def __init__(self, tokens: Sequence[_Token], source: str | None):
        self._tokens = tokens
        self._pos = 0
        self._source = source
        self._prefixes: set[str] = set()

    def _fail(self, message: str, token: _Token | None = None) -> RuleSyntaxError:
        if token is None:
            if self._pos < len(self._tokens):
                token = self._tokens[self._pos]
            elif self._tokens:
                token = self._tokens[-1]
        line = token.line if token else None
        return RuleSyntaxError(message, source=self._source, line=line)

    def _peek(self) -> _Token | None:
        return self._tokens[self._pos] if self._pos < len(self._tokens) else None

    def _next(self, expected: str | None = None) -> _Token:
        token = self._peek()
        if token is None:
            raise self._fail(f"unexpected end of file (expected {expected})")
        if expected is not None and token.kind != expected:
            raise self._fail(f"expected {expected}, found {token.text!r}", token)
        self._pos += 1
        return token

    def parse(self) -> RuleSet:
        rules: list[Rule] = []
        names: set[str] = set()
        while (token := self._peek()) is not None:
            if token.kind == "atprefix":
                self._parse_prefix()
            elif token.kind == "lbrack":
                rule = self._parse_rule()
                if rule.name in names:
                    raise self._fail(f"duplicate rule name {rule.name!r}", token)
                names.add(rule.name)
                rules.append(rule)
            else:
                raise self._fail(f"expected a rule or @prefix, found {token.text!r}", token)
        return RuleSet(tuple(rules))

    def _parse_prefix(self) -> None:
        self._next("atprefix")
        ns = self._next("name").text
        self._next("colon")
        self._next("uri")
        self._prefixes.add(ns)

    def _parse_rule(self) -> Rule:
        open_token = self._next("lbrack")
        name = self._next("name").text
        self._next("colon")
        patterns: list[Pattern] = []
        while True:
            token = self._peek()
            if token is None:
                raise self._fail("unterminated rule", open_token)
            if token.kind == "arrow":
                self._next()
                break
            patterns.append(self._parse_pattern())
        if not patterns:
            raise self._fail(f"rule {name!r} has no antecedents", open_token)
        consequent = self._parse_pattern()
        self._next("rbrack")

        bound = {t for pat in patterns for t in pat if is_variable(t)}
        for term in consequent:
            if is_variable(term) and term not in bound:
                raise self._fail(
                    f"variable {term} in consequent of {name!r} is unbound", open_token
                )
        if is_variable(consequent[1]):
            raise self._fail(
                f"consequent predicate of {name!r} must be a derived-relation name", open_token
            )
        if consequent[0] == consequent[2]:
            raise self._fail(
                f"rule {name!r} is self-referential (consequent relates a term to itself)",
                open_token,
            )
        return Rule(name=name, antecedents=tuple(patterns), consequent=consequent)

    def _parse_pattern(self) -> Pattern:
        self._next("lparen")
        terms = [self._parse_term(), self._parse_term(), self._parse_term()]
        self._next("rparen")
        return (terms[0], terms[1], terms[2])

    def _parse_term(self) -> str:
        token = self._peek()
        if token is None:
            raise self._fail("unexpected end of file inside a pattern")
        if token.kind == "var":
            self._next()
            return token.text
        if token.kind == "qualified":
            self._next()
            return token.text
        if token.kind == "name":
            self._next()
            following = self._peek()
            if following is not None and following.kind == "colon":
                self._next()
                local = self._next("name").text
                if token.text in self.RESERVED_TERM_PREFIXES:
                    return f"{token.text}:{local}"
                if token.text not in self._prefixes:
                    raise self._fail(f"undeclared prefix {token.text!r}", token)
                return qualify(token.text, local)
            return token.text
        raise self._fail(f"expected a term, found {token.text!r}", token)


def parse_rules(text: str, *, source: str | None = None) -> RuleSet:
    """Parse a rule file into a RuleSet; every consequent variable must be
    bound by an antecedent and rule names must be unique."""
    return _Parser(_tokenize(text, source), source).parse()


# --- forward chaining ------------------------------------------------------


def _match_pattern(
    pattern: Pattern, fact: Triple, bindings: dict[str, str]
) -> dict[str, str] | None:
    merged = bindings
    copied = False
    for term, value in zip(pattern, fact):
        if is_variable(term):
            bound = merged.get(term)
            if bound is None:
                if not copied:
                    merged = dict(merged)
                    copied = True
                merged[term] = value
            elif bound != value:
                return None
        elif term != value:
            return None
    return merged


def _match_antecedents(
    patterns: Sequence[Pattern], facts: Iterable[Triple], bindings: dict[str, str]
) -> Iterator[dict[str, str]]:
    if not patterns:
        yield bindings
        return
    head, rest = patterns[0], patterns[1:]
    for fact in facts:
        extended = _match_pattern(head, fact, bindings)
        if extended is not None:
            yield from _match_antecedents(rest, facts, extended)


def _instantiate(pattern: Pattern, bindings: dict[str, str]) -> Triple:
    return tuple(bindings.get(t, t) for t in pattern)  # type: ignore[return-value]


def apply_rules(
    rg: RelationGraph, types: Iterable[tuple[str, str]], rules: RuleSet
) -> tuple[ModelRelation, ...]:
    """Forward-chain the rules to fixpoint over the graph's native and
    derived relations plus the instance-of facts, returning every derived
    relation entailed (each one citing its producing rule).

    Re-applying to a graph that already holds the result adds nothing, and
    the outcome does not depend on rule or antecedent order.
    """
    facts: set[Triple] = rg.facts()
    facts |= {(eid, RDF_TYPE, mme) for eid, mme in types}

    derived: set[tuple[str, str, str, str]] = {
        (r.source, r.predicate, r.target, r.rule or "") for r in rg.derived_relations
    }
    changed = True
    while changed:
        changed = False
        fact_list = sorted(facts)
        for rule in rules:
            for bindings in _match_antecedents(rule.antecedents, fact_list, {}):
                s, p, o = _instantiate(rule.consequent, bindings)
                entry = (s, p, o, rule.name)
                if entry not in derived:
                    derived.add(entry)
                    facts.add((s, p, o))
                    changed = True

    ordered = sorted(derived)
    return tuple(
        ModelRelation(
            id=f"d{i}", predicate=p, source=s, target=o, provenance=DERIVED, rule=rule_name
        )
        for i, (s, p, o, rule_name) in enumerate(ordered)
    )

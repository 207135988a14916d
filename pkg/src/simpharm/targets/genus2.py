"""The closed genus-2 hyperbolic surface as a quotient of ``H^2``.

The fundamental domain is the regular octagon with interior angles ``pi/4``
centred at the origin ``(1, 0, 0)`` of the hyperboloid.  Side ``k`` runs from
vertex ``V_k`` (direction ``k*pi/4 - pi/8``) to ``V_{k+1}``.  The side pairing
``pair(i, j)`` is the orientation-preserving isometry taking side ``j`` onto
side ``i`` with the octagon on opposite sides, and the generators are

    g1 = pair(0, 2),  g2 = pair(1, 3)^-1,  g3 = pair(4, 6),  g4 = pair(5, 7)^-1

which satisfy ``[g1, g2][g3, g4] = 1``.  Deck elements are words in the
letters ``a b c d`` (for ``g1..g4``) and ``A B C D`` (their inverses), read
left to right as a matrix product, so ``"aB"`` is ``g1 g2^-1``.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .base import DeckAction, TargetError
from .hyperboloid import Hyperbolic, boost, lorentz_inverse, rotation
from ..trig import hyperbolic_angle, hyperbolic_area

MAX_WORD = 64
LETTERS = "abcdABCD"
RELATOR = "abABcdCD"


def _inv_letter(ch: str) -> str:
    return ch.lower() if ch.isupper() else ch.upper()


def reduce_word(word: str) -> str:
    """Free reduction of a word in the generators."""
    out: list[str] = []
    for ch in word:
        if ch not in LETTERS:
            raise TargetError(f"bad generator letter {ch!r} in deck word {word!r}")
        if out and out[-1] == _inv_letter(ch):
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def invert_word(word: str) -> str:
    return "".join(_inv_letter(ch) for ch in reversed(word))


def octagon_radii() -> tuple[float, float]:
    """``(circumradius, inradius)`` of the regular octagon with angles pi/4."""
    cot = 1.0 / math.tan(math.pi / 8)
    return math.acosh(cot * cot), math.acosh(cot)


def octagon_vertices() -> np.ndarray:
    R, _ = octagon_radii()
    o = np.array([1.0, 0.0, 0.0])
    return np.array([boost(k * math.pi / 4 - math.pi / 8, R) @ o for k in range(8)])


def side_pairing(i: int, j: int) -> np.ndarray:
    _, r = octagon_radii()
    phi_i, phi_j = i * math.pi / 4, j * math.pi / 4
    return boost(phi_i, 2.0 * r) @ rotation(phi_i - phi_j + math.pi)


def generator_matrices() -> dict[str, np.ndarray]:
    g = {
        "a": side_pairing(0, 2),
        "b": lorentz_inverse(side_pairing(1, 3)),
        "c": side_pairing(4, 6),
        "d": lorentz_inverse(side_pairing(5, 7)),
    }
    for ch in "abcd":
        g[ch.upper()] = lorentz_inverse(g[ch])
    return g


class Genus2Octagon(Hyperbolic):
    """Genus-2 surface ``H^2 / Gamma`` with ``Gamma`` the octagon group."""

    has_decks = True
    far_lifts_lose_precision = True

    def __init__(self):
        super().__init__(2)
        self.name = "genus2_octagon"
        self._gens = generator_matrices()
        self.vertices = octagon_vertices()
        self._validate()

    def _validate(self):
        err = np.abs(self.word_matrix(RELATOR) - np.eye(3)).max()
        if err > 1e-9:
            raise TargetError(f"octagon relator check failed (error {err:.3g})")
        R, _ = octagon_radii()
        side = self.distance(self.vertices[0], self.vertices[1])
        angle_sum = 8 * 2 * hyperbolic_angle(R, R, side)
        if abs(angle_sum - 2 * math.pi) > 1e-9:
            raise TargetError("octagon vertex angles do not sum to 2*pi")
        self.relator_error = float(err)
        self.vertex_angle_sum = angle_sum

    def fundamental_area(self) -> float:
        """Area of the octagon as the sum of 8 centre triangles' angle defects."""
        R, _ = octagon_radii()
        side = self.distance(self.vertices[0], self.vertices[1])
        return 8 * hyperbolic_area(R, R, side)

    def word_matrix(self, word: str) -> np.ndarray:
        return _word_matrix(reduce_word(word))

    # -- deck group ----------------------------------------------------------
    def deck_identity(self):
        return ""

    def deck_normalize(self, g):
        if g is None or g == "id":
            return ""
        if not isinstance(g, str):
            raise TargetError(f"genus-2 deck element must be a word, got {g!r}")
        w = reduce_word(g)
        if len(w) > MAX_WORD:
            raise TargetError(f"deck word longer than {MAX_WORD} letters")
        return w

    def deck_compose(self, g, h):
        w = reduce_word(self.deck_normalize(g) + self.deck_normalize(h))
        return w if len(w) <= 2 else self.canonical_word(w)

    def canonical_word(self, word: str) -> str:
        """Shortest-path word for the group element ``word``.

        The octagon is the Dirichlet domain of the origin ``o`` and its side
        pairings are the eight generators, so greedily applying whichever
        generator brings the orbit point ``w.o`` closest to ``o`` ends
        exactly at ``o``.  Points are re-projected onto the hyperboloid after
        every letter, which keeps far orbit points accurate.
        """
        return _canonical(reduce_word(word))

    def reduce(self, p):
        """``(h, h . p)`` with ``h . p`` in the fundamental octagon.

        The point is moved one generator at a time and re-projected after
        each letter, which is far better conditioned than applying the
        matrix of ``h`` to a distant ``p``.
        """
        y = self.project(np.asarray(p, float))
        letters = []
        while True:
            best, best_x0 = None, y[0]
            for ch in LETTERS:
                x0 = float(_GENS[ch][0] @ y)
                if x0 < best_x0 * (1.0 - 1e-12):
                    best, best_x0 = ch, x0
            if best is None:
                break
            y = _proj(_GENS[best] @ y)
            letters.append(best)
            if len(letters) > 4 * MAX_WORD:
                raise TargetError("point reduction did not terminate")
        return self.deck_normalize("".join(reversed(letters))), y

    def deck_inverse(self, g):
        return invert_word(self.deck_normalize(g))

    def deck_apply(self, g, p) -> np.ndarray:
        return self.project(_word_matrix(self.deck_normalize(g)) @ np.asarray(p, float))

    def deck_matrix(self, g) -> np.ndarray:
        return _word_matrix(self.deck_normalize(g))

    def deck_is_identity(self, g, tol: float = 1e-9) -> bool:
        return bool(np.abs(self.deck_matrix(g) - np.eye(3)).max() <= tol)

    def deck_to_json(self, g):
        w = self.deck_normalize(g)
        return w if w else "id"

    def deck_action(self, decks) -> DeckAction:
        words = [self.deck_normalize(g) for g in decks]
        if not words:
            z = np.zeros((0, 3, 3))
            return DeckAction(M=z, Minv=z)
        M = np.array([_word_matrix(w) for w in words])
        Minv = np.array([_word_matrix(invert_word(w)) for w in words])
        return DeckAction(M=M, Minv=Minv)

    def deck_key(self, g):
        return self.deck_normalize(g)

    def lifted_distances(self, P, Q, decks, action: DeckAction | None = None) -> np.ndarray:
        """Distances ``d(P[e], w_e . Q[e])`` that stay accurate for long words.

        ``w = u v`` is split so that ``u^-1 . p`` and ``v . q`` both stay near
        the origin, and ``d(u^-1 . p, v . q)`` is evaluated instead.  Applying
        a long word's matrix to ``q`` would put the lift where hyperboloid
        coordinates carry errors of order ``eps * cosh(d)^2``.
        """
        P = np.asarray(P, dtype=float)
        Q = np.asarray(Q, dtype=float)
        out = np.empty(len(P))
        plain = []
        for e, g in enumerate(decks):
            w = self.deck_normalize(g)
            if len(w) <= 1:
                plain.append(e)
                continue
            a, b = _balanced(w, P[e], Q[e])
            out[e] = self.distance(a, b)
        if plain:
            idx = np.array(plain)
            M = np.array([_word_matrix(self.deck_normalize(decks[e])) for e in plain])
            out[idx] = self.distances(P[idx], np.einsum("eij,ej->ei", M, Q[idx]))
        return out

    def spec(self) -> dict:
        return {"type": "genus2_octagon"}


_GENS = generator_matrices()


@lru_cache(maxsize=65536)
def _canonical(word: str) -> str:
    y = _word_point(reduce_word(word))
    letters = []
    while True:
        best, best_x0 = None, y[0]
        for ch in LETTERS:
            x0 = float(_GENS[ch][0] @ y)
            if x0 < best_x0 * (1.0 - 1e-12):
                best, best_x0 = ch, x0
        if best is None:
            break
        y = _proj(_GENS[best] @ y)
        letters.append(best)
        if len(letters) > 4 * MAX_WORD:
            raise TargetError("deck reduction did not terminate")
    if abs(y[0] - 1.0) > 1e-6:
        raise TargetError("deck word reduction lost track of the orbit point")
    # letters[-1] ... letters[0] w = id, so w is the inverse of that product
    w = invert_word("".join(reversed(letters)))
    if len(w) > MAX_WORD:
        raise TargetError(f"deck word longer than {MAX_WORD} letters")
    return w


def _proj(y: np.ndarray) -> np.ndarray:
    y = np.array(y, dtype=float)
    y[0] = math.sqrt(1.0 + y[1] * y[1] + y[2] * y[2])
    return y


def _balanced(word: str, p: np.ndarray, q: np.ndarray):
    """``(u^-1 . p, v . q)`` for the split ``word = u v`` keeping both lifts smallest."""
    n = len(word)
    fronts = [np.asarray(p, dtype=float)]
    for ch in word:
        fronts.append(_proj(_GENS[_inv_letter(ch)] @ fronts[-1]))
    backs = [np.asarray(q, dtype=float)]
    for ch in reversed(word):
        backs.append(_proj(_GENS[ch] @ backs[-1]))
    backs.reverse()  # backs[k] = word[k:] . q
    k = min(range(n + 1), key=lambda k: max(fronts[k][0], backs[k][0]))
    return fronts[k], backs[k]


def _word_point(word: str) -> np.ndarray:
    """``word . o`` computed letter by letter from the right."""
    y = np.array([1.0, 0.0, 0.0])
    for ch in reversed(word):
        y = _proj(_GENS[ch] @ y)
    return y


@lru_cache(maxsize=4096)
def _word_matrix(word: str) -> np.ndarray:
    if not word:
        M = np.eye(3)
    elif len(word) == 1:
        M = _GENS[word]
    else:
        half = len(word) // 2
        M = _word_matrix(word[:half]) @ _word_matrix(word[half:])
    M = np.array(M)
    M.setflags(write=False)
    return M

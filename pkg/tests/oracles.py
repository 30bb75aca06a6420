"""Independent reference implementations used only by the tests.

Nothing here may import alignment or matching logic from the package
under test (exception types and plain data carriers are fine); each
oracle recomputes results by direct search or direct counting.
"""

from __future__ import annotations

from functools import lru_cache

# Priority used to pick the canonical alignment among all minimal-cost
# edit paths: match > substitution > deletion > insertion, applied to
# the op sequence read from the END backwards.
_PRIORITY = {"match": 3, "substitution": 2, "deletion": 1, "insertion": 0}


def levenshtein_distance(a: list[str], b: list[str]) -> int:
    """Distance-only recurrence over two rows; no backtrace."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, tok in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j in range(1, len(b) + 1):
            same = tok == b[j - 1]
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (0 if same else 1))
        prev = cur
    return prev[len(b)]


def enumerate_optimal_paths(ref: list[str], hyp: list[str], limit: int = 250_000):
    """Yield every minimal-cost edit path as a list of (kind, i, j) ops.

    (i, j) are the reference/hypothesis indices consumed by the op
    (None where the op does not consume that side). Paths are found by
    forward DFS pruned with an independently memoized suffix distance,
    so exactly the minimal paths are produced.
    """
    n, m = len(ref), len(hyp)

    @lru_cache(maxsize=None)
    def suffix_dist(i: int, j: int) -> int:
        if i == n:
            return m - j
        if j == m:
            return n - i
        same = ref[i] == hyp[j]
        return min(
            suffix_dist(i + 1, j + 1) + (0 if same else 1),
            suffix_dist(i + 1, j) + 1,
            suffix_dist(i, j + 1) + 1,
        )

    total = suffix_dist(0, 0)
    emitted = 0
    stack: list[tuple[int, int, list]] = [(0, 0, [])]
    while stack:
        i, j, path = stack.pop()
        if i == n and j == m:
            emitted += 1
            if emitted > limit:
                raise RuntimeError("too many optimal paths to enumerate")
            yield path
            continue
        spent = total - suffix_dist(i, j)
        cost_so_far = sum(1 for kind, _, _ in path if kind != "match")
        assert cost_so_far == spent
        if i < n and j < m:
            step = 0 if ref[i] == hyp[j] else 1
            if step + suffix_dist(i + 1, j + 1) == suffix_dist(i, j):
                kind = "match" if step == 0 else "substitution"
                stack.append((i + 1, j + 1, path + [(kind, i, j)]))
        if i < n and 1 + suffix_dist(i + 1, j) == suffix_dist(i, j):
            stack.append((i + 1, j, path + [("deletion", i, None)]))
        if j < m and 1 + suffix_dist(i, j + 1) == suffix_dist(i, j):
            stack.append((i, j + 1, path + [("insertion", None, j)]))


def canonical_optimal_path(ref: list[str], hyp: list[str]) -> list[tuple]:
    """The canonical minimal path the aligner must reproduce.

    Among all minimal-cost paths: maximize matches, then pick the
    lexicographically greatest priority sequence reading the ops from
    the end backwards.
    """
    best = None
    best_key = None
    for path in enumerate_optimal_paths(ref, hyp):
        matches = sum(1 for kind, _, _ in path if kind == "match")
        key = (matches, tuple(_PRIORITY[kind] for kind, _, _ in reversed(path)))
        if best_key is None or key > best_key:
            best, best_key = path, key
    assert best is not None
    return best


def path_counts(path: list[tuple]) -> tuple[int, int, int, int]:
    """(matches, substitutions, deletions, insertions) of a path."""
    kinds = [kind for kind, _, _ in path]
    return (
        kinds.count("match"),
        kinds.count("substitution"),
        kinds.count("deletion"),
        kinds.count("insertion"),
    )


def filtered_span_counts(path: list[tuple], start: int, end: int):
    """Direct span filtering of one alignment path.

    Keeps ops whose reference index is in [start, end) plus insertions
    strictly between two kept reference positions, by scanning the op
    list in both directions per insertion.
    """
    subs = dels = ins = 0
    for idx, (kind, i, _) in enumerate(path):
        if kind == "substitution" and start <= i < end:
            subs += 1
        elif kind == "deletion" and start <= i < end:
            dels += 1
        elif kind == "insertion":
            prev_ref = next(
                (p[1] for p in reversed(path[:idx]) if p[1] is not None), None
            )
            next_ref = next((p[1] for p in path[idx + 1 :] if p[1] is not None), None)
            if (
                prev_ref is not None
                and next_ref is not None
                and prev_ref >= start
                and next_ref < end
            ):
                ins += 1
    return subs, dels, ins


def brute_force_matched_eval(corpus_a, corpus_b, system, orders):
    """Nested-loop reimplementation of the matched n-gram evaluation.

    corpus_* are lists of (utt_id, reference_text, {system: hyp_text})
    with already-normalized space-separated tokens. Returns a dict with
    per-side counts plus pair/unique counts.
    """
    toks_a = [(u, ref.split(), hyps) for u, ref, hyps in corpus_a]
    toks_b = [(u, ref.split(), hyps) for u, ref, hyps in corpus_b]

    def all_ngrams(corpus):
        found = set()
        for _, tokens, _ in corpus:
            for n in orders:
                for s in range(len(tokens) - n + 1):
                    found.add(tuple(tokens[s : s + n]))
        return found

    common = sorted(all_ngrams(toks_a) & all_ngrams(toks_b))

    def utts_containing(corpus, ngram):
        hits = []
        for utt_id, tokens, _ in corpus:
            n = len(ngram)
            for s in range(len(tokens) - n + 1):
                if tuple(tokens[s : s + n]) == ngram:
                    hits.append(utt_id)
                    break
        return hits

    totals = {"a": [0, 0, 0, 0], "b": [0, 0, 0, 0]}
    pair_count = 0
    paired_ngrams = set()
    for ngram in common:
        in_a = utts_containing(toks_a, ngram)
        in_b = utts_containing(toks_b, ngram)
        for utt_a, utt_b in zip(in_a, in_b):
            pair_count += 1
            paired_ngrams.add(ngram)
            for side, corpus, utt in (("a", toks_a, utt_a), ("b", toks_b, utt_b)):
                tokens, hyps = next(
                    (t, h) for u, t, h in corpus if u == utt
                )
                hyp_tokens = hyps[system].split()
                path = canonical_optimal_path(tokens, hyp_tokens)
                n = len(ngram)
                span_start = next(
                    s
                    for s in range(len(tokens) - n + 1)
                    if tuple(tokens[s : s + n]) == ngram
                )
                subs, dels, ins = filtered_span_counts(
                    path, span_start, span_start + n
                )
                totals[side][0] += subs
                totals[side][1] += dels
                totals[side][2] += ins
                totals[side][3] += n
    return {
        "a": tuple(totals["a"]),
        "b": tuple(totals["b"]),
        "pair_count": pair_count,
        "unique_ngram_count": len(paired_ngrams),
    }


def pr_recount(scores, threshold):
    """Direct per-threshold recount of the confusion counts."""
    tp = sum(1 for s, g in scores if s >= threshold and g)
    fp = sum(1 for s, g in scores if s >= threshold and not g)
    fn = sum(1 for s, g in scores if s < threshold and g)
    tn = sum(1 for s, g in scores if s < threshold and not g)
    return tp, fp, fn, tn


def numeric_gradients(loss_fn, arrays, h=1e-6):
    """Central finite differences of loss_fn over every array entry.

    ``arrays`` are mutated in place during probing and restored; the
    returned list mirrors their shapes.
    """
    import numpy as np

    grads = []
    for arr in arrays:
        grad = np.zeros_like(arr)
        flat = arr.reshape(-1)
        gflat = grad.reshape(-1)
        for k in range(flat.size):
            orig = flat[k]
            flat[k] = orig + h
            hi = loss_fn()
            flat[k] = orig - h
            lo = loss_fn()
            flat[k] = orig
            gflat[k] = (hi - lo) / (2.0 * h)
        grads.append(grad)
    return grads

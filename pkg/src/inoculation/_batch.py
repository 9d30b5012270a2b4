"""Vectorised kernels over batches of node states.

Each row of a ``B x n`` boolean ``insecure`` matrix is one attack graph on the
same underlying graph. ``nbr`` is the padded neighbor table from
``Graph.padded_neighbors`` (sentinel index ``n``).
"""

from __future__ import annotations

import numpy as np


def component_labels(nbr: np.ndarray, insecure: np.ndarray) -> np.ndarray:
    """Per-row component labels, ``B x (n + 1)``.

    An insecure node's label is the smallest node index in its component;
    secure nodes and the sentinel column carry ``n``.
    """
    B, n = insecure.shape
    big = n
    lab = np.full((B, n + 1), big, dtype=np.int64)
    lab[:, :n] = np.where(insecure, np.arange(n), big)
    rows = np.arange(B)[:, None]
    while True:
        m = lab[:, nbr].min(axis=2)
        new = np.minimum(lab[:, :n], m)
        new = np.where(insecure, new, big)
        # pointer jumping: a label is always a node of the same component
        new = lab[rows, new]
        new = np.where(insecure, np.minimum(new, lab[:, :n]), big)
        if np.array_equal(new, lab[:, :n]):
            return lab
        lab[:, :n] = new


def label_counts(lab: np.ndarray) -> np.ndarray:
    """``B x (n + 1)`` table: nodes carrying each label; sentinel column zeroed."""
    B, n1 = lab.shape
    n = n1 - 1
    flat = (lab[:, :n] + n1 * np.arange(B)[:, None]).ravel()
    counts = np.bincount(flat, minlength=B * n1).reshape(B, n1)
    counts[:, n] = 0
    return counts


def component_sizes(nbr: np.ndarray, insecure: np.ndarray):
    """(labels, counts, size of each node's component with 0 for secure nodes)."""
    lab = component_labels(nbr, insecure)
    counts = label_counts(lab)
    sizes = np.take_along_axis(counts, lab[:, :-1], axis=1)
    return lab, counts, sizes


def conditional_sizes(nbr: np.ndarray, insecure: np.ndarray):
    """Component size of every node as if that node alone were made insecure.

    For insecure nodes this is the ordinary component size. For a secure node
    it is one plus the sizes of the distinct insecure components it touches.
    Returns ``(csize, labels, counts)``.
    """
    lab, counts, sizes = component_sizes(nbr, insecure)
    nl = np.sort(lab[:, nbr], axis=2)  # B x n x d
    fresh = np.ones(nl.shape, dtype=bool)
    fresh[:, :, 1:] = nl[:, :, 1:] != nl[:, :, :-1]
    B = nl.shape[0]
    gathered = np.take_along_axis(counts, nl.reshape(B, -1), axis=1).reshape(nl.shape)
    merged = 1 + (gathered * fresh).sum(axis=2)
    return np.where(insecure, sizes, merged).astype(np.int64), lab, counts


def spread_batch(nbr: np.ndarray, insecure: np.ndarray, seeds: np.ndarray,
                 threshold: int) -> np.ndarray:
    """Infected nodes per row for the threshold-``threshold`` fixpoint.

    ``seeds`` marks start nodes; only insecure starts ignite. Threshold 1
    reduces to flooding the starts' components.
    """
    B, n = insecure.shape
    inf = np.zeros((B, n + 1), dtype=bool)
    inf[:, :n] = seeds & insecure
    while True:
        hits = inf[:, nbr].sum(axis=2)
        new = inf[:, :n] | (insecure & (hits >= threshold))
        if np.array_equal(new, inf[:, :n]):
            return new
        inf[:, :n] = new


def subset_bits(start: int, count: int, u: int) -> np.ndarray:
    """Rows ``start..start+count-1`` of the 2^u subset table (bit j -> column j)."""
    masks = np.arange(start, start + count, dtype=np.int64)
    return ((masks[:, None] >> np.arange(u, dtype=np.int64)) & 1).astype(bool)


def pair_table(n: int):
    iu, ju = np.triu_indices(n, k=1)
    return iu, ju

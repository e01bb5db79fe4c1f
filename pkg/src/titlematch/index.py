"""One-pass construction of the token lexicon, combination lexicon and
forward index.

Tokens are interned in first-encounter order and carry a product frequency
f_w plus the semantics seen at first encounter. Combinations are deduplicated
through their order-invariant signatures: a signature hit increments the
frequency f_c and grows the positional distance accumulator d_acc; a miss
inserts a new record. Canonical keys (the sorted-ID sequences the signatures
hash) disambiguate the rare signature collision, so correctness never rests
on the hash alone.

Titles of equal token count are processed in batches so the per-combination
work (subset gather, member sort, signature hash, positional distance) runs
as whole-array operations; only the lexicon bookkeeping is sequential. The
batch order is fixed (ascending title length, file order within a batch),
which makes record IDs, frequencies and accumulators reproducible run to run.
With the default squared distance the accumulator is integral and therefore
exact regardless of batch layout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .combinatorics import (
    Combination,
    canonical_key,
    pattern_distances,
    position_patterns,
    signature_rows,
)
from .ingest import Dataset, RawProduct
from .textprep import (
    AnalyzedTitle,
    Semantics,
    Token,
    UnitLexicon,
    analyze_title,
    truncate_for_variant,
)

SNAPSHOT_FORMAT = "titlematch-index"
SNAPSHOT_VERSION = 1

# Rows per vectorized batch in the combination pass.
_ROW_BUDGET = 1 << 18

DISTANCE_MODES = ("squared", "euclidean")


@dataclass
class TokenRecord:
    token_id: int
    surface: str
    f_w: int
    s_w: Semantics


class TokenLexicon:
    """Interned title tokens with product frequencies."""

    def __init__(self) -> None:
        self.records: List[TokenRecord] = []
        self._by_surface: Dict[str, int] = {}

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, surface: str) -> bool:
        return surface in self._by_surface

    def id_of(self, surface: str) -> int:
        return self._by_surface[surface]

    def get(self, surface: str) -> Optional[TokenRecord]:
        idx = self._by_surface.get(surface)
        return None if idx is None else self.records[idx]

    def intern(self, surface: str, semantics: Semantics) -> int:
        idx = self._by_surface.get(surface)
        if idx is None:
            idx = len(self.records)
            self.records.append(TokenRecord(idx, surface, 1, semantics))
            self._by_surface[surface] = idx
        else:
            self.records[idx].f_w += 1
        return idx

    def idf_table(self, title_count: int) -> np.ndarray:
        """idf(w) = ln(|P| / f_w) for every token, as a dense array."""
        f = np.array([r.f_w for r in self.records], dtype=np.float64)
        if len(f) == 0:
            return f
        return np.log(float(title_count) / f)


@dataclass(frozen=True)
class CombinationRecord:
    """Read-only view over one combination lexicon slot."""

    index: int
    signature: int
    key_ids: Tuple[int, ...]
    f_c: int
    d_acc: float
    k: int

    @property
    def canonical_key(self) -> str:
        return canonical_key(self.key_ids)


class CombinationLexicon:
    """Signature-keyed store of combination records (columnar).

    Canonical keys are kept as little-endian int32 byte strings of the sorted
    member IDs; that keeps the store compact and makes the equality check in
    the hot insertion loop a plain bytes comparison.
    """

    def __init__(self) -> None:
        self._sig_to_idx: Dict[int, object] = {}
        self.keys: List[bytes] = []
        self.sigs: List[int] = []
        self.f_c: List[int] = []
        self.d_acc: List[float] = []
        self.k: List[int] = []
        self.collisions_resolved = 0

    def __len__(self) -> int:
        return len(self.f_c)

    @staticmethod
    def pack_ids(ids: Sequence[int]) -> bytes:
        return np.asarray(ids, dtype="<i4").tobytes()

    def ids_of(self, idx: int) -> List[int]:
        return np.frombuffer(self.keys[idx], dtype="<i4").tolist()

    def record(self, idx: int) -> CombinationRecord:
        return CombinationRecord(
            index=idx,
            signature=self.sigs[idx],
            key_ids=tuple(self.ids_of(idx)),
            f_c=self.f_c[idx],
            d_acc=self.d_acc[idx],
            k=self.k[idx],
        )

    def lookup(self, sig: int, ids: Sequence[int]) -> Optional[int]:
        """Find the record for a signature, disambiguating by canonical IDs."""
        key = self.pack_ids(sorted(ids))
        v = self._sig_to_idx.get(sig)
        if v is None:
            return None
        if isinstance(v, int):
            return v if self.keys[v] == key else None
        for idx in v:
            if self.keys[idx] == key:
                return idx
        return None

    def observe(self, sig: int, ids: Sequence[int], d: float) -> int:
        """Record one combination occurrence; returns its record index."""
        return self._observe_packed(sig, self.pack_ids(sorted(ids)), len(ids), d)

    def _observe_packed(self, sig: int, key: bytes, k: int, d: float) -> int:
        v = self._sig_to_idx.get(sig)
        if v is None:
            idx = len(self.f_c)
            self._sig_to_idx[sig] = idx
        elif isinstance(v, int):
            if self.keys[v] == key:
                self.f_c[v] += 1
                self.d_acc[v] += d
                return v
            idx = len(self.f_c)
            self._sig_to_idx[sig] = [v, idx]
            self.collisions_resolved += 1
        else:
            for idx in v:
                if self.keys[idx] == key:
                    self.f_c[idx] += 1
                    self.d_acc[idx] += d
                    return idx
            idx = len(self.f_c)
            v.append(idx)
            self.collisions_resolved += 1
        self.keys.append(key)
        self.sigs.append(sig)
        self.f_c.append(1)
        self.d_acc.append(d)
        self.k.append(k)
        return idx

    def as_arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(f_c, d_acc, k) as dense arrays for batched scoring."""
        return (
            np.asarray(self.f_c, dtype=np.float64),
            np.asarray(self.d_acc, dtype=np.float64),
            np.asarray(self.k, dtype=np.float64),
        )


@dataclass
class ForwardIndex:
    """Per-product references into the lexicons."""

    product_ids: List[int] = field(default_factory=list)
    vendor_ids: List[int] = field(default_factory=list)
    token_rows: List[np.ndarray] = field(default_factory=list)
    sem_rows: List[np.ndarray] = field(default_factory=list)
    combo_rows: List[np.ndarray] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.product_ids)

    def length_of(self, p: int) -> int:
        return len(self.token_rows[p])


@dataclass(frozen=True)
class IndexStats:
    title_count: int
    distinct_tokens: int
    avg_title_len: float
    avg_combination_len: float
    combination_instances: int
    distinct_combinations: int
    collisions_resolved: int


@dataclass
class ProductIndex:
    dataset: Dataset
    analyzed: List[AnalyzedTitle]
    tokens: TokenLexicon
    combos: CombinationLexicon
    forward: ForwardIndex
    stats: IndexStats
    k: int
    variant: str
    distance_mode: str

    _idf: Optional[np.ndarray] = None

    @property
    def idf(self) -> np.ndarray:
        if self._idf is None:
            self._idf = self.tokens.idf_table(self.stats.title_count)
        return self._idf

    def token_set(self, p: int) -> frozenset:
        return frozenset(self.forward.token_rows[p].tolist())


def resolve_k(avg_title_len: float) -> int:
    """Default combination size cap: half the average title length."""
    # combinations need k >= 2, so very short corpora are clamped
    return max(2, int(avg_title_len / 2))


def distance(c: Combination, t: AnalyzedTitle, mode: str = "squared") -> float:
    """Positional distance of a combination from the head of a title.

    Sums (rank - title_position)^2 over members; "euclidean" takes the root.
    """
    if mode not in DISTANCE_MODES:
        raise ValueError(f"unknown distance mode {mode!r}")
    if not c.surfaces:
        raise ValueError("combination carries no surfaces to resolve against the title")
    pos = {tok.surface: tok.position for tok in t.tokens}
    total = 0
    for rank, surface in enumerate(c.surfaces):
        if surface not in pos:
            raise ValueError(f"token {surface!r} does not occur in the title")
        total += (rank - pos[surface]) ** 2
    return float(np.sqrt(total)) if mode == "euclidean" else float(total)


def analyze_dataset(dataset: Dataset, units: Optional[UnitLexicon] = None) -> List[AnalyzedTitle]:
    units = units or UnitLexicon.default()
    return [analyze_title(p.title, units) for p in dataset.products]


def build_index(
    dataset: Dataset,
    k: Optional[int] = None,
    variant: str = "upm",
    distance_mode: str = "squared",
    units: Optional[UnitLexicon] = None,
    analyzed: Optional[List[AnalyzedTitle]] = None,
    with_combinations: bool = True,
) -> ProductIndex:
    """Build lexicons and forward index for a dataset.

    k=None resolves the combination cap from the average analyzed title
    length. The pruning variant truncates each title to its first 2k tokens
    before indexing. with_combinations=False stops after the token pass;
    pairwise baselines only need token sets and idf.
    """
    if distance_mode not in DISTANCE_MODES:
        raise ValueError(f"unknown distance mode {distance_mode!r}")
    if analyzed is None:
        analyzed = analyze_dataset(dataset, units)
    n = len(analyzed)
    avg_len = sum(t.length for t in analyzed) / n if n else 0.0
    k_resolved = resolve_k(avg_len) if k is None else int(k)
    if k_resolved < 2:
        raise ValueError(f"K must be >= 2, got {k_resolved}")

    titles = [truncate_for_variant(t, variant, k_resolved) for t in analyzed]

    tokens = TokenLexicon()
    forward = ForwardIndex()
    for p, title in zip(dataset.products, titles):
        ids = [tokens.intern(tok.surface, tok.semantics) for tok in title.tokens]
        forward.product_ids.append(p.product_id)
        forward.vendor_ids.append(p.vendor_id)
        forward.token_rows.append(np.asarray(ids, dtype=np.int64))
        forward.sem_rows.append(
            np.asarray([int(tok.semantics) for tok in title.tokens], dtype=np.int64)
        )

    combos = CombinationLexicon()
    combo_parts: List[List[np.ndarray]] = [[] for _ in range(n)]
    euclidean = distance_mode == "euclidean"

    by_length: Dict[int, List[int]] = {}
    for p, title in enumerate(titles):
        by_length.setdefault(title.length, []).append(p)

    total_instances = 0
    total_member_count = 0
    for l in sorted(by_length) if with_combinations else []:
        if l < 2:
            continue
        members = by_length[l]
        ids_mat = np.vstack([forward.token_rows[p] for p in members])
        for kk in range(2, min(k_resolved, l) + 1):
            pattern = position_patterns(l, kk)
            n_combos = len(pattern)
            dvec = pattern_distances(l, kk)
            dlist = (np.sqrt(dvec.astype(np.float64)) if euclidean else dvec).tolist()
            total_instances += n_combos * len(members)
            total_member_count += n_combos * len(members) * kk
            key_width = 4 * kk
            chunk = max(1, _ROW_BUDGET // n_combos)
            for c0 in range(0, len(members), chunk):
                batch = members[c0 : c0 + chunk]
                gathered = ids_mat[c0 : c0 + chunk][:, pattern]
                srt = np.sort(gathered, axis=2).reshape(-1, kk)
                sigs = signature_rows(srt).tolist()
                key_block = srt.astype("<i4").tobytes()
                d_tiled = dlist * len(batch)

                # inlined CombinationLexicon._observe_packed; this loop runs
                # once per combination instance and dominates the build
                sig_map = combos._sig_to_idx
                keys = combos.keys
                f_c = combos.f_c
                d_acc = combos.d_acc
                k_col = combos.k
                sig_col = combos.sigs
                buf: List[int] = []
                append = buf.append
                pos = 0
                for r, sig in enumerate(sigs):
                    d = d_tiled[r]
                    key = key_block[pos : pos + key_width]
                    pos += key_width
                    v = sig_map.get(sig)
                    if v is None:
                        idx = len(f_c)
                        sig_map[sig] = idx
                    elif type(v) is int:
                        if keys[v] == key:
                            f_c[v] += 1
                            d_acc[v] += d
                            append(v)
                            continue
                        idx = len(f_c)
                        sig_map[sig] = [v, idx]
                        combos.collisions_resolved += 1
                    else:
                        hit = -1
                        for idx in v:
                            if keys[idx] == key:
                                hit = idx
                                break
                        if hit >= 0:
                            f_c[hit] += 1
                            d_acc[hit] += d
                            append(hit)
                            continue
                        idx = len(f_c)
                        v.append(idx)
                        combos.collisions_resolved += 1
                    keys.append(key)
                    sig_col.append(sig)
                    f_c.append(1)
                    d_acc.append(d)
                    k_col.append(kk)
                    append(idx)

                arr = np.asarray(buf, dtype=np.int64).reshape(len(batch), n_combos)
                for i, p in enumerate(batch):
                    combo_parts[p].append(arr[i])

    for p in range(n):
        parts = combo_parts[p]
        forward.combo_rows.append(
            np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
        )

    indexed_avg_len = sum(t.length for t in titles) / n if n else 0.0
    stats = IndexStats(
        title_count=n,
        distinct_tokens=len(tokens),
        avg_title_len=indexed_avg_len,
        avg_combination_len=(total_member_count / total_instances) if total_instances else 0.0,
        combination_instances=total_instances,
        distinct_combinations=len(combos),
        collisions_resolved=combos.collisions_resolved,
    )
    return ProductIndex(
        dataset=dataset,
        analyzed=titles,
        tokens=tokens,
        combos=combos,
        forward=forward,
        stats=stats,
        k=k_resolved,
        variant=variant,
        distance_mode=distance_mode,
    )


def save_index(index: ProductIndex, path) -> None:
    """Write a versioned binary snapshot of a built index."""
    fw = index.forward
    tok_offsets = np.cumsum([0] + [len(r) for r in fw.token_rows])
    combo_offsets = np.cumsum([0] + [len(r) for r in fw.combo_rows])
    key_offsets = np.cumsum([0] + list(index.combos.k))
    truth = np.asarray(
        [
            -1 if p.truth_cluster_id is None else p.truth_cluster_id
            for p in index.dataset.products
        ],
        dtype=np.int64,
    )
    meta = {
        "format": SNAPSHOT_FORMAT,
        "version": SNAPSHOT_VERSION,
        "k": index.k,
        "variant": index.variant,
        "distance_mode": index.distance_mode,
        "stats": {
            "title_count": index.stats.title_count,
            "distinct_tokens": index.stats.distinct_tokens,
            "avg_title_len": index.stats.avg_title_len,
            "avg_combination_len": index.stats.avg_combination_len,
            "combination_instances": index.stats.combination_instances,
            "distinct_combinations": index.stats.distinct_combinations,
            "collisions_resolved": index.stats.collisions_resolved,
        },
    }
    np.savez_compressed(
        path,
        meta=np.frombuffer(json.dumps(meta).encode("utf-8"), dtype=np.uint8),
        product_ids=np.asarray(fw.product_ids, dtype=np.int64),
        vendor_ids=np.asarray(fw.vendor_ids, dtype=np.int64),
        truth=truth,
        titles=np.asarray([p.title for p in index.dataset.products], dtype=np.str_),
        token_surfaces=np.asarray([r.surface for r in index.tokens.records], dtype=np.str_),
        token_f=np.asarray([r.f_w for r in index.tokens.records], dtype=np.int64),
        token_sem=np.asarray([int(r.s_w) for r in index.tokens.records], dtype=np.int64),
        tok_flat=(
            np.concatenate(fw.token_rows) if fw.token_rows else np.empty(0, dtype=np.int64)
        ),
        tok_offsets=tok_offsets,
        sem_flat=(
            np.concatenate(fw.sem_rows) if fw.sem_rows else np.empty(0, dtype=np.int64)
        ),
        combo_flat=(
            np.concatenate(fw.combo_rows) if fw.combo_rows else np.empty(0, dtype=np.int64)
        ),
        combo_offsets=combo_offsets,
        combo_sigs=np.asarray(index.combos.sigs, dtype=np.uint64),
        combo_f=np.asarray(index.combos.f_c, dtype=np.int64),
        combo_d=np.asarray(index.combos.d_acc, dtype=np.float64),
        combo_k=np.asarray(index.combos.k, dtype=np.int64),
        key_flat=(
            np.frombuffer(b"".join(index.combos.keys), dtype="<i4").astype(np.int64)
            if index.combos.keys
            else np.empty(0, dtype=np.int64)
        ),
        key_offsets=key_offsets,
    )


def load_index(path) -> ProductIndex:
    """Reload a snapshot written by save_index; verifies format and version."""
    with np.load(path, allow_pickle=False) as z:
        meta = json.loads(bytes(z["meta"]).decode("utf-8"))
        if meta.get("format") != SNAPSHOT_FORMAT:
            raise ValueError(f"not a {SNAPSHOT_FORMAT} snapshot: {path}")
        if meta.get("version") != SNAPSHOT_VERSION:
            raise ValueError(
                f"snapshot version {meta.get('version')} unsupported "
                f"(expected {SNAPSHOT_VERSION})"
            )
        product_ids = z["product_ids"].tolist()
        vendor_ids = z["vendor_ids"].tolist()
        truth = z["truth"].tolist()
        titles_raw = z["titles"].tolist()
        products = [
            RawProduct(
                product_id=pid,
                title=title,
                vendor_id=vid,
                truth_cluster_id=None if t < 0 else t,
            )
            for pid, title, vid, t in zip(product_ids, titles_raw, vendor_ids, truth)
        ]
        dataset = Dataset(products=products)

        tokens = TokenLexicon()
        for i, (surface, f_w, sem) in enumerate(
            zip(z["token_surfaces"].tolist(), z["token_f"].tolist(), z["token_sem"].tolist())
        ):
            tokens.records.append(TokenRecord(i, surface, f_w, Semantics(sem)))
            tokens._by_surface[surface] = i

        tok_flat = z["tok_flat"]
        tok_offsets = z["tok_offsets"]
        sem_flat = z["sem_flat"]
        combo_flat = z["combo_flat"]
        combo_offsets = z["combo_offsets"]
        forward = ForwardIndex(product_ids=product_ids, vendor_ids=vendor_ids)
        analyzed: List[AnalyzedTitle] = []
        for p in range(len(product_ids)):
            t0, t1 = int(tok_offsets[p]), int(tok_offsets[p + 1])
            ids = tok_flat[t0:t1]
            sems = sem_flat[t0:t1]
            forward.token_rows.append(ids.copy())
            forward.sem_rows.append(sems.copy())
            c0, c1 = int(combo_offsets[p]), int(combo_offsets[p + 1])
            forward.combo_rows.append(combo_flat[c0:c1].copy())
            analyzed.append(
                AnalyzedTitle(
                    tokens=tuple(
                        Token(
                            surface=tokens.records[int(i)].surface,
                            semantics=Semantics(int(s)),
                            position=pos,
                        )
                        for pos, (i, s) in enumerate(zip(ids.tolist(), sems.tolist()))
                    )
                )
            )

        combos = CombinationLexicon()
        combos.sigs = [int(s) for s in z["combo_sigs"].tolist()]
        combos.f_c = z["combo_f"].tolist()
        combos.d_acc = z["combo_d"].tolist()
        combos.k = z["combo_k"].tolist()
        key_flat = z["key_flat"]
        key_offsets = z["key_offsets"].tolist()
        for i in range(len(combos.f_c)):
            ids = key_flat[key_offsets[i] : key_offsets[i + 1]]
            combos.keys.append(CombinationLexicon.pack_ids(ids))
            v = combos._sig_to_idx.get(combos.sigs[i])
            if v is None:
                combos._sig_to_idx[combos.sigs[i]] = i
            elif isinstance(v, int):
                combos._sig_to_idx[combos.sigs[i]] = [v, i]
            else:
                v.append(i)
        combos.collisions_resolved = meta["stats"]["collisions_resolved"]

        stats = IndexStats(**meta["stats"])
        return ProductIndex(
            dataset=dataset,
            analyzed=analyzed,
            tokens=tokens,
            combos=combos,
            forward=forward,
            stats=stats,
            k=meta["k"],
            variant=meta["variant"],
            distance_mode=meta["distance_mode"],
        )

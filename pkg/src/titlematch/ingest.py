"""Vendor feed loading and ground-truth pair expansion.

Feeds are CSV files with a header row, UTF-8, comma-delimited, double-quote
escaped. Two layouts are supported:

    simple      id, title, vendor
    published   product_id, title, vendor_id, cluster_id, cluster_label,
                category_id, category_label

The published layout embeds the ground-truth cluster of every product; the
simple layout can be paired with a separate truth file (product_id,
cluster_id). Ground truth is kept as per-product cluster IDs and expanded to
unordered (min_id, max_id) pairs on demand.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple

MatchSet = Set[Tuple[int, int]]

FORMATS = ("simple", "published")


class FeedFormatError(ValueError):
    """Malformed feed content; message names the offending row when known."""


@dataclass(frozen=True)
class RawProduct:
    product_id: int
    title: str
    vendor_id: int
    truth_cluster_id: Optional[int] = None


@dataclass
class Dataset:
    products: List[RawProduct] = field(default_factory=list)

    @property
    def title_count(self) -> int:
        return len(self.products)

    @property
    def vendor_count(self) -> int:
        return len({p.vendor_id for p in self.products})

    def by_id(self) -> Dict[int, RawProduct]:
        return {p.product_id: p for p in self.products}


def _parse_int(value: str, row_num: int, what: str) -> int:
    try:
        return int(value.strip())
    except ValueError:
        raise FeedFormatError(f"row {row_num}: {what} is not an integer: {value!r}") from None


def load_products(path, fmt: str = "simple") -> Dataset:
    """Load a feed file into a Dataset, preserving file order.

    Row numbers in error messages are 1-based and count the header.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"feed file not found: {path}")

    min_cols = 3 if fmt == "simple" else 7
    products: List[RawProduct] = []
    seen_ids: Set[int] = set()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise FeedFormatError("feed file is empty (missing header row)")
        for row_num, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < min_cols:
                raise FeedFormatError(
                    f"row {row_num}: expected {min_cols} columns for format "
                    f"{fmt!r}, got {len(row)}"
                )
            pid = _parse_int(row[0], row_num, "product_id")
            title = row[1].strip()
            if not title:
                raise FeedFormatError(f"row {row_num}: empty title for product {pid}")
            vendor = _parse_int(row[2], row_num, "vendor_id")
            truth = None
            if fmt == "published":
                truth = _parse_int(row[3], row_num, "cluster_id")
            if pid in seen_ids:
                raise FeedFormatError(f"row {row_num}: duplicate product_id {pid}")
            seen_ids.add(pid)
            products.append(
                RawProduct(product_id=pid, title=title, vendor_id=vendor, truth_cluster_id=truth)
            )
    return Dataset(products=products)


def load_truth_file(path, dataset: Dataset) -> Dataset:
    """Attach cluster IDs from a (product_id, cluster_id) CSV to a dataset."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"truth file not found: {path}")
    truth: Dict[int, int] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader, None)
        for row_num, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 2:
                raise FeedFormatError(f"row {row_num}: expected 2 columns, got {len(row)}")
            truth[_parse_int(row[0], row_num, "product_id")] = _parse_int(
                row[1], row_num, "cluster_id"
            )
    products = []
    for p in dataset.products:
        if p.product_id not in truth:
            raise FeedFormatError(f"truth file lacks product_id {p.product_id}")
        products.append(
            RawProduct(
                product_id=p.product_id,
                title=p.title,
                vendor_id=p.vendor_id,
                truth_cluster_id=truth[p.product_id],
            )
        )
    return Dataset(products=products)


def load_ground_truth(dataset: Dataset) -> MatchSet:
    """Expand per-product cluster IDs into all unordered matching pairs."""
    clusters: Dict[int, List[int]] = {}
    for p in dataset.products:
        if p.truth_cluster_id is None:
            raise FeedFormatError(f"product {p.product_id} has no ground-truth cluster")
        clusters.setdefault(p.truth_cluster_id, []).append(p.product_id)
    pairs: MatchSet = set()
    for members in clusters.values():
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                a, b = members[i], members[j]
                pairs.add((a, b) if a < b else (b, a))
    return pairs

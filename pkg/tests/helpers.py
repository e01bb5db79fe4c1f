"""Dataset builders and CSV writers shared across test modules."""

from __future__ import annotations

import csv

from titlematch.ingest import Dataset, RawProduct


def make_ablation_dataset() -> Dataset:
    """Two same-vendor product variants that merge under their shared
    combination, plus unrelated fillers.

    Every vendor 0..7 lists both the 4gb/silver and the 8gb/black variant of
    the same model, so the merged cluster violates the one-per-vendor rule
    eight times over; verification must split it back apart. Vendor 0's
    silver listing carries a rare extra token so it becomes the
    representative.
    """
    rows = []
    pid = 1
    a_titles = [
        "zenix kx500 mixer silver 4gb prox9",
        "zenix kx500 mixer silver 4gb",
        "zenix kx500 mixer 4gb silver",
        "zenix kx500 mixer silver 4gb home",
        "zenix kx500 mixer silver 4gb set",
        "zenix kx500 mixer 4gb silver new",
        "zenix kx500 mixer silver 4gb eco",
        "zenix kx500 mixer silver 4gb plus",
    ]
    b_titles = [
        "zenix kx500 mixer black 8gb",
        "zenix kx500 mixer black 8gb home",
        "zenix kx500 mixer 8gb black",
        "zenix kx500 mixer black 8gb set",
        "zenix kx500 mixer black 8gb new",
        "zenix kx500 mixer 8gb black eco",
        "zenix kx500 mixer black 8gb plus",
        "zenix kx500 mixer black 8gb top",
    ]
    for v, title in enumerate(a_titles):
        rows.append(RawProduct(pid, title, v, 0))
        pid += 1
    for v, title in enumerate(b_titles):
        rows.append(RawProduct(pid, title, v, 1))
        pid += 1
    fillers = [
        "tavor wd12 grill steam rack",
        "corda pl77 lamp glow arm",
        "ermis vt3 pump flow tube",
        "okapi rz9 fan blade ring",
        "lurex mn44 scale body case",
        "vanta qs2 clock dial face",
        "howin bf6 torch beam grip",
        "sopra kt8 iron plate cord",
        "nimbu xc5 mouse wheel pad",
        "ostra gv7 kettle spout lid",
        "pluma jd21 stand base bar",
        "tegra hw33 brush wire head",
    ]
    for i, title in enumerate(fillers):
        rows.append(RawProduct(pid, title, i % 8, 2 + i))
        pid += 1
    return Dataset(products=rows)


def write_feed_csv(path, dataset: Dataset, fmt: str = "published") -> None:
    """Write a dataset in one of the supported feed layouts."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if fmt == "simple":
            writer.writerow(["id", "title", "vendor"])
            for p in dataset.products:
                writer.writerow([p.product_id, p.title, p.vendor_id])
        else:
            writer.writerow(
                [
                    "product_id",
                    "title",
                    "vendor_id",
                    "cluster_id",
                    "cluster_label",
                    "category_id",
                    "category_label",
                ]
            )
            for p in dataset.products:
                writer.writerow(
                    [
                        p.product_id,
                        p.title,
                        p.vendor_id,
                        p.truth_cluster_id if p.truth_cluster_id is not None else "",
                        f"cluster {p.truth_cluster_id}",
                        0,
                        "category",
                    ]
                )


def write_truth_csv(path, dataset: Dataset) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["product_id", "cluster_id"])
        for p in dataset.products:
            writer.writerow([p.product_id, p.truth_cluster_id])

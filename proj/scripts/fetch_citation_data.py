#!/usr/bin/env python3
"""Fetch the cora/citeseer/pubmed citation benchmarks and convert them to the
text formats this project reads.

Downloads the Planetoid serialization of each dataset (the fixed-split
distribution used by the GCN/VGAE evaluation protocol) and writes

    <out>/<name>/<name>.edges     src<TAB>dst, one undirected edge per line
    <out>/<name>/<name>.features  node<TAB>v1,v2,...,vF with values in [0,1]
    <out>/<name>/<name>.labels    node<TAB>class<TAB>split

The published fixed node splits are preserved exactly: the first 20 labeled
nodes per class form the train split, the next 500 nodes the validation
split, and the distributed test index file the test split. Everything else
is marked none. Node ids are the integer indices of the Planetoid ordering.

Requires network access plus numpy and scipy. Example:

    python3 scripts/fetch_citation_data.py --out data cora citeseer
"""

import argparse
import os
import pickle
import sys
import urllib.request

import numpy as np
import scipy.sparse as sp

BASE_URL = "https://github.com/kipf/gcn/raw/master/gcn/data"
PARTS = ["x", "y", "tx", "ty", "allx", "ally", "graph"]


def fetch(name, cache_dir):
    os.makedirs(cache_dir, exist_ok=True)
    paths = {}
    for part in PARTS + ["test.index"]:
        filename = (
            f"ind.{name}.{part}" if part != "test.index" else f"ind.{name}.test.index"
        )
        dest = os.path.join(cache_dir, filename)
        if not os.path.exists(dest):
            url = f"{BASE_URL}/{filename}"
            print(f"downloading {url}")
            urllib.request.urlretrieve(url, dest)
        paths[part] = dest
    return paths


def load_pickle(path):
    with open(path, "rb") as handle:
        return pickle.load(handle, encoding="latin1")


def load_planetoid(name, cache_dir):
    paths = fetch(name, cache_dir)
    x, y, tx, ty, allx, ally = (load_pickle(paths[p]) for p in PARTS[:-1])
    graph = load_pickle(paths["graph"])
    test_idx_reorder = np.loadtxt(paths["test.index"], dtype=np.int64)
    test_idx_range = np.sort(test_idx_reorder)

    if name == "citeseer":
        # Citeseer's test index has gaps (isolated nodes); pad the tail block
        # with zero rows so positions stay aligned with node indices.
        full = np.arange(test_idx_range.min(), test_idx_range.max() + 1)
        tx_ext = sp.lil_matrix((len(full), x.shape[1]))
        tx_ext[test_idx_range - test_idx_range.min(), :] = tx
        tx = tx_ext
        ty_ext = np.zeros((len(full), y.shape[1]), dtype=ty.dtype)
        ty_ext[test_idx_range - test_idx_range.min(), :] = ty
        ty = ty_ext

    # The tail block is shipped in shuffled order; the permutation below puts
    # each test row at its node index.
    features = sp.vstack((allx, tx)).tolil()
    features[test_idx_reorder, :] = features[test_idx_range, :]
    labels = np.vstack((ally, ty))
    labels[test_idx_reorder, :] = labels[test_idx_range, :]

    n = labels.shape[0]
    split = np.full(n, "none", dtype=object)
    split[np.arange(len(y))] = "train"
    split[np.arange(len(y), len(y) + 500)] = "val"
    split[test_idx_range] = "test"

    return graph, features.tocsr(), labels, split


def write_dataset(name, out_dir, graph, features, labels, split):
    dataset_dir = os.path.join(out_dir, name)
    os.makedirs(dataset_dir, exist_ok=True)
    base = os.path.join(dataset_dir, name)

    n = labels.shape[0]
    with open(base + ".edges", "w") as handle:
        handle.write(f"# {name}: undirected citation edges, planetoid ordering\n")
        for i in range(n):
            for j in sorted(graph.get(i, [])):
                if i < j:
                    handle.write(f"{i}\t{j}\n")

    dense = np.asarray(features.todense(), dtype=np.float64)
    # Keep values inside [0,1]; pubmed ships tf-idf weights, the others are
    # binary word indicators already.
    col_max = dense.max(axis=0)
    col_max[col_max == 0.0] = 1.0
    dense = dense / col_max
    with open(base + ".features", "w") as handle:
        for i in range(n):
            row = ",".join(format(v, ".6g") for v in dense[i])
            handle.write(f"{i}\t{row}\n")

    # Nodes without a label row (isolated citeseer test gaps) are simply
    # omitted; the loader treats absent nodes as unlabeled.
    class_of = labels.argmax(axis=1)
    has_label = labels.sum(axis=1) > 0
    with open(base + ".labels", "w") as handle:
        for i in range(n):
            if has_label[i]:
                handle.write(f"{i}\tc{class_of[i]}\t{split[i]}\n")

    edges = sum(len([j for j in graph.get(i, []) if i < j]) for i in range(n))
    print(f"{name}: {n} nodes, {edges} edges, {dense.shape[1]} features -> {dataset_dir}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("names", nargs="*", default=["cora", "citeseer", "pubmed"],
                        help="datasets to fetch (default: all three)")
    parser.add_argument("--out", default="data", help="output directory")
    parser.add_argument("--cache", default="data/_planetoid_cache",
                        help="download cache directory")
    args = parser.parse_args()

    names = args.names or ["cora", "citeseer", "pubmed"]
    for name in names:
        if name not in ("cora", "citeseer", "pubmed"):
            sys.exit(f"unknown dataset: {name}")
        graph, features, labels, split = load_planetoid(name, args.cache)
        write_dataset(name, args.out, graph, features, labels, split)


if __name__ == "__main__":
    main()

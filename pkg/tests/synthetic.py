"""Synthetic temporal edge streams for tests."""

import numpy as np

from tlinkpred.graph_stream import EdgeStream


def random_stream(seed, n_edges=500, n_nodes=40, horizon=1000.0, integer_times=True):
    """Uniform random directed edges; integer times produce plenty of equal timestamps."""
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n_nodes, n_edges)
    dst = rng.integers(0, n_nodes, n_edges)
    t = np.sort(rng.uniform(0, horizon, n_edges))
    if integer_times:
        t = np.floor(t)
    return EdgeStream(src, dst, t)


def recurrent_stream(seed, n_edges=10_000, n_src=200, n_dst=1000, repeat_prob=0.5, horizon=5_000_000):
    """Bipartite stream where roughly ``repeat_prob`` of edges replay an earlier pair."""
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n_src, n_edges)
    dst = rng.integers(n_src, n_src + n_dst, n_edges)
    replay = rng.random(n_edges) < repeat_prob
    for i in np.flatnonzero(replay):
        if i:
            j = rng.integers(0, i)
            src[i], dst[i] = src[j], dst[j]
    t = np.sort(rng.integers(0, horizon, n_edges)).astype(float)
    return EdgeStream(src, dst, t)


def high_recurrence_stream(
    seed,
    n_src=60,
    n_hub=30,
    n_other=400,
    n_fav=2,
    n_occasional=15,
    occasional_visits=4,
    n_train=6000,
    n_eval=2000,
    horizon=1e8,
    train_time_frac=0.9,
):
    """Every evaluation edge repeats a pair seen in training.

    Each source has a couple of favorite destinations drawn from a small hub
    set, which it hits repeatedly throughout, plus occasional partners it
    visits a few times during training only. Evaluation edges go to
    favorites exclusively, so they all recur; the occasional partners are
    exactly the "seen before but inactive now" pairs historical sampling picks.

    Returns the stream and the train ratio that puts the split at the end of
    the training period.
    """
    rng = np.random.default_rng(seed)
    train_end = horizon * train_time_frac
    hubs = np.arange(n_src, n_src + n_hub)
    others = np.arange(n_src + n_hub, n_src + n_hub + n_other)
    edges, fav = [], {}
    for s in range(n_src):
        fav[s] = rng.choice(hubs, n_fav, replace=False)
        for r in rng.choice(others, n_occasional, replace=False):
            for tt in rng.uniform(0, train_end, occasional_visits):
                edges.append((s, int(r), float(int(tt))))
    for tt in rng.uniform(0, train_end, n_train - len(edges)):
        s = int(rng.integers(n_src))
        edges.append((s, int(rng.choice(fav[s])), float(int(tt))))
    for tt in rng.uniform(train_end, horizon, n_eval):
        s = int(rng.integers(n_src))
        edges.append((s, int(rng.choice(fav[s])), float(int(tt))))
    edges.sort(key=lambda e: e[2])
    return EdgeStream.from_edges(edges), n_train / (n_train + n_eval)


def write_csv(stream, path, header=True):
    with open(path, "w") as fh:
        if header:
            fh.write("src,dst,t\n")
        for e in stream:
            t = int(e.t) if float(e.t).is_integer() else e.t
            fh.write(f"{e.src},{e.dst},{t}\n")
    return path

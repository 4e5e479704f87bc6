#!/usr/bin/env python3
"""Independent oracle for fixture-derived golden values.

Recomputes mean-word-vector cosine similarities straight from vectors-mini.txt
and eupont-mini.owl, without touching the Rust code. Values printed here are
frozen into the Rust tests.
"""
import math
import re
import sys


def load_vectors(path):
    store = {}
    with open(path) as fh:
        lines = fh.read().splitlines()
    first = lines[0].split()
    if len(first) == 2 and all(p.isdigit() for p in first):
        lines = lines[1:]
    for line in lines:
        parts = line.split()
        store.setdefault(parts[0].lower(), [float(x) for x in parts[1:]])
    return store


def tokens(text):
    return [t for t in re.split(r"[^0-9a-z]+", text.lower()) if t]


def embed(text, store):
    vecs = [store[t] for t in tokens(text) if t in store]
    if not vecs:
        return None
    dim = len(vecs[0])
    return [sum(v[i] for v in vecs) / len(vecs) for i in range(dim)]


def cosine(a, b):
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    if na == 0 or nb == 0:
        return 0.0
    return dot / (na * nb)


def ontology_names(path, root):
    text = open(path).read()
    parents = {}
    for m in re.finditer(r'<owl:Class rdf:about="[^"]*#(\w+)"(/?)>(.*?)(?:</owl:Class>|(?=<owl:Class)|$)', text, re.S):
        cls, body = m.group(1), m.group(3) if m.group(2) == "" else ""
        sup = re.search(r'rdfs:subClassOf rdf:resource="[^"]*#(\w+)"', body)
        parents[cls] = sup.group(1) if sup else None
    out = []
    for cls in parents:
        p = parents[cls]
        while p is not None and p != root:
            p = parents.get(p)
        if p == root:
            name = cls
            for suf in ("Trigger", "Action"):
                if name.endswith(suf):
                    name = name[: -len(suf)]
            name = re.sub(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])", " ", name)
            out.append(name)
    return out


def main():
    store = load_vectors("vectors-mini.txt")
    a = embed("ac turned off", store)
    b = embed("device turned off", store)
    print("golden ac/device:", repr(cosine(a, b)))
    src = sys.argv[1] if len(sys.argv) > 1 else "Any event starts"
    root = sys.argv[2] if len(sys.argv) > 2 else "Trigger"
    src_vec = embed(src, store)
    scored = []
    for name in ontology_names("eupont-mini.owl", root):
        v = embed(name, store)
        s = max(0.0, cosine(src_vec, v)) if v is not None else 0.0
        scored.append((s, name))
    scored.sort(key=lambda p: (-p[0], p[1]))
    for s, n in scored:
        print("%-40s %r" % (n, s))


if __name__ == "__main__":
    main()

"""Frame-based event networks: vertex/edge frames with open info slots, merge
construction from extraction bundles, and Pajek/GraphML/DOT/JSON exporters
(JSON is the canonical lossless form)."""

from __future__ import annotations

import copy
import json
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass, field, replace

VERTEX_TYPES = ("PER", "ORG", "LOC", "TIME")
EDGE_TYPES = ("PER-SOC", "GEN-AFF", "ORG-AFF", "PART-WHOLE", "PHYS", "CO-OCCUR")
EXPORT_FORMATS = ("pajek", "graphml", "dot", "json")


@dataclass
class VertexFrame:
    key: int
    name: str
    vtype: str
    weight: float
    info: dict = field(default_factory=dict)


@dataclass
class EdgeFrame:
    etype: str
    v1: int
    v2: int
    weight: float
    info: dict = field(default_factory=dict)


@dataclass
class EventNetwork:
    event_id: str = ""
    vertices: list[VertexFrame] = field(default_factory=list)
    edges: list[EdgeFrame] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def vertex_by_key(self, key: int) -> VertexFrame:
        for v in self.vertices:
            if v.key == key:
                return v
        raise KeyError(f"vertex key not found: {key}")

    def keys_by_name(self, name: str) -> list[int]:
        return [v.key for v in self.vertices if v.name == name]

    def validate(self) -> None:
        keys = [v.key for v in self.vertices]
        if len(keys) != len(set(keys)):
            raise ValueError("duplicate vertex keys")
        identities = [(v.name, v.vtype) for v in self.vertices]
        if len(identities) != len(set(identities)):
            raise ValueError("duplicate (name, vtype) vertex")
        for v in self.vertices:
            if v.vtype not in VERTEX_TYPES:
                raise ValueError(f"vertex {v.key} has unknown type {v.vtype!r}")
            if not 0.0 <= v.weight <= 1.0:
                raise ValueError(f"vertex {v.key} weight out of [0,1]: {v.weight}")
        key_set = set(keys)
        for i, e in enumerate(self.edges):
            if e.etype not in EDGE_TYPES:
                raise ValueError(f"edge {i} has unknown type {e.etype!r}")
            for endpoint in (e.v1, e.v2):
                if endpoint not in key_set:
                    raise ValueError(
                        f"edge {i} ({e.etype} {e.v1}-{e.v2}) references "
                        f"unknown vertex key {endpoint}"
                    )
            if e.v1 == e.v2:
                raise ValueError(f"edge {i} ({e.etype}) is a self-loop on key {e.v1}")


def build_event_network(bundle) -> EventNetwork:
    """Merge an extraction bundle into one network.

    Mentions sharing (surface, type) collapse to a single vertex whose weight
    is the maximum mention weight and whose info accumulates document ids,
    sentence refs and timestamps. Relation mentions sharing (type, endpoints)
    collapse to one undirected edge with an occurrence count.
    """
    net = EventNetwork(event_id=bundle.event_id,
                       provenance={"event_id": bundle.event_id})
    vertex_keys: dict[tuple[str, str], int] = {}

    def vertex_for(surface, etype, weight, doc_id, sentence_index):
        identity = (surface, etype)
        ts = bundle.doc_timestamps.get(doc_id)
        if identity not in vertex_keys:
            vertex_keys[identity] = len(net.vertices)
            net.vertices.append(VertexFrame(
                key=vertex_keys[identity], name=surface, vtype=etype,
                weight=weight,
                info={"doc_ids": [], "sentences": [], "timestamps": []},
            ))
        v = net.vertices[vertex_keys[identity]]
        v.weight = max(v.weight, weight)
        v.info["doc_ids"].append(doc_id)
        v.info["sentences"].append(f"{doc_id}#{sentence_index}")
        v.info["timestamps"].append(ts)
        return v.key

    for m in bundle.mentions:
        vertex_for(m.surface, m.etype, m.weight, m.doc_id, m.sentence_index)

    def ensure_vertex(m):
        identity = (m.surface, m.etype)
        if identity in vertex_keys:
            return vertex_keys[identity]
        return vertex_for(m.surface, m.etype, m.weight, m.doc_id, m.sentence_index)

    edge_index: dict[tuple[str, int, int], int] = {}
    for r in bundle.relations:
        k1 = ensure_vertex(r.arg1)
        k2 = ensure_vertex(r.arg2)
        if k1 == k2:
            continue  # distinct-argument rule: identical mentions make no edge
        lo, hi = min(k1, k2), max(k1, k2)
        identity = (r.rtype, lo, hi)
        ts = bundle.doc_timestamps.get(r.doc_id)
        if identity not in edge_index:
            edge_index[identity] = len(net.edges)
            net.edges.append(EdgeFrame(
                etype=r.rtype, v1=lo, v2=hi, weight=r.weight,
                info={"count": 0, "doc_ids": [], "sentences": [], "timestamps": []},
            ))
        e = net.edges[edge_index[identity]]
        e.weight = max(e.weight, r.weight)
        e.info["count"] += 1
        e.info["doc_ids"].append(r.doc_id)
        e.info["sentences"].append(f"{r.doc_id}#{r.sentence_index}")
        e.info["timestamps"].append(ts)
    net.validate()
    return net


def network_to_dict(net: EventNetwork) -> dict:
    return {
        "event_id": net.event_id,
        "provenance": net.provenance,
        "vertices": [
            {"key": v.key, "name": v.name, "vtype": v.vtype,
             "weight": v.weight, "info": v.info}
            for v in net.vertices
        ],
        "edges": [
            {"etype": e.etype, "v1": e.v1, "v2": e.v2,
             "weight": e.weight, "info": e.info}
            for e in net.edges
        ],
    }


def network_from_dict(payload: dict) -> EventNetwork:
    net = EventNetwork(
        event_id=payload.get("event_id", ""),
        provenance=payload.get("provenance", {}),
        vertices=[
            VertexFrame(key=v["key"], name=v["name"], vtype=v["vtype"],
                        weight=v["weight"], info=v.get("info", {}))
            for v in payload.get("vertices", [])
        ],
        edges=[
            EdgeFrame(etype=e["etype"], v1=e["v1"], v2=e["v2"],
                      weight=e["weight"], info=e.get("info", {}))
            for e in payload.get("edges", [])
        ],
    )
    net.validate()
    return net


def _pajek_lines(net: EventNetwork) -> list[str]:
    order = {v.key: i + 1 for i, v in enumerate(net.vertices)}
    name_counts = Counter(v.name for v in net.vertices)
    lines = [f"*Vertices {len(net.vertices)}"]
    for v in net.vertices:
        # same name under two types: disambiguate the label so readers that
        # key vertices by label keep them apart
        label = v.name if name_counts[v.name] == 1 else f"{v.name}|{v.vtype}"
        label = label.replace('"', "'")
        lines.append(f'{order[v.key]} "{label}"')
    lines.append("*Edges")
    for e in net.edges:
        lines.append(f"{order[e.v1]} {order[e.v2]} {e.weight}")
    return lines


def _graphml_tree(net: EventNetwork) -> ET.ElementTree:
    ns = "http://graphml.graphdrawing.org/xmlns"
    ET.register_namespace("", ns)
    root = ET.Element(f"{{{ns}}}graphml")
    keys = [
        ("d_name", "node", "name", "string"),
        ("d_vtype", "node", "vtype", "string"),
        ("d_vweight", "node", "weight", "double"),
        ("d_etype", "edge", "etype", "string"),
        ("d_eweight", "edge", "weight", "double"),
    ]
    for key_id, domain, attr_name, attr_type in keys:
        ET.SubElement(root, f"{{{ns}}}key", {
            "id": key_id, "for": domain,
            "attr.name": attr_name, "attr.type": attr_type,
        })
    graph = ET.SubElement(root, f"{{{ns}}}graph", {
        "id": net.event_id or "G", "edgedefault": "undirected",
    })

    def data(parent, key_id, value):
        el = ET.SubElement(parent, f"{{{ns}}}data", {"key": key_id})
        el.text = str(value)

    for v in net.vertices:
        node = ET.SubElement(graph, f"{{{ns}}}node", {"id": f"n{v.key}"})
        data(node, "d_name", v.name)
        data(node, "d_vtype", v.vtype)
        data(node, "d_vweight", v.weight)
    for i, e in enumerate(net.edges):
        edge = ET.SubElement(graph, f"{{{ns}}}edge", {
            "id": f"e{i}", "source": f"n{e.v1}", "target": f"n{e.v2}",
        })
        data(edge, "d_etype", e.etype)
        data(edge, "d_eweight", e.weight)
    return ET.ElementTree(root)


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _dot_lines(net: EventNetwork) -> list[str]:
    lines = ["graph evnet {"]
    for v in net.vertices:
        lines.append(
            f'  n{v.key} [label="{_dot_escape(v.name)}" '
            f'vtype="{v.vtype}" weight="{v.weight}"];'
        )
    for e in net.edges:
        lines.append(
            f'  n{e.v1} -- n{e.v2} [label="{e.etype}" weight="{e.weight}"];'
        )
    lines.append("}")
    return lines


def network_json(net: EventNetwork) -> str:
    return json.dumps(network_to_dict(net), ensure_ascii=False, indent=2,
                      sort_keys=True) + "\n"


def export_network(net: EventNetwork, format: str, path) -> None:
    if format not in EXPORT_FORMATS:
        raise ValueError(f"unsupported export format: {format}")
    if format == "json":
        text = network_json(net)
    elif format == "pajek":
        text = "\n".join(_pajek_lines(net)) + "\n"
    elif format == "dot":
        text = "\n".join(_dot_lines(net)) + "\n"
    else:
        tree = _graphml_tree(net)
        ET.indent(tree)
        tree.write(path, encoding="utf-8", xml_declaration=True)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def import_network(path, format: str = "json") -> EventNetwork:
    if format != "json":
        raise ValueError(f"unsupported import format: {format}")
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    return network_from_dict(payload)


def copy_vertex(v: VertexFrame) -> VertexFrame:
    return replace(v, info=copy.deepcopy(v.info))


def copy_edge(e: EdgeFrame) -> EdgeFrame:
    return replace(e, info=copy.deepcopy(e.info))


def copy_network(net: EventNetwork) -> EventNetwork:
    """Frame-level copy (info deep-copied) so analyses can derive new networks
    without aliasing."""
    return EventNetwork(
        event_id=net.event_id,
        provenance=dict(net.provenance),
        vertices=[copy_vertex(v) for v in net.vertices],
        edges=[copy_edge(e) for e in net.edges],
    )

"""GEXF export of learned graphs for external layout tools."""

from __future__ import annotations

import io
import xml.etree.ElementTree as ET

GEXF_NS = "http://www.gexf.net/1.2draft"
COMMUNITY_ATTR = "0"


def export_gexf(graph, partition=None, stream=None):
    """Serialize ``graph`` as GEXF 1.2 (undirected, weighted).

    With a partition, each node carries an integer ``community`` attribute.
    Writes to ``stream`` when given, otherwise returns the bytes.
    """
    ET.register_namespace("", GEXF_NS)
    root = ET.Element(f"{{{GEXF_NS}}}gexf", {"version": "1.2"})
    g = ET.SubElement(root, f"{{{GEXF_NS}}}graph", {"defaultedgetype": "undirected", "mode": "static"})
    if partition is not None:
        attrs = ET.SubElement(g, f"{{{GEXF_NS}}}attributes", {"class": "node"})
        ET.SubElement(
            attrs, f"{{{GEXF_NS}}}attribute", {"id": COMMUNITY_ATTR, "title": "community", "type": "integer"}
        )
        assignment = partition.assignment
        if len(assignment) != graph.n_nodes:
            raise ValueError("partition does not cover the graph")
    nodes = ET.SubElement(g, f"{{{GEXF_NS}}}nodes")
    for i, lab in enumerate(graph.labels):
        node = ET.SubElement(nodes, f"{{{GEXF_NS}}}node", {"id": str(i), "label": lab})
        if partition is not None:
            vals = ET.SubElement(node, f"{{{GEXF_NS}}}attvalues")
            ET.SubElement(
                vals, f"{{{GEXF_NS}}}attvalue", {"for": COMMUNITY_ATTR, "value": str(int(assignment[i]))}
            )
    edges = ET.SubElement(g, f"{{{GEXF_NS}}}edges")
    for k, ((i, j), w) in enumerate(zip(graph.edges.tolist(), graph.weights.tolist())):
        ET.SubElement(
            edges,
            f"{{{GEXF_NS}}}edge",
            {"id": str(k), "source": str(i), "target": str(j), "weight": repr(float(w))},
        )
    tree = ET.ElementTree(root)
    buf = io.BytesIO()
    tree.write(buf, encoding="utf-8", xml_declaration=True)
    data = buf.getvalue()
    if stream is None:
        return data
    stream.write(data)
    return None


def read_gexf(data):
    """Parse GEXF written by :func:`export_gexf`.

    Returns ``(labels, edges, weights, communities)``; ``communities`` maps
    label to community id and is empty when the file has none.
    """
    root = ET.fromstring(data)
    ns = {"g": GEXF_NS}
    labels, ids, communities = [], {}, {}
    for node in root.iterfind("g:graph/g:nodes/g:node", ns):
        ids[node.get("id")] = len(labels)
        lab = node.get("label")
        labels.append(lab)
        for av in node.iterfind("g:attvalues/g:attvalue", ns):
            if av.get("for") == COMMUNITY_ATTR:
                communities[lab] = int(av.get("value"))
    edges, weights = [], []
    for e in root.iterfind("g:graph/g:edges/g:edge", ns):
        edges.append((ids[e.get("source")], ids[e.get("target")]))
        weights.append(float(e.get("weight", "1.0")))
    return labels, edges, weights, communities

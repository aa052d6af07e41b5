"""Manual cluster modification: merge, split, reassign, undo, and JSON export.

Edits act on the finest hierarchy level. Coarser levels are re-derived as
unions over unchanged parent links; a merge across different parents adopts
the parent of the first target. Every edit recomputes the community edges it
touches via the mean-weight law, deletes emptied communities, and appends the
command to the log. Graphs are value objects, so applying an edit returns a
new Mcsg and undo is a snapshot swap — byte-identical by construction.

The persistence format is a single versioned JSON document (``mcsg_version``
2) with canonical ordering, so export -> import -> export reproduces the
exact bytes. Hybrid edges are view data and are never serialized.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

from .communities import (CommunityHierarchy, CommunityNode, Mcsg,
                          community_edges_for_membership)
from .errors import EditError, EditNoOpWarning, ImportDocumentError, NotFoundError
from .similarity import ChannelGraph

SCHEMA_VERSION = 2


@dataclass(frozen=True)
class EditCommand:
    """One manual modification of the finest-level partition.

    kind "merge": targets are >= 2 community ids; the merged community keeps
    the parent of the first target. kind "split": targets is one community id
    and parts the two disjoint member subsets. kind "reassign": targets is one
    channel node id and destination the receiving community.
    """

    kind: str
    targets: tuple[str, ...]
    parts: tuple[tuple[str, ...], tuple[str, ...]] | None = None
    destination: str | None = None

    def to_json(self) -> dict:
        if self.kind == "merge":
            return {"kind": "merge", "targets": list(self.targets)}
        if self.kind == "split":
            return {"kind": "split", "target": self.targets[0],
                    "parts": [list(self.parts[0]), list(self.parts[1])]}
        return {"kind": "reassign", "node": self.targets[0], "destination": self.destination}

    @staticmethod
    def from_json(doc: dict, where: str = "command") -> "EditCommand":
        if not isinstance(doc, dict):
            raise ImportDocumentError(f"{where}: expected an object")
        kind = doc.get("kind")
        if kind == "merge":
            targets = doc.get("targets")
            if not isinstance(targets, list) or len(targets) < 2 \
                    or not all(isinstance(t, str) for t in targets):
                raise ImportDocumentError(f"{where}.targets: merge needs a list of >= 2 community ids")
            return merge_command(targets)
        if kind == "split":
            target = doc.get("target")
            parts = doc.get("parts")
            if not isinstance(target, str):
                raise ImportDocumentError(f"{where}.target: split needs a community id")
            if (not isinstance(parts, list) or len(parts) != 2
                    or not all(isinstance(p, list) and all(isinstance(x, str) for x in p) for p in parts)):
                raise ImportDocumentError(f"{where}.parts: split needs exactly two member lists")
            return split_command(target, parts[0], parts[1])
        if kind == "reassign":
            node, dest = doc.get("node"), doc.get("destination")
            if not isinstance(node, str) or not isinstance(dest, str):
                raise ImportDocumentError(f"{where}: reassign needs 'node' and 'destination' ids")
            return reassign_command(node, dest)
        raise ImportDocumentError(f"{where}.kind: unknown edit kind {kind!r}")


def merge_command(targets: list[str] | tuple[str, ...]) -> EditCommand:
    return EditCommand(kind="merge", targets=tuple(targets))


def split_command(target: str, part_a: list[str] | tuple[str, ...],
                  part_b: list[str] | tuple[str, ...]) -> EditCommand:
    return EditCommand(kind="split", targets=(target,),
                       parts=(tuple(sorted(part_a)), tuple(sorted(part_b))))


def reassign_command(node: str, destination: str) -> EditCommand:
    return EditCommand(kind="reassign", targets=(node,), destination=destination)


def _rebuild_hierarchy(mcsg: Mcsg, finest: dict[str, CommunityNode],
                       finest_order: list[str]) -> CommunityHierarchy:
    """Re-derive coarser levels as unions of their children; drop empties."""
    hierarchy = mcsg.hierarchy
    depth = hierarchy.n_levels
    communities: dict[str, CommunityNode] = dict(finest)
    levels: list[tuple[str, ...]] = [tuple(finest_order)]

    child_level = {cid: node for cid, node in finest.items()}
    for level in range(depth - 2, -1, -1):
        members_of: dict[str, set[str]] = {}
        for child in child_level.values():
            if child.parent is not None:
                members_of.setdefault(child.parent, set()).update(child.members)
        rebuilt: dict[str, CommunityNode] = {}
        order: list[str] = []
        for cid in hierarchy.levels[level]:
            members = members_of.get(cid, set())
            if not members:
                continue  # emptied by the edit
            old = hierarchy.communities[cid]
            rebuilt[cid] = CommunityNode(id=cid, level=level,
                                         members=frozenset(members), parent=old.parent)
            order.append(cid)
        communities.update(rebuilt)
        levels.append(tuple(order))
        child_level = rebuilt

    levels.reverse()
    return CommunityHierarchy(levels=tuple(levels), communities=communities,
                              isolated=hierarchy.isolated)


def _finalize(mcsg: Mcsg, hierarchy: CommunityHierarchy, cmd: EditCommand,
              next_index: int) -> Mcsg:
    per_level = tuple(
        community_edges_for_membership(mcsg.graph, hierarchy.membership(level))
        for level in range(hierarchy.n_levels)
    )
    return Mcsg(
        dataset_name=mcsg.dataset_name,
        channel_ids=mcsg.channel_ids,
        mz=mcsg.mz,
        graph=mcsg.graph,
        hierarchy=hierarchy,
        community_edges=per_level,
        epsilon=mcsg.epsilon,
        edit_log=mcsg.edit_log + (cmd,),
        next_community_index=next_index,
    )


def _fresh_id(existing: set[str], index: int) -> tuple[str, int]:
    cid = f"k{index}"
    while cid in existing:
        index += 1
        cid = f"k{index}"
    return cid, index + 1


def apply_edit(mcsg: Mcsg, cmd: EditCommand) -> Mcsg:
    """Apply one command to the finest level and return the updated graph.

    Raises NotFoundError for unknown ids and EditError for structurally
    invalid commands. A reassign into the node's current community warns
    (EditNoOpWarning) and returns the input unchanged, without logging.
    """
    hierarchy = mcsg.hierarchy
    if hierarchy.n_levels == 0:
        raise EditError("graph has no communities to edit")
    finest_ids = hierarchy.levels[hierarchy.finest_level]
    finest: dict[str, CommunityNode] = {cid: hierarchy.communities[cid] for cid in finest_ids}
    order = list(finest_ids)
    existing = set(hierarchy.communities)
    next_index = mcsg.next_community_index

    if cmd.kind == "merge":
        if len(cmd.targets) < 2:
            raise EditError("merge needs at least two communities")
        if len(set(cmd.targets)) != len(cmd.targets):
            raise EditError("merge targets must be distinct")
        for cid in cmd.targets:
            node = hierarchy.community(cid)
            if node.level != hierarchy.finest_level:
                raise EditError(f"community {cid!r} is at level {node.level}; edits act on the "
                                f"finest level {hierarchy.finest_level}")
        union: set[str] = set()
        for cid in cmd.targets:
            union |= finest[cid].members
        new_id, next_index = _fresh_id(existing, next_index)
        merged = CommunityNode(id=new_id, level=hierarchy.finest_level,
                               members=frozenset(union), parent=finest[cmd.targets[0]].parent)
        insert_at = order.index(cmd.targets[0])
        for cid in cmd.targets:
            del finest[cid]
            order.remove(cid)
        finest[new_id] = merged
        order.insert(insert_at, new_id)

    elif cmd.kind == "split":
        target = cmd.targets[0]
        node = hierarchy.community(target)
        if node.level != hierarchy.finest_level:
            raise EditError(f"community {target!r} is at level {node.level}; edits act on the "
                            f"finest level {hierarchy.finest_level}")
        part_a, part_b = set(cmd.parts[0]), set(cmd.parts[1])
        if not part_a or not part_b:
            raise EditError("split parts must both be nonempty")
        if part_a & part_b:
            raise EditError(f"split parts overlap on {sorted(part_a & part_b)[0]!r}")
        if part_a | part_b != node.members:
            off = (part_a | part_b) ^ node.members
            raise EditError(f"split parts must union to the community's members "
                            f"(mismatch at {sorted(off)[0]!r})")
        insert_at = order.index(target)
        del finest[target]
        order.remove(target)
        for i, part in enumerate((part_a, part_b)):
            new_id, next_index = _fresh_id(existing | set(finest), next_index)
            finest[new_id] = CommunityNode(id=new_id, level=node.level,
                                           members=frozenset(part), parent=node.parent)
            order.insert(insert_at + i, new_id)

    elif cmd.kind == "reassign":
        channel = cmd.targets[0]
        if channel not in set(mcsg.channel_ids):
            raise NotFoundError(f"unknown channel id {channel!r}")
        dest = hierarchy.community(cmd.destination)
        if dest.level != hierarchy.finest_level:
            raise EditError(f"destination {cmd.destination!r} is not at the finest level")
        if channel in mcsg.isolated:
            raise EditError(f"channel {channel!r} is isolated and stays outside every partition")
        source_id = mcsg.finest_membership()[channel]
        if source_id == cmd.destination:
            warnings.warn(f"reassign of {channel!r} into its own community {source_id!r} is a no-op",
                          EditNoOpWarning, stacklevel=2)
            return mcsg
        source = finest[source_id]
        remaining = source.members - {channel}
        if remaining:
            finest[source_id] = CommunityNode(id=source_id, level=source.level,
                                              members=frozenset(remaining), parent=source.parent)
        else:
            del finest[source_id]
            order.remove(source_id)
        finest[cmd.destination] = CommunityNode(id=cmd.destination, level=dest.level,
                                                members=frozenset(dest.members | {channel}),
                                                parent=dest.parent)

    else:
        raise EditError(f"unknown edit kind {cmd.kind!r}")

    hierarchy = _rebuild_hierarchy(mcsg, finest, order)
    return _finalize(mcsg, hierarchy, cmd, next_index)


class EditSession:
    """Single-writer session: serialized edits, unbounded in-session undo."""

    def __init__(self, mcsg: Mcsg):
        self._current = mcsg
        self._undo: list[Mcsg] = []
        self._redo: list[Mcsg] = []

    @property
    def graph(self) -> Mcsg:
        return self._current

    def apply(self, cmd: EditCommand) -> Mcsg:
        updated = apply_edit(self._current, cmd)
        if updated is not self._current:
            self._undo.append(self._current)
            self._redo.clear()
            self._current = updated
        return self._current

    def undo(self) -> bool:
        """Revert the last command; False (no-op) when the log is empty."""
        if not self._undo:
            return False
        self._redo.append(self._current)
        self._current = self._undo.pop()
        return True

    def redo(self) -> bool:
        if not self._redo:
            return False
        self._undo.append(self._current)
        self._current = self._redo.pop()
        return True

    def replace(self, mcsg: Mcsg) -> None:
        """Swap in an imported graph; history does not survive the swap."""
        self._current = mcsg
        self._undo.clear()
        self._redo.clear()


def replay_log(original: Mcsg, log: tuple[EditCommand, ...] | list[EditCommand]) -> Mcsg:
    """Apply a command log to a pristine graph; reproduces the edited state."""
    current = original
    for cmd in log:
        current = apply_edit(current, cmd)
    return current


def export_document(mcsg: Mcsg) -> dict:
    """Canonically ordered schema-version-2 document for an Mcsg."""
    nodes: list[dict] = []
    for cid in sorted(mcsg.channel_ids):
        entry: dict = {"id": cid, "kind": "channel"}
        if mcsg.mz.get(cid) is not None:
            entry["mz"] = mcsg.mz[cid]
        nodes.append(entry)
    for level in range(mcsg.hierarchy.n_levels):
        for cid in sorted(mcsg.hierarchy.levels[level]):
            node = mcsg.hierarchy.communities[cid]
            nodes.append({
                "id": cid,
                "kind": "community",
                "level": node.level,
                "members": sorted(node.members),
                "parent": node.parent,
            })
    edges: list[dict] = []
    for (a, b), w in sorted(mcsg.graph.edges.items()):
        edges.append({"source": a, "target": b, "kind": "channel", "weight": w})
    for level_edges in mcsg.community_edges:
        for (a, b), w in sorted(level_edges.items()):
            edges.append({"source": a, "target": b, "kind": "community", "weight": w})
    return {
        "mcsg_version": SCHEMA_VERSION,
        "dataset_name": mcsg.dataset_name,
        "hierarchy": mcsg.hierarchy.n_levels,
        "nodes": nodes,
        "edges": edges,
        "edit_log": [cmd.to_json() for cmd in mcsg.edit_log],
    }


def export_json(mcsg: Mcsg) -> str:
    """Serialize with stable ordering and shortest round-trip decimals."""
    return json.dumps(export_document(mcsg), indent=2) + "\n"


def _parse_nodes(raw_nodes: list) -> tuple[dict[str, float | None], dict[str, CommunityNode],
                                           list[str], dict[str, int]]:
    mz: dict[str, float | None] = {}
    communities: dict[str, CommunityNode] = {}
    community_order: list[str] = []
    positions: dict[str, int] = {}
    seen: set[str] = set()
    for i, entry in enumerate(raw_nodes):
        where = f"nodes[{i}]"
        if not isinstance(entry, dict):
            raise ImportDocumentError(f"{where}: expected an object")
        node_id = entry.get("id")
        if not isinstance(node_id, str) or not node_id:
            raise ImportDocumentError(f"{where}.id: expected a nonempty string")
        if node_id in seen:
            raise ImportDocumentError(f"{where}.id: duplicate node id {node_id!r}")
        seen.add(node_id)
        positions[node_id] = i
        kind = entry.get("kind")
        if kind == "channel":
            value = entry.get("mz")
            if value is not None and (not isinstance(value, (int, float)) or isinstance(value, bool)
                                      or value <= 0):
                raise ImportDocumentError(f"{where}.mz: expected a positive number")
            mz[node_id] = float(value) if value is not None else None
        elif kind == "community":
            level = entry.get("level")
            if not isinstance(level, int) or isinstance(level, bool) or level < 0:
                raise ImportDocumentError(f"{where}.level: expected a non-negative integer")
            members = entry.get("members")
            if not isinstance(members, list) or not members \
                    or not all(isinstance(mbr, str) for mbr in members):
                raise ImportDocumentError(f"{where}.members: expected a nonempty list of channel ids")
            if len(set(members)) != len(members):
                raise ImportDocumentError(f"{where}.members: duplicate member")
            parent = entry.get("parent")
            if parent is not None and not isinstance(parent, str):
                raise ImportDocumentError(f"{where}.parent: expected a community id or null")
            communities[node_id] = CommunityNode(id=node_id, level=level,
                                                 members=frozenset(members), parent=parent)
            community_order.append(node_id)
        else:
            raise ImportDocumentError(f"{where}.kind: expected 'channel' or 'community', got {kind!r}")
    return mz, communities, community_order, positions


def import_document(doc: dict) -> Mcsg:
    """Validate a schema-version-2 document and rebuild the Mcsg.

    Errors carry a JSON-path locator for the offending element.
    """
    if not isinstance(doc, dict):
        raise ImportDocumentError("document: expected a JSON object")
    version = doc.get("mcsg_version")
    if version != SCHEMA_VERSION:
        raise ImportDocumentError(f"mcsg_version: unsupported version {version!r} "
                                  f"(expected {SCHEMA_VERSION})")
    for key, kind in (("dataset_name", str), ("hierarchy", int),
                      ("nodes", list), ("edges", list), ("edit_log", list)):
        if key not in doc:
            raise ImportDocumentError(f"{key}: missing required field")
        if not isinstance(doc[key], kind) or (kind is int and isinstance(doc[key], bool)):
            raise ImportDocumentError(f"{key}: expected {kind.__name__}")

    mz, communities, community_order, positions = _parse_nodes(doc["nodes"])
    channel_ids = tuple(cid for cid in mz)

    channel_edges: dict[tuple[str, str], float] = {}
    community_edge_list: list[tuple[str, str, float]] = []
    seen_pairs: set[tuple[str, str]] = set()
    for i, entry in enumerate(doc["edges"]):
        where = f"edges[{i}]"
        if not isinstance(entry, dict):
            raise ImportDocumentError(f"{where}: expected an object")
        source, target = entry.get("source"), entry.get("target")
        for key, value in (("source", source), ("target", target)):
            if not isinstance(value, str):
                raise ImportDocumentError(f"{where}.{key}: expected a node id")
            if value not in mz and value not in communities:
                raise ImportDocumentError(f"{where}.{key}: unknown node id {value!r}")
        if source == target:
            raise ImportDocumentError(f"{where}: self-edge on {source!r}")
        weight = entry.get("weight")
        if not isinstance(weight, (int, float)) or isinstance(weight, bool) \
                or not 0.0 < weight <= 1.0:
            raise ImportDocumentError(f"{where}.weight: expected a number in (0, 1]")
        pair = (source, target) if source < target else (target, source)
        if pair in seen_pairs:
            raise ImportDocumentError(f"{where}: duplicate edge {pair[0]!r}--{pair[1]!r}")
        seen_pairs.add(pair)
        kind = entry.get("kind")
        if kind == "channel":
            for key, value in (("source", source), ("target", target)):
                if value not in mz:
                    raise ImportDocumentError(f"{where}.{key}: {value!r} is not a channel node")
            channel_edges[pair] = float(weight)
        elif kind == "community":
            for key, value in (("source", source), ("target", target)):
                if value not in communities:
                    raise ImportDocumentError(f"{where}.{key}: {value!r} is not a community node")
            if communities[source].level != communities[target].level:
                raise ImportDocumentError(f"{where}: community edge endpoints are at different levels")
            community_edge_list.append((pair[0], pair[1], float(weight)))
        else:
            raise ImportDocumentError(f"{where}.kind: expected 'channel' or 'community', got {kind!r}")

    graph = ChannelGraph(nodes=channel_ids, edges=channel_edges)
    non_isolated = {n for pair in channel_edges for n in pair}

    depth = doc["hierarchy"]
    levels_present = sorted({node.level for node in communities.values()})
    if depth < 0 or (communities and levels_present != list(range(depth))) \
            or (not communities and depth != 0):
        raise ImportDocumentError(f"hierarchy: level count {depth} does not match community levels "
                                  f"{levels_present}")

    levels: list[tuple[str, ...]] = [() for _ in range(depth)]
    per_level_ids: dict[int, list[str]] = {}
    for cid in community_order:
        per_level_ids.setdefault(communities[cid].level, []).append(cid)
    for level in range(depth):
        ids = per_level_ids.get(level, [])
        assigned: dict[str, str] = {}
        for cid in ids:
            node = communities[cid]
            where = f"nodes[{positions[cid]}]"
            for j, member in enumerate(sorted(node.members)):
                if member not in mz:
                    raise ImportDocumentError(
                        f"{where}.members[{j}]: unknown channel id {member!r}")
                if member not in non_isolated:
                    raise ImportDocumentError(
                        f"{where}.members[{j}]: channel {member!r} has no channel edge "
                        f"but is assigned to community {cid!r}")
                if member in assigned:
                    raise ImportDocumentError(
                        f"{where}.members[{j}]: channel {member!r} already in {assigned[member]!r}")
                assigned[member] = cid
            if node.parent is not None:
                parent = communities.get(node.parent)
                if parent is None:
                    raise ImportDocumentError(f"{where}.parent: unknown community {node.parent!r}")
                if parent.level != level - 1:
                    raise ImportDocumentError(f"{where}.parent: {node.parent!r} is at level "
                                              f"{parent.level}, expected {level - 1}")
                if not node.members <= parent.members:
                    raise ImportDocumentError(f"{where}.members: not a subset of parent "
                                              f"{node.parent!r}")
            elif level > 0:
                raise ImportDocumentError(f"{where}.parent: required at level {level}")
        if set(assigned) != non_isolated:
            missing = sorted(non_isolated - set(assigned))
            raise ImportDocumentError(f"hierarchy: level {level} misses channel {missing[0]!r}")
        levels[level] = tuple(ids)

    hierarchy = CommunityHierarchy(levels=tuple(levels), communities=communities,
                                   isolated=frozenset(set(channel_ids) - non_isolated))

    membership_cache = {level: hierarchy.membership(level) for level in range(depth)}
    recomputed = {level: community_edges_for_membership(graph, membership_cache[level])
                  for level in range(depth)}
    per_level: list[dict[tuple[str, str], float]] = [dict() for _ in range(depth)]
    for a, b, w in community_edge_list:
        level = communities[a].level
        expected = recomputed[level].get((a, b))
        if expected is None:
            raise ImportDocumentError(f"edges: community edge {a!r}--{b!r} has no channel edge "
                                      f"between the member sets")
        if abs(expected - w) > 1e-9:
            raise ImportDocumentError(f"edges: community edge {a!r}--{b!r} weight {w!r} violates "
                                      f"the mean-weight law (expected {expected!r})")
        per_level[level][(a, b)] = float(w)
    for level in range(depth):
        missing = set(recomputed[level]) - set(per_level[level])
        if missing:
            a, b = sorted(missing)[0]
            raise ImportDocumentError(f"edges: missing community edge {a!r}--{b!r} at level {level}")

    log = tuple(EditCommand.from_json(entry, where=f"edit_log[{i}]")
                for i, entry in enumerate(doc["edit_log"]))

    next_index = 0
    for cid in communities:
        if cid.startswith("k") and cid[1:].isdigit():
            next_index = max(next_index, int(cid[1:]) + 1)

    return Mcsg(
        dataset_name=doc["dataset_name"],
        channel_ids=channel_ids,
        mz=mz,
        graph=graph,
        hierarchy=hierarchy,
        community_edges=tuple(per_level),
        edit_log=log,
        next_community_index=next_index,
    )


def import_json(text: str | bytes | dict) -> Mcsg:
    """Parse and validate a JSON document (text or already-parsed dict)."""
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ImportDocumentError(
                f"document: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    else:
        doc = text
    return import_document(doc)

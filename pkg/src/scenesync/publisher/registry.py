"""Connected-node bookkeeping for the master."""

import time
from dataclasses import dataclass, field


@dataclass
class NodeInfo:
    node_id: str  # 16 bytes as lowercase hex
    device_name: str
    role: str  # "client" | "dashboard"
    connected_at: float
    last_seen: float

    def to_dict(self) -> dict:
        return {
            "node_id": self.node_id,
            "device_name": self.device_name,
            "role": self.role,
            "connected_at": self.connected_at,
            "last_seen": self.last_seen,
        }


class NodeRegistry:
    """node_id -> NodeInfo map; mutations notify the registered listener."""

    def __init__(self, on_event=None):
        self._nodes = {}
        self._on_event = on_event or (lambda event, node: None)

    def add(self, node_id: str, device_name: str, role: str) -> NodeInfo:
        now = time.time()
        node = NodeInfo(
            node_id=node_id,
            device_name=device_name,
            role=role,
            connected_at=now,
            last_seen=now,
        )
        self._nodes[node_id] = node
        self._on_event("node_added", node)
        return node

    def remove(self, node_id: str):
        node = self._nodes.pop(node_id, None)
        if node is not None:
            self._on_event("node_removed", node)
        return node

    def rename(self, node_id: str, new_name: str) -> NodeInfo:
        node = self._nodes[node_id]
        node.device_name = new_name
        self._on_event("node_renamed", node)
        return node

    def touch(self, node_id: str) -> None:
        node = self._nodes.get(node_id)
        if node is not None:
            node.last_seen = time.time()

    def get(self, node_id: str):
        return self._nodes.get(node_id)

    def list(self) -> list:
        return sorted(self._nodes.values(), key=lambda n: n.connected_at)

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

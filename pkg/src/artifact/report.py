"""Pass/fail bookkeeping shared by every verification routine."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple


@dataclass
class Report:
    ok: bool = True
    checks: List[Tuple[str, bool, str]] = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append((name, bool(ok), detail))
        if not ok:
            self.ok = False

    def extend(self, other: "Report", prefix: str = "") -> "Report":
        for name, ok, detail in other.checks:
            self.add(prefix + name, ok, detail)
        return self

    def first_failure(self) -> Optional[str]:
        for name, ok, detail in self.checks:
            if not ok:
                return f"{name}: {detail}" if detail else name
        return None

    def to_json(self):
        return {"ok": self.ok, "checks": [{"check": n, "ok": o, "detail": d} for n, o, d in self.checks]}

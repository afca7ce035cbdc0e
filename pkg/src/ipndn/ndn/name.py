"""Hierarchical NDN names."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union
from urllib.parse import quote, unquote_to_bytes

Component = Union[bytes, str, int]

# Characters left unescaped in the textual form; everything else is %XX.
_SAFE = "-._~"


def _as_bytes(component: Component) -> bytes:
    if isinstance(component, bytes):
        return component
    if isinstance(component, int):
        return str(component).encode("ascii")
    return component.encode("utf-8")


@dataclass(frozen=True)
class Name:
    """An ordered sequence of non-empty byte-string components.

    The zero-component name is the root ``/``. It is only meaningful as a
    FIB prefix; packets always carry at least one component.
    """

    components: tuple[bytes, ...] = ()

    def __post_init__(self) -> None:
        comps = tuple(_as_bytes(c) for c in self.components)
        for c in comps:
            if not c:
                raise ValueError("empty name component")
            if b"/" in c:
                raise ValueError(f"name component contains '/': {c!r}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def of(cls, *components: Component) -> Name:
        return cls(tuple(_as_bytes(c) for c in components))

    @classmethod
    def parse(cls, text: str) -> Name:
        if not text.startswith("/"):
            raise ValueError(f"name must start with '/': {text!r}")
        if text == "/":
            return cls(())
        parts = text[1:].split("/")
        return cls(tuple(unquote_to_bytes(p) for p in parts))

    def __str__(self) -> str:
        if not self.components:
            return "/"
        return "".join("/" + quote(c, safe=_SAFE) for c in self.components)

    def __repr__(self) -> str:
        return f"Name({str(self)!r})"

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return Name(self.components[index])
        return self.components[index]

    def __add__(self, other: Name | Iterable[Component]) -> Name:
        if isinstance(other, Name):
            return Name(self.components + other.components)
        return Name(self.components + tuple(_as_bytes(c) for c in other))

    def append(self, *components: Component) -> Name:
        return self + components

    def is_prefix_of(self, other: Name) -> bool:
        n = len(self.components)
        return n <= len(other.components) and other.components[:n] == self.components

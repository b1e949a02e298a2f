"""Weights-file and architecture-description I/O.

The weights container (".nrpw") is a minimal bit-exact format:

    bytes 0..3    magic b"NRPW"
    bytes 4..7    format version (1) as little-endian uint32
    bytes 8..15   header byte length L as little-endian uint64
    bytes 16..16+L   UTF-8 JSON array of per-layer records
                  {"name","out","in","kh","kw","dtype":"f32","offset","len"}
                  offset/len are byte positions inside the payload region
    bytes 16+L..  payload: raw little-endian IEEE-754 float32, row-major
                  [out][in][kh][kw]

Writes are canonical (sorted header keys, no whitespace) so identical models
produce identical bytes.

The architecture description is a JSON document with a ``layers`` array; see
``ArchSpec``.
"""
from __future__ import annotations

import json
import logging
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, ValidationError

log = logging.getLogger(__name__)

MAGIC = b"NRPW"
VERSION = 1
_HEADER_START = 16


def _is_pos_int(x) -> bool:
    # bool is an int subclass; JSON true must not pass for 1
    return isinstance(x, int) and not isinstance(x, bool) and x > 0


@dataclass(frozen=True)
class LayerTensor:
    """One conv layer's weights: shape [out][in][kh][kw], float32."""

    name: str
    out_channels: int
    in_channels: int
    kh: int
    kw: int
    values: np.ndarray  # float32, 1-D, row-major

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float32).reshape(-1)
        object.__setattr__(self, "values", vals)
        for label, dim in (("out", self.out_channels), ("in", self.in_channels),
                           ("kh", self.kh), ("kw", self.kw)):
            if not _is_pos_int(dim):
                raise ValidationError(
                    f"layer {self.name!r}: dimension {label}={dim} must be a positive integer")
        expected = self.out_channels * self.in_channels * self.kh * self.kw
        if vals.size != expected:
            raise ValidationError(
                f"layer {self.name!r}: {vals.size} values, expected "
                f"{self.out_channels}x{self.in_channels}x{self.kh}x{self.kw}={expected}")
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise ValidationError(f"layer {self.name!r}: non-finite value at index {bad}")

    @property
    def filter_size(self) -> int:
        return self.in_channels * self.kh * self.kw

    def filters(self) -> np.ndarray:
        """View of the values as an (out_channels, in*kh*kw) matrix."""
        return self.values.reshape(self.out_channels, self.filter_size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LayerTensor):
            return NotImplemented
        return (self.name == other.name
                and self.out_channels == other.out_channels
                and self.in_channels == other.in_channels
                and self.kh == other.kh and self.kw == other.kw
                and self.values.tobytes() == other.values.tobytes())


@dataclass(frozen=True)
class ModelWeights:
    """Ordered collection of layer tensors with unique names."""

    layers: tuple[LayerTensor, ...]

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        names = [t.name for t in self.layers]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValidationError(f"duplicate layer names: {dupes}")

    def __iter__(self):
        return iter(self.layers)

    def __len__(self) -> int:
        return len(self.layers)

    def layer(self, name: str) -> LayerTensor:
        for t in self.layers:
            if t.name == name:
                return t
        raise KeyError(name)

    @property
    def names(self) -> list[str]:
        return [t.name for t in self.layers]


@dataclass(frozen=True)
class ArchLayer:
    """Static description of one conv layer."""

    name: str
    in_channels: int
    out_channels: int
    kh: int
    kw: int
    out_h: int
    out_w: int
    inputs: tuple[str, ...] = ()
    prunable: bool = True
    coupling_group: str | None = None
    min_filters_floor: int = 1


@dataclass(frozen=True)
class ArchSpec:
    """Validated layer graph: acyclic, channel counts consistent.

    ``inputs`` lists a layer's upstream producers; a consumer's in_channels
    must equal the sum of its inputs' out_channels (concatenation semantics).
    Layers with empty ``inputs`` are externally fed and their in_channels is
    unconstrained. Layers sharing a coupling_group must keep equal
    out_channels.
    """

    layers: tuple[ArchLayer, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        index = {}
        for layer in self.layers:
            if layer.name in index:
                raise ValidationError(f"duplicate arch layer name {layer.name!r}")
            index[layer.name] = layer
        object.__setattr__(self, "_index", index)
        self._validate()

    def _validate(self):
        for layer in self.layers:
            for dim_name in ("in_channels", "out_channels", "kh", "kw", "out_h",
                             "out_w", "min_filters_floor"):
                dim = getattr(layer, dim_name)
                if not _is_pos_int(dim):
                    raise ValidationError(
                        f"arch layer {layer.name!r}: {dim_name}={dim} must be a positive integer")
            for src in layer.inputs:
                if src not in self._index:
                    raise ValidationError(
                        f"arch layer {layer.name!r}: unknown input {src!r}")
            if layer.inputs:
                fed = sum(self._index[s].out_channels for s in layer.inputs)
                if fed != layer.in_channels:
                    raise ValidationError(
                        f"channel mismatch: layer {layer.name!r} declares in_channels="
                        f"{layer.in_channels} but its inputs {list(layer.inputs)} "
                        f"supply {fed}")
        self._check_acyclic()
        groups: dict[str, set[int]] = {}
        for layer in self.layers:
            if layer.coupling_group is not None:
                groups.setdefault(layer.coupling_group, set()).add(layer.out_channels)
        for group, widths in groups.items():
            if len(widths) > 1:
                raise ValidationError(
                    f"coupling group {group!r} has unequal out_channels {sorted(widths)}")

    def _check_acyclic(self):
        # Kahn's algorithm over the inputs relation.
        indeg = {l.name: len(l.inputs) for l in self.layers}
        consumers: dict[str, list[str]] = {l.name: [] for l in self.layers}
        for layer in self.layers:
            for src in layer.inputs:
                consumers[src].append(layer.name)
        ready = [n for n, d in indeg.items() if d == 0]
        seen = 0
        while ready:
            name = ready.pop()
            seen += 1
            for consumer in consumers[name]:
                indeg[consumer] -= 1
                if indeg[consumer] == 0:
                    ready.append(consumer)
        if seen != len(self.layers):
            stuck = sorted(n for n, d in indeg.items() if d > 0)
            raise ValidationError(f"cycle detected among layers {stuck}")

    def __iter__(self):
        return iter(self.layers)

    def __len__(self) -> int:
        return len(self.layers)

    def layer(self, name: str) -> ArchLayer:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(name) from None

    def consumers_of(self, name: str) -> list[ArchLayer]:
        return [l for l in self.layers if name in l.inputs]

    def coupling_members(self, group: str) -> list[ArchLayer]:
        return [l for l in self.layers if l.coupling_group == group]


@dataclass(frozen=True)
class BoundModel:
    """An ArchSpec paired with the tensor for each of its layers."""

    arch: ArchSpec
    weights: ModelWeights

    def tensor(self, name: str) -> LayerTensor:
        return self.weights.layer(name)

    def prunable_layers(self) -> list[ArchLayer]:
        return [l for l in self.arch if l.prunable]


def load_weights(path) -> ModelWeights:
    """Parse a .nrpw file; errors name the offending byte offset."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read weights file {path}: {exc}") from exc
    return parse_weights(blob)


def parse_weights(blob: bytes) -> ModelWeights:
    if len(blob) < _HEADER_START:
        raise ParseError(
            f"file too short for fixed header: {len(blob)} bytes, need {_HEADER_START}")
    if blob[0:4] != MAGIC:
        raise ParseError(f"bad magic {blob[0:4]!r} at byte 0, expected {MAGIC!r}")
    (version,) = struct.unpack_from("<I", blob, 4)
    if version != VERSION:
        raise ParseError(f"unsupported version {version} at byte 4, expected {VERSION}")
    (header_len,) = struct.unpack_from("<Q", blob, 8)
    header_end = _HEADER_START + header_len
    if header_end > len(blob):
        raise ParseError(
            f"header length {header_len} at byte 8 runs past end of file "
            f"({len(blob)} bytes total)")
    try:
        header = json.loads(blob[_HEADER_START:header_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"malformed JSON header at byte {_HEADER_START}: {exc}") from exc
    if not isinstance(header, list):
        raise ParseError(f"header at byte {_HEADER_START} must be a JSON array")

    payload = blob[header_end:]
    layers = []
    extent = 0
    for i, rec in enumerate(header):
        if not isinstance(rec, dict):
            raise ParseError(f"header entry {i} is not an object")
        try:
            name = rec["name"]
            out, inc = rec["out"], rec["in"]
            kh, kw = rec["kh"], rec["kw"]
            dtype = rec["dtype"]
            offset, length = rec["offset"], rec["len"]
        except KeyError as exc:
            raise ParseError(f"header entry {i} missing key {exc}") from exc
        if dtype != "f32":
            raise ParseError(f"header entry {i} ({name!r}): unsupported dtype {dtype!r}")
        for label, dim in (("out", out), ("in", inc), ("kh", kh), ("kw", kw)):
            if not _is_pos_int(dim):
                raise ParseError(f"header entry {i} ({name!r}): bad {label}={dim!r}")
        count = out * inc * kh * kw
        if (not isinstance(offset, int) or not isinstance(length, int)
                or isinstance(offset, bool) or isinstance(length, bool) or offset < 0):
            raise ParseError(f"header entry {i} ({name!r}): bad offset/len")
        if length != 4 * count:
            raise ParseError(
                f"header entry {i} ({name!r}): len {length} disagrees with "
                f"dimensions ({count} f32 values need {4 * count} bytes)")
        seg_end = offset + length
        if seg_end > len(payload):
            raise ParseError(
                f"layer {name!r} data ends at payload byte {seg_end} "
                f"(file byte {header_end + seg_end}) but only {len(payload)} "
                f"payload bytes are present")
        extent = max(extent, seg_end)
        vals = np.frombuffer(payload, dtype="<f4", count=count, offset=offset)
        finite = np.isfinite(vals)
        if not finite.all():
            bad = int(np.flatnonzero(~finite)[0])
            raise ParseError(
                f"layer {name!r}: non-finite value at file byte "
                f"{header_end + offset + 4 * bad}")
        try:
            layers.append(LayerTensor(str(name), out, inc, kh, kw, vals))
        except ValidationError as exc:
            raise ParseError(f"header entry {i}: {exc}") from exc
    if extent != len(payload):
        raise ParseError(
            f"trailing garbage: payload holds {len(payload)} bytes but the "
            f"header accounts for {extent}")
    try:
        return ModelWeights(tuple(layers))
    except ValidationError as exc:
        raise ParseError(str(exc)) from exc


def write_weights(weights: ModelWeights, path) -> None:
    """Serialize canonically; two writes of the same model are byte-identical."""
    with open(path, "wb") as fh:
        fh.write(serialize_weights(weights))


def serialize_weights(weights: ModelWeights) -> bytes:
    header = []
    offset = 0
    payloads = []
    for t in weights:
        data = t.values.astype("<f4", copy=False).tobytes()
        header.append({
            "name": t.name, "out": t.out_channels, "in": t.in_channels,
            "kh": t.kh, "kw": t.kw, "dtype": "f32",
            "offset": offset, "len": len(data),
        })
        payloads.append(data)
        offset += len(data)
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    parts = [MAGIC, struct.pack("<I", VERSION), struct.pack("<Q", len(header_bytes)),
             header_bytes, *payloads]
    return b"".join(parts)


def load_arch(path) -> ArchSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read architecture file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed architecture JSON in {path}: {exc}") from exc
    return arch_from_dict(doc)


def arch_from_dict(doc) -> ArchSpec:
    if not isinstance(doc, dict) or not isinstance(doc.get("layers"), list):
        raise ParseError("architecture document must be an object with a 'layers' array")
    layers = []
    for i, rec in enumerate(doc["layers"]):
        if not isinstance(rec, dict):
            raise ParseError(f"arch layer entry {i} is not an object")
        try:
            layers.append(ArchLayer(
                name=str(rec["name"]),
                in_channels=rec["in_channels"],
                out_channels=rec["out_channels"],
                kh=rec["kh"], kw=rec["kw"],
                out_h=rec["out_h"], out_w=rec["out_w"],
                inputs=tuple(rec.get("inputs", ())),
                prunable=bool(rec.get("prunable", True)),
                coupling_group=rec.get("coupling_group"),
                min_filters_floor=rec.get("min_filters_floor", 1),
            ))
        except KeyError as exc:
            raise ParseError(f"arch layer entry {i} missing key {exc}") from exc
    return ArchSpec(tuple(layers))


def arch_to_dict(arch: ArchSpec) -> dict:
    layers = []
    for l in arch:
        rec = {
            "name": l.name, "in_channels": l.in_channels, "out_channels": l.out_channels,
            "kh": l.kh, "kw": l.kw, "out_h": l.out_h, "out_w": l.out_w,
            "inputs": list(l.inputs), "prunable": l.prunable,
            "min_filters_floor": l.min_filters_floor,
        }
        if l.coupling_group is not None:
            rec["coupling_group"] = l.coupling_group
        layers.append(rec)
    return {"layers": layers}


def write_arch(arch: ArchSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(arch_to_dict(arch), fh, indent=2, sort_keys=True)
        fh.write("\n")


def arch_from_weights(weights: ModelWeights) -> ArchSpec:
    """Fallback arch for analysis without a real architecture file.

    Every layer stands alone (no connectivity, 1x1 output) and is prunable;
    good enough for redundancy scoring, useless for FLOPs.
    """
    layers = [ArchLayer(name=t.name, in_channels=t.in_channels,
                        out_channels=t.out_channels, kh=t.kh, kw=t.kw,
                        out_h=1, out_w=1)
              for t in weights]
    return ArchSpec(tuple(layers))


def bind(weights: ModelWeights, arch: ArchSpec) -> BoundModel:
    """Pair each arch layer with its tensor, checking every dimension."""
    available = set(weights.names)
    for layer in arch:
        if layer.name not in available:
            raise ValidationError(f"arch layer {layer.name!r} missing from weights")
        t = weights.layer(layer.name)
        got = (t.out_channels, t.in_channels, t.kh, t.kw)
        want = (layer.out_channels, layer.in_channels, layer.kh, layer.kw)
        if got != want:
            raise ValidationError(
                f"layer {layer.name!r}: tensor is {got} (out,in,kh,kw) but the "
                f"architecture declares {want}")
    extra = [n for n in weights.names if n not in {l.name for l in arch}]
    if extra:
        log.warning("weights contain %d layer(s) not referenced by the architecture: %s",
                    len(extra), ", ".join(extra))
    return BoundModel(arch=arch, weights=weights)

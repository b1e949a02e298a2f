import json
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srrplan.errors import ParseError, ValidationError
from srrplan.weights_io import (ArchLayer, ArchSpec, LayerTensor, ModelWeights,
                                arch_from_dict, arch_from_weights, arch_to_dict,
                                bind, parse_weights, serialize_weights)


def tensor(name="conv1", out=4, inc=3, kh=3, kw=3, seed=0):
    rng = np.random.default_rng(seed)
    return LayerTensor(name, out, inc, kh, kw,
                       rng.normal(size=out * inc * kh * kw).astype(np.float32))


class TestLayerTensor:
    def test_filters_view_shape(self):
        t = tensor(out=4, inc=3)
        assert t.filters().shape == (4, 27)

    def test_rejects_bad_dims(self):
        with pytest.raises(ValidationError):
            LayerTensor("x", 0, 1, 1, 1, np.zeros(0, dtype=np.float32))
        with pytest.raises(ValidationError):
            LayerTensor("x", True, 1, 1, 1, np.zeros(1, dtype=np.float32))

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValidationError, match="expected"):
            LayerTensor("x", 2, 2, 1, 1, np.zeros(3, dtype=np.float32))

    def test_rejects_non_finite(self):
        vals = np.zeros(4, dtype=np.float32)
        vals[2] = np.nan
        with pytest.raises(ValidationError, match="index 2"):
            LayerTensor("x", 4, 1, 1, 1, vals)

    def test_bitwise_equality(self):
        a, b = tensor(seed=1), tensor(seed=1)
        assert a == b
        assert a != tensor(seed=2)


class TestModelWeights:
    def test_duplicate_names_rejected(self):
        with pytest.raises(ValidationError, match="duplicate"):
            ModelWeights((tensor("a"), tensor("a")))

    def test_lookup(self):
        w = ModelWeights((tensor("a"), tensor("b", seed=1)))
        assert w.layer("b").name == "b"
        with pytest.raises(KeyError):
            w.layer("c")


class TestRoundTrip:
    def test_simple_round_trip(self):
        w = ModelWeights((tensor("a"), tensor("b", out=2, inc=5, seed=1)))
        again = parse_weights(serialize_weights(w))
        assert tuple(again) == tuple(w)

    def test_writes_are_canonical(self):
        w = ModelWeights((tensor("a"),))
        assert serialize_weights(w) == serialize_weights(w)

    def test_round_trip_is_byte_stable(self):
        w = ModelWeights((tensor("a"), tensor("b", seed=3)))
        blob = serialize_weights(w)
        assert serialize_weights(parse_weights(blob)) == blob

    @given(st.lists(
        st.tuples(st.integers(1, 5), st.integers(1, 4),
                  st.integers(1, 3), st.integers(1, 3), st.integers(0, 2 ** 31)),
        min_size=1, max_size=4))
    @settings(max_examples=40, deadline=None)
    def test_round_trip_property(self, dims):
        tensors = []
        for i, (out, inc, kh, kw, seed) in enumerate(dims):
            rng = np.random.default_rng(seed)
            vals = rng.normal(size=out * inc * kh * kw).astype(np.float32)
            tensors.append(LayerTensor(f"l{i}", out, inc, kh, kw, vals))
        w = ModelWeights(tuple(tensors))
        blob = serialize_weights(w)
        again = parse_weights(blob)
        assert tuple(again) == tuple(w)
        assert serialize_weights(again) == blob


def valid_blob():
    return serialize_weights(ModelWeights((tensor("a"), tensor("b", seed=1))))


class TestParseErrors:
    def test_too_short(self):
        with pytest.raises(ParseError, match="too short"):
            parse_weights(b"NR")

    def test_bad_magic(self):
        blob = b"XXXX" + valid_blob()[4:]
        with pytest.raises(ParseError, match="byte 0"):
            parse_weights(blob)

    def test_bad_version(self):
        blob = bytearray(valid_blob())
        blob[4:8] = struct.pack("<I", 9)
        with pytest.raises(ParseError, match="version 9"):
            parse_weights(bytes(blob))

    def test_header_runs_past_end(self):
        blob = bytearray(valid_blob())
        blob[8:16] = struct.pack("<Q", 10 ** 9)
        with pytest.raises(ParseError, match="past end"):
            parse_weights(bytes(blob))

    def test_header_not_json(self):
        blob = bytearray(valid_blob())
        blob[16] = ord("?")
        with pytest.raises(ParseError, match="byte 16"):
            parse_weights(bytes(blob))

    def test_header_not_array(self):
        header = b'{"a":1}'
        blob = b"NRPW" + struct.pack("<I", 1) + struct.pack("<Q", len(header)) + header
        with pytest.raises(ParseError, match="array"):
            parse_weights(blob)

    def test_unsupported_dtype(self):
        header = json.dumps([{"name": "a", "out": 1, "in": 1, "kh": 1, "kw": 1,
                              "dtype": "f64", "offset": 0, "len": 8}]).encode()
        blob = (b"NRPW" + struct.pack("<I", 1) + struct.pack("<Q", len(header))
                + header + b"\x00" * 8)
        with pytest.raises(ParseError, match="dtype"):
            parse_weights(blob)

    def test_bool_dimension_rejected(self):
        header = json.dumps([{"name": "a", "out": True, "in": 1, "kh": 1, "kw": 1,
                              "dtype": "f32", "offset": 0, "len": 4}]).encode()
        blob = (b"NRPW" + struct.pack("<I", 1) + struct.pack("<Q", len(header))
                + header + b"\x00" * 4)
        with pytest.raises(ParseError, match="bad out"):
            parse_weights(blob)

    def test_len_disagrees_with_dims(self):
        header = json.dumps([{"name": "a", "out": 2, "in": 1, "kh": 1, "kw": 1,
                              "dtype": "f32", "offset": 0, "len": 4}]).encode()
        blob = (b"NRPW" + struct.pack("<I", 1) + struct.pack("<Q", len(header))
                + header + b"\x00" * 4)
        with pytest.raises(ParseError, match="disagrees"):
            parse_weights(blob)

    def test_segment_past_payload_names_byte(self):
        header = json.dumps([{"name": "a", "out": 2, "in": 1, "kh": 1, "kw": 1,
                              "dtype": "f32", "offset": 0, "len": 8}]).encode()
        blob = (b"NRPW" + struct.pack("<I", 1) + struct.pack("<Q", len(header))
                + header + b"\x00" * 4)
        with pytest.raises(ParseError, match="payload byte 8"):
            parse_weights(blob)

    def test_non_finite_reports_file_byte(self):
        w = ModelWeights((LayerTensor("a", 2, 1, 1, 1,
                                      np.array([1.0, 2.0], dtype=np.float32)),))
        blob = bytearray(serialize_weights(w))
        # second float of the payload -> overwrite with +inf
        payload_start = len(blob) - 8
        blob[payload_start + 4:payload_start + 8] = struct.pack("<f", np.inf)
        with pytest.raises(ParseError, match=f"file byte {payload_start + 4}"):
            parse_weights(bytes(blob))

    def test_trailing_garbage(self):
        blob = valid_blob() + b"\x00\x01\x02"
        with pytest.raises(ParseError, match="trailing garbage"):
            parse_weights(blob)

    def test_duplicate_layer_names(self):
        header = json.dumps([
            {"name": "a", "out": 1, "in": 1, "kh": 1, "kw": 1, "dtype": "f32",
             "offset": 0, "len": 4},
            {"name": "a", "out": 1, "in": 1, "kh": 1, "kw": 1, "dtype": "f32",
             "offset": 4, "len": 4},
        ]).encode()
        blob = (b"NRPW" + struct.pack("<I", 1) + struct.pack("<Q", len(header))
                + header + b"\x00" * 8)
        with pytest.raises(ParseError, match="duplicate"):
            parse_weights(blob)

    def test_fuzz_never_crashes(self):
        # mutated valid files either parse or raise ParseError, nothing else
        base = valid_blob()
        rng = np.random.default_rng(42)
        for _ in range(300):
            blob = bytearray(base)
            for _ in range(int(rng.integers(1, 8))):
                pos = int(rng.integers(0, len(blob)))
                blob[pos] = int(rng.integers(0, 256))
            try:
                parse_weights(bytes(blob))
            except ParseError:
                pass


class TestArchSpec:
    def base_doc(self):
        return {"layers": [
            {"name": "c1", "in_channels": 3, "out_channels": 4, "kh": 3, "kw": 3,
             "out_h": 8, "out_w": 8, "inputs": []},
            {"name": "c2", "in_channels": 4, "out_channels": 5, "kh": 1, "kw": 1,
             "out_h": 8, "out_w": 8, "inputs": ["c1"]},
        ]}

    def test_valid_doc_round_trips(self):
        arch = arch_from_dict(self.base_doc())
        again = arch_from_dict(arch_to_dict(arch))
        assert [l.name for l in again] == ["c1", "c2"]
        assert again.layer("c2").inputs == ("c1",)

    def test_duplicate_names(self):
        doc = self.base_doc()
        doc["layers"][1]["name"] = "c1"
        doc["layers"][1]["inputs"] = []
        with pytest.raises(ValidationError, match="duplicate"):
            arch_from_dict(doc)

    def test_unknown_input(self):
        doc = self.base_doc()
        doc["layers"][1]["inputs"] = ["ghost"]
        with pytest.raises(ValidationError, match="unknown input"):
            arch_from_dict(doc)

    def test_channel_sum_mismatch(self):
        doc = self.base_doc()
        doc["layers"][1]["in_channels"] = 7
        with pytest.raises(ValidationError, match="channel mismatch"):
            arch_from_dict(doc)

    def test_concat_inputs_sum(self):
        doc = self.base_doc()
        doc["layers"].append({
            "name": "c3", "in_channels": 9, "out_channels": 2, "kh": 1, "kw": 1,
            "out_h": 8, "out_w": 8, "inputs": ["c1", "c2"]})
        arch = arch_from_dict(doc)
        assert arch.layer("c3").in_channels == 9

    def test_cycle_detected(self):
        doc = {"layers": [
            {"name": "a", "in_channels": 2, "out_channels": 2, "kh": 1, "kw": 1,
             "out_h": 1, "out_w": 1, "inputs": ["b"]},
            {"name": "b", "in_channels": 2, "out_channels": 2, "kh": 1, "kw": 1,
             "out_h": 1, "out_w": 1, "inputs": ["a"]},
        ]}
        with pytest.raises(ValidationError, match="cycle"):
            arch_from_dict(doc)

    def test_coupling_width_mismatch(self):
        doc = self.base_doc()
        doc["layers"][0]["coupling_group"] = "g"
        doc["layers"][1]["coupling_group"] = "g"
        with pytest.raises(ValidationError, match="coupling group"):
            arch_from_dict(doc)

    def test_consumers_and_members(self):
        doc = self.base_doc()
        arch = arch_from_dict(doc)
        assert [l.name for l in arch.consumers_of("c1")] == ["c2"]

    def test_missing_key_is_parse_error(self):
        doc = self.base_doc()
        del doc["layers"][0]["kh"]
        with pytest.raises(ParseError, match="missing key"):
            arch_from_dict(doc)


class TestBind:
    def test_bind_checks_dims(self):
        w = ModelWeights((tensor("c1", out=4, inc=3),))
        arch = ArchSpec((ArchLayer("c1", 3, 5, 3, 3, 8, 8),))
        with pytest.raises(ValidationError, match="architecture declares"):
            bind(w, arch)

    def test_bind_missing_tensor(self):
        w = ModelWeights((tensor("c1"),))
        arch = ArchSpec((ArchLayer("c2", 3, 4, 3, 3, 8, 8),))
        with pytest.raises(ValidationError, match="missing from weights"):
            bind(w, arch)

    def test_extra_tensors_warn_not_fail(self, caplog):
        w = ModelWeights((tensor("c1"), tensor("spare", seed=5)))
        arch = ArchSpec((ArchLayer("c1", 3, 4, 3, 3, 8, 8),))
        with caplog.at_level("WARNING"):
            model = bind(w, arch)
        assert model.tensor("c1").name == "c1"
        assert any("spare" in r.message for r in caplog.records)

    def test_arch_from_weights_standalone(self):
        w = ModelWeights((tensor("c1"), tensor("c2", seed=1)))
        arch = arch_from_weights(w)
        assert all(l.inputs == () for l in arch)
        assert all(l.prunable for l in arch)

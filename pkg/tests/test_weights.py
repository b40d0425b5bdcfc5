import math
import struct

import numpy as np
import pytest

from backbone import (
    BackboneWeights,
    Stream,
    decode_weights,
    encode_weights,
    init_weights,
    layer_manifest,
    load_weights,
    save_weights,
)
from core.errors import CorruptPayload, ShapeError, TruncatedMessage, UnsupportedFormat
from sparse import ConvMode
from .conftest import golden_path


def _tensor_offset(in_channels=3):
    """Byte offset of the first tensor in an encoded weights file"""
    return struct.calcsize("<4sBQII") + sum(2 + len(s.name) + struct.calcsize("<BBII")
                                            for s in layer_manifest(in_channels))


def test_manifest_layout():
    manifest = layer_manifest()
    assert len(manifest) == 4 * 4 * 3 + 2 * 3
    assert len({s.name for s in manifest}) == len(manifest)
    assert manifest[0].name == "local.block1.conv0"
    assert manifest[-1].name == "local_final.conv2"
    assert all(s.stride == 1 for s in manifest if s.mode == ConvMode.SUBMANIFOLD)


@pytest.mark.parametrize("stream, strides", [
    (Stream.LOCAL, [1, 2, 2, 2]),
    (Stream.HIGH, [1, 2, 2, 2]),
    (Stream.MEDIUM, [1, 1, 2, 2]),
    (Stream.LOW, [1, 1, 1, 2]),
])
def test_block_strides_and_channels(weights, stream, strides):
    blocks = weights.streams[stream]
    assert [b.stride for b in blocks] == strides
    assert [b.out_channels for b in blocks] == [16, 32, 64, 64]
    assert blocks[0].sparse.conv.in_channels == 3


def test_init_is_deterministic():
    assert init_weights(42) == init_weights(42)
    assert init_weights(42) != init_weights(43)


def test_init_bounds_and_identity_norm(weights):
    for _, layer in weights.named_layers():
        bound = math.sqrt(6.0 / layer.conv.fan_in)
        assert np.abs(layer.conv.weights).max() <= bound * (1 + 1e-6)
        assert (layer.norm.gamma == 1).all() and (layer.norm.var == 1).all()
        assert (layer.norm.beta == 0).all() and (layer.norm.mean == 0).all()


def test_weights_reject_broken_schedule(weights):
    streams = dict(weights.streams)
    streams[Stream.LOW] = weights.streams[Stream.HIGH]
    with pytest.raises(ShapeError):
        BackboneWeights(streams, weights.collective_final, weights.local_final, weights.seed)


def test_file_round_trip(tmp_path, weights):
    path = str(tmp_path / "w.mrw")
    written = save_weights(weights, path)
    assert written == len(encode_weights(weights))
    loaded = load_weights(path)
    assert loaded == weights
    assert loaded.seed == 42


def test_mean_feature_weights_round_trip():
    w = init_weights(5, in_channels=4)
    assert decode_weights(encode_weights(w)) == w
    assert w.streams[Stream.HIGH][0].sparse.conv.in_channels == 4


def test_decode_rejects_truncation(weights):
    data = encode_weights(weights)
    for cut in (3, 20, _tensor_offset(), len(data) - 1):
        with pytest.raises(TruncatedMessage):
            decode_weights(data[:cut])


def test_decode_rejects_foreign_files(weights):
    data = encode_weights(weights)
    with pytest.raises(UnsupportedFormat):
        decode_weights(b"XXXX" + data[4:])
    with pytest.raises(UnsupportedFormat):
        decode_weights(data[:4] + b"\x02" + data[5:])


def test_decode_rejects_manifest_mismatch(weights):
    data = bytearray(encode_weights(weights))
    # header in_channels 3 -> 4 no longer matches the first block's manifest entry
    struct.pack_into("<I", data, 13, 4)
    with pytest.raises(UnsupportedFormat):
        decode_weights(bytes(data))


def test_decode_rejects_corrupt_tensors(weights):
    data = encode_weights(weights)
    with pytest.raises(CorruptPayload):
        decode_weights(data + b"\x00")
    broken = bytearray(data)
    struct.pack_into("<f", broken, _tensor_offset(), float("nan"))
    with pytest.raises(CorruptPayload):
        decode_weights(bytes(broken))


def test_weights_match_golden(weights):
    with open(golden_path("weights_seed42.mrw"), "rb") as f:
        assert encode_weights(weights) == f.read()

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkd_twostep import BitString
from qkd_twostep.protocol import HEADER_BITS, FrameError, MsgType, WireMessage, decode_frame

fields = st.lists(st.lists(st.integers(0, 1), max_size=70).map(BitString), max_size=5)


@given(st.integers(0, 255), st.sampled_from(list(MsgType)), fields)
def test_frame_roundtrip(pid, mtype, fs):
    msg = WireMessage(pid, mtype, tuple(fs))
    back = decode_frame(msg.frame())
    assert back == msg
    assert len(msg.frame_bits()) == 8 * len(msg.frame())


@given(fields.filter(len))
def test_field_offsets_point_at_payload(fs):
    msg = WireMessage(1, MsgType.P1, tuple(fs))
    frame = msg.frame_bits()
    for i, f in enumerate(fs):
        off = msg.field_offset(i)
        assert frame[off:off + len(f)] == f
    assert msg.field_offset(0) == HEADER_BITS + 32


def test_tag_outside_frame():
    msg = WireMessage(1, MsgType.S2, (BitString.from_str("101"),))
    tagged = msg.with_fields(tag=BitString.zeros(16))
    assert tagged.frame() == msg.frame()


def test_field_lengths_are_framed():
    # "1" + "0" and "10" + "" must not frame alike.
    a = WireMessage(1, MsgType.S2, (BitString.from_str("1"), BitString.from_str("0")))
    b = WireMessage(1, MsgType.S2, (BitString.from_str("10"), BitString.zeros(0)))
    assert a.frame() != b.frame()


@pytest.mark.parametrize("data", [b"", b"\x01\x02\x01\x00\x00\x00",
                                  b"\x01\x02\x01\x00\x00\x00\x08\x00\x00\x00",
                                  b"\x01\x02\x00\x00\x00\x00\xff",
                                  b"\x01\x99\x00\x00\x00\x00"])
def test_malformed_frames(data):
    with pytest.raises(FrameError):
        decode_frame(data)


def test_describe_and_with_field():
    msg = WireMessage(3, MsgType.P2, (BitString.zeros(1), BitString.zeros(16)))
    assert msg.describe() == "P2[1,16]"
    assert msg.with_field(0, BitString.from_str("1")).fields[0].to_str() == "1"
    with pytest.raises(ValueError):
        WireMessage(256, MsgType.P2, ())

from ncdp.fec.base import ChannelCode, CodeSpec
from ncdp.fec.convolutional import ConvolutionalCode
from ncdp.fec.crc import CRC8, CRC16, CrcSpec, crc_append, crc_check, crc_compute
from ncdp.fec.registry import CodeRegistry

__all__ = [
    "ChannelCode", "CodeSpec", "ConvolutionalCode", "CodeRegistry",
    "CrcSpec", "CRC16", "CRC8", "crc_append", "crc_check", "crc_compute",
]

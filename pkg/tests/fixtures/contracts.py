"""Contracts in the shapes of published end-to-end examples, rewritten in the
in-repo concrete syntax: C++ member calls became plain names, character
literals became their codes, iterator ranges became index ranges."""

from specsynth.speclang import SpecLevel

PROP, FOL, PROP_SL, FOSL = SpecLevel.PROP, SpecLevel.FOL, SpecLevel.PROP_SL, SpecLevel.FOSL

# The two worked contracts: a descriptor lookup loop and a list copy-assignment.
WORKED = [
    ("contains_descriptor",
     "requires: true\n"
     "ensures: (__out == 1 ==> EXISTS(0, it, len(trans), trans[it] == descr)) && "
     "(__out == 0 ==> FORALL(0, it, len(trans), trans[it] != descr))",
     FOL),
    ("list_assign",
     "requires: SEPFORALL(0, i, rhs_len, rhs_head + i |-> _)\n"
     "ensures: out_len == rhs_len && SEPFORALL(0, i, rhs_len, out_head + i |-> rhs_head[i])",
     FOSL),
]

CASE_STUDY = [
    ("option_print",
     "requires: true\n"
     "ensures: __out == stream && SEPFORALL(0, i, len(ascii), stream + i |-> ascii[i])",
     FOSL),
    ("log_format",
     "requires: format != 0 && buffer != 0 && SEPFORALL(0, i, num_bytes, buffer + i |-> _)\n"
     "ensures: __out == -1 || (__out != -1 && SEPFORALL(0, i, __out, buffer + i |-> _))",
     FOSL),
    ("trace_buffer",
     "requires: size >= 0\n"
     "ensures: (size == 0 && __out == 0) || (size != 0 && __out != 0 && "
     "((__out |-> _) * (__out - 1 |-> _) * SEPFORALL(0, i, trace_len, __out - 1 - i |-> _)))",
     FOSL),
    ("is_printable",
     "requires: buffer != 0 && length >= 0 && SEPFORALL(0, i, length, buffer + i |-> _)\n"
     "ensures: (__out == 1 ==> SEPFORALL(0, i, length, buffer + i |-> sep_v && sep_v >= 32 "
     "&& sep_v < 127)) && (__out == 0 ==> SEPEXISTS(0, i, length, buffer + i |-> sep_v && "
     "(sep_v < 32 || sep_v >= 127)))",
     FOSL),
    ("indent",
     "requires: level >= 0 && spaces != 0\n"
     "ensures: __out == stream && SEPFORALL(0, i, level * spaces, stream + i |-> 32)",
     FOSL),
    ("print_attribute",
     "requires: good != 0\n"
     "ensures: __out == stream && SEPFORALL(0, i, 3, __out + i |-> sep_v && sep_v == attr[i])",
     FOSL),
    ("decode_two_bytes",
     "requires: (pc |-> _) * (pc + 1 |-> _)\n"
     "ensures: __out == ((pc[0] & 31) << 6) | (pc[1] & 63)",
     PROP_SL),
    ("decode_three_bytes",
     "requires: pc != 0 && ((pc |-> _) * (pc + 1 |-> _) * (pc + 2 |-> _))\n"
     "ensures: __out == ((pc[0] & 15) << 12) | ((pc[1] & 63) << 6) | (pc[2] & 63)",
     PROP_SL),
    ("peer_uri",
     "requires: peer != 0 && peer |-> _\n"
     "ensures: __out == peer[0]",
     PROP_SL),
    ("low_bits_mask",
     "requires: 0 <= num_bits && num_bits < 64\n"
     "ensures: __out == (1 << num_bits) - 1",
     PROP),
    ("list_is_set",
     "requires: true\n"
     "ensures: (__out == 1 ==> head != 0) && (__out == 0 ==> head == 0 || !(has_value != 0))",
     PROP),
    ("leaf_name",
     "requires: path != 0 && path_len > 0\n"
     "ensures: __out >= path && (__out == path || prev == 47 || prev == 92)",
     PROP),
    ("from_ascii",
     "requires: str != 0\n"
     "ensures: (__out == 1 ==> EXISTS(0, dummy, 1, parsed == 1)) && "
     "(__out == 0 ==> EXISTS(0, dummy, 1, parsed == 0))",
     FOL),
    ("guid_from_hex",
     "requires: len(buffer) >= 2 * size && FORALL(0, i, 2 * size, (buffer[i] >= 48 && "
     "buffer[i] <= 57) || (buffer[i] >= 65 && buffer[i] <= 70) || (buffer[i] >= 97 && "
     "buffer[i] <= 102))\n"
     "ensures: EXISTS(0, i, size, out[i] == ((table[buffer[2 * i] - 48] << 4) | "
     "table[buffer[2 * i + 1] - 48]))",
     FOL),
    ("blob_to_string",
     "requires: str != 0 && blob_len >= 0 && total >= 0\n"
     "ensures: __out == str_val && out_len == total && (blob_len < total ==> "
     "EXISTS(out_len - (total - blob_len), i, out_len, out[i] == 88))",
     FOL),
]

"""Tiny structural checker for the generated SVA subset.

Not a SystemVerilog parser.  It only verifies the structural invariants
the generator promises: balanced module/generate/begin/property regions,
every assert referencing a declared property, and genvar loops using
declared genvars.
"""

import re

_OPENERS = {
    "module": "endmodule",
    "generate": "endgenerate",
    "property": "endproperty",
    "begin": "end",
}
_CLOSERS = {v: k for k, v in _OPENERS.items()}

_PROP_DECL = re.compile(r"^property\s+(\w+);")
_ASSERT = re.compile(r"assert property\((?:@\(posedge \w+\) )?(\w+)\);")
_GENVAR = re.compile(r"^genvar\s+(\w+);")
_FOR = re.compile(r"for \((\w+) = 0; \1 < (\d+); \1\+\+\) begin : (\w+)")


class SvaStructureError(AssertionError):
    pass


def check_structure(text):
    """Raise SvaStructureError on a broken invariant; return a summary."""
    stack = []
    properties = set()
    asserts = []
    genvars = set()
    loops = []
    labels = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue

        m = _GENVAR.match(line)
        if m:
            genvars.add(m.group(1))
        m = _PROP_DECL.match(line)
        if m:
            properties.add(m.group(1))
        for m in _ASSERT.finditer(line):
            asserts.append((lineno, m.group(1)))
        for m in _FOR.finditer(line):
            var, bound, label = m.groups()
            loops.append((lineno, var, int(bound)))
            if label in labels:
                raise SvaStructureError(
                    f"line {lineno}: duplicate generate label {label}")
            labels.add(label)
            if var not in genvars:
                raise SvaStructureError(
                    f"line {lineno}: loop variable {var} is not a genvar")

        # "assert property(...)" is a reference, not a region opener
        scanned = _ASSERT.sub("", line)
        for word in re.findall(r"\b\w+\b", scanned):
            if word in _OPENERS:
                stack.append((word, lineno))
            elif word in _CLOSERS:
                if not stack or stack[-1][0] != _CLOSERS[word]:
                    raise SvaStructureError(
                        f"line {lineno}: unbalanced {word}")
                stack.pop()

    if stack:
        word, lineno = stack[-1]
        raise SvaStructureError(f"line {lineno}: unclosed {word}")
    for lineno, name in asserts:
        if name not in properties:
            raise SvaStructureError(
                f"line {lineno}: assert references undeclared property "
                f"{name}")
    return {"properties": properties, "asserts": len(asserts),
            "loops": loops}

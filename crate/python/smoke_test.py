"""Smoke test for the l42mu Python module.

Build and install first:  pip install --no-build-isolation crates/py
Then:                     python python/smoke_test.py
"""

import pathlib

import l42mu

CORPUS = pathlib.Path(__file__).resolve().parent.parent / "crates" / "core" / "corpus"


def main():
    ep = l42mu.compile_files([str(CORPUS / "expression_problem.l42mu")])
    assert "Example" in ep.declarations
    assert ep.run("Plus.of(Num.of(1),Num.of(2)).eval()", open="Example") == "3"
    assert ep.run("Plus.of(Num.of(1),Num.of(2)).double()", open="Example") == "Plus.of(Num.of(2), Num.of(4))"
    value, steps = ep.trace("Plus.of(Num.of(1),Num.of(2)).eval()", open="Example")
    assert value == "3" and steps and steps[-1][2] == "3"
    assert "coherent: yes" in ep.explain_coherence("Example.Plus")

    prog = l42mu.compile(
        "t={ method Int one(){return 1;} }\n"
        "C=Use t, { static method C of() method Int two(){return this.one() + 1;} }"
    )
    assert prog.run("C.of().two()") == "2"
    assert "method Int one() {return 1;}" in prog.flat()
    assert not prog.subtype("C", "Int")

    diags = l42mu.check((CORPUS / "cpoint_fail.l42mu").read_text(), name="cpoint_fail.l42mu")
    assert [d.code for d in diags] == ["NotCoherent"], diags
    assert str(diags[0]).startswith("cpoint_fail.l42mu:9:1: NotCoherent")

    try:
        l42mu.compile("t={ method Int m(A a){return a.ma();} }\nA=Use t, { method Int ma(){return 1;} }")
    except l42mu.CompileError as e:
        text, found = e.args
        assert found[0].code == "OrderError" and found[0].decl_index == 1, text
    else:
        raise AssertionError("mutual program compiled")

    try:
        prog.run("C.of().three()")
    except l42mu.RunError as e:
        assert e.args[1][0].code == "TypeError"
    else:
        raise AssertionError("ill-typed expression ran")

    assert l42mu.sum("{method Int a()}", "{method Int b()}") == "{\n  method Int a()\n  method Int b()\n}"
    try:
        l42mu.sum("{method Int a(){return 1;}}", "{method Int a(){return 2;}}")
    except l42mu.CompileError as e:
        assert "MethodClash" in e.args[0]
    else:
        raise AssertionError("clash not reported")

    for check in ["soundness", "wrong-count", "algebra", "getters"]:
        r = l42mu.fuzz(check, seed=5, count=20)
        assert r.check == check and r.cases == 20 and not r.violations, str(r)
    print("smoke test passed")


if __name__ == "__main__":
    main()

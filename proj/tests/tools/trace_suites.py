"""Throwaway line/arc tracer used to record execution results for the
end-to-end replay corpus. Not the production sandbox.

  trace_suites.py                         one job on stdin, one result on stdout
  trace_suites.py record OUT_DIR JSONL    run every suite in OUT_DIR/manifest.json
                                          and write {"suite_sha256", "result"} lines
"""
import ast
import hashlib
import importlib.util
import json
import os
import signal
import subprocess
import sys

PROTOCOL_VERSION = 1


def branch_arms(tree, first, last):
    """Static (from, to) arcs for every if/while/for inside the focal span."""
    arms = set()
    func = None
    for node in ast.walk(tree):
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)) and node.lineno >= first \
                and node.end_lineno <= last:
            if func is None or node.lineno < func.lineno:
                func = node
    if func is None:
        return arms, set()
    exit_line = -func.lineno
    parents = {}
    for node in ast.walk(func):
        for field in ("body", "orelse", "finalbody"):
            block = getattr(node, field, None)
            if isinstance(block, list):
                for i, stmt in enumerate(block):
                    parents[id(stmt)] = (node, block, i)
        for h in getattr(node, "handlers", []) or []:
            for i, stmt in enumerate(h.body):
                parents[id(stmt)] = (node, h.body, i)

    def successor(stmt):
        if stmt is func:
            return exit_line
        parent, block, i = parents[id(stmt)]
        if i + 1 < len(block):
            return block[i + 1].lineno
        if isinstance(parent, (ast.For, ast.While)) and block is parent.body:
            return parent.lineno
        return successor(parent)

    executable = set()
    for node in ast.walk(func):
        if isinstance(node, ast.stmt):
            executable.add(node.lineno)
        if isinstance(node, (ast.If, ast.While, ast.For)):
            arms.add((node.lineno, node.body[0].lineno))
            arms.add((node.lineno, node.orelse[0].lineno if node.orelse else successor(node)))
    body = func.body
    if body and isinstance(body[0], ast.Expr) and isinstance(getattr(body[0], "value", None), ast.Constant) \
            and isinstance(body[0].value.value, str):
        executable.discard(body[0].lineno)
    for d in func.decorator_list:
        executable.add(d.lineno)
    return arms, executable


class Tracer:
    def __init__(self, module_path, first, last, name):
        self.path = os.path.realpath(module_path)
        self.first, self.last, self.name = first, last, name
        self.reset()

    def reset(self):
        self.lines, self.arcs, self.called = set(), set(), False
        self.prev = {}

    def in_span(self, frame):
        return os.path.realpath(frame.f_code.co_filename) == self.path

    def global_trace(self, frame, event, arg):
        if event != "call" or not self.in_span(frame):
            return None
        code = frame.f_code
        if code.co_name == self.name and self.first <= code.co_firstlineno <= self.last:
            self.called = True
        return self.local_trace

    def local_trace(self, frame, event, arg):
        line = frame.f_lineno
        if event == "line":
            if self.first <= line <= self.last:
                self.lines.add(line)
            prev = self.prev.get(id(frame))
            if prev is not None:
                self.arcs.add((prev, line))
            self.prev[id(frame)] = line
        elif event == "return":
            prev = self.prev.pop(id(frame), None)
            if prev is not None:
                self.arcs.add((prev, -frame.f_code.co_firstlineno))
        return self.local_trace


def run_job(job):
    focal = job["focal"]
    first, last = focal["first_line"], focal["last_line"]
    sys.path.insert(0, job["repo_root"])
    with open(focal["module_path"]) as fh:
        tree = ast.parse(fh.read())
    arms, executable = branch_arms(tree, first, last)
    name = focal["qualified_name"].rsplit(".", 1)[-1]
    tracer = Tracer(focal["module_path"], first, last, name)

    def span_arcs():
        return sorted([list(a) for a in tracer.arcs if a in arms])

    sys.settrace(tracer.global_trace)
    spec = importlib.util.spec_from_file_location("generated_suite", job["suite_file"])
    suite = importlib.util.module_from_spec(spec)
    try:
        spec.loader.exec_module(suite)
        load_error = None
    except BaseException as e:  # noqa: BLE001 - a broken suite is a result, not a crash
        load_error = e
    sys.settrace(None)
    load = {"lines": sorted(tracer.lines & executable), "branches": span_arcs()}

    tests = []
    names = [] if load_error else [n for n in vars(suite) if n.startswith("test_") and callable(vars(suite)[n])]

    def alarm(signum, frame):
        raise TimeoutError()

    signal.signal(signal.SIGALRM, alarm)
    for n in names:
        tracer.reset()
        status = "pass"
        signal.setitimer(signal.ITIMER_REAL, job["timeout"])
        sys.settrace(tracer.global_trace)
        try:
            vars(suite)[n]()
        except TimeoutError:
            status = "timeout"
        except AssertionError:
            status = "fail"
        except BaseException:  # noqa: BLE001
            status = "error"
        finally:
            sys.settrace(None)
            signal.setitimer(signal.ITIMER_REAL, 0)
        tests.append({
            "test_name": n,
            "status": status,
            "called_focal": tracer.called,
            "covered_lines": sorted(tracer.lines & executable),
            "covered_branches": span_arcs(),
        })
    return {
        "protocol_version": PROTOCOL_VERSION,
        "tests": tests,
        "module_load_coverage": load,
        "executable_lines": sorted(executable),
        "branch_arms": sorted([list(a) for a in arms]),
    }


def record(out_dir, jsonl):
    with open(os.path.join(out_dir, "manifest.json")) as fh:
        index = json.load(fh)
    lines = []
    for s in index["suites"]:
        suite_file = os.path.abspath(os.path.join(out_dir, s["suite_file"]))
        job = {
            "protocol_version": PROTOCOL_VERSION,
            "suite_file": suite_file,
            "repo_root": s["repo_root"],
            "focal": {k: s[k] for k in ("module_path", "module_name", "qualified_name",
                                         "first_line", "last_line")},
            "timeout": 10,
            "suite_timeout": 120,
        }
        proc = subprocess.run([sys.executable, os.path.abspath(__file__)], input=json.dumps(job),
                              capture_output=True, text=True, cwd=os.path.dirname(suite_file), check=True)
        with open(suite_file, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
        lines.append(json.dumps({"suite_sha256": digest, "suite_file": s["suite_file"],
                                 "result": json.loads(proc.stdout)}, sort_keys=True))
    with open(jsonl, "w") as fh:
        fh.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    if len(sys.argv) == 4 and sys.argv[1] == "record":
        record(sys.argv[2], sys.argv[3])
    else:
        job = json.loads(sys.stdin.read())
        if job.get("protocol_version") != PROTOCOL_VERSION:
            sys.stderr.write("unsupported protocol_version\n")
            sys.exit(2)
        # Suites may print; keep fd 1 for the result document only.
        result_fd = os.dup(1)
        os.dup2(2, 1)
        result = run_job(job)
        sys.stdout.flush()
        os.write(result_fd, (json.dumps(result) + "\n").encode())

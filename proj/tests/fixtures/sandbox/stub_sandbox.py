"""Stand-in for the execution sandbox: reads one job, answers per argv mode."""
import json
import sys

mode = sys.argv[1] if len(sys.argv) > 1 else "ok"
job = json.loads(sys.stdin.read())

if mode == "crash":
    sys.stderr.write("tracer blew up\n")
    sys.exit(3)
if mode == "garbage":
    print("this is not json")
    sys.exit(0)
if mode == "sleep":
    import time
    time.sleep(30)

focal = job["focal"]
result = {
    "protocol_version": 2 if mode == "version" else job["protocol_version"],
    "tests": [
        {
            "test_name": "test_a",
            "status": "pass",
            "called_focal": True,
            "covered_lines": [focal["first_line"] + 1],
            "covered_branches": [[focal["first_line"] + 1, -focal["first_line"]]],
        },
        {
            "test_name": job["suite_file"],
            "status": "fail",
            "called_focal": False,
            "covered_lines": [],
            "covered_branches": [],
        },
    ],
    "module_load_coverage": {"lines": [focal["first_line"]], "branches": []},
    "executable_lines": list(range(focal["first_line"] + 1, focal["last_line"] + 1)),
    "branch_arms": [[focal["first_line"] + 1, -focal["first_line"]]],
}
print(json.dumps(result))

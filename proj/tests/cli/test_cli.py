"""Contract tests for the fracop command-line front end.

usage: test_cli.py <fracop binary> <schema dir> <scratch dir>
"""

import json
import math
import os
import struct
import subprocess
import sys
import unittest

import jsonschema

CLI, SCHEMAS, TMP = sys.argv[1:4]
TMP = os.path.join(TMP, "cli")


def run(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True, timeout=600)


def write_field(path, values, extent=math.pi, label="probe"):
    header = json.dumps({"n": 1, "extent": extent, "points": len(values), "label": label}, separators=(",", ":"))
    with open(path, "wb") as f:
        f.write(header.encode() + b"\n")
        f.write(struct.pack("<%dd" % len(values), *values))


def read_field(path):
    with open(path, "rb") as f:
        header = json.loads(f.readline())
        raw = f.read()
    return header, list(struct.unpack("<%dd" % (len(raw) // 8), raw))


def samples(fn, n=64, extent=math.pi):
    h = 2 * extent / n
    return [fn(-extent + i * h) for i in range(n)]


class Contract(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        os.makedirs(TMP, exist_ok=True)
        cls.field = os.path.join(TMP, "f.bin")
        write_field(cls.field, samples(lambda x: math.cos(2 * x) + 0.3 * math.sin(5 * x)))

    def validated(self, proc, command):
        doc = json.loads(proc.stdout)
        with open(os.path.join(SCHEMAS, command + ".schema.json")) as f:
            jsonschema.validate(doc, json.load(f))
        return doc

    def assert_error_line(self, proc, category):
        lines = proc.stderr.strip().splitlines()
        self.assertEqual(len(lines), 1, proc.stderr)
        self.assertTrue(lines[0].startswith("error: " + category + ": "), lines[0])

    def test_missing_required_flag_is_usage_error(self):
        proc = run("apply-op", "--in", self.field)
        self.assertEqual(proc.returncode, 2)
        self.assert_error_line(proc, "usage")

    def test_unknown_kernel_is_usage_error(self):
        proc = run("eval-kernel", "--K", "nope:1", "--z1", "0.5", "--z2", "-0.5")
        self.assertEqual(proc.returncode, 2)
        self.assert_error_line(proc, "param")

    def test_missing_file_is_usage_error(self):
        proc = run("seminorm", "--kind", "bmo", "--in", os.path.join(TMP, "absent.bin"))
        self.assertEqual(proc.returncode, 2)

    def test_apply_op_round_trip(self):
        out = os.path.join(TMP, "laps.bin")
        proc = run("apply-op", "--op", "laps", "--s", "1", "--in", self.field, "--out", out)
        self.assertEqual(proc.returncode, 0, proc.stderr)
        doc = self.validated(proc, "apply-op")
        self.assertEqual(doc["config"]["s"], 1.0)
        header, values = read_field(out)
        self.assertEqual(header["points"], 64)
        expect = samples(lambda x: 2 * math.cos(2 * x) + 1.5 * math.sin(5 * x))
        self.assertLess(max(abs(a - b) for a, b in zip(values, expect)), 1e-12)

    def test_config_file_is_overridden_by_flags(self):
        cfg = os.path.join(TMP, "cfg.json")
        with open(cfg, "w") as f:
            json.dump({"op": "laps", "s": 0.3}, f)
        out = os.path.join(TMP, "cfg_out.bin")
        proc = run("apply-op", "--config", cfg, "--op", "laps", "--s", "0.7", "--in", self.field, "--out", out)
        self.assertEqual(proc.returncode, 0, proc.stderr)
        self.assertEqual(self.validated(proc, "apply-op")["config"]["s"], 0.7)

    def test_eval_kernel(self):
        proc = run("eval-kernel", "--K", "checkerboard:1,2", "--z1", "0.5", "--z2", "-0.7", "--tail-study")
        self.assertEqual(proc.returncode, 0, proc.stderr)
        row = self.validated(proc, "eval-kernel")["rows"][0]
        self.assertAlmostEqual(row["delta"], 1.2, places=12)
        self.assertLessEqual(row["tail_change"], row["tail_bound"])

    def test_solve_with_constant_kernel_takes_one_iteration(self):
        rhs = os.path.join(TMP, "rhs.bin")
        write_field(rhs, samples(lambda x: math.cos(2 * x)))
        proc = run("solve", "--K", "constant:1", "--rhs", rhs, "--out", os.path.join(TMP, "u.bin"))
        self.assertEqual(proc.returncode, 0, proc.stderr)
        self.assertEqual(self.validated(proc, "solve")["iterations"], 1)

    def test_solve_manufactured(self):
        proc = run("solve", "--K", "smooth_perturbation:0.05")
        self.assertEqual(proc.returncode, 0, proc.stderr)
        self.assertTrue(self.validated(proc, "solve")["manufactured"]["pass"])

    def test_size_check_with_constant_kernel_is_an_honest_failure(self):
        # K = 1 gives A = 0 identically, so there is no decay to fit
        proc = run("verify-estimates", "--check", "size", "--n", "1", "--s", "0.5", "--s1", "0.5",
                   "--K", "constant:1", "--seed", "7")
        self.assertEqual(proc.returncode, 1)
        doc = self.validated(proc, "verify-estimates")
        self.assertFalse(doc["pass"])
        self.assertIsNone(doc["measured"])

    def test_verify_checks_validate(self):
        for check in ["size", "hoelder", "M-decay", "opnorm", "bmo", "lemmas"]:
            with self.subTest(check=check):
                args = ["verify-estimates", "--check", check, "--K", "checkerboard:1,2", "--seed", "7"]
                if check in ("size", "M-decay"):
                    args += ["--sweep", "0.25:4:5"]
                proc = run(*args)
                self.assertIn(proc.returncode, (0, 1), proc.stderr)
                doc = self.validated(proc, "verify-estimates")
                self.assertEqual(doc["check"], check)
                self.assertEqual(proc.returncode == 0, doc["pass"])

    def test_quad_selftest(self):
        proc = run("quad-selftest", "--draws", "2000")
        self.assertEqual(proc.returncode, 0, proc.stderr)
        self.assertTrue(self.validated(proc, "quad-selftest")["pass"])

    def test_seminorms(self):
        for kind in ["gagliardo", "bmo", "weak_l1", "lp"]:
            with self.subTest(kind=kind):
                proc = run("seminorm", "--kind", kind, "--s", "0.3", "--p", "2", "--in", self.field)
                self.assertEqual(proc.returncode, 0, proc.stderr)
                self.assertGreater(self.validated(proc, "seminorm")["value"], 0.0)

    def test_threads_do_not_change_bytes(self):
        outs = []
        for threads in ("1", "3"):
            proc = run("--threads", threads, "verify-estimates", "--check", "lemmas", "--seed", "3", "--draws", "5000")
            outs.append(proc.stdout)
        self.assertEqual(outs[0], outs[1])


if __name__ == "__main__":
    unittest.main(argv=[sys.argv[0], "-v"])

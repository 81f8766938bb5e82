import json
import socket
import subprocess
import sys
import threading
import time

import pytest

CLI = [sys.executable, "-m", "arith_ae"]


def run_cli(*args, env=None):
    return subprocess.run(
        CLI + list(args), capture_output=True, text=True, timeout=300, env=env
    )


class TestStats:
    def test_csv_golden_small(self):
        r = run_cli("stats", "--fn", "big_omega", "--n", "1000", "--grid", "list:1000")
        assert r.returncode == 0, r.stderr
        lines = r.stdout.strip().split("\n")
        assert lines[0] == (
            "n,mean,variance,a_n,a_n_star,d_n,d_n_star,"
            "mean_drift,cheb_fraction,env_violation"
        )
        row = lines[1].split(",")
        assert row[0] == "1000"
        # mean of Omega over 1..1000 is 2.877, checked against a direct count
        assert float(row[1]) == pytest.approx(2.877, abs=1e-12)

    def test_json_format(self):
        r = run_cli("stats", "--fn", "small_omega", "--n", "1000", "--format", "json")
        assert r.returncode == 0
        body = json.loads(r.stdout)
        assert body["fn"] == "small_omega"
        assert body["rows"][-1]["n"] == 1000

    def test_out_file(self, tmp_path):
        path = tmp_path / "rows.csv"
        r = run_cli("stats", "--fn", "small_omega", "--n", "1000", "--out", str(path))
        assert r.returncode == 0
        assert r.stdout == ""
        assert path.read_text().startswith("n,mean,")

    def test_worker_bytes_identical(self):
        a = run_cli("stats", "--fn", "log_phi", "--n", "10000", "--workers", "1")
        b = run_cli("stats", "--fn", "log_phi", "--n", "10000", "--workers", "4")
        assert a.returncode == b.returncode == 0
        assert a.stdout == b.stdout

    def test_unknown_function_exit_2(self):
        r = run_cli("stats", "--fn", "no_such_fn", "--n", "1000")
        assert r.returncode == 2
        assert "no_such_fn" in r.stderr

    def test_bad_grid_exit_2(self):
        r = run_cli("stats", "--fn", "big_omega", "--n", "1000", "--grid", "list:9,8")
        assert r.returncode == 2

    def test_capacity_exit_3(self):
        import os

        env = dict(os.environ, ARITH_AE_SIEVE_LIMIT="10000")
        r = run_cli("stats", "--fn", "big_omega", "--n", "100000", env=env)
        assert r.returncode == 3
        assert "sieve" in r.stderr.lower() or "capacity" in r.stderr.lower()


class TestOtherCommands:
    def test_primesums_csv(self):
        r = run_cli("primesums", "--law", "recip", "--n", "10000")
        assert r.returncode == 0
        lines = r.stdout.strip().split("\n")
        assert lines[0] == "x,sum,reference,drift,stabilization"
        assert len(lines) == 3

    def test_primesums_powers_flag(self):
        plain = run_cli("primesums", "--law", "lnp", "--n", "10000", "--format", "json")
        powers = run_cli(
            "primesums", "--law", "lnp", "--n", "10000", "--powers", "--format", "json"
        )
        s0 = json.loads(plain.stdout)["rows"][-1]["sum"]
        s1 = json.loads(powers.stdout)["rows"][-1]["sum"]
        assert s1 > s0

    def test_classify_json(self):
        # the convergence probe needs three checkpoints, so use 10^5
        r = run_cli("classify", "--fn", "log_ratio_phi", "--n", "100000")
        assert r.returncode == 0
        body = json.loads(r.stdout)
        assert body["class_t"] == "YesBySufficientCondition"
        assert "A4" in body["assertions"]
        assert body["statement"]["form_id"] == "SlowGrowthBound"

    def test_concentration_csv(self):
        r = run_cli(
            "concentration", "--fn", "small_omega", "--n", "1000", "--b", "1,2"
        )
        assert r.returncode == 0
        lines = r.stdout.strip().split("\n")
        assert lines[0] == "n,b,radius,inside_fraction,chebyshev_bound"
        assert len(lines) == 3

    def test_concentration_bad_b_exit_2(self):
        r = run_cli("concentration", "--fn", "small_omega", "--n", "1000", "--b", "x")
        assert r.returncode == 2


@pytest.fixture(scope="module")
def server_url():
    import uvicorn

    from arith_ae.webapp import create_app

    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    config = uvicorn.Config(create_app(), host="127.0.0.1", port=port, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 30
    while not server.started:
        if time.monotonic() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.05)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=10)


class TestServerMode:
    def test_stats_matches_local_bytes(self, server_url):
        local = run_cli("stats", "--fn", "small_omega", "--n", "10000")
        remote = run_cli(
            "stats", "--fn", "small_omega", "--n", "10000", "--server", server_url
        )
        assert remote.returncode == 0, remote.stderr
        assert remote.stdout == local.stdout

    def test_server_error_mapped_to_exit_2(self, server_url):
        r = run_cli("stats", "--fn", "nope", "--n", "1000", "--server", server_url)
        assert r.returncode == 2

    def test_unreachable_server_exit_2(self):
        r = run_cli(
            "stats", "--fn", "small_omega", "--n", "1000",
            "--server", "http://127.0.0.1:9",
        )
        assert r.returncode == 2

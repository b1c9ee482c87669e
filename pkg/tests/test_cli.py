import struct
import subprocess
import sys

import numpy as np
import pytest

from asap import Index
from asap.cli import BENCH_HEADER, main
from asap.indexfile import MAGIC, read_sections, write_sections
from asap.errors import FormatError

from oracles import ALABAR


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def alabar_file(tmp_path):
    path = tmp_path / "alabar.txt"
    path.write_text(ALABAR, encoding="utf-8")
    return path


@pytest.fixture
def alabar_index(tmp_path, alabar_file, capsys):
    out = tmp_path / "alabar.idx"
    assert run(capsys, "build", alabar_file, "--chars", "--scheme", "sparse", "-o", out)[0] == 0
    return out


def partition_lines(out):
    return [ln.split(": ", 1)[1] for ln in out.splitlines() if ln.startswith("partition ")]


def test_partition_listing(tmp_path, alabar_file, alabar_index, capsys):
    code, out, _ = run(capsys, "info", alabar_index, "--partitions")
    assert code == 0
    assert partition_lines(out) == ["a", "_ l", "b r", "d"]
    dense = tmp_path / "dense.idx"
    run(capsys, "build", alabar_file, "--chars", "--scheme", "dense:1", "-o", dense)
    assert partition_lines(run(capsys, "info", dense, "--partitions")[1]) == ["a", "_ l", "b d r"]


def test_queries(alabar_index, capsys):
    code, out, _ = run(capsys, "query", alabar_index, "rank", "a", "5", "select", "r", "2",
                       "access", "19", "snippet", "7", "4")
    assert code == 0
    assert out.splitlines() == ["3", "18", "d", "_ a _ l"]
    code, out, _ = run(capsys, "snippet", alabar_index, 7, 4)
    assert code == 0 and out.strip() == "_ a _ l"


def test_query_errors_exit_2(alabar_index, tmp_path, capsys):
    qfile = tmp_path / "q.txt"
    qfile.write_text("rank a 5\naccess 99\nselect z 1\nrank l 10\n")
    code, out, _ = run(capsys, "query", alabar_index, "--file", qfile)
    lines = out.splitlines()
    assert code == 2
    assert lines[0] == "3" and lines[3] == "2"
    assert lines[1].startswith("error:") and lines[2].startswith("error:")


def test_build_errors(tmp_path, capsys):
    empty = tmp_path / "empty.tok"
    empty.write_bytes(b"")
    code, _, err = run(capsys, "build", empty, "-o", tmp_path / "x.idx")
    assert code == 1 and "error" in err
    code, _, _ = run(capsys, "build", tmp_path / "missing", "-o", tmp_path / "x.idx")
    assert code == 1
    with pytest.raises(SystemExit):
        main(["build", str(empty), "-o", "x", "--structure", "nope"])


def test_determinism_and_round_trip(tmp_path, alabar_file, capsys):
    a, b = tmp_path / "a.idx", tmp_path / "b.idx"
    for out in (a, b):
        run(capsys, "build", alabar_file, "--chars", "-o", out)
    assert a.read_bytes() == b.read_bytes()
    index = Index.load(a)
    assert index.to_bytes() == a.read_bytes()


def test_version_and_checksum(tmp_path, alabar_index, capsys):
    buf = bytearray(alabar_index.read_bytes())
    newer = bytearray(buf)
    newer[len(MAGIC)] += 1
    bad = tmp_path / "newer.idx"
    bad.write_bytes(bytes(newer))
    code, _, err = run(capsys, "info", bad)
    assert code == 1 and "version" in err
    corrupt = bytearray(buf)
    corrupt[-5] ^= 0xFF
    bad.write_bytes(bytes(corrupt))
    code, _, err = run(capsys, "info", bad)
    assert code == 1 and "checksum" in err


def test_unknown_sections_are_skipped():
    body = write_sections([(b"ZZZZ", b"whatever"), (b"META", b"{}")])
    secs = read_sections(body)
    assert secs[b"META"] == b"{}"
    with pytest.raises(FormatError):
        read_sections(b"NOPE" + body[4:])


def test_count_matches_oracle_file(tmp_path, capsys):
    tok = tmp_path / "rep.tok"
    idx = tmp_path / "rep.idx"
    assert run(capsys, "gen", "repetitive", "-o", tok, "--base", 2000, "--copies", 20,
               "--sigma", 40, "--seed", 1)[0] == 0
    assert run(capsys, "build", tok, "--fm", "-o", idx)[0] == 0
    pats, oracle = tmp_path / "p.txt", tmp_path / "o.txt"
    assert run(capsys, "patterns", idx, "-o", pats, "--oracle", oracle, "--count", 50000,
               "--length", 8, "--absent", 0.1, "--seed", 2)[0] == 0
    assert len(pats.read_text().splitlines()) == 50000
    code, out, _ = run(capsys, "count", idx, pats)
    assert code == 0 and out == oracle.read_text()
    # the oracle file itself agrees with a direct scan on a sample
    text = np.fromfile(tok, dtype="<u4").astype(np.int64)
    for line, want in list(zip(pats.read_text().splitlines(), oracle.read_text().split()))[:40]:
        p = np.array(line.split(), dtype=np.int64)
        win = np.lib.stride_tricks.sliding_window_view(text, p.shape[0])
        assert int(np.all(win == p, axis=1).sum()) == int(want)


def test_bench(tmp_path, alabar_index, capsys):
    wl = tmp_path / "w.txt"
    assert run(capsys, "workload", alabar_index, "-o", wl, "--count", 20, "--seed", 3)[0] == 0
    code, out, _ = run(capsys, "bench", alabar_index, "--workload", wl, "--repeat", 2)
    rows = out.splitlines()
    assert code == 0 and rows[0] == BENCH_HEADER
    assert BENCH_HEADER == "operation,n_queries,total_ns,ns_per_op,index_bits,bits_per_symbol"
    assert {r.split(",")[0] for r in rows[1:]} >= {"rank", "select", "access"}
    assert all(float(r.split(",")[5]) >= 2.22 for r in rows[1:])
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    code, out, _ = run(capsys, "bench", alabar_index, "--workload", empty)
    assert code == 0 and out.splitlines() == [BENCH_HEADER]


def test_bench_repeats_are_monotone(tmp_path, alabar_index, capsys):
    wl = tmp_path / "w.txt"
    run(capsys, "workload", alabar_index, "-o", wl, "--count", 30, "--seed", 4)
    code, out, _ = run(capsys, "bench", alabar_index, "--workload", wl, "--repeat", 5, "--per-repeat")
    by_op = {}
    for row in out.splitlines()[1:]:
        f = row.split(",")
        by_op.setdefault(f[0], []).append(float(f[3]))
    assert by_op
    for series in by_op.values():
        assert len(series) == 5
        assert all(b <= a for a, b in zip(series, series[1:]))


def test_collection_commands(tmp_path, capsys):
    docs = tmp_path / "docs.txt"
    docs.write_text("The cat sat.\nthe dog sat\na cat ran\n", encoding="utf-8")
    idx = tmp_path / "docs.idx"
    assert run(capsys, "build", docs, "--text", "--docs-per-line", "-o", idx)[0] == 0
    assert run(capsys, "intersect", idx, "cat", "sat")[1].split() == ["1"]
    assert run(capsys, "intersect", idx, "sat", "the")[1].split() == ["1", "2"]
    assert run(capsys, "intersect", idx, "cat", "unicorn")[1].split() == []
    code, out, _ = run(capsys, "verify", idx, "--source", docs, "--docs-per-line", "--queries", 50)
    assert code == 0


def test_simulate_and_verify(alabar_index, tmp_path, capsys):
    code, out, _ = run(capsys, "simulate", alabar_index, "--cost", "ops", "--queries", 100, "--seed", 1)
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "operation,asap_time_us,asap_speedup,ap_time_us,ap_speedup,ap_over_asap"
    assert [ln.split(",")[0] for ln in lines[1:]] == ["rank", "select", "access", "snippet"]
    assert run(capsys, "verify", alabar_index, "--queries", 100)[0] == 0


def test_runs_structure_and_bwt(tmp_path, capsys):
    tok = tmp_path / "runs.tok"
    run(capsys, "gen", "runs", "-o", tok, "--n", 5000, "--r", 50, "--sigma", 30, "--seed", 1)
    idx = tmp_path / "runs.idx"
    assert run(capsys, "build", tok, "--structure", "raps", "-o", idx)[0] == 0
    code, out, _ = run(capsys, "info", idx)
    assert "structure: raps" in out and "r: 50" in out
    assert run(capsys, "verify", idx, "--source", tok, "--queries", 100)[0] == 0
    bwt = tmp_path / "runs.bwt"
    assert run(capsys, "bwt", tok, "-o", bwt)[0] == 0
    assert bwt.stat().st_size == tok.stat().st_size + 4


def test_module_entry_point(alabar_index):
    res = subprocess.run([sys.executable, "-m", "asap", "query", str(alabar_index), "rank", "a", "5"],
                         capture_output=True, text=True, timeout=300)
    assert res.returncode == 0 and res.stdout.strip() == "3"


def test_token_files_are_little_endian_u32(tmp_path, capsys):
    tok = tmp_path / "t.tok"
    tok.write_bytes(struct.pack("<5I", 7, 7, 1, 300000, 7))
    idx = tmp_path / "t.idx"
    assert run(capsys, "build", tok, "-o", idx)[0] == 0
    assert run(capsys, "query", idx, "rank", "7", "5", "access", "4")[1].split() == ["3", "300000"]
